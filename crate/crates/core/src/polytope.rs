//! Facets and symmetries of correlation polytopes: symmetric (party
//! permutation invariant) coordinates, V <-> H conversion by double
//! description, and canonical forms of inequalities under relabelings.

pub mod dd;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::correlators::{Pattern, Slot};
use crate::error::{Error, Result};
use crate::inequality::{BellInequality, Space};
use crate::model::ModelSpec;
use crate::point::ExactPoint;
use crate::scalar::{rational_int, Rational};
use crate::scenario::Scenario;
use crate::vertices::VertexSet;
pub use dd::{DdObserver, DdState, CHECKPOINT_INTERVAL};

// ---------------------------------------------------------------------------
// symmetric coordinates

/// Class of a pattern under party permutations: counts of setting-0 and
/// setting-1 slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymmetricClass {
    pub zeros: usize,
    pub ones: usize,
}

impl SymmetricClass {
    pub fn weight(&self) -> usize {
        self.zeros + self.ones
    }

    pub fn of(pattern: &Pattern) -> Self {
        let slots = pattern.slots();
        Self {
            zeros: slots.iter().filter(|s| **s == Slot::Setting(0)).count(),
            ones: slots.iter().filter(|s| **s == Slot::Setting(1)).count(),
        }
    }

    /// Number of patterns in the class, `n! / (I! 0! 1!)`.
    pub fn size(&self, n: usize) -> u64 {
        binomial(n, self.weight()) * binomial(self.weight(), self.ones)
    }

    /// Compact label such as `"0011"` with trailing `I`s.
    pub fn label(&self, n: usize) -> alloc::string::String {
        let mut s = alloc::string::String::new();
        s.extend(core::iter::repeat_n('0', self.zeros));
        s.extend(core::iter::repeat_n('1', self.ones));
        s.extend(core::iter::repeat_n('I', n - self.weight()));
        s
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Classes ordered by weight, then by the number of setting-1 slots.
pub fn symmetric_classes(scenario: &Scenario) -> Vec<SymmetricClass> {
    let n = scenario.n_parties();
    (1..=n).flat_map(|w| (0..=w).map(move |ones| SymmetricClass { zeros: w - ones, ones })).collect()
}

fn class_index(c: &SymmetricClass) -> usize {
    // classes of weight < w come first: sum_{k<w}(k+1) - 1
    let w = c.weight();
    (w * (w + 1)) / 2 - 1 + c.ones
}

/// Averages of the correlators over each symmetric class; length
/// `C(n+2, 2) - 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SymmetricCoordinates {
    pub scenario: Scenario,
    pub coords: Vec<Rational>,
}

/// Projects correlator coordinates onto symmetric coordinates.
pub fn symmetrize(scenario: &Scenario, correlators: &[Rational]) -> SymmetricCoordinates {
    let n = scenario.n_parties();
    let classes = symmetric_classes(scenario);
    let mut sums = alloc::vec![Rational::zero(); classes.len()];
    for (pattern, c) in Pattern::all(scenario).zip(correlators) {
        sums[class_index(&SymmetricClass::of(&pattern))] += c.clone();
    }
    let coords = sums
        .into_iter()
        .zip(&classes)
        .map(|(s, c)| s / rational_int(c.size(n) as i64))
        .collect();
    SymmetricCoordinates { scenario: *scenario, coords }
}

/// Symmetric projections of all vertices, deduplicated (first occurrence kept).
pub fn symmetrize_vertices(vertices: &VertexSet) -> Result<Vec<SymmetricCoordinates>> {
    let v = vertices.to_space(Space::Correlator)?;
    let s = v.scenario();
    let points: Vec<ExactPoint> = v
        .points()
        .iter()
        .map(|p| ExactPoint::from_rationals(&symmetrize(&s, &p.to_rationals()).coords))
        .collect::<Result<_>>()?;
    Ok(crate::vertices::dedup_stable(points)
        .into_iter()
        .map(|p| SymmetricCoordinates { scenario: s, coords: p.to_rationals() })
        .collect())
}

/// Inequality over symmetric coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricInequality {
    pub scenario: Scenario,
    pub coeffs: Vec<Rational>,
    pub bound: Rational,
}

impl SymmetricInequality {
    pub fn value(&self, point: &SymmetricCoordinates) -> Rational {
        self.coeffs.iter().zip(&point.coords).map(|(a, b)| a * b).sum()
    }
}

/// Full-correlator inequality whose coefficients are equal across each
/// class; evaluates identically on any behavior and its symmetric projection.
pub fn lift_symmetric(ineq: &SymmetricInequality) -> Result<BellInequality> {
    let s = ineq.scenario;
    let n = s.n_parties();
    let classes = symmetric_classes(&s);
    if ineq.coeffs.len() != classes.len() {
        return Err(Error::LengthMismatch { expected: classes.len(), found: ineq.coeffs.len() });
    }
    let coeffs = Pattern::all(&s)
        .map(|p| {
            let c = SymmetricClass::of(&p);
            &ineq.coeffs[class_index(&c)] / rational_int(c.size(n) as i64)
        })
        .collect();
    BellInequality::new(s, Space::Correlator, coeffs, ineq.bound.clone())
}

/// Symmetric form of a permutation-invariant inequality (`None` if the
/// coefficients differ within a class).
pub fn project_symmetric(ineq: &BellInequality) -> Option<SymmetricInequality> {
    let s = ineq.scenario();
    let n = s.n_parties();
    let corr = ineq.to_correlator_form();
    let classes = symmetric_classes(&s);
    let mut coeffs: Vec<Option<Rational>> = alloc::vec![None; classes.len()];
    for (p, c) in Pattern::all(&s).zip(corr.coeffs()) {
        let class = SymmetricClass::of(&p);
        let slot = &mut coeffs[class_index(&class)];
        match slot {
            None => *slot = Some(c.clone()),
            Some(prev) if prev == c => {}
            Some(_) => return None,
        }
    }
    let coeffs = coeffs
        .into_iter()
        .zip(&classes)
        .map(|(c, class)| c.unwrap_or_else(Rational::zero) * rational_int(class.size(n) as i64))
        .collect();
    Some(SymmetricInequality { scenario: s, coeffs, bound: corr.bound().clone() })
}

// ---------------------------------------------------------------------------
// V <-> H

/// `normal·x <= rhs` (or `=` for equalities), with coprime integer entries.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: Vec<Rational>,
    pub rhs: Rational,
}

impl Halfspace {
    pub fn value(&self, x: &[Rational]) -> Rational {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn is_valid_on(&self, x: &[Rational]) -> bool {
        self.value(x) <= self.rhs
    }

    pub fn is_tight_on(&self, x: &[Rational]) -> bool {
        self.value(x) == self.rhs
    }
}

/// H-representation: affine-hull equalities plus facet inequalities.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HRepresentation {
    pub equalities: Vec<Halfspace>,
    pub facets: Vec<Halfspace>,
}

fn integer_halfspace(normal: Vec<BigInt>, rhs: BigInt) -> Halfspace {
    Halfspace {
        normal: normal.into_iter().map(Rational::from_integer).collect(),
        rhs: Rational::from_integer(rhs),
    }
}

/// Affine hull of `points`: pivot coordinates parametrizing it and its
/// equations.
fn affine_hull(points: &[Vec<Rational>]) -> (Vec<usize>, Vec<Halfspace>) {
    let d = points[0].len();
    let diffs: Vec<Vec<Rational>> =
        points[1..].iter().map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect()).collect();
    let (r, pivots) = dd::rref(diffs, d);
    let mut equalities = Vec::new();
    for k in (0..d).filter(|k| !pivots.contains(k)) {
        // e_k - sum_t r[t][k] e_{pivot t} annihilates every difference
        let mut e = alloc::vec![Rational::zero(); d];
        e[k] = Rational::one();
        for (t, &pc) in pivots.iter().enumerate() {
            e[pc] = -r[t][k].clone();
        }
        let l = e.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut ints: Vec<BigInt> = e.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        for x in ints.iter_mut() {
            *x = &*x / &g;
        }
        let h = Halfspace { normal: ints.into_iter().map(Rational::from_integer).collect(), rhs: Rational::zero() };
        let rhs = h.value(&points[0]);
        equalities.push(Halfspace { rhs, ..h });
    }
    (pivots, equalities)
}

/// Facets of `conv(points)`, computed inside the affine hull and re-embedded
/// (normals vanish off the hull's pivot coordinates).
pub fn enumerate_facets(points: &[Vec<Rational>]) -> Result<HRepresentation> {
    enumerate_facets_with(points, None, &mut ())
}

pub fn enumerate_facets_with(
    points: &[Vec<Rational>],
    resume: Option<DdState>,
    observer: &mut dyn DdObserver,
) -> Result<HRepresentation> {
    let first = points.first().ok_or(Error::EmptyPointSet)?;
    let d = first.len();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::DimensionMismatch("points of different lengths".into()));
    }
    let (pivots, equalities) = affine_hull(points);
    if pivots.is_empty() {
        return Ok(HRepresentation { equalities, facets: Vec::new() });
    }
    let rows: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| core::iter::once(Rational::one()).chain(pivots.iter().map(|&k| p[k].clone())).collect())
        .collect();
    let rays = dd::extreme_rays(&dd::integer_rows(&rows), resume, observer)?;
    let mut facets: Vec<Halfspace> = rays
        .into_iter()
        .map(|ray| {
            // ray (b, -a): a·x <= b
            let mut normal = alloc::vec![BigInt::zero(); d];
            for (t, &k) in pivots.iter().enumerate() {
                normal[k] = -ray[t + 1].clone();
            }
            integer_halfspace(normal, ray[0].clone())
        })
        .collect();
    facets.sort();
    Ok(HRepresentation { equalities, facets })
}

/// Vertices of the bounded, full-dimensional polytope `{x : facets}`.
pub fn enumerate_vertices(h: &HRepresentation) -> Result<Vec<Vec<Rational>>> {
    if !h.equalities.is_empty() {
        return Err(Error::Unsupported("vertex enumeration with equalities".into()));
    }
    let d = h.facets.first().ok_or(Error::EmptyPointSet)?.normal.len();
    // cone {(t, x) : t b - a·x >= 0, t >= 0}
    let mut rows: Vec<Vec<Rational>> = h
        .facets
        .iter()
        .map(|f| core::iter::once(f.rhs.clone()).chain(f.normal.iter().map(|a| -a.clone())).collect())
        .collect();
    let mut t_row = alloc::vec![Rational::zero(); d + 1];
    t_row[0] = Rational::one();
    rows.push(t_row);
    let rays = dd::extreme_rays(&dd::integer_rows(&rows), None, &mut ())?;
    let mut out = Vec::with_capacity(rays.len());
    for ray in rays {
        if ray[0].is_zero() {
            return Err(Error::Unbounded("recession direction found".into()));
        }
        let t = Rational::from_integer(ray[0].clone());
        out.push(ray[1..].iter().map(|x| Rational::from_integer(x.clone()) / t.clone()).collect());
    }
    out.sort();
    Ok(out)
}

/// Facets of a vertex set as inequalities in its coordinate space.
pub fn vertex_set_facets(vertices: &VertexSet) -> Result<Vec<BellInequality>> {
    let points: Vec<Vec<Rational>> = vertices.points().iter().map(ExactPoint::to_rationals).collect();
    let h = enumerate_facets(&points)?;
    h.facets
        .into_iter()
        .map(|f| BellInequality::new(vertices.scenario(), vertices.space(), f.normal, f.rhs))
        .collect()
}

/// Vertices of the full non-signaling polytope by double description from
/// the `4^n` positivity constraints in correlator coordinates.
pub fn ns_polytope_vertices(scenario: Scenario) -> Result<VertexSet> {
    let facets = (0..scenario.table_len())
        .map(|i| {
            let (x, a) = scenario.split_index(i);
            let c = crate::catalog::positivity(scenario, x, a).to_correlator_form();
            Halfspace { normal: c.coeffs().to_vec(), rhs: c.bound().clone() }
        })
        .collect();
    let points = enumerate_vertices(&HRepresentation { equalities: Vec::new(), facets })?;
    let points = points.iter().map(|p| ExactPoint::from_rationals(p)).collect::<Result<Vec<_>>>()?;
    VertexSet::new(ModelSpec::non_signaling(scenario.n_parties())?, Space::Correlator, points)
}

// ---------------------------------------------------------------------------
// relabeling group

/// Party permutations, per-party input swaps, and per-party per-input output
/// flips, acting on correlator coordinates as signed permutations.
#[derive(Clone, Debug)]
pub struct RelabelingGroup {
    scenario: Scenario,
    /// For each (permutation, input-swap mask): target index of every pattern.
    maps: Vec<Vec<u32>>,
    /// For each pattern: mask of flip bits (`2 * party + setting`) it picks up.
    flip_masks: Vec<u32>,
    flips: u32,
}

impl RelabelingGroup {
    pub fn new(scenario: Scenario) -> Self {
        let n = scenario.n_parties();
        let patterns: Vec<Pattern> = Pattern::all(&scenario).collect();
        let mut maps = Vec::new();
        for perm in permutations(n) {
            for swap in 0..1u32 << n {
                let map = patterns
                    .iter()
                    .map(|p| {
                        let mut slots = alloc::vec![Slot::Skip; n];
                        for (i, s) in p.slots().into_iter().enumerate() {
                            slots[perm[i]] = match s {
                                Slot::Skip => Slot::Skip,
                                Slot::Setting(x) => Slot::Setting(x ^ (swap >> i & 1) as u8),
                            };
                        }
                        Pattern::from_slots(&slots).expect("nonempty").index() as u32
                    })
                    .collect();
                maps.push(map);
            }
        }
        let flip_masks = patterns
            .iter()
            .map(|p| {
                p.slots().into_iter().enumerate().fold(0u32, |m, (i, s)| match s {
                    Slot::Skip => m,
                    Slot::Setting(x) => m | 1 << (2 * i + x as usize),
                })
            })
            .collect();
        Self { scenario, maps, flip_masks, flips: 1 << (2 * n) }
    }

    /// `n! * 8^n`.
    pub fn len(&self) -> usize {
        self.maps.len() * self.flips as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    /// Image of a coefficient vector under element `g`.
    pub fn apply<E: Clone + core::ops::Neg<Output = E> + Zero>(&self, g: usize, coeffs: &[E]) -> Vec<E> {
        let (map, flip) = (&self.maps[g / self.flips as usize], g as u32 % self.flips);
        let mut out = alloc::vec![E::zero(); coeffs.len()];
        for (i, c) in coeffs.iter().enumerate() {
            let negate = (self.flip_masks[i] & flip).count_ones() % 2 == 1;
            out[map[i] as usize] = if negate { -c.clone() } else { c.clone() };
        }
        out
    }

    /// Lexicographically smallest image over elements `range`, and how many of
    /// them fix `coeffs`.
    pub fn min_image<E>(&self, coeffs: &[E], range: core::ops::Range<usize>) -> (Vec<E>, usize)
    where
        E: Clone + Ord + core::ops::Neg<Output = E> + Zero,
    {
        let mut best: Option<Vec<E>> = None;
        let mut fixed = 0;
        for g in range {
            let img = self.apply(g, coeffs);
            if img == coeffs {
                fixed += 1;
            }
            if best.as_ref().is_none_or(|b| img < *b) {
                best = Some(img);
            }
        }
        (best.unwrap_or_else(|| coeffs.to_vec()), fixed)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { return out };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Integer-normalized correlator form: coefficients and bound scaled by a
/// positive factor to coprime integers.
pub fn integer_normal_form(ineq: &BellInequality) -> (Vec<BigInt>, BigInt) {
    let corr = ineq.to_correlator_form();
    let l = corr
        .coeffs()
        .iter()
        .chain(core::iter::once(corr.bound()))
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scale = Rational::from_integer(l);
    let mut coeffs: Vec<BigInt> = corr.coeffs().iter().map(|c| (c * &scale).to_integer()).collect();
    let mut bound = (corr.bound() * &scale).to_integer();
    let g = coeffs.iter().fold(bound.abs(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for c in coeffs.iter_mut() {
            *c = &*c / &g;
        }
        bound = &bound / &g;
    }
    (coeffs, bound)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Canonical {
    pub inequality: BellInequality,
    pub orbit_size: usize,
}

/// Lexicographically minimal representative of the relabeling orbit (after
/// integer normalization) and the orbit size.
pub fn canonicalize(ineq: &BellInequality) -> Canonical {
    canonicalize_in(ineq, &RelabelingGroup::new(ineq.scenario()))
}

pub fn canonicalize_in(ineq: &BellInequality, group: &RelabelingGroup) -> Canonical {
    let (coeffs, bound) = integer_normal_form(ineq);
    let small: Option<Vec<i64>> = coeffs.iter().map(ToPrimitive::to_i64).collect();
    let (min, fixed): (Vec<BigInt>, usize) = match small {
        Some(v) => {
            let (m, f) = group.min_image(&v, 0..group.len());
            (m.into_iter().map(BigInt::from).collect(), f)
        }
        None => group.min_image(&coeffs, 0..group.len()),
    };
    finish_canonical(ineq, group, min, bound, fixed)
}

/// Assembles the canonical inequality from a minimal image and stabilizer size.
pub fn finish_canonical(
    ineq: &BellInequality,
    group: &RelabelingGroup,
    min: Vec<BigInt>,
    bound: BigInt,
    fixed: usize,
) -> Canonical {
    let coeffs = min.into_iter().map(Rational::from_integer).collect();
    let mut inequality =
        BellInequality::new(ineq.scenario(), Space::Correlator, coeffs, Rational::from_integer(bound)).expect("length");
    if let Some(m) = ineq.model() {
        inequality = inequality.with_model(m.clone());
    }
    Canonical { inequality, orbit_size: group.len() / fixed.max(1) }
}

/// Distinct images of `ineq` (integer-normalized correlator form).
pub fn orbit(ineq: &BellInequality) -> BTreeSet<Vec<BigInt>> {
    let group = RelabelingGroup::new(ineq.scenario());
    let (coeffs, _) = integer_normal_form(ineq);
    (0..group.len()).map(|g| group.apply(g, &coeffs)).collect()
}
