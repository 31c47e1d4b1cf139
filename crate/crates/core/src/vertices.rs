//! Exact extreme points of the correlation models.
//!
//! Biseparable models are built as products of group extremal points (one-way
//! or two-way signaling deterministic pairs, bipartite non-signaling extremals,
//! tripartite non-signaling vertices) with single-party deterministic points.
//! Hulls are unions of their parts. Non-signaling models are stored in
//! correlator coordinates, signaling ones as full probability tables.

use alloc::format;
use alloc::vec::Vec;

use crate::behavior::Behavior;
use crate::correlators::{from_correlators, reconstruct_table, to_correlators, CorrelatorVector};
use crate::error::{Error, Result};
use crate::inequality::Space;
use crate::model::{ModelKind, ModelSpec, PairDirection};
use crate::point::ExactPoint;
use crate::scalar::{rational, Rational};
use crate::scenario::Scenario;

/// Deduplicated extreme points (or a spanning superset) of a model.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexSet {
    model: ModelSpec,
    space: Space,
    points: Vec<ExactPoint>,
}

impl VertexSet {
    /// Builds a set from raw points, removing exact duplicates (first
    /// occurrence kept).
    pub fn new(model: ModelSpec, space: Space, points: Vec<ExactPoint>) -> Result<Self> {
        let dim = space.dim(&model.scenario);
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::LengthMismatch { expected: dim, found: p.len() });
        }
        Ok(Self { model, space, points: dedup_stable(points) })
    }

    pub fn from_behaviors(model: ModelSpec, space: Space, behaviors: &[Behavior<Rational>]) -> Result<Self> {
        let points = behaviors
            .iter()
            .map(|b| {
                model.scenario.check_same(&b.scenario())?;
                match space {
                    Space::Probability => ExactPoint::from_rationals(b.table()),
                    Space::Correlator => {
                        if !b.is_non_signaling() {
                            return Err(Error::NotNonSignaling(
                                "signaling behavior in correlator space".into(),
                            ));
                        }
                        ExactPoint::from_rationals(to_correlators(b).coords())
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(model, space, points)
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn scenario(&self) -> Scenario {
        self.model.scenario
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ExactPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &ExactPoint {
        &self.points[i]
    }

    /// Vertex `i` as a probability table.
    pub fn behavior(&self, i: usize) -> Result<Behavior<Rational>> {
        let coords = self.points[i].to_rationals();
        match self.space {
            Space::Probability => Behavior::new(self.scenario(), coords),
            Space::Correlator => from_correlators(&CorrelatorVector::new(self.scenario(), coords)?),
        }
    }

    pub fn behaviors(&self) -> impl Iterator<Item = Result<Behavior<Rational>>> + '_ {
        (0..self.len()).map(move |i| self.behavior(i))
    }

    /// Coordinates of vertex `i` in `space` (exact).
    pub fn coords_in(&self, i: usize, space: Space) -> Result<ExactPoint> {
        convert_point(&self.points[i], self.space, space, self.scenario())
    }

    /// Same points re-expressed in `space`. Converting signaling points to
    /// correlators is rejected.
    pub fn to_space(&self, space: Space) -> Result<Self> {
        if space == self.space {
            return Ok(self.clone());
        }
        if space == Space::Correlator && !self.model.is_non_signaling() {
            for b in self.behaviors() {
                if !b?.is_non_signaling() {
                    return Err(Error::NotNonSignaling(format!("{} has signaling vertices", self.model)));
                }
            }
        }
        let points = (0..self.len())
            .map(|i| self.coords_in(i, space))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { model: self.model.clone(), space, points })
    }

    /// Whether `behavior` is one of the stored points.
    pub fn contains(&self, behavior: &Behavior<Rational>) -> Result<bool> {
        let target = match self.space {
            Space::Probability => ExactPoint::from_rationals(behavior.table())?,
            Space::Correlator => {
                if !behavior.is_non_signaling() {
                    return Ok(false);
                }
                ExactPoint::from_rationals(to_correlators(behavior).coords())?
            }
        };
        Ok(self.points.contains(&target))
    }

    /// Applies a party permutation to every vertex (old party `i` becomes
    /// `perm[i]`) and to the model tag.
    pub fn relabel_parties(&self, perm: &[usize]) -> Result<Self> {
        let model = self.model.relabel(perm)?;
        let points = self
            .behaviors()
            .map(|b| {
                let b = b?.permute_parties(perm)?;
                match self.space {
                    Space::Probability => ExactPoint::from_rationals(b.table()),
                    Space::Correlator => ExactPoint::from_rationals(to_correlators(&b).coords()),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(model, self.space, points)
    }

    /// Union of several sets under a new model tag; spaces are unified to
    /// probability space unless all parts are in correlator space.
    pub fn union(model: ModelSpec, parts: &[VertexSet]) -> Result<Self> {
        let space = if parts.iter().all(|p| p.space == Space::Correlator) {
            Space::Correlator
        } else {
            Space::Probability
        };
        let mut points = Vec::new();
        for part in parts {
            model.scenario.check_same(&part.scenario())?;
            if part.space == space {
                points.extend(part.points.iter().cloned());
            } else {
                for i in 0..part.len() {
                    points.push(part.coords_in(i, space)?);
                }
            }
        }
        Self::new(model, space, points)
    }

    /// Same points under another model tag.
    pub fn retag(mut self, model: ModelSpec) -> Result<Self> {
        self.model.scenario.check_same(&model.scenario)?;
        self.model = model;
        Ok(self)
    }

    /// Keeps the points selected by `keep`.
    pub fn filter(&self, keep: impl Fn(usize) -> bool) -> Self {
        Self {
            model: self.model.clone(),
            space: self.space,
            points: (0..self.len()).filter(|&i| keep(i)).map(|i| self.points[i].clone()).collect(),
        }
    }
}

fn convert_point(p: &ExactPoint, from: Space, to: Space, scenario: Scenario) -> Result<ExactPoint> {
    match (from, to) {
        (a, b) if a == b => Ok(p.clone()),
        (Space::Correlator, Space::Probability) => {
            let c = CorrelatorVector::new(scenario, p.to_rationals())?;
            ExactPoint::from_rationals(&reconstruct_table(&c))
        }
        _ => {
            let b = Behavior::new(scenario, p.to_rationals())?;
            ExactPoint::from_rationals(to_correlators(&b).coords())
        }
    }
}

/// Removes duplicates, keeping the first occurrence of each point in order.
pub(crate) fn dedup_stable(points: Vec<ExactPoint>) -> Vec<ExactPoint> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i].cmp(&points[j]).then(i.cmp(&j)));
    let mut keep = alloc::vec![false; points.len()];
    let mut prev: Option<usize> = None;
    for &i in &order {
        if prev.is_none_or(|p| points[p] != points[i]) {
            keep[i] = true;
            prev = Some(i);
        }
    }
    points.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect()
}

// ---------------------------------------------------------------------------
// group extremal points

/// The 4^n local deterministic points (all per-party functions input -> output).
pub fn enumerate_local(scenario: Scenario) -> VertexSet {
    let n = scenario.n_parties();
    let singles = single_party_correlator_points();
    let parties: Vec<usize> = (0..n).collect();
    let mut points = Vec::with_capacity(1 << (2 * n));
    let mut choice = alloc::vec![0usize; n];
    loop {
        let factors: Vec<Factor<'_>> =
            (0..n).map(|p| Factor { parties: &parties[p..p + 1], point: &singles[choice[p]] }).collect();
        points.push(product_correlator(n, &factors));
        // odometer with party A most significant
        let mut p = n;
        loop {
            if p == 0 {
                let model = ModelSpec { kind: ModelKind::Local, scenario };
                return VertexSet { model, space: Space::Correlator, points };
            }
            p -= 1;
            choice[p] += 1;
            if choice[p] < 4 {
                break;
            }
            choice[p] = 0;
        }
    }
}

fn bit_value(bit: usize) -> i64 {
    if bit == 0 { 1 } else { -1 }
}

/// Single-party deterministic points as probability tables
/// `[P(+|0), P(-|0), P(+|1), P(-|1)]`, indexed by `out0 | out1 << 1`... in
/// odometer order `(out0, out1)` with `out0` most significant.
fn single_party_probability_points() -> Vec<ExactPoint> {
    (0..4)
        .map(|f| {
            let (o0, o1) = (f >> 1, f & 1);
            let mut t = alloc::vec![0i64; 4];
            t[o0] = 1;
            t[2 + o1] = 1;
            ExactPoint::from_integers(t, 1).expect("small")
        })
        .collect()
}

fn single_party_correlator_points() -> Vec<ExactPoint> {
    (0..4)
        .map(|f| {
            let (o0, o1) = (f >> 1, f & 1);
            ExactPoint::from_integers(alloc::vec![bit_value(o0), bit_value(o1)], 1).expect("small")
        })
        .collect()
}

/// Deterministic bipartite points allowed by a signaling direction.
///
/// * `FirstToSecond`: `a = f(x)`, `b = g(x, y)`, 64 points;
/// * `SecondToFirst`: `a = g(x, y)`, `b = f(y)`, 64 points;
/// * `Both`: `a = f(x, y)`, `b = g(x, y)`, 256 points.
pub fn enumerate_pair_deterministic(direction: PairDirection) -> Vec<Behavior<Rational>> {
    let s = Scenario::bipartite();
    // outcome functions encoded as truth tables over (x, y) (bit index 2x + y)
    let one_input_tables: Vec<u8> = (0..4u8)
        .map(|f| {
            let (o0, o1) = (f >> 1, f & 1);
            o0 | o0 << 1 | o1 << 2 | o1 << 3
        })
        .collect();
    let two_input_tables: Vec<u8> = (0..16u8).map(|g| {
        // g's bits, most significant first, give the outputs at (0,0),(0,1),(1,0),(1,1)
        (0..4).fold(0u8, |acc, k| acc | (((g >> (3 - k)) & 1) << k))
    }).collect();
    let only_y = |f: u8| {
        let (o0, o1) = (f >> 1, f & 1);
        o0 | o1 << 1 | o0 << 2 | o1 << 3
    };
    let mut pairs: Vec<(u8, u8)> = Vec::new();
    match direction {
        PairDirection::FirstToSecond => {
            for &fa in &one_input_tables {
                for &gb in &two_input_tables {
                    pairs.push((fa, gb));
                }
            }
        }
        PairDirection::SecondToFirst => {
            for f in 0..4u8 {
                for &ga in &two_input_tables {
                    pairs.push((ga, only_y(f)));
                }
            }
        }
        PairDirection::Both => {
            for &fa in &two_input_tables {
                for &gb in &two_input_tables {
                    pairs.push((fa, gb));
                }
            }
        }
    }
    pairs
        .into_iter()
        .map(|(ta, tb)| {
            let mut table = alloc::vec![rational(0, 1); 16];
            for x in 0..4usize {
                let k = (s.bit(x, 0) << 1) | s.bit(x, 1);
                let a = (((ta >> k) & 1) as usize) << 1 | ((tb >> k) & 1) as usize;
                table[s.index(x, a)] = rational(1, 1);
            }
            Behavior::new_unchecked(s, table)
        })
        .collect()
}

/// The 24 extreme points of the bipartite non-signaling polytope: 16 local
/// deterministic points followed by the 8 PR boxes
/// `<A_x B_y> = (-1)^(xy + αx + βy + γ)` with zero marginals.
pub fn enumerate_ns_bipartite_extremals() -> Vec<Behavior<Rational>> {
    let s = Scenario::bipartite();
    let mut out: Vec<Behavior<Rational>> = Vec::with_capacity(24);
    for fa in 0..4usize {
        for fb in 0..4usize {
            out.push(Behavior::deterministic(s, |p, x| {
                let f = if p == 0 { fa } else { fb };
                if x == 0 { f >> 1 } else { f & 1 }
            }));
        }
    }
    for code in 0..8usize {
        let (alpha, beta, gamma) = (code >> 2 & 1, code >> 1 & 1, code & 1);
        let mut table = alloc::vec![rational(0, 1); 16];
        for x in 0..4usize {
            let (xa, xb) = (s.bit(x, 0), s.bit(x, 1));
            let parity = (xa & xb) ^ (alpha & xa) ^ (beta & xb) ^ gamma;
            for a in 0..4usize {
                if s.bit(a, 0) ^ s.bit(a, 1) == parity {
                    table[s.index(x, a)] = rational(1, 2);
                }
            }
        }
        out.push(Behavior::new_unchecked(s, table));
    }
    out
}

// ---------------------------------------------------------------------------
// products

struct Factor<'a> {
    parties: &'a [usize],
    point: &'a ExactPoint,
}

/// Local probability-table index of `factor` for the global `(x, a)`.
fn local_prob_index(n: usize, parties: &[usize], x: usize, a: usize) -> usize {
    let k = parties.len();
    let mut lx = 0;
    let mut la = 0;
    for &p in parties {
        lx = (lx << 1) | ((x >> (n - 1 - p)) & 1);
        la = (la << 1) | ((a >> (n - 1 - p)) & 1);
    }
    (lx << k) | la
}

/// Local correlator index (`None` for the all-skip sub-pattern).
fn local_corr_index(n: usize, parties: &[usize], code: usize) -> Option<usize> {
    let mut local = 0usize;
    for &p in parties {
        let digit = (code / 3usize.pow((n - 1 - p) as u32)) % 3;
        local = local * 3 + digit;
    }
    local.checked_sub(1)
}

fn product_probability(n: usize, factors: &[Factor<'_>]) -> ExactPoint {
    let k = 1usize << n;
    let den: i64 = factors.iter().map(|f| f.point.den() as i64).product();
    let mut nums = Vec::with_capacity(k * k);
    for x in 0..k {
        for a in 0..k {
            let v = factors.iter().try_fold(1i64, |acc, f| {
                let e = f.point.nums()[local_prob_index(n, f.parties, x, a)] as i64;
                (e != 0).then_some(acc * e)
            });
            nums.push(v.unwrap_or(0));
        }
    }
    ExactPoint::from_integers(nums, den).expect("product of small rationals")
}

fn product_correlator(n: usize, factors: &[Factor<'_>]) -> ExactPoint {
    let len = 3usize.pow(n as u32) - 1;
    let den: i64 = factors.iter().map(|f| f.point.den() as i64).product();
    let mut nums = Vec::with_capacity(len);
    for code in 1..=len {
        let v: i64 = factors
            .iter()
            .map(|f| match local_corr_index(n, f.parties, code) {
                Some(i) => f.point.nums()[i] as i64,
                None => f.point.den() as i64,
            })
            .product();
        nums.push(v);
    }
    ExactPoint::from_integers(nums, den).expect("product of small rationals")
}

/// All products `group point (x) deterministic points on the other parties`.
fn group_products(
    scenario: Scenario,
    group: &[usize],
    group_points: &[ExactPoint],
    space: Space,
) -> Vec<ExactPoint> {
    let n = scenario.n_parties();
    let rest: Vec<usize> = (0..n).filter(|p| !group.contains(p)).collect();
    let singles = match space {
        Space::Probability => single_party_probability_points(),
        Space::Correlator => single_party_correlator_points(),
    };
    let mut out = Vec::with_capacity(group_points.len() << (2 * rest.len()));
    for gp in group_points {
        let combos = 1usize << (2 * rest.len());
        for c in 0..combos {
            let mut factors = alloc::vec![Factor { parties: group, point: gp }];
            for (j, p) in rest.iter().enumerate() {
                let pick = (c >> (2 * (rest.len() - 1 - j))) & 3;
                factors.push(Factor { parties: core::slice::from_ref(p), point: &singles[pick] });
            }
            out.push(match space {
                Space::Probability => product_probability(n, &factors),
                Space::Correlator => product_correlator(n, &factors),
            });
        }
    }
    out
}

fn to_probability_points(behaviors: &[Behavior<Rational>]) -> Vec<ExactPoint> {
    behaviors.iter().map(|b| ExactPoint::from_rationals(b.table()).expect("small")).collect()
}

fn to_correlator_points(behaviors: &[Behavior<Rational>]) -> Vec<ExactPoint> {
    behaviors
        .iter()
        .map(|b| ExactPoint::from_rationals(to_correlators(b).coords()).expect("small"))
        .collect()
}

fn pto_pair_points(scenario: Scenario, first: usize, second: usize) -> Vec<ExactPoint> {
    let pair = to_probability_points(&enumerate_pair_deterministic(PairDirection::FirstToSecond));
    group_products(scenario, &[first, second], &pair, Space::Probability)
}

fn ns_pair_points(scenario: Scenario, a: usize, b: usize) -> Vec<ExactPoint> {
    let pair = to_correlator_points(&enumerate_ns_bipartite_extremals());
    group_products(scenario, &[a, b], &pair, Space::Correlator)
}

fn ordered_pairs_of(order: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            out.push((order[i], order[j]));
        }
    }
    out
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    ordered_pairs_of(&(0..n).collect::<Vec<_>>())
}

/// Vertices of `spec`. `NS[3/1]` needs [`build_vertices_with`].
pub fn build_vertices(spec: &ModelSpec) -> Result<VertexSet> {
    build_vertices_with(spec, None)
}

/// Vertices of `spec`, with the tripartite non-signaling vertex list supplied
/// for `NS[3/1]`.
pub fn build_vertices_with(spec: &ModelSpec, ns3: Option<&VertexSet>) -> Result<VertexSet> {
    spec.validate()?;
    let scenario = spec.scenario;
    let n = scenario.n_parties();
    let (space, points) = match &spec.kind {
        ModelKind::Local => return Ok(enumerate_local(scenario)),
        ModelKind::Svetlichny => {
            let pair = to_probability_points(&enumerate_pair_deterministic(PairDirection::Both));
            let points = all_pairs(n)
                .into_iter()
                .flat_map(|(a, b)| group_products(scenario, &[a, b], &pair, Space::Probability))
                .collect();
            (Space::Probability, points)
        }
        ModelKind::PtoPair { first, second } => {
            (Space::Probability, pto_pair_points(scenario, *first, *second))
        }
        ModelKind::PtoOrder(order) => (
            Space::Probability,
            ordered_pairs_of(order)
                .into_iter()
                .flat_map(|(a, b)| pto_pair_points(scenario, a, b))
                .collect(),
        ),
        ModelKind::PtoFull => (
            Space::Probability,
            all_pairs(n)
                .into_iter()
                .flat_map(|(a, b)| {
                    let mut v = pto_pair_points(scenario, a, b);
                    v.extend(pto_pair_points(scenario, b, a));
                    v
                })
                .collect(),
        ),
        ModelKind::PtoHull(parts) => {
            let sets = parts.iter().map(build_vertices).collect::<Result<Vec<_>>>()?;
            return VertexSet::union(spec.clone(), &sets);
        }
        ModelKind::NsPair(a, b) => (Space::Correlator, ns_pair_points(scenario, *a, *b)),
        ModelKind::Ns21 => (
            Space::Correlator,
            all_pairs(n).into_iter().flat_map(|(a, b)| ns_pair_points(scenario, a, b)).collect(),
        ),
        ModelKind::NsHull(pairs) => (
            Space::Correlator,
            pairs.iter().flat_map(|&(a, b)| ns_pair_points(scenario, a, b)).collect(),
        ),
        ModelKind::Ns22 => {
            let bip = to_correlator_points(&enumerate_ns_bipartite_extremals());
            let mut points = Vec::with_capacity(3 * 24 * 24);
            for (g1, g2) in [([0, 1], [2, 3]), ([0, 2], [1, 3]), ([0, 3], [1, 2])] {
                for p1 in &bip {
                    for p2 in &bip {
                        let factors = [Factor { parties: &g1, point: p1 }, Factor { parties: &g2, point: p2 }];
                        points.push(product_correlator(4, &factors));
                    }
                }
            }
            (Space::Correlator, points)
        }
        ModelKind::NonSignaling if n == 2 => {
            (Space::Correlator, to_correlator_points(&enumerate_ns_bipartite_extremals()))
        }
        ModelKind::NonSignaling => {
            return Err(Error::Unsupported(
                "vertices of NS[n] for n > 2 come from a file or from polytope::ns_polytope_vertices".into(),
            ))
        }
        ModelKind::Ns31 => {
            let ns3 = ns3.ok_or(Error::MissingNs3Vertices)?;
            if ns3.scenario() != Scenario::tripartite() {
                return Err(Error::InvalidModel("NS3 vertex list must be tripartite".into()));
            }
            let ns3 = ns3.to_space(Space::Correlator)?;
            let mut points = Vec::with_capacity(4 * 4 * ns3.len());
            for group in [[0usize, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
                points.extend(group_products(scenario, &group, ns3.points(), Space::Correlator));
            }
            (Space::Correlator, points)
        }
    };
    VertexSet::new(spec.clone(), space, points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_counts() {
        assert_eq!(enumerate_local(Scenario::bipartite()).len(), 16);
        assert_eq!(enumerate_local(Scenario::tripartite()).len(), 64);
        assert_eq!(enumerate_local(Scenario::fourpartite()).len(), 256);
    }

    #[test]
    fn pair_counts_and_signaling() {
        let ab = enumerate_pair_deterministic(PairDirection::FirstToSecond);
        assert_eq!(ab.len(), 64);
        assert!(ab.iter().all(|b| b.check_ns(&[0])));
        assert!(ab.iter().any(|b| !b.check_ns(&[1])));
        let ba = enumerate_pair_deterministic(PairDirection::SecondToFirst);
        assert_eq!(ba.len(), 64);
        assert!(ba.iter().all(|b| b.check_ns(&[1])));
        // B<A is the party swap of A<B
        let mut swapped: Vec<ExactPoint> = ab
            .iter()
            .map(|b| ExactPoint::from_rationals(b.permute_parties(&[1, 0]).unwrap().table()).unwrap())
            .collect();
        let mut direct: Vec<ExactPoint> = to_probability_points(&ba);
        swapped.sort();
        direct.sort();
        assert_eq!(swapped, direct);
        let both = enumerate_pair_deterministic(PairDirection::Both);
        assert_eq!(dedup_stable(to_probability_points(&both)).len(), 256);
        let local = enumerate_local(Scenario::bipartite()).to_space(Space::Probability).unwrap();
        let both_points = to_probability_points(&both);
        assert!(local.points().iter().all(|p| both_points.contains(p)));
    }

    #[test]
    fn ns_bipartite_extremals() {
        let ext = enumerate_ns_bipartite_extremals();
        assert_eq!(ext.len(), 24);
        assert_eq!(dedup_stable(to_probability_points(&ext)).len(), 24);
        for pr in &ext[16..] {
            assert!(pr.is_non_signaling());
            let c = to_correlators(pr);
            assert!(c.coords()[..].iter().enumerate().all(|(i, v)| {
                let p = crate::correlators::Pattern::from_index(&Scenario::bipartite(), i);
                p.weight() == 2 || *v == rational(0, 1)
            }));
        }
    }

    #[test]
    fn tripartite_model_counts() {
        let count = |s: &str| build_vertices(&ModelSpec::parse(s).unwrap()).unwrap().len();
        assert_eq!(count("NS[AB]"), 96);
        assert_eq!(count("NS[2/1]"), 160);
        assert_eq!(count("PTO[A<B]"), 256);
        assert_eq!(count("PTO[order=A<B<C]"), 640);
        assert_eq!(count("PTO[2/1]"), 1216);
        assert_eq!(count("SV[2|1]"), 2944);
    }

    #[test]
    fn ns31_requires_input() {
        assert_eq!(build_vertices(&ModelSpec::ns31()), Err(Error::MissingNs3Vertices));
    }
}
