//! Linear programs over vertex sets: membership with separating certificates,
//! white-noise visibility, vertex maxima of linear functionals, and a
//! column-generation driver for very large vertex sets.

pub mod simplex;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::behavior::{Behavior, NoiseModel};
use crate::correlators::to_correlators;
use crate::error::{Error, Result};
use crate::inequality::{BellInequality, Space};
use crate::point::ExactPoint;
use crate::scalar::{Rational, Scalar};
use crate::vertices::{enumerate_local, VertexSet};
use simplex::{solve, LpOutcome, SimplexOptions, StandardForm};

pub use simplex::{solve_dense, Pricing};

/// Vertex sets larger than this are handled by column generation.
pub const COLUMN_GENERATION_THRESHOLD: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipCertificate<T> {
    pub inside: bool,
    /// Convex weights `(vertex index, weight)` when inside.
    pub weights: Vec<(usize, T)>,
    /// Inequality valid on every vertex and violated by the query when outside.
    pub separating: Option<BellInequality<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VisibilityResult<T> {
    pub v_max: T,
    /// Convex weights reproducing the mixture at `v_max`.
    pub weights: Vec<(usize, T)>,
    /// Valid inequality tight at `v_max` (absent when `v_max = 1`).
    pub boundary: Option<BellInequality<T>>,
}

/// Finds vertices minimizing `g·V_j`; the hook for parallel scans.
pub trait VertexScan<T: Scalar>: Sync {
    /// Up to `k` `(index, g·V_j)` pairs with value `< limit`, smallest first.
    fn best(&self, points: &[ExactPoint], g: &[T], limit: &T, k: usize) -> Vec<(usize, T)>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SequentialScan;

impl<T: Scalar> VertexScan<T> for SequentialScan {
    fn best(&self, points: &[ExactPoint], g: &[T], limit: &T, k: usize) -> Vec<(usize, T)> {
        let mut out: Vec<(usize, T)> = Vec::with_capacity(k + 1);
        for (i, p) in points.iter().enumerate() {
            let v = dot_point(p, g);
            push_best(&mut out, (i, v), limit, k);
        }
        out
    }
}

/// Keeps `out` as the `k` smallest values below `limit`, sorted.
pub fn push_best<T: Scalar>(out: &mut Vec<(usize, T)>, item: (usize, T), limit: &T, k: usize) {
    if item.1 >= *limit || (out.len() == k && item.1 >= out[k - 1].1) {
        return;
    }
    let pos = out.iter().position(|(_, v)| item.1 < *v).unwrap_or(out.len());
    out.insert(pos, item);
    out.truncate(k);
}

/// `g·p` in the backend's arithmetic.
pub fn dot_point<T: Scalar>(p: &ExactPoint, g: &[T]) -> T {
    let mut acc = T::zero();
    for (&n, gi) in p.nums().iter().zip(g) {
        if n != 0 {
            acc.add_mul_assign(&T::from_ratio(n as i64, 1), gi);
        }
    }
    if p.den() == 1 { acc } else { acc.div_ref(&T::from_ratio(p.den() as i64, 1)) }
}

#[derive(Clone, Copy, Debug)]
pub struct LpOptions {
    pub simplex_iterations: usize,
    pub column_generation_threshold: usize,
    /// Columns added per pricing round.
    pub columns_per_round: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            simplex_iterations: 200_000,
            column_generation_threshold: COLUMN_GENERATION_THRESHOLD,
            columns_per_round: 32,
        }
    }
}

/// Target, noise and vertices expressed in one coordinate space.
struct Shaped<T> {
    space: Space,
    target: Vec<T>,
    noise: Vec<T>,
}

fn choose_space<T: Scalar>(vertices: &VertexSet, behaviors: &[&Behavior<T>]) -> Space {
    if vertices.space() == Space::Correlator && behaviors.iter().all(|b| b.is_non_signaling()) {
        Space::Correlator
    } else {
        Space::Probability
    }
}

fn coords_of<T: Scalar>(b: &Behavior<T>, space: Space) -> Vec<T> {
    match space {
        Space::Probability => b.table().to_vec(),
        Space::Correlator => to_correlators(b).into_coords(),
    }
}

fn shape<T: Scalar>(target: &Behavior<T>, noise: &Behavior<T>, vertices: &VertexSet) -> Result<(Shaped<T>, VertexSet)> {
    vertices.scenario().check_same(&target.scenario())?;
    vertices.scenario().check_same(&noise.scenario())?;
    if vertices.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let space = choose_space(vertices, &[target, noise]);
    let v = vertices.to_space(space)?;
    Ok((Shaped { space, target: coords_of(target, space), noise: coords_of(noise, space) }, v))
}

fn simplex_options<T: Scalar>(opts: &LpOptions) -> SimplexOptions {
    SimplexOptions { max_iterations: opts.simplex_iterations, ..SimplexOptions::for_backend::<T>() }
}

/// Builds rows `Σ λ_j V_j - v (P - N) = N` (or `= P` without `v`), `Σ λ = 1`
/// and, for visibility, `v + s = 1`.
fn build_lp<T: Scalar>(points: &[&ExactPoint], shaped: &Shaped<T>, with_v: bool) -> StandardForm<T> {
    let d = shaped.target.len();
    let nv = points.len();
    let rows = d + 1 + usize::from(with_v);
    let cols = nv + 2 * usize::from(with_v);
    let mut lp = StandardForm::new(rows, cols);
    for (j, p) in points.iter().enumerate() {
        let den = T::from_ratio(p.den() as i64, 1);
        for (i, &num) in p.nums().iter().enumerate() {
            if num != 0 {
                lp.set(i, j, T::from_ratio(num as i64, 1).div_ref(&den));
            }
        }
        lp.set(d, j, T::one());
    }
    lp.set_rhs(d, T::one());
    if with_v {
        for i in 0..d {
            let mut diff = shaped.noise[i].clone();
            diff -= shaped.target[i].clone();
            lp.set(i, nv, diff);
            lp.set_rhs(i, shaped.noise[i].clone());
        }
        lp.set(d + 1, nv, T::one());
        lp.set(d + 1, nv + 1, T::one());
        lp.set_rhs(d + 1, T::one());
        lp.set_cost(nv, T::one());
    } else {
        for i in 0..d {
            lp.set_rhs(i, shaped.target[i].clone());
        }
    }
    lp
}

/// Inequality `-g·x <= max_j(-g·V_j)` from row duals `(g, ...)`.
fn inequality_from_duals<T: Scalar>(
    vertices: &VertexSet,
    space: Space,
    duals: &[T],
    scan: &dyn VertexScan<T>,
) -> Result<BellInequality<T>> {
    let d = space.dim(&vertices.scenario());
    let coeffs: Vec<T> = duals[..d].iter().map(|g| -g.clone()).collect();
    // max of -g·V is -(min of g·V)
    let g = &duals[..d];
    let huge = T::from_ratio(i64::MAX, 1);
    let min = scan.best(vertices.points(), g, &huge, 1);
    let bound = -min.first().map(|(_, v)| v.clone()).unwrap_or_else(T::zero);
    let mut ineq = BellInequality::new(vertices.scenario(), space, coeffs, bound)?;
    ineq = ineq.with_model(vertices.model().clone());
    Ok(ineq)
}

fn collect_weights<T: Scalar>(x: &[T], columns: &[usize]) -> Vec<(usize, T)> {
    let mut w: Vec<(usize, T)> = columns
        .iter()
        .zip(x)
        .filter(|(_, v)| !v.approx_zero() && **v > T::zero())
        .map(|(&j, v)| (j, v.clone()))
        .collect();
    w.sort_by_key(|(j, _)| *j);
    w
}

/// Decides whether `target` lies in the convex hull of `vertices`.
pub fn membership<T: Scalar>(target: &Behavior<T>, vertices: &VertexSet) -> Result<MembershipCertificate<T>> {
    membership_with(target, vertices, &LpOptions::default(), &SequentialScan)
}

pub fn membership_with<T: Scalar>(
    target: &Behavior<T>,
    vertices: &VertexSet,
    opts: &LpOptions,
    scan: &dyn VertexScan<T>,
) -> Result<MembershipCertificate<T>> {
    let (shaped, v) = shape(target, target, vertices)?;
    let columns: Vec<usize> = if v.len() > opts.column_generation_threshold {
        initial_columns(&v)
    } else {
        (0..v.len()).collect()
    };
    let mut columns = columns;
    loop {
        let pts: Vec<&ExactPoint> = columns.iter().map(|&j| v.point(j)).collect();
        let lp = build_lp(&pts, &shaped, false);
        match solve(&lp, simplex_options::<T>(opts))? {
            LpOutcome::Optimal { x, .. } => {
                return Ok(MembershipCertificate {
                    inside: true,
                    weights: collect_weights(&x, &columns),
                    separating: None,
                })
            }
            LpOutcome::Infeasible { farkas } => {
                let d = shaped.target.len();
                if columns.len() < v.len() {
                    // columns with g·V_j + h < 0 can repair feasibility
                    let limit = -farkas[d].clone() - T::tolerance();
                    let extra = scan.best(v.points(), &farkas[..d], &limit, opts.columns_per_round);
                    let known: BTreeSet<usize> = columns.iter().copied().collect();
                    let fresh: Vec<usize> = extra.into_iter().map(|(j, _)| j).filter(|j| !known.contains(j)).collect();
                    if !fresh.is_empty() {
                        columns.extend(fresh);
                        continue;
                    }
                }
                let ineq = inequality_from_duals(&v, shaped.space, &farkas, scan)?;
                return Ok(MembershipCertificate { inside: false, weights: Vec::new(), separating: Some(ineq) });
            }
            LpOutcome::Unbounded => return Err(Error::LpUnbounded),
        }
    }
}

/// Largest `v` in `[0, 1]` with `v P + (1 - v) N` in the hull of `vertices`.
pub fn visibility<T: Scalar>(
    target: &Behavior<T>,
    vertices: &VertexSet,
    noise: &NoiseModel<T>,
) -> Result<VisibilityResult<T>> {
    visibility_with(target, vertices, noise, &LpOptions::default(), &SequentialScan)
}

pub fn visibility_with<T: Scalar>(
    target: &Behavior<T>,
    vertices: &VertexSet,
    noise: &NoiseModel<T>,
    opts: &LpOptions,
    scan: &dyn VertexScan<T>,
) -> Result<VisibilityResult<T>> {
    let (shaped, v) = shape(target, &noise.reference, vertices)?;
    let d = shaped.target.len();
    let mut columns: Vec<usize> = if v.len() > opts.column_generation_threshold {
        initial_columns(&v)
    } else {
        (0..v.len()).collect()
    };
    loop {
        let pts: Vec<&ExactPoint> = columns.iter().map(|&j| v.point(j)).collect();
        let lp = build_lp(&pts, &shaped, true);
        let outcome = solve(&lp, simplex_options::<T>(opts))?;
        let (x, objective, duals, farkas) = match outcome {
            LpOutcome::Optimal { x, objective, duals } => (x, objective, duals, false),
            LpOutcome::Infeasible { farkas } => (Vec::new(), T::zero(), farkas, true),
            LpOutcome::Unbounded => return Err(Error::LpUnbounded),
        };
        if columns.len() < v.len() {
            // reduced cost of λ_j is -(g·V_j + h)
            let limit = -duals[d].clone() - T::tolerance();
            let extra = scan.best(v.points(), &duals[..d], &limit, opts.columns_per_round);
            let known: BTreeSet<usize> = columns.iter().copied().collect();
            let fresh: Vec<usize> = extra.into_iter().map(|(j, _)| j).filter(|j| !known.contains(j)).collect();
            if !fresh.is_empty() {
                columns.extend(fresh);
                continue;
            }
        }
        if farkas {
            // the noise itself lies outside the model
            return Err(Error::Unsupported("noise reference lies outside the model".into()));
        }
        let nv = columns.len();
        let weights = collect_weights(&x[..nv], &columns);
        let v_max = x[nv].clone();
        debug_assert!(objective.approx_eq(&v_max));
        let boundary = if (T::one() - v_max.clone()).approx_zero() {
            None
        } else {
            Some(inequality_from_duals(&v, shaped.space, &duals, scan)?)
        };
        return Ok(VisibilityResult { v_max, weights, boundary });
    }
}

/// Indices of the local deterministic points (or the first `4^n` points if
/// none are found).
fn initial_columns(v: &VertexSet) -> Vec<usize> {
    let local = enumerate_local(v.scenario());
    let wanted: BTreeSet<ExactPoint> = match local.to_space(v.space()) {
        Ok(l) => l.points().iter().cloned().collect(),
        Err(_) => BTreeSet::new(),
    };
    let mut cols: Vec<usize> = (0..v.len()).filter(|&j| wanted.contains(v.point(j))).collect();
    if cols.is_empty() {
        cols = (0..v.len().min(local.len())).collect();
    }
    cols
}

/// Exact maximum of the left-hand side of `f` over the vertices, with the
/// first maximizing index.
pub fn max_over_vertices(f: &BellInequality<Rational>, vertices: &VertexSet) -> Result<(Rational, usize)> {
    f.scenario().check_same(&vertices.scenario())?;
    if vertices.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let space = vertices.space();
    let g = f.in_space(space);
    let offset = f.bound() - g.bound();
    // integer fast path
    let lcm = g.coeffs().iter().fold(num_bigint::BigInt::from(1), |acc, c| {
        num_integer::Integer::lcm(&acc, c.denom())
    });
    let ints: Option<Vec<i64>> = g
        .coeffs()
        .iter()
        .map(|c| num_traits::ToPrimitive::to_i64(&(c * Rational::from_integer(lcm.clone())).to_integer()))
        .collect();
    let best = match ints.filter(|v| v.iter().all(|x| x.unsigned_abs() < (1 << 40))) {
        Some(ints) => {
            let mut best: Option<(i128, u32, usize)> = None;
            for (j, p) in vertices.points().iter().enumerate() {
                let (num, den) = p.dot_i64(&ints);
                let better = match best {
                    None => true,
                    Some((bn, bd, _)) => num * bd as i128 > bn * den as i128,
                };
                if better {
                    best = Some((num, den, j));
                }
            }
            let (num, den, j) = best.expect("nonempty");
            let value = Rational::new(num.into(), (num_bigint::BigInt::from(den)) * lcm);
            (value, j)
        }
        None => {
            let mut best: Option<(Rational, usize)> = None;
            for (j, p) in vertices.points().iter().enumerate() {
                let v = p.dot(g.coeffs());
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, j));
                }
            }
            best.expect("nonempty")
        }
    };
    Ok((best.0 + offset, best.1))
}

/// Checks a certificate against the vertices by direct evaluation: weights
/// reproduce the target, or the separating inequality holds on all vertices
/// and fails on the target. Float certificates use tolerance `tol`.
pub fn verify_certificate<T: Scalar>(
    cert: &MembershipCertificate<T>,
    target: &Behavior<T>,
    vertices: &VertexSet,
    tol: f64,
) -> Result<bool> {
    if cert.inside {
        let space = choose_space(vertices, &[target]);
        let v = vertices.to_space(space)?;
        let want = coords_of(target, space);
        let mut sum = alloc::vec![T::zero(); want.len()];
        let mut total = T::zero();
        for (j, w) in &cert.weights {
            if *w < T::zero() {
                return Ok(false);
            }
            total += w.clone();
            for (s, c) in sum.iter_mut().zip(v.point(*j).to_scalars::<T>()) {
                s.add_mul_assign(w, &c);
            }
        }
        let ok_total = (total - T::one()).to_f64().abs() <= tol;
        let ok = sum.iter().zip(&want).all(|(a, b)| (a.clone() - b.clone()).to_f64().abs() <= tol);
        return Ok(ok_total && ok);
    }
    let Some(ineq) = &cert.separating else { return Ok(false) };
    let v = vertices.to_space(ineq.space())?;
    for p in v.points() {
        let val = dot_point(p, ineq.coeffs()) - ineq.bound().clone();
        if val.to_f64() > tol {
            return Ok(false);
        }
    }
    let excess = ineq.value(target)? - ineq.bound().clone();
    Ok(excess > T::zero() && excess.to_f64() > tol.min(1e-12))
}

/// Removes vertices that are convex combinations of the others (one exact LP
/// per point).
pub fn prune_redundant(vertices: &VertexSet) -> Result<VertexSet> {
    let mut keep = alloc::vec![true; vertices.len()];
    for i in 0..vertices.len() {
        let others: Vec<&ExactPoint> =
            (0..vertices.len()).filter(|&j| j != i && keep[j]).map(|j| vertices.point(j)).collect();
        if others.is_empty() {
            continue;
        }
        let target: Vec<Rational> = vertices.point(i).to_rationals();
        let shaped = Shaped { space: vertices.space(), noise: target.clone(), target };
        let lp = build_lp(&others, &shaped, false);
        if let LpOutcome::Optimal { .. } = solve(&lp, SimplexOptions::for_backend::<Rational>())? {
            keep[i] = false;
        }
    }
    Ok(vertices.filter(|i| keep[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::model::ModelSpec;
    use crate::scalar::rational;
    use crate::scenario::Scenario;
    use crate::vertices::build_vertices;

    fn pr_box() -> Behavior<Rational> {
        crate::vertices::enumerate_ns_bipartite_extremals()[16].clone()
    }

    #[test]
    fn pr_box_outside_local_with_certificate() {
        let local = enumerate_local(Scenario::bipartite());
        let pr = pr_box();
        let cert = membership(&pr, &local).unwrap();
        assert!(!cert.inside);
        assert!(verify_certificate(&cert, &pr, &local, 0.0).unwrap());
        let vis = visibility(&pr, &local, &NoiseModel::uniform(Scenario::bipartite())).unwrap();
        assert_eq!(vis.v_max, rational(1, 2));
        let boundary = vis.boundary.unwrap();
        let (max, _) = max_over_vertices(&boundary, &local).unwrap();
        assert_eq!(&max, boundary.bound());
    }

    #[test]
    fn uniform_inside_everything() {
        let s = Scenario::tripartite();
        let u = Behavior::<Rational>::uniform(s);
        for spec in ["L[3]", "NS[AB]", "PTO[A<B]"] {
            let v = build_vertices(&ModelSpec::parse(spec).unwrap()).unwrap();
            let cert = membership(&u, &v).unwrap();
            assert!(cert.inside);
            assert!(verify_certificate(&cert, &u, &v, 0.0).unwrap());
            let vis = visibility(&u, &v, &NoiseModel::uniform(s)).unwrap();
            assert_eq!(vis.v_max, rational(1, 1));
        }
    }

    #[test]
    fn chsh_max_over_local() {
        let local = enumerate_local(Scenario::bipartite());
        let (max, _) = max_over_vertices(&catalog::chsh(), &local).unwrap();
        assert_eq!(max, rational(2, 1));
    }

    #[test]
    fn float_and_exact_agree() {
        let local = enumerate_local(Scenario::bipartite());
        let pr = pr_box();
        let exact = visibility(&pr, &local, &NoiseModel::uniform(Scenario::bipartite())).unwrap();
        let f = visibility(&pr.to_f64(), &local, &NoiseModel::uniform(Scenario::bipartite())).unwrap();
        assert!((f.v_max - crate::scalar::rational_to_f64(&exact.v_max)).abs() < 1e-9);
    }

    #[test]
    fn column_generation_matches_direct() {
        let v = build_vertices(&ModelSpec::parse("NS[2/1]").unwrap()).unwrap();
        let s = Scenario::tripartite();
        // full correlators (-1)^(xy + yz + xz), no marginals
        let coords: Vec<f64> = crate::correlators::Pattern::all(&s)
            .map(|p| {
                if p.weight() < 3 {
                    return 0.0;
                }
                let x = p.settings();
                let (a, b, c) = (x >> 2 & 1, x >> 1 & 1, x & 1);
                if ((a & b) ^ (b & c) ^ (a & c)) == 0 { 1.0 } else { -1.0 }
            })
            .collect();
        let target = crate::correlators::from_correlators(&crate::correlators::CorrelatorVector::new(s, coords).unwrap())
            .unwrap();
        let noise = NoiseModel::uniform(s);
        let small = LpOptions { column_generation_threshold: 10, columns_per_round: 4, ..LpOptions::default() };
        let direct = visibility(&target, &v, &noise).unwrap();
        let cg = visibility_with(&target, &v, &noise, &small, &SequentialScan).unwrap();
        assert!(direct.v_max < 1.0 - 1e-6);
        assert!((direct.v_max - cg.v_max).abs() < 1e-9);
        let cert = membership(&target, &v).unwrap();
        assert!(verify_certificate(&cert, &target, &v, 1e-9).unwrap());
    }

    #[test]
    fn prune_keeps_extreme_points() {
        let local = enumerate_local(Scenario::bipartite());
        let mut pts: Vec<ExactPoint> = local.points().to_vec();
        let u = ExactPoint::from_rationals(&alloc::vec![rational(0, 1); 8]).unwrap();
        pts.push(u);
        let v = VertexSet::new(local.model().clone(), Space::Correlator, pts).unwrap();
        assert_eq!(prune_redundant(&v).unwrap().len(), 16);
    }
}
