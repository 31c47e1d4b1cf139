//! Rayon-backed versions of the embarrassingly parallel loops in the core:
//! vertex pricing scans, see-saw restarts, orbit minimization and per-row LPs.
//! Results are independent of the thread count.

use bellpoly_core::lp::{dot_point, push_best, VertexScan};
use bellpoly_core::polytope::{finish_canonical, integer_normal_form, Canonical, RelabelingGroup};
use bellpoly_core::quantum::{collect_runs, SeesawOptions, SeesawProblem, SeesawResult};
use bellpoly_core::{BellInequality, ExactPoint, Scalar};
use rayon::prelude::*;

/// Builds a dedicated pool; `None` uses rayon's default size.
pub fn pool(threads: Option<usize>) -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t.max(1));
    }
    b.build().expect("thread pool")
}

const SCAN_CHUNK: usize = 4096;

/// Parallel pricing scan over fixed-size chunks, merged in chunk order so the
/// selected columns match [`bellpoly_core::lp::SequentialScan`].
#[derive(Clone, Copy, Debug, Default)]
pub struct RayonScan;

impl<T: Scalar> VertexScan<T> for RayonScan {
    fn best(&self, points: &[ExactPoint], g: &[T], limit: &T, k: usize) -> Vec<(usize, T)> {
        let partial: Vec<Vec<(usize, T)>> = points
            .par_chunks(SCAN_CHUNK)
            .enumerate()
            .map(|(c, chunk)| {
                let mut out = Vec::with_capacity(k + 1);
                for (i, p) in chunk.iter().enumerate() {
                    push_best(&mut out, (c * SCAN_CHUNK + i, dot_point(p, g)), limit, k);
                }
                out
            })
            .collect();
        let mut out = Vec::with_capacity(k + 1);
        for item in partial.into_iter().flatten() {
            push_best(&mut out, item, limit, k);
        }
        out
    }
}

/// See-saw with restarts distributed over threads; restart `r` always uses
/// seed `opts.seed + r`, so the result does not depend on scheduling.
pub fn seesaw(ineq: &BellInequality, opts: &SeesawOptions) -> bellpoly_core::Result<SeesawResult> {
    let problem = SeesawProblem::new(ineq);
    let runs = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| problem.run(opts, r))
        .collect::<bellpoly_core::Result<Vec<_>>>()?;
    Ok(collect_runs(runs))
}

const GROUP_CHUNK: usize = 512;

/// [`bellpoly_core::polytope::canonicalize_in`] with the group split into chunks.
pub fn canonicalize(ineq: &BellInequality, group: &RelabelingGroup) -> Canonical {
    let (coeffs, bound) = integer_normal_form(ineq);
    let ranges: Vec<std::ops::Range<usize>> =
        (0..group.len()).step_by(GROUP_CHUNK).map(|s| s..(s + GROUP_CHUNK).min(group.len())).collect();
    let (min, fixed) = match coeffs.iter().map(|c| i64::try_from(c).ok()).collect::<Option<Vec<i64>>>() {
        Some(small) => {
            let (m, f) = reduce_images(ranges.into_par_iter().map(|r| group.min_image(&small, r)).collect());
            (m.into_iter().map(Into::into).collect(), f)
        }
        None => reduce_images(ranges.into_par_iter().map(|r| group.min_image(&coeffs, r)).collect()),
    };
    finish_canonical(ineq, group, min, bound, fixed)
}

fn reduce_images<E: Ord>(parts: Vec<(Vec<E>, usize)>) -> (Vec<E>, usize) {
    let fixed = parts.iter().map(|(_, f)| f).sum();
    let min = parts.into_iter().map(|(m, _)| m).min().expect("nonempty group");
    (min, fixed)
}

/// Canonical forms of many inequalities, in input order.
pub fn canonicalize_all(ineqs: &[BellInequality], group: &RelabelingGroup) -> Vec<Canonical> {
    ineqs.par_iter().map(|i| bellpoly_core::polytope::canonicalize_in(i, group)).collect()
}

/// Applies `f` to every item in parallel, keeping input order (used for
/// independent LPs such as table rows).
pub fn map_ordered<I: Sync, O: Send>(items: &[I], f: impl Fn(&I) -> O + Sync + Send) -> Vec<O> {
    items.par_iter().map(f).collect()
}
