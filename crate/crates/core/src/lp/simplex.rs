//! Dense two-phase tableau simplex for `max c·x, A x = b, x >= 0`.
//!
//! Artificial columns are kept for the whole run so `B^-1` (and therefore
//! the duals) can be read off the tableau. Exact backends use Bland's rule;
//! floating point uses Dantzig pricing over rotating partial windows and
//! falls back to Bland while stalling on degenerate pivots.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An LP in equality standard form, row-major.
#[derive(Clone, Debug)]
pub struct StandardForm<T> {
    rows: usize,
    cols: usize,
    a: Vec<T>,
    b: Vec<T>,
    c: Vec<T>,
}

impl<T: Scalar> StandardForm<T> {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            a: alloc::vec![T::zero(); rows * cols],
            b: alloc::vec![T::zero(); rows],
            c: alloc::vec![T::zero(); cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.a[row * self.cols + col] = value;
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.a[row * self.cols + col]
    }

    pub fn set_rhs(&mut self, row: usize, value: T) {
        self.b[row] = value;
    }

    pub fn set_cost(&mut self, col: usize, value: T) {
        self.c[col] = value;
    }

    pub fn rhs(&self) -> &[T] {
        &self.b
    }

    pub fn costs(&self) -> &[T] {
        &self.c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pricing {
    Bland,
    Dantzig,
}

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    pub pricing: Pricing,
    pub max_iterations: usize,
}

impl SimplexOptions {
    pub fn for_backend<T: Scalar>() -> Self {
        Self {
            pricing: if T::EXACT { Pricing::Bland } else { Pricing::Dantzig },
            max_iterations: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    /// Primal optimum with duals `y` satisfying `y·A_j >= c_j` and `y·b = c·x`.
    Optimal { x: Vec<T>, objective: T, duals: Vec<T> },
    /// Farkas certificate: `y·A_j >= 0` for every column and `y·b < 0`.
    Infeasible { farkas: Vec<T> },
    Unbounded,
}

const FEAS_TOL: f64 = 1e-9;
const DEGENERATE_SWITCH: usize = 50;

struct Tableau<'a, T> {
    lp: &'a StandardForm<T>,
    m: usize,
    n: usize,
    width: usize,
    /// `m` rows of width `n + m + 1`; last entry is the RHS.
    t: Vec<T>,
    /// `z_j = c_B B^-1 A_j - c_j`; last entry is the objective.
    z: Vec<T>,
    basis: Vec<usize>,
    /// `true` where the row was negated to make the RHS nonnegative.
    flipped: Vec<bool>,
    opts: SimplexOptions,
    iterations: usize,
    cursor: usize,
}

impl<'a, T: Scalar> Tableau<'a, T> {
    fn new(lp: &'a StandardForm<T>, opts: SimplexOptions) -> Self {
        let (m, n) = (lp.rows, lp.cols);
        let width = n + m + 1;
        let mut t = alloc::vec![T::zero(); m * width];
        let mut flipped = alloc::vec![false; m];
        for i in 0..m {
            let flip = lp.b[i] < T::zero();
            flipped[i] = flip;
            let row = &mut t[i * width..(i + 1) * width];
            for j in 0..n {
                let v = lp.a[i * n + j].clone();
                row[j] = if flip { -v } else { v };
            }
            row[n + i] = T::one();
            row[width - 1] = if flip { -lp.b[i].clone() } else { lp.b[i].clone() };
        }
        Self {
            lp,
            m,
            n,
            width,
            t,
            z: alloc::vec![T::zero(); width],
            basis: (n..n + m).collect(),
            flipped,
            opts,
            iterations: 0,
            cursor: 0,
        }
    }

    fn entry(&self, i: usize, j: usize) -> &T {
        &self.t[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> &T {
        &self.t[i * self.width + self.width - 1]
    }

    /// Rebuilds `z` for the given column costs (artificials included).
    fn set_objective(&mut self, cost: impl Fn(usize) -> T) {
        let mut z: Vec<T> = (0..self.width).map(|j| if j + 1 == self.width { T::zero() } else { -cost(j) }).collect();
        for i in 0..self.m {
            let cb = cost(self.basis[i]);
            if cb.is_zero() {
                continue;
            }
            let row = &self.t[i * self.width..(i + 1) * self.width];
            for (zj, tij) in z.iter_mut().zip(row) {
                zj.add_mul_assign(&cb, tij);
            }
        }
        self.z = z;
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width;
        let p = self.t[r * w + e].clone();
        {
            let row = &mut self.t[r * w..(r + 1) * w];
            for v in row.iter_mut() {
                if !v.is_zero() {
                    *v = v.div_ref(&p);
                }
            }
            row[e] = T::one();
        }
        let (before, rest) = self.t.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        let prow: &[T] = prow;
        let nz: Vec<usize> = (0..w).filter(|&j| !prow[j].is_zero()).collect();
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[e].clone();
            if f.is_zero() {
                continue;
            }
            for &j in &nz {
                row[j].sub_mul_assign(&f, &prow[j]);
            }
            row[e] = T::zero();
        }
        let f = self.z[e].clone();
        if !f.is_zero() {
            for &j in &nz {
                self.z[j].sub_mul_assign(&f, &prow[j]);
            }
            self.z[e] = T::zero();
        }
        self.basis[r] = e;
    }

    fn neg_tol() -> T {
        if T::EXACT {
            T::zero()
        } else {
            T::from_ratio(-1, 1_000_000_000)
        }
    }

    fn choose_entering(&mut self, allowed: usize, bland: bool) -> Option<usize> {
        let tol = Self::neg_tol();
        if bland {
            return (0..allowed).find(|&j| self.z[j] < tol);
        }
        // Dantzig over rotating windows: take the best candidate of the first
        // window that has one.
        let window = (allowed / 8).max(64).min(allowed.max(1));
        let mut scanned = 0;
        while scanned < allowed {
            let mut best: Option<usize> = None;
            for k in 0..window.min(allowed - scanned) {
                let j = (self.cursor + scanned + k) % allowed;
                if self.z[j] < tol && best.is_none_or(|b| self.z[j] < self.z[b]) {
                    best = Some(j);
                }
            }
            scanned += window;
            if let Some(j) = best {
                self.cursor = (j + 1) % allowed;
                return Some(j);
            }
        }
        None
    }

    fn choose_leaving(&self, e: usize) -> Option<usize> {
        let tol = if T::EXACT { T::zero() } else { T::from_ratio(1, 1_000_000_000) };
        let mut best: Option<(usize, T)> = None;
        for i in 0..self.m {
            let a = self.entry(i, e);
            if *a <= tol {
                continue;
            }
            let ratio = self.rhs(i).div_ref(a);
            let better = match &best {
                None => true,
                Some((bi, br)) => {
                    if T::EXACT {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    } else {
                        let slack = T::from_ratio(1, 1_000_000_000_000);
                        let mut lim = br.clone();
                        lim -= slack.clone();
                        let mut hi = br.clone();
                        hi += slack;
                        ratio < lim || (ratio <= hi && a.abs() > self.entry(*bi, e).abs())
                    }
                }
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Runs simplex iterations allowing columns `< allowed` to enter.
    /// Returns `false` if unbounded.
    fn run(&mut self, allowed: usize) -> Result<bool> {
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Err(Error::LpNoConvergence { iterations: self.iterations });
            }
            let bland = self.opts.pricing == Pricing::Bland || degenerate >= DEGENERATE_SWITCH;
            let Some(e) = self.choose_entering(allowed, bland) else {
                return Ok(true);
            };
            let Some(r) = self.choose_leaving(e) else {
                return Ok(false);
            };
            if self.rhs(r).approx_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, e);
            self.iterations += 1;
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n
    }

    /// Pivots zero-level artificials out of the basis where possible.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.m {
            if !self.is_artificial(self.basis[i]) {
                continue;
            }
            let tol = if T::EXACT { T::zero() } else { T::from_ratio(1, 1_000_000_000) };
            let mut best: Option<usize> = None;
            for j in 0..self.n {
                let a = self.entry(i, j).abs();
                if a > tol && best.is_none_or(|b| !T::EXACT && a > self.entry(i, b).abs()) {
                    best = Some(j);
                    if T::EXACT {
                        break;
                    }
                }
            }
            if let Some(j) = best {
                self.pivot(i, j);
            }
        }
    }

    /// Row duals `y` for costs `cost` on the current basis, undoing row flips.
    fn duals(&self, cost: impl Fn(usize) -> T) -> Vec<T> {
        (0..self.m)
            .map(|k| {
                let mut y = self.z[self.n + k].clone();
                y += cost(self.n + k);
                if self.flipped[k] { -y } else { y }
            })
            .collect()
    }

    fn primal(&self) -> Vec<T> {
        let mut x = alloc::vec![T::zero(); self.n];
        for i in 0..self.m {
            if self.basis[i] < self.n {
                x[self.basis[i]] = self.rhs(i).clone();
            }
        }
        x
    }

    /// Recomputes `x_B` and `y` by direct solves with the basis matrix.
    fn refine(&self, cost: impl Fn(usize) -> T) -> Option<(Vec<T>, Vec<T>)> {
        let m = self.m;
        let column = |j: usize, i: usize| -> T {
            if j < self.n {
                self.lp.a[i * self.n + j].clone()
            } else if j - self.n == i {
                if self.flipped[i] { -T::one() } else { T::one() }
            } else {
                T::zero()
            }
        };
        let mut bmat = alloc::vec![T::zero(); m * m];
        let mut bt = alloc::vec![T::zero(); m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for i in 0..m {
                let v = column(j, i);
                bmat[i * m + k] = v.clone();
                bt[k * m + i] = v;
            }
        }
        let xb = solve_dense(bmat, self.lp.b.clone(), m)?;
        let cb: Vec<T> = self.basis.iter().map(|&j| cost(j)).collect();
        let y = solve_dense(bt, cb, m)?;
        let mut x = alloc::vec![T::zero(); self.n];
        for (k, &j) in self.basis.iter().enumerate() {
            if j < self.n {
                let v = xb[k].clone();
                x[j] = if v < T::zero() && v.approx_zero() { T::zero() } else { v };
            }
        }
        Some((x, y))
    }
}

/// Solves `M x = rhs` (row-major `n x n`) by Gaussian elimination with
/// partial pivoting. `None` if singular.
pub fn solve_dense<T: Scalar>(mut mat: Vec<T>, mut rhs: Vec<T>, n: usize) -> Option<Vec<T>> {
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| {
            mat[a * n + col].abs().partial_cmp(&mat[b * n + col].abs()).unwrap_or(core::cmp::Ordering::Equal)
        })?;
        if mat[piv * n + col].is_zero() {
            return None;
        }
        if piv != col {
            for k in 0..n {
                mat.swap(piv * n + k, col * n + k);
            }
            rhs.swap(piv, col);
        }
        let p = mat[col * n + col].clone();
        for r in col + 1..n {
            let f = mat[r * n + col].div_ref(&p);
            if f.is_zero() {
                continue;
            }
            for k in col..n {
                let v = mat[col * n + k].clone();
                mat[r * n + k].sub_mul_assign(&f, &v);
            }
            let v = rhs[col].clone();
            rhs[r].sub_mul_assign(&f, &v);
        }
    }
    let mut x = alloc::vec![T::zero(); n];
    for r in (0..n).rev() {
        let mut acc = rhs[r].clone();
        for k in r + 1..n {
            acc.sub_mul_assign(&mat[r * n + k], &x[k]);
        }
        x[r] = acc.div_ref(&mat[r * n + r]);
    }
    Some(x)
}

/// Solves `max c·x, A x = b, x >= 0`.
pub fn solve<T: Scalar>(lp: &StandardForm<T>, opts: SimplexOptions) -> Result<LpOutcome<T>> {
    let mut tab = Tableau::new(lp, opts);
    let n = lp.cols;
    let phase1_cost = |j: usize| if j >= n { -T::one() } else { T::zero() };
    tab.set_objective(phase1_cost);
    // phase 1 is bounded by construction
    tab.run(n + lp.rows)?;
    let infeasibility = -tab.z[tab.width - 1].clone();
    let feas_tol = if T::EXACT { T::zero() } else { T::from_ratio(1, (1.0 / FEAS_TOL) as i64) };
    if infeasibility > feas_tol {
        let farkas = if T::EXACT {
            tab.duals(phase1_cost)
        } else {
            match tab.refine(phase1_cost) {
                Some((_, y)) => y,
                None => tab.duals(phase1_cost),
            }
        };
        return Ok(LpOutcome::Infeasible { farkas });
    }
    tab.drive_out_artificials();
    let cost = |j: usize| if j < n { lp.c[j].clone() } else { T::zero() };
    tab.set_objective(cost);
    if !tab.run(n)? {
        return Ok(LpOutcome::Unbounded);
    }
    let (x, duals) = match (!T::EXACT).then(|| tab.refine(cost)).flatten() {
        Some(r) => r,
        None => (tab.primal(), tab.duals(cost)),
    };
    let mut objective = T::zero();
    for (cj, xj) in lp.c.iter().zip(&x) {
        objective.add_mul_assign(cj, xj);
    }
    Ok(LpOutcome::Optimal { x, objective, duals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};

    fn small() -> StandardForm<Rational> {
        // max x + y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let mut lp = StandardForm::new(2, 4);
        for (i, row) in [[1, 2, 1, 0], [3, 1, 0, 1]].iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                lp.set(i, j, rational(*v, 1));
            }
        }
        lp.set_rhs(0, rational(4, 1));
        lp.set_rhs(1, rational(6, 1));
        lp.set_cost(0, rational(1, 1));
        lp.set_cost(1, rational(1, 1));
        lp
    }

    #[test]
    fn exact_optimum_and_duals() {
        let lp = small();
        let LpOutcome::Optimal { x, objective, duals } = solve(&lp, SimplexOptions::for_backend::<Rational>()).unwrap()
        else {
            panic!("expected optimum")
        };
        assert_eq!(objective, rational(14, 5));
        assert_eq!(&x[..2], &[rational(8, 5), rational(6, 5)]);
        // y·b equals the objective
        assert_eq!(&duals[0] * rational(4, 1) + &duals[1] * rational(6, 1), objective);
    }

    #[test]
    fn float_matches_exact() {
        let lp = small();
        let mut f = StandardForm::<f64>::new(2, 4);
        for i in 0..2 {
            for j in 0..4 {
                f.set(i, j, crate::scalar::rational_to_f64(lp.get(i, j)));
            }
            f.set_rhs(i, crate::scalar::rational_to_f64(&lp.rhs()[i]));
        }
        f.set_cost(0, 1.0);
        f.set_cost(1, 1.0);
        let LpOutcome::Optimal { objective, .. } = solve(&f, SimplexOptions::for_backend::<f64>()).unwrap() else {
            panic!()
        };
        assert!((objective - 2.8).abs() < 1e-12);
    }

    #[test]
    fn farkas_certificate() {
        // x + y = 1, x + y = 2
        let mut lp = StandardForm::<Rational>::new(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                lp.set(i, j, rational(1, 1));
            }
        }
        lp.set_rhs(0, rational(1, 1));
        lp.set_rhs(1, rational(-2, 1) * rational(-1, 1));
        let LpOutcome::Infeasible { farkas } = solve(&lp, SimplexOptions::for_backend::<Rational>()).unwrap() else {
            panic!()
        };
        for j in 0..2 {
            let s = &farkas[0] * lp.get(0, j) + &farkas[1] * lp.get(1, j);
            assert!(s >= rational(0, 1));
        }
        assert!(&farkas[0] * rational(1, 1) + &farkas[1] * rational(2, 1) < rational(0, 1));
    }

    #[test]
    fn unbounded_detected() {
        // max x s.t. x - y = 0
        let mut lp = StandardForm::<Rational>::new(1, 2);
        lp.set(0, 0, rational(1, 1));
        lp.set(0, 1, rational(-1, 1));
        lp.set_cost(0, rational(1, 1));
        assert_eq!(solve(&lp, SimplexOptions::for_backend::<Rational>()).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_tolerated() {
        // x + y = 1 twice; max x
        let mut lp = StandardForm::<Rational>::new(2, 2);
        for i in 0..2 {
            lp.set(i, 0, rational(1, 1));
            lp.set(i, 1, rational(1, 1));
            lp.set_rhs(i, rational(1, 1));
        }
        lp.set_cost(0, rational(1, 1));
        let LpOutcome::Optimal { objective, .. } = solve(&lp, SimplexOptions::for_backend::<Rational>()).unwrap() else {
            panic!()
        };
        assert_eq!(objective, rational(1, 1));
    }
}
