//! Small dense complex linear algebra for qubit registers.

use alloc::vec::Vec;

use num_complex::Complex64;

pub type C64 = Complex64;

/// Row-major square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: alloc::vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let d = self.dim * other.dim;
        let mut out = Matrix::zeros(d);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        out.data[(i * other.dim + k) * d + j * other.dim + l] = a * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Matrix, s: f64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    libm::sqrt(a.iter().map(|x| x.norm_sqr()).sum())
}

/// Applies the 2x2 matrix `m` to qubit `q` of an `n`-qubit register (qubit 0
/// is the most significant).
pub fn apply_single(state: &mut [C64], n: usize, q: usize, m: &[[C64; 2]; 2]) {
    let stride = 1usize << (n - 1 - q);
    for base in 0..state.len() {
        if base & stride != 0 {
            continue;
        }
        let (a0, a1) = (state[base], state[base | stride]);
        state[base] = m[0][0] * a0 + m[0][1] * a1;
        state[base | stride] = m[1][0] * a0 + m[1][1] * a1;
    }
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and column eigenvectors (row-major `n x n`).
pub fn symmetric_eigen(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = alloc::vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i * n + j] * a[i * n + j]).sum();
        let scale: f64 = (0..n).map(|i| a[i * n + i] * a[i * n + i]).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}

/// Largest eigenvalue of a Hermitian matrix and a unit eigenvector, via the
/// real embedding `[[Re, -Im], [Im, Re]]`.
pub fn top_eigenpair(h: &Matrix) -> (f64, Vec<C64>) {
    let n = h.dim;
    let m = 2 * n;
    let mut a = alloc::vec![0.0; m * m];
    for r in 0..n {
        for c in 0..n {
            let z = h.get(r, c);
            a[r * m + c] = z.re;
            a[(r + n) * m + c + n] = z.re;
            a[r * m + c + n] = -z.im;
            a[(r + n) * m + c] = z.im;
        }
    }
    let (vals, vecs) = symmetric_eigen(a, m);
    let best = (0..m).max_by(|&i, &j| vals[i].total_cmp(&vals[j])).expect("nonempty");
    let mut psi: Vec<C64> = (0..n).map(|k| C64::new(vecs[k * m + best], vecs[(k + n) * m + best])).collect();
    let nrm = norm(&psi);
    for z in psi.iter_mut() {
        *z /= nrm;
    }
    (vals[best], psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalizes() {
        let a = alloc::vec![2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 5.0];
        let (mut vals, _) = symmetric_eigen(a, 3);
        vals.sort_by(f64::total_cmp);
        for (v, w) in vals.iter().zip([1.0, 3.0, 5.0]) {
            assert!((v - w).abs() < 1e-12);
        }
    }

    #[test]
    fn hermitian_top_eigenvector() {
        // sigma_y has eigenvalue +1 on (1, i)/sqrt 2
        let mut h = Matrix::zeros(2);
        h.data[1] = C64::new(0.0, -1.0);
        h.data[2] = C64::new(0.0, 1.0);
        let (val, v) = top_eigenpair(&h);
        assert!((val - 1.0).abs() < 1e-12);
        let hv = h.apply(&v);
        for (a, b) in hv.iter().zip(&v) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
