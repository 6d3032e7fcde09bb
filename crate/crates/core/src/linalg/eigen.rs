//! Hermitian eigensolver: Householder reduction to a real symmetric
//! tridiagonal matrix followed by the implicit QL iteration.

use alloc::vec;
use alloc::vec::Vec;

use super::{CMatrix, C64, ONE, ZERO};
use crate::math::{hypot, sqrt};

/// Eigen-decomposition `A = V diag(values) V†`, values ascending, eigenvectors
/// in the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.col(k)
    }
}

/// Full decomposition. Only the Hermitian part of `a` is used.
pub fn eigh(a: &CMatrix) -> HermitianEigen {
    let (values, vectors) = decompose(a, true);
    HermitianEigen {
        values,
        vectors: vectors.expect("vectors requested"),
    }
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(a: &CMatrix) -> Vec<f64> {
    decompose(a, false).0
}

fn decompose(a: &CMatrix, want_vectors: bool) -> (Vec<f64>, Option<CMatrix>) {
    assert!(a.is_square(), "eigh needs a square matrix");
    let n = a.rows();
    if n == 0 {
        return (Vec::new(), want_vectors.then(|| CMatrix::zeros(0, 0)));
    }
    let mut t = a.hermitian_part();
    let mut q = want_vectors.then(|| CMatrix::identity(n));

    tridiagonalize(&mut t, q.as_mut());

    let mut d: Vec<f64> = (0..n).map(|i| t[(i, i)].re).collect();
    let mut e = vec![0.0; n];
    // Diagonal phase change making the off-diagonal real and non-negative.
    let mut phase = ONE;
    for i in 0..n - 1 {
        let sub = t[(i + 1, i)];
        let r = sub.norm();
        e[i] = r;
        if r > 0.0 {
            phase *= sub / r;
        }
        if let Some(q) = q.as_mut() {
            for row in 0..n {
                q[(row, i + 1)] *= phase;
            }
        }
    }

    tql2(&mut d, &mut e, q.as_mut());
    sort_ascending(&mut d, q.as_mut());
    (d, q)
}

fn tridiagonalize(a: &mut CMatrix, mut q: Option<&mut CMatrix>) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    for k in 0..n - 2 {
        let m = n - k - 1;
        let xnorm = sqrt((k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum());
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        // v = x - alpha e1 with alpha = -phase |x|
        for (idx, i) in (k + 1..n).enumerate() {
            v[idx] = a[(i, k)];
        }
        v[0] += phase * xnorm;
        let vv: f64 = v[..m].iter().map(|z| z.norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let beta = 2.0 / vv;

        // Left: rows k+1.. of A  ←  A - beta v (v† A)
        for j in 0..n {
            let mut s = ZERO;
            for (idx, i) in (k + 1..n).enumerate() {
                s += v[idx].conj() * a[(i, j)];
            }
            w[j] = s * beta;
        }
        for (idx, i) in (k + 1..n).enumerate() {
            let vi = v[idx];
            for j in 0..n {
                let wj = w[j];
                a[(i, j)] -= vi * wj;
            }
        }
        // Right: cols k+1.. of A  ←  A - beta (A v) v†
        for i in 0..n {
            let mut s = ZERO;
            for (idx, j) in (k + 1..n).enumerate() {
                s += a[(i, j)] * v[idx];
            }
            let s = s * beta;
            for (idx, j) in (k + 1..n).enumerate() {
                a[(i, j)] -= s * v[idx].conj();
            }
        }
        if let Some(q) = q.as_deref_mut() {
            for i in 0..n {
                let mut s = ZERO;
                for (idx, j) in (k + 1..n).enumerate() {
                    s += q[(i, j)] * v[idx];
                }
                let s = s * beta;
                for (idx, j) in (k + 1..n).enumerate() {
                    q[(i, j)] -= s * v[idx].conj();
                }
            }
        }
        // Exact zeros below the subdiagonal.
        for i in k + 2..n {
            a[(i, k)] = ZERO;
            a[(k, i)] = ZERO;
        }
    }
}

/// Implicit QL on a real symmetric tridiagonal matrix (`d` diagonal,
/// `e[i]` couples `i` and `i+1`, `e[n-1] = 0`). Rotations accumulate into
/// the columns of `v`.
fn tql2(d: &mut [f64], e: &mut [f64], mut v: Option<&mut CMatrix>) {
    let n = d.len();
    if n == 1 {
        return;
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                assert!(iter < 200, "tql2 did not converge");
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..n {
                            let hk = v[(k, i + 1)];
                            let vk = v[(k, i)];
                            v[(k, i + 1)] = vk * s + hk * c;
                            v[(k, i)] = vk * c - hk * s;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

fn sort_ascending(d: &mut [f64], v: Option<&mut CMatrix>) {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    d.copy_from_slice(&sorted);
    if let Some(v) = v {
        let old = v.clone();
        for (new_col, &old_col) in order.iter().enumerate() {
            for r in 0..n {
                v[(r, new_col)] = old[(r, old_col)];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(n: usize, seed: u64) -> CMatrix {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let m = CMatrix::from_fn(n, n, |_, _| C64::new(next(), next()));
        (&m + &m.adjoint()).scale_real(0.5)
    }

    fn check(a: &CMatrix) {
        let n = a.rows();
        let e = eigh(a);
        let v = &e.vectors;
        assert!(v.unitarity_error() < 1e-11, "eigenvectors not orthonormal");
        let recon = &(v * &CMatrix::diag_real(&e.values)) * &v.adjoint();
        assert!((&recon - a).max_abs() < 1e-11 * (1.0 + a.max_abs()) * n as f64);
        for w in e.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn random_hermitian_matrices_reconstruct() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (5, 4), (16, 5), (33, 6), (64, 7)] {
            check(&lcg_matrix(n, seed));
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let a = CMatrix::identity(6).scale_real(0.25);
        check(&a);
        let vals = eigvalsh(&a);
        assert!(vals.iter().all(|&l| (l - 0.25).abs() < 1e-15));
    }

    #[test]
    fn pauli_y_spectrum() {
        let y = CMatrix::from_vec(2, 2, vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO]);
        let vals = eigvalsh(&y);
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        check(&y);
    }

    #[test]
    fn values_only_match_full() {
        let a = lcg_matrix(20, 11);
        let full = eigh(&a).values;
        let only = eigvalsh(&a);
        for (x, y) in full.iter().zip(&only) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
