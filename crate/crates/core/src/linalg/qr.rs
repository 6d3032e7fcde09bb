use alloc::vec;

use super::{CMatrix, C64, ONE, ZERO};
use crate::math::sqrt;

/// `A = Q R` with `Q` unitary (square) and `R` upper triangular.
#[derive(Clone, Debug)]
pub struct QrDecomposition {
    pub q: CMatrix,
    pub r: CMatrix,
}

/// Householder QR of a square complex matrix.
pub fn qr(a: &CMatrix) -> QrDecomposition {
    assert!(a.is_square(), "qr expects a square matrix");
    let n = a.rows();
    let mut r = a.clone();
    let mut q = CMatrix::identity(n);
    let mut v = vec![ZERO; n];
    for k in 0..n.saturating_sub(1) {
        let xnorm = sqrt((k..n).map(|i| r[(i, k)].norm_sqr()).sum());
        if xnorm == 0.0 {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        for i in k..n {
            v[i] = r[(i, k)];
        }
        v[k] += phase * xnorm;
        let vv: f64 = (k..n).map(|i| v[i].norm_sqr()).sum();
        let beta = 2.0 / vv;
        for j in 0..n {
            let s: C64 = (k..n).map(|i| v[i].conj() * r[(i, j)]).sum::<C64>() * beta;
            for i in k..n {
                let vi = v[i];
                r[(i, j)] -= vi * s;
            }
        }
        for i in 0..n {
            let s: C64 = (k..n).map(|j| q[(i, j)] * v[j]).sum::<C64>() * beta;
            for j in k..n {
                let vj = v[j].conj();
                q[(i, j)] -= s * vj;
            }
        }
        for i in k + 1..n {
            r[(i, k)] = ZERO;
        }
    }
    QrDecomposition { q, r }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_and_is_unitary() {
        let a = CMatrix::from_fn(5, 5, |i, j| C64::new((i * 7 + j * 3) as f64 % 5.0 - 2.0, (i + 2 * j) as f64 % 3.0));
        let QrDecomposition { q, r } = qr(&a);
        assert!(q.unitarity_error() < 1e-12);
        assert!((&(&q * &r) - &a).max_abs() < 1e-12);
        for i in 0..5 {
            for j in 0..i {
                assert_eq!(r[(i, j)], ZERO);
            }
        }
    }
}
