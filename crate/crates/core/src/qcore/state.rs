use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::layout::{check_unique, resolve, Layout};
use super::{
    qubit_equivalent, SystemLabel, HERMITIAN_TOL, MAX_DENSE_QUBITS, PSD_TOL, TRACE_TOL, UNITARY_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{eigh, eigvalsh, CMatrix, C64, ZERO};

/// Density matrix over an ordered list of labelled subsystems.
///
/// Invariants (checked by [`DensityState::new`]): Hermitian to `1e-10`
/// max-abs, unit trace to `1e-10`, smallest eigenvalue `≥ -1e-9`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityState {
    systems: Vec<SystemLabel>,
    matrix: CMatrix,
}

impl DensityState {
    pub fn new(systems: Vec<SystemLabel>, matrix: CMatrix) -> Result<Self> {
        let s = Self::unchecked(systems, matrix)?;
        s.validate()?;
        Ok(s)
    }

    /// Structural checks only (labels, shape); skips the spectral checks.
    pub(crate) fn unchecked(systems: Vec<SystemLabel>, matrix: CMatrix) -> Result<Self> {
        check_unique(&systems)?;
        let dim: usize = systems.iter().map(|s| s.dim).product();
        if !matrix.is_square() || matrix.rows() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for systems of total dimension {dim}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let qubits = qubit_equivalent(dim);
        if qubits > MAX_DENSE_QUBITS {
            return Err(Error::SizeCapExceeded {
                requested: qubits,
                cap: MAX_DENSE_QUBITS,
            });
        }
        Ok(DensityState { systems, matrix })
    }

    /// Trace-one scalar over no systems; the unit of [`DensityState::tensor`].
    pub fn scalar() -> Self {
        DensityState {
            systems: Vec::new(),
            matrix: CMatrix::identity(1),
        }
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket (normalization is enforced).
    pub fn pure(systems: Vec<SystemLabel>, ket: &[C64]) -> Result<Self> {
        let norm = crate::linalg::vec_norm(ket);
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".to_string()));
        }
        let k: Vec<C64> = ket.iter().map(|z| z / norm).collect();
        Self::new(systems, CMatrix::outer(&k, &k))
    }

    /// `|index⟩⟨index|` in the joint computational basis.
    pub fn basis(systems: Vec<SystemLabel>, index: usize) -> Result<Self> {
        let dim: usize = systems.iter().map(|s| s.dim).product();
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} >= {dim}")));
        }
        let mut ket = vec![ZERO; dim];
        ket[index] = C64::new(1.0, 0.0);
        Self::pure(systems, &ket)
    }

    pub fn maximally_mixed(systems: Vec<SystemLabel>) -> Result<Self> {
        let dim: usize = systems.iter().map(|s| s.dim).product();
        Self::new(systems, CMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// Diagonal state with the given probabilities in the computational basis.
    pub fn classical(systems: Vec<SystemLabel>, probabilities: &[f64]) -> Result<Self> {
        Self::new(systems, CMatrix::diag_real(probabilities))
    }

    pub fn systems(&self) -> &[SystemLabel] {
        &self.systems
    }

    pub fn names(&self) -> Vec<&str> {
        self.systems.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn has_system(&self, name: &str) -> bool {
        self.systems.iter().any(|s| s.name == name)
    }

    pub fn system(&self, name: &str) -> Result<&SystemLabel> {
        self.systems
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.matrix.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (max-abs {herm:e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {} + {}i", tr.re, tr.im)));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(1.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Cheap invariant check used after every operation in debug builds; the
    /// spectral part is skipped above 64 dimensions.
    #[inline]
    pub(crate) fn debug_check(&self) {
        #[cfg(debug_assertions)]
        {
            let herm = self.matrix.hermiticity_error();
            debug_assert!(herm <= HERMITIAN_TOL * 10.0, "hermiticity drift {herm:e}");
            let tr = self.matrix.trace().re;
            debug_assert!((tr - 1.0).abs() <= TRACE_TOL * 10.0, "trace drift {tr}");
            if self.dim() <= 64 {
                let min = self.eigenvalues().first().copied().unwrap_or(0.0);
                debug_assert!(min >= -PSD_TOL * 10.0, "negative eigenvalue {min:e}");
            }
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        // tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.data().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn rank(&self, rel_cutoff: f64) -> usize {
        let ev = self.eigenvalues();
        let top = ev.last().copied().unwrap_or(0.0).max(0.0);
        ev.iter().filter(|&&l| l > rel_cutoff * top).count()
    }

    /// Pure to within `tol` in purity.
    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_ket(&self, ket: &[C64]) -> f64 {
        self.matrix.expectation(ket).re
    }

    /// `‖ρ − σ‖₁` (no factor one half). Both states must share the system list.
    pub fn trace_distance(&self, other: &DensityState) -> Result<f64> {
        let other = other.permuted(&self.names())?;
        Ok((&self.matrix - &other.matrix).trace_norm_hermitian())
    }

    pub fn tensor(&self, other: &DensityState) -> Result<DensityState> {
        for s in &other.systems {
            if self.has_system(&s.name) {
                return Err(Error::DuplicateLabel(s.name.clone()));
            }
        }
        let mut systems = self.systems.clone();
        systems.extend(other.systems.iter().cloned());
        let out = Self::unchecked(systems, self.matrix.kron(&other.matrix))?;
        out.debug_check();
        Ok(out)
    }

    /// Marginal on `keep`; surviving factors stay in this state's order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityState> {
        let mut pos = resolve(&self.systems, keep)?;
        pos.sort_unstable();
        let layout = Layout::new(&self.systems);
        let rest = layout.complement(&pos);
        let ko = layout.offsets(&pos);
        let ro = layout.offsets(&rest);
        let dk = ko.len();
        let mut out = CMatrix::zeros(dk, dk);
        for (i, &ki) in ko.iter().enumerate() {
            for (j, &kj) in ko.iter().enumerate() {
                let mut s = ZERO;
                for &r in &ro {
                    s += self.matrix[(ki + r, kj + r)];
                }
                out[(i, j)] = s;
            }
        }
        let systems = pos.iter().map(|&p| self.systems[p].clone()).collect();
        let out = Self::unchecked(systems, out)?;
        out.debug_check();
        Ok(out)
    }

    /// Trace out the named systems.
    pub fn trace_out(&self, discard: &[&str]) -> Result<DensityState> {
        resolve(&self.systems, discard)?;
        let keep: Vec<&str> = self
            .systems
            .iter()
            .map(|s| s.name.as_str())
            .filter(|n| !discard.contains(n))
            .collect();
        self.partial_trace(&keep)
    }

    /// Same state with factors reordered to `order` (a permutation of the
    /// current names).
    pub fn permuted(&self, order: &[&str]) -> Result<DensityState> {
        if order.len() != self.systems.len() {
            return Err(Error::DimensionMismatch(format!(
                "permutation of {} names for {} systems",
                order.len(),
                self.systems.len()
            )));
        }
        let pos = resolve(&self.systems, order)?;
        if pos.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(self.clone());
        }
        let layout = Layout::new(&self.systems);
        let idx = layout.offsets(&pos);
        let n = idx.len();
        let m = CMatrix::from_fn(n, n, |i, j| self.matrix[(idx[i], idx[j])]);
        let systems = pos.iter().map(|&p| self.systems[p].clone()).collect();
        Self::unchecked(systems, m)
    }

    /// `U ρ U†` with `U` acting on `targets` (in the order given).
    pub fn apply_unitary(&self, u: &CMatrix, targets: &[&str]) -> Result<DensityState> {
        let dev = u.unitarity_error();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
        let out = self.conjugate_by(u, targets)?;
        out.debug_check();
        Ok(out)
    }

    /// `K ρ K†` for a square `K` on `targets`, no unitarity check and no
    /// renormalization.
    pub(crate) fn conjugate_by(&self, k: &CMatrix, targets: &[&str]) -> Result<DensityState> {
        let pos = resolve(&self.systems, targets)?;
        let layout = Layout::new(&self.systems);
        let dt = layout.dim_of(&pos);
        if k.rows() != dt || k.cols() != dt {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on targets of dimension {dt}",
                k.rows(),
                k.cols()
            )));
        }
        let rest = layout.complement(&pos);
        let to = layout.offsets(&pos);
        let ro = layout.offsets(&rest);
        let n = self.dim();
        // left: K ⊗ I
        let mut left = CMatrix::zeros(n, n);
        let mut col = vec![ZERO; dt];
        for &r in &ro {
            for j in 0..n {
                for (a, &ta) in to.iter().enumerate() {
                    col[a] = self.matrix[(ta + r, j)];
                }
                for (t1, &tt1) in to.iter().enumerate() {
                    let mut s = ZERO;
                    for (a, &ca) in col.iter().enumerate() {
                        s += k[(t1, a)] * ca;
                    }
                    left[(tt1 + r, j)] = s;
                }
            }
        }
        // right: (·)(K† ⊗ I)
        let kc = k.conj();
        let mut out = CMatrix::zeros(n, n);
        for &r in &ro {
            for i in 0..n {
                for (a, &ta) in to.iter().enumerate() {
                    col[a] = left[(i, ta + r)];
                }
                for (t2, &tt2) in to.iter().enumerate() {
                    let mut s = ZERO;
                    for (b, &cb) in col.iter().enumerate() {
                        s += cb * kc[(t2, b)];
                    }
                    out[(i, tt2 + r)] = s;
                }
            }
        }
        Self::unchecked(self.systems.clone(), out)
    }

    /// Renormalize to unit trace. Used after projections.
    pub(crate) fn normalized(mut self) -> Result<DensityState> {
        let tr = self.matrix.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidState("zero trace".to_string()));
        }
        self.matrix = self.matrix.scale_real(1.0 / tr).hermitian_part();
        Ok(self)
    }

    /// Top eigenvector and its eigenvalue.
    pub fn principal_component(&self) -> (f64, Vec<C64>) {
        let e = eigh(&self.matrix);
        let k = e.values.len() - 1;
        (e.values[k], e.vector(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::sqrt;

    fn q(name: &str) -> SystemLabel {
        SystemLabel::qubit(name)
    }

    fn bell() -> DensityState {
        let h = 1.0 / sqrt(2.0);
        let ket = [C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        DensityState::pure(vec![q("Q"), q("S")], &ket).unwrap()
    }

    #[test]
    fn tensor_of_basis_states() {
        let a = DensityState::basis(vec![q("Q_A")], 0).unwrap();
        let b = DensityState::basis(vec![q("Q_C")], 1).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.matrix(), &CMatrix::diag_real(&[0.0, 1.0, 0.0, 0.0]));
        assert_eq!(ab.names(), vec!["Q_A", "Q_C"]);
    }

    #[test]
    fn tensor_with_scalar_is_identity() {
        let b = bell();
        assert_eq!(b.tensor(&DensityState::scalar()).unwrap(), b);
        assert_eq!(DensityState::scalar().tensor(&b).unwrap(), b);
    }

    #[test]
    fn tensor_rejects_duplicate_label() {
        let a = DensityState::basis(vec![q("Q")], 0).unwrap();
        assert_eq!(a.tensor(&a), Err(Error::DuplicateLabel("Q".into())));
    }

    #[test]
    fn bell_times_zero_is_rank_one() {
        let s = bell().tensor(&DensityState::basis(vec![q("R")], 0).unwrap()).unwrap();
        assert!((s.matrix().trace().re - 1.0).abs() < 1e-15);
        assert_eq!(s.rank(1e-10), 1);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let m = bell().partial_trace(&["Q"]).unwrap();
        assert!((m.matrix() - &CMatrix::identity(2).scale_real(0.5)).max_abs() < 1e-15);
    }

    #[test]
    fn hardy_marginal() {
        let t = 1.0 / sqrt(3.0);
        let ket = [C64::new(t, 0.0), C64::new(t, 0.0), C64::new(t, 0.0), ZERO];
        let hardy = DensityState::pure(vec![q("Q_A"), q("Q_C")], &ket).unwrap();
        let qa = hardy.partial_trace(&["Q_A"]).unwrap();
        assert!((qa.matrix()[(0, 0)].re - 2.0 / 3.0).abs() < 1e-15);
        assert!((qa.matrix()[(1, 1)].re - 1.0 / 3.0).abs() < 1e-15);
        assert!(qa.matrix()[(0, 1)].norm() > 0.3, "Hardy Q_A marginal has coherence");
    }

    #[test]
    fn unknown_label() {
        assert_eq!(bell().partial_trace(&["X"]), Err(Error::UnknownLabel("X".into())));
    }

    #[test]
    fn non_unitary_rejected() {
        let k = CMatrix::diag_real(&[1.0, 0.5]);
        assert!(matches!(bell().apply_unitary(&k, &["Q"]), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn hadamard_maps_zero_to_plus() {
        let h = 1.0 / sqrt(2.0);
        let had = CMatrix::from_real(2, 2, &[h, h, h, -h]);
        let z = DensityState::basis(vec![q("Q")], 0).unwrap();
        let out = z.apply_unitary(&had, &["Q"]).unwrap();
        let plus = CMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!((out.matrix() - &plus).max_abs() < 1e-15);
    }

    #[test]
    fn permutation_roundtrip() {
        let s = bell().tensor(&DensityState::basis(vec![q("R")], 1).unwrap()).unwrap();
        let p = s.permuted(&["R", "Q", "S"]).unwrap();
        assert_eq!(p.names(), vec!["R", "Q", "S"]);
        assert_eq!(p.permuted(&["Q", "S", "R"]).unwrap(), s);
    }

    #[test]
    fn validate_rejects_bad_trace() {
        let m = CMatrix::diag_real(&[0.5, 0.4]);
        assert!(matches!(DensityState::new(vec![q("Q")], m), Err(Error::InvalidState(_))));
        let neg = CMatrix::diag_real(&[1.1, -0.1]);
        assert!(DensityState::new(vec![q("Q")], neg).is_err());
    }
}
