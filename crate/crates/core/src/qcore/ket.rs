use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::layout::{check_unique, resolve, Layout};
use super::{qubit_equivalent, DensityState, SystemLabel, MAX_VECTOR_QUBITS, NULL_PROBABILITY, UNITARY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{vec_norm, CMatrix, C64, ZERO};
use crate::math::sqrt;

/// Pure state `|ψ⟩` over labelled subsystems.
///
/// Used where the global state is pure but too large for a dense density
/// matrix; reductions return a [`DensityState`] on the kept systems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    systems: Vec<SystemLabel>,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Normalizes `amplitudes`; errors on the zero vector.
    pub fn new(systems: Vec<SystemLabel>, amplitudes: Vec<C64>) -> Result<Self> {
        check_unique(&systems)?;
        let dim: usize = systems.iter().map(|s| s.dim).product();
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dimension {dim}",
                amplitudes.len()
            )));
        }
        let q = qubit_equivalent(dim);
        if q > MAX_VECTOR_QUBITS {
            return Err(Error::SizeCapExceeded { requested: q, cap: MAX_VECTOR_QUBITS });
        }
        let n = vec_norm(&amplitudes);
        if n == 0.0 {
            return Err(Error::InvalidState("zero vector".to_string()));
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / n).collect();
        Ok(StateVector { systems, amplitudes })
    }

    pub fn basis(systems: Vec<SystemLabel>, index: usize) -> Result<Self> {
        let dim: usize = systems.iter().map(|s| s.dim).product();
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} >= {dim}")));
        }
        let mut a = vec![ZERO; dim];
        a[index] = C64::new(1.0, 0.0);
        Self::new(systems, a)
    }

    /// All systems in `|0⟩`.
    pub fn zeros(systems: Vec<SystemLabel>) -> Result<Self> {
        Self::basis(systems, 0)
    }

    /// `(|00⟩ + |11⟩)/√2`-type maximally entangled state on two systems of
    /// equal dimension.
    pub fn max_entangled(a: SystemLabel, b: SystemLabel) -> Result<Self> {
        if a.dim != b.dim {
            return Err(Error::DimensionMismatch(format!("{a} vs {b}")));
        }
        let d = a.dim;
        let mut amp = vec![ZERO; d * d];
        for i in 0..d {
            amp[i * d + i] = C64::new(1.0 / sqrt(d as f64), 0.0);
        }
        Self::new(vec![a, b], amp)
    }

    pub fn systems(&self) -> &[SystemLabel] {
        &self.systems
    }

    pub fn names(&self) -> Vec<&str> {
        self.systems.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn has_system(&self, name: &str) -> bool {
        self.systems.iter().any(|s| s.name == name)
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let mut systems = self.systems.clone();
        systems.extend(other.systems.iter().cloned());
        check_unique(&systems)?;
        let mut amp = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amp.push(a * b);
            }
        }
        Self::new(systems, amp)
    }

    /// `U|ψ⟩` with `U` on `targets`.
    pub fn apply_unitary(&self, u: &CMatrix, targets: &[&str]) -> Result<StateVector> {
        let dev = u.unitarity_error();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(StateVector {
            systems: self.systems.clone(),
            amplitudes: self.apply_operator(u, targets)?,
        })
    }

    /// Unnormalized `K|ψ⟩` for square `K` on `targets`.
    pub(crate) fn apply_operator(&self, k: &CMatrix, targets: &[&str]) -> Result<Vec<C64>> {
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
        let to = layout.offsets(&pos);
        let ro = layout.offsets(&layout.complement(&pos));
        let mut out = vec![ZERO; self.dim()];
        let mut buf = vec![ZERO; dt];
        for &r in &ro {
            for (a, &ta) in to.iter().enumerate() {
                buf[a] = self.amplitudes[ta + r];
            }
            for (i, &ti) in to.iter().enumerate() {
                let row = k.row(i);
                out[ti + r] = row.iter().zip(&buf).map(|(x, y)| x * y).sum();
            }
        }
        Ok(out)
    }

    /// Amplitudes reshaped to a `keep × rest` matrix, keep factors in the
    /// given order and rest factors in state order.
    pub(crate) fn bipartition(&self, keep: &[&str]) -> Result<(Vec<SystemLabel>, CMatrix)> {
        let pos = resolve(&self.systems, keep)?;
        let layout = Layout::new(&self.systems);
        let ko = layout.offsets(&pos);
        let ro = layout.offsets(&layout.complement(&pos));
        let m = CMatrix::from_fn(ko.len(), ro.len(), |i, j| self.amplitudes[ko[i] + ro[j]]);
        Ok((pos.iter().map(|&p| self.systems[p].clone()).collect(), m))
    }

    /// Marginal density matrix on `keep`, factors in state order.
    pub fn reduced(&self, keep: &[&str]) -> Result<DensityState> {
        let mut pos = resolve(&self.systems, keep)?;
        pos.sort_unstable();
        let names: Vec<&str> = pos.iter().map(|&p| self.systems[p].name.as_str()).collect();
        let (systems, m) = self.bipartition(&names)?;
        let rho = m.matmul(&m.adjoint()).hermitian_part();
        let out = DensityState::unchecked(systems, rho)?;
        out.debug_check();
        Ok(out)
    }

    /// Full `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> Result<DensityState> {
        DensityState::unchecked(
            self.systems.clone(),
            CMatrix::outer(&self.amplitudes, &self.amplitudes),
        )
    }

    /// Spectrum of the marginal on `subset`, computed on whichever side of
    /// the bipartition is smaller.
    pub fn marginal_spectrum(&self, subset: &[&str]) -> Result<Vec<f64>> {
        let (_, m) = self.bipartition(subset)?;
        let g = if m.rows() <= m.cols() {
            m.matmul(&m.adjoint())
        } else {
            m.adjoint().matmul(&m)
        };
        Ok(crate::linalg::eigvalsh(&g.hermitian_part()))
    }

    /// Project `name` onto `|v⟩`, returning the probability and, when it
    /// exceeds the null threshold, the normalized post-state with `name`
    /// still present and collapsed.
    pub fn project(&self, name: &str, v: &[C64]) -> Result<(f64, Option<StateVector>)> {
        let p = CMatrix::outer(v, v);
        let amp = self.apply_operator(&p, &[name])?;
        let prob: f64 = amp.iter().map(|z| z.norm_sqr()).sum();
        if prob <= NULL_PROBABILITY {
            return Ok((prob, None));
        }
        Ok((prob, Some(Self::new(self.systems.clone(), amp)?)))
    }

    /// Same state with factors reordered.
    pub fn permuted(&self, order: &[&str]) -> Result<StateVector> {
        if order.len() != self.systems.len() {
            return Err(Error::DimensionMismatch("permutation length".to_string()));
        }
        let pos = resolve(&self.systems, order)?;
        let idx = Layout::new(&self.systems).offsets(&pos);
        Ok(StateVector {
            systems: pos.iter().map(|&p| self.systems[p].clone()).collect(),
            amplitudes: idx.iter().map(|&i| self.amplitudes[i]).collect(),
        })
    }

    /// Rename a subsystem in place.
    pub fn relabel(&mut self, from: &str, to: &str) -> Result<()> {
        if self.has_system(to) {
            return Err(Error::DuplicateLabel(to.to_string()));
        }
        let p = resolve(&self.systems, &[from])?[0];
        self.systems[p].name = to.to_string();
        Ok(())
    }

    /// `|⟨φ|ψ⟩|²` for states on the same ordered systems.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        let other = other.permuted(&self.names())?;
        Ok(crate::linalg::inner(&self.amplitudes, &other.amplitudes).norm_sqr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::haar_unitary;

    #[test]
    fn reduced_matches_dense_trace() {
        let sys = vec![SystemLabel::qubit("A"), SystemLabel::new("B", 3).unwrap(), SystemLabel::qubit("C")];
        let psi = StateVector::zeros(sys).unwrap();
        let u = haar_unitary(12, 7);
        let psi = psi.apply_unitary(&u, &["C", "B", "A"]).unwrap();
        let dense = psi.density().unwrap();
        for keep in [&["A"][..], &["B", "C"][..], &["C", "A"][..]] {
            let a = psi.reduced(keep).unwrap();
            let b = dense.partial_trace(keep).unwrap();
            assert_eq!(a.names(), b.names());
            assert!((a.matrix() - b.matrix()).max_abs() < 1e-13);
        }
    }

    #[test]
    fn unitary_agrees_with_dense() {
        let sys = vec![SystemLabel::qubit("A"), SystemLabel::qubit("B"), SystemLabel::qubit("C")];
        let psi = StateVector::new(sys, (0..8).map(|i| C64::new(i as f64, 1.0)).collect()).unwrap();
        let u = haar_unitary(4, 3);
        let a = psi.apply_unitary(&u, &["C", "A"]).unwrap().density().unwrap();
        let b = psi.density().unwrap().apply_unitary(&u, &["C", "A"]).unwrap();
        assert!((a.matrix() - b.matrix()).max_abs() < 1e-13);
    }

    #[test]
    fn spectrum_from_either_side() {
        let sys: Vec<_> = ["A", "B", "C", "D"].iter().map(|n| SystemLabel::qubit(*n)).collect();
        let psi = StateVector::zeros(sys).unwrap().apply_unitary(&haar_unitary(16, 1), &["A", "B", "C", "D"]).unwrap();
        let mut s1 = psi.marginal_spectrum(&["A"]).unwrap();
        let mut s2 = psi.marginal_spectrum(&["B", "C", "D"]).unwrap();
        s2.retain(|&x| x > 1e-12);
        s1.retain(|&x| x > 1e-12);
        assert_eq!(s1.len(), s2.len());
        for (a, b) in s1.iter().zip(&s2) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
