use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::layout::check_unique;
use super::{DensityState, StateVector, SystemLabel, CPTP_TOL};
use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix, C64, ZERO};
use crate::math::sqrt;

/// Completely positive trace-preserving map in operator-sum form.
///
/// Each Kraus operator is `dim(outputs) × dim(inputs)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    kraus: Vec<CMatrix>,
    inputs: Vec<SystemLabel>,
    outputs: Vec<SystemLabel>,
}

fn total(s: &[SystemLabel]) -> usize {
    s.iter().map(|x| x.dim).product()
}

impl Channel {
    pub fn new(kraus: Vec<CMatrix>, inputs: Vec<SystemLabel>, outputs: Vec<SystemLabel>) -> Result<Self> {
        let ch = Self::unchecked(kraus, inputs, outputs)?;
        let err = ch.completeness_error();
        if err > CPTP_TOL {
            return Err(Error::InvalidArgument(format!("Kraus completeness violated by {err:e}")));
        }
        Ok(ch)
    }

    fn unchecked(kraus: Vec<CMatrix>, inputs: Vec<SystemLabel>, outputs: Vec<SystemLabel>) -> Result<Self> {
        check_unique(&inputs)?;
        check_unique(&outputs)?;
        let (di, d_o) = (total(&inputs), total(&outputs));
        if kraus.is_empty() {
            return Err(Error::InvalidArgument("channel without Kraus operators".into()));
        }
        for k in &kraus {
            if k.rows() != d_o || k.cols() != di {
                return Err(Error::DimensionMismatch(format!(
                    "{}x{} Kraus operator for a {di} -> {d_o} channel",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        Ok(Channel { kraus, inputs, outputs })
    }

    /// Conjugation by a unitary on `systems`.
    pub fn unitary(u: CMatrix, systems: Vec<SystemLabel>) -> Result<Self> {
        Self::new(alloc::vec![u], systems.clone(), systems)
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn inputs(&self) -> &[SystemLabel] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[SystemLabel] {
        &self.outputs
    }

    /// `‖Σ K†K − 𝟙‖_max`.
    pub fn completeness_error(&self) -> f64 {
        let di = total(&self.inputs);
        let mut s = CMatrix::zeros(di, di);
        for k in &self.kraus {
            s = &s + &k.adjoint().matmul(k);
        }
        (&s - &CMatrix::identity(di)).max_abs()
    }

    /// Apply to the `inputs` factors of `rho`. Outputs take the place of the
    /// first input in the factor order.
    pub fn apply(&self, rho: &DensityState) -> Result<DensityState> {
        let names: Vec<&str> = rho.names();
        let in_names: Vec<&str> = self.inputs.iter().map(|s| s.name.as_str()).collect();
        for s in &self.inputs {
            if rho.system(&s.name)?.dim != s.dim {
                return Err(Error::DimensionMismatch(format!("channel input {s}")));
            }
        }
        let rest: Vec<&str> = names.iter().copied().filter(|n| !in_names.contains(n)).collect();
        for o in &self.outputs {
            if rest.contains(&o.name.as_str()) {
                return Err(Error::RecordCollision(o.name.clone()));
            }
        }
        let mut order = in_names.clone();
        order.extend(rest.iter().copied());
        let p = rho.permuted(&order)?;
        let di = total(&self.inputs);
        let d_o = total(&self.outputs);
        let r = p.dim() / di;
        let m = p.matrix();
        let mut out = CMatrix::zeros(d_o * r, d_o * r);
        for k in &self.kraus {
            // (K ⊗ 𝟙) ρ
            let left = CMatrix::from_fn(d_o * r, di * r, |row, col| {
                let (o, x) = (row / r, row % r);
                let mut s = ZERO;
                for a in 0..di {
                    let kv = k[(o, a)];
                    if kv != ZERO {
                        s += kv * m[(a * r + x, col)];
                    }
                }
                s
            });
            for i in 0..d_o * r {
                for pp in 0..d_o {
                    for y in 0..r {
                        let mut s = ZERO;
                        for b in 0..di {
                            let kv = k[(pp, b)];
                            if kv != ZERO {
                                s += left[(i, b * r + y)] * kv.conj();
                            }
                        }
                        out[(i, pp * r + y)] += s;
                    }
                }
            }
        }
        let mut systems = self.outputs.clone();
        for n in &rest {
            systems.push(rho.system(n)?.clone());
        }
        let res = DensityState::unchecked(systems, out.hermitian_part())?;
        // restore the original order with outputs at the first input's slot
        let first = names.iter().position(|n| in_names.contains(n)).unwrap_or(0);
        let mut final_order: Vec<&str> = Vec::new();
        let before: Vec<&str> = names[..first].iter().copied().filter(|n| !in_names.contains(n)).collect();
        final_order.extend(before.iter().copied());
        final_order.extend(self.outputs.iter().map(|s| s.name.as_str()));
        final_order.extend(rest.iter().copied().filter(|n| !before.contains(n)));
        let res = res.permuted(&final_order)?;
        res.debug_check();
        Ok(res)
    }

    /// Petz recovery with respect to the reference state `sigma` on the
    /// inputs: `R(X) = σ^{1/2} N†(N(σ)^{-1/2} X N(σ)^{-1/2}) σ^{1/2}`.
    pub fn petz_recovery(&self, sigma: &CMatrix) -> Result<PetzRecovery> {
        let di = total(&self.inputs);
        if sigma.rows() != di || !sigma.is_square() {
            return Err(Error::DimensionMismatch("reference state on channel inputs".into()));
        }
        let d_o = total(&self.outputs);
        let s_half = sigma.hermitian_map(|l| if l > 0.0 { sqrt(l) } else { 0.0 });
        let ne = self.kraus.len() * di;
        let inv_sqrt = if d_o <= ne {
            let mut n = CMatrix::zeros(d_o, d_o);
            for k in &self.kraus {
                n = &n + &k.matmul(sigma).matmul(&k.adjoint());
            }
            pinv_sqrt(&n.hermitian_part())
        } else {
            // N(σ) = L L† with L = [K_1 σ^{1/2}, K_2 σ^{1/2}, …]
            let blocks: Vec<CMatrix> = self.kraus.iter().map(|k| k.matmul(&s_half)).collect();
            let l = CMatrix::from_fn(d_o, ne, |i, j| blocks[j / di][(i, j % di)]);
            let g = l.adjoint().matmul(&l).hermitian_part();
            let e = eigh(&g);
            let top = e.values.last().copied().unwrap_or(0.0);
            let cut = top * PINV_CUTOFF;
            // N^{-1/2} = L V Λ^{-3/2} V† L†
            let lv = l.matmul(&e.vectors);
            let mut w = lv.clone();
            for j in 0..ne {
                let lam = e.values[j];
                let f = if lam > cut { 1.0 / (lam * sqrt(lam)) } else { 0.0 };
                for i in 0..d_o {
                    w[(i, j)] = w[(i, j)].scale(f);
                }
            }
            w.matmul(&lv.adjoint()).hermitian_part()
        };
        let kraus = self
            .kraus
            .iter()
            .map(|k| s_half.matmul(&k.adjoint()).matmul(&inv_sqrt))
            .collect();
        Ok(PetzRecovery {
            kraus,
            inputs: self.outputs.clone(),
            outputs: self.inputs.clone(),
        })
    }
}

const PINV_CUTOFF: f64 = 1e-12;

fn pinv_sqrt(n: &CMatrix) -> CMatrix {
    let e = eigh(n);
    let top = e.values.last().copied().unwrap_or(0.0);
    let cut = top * PINV_CUTOFF;
    let d = n.rows();
    let f: Vec<f64> = e.values.iter().map(|&l| if l > cut { 1.0 / sqrt(l) } else { 0.0 }).collect();
    let v = &e.vectors;
    CMatrix::from_fn(d, d, |i, j| (0..d).map(|k| v[(i, k)] * v[(j, k)].conj() * f[k]).sum())
}

/// Petz (transpose-channel) decoder. Trace preserving on the support of
/// `N(σ)`, trace non-increasing elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PetzRecovery {
    kraus: Vec<CMatrix>,
    inputs: Vec<SystemLabel>,
    outputs: Vec<SystemLabel>,
}

impl PetzRecovery {
    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn inputs(&self) -> &[SystemLabel] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[SystemLabel] {
        &self.outputs
    }

    /// Rename the decoded systems (same dimensions).
    pub fn with_outputs(mut self, outputs: Vec<SystemLabel>) -> Result<Self> {
        if total(&outputs) != total(&self.outputs) {
            return Err(Error::DimensionMismatch("recovery output relabeling".into()));
        }
        check_unique(&outputs)?;
        self.outputs = outputs;
        Ok(self)
    }

    /// `‖Σ A†A − Π‖_max` where `Π` is the identity; small only when
    /// `N(σ)` has full support.
    pub fn completeness_error(&self) -> f64 {
        let d = total(&self.inputs);
        let mut s = CMatrix::zeros(d, d);
        for a in &self.kraus {
            s = &s + &a.adjoint().matmul(a);
        }
        (&s - &CMatrix::identity(d)).max_abs()
    }

    /// Decode the recovery inputs of a pure global state, keeping the
    /// systems `keep` alongside. Result factor order: outputs, then `keep`
    /// as given. Not renormalized.
    pub fn apply_pure(&self, psi: &StateVector, keep: &[&str]) -> Result<CMatrix> {
        let in_names: Vec<&str> = self.inputs.iter().map(|s| s.name.as_str()).collect();
        for k in keep {
            if in_names.contains(k) {
                return Err(Error::OverlappingSets((*k).into()));
            }
        }
        let mut order = in_names.clone();
        order.extend(keep.iter().copied());
        order.extend(psi.names().into_iter().filter(|n| !in_names.contains(n) && !keep.contains(n)));
        let p = psi.permuted(&order)?;
        let din = total(&self.inputs);
        let dk: usize = keep.iter().map(|n| psi.systems().iter().find(|s| s.name == *n).map_or(1, |s| s.dim)).product();
        let de = p.dim() / din / dk;
        let amp = p.amplitudes();
        // Ψ as din × (dk·de)
        let psi_m = CMatrix::from_fn(din, dk * de, |i, j| amp[i * dk * de + j]);
        let dout = total(&self.outputs);
        let mut rho = CMatrix::zeros(dout * dk, dout * dk);
        for a in &self.kraus {
            let phi = a.matmul(&psi_m); // dout × (dk·de)
            // reshape to (dout·dk) × de and accumulate Φ Φ†
            let f = CMatrix::from_fn(dout * dk, de, |r, e| phi[(r / dk, (r % dk) * de + e)]);
            rho = &rho + &f.matmul(&f.adjoint());
        }
        Ok(rho.hermitian_part())
    }

    /// Apply to a density matrix whose factors include all recovery inputs.
    pub fn apply(&self, rho: &DensityState) -> Result<CMatrix> {
        let in_names: Vec<&str> = self.inputs.iter().map(|s| s.name.as_str()).collect();
        let rest: Vec<&str> = rho.names().into_iter().filter(|n| !in_names.contains(n)).collect();
        let mut order = in_names.clone();
        order.extend(rest.iter().copied());
        let p = rho.permuted(&order)?;
        let din = total(&self.inputs);
        let r = p.dim() / din;
        let dout = total(&self.outputs);
        let m = p.matrix();
        let mut out = CMatrix::zeros(dout * r, dout * r);
        for a in &self.kraus {
            let ext = a.kron(&CMatrix::identity(r));
            out = &out + &ext.matmul(m).matmul(&ext.adjoint());
        }
        Ok(out.hermitian_part())
    }
}

/// `⟨Φ⁺|ρ|Φ⁺⟩` for a `d²×d²` matrix on two `d`-dimensional factors.
pub fn max_entangled_overlap(rho: &CMatrix, d: usize) -> f64 {
    let mut s = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            s += rho[(i * d + i, j * d + j)];
        }
    }
    s.re / d as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{haar_unitary, seeded_rng, random_mixed_state};

    fn isometry_channel(seed: u64) -> Channel {
        // qubit into 3 qubits, keep 2, trace 1
        let u = haar_unitary(8, seed);
        let k: Vec<CMatrix> = (0..2)
            .map(|e| CMatrix::from_fn(4, 2, |b, q| u[(b * 2 + e, q * 4)]))
            .collect();
        Channel::new(k, alloc::vec![SystemLabel::qubit("Q")], alloc::vec![SystemLabel::qubit("B1"), SystemLabel::qubit("B2")]).unwrap()
    }

    #[test]
    fn random_channel_is_cptp_and_trace_preserving() {
        let ch = isometry_channel(3);
        assert!(ch.completeness_error() < 1e-12);
        let mut rng = seeded_rng(1);
        let rho = random_mixed_state(alloc::vec![SystemLabel::qubit("X"), SystemLabel::qubit("Q")], 2, &mut rng).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert_eq!(out.names(), alloc::vec!["X", "B1", "B2"]);
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn factored_and_direct_petz_agree() {
        let ch = isometry_channel(5);
        let sigma = CMatrix::identity(2).scale_real(0.5);
        let direct = ch.petz_recovery(&sigma).unwrap();
        // force the factored route via a channel with wide outputs
        let wide = Channel::new(
            ch.kraus().iter().map(|k| k.kron(&CMatrix::from_real(2, 1, &[1.0, 0.0]))).collect(),
            ch.inputs().to_vec(),
            alloc::vec![SystemLabel::qubit("B1"), SystemLabel::qubit("B2"), SystemLabel::qubit("B3")],
        )
        .unwrap();
        let fact = wide.petz_recovery(&sigma).unwrap();
        for (a, b) in direct.kraus().iter().zip(fact.kraus()) {
            let b_red = CMatrix::from_fn(2, 4, |i, j| b[(i, j * 2)]);
            assert!((a - &b_red).max_abs() < 1e-10);
        }
    }

    #[test]
    fn petz_inverts_unitary() {
        let u = haar_unitary(2, 11);
        let ch = Channel::unitary(u, alloc::vec![SystemLabel::qubit("Q")]).unwrap();
        let r = ch.petz_recovery(&CMatrix::identity(2).scale_real(0.5)).unwrap();
        let psi = StateVector::max_entangled(SystemLabel::qubit("Q"), SystemLabel::qubit("S")).unwrap();
        let psi = psi.apply_unitary(&ch.kraus()[0], &["Q"]).unwrap();
        let rho = r.apply_pure(&psi, &["S"]).unwrap();
        assert!((max_entangled_overlap(&rho, 2) - 1.0).abs() < 1e-12);
    }
}
