use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Channel, DensityState, ProjectiveBasis, SystemLabel, NULL_PROBABILITY};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};

/// One observed (or hypothetical) measurement result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub register: SystemLabel,
    pub value: usize,
    pub probability: f64,
}

/// A measurement branch. `post` is `None` when the branch has probability
/// at or below [`NULL_PROBABILITY`](super::NULL_PROBABILITY).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub outcome: Outcome,
    pub post: Option<DensityState>,
}

impl Branch {
    pub fn is_null(&self) -> bool {
        self.post.is_none()
    }
}

/// `⟨x|_Q ρ |x⟩_Q` as an unnormalized operator on the remaining systems.
pub(crate) fn contract(rho: &DensityState, target: &str, x: &[C64]) -> Result<(Vec<SystemLabel>, CMatrix)> {
    let mut order: Vec<&str> = vec![target];
    order.extend(rho.names().into_iter().filter(|n| *n != target));
    let p = rho.permuted(&order)?;
    let d = p.systems()[0].dim;
    if x.len() != d {
        return Err(Error::DimensionMismatch(format!("vector of length {} for {target}", x.len())));
    }
    let r = p.dim() / d;
    let m = p.matrix();
    let out = CMatrix::from_fn(r, r, |i, j| {
        let mut s = ZERO;
        for a in 0..d {
            if x[a] == ZERO {
                continue;
            }
            for b in 0..d {
                s += x[a].conj() * m[(a * r + i, b * r + j)] * x[b];
            }
        }
        s
    });
    Ok((p.systems()[1..].to_vec(), out))
}

/// Projective measurement with post-measurement states on the unmeasured
/// systems, `σ_{S|Q=x} ∝ tr_Q(|x⟩⟨x|_Q ρ_{QS})`.
pub fn measure_update(rho: &DensityState, basis: &ProjectiveBasis) -> Result<Vec<Branch>> {
    let target = basis.target();
    if rho.system(&target.name)?.dim != target.dim {
        return Err(Error::DimensionMismatch(format!("basis on {target}")));
    }
    let mut out = Vec::with_capacity(basis.len());
    for (k, v) in basis.vectors().iter().enumerate() {
        let (systems, m) = contract(rho, &target.name, v)?;
        let prob = m.trace().re.clamp(0.0, 1.0);
        let post = if prob <= NULL_PROBABILITY {
            None
        } else {
            let s = DensityState::unchecked(systems, m.scale_real(1.0 / prob).hermitian_part())?;
            s.debug_check();
            Some(s)
        };
        out.push(Branch {
            outcome: Outcome { register: target.clone(), value: k, probability: prob },
            post,
        });
    }
    Ok(out)
}

/// Lüders update on `target` with projector `|v⟩⟨v|`: returns the outcome
/// probability and the normalized state with `target` still present.
pub fn lueders_update(rho: &DensityState, target: &str, v: &[C64]) -> Result<(f64, Option<DensityState>)> {
    let p = CMatrix::outer(v, v);
    let m = rho.conjugate_by(&p, &[target])?;
    let prob = m.matrix().trace().re.clamp(0.0, 1.0);
    if prob <= NULL_PROBABILITY {
        return Ok((prob, None));
    }
    let s = m.normalized()?;
    s.debug_check();
    Ok((prob, Some(s)))
}

/// Measure-and-record channel
/// `ρ ↦ Σ_x |x⟩⟨x|_record ⊗ |b_x⟩⟨b_x| ρ |b_x⟩⟨b_x|`, outputs `[record, target]`.
pub fn measurement_channel(basis: &ProjectiveBasis, record: SystemLabel) -> Result<Channel> {
    let target = basis.target().clone();
    if record.name == target.name {
        return Err(Error::RecordCollision(record.name));
    }
    if record.dim != basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "record {record} for a {}-outcome basis",
            basis.len()
        )));
    }
    let d = target.dim;
    let kraus = basis
        .vectors()
        .iter()
        .enumerate()
        .map(|(x, v)| {
            // rows: (record, target), cols: target
            CMatrix::from_fn(record.dim * d, d, |row, col| {
                let (rx, t) = (row / d, row % d);
                if rx == x {
                    v[t] * v[col].conj()
                } else {
                    ZERO
                }
            })
        })
        .collect();
    Channel::new(kraus, vec![target.clone()], vec![record, target])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::sqrt;

    fn hardy() -> DensityState {
        let t = 1.0 / sqrt(3.0);
        let ket = [C64::new(t, 0.0), C64::new(t, 0.0), C64::new(t, 0.0), ZERO];
        DensityState::pure(vec![SystemLabel::qubit("Q_A"), SystemLabel::qubit("Q_C")], &ket).unwrap()
    }

    #[test]
    fn hardy_conditionals() {
        let c = measure_update(&hardy(), &ProjectiveBasis::computational(SystemLabel::qubit("Q_C"))).unwrap();
        let qa = c[1].post.as_ref().unwrap();
        assert!((qa.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((c[1].outcome.probability - 1.0 / 3.0).abs() < 1e-12);

        let a = measure_update(&hardy(), &ProjectiveBasis::computational(SystemLabel::qubit("Q_A"))).unwrap();
        let qc = a[0].post.as_ref().unwrap();
        let plus = CMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!((qc.matrix() - &plus).max_abs() < 1e-12);
    }

    #[test]
    fn bob_state_diagonal_one_bar() {
        // (1/3)(2|0̄⟩⟨0̄| ⊗ |0⟩⟨0| + |0⟩⟨0| ⊗ |1⟩⟨1|) on (Q_A, R_C)
        let plus = CMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let zero = CMatrix::diag_real(&[1.0, 0.0]);
        let one = CMatrix::diag_real(&[0.0, 1.0]);
        let m = &plus.kron(&zero).scale_real(2.0 / 3.0) + &zero.kron(&one).scale_real(1.0 / 3.0);
        let rho = DensityState::new(vec![SystemLabel::qubit("Q_A"), SystemLabel::qubit("R_C")], m).unwrap();
        let b = measure_update(&rho, &ProjectiveBasis::diagonal(SystemLabel::qubit("Q_A")).unwrap()).unwrap();
        assert!((b[1].outcome.probability - 1.0 / 6.0).abs() < 1e-12);
        let rc = b[1].post.as_ref().unwrap();
        assert!((rc.matrix()[(1, 1)].re - 1.0).abs() < 1e-12);
        assert!((b[0].outcome.probability + b[1].outcome.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn null_branch_is_marked() {
        let z = DensityState::basis(vec![SystemLabel::qubit("Q")], 0).unwrap();
        let b = measure_update(&z, &ProjectiveBasis::computational(SystemLabel::qubit("Q"))).unwrap();
        assert!(b[1].is_null());
        assert_eq!(b[0].post.as_ref().unwrap(), &DensityState::scalar());
    }

    #[test]
    fn z_channel_on_plus() {
        let h = 1.0 / sqrt(2.0);
        let plus = DensityState::pure(vec![SystemLabel::qubit("Q")], &[C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
        let ch = measurement_channel(&ProjectiveBasis::computational(SystemLabel::qubit("Q")), SystemLabel::qubit("R")).unwrap();
        let out = ch.apply(&plus).unwrap();
        assert_eq!(out.names(), vec!["R", "Q"]);
        assert!((out.matrix() - &CMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5])).max_abs() < 1e-12);
    }

    #[test]
    fn record_collision() {
        let q = SystemLabel::qubit("Q");
        assert!(matches!(
            measurement_channel(&ProjectiveBasis::computational(q.clone()), q),
            Err(Error::RecordCollision(_))
        ));
    }
}
