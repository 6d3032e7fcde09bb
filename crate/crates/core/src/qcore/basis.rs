use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{SystemLabel, ORTHONORMAL_TOL};
use crate::error::{Error, Result};
use crate::linalg::{inner, C64, ZERO};
use crate::math::{cos, sin, sqrt};

/// Orthonormal measurement basis on a single subsystem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveBasis {
    target: SystemLabel,
    vectors: Vec<Vec<C64>>,
}

impl ProjectiveBasis {
    pub fn new(target: SystemLabel, vectors: Vec<Vec<C64>>) -> Result<Self> {
        if vectors.len() != target.dim {
            return Err(Error::DimensionMismatch(format!(
                "{} vectors for {}-dimensional {}",
                vectors.len(),
                target.dim,
                target.name
            )));
        }
        for v in &vectors {
            if v.len() != target.dim {
                return Err(Error::DimensionMismatch(format!(
                    "basis vector of length {} for {}",
                    v.len(),
                    target
                )));
            }
        }
        for (i, a) in vectors.iter().enumerate() {
            for (j, b) in vectors.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = inner(a, b);
                if (got - C64::new(want, 0.0)).norm() > ORTHONORMAL_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "basis vectors {i},{j} have inner product {got}"
                    )));
                }
            }
        }
        Ok(ProjectiveBasis { target, vectors })
    }

    pub fn computational(target: SystemLabel) -> Self {
        let d = target.dim;
        let vectors = (0..d)
            .map(|k| (0..d).map(|i| if i == k { C64::new(1.0, 0.0) } else { ZERO }).collect())
            .collect();
        ProjectiveBasis { target, vectors }
    }

    /// `|0̄⟩ = (|0⟩+|1⟩)/√2`, `|1̄⟩ = (|0⟩−|1⟩)/√2`. Qubits only.
    pub fn diagonal(target: SystemLabel) -> Result<Self> {
        if target.dim != 2 {
            return Err(Error::DimensionMismatch(format!("diagonal basis needs a qubit, got {target}")));
        }
        let h = 1.0 / sqrt(2.0);
        let vectors = alloc::vec![
            alloc::vec![C64::new(h, 0.0), C64::new(h, 0.0)],
            alloc::vec![C64::new(h, 0.0), C64::new(-h, 0.0)],
        ];
        Ok(ProjectiveBasis { target, vectors })
    }

    /// Discrete Fourier basis; mutually unbiased with the computational one.
    pub fn fourier(target: SystemLabel) -> Self {
        let d = target.dim;
        let s = 1.0 / sqrt(d as f64);
        let vectors = (0..d)
            .map(|k| {
                (0..d)
                    .map(|j| {
                        let th = 2.0 * core::f64::consts::PI * (j * k) as f64 / d as f64;
                        C64::new(s * cos(th), s * sin(th))
                    })
                    .collect()
            })
            .collect();
        ProjectiveBasis { target, vectors }
    }

    /// Real qubit basis `{cos θ|0⟩ + sin θ|1⟩, −sin θ|0⟩ + cos θ|1⟩}`.
    pub fn rotated_qubit(target: SystemLabel, theta: f64) -> Result<Self> {
        if target.dim != 2 {
            return Err(Error::DimensionMismatch(format!("rotated basis needs a qubit, got {target}")));
        }
        let (c, s) = (cos(theta), sin(theta));
        let vectors = alloc::vec![
            alloc::vec![C64::new(c, 0.0), C64::new(s, 0.0)],
            alloc::vec![C64::new(-s, 0.0), C64::new(c, 0.0)],
        ];
        Ok(ProjectiveBasis { target, vectors })
    }

    /// Same vectors on a differently named subsystem of equal dimension.
    pub fn retarget(&self, target: SystemLabel) -> Result<Self> {
        if target.dim != self.target.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.target, target)));
        }
        Ok(ProjectiveBasis { target, vectors: self.vectors.clone() })
    }

    pub fn target(&self) -> &SystemLabel {
        &self.target
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &[C64] {
        &self.vectors[k]
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `max_{j,k} |⟨a_j|b_k⟩|²`.
    pub fn max_overlap(&self, other: &ProjectiveBasis) -> Result<f64> {
        if self.target.dim != other.target.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.target, other.target)));
        }
        let mut c: f64 = 0.0;
        for a in &self.vectors {
            for b in &other.vectors {
                c = c.max(inner(a, b).norm_sqr());
            }
        }
        Ok(c)
    }

    /// Unitary whose columns are the basis vectors (maps `|k⟩` to `|b_k⟩`).
    pub fn change_of_basis(&self) -> crate::linalg::CMatrix {
        let d = self.target.dim;
        crate::linalg::CMatrix::from_fn(d, d, |i, k| self.vectors[k][i])
    }
}
