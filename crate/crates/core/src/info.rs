//! Entropies in bits and the uncertainty-relation machinery.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{log2, xlog2x};
use crate::qcore::{measurement_channel, DensityState, ProjectiveBasis, StateVector, SystemLabel};

/// Eigenvalues at or below this contribute nothing.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// Slack below which an entropic inequality still counts as satisfied.
pub const BOUND_SLACK: f64 = 1e-9;

/// Bits of a spectrum, skipping eigenvalues `≤ 1e-12`.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().filter(|&&l| l > EIGEN_FLOOR).map(|&l| xlog2x(l)).sum::<f64>().max(0.0)
}

/// `−Σ λ log₂ λ`.
pub fn von_neumann_entropy(rho: &DensityState) -> f64 {
    spectrum_entropy(&rho.eigenvalues())
}

/// Entropy of the marginal on `subset` (empty subset gives 0).
pub fn entropy_of(rho: &DensityState, subset: &[&str]) -> Result<f64> {
    if subset.is_empty() {
        return Ok(0.0);
    }
    Ok(von_neumann_entropy(&rho.partial_trace(subset)?))
}

/// Entropy of a marginal of a pure state, from the smaller bipartition side.
pub fn pure_entropy_of(psi: &StateVector, subset: &[&str]) -> Result<f64> {
    if subset.is_empty() || subset.len() == psi.systems().len() {
        return Ok(0.0);
    }
    Ok(spectrum_entropy(&psi.marginal_spectrum(subset)?))
}

fn disjoint(a: &[&str], b: &[&str]) -> Result<()> {
    if let Some(x) = a.iter().find(|x| b.contains(x)) {
        return Err(Error::OverlappingSets(format!("{x} appears in both sets")));
    }
    Ok(())
}

fn union<'a>(a: &[&'a str], b: &[&'a str]) -> Vec<&'a str> {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v
}

/// `H(A|B) = H(AB) − H(B)`.
pub fn conditional_entropy(rho: &DensityState, target: &[&str], given: &[&str]) -> Result<f64> {
    disjoint(target, given)?;
    let ab = entropy_of(rho, &union(target, given))?;
    let b = entropy_of(rho, given)?;
    Ok(ab - b)
}

/// `I(A:B) = H(A) + H(B) − H(AB)`.
pub fn mutual_information(rho: &DensityState, a: &[&str], b: &[&str]) -> Result<f64> {
    disjoint(a, b)?;
    Ok(entropy_of(rho, a)? + entropy_of(rho, b)? - entropy_of(rho, &union(a, b))?)
}

/// Mutual information between two disjoint parts of a pure state.
pub fn pure_mutual_information(psi: &StateVector, a: &[&str], b: &[&str]) -> Result<f64> {
    disjoint(a, b)?;
    Ok(pure_entropy_of(psi, a)? + pure_entropy_of(psi, b)? - pure_entropy_of(psi, &union(a, b))?)
}

/// `H(X|given)` where `X` is the outcome of measuring `basis.target()` and
/// recording it in a fresh register.
pub fn measured_conditional_entropy(rho: &DensityState, basis: &ProjectiveBasis, given: &[&str]) -> Result<f64> {
    let s = basis.target().name.as_str();
    disjoint(&[s], given)?;
    let local = rho.partial_trace(&union(&[s], given))?;
    let mut rec = format!("{s}'rec");
    while local.has_system(&rec) {
        rec.push('\'');
    }
    let ch = measurement_channel(basis, SystemLabel::new(rec.clone(), basis.len())?)?;
    let out = ch.apply(&local)?;
    conditional_entropy(&out, &[rec.as_str()], given)
}

/// `−log₂ max_{j,k} |⟨a_j|b_k⟩|²`. Overlaps within `1e-12` of `1/d` (unbiased
/// bases) or of 1 snap to `log₂ d` and 0.
pub fn maassen_uffink_bound(b1: &ProjectiveBasis, b2: &ProjectiveBasis) -> Result<f64> {
    let c = b1.max_overlap(b2)?;
    let d = b1.len() as f64;
    if (c - 1.0 / d).abs() <= 1e-12 {
        return Ok(log2(d));
    }
    if (c - 1.0).abs() <= 1e-12 {
        return Ok(0.0);
    }
    Ok(-log2(c))
}

/// Strong-subadditivity slack `H(A|C) − H(A|BC)`; never below `−1e-9` for
/// a valid state.
pub fn ssa_check(rho: &DensityState, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
    disjoint(a, b)?;
    disjoint(a, c)?;
    disjoint(b, c)?;
    Ok(conditional_entropy(rho, a, c)? - conditional_entropy(rho, a, &union(b, c))?)
}

/// The two measured conditional entropies of an uncertainty test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub h_z_given_ra: f64,
    pub h_x_given_rb: f64,
    pub sum: f64,
    pub bound: f64,
    pub satisfied: bool,
}

impl EntropyReport {
    pub fn new(h_z_given_ra: f64, h_x_given_rb: f64, bound: f64) -> Self {
        let sum = h_z_given_ra + h_x_given_rb;
        EntropyReport { h_z_given_ra, h_x_given_rb, sum, bound, satisfied: sum >= bound - BOUND_SLACK }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, ZERO};
    use crate::math::sqrt;

    fn q(n: &str) -> SystemLabel {
        SystemLabel::qubit(n)
    }

    fn bell() -> DensityState {
        StateVector::max_entangled(q("Q"), q("S")).unwrap().density().unwrap()
    }

    #[test]
    fn basic_entropies() {
        let mixed = DensityState::maximally_mixed(alloc::vec![q("Q")]).unwrap();
        assert!((von_neumann_entropy(&mixed) - 1.0).abs() < 1e-12);
        assert!(von_neumann_entropy(&bell()).abs() < 1e-12);
        let d = DensityState::classical(alloc::vec![q("Q")], &[2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((von_neumann_entropy(&d) - 0.918_295_834_054_489_6).abs() < 1e-12);
    }

    #[test]
    fn conditional_cases() {
        assert!((conditional_entropy(&bell(), &["Q"], &["S"]).unwrap() + 1.0).abs() < 1e-12);
        let prod = DensityState::maximally_mixed(alloc::vec![q("A"), q("B")]).unwrap();
        assert!((conditional_entropy(&prod, &["A"], &["B"]).unwrap() - 1.0).abs() < 1e-12);
        let corr = DensityState::classical(alloc::vec![q("A"), q("B")], &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(conditional_entropy(&corr, &["A"], &["B"]).unwrap().abs() < 1e-12);
        assert!(matches!(conditional_entropy(&prod, &["A"], &["A"]), Err(Error::OverlappingSets(_))));
    }

    #[test]
    fn measured_entropy_on_bell() {
        let z = ProjectiveBasis::computational(q("Q"));
        let ch = measurement_channel(&z, q("R_A")).unwrap();
        let sigma = ch.apply(&bell()).unwrap().trace_out(&["Q"]).unwrap();
        let hz = measured_conditional_entropy(&sigma, &ProjectiveBasis::computational(q("S")), &["R_A"]).unwrap();
        assert!(hz.abs() < 1e-9);

        let x = ProjectiveBasis::diagonal(q("Q")).unwrap();
        let ch = measurement_channel(&x, q("R_B")).unwrap();
        let sigma = ch.apply(&bell()).unwrap().trace_out(&["Q"]).unwrap();
        let hx = measured_conditional_entropy(&sigma, &ProjectiveBasis::diagonal(q("S")).unwrap(), &["R_B"]).unwrap();
        assert!(hx.abs() < 1e-9);

        let m = DensityState::maximally_mixed(alloc::vec![q("S")]).unwrap();
        let h = measured_conditional_entropy(&m, &ProjectiveBasis::computational(q("S")), &[]).unwrap();
        assert!((h - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uncertainty_bounds() {
        let z = ProjectiveBasis::computational(q("Q"));
        let x = ProjectiveBasis::diagonal(q("Q")).unwrap();
        assert_eq!(maassen_uffink_bound(&z, &x).unwrap(), 1.0);
        assert_eq!(maassen_uffink_bound(&z, &z).unwrap(), 0.0);
        let r = ProjectiveBasis::rotated_qubit(q("Q"), core::f64::consts::PI / 8.0).unwrap();
        let c = crate::math::cos(core::f64::consts::PI / 8.0);
        assert!((maassen_uffink_bound(&z, &r).unwrap() + log2(c * c)).abs() < 1e-12);
        assert!((maassen_uffink_bound(&z, &r).unwrap() - 0.2284).abs() < 1e-4);
    }

    #[test]
    fn ssa_on_ghz_and_product() {
        let h = 1.0 / sqrt(2.0);
        let mut ket = alloc::vec![ZERO; 8];
        ket[0] = C64::new(h, 0.0);
        ket[7] = C64::new(h, 0.0);
        let ghz = DensityState::pure(alloc::vec![q("A"), q("B"), q("C")], &ket).unwrap();
        assert!((ssa_check(&ghz, &["A"], &["B"], &["C"]).unwrap() - 1.0).abs() < 1e-10);
        let prod = DensityState::maximally_mixed(alloc::vec![q("A")])
            .unwrap()
            .tensor(&DensityState::basis(alloc::vec![q("B"), q("C")], 1).unwrap())
            .unwrap();
        assert!(ssa_check(&prod, &["A"], &["B"], &["C"]).unwrap().abs() < 1e-10);
    }
}
