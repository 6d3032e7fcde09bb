use cutlab_core::linalg::{CMatrix, C64};
use cutlab_core::perspective::{CertificateKind, Verdict};
use cutlab_core::protocols::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn wigner_descriptions_cannot_agree() {
    let (trace, rep) = run_wigner().unwrap();
    assert_eq!(trace.steps.len(), 6);
    assert_eq!(rep.verdict, TheoremVerdict::ContradictionReproduced);
    assert!(close(rep.number("bob_marginal_q_deviation").unwrap(), 0.0, 1e-12));
    assert!(close(rep.number("alice_branch0_purity").unwrap(), 1.0, 1e-12));
    assert!(close(rep.number("alice_branch0_p0").unwrap(), 1.0, 1e-12));
    let f = rep.feasibility("alice_q_vs_bob_q_la").unwrap();
    assert_eq!(f.verdict, Verdict::Infeasible);
    assert_eq!(f.certificate_kind, Some(CertificateKind::PureMarginal));
    assert!(f.certificate.as_deref().unwrap().starts_with("pure marginal of entangled pure state"));
    assert_eq!(rep.feasibility("control_product_vs_mixed").unwrap().verdict, Verdict::Feasible);
}

#[test]
fn wigner_without_agreement_is_consistent() {
    let (_, rep) = run_wigner_with(&Toggles::all().without(Assumption::Agreement)).unwrap();
    assert_eq!(rep.verdict, TheoremVerdict::Consistent);
    let (_, rep) = run_wigner_with(&Toggles::all().without(Assumption::Quantum)).unwrap();
    assert_eq!(rep.verdict, TheoremVerdict::Consistent);
}

fn p_record(step: &TraceStep, reg: &str, k: usize) -> f64 {
    step.records.iter().find(|r| r.register == reg && r.outcome == k).unwrap().probability
}

#[test]
fn deutsch_reversal_restores_step_two() {
    let t = run_deutsch().unwrap();
    assert_eq!(t.steps.len(), 5);
    let d = (t.steps[1].global.matrix() - t.steps[3].global.matrix()).max_abs();
    assert!(d < 1e-10, "{d}");
    assert!(close(p_record(&t.steps[2], "R_A", 0), 0.5, 1e-12));
    assert!(close(p_record(&t.steps[4], "R_B", 0), 1.0, 1e-12));

    let zero = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let t = run_deutsch_with(&zero).unwrap();
    assert!(close(p_record(&t.steps[4], "R_B", 0), 0.5, 1e-12));
    assert!(close(p_record(&t.steps[4], "R_B", 1), 0.5, 1e-12));
}

#[test]
fn objective_outcomes_entropic_certificate() {
    let rep = verify_objective_outcomes().unwrap();
    assert_eq!(rep.verdict, TheoremVerdict::ContradictionReproduced);
    assert!(close(rep.number("h_z_given_ra").unwrap(), 0.0, 1e-9));
    assert!(close(rep.number("h_x_given_rb").unwrap(), 0.0, 1e-9));
    assert_eq!(rep.number("maassen_uffink_bound").unwrap(), 1.0);
    assert!(rep.number("sequential_sum").unwrap() >= 1.0 - 1e-9);
    let f = rep.feasibility("sigma_ra_s_vs_sigma_rb_s").unwrap();
    assert_eq!(f.verdict, Verdict::Infeasible);
    assert_eq!(f.certificate_kind, Some(CertificateKind::Entropic));
}

#[test]
fn fr_with_consistency_contradicts() {
    let (trace, rep) = run_fr(true).unwrap();
    assert_eq!(trace.steps.len(), 9);
    assert_eq!(rep.verdict, TheoremVerdict::ContradictionReproduced);
    assert!(close(rep.number("p_accept").unwrap(), 1.0 / 6.0, 1e-12));
    assert!(close(rep.number("final_q_c_p1").unwrap(), 1.0, 1e-12));
    assert_eq!(rep.number("claimed"), Some(1.0));
    assert_eq!(rep.number("prediction_p"), Some(1.0));
    assert_eq!(rep.number("prediction_p_bar"), Some(0.0));
    assert!(close(rep.number("actual").unwrap(), 0.75, 1e-12));
    assert!(close(rep.number("bound").unwrap(), 0.853_553_390_593_273_7, 1e-15));
    for k in ["certainty_bob", "certainty_bob_charly", "certainty_bob_charly_alice", "certainty_bob_darwin"] {
        assert!(close(rep.number(k).unwrap(), 1.0, 1e-9), "{k}");
    }
}

#[test]
fn fr_without_consistency_has_no_predictions() {
    let (_, rep) = run_fr(false).unwrap();
    assert_eq!(rep.verdict, TheoremVerdict::Consistent);
    for k in ["prediction_p", "prediction_p_bar", "claimed", "actual"] {
        assert!(!rep.evidence.contains_key(k), "{k}");
    }
    assert!(rep.game.is_none());
}

#[test]
fn fr_acceptance_is_product_of_branches() {
    let (trace, _) = run_fr(true).unwrap();
    let p = trace.steps[4].records.iter().find(|r| r.register == "R_B" && r.outcome == 1).unwrap().probability;
    assert!(close(p, trace.last().acceptance, 1e-12));
    // Darwin undoes Charly: the record returns to |0>
    let rc = trace.last().global.partial_trace(&["R_C"]).unwrap();
    let e0 = CMatrix::diag_real(&[1.0, 0.0]);
    assert!((rc.matrix() - &e0).max_abs() < 1e-10);
}

#[test]
fn fr_meta_view_is_actual_statistics() {
    let rep = run_fr_meta().unwrap();
    assert_eq!(rep.verdict, TheoremVerdict::Consistent);
    assert!(close(rep.number("meta_p_computational_1").unwrap(), 1.0, 1e-12));
    assert!(close(rep.number("meta_p_diagonal_0bar").unwrap(), 0.5, 1e-12));
}

#[test]
fn sampled_restarts_average_six() {
    let v = sample_fr_restarts(6000, 7).unwrap();
    let mean = v.iter().sum::<usize>() as f64 / v.len() as f64;
    assert!((mean - 6.0).abs() < 0.5, "{mean}");
}
