use cutlab_core::blackhole::*;
use cutlab_core::info::{pure_entropy_of, pure_mutual_information};
use cutlab_core::perspective::{CertificateKind, Verdict};
use cutlab_core::protocols::{Assumption, TheoremVerdict, Toggles};

fn ensemble(m: usize, timing: AliceTiming) -> Vec<SweepRow> {
    (0..20).map(|s| hp_sample(5, m, s, timing).unwrap()).collect()
}

fn mean(rows: &[SweepRow], f: impl Fn(&SweepRow) -> f64) -> f64 {
    rows.iter().map(f).sum::<f64>() / rows.len() as f64
}

#[test]
fn old_black_hole_construction() {
    let bh = build_old_blackhole(5, 3).unwrap();
    let r: Vec<&str> = bh.early_radiation.iter().map(|s| s.as_str()).collect();
    let b: Vec<String> = (1..=5).map(|i| format!("B_{i}")).collect();
    let b: Vec<&str> = b.iter().map(|s| s.as_str()).collect();
    assert!((pure_mutual_information(&bh.state, &b, &r).unwrap() - 10.0).abs() < 1e-9);
    let s = bh.state.reduced(&["S"]).unwrap();
    assert!((s.matrix()[(0, 0)].re - 0.5).abs() < 1e-12 && s.matrix()[(0, 1)].norm() < 1e-12);
    assert!(bh.norm_error() < 1e-10);
    assert!(bh.past_page_time());
    assert!(matches!(build_old_blackhole(7, 0), Err(cutlab_core::Error::SizeCapExceeded { .. })));
}

#[test]
fn zero_emission_keeps_reference_and_radiation() {
    let bh = build_old_blackhole(5, 0).unwrap();
    let ev = hp_evolve(&bh, 11).unwrap();
    let before = bh.state.reduced(&["S", "R_1", "R_2", "R_3", "R_4", "R_5"]).unwrap();
    let after = ev.state.reduced(&["S", "R_1", "R_2", "R_3", "R_4", "R_5"]).unwrap();
    assert!((before.matrix() - after.matrix()).max_abs() < 1e-10);
    let d = decoupling_error(&ev).unwrap();
    assert!((d.mutual_information_bits - 2.0).abs() < 1e-9);
    let bh = build_old_blackhole(5, 0).unwrap().with_emission(7).unwrap();
    assert!(decoupling_error(&hp_evolve(&bh, 4).unwrap()).unwrap().trace_distance <= 1e-9);
}

#[test]
fn late_radiation_is_nearly_maximally_mixed() {
    for m in 1..=3 {
        let mut tot = 0.0;
        for seed in 0..20 {
            let bh = build_old_blackhole(5, seed).unwrap().with_emission(m).unwrap();
            let ev = hp_evolve(&bh, seed).unwrap();
            let h = ev.late_radiation_entropy().unwrap();
            assert!(h <= m as f64 + 1e-9);
            assert!(ev.norm_error() < 1e-9);
            tot += h;
        }
        assert!((tot / 20.0 - m as f64).abs() < 0.2, "m={m} mean {}", tot / 20.0);
    }
    let bh = build_old_blackhole(5, 0).unwrap().with_emission(2).unwrap();
    let ev = hp_evolve(&bh, 1).unwrap();
    let h = pure_entropy_of(&ev.state, &["R'_1", "R'_2"]).unwrap();
    assert!((h - ev.late_radiation_entropy().unwrap()).abs() < 1e-12);
}

#[test]
fn reconstruction_sweep_matches_oracle_trends() {
    let mut last_f = -1.0;
    let mut last_td = f64::INFINITY;
    for m in 0..=4 {
        let rows = ensemble(m, AliceTiming::BeforeScrambling);
        let f = mean(&rows, |r| r.fidelity);
        let td = mean(&rows, |r| r.trace_distance);
        assert!(f >= last_f - 1e-9, "fidelity not monotone at m={m}");
        assert!(td <= last_td + 1e-9, "trace distance not monotone at m={m}");
        for r in &rows {
            assert!(r.fidelity >= 1.0 - r.trace_distance - 1e-9, "{r:?}");
            assert!((0.0..=2.0 + 1e-9).contains(&r.trace_distance));
            assert!(r.mutual_information_bits >= -1e-9 && r.mutual_information_bits <= 2.0 + 1e-9);
            assert!(r.h_z_given_ra + r.h_x_given_rb >= 1.0 - 1e-6, "{r:?}");
        }
        if m == 0 {
            assert!(f <= 0.6, "{f}");
            assert!((td - 1.5).abs() < 1e-6, "{td}");
        }
        if m == 4 {
            assert!(f >= 0.85, "{f}");
            assert!(mean(&rows, |r| r.h_x_given_rb) <= 0.25);
        }
        last_f = f;
        last_td = td;
    }
}

#[test]
fn hp_extended_report() {
    let rep = verify_hp_extended().unwrap();
    assert_eq!(rep.verdict, TheoremVerdict::ContradictionReproduced);
    assert!(rep.number("min_sum").unwrap() >= 1.0 - 1e-6);
    assert!(rep.number("mean_h_x_given_rb").unwrap() <= 0.25);
    let cfg = HpConfig { reconstruct: false, ..HpConfig::default() };
    let rep = verify_hp_extended_with(&cfg, &Toggles::all()).unwrap();
    assert_eq!(rep.number("mean_h_z_given_ra").unwrap(), 0.0);
    let rep = verify_hp_extended_with(&HpConfig::default(), &Toggles::all().without(Assumption::Objectivity)).unwrap();
    assert_eq!(rep.verdict, TheoremVerdict::Consistent);
}

#[test]
fn no_cloning_is_monogamy_violation() {
    let rep = verify_no_cloning().unwrap();
    assert_eq!(rep.verdict, TheoremVerdict::ContradictionReproduced);
    assert!((rep.number("i_q_s_bits").unwrap() - 2.0).abs() < 1e-9);
    assert!((rep.number("i_qr_s_bits").unwrap() - 2.0).abs() < 1e-9);
    let f = rep.feasibility("alice_q_s_vs_bob_qr_s").unwrap();
    assert_eq!(f.verdict, Verdict::Infeasible);
    assert_eq!(f.certificate_kind, Some(CertificateKind::Monogamy));
    assert!(f.certificate.is_some());
    assert_eq!(rep.feasibility("control_bob_uncorrelated").unwrap().verdict, Verdict::Feasible);
}

#[test]
fn firewall_report() {
    let rep = verify_firewall().unwrap();
    assert_eq!(rep.verdict, TheoremVerdict::ContradictionReproduced);
    assert!((rep.number("i_qbob_qref_bits").unwrap() - 2.0).abs() < 1e-9);
    assert!((rep.number("strategy_win_probability_bob_state").unwrap() - 0.75).abs() < 1e-12);
    let f = rep.feasibility("alice_a_qref_vs_bob_qbob_qref").unwrap();
    assert_eq!(f.verdict, Verdict::Infeasible);
    assert_eq!(f.certificate_kind, Some(CertificateKind::Monogamy));
    let rep = cutlab_core::blackhole::verify_firewall_with(&Toggles::all().without(Assumption::Consistency), 0).unwrap();
    assert_eq!(rep.verdict, TheoremVerdict::Consistent);
    assert!(!rep.evidence.contains_key("claimed"));
}
