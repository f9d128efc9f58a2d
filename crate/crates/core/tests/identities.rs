use hga_core::verify::{
    mutation_sensitivity, run_check, CheckName, CheckSpec, IdentityReport,
};
use hga_core::HgaError;

fn run(c: CheckName) -> Vec<IdentityReport> {
    let rs = run_check(&CheckSpec::new(c)).unwrap();
    for r in &rs {
        assert!(r.passed(), "{} n={}: {:?}", r.check, r.n, r.detail);
    }
    rs
}

#[test]
fn phi_twisting() {
    let rs = run(CheckName::PhiTwisting);
    assert_eq!(rs.len(), 6);
}

#[test]
fn ha_homotopy() {
    let rs = run(CheckName::HaHomotopy);
    // pre-cancellation sizes, frozen from the first run
    let lhs: Vec<u64> = rs.iter().map(|r| r.lhs_terms).collect();
    assert_eq!(lhs, [2, 10, 72, 728]);
}

#[test]
fn hc_homotopy_both_orientations() {
    run(CheckName::HcHomotopyFwd);
    run(CheckName::HcHomotopyRev);
}

#[test]
fn bar_checks() {
    assert_eq!(run(CheckName::BarProduct).len(), 7);
    run(CheckName::BarProductIterated);
    run(CheckName::HaShuffleVanish);
    let rs = run(CheckName::Cup1Bar);
    assert!(rs.iter().all(|r| r.stats["realized_sign"] == -1));
}

#[test]
fn cup2_derived() {
    let r = &run(CheckName::Cup2Derived)[0];
    for k in ["cup1_is_minus_e1", "cup2_is_minus_signed_f11_ba", "phi2_a1_1b_zero"] {
        assert_eq!(r.stats[k], 1, "{k}");
    }
    assert_eq!(r.stats["minus_f11_ab_residual"], 0);
}

#[test]
fn poly_checks() {
    run(CheckName::PolyStrict);
    let rs = run(CheckName::PolyShc);
    assert_eq!(rs[2].stats["drop_group3_residual"], 243);
    assert_eq!(rs[1].stats["pipelines_agree_tuples"], 81);
}

#[test]
fn sign_lemma() {
    let rs = run(CheckName::SignLemma);
    let last = rs.last().unwrap();
    assert_eq!(last.stats["paired"], last.stats["agree_p_minus_m"]);
}

#[test]
fn dd_zero_and_engines() {
    let rs = run(CheckName::DdZero);
    assert!(rs.iter().map(|r| r.stats["samples"]).sum::<i64>() >= 1000);
    run(CheckName::EngineCrosscheck);
}

#[test]
fn deterministic_across_threads() {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    for c in [CheckName::HaHomotopy, CheckName::PolyShc, CheckName::DdZero, CheckName::BarProduct] {
        let spec = CheckSpec::new(c).n_max(3);
        let a: Vec<_> = one.install(|| run_check(&spec)).unwrap().iter().map(IdentityReport::untimed).collect();
        let b: Vec<_> = many.install(|| run_check(&spec)).unwrap().iter().map(IdentityReport::untimed).collect();
        assert_eq!(a, b, "{c}");
    }
}

#[test]
fn traces_pair_everything() {
    let mut spec = CheckSpec::new(CheckName::HaHomotopy).n_max(3);
    spec.trace = true;
    for r in run_check(&spec).unwrap() {
        assert_eq!(r.stats["trace_unmatched"], 0);
        let t = r.trace.unwrap();
        assert_eq!(2 * t.len() as u64, r.lhs_terms);
    }
}

#[test]
fn ceiling_aborts_gracefully() {
    let mut spec = CheckSpec::new(CheckName::HaHomotopy);
    spec.ceiling = 100;
    let rs = run_check(&spec).unwrap();
    let last = rs.last().unwrap();
    assert!(!last.complete);
    assert!(!last.passed());
    assert!(rs[..rs.len() - 1].iter().all(IdentityReport::passed));
}

#[test]
fn bad_specs_rejected() {
    assert!(matches!("no-such-check".parse::<CheckName>(), Err(HgaError::UnknownCheck(_))));
    assert!(matches!(run_check(&CheckSpec::new(CheckName::PhiTwisting).n_max(0)), Err(HgaError::InvalidBound(_))));
    assert!(run_check(&CheckSpec::new(CheckName::EngineCrosscheck).n_max(4)).is_err());
    for c in CheckName::ALL {
        assert_eq!(c.as_str().parse::<CheckName>().unwrap(), c);
    }
}

#[test]
fn injected_sign_flips_are_detected() {
    for c in CheckName::CORE {
        let m = mutation_sensitivity(c, 10, 1).unwrap();
        assert_eq!(m.detected, 10, "{m:?}");
    }
}
