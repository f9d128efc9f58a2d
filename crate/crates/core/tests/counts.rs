use hga_core::maps::{ha, hc};
use hga_core::verify::{counts, hc_first_sum_counts, FamilyName};

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn catalan(n: u64) -> u64 {
    binomial(2 * n, n) / (n + 1)
}

#[test]
fn phi_counts_are_catalan() {
    let want: Vec<usize> = (1..=8).map(|n| catalan(n - 1) as usize).collect();
    assert_eq!(want, [1, 1, 2, 5, 14, 42, 132, 429]);
    assert_eq!(counts(FamilyName::Phi, 8), want);
}

#[test]
fn ha_counts() {
    assert_eq!(counts(FamilyName::Ha, 6), [0, 2, 25, 254, 2421, 22522]);
}

#[test]
fn ha_terms_satisfy_conditions() {
    for n in 1..=5 {
        let ts = ha::terms(n);
        assert_eq!(ts.len(), ha::count(n));
        for t in &ts {
            t.validate().unwrap_or_else(|e| panic!("{t:?}: {e}"));
        }
    }
}

#[test]
fn hc_counts() {
    assert_eq!(counts(FamilyName::Hc, 3), [1, 4, 15]);
    let want: Vec<usize> = (1..=6).map(|n| binomial(2 * n - 1, n - 1) as usize).collect();
    assert_eq!(hc_first_sum_counts(6), want);
    for n in 1..=6 {
        assert!(hc::terms(n).iter().all(hc::HcTerm::is_valid));
    }
}

#[test]
fn counts_are_stable_across_thread_counts() {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| counts(FamilyName::Ha, 5));
    let b = four.install(|| counts(FamilyName::Ha, 5));
    assert_eq!(a, b);
}
