use hga_core::poly::{
    check_shc, check_strict, shc_big_f, shc_defect, shc_g, shc_h, shc_summands, strict_h, tuples, PExpr,
    word, Pipeline, Sym, DB, PF,
};
use hga_core::poly;

fn fsym(ks: &[u32]) -> PF {
    PF::F(ks.into())
}

#[test]
fn strict_h1_of_cube() {
    // k' + k'' = 2: f(x², x) + f(x, x) a + f(1, x) a², the last one vanishing
    let mut want = PExpr::zero();
    want.push(vec![fsym(&[2, 1])], 1);
    want.push(vec![fsym(&[1, 1]), PF::Pow(Sym::A, 1)], 1);
    want.push(vec![fsym(&[0, 1]), PF::Pow(Sym::A, 2)], 1);
    assert_eq!(want.len(), 2);
    let got = strict_h(&[(3, 0)]);
    assert_eq!(got, want, "{}", got.dump());
}

#[test]
fn strict_h_vanishing() {
    for n in 1..=4 {
        for x in tuples(n, 3, false) {
            let h = strict_h(&x);
            if x[n - 1].0 <= 1 || x[..n - 1].iter().any(|p| p.0 == 0) {
                assert!(h.is_zero(), "{x:?}: {}", h.dump());
            }
        }
    }
    assert!(!strict_h(&[(1, 0), (2, 0)]).is_zero());
}

#[test]
fn strict_sign_alternates() {
    let h = strict_h(&[(1, 0), (2, 0)]);
    assert_eq!(h.iter().map(|(_, c)| c).collect::<Vec<_>>(), vec![-1]);
}

#[test]
fn shc_h1_vanishes() {
    for x in tuples(1, 3, true) {
        assert!(shc_h(&x, [true; 3]).is_zero());
    }
}

#[test]
fn shc_h2_group_one_shape() {
    let x = [(1, 2), (1, 1)];
    let g1: Vec<_> = shc_summands(&x, [true; 3]).into_iter().filter(|s| s.group == 1).map(|s| word(s.factors)).collect();
    let want = word(vec![PF::Pow(Sym::A, 1), PF::E(1, vec![1, 1].into()), PF::Pow(Sym::A, 1)]);
    assert!(want.is_some() && g1.contains(&want), "{g1:?}");
    assert!(shc_summands(&x, [true; 3]).iter().all(|s| s.group != 3));
}

#[test]
fn unit_input_kills_shc_summands() {
    for n in 2..=3 {
        for x in tuples(n, 2, true) {
            if x.contains(&(0, 0)) {
                assert!(shc_h(&x, [true; 3]).is_zero(), "{x:?}");
            }
        }
    }
}

#[test]
fn zero_penultimate_k_kills_group_three() {
    for x in tuples(3, 2, true) {
        if x[1].0 == 0 {
            assert!(shc_h(&x, [false, false, true]).is_zero(), "{x:?}");
        }
    }
}

#[test]
fn shc_arity_one_is_strict() {
    for x in tuples(1, 3, true) {
        assert_eq!(shc_big_f(&x), shc_g(&x));
        let (r, _) = shc_defect(&x, [true; 3], Pipeline::Expanded);
        assert!(r.is_zero());
    }
}

#[test]
fn differential_of_b() {
    let db = poly::d(&PExpr::of(vec![PF::B], 1), DB::Cup);
    assert_eq!(db, PExpr::of(vec![PF::E(1, vec![1].into())], 1));
}

#[test]
fn defects_vanish() {
    for n in 1..=3 {
        assert_eq!(check_strict(n, 3).residual_terms, 0);
        assert_eq!(check_shc(n, 2, [true; 3], Pipeline::Expanded).residual_terms, 0);
    }
    assert_eq!(check_shc(2, 2, [true; 3], Pipeline::Atomic).residual_terms, 0);
}

#[test]
fn dropping_group_three_is_detected() {
    assert!(check_shc(3, 2, [true, true, false], Pipeline::Expanded).residual_terms > 0);
}

#[test]
fn pipelines_agree_at_two() {
    assert_eq!(poly::pipelines_agree(2, 2), Ok(81));
}

#[test]
fn exponents_are_conserved() {
    assert!(poly::conservation_violations(3, 2).is_empty());
}
