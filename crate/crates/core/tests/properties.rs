use proptest::prelude::*;

use hga_core::bar::{bar_d, desuspend, shuffle_at};
use hga_core::diff::{differential, Mode};
use hga_core::maps::bar_cochains::gens;
use hga_core::pre::Pre;
use hga_core::text::dump;
use hga_core::{Affine, GenId, Letter, SignPoly, Tup};

fn gen() -> impl Strategy<Value = Pre> {
    (0..3usize, 1..=3u32).prop_map(|(l, i)| Pre::Gen(GenId::get([Letter::A, Letter::B, Letter::C][l], i)))
}

/// Expressions without F-operations.
fn e_only() -> impl Strategy<Value = Pre> {
    e_sized(3, 24)
}

fn e_sized(depth: u32, size: u32) -> impl Strategy<Value = Pre> {
    gen().prop_recursive(depth, size, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Pre::Mul),
            (inner.clone(), prop::collection::vec(inner, 1..=2)).prop_map(|(h, a)| Pre::E(Box::new(h), a)),
        ]
    })
}

/// F-operations on F-free arguments, multiplied and fed to E as arguments.
fn with_f() -> impl Strategy<Value = Pre> {
    let f = (prop::collection::vec(e_sized(1, 3), 1..=2), prop::collection::vec(e_sized(1, 3), 1..=2))
        .prop_map(|(a, b)| Pre::F(a, b))
        .boxed();
    prop_oneof![
        f.clone(),
        (e_sized(2, 6), f.clone()).prop_map(|(x, y)| Pre::Mul(vec![x, y])),
        (gen(), prop::collection::vec(f, 1..=2)).prop_map(|(h, a)| Pre::E(Box::new(h), a)),
    ]
}

fn affine() -> impl Strategy<Value = Affine> {
    (any::<bool>(), 0..6u8).prop_map(|(c, v)| {
        let a = Affine::var(v);
        if c {
            a + Affine::ONE
        } else {
            a
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dd_vanishes(p in e_only()) {
        let x = p.normalize().unwrap();
        let dx = differential(&x, Mode::Reduced).unwrap();
        let ddx = differential(&dx, Mode::Reduced).unwrap();
        prop_assert!(ddx.is_zero(), "{}", dump(&ddx));
    }

    #[test]
    fn dd_vanishes_with_f(p in with_f()) {
        let x = p.normalize().unwrap();
        let ddx = differential(&differential(&x, Mode::Reduced).unwrap(), Mode::Reduced).unwrap();
        prop_assert!(ddx.is_zero(), "{}", dump(&ddx));
    }

    #[test]
    fn normalize_is_linear(p in e_only(), q in e_only()) {
        let sum = Pre::Sum(vec![(1, p.clone()), (-1, q.clone())]).normalize().unwrap();
        let want = &p.normalize().unwrap() - &q.normalize().unwrap();
        prop_assert_eq!(dump(&sum), dump(&want));
    }

    #[test]
    fn differential_raises_degree(p in e_only()) {
        let x = p.normalize().unwrap();
        for t in differential(&x, Mode::Reduced).unwrap().iter() {
            let deg = x.iter().next().unwrap().key.deg();
            prop_assert_eq!(t.key.deg(), deg + Affine::ONE);
        }
    }

    #[test]
    fn sign_product_evaluates(a in affine(), b in affine(), s in any::<u64>()) {
        let mut p = SignPoly::zero();
        p.add_product(a, b);
        prop_assert_eq!(p.eval(s), a.eval(s) & b.eval(s));
        let mut q = p.clone();
        q.add_affine(a);
        prop_assert_eq!(q.eval(s), p.eval(s) ^ a.eval(s));
        q.add_poly(&q.clone());
        prop_assert!(q.is_zero());
    }

    #[test]
    fn shuffle_has_binomial_size(k in 0..4usize, l in 0..4usize) {
        let t = |ws: Vec<_>| ws.into_iter().map(Tup::single).collect::<Vec<_>>();
        let c = desuspend(vec![t(gens(Letter::A, k)), t(gens(Letter::B, l))]);
        let s = shuffle_at(&c, 0, 1, 1);
        let binom = (0..k).fold(1u64, |acc, i| acc * (k + l - i) as u64 / (i + 1) as u64);
        prop_assert_eq!(s.weight(), binom);
        // ∇ is a chain map
        let lhs = bar_d(&s, Mode::Reduced).unwrap();
        let rhs = shuffle_at(&bar_d(&c, Mode::Reduced).unwrap(), 0, 1, 1);
        prop_assert!((&lhs - &rhs).is_zero());
    }
}
