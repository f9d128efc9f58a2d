use hga_core::diff::{differential, Mode};
use hga_core::ks::{e, prod, var, Template};
use hga_core::text::{dump, parse_expr};
use hga_core::{Expr, GenId, Letter, WordId};

fn g(l: Letter, i: u32) -> WordId {
    WordId::gen(GenId::get(l, i))
}

fn tmpl(t: Template, ins: &[WordId]) -> Expr {
    Expr::from_terms(t.instantiate(ins))
}

#[test]
fn product_in_first_argument() {
    let lhs = parse_expr("(E (* (g a 1) (g a 2)) (g b 1))").unwrap();
    let (a1, a2, b1) = (g(Letter::A, 1), g(Letter::A, 2), g(Letter::B, 1));
    // ≐-level: E1(a1;b1) a2 + a1 E1(a2;b1)
    let mut rhs = tmpl(Template::new(prod([e(var(0), vec![var(2)]), var(1)]), false), &[a1, a2, b1]);
    rhs = &rhs + &tmpl(Template::new(prod([var(0), e(var(1), vec![var(2)])]), false), &[a1, a2, b1]);
    assert_eq!(dump(&lhs), dump(&rhs), "\n{}\n{}", dump(&lhs), dump(&rhs));
}

#[test]
fn nested_e() {
    let lhs = parse_expr("(E (E (g a 1) (g b 1)) (g c 1))").unwrap();
    let ins = [g(Letter::A, 1), g(Letter::B, 1), g(Letter::C, 1)];
    let mut rhs = tmpl(Template::new(e(var(0), vec![e(var(1), vec![var(2)])]), true), &ins);
    rhs = &rhs + &tmpl(Template::new(e(var(0), vec![var(2), var(1)]), false), &ins);
    rhs = &rhs + &tmpl(Template::new(e(var(0), vec![var(1), var(2)]), true), &ins);
    assert_eq!(dump(&lhs), dump(&rhs), "\n{}\n{}", dump(&lhs), dump(&rhs));
}

#[test]
fn dd_small() {
    for s in [
        "(E (g a 1) (g b 1) (g b 2))",
        "(E (E (g a 1) (g b 1) (g b 2)) (g c 1) (g c 2))",
        "(F 2 2 ((g a 1) (g a 2)) ((g b 1) (g b 2)))",
        "(F 2 3 ((g a 1) (* (g a 2) (g a 3))) ((g b 1) (E (g b 2) (g c 1)) (g b 3)))",
        "(E (* (g a 1) (g a 2)) (g b 1) (F 1 1 ((g c 1)) ((g c 2))))",
    ] {
        let x = parse_expr(s).unwrap();
        let dx = differential(&x, Mode::Reduced).unwrap();
        let ddx = differential(&dx, Mode::Reduced).unwrap();
        assert!(ddx.is_zero(), "{s}\n{}", dump(&ddx));
        assert!(!dx.is_zero());
    }
}
