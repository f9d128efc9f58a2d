//! ∪₁ and ∪₂ obtained from Φ and a homotopy from Φ to Φ∘T.

use crate::diff::{differential, Mode};
use crate::error::HgaError;
use crate::family::Family;
use crate::lin::{from_tup, Expr, Term, Tup};
use crate::maps::hc::{hc, Orientation};
use crate::maps::phi::phi;
use crate::sign::{SignId, SignPoly};
use crate::word::WordId;

fn twisted(e: &Expr, p: &SignPoly) -> Expr {
    let (c, s) = SignId::intern(p.clone());
    Expr::from_terms(e.iter().map(|t| t.twist_id(c, s)))
}

/// Extends a word-level bilinear map to expressions.
pub fn bilinear(x: &Expr, y: &Expr, f: impl Fn(WordId, WordId) -> Expr) -> Expr {
    let mut out = Expr::zero();
    for s in x.iter() {
        for t in y.iter() {
            for u in f(s.key, t.key).iter() {
                out.add(Term {
                    key: u.key,
                    sign: u.sign.add(s.sign).add(t.sign),
                    coeff: u.coeff * s.coeff * t.coeff,
                });
            }
        }
    }
    out
}

fn eval2(f: &dyn Family, x: Tup, y: Tup) -> Expr {
    from_tup(&f.eval(2, &[x, y]))
}

/// `Φ_(2)(a⊗1, 1⊗b) + (−1)^{|a||b|} Φ_(2)(1⊗b, a⊗1)`.
pub fn cup1_word(a: WordId, b: WordId) -> Expr {
    let p = phi();
    let one = WordId::ONE;
    let mut out = eval2(p.as_ref(), Tup::new(&[a, one]), Tup::new(&[one, b]));
    let mut s = SignPoly::zero();
    s.add_product(a.deg(), b.deg());
    let second = eval2(p.as_ref(), Tup::new(&[one, b]), Tup::new(&[a, one]));
    out.add_scaled(&twisted(&second, &s), 1);
    out
}

pub fn cup1(x: &Expr, y: &Expr) -> Expr {
    bilinear(x, y, cup1_word)
}

/// `(−1)^{|a||b|} h_(2)(1⊗b, a⊗1) − h_(2)(a⊗1, 1⊗b) + (−1)^{|a|} a∪₁h_(1)(1⊗b) + h_(1)(a⊗1)∪₁b`
/// with `h = h^c∘T`, the homotopy from Φ to Φ∘T.
pub fn cup2_word(a: WordId, b: WordId) -> Expr {
    let h = hc(Orientation::Reverse);
    let one = WordId::ONE;
    let (ea, eb) = (Expr::from_key(a), Expr::from_key(b));
    let mut ab = SignPoly::zero();
    ab.add_product(a.deg(), b.deg());
    let mut out = twisted(&eval2(h.as_ref(), Tup::new(&[one, b]), Tup::new(&[a, one])), &ab);
    out.add_scaled(&eval2(h.as_ref(), Tup::new(&[a, one]), Tup::new(&[one, b])), -1);
    let h1b = from_tup(&h.eval(1, &[Tup::new(&[one, b])]));
    out.add_scaled(&twisted(&cup1(&ea, &h1b), &SignPoly::from_affine(a.deg())), 1);
    let h1a = from_tup(&h.eval(1, &[Tup::new(&[a, one])]));
    out.add_scaled(&cup1(&h1a, &eb), 1);
    out
}

pub fn cup2(x: &Expr, y: &Expr) -> Expr {
    bilinear(x, y, cup2_word)
}

/// `d(∪₂)(a;b) − a∪₁b − (−1)^{|a||b|} b∪₁a` on two generators.
pub fn cuptwo_residual(a: WordId, b: WordId) -> Result<Expr, HgaError> {
    let mut r = differential(&cup2_word(a, b), Mode::Reduced)?;
    r.add_scaled(&cup1_word(a, b), -1);
    let mut ab = SignPoly::zero();
    ab.add_product(a.deg(), b.deg());
    r.add_scaled(&twisted(&cup1_word(b, a), &ab), -1);
    Ok(r)
}
