//! Twisting cochains on `BA ⊗ BA` given in closed form: the product of the
//! bar construction, and the ∪₁-homotopy.

use crate::gens::{GenId, Letter};
use crate::lin::{Expr, Term};
use crate::normal::{e_op, f_op};
use crate::word::WordId;

pub fn gens(l: Letter, n: usize) -> Vec<WordId> {
    (1..=n).map(|i| WordId::gen(GenId::get(l, i as u32))).collect()
}

/// Component `(k,l)` on `[a_1|…|a_k] ⊗ [b_1|…|b_l]`: the identity for
/// `(1,0)` and `(0,1)`, `E_l(a_1; b_•)` for `k = 1`, zero otherwise.
pub fn bar_product_cochain(k: usize, l: usize) -> Expr {
    let (a, b) = (gens(Letter::A, k), gens(Letter::B, l));
    match (k, l) {
        (1, 0) => Expr::from_key(a[0]),
        (0, 1) => Expr::from_key(b[0]),
        (1, _) => Expr::from_terms(e_op(a[0], &b).iter().copied()),
        _ => Expr::zero(),
    }
}

/// Component `(k,l)` of the ∪₁-homotopy: `1` for `(0,0)`, `sign·F_kl(a_•; b_•)`
/// for `k, l ≥ 1`, zero otherwise.
pub fn cup_one_bar(k: usize, l: usize, sign: i64) -> Expr {
    let (a, b) = (gens(Letter::A, k), gens(Letter::B, l));
    match (k, l) {
        (0, 0) => Expr::from_key(WordId::ONE),
        (0, _) | (_, 0) => Expr::zero(),
        _ => match f_op(&a, &b) {
            Some(w) => Expr::from_terms([Term::new(w, sign)]),
            None => Expr::zero(),
        },
    }
}
