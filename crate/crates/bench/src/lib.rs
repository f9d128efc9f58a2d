//! Workloads shared by the criterion benches.

use hga_core::family::{gen_tuples, twisting_defect_into, Defect, PINNED};
use hga_core::lin::from_tup;
use hga_core::maps::{ha, phi::phi};
use hga_core::text::parse_expr;
use hga_core::Expr;

/// Summands of `h^a_(n)`.
pub fn enumerate_ha(n: usize) -> usize {
    ha::count(n)
}

/// `h^a_(n)` on generic inputs, expanded to canonical words.
pub fn expand_ha(n: usize) -> Expr {
    let h = ha::ha();
    from_tup(&h.eval(n, &gen_tuples(n, 3)))
}

/// Residual size of the twisting identity of Φ at arity `n`.
pub fn phi_defect(n: usize) -> u64 {
    let p = phi();
    let mut d = Defect::default();
    twisting_defect_into(&mut d, p.as_ref(), &gen_tuples(n, p.in_slots()), PINNED).expect("Φ is well formed");
    d.residual.weight()
}

/// `E_l(E_k(a; b•); c•)`, normalized.
pub fn nested_e(k: usize, l: usize) -> Expr {
    let bs: Vec<String> = (1..=k).map(|i| format!("(g b {i})")).collect();
    let cs: Vec<String> = (1..=l).map(|i| format!("(g c {i})")).collect();
    parse_expr(&format!("(E (E (g a 1) {}) {})", bs.join(" "), cs.join(" "))).expect("well formed")
}
