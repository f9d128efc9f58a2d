//! The shm map Φ: A⊗A ⇒ A.

use std::sync::Arc;

use crate::family::{Fam, Kind, TemplateFamily};
use crate::ks::{e, prod, var, TWord, Template};

/// Sequences `(j_1, …, j_n)` with `Σ j = total` and `j_1 + … + j_s < s`
/// (when `strict`) for all `s`.
pub fn prefix_sequences(n: usize, total: usize, strict: bool) -> Vec<Vec<usize>> {
    fn rec(n: usize, total: usize, strict: bool, cur: &mut Vec<usize>, sum: usize, out: &mut Vec<Vec<usize>>) {
        let s = cur.len();
        if s == n {
            if sum == total {
                out.push(cur.clone());
            }
            return;
        }
        for j in 0..=total - sum {
            // position s+1 (1-based) requires sum + j < s + 1
            if strict && sum + j > s {
                break;
            }
            cur.push(j);
            rec(n, total, strict, cur, sum + j, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, total, strict, &mut Vec::new(), 0, &mut out);
    out
}

/// `E_{j_1}(x_1; y…)⋯E_{j_n}(x_n; y…)` with the `y`s distributed in order.
pub fn e_chain(xs: &[TWord], ys: &[TWord], js: &[usize]) -> TWord {
    let mut next = 0;
    let mut parts = Vec::with_capacity(xs.len());
    for (x, &j) in xs.iter().zip(js) {
        parts.push(e(x.clone(), ys[next..next + j].to_vec()));
        next += j;
    }
    prod(parts)
}

pub fn phi_templates(n: usize) -> Vec<Template> {
    if n == 0 {
        return Vec::new();
    }
    let a: Vec<TWord> = (0..n).map(|i| var(2 * i)).collect();
    let b: Vec<TWord> = (0..n).map(|i| var(2 * i + 1)).collect();
    prefix_sequences(n, n - 1, true)
        .into_iter()
        .map(|js| {
            let w = prod([e_chain(&a, &b[..n - 1], &js), b[n - 1].clone()]);
            Template::new(w, (n - 1) % 2 == 1)
        })
        .collect()
}

pub fn phi() -> Fam {
    Arc::new(TemplateFamily::new("Phi", 2, Kind::Map, phi_templates))
}
