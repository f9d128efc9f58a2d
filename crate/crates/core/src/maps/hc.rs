//! The commutativity homotopy h^c, which needs the F-operations.
//!
//! `Forward` is the reading with `E(a_s; b…)` in the first sum; it is a
//! homotopy from Φ∘T to Φ.  `Reverse` exchanges the roles of the two input
//! slots throughout, F included, and equals `h^c∘T`.

use std::fmt;
use std::sync::Arc;

use crate::family::{Fam, Kind, TemplateFamily};
use crate::ks::{e, f, prod, var, TWord, Template};
use crate::normal::compositions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Orientation {
    Forward,
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HcTerm {
    /// `E_{j_1}(x_1; y…) ⋯ E_{j_n}(x_n; y…)`.
    First { j: Vec<usize> },
    /// `−E_{i_1}(y_1; x…) ⋯ E_{i_q}(y_q; x…) F_kl E_{j_1}(x_{q+1}; y…) ⋯ E_{j_p}(x_n; y…)`.
    FSum { p: usize, q: usize, k: usize, l: usize, i: Vec<usize>, j: Vec<usize> },
}

impl HcTerm {
    pub fn n(&self) -> usize {
        match self {
            HcTerm::First { j } => j.len(),
            HcTerm::FSum { p, q, .. } => p + q,
        }
    }

    /// Checks the defining conditions.
    pub fn is_valid(&self) -> bool {
        match self {
            HcTerm::First { j } => j.iter().sum::<usize>() == j.len(),
            HcTerm::FSum { p, q, k, l, i, j } => {
                let prefix_ok = (1..=*q).all(|s| i[..s].iter().sum::<usize>() < s);
                *p >= 1
                    && *q >= 1
                    && *k >= 1
                    && *l >= 1
                    && i.len() == *q
                    && j.len() == *p
                    && prefix_ok
                    && i.iter().sum::<usize>() + k == *q
                    && j.iter().sum::<usize>() + l == *p
            }
        }
    }

    /// The ≐-template; `x` is the slot carrying the E-heads of the first sum.
    pub fn template(&self, o: Orientation) -> Template {
        let (xs, ys) = match o {
            Orientation::Forward => (0, 1),
            Orientation::Reverse => (1, 0),
        };
        let x = |i: usize| var(2 * (i - 1) + xs);
        let y = |i: usize| var(2 * (i - 1) + ys);
        match self {
            HcTerm::First { j } => {
                let mut next_y = 1;
                let parts = j.iter().enumerate().map(|(s, &js)| {
                    let args: Vec<TWord> = (next_y..next_y + js).map(y).collect();
                    next_y += js;
                    e(x(s + 1), args)
                });
                Template::new(prod(parts.collect::<Vec<_>>()), false)
            }
            HcTerm::FSum { p, q, k, l, i, j } => {
                let mut parts = Vec::new();
                let mut next_x = 1;
                for (t, &it) in i.iter().enumerate() {
                    parts.push(e(y(t + 1), (next_x..next_x + it).map(x).collect()));
                    next_x += it;
                }
                let fx: Vec<TWord> = (next_x..next_x + k).map(x).collect();
                let fy: Vec<TWord> = (q + 1..=q + l).map(y).collect();
                parts.push(f(fx, fy));
                let mut next_y = q + l + 1;
                for (s, &js) in j.iter().enumerate() {
                    parts.push(e(x(q + s + 1), (next_y..next_y + js).map(y).collect()));
                    next_y += js;
                }
                debug_assert_eq!(next_y, p + q + 1);
                Template::new(prod(parts), true)
            }
        }
    }
}

impl fmt::Display for HcTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HcTerm::First { j } => write!(f, "first j={j:?}"),
            HcTerm::FSum { p, q, k, l, i, j } => write!(f, "F p={p} q={q} k={k} l={l} i={i:?} j={j:?}"),
        }
    }
}

/// Non-negative sequences of length `q` with `Σ_{t≤s} i_t < s` for every s.
fn prefix_bounded(q: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(q: usize, cur: &mut Vec<usize>, sum: usize, f: &mut impl FnMut(&[usize])) {
        if cur.len() == q {
            f(cur);
            return;
        }
        let s = cur.len() + 1;
        for v in 0..s - sum {
            cur.push(v);
            rec(q, cur, sum + v, f);
            cur.pop();
        }
    }
    rec(q, &mut Vec::new(), 0, f);
}

pub fn terms(n: usize) -> Vec<HcTerm> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    compositions(n, n, &mut |j: &[usize]| out.push(HcTerm::First { j: j.to_vec() }));
    for q in 1..n {
        let p = n - q;
        prefix_bounded(q, &mut |i| {
            let k = q - i.iter().sum::<usize>();
            for l in 1..=p {
                compositions(p - l, p, &mut |j: &[usize]| {
                    out.push(HcTerm::FSum { p, q, k, l, i: i.to_vec(), j: j.to_vec() });
                });
            }
        });
    }
    out
}

pub fn hc_templates(n: usize, o: Orientation) -> Vec<Template> {
    terms(n).iter().map(|t| t.template(o)).collect()
}

pub fn hc(o: Orientation) -> Fam {
    let name = match o {
        Orientation::Forward => "h^c",
        Orientation::Reverse => "h^c∘T",
    };
    Arc::new(TemplateFamily::new(name, 2, Kind::Homotopy, move |n| hc_templates(n, o)))
}
