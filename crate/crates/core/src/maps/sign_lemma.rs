//! The μ-removal sign rule applied to the summands of Φ∘(Φ⊗1).
//!
//! Each summand with a b-term inside an a-term is paired with the summand
//! obtained by moving the smallest such b-term to top level; the observed
//! change of the ≐-sign is compared with the rule.

use rustc_hash::FxHashMap;

use crate::family::{compose, gen_tuples, tensor_with_identity, Side};
use crate::ks::{ks_exponent, template_of_word, TNode, TWord};
use crate::maps::phi::phi;

/// Letter slot (0 = a, 1 = b, 2 = c) and 1-based index of a variable.
fn var_of(v: u16) -> (usize, usize) {
    (v as usize % 3, v as usize / 3 + 1)
}

fn head_var(n: &TNode) -> Option<(usize, usize)> {
    match n {
        TNode::Var(v) => Some(var_of(*v)),
        TNode::E(h, _) => match h.as_slice() {
            [TNode::Var(v)] => Some(var_of(*v)),
            _ => None,
        },
        TNode::F(..) => None,
    }
}

fn args_of(n: &TNode) -> &[TWord] {
    match n {
        TNode::E(_, a) => a,
        _ => &[],
    }
}

fn with_args(n: &TNode, args: Vec<TWord>) -> TNode {
    let h = match n {
        TNode::Var(v) => vec![TNode::Var(*v)],
        TNode::E(h, _) => h.clone(),
        TNode::F(..) => unreachable!(),
    };
    if args.is_empty() {
        h.into_iter().next().unwrap()
    } else {
        TNode::E(h, args)
    }
}

fn arity(w: &[TNode]) -> usize {
    w.iter()
        .map(|n| match n {
            TNode::Var(_) => 0,
            TNode::E(h, a) => a.len() + arity(h) + a.iter().map(|x| arity(x)).sum::<usize>(),
            TNode::F(a, b) => a.len() + b.len() + a.iter().chain(b).map(|x| arity(x)).sum::<usize>(),
        })
        .sum()
}

fn is_c_product(w: &[TNode]) -> bool {
    w.iter().all(|n| matches!(n, TNode::Var(v) if var_of(*v).0 == 2))
}

/// Where the recombined c-product sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    /// An argument of an E-term; ε̂ is the preceding op degree plus the
    /// 1-based argument position.
    Inner(usize),
    /// The trailing top-level c-product; the value is the preceding op degree.
    Trailing(usize),
}

#[derive(Clone, Debug)]
pub struct Removal {
    pub word: TWord,
    pub eps_tilde: usize,
    pub m: usize,
    pub q: usize,
    pub p_i: usize,
    pub split: Split,
}

/// Splits the first proper c-product argument starting with `c_mu`,
/// returning ε̂ for the split in the new word.
fn split_inner(w: &mut TWord, mu: u16, pre: &mut usize) -> Option<usize> {
    for node in w.iter_mut() {
        if let TNode::E(h, args) = node {
            let own = *pre;
            *pre += args.len() + arity(h);
            if let Some(t) = args.iter().position(|a| a.len() > 1 && is_c_product(a) && a[0] == TNode::Var(mu)) {
                let rest = args[t][1..].to_vec();
                args[t].truncate(1);
                args.insert(t + 1, rest);
                return Some(own + t + 1);
            }
            for a in args.iter_mut() {
                if let Some(r) = split_inner(a, mu, pre) {
                    return Some(r);
                }
            }
        }
    }
    None
}

/// The μ-removal of a summand, if it has a b-term inside an a-term.
pub fn remove_mu(w: &TWord) -> Option<Removal> {
    let mut best: Option<(usize, usize, usize)> = None; // (μ, node position, arg position)
    for (pos, n) in w.iter().enumerate() {
        if head_var(n).map(|x| x.0) != Some(0) {
            continue;
        }
        for (t, a) in args_of(n).iter().enumerate() {
            if let [b] = a.as_slice() {
                if let Some((1, j)) = head_var(b) {
                    if best.is_none_or(|x| j < x.0) {
                        best = Some((j, pos, t));
                    }
                }
            }
        }
    }
    let (mu, pos_i, t) = best?;
    let ai = &w[pos_i];
    let p_i = args_of(ai).len();
    let bterm = args_of(ai)[t][0].clone();
    let q = args_of(&bterm).len();
    let eps_tilde = arity(&w[..pos_i]);
    let pos_mu = w.iter().position(|n| head_var(n) == Some((0, mu)))?;
    let mut merged: Vec<TWord> = Vec::new();
    let mut out: TWord = w[..pos_mu].to_vec();
    for n in &w[pos_mu..pos_i] {
        merged.extend(args_of(n).iter().cloned());
    }
    merged.extend(args_of(ai)[..t].iter().cloned());
    out.push(with_args(&w[pos_mu], merged));
    out.push(bterm);
    for n in &w[pos_mu + 1..pos_i] {
        out.push(with_args(n, Vec::new()));
    }
    out.push(with_args(ai, args_of(ai)[t + 1..].to_vec()));
    out.extend(w[pos_i + 1..].iter().cloned());
    let cmu = (3 * (mu - 1) + 2) as u16;
    let mut pre = 0;
    let split = match split_inner(&mut out, cmu, &mut pre) {
        Some(e) => Split::Inner(e),
        None => {
            let k = out.iter().position(|n| *n == TNode::Var(cmu))?;
            Split::Trailing(arity(&out[..k]))
        }
    };
    Some(Removal { word: out, eps_tilde, m: t + 1, q, p_i, split })
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct LemmaReport {
    pub n: usize,
    /// Summands with a b-term inside an a-term.
    pub candidates: usize,
    /// Candidates whose partner is also a summand.
    pub paired: usize,
    /// Candidates without a partner; all of these split the trailing c-product.
    pub unpaired: usize,
    pub unpaired_inner: usize,
    /// Pairs satisfying the rule with `q(p_i − 1)`.
    pub agree_p_minus_1: usize,
    /// Pairs satisfying the rule with `q(p_i − m)`.
    pub agree_p_minus_m: usize,
    /// Pairs on which the two variants predict different signs.
    pub distinguishing: usize,
}

impl LemmaReport {
    pub fn ok(&self) -> bool {
        self.unpaired_inner == 0 && self.agree_p_minus_m == self.paired
    }
}

/// Checks the rule on all summands of `(Φ∘(Φ⊗1))_(n)`.
pub fn check(n: usize) -> LemmaReport {
    let p = phi();
    let pp = compose(p.clone(), tensor_with_identity(p, Side::Right)).expect("compatible slots");
    let x = gen_tuples(n, 3);
    let expr = crate::lin::from_tup(&pp.eval(n, &x));
    let mut signs: FxHashMap<TWord, bool> = FxHashMap::default();
    for t in expr.iter() {
        let (tw, _) = template_of_word(t.key, 3).expect("formal generators only");
        let eps = ks_exponent(&t, 3).expect("constant ≐-sign");
        signs.insert(tw, eps);
    }
    let mut r = LemmaReport { n, ..Default::default() };
    for (w, &eps) in &signs {
        let Some(rm) = remove_mu(w) else { continue };
        r.candidates += 1;
        let Some(&eps2) = signs.get(&rm.word) else {
            r.unpaired += 1;
            if matches!(rm.split, Split::Inner(_)) {
                r.unpaired_inner += 1;
            }
            continue;
        };
        r.paired += 1;
        let hat = match rm.split {
            Split::Inner(e) | Split::Trailing(e) => e,
        };
        if rm.q * (rm.m - 1) % 2 == 1 {
            r.distinguishing += 1;
        }
        let base = rm.eps_tilde + rm.m + hat;
        let diff = eps ^ eps2;
        if diff == ((base + rm.q * (rm.p_i - 1)) % 2 == 1) {
            r.agree_p_minus_1 += 1;
        }
        if diff == ((base + rm.q * (rm.p_i - rm.m)) % 2 == 1) {
            r.agree_p_minus_m += 1;
        }
    }
    r
}
