//! The differential on normalized expressions.

use std::sync::{Arc, LazyLock};

use parking_lot::Mutex;
use rustc_hash::FxHashMap;

use crate::error::HgaError;
use crate::gens::{DiffBinding, GenId};
use crate::ks::{e, f, prod, var, TWord, Template};
use crate::lin::{Expr, Term};
use crate::normal::{e_terms, f_terms, mul_terms, word_term, Terms};
use crate::sign::{Affine, SignId, SignPoly};
use crate::word::{Atom, Factor, WordId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Generator differentials vanish; bound generators are rejected.
    Reduced,
    /// Generators differentiate to their binding (formal symbol, zero, or
    /// the bound expression).
    Formal,
}

static MEMO: LazyLock<Mutex<FxHashMap<(WordId, Mode), Arc<Terms>>>> =
    LazyLock::new(|| Mutex::new(FxHashMap::default()));

pub fn clear_memo() {
    MEMO.lock().clear();
}

fn twist(ts: &[Term<WordId>], p: &SignPoly, out: &mut Terms) {
    if p.is_const() {
        let c = p.c;
        out.extend(ts.iter().map(|t| if c { t.scaled(-1) } else { *t }));
        return;
    }
    let (c, s) = SignId::intern(p.clone());
    out.extend(ts.iter().map(|t| t.twist_id(c, s)));
}

fn gen_diff(g: GenId, mode: Mode) -> Result<Terms, HgaError> {
    match (g.binding(), mode) {
        (DiffBinding::Bound(_), Mode::Reduced) => Err(HgaError::BoundInReduced(g.name())),
        (_, Mode::Reduced) | (DiffBinding::Zero, Mode::Formal) => Ok(Vec::new()),
        (DiffBinding::Formal, Mode::Formal) => Ok(vec![word_term(WordId::atom(Atom::D(g)))]),
        (DiffBinding::Bound(e), Mode::Formal) => Ok(e.terms()),
    }
}

fn atom_diff(a: Atom, mode: Mode) -> Result<Terms, HgaError> {
    match a {
        Atom::Gen(g) => gen_diff(g, mode),
        Atom::D(_) => Ok(Vec::new()),
    }
}

/// Differential of a canonical word.
pub fn d_word(w: WordId, mode: Mode) -> Result<Arc<Terms>, HgaError> {
    if let Some(r) = MEMO.lock().get(&(w, mode)) {
        return Ok(r.clone());
    }
    let fs = w.factors();
    let mut out = Vec::new();
    let mut prefix_deg = Affine::ZERO;
    for (i, fac) in fs.iter().enumerate() {
        let df = d_factor(fac, mode)?;
        if !df.is_empty() {
            let left = WordId::intern(fs[..i].to_vec());
            let right = WordId::intern(fs[i + 1..].to_vec());
            let ts = mul_terms(&mul_terms(&[word_term(left)], &df), &[word_term(right)]);
            twist(&ts, &SignPoly::from_affine(prefix_deg), &mut out);
        }
        prefix_deg += fac.deg();
    }
    let r = Arc::new(out);
    MEMO.lock().insert((w, mode), r.clone());
    Ok(r)
}

fn d_factor(fac: &Factor, mode: Mode) -> Result<Terms, HgaError> {
    match fac {
        Factor::Atom(a) => atom_diff(*a, mode),
        Factor::E(h, args) => d_e(*h, args, mode),
        Factor::F(_, args) if args.iter().any(|w| w.has_f()) => Err(HgaError::FInHead),
        Factor::F(k, args) => d_f(*k as usize, args, mode),
    }
}

/// `d(E_k(h; y)) = d(E_k)(h; y) + (−1)^k E_k(dh; y) + Σ ± E_k(h; …, dy_m, …)`.
fn d_e(h: Atom, y: &[WordId], mode: Mode) -> Result<Terms, HgaError> {
    let k = y.len();
    let hw = WordId::atom(h);
    let mut out = Vec::new();
    // d(E_k)(h; y)
    {
        // y_1 E_{k-1}(h; y_2..): sign |y_1|(k-1+|h|)
        let mut p = SignPoly::zero();
        p.add_product(y[0].deg(), Affine::from_int(k as i64 - 1) + h.deg());
        let inner = crate::normal::e_op(hw, &y[1..]);
        twist(&mul_terms(&[word_term(y[0])], &inner), &p, &mut out);
        for m in 1..k {
            let mut args: Vec<WordId> = y[..m - 1].to_vec();
            args.push(y[m - 1].concat(y[m]));
            args.extend_from_slice(&y[m + 1..]);
            let t = crate::normal::e_op(hw, &args);
            twist(&t, &SignPoly::konst(m % 2 == 1), &mut out);
        }
        let last = mul_terms(&crate::normal::e_op(hw, &y[..k - 1]), &[word_term(y[k - 1])]);
        twist(&last, &SignPoly::konst(k % 2 == 1), &mut out);
    }
    let dh = atom_diff(h, mode)?;
    if !dh.is_empty() {
        let ys: Vec<Terms> = y.iter().map(|w| vec![word_term(*w)]).collect();
        let refs: Vec<&[Term<WordId>]> = ys.iter().map(|v| v.as_slice()).collect();
        twist(&e_terms(&dh, &refs), &SignPoly::konst(k % 2 == 1), &mut out);
    }
    let mut pre = Affine::from_int(k as i64) + h.deg();
    for m in 0..k {
        let dy = d_word(y[m], mode)?;
        if !dy.is_empty() {
            let mut ys: Vec<Terms> = y.iter().map(|w| vec![word_term(*w)]).collect();
            ys[m] = dy.to_vec();
            let refs: Vec<&[Term<WordId>]> = ys.iter().map(|v| v.as_slice()).collect();
            twist(&e_terms(&[word_term(hw)], &refs), &SignPoly::from_affine(pre), &mut out);
        }
        pre += y[m].deg();
    }
    Ok(out)
}

/// Templates for `d(F_kl)(a; b)` on variables `a_i = i−1`, `b_j = k+j−1`.
pub fn d_f_templates(k: usize, l: usize) -> Vec<Template> {
    let a = |i: usize| var(i - 1);
    let b = |j: usize| var(k + j - 1);
    let a_rng = |lo: usize, hi: usize| (lo..=hi).map(a).collect::<Vec<TWord>>();
    let b_rng = |lo: usize, hi: usize| (lo..=hi).map(b).collect::<Vec<TWord>>();
    let mut out = Vec::new();
    // A_kl
    if k == 1 {
        out.push(Template::new(e(a(1), b_rng(1, l)), false));
    } else {
        out.push(Template::new(prod([a(1), f(a_rng(2, k), b_rng(1, l))]), false));
        for i in 1..k {
            let mut aa = a_rng(1, i - 1);
            aa.push(prod([a(i), a(i + 1)]));
            aa.extend(a_rng(i + 2, k));
            out.push(Template::new(f(aa, b_rng(1, l)), i % 2 == 1));
        }
        for j in 1..=l {
            let t = prod([f(a_rng(1, k - 1), b_rng(1, j)), e(a(k), b_rng(j + 1, l))]);
            out.push(Template::new(t, k % 2 == 1));
        }
    }
    // (−1)^k B_kl
    let s = k % 2 == 1;
    if l == 1 {
        out.push(Template::new(e(b(1), a_rng(1, k)), !s));
    } else {
        for i in 0..k {
            let t = prod([e(b(1), a_rng(1, i)), f(a_rng(i + 1, k), b_rng(2, l))]);
            out.push(Template::new(t, s));
        }
        for j in 1..l {
            let mut bb = b_rng(1, j - 1);
            bb.push(prod([b(j), b(j + 1)]));
            bb.extend(b_rng(j + 2, l));
            out.push(Template::new(f(a_rng(1, k), bb), s ^ (j % 2 == 1)));
        }
        let t = prod([f(a_rng(1, k), b_rng(1, l - 1)), b(l)]);
        out.push(Template::new(t, s ^ (l % 2 == 1)));
    }
    out
}

static F_TEMPLATES: LazyLock<Mutex<FxHashMap<(usize, usize), Arc<Vec<Template>>>>> =
    LazyLock::new(|| Mutex::new(FxHashMap::default()));

fn d_f(k: usize, args: &[WordId], mode: Mode) -> Result<Terms, HgaError> {
    let l = args.len() - k;
    let ts = F_TEMPLATES
        .lock()
        .entry((k, l))
        .or_insert_with(|| Arc::new(d_f_templates(k, l)))
        .clone();
    let mut out = Vec::new();
    for t in ts.iter() {
        out.extend(t.instantiate(args));
    }
    let mut pre = Affine::from_int((k + l) as i64);
    for m in 0..k + l {
        let dy = d_word(args[m], mode)?;
        if !dy.is_empty() {
            let mut ys: Vec<Terms> = args.iter().map(|w| vec![word_term(*w)]).collect();
            ys[m] = dy.to_vec();
            let refs: Vec<&[Term<WordId>]> = ys.iter().map(|v| v.as_slice()).collect();
            let (a, b) = refs.split_at(k);
            twist(&f_terms(a, b), &SignPoly::from_affine(pre), &mut out);
        }
        pre += args[m].deg();
    }
    Ok(out)
}

/// Differential of an expression.
pub fn differential(e: &Expr, mode: Mode) -> Result<Expr, HgaError> {
    let mut out = Expr::zero();
    for t in e.iter() {
        for s in d_word(t.key, mode)?.iter() {
            out.add(Term { key: s.key, sign: s.sign.add(t.sign), coeff: s.coeff * t.coeff });
        }
    }
    Ok(out)
}

/// Differential of a term list.
pub fn d_terms(ts: &[Term<WordId>], mode: Mode) -> Result<Terms, HgaError> {
    let mut out = Vec::new();
    for t in ts {
        for s in d_word(t.key, mode)?.iter() {
            out.push(Term { key: s.key, sign: s.sign.add(t.sign), coeff: s.coeff * t.coeff });
        }
    }
    Ok(out)
}
