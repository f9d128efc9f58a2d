//! Normalizing constructors for products, E- and F-operations.
//!
//! Every constructor returns the expansion of its literal value in the
//! canonical basis: E-heads are single atoms, no argument is the unit.
//! Rewriting uses the first-argument product rule and the E∘E rule.

use std::sync::{Arc, LazyLock};

use parking_lot::Mutex;
use rustc_hash::FxHashMap;

use crate::lin::{Expr, Term};
use crate::sign::{koszul, Affine, SignId, SignPoly};
use crate::word::{Atom, Factor, WordId};

pub type Terms = Vec<Term<WordId>>;

pub fn word_term(w: WordId) -> Term<WordId> {
    Term::new(w, 1)
}

/// Bilinear concatenation.
pub fn mul_terms(x: &[Term<WordId>], y: &[Term<WordId>]) -> Terms {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for s in x {
        for t in y {
            out.push(Term {
                key: s.key.concat(t.key),
                sign: s.sign.add(t.sign),
                coeff: s.coeff * t.coeff,
            });
        }
    }
    out
}

pub fn mul(x: &Expr, y: &Expr) -> Expr {
    Expr::from_terms(mul_terms(&x.terms(), &y.terms()))
}

type MemoKey = (WordId, Box<[WordId]>);
static E_MEMO: LazyLock<Mutex<FxHashMap<MemoKey, Arc<Terms>>>> =
    LazyLock::new(|| Mutex::new(FxHashMap::default()));

/// Drops all memoized expansions.
pub fn clear_memo() {
    E_MEMO.lock().clear();
}

/// Normalized expansion of the literal `E_k(head; args)`.
///
/// # Panics
/// If an F-operation would end up in head position; callers reject such
/// input beforehand (see [`crate::pre::Pre::normalize`]).
pub fn e_op(head: WordId, args: &[WordId]) -> Arc<Terms> {
    if args.is_empty() {
        return Arc::new(vec![word_term(head)]);
    }
    if head.is_one() || args.iter().any(|w| w.is_one()) {
        return Arc::new(Vec::new());
    }
    let hf = head.factors();
    if hf.len() == 1 {
        if let Factor::Atom(a) = hf[0] {
            let w = WordId::factor(Factor::E(a, args.into()));
            return Arc::new(vec![word_term(w)]);
        }
    }
    let key = (head, Box::<[WordId]>::from(args));
    if let Some(r) = E_MEMO.lock().get(&key) {
        return r.clone();
    }
    let r = Arc::new(if hf.len() == 1 {
        match &hf[0] {
            Factor::E(a, inner) => e_of_e(*a, inner, args),
            Factor::F(..) => panic!("{}", crate::error::HgaError::FInHead),
            Factor::Atom(_) => unreachable!(),
        }
    } else {
        e_of_product(head, args)
    });
    E_MEMO.lock().insert(key, r.clone());
    r
}

/// `E_k(XY; b) = Σ_{k1+k2=k} ± E_{k1}(X; b') E_{k2}(Y; b'')` with the Koszul
/// sign `k2|X| + |b'|(|Y| + k2)`.
fn e_of_product(head: WordId, args: &[WordId]) -> Terms {
    let (x, y) = head.split_first().expect("non-unit head");
    let (dx, dy) = (x.deg(), y.deg());
    let k = args.len();
    let mut out = Vec::new();
    let mut db1 = Affine::ZERO;
    for k1 in 0..=k {
        if k1 > 0 {
            db1 += args[k1 - 1].deg();
        }
        let k2 = (k - k1) as i64;
        let mut p = SignPoly::zero();
        p.add_product(Affine::from_int(k2), dx);
        p.add_product(db1, dy + Affine::from_int(k2));
        let left = e_op(x, &args[..k1]);
        if left.is_empty() {
            continue;
        }
        let right = e_op(y, &args[k1..]);
        let (c, s) = SignId::intern(p);
        for t in mul_terms(&left, &right) {
            out.push(t.twist_id(c, s));
        }
    }
    out
}

/// Enumerates all sequences of `parts` non-negative integers summing to `total`.
pub fn compositions(total: usize, parts: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(rem: usize, left: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if left == 1 {
            cur.push(rem);
            f(cur);
            cur.pop();
            return;
        }
        for v in 0..=rem {
            cur.push(v);
            rec(rem - v, left - 1, cur, f);
            cur.pop();
        }
    }
    if parts == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    let mut cur = Vec::with_capacity(parts);
    rec(total, parts, &mut cur, f);
}

/// `E_l(E_k(a; b_•); c_•)` expanded by the E∘E rule.
fn e_of_e(a: Atom, b: &[WordId], c: &[WordId]) -> Terms {
    let k = b.len();
    let l = c.len();
    let mut out = Vec::new();
    // parts: i_1..i_k then j_0..j_k
    compositions(l, 2 * k + 1, &mut |parts| {
        let (is, js) = parts.split_at(k);
        let n = k + js.iter().sum::<usize>();
        let mut eps = 0usize;
        for s in 0..k {
            eps += is[s] * (k + js[s + 1..].iter().sum::<usize>());
        }
        for (t, j) in js.iter().enumerate() {
            eps += t * j;
        }
        // written symbol sequence with reference ranks: ops E_n, E_{i_1}..E_{i_k}
        // (ranks 0..=k), then a, b_1..b_k, c_1..c_l.
        let base = (k + 1) as u32;
        let mut written: Vec<(u32, Affine)> = Vec::with_capacity(1 + 2 * k + l + 1);
        written.push((0, Affine::from_int(n as i64)));
        written.push((base, a.deg()));
        let mut ci = 0usize;
        let mut slots: Vec<Slot> = Vec::with_capacity(n);
        for _ in 0..js[0] {
            written.push((base + 1 + k as u32 + ci as u32, c[ci].deg()));
            slots.push(Slot::C(ci));
            ci += 1;
        }
        for s in 0..k {
            written.push((1 + s as u32, Affine::from_int(is[s] as i64)));
            written.push((base + 1 + s as u32, b[s].deg()));
            let start = ci;
            for _ in 0..is[s] {
                written.push((base + 1 + k as u32 + ci as u32, c[ci].deg()));
                ci += 1;
            }
            slots.push(Slot::Inner(s, start, ci));
            for _ in 0..js[s + 1] {
                written.push((base + 1 + k as u32 + ci as u32, c[ci].deg()));
                slots.push(Slot::C(ci));
                ci += 1;
            }
        }
        let mut p = koszul(&written);
        p.add_const(eps % 2 == 1);
        let (cst, sid) = SignId::intern(p);
        // literal expansion: each slot is a list of terms
        let mut choices: Vec<Arc<Terms>> = Vec::with_capacity(slots.len());
        for sl in &slots {
            match *sl {
                Slot::C(i) => choices.push(Arc::new(vec![word_term(c[i])])),
                Slot::Inner(s, from, to) => {
                    let t = e_op(b[s], &c[from..to]);
                    if t.is_empty() {
                        return;
                    }
                    choices.push(t);
                }
            }
        }
        let lists: Vec<&[Term<WordId>]> = choices.iter().map(|v| v.as_slice()).collect();
        for_each_choice(&lists, &mut |picked: &[Term<WordId>]| {
            let args: Vec<WordId> = picked.iter().map(|t| t.key).collect();
            let mut sign = sid;
            let mut coeff = if cst { -1 } else { 1 };
            for t in picked {
                sign = sign.add(t.sign);
                coeff *= t.coeff;
            }
            for t in e_op(WordId::atom(a), &args).iter() {
                out.push(Term { key: t.key, sign: sign.add(t.sign), coeff: coeff * t.coeff });
            }
        });
    });
    out
}

#[derive(Clone, Copy)]
enum Slot {
    C(usize),
    Inner(usize, usize, usize),
}

/// Calls `f` on every element of the cartesian product of `lists`.
pub fn for_each_choice<T: Copy>(lists: &[impl AsRef<[T]>], f: &mut impl FnMut(&[T])) {
    fn rec<T: Copy>(lists: &[impl AsRef<[T]>], cur: &mut Vec<T>, f: &mut impl FnMut(&[T])) {
        if cur.len() == lists.len() {
            f(cur);
            return;
        }
        for &x in lists[cur.len()].as_ref() {
            cur.push(x);
            rec(lists, cur, f);
            cur.pop();
        }
    }
    let mut cur = Vec::with_capacity(lists.len());
    rec(lists, &mut cur, f);
}

/// Multilinear `E_k(head; args)` on term lists.
pub fn e_terms(head: &[Term<WordId>], args: &[&[Term<WordId>]]) -> Terms {
    let mut out = Vec::new();
    let mut lists: Vec<&[Term<WordId>]> = Vec::with_capacity(args.len() + 1);
    lists.push(head);
    lists.extend_from_slice(args);
    for_each_choice(&lists, &mut |picked: &[Term<WordId>]| {
        let ws: Vec<WordId> = picked[1..].iter().map(|t| t.key).collect();
        let mut sign = SignId::ZERO;
        let mut coeff = 1;
        for t in picked {
            sign = sign.add(t.sign);
            coeff *= t.coeff;
        }
        for t in e_op(picked[0].key, &ws).iter() {
            out.push(Term { key: t.key, sign: sign.add(t.sign), coeff: coeff * t.coeff });
        }
    });
    out
}

/// Literal `F_kl(a; b)`: a single canonical word, or zero on a unit argument.
pub fn f_op(a: &[WordId], b: &[WordId]) -> Option<WordId> {
    assert!(!a.is_empty() && !b.is_empty(), "F_kl needs k, l >= 1");
    if a.iter().chain(b).any(|w| w.is_one()) {
        return None;
    }
    let mut args = a.to_vec();
    args.extend_from_slice(b);
    Some(WordId::factor(Factor::F(a.len() as u16, args.into())))
}

/// Multilinear `F_kl` on term lists.
pub fn f_terms(a: &[&[Term<WordId>]], b: &[&[Term<WordId>]]) -> Terms {
    let mut out = Vec::new();
    let mut lists: Vec<&[Term<WordId>]> = a.to_vec();
    lists.extend_from_slice(b);
    let k = a.len();
    for_each_choice(&lists, &mut |picked: &[Term<WordId>]| {
        let ws: Vec<WordId> = picked.iter().map(|t| t.key).collect();
        if let Some(w) = f_op(&ws[..k], &ws[k..]) {
            let mut sign = SignId::ZERO;
            let mut coeff = 1;
            for t in picked {
                sign = sign.add(t.sign);
                coeff *= t.coeff;
            }
            out.push(Term { key: w, sign, coeff });
        }
    });
    out
}

/// Rebuilds a word through the normalizing constructors.  On canonical
/// words this is the identity.
pub fn renormalize_word(w: WordId) -> Terms {
    let mut acc: Terms = vec![word_term(WordId::ONE)];
    for f in w.factors().iter() {
        let piece: Terms = match f {
            Factor::Atom(_) => vec![word_term(WordId::factor(f.clone()))],
            Factor::E(h, args) => {
                let args_t: Vec<Terms> = args.iter().map(|x| renormalize_word(*x)).collect();
                let refs: Vec<&[Term<WordId>]> = args_t.iter().map(|v| v.as_slice()).collect();
                e_terms(&[word_term(WordId::atom(*h))], &refs)
            }
            Factor::F(k, args) => {
                let args_t: Vec<Terms> = args.iter().map(|x| renormalize_word(*x)).collect();
                let refs: Vec<&[Term<WordId>]> = args_t.iter().map(|v| v.as_slice()).collect();
                let (a, b) = refs.split_at(*k as usize);
                f_terms(a, b)
            }
        };
        acc = mul_terms(&acc, &piece);
    }
    acc
}

/// Normalizes an expression whose words are already canonical
/// (idempotence check).
pub fn normalize(e: &Expr) -> Expr {
    let mut out = Expr::zero();
    for t in e.iter() {
        for s in renormalize_word(t.key) {
            out.add(Term { key: s.key, sign: t.sign.add(s.sign), coeff: t.coeff * s.coeff });
        }
    }
    out
}
