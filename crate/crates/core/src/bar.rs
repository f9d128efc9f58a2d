//! Normalized bar constructions, the shuffle map and the coalgebra maps and
//! homotopies induced by families.
//!
//! A key is a tensor product of bar words.  It stands for the literal
//! element `s⁻¹x₁ ⊗ s⁻¹x₂ ⊗ ⋯` with every entry desuspended on its own; the
//! bracket `[x₁|…|x_n] = (s⁻¹)^{⊗n}(x₁⊗…⊗x_n)` differs from it by
//! `(−1)^{Σ(n−i)|x_i|}`.  Entries are tuples; unit entries vanish.

use std::fmt;
use std::sync::{Arc, LazyLock};

use parking_lot::RwLock;
use rustc_hash::FxHashMap;

use crate::diff::Mode;
use crate::error::HgaError;
use crate::family::{d_tup, Family, Kind, TupExpr};
use crate::lin::{Lin, Term, Tup};
use crate::sign::{Affine, SignId, SignPoly};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct BarId(u32);

type Parts = Arc<[Box<[Tup]>]>;

#[derive(Default)]
struct Table {
    keys: Vec<Parts>,
    index: FxHashMap<Parts, u32>,
}

static TABLE: LazyLock<RwLock<Table>> = LazyLock::new(|| RwLock::new(Table::default()));

pub type BarExpr = Lin<BarId>;

impl BarId {
    pub fn intern(parts: Vec<Vec<Tup>>) -> BarId {
        let key: Parts = parts.into_iter().map(Vec::into_boxed_slice).collect();
        if let Some(&i) = TABLE.read().index.get(&key) {
            return BarId(i);
        }
        let mut t = TABLE.write();
        if let Some(&i) = t.index.get(&key) {
            return BarId(i);
        }
        let i = t.keys.len() as u32;
        t.keys.push(key.clone());
        t.index.insert(key, i);
        BarId(i)
    }

    pub fn parts(self) -> Parts {
        TABLE.read().keys[self.0 as usize].clone()
    }

    fn to_vecs(self) -> Vec<Vec<Tup>> {
        self.parts().iter().map(|p| p.to_vec()).collect()
    }
}

impl fmt::Display for BarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts()
            .iter()
            .map(|p| format!("[{}]", p.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" | ")))
            .collect();
        write!(f, "{}", parts.join(" ⊗ "))
    }
}

/// Parity of a desuspended entry.
pub fn entry_deg(t: &Tup) -> Affine {
    t.deg() + Affine::ONE
}

fn term(key: BarId, p: &SignPoly, sign: SignId, coeff: i64) -> Term<BarId> {
    let (c, s) = sign.add_poly(p);
    Term { key, sign: s, coeff: if c { -coeff } else { coeff } }
}

/// `(s⁻¹)^{⊗N}` applied to all entries of all parts, read in order.
pub fn desuspend(parts: Vec<Vec<Tup>>) -> BarExpr {
    if parts.iter().flatten().any(Tup::is_one) {
        return BarExpr::zero();
    }
    // s⁻¹ in position i passes x_1 … x_{i−1}
    let q = bracket_sign(&parts);
    BarExpr::from_terms([term(BarId::intern(parts), &q, SignId::ZERO, 1)])
}

/// A single bracket `[x₁|…|x_n]`.
pub fn bracket(xs: Vec<Tup>) -> BarExpr {
    desuspend(vec![xs])
}

fn pad(t: &Tup, left: usize, right: usize) -> Tup {
    let mut v = vec![crate::WordId::ONE; left];
    v.extend_from_slice(t.as_slice());
    v.extend(std::iter::repeat_n(crate::WordId::ONE, right));
    Tup::new(&v)
}

/// Shuffle map on parts `i` and `i+1`, whose entries have `su` and `sv`
/// slots; the result replaces both.
pub fn shuffle_at(e: &BarExpr, i: usize, su: usize, sv: usize) -> BarExpr {
    let mut out = BarExpr::zero();
    for t in e.iter() {
        let parts = t.key.to_vecs();
        let (u, v) = (&parts[i], &parts[i + 1]);
        let ud: Vec<Affine> = u.iter().map(entry_deg).collect();
        let vd: Vec<Affine> = v.iter().map(entry_deg).collect();
        for_each_shuffle(u.len(), v.len(), &mut |from_u: &[bool]| {
            let mut p = SignPoly::zero();
            let (mut iu, mut iv) = (0, 0);
            let mut merged = Vec::with_capacity(u.len() + v.len());
            for &x in from_u {
                if x {
                    merged.push(pad(&u[iu], 0, sv));
                    iu += 1;
                } else {
                    // v_iv passes the remaining u entries
                    for d in &ud[iu..] {
                        p.add_product(*d, vd[iv]);
                    }
                    merged.push(pad(&v[iv], su, 0));
                    iv += 1;
                }
            }
            let mut np = parts[..i].to_vec();
            np.push(merged);
            np.extend_from_slice(&parts[i + 2..]);
            out.add(term(BarId::intern(np), &p, t.sign, t.coeff));
        });
    }
    out
}

/// Iterates over (k,l)-shuffles as the sequence of "comes from the left" flags.
pub fn for_each_shuffle(k: usize, l: usize, f: &mut dyn FnMut(&[bool])) {
    fn rec(k: usize, l: usize, cur: &mut Vec<bool>, f: &mut dyn FnMut(&[bool])) {
        if k == 0 && l == 0 {
            f(cur);
            return;
        }
        if k > 0 {
            cur.push(true);
            rec(k - 1, l, cur, f);
            cur.pop();
        }
        if l > 0 {
            cur.push(false);
            rec(k, l - 1, cur, f);
            cur.pop();
        }
    }
    rec(k, l, &mut Vec::new(), f);
}

/// Twisting cochain `t_f(s⁻¹y₁⊗…⊗s⁻¹y_m) = (−1)^{Σ(m−i)|y_i|} f_(m)(y)`.
fn t_block(f: &dyn Family, ys: &[Tup]) -> TupExpr {
    let m = ys.len();
    let mut p = SignPoly::zero();
    for (i, y) in ys.iter().enumerate() {
        if (m - i - 1) % 2 == 1 {
            p.add_affine(y.deg());
        }
    }
    crate::family::twist_all(&f.eval(m, ys), &p)
}

/// `t_f` on a one-part element.
pub fn twisting(f: &dyn Family, e: &BarExpr) -> TupExpr {
    let mut out = TupExpr::zero();
    for t in e.iter() {
        let parts = t.key.parts();
        assert_eq!(parts.len(), 1, "twisting cochains act on one bar word");
        for u in t_block(f, &parts[0]).iter() {
            out.add(Term { key: u.key, sign: u.sign.add(t.sign), coeff: u.coeff * t.coeff });
        }
    }
    out
}

/// Ordered decompositions of `0..n` into nonempty consecutive blocks.
pub fn for_each_blocking(n: usize, f: &mut dyn FnMut(&[usize])) {
    crate::family::positive_compositions(n, &mut |c: &[usize]| f(c));
    if n == 0 {
        f(&[]);
    }
}

/// Appends `s⁻¹(value)` for every summand of `value` to each partial result.
fn extend_entries(
    acc: Vec<(Vec<Tup>, SignPoly, i64)>,
    value: &TupExpr,
) -> Vec<(Vec<Tup>, SignPoly, i64)> {
    let mut out = Vec::new();
    for (ent, p, c) in acc {
        for u in value.iter() {
            if u.key.is_one() {
                continue;
            }
            let mut e2 = ent.clone();
            e2.push(u.key);
            let mut p2 = p.clone();
            p2.add_poly(&u.sign.poly());
            out.push((e2, p2, c * u.coeff));
        }
    }
    out
}

/// The coalgebra map `B f` on part `i`.
pub fn bar_map(f: &dyn Family, e: &BarExpr, i: usize) -> BarExpr {
    debug_assert_eq!(f.kind(), Kind::Map);
    let mut out = BarExpr::zero();
    for t in e.iter() {
        let parts = t.key.to_vecs();
        let xs = &parts[i];
        for_each_blocking(xs.len(), &mut |blocks: &[usize]| {
            let mut acc = vec![(Vec::new(), SignPoly::zero(), 1i64)];
            let mut at = 0;
            for &b in blocks {
                acc = extend_entries(acc, &t_block(f, &xs[at..at + b]));
                at += b;
            }
            for (ent, p, c) in acc {
                let mut np = parts.clone();
                np[i] = ent;
                out.add(term(BarId::intern(np), &p, t.sign, t.coeff * c));
            }
        });
    }
    out
}

/// The coalgebra homotopy `Σ (s⁻¹t_f)^{⊗·} ⊗ s⁻¹t_h ⊗ (s⁻¹t_g)^{⊗·}` on
/// one-part elements; `s⁻¹t_h` is odd and picks up the parity of the
/// desuspended entries it passes.
pub fn bar_homotopy(h: &dyn Family, f: &dyn Family, g: &dyn Family, e: &BarExpr) -> BarExpr {
    let mut out = BarExpr::zero();
    for t in e.iter() {
        let parts = t.key.to_vecs();
        assert_eq!(parts.len(), 1);
        let xs = &parts[0];
        for_each_blocking(xs.len(), &mut |blocks: &[usize]| {
            for hb in 0..blocks.len() {
                let mut acc = vec![(Vec::new(), SignPoly::zero(), 1i64)];
                let mut at = 0;
                let mut passed = SignPoly::zero();
                for (bi, &b) in blocks.iter().enumerate() {
                    let ys = &xs[at..at + b];
                    let v = if bi < hb {
                        t_block(f, ys)
                    } else if bi == hb {
                        for y in &xs[..at] {
                            passed.add_affine(entry_deg(y));
                        }
                        t_block(h, ys)
                    } else {
                        t_block(g, ys)
                    };
                    acc = extend_entries(acc, &v);
                    at += b;
                }
                for (ent, mut p, c) in acc {
                    p.add_poly(&passed);
                    out.add(term(BarId::intern(vec![ent]), &p, t.sign, t.coeff * c));
                }
            }
        });
    }
    out
}

/// Bar differential: entrywise `s⁻¹x ↦ −s⁻¹dx` plus merging of adjacent
/// entries of the same part, `s⁻¹x⊗s⁻¹y ↦ (−1)^{|x|+1} s⁻¹(xy)`.
pub fn bar_d(e: &BarExpr, mode: Mode) -> Result<BarExpr, HgaError> {
    let mut out = BarExpr::zero();
    for t in e.iter() {
        let parts = t.key.to_vecs();
        let mut pre = Affine::ZERO;
        for (pi, part) in parts.iter().enumerate() {
            for (k, x) in part.iter().enumerate() {
                let dx = d_tup(&TupExpr::from_key(*x), mode)?;
                for u in dx.iter() {
                    if u.key.is_one() {
                        continue;
                    }
                    let mut np = parts.clone();
                    np[pi][k] = u.key;
                    let mut p = SignPoly::from_affine(pre);
                    p.add_const(true);
                    out.add(term(BarId::intern(np), &p, t.sign.add(u.sign), t.coeff * u.coeff));
                }
                if k + 1 < part.len() {
                    let y = part[k + 1];
                    let (xy, kp) = x.mul(&y);
                    let mut p = SignPoly::from_affine(pre + entry_deg(x));
                    p.add_poly(&kp);
                    let mut np = parts.clone();
                    np[pi].splice(k..k + 2, [xy]);
                    out.add(term(BarId::intern(np), &p, t.sign, t.coeff));
                }
                pre += entry_deg(x);
            }
        }
    }
    Ok(out)
}

/// `[K] = (−1)^{bracket_sign} K` for a separated key `K`.
pub fn bracket_sign(parts: &[Vec<Tup>]) -> SignPoly {
    let mut q = SignPoly::zero();
    let all: Vec<&Tup> = parts.iter().flatten().collect();
    for i in 0..all.len() {
        for x in &all[..i] {
            q.add_affine(x.deg());
        }
    }
    q
}

pub fn dump(e: &BarExpr) -> String {
    crate::text::dump(e)
}
