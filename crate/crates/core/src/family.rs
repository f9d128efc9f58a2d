//! Families of multilinear maps indexed by arity, and the calculus on them:
//! composition, tensoring with the identity, transposition, defects.

use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::diff::{d_word, Mode};
use crate::error::HgaError;
use crate::gens::{GenId, Letter};
use crate::lin::{Lin, Term, Tup};
use crate::normal::for_each_choice;
use crate::sign::{koszul, Affine, SignId, SignPoly};
use crate::word::WordId;

pub type TupExpr = Lin<Tup>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Twisting-family components of degree 1−n; `f_(0) = 0`.
    Map,
    /// Homotopy components of degree −n; `h_(0)` is the unit.
    Homotopy,
}

impl Kind {
    /// Parity of the component degree at arity `n`.
    pub fn deg(self, n: usize) -> Affine {
        match self {
            Kind::Map => Affine::from_int(1 + n as i64),
            Kind::Homotopy => Affine::from_int(n as i64),
        }
    }
}

pub trait Family: Send + Sync {
    fn name(&self) -> String;
    fn in_slots(&self) -> usize;
    fn out_slots(&self) -> usize;
    fn kind(&self) -> Kind;
    /// Component `n` on tuples of words; `x.len() == n`.
    fn eval(&self, n: usize, x: &[Tup]) -> TupExpr;
}

pub type Fam = Arc<dyn Family>;

/// Multilinear extension of a component to expression inputs.
pub fn apply(f: &dyn Family, n: usize, x: &[&TupExpr]) -> TupExpr {
    let lists: Vec<Vec<Term<Tup>>> = x.iter().map(|e| e.terms()).collect();
    let mut out = TupExpr::zero();
    for_each_choice(&lists, &mut |picked: &[Term<Tup>]| {
        let ws: Vec<Tup> = picked.iter().map(|t| t.key).collect();
        let mut sign = SignId::ZERO;
        let mut coeff = 1;
        for t in picked {
            sign = sign.add(t.sign);
            coeff *= t.coeff;
        }
        for t in f.eval(n, &ws).iter() {
            out.add(Term { key: t.key, sign: t.sign.add(sign), coeff: t.coeff * coeff });
        }
    });
    out
}

/// Product of tuple expressions with the slotwise Koszul sign.
pub fn tup_mul(x: &TupExpr, y: &TupExpr) -> TupExpr {
    let mut out = TupExpr::zero();
    for s in x.iter() {
        for t in y.iter() {
            let (k, p) = s.key.mul(&t.key);
            let (c, id) = s.sign.add(t.sign).add_poly(&p);
            out.add(Term { key: k, sign: id, coeff: if c { -1 } else { 1 } * s.coeff * t.coeff });
        }
    }
    out
}

pub fn twist_all(x: &TupExpr, p: &SignPoly) -> TupExpr {
    if p.is_const() {
        return if p.c { x.neg() } else { x.clone() };
    }
    let (c, id) = SignId::intern(p.clone());
    Lin::from_terms(x.iter().map(|t| t.twist_id(c, id)))
}

/// Differential on tuples: `d(u⊗v) = du⊗v + (−1)^{|u|} u⊗dv`.
pub fn d_tup(x: &TupExpr, mode: Mode) -> Result<TupExpr, HgaError> {
    let mut out = TupExpr::zero();
    for t in x.iter() {
        let ws = t.key.as_slice();
        let mut pre = Affine::ZERO;
        for s in 0..ws.len() {
            let dw = d_word(ws[s], mode)?;
            if !dw.is_empty() {
                let (c, id) = t.sign.add_poly(&SignPoly::from_affine(pre));
                for u in dw.iter() {
                    let mut v = ws.to_vec();
                    v[s] = u.key;
                    out.add(Term {
                        key: Tup::new(&v),
                        sign: id.add(u.sign),
                        coeff: if c { -1 } else { 1 } * t.coeff * u.coeff,
                    });
                }
            }
            pre += ws[s].deg();
        }
    }
    Ok(out)
}

/// The formal generator tuple `(a_i ⊗ b_i ⊗ …)` with `slots` entries.
pub fn gen_tuple(i: usize, slots: usize) -> Tup {
    let ws: Vec<WordId> = (0..slots)
        .map(|s| WordId::gen(GenId::get(Letter::slot(s), i as u32)))
        .collect();
    Tup::new(&ws)
}

pub fn gen_tuples(n: usize, slots: usize) -> Vec<Tup> {
    (1..=n).map(|i| gen_tuple(i, slots)).collect()
}

fn single(t: Tup) -> TupExpr {
    TupExpr::from_key(t)
}

/// Identity, as a strict map family on `slots`-fold tuples.
pub struct Identity {
    pub slots: usize,
}

impl Family for Identity {
    fn name(&self) -> String {
        "id".into()
    }
    fn in_slots(&self) -> usize {
        self.slots
    }
    fn out_slots(&self) -> usize {
        self.slots
    }
    fn kind(&self) -> Kind {
        Kind::Map
    }
    fn eval(&self, n: usize, x: &[Tup]) -> TupExpr {
        if n == 1 {
            single(x[0])
        } else {
            TupExpr::zero()
        }
    }
}

/// The strict transposition `u⊗v ↦ (−1)^{|u||v|} v⊗u`.
pub struct Transpose;

impl Family for Transpose {
    fn name(&self) -> String {
        "T".into()
    }
    fn in_slots(&self) -> usize {
        2
    }
    fn out_slots(&self) -> usize {
        2
    }
    fn kind(&self) -> Kind {
        Kind::Map
    }
    fn eval(&self, n: usize, x: &[Tup]) -> TupExpr {
        if n != 1 {
            return TupExpr::zero();
        }
        let (u, v) = (x[0].get(0), x[0].get(1));
        let mut p = SignPoly::zero();
        p.add_product(u.deg(), v.deg());
        twist_all(&single(Tup::new(&[v, u])), &p)
    }
}

/// `g ∘ f` of two map families.
pub struct Compose {
    pub g: Fam,
    pub f: Fam,
}

pub fn compose(g: Fam, f: Fam) -> Result<Fam, HgaError> {
    if f.out_slots() != g.in_slots() {
        return Err(HgaError::Slots { expected: g.in_slots(), got: f.out_slots() });
    }
    Ok(Arc::new(Compose { g, f }))
}

/// Calls `f` with every composition of `n` into positive parts.
pub fn positive_compositions(n: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(rem: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if rem == 0 {
            f(cur);
            return;
        }
        for v in 1..=rem {
            cur.push(v);
            rec(rem - v, cur, f);
            cur.pop();
        }
    }
    if n == 0 {
        return;
    }
    rec(n, &mut Vec::new(), f);
}

impl Family for Compose {
    fn name(&self) -> String {
        format!("({}∘{})", self.g.name(), self.f.name())
    }
    fn in_slots(&self) -> usize {
        self.f.in_slots()
    }
    fn out_slots(&self) -> usize {
        self.g.out_slots()
    }
    fn kind(&self) -> Kind {
        Kind::Map
    }
    fn eval(&self, n: usize, x: &[Tup]) -> TupExpr {
        let mut out = TupExpr::zero();
        if n == 0 {
            return out;
        }
        let degs: Vec<Affine> = x.iter().map(|t| t.deg()).collect();
        let mut blocks: FxHashMap<(usize, usize), TupExpr> = FxHashMap::default();
        positive_compositions(n, &mut |parts| {
            let r = parts.len();
            let mut ys: Vec<TupExpr> = Vec::with_capacity(r);
            let mut e = Affine::ZERO;
            let mut start = 0;
            for (j, &nj) in parts.iter().enumerate() {
                let end = start + nj;
                let y = blocks
                    .entry((start, end))
                    .or_insert_with(|| self.f.eval(nj, &x[start..end]))
                    .clone();
                if y.is_zero() {
                    return;
                }
                let bdeg: Affine = degs[start..end].iter().copied().sum();
                e += bdeg.times((n - end) as i64);
                e += (bdeg + Affine::from_int(1 + nj as i64)).times((r - 1 - j) as i64);
                ys.push(y);
                start = end;
            }
            let refs: Vec<&TupExpr> = ys.iter().collect();
            let v = apply(self.g.as_ref(), r, &refs);
            out.add_scaled(&twist_all(&v, &SignPoly::from_affine(e)), 1);
        });
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `1 ⊗ f`
    Left,
    /// `f ⊗ 1`
    Right,
}

/// `f ⊗ 1` or `1 ⊗ f` for a map family `f`.
pub struct TensorId {
    pub f: Fam,
    pub side: Side,
}

pub fn tensor_with_identity(f: Fam, side: Side) -> Fam {
    Arc::new(TensorId { f, side })
}

impl Family for TensorId {
    fn name(&self) -> String {
        match self.side {
            Side::Left => format!("(1⊗{})", self.f.name()),
            Side::Right => format!("({}⊗1)", self.f.name()),
        }
    }
    fn in_slots(&self) -> usize {
        self.f.in_slots() + 1
    }
    fn out_slots(&self) -> usize {
        self.f.out_slots() + 1
    }
    fn kind(&self) -> Kind {
        Kind::Map
    }
    fn eval(&self, n: usize, x: &[Tup]) -> TupExpr {
        if n == 0 {
            return TupExpr::zero();
        }
        let s = self.in_slots();
        let fs = self.f.in_slots();
        let (id_slot, f_range) = match self.side {
            Side::Right => (s - 1, 0..fs),
            Side::Left => (0, 1..s),
        };
        let fx: Vec<Tup> = x.iter().map(|t| Tup::new(&t.as_slice()[f_range.clone()])).collect();
        let idw = WordId::concat_all(&x.iter().map(|t| t.get(id_slot)).collect::<Vec<_>>());
        let v = self.f.eval(n, &fx);
        if v.is_zero() {
            return v;
        }
        // written order of symbols: reference rank of var (i, slot) is 1 + i*s + slot
        let rank = |i: usize, sl: usize| (1 + i * s + sl) as u32;
        let op = (0u32, self.f.kind().deg(n));
        let mut written = Vec::with_capacity(n * s + 1);
        match self.side {
            Side::Right => {
                written.push(op);
                for (i, t) in x.iter().enumerate() {
                    for sl in f_range.clone() {
                        written.push((rank(i, sl), t.get(sl).deg()));
                    }
                }
                for (i, t) in x.iter().enumerate() {
                    written.push((rank(i, id_slot), t.get(id_slot).deg()));
                }
            }
            Side::Left => {
                for (i, t) in x.iter().enumerate() {
                    written.push((rank(i, id_slot), t.get(id_slot).deg()));
                }
                written.push(op);
                for (i, t) in x.iter().enumerate() {
                    for sl in f_range.clone() {
                        written.push((rank(i, sl), t.get(sl).deg()));
                    }
                }
            }
        }
        let p = koszul(&written);
        let idt = Tup::single(idw);
        let joined = v.map_keys(|t| match self.side {
            Side::Right => t.join(&idt),
            Side::Left => idt.join(&t),
        });
        twist_all(&joined, &p)
    }
}

/// `f ∘ T`.
pub fn transpose_inputs(f: Fam) -> Result<Fam, HgaError> {
    compose(f, Arc::new(Transpose))
}

/// A family with one summand negated at a chosen arity; used to confirm
/// that checks are sensitive to single sign errors.
pub struct Mutated {
    pub inner: Fam,
    pub n: usize,
    /// Index of the summand (in text order of the generic component) to flip.
    pub index: usize,
}

impl Family for Mutated {
    fn name(&self) -> String {
        format!("mut({},{},{})", self.inner.name(), self.n, self.index)
    }
    fn in_slots(&self) -> usize {
        self.inner.in_slots()
    }
    fn out_slots(&self) -> usize {
        self.inner.out_slots()
    }
    fn kind(&self) -> Kind {
        self.inner.kind()
    }
    fn eval(&self, n: usize, x: &[Tup]) -> TupExpr {
        let v = self.inner.eval(n, x);
        if n != self.n {
            return v;
        }
        let mut terms: Vec<(String, Term<Tup>)> =
            v.iter().map(|t| (crate::text::term_text(&Term { coeff: 1, ..t }), t)).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        if terms.is_empty() {
            return v;
        }
        let victim = terms[self.index % terms.len()].1;
        let mut out = v.clone();
        out.add(victim.scaled(-2));
        out
    }
}

/// Sign conventions of the structure equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Convention {
    /// Negates the merging terms `f_(n−1)(…, x_k x_{k+1}, …)`.
    pub flip_bar: bool,
    /// Negates the product terms `f_(k) f_(n−k)`.
    pub flip_prod: bool,
}

/// The convention under which Φ, its composites and the homotopies check out.
pub const PINNED: Convention = Convention::new(false, false);

impl Convention {
    pub const fn new(flip_bar: bool, flip_prod: bool) -> Convention {
        Convention { flip_bar, flip_prod }
    }

    pub fn all() -> [Convention; 4] {
        [
            Convention::new(false, false),
            Convention::new(true, false),
            Convention::new(false, true),
            Convention::new(true, true),
        ]
    }
}

/// Input tuples with `x_k x_{k+1}` merged (0-based `k`), and the Koszul sign.
pub fn merge_adjacent(x: &[Tup], k: usize) -> (Vec<Tup>, SignPoly) {
    let (m, p) = x[k].mul(&x[k + 1]);
    let mut v = x[..k].to_vec();
    v.push(m);
    v.extend_from_slice(&x[k + 2..]);
    (v, p)
}

fn prefix_deg(x: &[Tup], k: usize) -> Affine {
    x[..k].iter().map(|t| t.deg()).sum()
}

/// Collects the pieces of an identity `lhs − Σ rhs` together with their sizes.
#[derive(Default)]
pub struct Defect {
    pub residual: TupExpr,
    /// Number of unit summands fed into the cancellation.
    pub lhs_terms: u64,
    /// Abort once `lhs_terms` exceeds this; 0 means no limit.
    pub ceiling: u64,
    pub aborted: bool,
    /// Labelled groups, kept only when tracing.
    pub groups: Option<Vec<(String, TupExpr, i64)>>,
}

impl Defect {
    pub fn with_ceiling(ceiling: u64) -> Defect {
        Defect { ceiling, ..Defect::default() }
    }

    pub fn traced(mut self) -> Defect {
        self.groups = Some(Vec::new());
        self
    }

    pub fn add(&mut self, e: &TupExpr, k: i64) {
        self.add_labeled(String::new(), e, k);
    }

    pub fn add_labeled(&mut self, label: String, e: &TupExpr, k: i64) {
        if self.aborted {
            return;
        }
        self.lhs_terms += e.weight();
        if self.ceiling > 0 && self.lhs_terms > self.ceiling {
            self.aborted = true;
            return;
        }
        self.residual.add_scaled(e, k);
        if let Some(g) = self.groups.as_mut() {
            g.push((label, e.clone(), k));
        }
    }

    fn absorb(&mut self, groups: Vec<Result<Groups, HgaError>>) -> Result<(), HgaError> {
        for g in groups {
            for (l, e, k) in g? {
                self.add_labeled(l, &e, k);
            }
        }
        Ok(())
    }
}

type Groups = Vec<(String, TupExpr, i64)>;

/// `d f_(n) − Σ ±f_(n−1)(…x_k x_{k+1}…) − Σ ±f_(k) f_(n−k)` on generic tuples,
/// with merging sign `(−1)^{k+1}` and product sign `(−1)^k` before the
/// convention's flips.
pub fn twisting_defect(f: &dyn Family, n: usize, conv: Convention) -> Result<Defect, HgaError> {
    let x = gen_tuples(n, f.in_slots());
    twisting_defect_on(f, &x, conv)
}

pub fn twisting_defect_on(f: &dyn Family, x: &[Tup], conv: Convention) -> Result<Defect, HgaError> {
    let mut def = Defect::default();
    twisting_defect_into(&mut def, f, x, conv)?;
    Ok(def)
}

pub fn twisting_defect_into(
    def: &mut Defect,
    f: &dyn Family,
    x: &[Tup],
    conv: Convention,
) -> Result<(), HgaError> {
    let n = x.len();
    let groups: Vec<_> = (0..=n)
        .into_par_iter()
        .map(|k| -> Result<Groups, HgaError> {
            let mut out = Vec::new();
            if k == 0 {
                out.push((format!("d f_({n})"), d_tup(&f.eval(n, x), Mode::Reduced)?, 1));
                return Ok(out);
            }
            if k < n {
                let (xm, p) = merge_adjacent(x, k - 1);
                let v = twist_all(&f.eval(n - 1, &xm), &p);
                // 1-based index k: sign (−1)^{k+1}
                let neg = (k % 2 == 0) ^ conv.flip_bar;
                out.push((format!("f_({})(x_{k} x_{})", n - 1, k + 1), v, if neg { 1 } else { -1 }));
                let l = f.eval(k, &x[..k]);
                if !l.is_zero() {
                    let r = f.eval(n - k, &x[k..]);
                    let mut p = SignPoly::zero();
                    p.add_product(f.kind().deg(n - k), prefix_deg(x, k));
                    let v = twist_all(&tup_mul(&l, &r), &p);
                    let neg = (k % 2 == 1) ^ conv.flip_prod;
                    out.push((format!("f_({k}) f_({})", n - k), v, if neg { 1 } else { -1 }));
                }
            }
            Ok(out)
        })
        .collect();
    def.absorb(groups)
}

/// `d h_(n) − Σ (−1)^k h_(n−1)(…) − Σ (f_(k) h_(n−k) − (−1)^k h_(k) g_(n−k))`.
pub fn homotopy_defect(
    h: &dyn Family,
    f: &dyn Family,
    g: &dyn Family,
    n: usize,
    conv: Convention,
) -> Result<Defect, HgaError> {
    let x = gen_tuples(n, h.in_slots());
    homotopy_defect_on(h, f, g, &x, conv)
}

pub fn homotopy_defect_on(
    h: &dyn Family,
    f: &dyn Family,
    g: &dyn Family,
    x: &[Tup],
    conv: Convention,
) -> Result<Defect, HgaError> {
    let mut def = Defect::default();
    homotopy_defect_into(&mut def, h, f, g, x, conv)?;
    Ok(def)
}

pub fn homotopy_defect_into(
    def: &mut Defect,
    h: &dyn Family,
    f: &dyn Family,
    g: &dyn Family,
    x: &[Tup],
    conv: Convention,
) -> Result<(), HgaError> {
    let n = x.len();
    let head = d_tup(&h.eval(n, x), Mode::Reduced)?;
    def.add_labeled(format!("d h_({n})"), &head, 1);
    let groups: Vec<_> = (0..=n)
        .into_par_iter()
        .map(|k| -> Result<Groups, HgaError> {
            let mut out = Vec::new();
            if k + 1 < n {
                let (xm, p) = merge_adjacent(x, k);
                let v = twist_all(&h.eval(n - 1, &xm), &p);
                let neg = (k % 2 == 0) ^ conv.flip_bar;
                out.push((format!("h_({})(x_{} x_{})", n - 1, k + 1, k + 2), v, if neg { 1 } else { -1 }));
            }
            let pk = prefix_deg(x, k);
            // f_(k) h_(n−k)
            if k >= 1 {
                let l = f.eval(k, &x[..k]);
                if !l.is_zero() {
                    let r = h.eval(n - k, &x[k..]);
                    let mut p = SignPoly::zero();
                    p.add_product(Kind::Homotopy.deg(n - k), pk);
                    out.push((
                        format!("f_({k}) h_({})", n - k),
                        twist_all(&tup_mul(&l, &r), &p),
                        if conv.flip_prod { 1 } else { -1 },
                    ));
                }
            }
            // −(−1)^k h_(k) g_(n−k)
            if k < n {
                let l = h.eval(k, &x[..k]);
                if !l.is_zero() {
                    let r = g.eval(n - k, &x[k..]);
                    let mut p = SignPoly::zero();
                    p.add_product(Kind::Map.deg(n - k), pk);
                    let neg = (k % 2 == 1) ^ conv.flip_prod;
                    out.push((format!("h_({k}) g_({})", n - k), twist_all(&tup_mul(&l, &r), &p), if neg { -1 } else { 1 }));
                }
            }
            Ok(out)
        })
        .collect();
    def.absorb(groups)
}

type TemplateGen = dyn Fn(usize) -> Vec<crate::ks::Template> + Send + Sync;

/// A family whose components are sums of ≐-templates over the variables
/// `x_{i,s}` numbered `i·in_slots + s` in arrival order.
pub struct TemplateFamily {
    name: String,
    in_slots: usize,
    kind: Kind,
    gen: Box<TemplateGen>,
    cache: parking_lot::Mutex<FxHashMap<usize, Arc<Vec<crate::ks::Template>>>>,
}

impl TemplateFamily {
    pub fn new(
        name: impl Into<String>,
        in_slots: usize,
        kind: Kind,
        gen: impl Fn(usize) -> Vec<crate::ks::Template> + Send + Sync + 'static,
    ) -> TemplateFamily {
        TemplateFamily {
            name: name.into(),
            in_slots,
            kind,
            gen: Box::new(gen),
            cache: parking_lot::Mutex::new(FxHashMap::default()),
        }
    }

    pub fn templates(&self, n: usize) -> Arc<Vec<crate::ks::Template>> {
        if let Some(t) = self.cache.lock().get(&n) {
            return t.clone();
        }
        let t = Arc::new((self.gen)(n));
        self.cache.lock().insert(n, t.clone());
        t
    }
}

impl Family for TemplateFamily {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn in_slots(&self) -> usize {
        self.in_slots
    }
    fn out_slots(&self) -> usize {
        1
    }
    fn kind(&self) -> Kind {
        self.kind
    }
    fn eval(&self, n: usize, x: &[Tup]) -> TupExpr {
        debug_assert_eq!(x.len(), n);
        if n == 0 {
            return match self.kind {
                Kind::Map => TupExpr::zero(),
                Kind::Homotopy => single(Tup::one(1)),
            };
        }
        let words: Vec<WordId> = x.iter().flat_map(|t| t.as_slice().iter().copied()).collect();
        let mut out = TupExpr::zero();
        for t in self.templates(n).iter() {
            out.extend(t.instantiate(&words).into_iter().map(|t| Term {
                key: Tup::single(t.key),
                sign: t.sign,
                coeff: t.coeff,
            }));
        }
        out
    }
}
