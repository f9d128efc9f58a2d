//! The polynomial algebra `k[x]` on one even generator and the explicit
//! homotopies out of it.
//!
//! Every generator in this module is even: `a`, the element `b` with
//! `db = E₁(a;a)`, the cocycles `u`, `v` of the strict fallback, and the
//! inputs `x^k`.  Koszul signs therefore only see operation arities, and
//! coefficients are plain integers.  Abstract f-symbols `f_(m)(x^{k•})` are
//! opaque apart from their twisting relation and normalization.

use std::fmt;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::maps::phi::prefix_sequences;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    A,
    U,
    V,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PF {
    Pow(Sym, u32),
    B,
    /// `E_m(a^h; a^{l_1}, …, a^{l_m})`.
    E(u32, Box<[u32]>),
    /// `f_(m)(x^{k_1}, …, x^{k_m})`.
    F(Box<[u32]>),
}

impl PF {
    pub fn parity(&self) -> bool {
        match self {
            PF::Pow(..) | PF::B => false,
            PF::E(_, l) => l.len() % 2 == 1,
            PF::F(k) => k.len() % 2 == 0,
        }
    }
}

impl fmt::Display for PF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pw = |k: u32| if k == 1 { "a".to_string() } else { format!("a^{k}") };
        match self {
            PF::Pow(s, k) => {
                let n = match s {
                    Sym::A => "a",
                    Sym::U => "u",
                    Sym::V => "v",
                };
                if *k == 1 {
                    write!(f, "{n}")
                } else {
                    write!(f, "{n}^{k}")
                }
            }
            PF::B => write!(f, "b"),
            PF::E(h, l) => {
                let args: Vec<String> = l.iter().map(|&k| pw(k)).collect();
                write!(f, "E{}({}; {})", l.len(), pw(*h), args.join(", "))
            }
            PF::F(k) => {
                let args: Vec<String> = k.iter().map(|k| format!("x^{k}")).collect();
                write!(f, "f{}({})", k.len(), args.join(", "))
            }
        }
    }
}

pub type PWord = Box<[PF]>;

/// Normal form of a literal product, or `None` if it vanishes.
pub fn word(fs: impl IntoIterator<Item = PF>) -> Option<PWord> {
    let mut out: Vec<PF> = Vec::new();
    for f in fs {
        let f = match f {
            PF::Pow(_, 0) => continue,
            PF::E(0, l) if l.is_empty() => continue,
            PF::E(h, l) if l.is_empty() => PF::Pow(Sym::A, h),
            PF::E(h, l) => {
                if h == 0 || l.contains(&0) {
                    return None;
                }
                PF::E(h, l)
            }
            PF::F(k) if k.len() == 1 => match k[0] {
                0 => continue,
                1 => PF::Pow(Sym::A, 1),
                _ => PF::F(k),
            },
            PF::F(k) => {
                if k.contains(&0) {
                    return None;
                }
                PF::F(k)
            }
            f => f,
        };
        if let (Some(PF::Pow(s, i)), PF::Pow(t, j)) = (out.last_mut(), &f) {
            if s == t {
                *i += j;
                continue;
            }
        }
        out.push(f);
    }
    Some(out.into_boxed_slice())
}

/// A finite integer combination of normal words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PExpr(FxHashMap<PWord, i64>);

impl PExpr {
    pub fn zero() -> PExpr {
        PExpr::default()
    }

    pub fn one() -> PExpr {
        PExpr::of(Vec::new(), 1)
    }

    pub fn of(fs: Vec<PF>, c: i64) -> PExpr {
        let mut e = PExpr::zero();
        e.push(fs, c);
        e
    }

    pub fn push(&mut self, fs: Vec<PF>, c: i64) {
        if let Some(w) = word(fs) {
            self.add_word(w, c);
        }
    }

    pub fn add_word(&mut self, w: PWord, c: i64) {
        if c == 0 {
            return;
        }
        let v = self.0.entry(w.clone()).or_insert(0);
        *v += c;
        if *v == 0 {
            self.0.remove(&w);
        }
    }

    pub fn add_scaled(&mut self, o: &PExpr, c: i64) {
        for (w, &k) in &o.0 {
            self.add_word(w.clone(), k * c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> u64 {
        self.0.values().map(|v| v.unsigned_abs()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PWord, i64)> {
        self.0.iter().map(|(w, &c)| (w, c))
    }

    pub fn mul(&self, o: &PExpr) -> PExpr {
        let mut out = PExpr::zero();
        for (u, c) in self.iter() {
            for (v, d) in o.iter() {
                out.push(u.iter().chain(v.iter()).cloned().collect(), c * d);
            }
        }
        out
    }

    /// Summands in canonical order, one per line.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self
            .iter()
            .map(|(w, c)| {
                let body: Vec<String> = w.iter().map(|f| f.to_string()).collect();
                let body = if body.is_empty() { "1".to_string() } else { body.join(" ") };
                format!("{c:+} {body}")
            })
            .collect();
        lines.sort();
        lines.join("\n")
    }
}

/// Rewrites every power head by the first-argument product rule
/// `E_m(a^h; l•) = Σ E_{i_1}(a; ·)⋯E_{i_h}(a; ·)`.
pub fn expand(e: &PExpr) -> PExpr {
    let mut out = PExpr::zero();
    for (w, c) in e.iter() {
        let mut acc = PExpr::one();
        for f in w.iter() {
            let piece = match f {
                PF::E(h, l) if *h > 1 => expand_head(*h, l),
                f => PExpr::of(vec![f.clone()], 1),
            };
            acc = acc.mul(&piece);
        }
        out.add_scaled(&acc, c);
    }
    out
}

fn expand_head(h: u32, l: &[u32]) -> PExpr {
    let mut out = PExpr::zero();
    crate::normal::compositions(l.len(), h as usize, &mut |parts: &[usize]| {
        let mut fs = Vec::with_capacity(parts.len());
        let mut at = 0;
        for &p in parts {
            fs.push(PF::E(1, l[at..at + p].into()));
            at += p;
        }
        out.push(fs, 1);
    });
    out
}

/// Differential of `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DB {
    /// `db = E₁(a;a)`.
    Cup,
    /// `db = u − v`.
    Diff,
}

fn d_factor(f: &PF, db: DB) -> PExpr {
    let mut out = PExpr::zero();
    match f {
        PF::Pow(..) => {}
        PF::B => match db {
            DB::Cup => out.push(vec![PF::E(1, [1].into())], 1),
            DB::Diff => {
                out.push(vec![PF::Pow(Sym::U, 1)], 1);
                out.push(vec![PF::Pow(Sym::V, 1)], -1);
            }
        },
        PF::E(h, l) => {
            let m = l.len();
            out.push(vec![PF::Pow(Sym::A, l[0]), PF::E(*h, l[1..].into())], 1);
            for i in 1..m {
                let mut v = l[..i - 1].to_vec();
                v.push(l[i - 1] + l[i]);
                v.extend_from_slice(&l[i + 1..]);
                out.push(vec![PF::E(*h, v.into())], if i % 2 == 1 { -1 } else { 1 });
            }
            let s = if m % 2 == 1 { -1 } else { 1 };
            out.push(vec![PF::E(*h, l[..m - 1].into()), PF::Pow(Sym::A, l[m - 1])], s);
        }
        PF::F(k) => {
            let m = k.len();
            for i in 1..m {
                let mut v = k[..i - 1].to_vec();
                v.push(k[i - 1] + k[i]);
                v.extend_from_slice(&k[i + 1..]);
                out.push(vec![PF::F(v.into())], if i % 2 == 1 { 1 } else { -1 });
                let s = if i % 2 == 1 { -1 } else { 1 };
                out.push(vec![PF::F(k[..i].into()), PF::F(k[i..].into())], s);
            }
        }
    }
    out
}

/// The derivation `d(uv) = du·v + (−1)^{|u|} u·dv`.
pub fn d(e: &PExpr, db: DB) -> PExpr {
    let mut out = PExpr::zero();
    for (w, c) in e.iter() {
        let mut odd = false;
        for (i, f) in w.iter().enumerate() {
            let df = d_factor(f, db);
            let s = if odd { -c } else { c };
            for (u, k) in df.iter() {
                let fs: Vec<PF> = w[..i].iter().chain(u.iter()).chain(w[i + 1..].iter()).cloned().collect();
                out.push(fs, s * k);
            }
            odd ^= f.parity();
        }
    }
    out
}

/// Input tuple `x^k ⊗ x^l`; one-variable families ignore `l`.
pub type In = (u32, u32);

pub type PFamily<'a> = &'a (dyn Fn(&[In]) -> PExpr + Sync);

/// Residual and size of `d h_(n) − Σ(−1)^k h_(n−1)(…) − Σ(f_(k) h_(n−k) − (−1)^k h_(k) g_(n−k))`
/// in the pinned convention.  `post` is applied to every group before it
/// enters the residual.
pub fn homotopy_defect(
    h: PFamily,
    f: PFamily,
    g: PFamily,
    x: &[In],
    db: DB,
    post: &dyn Fn(PExpr) -> PExpr,
) -> (PExpr, u64) {
    let n = x.len();
    let hh = |k: &[In]| if k.is_empty() { PExpr::one() } else { h(k) };
    let mut groups: Vec<(PExpr, i64)> = vec![(d(&h(x), db), 1)];
    for k in 0..n.saturating_sub(1) {
        let mut xm = x[..k].to_vec();
        xm.push((x[k].0 + x[k + 1].0, x[k].1 + x[k + 1].1));
        xm.extend_from_slice(&x[k + 2..]);
        groups.push((h(&xm), if k % 2 == 0 { 1 } else { -1 }));
    }
    for k in 1..=n {
        groups.push((f(&x[..k]).mul(&hh(&x[k..])), -1));
    }
    for k in 0..n {
        groups.push((hh(&x[..k]).mul(&g(&x[k..])), if k % 2 == 0 { 1 } else { -1 }));
    }
    let mut res = PExpr::zero();
    let mut lhs = 0;
    for (e, c) in groups {
        let e = post(e);
        lhs += e.weight();
        res.add_scaled(&e, c);
    }
    (res, lhs)
}

/// All tuples of length `n` with entries in `0..=max`.
pub fn tuples(n: usize, max: u32, pairs: bool) -> Vec<Vec<In>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for t in &out {
            for k in 0..=max {
                let ls: Vec<u32> = if pairs { (0..=max).collect() } else { vec![0] };
                for l in ls {
                    let mut v = t.clone();
                    v.push((k, l));
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out
}

// ---- abstract a-strict map f against the strict g(x^k) = a^k

pub fn strict_f(x: &[In]) -> PExpr {
    PExpr::of(vec![PF::F(x.iter().map(|p| p.0).collect())], 1)
}

pub fn strict_g(x: &[In]) -> PExpr {
    if x.len() == 1 {
        PExpr::of(vec![PF::Pow(Sym::A, x[0].0)], 1)
    } else {
        PExpr::zero()
    }
}

/// `h_(n)(x^{k•}) = (−1)^{n−1} Σ_{k'+k''=k_n−1} f_(n+1)(x^{k_1}, …, x^{k_{n−1}}, x^{k'}, x) a^{k''}`.
pub fn strict_h(x: &[In]) -> PExpr {
    let n = x.len();
    let mut out = PExpr::zero();
    let kn = x[n - 1].0;
    let s = if n % 2 == 1 { 1 } else { -1 };
    for k1 in 0..kn {
        let mut ks: Vec<u32> = x[..n - 1].iter().map(|p| p.0).collect();
        ks.push(k1);
        ks.push(1);
        out.push(vec![PF::F(ks.into()), PF::Pow(Sym::A, kn - 1 - k1)], s);
    }
    out
}

// ---- strict fallback: f(x) = u, g(x) = v, db = u − v

pub fn fallback_f(x: &[In]) -> PExpr {
    if x.len() == 1 {
        PExpr::of(vec![PF::Pow(Sym::U, x[0].0)], 1)
    } else {
        PExpr::zero()
    }
}

pub fn fallback_g(x: &[In]) -> PExpr {
    if x.len() == 1 {
        PExpr::of(vec![PF::Pow(Sym::V, x[0].0)], 1)
    } else {
        PExpr::zero()
    }
}

/// `h(x^k) = Σ_{k'+k''=k−1} f(x)^{k'} b g(x)^{k''}`, and zero in arity ≥ 2.
pub fn fallback_h(x: &[In]) -> PExpr {
    let mut out = PExpr::zero();
    if x.len() == 1 {
        let k = x[0].0;
        for k1 in 0..k {
            out.push(vec![PF::Pow(Sym::U, k1), PF::B, PF::Pow(Sym::V, k - 1 - k1)], 1);
        }
    }
    out
}

// ---- the shc homotopy from Φ∘(f⊗f) to f∘μ

/// One summand of the shc homotopy with its exponent bookkeeping.
#[derive(Clone, Debug)]
pub struct Summand {
    pub group: u8,
    pub sign: i64,
    pub factors: Vec<PF>,
    /// Exponents taken from the k-side and the l-side of the input.
    pub k_used: u32,
    pub l_used: u32,
}

/// `E_{i_1}(a^{k_1}; ·)⋯E_{i_r}(a^{k_r}; ·)` with the `l`s consumed in order;
/// returns the index of the next unused `l`.
fn e_prefix(x: &[In], is: &[usize], fs: &mut Vec<PF>, kl: &mut (u32, u32)) -> usize {
    let mut next = 0;
    for (s, &i) in is.iter().enumerate() {
        let args: Vec<u32> = x[next..next + i].iter().map(|p| p.1).collect();
        kl.0 += x[s].0;
        kl.1 += args.iter().sum::<u32>();
        fs.push(PF::E(x[s].0, args.into()));
        next += i;
    }
    next
}

/// Summands of `h_(n)`, `n ≥ 2`, group by group; `groups` selects which of
/// the three groups to include.
pub fn shc_summands(x: &[In], groups: [bool; 3]) -> Vec<Summand> {
    let n = x.len();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let (kn, ln) = x[n - 1];
    let l_pen = x[n - 2].1;
    if groups[0] {
        for is in prefix_sequences(n, n - 1, true) {
            for l1 in 0..l_pen {
                let l2 = l_pen - 1 - l1;
                let mut fs = Vec::new();
                let mut kl = (0, 0);
                let next = e_prefix(x, &is[..n - 1], &mut fs, &mut kl);
                let mut args: Vec<u32> = x[next..n - 2].iter().map(|p| p.1).collect();
                debug_assert_eq!(args.len(), is[n - 1] - 1);
                kl.1 += args.iter().sum::<u32>();
                args.push(l1);
                args.push(1);
                fs.push(PF::E(kn, args.into()));
                fs.push(PF::Pow(Sym::A, l2 + ln));
                kl.0 += kn;
                kl.1 += l1 + 1 + l2 + ln;
                out.push(Summand { group: 1, sign: 1, factors: fs, k_used: kl.0, l_used: kl.1 });
            }
        }
    }
    if groups[1] {
        for is in prefix_sequences(n - 1, n - 2, true) {
            for k1 in 0..kn {
                for l1 in 0..l_pen {
                    let (k2, l2) = (kn - 1 - k1, l_pen - 1 - l1);
                    let mut fs = Vec::new();
                    let mut kl = (0, 0);
                    e_prefix(x, &is, &mut fs, &mut kl);
                    fs.push(PF::Pow(Sym::A, k1 + l1));
                    fs.push(PF::B);
                    fs.push(PF::Pow(Sym::A, k2 + l2 + ln));
                    kl.0 += k1 + 1 + k2;
                    kl.1 += l1 + 1 + l2 + ln;
                    out.push(Summand { group: 2, sign: -1, factors: fs, k_used: kl.0, l_used: kl.1 });
                }
            }
        }
    }
    if groups[2] && n >= 3 {
        let l3 = x[n - 3].1;
        for is in prefix_sequences(n - 1, n - 2, true) {
            for k1 in 0..kn {
                for l1 in 0..l3 {
                    let (k2, l2) = (kn - 1 - k1, l3 - 1 - l1);
                    let mut fs = Vec::new();
                    let mut kl = (0, 0);
                    let next = e_prefix(x, &is[..n - 2], &mut fs, &mut kl);
                    let mut args: Vec<u32> = x[next..n - 3].iter().map(|p| p.1).collect();
                    debug_assert_eq!(args.len() + 1, is[n - 2]);
                    kl.1 += args.iter().sum::<u32>();
                    args.push(l1);
                    fs.push(PF::E(x[n - 2].0, args.into()));
                    fs.push(PF::Pow(Sym::A, k1));
                    fs.push(PF::B);
                    fs.push(PF::Pow(Sym::A, k2 + l2 + x[n - 2].1 + ln));
                    kl.0 += x[n - 2].0 + k1 + 1 + k2;
                    kl.1 += l1 + 1 + l2 + x[n - 2].1 + ln;
                    out.push(Summand { group: 3, sign: -1, factors: fs, k_used: kl.0, l_used: kl.1 });
                }
            }
        }
    }
    out
}

pub fn shc_h(x: &[In], groups: [bool; 3]) -> PExpr {
    let mut out = PExpr::zero();
    for s in shc_summands(x, groups) {
        out.push(s.factors, s.sign);
    }
    out
}

/// `Φ_(n)(a^{k•} ⊗ a^{l•})`, i.e. `(Φ∘(f⊗f))_(n)`.
pub fn shc_big_f(x: &[In]) -> PExpr {
    let n = x.len();
    let mut out = PExpr::zero();
    let s = if n % 2 == 1 { 1 } else { -1 };
    for js in prefix_sequences(n, n - 1, true) {
        let mut fs = Vec::new();
        e_prefix(x, &js, &mut fs, &mut (0, 0));
        fs.push(PF::Pow(Sym::A, x[n - 1].1));
        out.push(fs, s);
    }
    out
}

/// `(f∘μ)(x^k ⊗ x^l) = a^{k+l}`; strict.
pub fn shc_g(x: &[In]) -> PExpr {
    if x.len() == 1 {
        PExpr::of(vec![PF::Pow(Sym::A, x[0].0 + x[0].1)], 1)
    } else {
        PExpr::zero()
    }
}

/// Total a-weight of a word, with `b` counting 2.
pub fn a_weight(w: &[PF]) -> u32 {
    w.iter()
        .map(|f| match f {
            PF::Pow(_, k) => *k,
            PF::B => 2,
            PF::E(h, l) => h + l.iter().sum::<u32>(),
            PF::F(k) => k.iter().sum(),
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    /// Heads expanded at construction; verdict normal form.
    Expanded,
    /// Power heads kept through the differential, expanded per group.
    Atomic,
}

/// Outcome of one family of exponent tuples.
#[derive(Clone, Debug, Default)]
pub struct PolyOutcome {
    pub tuples: usize,
    pub lhs_terms: u64,
    pub residual_terms: usize,
    pub first_failure: Option<String>,
}

fn run_tuples(xs: Vec<Vec<In>>, one: impl Fn(&[In]) -> (PExpr, u64) + Sync) -> PolyOutcome {
    let results: Vec<(Vec<In>, PExpr, u64)> = xs
        .into_par_iter()
        .map(|x| {
            let (r, l) = one(&x);
            (x, r, l)
        })
        .collect();
    let mut o = PolyOutcome { tuples: results.len(), ..Default::default() };
    for (x, r, l) in results {
        o.lhs_terms += l;
        o.residual_terms += r.len();
        if !r.is_zero() && o.first_failure.is_none() {
            o.first_failure = Some(format!("{x:?}: {}", r.dump().replace('\n', "  ")));
        }
    }
    o
}

/// Homotopy property of the strict-case homotopy at arity `n`.
pub fn check_strict(n: usize, exp_max: u32) -> PolyOutcome {
    run_tuples(tuples(n, exp_max, false), |x| {
        homotopy_defect(&strict_h, &strict_f, &strict_g, x, DB::Cup, &|e| e)
    })
}

/// Homotopy property of the algebra-homotopy fallback at arity `n`.
pub fn check_fallback(n: usize, exp_max: u32) -> PolyOutcome {
    run_tuples(tuples(n, exp_max, false), |x| {
        homotopy_defect(&fallback_h, &fallback_f, &fallback_g, x, DB::Diff, &|e| e)
    })
}

pub fn shc_defect(x: &[In], groups: [bool; 3], p: Pipeline) -> (PExpr, u64) {
    match p {
        Pipeline::Expanded => {
            let h = |y: &[In]| expand(&shc_h(y, groups));
            let f = |y: &[In]| expand(&shc_big_f(y));
            homotopy_defect(&h, &f, &shc_g, x, DB::Cup, &|e| expand(&e))
        }
        Pipeline::Atomic => {
            let h = |y: &[In]| shc_h(y, groups);
            homotopy_defect(&h, &shc_big_f, &shc_g, x, DB::Cup, &|e| expand(&e))
        }
    }
}

/// Homotopy property of the shc homotopy at arity `n`.
pub fn check_shc(n: usize, exp_max: u32, groups: [bool; 3], p: Pipeline) -> PolyOutcome {
    run_tuples(tuples(n, exp_max, true), |x| shc_defect(x, groups, p))
}

/// Compares the two pipelines tuple by tuple; returns the first tuple on
/// which the residuals differ.
pub fn pipelines_agree(n: usize, exp_max: u32) -> Result<usize, Vec<In>> {
    let xs = tuples(n, exp_max, true);
    let count = xs.len();
    let bad = xs.into_par_iter().find_first(|x| {
        let (r1, _) = shc_defect(x, [true; 3], Pipeline::Expanded);
        let (r2, _) = shc_defect(x, [true; 3], Pipeline::Atomic);
        r1 != r2
    });
    match bad {
        Some(x) => Err(x),
        None => Ok(count),
    }
}

/// Checks exponent conservation for every summand of `h_(n)`, `n ≤ n_max`.
pub fn conservation_violations(n_max: usize, exp_max: u32) -> Vec<(Vec<In>, String)> {
    let mut bad = Vec::new();
    for n in 2..=n_max {
        for x in tuples(n, exp_max, true) {
            let ks: u32 = x.iter().map(|p| p.0).sum();
            let ls: u32 = x.iter().map(|p| p.1).sum();
            for s in shc_summands(&x, [true; 3]) {
                let w = word(s.factors.clone());
                let total_ok = w.as_ref().is_none_or(|w| a_weight(w) == ks + ls);
                if s.k_used != ks || s.l_used != ls || !total_ok {
                    bad.push((x.clone(), format!("{:?}", s.factors)));
                }
            }
        }
    }
    bad
}
