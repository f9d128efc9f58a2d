//! The associativity homotopy h^a from Φ∘(Φ⊗1) to Φ∘(1⊗Φ).
//!
//! A summand is `U V` where `U` is an ab-product and `V` a bc-product.
//! Structures are generated left to right with running indices of the next
//! unused `b` and `c`, then filtered by the J-set conditions.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::family::{Fam, Kind, TemplateFamily};
use crate::ks::{e, prod, var, TWord, Template};

/// A c-product `c_from ⋯ c_to` (inclusive, 1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CProd {
    pub from: usize,
    pub to: usize,
}

/// `E_q(b_j; c-products)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BTerm {
    pub j: usize,
    pub args: Vec<CProd>,
}

/// `BTerm … BTerm c_j` where `j` is the index of the last b-term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BcProd {
    pub bs: Vec<BTerm>,
}

impl BcProd {
    pub fn last(&self) -> usize {
        self.bs.last().expect("nonempty bc-product").j
    }
    pub fn degree(&self) -> usize {
        self.bs.iter().map(|b| b.args.len()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AArg {
    C(CProd),
    B(BTerm),
    Bc(BcProd),
}

impl AArg {
    fn degree(&self) -> usize {
        match self {
            AArg::C(_) => 0,
            AArg::B(b) => b.args.len(),
            AArg::Bc(bc) => bc.degree(),
        }
    }
}

/// One summand of h^a_(n): a-terms `A_1 … A_n`, optional top-level b-terms
/// after each, and the trailing bc-product.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HaTerm {
    pub n: usize,
    pub a: Vec<Vec<AArg>>,
    pub top_b: Vec<Option<BTerm>>,
    pub v: BcProd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JSets {
    pub ja: Vec<usize>,
    pub jb: Vec<usize>,
    pub jc: Vec<usize>,
}

fn a_degree(args: &[AArg]) -> usize {
    args.len() + args.iter().map(AArg::degree).sum::<usize>()
}

impl HaTerm {
    pub fn j_sets(&self) -> JSets {
        let mut ja = Vec::new();
        let mut jb = Vec::new();
        let mut jc = Vec::new();
        for (i, args) in self.a.iter().enumerate() {
            for arg in args {
                match arg {
                    AArg::C(_) => {}
                    AArg::B(b) => ja.push(b.j),
                    AArg::Bc(bc) => jc.extend(bc.bs.iter().map(|b| b.j)),
                }
            }
            if let Some(b) = &self.top_b[i] {
                jb.push(b.j);
            }
        }
        jc.extend(self.v.bs.iter().map(|b| b.j));
        ja.sort_unstable();
        jb.sort_unstable();
        jc.sort_unstable();
        JSets { ja, jb, jc }
    }

    fn cprods(&self) -> Vec<&CProd> {
        let mut out = Vec::new();
        fn push_b<'a>(b: &'a BTerm, out: &mut Vec<&'a CProd>) {
            out.extend(b.args.iter());
        }
        for (i, args) in self.a.iter().enumerate() {
            for arg in args {
                match arg {
                    AArg::C(c) => out.push(c),
                    AArg::B(b) => push_b(b, &mut out),
                    AArg::Bc(bc) => bc.bs.iter().for_each(|b| push_b(b, &mut out)),
                }
            }
            if let Some(b) = &self.top_b[i] {
                push_b(b, &mut out);
            }
        }
        self.v.bs.iter().for_each(|b| push_b(b, &mut out));
        out
    }

    /// Checks the J-set conditions and, independently of the generator, the
    /// ordering and index conditions.
    pub fn validate(&self) -> Result<JSets, String> {
        let n = self.n;
        // written order of b and c indices
        let mut bs = Vec::new();
        let mut cs = Vec::new();
        let walk_b = |b: &BTerm, bs: &mut Vec<usize>, cs: &mut Vec<usize>| -> Result<(), String> {
            bs.push(b.j);
            for c in &b.args {
                if c.to >= b.j || c.from > c.to {
                    return Err(format!("c-product {}..{} inside b_{}", c.from, c.to, b.j));
                }
                cs.extend(c.from..=c.to);
            }
            Ok(())
        };
        for (i0, args) in self.a.iter().enumerate() {
            let i = i0 + 1;
            for arg in args {
                match arg {
                    AArg::C(c) => {
                        if c.to >= i {
                            return Err(format!("c_{} inside a_{i}", c.to));
                        }
                        cs.extend(c.from..=c.to);
                    }
                    AArg::B(b) => {
                        if b.j >= i {
                            return Err(format!("b_{} inside a_{i}", b.j));
                        }
                        walk_b(b, &mut bs, &mut cs)?;
                    }
                    AArg::Bc(bc) => {
                        for b in &bc.bs {
                            walk_b(b, &mut bs, &mut cs)?;
                        }
                        if bc.last() >= i {
                            return Err(format!("bc-product ending in c_{} inside a_{i}", bc.last()));
                        }
                        cs.push(bc.last());
                    }
                }
            }
            if let Some(b) = &self.top_b[i0] {
                if b.j != i {
                    return Err(format!("top-level b_{} after a_{i}", b.j));
                }
                walk_b(b, &mut bs, &mut cs)?;
            }
        }
        for b in &self.v.bs {
            walk_b(b, &mut bs, &mut cs)?;
        }
        cs.push(self.v.last());
        let all: Vec<usize> = (1..=n).collect();
        if bs != all || cs != all {
            return Err("variables not used once in ascending order".into());
        }
        if let Some(j) = self.c_before_b() {
            return Err(format!("c_{j} precedes b_{j}"));
        }
        let j = self.j_sets();
        let nu = *j.ja.last().ok_or("J_a is empty")?;
        let mut ab: Vec<usize> = j.ja.iter().chain(&j.jb).copied().collect();
        ab.sort_unstable();
        if ab != (1..=nu).collect::<Vec<_>>() {
            return Err("J_a ∪ J_b is not an initial segment".into());
        }
        if j.jc != (nu + 1..=n).collect::<Vec<_>>() {
            return Err("J_c is not {ν+1..n}".into());
        }
        let mut inner: Vec<usize> = self.cprods().iter().flat_map(|c| c.from..c.to).collect();
        inner.sort_unstable();
        let ja_rest: Vec<usize> = j.ja.iter().copied().filter(|&x| x != nu).collect();
        if inner != ja_rest {
            return Err("J_a∖{ν} does not match the non-final c-factors".into());
        }
        Ok(j)
    }

    /// First `j` such that `c_j` is written before `b_j`.
    fn c_before_b(&self) -> Option<usize> {
        let mut seen_b = 0usize;
        let mut bad = None;
        let mut see_c = |k: usize, seen_b: usize| {
            if k > seen_b && bad.is_none() {
                bad = Some(k);
            }
        };
        let walk_b = |b: &BTerm, seen_b: &mut usize, see_c: &mut dyn FnMut(usize, usize)| {
            *seen_b = b.j;
            for c in &b.args {
                (c.from..=c.to).for_each(|k| see_c(k, *seen_b));
            }
        };
        for (i0, args) in self.a.iter().enumerate() {
            for arg in args {
                match arg {
                    AArg::C(c) => (c.from..=c.to).for_each(|k| see_c(k, seen_b)),
                    AArg::B(b) => walk_b(b, &mut seen_b, &mut see_c),
                    AArg::Bc(bc) => {
                        bc.bs.iter().for_each(|b| walk_b(b, &mut seen_b, &mut see_c));
                        see_c(bc.last(), seen_b);
                    }
                }
            }
            if let Some(b) = &self.top_b[i0] {
                walk_b(b, &mut seen_b, &mut see_c);
            }
        }
        self.v.bs.iter().for_each(|b| walk_b(b, &mut seen_b, &mut see_c));
        bad
    }

    /// Sign exponent by the recursion on `min J_a`.
    pub fn sign(&self) -> bool {
        let j = self.j_sets();
        let nu = *j.ja.last().expect("J_a nonempty");
        let mu = j.ja[0];
        if mu == nu {
            return self.base_sign(nu);
        }
        let (next, inc) = self.remove_mu(mu);
        next.sign() ^ inc
    }

    fn base_sign(&self, nu: usize) -> bool {
        let mut eps = self.n;
        let mut preceding = 0usize;
        for (i0, args) in self.a.iter().enumerate() {
            let p = args.len();
            for (m0, arg) in args.iter().enumerate() {
                let m = m0 + 1;
                match arg {
                    AArg::B(b) if b.j == nu => eps += preceding + m + b.args.len() * (p - m),
                    AArg::Bc(bc) => eps += bc.degree() * (p - m + 1),
                    _ => {}
                }
            }
            preceding += a_degree(args);
            if let Some(b) = &self.top_b[i0] {
                preceding += b.args.len();
            }
        }
        eps % 2 == 1
    }

    /// The term `U'V'` with `μ` moved from `J_a` to `J_b`, and `ε − ε'`.
    pub fn remove_mu(&self, mu: usize) -> (HaTerm, bool) {
        // locate the b_μ-term
        let (i0, m0) = self
            .a
            .iter()
            .enumerate()
            .find_map(|(i0, args)| {
                args.iter().position(|x| matches!(x, AArg::B(b) if b.j == mu)).map(|m0| (i0, m0))
            })
            .expect("b_μ inside an a-term");
        let m = m0 + 1;
        let p_i = self.a[i0].len();
        let bmu = match &self.a[i0][m0] {
            AArg::B(b) => b.clone(),
            _ => unreachable!(),
        };
        let q = bmu.args.len();
        let mut eps_tilde = 0usize;
        for s in 0..i0 {
            eps_tilde += a_degree(&self.a[s]);
            if let Some(b) = &self.top_b[s] {
                eps_tilde += b.args.len();
            }
        }
        let mut next = self.clone();
        let mu0 = mu - 1;
        let mut merged: Vec<AArg> = Vec::new();
        for s in mu0..i0 {
            merged.extend(self.a[s].iter().cloned());
            next.a[s].clear();
        }
        merged.extend(self.a[i0][..m0].iter().cloned());
        next.a[mu0] = merged;
        next.top_b[mu0] = Some(bmu);
        next.a[i0] = self.a[i0][m..].to_vec();
        next.split_c(mu);
        let eps_hat = next.eps_hat(mu);
        let inc = (eps_tilde + m + q * (p_i - m) + eps_hat) % 2 == 1;
        (next, inc)
    }

    /// Splits the proper c-product starting with `c_μ` into `c_μ` and the rest.
    fn split_c(&mut self, mu: usize) {
        fn split(v: &mut Vec<CProd>, mu: usize) -> bool {
            if let Some(k) = v.iter().position(|c| c.from == mu && c.to > mu) {
                let to = v[k].to;
                v[k] = CProd { from: mu, to: mu };
                v.insert(k + 1, CProd { from: mu + 1, to });
                return true;
            }
            false
        }
        fn split_b(b: &mut BTerm, mu: usize) -> bool {
            split(&mut b.args, mu)
        }
        for (i0, args) in self.a.iter_mut().enumerate() {
            if let Some(k) = args.iter().position(|x| matches!(x, AArg::C(c) if c.from == mu && c.to > mu)) {
                let to = match &args[k] {
                    AArg::C(c) => c.to,
                    _ => unreachable!(),
                };
                args[k] = AArg::C(CProd { from: mu, to: mu });
                args.insert(k + 1, AArg::C(CProd { from: mu + 1, to }));
                return;
            }
            for arg in args.iter_mut() {
                let done = match arg {
                    AArg::C(_) => false,
                    AArg::B(b) => split_b(b, mu),
                    AArg::Bc(bc) => bc.bs.iter_mut().any(|b| split_b(b, mu)),
                };
                if done {
                    return;
                }
            }
            if let Some(b) = self.top_b[i0].as_mut() {
                if split_b(b, mu) {
                    return;
                }
            }
        }
        if self.v.bs.iter_mut().any(|b| split_b(b, mu)) {
            return;
        }
        panic!("no proper c-product starting with c_{mu}");
    }

    /// Op degree preceding the E-term that has `c_μ` as an argument, plus the
    /// 1-based position of that argument.
    fn eps_hat(&self, mu: usize) -> usize {
        let mut pre = 0usize;
        let find_in_b = |b: &BTerm, pre: usize| -> Option<usize> {
            b.args.iter().position(|c| c.from == mu && c.to == mu).map(|t| pre + t + 1)
        };
        for (i0, args) in self.a.iter().enumerate() {
            // the a-term's own op symbol precedes its arguments
            let mut inner = pre + args.len();
            for (t, arg) in args.iter().enumerate() {
                match arg {
                    AArg::C(c) => {
                        if c.from == mu && c.to == mu {
                            return pre + t + 1;
                        }
                    }
                    AArg::B(b) => {
                        if let Some(r) = find_in_b(b, inner) {
                            return r;
                        }
                        inner += b.args.len();
                    }
                    AArg::Bc(bc) => {
                        for b in &bc.bs {
                            if let Some(r) = find_in_b(b, inner) {
                                return r;
                            }
                            inner += b.args.len();
                        }
                    }
                }
            }
            pre = inner;
            if let Some(b) = &self.top_b[i0] {
                if let Some(r) = find_in_b(b, pre) {
                    return r;
                }
                pre += b.args.len();
            }
        }
        for b in &self.v.bs {
            if let Some(r) = find_in_b(b, pre) {
                return r;
            }
            pre += b.args.len();
        }
        panic!("c_{mu} is not a single-factor argument");
    }

    pub fn to_tword(&self) -> TWord {
        let a = |i: usize| var(3 * (i - 1));
        let b = |j: usize| var(3 * (j - 1) + 1);
        let c = |k: usize| var(3 * (k - 1) + 2);
        let cp = |x: &CProd| prod((x.from..=x.to).map(c));
        let bt = |x: &BTerm| e(b(x.j), x.args.iter().map(cp).collect());
        let bc = |x: &BcProd| prod(x.bs.iter().map(bt).chain([c(x.last())]));
        let mut parts = Vec::new();
        for (i0, args) in self.a.iter().enumerate() {
            let xs: Vec<TWord> = args
                .iter()
                .map(|arg| match arg {
                    AArg::C(x) => cp(x),
                    AArg::B(x) => bt(x),
                    AArg::Bc(x) => bc(x),
                })
                .collect();
            parts.push(e(a(i0 + 1), xs));
            if let Some(x) = &self.top_b[i0] {
                parts.push(bt(x));
            }
        }
        parts.push(bc(&self.v));
        prod(parts)
    }

    pub fn template(&self) -> Template {
        Template::new(self.to_tword(), self.sign())
    }
}

fn fmt_c(x: &CProd) -> String {
    (x.from..=x.to).map(|k| format!("c{k}")).collect::<Vec<_>>().join(" ")
}

fn fmt_b(x: &BTerm) -> String {
    if x.args.is_empty() {
        return format!("b{}", x.j);
    }
    format!("E{}(b{}; {})", x.args.len(), x.j, x.args.iter().map(fmt_c).collect::<Vec<_>>().join(", "))
}

fn fmt_bc(x: &BcProd) -> String {
    let mut v: Vec<String> = x.bs.iter().map(fmt_b).collect();
    v.push(format!("c{}", x.last()));
    v.join(" ")
}

impl fmt::Display for HaTerm {
    /// Compact human-readable form, e.g. `a1 E2(a2; b1, c1) b2 c2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i0, args) in self.a.iter().enumerate() {
            if args.is_empty() {
                parts.push(format!("a{}", i0 + 1));
            } else {
                let xs: Vec<String> = args
                    .iter()
                    .map(|arg| match arg {
                        AArg::C(x) => fmt_c(x),
                        AArg::B(x) => fmt_b(x),
                        AArg::Bc(x) => fmt_bc(x),
                    })
                    .collect();
                parts.push(format!("E{}(a{}; {})", args.len(), i0 + 1, xs.join(", ")));
            }
            if let Some(x) = &self.top_b[i0] {
                parts.push(fmt_b(x));
            }
        }
        parts.push(fmt_bc(&self.v));
        write!(f, "{}", parts.join(" "))
    }
}

/// Generation state: next unused b and c index.
#[derive(Clone, Copy)]
struct St {
    nb: usize,
    nc: usize,
}

/// All sequences of c-products using `c_nc, …` with indices below `limit`.
fn c_args(nc: usize, limit: usize, f: &mut dyn FnMut(Vec<CProd>, usize)) {
    fn rec(nc: usize, limit: usize, cur: &mut Vec<CProd>, f: &mut dyn FnMut(Vec<CProd>, usize)) {
        f(cur.clone(), nc);
        for to in nc..limit {
            cur.push(CProd { from: nc, to });
            rec(to + 1, limit, cur, f);
            cur.pop();
        }
    }
    rec(nc, limit, &mut Vec::new(), f);
}

/// All b-terms `E(b_nb; …)`.
fn b_terms(st: St, f: &mut dyn FnMut(BTerm, St)) {
    let j = st.nb;
    c_args(st.nc, j, &mut |args, nc| f(BTerm { j, args }, St { nb: j + 1, nc }));
}

/// All bc-products starting at `b_nb` whose final `c` is below `limit`.
fn bc_prods(st: St, limit: usize, f: &mut dyn FnMut(BcProd, St)) {
    fn rec(st: St, limit: usize, cur: &mut Vec<BTerm>, f: &mut dyn FnMut(BcProd, St)) {
        if st.nb >= limit {
            return;
        }
        b_terms(st, &mut |b, s2| {
            cur.push(b);
            let j = s2.nb - 1;
            if s2.nc == j {
                f(BcProd { bs: cur.clone() }, St { nb: s2.nb, nc: j + 1 });
            }
            rec(s2, limit, cur, f);
            cur.pop();
        });
    }
    rec(st, limit, &mut Vec::new(), f);
}

/// All argument lists of the a_i-term.
fn a_args(st: St, i: usize, f: &mut dyn FnMut(Vec<AArg>, St)) {
    fn rec(st: St, i: usize, cur: &mut Vec<AArg>, f: &mut dyn FnMut(Vec<AArg>, St)) {
        f(cur.clone(), st);
        for to in st.nc..i {
            cur.push(AArg::C(CProd { from: st.nc, to }));
            rec(St { nb: st.nb, nc: to + 1 }, i, cur, f);
            cur.pop();
        }
        if st.nb < i {
            b_terms(st, &mut |b, s2| {
                cur.push(AArg::B(b));
                rec(s2, i, cur, f);
                cur.pop();
            });
            bc_prods(st, i, &mut |bc, s2| {
                cur.push(AArg::Bc(bc));
                rec(s2, i, cur, f);
                cur.pop();
            });
        }
    }
    rec(st, i, &mut Vec::new(), f);
}

struct Gen<'a> {
    n: usize,
    a: Vec<Vec<AArg>>,
    top_b: Vec<Option<BTerm>>,
    out: &'a mut dyn FnMut(HaTerm),
}

impl Gen<'_> {
    fn go(&mut self, i: usize, st: St) {
        let n = self.n;
        if i > n {
            // trailing bc-product must use everything and end in c_n
            let mut found = Vec::new();
            bc_prods(st, n + 1, &mut |bc, s2| {
                if s2.nb == n + 1 && s2.nc == n + 1 {
                    found.push(bc);
                }
            });
            for v in found {
                let t = HaTerm { n, a: self.a.clone(), top_b: self.top_b.clone(), v };
                if t.validate().is_ok() {
                    (self.out)(t);
                }
            }
            return;
        }
        let mut choices = Vec::new();
        a_args(st, i, &mut |args, s2| choices.push((args, s2)));
        for (args, s2) in choices {
            self.a.push(args);
            self.top_b.push(None);
            self.go(i + 1, s2);
            if s2.nb == i && i < n {
                let mut tops = Vec::new();
                b_terms(s2, &mut |b, s3| tops.push((b, s3)));
                for (b, s3) in tops {
                    *self.top_b.last_mut().unwrap() = Some(b);
                    self.go(i + 1, s3);
                }
                *self.top_b.last_mut().unwrap() = None;
            }
            self.a.pop();
            self.top_b.pop();
        }
    }
}

/// Enumerates the summands of `h^a_(n)` in generation order.
pub fn for_each_term(n: usize, f: &mut dyn FnMut(HaTerm)) {
    if n < 2 {
        return;
    }
    let mut g = Gen { n, a: Vec::new(), top_b: Vec::new(), out: f };
    g.go(1, St { nb: 1, nc: 1 });
}

pub fn terms(n: usize) -> Vec<HaTerm> {
    let mut v = Vec::new();
    for_each_term(n, &mut |t| v.push(t));
    v
}

/// Number of summands; parallel over the choices for the first a-terms.
pub fn count(n: usize) -> usize {
    if n < 2 {
        return 0;
    }
    // split the search on the argument lists of a_1 .. a_3
    let mut prefixes: Vec<(Vec<Vec<AArg>>, Vec<Option<BTerm>>, St)> = vec![(Vec::new(), Vec::new(), St { nb: 1, nc: 1 })];
    for i in 1..=n.min(3) {
        let mut next = Vec::new();
        for (a, tb, st) in prefixes {
            a_args(st, i, &mut |args, s2| {
                let mut a2 = a.clone();
                a2.push(args.clone());
                let mut t2 = tb.clone();
                t2.push(None);
                next.push((a2.clone(), t2.clone(), s2));
                if s2.nb == i && i < n {
                    b_terms(s2, &mut |b, s3| {
                        let mut t3 = t2.clone();
                        *t3.last_mut().unwrap() = Some(b);
                        next.push((a2.clone(), t3, s3));
                    });
                }
            });
        }
        prefixes = next;
    }
    let start = n.min(3) + 1;
    prefixes
        .into_par_iter()
        .map(|(a, top_b, st)| {
            let mut c = 0usize;
            let mut out = |_t: HaTerm| c += 1;
            let mut g = Gen { n, a, top_b, out: &mut out };
            g.go(start, st);
            c
        })
        .sum()
}

pub fn ha_templates(n: usize) -> Vec<Template> {
    terms(n).par_iter().map(HaTerm::template).collect()
}

pub fn ha() -> Fam {
    Arc::new(TemplateFamily::new("h^a", 3, Kind::Homotopy, ha_templates))
}
