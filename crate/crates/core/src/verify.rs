//! Runs the identity checks and reports on them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::bar::{bar_d, bar_homotopy, bar_map, desuspend, shuffle_at, twisting, BarExpr};
use crate::diff::{differential, Mode};
use crate::error::HgaError;
use crate::family::{
    compose, gen_tuples, homotopy_defect_into, tensor_with_identity, transpose_inputs,
    twisting_defect_into, Defect, Fam, Family, Mutated, Side, TupExpr, PINNED,
};
use crate::gens::{GenId, Letter};
use crate::ks::Template;
use crate::lin::{from_tup, Expr, Term, Tup};
use crate::maps::bar_cochains::{bar_product_cochain, cup_one_bar, gens};
use crate::maps::cup::{cup1_word, cup2_word, cuptwo_residual};
use crate::maps::hc::{hc, Orientation};
use crate::maps::phi::{phi, phi_templates};
use crate::maps::{ha, hc as hcmod, sign_lemma};
use crate::normal::{e_op, f_op};
use crate::pre::Pre;
use crate::sign::{Affine, SignPoly};
use crate::text::{dump, term_text};
use crate::word::WordId;
use crate::poly;

pub const SCHEMA: u32 = 1;
pub const DEFAULT_CEILING: u64 = 50_000_000;
/// Pairs kept in a pairing trace before it is truncated.
pub const TRACE_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    PhiTwisting,
    HaHomotopy,
    HcHomotopyFwd,
    HcHomotopyRev,
    BarProduct,
    BarProductIterated,
    HaShuffleVanish,
    Cup1Bar,
    Cup2Derived,
    PolyStrict,
    PolyShc,
    SignLemma,
    DdZero,
    EngineCrosscheck,
}

impl CheckName {
    pub const ALL: [CheckName; 14] = [
        CheckName::PhiTwisting,
        CheckName::HaHomotopy,
        CheckName::HcHomotopyFwd,
        CheckName::HcHomotopyRev,
        CheckName::BarProduct,
        CheckName::BarProductIterated,
        CheckName::HaShuffleVanish,
        CheckName::Cup1Bar,
        CheckName::Cup2Derived,
        CheckName::PolyStrict,
        CheckName::PolyShc,
        CheckName::SignLemma,
        CheckName::DdZero,
        CheckName::EngineCrosscheck,
    ];

    /// Checks whose families accept an injected sign flip.
    pub const CORE: [CheckName; 5] = [
        CheckName::PhiTwisting,
        CheckName::HaHomotopy,
        CheckName::HcHomotopyFwd,
        CheckName::HcHomotopyRev,
        CheckName::BarProduct,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::PhiTwisting => "phi-twisting",
            CheckName::HaHomotopy => "ha-homotopy",
            CheckName::HcHomotopyFwd => "hc-homotopy-fwd",
            CheckName::HcHomotopyRev => "hc-homotopy-rev",
            CheckName::BarProduct => "bar-product",
            CheckName::BarProductIterated => "bar-product-iterated",
            CheckName::HaShuffleVanish => "ha-shuffle-vanish",
            CheckName::Cup1Bar => "cup1-bar",
            CheckName::Cup2Derived => "cup2-derived",
            CheckName::PolyStrict => "poly-strict",
            CheckName::PolyShc => "poly-shc",
            CheckName::SignLemma => "sign-lemma",
            CheckName::DdZero => "dd-zero",
            CheckName::EngineCrosscheck => "engine-crosscheck",
        }
    }

    /// Bound used when none is given: arity, total bar length, or depth.
    pub fn default_bound(self) -> usize {
        match self {
            CheckName::PhiTwisting => 6,
            CheckName::HaHomotopy | CheckName::HcHomotopyFwd | CheckName::HcHomotopyRev => 4,
            CheckName::BarProduct => 6,
            CheckName::BarProductIterated => 3,
            CheckName::HaShuffleVanish | CheckName::Cup1Bar => 4,
            CheckName::Cup2Derived => 1,
            CheckName::PolyStrict | CheckName::PolyShc => 3,
            CheckName::SignLemma => 5,
            CheckName::DdZero | CheckName::EngineCrosscheck => 3,
        }
    }

    pub fn default_exp_max(self) -> u32 {
        match self {
            CheckName::PolyShc => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = HgaError;
    fn from_str(s: &str) -> Result<CheckName, HgaError> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| HgaError::UnknownCheck(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckSpec {
    pub name: CheckName,
    pub n_max: usize,
    pub exp_max: u32,
    pub trace: bool,
    pub ceiling: u64,
}

impl CheckSpec {
    pub fn new(name: CheckName) -> CheckSpec {
        CheckSpec {
            name,
            n_max: name.default_bound(),
            exp_max: name.default_exp_max(),
            trace: false,
            ceiling: DEFAULT_CEILING,
        }
    }

    pub fn n_max(mut self, n: usize) -> CheckSpec {
        self.n_max = n;
        self
    }

    pub fn validate(&self) -> Result<(), HgaError> {
        if self.n_max == 0 {
            return Err(HgaError::InvalidBound("bounds must be positive".into()));
        }
        if self.name == CheckName::EngineCrosscheck && self.n_max > 3 {
            return Err(HgaError::InvalidBound("engine-crosscheck supports n ≤ 3".into()));
        }
        if self.ceiling == 0 {
            return Err(HgaError::InvalidBound("term ceiling must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TracePair {
    pub term: String,
    pub plus: String,
    pub minus: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub schema: u32,
    pub check: String,
    pub n: usize,
    pub lhs_terms: u64,
    pub residual_terms: u64,
    pub ms: u64,
    pub complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub stats: BTreeMap<String, i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TracePair>>,
}

impl IdentityReport {
    pub fn new(check: CheckName, n: usize) -> IdentityReport {
        IdentityReport {
            schema: SCHEMA,
            check: check.as_str().to_string(),
            n,
            lhs_terms: 0,
            residual_terms: 0,
            ms: 0,
            complete: true,
            detail: None,
            stats: BTreeMap::new(),
            trace: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.complete && self.residual_terms == 0
    }

    fn stat(&mut self, k: &str, v: impl TryInto<i64>) {
        self.stats.insert(k.to_string(), v.try_into().unwrap_or(i64::MAX));
    }

    fn fail(&mut self, what: impl FnOnce() -> String) {
        if self.detail.is_none() {
            self.detail = Some(what());
        }
    }

    /// The report with timing zeroed, for comparisons across runs.
    pub fn untimed(&self) -> IdentityReport {
        IdentityReport { ms: 0, ..self.clone() }
    }
}

/// Greedy matching of opposite unit contributions sharing a key.
pub fn pairing_trace(groups: &[(String, TupExpr, i64)]) -> (Vec<TracePair>, u64) {
    let mut by_key: FxHashMap<Term<Tup>, (Vec<&str>, Vec<&str>)> = FxHashMap::default();
    for (label, e, k) in groups {
        for t in e.iter() {
            let c = t.coeff * k;
            let slot = by_key.entry(Term { coeff: 1, ..t }).or_default();
            let side = if c > 0 { &mut slot.0 } else { &mut slot.1 };
            for _ in 0..c.unsigned_abs() {
                side.push(label);
            }
        }
    }
    let mut pairs = Vec::new();
    let mut unmatched = 0;
    for (t, (mut plus, mut minus)) in by_key {
        plus.sort();
        minus.sort();
        unmatched += plus.len().abs_diff(minus.len()) as u64;
        let text = term_text(&t);
        for (p, m) in plus.iter().zip(&minus) {
            pairs.push(TracePair { term: text.clone(), plus: p.to_string(), minus: m.to_string() });
        }
    }
    pairs.sort();
    (pairs, unmatched)
}

fn finish_defect(r: &mut IdentityReport, d: &Defect) {
    r.lhs_terms = d.lhs_terms;
    r.residual_terms = d.residual.weight();
    r.complete = !d.aborted;
    if d.aborted {
        r.fail(|| format!("term ceiling {} exceeded", d.ceiling));
    } else if !d.residual.is_zero() {
        let text = dump(&d.residual);
        r.fail(|| text.lines().take(8).collect::<Vec<_>>().join("\n"));
    }
    if let Some(g) = &d.groups {
        let (mut pairs, unmatched) = pairing_trace(g);
        r.stat("trace_pairs", pairs.len());
        r.stat("trace_unmatched", unmatched);
        if pairs.len() > TRACE_LIMIT {
            pairs.truncate(TRACE_LIMIT);
            r.stat("trace_truncated", 1);
        }
        r.trace = Some(pairs);
    }
}

fn new_defect(spec: &CheckSpec) -> Defect {
    let d = Defect::with_ceiling(spec.ceiling);
    if spec.trace {
        d.traced()
    } else {
        d
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed().as_millis() as u64)
}

/// The composites used by the associativity and commutativity checks.
pub struct Composites {
    pub phi: Fam,
    /// `Φ∘(Φ⊗1)`.
    pub right: Fam,
    /// `Φ∘(1⊗Φ)`.
    pub left: Fam,
    /// `Φ∘T`.
    pub swapped: Fam,
}

impl Composites {
    pub fn new() -> Result<Composites, HgaError> {
        let p = phi();
        Ok(Composites {
            right: compose(p.clone(), tensor_with_identity(p.clone(), Side::Right))?,
            left: compose(p.clone(), tensor_with_identity(p.clone(), Side::Left))?,
            swapped: transpose_inputs(p.clone())?,
            phi: p,
        })
    }
}

/// `(h, f, g)` of one of the homotopy checks.
pub fn homotopy_triple(c: CheckName, k: &Composites) -> Option<(Fam, Fam, Fam)> {
    Some(match c {
        CheckName::HaHomotopy => (ha::ha(), k.right.clone(), k.left.clone()),
        CheckName::HcHomotopyFwd => (hc(Orientation::Forward), k.swapped.clone(), k.phi.clone()),
        CheckName::HcHomotopyRev => (hc(Orientation::Reverse), k.phi.clone(), k.swapped.clone()),
        _ => return None,
    })
}

fn summand_count(c: CheckName, n: usize) -> usize {
    match c {
        CheckName::PhiTwisting => phi_templates(n).len(),
        CheckName::HaHomotopy => ha::count(n),
        _ => hcmod::terms(n).len(),
    }
}

fn check_phi(spec: &CheckSpec, f: &dyn Family) -> Result<Vec<IdentityReport>, HgaError> {
    let mut out = Vec::new();
    for n in 1..=spec.n_max {
        let mut r = IdentityReport::new(spec.name, n);
        let mut d = new_defect(spec);
        let (res, ms) = timed(|| twisting_defect_into(&mut d, f, &gen_tuples(n, 2), PINNED));
        res?;
        r.ms = ms;
        r.stat("summands", summand_count(spec.name, n));
        finish_defect(&mut r, &d);
        let stop = !r.complete;
        out.push(r);
        if stop {
            break;
        }
    }
    Ok(out)
}

fn check_homotopy(
    spec: &CheckSpec,
    h: &dyn Family,
    f: &dyn Family,
    g: &dyn Family,
) -> Result<Vec<IdentityReport>, HgaError> {
    let mut out = Vec::new();
    for n in 1..=spec.n_max {
        let mut r = IdentityReport::new(spec.name, n);
        let mut d = new_defect(spec);
        let (res, ms) = timed(|| homotopy_defect_into(&mut d, h, f, g, &gen_tuples(n, h.in_slots()), PINNED));
        res?;
        r.ms = ms;
        r.stat("summands", summand_count(spec.name, n));
        finish_defect(&mut r, &d);
        let stop = !r.complete;
        out.push(r);
        if stop {
            break;
        }
    }
    Ok(out)
}

fn tups(l: Letter, n: usize) -> Vec<Tup> {
    gens(l, n).into_iter().map(Tup::single).collect()
}

/// `c = (s⁻¹)^{⊗(k+l)}(a_1⊗…⊗a_k⊗b_1⊗…⊗b_l)` and its shuffle.
pub fn shuffled_pair(k: usize, l: usize) -> BarExpr {
    shuffle_at(&desuspend(vec![tups(Letter::A, k), tups(Letter::B, l)]), 0, 1, 1)
}

/// `c` for three words and its image under the iterated shuffle `∇∘(∇⊗1)`.
pub fn triple(k: usize, l: usize, m: usize) -> BarExpr {
    desuspend(vec![tups(Letter::A, k), tups(Letter::B, l), tups(Letter::C, m)])
}

pub fn shuffle3(c: &BarExpr) -> BarExpr {
    shuffle_at(&shuffle_at(c, 0, 1, 1), 0, 2, 1)
}

fn compositions2(s: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=s).map(move |k| (k, s - k))
}

fn compositions3(s: usize) -> Vec<(usize, usize, usize)> {
    let mut v = Vec::new();
    for k in 0..=s {
        for l in 0..=s - k {
            v.push((k, l, s - k - l));
        }
    }
    v
}

/// Twisting cochain of `BΦ∘∇` against the closed form, all `k + l = s`.
fn bar_product_at(phi: &dyn Family, s: usize, r: &mut IdentityReport) {
    for (k, l) in compositions2(s) {
        let lhs = from_tup(&twisting(phi, &shuffled_pair(k, l)));
        let rhs = bar_product_cochain(k, l);
        r.lhs_terms += lhs.weight() + rhs.weight();
        let diff = &lhs - &rhs;
        if !diff.is_zero() {
            r.residual_terms += diff.weight();
            r.fail(|| format!("component ({k},{l}):\n{}", dump(&diff)));
        }
    }
}

fn check_bar_product(spec: &CheckSpec) -> Vec<IdentityReport> {
    let p = phi();
    (0..=spec.n_max)
        .into_par_iter()
        .map(|s| {
            let mut r = IdentityReport::new(spec.name, s);
            let ((), ms) = timed(|| bar_product_at(p.as_ref(), s, &mut r));
            r.ms = ms;
            r
        })
        .collect()
}

fn check_bar_iterated(spec: &CheckSpec, k: &Composites) -> Vec<IdentityReport> {
    let p = k.phi.as_ref();
    (0..=spec.n_max)
        .map(|s| {
            let mut r = IdentityReport::new(spec.name, s);
            let t = Instant::now();
            let mut assoc_failures = 0;
            let mut chain_failures = 0;
            for (a, b, c) in compositions3(s) {
                let x = triple(a, b, c);
                // μ(μ⊗1) and μ(1⊗μ) with μ = BΦ∘∇
                let mu_l = bar_map(p, &shuffle_at(&bar_map(p, &shuffle_at(&x, 0, 1, 1), 0), 0, 1, 1), 0);
                let mu_r = bar_map(p, &shuffle_at(&bar_map(p, &shuffle_at(&x, 1, 1, 1), 1), 0, 1, 1), 0);
                let via_l = bar_map(k.right.as_ref(), &shuffle3(&x), 0);
                let via_r = bar_map(k.left.as_ref(), &shuffle_at(&shuffle_at(&x, 1, 1, 1), 0, 1, 2), 0);
                r.lhs_terms += mu_l.weight() + mu_r.weight() + via_l.weight() + via_r.weight();
                for (name, d) in [("(Φ⊗1)", &mu_l - &via_l), ("(1⊗Φ)", &mu_r - &via_r)] {
                    if !d.is_zero() {
                        r.residual_terms += d.weight();
                        r.fail(|| format!("{name} at ({a},{b},{c}):\n{}", dump(&d)));
                    }
                }
                let d = &mu_l - &mu_r;
                if !d.is_zero() {
                    r.residual_terms += d.weight();
                    r.fail(|| format!("product not associative at ({a},{b},{c})"));
                }
                // ∇ commutes with the bar differential
                match (bar_d(&shuffle_at(&x, 0, 1, 1), Mode::Reduced), bar_d(&x, Mode::Reduced)) {
                    (Ok(l), Ok(dx)) => {
                        let d = &l - &shuffle_at(&dx, 0, 1, 1);
                        if !d.is_zero() {
                            chain_failures += 1;
                            r.residual_terms += d.weight();
                            r.fail(|| format!("∇ is not a chain map at ({a},{b},{c})"));
                        }
                    }
                    (Err(e), _) | (_, Err(e)) => {
                        r.complete = false;
                        r.fail(|| e.to_string());
                    }
                }
                let s1 = shuffle3(&x);
                let s2 = shuffle_at(&shuffle_at(&x, 1, 1, 1), 0, 1, 2);
                let d = &s1 - &s2;
                if !d.is_zero() {
                    assoc_failures += 1;
                    r.residual_terms += d.weight();
                    r.fail(|| format!("shuffle associativity at ({a},{b},{c})"));
                }
            }
            r.stat("shuffle_assoc_failures", assoc_failures);
            r.stat("chain_map_failures", chain_failures);
            r.ms = t.elapsed().as_millis() as u64;
            r
        })
        .collect()
}

fn check_shuffle_vanish(spec: &CheckSpec, k: &Composites) -> Vec<IdentityReport> {
    let h = ha::ha();
    (0..=spec.n_max)
        .map(|s| {
            let mut r = IdentityReport::new(spec.name, s);
            let t = Instant::now();
            let parts = compositions3(s);
            let results: Vec<_> = parts
                .par_iter()
                .map(|&(a, b, c)| {
                    let x = shuffle3(&triple(a, b, c));
                    let y = bar_homotopy(h.as_ref(), k.right.as_ref(), k.left.as_ref(), &x);
                    ((a, b, c), x.weight(), y)
                })
                .collect();
            for ((a, b, c), w, y) in results {
                r.lhs_terms += w;
                if !y.is_zero() {
                    r.residual_terms += y.weight();
                    r.fail(|| format!("({a},{b},{c}):\n{}", dump(&y)));
                }
            }
            r.ms = t.elapsed().as_millis() as u64;
            r
        })
        .collect()
}

/// Sign `σ` with `t_{h^c}(∇c) = σ F_kl` on the `(1,1)` component.
pub fn cup1_bar_sign() -> i64 {
    let h = hc(Orientation::Forward);
    let v = from_tup(&twisting(h.as_ref(), &shuffled_pair(1, 1)));
    if v == cup_one_bar(1, 1, -1) {
        -1
    } else {
        1
    }
}

fn check_cup1_bar(spec: &CheckSpec) -> Vec<IdentityReport> {
    let h = hc(Orientation::Forward);
    let sign = cup1_bar_sign();
    (0..=spec.n_max)
        .map(|s| {
            let mut r = IdentityReport::new(spec.name, s);
            let t = Instant::now();
            for (k, l) in compositions2(s) {
                let v = from_tup(&twisting(h.as_ref(), &shuffled_pair(k, l)));
                let want = cup_one_bar(k, l, sign);
                r.lhs_terms += v.weight();
                let d = &v - &want;
                if !d.is_zero() {
                    r.residual_terms += d.weight();
                    r.fail(|| format!("component ({k},{l}):\n{}", dump(&d)));
                }
            }
            r.stat("realized_sign", sign);
            r.ms = t.elapsed().as_millis() as u64;
            r
        })
        .collect()
}

fn twisted(e: &Expr, p: &SignPoly) -> Expr {
    Expr::from_terms(e.iter().map(|t| t.twist(p)))
}

fn check_cup2(spec: &CheckSpec) -> Result<Vec<IdentityReport>, HgaError> {
    let mut r = IdentityReport::new(spec.name, 2);
    let t = Instant::now();
    let a = WordId::gen(GenId::get(Letter::A, 1));
    let b = WordId::gen(GenId::get(Letter::B, 1));
    let mut ab = SignPoly::zero();
    ab.add_product(a.deg(), b.deg());

    let res = cuptwo_residual(a, b)?;
    r.residual_terms = res.weight();
    if !res.is_zero() {
        r.fail(|| dump(&res));
    }
    let cup1 = cup1_word(a, b);
    let cup2 = cup2_word(a, b);
    r.lhs_terms = cup1.weight() + cup2.weight();

    let minus_e1 = Expr::from_terms(e_op(a, &[b]).iter().map(|t| t.scaled(-1)));
    r.stat("cup1_is_minus_e1", (cup1 == minus_e1) as i64);
    let fba = Expr::from_terms([Term::new(f_op(&[b], &[a]).expect("generators"), -1)]);
    r.stat("cup2_is_minus_signed_f11_ba", (cup2 == twisted(&fba, &ab)) as i64);

    // the closed form −F₁₁(a;b) also satisfies d(∪₂) = a∪₁b + (−1)^{|a||b|} b∪₁a
    let fab = Expr::from_terms([Term::new(f_op(&[a], &[b]).expect("generators"), -1)]);
    let mut alt = differential(&fab, Mode::Reduced)?;
    alt.add_scaled(&cup1, -1);
    alt.add_scaled(&twisted(&cup1_word(b, a), &ab), -1);
    r.stat("minus_f11_ab_residual", alt.weight());

    let p = phi();
    let one = WordId::ONE;
    let foot = p.eval(2, &[Tup::new(&[a, one]), Tup::new(&[one, b])]);
    r.stat("phi2_a1_1b_zero", foot.is_zero() as i64);

    r.detail.get_or_insert_with(|| format!("cup1 = {}cup2 = {}", dump(&cup1), dump(&cup2)));
    r.ms = t.elapsed().as_millis() as u64;
    Ok(vec![r])
}

fn poly_report(spec: &CheckSpec, n: usize, o: &poly::PolyOutcome, r: &mut IdentityReport) {
    r.lhs_terms += o.lhs_terms;
    r.residual_terms += o.residual_terms as u64;
    if let Some(f) = &o.first_failure {
        r.fail(|| f.clone());
    }
    r.stat("tuples", o.tuples);
    let _ = (spec, n);
}

fn check_poly_strict(spec: &CheckSpec) -> Vec<IdentityReport> {
    (1..=spec.n_max)
        .map(|n| {
            let mut r = IdentityReport::new(spec.name, n);
            let t = Instant::now();
            poly_report(spec, n, &poly::check_strict(n, spec.exp_max), &mut r);
            let fb = poly::check_fallback(n, spec.exp_max);
            r.stat("fallback_residual", fb.residual_terms);
            r.residual_terms += fb.residual_terms as u64;
            if let Some(f) = fb.first_failure {
                r.fail(|| format!("fallback {f}"));
            }
            r.stat("exp_max", spec.exp_max);
            r.ms = t.elapsed().as_millis() as u64;
            r
        })
        .collect()
}

fn check_poly_shc(spec: &CheckSpec) -> Vec<IdentityReport> {
    (1..=spec.n_max)
        .map(|n| {
            let mut r = IdentityReport::new(spec.name, n);
            let t = Instant::now();
            let e = spec.exp_max;
            poly_report(spec, n, &poly::check_shc(n, e, [true; 3], poly::Pipeline::Expanded), &mut r);
            let at = poly::check_shc(n, e, [true; 3], poly::Pipeline::Atomic);
            r.stat("atomic_residual", at.residual_terms);
            r.residual_terms += at.residual_terms as u64;
            match poly::pipelines_agree(n, e) {
                Ok(k) => r.stat("pipelines_agree_tuples", k),
                Err(x) => {
                    r.residual_terms += 1;
                    r.fail(|| format!("pipelines disagree on {x:?}"));
                }
            }
            let bad = poly::conservation_violations(n, e).len();
            r.stat("conservation_violations", bad);
            r.residual_terms += bad as u64;
            if n >= 3 {
                let m = poly::check_shc(n, e, [true, true, false], poly::Pipeline::Expanded);
                r.stat("drop_group3_residual", m.residual_terms);
            }
            r.stat("exp_max", e);
            r.ms = t.elapsed().as_millis() as u64;
            r
        })
        .collect()
}

fn check_sign_lemma(spec: &CheckSpec) -> Vec<IdentityReport> {
    (1..=spec.n_max)
        .map(|n| {
            let mut r = IdentityReport::new(spec.name, n);
            let (l, ms) = timed(|| sign_lemma::check(n));
            r.ms = ms;
            r.lhs_terms = l.candidates as u64;
            r.residual_terms = (l.unpaired_inner + (l.paired - l.agree_p_minus_m)) as u64;
            r.stat("candidates", l.candidates);
            r.stat("paired", l.paired);
            r.stat("unpaired", l.unpaired);
            r.stat("unpaired_inner", l.unpaired_inner);
            r.stat("agree_p_minus_1", l.agree_p_minus_1);
            r.stat("agree_p_minus_m", l.agree_p_minus_m);
            r.stat("distinguishing", l.distinguishing);
            if !l.ok() {
                r.fail(|| format!("{l:?}"));
            }
            r
        })
        .collect()
}

/// A random pre-normal expression of the given depth over a fixed small
/// set of generators.
pub fn random_pre(r: &mut ChaCha8Rng, depth: usize, allow_f: bool) -> Pre {
    fn gen(r: &mut ChaCha8Rng) -> Pre {
        let l = [Letter::A, Letter::B, Letter::C][r.gen_range(0..3)];
        Pre::Gen(GenId::get(l, r.gen_range(1..=3)))
    }
    if depth == 0 {
        return gen(r);
    }
    let sub = |r: &mut ChaCha8Rng, f: bool| {
        let d = r.gen_range(0..depth);
        random_pre(r, d, f)
    };
    match r.gen_range(0..if allow_f { 4 } else { 3 }) {
        0 => gen(r),
        1 => Pre::Mul((0..r.gen_range(2..=3)).map(|_| sub(r, allow_f)).collect()),
        2 => {
            let h = sub(r, false);
            Pre::E(Box::new(h), (0..r.gen_range(1..=2)).map(|_| sub(r, allow_f)).collect())
        }
        _ => {
            let a = (0..r.gen_range(1..=2)).map(|_| sub(r, false)).collect();
            let b = (0..r.gen_range(1..=2)).map(|_| sub(r, false)).collect();
            Pre::F(a, b)
        }
    }
}

/// Expressions per depth level in `dd-zero`.
pub const DD_SAMPLES: usize = 400;

fn check_dd_zero(spec: &CheckSpec) -> Result<Vec<IdentityReport>, HgaError> {
    let mut out = Vec::new();
    for depth in 1..=spec.n_max {
        let mut r = IdentityReport::new(spec.name, depth);
        let t = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(0xdd00 + depth as u64);
        let exprs: Vec<Pre> = (0..DD_SAMPLES).map(|_| random_pre(&mut rng, depth, true)).collect();
        let results: Vec<Result<(u64, u64, u64, Option<String>), HgaError>> = exprs
            .par_iter()
            .map(|p| {
                let x = p.normalize()?;
                let dx = differential(&x, Mode::Reduced)?;
                let ddx = differential(&dx, Mode::Reduced)?;
                let mut bad_deg = 0;
                for s in x.iter() {
                    let ds = differential(&Expr::from_key(s.key), Mode::Reduced)?;
                    bad_deg += ds.iter().filter(|u| u.key.deg() != s.key.deg() + Affine::ONE).count() as u64;
                }
                let msg = (!ddx.is_zero()).then(|| format!("{p:?}"));
                Ok((dx.weight(), ddx.weight(), bad_deg, msg))
            })
            .collect();
        let mut nonzero = 0;
        for res in results {
            let (w, dd, deg, msg) = res?;
            r.lhs_terms += w;
            r.residual_terms += dd + deg;
            nonzero += (dd > 0) as i64;
            if let Some(m) = msg {
                r.fail(|| m);
            }
            if deg > 0 {
                r.fail(|| "differential does not raise degree by one".into());
            }
        }
        r.stat("samples", DD_SAMPLES);
        r.stat("nonzero_dd", nonzero);
        r.ms = t.elapsed().as_millis() as u64;
        out.push(r);
    }
    Ok(out)
}

/// Template families at arity `n`, with their names.
pub fn template_families(n: usize) -> Vec<(&'static str, Vec<Template>)> {
    vec![
        ("Phi", phi_templates(n)),
        ("h^a", ha::ha_templates(n)),
        ("h^c", hcmod::hc_templates(n, Orientation::Forward)),
        ("h^c∘T", hcmod::hc_templates(n, Orientation::Reverse)),
    ]
}

/// Polynomial sign against bubble-sort sign for every template and every
/// parity assignment of its variables.
pub fn crosscheck_templates(ts: &[Template]) -> (u64, Vec<String>) {
    let mut evals = 0;
    let mut bad = Vec::new();
    for t in ts {
        let v = t.nvars();
        let degs: Vec<Affine> = (0..v).map(|i| Affine::var(i as u8)).collect();
        let p = t.sign(&degs);
        for s in 0..(1u64 << v) {
            evals += 1;
            if p.eval(s) != t.sign_numeric(&|i| (s >> i) & 1 == 1) {
                bad.push(format!("{:?} at assignment {s:#b}", t.word));
            }
        }
    }
    (evals, bad)
}

fn check_engine(spec: &CheckSpec) -> Vec<IdentityReport> {
    (1..=spec.n_max)
        .map(|n| {
            let mut r = IdentityReport::new(spec.name, n);
            let t = Instant::now();
            for (name, ts) in template_families(n) {
                let (evals, bad) = crosscheck_templates(&ts);
                r.lhs_terms += evals;
                r.residual_terms += bad.len() as u64;
                r.stat(&format!("templates_{name}"), ts.len());
                if let Some(b) = bad.first() {
                    r.fail(|| format!("{name}: {b}"));
                }
            }
            r.ms = t.elapsed().as_millis() as u64;
            r
        })
        .collect()
}

/// Runs one check for every bound up to its maximum.
pub fn run_check(spec: &CheckSpec) -> Result<Vec<IdentityReport>, HgaError> {
    spec.validate()?;
    let k = Composites::new()?;
    match spec.name {
        CheckName::PhiTwisting => check_phi(spec, k.phi.as_ref()),
        CheckName::HaHomotopy | CheckName::HcHomotopyFwd | CheckName::HcHomotopyRev => {
            let (h, f, g) = homotopy_triple(spec.name, &k).expect("homotopy check");
            check_homotopy(spec, h.as_ref(), f.as_ref(), g.as_ref())
        }
        CheckName::BarProduct => Ok(check_bar_product(spec)),
        CheckName::BarProductIterated => Ok(check_bar_iterated(spec, &k)),
        CheckName::HaShuffleVanish => Ok(check_shuffle_vanish(spec, &k)),
        CheckName::Cup1Bar => Ok(check_cup1_bar(spec)),
        CheckName::Cup2Derived => check_cup2(spec),
        CheckName::PolyStrict => Ok(check_poly_strict(spec)),
        CheckName::PolyShc => Ok(check_poly_shc(spec)),
        CheckName::SignLemma => Ok(check_sign_lemma(spec)),
        CheckName::DdZero => check_dd_zero(spec),
        CheckName::EngineCrosscheck => Ok(check_engine(spec)),
    }
}

/// Runs independent checks in parallel; reports keep the order of `specs`.
pub fn run_all(specs: &[CheckSpec]) -> Vec<Result<Vec<IdentityReport>, HgaError>> {
    specs.par_iter().map(run_check).collect()
}

/// The suite run by `all`: default bounds when `quick`, otherwise the
/// optional larger instances too.
pub fn suite(quick: bool) -> Vec<CheckSpec> {
    CheckName::ALL
        .into_iter()
        .map(|c| {
            let s = CheckSpec::new(c);
            match c {
                _ if quick => s,
                CheckName::HaHomotopy | CheckName::HcHomotopyFwd | CheckName::HcHomotopyRev => s.n_max(5),
                CheckName::PhiTwisting => s.n_max(7),
                _ => s,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MutationOutcome {
    pub check: CheckName,
    pub trials: usize,
    pub detected: usize,
    /// `(arity, index)` of every mutation that went unnoticed.
    pub missed: Vec<(usize, usize)>,
}

fn mutated(inner: &Fam, n: usize, index: usize) -> Fam {
    std::sync::Arc::new(Mutated { inner: inner.clone(), n, index })
}

/// Flips the sign of one randomly chosen summand of the check's family and
/// reports whether the check notices, `trials` times.
pub fn mutation_sensitivity(check: CheckName, trials: usize, seed: u64) -> Result<MutationOutcome, HgaError> {
    let k = Composites::new()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ check as u64);
    let mut out = MutationOutcome { check, trials, detected: 0, missed: Vec::new() };
    for _ in 0..trials {
        let idx: usize = rng.gen_range(0..1_000_000);
        let (n, hit) = match check {
            CheckName::PhiTwisting | CheckName::BarProduct => {
                let n = rng.gen_range(1..=3);
                let m = mutated(&k.phi, n, idx);
                let hit = if check == CheckName::PhiTwisting {
                    let mut hit = false;
                    for a in n..=n + 1 {
                        let mut d = Defect::default();
                        twisting_defect_into(&mut d, m.as_ref(), &gen_tuples(a, 2), PINNED)?;
                        hit |= !d.residual.is_zero();
                    }
                    hit
                } else {
                    let mut r = IdentityReport::new(check, 0);
                    for s in n..=n + 1 {
                        bar_product_at(m.as_ref(), s, &mut r);
                    }
                    r.residual_terms > 0
                };
                (n, hit)
            }
            CheckName::HaHomotopy | CheckName::HcHomotopyFwd | CheckName::HcHomotopyRev => {
                let (h, f, g) = homotopy_triple(check, &k).expect("homotopy check");
                let lo = if check == CheckName::HaHomotopy { 2 } else { 1 };
                let n = rng.gen_range(lo..=3);
                let m = mutated(&h, n, idx);
                let mut hit = false;
                for a in n..=n + 1 {
                    let mut d = Defect::default();
                    homotopy_defect_into(&mut d, m.as_ref(), f.as_ref(), g.as_ref(), &gen_tuples(a, h.in_slots()), PINNED)?;
                    hit |= !d.residual.is_zero();
                }
                (n, hit)
            }
            _ => return Err(HgaError::UnknownCheck(format!("{check} has no mutation hook"))),
        };
        if hit {
            out.detected += 1;
        } else {
            out.missed.push((n, idx));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyName {
    Phi,
    Ha,
    Hc,
}

impl FromStr for FamilyName {
    type Err = HgaError;
    fn from_str(s: &str) -> Result<FamilyName, HgaError> {
        match s {
            "phi" => Ok(FamilyName::Phi),
            "ha" => Ok(FamilyName::Ha),
            "hc" => Ok(FamilyName::Hc),
            _ => Err(HgaError::Parse(format!("unknown family `{s}`"))),
        }
    }
}

/// Summand counts for `n = 1..=n_max`.
pub fn counts(f: FamilyName, n_max: usize) -> Vec<usize> {
    (1..=n_max)
        .map(|n| match f {
            FamilyName::Phi => phi_templates(n).len(),
            FamilyName::Ha => ha::count(n),
            FamilyName::Hc => hcmod::terms(n).len(),
        })
        .collect()
}

/// Summands of the first sum of `h^c_(n)`, for `n = 1..=n_max`.
pub fn hc_first_sum_counts(n_max: usize) -> Vec<usize> {
    (1..=n_max)
        .map(|n| hcmod::terms(n).iter().filter(|t| matches!(t, hcmod::HcTerm::First { .. })).count())
        .collect()
}

/// Component `n` on the formal tuples, in the text format.
pub fn dump_family(f: FamilyName, n: usize, o: Orientation) -> String {
    let fam = match f {
        FamilyName::Phi => phi(),
        FamilyName::Ha => ha::ha(),
        FamilyName::Hc => hc(o),
    };
    let v = fam.eval(n, &gen_tuples(n, fam.in_slots()));
    dump(&from_tup(&v))
}
