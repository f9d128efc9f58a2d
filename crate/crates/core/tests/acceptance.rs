//! One line per acceptance criterion.  Set `HGA_ACCEPT_FULL=1` to include
//! the optional h^a_(7) count.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hga_core::maps::hc::{hc, Orientation};
use hga_core::maps::{ha, phi::phi};
use hga_core::verify::{
    counts, hc_first_sum_counts, mutation_sensitivity, run_check, CheckName, CheckSpec, FamilyName,
    IdentityReport,
};

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

struct Line {
    ok: bool,
    detail: String,
}

fn report(k: usize, name: &str, l: &Line) {
    println!("criterion {k} {name}: {} ({})", if l.ok { "PASS" } else { "FAIL" }, l.detail);
}

fn term_counts() -> Line {
    let catalan: Vec<usize> = (1..=8).map(|n| binomial(2 * (n - 1), n - 1) / n).collect();
    let mut bad = Vec::new();
    if counts(FamilyName::Phi, 8) != catalan {
        bad.push("Φ".to_string());
    }
    if counts(FamilyName::Ha, 6) != [0, 2, 25, 254, 2421, 22522] {
        bad.push("h^a".into());
    }
    if counts(FamilyName::Hc, 3) != [1, 4, 15] {
        bad.push("h^c".into());
    }
    let first: Vec<usize> = (1..=6).map(|n| binomial(2 * n - 1, n - 1)).collect();
    if hc_first_sum_counts(6) != first {
        bad.push("h^c first sum".into());
    }
    let mut detail = "Φ n≤8, h^a n≤6, h^c n≤3, h^c first sum n≤6".to_string();
    if std::env::var_os("HGA_ACCEPT_FULL").is_some() {
        let t = Instant::now();
        let c = ha::count(7);
        let ms = t.elapsed();
        if c != 207_682 || ms > Duration::from_secs(600) {
            bad.push(format!("h^a_(7) = {c} in {ms:?}"));
        }
        detail += &format!(", h^a n=7 in {:.1} s", ms.as_secs_f64());
    } else {
        detail += ", optional h^a n=7 not run";
    }
    if !bad.is_empty() {
        detail = format!("mismatch: {}", bad.join(", "));
    }
    Line { ok: bad.is_empty(), detail }
}

fn suite(spec: CheckSpec, limit: Duration, bad: &mut Vec<String>) -> Vec<IdentityReport> {
    let t = Instant::now();
    let rs = match run_check(&spec) {
        Ok(rs) => rs,
        Err(e) => {
            bad.push(format!("{}: {e}", spec.name));
            return Vec::new();
        }
    };
    let took = t.elapsed();
    for r in rs.iter().filter(|r| !r.passed()) {
        bad.push(format!("{} n={} residual {}", r.check, r.n, r.residual_terms));
    }
    if took > limit {
        bad.push(format!("{} took {took:?}", spec.name));
    }
    rs
}

fn identity_suites() -> Line {
    let mut bad = Vec::new();
    let minute = Duration::from_secs(60);
    let mut exp = |c: CheckName, n: usize, e: u32, limit: Duration| {
        let mut s = CheckSpec::new(c).n_max(n);
        s.exp_max = e;
        suite(s, limit, &mut bad);
    };
    exp(CheckName::PhiTwisting, 6, 0, Duration::from_secs(10));
    exp(CheckName::HaHomotopy, 4, 0, minute);
    exp(CheckName::HcHomotopyFwd, 4, 0, minute);
    exp(CheckName::HcHomotopyRev, 4, 0, minute);
    exp(CheckName::BarProduct, 6, 0, minute);
    exp(CheckName::BarProductIterated, 3, 0, minute);
    exp(CheckName::HaShuffleVanish, 4, 0, minute);
    exp(CheckName::Cup2Derived, 1, 0, minute);
    exp(CheckName::PolyStrict, 3, 3, minute);
    exp(CheckName::PolyShc, 3, 2, Duration::from_secs(120));
    let t = Instant::now();
    exp(CheckName::HaHomotopy, 5, 0, Duration::from_secs(1800));
    let ha5 = t.elapsed();
    let detail = if bad.is_empty() {
        format!("all residuals zero, optional h^a n=5 in {:.2} s", ha5.as_secs_f64())
    } else {
        bad.join("; ")
    };
    Line { ok: bad.is_empty(), detail }
}

fn golden() -> Line {
    let checks = [
        ("Φ", common::check_family(phi().as_ref(), common::PHI)),
        ("h^a", common::check_family(ha::ha().as_ref(), common::HA)),
        ("h^c", common::check_family(hc(Orientation::Forward).as_ref(), common::HC)),
        ("J-sets", common::check_ha3_j_sets()),
    ];
    let mut bad = Vec::new();
    let mut parts = Vec::new();
    for (name, r) in checks {
        match r {
            Ok(k) => parts.push(format!("{name} {k}")),
            Err(e) => bad.push(format!("{name}: {}", e.lines().next().unwrap_or(""))),
        }
    }
    let ok = bad.is_empty();
    Line { ok, detail: if ok { parts.join(", ") } else { bad.join("; ") } }
}

fn oracles() -> Line {
    let mut bad = Vec::new();
    let engine = suite(CheckSpec::new(CheckName::EngineCrosscheck).n_max(3), Duration::from_secs(60), &mut bad);
    let evals: u64 = engine.iter().map(|r| r.lhs_terms).sum();
    let dd = suite(CheckSpec::new(CheckName::DdZero).n_max(3), Duration::from_secs(60), &mut bad);
    let samples: i64 = dd.iter().map(|r| r.stats.get("samples").copied().unwrap_or(0)).sum();
    if samples < 1000 {
        bad.push(format!("only {samples} random expressions"));
    }
    let agree = hga_core::poly::pipelines_agree(2, 2);
    if let Err(x) = &agree {
        bad.push(format!("pipelines disagree on {x:?}"));
    }
    let ok = bad.is_empty();
    let detail = if ok {
        format!(
            "{evals} sign evaluations, d² = 0 on {samples} expressions, pipelines agree on {} tuples",
            agree.unwrap_or(0)
        )
    } else {
        bad.join("; ")
    };
    Line { ok, detail }
}

fn mutations() -> Line {
    let mut parts = Vec::new();
    let mut ok = true;
    for c in CheckName::CORE {
        match mutation_sensitivity(c, 10, 0x5eed) {
            Ok(m) => {
                ok &= m.detected == m.trials;
                parts.push(format!("{c} {}/{}", m.detected, m.trials));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{c}: {e}"));
            }
        }
    }
    Line { ok, detail: parts.join(", ") }
}

fn main() -> ExitCode {
    let lines = [
        ("term counts", term_counts()),
        ("identity suites", identity_suites()),
        ("golden values", golden()),
        ("oracle cross-checks", oracles()),
        ("mutation sensitivity", mutations()),
    ];
    for (k, (name, l)) in lines.iter().enumerate() {
        report(k + 1, name, l);
    }
    if lines.iter().all(|(_, l)| l.ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
