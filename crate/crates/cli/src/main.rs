use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use hga_core::maps::{ha, hc::Orientation};
use hga_core::verify::{
    counts, dump_family, run_all, run_check, suite, CheckName, CheckSpec, FamilyName, IdentityReport,
    DEFAULT_CEILING,
};
use hga_core::HgaError;

const EXIT_RESIDUAL: u8 = 1;
const EXIT_ABORT: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "hga-forge", version, about = "Builds and checks the shc structure on free extended hgas")]
struct Cli {
    /// Worker threads; falls back to HGA_FORGE_THREADS, then to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run one identity check for every bound up to --n-max.
    Verify {
        check: String,
        #[arg(long)]
        n_max: Option<usize>,
        /// Largest exponent for the polynomial checks.
        #[arg(long)]
        exp_max: Option<u32>,
        #[arg(long)]
        trace: bool,
        /// Abort once this many terms have been fed into a cancellation.
        #[arg(long, default_value_t = DEFAULT_CEILING)]
        ceiling: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print summand counts for n = 1..=n-max.
    Count {
        family: Fam,
        #[arg(long)]
        n_max: usize,
    },
    /// Print the component of a family on generic inputs.
    Dump {
        family: Fam,
        #[arg(long)]
        n: usize,
        /// For hc: the homotopy from Φ to Φ∘T instead.
        #[arg(long)]
        reverse: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Time the enumeration of h^a_(n), and optionally its identity check.
    Bench {
        family: BenchFam,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        verify: bool,
    },
    /// Run every check.
    All {
        /// Only the acceptance bounds.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Fam {
    Phi,
    Ha,
    Hc,
}

impl From<Fam> for FamilyName {
    fn from(f: Fam) -> FamilyName {
        match f {
            Fam::Phi => FamilyName::Phi,
            Fam::Ha => FamilyName::Ha,
            Fam::Hc => FamilyName::Hc,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BenchFam {
    Ha,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(std::io::Error),
}

impl From<HgaError> for Failure {
    fn from(e: HgaError) -> Failure {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Io(e)
    }
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("HGA_FORGE_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("HGA_FORGE_THREADS: not a number: `{v}`"))),
        _ => Ok(None),
    }
}

fn exit_code(reports: &[IdentityReport]) -> u8 {
    if reports.iter().any(|r| r.complete && r.residual_terms > 0) {
        EXIT_RESIDUAL
    } else if reports.iter().any(|r| !r.complete) {
        EXIT_ABORT
    } else {
        0
    }
}

fn summary(r: &IdentityReport) -> String {
    let verdict = if r.passed() {
        "ok"
    } else if !r.complete {
        "ABORT"
    } else {
        "FAIL"
    };
    format!(
        "{:<22} n={:<2} lhs={:<9} residual={:<6} {:>7} ms  {verdict}",
        r.check, r.n, r.lhs_terms, r.residual_terms, r.ms
    )
}

fn emit(reports: &[IdentityReport], out: Option<&PathBuf>) -> Result<(), Failure> {
    let json = serde_json::to_string_pretty(reports).map_err(|e| Failure::Usage(e.to_string()))?;
    match out {
        Some(p) => std::fs::write(p, json + "\n")?,
        None => println!("{json}"),
    }
    let mut err = std::io::stderr().lock();
    for r in reports {
        writeln!(err, "{}", summary(r))?;
        if !r.passed() {
            if let Some(d) = &r.detail {
                for l in d.lines().take(8) {
                    writeln!(err, "    {l}")?;
                }
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if let Some(n) = threads(cli.threads)? {
        if n == 0 {
            return Err(Failure::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match cli.cmd {
        Cmd::Verify { check, n_max, exp_max, trace, ceiling, out } => {
            let name: CheckName = check.parse()?;
            let mut spec = CheckSpec::new(name);
            if let Some(n) = n_max {
                spec.n_max = n;
            }
            if let Some(e) = exp_max {
                spec.exp_max = e;
            }
            spec.trace = trace;
            spec.ceiling = ceiling;
            let reports = run_check(&spec)?;
            emit(&reports, out.as_ref())?;
            Ok(exit_code(&reports))
        }
        Cmd::Count { family, n_max } => {
            if n_max == 0 {
                return Err(Failure::Usage("--n-max must be positive".into()));
            }
            let c = counts(family.into(), n_max);
            let line: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            println!("{}", line.join(" "));
            Ok(0)
        }
        Cmd::Dump { family, n, reverse, format } => {
            if n == 0 {
                return Err(Failure::Usage("--n must be positive".into()));
            }
            let o = if reverse { Orientation::Reverse } else { Orientation::Forward };
            let text = dump_family(family.into(), n, o);
            match format {
                Format::Text => print!("{text}"),
                Format::Json => {
                    let lines: Vec<&str> = text.lines().collect();
                    let v = serde_json::json!({ "schema": 1, "family": format!("{family:?}").to_lowercase(), "n": n, "terms": lines });
                    println!("{}", serde_json::to_string_pretty(&v).map_err(|e| Failure::Usage(e.to_string()))?);
                }
            }
            Ok(0)
        }
        Cmd::Bench { family: BenchFam::Ha, n, verify } => {
            if n == 0 {
                return Err(Failure::Usage("--n must be positive".into()));
            }
            let t = Instant::now();
            let c = ha::count(n);
            println!("enumerate h^a n={n} count={c} ms={}", t.elapsed().as_millis());
            if verify {
                let t = Instant::now();
                let spec = CheckSpec::new(CheckName::HaHomotopy).n_max(n);
                let reports = run_check(&spec)?;
                let last = reports.last().expect("n ≥ 1");
                println!(
                    "verify h^a n={n} lhs={} residual={} ms={}",
                    last.lhs_terms,
                    last.residual_terms,
                    t.elapsed().as_millis()
                );
                return Ok(exit_code(&reports));
            }
            Ok(0)
        }
        Cmd::All { quick, out } => {
            let mut reports = Vec::new();
            for r in run_all(&suite(quick)) {
                reports.extend(r?);
            }
            emit(&reports, out.as_ref())?;
            Ok(exit_code(&reports))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
