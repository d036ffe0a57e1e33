mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use blockpos::complexity::complexity_table;
use blockpos::reduced_sdp::{certify, CertifyConfig, SdpTolerances, VerdictKind};
use blockpos::tensor_lab::HermitianOperator;
use blockpos::witness_search::{check_bounds, minimize_f, minimize_schmidt_rank_k, SearchConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

pub const FORMAT_VERSION: &str = "blockpos-report/1";

const EXIT_MALFORMED: u8 = 64;
const EXIT_CAP: u8 = 65;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(name = "blockpos", version, about = "Test k-block-positivity with the rectangular extendibility hierarchy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify or refute k-block-positivity of an operator file.
    Certify {
        operator: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Decide k = d by the minimal eigenvalue alone.
        #[arg(long)]
        fast_path: bool,
    },
    /// Table of block sizes for rectangular diagrams.
    Complexity {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Witness searches for the two minima with their bound relations.
    Search {
        operator: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Clone, Serialize)]
struct RunArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol_cert: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_refute: f64,
    #[arg(long, default_value_t = 1e-7)]
    sdp_gap: f64,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArgs,
}

#[derive(Args, Clone)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 picks the number of cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

enum Failure {
    Malformed(anyhow::Error),
    Cap(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<blockpos::Error>() {
            Some(blockpos::Error::Resource { .. }) => Failure::Cap(e),
            Some(blockpos::Error::Domain(_) | blockpos::Error::InvalidOperator(_) | blockpos::Error::Json(_)) => {
                Failure::Malformed(e)
            }
            _ => Failure::Internal(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_MALFORMED) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Malformed(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_MALFORMED)
        }
        Err(Failure::Cap(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CAP)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

fn set_threads(threads: usize) {
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

fn load_operator(path: &Path) -> Result<HermitianOperator, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::Malformed)?;
    HermitianOperator::from_json(&text)
        .with_context(|| format!("malformed operator file {}", path.display()))
        .map_err(Failure::Malformed)
}

fn emit(out: &OutArgs, body: &str) -> Result<(), Failure> {
    match &out.out {
        Some(path) => std::fs::write(path, body)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::Internal),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn json_body(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Certify { operator, run, fast_path } => cmd_certify(&operator, &run, fast_path),
        Command::Complexity { d, k, n_min, n_max, out } => cmd_complexity(d, k, n_min, n_max, &out),
        Command::Verify { suite, seed, out } => {
            set_threads(out.threads);
            let report = verify::run(suite, seed);
            let body = match out.format {
                Format::Json => json_body(&json!({
                    "format": FORMAT_VERSION,
                    "command": "verify",
                    "config": { "suite": suite.name(), "seed": seed },
                    "checks": report.checks,
                    "passed": report.passed(),
                })),
                _ => report.text(),
            };
            emit(&out, &body)?;
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Search { operator, run } => cmd_search(&operator, &run),
    }
}

fn check_run_args(run: &RunArgs) -> Result<(), Failure> {
    let positive = [run.tol_cert, run.tol_refute, run.sdp_gap].iter().all(|t| *t > 0.0 && t.is_finite());
    if !positive || run.n_max == 0 || run.restarts == 0 {
        return Err(Failure::Malformed(anyhow::anyhow!(
            "tolerances must be positive and n-max, restarts at least 1"
        )));
    }
    Ok(())
}

fn cmd_certify(path: &Path, run: &RunArgs, fast_path: bool) -> Result<u8, Failure> {
    check_run_args(run)?;
    set_threads(run.out.threads);
    let x = load_operator(path)?;
    let cfg = CertifyConfig {
        n_max: run.n_max,
        cert_tol: run.tol_cert,
        refute_tol: run.tol_refute,
        sdp: SdpTolerances { gap: run.sdp_gap, ..Default::default() },
        restarts: run.restarts,
        seed: run.seed,
        fast_path,
    };
    let verdict = certify(&x, run.k, &cfg).map_err(|e| Failure::from(anyhow::Error::new(e)))?;
    let resource_blocked = !verdict.levels.is_empty()
        && verdict
            .levels
            .iter()
            .all(|l| l.skipped.as_deref().is_some_and(|s| s.starts_with("resource error")));
    if resource_blocked && verdict.verdict == VerdictKind::Inconclusive {
        return Err(Failure::Cap(anyhow::anyhow!(
            "every hierarchy level exceeds the dimension cap (set BLOCKPOS_CAP to raise it)"
        )));
    }
    let code = match verdict.verdict {
        VerdictKind::Certified => 0,
        VerdictKind::Refuted => 1,
        VerdictKind::Inconclusive => 2,
    };
    let mut report = json!({
        "format": FORMAT_VERSION,
        "command": "certify",
        "config": {
            "run": run,
            "fast_path": fast_path,
            "operator": path.display().to_string(),
        },
    });
    let fields = serde_json::to_value(&verdict).map_err(|e| Failure::Internal(e.into()))?;
    if let (Value::Object(dst), Value::Object(src)) = (&mut report, fields) {
        dst.extend(src);
    }
    let body = match run.out.format {
        Format::Json => json_body(&report),
        Format::Text | Format::Csv => certify_text(&verdict),
    };
    emit(&run.out, &body)?;
    Ok(code)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.9}"))
}

fn certify_text(v: &blockpos::reduced_sdp::Verdict) -> String {
    let mut s = format!("verdict: {}\n", serde_json::to_value(v.verdict).unwrap().as_str().unwrap());
    s.push_str(&format!("k = {}, d = {}\n", v.k, v.d));
    for l in &v.levels {
        s.push_str(&format!(
            "n = {:>2}  N = {:>2}  lambda = {:<12} dim = {:>5}  S = {:>14}  W = {:>14}",
            l.n,
            l.big_n,
            l.lambda.to_string(),
            l.dim.map_or("-".to_string(), |d| d.to_string()),
            fmt_opt(l.s),
            fmt_opt(l.w)
        ));
        if let Some(reason) = &l.skipped {
            s.push_str(&format!("  skipped: {reason}"));
        }
        s.push('\n');
    }
    if let Some(w) = &v.witness {
        s.push_str(&format!("witness: f = {:.9}, violation = {:.9}\n", w.f, w.violation));
    }
    for c in &v.bound_checks {
        s.push_str(&format!(
            "bound n = {}: {:<22} {:>14.9} <= {:>14.9}  {}\n",
            c.n,
            c.relation,
            c.lhs,
            c.rhs,
            if c.holds { "ok" } else { "VIOLATED" }
        ));
    }
    s
}

fn cmd_complexity(d: usize, k: usize, n_min: usize, n_max: usize, out: &OutArgs) -> Result<u8, Failure> {
    set_threads(out.threads);
    if n_min == 0 || n_max < n_min {
        return Err(Failure::Malformed(anyhow::anyhow!("need 1 <= n-min <= n-max")));
    }
    let ns: Vec<usize> = (n_min..=n_max).collect();
    let rows = complexity_table(d, k, &ns).map_err(|e| Failure::from(anyhow::Error::new(e)))?;
    let body = match out.format {
        Format::Json => json_body(&json!({
            "format": FORMAT_VERSION,
            "command": "complexity",
            "config": { "d": d, "k": k, "n_min": n_min, "n_max": n_max },
            "rows": rows,
        })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &rows {
                w.serialize(row).map_err(|e| Failure::Internal(e.into()))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Failure::Internal(anyhow::anyhow!("{e}")))?)
                .expect("utf-8")
        }
        Format::Text => {
            let mut s = format!("{:>3} {:>3} {:>4} {:>24} {:>28} collapse\n", "d", "k", "n", "C", "C_unreduced");
            for r in &rows {
                s.push_str(&format!(
                    "{:>3} {:>3} {:>4} {:>24} {:>28} {}\n",
                    r.d, r.k, r.n, r.c, r.c_unreduced, r.collapse
                ));
            }
            s
        }
    };
    emit(out, &body)?;
    Ok(0)
}

fn cmd_search(path: &Path, run: &RunArgs) -> Result<u8, Failure> {
    check_run_args(run)?;
    set_threads(run.out.threads);
    let x = load_operator(path)?;
    let cfg = SearchConfig { restarts: run.restarts, seed: run.seed, ..Default::default() };
    let lift = |e: blockpos::Error| Failure::from(anyhow::Error::new(e));
    let v = minimize_schmidt_rank_k(&x, run.k, &cfg).map_err(lift)?;
    let v_k = minimize_f(&x, run.k, &cfg).map_err(lift)?;
    let bounds = check_bounds(v.value, v_k.value, run.k);
    let code = if bounds.all_hold() { 0 } else { 1 };
    let body = match run.out.format {
        Format::Json => json_body(&json!({
            "format": FORMAT_VERSION,
            "command": "search",
            "config": { "run": run, "operator": path.display().to_string() },
            "v_hat": v.value,
            "v_k_hat": v_k.value,
            "v_k_degenerate": v_k.degenerate,
            "bounds": bounds,
        })),
        _ => {
            let mut s = format!("V_hat   = {:.9}\nV_k_hat = {:.9}{}\n", v.value, v_k.value,
                if v_k.degenerate { " (degenerate infimum)" } else { "" });
            for c in &bounds.checks {
                s.push_str(&format!("{:<24} {}\n", c.relation, if c.holds { "ok" } else { "VIOLATED" }));
            }
            s
        }
    };
    emit(&run.out, &body)?;
    Ok(code)
}
