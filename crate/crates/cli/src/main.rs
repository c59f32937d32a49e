use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use higher_dl::experiment::{parse_checks, run, ExperimentConfig};
use higher_dl::tori::TorusKind;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TorusArg {
    Split,
    Nonsplit,
    Both,
}

/// Verify character identities for higher Deligne-Lusztig characters of GL_2(F_q[t]/t^r).
#[derive(Debug, Parser)]
#[command(name = "hdl", version)]
struct Args {
    /// Residue field size (a prime power).
    #[arg(long)]
    q: Option<u64>,
    /// Level r (1 or even).
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, value_enum, default_value = "both")]
    torus: TorusArg,
    /// Comma-separated check ids, or `all`.
    #[arg(long, default_value = "all")]
    check: String,
    /// Where to write the JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for cached character tables.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Directory to write deterministic character/Green/class tables into.
    #[arg(long)]
    dump_tables: Option<PathBuf>,
    /// JSON config file; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn build_config(args: &Args) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<ExperimentConfig>(&text).context("parsing config")?
        }
        None => {
            let (Some(q), Some(r)) = (args.q, args.r) else {
                bail!("--q and --r are required unless --config is given");
            };
            let mut c = ExperimentConfig::new(q, r);
            c.checks = parse_checks(&args.check)?;
            c.tori = tori(args.torus);
            c
        }
    };
    if args.config.is_some() {
        if let Some(q) = args.q {
            cfg.q = q;
        }
        if let Some(r) = args.r {
            cfg.r = r;
        }
        if args.check != "all" {
            cfg.checks = parse_checks(&args.check)?;
        }
        if !matches!(args.torus, TorusArg::Both) {
            cfg.tori = tori(args.torus);
        }
    }
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    if args.cache.is_some() {
        cfg.cache = args.cache.clone();
    }
    if args.dump_tables.is_some() {
        cfg.dump_tables = args.dump_tables.clone();
    }
    if args.jobs != 0 {
        cfg.jobs = args.jobs;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn tori(arg: TorusArg) -> Vec<TorusKind> {
    match arg {
        TorusArg::Split => vec![TorusKind::Split],
        TorusArg::Nonsplit => vec![TorusKind::Nonsplit],
        TorusArg::Both => vec![TorusKind::Split, TorusKind::Nonsplit],
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = build_config(&args).and_then(|cfg| Ok(run(&cfg)?));
    match outcome {
        Ok(report) => {
            print!("{}", report.render_table());
            for rec in report.records.iter().filter(|r| !r.pass) {
                println!("FAIL {} {}: {} vs {}", rec.check, rec.params, rec.lhs_pretty, rec.rhs_pretty);
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
