//! `orekit`: exact skew polynomial arithmetic and structure checks driven by
//! scenario files. Exit code 0 means every executed check passed, 1 means at
//! least one check failed, 2 means the invocation or scenario was invalid.

use clap::{Parser, Subcommand};
use orekit_cli::config::{self, Loaded, Scenario};
use orekit_cli::parse;
use orekit_cli::suites;
use orekit_core::jordan::{FieldJordanBase, JordanRing};
use orekit_core::ore::{left_divide, skew_mul, skew_render, FieldOreContext};
use orekit_core::structure::{decompose, udim_ore, BlockKind, MatrixFormOutcome};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "orekit", version, about = "Exact arithmetic in skew polynomial rings")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the scenario's check suites and emit a JSON report.
    Run {
        /// Scenario JSON file.
        config: Option<PathBuf>,
        /// Scenario JSON file (alternative to the positional form).
        #[arg(long)]
        ctx: Option<PathBuf>,
        /// Seed for sampled checks.
        #[arg(long, default_value_t = 0x00C0_FFEE)]
        seed: u64,
        /// Write the report to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of worker threads for suite execution.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Multiply two skew polynomials over the scenario's coefficient field.
    Mul {
        #[arg(long)]
        ctx: PathBuf,
        f: String,
        g: String,
    },
    /// Left-divide f by g and print quotient and remainder.
    Divide {
        #[arg(long)]
        ctx: PathBuf,
        f: String,
        g: String,
    },
    /// Print the block decomposition of the scenario's skew polynomial ring.
    Decompose {
        #[arg(long)]
        ctx: PathBuf,
    },
    /// Print the uniform dimension with its per-block trace.
    Udim {
        #[arg(long)]
        ctx: PathBuf,
    },
    /// Normalize a tower element "(level,body)" to its minimal level.
    JordanNormalize {
        #[arg(long)]
        ctx: PathBuf,
        elem: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &PathBuf) -> Result<Loaded, String> {
    config::load(path).map_err(|e| e.to_string())
}

/// Scenarios whose coefficients form a field, as required by the arithmetic
/// subcommands.
fn field_scenario<'a>(loaded: &'a Loaded, what: &str) -> Result<&'a FieldOreContext, String> {
    match &loaded.scenario {
        Scenario::Field { ctx, .. } => Ok(ctx),
        _ => Err(format!(
            "{what} needs a scalar-line scenario: a single 1x1 factor"
        )),
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Run {
            config,
            ctx,
            seed,
            out,
            jobs,
        } => {
            let path = config
                .or(ctx)
                .ok_or("run needs a scenario file, positional or via --ctx")?;
            let loaded = load(&path)?;
            let doc = suites::run_suites(&loaded, seed, jobs).map_err(|e| e.to_string())?;
            let json = doc.to_json();
            match out {
                Some(p) => std::fs::write(&p, &json)
                    .map_err(|e| format!("cannot write {}: {e}", p.display()))?,
                None => print!("{json}"),
            }
            Ok(if doc.failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Mul { ctx, f, g } => {
            let loaded = load(&ctx)?;
            let fctx = field_scenario(&loaded, "mul")?;
            let pf = parse::parse_poly(fctx, &f).map_err(|e| e.to_string())?;
            let pg = parse::parse_poly(fctx, &g).map_err(|e| e.to_string())?;
            let prod = skew_mul(fctx, &pf, &pg).map_err(|e| e.to_string())?;
            println!("{}", skew_render(fctx, &prod));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Divide { ctx, f, g } => {
            let loaded = load(&ctx)?;
            let fctx = field_scenario(&loaded, "divide")?;
            let pf = parse::parse_poly(fctx, &f).map_err(|e| e.to_string())?;
            let pg = parse::parse_poly(fctx, &g).map_err(|e| e.to_string())?;
            let (quot, rem) = left_divide(fctx, &pf, &pg).map_err(|e| e.to_string())?;
            println!("quotient: {}", skew_render(fctx, &quot));
            println!("remainder: {}", skew_render(fctx, &rem));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Decompose { ctx } => {
            let loaded = load(&ctx)?;
            let ss = match &loaded.scenario {
                Scenario::Field { ss, .. } => ss,
                Scenario::Ss { ctx } => ctx,
                Scenario::Shift { .. } => {
                    return Err("decompose needs a semisimple coefficient ring".into())
                }
            };
            let report = decompose(&ss.ring, &ss.sigma, &ss.delta).map_err(|e| e.to_string())?;
            let field = *ss.ring.field(0);
            for (i, block) in report.blocks.iter().enumerate() {
                match &block.kind {
                    BlockKind::Multi(mb) => println!(
                        "block {i}: orbit {:?} -> twist-only in y = x - b, b = {}; \
                         residual solution space dimension {}",
                        mb.orbit,
                        mb.ctx_x.ring.render(&mb.b),
                        mb.solution_space_dim
                    ),
                    BlockKind::Simple(MatrixFormOutcome::Supported(mf)) => println!(
                        "block {i}: orbit {:?} -> {} x {} matrices over an inner skew \
                         polynomial ring; b = {}; inner delta(t) = {}",
                        block.orbit,
                        mf.m,
                        mf.m,
                        mf.b.render(&field),
                        field.prime().rf_render(&mf.delta_prime.dt)
                    ),
                    BlockKind::Simple(MatrixFormOutcome::Unsupported { m, reason }) => println!(
                        "block {i}: orbit {:?} -> unsupported (m = {m}): {reason}",
                        block.orbit
                    ),
                }
            }
            let ok = report.verification.passed();
            println!("conversion checks: {}", if ok { "pass" } else { "fail" });
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Udim { ctx } => {
            let loaded = load(&ctx)?;
            let ss = match &loaded.scenario {
                Scenario::Field { ss, .. } => ss,
                Scenario::Ss { ctx } => ctx,
                Scenario::Shift { .. } => {
                    return Err("udim needs a semisimple coefficient ring".into())
                }
            };
            let trace = udim_ore(&ss.ring, &ss.sigma, &ss.delta).map_err(|e| e.to_string())?;
            println!("{} (= udim R)", trace.total);
            if trace.total == ss.ring.udim() {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!(
                    "trace total {} disagrees with udim R = {}",
                    trace.total,
                    ss.ring.udim()
                );
                Ok(ExitCode::from(1))
            }
        }
        Cmd::JordanNormalize { ctx, elem } => {
            let loaded = load(&ctx)?;
            let fctx = field_scenario(&loaded, "jordan-normalize")?;
            let (level, body_str) = parse::split_tower(&elem).map_err(|e| e.to_string())?;
            let body = parse::parse_scalar(fctx, body_str).map_err(|e| e.to_string())?;
            let base =
                FieldJordanBase::new(fctx.field, fctx.sigma).map_err(|e| e.to_string())?;
            let jordan = JordanRing::new(base);
            let a = jordan.elem(level, body).map_err(|e| e.to_string())?;
            println!("({},{})", a.level(), fctx.field.render(a.body()));
            Ok(ExitCode::SUCCESS)
        }
    }
}
