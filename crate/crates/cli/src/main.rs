use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use funcest::elliptic::friedrichs_constant;
use funcest::{BoxDomain, QuadratureRule};
use funcest_cli::config::{parse_config, Format, RunConfig};
use funcest_cli::estimator::Family;
use funcest_cli::{emit, run, suite};

/// Exit status for unusable input (bad arguments, invalid config, unwritable output).
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "funcest", version, about = "Verify functional error estimates on manufactured problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the equality and isometry estimators.
    VerifyEquality(RunArgs),
    /// Run the two-sided, non-conforming and semi-conforming bounds.
    VerifyBounds(RunArgs),
    /// Minimize the flux majorant under nested basis enrichment.
    OptimizeMajorant(RunArgs),
    /// Run every estimator.
    Suite(RunArgs),
    /// Print the Friedrichs constant of a box.
    Friedrichs {
        /// Lower corner, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        lower: Vec<f64>,
        /// Upper corner, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        upper: Vec<f64>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; the built-in suite when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = "FUNCEST_OUT_DIR")]
    out: Option<PathBuf>,
    /// Output format, repeatable; defaults to the config's list.
    #[arg(long, value_enum)]
    format: Vec<Format>,
    /// Gauss-Legendre nodes per axis in space and time.
    #[arg(long)]
    quad_order: Option<usize>,
    /// Added to every approximation seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Multiply every manufactured source by this factor.
    #[arg(long)]
    source_scale: Option<f64>,
}

fn load(args: &RunArgs, family: Option<Family>) -> Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => suite::default_config(),
    };
    if let Some(f) = family {
        config.retain_estimators(|n| n.family() == f);
    }
    if let Some(n) = args.quad_order {
        config.quadrature = QuadratureRule::new(n, n)?;
    }
    if let Some(s) = args.seed {
        for a in &mut config.approximations {
            a.seed = a.seed.wrapping_add(s);
        }
    }
    if let Some(s) = args.source_scale {
        for c in &mut config.cases {
            c.source_scale = s;
        }
    }
    config.validate()?;
    Ok(config)
}

fn execute(args: &RunArgs, family: Option<Family>) -> Result<u8> {
    let config = load(args, family)?;
    let out = run::run(&config)?;
    let formats = if args.format.is_empty() {
        config.output.formats.clone()
    } else {
        args.format.clone()
    };
    let dir = args
        .out
        .clone()
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("funcest-out"));
    let written = emit::emit(&out.report, Some(&out.timings), &formats, &dir)?;
    let s = out.report.summary;
    println!(
        "records {}  passed {}  violations {}  errors {}  ({:.2} s)",
        s.records, s.passed, s.violations, s.errors, out.timings.total_seconds
    );
    for r in out.report.records.iter().filter(|r| !r.violations.is_empty()) {
        eprintln!("violation: {} / {} : {}", r.case, r.label, r.violations.join("; "));
    }
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(out.report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::VerifyEquality(a) => execute(a, Some(Family::Equality)),
        Command::VerifyBounds(a) => execute(a, Some(Family::Bounds)),
        Command::OptimizeMajorant(a) => execute(a, Some(Family::Majorant)),
        Command::Suite(a) => execute(a, None),
        Command::Friedrichs { lower, upper } => BoxDomain::new(lower.clone(), upper.clone())
            .map_err(anyhow::Error::from)
            .and_then(|dom| {
                let c = friedrichs_constant(&dom);
                println!("{}", serde_json::to_string(&c)?);
                Ok(0)
            }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
