use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vofl::commands::{cmd_khat, cmd_kernel, cmd_solve, cmd_validate, Outcome};
use vofl::error::CliError;
use vofl::files::Format;
use vofl::{Overrides, RunConfig};

/// Variable-order fractional Laplacian kernels, transforms and solvers.
#[derive(Debug, Parser)]
#[command(name = "vofl", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate s(r), K(r), p(r) = r K(r) and the Green's function -K(r).
    Kernel(Common),
    /// Tabulate the transformed kernel K̂(k).
    Khat {
        #[command(flatten)]
        common: Common,
        /// Also write per-period contributions and truncation tails at this k.
        #[arg(long, value_name = "k=V", value_parser = parse_trace)]
        trace: Option<f64>,
        /// Write the figure-analogue data sets instead.
        #[arg(long)]
        figures: bool,
    },
    /// Solve the variable-order Poisson equation for a radial source.
    Solve {
        #[command(flatten)]
        common: Common,
        /// gaussian(SIGMA, MASS), plummer(A, MASS) or table:PATH.
        #[arg(long)]
        source: Option<String>,
        /// Reuse a symbol table (CSV with columns k, khat).
        #[arg(long, value_name = "PATH")]
        table: Option<PathBuf>,
    },
    /// Run the check suite; exit 0 iff every check passes.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Reduced suite on coarse grids.
        #[arg(long)]
        quick: bool,
        /// Add the regularized Example 2 checks.
        #[arg(long)]
        example2: bool,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration; flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// example1, example2, constant:S[:N], moebius:NUM0,NUM1,DEN[:N] or tabulated:S_INF:PATH.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    kmin: Option<f64>,
    #[arg(long)]
    kmax: Option<f64>,
    #[arg(long)]
    knum: Option<usize>,
    #[arg(long)]
    rmin: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    rnum: Option<usize>,
    /// Fixed damping values, comma separated; no extrapolation.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    lambda: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            profile: self.profile.clone(),
            kmin: self.kmin,
            kmax: self.kmax,
            knum: self.knum,
            rmin: self.rmin,
            rmax: self.rmax,
            rnum: self.rnum,
            lambda: self.lambda.clone(),
            out: self.out.clone(),
            format: self.format,
            ..Default::default()
        }
    }

    fn load(&self, extra: impl FnOnce(&mut Overrides)) -> Result<RunConfig, CliError> {
        let mut o = self.overrides();
        extra(&mut o);
        RunConfig::load(self.config.as_deref(), &o)
    }
}

fn parse_trace(text: &str) -> Result<f64, String> {
    let value = text
        .strip_prefix("k=")
        .ok_or_else(|| format!("expected k=<value>, got `{text}`"))?;
    value
        .parse::<f64>()
        .map_err(|_| format!("`{value}` is not a number"))
        .and_then(|k| if k > 0.0 && k.is_finite() { Ok(k) } else { Err(format!("k must be positive, got {k}")) })
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Kernel(common) => cmd_kernel(&common.load(|_| {})?),
        Command::Khat { common, trace, figures } => {
            let config = common.load(|o| o.trace_k = trace)?;
            cmd_khat(&config, figures)
        }
        Command::Solve { common, source, table } => {
            let config = common.load(|o| {
                o.source = source;
                o.table = table;
            })?;
            cmd_solve(&config)
        }
        Command::Validate { common, quick, example2 } => {
            let config = common.load(|o| {
                o.quick = quick;
                o.example2 = example2;
            })?;
            let (outcome, reports) = cmd_validate(&config)?;
            for r in &reports {
                eprintln!(
                    "{} {}: measured {:.6e}, expected {:.6e}, tolerance {:.1e}{}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.measured,
                    r.expected,
                    r.tolerance,
                    if r.detail.is_empty() { String::new() } else { format!(" ({})", r.detail) }
                );
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            eprintln!("{} of {} checks passed", reports.len() - failed, reports.len());
            Ok(outcome)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("VOFL_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_line_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn trace_argument() {
        assert_eq!(parse_trace("k=5"), Ok(5.0));
        assert!(parse_trace("5").is_err());
        assert!(parse_trace("k=-1").is_err());
    }
}
