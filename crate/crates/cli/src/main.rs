use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use nmchan_cli::{commands, CliError, Mode, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "nmchan", version, about = "Twin-beam separability in non-Markovian and Markovian thermal channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficient table: tau, gamma, delta, big_gamma, delta_gamma
    Coeffs(RunArgs),
    /// Separability function trace with a crossing/extrema summary
    Trace(RunArgs),
    /// Non-Markovian and Markovian separability times
    Septime(RunArgs),
    /// Separability times along one parameter axis
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Parameter to vary: x, theta, r or alpha2
        #[arg(long)]
        axis: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        values: Vec<f64>,
    },
    /// Write fig1_top.csv and fig1_bottom.csv
    Fig1 {
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` config file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    alpha2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Twin-beam squeezing
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// exact, high_T or markovian
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    tau_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    step: Option<f64>,
    /// Apply the free rotation when evolving states
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    rotation: Option<bool>,
    /// Output file, `-` for stdout
    #[arg(long)]
    out: Option<String>,
}

impl RunArgs {
    fn resolve(&self) -> anyhow::Result<RunConfig> {
        let base = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                RunConfig::parse(&text).with_context(|| format!("reading {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        let mode = self.mode.as_deref().map(str::parse::<Mode>).transpose()?;
        let cfg = base.apply(&Overrides {
            alpha2: self.alpha2,
            x: self.x,
            theta: self.theta,
            r: self.r,
            mode,
            tau_max: self.tau_max,
            step: self.step,
            rotation: self.rotation,
            output_path: self.out.clone(),
        });
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Coeffs(a) => {
            let cfg = a.resolve()?;
            commands::emit(&cfg, &commands::coeffs(&cfg)?)?;
        }
        Command::Trace(a) => {
            let cfg = a.resolve()?;
            let t = commands::trace(&cfg)?;
            commands::emit(&cfg, &t.csv)?;
            if cfg.output_path != "-" {
                print!("{}", t.summary);
            }
        }
        Command::Septime(a) => {
            let cfg = a.resolve()?;
            commands::emit(&cfg, &commands::septime(&cfg)?)?;
        }
        Command::Sweep { run, axis, values } => {
            let cfg = run.resolve()?;
            let axis = axis.parse()?;
            commands::emit(&cfg, &commands::sweep(&cfg, axis, &values)?)?;
        }
        Command::Fig1 { out } => {
            for path in commands::fig1(&out)? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.chain().find_map(|c| c.downcast_ref::<CliError>()).map_or(1, CliError::exit_code);
            ExitCode::from(code)
        }
    }
}
