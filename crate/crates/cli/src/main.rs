use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use sea_mtt::commands::{self, CliError};
use sea_mtt::config::Config;
use sea_mtt_core::SweepParam;

/// Maximum torque transmissibility analysis for series elastic actuators.
#[derive(Parser)]
#[command(name = "sea-mtt", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample both transmissibility ratios over the frequency grid into a CSV
    /// table, optionally rendering an SVG plot.
    Analyze {
        /// JSON parameter file; the built-in bench defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Also render the curves (log-log, with the magnitude-1 line).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Report the maximum-torque bandwidths, the binding factor and the
    /// marginal proportional gain.
    Bandwidth {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Machine-readable output.
        #[arg(long)]
        json: bool,
    },
    /// Sweep one design parameter and tabulate bandwidths per value.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Which parameter to vary.
        #[arg(long, value_enum)]
        param: SweepParamArg,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        points: usize,
        /// Log-spaced values instead of linear.
        #[arg(long)]
        log: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the nonlinear tracking simulation at one frequency and write the
    /// trace CSV; prints a steady-state summary.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Reference frequency, rad/s.
        #[arg(long)]
        freq: f64,
        /// Reference amplitude as a fraction of the full-scale torque
        /// (gear ratio times continuous motor torque).
        #[arg(long, default_value_t = 1.0)]
        amp_scale: f64,
        /// Run length in seconds; at least 10 reference cycles. Defaults to
        /// the config `sim.duration`, else 20 cycles.
        #[arg(long)]
        duration: Option<f64>,
        /// Torque clamp and velocity derating.
        #[arg(long, value_enum, default_value_t = LimitsArg::On)]
        limits: LimitsArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the frequency-vs-time-domain verification battery; exits 0 only
    /// if every check passes.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepParamArg {
    Kp,
    Kd,
    Nm,
    Ks,
    Jl,
}

impl From<SweepParamArg> for SweepParam {
    fn from(value: SweepParamArg) -> Self {
        match value {
            SweepParamArg::Kp => SweepParam::Kp,
            SweepParamArg::Kd => SweepParam::Kd,
            SweepParamArg::Nm => SweepParam::Nm,
            SweepParamArg::Ks => SweepParam::Ks,
            SweepParamArg::Jl => SweepParam::Jl,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum LimitsArg {
    On,
    Off,
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { config, out, svg } => {
            let cfg = Config::load_or_default(config.as_deref())?;
            commands::cmd_analyze(&cfg, &out, svg.as_deref())
        }
        Command::Bandwidth { config, json } => {
            let cfg = Config::load_or_default(config.as_deref())?;
            let text = commands::cmd_bandwidth(&cfg, json)?;
            print!("{text}");
            Ok(())
        }
        Command::Sweep {
            config,
            param,
            from,
            to,
            points,
            log,
            out,
        } => {
            let cfg = Config::load_or_default(config.as_deref())?;
            commands::cmd_sweep(&cfg, param.into(), from, to, points, log, &out)
        }
        Command::Simulate {
            config,
            freq,
            amp_scale,
            duration,
            limits,
            out,
        } => {
            let cfg = Config::load_or_default(config.as_deref())?;
            let summary = commands::cmd_simulate(
                &cfg,
                freq,
                amp_scale,
                duration,
                limits == LimitsArg::On,
                &out,
            )?;
            print!("{summary}");
            Ok(())
        }
        Command::Verify { config } => {
            let cfg = Config::load_or_default(config.as_deref())?;
            let results = commands::cmd_verify(&cfg)?;
            let mut all_passed = true;
            for r in &results {
                println!(
                    "{} {:<20} {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                );
                all_passed &= r.passed;
            }
            if all_passed {
                println!("verify: all {} checks passed", results.len());
                Ok(())
            } else {
                Err(CliError::VerifyFailed)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not errors
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(msg) = e.message() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
