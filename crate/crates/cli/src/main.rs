use std::collections::HashSet;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use uavmon::baselines::BaselineKind;
use uavmon_cli::acceptance::{run_all, SuiteInputs};
use uavmon_cli::config::{load_config, Algorithm, RunConfig};
use uavmon_cli::curves::{sample, write_csv, Curve};
use uavmon_cli::runner::{run_into, Report};

#[derive(Parser)]
#[command(name = "uavmon", version, about = "UAV monitoring trajectory and energy optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipelines selected by one or more config files. With several
    /// configs each run writes into a subdirectory named after its file.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Number of runs executed in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Evaluate one reference scheme with the parameters of a config file.
    Baseline {
        /// low-speed, fly-half, two-lines, fly-first, hover-first or round-trip.
        kind: String,
        config: PathBuf,
    },
    /// Print a sampled model curve as CSV.
    Curves {
        which: CurveArg,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        /// Take the propulsion and solar parameters from this config.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the acceptance suite; exits nonzero if any criterion fails.
    Validate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveArg {
    Propulsion,
    Solar,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn summarize(name: &str, report: &Report) {
    let energy = report
        .total_flight_energy
        .map(|e| format!(", flight energy {e:.3} J"))
        .unwrap_or_default();
    let msg = report.message.as_deref().map(|m| format!(": {m}")).unwrap_or_default();
    println!("{name}: {} {}{energy}{msg}", report.scheme, report.status);
}

fn exit_for(code: i32) -> ExitCode {
    ExitCode::from(code.clamp(0, 255) as u8)
}

fn run_configs(paths: &[PathBuf], jobs: usize) -> ExitCode {
    let mut configs = Vec::new();
    for path in paths {
        match load_config(path) {
            Ok(cfg) => configs.push((path.clone(), cfg)),
            Err(e) => return fail(e),
        }
    }
    let dirs: Vec<PathBuf> = if configs.len() == 1 {
        vec![configs[0].1.resolved_output_dir()]
    } else {
        configs
            .iter()
            .map(|(path, cfg)| {
                let stem = path.file_stem().unwrap_or_default();
                cfg.resolved_output_dir().join(stem)
            })
            .collect()
    };
    let unique: HashSet<_> = dirs.iter().collect();
    if unique.len() != dirs.len() {
        return fail("two configs would write into the same output directory");
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool,
        Err(e) => return fail(e),
    };
    let results: Vec<_> = pool.install(|| {
        configs
            .par_iter()
            .zip(dirs.par_iter())
            .map(|((_, cfg), dir)| run_into(cfg, dir))
            .collect()
    });
    let mut code = 0;
    for ((path, _), result) in configs.iter().zip(results) {
        match result {
            Ok(report) => {
                summarize(&path.display().to_string(), &report);
                code = code.max(report.exit_code());
            }
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                code = code.max(1);
            }
        }
    }
    exit_for(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { configs, jobs } => run_configs(&configs, jobs),
        Command::Baseline { kind, config } => {
            let kind = match BaselineKind::from_name(&kind) {
                Ok(k) => k,
                Err(e) => return fail(e),
            };
            let cfg = match load_config(&config) {
                Ok(cfg) => RunConfig {
                    algorithm: Algorithm::Baseline(kind),
                    ..cfg
                },
                Err(e) => return fail(e),
            };
            match run_into(&cfg, &cfg.resolved_output_dir()) {
                Ok(report) => {
                    summarize(&config.display().to_string(), &report);
                    exit_for(report.exit_code())
                }
                Err(e) => fail(e),
            }
        }
        Command::Curves {
            which,
            from,
            to,
            step,
            config,
        } => {
            let curve = match which {
                CurveArg::Propulsion => Curve::Propulsion,
                CurveArg::Solar => Curve::Solar,
            };
            let cfg = match config.map(|p| load_config(&p)).transpose() {
                Ok(cfg) => cfg.unwrap_or_default(),
                Err(e) => return fail(e),
            };
            let (f0, t0, s0) = curve.default_range();
            let rows = match sample(
                curve,
                from.unwrap_or(f0),
                to.unwrap_or(t0),
                step.unwrap_or(s0),
                &cfg.propulsion,
                &cfg.solar,
            ) {
                Ok(rows) => rows,
                Err(e) => return fail(e),
            };
            match write_csv(curve, &rows, io::stdout().lock()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(e),
            }
        }
        Command::Validate { seed } => {
            let results = run_all(&SuiteInputs {
                seed,
                ..SuiteInputs::default()
            });
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} of {} criteria passed", results.len() - failed, results.len());
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
