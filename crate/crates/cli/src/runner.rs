//! Executes a configured run and writes its artifacts.
//!
//! Every run writes `trajectory.csv`, `power.csv`, `ledger.csv` and
//! `report.json` into its output directory. A failed pipeline still writes
//! `report.json` with the failure status.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;
use uavmon::baselines;
use uavmon::energy_opt::{algorithm2, causality_margins};
use uavmon::jamming_opt::{
    algorithm1, algorithm1_nlos, algorithm1_two_links, apply_non_outage, JammingProfile, JammingSolution, Termination,
};
use uavmon::model::{evaluate_ledger, propulsion_power, EnergyLedger, Trajectory};
use uavmon::{BaselineError, ModelError, OptError, SolverError};

use crate::config::{Algorithm, ConfigError, RunConfig};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

/// Outcome of a pipeline, written to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scheme: String,
    pub scenario: String,
    /// `Converged`, `IterationLimit`, `Completed` for the fixed schemes, or
    /// the failure kind.
    pub status: String,
    pub message: Option<String>,
    /// Slot named by an `InfeasibleInitial` failure.
    pub violating_slot: Option<usize>,
    pub seed: u64,
    pub slots: usize,
    #[serde(rename = "delta_s")]
    pub delta: f64,
    pub iterations: Option<usize>,
    #[serde(rename = "objective_trace_J")]
    pub objective_trace: Vec<f64>,
    #[serde(rename = "total_jamming_J")]
    pub total_jamming: Option<f64>,
    #[serde(rename = "total_propulsion_J")]
    pub total_propulsion: Option<f64>,
    #[serde(rename = "total_circuit_J")]
    pub total_circuit: Option<f64>,
    #[serde(rename = "total_harvested_J")]
    pub total_harvested: Option<f64>,
    /// Jamming plus propulsion.
    #[serde(rename = "total_flight_energy_J")]
    pub total_flight_energy: Option<f64>,
    #[serde(rename = "min_causality_margin_J")]
    pub min_causality_margin: Option<f64>,
    /// Slots left without successful eavesdropping by the non-outage rule.
    pub outage_slots: Option<Vec<usize>>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.status.as_str() {
            "Converged" | "Completed" => 0,
            "IterationLimit" => 2,
            _ => 1,
        }
    }
}

/// Everything a successful pipeline produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub trajectory: Trajectory,
    pub jamming: JammingProfile,
    pub ledger: EnergyLedger,
    pub report: Report,
}

#[derive(Debug)]
enum PipelineError {
    Opt(OptError),
    Baseline(BaselineError),
}

impl From<OptError> for PipelineError {
    fn from(e: OptError) -> Self {
        PipelineError::Opt(e)
    }
}

impl From<BaselineError> for PipelineError {
    fn from(e: BaselineError) -> Self {
        PipelineError::Baseline(e)
    }
}

impl From<ModelError> for PipelineError {
    fn from(e: ModelError) -> Self {
        PipelineError::Opt(e.into())
    }
}

impl PipelineError {
    fn status(&self) -> &'static str {
        match self {
            PipelineError::Opt(OptError::InfeasibleInitial { .. }) => "InfeasibleInitial",
            PipelineError::Opt(OptError::Solver(SolverError::Infeasible { .. })) => "Infeasible",
            PipelineError::Opt(OptError::Solver(SolverError::IterationLimit(_))) => "IterationLimit",
            PipelineError::Opt(OptError::Solver(_)) => "SolverFailure",
            PipelineError::Opt(OptError::Precondition(_)) => "PreconditionFailed",
            PipelineError::Opt(OptError::Model(_)) | PipelineError::Baseline(BaselineError::Model(_)) => "InvalidInput",
            PipelineError::Baseline(_) => "BaselineInfeasible",
        }
    }

    fn message(&self) -> String {
        match self {
            PipelineError::Opt(e) => e.to_string(),
            PipelineError::Baseline(e) => e.to_string(),
        }
    }

    fn slot(&self) -> Option<usize> {
        match self {
            PipelineError::Opt(OptError::InfeasibleInitial { slot, .. }) => Some(*slot),
            _ => None,
        }
    }
}

fn termination_status(t: Termination) -> &'static str {
    match t {
        Termination::Converged => "Converged",
        Termination::IterationLimit => "IterationLimit",
    }
}

fn empty_report(cfg: &RunConfig, scenario: &str, slots: usize, delta: f64) -> Report {
    Report {
        scheme: cfg.algorithm.label(),
        scenario: scenario.to_string(),
        status: String::new(),
        message: None,
        violating_slot: None,
        seed: cfg.seed,
        slots,
        delta,
        iterations: None,
        objective_trace: Vec::new(),
        total_jamming: None,
        total_propulsion: None,
        total_circuit: None,
        total_harvested: None,
        total_flight_energy: None,
        min_causality_margin: None,
        outage_slots: None,
    }
}

/// Runs the configured pipeline without touching the filesystem. A
/// pipeline failure is returned as a report, not an error.
pub fn execute(cfg: &RunConfig) -> Result<Result<RunResult, Report>, ConfigError> {
    cfg.validate()?;
    let params = cfg.params()?;
    let scenario = cfg.scenario()?;
    let base = empty_report(cfg, &scenario.name, params.slots, params.delta());
    let pp = &cfg.propulsion;
    let sp = &cfg.solar;
    let ao = &cfg.optimizer.ao;

    let outcome = (|| -> Result<RunResult, PipelineError> {
        let mut report = base.clone();
        let from_alg1 = |sol: JammingSolution, report: &mut Report| {
            report.status = termination_status(sol.report.termination).into();
            report.iterations = Some(sol.report.iterations);
            report.objective_trace = sol.report.objective_trace.clone();
            (sol.trajectory, sol.jamming)
        };
        let (trajectory, jamming) = match cfg.algorithm {
            Algorithm::Alg1 => from_alg1(algorithm1(&scenario, &params, ao)?, &mut report),
            Algorithm::Alg1Nlos => {
                let np = cfg.nlos.as_ref().expect("validated");
                from_alg1(algorithm1_nlos(&scenario, &params, np, cfg.seed, ao)?, &mut report)
            }
            Algorithm::Alg1TwoLink => {
                let tl = cfg.two_link.as_ref().expect("validated");
                from_alg1(algorithm1_two_links(&scenario, &params, tl, ao)?, &mut report)
            }
            Algorithm::Alg1NonOutage => {
                let no = cfg.non_outage.as_ref().expect("validated");
                let (traj, jam) = from_alg1(algorithm1(&scenario, &params, ao)?, &mut report);
                let (jam, mask) = apply_non_outage(&jam, no);
                report.outage_slots = Some((0..mask.len()).filter(|t| mask[*t]).map(|t| t + 1).collect());
                (traj, jam)
            }
            Algorithm::Alg2 => {
                let sol = algorithm2(&scenario, &params, pp, sp, &cfg.optimizer)?;
                report.status = termination_status(sol.report.termination).into();
                report.iterations = Some(sol.report.iterations);
                report.objective_trace = sol.report.objective_trace.clone();
                (sol.trajectory, sol.jamming)
            }
            Algorithm::Baseline(_) => {
                let kind = cfg.baseline_kind().expect("baseline algorithm");
                let traj = baselines::generate(&kind, &scenario, &params, pp)?;
                let jam = JammingProfile::closed_form(&traj, &params);
                report.status = "Completed".into();
                (traj, jam)
            }
        };
        let ledger = evaluate_ledger(&trajectory, &jamming, &params, pp, sp)?;
        report.total_jamming = Some(ledger.total_jamming());
        report.total_propulsion = Some(ledger.total_propulsion());
        report.total_circuit = Some(ledger.total_circuit());
        report.total_harvested = Some(ledger.total_harvested());
        report.total_flight_energy = Some(ledger.total_flight_energy());
        report.min_causality_margin = causality_margins(&ledger, &params).into_iter().reduce(f64::min);
        Ok(RunResult {
            trajectory,
            jamming,
            ledger,
            report,
        })
    })();

    Ok(outcome.map_err(|e| Report {
        status: e.status().into(),
        message: Some(e.message()),
        violating_slot: e.slot(),
        ..base
    }))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, RunError> {
    csv::Writer::from_path(path).map_err(|source| RunError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn num(v: f64) -> String {
    v.to_string()
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<(), RunError> {
    let wrap = |source: csv::Error| RunError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    w.flush().map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the CSV artifacts of a successful run.
pub fn write_artifacts(result: &RunResult, cfg: &RunConfig, dir: &Path) -> Result<(), RunError> {
    let params = cfg.params()?;
    let scheme = result.report.scheme.as_str();
    let delta = params.delta();
    let points = &result.trajectory.points;

    write_rows(
        &dir.join("trajectory.csv"),
        &["scheme", "slot", "time_s", "x_m", "y_m"],
        points
            .iter()
            .enumerate()
            .map(|(t, p)| vec![scheme.into(), t.to_string(), num(t as f64 * delta), num(p.x), num(p.y)]),
    )?;

    let speeds = result.trajectory.speeds(delta);
    let ledger = &result.ledger;
    write_rows(
        &dir.join("power.csv"),
        &[
            "scheme",
            "slot",
            "time_s",
            "speed_m_s",
            "jamming_W",
            "propulsion_W",
            "circuit_W",
            "harvested_W",
        ],
        (0..params.slots).map(|i| {
            vec![
                scheme.into(),
                (i + 1).to_string(),
                num((i + 1) as f64 * delta),
                num(speeds[i]),
                num(result.jamming.powers()[i]),
                num(propulsion_power(speeds[i], &cfg.propulsion)),
                num(params.circuit_power),
                num(ledger.harvested[i] / delta),
            ]
        }),
    )?;

    let margins = causality_margins(ledger, &params);
    write_rows(
        &dir.join("ledger.csv"),
        &[
            "scheme",
            "slot",
            "jamming_J",
            "propulsion_J",
            "circuit_J",
            "harvested_J",
            "cumulative_consumed_J",
            "cumulative_harvested_J",
            "battery_J",
            "causality_margin_J",
        ],
        (0..params.slots).map(|i| {
            let consumed =
                ledger.cumulative_jamming[i] + ledger.cumulative_propulsion[i] + ledger.cumulative_circuit[i];
            vec![
                scheme.into(),
                (i + 1).to_string(),
                num(ledger.jamming[i]),
                num(ledger.propulsion[i]),
                num(ledger.circuit[i]),
                num(ledger.harvested[i]),
                num(consumed),
                num(ledger.cumulative_harvested[i]),
                num(ledger.battery[i]),
                num(margins[i]),
            ]
        }),
    )
}

pub fn write_report(report: &Report, dir: &Path) -> Result<(), RunError> {
    let path = dir.join("report.json");
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    fs::write(&path, text + "\n").map_err(|source| RunError::Io { path, source })
}

/// Runs `cfg`, writes its artifacts into `dir` and returns the report.
pub fn run_into(cfg: &RunConfig, dir: &Path) -> Result<Report, RunError> {
    let outcome = execute(cfg)?;
    fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let report = match outcome {
        Ok(result) => {
            write_artifacts(&result, cfg, dir)?;
            result.report
        }
        Err(report) => report,
    };
    write_report(&report, dir)?;
    Ok(report)
}

/// Runs `cfg` into its configured output directory.
pub fn run(cfg: &RunConfig) -> Result<Report, RunError> {
    run_into(cfg, &cfg.resolved_output_dir())
}
