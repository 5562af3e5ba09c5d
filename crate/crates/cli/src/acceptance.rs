//! The acceptance suite: eleven named checks of the models and optimizers,
//! each with a pass/fail verdict and a one-line detail.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uavmon::baselines::{self, BaselineKind, DEFAULT_WAYPOINT};
use uavmon::convex::{gradient_mismatch, Affine, DisplacementCube, InverseSquare, QuadraticForm, SmoothFunction, Sum};
use uavmon::energy_opt::{algorithm2, sca_linearized_constraint, EnergySettings, EnergySolution, ScaState};
use uavmon::jamming_opt::{
    algorithm1, apply_non_outage, solve_subproblem_a, AoSettings, JammingProfile, JammingSolution, NonOutageConfig,
    SlackState, SubproblemOptions,
};
use uavmon::model::{
    find_min_power_speed, jamming_power_closed_form, propulsion_power, solar_power, Point, PresetName,
    PropulsionParams, Scenario, SolarParams, SystemParams, Trajectory,
};

/// Inputs the suite is evaluated with; the defaults are the shipped models.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteInputs {
    pub propulsion: PropulsionParams,
    pub solar: SolarParams,
    /// Seeds the random probes and trajectories.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {:<28} {} ({:.2} s): {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

fn timed<F: FnOnce() -> (bool, String)>(id: u8, name: &'static str, f: F) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = f();
    CriterionResult {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

fn horizon(t: f64, delta: f64) -> SystemParams {
    SystemParams::default()
        .with_timing(t, delta)
        .expect("suite horizons are whole numbers of slots")
}

/// Noise power at which the straight NF flight over 30 s at 0.1 s slots
/// needs 623.7 J of jamming.
pub fn calibrated_noise_power(pp: &PropulsionParams) -> f64 {
    let params = horizon(30.0, 0.1);
    let nf = Scenario::preset(PresetName::Nf);
    let low = baselines::generate(&BaselineKind::LowSpeed, &nf, &params, pp).expect("low-speed is always flyable");
    let energy = JammingProfile::closed_form(&low, &params).energy(params.delta());
    params.noise_power() * 623.7 / energy
}

/// Propulsion model point checks.
pub fn criterion1(inputs: &SuiteInputs) -> CriterionResult {
    timed(1, "propulsion point checks", || {
        let pp = &inputs.propulsion;
        let hover = propulsion_power(0.0, pp);
        let (v_e, p_e) = find_min_power_speed(pp, 60.0);
        let passed = hover == 121.4 && (v_e - 22.36).abs() <= 0.3 && (p_e - 41.84).abs() <= 0.5;
        (
            passed,
            format!("P(0) = {hover} W, V_e = {v_e:.3} m/s, P(V_e) = {p_e:.3} W"),
        )
    })
}

/// Published propulsion energies of the reference schemes.
pub fn criterion2(inputs: &SuiteInputs) -> CriterionResult {
    timed(2, "reference propulsion", || {
        let params = horizon(30.0, 0.1);
        let nf = Scenario::preset(PresetName::Nf);
        let table = [
            (BaselineKind::RoundTrip, 1255.2),
            (BaselineKind::FlyFirst, 2850.0),
            (BaselineKind::HoverFirst, 2850.0),
            (BaselineKind::LowSpeed, 2427.5),
            (
                BaselineKind::TwoLines {
                    waypoint: DEFAULT_WAYPOINT,
                },
                1968.6,
            ),
        ];
        let mut passed = true;
        let mut parts = Vec::new();
        for (kind, expect) in table {
            match baselines::evaluate(&kind, &nf, &params, &inputs.propulsion, &inputs.solar) {
                Ok(l) => {
                    let got = l.total_propulsion();
                    passed &= within(got, expect, 0.02);
                    parts.push(format!("{} {got:.1}/{expect}", kind.name()));
                }
                Err(e) => {
                    passed = false;
                    parts.push(format!("{} failed: {e}", kind.name()));
                }
            }
        }
        (passed, format!("{} J", parts.join(", ")))
    })
}

/// Jamming energies of the reference schemes after calibrating the noise
/// power on the low-speed scheme.
pub fn criterion3(inputs: &SuiteInputs) -> CriterionResult {
    timed(3, "calibrated reference jamming", || {
        let pp = &inputs.propulsion;
        let params = SystemParams {
            sigma2_override: Some(calibrated_noise_power(pp)),
            ..horizon(30.0, 0.1)
        };
        let nf = Scenario::preset(PresetName::Nf);
        let jam = |kind: BaselineKind| {
            baselines::generate(&kind, &nf, &params, pp)
                .map(|t| JammingProfile::closed_form(&t, &params).energy(params.delta()))
                .unwrap_or(f64::NAN)
        };
        let hover = jam(BaselineKind::HoverFirst);
        let two = jam(BaselineKind::TwoLines {
            waypoint: DEFAULT_WAYPOINT,
        });
        let fly = jam(BaselineKind::FlyFirst);
        let round = jam(BaselineKind::RoundTrip);
        let passed = within(hover, 396.3, 0.10) && within(two, 412.8, 0.10);
        (
            passed,
            format!(
                "hover-first {hover:.1}/396.3, two-lines {two:.1}/412.8 J; \
                 reported only: fly-first {fly:.1}, round-trip {round:.1} vs 1042.9 J"
            ),
        )
    })
}

/// One optimizer run with its wall time.
#[derive(Debug, Clone)]
pub struct Timed<T> {
    pub result: Result<T, String>,
    pub seconds: f64,
}

fn time_run<T, E: fmt::Display>(f: impl FnOnce() -> Result<T, E>) -> Timed<T> {
    let start = Instant::now();
    let result = f().map_err(|e| e.to_string());
    Timed {
        result,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Optimizer runs shared by the jamming-free, dominance, convergence and
/// soundness criteria. All at 0.5 s slots.
#[derive(Debug, Clone)]
pub struct SharedRuns {
    /// Jamming minimization on JF for horizons 10, 30 and 60 s.
    pub alg1_jf: Vec<(f64, Timed<JammingSolution>)>,
    /// Total-energy minimization on JF for horizons 10, 30 and 60 s.
    pub alg2_jf: Vec<(f64, Timed<EnergySolution>)>,
    pub alg1_nf: Timed<JammingSolution>,
    /// Total-energy runs on IF and NF, 30 s, with the calibrated noise.
    pub alg2_if: Timed<EnergySolution>,
    pub alg2_nf: Timed<EnergySolution>,
    /// Parameters of the calibrated runs.
    pub calibrated: SystemParams,
}

impl SharedRuns {
    pub fn compute(inputs: &SuiteInputs) -> Self {
        let (pp, sp) = (&inputs.propulsion, &inputs.solar);
        let ao = AoSettings::default();
        let es = EnergySettings::default();
        let jf = Scenario::preset(PresetName::Jf);
        let horizons = [10.0, 30.0, 60.0];
        let alg1_jf = horizons
            .iter()
            .map(|t| (*t, time_run(|| algorithm1(&jf, &horizon(*t, 0.5), &ao))))
            .collect();
        let alg2_jf = horizons
            .iter()
            .map(|t| (*t, time_run(|| algorithm2(&jf, &horizon(*t, 0.5), pp, sp, &es))))
            .collect();
        let calibrated = SystemParams {
            sigma2_override: Some(calibrated_noise_power(pp)),
            ..horizon(30.0, 0.5)
        };
        let nf = Scenario::preset(PresetName::Nf);
        let if_ = Scenario::preset(PresetName::If);
        Self {
            alg1_jf,
            alg2_jf,
            alg1_nf: time_run(|| algorithm1(&nf, &horizon(30.0, 0.5), &ao)),
            alg2_if: time_run(|| algorithm2(&if_, &calibrated, pp, sp, &es)),
            alg2_nf: time_run(|| algorithm2(&nf, &calibrated, pp, sp, &es)),
            calibrated,
        }
    }

    fn alg2_runs(&self) -> Vec<(String, &Timed<EnergySolution>)> {
        let mut runs: Vec<_> = self
            .alg2_jf
            .iter()
            .map(|(t, r)| (format!("alg2 JF T={t}"), r))
            .collect();
        runs.push(("alg2 IF T=30".into(), &self.alg2_if));
        runs.push(("alg2 NF T=30".into(), &self.alg2_nf));
        runs
    }

    fn alg1_runs(&self) -> Vec<(String, &Timed<JammingSolution>)> {
        let mut runs: Vec<_> = self
            .alg1_jf
            .iter()
            .map(|(t, r)| (format!("alg1 JF T={t}"), r))
            .collect();
        runs.push(("alg1 NF T=30".into(), &self.alg1_nf));
        runs
    }
}

/// Zero jamming on the jamming-free preset.
pub fn criterion4(runs: &SharedRuns) -> CriterionResult {
    let solve_time: f64 =
        runs.alg1_jf.iter().map(|r| r.1.seconds).sum::<f64>() + runs.alg2_jf.iter().map(|r| r.1.seconds).sum::<f64>();
    with_solve_time(
        solve_time,
        timed(4, "jamming-free preset", || {
            let mut passed = true;
            let mut parts = Vec::new();
            for (t, r) in &runs.alg1_jf {
                let e = r.result.as_ref().map(|s| s.total_jamming(horizon(*t, 0.5).delta()));
                passed &= matches!(e, Ok(e) if e <= 1e-6) && r.seconds < 120.0;
                parts.push(format!("alg1 T={t}: {e:?} J in {:.1} s", r.seconds));
            }
            for (t, r) in &runs.alg2_jf {
                let e = r.result.as_ref().map(|s| s.ledger.total_jamming());
                passed &= matches!(e, Ok(e) if e <= 1e-6) && r.seconds < 120.0;
                parts.push(format!("alg2 T={t}: {e:?} J in {:.1} s", r.seconds));
            }
            (passed, parts.join("; "))
        }),
    )
}

/// Adds the wall time of the shared optimizer runs a criterion reads.
fn with_solve_time(seconds: f64, mut r: CriterionResult) -> CriterionResult {
    r.seconds += seconds;
    r
}

/// Both optimizers beat the reference schemes on NF.
pub fn criterion5(runs: &SharedRuns, inputs: &SuiteInputs) -> CriterionResult {
    let solve_time = runs.alg1_nf.seconds + runs.alg2_nf.seconds;
    with_solve_time(
        solve_time,
        timed(5, "optimizer dominance", || {
            let nf = Scenario::preset(PresetName::Nf);
            let plain = horizon(30.0, 0.5);
            let (pp, sp) = (&inputs.propulsion, &inputs.solar);
            let two = BaselineKind::TwoLines {
                waypoint: DEFAULT_WAYPOINT,
            };
            let two_jam = baselines::generate(&two, &nf, &plain, pp)
                .map(|t| JammingProfile::closed_form(&t, &plain).energy(plain.delta()))
                .unwrap_or(f64::NAN);
            let alg1 = match &runs.alg1_nf.result {
                Ok(s) => s.total_jamming(plain.delta()),
                Err(e) => return (false, format!("alg1 failed: {e}")),
            };
            let sol = match &runs.alg2_nf.result {
                Ok(s) => s,
                Err(e) => return (false, format!("alg2 failed: {e}")),
            };
            let best_baseline = BaselineKind::ALL
                .iter()
                .filter_map(|k| baselines::evaluate(k, &nf, &runs.calibrated, pp, sp).ok())
                .map(|l| l.total_flight_energy())
                .fold(f64::INFINITY, f64::min);
            let total = sol.total_energy();
            let prop = sol.ledger.total_propulsion();
            let seconds = runs.alg1_nf.seconds + runs.alg2_nf.seconds;
            let passed = alg1 <= two_jam && total <= best_baseline && prop <= 1.10 * 1255.2 && seconds <= 600.0;
            (
                passed,
                format!(
                    "alg1 jamming {alg1:.4e} <= two-lines {two_jam:.4e} J; alg2 total {total:.1} <= best reference \
                 {best_baseline:.1} J; alg2 propulsion {prop:.1} <= {:.1} J",
                    1.10 * 1255.2
                ),
            )
        }),
    )
}

fn nonincreasing(trace: &[f64]) -> bool {
    trace.windows(2).all(|w| w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0))
}

/// Monotone objective traces and bounded iteration counts.
pub fn criterion6(runs: &SharedRuns) -> CriterionResult {
    timed(6, "convergence", || {
        let mut passed = true;
        let mut parts = Vec::new();
        for (name, r) in runs.alg1_runs() {
            match &r.result {
                Ok(s) => {
                    let ok = nonincreasing(&s.report.objective_trace) && s.report.iterations <= 100;
                    passed &= ok;
                    parts.push(format!("{name}: {} it", s.report.iterations));
                }
                Err(e) => {
                    passed = false;
                    parts.push(format!("{name}: {e}"));
                }
            }
        }
        for (name, r) in runs.alg2_runs() {
            match &r.result {
                Ok(s) => {
                    let converged = s.report.termination == uavmon::jamming_opt::Termination::Converged;
                    let ok = nonincreasing(&s.report.objective_trace) && s.report.iterations <= 50 && converged;
                    passed &= ok;
                    parts.push(format!("{name}: {} it", s.report.iterations));
                }
                Err(e) => {
                    passed = false;
                    parts.push(format!("{name}: {e}"));
                }
            }
        }
        (passed, parts.join(", "))
    })
}

/// Random NF-region trajectories within the speed limit: a sine bump of
/// random amplitude plus jitter, redrawn until every step is flyable.
pub fn random_trajectories(seed: u64, count: usize, params: &SystemParams) -> Vec<Trajectory> {
    let nf = Scenario::preset(PresetName::Nf);
    let n = params.slots;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let amp = Point::new(rng.random_range(-150.0..150.0), rng.random_range(-150.0..150.0));
        let mut points: Vec<Point> = (0..=n)
            .map(|t| {
                let s = t as f64 / n as f64;
                let bump = (std::f64::consts::PI * s).sin();
                let base = nf.start.lerp(nf.end, s);
                Point::new(
                    base.x + amp.x * bump + rng.random_range(-2.0..2.0),
                    base.y + amp.y * bump + rng.random_range(-2.0..2.0),
                )
            })
            .collect();
        points[0] = nf.start;
        points[n] = nf.end;
        let traj = Trajectory::new(points);
        if traj.validate(&nf, params, 0.0).is_ok() {
            out.push(traj);
        }
    }
    out
}

/// Largest per-slot deviation of the pinned-trajectory jamming solve from
/// the closed form, relative to the closed form. A slot where the closed
/// form is zero counts as infinite deviation unless the solve is zero too.
pub fn pinned_deviation(traj: &Trajectory, params: &SystemParams) -> Result<f64, String> {
    let slacks = SlackState::tight(traj, params);
    let opts = SubproblemOptions {
        pin_trajectory: true,
        ..SubproblemOptions::default()
    };
    let sol = solve_subproblem_a(traj, &slacks, params, &opts).map_err(|e| e.to_string())?;
    let expect: Vec<f64> = traj.points[1..]
        .iter()
        .map(|p| jamming_power_closed_form(*p, params))
        .collect();
    Ok(sol
        .jamming
        .powers()
        .iter()
        .zip(&expect)
        .map(|(a, b)| match (*a == *b, *b > 0.0) {
            (true, _) => 0.0,
            (false, true) => (a - b).abs() / b,
            (false, false) => f64::INFINITY,
        })
        .fold(0.0, f64::max))
}

/// Pinned jamming solve reproduces the closed form.
pub fn criterion7(inputs: &SuiteInputs) -> CriterionResult {
    timed(7, "pinned jamming oracle", || {
        let params = horizon(20.0, 0.5);
        let mut worst = 0.0f64;
        for traj in random_trajectories(inputs.seed, 100, &params) {
            match pinned_deviation(&traj, &params) {
                Ok(d) => worst = worst.max(d),
                Err(e) => return (false, format!("solve failed: {e}")),
            }
        }
        (
            worst <= 1e-6,
            format!("100 trajectories, worst relative deviation {worst:.3e}"),
        )
    })
}

/// Two-slot NF instance: 8 s horizon in 4 s slots.
pub fn tiny_instance() -> (Scenario, SystemParams) {
    (Scenario::preset(PresetName::Nf), horizon(8.0, 4.0))
}

/// Least jamming energy over a 201 x 201 grid of middle waypoints spanning
/// the square of half-width one step around the start.
pub fn brute_force_tiny(scenario: &Scenario, params: &SystemParams) -> f64 {
    let r = params.max_step();
    let delta = params.delta();
    let last = jamming_power_closed_form(scenario.end, params);
    let mut best = f64::INFINITY;
    for i in 0..=200 {
        for j in 0..=200 {
            let p = Point::new(
                scenario.start.x - r + 2.0 * r * i as f64 / 200.0,
                scenario.start.y - r + 2.0 * r * j as f64 / 200.0,
            );
            if p.distance(scenario.start) > r || p.distance(scenario.end) > r {
                continue;
            }
            best = best.min(delta * (jamming_power_closed_form(p, params) + last));
        }
    }
    best
}

/// The optimizer is within 5% of a grid search on a two-slot instance.
pub fn criterion8() -> CriterionResult {
    timed(8, "two-slot grid oracle", || {
        let (scenario, params) = tiny_instance();
        let grid = brute_force_tiny(&scenario, &params);
        match algorithm1(&scenario, &params, &AoSettings::default()) {
            Ok(sol) => {
                let e = sol.total_jamming(params.delta());
                (
                    e <= 1.05 * grid,
                    format!("optimizer {e:.6e} J, grid minimum {grid:.6e} J"),
                )
            }
            Err(e) => (false, format!("optimizer failed: {e}")),
        }
    })
}

/// Every successive-approximation iterate satisfies the true constraints.
pub fn criterion9(runs: &SharedRuns) -> CriterionResult {
    timed(9, "approximation soundness", || {
        let mut worst_residual = f64::NEG_INFINITY;
        let mut worst_margin = f64::INFINITY;
        for (name, r) in runs.alg2_runs() {
            match &r.result {
                Ok(s) => {
                    for c in &s.iterate_checks {
                        worst_residual = worst_residual.max(c.max_slack_residual);
                        worst_margin = worst_margin.min(c.min_causality_margin);
                    }
                }
                Err(e) => return (false, format!("{name} failed: {e}")),
            }
        }
        (
            worst_residual <= 0.0 && worst_margin >= -1e-6,
            format!("worst slack residual {worst_residual:.3e}, worst causality margin {worst_margin:.3e} J"),
        )
    })
}

fn probe(rng: &mut ChaCha8Rng, k: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..k).map(|_| rng.random_range(lo..hi)).collect()
}

type Family = (&'static str, fn(&mut ChaCha8Rng) -> (Box<dyn SmoothFunction>, Vec<f64>));

fn families() -> Vec<Family> {
    vec![
        ("affine", |rng| {
            let c = probe(rng, 4, -3.0, 3.0);
            let f = Affine::new(&[(0, c[0]), (1, c[1]), (2, c[2])], c[3]);
            (Box::new(f), probe(rng, 3, -2.0, 2.0))
        }),
        ("speed", |rng| {
            let f = QuadraticForm::displacement(0, 1, 2, 3, rng.random_range(1.0..1e4), -1.0);
            (Box::new(f), probe(rng, 4, -1.5, 1.5))
        }),
        ("distance bound", |rng| {
            let h2 = rng.random_range(0.0..1.0);
            let f = QuadraticForm::diagonal(vec![0, 1, 2], &[1.0, 1.0, 0.0], vec![0.0, 0.0, -1.0], h2);
            (Box::new(f), probe(rng, 3, -2.0, 2.0))
        }),
        ("linearized slack", |rng| {
            let state = ScaState {
                q: vec![rng.random_range(0.1..1.0)],
                points: vec![
                    Point::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)),
                    Point::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)),
                ],
                iteration: 0,
            };
            let f = sca_linearized_constraint(1, &state, &PropulsionParams::default(), 0.5);
            let mut at = probe(rng, 5, -50.0, 50.0);
            at[0] = rng.random_range(0.05..2.0);
            (Box::new(f), at)
        }),
        ("inverse square", |rng| {
            let lin = probe(rng, 3, -2.0, 2.0);
            let f = InverseSquare::new(
                vec![0, 1, 2],
                rng.random_range(0.1..3.0),
                lin,
                rng.random_range(-1.0..1.0),
            );
            let mut at = probe(rng, 3, -2.0, 2.0);
            at[0] = rng.random_range(0.1..3.0);
            (Box::new(f), at)
        }),
        ("displacement cube", |rng| {
            let f = DisplacementCube::new(0, 1, 2, 3, rng.random_range(0.1..1e3));
            (Box::new(f), probe(rng, 4, -1.0, 1.0))
        }),
        ("energy consumption", |rng| {
            let c = probe(rng, 5, 0.01, 2.0);
            let f = Sum::new(vec![
                Box::new(Affine::new(&[(0, c[0]), (1, c[1]), (6, 1.0), (7, -1.0)], c[2])),
                Box::new(QuadraticForm::displacement(2, 3, 4, 5, c[3], 0.0)),
                Box::new(DisplacementCube::new(2, 3, 4, 5, c[4])),
            ]);
            (Box::new(f), probe(rng, 8, -1.0, 1.0))
        }),
    ]
}

/// Analytic gradients against finite differences, and solar continuity.
pub fn criterion10(inputs: &SuiteInputs) -> CriterionResult {
    timed(10, "numerical hygiene", || {
        let mut rng = ChaCha8Rng::seed_from_u64(inputs.seed);
        let mut passed = true;
        let mut worst = 0.0f64;
        for (name, make) in families() {
            for _ in 0..50 {
                let (f, at) = make(&mut rng);
                let err = gradient_mismatch(f.as_ref(), &at);
                worst = worst.max(err);
                if err > 1e-5 {
                    return (false, format!("{name}: gradient mismatch {err:.3e}"));
                }
                let e = f.evaluate(&at);
                let k = at.len();
                if (0..k).any(|r| (0..k).any(|c| e.hessian[r * k + c] != e.hessian[c * k + r])) {
                    return (false, format!("{name}: asymmetric Hessian"));
                }
            }
        }
        let sp = &inputs.solar;
        let mut jump = 0.0f64;
        for h in [sp.cloud_base, sp.cloud_top] {
            let at = solar_power(h, sp);
            jump = jump
                .max((solar_power(h - 1e-11, sp) - at).abs())
                .max((solar_power(h + 1e-11, sp) - at).abs());
        }
        passed &= jump <= 1e-9;
        (
            passed,
            format!("7 families x 50 probes, worst gradient mismatch {worst:.3e}; solar jump {jump:.3e} W"),
        )
    })
}

/// Non-outage rule on an optimized jamming profile.
pub fn criterion11(runs: &SharedRuns) -> CriterionResult {
    timed(11, "non-outage limits", || {
        let profile = match &runs.alg1_nf.result {
            Ok(s) => s.jamming.clone(),
            Err(e) => return (false, format!("alg1 failed: {e}")),
        };
        let n = profile.len();
        let total = profile.energy(1.0);
        let mut passed = true;
        let mut parts = Vec::new();
        for p_non in [0.0, 0.5, 1.0] {
            let (out, mask) = apply_non_outage(&profile, &NonOutageConfig { p_non });
            let zeroed = mask.iter().filter(|m| **m).count();
            let expect = ((1.0 - p_non) * n as f64 + 1e-9).floor() as usize;
            let masked_zero = (0..n).filter(|t| mask[*t]).all(|t| out.powers()[t] == 0.0);
            passed &= zeroed == expect && masked_zero && out.energy(1.0) <= total;
            if p_non == 1.0 {
                passed &= out == profile;
            }
            if p_non == 0.0 {
                passed &= out.powers().iter().all(|p| *p == 0.0);
            }
            parts.push(format!("p_non {p_non}: {zeroed}/{expect} zeroed"));
        }
        (passed, format!("{} of {n} slots", parts.join(", ")))
    })
}

/// Runs every criterion in order.
pub fn run_all(inputs: &SuiteInputs) -> Vec<CriterionResult> {
    let mut out = vec![criterion1(inputs), criterion2(inputs), criterion3(inputs)];
    let runs = SharedRuns::compute(inputs);
    out.push(criterion4(&runs));
    out.push(criterion5(&runs, inputs));
    out.push(criterion6(&runs));
    out.push(criterion7(inputs));
    out.push(criterion8());
    out.push(criterion9(&runs));
    out.push(criterion10(inputs));
    out.push(criterion11(&runs));
    out
}
