//! Jamming-energy minimization by alternating optimization.
//!
//! The eavesdropping condition `γ_U ≥ γ_D` is rewritten with two slacks per
//! slot: `u ≥ x² + y² + H²` (squared S–U distance) and `w` with
//! `u − 2dx + d² ≤ w` (squared U–D distance). Jamming must then satisfy
//! `u·w/d² − w − P·β₀/σ² ≤ 0`, which is jointly convex in `(P, x, y, u)`
//! once `w` is frozen. Each iteration solves that convex block and then
//! sets `w` to its smallest feasible value in closed form.
//!
//! Internally lengths are divided by `d`, squared lengths by `d²` and
//! powers by a reference power, so every constraint is of order one.

use serde::{Deserialize, Serialize};

use crate::convex::{self, Affine, ConvexProgram, QuadraticForm, SolveStatus, SolverSettings};
use crate::error::{ModelError, OptError};
use crate::model::{self, jamming_power_closed_form, NLoSParams, Point, Scenario, SystemParams, Trajectory};

/// Per-slot jamming powers (W).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct JammingProfile {
    powers: Vec<f64>,
}

impl JammingProfile {
    pub fn new(powers: Vec<f64>) -> Result<Self, ModelError> {
        if let Some((t, p)) = powers.iter().enumerate().find(|(_, p)| !(**p >= 0.0 && p.is_finite())) {
            return Err(ModelError::Invalid(format!(
                "jamming power of slot {} must be finite and nonnegative, got {p}",
                t + 1
            )));
        }
        Ok(Self { powers })
    }

    pub fn zeros(slots: usize) -> Self {
        Self {
            powers: vec![0.0; slots],
        }
    }

    /// Least jamming power per slot along `traj`.
    pub fn closed_form(traj: &Trajectory, params: &SystemParams) -> Self {
        Self {
            powers: traj.points[1..]
                .iter()
                .map(|p| jamming_power_closed_form(*p, params))
                .collect(),
        }
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    /// Total jamming energy (J) for slot length `delta`.
    pub fn energy(&self, delta: f64) -> f64 {
        self.powers.iter().sum::<f64>() * delta
    }
}

/// Slack variables of the convex reformulation, in m².
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SlackState {
    /// Upper bounds on the squared S–U distance.
    pub u: Vec<f64>,
    /// Upper bounds on the squared U–D distance.
    pub w: Vec<f64>,
}

impl SlackState {
    /// Slacks equal to the squared distances along `traj`.
    pub fn tight(traj: &Trajectory, params: &SystemParams) -> Self {
        let pts = &traj.points[1..];
        Self {
            u: pts.iter().map(|p| model::su_distance_sq(*p, params)).collect(),
            w: pts.iter().map(|p| model::ud_distance_sq(*p, params)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Relative objective decrease fell below the tolerance.
    Converged,
    IterationLimit,
}

/// Progress record of an alternating or successive-approximation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AoReport {
    /// Objective (J) at the start and after every iteration.
    pub objective_trace: Vec<f64>,
    /// Largest relative constraint violation at the start and after every
    /// iteration.
    pub violation_trace: Vec<f64>,
    pub iterations: usize,
    pub termination: Termination,
    /// Iterations whose block solution was discarded for not descending.
    pub rejected_steps: usize,
}

impl AoReport {
    pub(crate) fn start(objective: f64, violation: f64) -> Self {
        Self {
            objective_trace: vec![objective],
            violation_trace: vec![violation],
            iterations: 0,
            termination: Termination::IterationLimit,
            rejected_steps: 0,
        }
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace starts non-empty")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AoSettings {
    pub max_iterations: usize,
    /// Stop once an iteration lowers the objective by less than this
    /// fraction.
    pub relative_tolerance: f64,
    pub solver: SolverSettings,
}

impl Default for AoSettings {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            relative_tolerance: 1e-4,
            solver: SolverSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JammingSolution {
    pub trajectory: Trajectory,
    pub jamming: JammingProfile,
    pub slacks: SlackState,
    /// Slacks of the second monitored link, when there is one.
    pub second_link: Option<SlackState>,
    pub report: AoReport,
}

impl JammingSolution {
    pub fn total_jamming(&self, delta: f64) -> f64 {
        self.jamming.energy(delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonOutageConfig {
    /// Required fraction of slots with successful eavesdropping.
    pub p_non: f64,
}

impl NonOutageConfig {
    pub fn new(p_non: f64) -> Result<Self, ModelError> {
        let cfg = Self { p_non };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&self.p_non) {
            return Err(ModelError::Invalid(format!(
                "p_non must lie in [0, 1], got {}",
                self.p_non
            )));
        }
        Ok(())
    }
}

/// A second suspicious pair at `(0, s2)` and `(d, s2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoLinkParams {
    pub s2: f64,
}

/// Straight constant-speed flight with tight slacks and least jamming.
pub fn init_feasible(
    scenario: &Scenario,
    params: &SystemParams,
) -> Result<(Trajectory, JammingProfile, SlackState), OptError> {
    params.validate()?;
    scenario.check_feasible(params)?;
    let traj = Trajectory::straight(scenario.start, scenario.end, params.slots);
    let jam = JammingProfile::closed_form(&traj, params);
    let slacks = SlackState::tight(&traj, params);
    Ok((traj, jam, slacks))
}

/// Smallest `w` compatible with `u` and the current positions.
pub fn update_w(traj: &Trajectory, u: &[f64], params: &SystemParams) -> Vec<f64> {
    let d = params.sd_distance;
    let h2 = params.altitude * params.altitude;
    traj.points[1..]
        .iter()
        .zip(u)
        .map(|(p, u)| h2.max(u - 2.0 * d * p.x + d * d))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SubproblemOptions {
    /// Fix every waypoint, leaving only jamming powers and `u` free.
    pub pin_trajectory: bool,
    pub solver: SolverSettings,
}

/// Result of the convex block over jamming, positions and `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSolution {
    pub trajectory: Trajectory,
    pub jamming: JammingProfile,
    pub u: Vec<f64>,
}

/// Minimizes total jamming energy over `{P, x, y, u}` with `slacks.w`
/// frozen. Returned `u` is the squared S–U distance and `P` the least
/// power the frozen `w` allows at the new positions.
pub fn solve_subproblem_a(
    traj: &Trajectory,
    slacks: &SlackState,
    params: &SystemParams,
    opts: &SubproblemOptions,
) -> Result<SubproblemSolution, OptError> {
    params.validate()?;
    if traj.slots() != params.slots || slacks.w.len() != params.slots {
        return Err(ModelError::LengthMismatch {
            expected: params.slots,
            found: traj.slots().min(slacks.w.len()),
        }
        .into());
    }
    let geo = Geometry::new(params);
    let links = [LinkSpec::los(0.0, params.slots)];
    let pts = geo.scale_points(&traj.points);
    let w = vec![slacks.w.iter().map(|w| w / geo.d2()).collect::<Vec<_>>()];
    let step = a_step(&geo, &links, &pts, &w, opts.pin_trajectory, &opts.solver)?;
    let p_ref = params.noise_to_gain() * geo.d2();
    let trajectory = Trajectory::new(geo.unscale_points(&step.points));
    let jamming = JammingProfile::new(step.power.iter().map(|p| p * p_ref).collect())?;
    let u = step.u[0].iter().map(|u| u * geo.d2()).collect();
    Ok(SubproblemSolution { trajectory, jamming, u })
}

/// Alternating optimization of trajectory and jamming power.
pub fn algorithm1(
    scenario: &Scenario,
    params: &SystemParams,
    settings: &AoSettings,
) -> Result<JammingSolution, OptError> {
    init_feasible(scenario, params)?;
    let links = vec![LinkSpec::los(0.0, params.slots)];
    run_los(scenario, params, links, settings)
}

/// Alternating optimization against two suspicious links sharing one
/// jamming signal.
pub fn algorithm1_two_links(
    scenario: &Scenario,
    params: &SystemParams,
    tl: &TwoLinkParams,
    settings: &AoSettings,
) -> Result<JammingSolution, OptError> {
    init_feasible(scenario, params)?;
    if !tl.s2.is_finite() {
        return Err(OptError::Precondition("second link offset must be finite".into()));
    }
    let n = params.slots;
    if tl.s2 == 0.0 {
        // Coincident links impose the same constraints; duplicating them
        // would only perturb the barrier path.
        let mut sol = run_los(scenario, params, vec![LinkSpec::los(0.0, n)], settings)?;
        sol.second_link = Some(sol.slacks.clone());
        return Ok(sol);
    }
    let links = vec![LinkSpec::los(0.0, n), LinkSpec::los(tl.s2 / params.sd_distance, n)];
    run_los(scenario, params, links, settings)
}

/// Inside both jamming-free discs of the two-link geometry.
pub fn jamming_free_intersection(p: Point, tl: &TwoLinkParams, params: &SystemParams) -> bool {
    let d2 = params.sd_distance * params.sd_distance;
    let h2 = params.altitude * params.altitude;
    let dy = tl.s2 - p.y;
    model::in_jamming_free(p, params) && p.x * p.x + dy * dy + h2 <= d2
}

/// Least shared jamming power covering both links at `p`.
pub fn two_link_jamming_power(p: Point, tl: &TwoLinkParams, params: &SystemParams) -> f64 {
    let shifted = Point::new(p.x, p.y - tl.s2);
    jamming_power_closed_form(p, params).max(jamming_power_closed_form(shifted, params))
}

/// Finds a trajectory that stays inside the jamming-free disc, given both
/// endpoints inside it.
pub fn feasibility_jf(
    scenario: &Scenario,
    params: &SystemParams,
    solver: &SolverSettings,
) -> Result<Trajectory, OptError> {
    params.validate()?;
    for (name, p) in [("start", scenario.start), ("end", scenario.end)] {
        if !model::in_jamming_free(p, params) {
            return Err(OptError::Precondition(format!(
                "{name} point ({}, {}) lies outside the jamming-free area",
                p.x, p.y
            )));
        }
    }
    scenario.check_feasible(params)?;
    let n = params.slots;
    let geo = Geometry::new(params);
    let seed_traj = Trajectory::straight(scenario.start, scenario.end, n);
    if geo.is_degenerate(scenario, n) {
        return Ok(seed_traj);
    }
    let pts = geo.scale_points(&seed_traj.points);
    let mut prog = ConvexProgram::new(2 * (n + 1));
    let xi = |t: usize| 2 * t;
    let yi = |t: usize| 2 * t + 1;
    for t in [0, n] {
        prog.pin(xi(t), pts[t].x);
        prog.pin(yi(t), pts[t].y);
    }
    for t in 1..=n {
        prog.add_constraint(QuadraticForm::diagonal(
            vec![xi(t), yi(t)],
            &[1.0, 1.0],
            vec![0.0, 0.0],
            geo.h2 - 1.0,
        ));
        prog.add_constraint(geo.speed(xi(t), xi(t - 1), yi(t), yi(t - 1)));
    }
    let seed: Vec<f64> = pts.iter().flat_map(|p| [p.x, p.y]).collect();
    let z = convex::phase1_feasible(&prog, &seed, solver)?;
    let points = (0..=n).map(|t| Point::new(z[xi(t)], z[yi(t)])).collect::<Vec<_>>();
    Ok(Trajectory::new(geo.unscale_points(&points)))
}

/// Zeroes the `⌊(1 − p_non)·T_w⌋` largest entries, earlier slots first
/// among ties. The mask marks zeroed slots.
pub fn apply_non_outage(profile: &JammingProfile, cfg: &NonOutageConfig) -> (JammingProfile, Vec<bool>) {
    let n = profile.len();
    let p_non = cfg.p_non.clamp(0.0, 1.0);
    let count = (((1.0 - p_non) * n as f64) + 1e-9).floor() as usize;
    let count = count.min(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| profile.powers[b].total_cmp(&profile.powers[a]).then(a.cmp(&b)));
    let mut mask = vec![false; n];
    let mut powers = profile.powers.clone();
    for &t in &order[..count] {
        mask[t] = true;
        powers[t] = 0.0;
    }
    (JammingProfile { powers }, mask)
}

/// Largest relative shortfall of `γ_U` against `γ_D` over all slots.
pub fn eavesdropping_violation(traj: &Trajectory, jam: &JammingProfile, params: &SystemParams) -> f64 {
    traj.points[1..]
        .iter()
        .zip(jam.powers())
        .map(|(p, pj)| {
            let (gd, gu) = model::sinr_pair(*p, *pj, params);
            ((gd - gu) / gu).max(0.0)
        })
        .fold(0.0, f64::max)
}

/// Three-block alternating optimization under the urban channel model:
/// `{P, x, y}` by a convex solve, then `u` and `w` in closed form. The
/// S–D link sees one Rayleigh realization per slot drawn from `seed`.
pub fn algorithm1_nlos(
    scenario: &Scenario,
    params: &SystemParams,
    np: &NLoSParams,
    seed: u64,
    settings: &AoSettings,
) -> Result<JammingSolution, OptError> {
    np.validate()?;
    let h0 = model::rayleigh_sd_gains(seed, params.slots, np, params);
    algorithm1_nlos_with_gains(scenario, params, np, &h0, settings)
}

/// [`algorithm1_nlos`] with explicit per-slot S–D gains.
pub fn algorithm1_nlos_with_gains(
    scenario: &Scenario,
    params: &SystemParams,
    np: &NLoSParams,
    sd_gains: &[f64],
    settings: &AoSettings,
) -> Result<JammingSolution, OptError> {
    np.validate()?;
    if np.path_loss_exponent != 2.0 {
        return Err(OptError::Precondition(format!(
            "the quadratic gain approximation needs path-loss exponent 2, got {}",
            np.path_loss_exponent
        )));
    }
    if sd_gains.len() != params.slots {
        return Err(ModelError::LengthMismatch {
            expected: params.slots,
            found: sd_gains.len(),
        }
        .into());
    }
    init_feasible(scenario, params)?;
    if np.eta2 == 0.0 {
        // The jamming constraint is then affine in (u, P) for fixed w, so
        // u joins the convex block exactly as in the line-of-sight case.
        let d2 = params.sd_distance * params.sd_distance;
        let ratio = sd_gains.iter().map(|h| h * d2 / np.eta1).collect();
        let links = vec![LinkSpec {
            offset: 0.0,
            gain_ratio: ratio,
        }];
        let p_ref = params.noise_power() * d2 / np.eta1;
        return run_ao(scenario, params, links, p_ref, settings);
    }
    run_nlos_three_block(scenario, params, np, sd_gains, settings)
}

// ---------------------------------------------------------------------------
// Shared scaled machinery.

/// Problem constants in scaled units.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Geometry {
    pub d: f64,
    /// (H/d)².
    pub h2: f64,
    /// Per-slot travel limit over d.
    pub step: f64,
}

impl Geometry {
    pub fn new(params: &SystemParams) -> Self {
        let d = params.sd_distance;
        Self {
            d,
            h2: (params.altitude / d).powi(2),
            step: params.max_step() / d,
        }
    }

    pub fn d2(&self) -> f64 {
        self.d * self.d
    }

    pub fn scale_points(&self, pts: &[Point]) -> Vec<Point> {
        pts.iter().map(|p| Point::new(p.x / self.d, p.y / self.d)).collect()
    }

    pub fn unscale_points(&self, pts: &[Point]) -> Vec<Point> {
        pts.iter().map(|p| Point::new(p.x * self.d, p.y * self.d)).collect()
    }

    /// No spare time: the straight line at full speed is the only path.
    pub fn is_degenerate(&self, scenario: &Scenario, slots: usize) -> bool {
        scenario.min_distance() / self.d >= self.step * slots as f64 * (1.0 - 1e-9)
    }

    /// `‖p_a − p_b‖²/step² − 1 ≤ 0`.
    pub fn speed(&self, xa: usize, xb: usize, ya: usize, yb: usize) -> QuadraticForm {
        QuadraticForm::displacement(xa, xb, ya, yb, 1.0 / (self.step * self.step), -1.0)
    }

    pub fn link_u(&self, p: Point, offset: f64) -> f64 {
        let dy = p.y - offset;
        p.x * p.x + dy * dy + self.h2
    }

    pub fn link_w(&self, p: Point, offset: f64) -> f64 {
        let dx = 1.0 - p.x;
        let dy = p.y - offset;
        dx * dx + dy * dy + self.h2
    }

    /// `x² + (y − offset)² + h² − u ≤ 0`.
    pub fn distance_bound(&self, x: usize, y: usize, u: usize, offset: f64) -> QuadraticForm {
        QuadraticForm::diagonal(
            vec![x, y, u],
            &[1.0, 1.0, 0.0],
            vec![0.0, -2.0 * offset, -1.0],
            offset * offset + self.h2,
        )
    }
}

/// One monitored link: its lateral offset and, per slot, the ratio of the
/// S–D gain to the free-space gain at distance d (1 under line of sight).
#[derive(Debug, Clone)]
pub(crate) struct LinkSpec {
    pub offset: f64,
    pub gain_ratio: Vec<f64>,
}

impl LinkSpec {
    fn los(offset: f64, slots: usize) -> Self {
        Self {
            offset,
            gain_ratio: vec![1.0; slots],
        }
    }

    /// Scaled least power with the given slacks: `max(0, w(a·u − 1))`.
    fn power(&self, t: usize, u: f64, w: f64) -> f64 {
        (w * (self.gain_ratio[t - 1] * u - 1.0)).max(0.0)
    }
}

/// Least scaled power over all links with tight slacks at `p`.
fn required_power(geo: &Geometry, links: &[LinkSpec], t: usize, p: Point) -> f64 {
    links
        .iter()
        .map(|l| l.power(t, geo.link_u(p, l.offset), geo.link_w(p, l.offset)))
        .fold(0.0, f64::max)
}

fn required_profile(geo: &Geometry, links: &[LinkSpec], pts: &[Point]) -> Vec<f64> {
    (1..pts.len()).map(|t| required_power(geo, links, t, pts[t])).collect()
}

pub(crate) struct AStep {
    pub points: Vec<Point>,
    pub power: Vec<f64>,
    /// Per link, per slot.
    pub u: Vec<Vec<f64>>,
}

/// Convex block over scaled `{P, x, y, u_ℓ}` with every `w_ℓ` frozen.
fn a_step(
    geo: &Geometry,
    links: &[LinkSpec],
    pts: &[Point],
    w: &[Vec<f64>],
    pin_all: bool,
    solver: &SolverSettings,
) -> Result<AStep, OptError> {
    let n = pts.len() - 1;
    let nl = links.len();
    let stride = 3 + nl;
    let base = |t: usize| 2 + (t - 1) * stride;
    let pi = |t: usize| base(t);
    let xi = |t: usize| if t == 0 { 0 } else { base(t) + 1 };
    let yi = |t: usize| if t == 0 { 1 } else { base(t) + 2 };
    let ui = |t: usize, l: usize| base(t) + 3 + l;

    let mut prog = ConvexProgram::new(2 + n * stride);
    let mut seed = vec![0.0; prog.dim()];
    for t in 0..=n {
        seed[xi(t)] = pts[t].x;
        seed[yi(t)] = pts[t].y;
        if t == 0 || t == n || pin_all {
            prog.pin(xi(t), pts[t].x);
            prog.pin(yi(t), pts[t].y);
        }
    }
    for t in 1..=n {
        let positions_pinned = t == n || pin_all;
        let mut seed_power: f64 = 0.0;
        prog.add_objective(Affine::new(&[(pi(t), 1.0 / n as f64)], 0.0));
        prog.add_constraint(Affine::new(&[(pi(t), -1.0)], 0.0));
        prog.add_constraint(geo.speed(xi(t), xi(t - 1), yi(t), yi(t - 1)));
        for (l, link) in links.iter().enumerate() {
            let wf = w[l][t - 1];
            let a = link.gain_ratio[t - 1];
            let lo = geo.link_u(pts[t], link.offset);
            seed[ui(t, l)] = lo;
            seed_power = seed_power.max(link.power(t, lo, wf));
            if positions_pinned {
                let hi = wf + 2.0 * pts[t].x - 1.0;
                if hi - lo <= 1e-10 * hi.abs().max(1.0) {
                    prog.pin(ui(t, l), lo);
                }
            }
            prog.add_constraint(geo.distance_bound(xi(t), yi(t), ui(t, l), link.offset));
            prog.add_constraint(Affine::new(&[(ui(t, l), 1.0), (xi(t), -2.0)], 1.0 - wf));
            prog.add_constraint(Affine::new(&[(ui(t, l), a * wf), (pi(t), -1.0)], -wf));
        }
        seed[pi(t)] = seed_power;
    }
    let result = convex::solve_from_seed(&prog, &seed, solver)?;
    if result.status != SolveStatus::Converged {
        return Err(OptError::Solver(crate::error::SolverError::IterationLimit(
            "the jamming block reached its tolerance",
        )));
    }
    let z = &result.x;
    let points: Vec<Point> = (0..=n).map(|t| Point::new(z[xi(t)], z[yi(t)])).collect();
    let mut u = vec![Vec::with_capacity(n); nl];
    let mut power = Vec::with_capacity(n);
    for t in 1..=n {
        let mut p: f64 = 0.0;
        for (l, link) in links.iter().enumerate() {
            let tight = geo.link_u(points[t], link.offset);
            u[l].push(tight);
            p = p.max(link.power(t, tight, w[l][t - 1]));
        }
        power.push(p);
    }
    Ok(AStep { points, power, u })
}

fn max_speed_violation(geo: &Geometry, pts: &[Point]) -> f64 {
    pts.windows(2)
        .map(|w| (w[0].distance(w[1]) / geo.step - 1.0).max(0.0))
        .fold(0.0, f64::max)
}

fn run_los(
    scenario: &Scenario,
    params: &SystemParams,
    links: Vec<LinkSpec>,
    settings: &AoSettings,
) -> Result<JammingSolution, OptError> {
    let p_ref = params.noise_to_gain() * params.sd_distance * params.sd_distance;
    let sol = run_ao(scenario, params, links, p_ref, settings)?;
    let violation = eavesdropping_violation(&sol.trajectory, &sol.jamming, params);
    if violation > 1e-6 {
        return Err(OptError::Precondition(format!(
            "result misses the eavesdropping condition by {violation:e} (relative)"
        )));
    }
    Ok(sol)
}

/// Outcome of one descent check in an alternating loop.
pub(crate) enum Progress {
    Continue,
    Stop,
}

/// Accepts `candidate` if it does not raise the objective and decides
/// whether to continue. Returns whether the candidate was accepted.
pub(crate) fn record_iteration(
    report: &mut AoReport,
    candidate: f64,
    violation: f64,
    settings: &AoSettings,
) -> (bool, Progress) {
    let prev = report.final_objective();
    report.iterations += 1;
    if candidate > prev {
        report.rejected_steps += 1;
        report.termination = Termination::Converged;
        return (false, Progress::Stop);
    }
    report.objective_trace.push(candidate);
    report.violation_trace.push(violation);
    let decrease = if prev > 0.0 { (prev - candidate) / prev } else { 0.0 };
    if decrease < settings.relative_tolerance {
        report.termination = Termination::Converged;
        return (true, Progress::Stop);
    }
    if report.iterations >= settings.max_iterations {
        report.termination = Termination::IterationLimit;
        return (true, Progress::Stop);
    }
    (true, Progress::Continue)
}

fn run_ao(
    scenario: &Scenario,
    params: &SystemParams,
    links: Vec<LinkSpec>,
    p_ref: f64,
    settings: &AoSettings,
) -> Result<JammingSolution, OptError> {
    let n = params.slots;
    let geo = Geometry::new(params);
    let delta = params.delta();
    let pin_all = geo.is_degenerate(scenario, n);
    let straight = Trajectory::straight(scenario.start, scenario.end, n);
    let mut pts = geo.scale_points(&straight.points);
    let energy = |power: &[f64]| power.iter().sum::<f64>() * p_ref * delta;
    let mut power = required_profile(&geo, &links, &pts);
    let mut report = AoReport::start(energy(&power), max_speed_violation(&geo, &pts));
    if report.final_objective() > 0.0 && settings.max_iterations > 0 {
        loop {
            let w: Vec<Vec<f64>> = links
                .iter()
                .map(|l| pts[1..].iter().map(|p| geo.link_w(*p, l.offset)).collect())
                .collect();
            let step = a_step(&geo, &links, &pts, &w, pin_all, &settings.solver)?;
            // The w update followed by re-tightening P gives the least power
            // at the new positions.
            let candidate = required_profile(&geo, &links, &step.points);
            let violation = max_speed_violation(&geo, &step.points);
            let (accepted, progress) = record_iteration(&mut report, energy(&candidate), violation, settings);
            if accepted {
                pts = step.points;
                power = candidate;
            }
            if let Progress::Stop = progress {
                break;
            }
        }
    } else {
        report.termination = Termination::Converged;
    }
    let trajectory = Trajectory::new(geo.unscale_points(&pts));
    let jamming = JammingProfile::new(power.iter().map(|p| p * p_ref).collect())?;
    let slack = |offset: f64| SlackState {
        u: pts[1..].iter().map(|p| geo.link_u(*p, offset) * geo.d2()).collect(),
        w: pts[1..].iter().map(|p| geo.link_w(*p, offset) * geo.d2()).collect(),
    };
    Ok(JammingSolution {
        slacks: slack(links[0].offset),
        second_link: links.get(1).map(|l| slack(l.offset)),
        trajectory,
        jamming,
        report,
    })
}

/// Least jamming power under the urban model for given slacks (m²).
pub fn nlos_required_power(sd_gain: f64, u: f64, w: f64, np: &NLoSParams, params: &SystemParams) -> f64 {
    let g1 = np.eta1 + np.eta2 * u;
    let g2 = np.eta1 + np.eta2 * w;
    (params.noise_power() * (sd_gain * u * w - g1 * w) / (g1 * g2)).max(0.0)
}

fn run_nlos_three_block(
    scenario: &Scenario,
    params: &SystemParams,
    np: &NLoSParams,
    sd_gains: &[f64],
    settings: &AoSettings,
) -> Result<JammingSolution, OptError> {
    let n = params.slots;
    let geo = Geometry::new(params);
    let d2 = geo.d2();
    let delta = params.delta();
    let pin_all = geo.is_degenerate(scenario, n);
    let straight = Trajectory::straight(scenario.start, scenario.end, n);
    let mut pts = geo.scale_points(&straight.points);
    let tight = |pts: &[Point]| -> (Vec<f64>, Vec<f64>) {
        (
            pts[1..].iter().map(|p| geo.link_u(*p, 0.0)).collect(),
            pts[1..].iter().map(|p| geo.link_w(*p, 0.0)).collect(),
        )
    };
    let powers = |u: &[f64], w: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|t| nlos_required_power(sd_gains[t], u[t] * d2, w[t] * d2, np, params))
            .collect()
    };
    let (mut u, mut w) = tight(&pts);
    let mut power = powers(&u, &w);
    let energy = |p: &[f64]| p.iter().sum::<f64>() * delta;
    let mut report = AoReport::start(energy(&power), max_speed_violation(&geo, &pts));
    if report.final_objective() > 0.0 && settings.max_iterations > 0 {
        loop {
            // Block 1: power is fixed by the frozen slacks, so the solve
            // only recentres the positions inside their feasible region.
            let moved = nlos_position_block(&geo, &pts, &u, &w, pin_all, &settings.solver)?;
            // Blocks 2 and 3: smallest u, then smallest w.
            let (nu, nw) = tight(&moved);
            let candidate = powers(&nu, &nw);
            let violation = max_speed_violation(&geo, &moved);
            let (accepted, progress) = record_iteration(&mut report, energy(&candidate), violation, settings);
            if accepted {
                pts = moved;
                u = nu;
                w = nw;
                power = candidate;
            }
            if let Progress::Stop = progress {
                break;
            }
        }
    } else {
        report.termination = Termination::Converged;
    }
    Ok(JammingSolution {
        trajectory: Trajectory::new(geo.unscale_points(&pts)),
        jamming: JammingProfile::new(power)?,
        slacks: SlackState {
            u: u.iter().map(|v| v * d2).collect(),
            w: w.iter().map(|v| v * d2).collect(),
        },
        second_link: None,
        report,
    })
}

/// Positions with `u` and `w` frozen: `x² + y² + h² ≤ u`,
/// `u − 2x + 1 ≤ w` and the speed chain.
fn nlos_position_block(
    geo: &Geometry,
    pts: &[Point],
    u: &[f64],
    w: &[f64],
    pin_all: bool,
    solver: &SolverSettings,
) -> Result<Vec<Point>, OptError> {
    let n = pts.len() - 1;
    let xi = |t: usize| 2 * t;
    let yi = |t: usize| 2 * t + 1;
    let mut prog = ConvexProgram::new(2 * (n + 1));
    for t in 0..=n {
        if t == 0 || t == n || pin_all {
            prog.pin(xi(t), pts[t].x);
            prog.pin(yi(t), pts[t].y);
        }
    }
    for t in 1..=n {
        prog.add_constraint(QuadraticForm::diagonal(
            vec![xi(t), yi(t)],
            &[1.0, 1.0],
            vec![0.0, 0.0],
            geo.h2 - u[t - 1],
        ));
        prog.add_constraint(Affine::new(&[(xi(t), -2.0)], u[t - 1] + 1.0 - w[t - 1]));
        prog.add_constraint(geo.speed(xi(t), xi(t - 1), yi(t), yi(t - 1)));
    }
    let seed: Vec<f64> = pts.iter().flat_map(|p| [p.x, p.y]).collect();
    let z = match convex::phase1_feasible(&prog, &seed, solver) {
        Ok(z) => z,
        // A region without interior leaves the positions where they are.
        Err(crate::error::SolverError::Infeasible { .. }) => seed,
        Err(e) => return Err(e.into()),
    };
    Ok((0..=n).map(|t| Point::new(z[xi(t)], z[yi(t)])).collect())
}
