//! Total-energy minimization for a solar-powered rotary-wing UAV.
//!
//! Propulsion power is made convex by replacing the induced-power root with
//! a slack `q` that satisfies `1/q² ≤ q² + ‖Δp‖²/v̂²` (`v̂ = v₀δ`). That
//! constraint is nonconvex; each iteration replaces its right-hand side by
//! the first-order expansion at the current iterate, which is a global
//! under-estimator, so every iterate stays feasible for the true
//! constraint. Energy-harvesting causality is kept banded through
//! cumulative-consumption variables `e_t ≥ e_{t−1} + consumed_t`.

use serde::{Deserialize, Serialize};

use crate::baselines::{self, BaselineKind};
use crate::convex::{self, Affine, ConvexProgram, DisplacementCube, InverseSquare, QuadraticForm, SmoothFunction, Sum};
use crate::error::OptError;
use crate::jamming_opt::{record_iteration, AoReport, AoSettings, Geometry, JammingProfile, Progress, SlackState};
use crate::model::{
    evaluate_ledger, induced_factor, propulsion_power, solar_power, EnergyLedger, Point, PropulsionParams, Scenario,
    SolarParams, SystemParams, Trajectory,
};

/// Relative amount by which the frozen UAV-to-destination slack exceeds its
/// exact value in each convex step.
const W_WIDENING: f64 = 1e-7;

/// Lower bound kept on the induced-power slack.
pub const Q_MIN: f64 = 1e-4;

/// Relative head-room added to `q` above the exact induced-power root, so
/// iterates satisfy the slack inequality strictly despite rounding.
const Q_HEADROOM: f64 = 1e-12;

/// Convexified propulsion power of one slot (W).
pub fn tilde_pm(p: Point, prev: Point, q: f64, pp: &PropulsionParams, delta: f64) -> f64 {
    let r2 = (p.x - prev.x).powi(2) + (p.y - prev.y).powi(2);
    pp.blade_power
        + 3.0 * pp.blade_power / (pp.tip_speed * pp.tip_speed * delta * delta) * r2
        + pp.induced_power * q
        + pp.parasite_coefficient() / delta.powi(3) * r2 * r2.sqrt()
}

/// Induced-power slack at equality for speed `speed`.
pub fn q_from_speed(speed: f64, pp: &PropulsionParams) -> f64 {
    induced_factor(speed, pp)
}

/// `1/q² − q² − ‖Δp‖²/v̂²`; nonpositive when the slack is valid.
pub fn slack_residual(q: f64, p: Point, prev: Point, pp: &PropulsionParams, delta: f64) -> f64 {
    let vhat2 = (pp.hover_induced_velocity * delta).powi(2);
    let r2 = (p.x - prev.x).powi(2) + (p.y - prev.y).powi(2);
    1.0 / (q * q) - q * q - r2 / vhat2
}

/// Local point of the successive approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaState {
    pub q: Vec<f64>,
    pub points: Vec<Point>,
    pub iteration: usize,
}

/// The expanded slack constraint of slot `slot` (1-based) around `state`,
/// over local variables `[q, x_t, x_{t−1}, y_t, y_{t−1}]` = `[0, 1, 2, 3, 4]`
/// in physical units:
///
/// `1/q² ≤ q_l² + 2q_l(q − q_l) + (2Δp_l·Δp − ‖Δp_l‖²)/v̂²`.
pub fn sca_linearized_constraint(slot: usize, state: &ScaState, pp: &PropulsionParams, delta: f64) -> InverseSquare {
    let vhat2 = (pp.hover_induced_velocity * delta).powi(2);
    let dp = [
        state.points[slot].x - state.points[slot - 1].x,
        state.points[slot].y - state.points[slot - 1].y,
    ];
    linearized_slack([0, 1, 2, 3, 4], state.q[slot - 1], dp, 1.0 / vhat2)
}

/// Expanded slack constraint on `support = [q, x_t, x_{t−1}, y_t, y_{t−1}]`
/// where `c` is `1/v̂²` in the units of the position variables.
fn linearized_slack(support: [usize; 5], q_l: f64, dp: [f64; 2], c: f64) -> InverseSquare {
    let linear = vec![
        -2.0 * q_l,
        -2.0 * c * dp[0],
        2.0 * c * dp[0],
        -2.0 * c * dp[1],
        2.0 * c * dp[1],
    ];
    let constant = q_l * q_l + c * (dp[0] * dp[0] + dp[1] * dp[1]);
    InverseSquare::new(support.to_vec(), 1.0, linear, constant)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergySettings {
    pub ao: AoSettings,
    /// Optimize from every budget-feasible starting trajectory, not only
    /// the cheapest.
    pub multi_start: bool,
}

impl Default for EnergySettings {
    fn default() -> Self {
        Self {
            ao: AoSettings::default(),
            multi_start: true,
        }
    }
}

/// Feasibility evidence recorded for each iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterateCheck {
    /// Largest `1/q² − q² − ‖Δp‖²/v̂²` over slots.
    pub max_slack_residual: f64,
    /// Smallest causality margin over slots (J).
    pub min_causality_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySolution {
    pub trajectory: Trajectory,
    pub jamming: JammingProfile,
    pub slacks: SlackState,
    pub q: Vec<f64>,
    pub ledger: EnergyLedger,
    pub report: AoReport,
    /// One entry for the start and one per accepted iterate.
    pub iterate_checks: Vec<IterateCheck>,
}

impl EnergySolution {
    pub fn total_energy(&self) -> f64 {
        self.ledger.total_flight_energy()
    }
}

/// Causality margins `Σ E·δ + ϑE₀ − Σ (P_j + P_m + P_c)·δ` per slot.
pub fn causality_margins(ledger: &EnergyLedger, params: &SystemParams) -> Vec<f64> {
    let reserve = params.usable_fraction * params.initial_energy;
    (0..ledger.slots())
        .map(|t| {
            ledger.cumulative_harvested[t] + reserve
                - ledger.cumulative_jamming[t]
                - ledger.cumulative_propulsion[t]
                - ledger.cumulative_circuit[t]
        })
        .collect()
}

/// Causality margins of `solution` with harvesting recomputed from `sp`.
pub fn verify_causality(solution: &EnergySolution, params: &SystemParams, sp: &SolarParams) -> Vec<f64> {
    let harvest = solar_power(params.altitude, sp) * params.delta();
    let reserve = params.usable_fraction * params.initial_energy;
    let l = &solution.ledger;
    (0..l.slots())
        .map(|t| {
            (t + 1) as f64 * harvest + reserve
                - l.cumulative_jamming[t]
                - l.cumulative_propulsion[t]
                - l.cumulative_circuit[t]
        })
        .collect()
}

/// Candidate starting trajectories: the straight line, then every
/// reference scheme that can be flown within the speed limit.
pub fn seed_trajectories(scenario: &Scenario, params: &SystemParams, pp: &PropulsionParams) -> Vec<Trajectory> {
    let mut seeds = vec![Trajectory::straight(scenario.start, scenario.end, params.slots)];
    if Geometry::new(params).is_degenerate(scenario, params.slots) {
        return seeds;
    }
    for kind in BaselineKind::ALL {
        if kind == BaselineKind::LowSpeed {
            continue;
        }
        if let Ok(traj) = baselines::generate(&kind, scenario, params, pp) {
            if !seeds.contains(&traj) {
                seeds.push(traj);
            }
        }
    }
    seeds
}

/// The starting trajectory with the least energy among those of
/// [`seed_trajectories`] that respect the energy budget in every slot,
/// with exact slacks.
///
/// When none does, the error names the first violating slot of the
/// candidate needing the least initial energy, and that energy.
pub fn init_feasible_energy(
    scenario: &Scenario,
    params: &SystemParams,
    pp: &PropulsionParams,
    sp: &SolarParams,
) -> Result<EnergySolution, OptError> {
    let ctx = Context::checked(scenario, params, pp, sp)?;
    let mut feasible = ctx.feasible_seeds(scenario)?;
    if feasible.is_empty() {
        return Err(ctx.budget_error(scenario)?);
    }
    feasible.sort_by(|a, b| a.report.final_objective().total_cmp(&b.report.final_objective()));
    Ok(feasible.swap_remove(0))
}

/// Successive convex approximation of jamming plus propulsion energy.
///
/// Runs from every budget-feasible starting trajectory (or only the best
/// one when `multi_start` is off) and returns the run with the least
/// final objective.
pub fn algorithm2(
    scenario: &Scenario,
    params: &SystemParams,
    pp: &PropulsionParams,
    sp: &SolarParams,
    settings: &EnergySettings,
) -> Result<EnergySolution, OptError> {
    let ctx = Context::checked(scenario, params, pp, sp)?;
    let mut seeds = ctx.feasible_seeds(scenario)?;
    if seeds.is_empty() {
        return Err(ctx.budget_error(scenario)?);
    }
    seeds.sort_by(|a, b| a.report.final_objective().total_cmp(&b.report.final_objective()));
    if !settings.multi_start {
        seeds.truncate(1);
    }
    let mut best: Option<EnergySolution> = None;
    for seed in &seeds {
        let run = ctx.run(&seed.trajectory, &settings.ao)?;
        if best
            .as_ref()
            .is_none_or(|b| run.report.final_objective() < b.report.final_objective())
        {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one seed"))
}

/// Iterate in scaled units: positions over d, squared lengths over d²,
/// jamming over the reference power.
#[derive(Debug, Clone)]
struct State {
    points: Vec<Point>,
    power: Vec<f64>,
    q: Vec<f64>,
    u: Vec<f64>,
    w: Vec<f64>,
}

struct Context<'a> {
    params: &'a SystemParams,
    pp: &'a PropulsionParams,
    sp: &'a SolarParams,
    geo: Geometry,
    n: usize,
    delta: f64,
    p_ref: f64,
    /// Hovering energy over the horizon; the unit of energy variables.
    e_ref: f64,
    pin_all: bool,
}

/// Variable kinds of one slot, in layout order.
#[derive(Clone, Copy)]
enum Var {
    P = 0,
    Q = 1,
    X = 2,
    Y = 3,
    U = 4,
    W = 5,
    E = 6,
}

const STRIDE: usize = 7;

fn idx(t: usize, v: Var) -> usize {
    match (t, v) {
        (0, Var::X) => 0,
        (0, Var::Y) => 1,
        _ => 2 + (t - 1) * STRIDE + v as usize,
    }
}

impl<'a> Context<'a> {
    fn new(scenario: &Scenario, params: &'a SystemParams, pp: &'a PropulsionParams, sp: &'a SolarParams) -> Self {
        let geo = Geometry::new(params);
        let n = params.slots;
        let delta = params.delta();
        Self {
            params,
            pp,
            sp,
            geo,
            n,
            delta,
            p_ref: params.noise_to_gain() * geo.d2(),
            e_ref: (pp.blade_power + pp.induced_power + params.circuit_power) * params.horizon,
            pin_all: geo.is_degenerate(scenario, n),
        }
    }

    fn checked(
        scenario: &Scenario,
        params: &'a SystemParams,
        pp: &'a PropulsionParams,
        sp: &'a SolarParams,
    ) -> Result<Self, OptError> {
        params.validate()?;
        pp.validate()?;
        sp.validate()?;
        scenario.check_feasible(params)?;
        Ok(Self::new(scenario, params, pp, sp))
    }

    /// Unoptimized solution flying `traj` with exact slacks.
    fn seed_solution(&self, traj: &Trajectory) -> Result<EnergySolution, OptError> {
        let state = self.tighten(self.geo.scale_points(&traj.points));
        let start = AoReport::start(self.objective(&state), self.violation(&state));
        self.solution(&state, start, vec![self.check(&state)])
    }

    fn feasible_seeds(&self, scenario: &Scenario) -> Result<Vec<EnergySolution>, OptError> {
        let mut out = Vec::new();
        for traj in seed_trajectories(scenario, self.params, self.pp) {
            let sol = self.seed_solution(&traj)?;
            if causality_margins(&sol.ledger, self.params).iter().all(|m| *m >= 0.0) {
                out.push(sol);
            }
        }
        Ok(out)
    }

    /// Budget violation of the candidate start needing the least initial
    /// energy.
    fn budget_error(&self, scenario: &Scenario) -> Result<OptError, OptError> {
        let mut best: Option<OptError> = None;
        let mut best_required = f64::INFINITY;
        for traj in seed_trajectories(scenario, self.params, self.pp) {
            let l = self.seed_solution(&traj)?.ledger;
            let margins = causality_margins(&l, self.params);
            let Some(t) = margins.iter().position(|m| *m < 0.0) else {
                continue;
            };
            let required = (0..l.slots())
                .map(|k| {
                    l.cumulative_jamming[k] + l.cumulative_propulsion[k] + l.cumulative_circuit[k]
                        - l.cumulative_harvested[k]
                })
                .fold(0.0, f64::max)
                / self.params.usable_fraction;
            if best.is_none() || required < best_required {
                best_required = required;
                best = Some(OptError::InfeasibleInitial {
                    slot: t + 1,
                    margin: margins[t],
                    required,
                });
            }
        }
        Ok(best.expect("called only when no start is feasible"))
    }

    /// Successive approximation from `traj`.
    fn run(&self, traj: &Trajectory, ao: &AoSettings) -> Result<EnergySolution, OptError> {
        let mut state = self.tighten(self.geo.scale_points(&traj.points));
        let mut report = AoReport::start(self.objective(&state), self.violation(&state));
        let mut checks = vec![self.check(&state)];
        if ao.max_iterations > 0 {
            loop {
                let candidate = self.step(&state, &ao.solver)?;
                let (accepted, progress) =
                    record_iteration(&mut report, self.objective(&candidate), self.violation(&candidate), ao);
                if accepted {
                    checks.push(self.check(&candidate));
                    state = candidate;
                }
                if let Progress::Stop = progress {
                    break;
                }
            }
        }
        self.solution(&state, report, checks)
    }

    fn vhat2_scaled(&self) -> f64 {
        (self.pp.hover_induced_velocity * self.delta / self.geo.d).powi(2)
    }

    fn exact_q(&self, a: Point, b: Point) -> f64 {
        let speed = a.distance(b) * self.geo.d / self.delta;
        (q_from_speed(speed, self.pp) * (1.0 + Q_HEADROOM)).max(Q_MIN)
    }

    /// Exact slacks, least jamming and exact `q` for the given positions.
    fn tighten(&self, points: Vec<Point>) -> State {
        let geo = &self.geo;
        let u: Vec<f64> = points[1..].iter().map(|p| geo.link_u(*p, 0.0)).collect();
        let w: Vec<f64> = points[1..].iter().map(|p| geo.link_w(*p, 0.0)).collect();
        let power = u.iter().zip(&w).map(|(u, w)| (w * (u - 1.0)).max(0.0)).collect();
        let q = points.windows(2).map(|s| self.exact_q(s[1], s[0])).collect();
        State { points, power, q, u, w }
    }

    fn physical(&self, s: &State) -> (Trajectory, JammingProfile) {
        let traj = Trajectory::new(self.geo.unscale_points(&s.points));
        let jam = JammingProfile::new(s.power.iter().map(|p| p * self.p_ref).collect())
            .expect("scaled powers are nonnegative");
        (traj, jam)
    }

    /// Jamming plus convexified propulsion energy (J).
    fn objective(&self, s: &State) -> f64 {
        let (traj, jam) = self.physical(s);
        let prop: f64 = (1..=self.n)
            .map(|t| tilde_pm(traj.points[t], traj.points[t - 1], s.q[t - 1], self.pp, self.delta))
            .sum();
        jam.energy(self.delta) + prop * self.delta
    }

    fn check(&self, s: &State) -> IterateCheck {
        let (traj, jam) = self.physical(s);
        let max_slack_residual = (1..=self.n)
            .map(|t| slack_residual(s.q[t - 1], traj.points[t], traj.points[t - 1], self.pp, self.delta))
            .fold(f64::NEG_INFINITY, f64::max);
        let min_causality_margin = evaluate_ledger(&traj, &jam, self.params, self.pp, self.sp)
            .map(|l| {
                causality_margins(&l, self.params)
                    .into_iter()
                    .fold(f64::INFINITY, f64::min)
            })
            .unwrap_or(f64::NAN);
        IterateCheck {
            max_slack_residual,
            min_causality_margin,
        }
    }

    fn violation(&self, s: &State) -> f64 {
        let c = self.check(s);
        let speed = s
            .points
            .windows(2)
            .map(|w| (w[0].distance(w[1]) / self.geo.step - 1.0).max(0.0))
            .fold(0.0, f64::max);
        let budget = (-c.min_causality_margin / self.e_ref).max(0.0);
        speed.max(budget).max(c.max_slack_residual.max(0.0))
    }

    fn solution(
        &self,
        s: &State,
        report: AoReport,
        iterate_checks: Vec<IterateCheck>,
    ) -> Result<EnergySolution, OptError> {
        let (trajectory, jamming) = self.physical(s);
        let ledger = evaluate_ledger(&trajectory, &jamming, self.params, self.pp, self.sp)?;
        let d2 = self.geo.d2();
        Ok(EnergySolution {
            slacks: SlackState {
                u: s.u.iter().map(|v| v * d2).collect(),
                w: s.w.iter().map(|v| v * d2).collect(),
            },
            q: s.q.clone(),
            trajectory,
            jamming,
            ledger,
            report,
            iterate_checks,
        })
    }

    fn consumption_terms(&self, t: usize, with_prev: bool) -> Vec<Box<dyn SmoothFunction>> {
        let (c_p, c_q, c_0, c_2, c_3) = self.coefficients();
        let c_0 = c_0 + self.params.circuit_power * self.delta / self.e_ref;
        let mut lin = vec![(idx(t, Var::P), c_p), (idx(t, Var::Q), c_q), (idx(t, Var::E), -1.0)];
        if with_prev {
            lin.push((idx(t - 1, Var::E), 1.0));
        }
        let (xa, xb, ya, yb) = (idx(t, Var::X), idx(t - 1, Var::X), idx(t, Var::Y), idx(t - 1, Var::Y));
        vec![
            Box::new(Affine::new(&lin, c_0)),
            Box::new(QuadraticForm::displacement(xa, xb, ya, yb, c_2, 0.0)),
            Box::new(DisplacementCube::new(xa, xb, ya, yb, c_3)),
        ]
    }

    /// Energy-per-`e_ref` coefficients of `P̃`, `q`, the constant, `‖Δp̃‖²`
    /// and `‖Δp̃‖³` in one slot.
    fn coefficients(&self) -> (f64, f64, f64, f64, f64) {
        let pp = self.pp;
        let (d, dt, e) = (self.geo.d, self.delta, self.e_ref);
        (
            self.p_ref * dt / e,
            pp.induced_power * dt / e,
            pp.blade_power * dt / e,
            3.0 * pp.blade_power * d * d / (pp.tip_speed * pp.tip_speed * dt * dt) * dt / e,
            pp.parasite_coefficient() * d.powi(3) / dt.powi(3) * dt / e,
        )
    }

    /// Builds and solves the convex program expanded around `s`, with `w`
    /// frozen at its value in `s`.
    fn solve_expansion(&self, s: &State, solver: &convex::SolverSettings) -> Result<Vec<f64>, OptError> {
        let n = self.n;
        let geo = &self.geo;
        let (c_p, c_q, c_0, c_2, c_3) = self.coefficients();
        let reserve = self.params.usable_fraction * self.params.initial_energy;
        let harvest = solar_power(self.params.altitude, self.sp) * self.delta;
        let inv_vhat2 = 1.0 / self.vhat2_scaled();

        let mut prog = ConvexProgram::new(2 + n * STRIDE);
        let mut seed = vec![0.0; prog.dim()];
        seed[0] = s.points[0].x;
        seed[1] = s.points[0].y;
        prog.pin(0, s.points[0].x);
        prog.pin(1, s.points[0].y);
        let mut cumulative = 0.0;
        for t in 1..=n {
            let k = t - 1;
            let p = s.points[t];
            let (xa, xb, ya, yb) = (idx(t, Var::X), idx(t - 1, Var::X), idx(t, Var::Y), idx(t - 1, Var::Y));
            let (pi, qi, ui, wi, ei) = (
                idx(t, Var::P),
                idx(t, Var::Q),
                idx(t, Var::U),
                idx(t, Var::W),
                idx(t, Var::E),
            );
            // Freezing w slightly above its exact value leaves u an interval
            // instead of a point, so the seed below is strictly feasible.
            let wf = s.w[k] * (1.0 + W_WIDENING);
            let lo = geo.link_u(p, 0.0);
            let u = lo + 0.5 * (wf + 2.0 * p.x - 1.0 - lo);
            let power = (wf * (u - 1.0)).max(0.0) + W_WIDENING;
            for (i, val) in [(pi, power), (qi, s.q[k]), (xa, p.x), (ya, p.y), (ui, u), (wi, wf)] {
                seed[i] = val;
            }
            prog.pin(wi, wf);
            if t == n || self.pin_all {
                prog.pin(xa, p.x);
                prog.pin(ya, p.y);
            }

            prog.add_objective(Affine::new(&[(pi, c_p), (qi, c_q)], c_0));
            prog.add_objective(QuadraticForm::displacement(xa, xb, ya, yb, c_2, 0.0));
            prog.add_objective(DisplacementCube::new(xa, xb, ya, yb, c_3));

            prog.add_constraint(Affine::new(&[(pi, -1.0)], 0.0));
            prog.add_constraint(Affine::new(&[(qi, -1.0)], Q_MIN));
            prog.add_constraint(geo.speed(xa, xb, ya, yb));
            prog.add_constraint(geo.distance_bound(xa, ya, ui, 0.0));
            prog.add_constraint(Affine::new(&[(ui, 1.0), (xa, -2.0), (wi, -1.0)], 1.0));
            prog.add_constraint(Affine::new(&[(ui, wf), (pi, -1.0)], -wf));
            let dp = [p.x - s.points[t - 1].x, p.y - s.points[t - 1].y];
            prog.add_constraint(linearized_slack([qi, xa, xb, ya, yb], s.q[k], dp, inv_vhat2));
            prog.add_constraint(Sum::new(self.consumption_terms(t, t > 1)));
            prog.add_constraint(Affine::new(&[(ei, 1.0)], -(reserve + t as f64 * harvest) / self.e_ref));

            let prev = s.points[t - 1];
            let r2 = (p.x - prev.x).powi(2) + (p.y - prev.y).powi(2);
            cumulative += W_WIDENING
                + c_p * power
                + c_q * s.q[k]
                + c_0
                + self.params.circuit_power * self.delta / self.e_ref
                + c_2 * r2
                + c_3 * r2 * r2.sqrt();
            seed[ei] = cumulative;
        }
        let result = convex::solve_from_seed(&prog, &seed, solver)?;
        Ok(result.x)
    }

    fn points_of(&self, z: &[f64]) -> Vec<Point> {
        (0..=self.n)
            .map(|t| Point::new(z[idx(t, Var::X)], z[idx(t, Var::Y)]))
            .collect()
    }

    /// One convex solve over `{P, q, x, y, u, e}` with `w` frozen, then
    /// the slacks, jamming and `q` tightened at the new positions.
    fn step(&self, s: &State, solver: &convex::SolverSettings) -> Result<State, OptError> {
        let z = self.solve_expansion(s, solver)?;
        Ok(self.tighten(self.points_of(&z)))
    }
}

/// Propulsion energy of a trajectory using the exact speed model (J).
pub fn propulsion_energy(traj: &Trajectory, pp: &PropulsionParams, delta: f64) -> f64 {
    traj.speeds(delta)
        .into_iter()
        .map(|v| propulsion_power(v, pp) * delta)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PresetName;

    #[test]
    fn tilde_pm_cases() {
        let pp = PropulsionParams::default();
        let a = Point::new(1.0, 2.0);
        assert!((tilde_pm(a, a, 1.0, &pp, 0.1) - 121.4).abs() < 1e-12);
        let b = Point::new(2.5, 0.3);
        let v = a.distance(b) / 0.1;
        let q = q_from_speed(v, &pp);
        assert!((tilde_pm(b, a, q, &pp, 0.1) - propulsion_power(v, &pp)).abs() < 1e-9);
        assert!(tilde_pm(b, a, q + 0.1, &pp, 0.1) > tilde_pm(b, a, q, &pp, 0.1));
    }

    #[test]
    fn q_from_speed_cases() {
        let pp = PropulsionParams::default();
        assert_eq!(q_from_speed(0.0, &pp), 1.0);
        let v = pp.hover_induced_velocity * 2f64.sqrt();
        let q = q_from_speed(v, &pp);
        assert!((q * q - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((q - 0.6436).abs() < 1e-4);
        let mut last = f64::INFINITY;
        for k in 0..400 {
            let q = q_from_speed(k as f64 * 0.1, &pp);
            assert!(q < last);
            last = q;
        }
    }

    #[test]
    fn infeasible_initial_names_slot() {
        let params = SystemParams {
            initial_energy: 0.0,
            ..SystemParams::default().with_timing(30.0, 0.5).unwrap()
        };
        let pp = PropulsionParams::default();
        let sp = SolarParams::default();
        let nf = Scenario::preset(PresetName::Nf);
        match init_feasible_energy(&nf, &params, &pp, &sp) {
            Err(OptError::InfeasibleInitial { slot, margin, .. }) => {
                assert_eq!(slot, 1);
                assert!(margin < 0.0);
            }
            other => panic!("expected an infeasible start, got {other:?}"),
        }
    }

    #[test]
    fn causality_margin_cases() {
        let params = SystemParams::default().with_timing(2.0, 0.5).unwrap();
        let pp = PropulsionParams::default();
        let sp = SolarParams::default();
        let here = Point::new(0.0, 0.0);
        let traj = Trajectory::new(vec![here; 5]);
        let mut ledger = evaluate_ledger(&traj, &JammingProfile::zeros(4), &params, &pp, &sp).unwrap();
        // Zero consumption: margins grow by one slot of harvest each.
        let harvest = solar_power(params.altitude, &sp) * 0.5;
        for t in 0..4 {
            ledger.cumulative_propulsion[t] = 0.0;
        }
        let m = causality_margins(&ledger, &params);
        for (t, v) in m.iter().enumerate() {
            assert!((v - ((t + 1) as f64 * harvest + 5600.0)).abs() < 1e-9);
        }
        // Consumption that exhausts the budget in the final slot.
        let total = 4.0 * harvest + 5600.0;
        ledger.cumulative_propulsion = vec![0.0, 0.0, 0.0, total];
        let m = causality_margins(&ledger, &params);
        assert!(m[3].abs() < 1e-9);
    }

    #[test]
    fn linearization_is_exact_at_center() {
        let pp = PropulsionParams::default();
        let state = ScaState {
            q: vec![0.7],
            points: vec![Point::new(0.0, 0.0), Point::new(1.5, -0.5)],
            iteration: 0,
        };
        let g = sca_linearized_constraint(1, &state, &pp, 0.1);
        let at = [0.7, 1.5, 0.0, -0.5, 0.0];
        let vhat2 = (pp.hover_induced_velocity * 0.1).powi(2);
        let exact = 1.0 / 0.49 - (0.49 + (1.5f64.powi(2) + 0.25) / vhat2);
        assert!((g.value(&at) - exact).abs() < 1e-12);
    }
}
