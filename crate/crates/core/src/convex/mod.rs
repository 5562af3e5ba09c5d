//! Log-barrier interior-point solver for smooth convex programs
//!
//! ```text
//! minimize   Σ f_k(z)
//! subject to g_i(z) ≤ 0,   z_j = c_j for pinned j
//! ```
//!
//! Pinned coordinates are eliminated before the solve. Newton systems are
//! assembled in a banded layout whose bandwidth is derived from the
//! function supports, so programs chained slot by slot factor in linear
//! time. A phase-1 slack program supplies a strictly feasible start.

mod functions;
mod linalg;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::SolverError;

pub use functions::{
    gradient_mismatch, Affine, DisplacementCube, Evaluation, InverseSquare, QuadraticForm, SmoothFunction, Sum,
    DISPLACEMENT_FLOOR,
};
pub use linalg::{BandedMatrix, CholeskyFactor};

/// A convex program over `dim` variables.
#[derive(Debug, Default)]
pub struct ConvexProgram {
    dim: usize,
    objective: Vec<Box<dyn SmoothFunction>>,
    constraints: Vec<Box<dyn SmoothFunction>>,
    pins: BTreeMap<usize, f64>,
}

impl ConvexProgram {
    pub fn new(dim: usize) -> Self {
        Self { dim, ..Self::default() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds a term to the objective sum.
    pub fn add_objective(&mut self, f: impl SmoothFunction + 'static) {
        self.objective.push(Box::new(f));
    }

    /// Adds the constraint `g(z) ≤ 0` and returns its index.
    pub fn add_constraint(&mut self, g: impl SmoothFunction + 'static) -> usize {
        self.constraints.push(Box::new(g));
        self.constraints.len() - 1
    }

    pub fn pin(&mut self, index: usize, value: f64) {
        self.pins.insert(index, value);
    }

    pub fn pins(&self) -> &BTreeMap<usize, f64> {
        &self.pins
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective_value(&self, z: &[f64]) -> f64 {
        self.objective.iter().map(|f| f.value(&gather(f.support(), z))).sum()
    }

    pub fn constraint_values(&self, z: &[f64]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|g| g.value(&gather(g.support(), z)))
            .collect()
    }

    /// Largest constraint value at `z` (`−∞` without constraints).
    pub fn max_constraint(&self, z: &[f64]) -> f64 {
        self.constraint_values(z).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    fn validate(&self) -> Result<(), SolverError> {
        let check = |f: &dyn SmoothFunction, what: &str| -> Result<(), SolverError> {
            if let Some(bad) = f.support().iter().find(|&&i| i >= self.dim) {
                return Err(SolverError::InvalidProgram(format!(
                    "{what} references variable {bad} of a {}-variable program",
                    self.dim
                )));
            }
            if !f.is_convex() {
                return Err(SolverError::InvalidProgram(format!("{what} is not convex")));
            }
            Ok(())
        };
        for (k, f) in self.objective.iter().enumerate() {
            check(f.as_ref(), &format!("objective term {k}"))?;
        }
        for (k, g) in self.constraints.iter().enumerate() {
            check(g.as_ref(), &format!("constraint {k}"))?;
        }
        if let Some((&bad, _)) = self.pins.range(self.dim..).next() {
            return Err(SolverError::InvalidProgram(format!(
                "pinned index {bad} outside a {}-variable program",
                self.dim
            )));
        }
        if let Some((i, v)) = self.pins.iter().find(|(_, v)| !v.is_finite()) {
            return Err(SolverError::InvalidProgram(format!("pin {i} has non-finite value {v}")));
        }
        Ok(())
    }
}

fn gather(support: &[usize], z: &[f64]) -> Vec<f64> {
    support.iter().map(|&i| z[i]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    /// Initial barrier weight on the objective.
    pub initial_barrier_weight: f64,
    /// Multiplicative increase of the barrier weight per outer iteration.
    pub barrier_factor: f64,
    /// Relative duality-gap tolerance.
    pub tolerance: f64,
    pub max_outer_iterations: usize,
    pub max_newton_iterations: usize,
    /// Sufficient-decrease fraction of the backtracking line search.
    pub armijo_fraction: f64,
    /// Step shrink factor of the backtracking line search.
    pub backtrack_factor: f64,
    /// Half squared Newton decrement at which a centering step stops.
    pub centering_tolerance: f64,
    /// Least constraint slack a phase-1 point must achieve.
    pub feasibility_margin: f64,
    /// Phase 1 stops early once every constraint has this much slack.
    pub phase1_target: f64,
    /// Constraints with no free variables pass if at most this positive.
    pub constant_tolerance: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            initial_barrier_weight: 1.0,
            barrier_factor: 10.0,
            tolerance: 1e-6,
            max_outer_iterations: 30,
            max_newton_iterations: 50,
            armijo_fraction: 0.3,
            backtrack_factor: 0.5,
            centering_tolerance: 1e-10,
            feasibility_margin: 1e-12,
            phase1_target: 1e-4,
            constant_tolerance: 1e-9,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: String| Err(SolverError::InvalidProgram(msg));
        if !(self.tolerance > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if !(self.barrier_factor > 1.0) {
            return bad(format!("barrier factor must exceed 1, got {}", self.barrier_factor));
        }
        if !(self.initial_barrier_weight > 0.0) {
            return bad("initial barrier weight must be positive".into());
        }
        if !(self.armijo_fraction > 0.0 && self.armijo_fraction < 0.5) {
            return bad("armijo fraction must lie in (0, 0.5)".into());
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return bad("backtrack factor must lie in (0, 1)".into());
        }
        if self.max_outer_iterations == 0 || self.max_newton_iterations == 0 {
            return bad("iteration caps must be positive".into());
        }
        if !(self.centering_tolerance > 0.0 && self.feasibility_margin >= 0.0 && self.phase1_target > 0.0) {
            return bad("centering tolerance and phase-1 target must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    IterationLimit,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    /// Full-dimension solution, pins included.
    pub x: Vec<f64>,
    pub objective: f64,
    /// Duality gap bound relative to `max(1, |objective|)`.
    pub kkt_residual: f64,
    /// Largest constraint value at `x`.
    pub max_constraint: f64,
    pub outer_iterations: usize,
    pub newton_iterations: usize,
    pub status: SolveStatus,
}

/// Solves `program` from a strictly feasible `start`.
pub fn solve(program: &ConvexProgram, start: &[f64], settings: &SolverSettings) -> Result<SolveResult, SolverError> {
    settings.validate()?;
    let compiled = Compiled::new(program, settings)?;
    let mut z = compiled.free_part(start)?;
    for (k, term) in compiled.constraints.iter().enumerate() {
        let v = term.value(&z, &compiled);
        if !(v < 0.0) {
            return Err(SolverError::NotStrictlyFeasible {
                index: compiled.constraint_ids[k],
                value: v,
            });
        }
    }
    let barrier = Barrier {
        compiled: &compiled,
        phase1: false,
    };
    let start_obj = barrier.objective(&z);
    if !start_obj.is_finite() {
        return Err(SolverError::NumericalBreakdown(
            "objective is not finite at the start".into(),
        ));
    }
    let m = compiled.constraints.len() as f64;
    let mut s = 0.0;
    let mut t = settings.initial_barrier_weight;
    let mut newton = 0;
    let mut outer = 0;
    let mut status = SolveStatus::IterationLimit;
    let mut gap = f64::INFINITY;
    while outer < settings.max_outer_iterations {
        outer += 1;
        barrier.center(&mut z, &mut s, t, settings, &mut newton, None)?;
        let f = barrier.objective(&z);
        gap = m / t;
        if gap <= settings.tolerance * f.abs().max(1.0) {
            status = SolveStatus::Converged;
            break;
        }
        t *= settings.barrier_factor;
    }
    let x = compiled.full_point(&z);
    let objective = program.objective_value(&x);
    Ok(SolveResult {
        max_constraint: program.max_constraint(&x),
        kkt_residual: gap / objective.abs().max(1.0),
        x,
        objective,
        outer_iterations: outer,
        newton_iterations: newton,
        status,
    })
}

/// Finds a point with every constraint at most `−feasibility_margin`,
/// starting from `seed`. A seed that already qualifies is returned as is.
pub fn phase1_feasible(
    program: &ConvexProgram,
    seed: &[f64],
    settings: &SolverSettings,
) -> Result<Vec<f64>, SolverError> {
    settings.validate()?;
    let compiled = Compiled::new(program, settings)?;
    let mut z = compiled.free_part(seed)?;
    let values: Vec<f64> = compiled.constraints.iter().map(|c| c.value(&z, &compiled)).collect();
    if let Some(k) = values.iter().position(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(SolverError::InvalidProgram(format!(
            "seed lies outside the domain of constraint {}",
            compiled.constraint_ids[k]
        )));
    }
    let worst = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if worst <= -settings.feasibility_margin {
        return Ok(compiled.full_point(&z));
    }
    let barrier = Barrier {
        compiled: &compiled,
        phase1: true,
    };
    let m = compiled.constraints.len() as f64 + 1.0;
    let mut s = worst + 1.0;
    let mut t = settings.initial_barrier_weight.max(m);
    let mut newton = 0;
    for _ in 0..settings.max_outer_iterations {
        let exit = barrier.center(&mut z, &mut s, t, settings, &mut newton, Some(settings.phase1_target))?;
        if exit == CenterExit::Target {
            return Ok(compiled.full_point(&z));
        }
        if m / t <= settings.tolerance * s.abs().max(1e-3) {
            return finish_phase1(&compiled, z, settings);
        }
        t *= settings.barrier_factor;
    }
    finish_phase1(&compiled, z, settings).map_err(|e| match e {
        SolverError::Infeasible { .. } => SolverError::IterationLimit("phase 1 found a feasible point"),
        other => other,
    })
}

fn finish_phase1(compiled: &Compiled, z: Vec<f64>, settings: &SolverSettings) -> Result<Vec<f64>, SolverError> {
    let worst = compiled
        .constraints
        .iter()
        .map(|c| c.value(&z, compiled))
        .fold(f64::NEG_INFINITY, f64::max);
    if worst < -settings.feasibility_margin {
        Ok(compiled.full_point(&z))
    } else {
        Err(SolverError::Infeasible { slack: worst })
    }
}

/// Phase 1 followed by [`solve`].
pub fn solve_from_seed(
    program: &ConvexProgram,
    seed: &[f64],
    settings: &SolverSettings,
) -> Result<SolveResult, SolverError> {
    let start = phase1_feasible(program, seed, settings)?;
    solve(program, &start, settings)
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Free(usize),
    Pinned(f64),
}

struct Term<'a> {
    f: &'a dyn SmoothFunction,
    slots: Vec<Slot>,
}

impl Term<'_> {
    fn local(&self, z: &[f64]) -> Vec<f64> {
        self.slots
            .iter()
            .map(|s| match *s {
                Slot::Free(i) => z[i],
                Slot::Pinned(v) => v,
            })
            .collect()
    }

    fn value(&self, z: &[f64], _c: &Compiled) -> f64 {
        self.f.value(&self.local(z))
    }
}

struct Compiled<'a> {
    dim: usize,
    free: Vec<usize>,
    pins: &'a BTreeMap<usize, f64>,
    objective: Vec<Term<'a>>,
    constraints: Vec<Term<'a>>,
    /// Original index of each retained constraint.
    constraint_ids: Vec<usize>,
    bandwidth: usize,
}

impl<'a> Compiled<'a> {
    fn new(program: &'a ConvexProgram, settings: &SolverSettings) -> Result<Self, SolverError> {
        program.validate()?;
        let mut position = vec![usize::MAX; program.dim];
        let mut free = Vec::new();
        for (i, p) in position.iter_mut().enumerate() {
            if !program.pins.contains_key(&i) {
                *p = free.len();
                free.push(i);
            }
        }
        let term = |f: &'a dyn SmoothFunction| Term {
            f,
            slots: f
                .support()
                .iter()
                .map(|&i| match program.pins.get(&i) {
                    Some(&v) => Slot::Pinned(v),
                    None => Slot::Free(position[i]),
                })
                .collect(),
        };
        let objective: Vec<Term> = program.objective.iter().map(|f| term(f.as_ref())).collect();
        let mut constraints = Vec::new();
        let mut constraint_ids = Vec::new();
        for (k, g) in program.constraints.iter().enumerate() {
            let t = term(g.as_ref());
            let has_free = t.slots.iter().any(|s| matches!(s, Slot::Free(_)));
            let constant = if !has_free {
                true
            } else if g.is_affine() {
                let probe = vec![0.0; free.len()];
                let e = g.evaluate(&t.local(&probe));
                t.slots
                    .iter()
                    .zip(&e.gradient)
                    .all(|(s, d)| matches!(s, Slot::Pinned(_)) || *d == 0.0)
            } else {
                false
            };
            if constant {
                let v = g.value(&t.local(&vec![0.0; free.len()]));
                if !(v <= settings.constant_tolerance) {
                    return Err(SolverError::Infeasible { slack: v });
                }
                continue;
            }
            constraints.push(t);
            constraint_ids.push(k);
        }
        let bandwidth = objective
            .iter()
            .chain(&constraints)
            .map(|t| {
                let idx = t.slots.iter().filter_map(|s| match s {
                    Slot::Free(i) => Some(*i),
                    Slot::Pinned(_) => None,
                });
                let (lo, hi) = idx.fold((usize::MAX, 0), |(lo, hi), i| (lo.min(i), hi.max(i)));
                hi.saturating_sub(lo)
            })
            .max()
            .unwrap_or(0);
        Ok(Self {
            dim: program.dim,
            free,
            pins: &program.pins,
            objective,
            constraints,
            constraint_ids,
            bandwidth,
        })
    }

    fn free_part(&self, full: &[f64]) -> Result<Vec<f64>, SolverError> {
        if full.len() != self.dim {
            return Err(SolverError::InvalidProgram(format!(
                "point has {} entries, program has {} variables",
                full.len(),
                self.dim
            )));
        }
        let z: Vec<f64> = self.free.iter().map(|&i| full[i]).collect();
        if z.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::InvalidProgram("point has non-finite entries".into()));
        }
        Ok(z)
    }

    fn full_point(&self, z: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for (k, &i) in self.free.iter().enumerate() {
            x[i] = z[k];
        }
        for (&i, &v) in self.pins {
            x[i] = v;
        }
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CenterExit {
    Centered,
    Stalled,
    NewtonLimit,
    Target,
}

/// Barrier function of the main program, or of the phase-1 program
/// `min s  s.t.  g_i(z) ≤ s,  s ≥ −1`.
struct Barrier<'a> {
    compiled: &'a Compiled<'a>,
    phase1: bool,
}

struct NewtonSystem {
    grad: Vec<f64>,
    hess: BandedMatrix,
    grad_s: f64,
    border: Vec<f64>,
    corner: f64,
}

impl Barrier<'_> {
    fn objective(&self, z: &[f64]) -> f64 {
        self.compiled.objective.iter().map(|t| t.f.value(&t.local(z))).sum()
    }

    fn merit(&self, z: &[f64], s: f64, t: f64) -> Option<f64> {
        let shift = if self.phase1 { s } else { 0.0 };
        let mut phi = if self.phase1 { t * s } else { t * self.objective(z) };
        for term in &self.compiled.constraints {
            let r = shift - term.f.value(&term.local(z));
            if !(r > 0.0) {
                return None;
            }
            phi -= r.ln();
        }
        if self.phase1 {
            let r = 1.0 + s;
            if !(r > 0.0) {
                return None;
            }
            phi -= r.ln();
        }
        phi.is_finite().then_some(phi)
    }

    fn assemble(&self, z: &[f64], s: f64, t: f64) -> Result<NewtonSystem, SolverError> {
        let c = self.compiled;
        let n = c.free.len();
        let mut sys = NewtonSystem {
            grad: vec![0.0; n],
            hess: BandedMatrix::zeros(n, c.bandwidth),
            grad_s: 0.0,
            border: vec![0.0; n],
            corner: 0.0,
        };
        let scatter = |sys: &mut NewtonSystem, slots: &[Slot], e: &Evaluation, gw: f64, hw: f64, outer: f64| {
            let k = slots.len();
            for a in 0..k {
                let Slot::Free(i) = slots[a] else { continue };
                sys.grad[i] += gw * e.gradient[a];
                for b in 0..=a {
                    let Slot::Free(j) = slots[b] else { continue };
                    let h = hw * e.hessian[a * k + b] + outer * e.gradient[a] * e.gradient[b];
                    if i == j && a != b {
                        // Two support entries mapped to one variable.
                        sys.hess.add(i, j, 2.0 * h);
                    } else {
                        sys.hess.add(i, j, h);
                    }
                }
            }
        };
        if self.phase1 {
            sys.grad_s += t;
        } else {
            for term in &c.objective {
                let e = term.f.evaluate(&term.local(z));
                scatter(&mut sys, &term.slots, &e, t, t, 0.0);
            }
        }
        let shift = if self.phase1 { s } else { 0.0 };
        for term in &c.constraints {
            let e = term.f.evaluate(&term.local(z));
            let r = shift - e.value;
            if !(r > 0.0) {
                return Err(SolverError::NumericalBreakdown(
                    "iterate left the interior of the feasible set".into(),
                ));
            }
            scatter(&mut sys, &term.slots, &e, 1.0 / r, 1.0 / r, 1.0 / (r * r));
            if self.phase1 {
                sys.grad_s -= 1.0 / r;
                sys.corner += 1.0 / (r * r);
                for (a, slot) in term.slots.iter().enumerate() {
                    if let Slot::Free(i) = *slot {
                        sys.border[i] -= e.gradient[a] / (r * r);
                    }
                }
            }
        }
        if self.phase1 {
            let r = 1.0 + s;
            sys.grad_s -= 1.0 / r;
            sys.corner += 1.0 / (r * r);
        }
        if sys.grad.iter().any(|g| !g.is_finite()) || !sys.grad_s.is_finite() {
            return Err(SolverError::NumericalBreakdown("non-finite barrier gradient".into()));
        }
        Ok(sys)
    }

    /// Newton direction `(dz, ds)` and the squared Newton decrement.
    fn direction(&self, sys: &NewtonSystem) -> Result<(Vec<f64>, f64, f64), SolverError> {
        let n = sys.grad.len();
        let scale = 1.0 + sys.hess.max_abs_diagonal();
        let mut ridge = 0.0;
        for attempt in 0..8 {
            let mut h = sys.hess.clone();
            if ridge > 0.0 {
                h.add_diagonal(ridge);
            }
            let next_ridge = if attempt == 0 { 1e-14 * scale } else { ridge * 100.0 };
            let Some(factor) = h.cholesky() else {
                ridge = next_ridge;
                continue;
            };
            let neg_grad: Vec<f64> = sys.grad.iter().map(|g| -g).collect();
            let x1 = factor.solve(&neg_grad);
            let (dz, ds) = if self.phase1 {
                let x2 = factor.solve(&sys.border);
                let schur = sys.corner + ridge - dot(&sys.border, &x2);
                if !(schur > 0.0) {
                    ridge = next_ridge;
                    continue;
                }
                let ds = (-sys.grad_s - dot(&sys.border, &x1)) / schur;
                let dz: Vec<f64> = (0..n).map(|i| x1[i] - x2[i] * ds).collect();
                (dz, ds)
            } else {
                (x1, 0.0)
            };
            let lambda2 = -(dot(&sys.grad, &dz) + sys.grad_s * ds);
            if dz.iter().all(|v| v.is_finite()) && ds.is_finite() && lambda2.is_finite() {
                return Ok((dz, ds, lambda2.max(0.0)));
            }
            ridge = next_ridge;
        }
        Err(SolverError::NumericalBreakdown(
            "Newton system could not be factored".into(),
        ))
    }

    fn center(
        &self,
        z: &mut Vec<f64>,
        s: &mut f64,
        t: f64,
        settings: &SolverSettings,
        newton: &mut usize,
        target: Option<f64>,
    ) -> Result<CenterExit, SolverError> {
        for _ in 0..settings.max_newton_iterations {
            let sys = self.assemble(z, *s, t)?;
            let (dz, ds, lambda2) = self.direction(&sys)?;
            if lambda2 / 2.0 <= settings.centering_tolerance {
                return Ok(CenterExit::Centered);
            }
            let phi0 = self
                .merit(z, *s, t)
                .ok_or_else(|| SolverError::NumericalBreakdown("barrier undefined at iterate".into()))?;
            let slope = -lambda2;
            let mut step = 1.0;
            let accepted = loop {
                let cand: Vec<f64> = z.iter().zip(&dz).map(|(a, d)| a + step * d).collect();
                let cand_s = *s + step * ds;
                if let Some(phi) = self.merit(&cand, cand_s, t) {
                    let allowance = 4.0 * f64::EPSILON * phi0.abs();
                    if phi <= phi0 + settings.armijo_fraction * step * slope + allowance {
                        break Some((cand, cand_s));
                    }
                }
                step *= settings.backtrack_factor;
                if step < 1e-14 {
                    break None;
                }
            };
            let Some((cand, cand_s)) = accepted else {
                return Ok(CenterExit::Stalled);
            };
            *z = cand;
            *s = cand_s;
            *newton += 1;
            if let Some(target) = target {
                if *s < -target {
                    return Ok(CenterExit::Target);
                }
            }
        }
        Ok(CenterExit::NewtonLimit)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn active_lower_bound() {
        let mut p = ConvexProgram::new(1);
        p.add_objective(QuadraticForm::diagonal(vec![0], &[1.0], vec![0.0], 0.0));
        p.add_constraint(Affine::new(&[(0, -1.0)], 1.0));
        let r = solve(&p, &[2.0], &SolverSettings::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6, "{}", r.x[0]);
        assert!(r.max_constraint <= 1e-6);
        assert!(r.kkt_residual <= 1e-6);
    }

    #[test]
    fn separable_lower_bounds() {
        let c = [0.5, 2.0, 0.0, 3.25];
        let mut p = ConvexProgram::new(4);
        for (i, ci) in c.iter().enumerate() {
            p.add_objective(Affine::new(&[(i, 1.0)], 0.0));
            p.add_constraint(Affine::new(&[(i, -1.0)], *ci));
        }
        let r = solve(&p, &[4.0; 4], &SolverSettings::default()).unwrap();
        for (x, ci) in r.x.iter().zip(&c) {
            assert!((x - ci).abs() < 1e-5);
        }
    }

    #[test]
    fn quadratic_over_box() {
        // min (x − 2)² + (y + 3)² over [−1, 1]²: optimum (1, −1).
        let mut p = ConvexProgram::new(2);
        p.add_objective(QuadraticForm::diagonal(vec![0, 1], &[1.0, 1.0], vec![-4.0, 6.0], 13.0));
        for i in 0..2 {
            p.add_constraint(Affine::new(&[(i, 1.0)], -1.0));
            p.add_constraint(Affine::new(&[(i, -1.0)], -1.0));
        }
        let r = solve(&p, &[0.0, 0.0], &SolverSettings::default()).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] + 1.0).abs() < 1e-6, "{:?}", r.x);
        assert!((r.objective - 5.0).abs() < 1e-5);
    }

    #[test]
    fn phase1_finds_interior_and_detects_infeasible() {
        let s = SolverSettings::default();
        let mut p = ConvexProgram::new(1);
        p.add_constraint(QuadraticForm::diagonal(vec![0], &[1.0], vec![0.0], -1.0));
        let z = phase1_feasible(&p, &[3.0], &s).unwrap();
        assert!(z[0].abs() < 1.0);

        let mut q = ConvexProgram::new(1);
        q.add_constraint(Affine::new(&[(0, 1.0)], 1.0));
        q.add_constraint(Affine::new(&[(0, -1.0)], 1.0));
        assert!(matches!(
            phase1_feasible(&q, &[0.0], &s),
            Err(SolverError::Infeasible { .. })
        ));

        let seed = [0.25];
        assert_eq!(phase1_feasible(&p, &seed, &s).unwrap(), seed.to_vec());
    }

    #[test]
    fn pins_are_eliminated() {
        // min x + y s.t. y ≥ x², x pinned to 0.5.
        let mut p = ConvexProgram::new(2);
        p.add_objective(Affine::new(&[(0, 1.0), (1, 1.0)], 0.0));
        p.add_constraint(QuadraticForm::new(
            vec![0, 1],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, -1.0],
            0.0,
        ));
        p.pin(0, 0.5);
        let r = solve_from_seed(&p, &[0.0, 0.0], &SolverSettings::default()).unwrap();
        assert_eq!(r.x[0], 0.5);
        assert!((r.x[1] - 0.25).abs() < 1e-6);
    }

    #[test]
    fn constant_constraints() {
        let mut p = ConvexProgram::new(2);
        p.add_objective(QuadraticForm::diagonal(vec![0], &[1.0], vec![0.0], 0.0));
        p.add_constraint(Affine::new(&[(1, 1.0)], -3.0));
        p.add_constraint(Affine::new(&[(0, 0.0)], 0.0));
        p.pin(1, 2.0);
        assert!(solve(&p, &[1.0, 2.0], &SolverSettings::default()).is_ok());
        p.pin(1, 4.0);
        assert!(matches!(
            solve(&p, &[1.0, 4.0], &SolverSettings::default()),
            Err(SolverError::Infeasible { .. })
        ));
    }

    #[test]
    fn rejects_bad_programs() {
        let s = SolverSettings::default();
        let mut p = ConvexProgram::new(1);
        p.add_constraint(Affine::new(&[(3, 1.0)], 0.0));
        assert!(matches!(solve(&p, &[0.0], &s), Err(SolverError::InvalidProgram(_))));

        let mut q = ConvexProgram::new(2);
        q.add_constraint(QuadraticForm::new(
            vec![0, 1],
            vec![0.0, 1.0, 1.0, 0.0],
            vec![0.0; 2],
            0.0,
        ));
        assert!(matches!(
            solve(&q, &[0.0, 0.0], &s),
            Err(SolverError::InvalidProgram(_))
        ));

        let mut r = ConvexProgram::new(1);
        r.add_constraint(Affine::new(&[(0, 1.0)], 0.0));
        assert!(matches!(
            solve(&r, &[0.0], &s),
            Err(SolverError::NotStrictlyFeasible { index: 0, .. })
        ));
        let bad = SolverSettings {
            barrier_factor: 1.0,
            ..s
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn deterministic() {
        let build = || {
            let mut p = ConvexProgram::new(3);
            p.add_objective(QuadraticForm::diagonal(
                vec![0, 1, 2],
                &[1.0, 2.0, 3.0],
                vec![1.0, -1.0, 0.5],
                0.0,
            ));
            p.add_constraint(Affine::new(&[(0, 1.0), (1, 1.0), (2, 1.0)], -0.5));
            p.add_constraint(InverseSquare::new(vec![2, 0], 1.0, vec![0.0, -1.0], -10.0));
            p
        };
        let s = SolverSettings::default();
        let a = solve_from_seed(&build(), &[0.1, 0.1, 0.5], &s).unwrap();
        let b = solve_from_seed(&build(), &[0.1, 0.1, 0.5], &s).unwrap();
        assert_eq!(a, b);
    }
}
