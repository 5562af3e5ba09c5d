//! Reference flight schemes and their energy accounting.
//!
//! Every scheme flies a polyline at one constant speed, possibly after or
//! before hovering, sampled at the slot boundaries. Hover slots have
//! exactly zero displacement.

use serde::{Deserialize, Serialize};

use crate::error::BaselineError;
use crate::jamming_opt::JammingProfile;
use crate::model::{
    evaluate_ledger, find_min_power_speed, EnergyLedger, Point, PropulsionParams, Scenario, SolarParams, SystemParams,
    Trajectory,
};

/// Waypoint used by [`BaselineKind::TwoLines`] when none is given (m).
pub const DEFAULT_WAYPOINT: Point = Point { x: 200.0, y: 200.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum BaselineKind {
    /// Straight line at the slowest constant speed that arrives on time.
    LowSpeed,
    /// Straight line covered in the first half of the horizon, then hover.
    FlyHalf,
    /// Two straight legs through a waypoint at constant speed.
    TwoLines { waypoint: Point },
    /// Straight line at the minimum-power speed, then hover.
    FlyFirst,
    /// Hover, then a straight line at the minimum-power speed.
    HoverFirst,
    /// Start to end, back to start, and to end again at constant speed.
    RoundTrip,
}

impl BaselineKind {
    /// All six schemes, with the default two-line waypoint.
    pub const ALL: [BaselineKind; 6] = [
        BaselineKind::LowSpeed,
        BaselineKind::FlyHalf,
        BaselineKind::TwoLines {
            waypoint: DEFAULT_WAYPOINT,
        },
        BaselineKind::FlyFirst,
        BaselineKind::HoverFirst,
        BaselineKind::RoundTrip,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BaselineKind::LowSpeed => "low-speed",
            BaselineKind::FlyHalf => "fly-half",
            BaselineKind::TwoLines { .. } => "two-lines",
            BaselineKind::FlyFirst => "fly-first",
            BaselineKind::HoverFirst => "hover-first",
            BaselineKind::RoundTrip => "round-trip",
        }
    }

    /// Parses a scheme name; `two-lines` gets the default waypoint.
    pub fn from_name(name: &str) -> Result<Self, BaselineError> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| BaselineError::Invalid(format!("unknown baseline scheme `{name}`")))
    }

    pub fn validate(&self) -> Result<(), BaselineError> {
        if let BaselineKind::TwoLines { waypoint } = self {
            if !(waypoint.x.is_finite() && waypoint.y.is_finite()) {
                return Err(BaselineError::Invalid("two-line waypoint must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Constant-speed flight along `waypoints`, starting after `delay` seconds
/// and hovering at the last waypoint once it is reached.
fn sample_polyline(waypoints: &[Point], speed: f64, delay: f64, slots: usize, delta: f64) -> Trajectory {
    let legs: Vec<f64> = waypoints.windows(2).map(|w| w[0].distance(w[1])).collect();
    let total: f64 = legs.iter().sum();
    let at = |s: f64| {
        let mut s = s.clamp(0.0, total);
        for (i, len) in legs.iter().enumerate() {
            if s <= *len || i + 1 == legs.len() {
                let frac = if *len > 0.0 { (s / len).min(1.0) } else { 1.0 };
                return waypoints[i].lerp(waypoints[i + 1], frac);
            }
            s -= len;
        }
        waypoints[0]
    };
    let mut points: Vec<Point> = (0..=slots).map(|t| at(speed * (t as f64 * delta - delay))).collect();
    // Land exactly on the end despite rounding in the arc-length clamp.
    points[0] = waypoints[0];
    points[slots] = *waypoints.last().expect("at least two waypoints");
    Trajectory::new(points)
}

/// Trajectory flown by `kind` over the horizon of `params`.
pub fn generate(
    kind: &BaselineKind,
    scenario: &Scenario,
    params: &SystemParams,
    pp: &PropulsionParams,
) -> Result<Trajectory, BaselineError> {
    params.validate()?;
    pp.validate()?;
    kind.validate()?;
    let (a, b) = (scenario.start, scenario.end);
    let horizon = params.horizon;
    let d = scenario.min_distance();
    let limit = params.max_speed;
    let check = |speed: f64| {
        if speed > limit * (1.0 + 1e-12) {
            Err(BaselineError::SpeedExceeded {
                scheme: kind.name(),
                required: speed,
                limit,
            })
        } else {
            Ok(speed)
        }
    };
    let (n, delta) = (params.slots, params.delta());
    let cruise = || {
        let v_e = find_min_power_speed(pp, limit).0;
        if d > v_e * horizon {
            return Err(BaselineError::SpeedExceeded {
                scheme: kind.name(),
                required: d / horizon,
                limit: v_e,
            });
        }
        Ok(v_e)
    };
    let traj = match kind {
        BaselineKind::LowSpeed => sample_polyline(&[a, b], check(d / horizon)?, 0.0, n, delta),
        BaselineKind::FlyHalf => sample_polyline(&[a, b], check(2.0 * d / horizon)?, 0.0, n, delta),
        BaselineKind::TwoLines { waypoint } => {
            let path = a.distance(*waypoint) + waypoint.distance(b);
            sample_polyline(&[a, *waypoint, b], check(path / horizon)?, 0.0, n, delta)
        }
        BaselineKind::FlyFirst => sample_polyline(&[a, b], cruise()?, 0.0, n, delta),
        BaselineKind::HoverFirst => {
            let v = cruise()?;
            sample_polyline(&[a, b], v, horizon - d / v, n, delta)
        }
        BaselineKind::RoundTrip => sample_polyline(&[a, b, a, b], check(3.0 * d / horizon)?, 0.0, n, delta),
    };
    Ok(traj)
}

/// Per-slot energy accounting of `kind` with closed-form jamming.
pub fn evaluate(
    kind: &BaselineKind,
    scenario: &Scenario,
    params: &SystemParams,
    pp: &PropulsionParams,
    sp: &SolarParams,
) -> Result<EnergyLedger, BaselineError> {
    let traj = generate(kind, scenario, params, pp)?;
    let jam = JammingProfile::closed_form(&traj, params);
    Ok(evaluate_ledger(&traj, &jam, params, pp, sp)?)
}
