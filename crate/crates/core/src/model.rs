//! Physical models: link geometry and channel gains, the eavesdropping SINR
//! pair, closed-form jamming power, rotary-wing propulsion power, solar
//! harvesting, and slot-level energy accounting.
//!
//! Everything here is a pure function of its inputs. The suspicious source
//! S sits at the origin, the suspicious destination D at `(d, 0)`, and the
//! UAV flies at the fixed altitude `H`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::jamming_opt::JammingProfile;

/// A horizontal position in metres.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(self, other: Point, s: f64) -> Point {
        Point::new(self.x + (other.x - self.x) * s, self.y + (other.y - self.y) * s)
    }
}

impl From<[f64; 2]> for Point {
    fn from(p: [f64; 2]) -> Self {
        Point::new(p[0], p[1])
    }
}

/// Geometry, channel, timing and energy-budget parameters of the system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Ground distance between S and D (m).
    pub sd_distance: f64,
    /// UAV altitude (m).
    pub altitude: f64,
    /// Channel power gain at the 1 m reference distance.
    pub beta0: f64,
    /// Noise power spectral density (dBm/Hz).
    pub noise_psd_dbm_hz: f64,
    /// Receiver bandwidth (Hz).
    pub bandwidth_hz: f64,
    /// Explicit noise power (W); replaces the PSD-times-bandwidth value.
    pub sigma2_override: Option<f64>,
    /// Scheduling horizon (s).
    pub horizon: f64,
    /// Number of slots in the horizon.
    pub slots: usize,
    /// Maximum horizontal speed (m/s).
    pub max_speed: f64,
    /// Constant circuit power (W).
    pub circuit_power: f64,
    /// Fraction of the initial battery energy that may be spent.
    pub usable_fraction: f64,
    /// Initial battery energy (J).
    pub initial_energy: f64,
    /// Transmit power of the suspicious source (W). Never needed by the
    /// optimizers; kept for SINR reporting.
    pub source_power: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            sd_distance: 200.0,
            altitude: 100.0,
            beta0: 1e-12,
            noise_psd_dbm_hz: -169.0,
            bandwidth_hz: 10e6,
            sigma2_override: None,
            horizon: 30.0,
            slots: 300,
            max_speed: 40.0,
            circuit_power: 0.0,
            usable_fraction: 0.8,
            initial_energy: 7000.0,
            source_power: 1.0,
        }
    }
}

impl SystemParams {
    /// Slot length δ = T / T_w (s).
    pub fn delta(&self) -> f64 {
        self.horizon / self.slots as f64
    }

    /// Largest distance the UAV can cover in one slot (m).
    pub fn max_step(&self) -> f64 {
        self.max_speed * self.delta()
    }

    /// Noise power σ² (W).
    pub fn noise_power(&self) -> f64 {
        self.sigma2_override.unwrap_or_else(|| {
            let dbm = self.noise_psd_dbm_hz + 10.0 * self.bandwidth_hz.log10();
            10f64.powf((dbm - 30.0) / 10.0)
        })
    }

    /// σ²/β₀, the only combination of the two that jamming powers depend on.
    pub fn noise_to_gain(&self) -> f64 {
        self.noise_power() / self.beta0
    }

    /// Returns a copy with the horizon and slot length replaced.
    pub fn with_timing(&self, horizon: f64, delta: f64) -> Result<Self, ModelError> {
        let slots = slots_for(horizon, delta)?;
        Ok(Self {
            horizon,
            slots,
            ..self.clone()
        })
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("sd_distance", self.sd_distance),
            ("altitude", self.altitude),
            ("beta0", self.beta0),
            ("bandwidth_hz", self.bandwidth_hz),
            ("horizon", self.horizon),
            ("max_speed", self.max_speed),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ModelError::Invalid(format!("{name} must be positive, got {value}")));
            }
        }
        if self.slots == 0 {
            return Err(ModelError::Invalid("slots must be at least 1".into()));
        }
        let sigma2 = self.noise_power();
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(ModelError::Invalid(format!(
                "noise power must be positive, got {sigma2}"
            )));
        }
        if !(0.0..=1.0).contains(&self.usable_fraction) {
            return Err(ModelError::Invalid(format!(
                "usable_fraction must lie in [0, 1], got {}",
                self.usable_fraction
            )));
        }
        if self.circuit_power < 0.0 || self.initial_energy < 0.0 || self.source_power < 0.0 {
            return Err(ModelError::Invalid(
                "circuit power, initial energy and source power must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Number of slots for a horizon and slot length; the ratio must be integral.
pub fn slots_for(horizon: f64, delta: f64) -> Result<usize, ModelError> {
    if !(horizon > 0.0 && delta > 0.0) {
        return Err(ModelError::Invalid(format!(
            "horizon and slot length must be positive, got {horizon} and {delta}"
        )));
    }
    let ratio = horizon / delta;
    let slots = ratio.round();
    if (ratio - slots).abs() > 1e-6 * ratio.max(1.0) || slots < 1.0 {
        return Err(ModelError::Invalid(format!(
            "horizon {horizon} s is not a whole number of {delta} s slots"
        )));
    }
    Ok(slots as usize)
}

/// Rotary-wing propulsion model coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropulsionParams {
    /// Blade profile power in hover (W).
    pub blade_power: f64,
    /// Induced power in hover (W).
    pub induced_power: f64,
    /// Rotor blade tip speed (m/s).
    pub tip_speed: f64,
    /// Mean rotor induced velocity in hover (m/s).
    pub hover_induced_velocity: f64,
    /// Fuselage drag ratio.
    pub drag_ratio: f64,
    /// Air density (kg/m³).
    pub air_density: f64,
    /// Rotor solidity.
    pub solidity: f64,
    /// Rotor disc area (m²).
    pub disc_area: f64,
}

impl Default for PropulsionParams {
    /// 2 kg quadrotor. The drag ratio 0.15 places the minimum-power cruise
    /// at 22.27 m/s and 41.89 W; see [`PropulsionParams::nominal_drag`].
    fn default() -> Self {
        Self {
            blade_power: 3.4,
            induced_power: 118.0,
            tip_speed: 60.0,
            hover_induced_velocity: 5.4,
            drag_ratio: 0.15,
            air_density: 1.225,
            solidity: 0.03,
            disc_area: 0.28,
        }
    }
}

impl PropulsionParams {
    /// Same airframe with the tabulated drag ratio 0.3, which moves the
    /// minimum-power cruise to 18.9 m/s and 48.4 W.
    pub fn nominal_drag() -> Self {
        Self {
            drag_ratio: 0.3,
            ..Self::default()
        }
    }

    /// Coefficient of V³ in the parasite term.
    pub fn parasite_coefficient(&self) -> f64 {
        0.5 * self.drag_ratio * self.air_density * self.solidity * self.disc_area
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("blade_power", self.blade_power),
            ("induced_power", self.induced_power),
            ("tip_speed", self.tip_speed),
            ("hover_induced_velocity", self.hover_induced_velocity),
            ("air_density", self.air_density),
            ("disc_area", self.disc_area),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ModelError::Invalid(format!("{name} must be positive, got {value}")));
            }
        }
        for (name, value) in [("drag_ratio", self.drag_ratio), ("solidity", self.solidity)] {
            if !(0.0..1.0).contains(&value) {
                return Err(ModelError::Invalid(format!("{name} must lie in [0, 1), got {value}")));
            }
        }
        Ok(())
    }
}

/// Solar panel and atmosphere parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolarParams {
    /// Maximum atmospheric transmittance.
    pub max_transmittance: f64,
    /// Air extinction coefficient.
    pub extinction: f64,
    /// Cloud interception factor (1/m).
    pub cloud_attenuation: f64,
    /// Mean radiant power on the ground (W/m²).
    pub irradiance: f64,
    /// Scaling altitude (m).
    pub scale_height: f64,
    /// Panel efficiency.
    pub efficiency: f64,
    /// Panel area (m²).
    pub panel_area: f64,
    /// Lower cloud boundary (m).
    pub cloud_base: f64,
    /// Upper cloud boundary (m).
    pub cloud_top: f64,
}

impl Default for SolarParams {
    fn default() -> Self {
        Self {
            max_transmittance: 0.8978,
            extinction: 0.2804,
            cloud_attenuation: 0.01,
            irradiance: 1367.0,
            scale_height: 8000.0,
            efficiency: 0.4,
            panel_area: 0.5,
            cloud_base: 500.0,
            cloud_top: 1000.0,
        }
    }
}

impl SolarParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.max_transmittance > 0.0 && self.max_transmittance <= 1.0) {
            return Err(ModelError::Invalid(format!(
                "max_transmittance must lie in (0, 1], got {}",
                self.max_transmittance
            )));
        }
        if self.cloud_attenuation < 0.0 {
            return Err(ModelError::Invalid("cloud_attenuation must be nonnegative".into()));
        }
        if !(self.efficiency > 0.0 && self.efficiency < 1.0) {
            return Err(ModelError::Invalid(format!(
                "efficiency must lie in (0, 1), got {}",
                self.efficiency
            )));
        }
        if self.cloud_base >= self.cloud_top {
            return Err(ModelError::Invalid(format!(
                "cloud_base ({}) must be below cloud_top ({})",
                self.cloud_base, self.cloud_top
            )));
        }
        if self.scale_height <= 0.0 || self.panel_area < 0.0 || self.irradiance < 0.0 {
            return Err(ModelError::Invalid(
                "scale_height must be positive; panel_area and irradiance nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Urban propagation parameters. No defaults: the environment constants
/// of the LoS sigmoid must come from configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NLoSParams {
    /// Sigmoid constant `C` of the LoS probability.
    pub los_c: f64,
    /// Sigmoid constant `D` of the LoS probability.
    pub los_d: f64,
    /// Path-loss exponent.
    pub path_loss_exponent: f64,
    /// Extra attenuation of the NLoS component, in (0, 1).
    pub nlos_attenuation: f64,
    /// Coefficient of `d⁻²` in the quadratic gain approximation.
    pub eta1: f64,
    /// Constant term of the quadratic gain approximation.
    pub eta2: f64,
}

impl NLoSParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.path_loss_exponent < 2.0 {
            return Err(ModelError::Invalid(format!(
                "path_loss_exponent must be at least 2, got {}",
                self.path_loss_exponent
            )));
        }
        if !(self.nlos_attenuation > 0.0 && self.nlos_attenuation <= 1.0) {
            return Err(ModelError::Invalid(format!(
                "nlos_attenuation must lie in (0, 1], got {}",
                self.nlos_attenuation
            )));
        }
        if self.eta1 <= 0.0 || self.eta2 < 0.0 {
            return Err(ModelError::Invalid("eta1 must be positive and eta2 nonnegative".into()));
        }
        Ok(())
    }
}

/// Named start/end pairs used throughout the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PresetName {
    /// Both endpoints inside the jamming-free disc.
    Jf,
    /// Start inside, end outside.
    If,
    /// Both endpoints outside.
    Nf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub start: Point,
    pub end: Point,
}

impl Scenario {
    pub fn new(name: impl Into<String>, start: Point, end: Point) -> Self {
        Self {
            name: name.into(),
            start,
            end,
        }
    }

    pub fn preset(which: PresetName) -> Self {
        match which {
            PresetName::Jf => Self::new("JF", Point::new(-50.0, -100.0), Point::new(100.0, 140.0)),
            PresetName::If => Self::new("IF", Point::new(-50.0, 0.0), Point::new(100.0, 350.0)),
            PresetName::Nf => Self::new("NF", Point::new(300.0, 200.0), Point::new(200.0, 400.0)),
        }
    }

    pub fn min_distance(&self) -> f64 {
        self.start.distance(self.end)
    }

    pub fn min_time(&self, max_speed: f64) -> f64 {
        self.min_distance() / max_speed
    }

    /// At least one trajectory reaches the end within the horizon.
    pub fn check_feasible(&self, params: &SystemParams) -> Result<(), ModelError> {
        let reach = params.max_step() * params.slots as f64;
        let need = self.min_distance();
        if need > reach * (1.0 + 1e-12) {
            return Err(ModelError::InfeasibleScenario { distance: need, reach });
        }
        Ok(())
    }
}

/// Waypoints `p_0 … p_{T_w}`; slot `t` (1-based) is flown from `p_{t-1}`
/// to `p_t` and the UAV is treated as static at `p_t` within it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<Point>,
}

impl Trajectory {
    pub fn new(points: Vec<Point>) -> Self {
        Self { points }
    }

    /// Constant-speed straight flight from `start` to `end` over `slots` slots.
    pub fn straight(start: Point, end: Point, slots: usize) -> Self {
        let points = (0..=slots)
            .map(|k| {
                if slots == 0 {
                    start
                } else {
                    start.lerp(end, k as f64 / slots as f64)
                }
            })
            .collect();
        Self { points }
    }

    pub fn slots(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    /// Waypoint the UAV occupies during slot `t` (1-based).
    pub fn slot_point(&self, t: usize) -> Point {
        self.points[t]
    }

    pub fn step_lengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.windows(2).map(|w| w[0].distance(w[1]))
    }

    pub fn length(&self) -> f64 {
        self.step_lengths().sum()
    }

    pub fn speeds(&self, delta: f64) -> Vec<f64> {
        self.points.windows(2).map(|w| slot_speed(w[1], w[0], delta)).collect()
    }

    /// Checks the endpoint and per-slot speed invariants.
    pub fn validate(&self, scenario: &Scenario, params: &SystemParams, tol: f64) -> Result<(), ModelError> {
        if self.slots() != params.slots {
            return Err(ModelError::LengthMismatch {
                expected: params.slots,
                found: self.slots(),
            });
        }
        let first = self.points[0];
        let last = self.points[self.points.len() - 1];
        if first.distance(scenario.start) > tol || last.distance(scenario.end) > tol {
            return Err(ModelError::Invalid(
                "trajectory endpoints do not match the scenario".into(),
            ));
        }
        let limit = params.max_step();
        for (t, step) in self.step_lengths().enumerate() {
            if step > limit + tol {
                return Err(ModelError::SpeedLimit {
                    slot: t + 1,
                    step,
                    limit,
                });
            }
        }
        Ok(())
    }
}

/// S–D channel gain β₀/d².
pub fn channel_gain_sd(params: &SystemParams) -> f64 {
    params.beta0 / (params.sd_distance * params.sd_distance)
}

/// Squared S–U distance x² + y² + H².
pub fn su_distance_sq(p: Point, params: &SystemParams) -> f64 {
    p.x * p.x + p.y * p.y + params.altitude * params.altitude
}

/// Squared U–D distance (d − x)² + y² + H².
pub fn ud_distance_sq(p: Point, params: &SystemParams) -> f64 {
    let dx = params.sd_distance - p.x;
    dx * dx + p.y * p.y + params.altitude * params.altitude
}

pub fn channel_gain_su(p: Point, params: &SystemParams) -> f64 {
    params.beta0 / su_distance_sq(p, params)
}

pub fn channel_gain_ud(p: Point, params: &SystemParams) -> f64 {
    params.beta0 / ud_distance_sq(p, params)
}

/// SINR at D and SNR at the UAV for jamming power `jamming` (W).
pub fn sinr_pair(p: Point, jamming: f64, params: &SystemParams) -> (f64, f64) {
    let sigma2 = params.noise_power();
    let h0 = channel_gain_sd(params);
    let h1 = channel_gain_su(p, params);
    let h2 = channel_gain_ud(p, params);
    let gamma_d = h0 * params.source_power / (h2 * jamming + sigma2);
    let gamma_u = h1 * params.source_power / sigma2;
    (gamma_d, gamma_u)
}

/// Whether the UAV's S–U link is at least as good as the S–D link.
pub fn in_jamming_free(p: Point, params: &SystemParams) -> bool {
    su_distance_sq(p, params) <= params.sd_distance * params.sd_distance
}

/// Ground radius of the jamming-free disc around S.
pub fn jamming_free_radius(params: &SystemParams) -> f64 {
    let d = params.sd_distance;
    let h = params.altitude;
    (d * d - h * h).max(0.0).sqrt()
}

/// Least jamming power that keeps γ_U ≥ γ_D at `p`.
pub fn jamming_power_closed_form(p: Point, params: &SystemParams) -> f64 {
    let d2 = params.sd_distance * params.sd_distance;
    let u = su_distance_sq(p, params);
    let w = ud_distance_sq(p, params);
    (params.noise_to_gain() / d2 * w * (u - d2)).max(0.0)
}

/// Rotary-wing propulsion power at horizontal speed `speed` (m/s).
pub fn propulsion_power(speed: f64, pp: &PropulsionParams) -> f64 {
    let v2 = speed * speed;
    let blade = pp.blade_power * (1.0 + 3.0 * v2 / (pp.tip_speed * pp.tip_speed));
    let induced = pp.induced_power * induced_factor(speed, pp);
    blade + induced + pp.parasite_coefficient() * v2 * speed
}

/// The square-rooted induced-power factor, which equals the slack `q` at
/// equality.
pub(crate) fn induced_factor(speed: f64, pp: &PropulsionParams) -> f64 {
    let v0sq = pp.hover_induced_velocity * pp.hover_induced_velocity;
    let r = speed * speed / (2.0 * v0sq);
    // sqrt(1 + r²) − r, rewritten to avoid cancellation at high speed.
    (1.0 / ((1.0 + r * r).sqrt() + r)).sqrt()
}

/// Minimum-power cruise speed on `[0, max_speed]` and the power there.
pub fn find_min_power_speed(pp: &PropulsionParams, max_speed: f64) -> (f64, f64) {
    let f = |v: f64| propulsion_power(v, pp);
    let v = golden_section(f, 0.0, max_speed, 1e-7);
    (v, f(v))
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        }
    }
    let mid = 0.5 * (lo + hi);
    // The interior search never evaluates the bracket ends themselves.
    [lo, mid, hi]
        .into_iter()
        .min_by(|x, y| f(*x).total_cmp(&f(*y)))
        .unwrap_or(mid)
}

/// Constant speed within a slot.
pub fn slot_speed(p: Point, prev: Point, delta: f64) -> f64 {
    p.distance(prev) / delta
}

/// Electric power generated by the solar panel at altitude `altitude`.
pub fn solar_power(altitude: f64, sp: &SolarParams) -> f64 {
    let transmittance = sp.max_transmittance - sp.extinction * (-altitude / sp.scale_height).exp();
    let cloud_path = if altitude >= sp.cloud_top {
        0.0
    } else if altitude >= sp.cloud_base {
        sp.cloud_top - altitude
    } else {
        sp.cloud_top - sp.cloud_base
    };
    let cloud = (-sp.cloud_attenuation * cloud_path).exp();
    sp.efficiency * sp.panel_area * sp.irradiance * transmittance * cloud
}

/// Fewest slots keeping the per-slot travel below `eps` times the altitude.
pub fn min_time_slots(eps: f64, params: &SystemParams) -> Result<usize, ModelError> {
    if !(eps > 0.0) {
        return Err(ModelError::Invalid(format!(
            "accuracy threshold must be positive, got {eps}"
        )));
    }
    let bound = params.max_speed * params.horizon / (params.altitude * eps);
    Ok((bound.ceil() as usize).max(1))
}

/// Which UAV–ground link a gain refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    SourceToUav,
    UavToDestination,
}

fn link_distance(p: Point, link: Link, params: &SystemParams) -> f64 {
    match link {
        Link::SourceToUav => su_distance_sq(p, params),
        Link::UavToDestination => ud_distance_sq(p, params),
    }
    .sqrt()
}

/// Probability of a line-of-sight UAV–ground link at distance `distance`.
pub fn los_probability(distance: f64, np: &NLoSParams, params: &SystemParams) -> Result<f64, ModelError> {
    if distance < params.altitude {
        return Err(ModelError::Invalid(format!(
            "link distance {distance} m is shorter than the altitude {} m",
            params.altitude
        )));
    }
    let elevation = (params.altitude / distance).asin().to_degrees();
    Ok(1.0 / (1.0 + np.los_c * (-np.los_d * (elevation - np.los_c)).exp()))
}

/// Expected UAV–ground gain mixing LoS and attenuated NLoS components.
pub fn nlos_gain_at_distance(distance: f64, np: &NLoSParams, params: &SystemParams) -> Result<f64, ModelError> {
    let p_los = los_probability(distance, np, params)?;
    let path = params.beta0 * distance.powf(-np.path_loss_exponent);
    Ok(p_los * path + (1.0 - p_los) * np.nlos_attenuation * path)
}

pub fn nlos_gain(p: Point, link: Link, np: &NLoSParams, params: &SystemParams) -> Result<f64, ModelError> {
    nlos_gain_at_distance(link_distance(p, link, params), np, params)
}

/// `η₁ d⁻² + η₂` surrogate of [`nlos_gain`]; only defined for exponent 2.
pub fn quadratic_approx_gain(p: Point, link: Link, np: &NLoSParams, params: &SystemParams) -> Result<f64, ModelError> {
    let d = link_distance(p, link, params);
    quadratic_approx_gain_at_distance(d, np)
}

pub fn quadratic_approx_gain_at_distance(distance: f64, np: &NLoSParams) -> Result<f64, ModelError> {
    if np.path_loss_exponent != 2.0 {
        return Err(ModelError::Invalid(format!(
            "quadratic gain approximation needs path-loss exponent 2, got {}",
            np.path_loss_exponent
        )));
    }
    Ok(np.eta1 / (distance * distance) + np.eta2)
}

/// Unit-mean exponential fading draws, one per slot, from a fixed seed.
pub fn rayleigh_fading(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Exp1.sample(&mut rng)).collect()
}

/// Rayleigh-faded S–D gains β₀ ξ_t d^{−κ}.
pub fn rayleigh_sd_gains(seed: u64, count: usize, np: &NLoSParams, params: &SystemParams) -> Vec<f64> {
    let path = params.beta0 * params.sd_distance.powf(-np.path_loss_exponent);
    rayleigh_fading(seed, count).into_iter().map(|xi| path * xi).collect()
}

pub fn rayleigh_sd_gain(seed: u64, np: &NLoSParams, params: &SystemParams) -> f64 {
    rayleigh_sd_gains(seed, 1, np, params)[0]
}

/// Per-slot and cumulative energy bookkeeping of a flight.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub delta: f64,
    pub jamming: Vec<f64>,
    pub propulsion: Vec<f64>,
    pub circuit: Vec<f64>,
    pub harvested: Vec<f64>,
    pub cumulative_jamming: Vec<f64>,
    pub cumulative_propulsion: Vec<f64>,
    pub cumulative_circuit: Vec<f64>,
    pub cumulative_harvested: Vec<f64>,
    /// Battery content after each slot: E₀ + harvested − consumed.
    pub battery: Vec<f64>,
}

fn prefix_sums(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

impl EnergyLedger {
    pub fn slots(&self) -> usize {
        self.jamming.len()
    }

    pub fn total_jamming(&self) -> f64 {
        self.cumulative_jamming.last().copied().unwrap_or(0.0)
    }

    pub fn total_propulsion(&self) -> f64 {
        self.cumulative_propulsion.last().copied().unwrap_or(0.0)
    }

    pub fn total_circuit(&self) -> f64 {
        self.cumulative_circuit.last().copied().unwrap_or(0.0)
    }

    pub fn total_harvested(&self) -> f64 {
        self.cumulative_harvested.last().copied().unwrap_or(0.0)
    }

    /// Jamming plus propulsion, the quantity the optimizers minimize.
    pub fn total_flight_energy(&self) -> f64 {
        self.total_jamming() + self.total_propulsion()
    }

    pub fn total_consumed(&self) -> f64 {
        self.total_jamming() + self.total_propulsion() + self.total_circuit()
    }
}

/// Builds the energy ledger of a trajectory and its jamming profile.
pub fn evaluate_ledger(
    traj: &Trajectory,
    jam: &JammingProfile,
    params: &SystemParams,
    pp: &PropulsionParams,
    sp: &SolarParams,
) -> Result<EnergyLedger, ModelError> {
    let slots = traj.slots();
    if jam.len() != slots {
        return Err(ModelError::LengthMismatch {
            expected: slots,
            found: jam.len(),
        });
    }
    let delta = params.delta();
    let jamming: Vec<f64> = jam.powers().iter().map(|p| p * delta).collect();
    let propulsion: Vec<f64> = traj
        .speeds(delta)
        .into_iter()
        .map(|v| propulsion_power(v, pp) * delta)
        .collect();
    let circuit = vec![params.circuit_power * delta; slots];
    let harvested = vec![solar_power(params.altitude, sp) * delta; slots];
    let cumulative_jamming = prefix_sums(&jamming);
    let cumulative_propulsion = prefix_sums(&propulsion);
    let cumulative_circuit = prefix_sums(&circuit);
    let cumulative_harvested = prefix_sums(&harvested);
    let battery = (0..slots)
        .map(|t| {
            params.initial_energy + cumulative_harvested[t]
                - cumulative_jamming[t]
                - cumulative_propulsion[t]
                - cumulative_circuit[t]
        })
        .collect();
    Ok(EnergyLedger {
        delta,
        jamming,
        propulsion,
        circuit,
        harvested,
        cumulative_jamming,
        cumulative_propulsion,
        cumulative_circuit,
        cumulative_harvested,
        battery,
    })
}

/// Energy components of the straight constant-speed flight with no solar
/// input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialEnergy {
    pub propulsion: f64,
    pub jamming: f64,
    pub circuit: f64,
}

impl InitialEnergy {
    pub fn total(&self) -> f64 {
        self.propulsion + self.jamming + self.circuit
    }
}

/// Smallest battery energy that completes the mission along the straight
/// line at constant speed without harvesting.
pub fn min_initial_energy(
    scenario: &Scenario,
    params: &SystemParams,
    pp: &PropulsionParams,
) -> Result<InitialEnergy, ModelError> {
    scenario.check_feasible(params)?;
    let traj = Trajectory::straight(scenario.start, scenario.end, params.slots);
    let jam = JammingProfile::closed_form(&traj, params);
    let delta = params.delta();
    let speed = scenario.min_distance() / params.horizon;
    Ok(InitialEnergy {
        propulsion: propulsion_power(speed, pp) * params.horizon,
        jamming: jam.energy(delta),
        circuit: params.circuit_power * params.horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn gains_match_hand_values() {
        let p = SystemParams::default();
        assert!(rel(channel_gain_sd(&p), 2.5e-17) < 1e-12);
        assert!(rel(channel_gain_su(Point::new(0.0, 0.0), &p), 1e-16) < 1e-12);
        assert!(rel(channel_gain_su(Point::new(300.0, 200.0), &p), 1e-12 / 1.4e5) < 1e-12);
        assert!(rel(channel_gain_ud(Point::new(300.0, 200.0), &p), 1e-12 / 6e4) < 1e-12);
        assert!(rel(channel_gain_ud(Point::new(200.0, 0.0), &p), 1e-12 / 1e4) < 1e-12);
        let unit = SystemParams {
            beta0: 1.0,
            sd_distance: 1.0,
            ..p.clone()
        };
        assert_eq!(channel_gain_sd(&unit), 1.0);
        let doubled = SystemParams {
            sd_distance: 400.0,
            ..p.clone()
        };
        assert!(rel(channel_gain_sd(&doubled), channel_gain_sd(&p) / 4.0) < 1e-12);
    }

    #[test]
    fn noise_power_from_psd_and_bandwidth() {
        let p = SystemParams::default();
        // −169 dBm/Hz over 10 MHz is −99 dBm.
        assert!(rel(p.noise_power(), 10f64.powf(-12.9)) < 1e-12);
        let o = SystemParams {
            sigma2_override: Some(2e-14),
            ..p
        };
        assert_eq!(o.noise_power(), 2e-14);
    }

    #[test]
    fn jamming_free_membership() {
        let p = SystemParams::default();
        assert!(in_jamming_free(Point::new(0.0, 0.0), &p));
        assert!(!in_jamming_free(Point::new(300.0, 200.0), &p));
        assert!(rel(jamming_free_radius(&p), 173.205_080_756_887_7) < 1e-12);
        let r = jamming_free_radius(&p);
        assert!(in_jamming_free(Point::new(r, 0.0), &p));
        assert_eq!(jamming_power_closed_form(Point::new(0.0, r), &p), 0.0);
    }

    #[test]
    fn closed_form_jamming_hand_value() {
        let p = SystemParams::default();
        let k = p.noise_to_gain();
        let expect = k / 4e4 * 6e4 * 1e5;
        assert!(rel(jamming_power_closed_form(Point::new(300.0, 200.0), &p), expect) < 1e-12);
        // The closed form restores γ_U = γ_D exactly.
        let pt = Point::new(300.0, 200.0);
        let (gd, gu) = sinr_pair(pt, jamming_power_closed_form(pt, &p), &p);
        assert!(rel(gd, gu) < 1e-12);
    }

    #[test]
    fn sinr_limits() {
        let p = SystemParams::default();
        let pt = Point::new(250.0, 100.0);
        let (gd0, _) = sinr_pair(pt, 0.0, &p);
        assert!(rel(gd0, channel_gain_sd(&p) * p.source_power / p.noise_power()) < 1e-12);
        let mut last = gd0;
        for pj in [1.0, 10.0, 1e3, 1e6, 1e9, 1e12] {
            let (gd, _) = sinr_pair(pt, pj, &p);
            assert!(gd < last);
            last = gd;
        }
        assert!(last < 1e-6 * gd0);
    }

    #[test]
    fn propulsion_point_values() {
        let pp = PropulsionParams::default();
        assert!((propulsion_power(0.0, &pp) - 121.4).abs() < 1e-12);
        // Tabulated drag ratio, independent scripted evaluation: 66.575 W.
        let nominal = PropulsionParams::nominal_drag();
        assert!((propulsion_power(10.0, &nominal) - 66.575_005_250_690_1).abs() < 1e-9);
        assert!((propulsion_power(22.36, &pp) - 41.84).abs() < 0.1);
        let (v, pmin) = find_min_power_speed(&pp, 40.0);
        assert!((v - 22.36).abs() < 0.3, "V_e = {v}");
        assert!((pmin - 41.84).abs() < 0.5, "P(V_e) = {pmin}");
    }

    #[test]
    fn min_power_speed_without_drag_matches_scan() {
        let pp = PropulsionParams {
            drag_ratio: 0.0,
            tip_speed: 1e12,
            ..PropulsionParams::default()
        };
        // Induced term alone keeps falling; the scan oracle and the search
        // both pick the upper end of the interval.
        let scan = (0..=40_000)
            .map(|k| k as f64 * 1e-3)
            .min_by(|a, b| propulsion_power(*a, &pp).total_cmp(&propulsion_power(*b, &pp)))
            .unwrap();
        let (v, _) = find_min_power_speed(&pp, 40.0);
        assert!((v - scan).abs() < 1e-3);
    }

    #[test]
    fn slot_speed_cases() {
        let a = Point::new(0.0, 0.0);
        assert_eq!(slot_speed(a, a, 0.1), 0.0);
        assert!((slot_speed(Point::new(3.0, 4.0), a, 0.1) - 50.0).abs() < 1e-12);
        let s = Point::new(17.0, -2.0);
        let moved = slot_speed(Point::new(20.0, 2.0), s, 0.1);
        assert!((moved - 50.0).abs() < 1e-9);
    }

    #[test]
    fn solar_branches() {
        let sp = SolarParams::default();
        assert!((solar_power(100.0, &sp) - 1.1437).abs() < 1e-3);
        assert!((solar_power(1000.0, &sp) - 177.80).abs() < 1e-2);
        assert!((solar_power(750.0, &sp) - 14.4189).abs() < 1e-3);
        for h in [sp.cloud_base, sp.cloud_top] {
            let below = solar_power(h - 1e-11, &sp);
            let at = solar_power(h, &sp);
            assert!((below - at).abs() < 1e-9, "jump at {h}");
        }
    }

    #[test]
    fn slot_count_bound() {
        let p = SystemParams::default();
        assert_eq!(min_time_slots(0.1, &p).unwrap(), 120);
        assert_eq!(min_time_slots(1e9, &p).unwrap(), 1);
        let doubled = SystemParams {
            horizon: 60.0,
            ..p.clone()
        };
        assert_eq!(min_time_slots(0.1, &doubled).unwrap(), 240);
        assert!(min_time_slots(0.0, &p).is_err());
    }

    fn urban() -> NLoSParams {
        NLoSParams {
            los_c: 10.0,
            los_d: 0.6,
            path_loss_exponent: 2.0,
            nlos_attenuation: 0.2,
            eta1: 1e-12,
            eta2: 1e-18,
        }
    }

    #[test]
    fn nlos_gain_limits() {
        let p = SystemParams::default();
        let np = urban();
        let above = Point::new(0.0, 0.0);
        let g = nlos_gain(above, Link::SourceToUav, &np, &p).unwrap();
        assert!(rel(g, p.beta0 / 1e4) < 1e-6);
        let clear = NLoSParams {
            nlos_attenuation: 1.0,
            ..np.clone()
        };
        let far = Point::new(900.0, 300.0);
        let g1 = nlos_gain(far, Link::UavToDestination, &clear, &p).unwrap();
        assert!(rel(g1, channel_gain_ud(far, &p)) < 1e-12);
        assert!(nlos_gain_at_distance(50.0, &np, &p).is_err());
    }

    #[test]
    fn quadratic_gain_cases() {
        let p = SystemParams::default();
        let np = urban();
        assert!(rel(quadratic_approx_gain_at_distance(100.0, &np).unwrap(), 1.01e-16) < 1e-12);
        let los = NLoSParams {
            eta1: p.beta0,
            eta2: 0.0,
            ..np.clone()
        };
        let pt = Point::new(120.0, -40.0);
        let g = quadratic_approx_gain(pt, Link::SourceToUav, &los, &p).unwrap();
        assert!(rel(g, channel_gain_su(pt, &p)) < 1e-12);
        let g_far = quadratic_approx_gain_at_distance(1e9, &np).unwrap();
        assert!(rel(g_far, np.eta2) < 1e-6);
        let cubic = NLoSParams {
            path_loss_exponent: 3.0,
            ..np
        };
        assert!(quadratic_approx_gain(pt, Link::SourceToUav, &cubic, &p).is_err());
    }

    #[test]
    fn rayleigh_mean_is_path_gain() {
        let p = SystemParams::default();
        let np = urban();
        let draws = rayleigh_sd_gains(7, 100_000, &np, &p);
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!(rel(mean, p.beta0 / 4e4) < 0.02);
        assert_eq!(rayleigh_fading(3, 5), rayleigh_fading(3, 5));
        assert_eq!(rayleigh_sd_gain(11, &np, &p), draws_first(11, &np, &p));
    }

    fn draws_first(seed: u64, np: &NLoSParams, p: &SystemParams) -> f64 {
        rayleigh_sd_gains(seed, 3, np, p)[0]
    }

    #[test]
    fn ledger_hover_and_empty() {
        let params = SystemParams::default();
        let pp = PropulsionParams::default();
        let sp = SolarParams::default();
        let here = Point::new(10.0, 20.0);
        let traj = Trajectory::new(vec![here; params.slots + 1]);
        let jam = JammingProfile::zeros(params.slots);
        let ledger = evaluate_ledger(&traj, &jam, &params, &pp, &sp).unwrap();
        assert!((ledger.total_propulsion() - 3642.0).abs() < 1e-9);
        assert_eq!(ledger.total_jamming(), 0.0);

        let empty = Trajectory::new(vec![here]);
        let ledger = evaluate_ledger(&empty, &JammingProfile::zeros(0), &params, &pp, &sp).unwrap();
        assert_eq!(ledger.total_consumed(), 0.0);
        assert_eq!(ledger.total_harvested(), 0.0);

        assert!(evaluate_ledger(&traj, &JammingProfile::zeros(3), &params, &pp, &sp).is_err());
    }

    #[test]
    fn initial_energy_nf() {
        let params = SystemParams::default();
        let pp = PropulsionParams::default();
        let nf = Scenario::preset(PresetName::Nf);
        let e = min_initial_energy(&nf, &params, &pp).unwrap();
        assert!(rel(e.propulsion, 2427.5) < 0.02);
        assert_eq!(e.circuit, 0.0);

        let jf = Scenario::preset(PresetName::Jf);
        let e = min_initial_energy(&jf, &params, &pp).unwrap();
        assert_eq!(e.jamming, 0.0);

        let slow = SystemParams {
            max_speed: 1.0,
            ..params
        };
        assert!(min_initial_energy(&nf, &slow, &pp).is_err());
    }
}
