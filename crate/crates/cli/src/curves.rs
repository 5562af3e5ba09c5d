//! Sampled model curves for plotting.

use std::io::Write;

use thiserror::Error;
use uavmon::model::{propulsion_power, solar_power, PropulsionParams, SolarParams};

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("invalid range: need finite from <= to and step > 0, got from {from}, to {to}, step {step}")]
    Range { from: f64, to: f64, step: f64 },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    /// Propulsion power against horizontal speed.
    Propulsion,
    /// Harvested solar power against altitude.
    Solar,
}

impl Curve {
    pub fn header(self) -> [&'static str; 2] {
        match self {
            Curve::Propulsion => ["speed_m_s", "power_W"],
            Curve::Solar => ["altitude_m", "power_W"],
        }
    }

    /// Default sampling range and step.
    pub fn default_range(self) -> (f64, f64, f64) {
        match self {
            Curve::Propulsion => (0.0, 60.0, 0.1),
            Curve::Solar => (0.0, 2000.0, 10.0),
        }
    }
}

/// Samples `from, from + step, …` up to and including `to` when it falls
/// on the grid.
pub fn sample(
    curve: Curve,
    from: f64,
    to: f64,
    step: f64,
    pp: &PropulsionParams,
    sp: &SolarParams,
) -> Result<Vec<(f64, f64)>, CurveError> {
    if !(from.is_finite() && to.is_finite() && step > 0.0 && step.is_finite() && from <= to) {
        return Err(CurveError::Range { from, to, step });
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            let x = from + i as f64 * step;
            let y = match curve {
                Curve::Propulsion => propulsion_power(x, pp),
                Curve::Solar => solar_power(x, sp),
            };
            (x, y)
        })
        .collect())
}

pub fn write_csv<W: Write>(curve: Curve, rows: &[(f64, f64)], out: W) -> Result<(), CurveError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(curve.header())?;
    for (x, y) in rows {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
