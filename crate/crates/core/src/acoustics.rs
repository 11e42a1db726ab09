//! Mean-free path and reverberation time.
//!
//! * analytic mean-free path `4V/S` and the estimate from traced segments;
//! * Sabine and mean-free-path (Eyring) RT60 predictions;
//! * RT60 regressed from a ray-traced energy histogram via backward
//!   (Schroeder) integration.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scene::{Scene, NUM_BANDS};
use crate::tracer::{EnergyDecayCurve, PathTraceResult};

/// Sabine constant in s/m (SI units, c = 343 m/s).
pub const SABINE_CONSTANT: f64 = 0.1611;

/// Proportionality constant of the mean-free-path RT60 relation, `SABINE_CONSTANT / 4` (s/m).
pub const MFP_RT60_CONSTANT: f64 = SABINE_CONSTANT / 4.0;

/// Upper and lower level of the decay span used for the regression (dB).
pub const FIT_START_DB: f64 = -5.0;
pub const FIT_END_DB: f64 = -35.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MfpEstimate {
    /// Mean-free path (m).
    pub mu: f64,
    pub segments_used: usize,
    pub rays_completed: usize,
    pub source: Vec3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rt60Method {
    Sabine,
    EyringMfp,
    DecayRegression,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rt60Estimate {
    /// Per-band RT60 (s).
    pub bands: Vec<f64>,
    pub method: Rt60Method,
    /// Per-band R² of the decay regression.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_quality: Option<Vec<f64>>,
}

impl Rt60Estimate {
    /// Mean over bands.
    pub fn broadband(&self) -> f64 {
        self.bands.iter().sum::<f64>() / self.bands.len() as f64
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::InvalidArgument(format!("{name} must be positive, got {value}")));
    }
    Ok(())
}

fn check_absorption(a_band: &[f64]) -> Result<()> {
    if a_band.is_empty() {
        return Err(Error::InvalidArgument("no absorption bands given".into()));
    }
    for &a in a_band {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidArgument(format!("mean absorption {a} must lie in (0, 1)")));
        }
    }
    Ok(())
}

/// `4V/S`.
pub fn mfp_analytic(volume: f64, area: f64) -> Result<f64> {
    check_positive("volume", volume)?;
    check_positive("surface area", area)?;
    Ok(4.0 * volume / area)
}

/// Sum of all segment lengths divided by the number of segments traversed.
pub fn mfp_from_trace(trace: &PathTraceResult) -> Result<MfpEstimate> {
    let segments_used = trace.total_segments();
    if segments_used == 0 {
        return Err(Error::NoCollisions);
    }
    let total: f64 = trace.rays.iter().flat_map(|r| r.segments.iter()).sum();
    Ok(MfpEstimate {
        mu: total / segments_used as f64,
        segments_used,
        rays_completed: trace.completed_rays(),
        source: trace.source,
    })
}

/// Area-weighted mean absorption of the scene surfaces, per band.
pub fn mean_absorption(scene: &Scene) -> [f64; NUM_BANDS] {
    let mut weighted = [0.0; NUM_BANDS];
    let mut total = 0.0;
    for tri in scene.triangles() {
        let area = tri.area();
        total += area;
        for (w, a) in weighted.iter_mut().zip(scene.material(tri.material_id).absorption) {
            *w += area * a;
        }
    }
    weighted.map(|w| w / total)
}

/// Sabine: `0.1611 V / (S a)` per band.
pub fn rt60_sabine(volume: f64, area: f64, a_band: &[f64]) -> Result<Rt60Estimate> {
    check_positive("volume", volume)?;
    check_positive("surface area", area)?;
    check_absorption(a_band)?;
    Ok(Rt60Estimate {
        bands: a_band.iter().map(|a| SABINE_CONSTANT * volume / (area * a)).collect(),
        method: Rt60Method::Sabine,
        fit_quality: None,
    })
}

/// `k μ / −ln(1 − a)` per band, i.e. Eyring's formula written in terms of the mean-free path.
pub fn rt60_from_mfp(mu: f64, a_band: &[f64]) -> Result<Rt60Estimate> {
    check_positive("mean-free path", mu)?;
    check_absorption(a_band)?;
    Ok(Rt60Estimate {
        bands: a_band.iter().map(|a| MFP_RT60_CONSTANT * mu / -(1.0 - a).ln()).collect(),
        method: Rt60Method::EyringMfp,
        fit_quality: None,
    })
}

/// Backward-integrated decay of one band, in dB relative to its start.
///
/// Entry `i` is the level of the energy arriving at or after `i * bin_width`.
pub fn schroeder_decay_db(histogram: &[f64]) -> Vec<f64> {
    let mut remaining = vec![0.0; histogram.len()];
    let mut acc = 0.0;
    for (r, e) in remaining.iter_mut().zip(histogram).rev() {
        acc += e;
        *r = acc;
    }
    let total = acc;
    remaining.iter().map(|r| 10.0 * (r / total).log10()).collect()
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept, r_squared)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// RT60 per band from the −5…−35 dB span of the backward-integrated decay, extrapolated to 60 dB.
pub fn rt60_from_decay(curve: &EnergyDecayCurve) -> Result<Rt60Estimate> {
    let mut bands = Vec::with_capacity(curve.bands.len());
    let mut quality = Vec::with_capacity(curve.bands.len());
    for (band, histogram) in curve.bands.iter().enumerate() {
        let total: f64 = histogram.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidArgument(format!("band {band} carries no energy")));
        }
        let db = schroeder_decay_db(histogram);
        let reached = db.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::min);
        if reached > FIT_END_DB {
            return Err(Error::InsufficientDecay { band, reached_db: reached });
        }
        let start = db.iter().position(|&d| d <= FIT_START_DB).unwrap_or(0);
        let end = db.iter().rposition(|&d| d >= FIT_END_DB).unwrap_or(start);
        let (x, y): (Vec<f64>, Vec<f64>) = (start..=end).map(|i| (i as f64 * curve.bin_width, db[i])).unzip();
        if x.len() < 2 {
            return Err(Error::InsufficientDecay { band, reached_db: reached });
        }
        let (slope, _, r2) = linear_fit(&x, &y);
        if !(slope < 0.0) {
            return Err(Error::InsufficientDecay { band, reached_db: reached });
        }
        bands.push(-60.0 / slope);
        quality.push(r2);
    }
    Ok(Rt60Estimate { bands, method: Rt60Method::DecayRegression, fit_quality: Some(quality) })
}

/// `time_s,band0_db,...` rows of the backward-integrated decay.
pub fn decay_curve_csv(curve: &EnergyDecayCurve) -> String {
    let decays: Vec<Vec<f64>> = curve.bands.iter().map(|h| schroeder_decay_db(h)).collect();
    let mut out = String::from("time_s");
    for b in 0..decays.len() {
        let _ = write!(out, ",band{b}_db");
    }
    out.push('\n');
    for i in 0..curve.num_bins() {
        let _ = write!(out, "{}", i as f64 * curve.bin_width);
        for d in &decays {
            let _ = write!(out, ",{}", d[i]);
        }
        out.push('\n');
    }
    out
}
