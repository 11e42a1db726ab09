//! Specular ray tracing from a point source.
//!
//! Rays are emitted uniformly over the unit sphere and mirrored at every
//! surface they hit. Each ray draws from its own ChaCha stream keyed by
//! `(rng_seed, ray index)`, so results do not depend on how rays are
//! scheduled across threads.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scene::{Scene, NUM_BANDS, RETRACE_T_MIN, SURFACE_OFFSET};

pub const DEFAULT_SPEED_OF_SOUND: f64 = 343.0;

/// Histogram bin width for energy decay curves (s).
pub const DECAY_BIN_WIDTH: f64 = 1e-3;

/// A ray is dropped once every band carries less than this energy.
pub const ENERGY_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    pub n_rays: usize,
    pub n_bounces: usize,
    pub rng_seed: u64,
    /// m/s
    pub speed_of_sound: f64,
}

impl TraceConfig {
    pub fn new(n_rays: usize, n_bounces: usize, rng_seed: u64) -> TraceConfig {
        TraceConfig { n_rays, n_bounces, rng_seed, speed_of_sound: DEFAULT_SPEED_OF_SOUND }
    }

    /// Low-order trace used for mean-free path estimation: 500 rays, 20 bounces.
    pub fn early_reflections(rng_seed: u64) -> TraceConfig {
        TraceConfig::new(500, 20, rng_seed)
    }

    /// High-order trace used for decay curves: 500 rays, 300 bounces.
    pub fn late_reverberation(rng_seed: u64) -> TraceConfig {
        TraceConfig::new(500, 300, rng_seed)
    }

    fn validate(&self) -> Result<()> {
        if self.n_rays == 0 || self.n_bounces == 0 {
            return Err(Error::InvalidArgument("n_rays and n_bounces must be at least 1".into()));
        }
        let c = self.speed_of_sound;
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidArgument(format!("speed of sound {c} must be positive")));
        }
        Ok(())
    }
}

/// Uniformly distributed unit vector for ray `index` of the bundle seeded by `seed`.
pub fn ray_direction(seed: u64, index: usize) -> Vec3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RayTermination {
    Completed,
    /// No surface was found after `at_bounce` segments.
    Escaped { at_bounce: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayPath {
    /// Segment lengths in metres; the first runs from the source to the first hit.
    pub segments: Vec<f64>,
    pub termination: RayTermination,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathTraceResult {
    pub source: Vec3,
    pub rays: Vec<RayPath>,
    pub n_bounces: usize,
}

impl PathTraceResult {
    pub fn total_segments(&self) -> usize {
        self.rays.iter().map(|r| r.segments.len()).sum()
    }

    pub fn completed_rays(&self) -> usize {
        self.rays.iter().filter(|r| r.termination == RayTermination::Completed).count()
    }

    pub fn escaped_rays(&self) -> usize {
        self.rays.len() - self.completed_rays()
    }

    /// `ray_index,bounce_index,length_m` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ray_index,bounce_index,length_m\n");
        for (r, ray) in self.rays.iter().enumerate() {
            for (b, len) in ray.segments.iter().enumerate() {
                let _ = writeln!(out, "{r},{b},{len}");
            }
        }
        out
    }
}

fn check_source(scene: &Scene, source: Vec3) -> Result<()> {
    if !scene.bounds().contains_strictly(source) {
        return Err(Error::SourceOutsideScene(source));
    }
    Ok(())
}

/// Follow one ray, calling `on_hit(segment_length, material_id)` after every
/// hit. Tracing stops after `n_bounces` hits, on escape, or when `on_hit`
/// returns false.
fn follow_ray(
    scene: &Scene,
    source: Vec3,
    direction: Vec3,
    n_bounces: usize,
    mut on_hit: impl FnMut(f64, usize) -> bool,
) -> RayTermination {
    let mut origin = source;
    let mut dir = direction;
    let mut t_min = 0.0;
    for bounce in 0..n_bounces {
        let Some(hit) = scene.intersect(origin, dir, t_min) else {
            return RayTermination::Escaped { at_bounce: bounce };
        };
        if !on_hit(hit.t, hit.material_id) {
            break;
        }
        origin = origin + dir * hit.t + hit.normal * SURFACE_OFFSET;
        dir = dir.reflect(hit.normal);
        t_min = RETRACE_T_MIN;
    }
    RayTermination::Completed
}

/// Low-order specular trace recording every segment length.
pub fn trace_segments(scene: &Scene, source: Vec3, cfg: &TraceConfig) -> Result<PathTraceResult> {
    cfg.validate()?;
    check_source(scene, source)?;
    let rays: Vec<RayPath> = (0..cfg.n_rays)
        .into_par_iter()
        .map(|i| {
            let mut segments = Vec::with_capacity(cfg.n_bounces);
            let termination = follow_ray(scene, source, ray_direction(cfg.rng_seed, i), cfg.n_bounces, |t, _| {
                segments.push(t);
                true
            });
            RayPath { segments, termination }
        })
        .collect();
    let result = PathTraceResult { source, rays, n_bounces: cfg.n_bounces };
    if result.total_segments() == 0 {
        return Err(Error::NoCollisions);
    }
    Ok(result)
}

/// Energy carried by one ray right after a reflection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayEnergySample {
    /// Arrival time of the reflection (s).
    pub time: f64,
    pub energy: [f64; NUM_BANDS],
}

/// Per-reflection energies of a single ray starting with `initial` energy per band.
pub fn trace_ray_energy(
    scene: &Scene,
    source: Vec3,
    direction: Vec3,
    cfg: &TraceConfig,
    initial: f64,
) -> (Vec<RayEnergySample>, RayTermination) {
    let mut energy = [initial; NUM_BANDS];
    let mut path_length = 0.0;
    let mut samples = Vec::new();
    let c = cfg.speed_of_sound;
    let termination = follow_ray(scene, source, direction, cfg.n_bounces, |t, material_id| {
        path_length += t;
        let absorption = &scene.material(material_id).absorption;
        for (e, a) in energy.iter_mut().zip(absorption) {
            *e *= 1.0 - a;
        }
        samples.push(RayEnergySample { time: path_length / c, energy });
        energy.iter().any(|&e| e >= ENERGY_FLOOR)
    });
    (samples, termination)
}

/// Time histogram of ray energy per frequency band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyDecayCurve {
    /// Bin width in seconds.
    pub bin_width: f64,
    /// `bands[b][i]` is the energy deposited in band `b` during bin `i`.
    pub bands: Vec<Vec<f64>>,
}

impl EnergyDecayCurve {
    pub fn new(bin_width: f64, bands: Vec<Vec<f64>>) -> Result<EnergyDecayCurve> {
        if !(bin_width > 0.0) {
            return Err(Error::InvalidArgument(format!("bin width {bin_width} must be positive")));
        }
        if bands.is_empty() || bands.iter().any(|b| b.len() != bands[0].len()) {
            return Err(Error::InvalidArgument("bands must be non-empty and equally long".into()));
        }
        if bands.iter().flatten().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::InvalidArgument("bin energies must be finite and non-negative".into()));
        }
        Ok(EnergyDecayCurve { bin_width, bands })
    }

    /// Single-band curve from the squared samples of an impulse response.
    pub fn from_impulse_response(samples: &[f64], sample_rate: f64, bin_width: f64) -> Result<EnergyDecayCurve> {
        let per_bin = ((bin_width * sample_rate).round() as usize).max(1);
        let bins = samples.chunks(per_bin).map(|c| c.iter().map(|s| s * s).sum()).collect();
        EnergyDecayCurve::new(per_bin as f64 / sample_rate, vec![bins])
    }

    pub fn num_bins(&self) -> usize {
        self.bands[0].len()
    }

    pub fn duration(&self) -> f64 {
        self.num_bins() as f64 * self.bin_width
    }

    pub fn band_total(&self, band: usize) -> f64 {
        self.bands[band].iter().sum()
    }

    /// Merge adjacent bin pairs.
    pub fn coarsened(&self) -> EnergyDecayCurve {
        EnergyDecayCurve {
            bin_width: 2.0 * self.bin_width,
            bands: self.bands.iter().map(|b| b.chunks(2).map(|c| c.iter().sum()).collect()).collect(),
        }
    }
}

/// High-order trace producing a per-band energy histogram.
///
/// Every ray starts with `1 / n_rays` per band and loses `α` of its energy at
/// each hit. After each hit the carried energy, divided by `n_bounces`, is
/// deposited at the arrival time, so a lossless closed scene deposits a total
/// of exactly 1 per band.
pub fn trace_energy_decay(scene: &Scene, source: Vec3, cfg: &TraceConfig) -> Result<EnergyDecayCurve> {
    cfg.validate()?;
    check_source(scene, source)?;
    let initial = 1.0 / cfg.n_rays as f64;
    let weight = 1.0 / cfg.n_bounces as f64;
    let per_ray: Vec<Vec<RayEnergySample>> = (0..cfg.n_rays)
        .into_par_iter()
        .map(|i| trace_ray_energy(scene, source, ray_direction(cfg.rng_seed, i), cfg, initial).0)
        .collect();

    let last_time = per_ray.iter().flatten().map(|s| s.time).fold(f64::NEG_INFINITY, f64::max);
    if !last_time.is_finite() {
        return Err(Error::NoCollisions);
    }
    let bin_of = |t: f64| (t / DECAY_BIN_WIDTH) as usize;
    let n_bins = (2 * (bin_of(last_time) + 1)).max(2);
    let mut bands = vec![vec![0.0; n_bins]; NUM_BANDS];
    // fixed accumulation order keeps the sums independent of thread count
    for sample in per_ray.iter().flatten() {
        let bin = bin_of(sample.time);
        for (band, e) in bands.iter_mut().zip(sample.energy) {
            band[bin] += e * weight;
        }
    }
    EnergyDecayCurve::new(DECAY_BIN_WIDTH, bands)
}
