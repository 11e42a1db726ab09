//! Perceptual reverberation metric.
//!
//! Listeners detect a change in early reflections once the mean-free path
//! moves by about 3% (0.06 m around a 2 m reference room). The JND of the late
//! reverberation is that value minus a constant offset of 2% of the reference
//! mean-free path, i.e. about 1% of `μ`. Samples along a listener path whose `μ`
//! stays within that JND of a cluster reference are taken to share one
//! perceptually identical reverberation.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::acoustics::Rt60Estimate;
use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Fitted psychometric line and JND relation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PReverbConstants {
    /// Slope of the detection-probability line (1/m).
    pub slope: f64,
    pub intercept: f64,
    /// Offset between the early and late JND, as a fraction of `μ`.
    pub offset_c: f64,
    /// Mean-free path of the reference room (m).
    pub mu_ref: f64,
    /// Early-reflection JND at the reference room (m).
    pub jnd_er_abs: f64,
}

impl Default for PReverbConstants {
    fn default() -> Self {
        PReverbConstants { slope: 3.89, intercept: -7.5, offset_c: 0.02, mu_ref: 2.0, jnd_er_abs: 0.06 }
    }
}

impl PReverbConstants {
    /// `μ` at which the fitted line crosses 50% detection, minus the reference.
    pub fn fitted_jnd_er(&self) -> f64 {
        (0.5 - self.intercept) / self.slope - self.mu_ref
    }

    /// The stored early JND must agree with the fitted line to within 5 mm.
    pub fn is_self_consistent(&self) -> bool {
        (self.fitted_jnd_er() - self.jnd_er_abs).abs() <= 0.005
    }
}

/// Mean-free path range covered by the listening test fit (m).
pub const FITTED_MU_RANGE: (f64, f64) = (2.0, 2.17);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Detection {
    pub probability: f64,
    /// `μ` lies outside [`FITTED_MU_RANGE`].
    pub extrapolated: bool,
}

/// Probability of telling a room with mean-free path `mu` apart from the 2 m reference.
pub fn detection_probability_er(mu: f64, constants: &PReverbConstants) -> Detection {
    let raw = constants.slope * mu + constants.intercept;
    Detection {
        probability: raw.clamp(0.0, 1.0),
        extrapolated: !(FITTED_MU_RANGE.0..=FITTED_MU_RANGE.1).contains(&mu),
    }
}

/// Early-reflection JND at `mu_ref`, scaled proportionally from the reference room.
pub fn jnd_er(mu_ref: f64, constants: &PReverbConstants) -> f64 {
    constants.jnd_er_abs / constants.mu_ref * mu_ref
}

/// Late-reverberation JND (m) around a room with mean-free path `mu_ref`.
pub fn jnd_lr(mu_ref: f64, constants: &PReverbConstants) -> Result<f64> {
    if !(mu_ref.is_finite() && mu_ref > 0.0) {
        return Err(Error::InvalidArgument(format!("reference mean-free path must be positive, got {mu_ref}")));
    }
    Ok(jnd_er(mu_ref, constants) - constants.offset_c * mu_ref)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JndMode {
    /// Threshold proportional to the cluster reference `μ`.
    #[default]
    Relative,
    /// Fixed threshold equal to the JND at the reference room.
    Absolute,
}

impl std::str::FromStr for JndMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relative" => Ok(JndMode::Relative),
            "absolute" => Ok(JndMode::Absolute),
            _ => Err(Error::InvalidArgument(format!("unknown JND mode `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterReference {
    /// The first sample of the cluster.
    #[default]
    FirstMember,
    /// Mean `μ` of the members so far.
    RunningMean,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClusterOptions {
    pub jnd_mode: JndMode,
    pub reference: ClusterReference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuSource {
    ErTrace,
    Analytic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub index: usize,
    pub position: Vec3,
    pub mu: f64,
    pub mu_source: MuSource,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// First sample index.
    pub start: usize,
    /// One past the last sample index.
    pub end: usize,
    pub mu_ref: f64,
    pub mu_mean: f64,
    /// Threshold used, as a fraction of `mu_ref`.
    pub jnd_rel: f64,
    #[serde(default)]
    pub rt60: Option<Rt60Estimate>,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, index: usize) -> bool {
        (self.start..self.end).contains(&index)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterMap {
    pub clusters: Vec<Cluster>,
}

impl ClusterMap {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn sample_count(&self) -> usize {
        self.clusters.last().map_or(0, |c| c.end)
    }

    pub fn cluster_of(&self, sample_index: usize) -> Option<usize> {
        let pos = self.clusters.partition_point(|c| c.end <= sample_index);
        (pos < self.clusters.len() && self.clusters[pos].contains(sample_index)).then_some(pos)
    }

    /// Cluster ids ordered by decreasing size (ties by id).
    pub fn by_size(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.clusters.len()).collect();
        ids.sort_by(|&a, &b| self.clusters[b].len().cmp(&self.clusters[a].len()).then(a.cmp(&b)));
        ids
    }

    /// `sample_index,x,y,z,mu,cluster_id` rows.
    pub fn to_csv(&self, samples: &[PathSample]) -> String {
        let mut out = String::from("sample_index,x,y,z,mu,cluster_id\n");
        for s in samples {
            let id = self.cluster_of(s.index).map_or(String::new(), |c| c.to_string());
            let _ = writeln!(out, "{},{},{},{},{},{}", s.index, s.position.x, s.position.y, s.position.z, s.mu, id);
        }
        out
    }
}

const BOUNDARY_EPS: f64 = 1e-9;

/// Single forward pass over the path; a sample joins the open cluster while its
/// `μ` stays within the late-reverberation JND of the cluster reference.
pub fn cluster_path(samples: &[PathSample], constants: &PReverbConstants, options: &ClusterOptions) -> Result<ClusterMap> {
    let first = samples.first().ok_or_else(|| Error::InvalidArgument("no path samples to cluster".into()))?;
    for (i, s) in samples.iter().enumerate() {
        if s.index != i {
            return Err(Error::InvalidArgument(format!("sample {i} has index {}; indices must be contiguous", s.index)));
        }
        if !(s.mu.is_finite() && s.mu > 0.0) {
            return Err(Error::InvalidArgument(format!("sample {i} has non-positive mean-free path {}", s.mu)));
        }
    }
    let threshold = |reference: f64| -> Result<f64> {
        match options.jnd_mode {
            JndMode::Relative => jnd_lr(reference, constants),
            JndMode::Absolute => jnd_lr(constants.mu_ref, constants),
        }
    };

    let mut clusters = Vec::new();
    let mut start = 0;
    let mut reference = first.mu;
    let mut sum = first.mu;
    let close = |start: usize, end: usize, reference: f64, sum: f64| -> Result<Cluster> {
        Ok(Cluster {
            start,
            end,
            mu_ref: reference,
            mu_mean: sum / (end - start) as f64,
            jnd_rel: threshold(reference)? / reference,
            rt60: None,
        })
    };
    for (i, s) in samples.iter().enumerate().skip(1) {
        // boundary cases like 2.02 vs 2.00 must not depend on rounding
        if (s.mu - reference).abs() <= threshold(reference)? * (1.0 + BOUNDARY_EPS) {
            sum += s.mu;
            if options.reference == ClusterReference::RunningMean {
                reference = sum / (i + 1 - start) as f64;
            }
        } else {
            clusters.push(close(start, i, reference, sum)?);
            start = i;
            reference = s.mu;
            sum = s.mu;
        }
    }
    clusters.push(close(start, samples.len(), reference, sum)?);
    Ok(ClusterMap { clusters })
}
