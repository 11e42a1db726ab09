//! Validation suites run against the procedural fixtures.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::{bake, pointwise_rt60, BakeConfig, BakeFile, BakeStats};
use crate::acoustics::{mfp_analytic, mfp_from_trace, Rt60Estimate};
use crate::error::Result;
use crate::fixtures::{self, CorridorFixture};
use crate::tracer::{trace_segments, TraceConfig};

/// Samples closer than this to a doorway count as aperture samples (m).
pub const APERTURE_RADIUS: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationConfig {
    pub early: TraceConfig,
    pub late: TraceConfig,
}

impl ValidationConfig {
    pub fn with_seed(seed: u64) -> ValidationConfig {
        ValidationConfig { early: TraceConfig::early_reflections(seed), late: TraceConfig::late_reverberation(seed) }
    }
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig::with_seed(1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table1Row {
    pub shape: String,
    pub dimensions: String,
    pub mu_er: f64,
    pub mu_an: f64,
    pub error_pct: f64,
    pub escaped_rays: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table1Report {
    pub rows: Vec<Table1Row>,
}

impl Table1Report {
    pub fn max_error_pct(&self) -> f64 {
        self.rows.iter().map(|r| r.error_pct).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("shape,dimensions,mu_er_m,mu_an_m,error_pct\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},\"{}\",{:.4},{:.4},{:.3}", r.shape, r.dimensions, r.mu_er, r.mu_an, r.error_pct);
        }
        out
    }
}

/// Trace-based against analytic mean-free path for the four closed validation shapes.
pub fn validate_table1(config: &ValidationConfig) -> Result<Table1Report> {
    let rows = fixtures::table1_shapes()
        .into_iter()
        .map(|shape| {
            let scene = shape.source.load()?;
            let (volume, area) = scene.analytic_volume_and_area()?;
            let mu_an = mfp_analytic(volume, area)?;
            let trace = trace_segments(&scene, shape.source_position, &config.early)?;
            let mu_er = mfp_from_trace(&trace)?.mu;
            Ok(Table1Row {
                shape: shape.name.to_string(),
                dimensions: shape.dimensions.to_string(),
                mu_er,
                mu_an,
                error_pct: 100.0 * (mu_er - mu_an).abs() / mu_an,
                escaped_rays: trace.escaped_rays(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table1Report { rows })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominantCluster {
    pub id: usize,
    pub start: usize,
    pub end: usize,
    pub mu_mean: f64,
    /// Largest `|μ − μ_mean| / μ_mean` over members, in percent.
    pub mu_diff_max_pct: f64,
    pub rt60: Rt60Estimate,
    /// Largest per-band `|RT60_point − RT60_cluster| / RT60_cluster` over members, in percent.
    pub rt60_diff_max_pct: f64,
}

#[derive(Clone, Debug)]
pub struct CorridorReport {
    pub fixture: CorridorFixture,
    pub bake: BakeFile,
    pub stats: BakeStats,
    /// Decay-regression RT60 simulated at every sample.
    pub pointwise: Vec<Rt60Estimate>,
    /// The three largest clusters, in path order.
    pub dominant: Vec<DominantCluster>,
    /// Fraction of samples in dominant clusters.
    pub coverage: f64,
    /// Samples within [`APERTURE_RADIUS`] of a doorway.
    pub aperture_samples: Vec<usize>,
    /// Aperture samples that ended up in a dominant cluster.
    pub aperture_merged: Vec<usize>,
}

impl CorridorReport {
    /// `sample_index,x,y,z,mu,cluster_id,dominant,aperture,rt60_point_s,rt60_cluster_s`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample_index,x,y,z,mu,cluster_id,dominant,aperture,rt60_point_s,rt60_cluster_s\n");
        for s in &self.bake.samples {
            let id = self.bake.clusters.cluster_of(s.index).expect("partition");
            let cluster_rt = self.bake.clusters.clusters[id].rt60.as_ref().map_or(f64::NAN, Rt60Estimate::broadband);
            let _ = writeln!(
                out,
                "{},{},{},{},{:.5},{},{},{},{:.4},{:.4}",
                s.index,
                s.position.x,
                s.position.y,
                s.position.z,
                s.mu,
                id,
                self.dominant.iter().any(|d| d.id == id),
                self.aperture_samples.contains(&s.index),
                self.pointwise[s.index].broadband(),
                cluster_rt
            );
        }
        out
    }
}

/// Bake the three-room corridor and compare every sample against its own decay simulation.
pub fn validate_corridor(config: &BakeConfig) -> Result<CorridorReport> {
    validate_corridor_fixture(fixtures::corridor(), config)
}

pub fn validate_corridor_fixture(fixture: CorridorFixture, config: &BakeConfig) -> Result<CorridorReport> {
    let scene = fixture.source.load()?;
    let (file, stats) = bake(&scene, &fixture.path, config)?;
    let pointwise = file
        .samples
        .par_iter()
        .map(|s| pointwise_rt60(&scene, s.position, &config.late))
        .collect::<Result<Vec<_>>>()?;

    let mut ids: Vec<usize> = file.clusters.by_size().into_iter().take(3).collect();
    ids.sort_unstable();
    let dominant: Vec<DominantCluster> = ids
        .iter()
        .map(|&id| {
            let c = &file.clusters.clusters[id];
            let members = &file.samples[c.start..c.end];
            let mu_diff_max_pct =
                members.iter().map(|s| 100.0 * (s.mu - c.mu_mean).abs() / c.mu_mean).fold(0.0, f64::max);
            let rt60 = c.rt60.clone().expect("bake fills every cluster");
            let rt60_diff_max_pct = members
                .iter()
                .flat_map(|s| {
                    pointwise[s.index].bands.iter().zip(&rt60.bands).map(|(p, r)| 100.0 * (p - r).abs() / r)
                })
                .fold(0.0, f64::max);
            DominantCluster { id, start: c.start, end: c.end, mu_mean: c.mu_mean, mu_diff_max_pct, rt60, rt60_diff_max_pct }
        })
        .collect();
    let covered: usize = dominant.iter().map(|d| d.end - d.start).sum();
    let coverage = covered as f64 / file.samples.len() as f64;
    let aperture_samples: Vec<usize> = file
        .samples
        .iter()
        .filter(|s| fixture.aperture_distance(s.position) <= APERTURE_RADIUS)
        .map(|s| s.index)
        .collect();
    let aperture_merged = aperture_samples
        .iter()
        .copied()
        .filter(|&i| dominant.iter().any(|d| (d.start..d.end).contains(&i)))
        .collect();
    Ok(CorridorReport { fixture, bake: file, stats, pointwise, dominant, coverage, aperture_samples, aperture_merged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_csv_shape() {
        let report = Table1Report {
            rows: vec![Table1Row {
                shape: "Cube".into(),
                dimensions: "5".into(),
                mu_er: 3.3,
                mu_an: 10.0 / 3.0,
                error_pct: 1.0,
                escaped_rays: 0,
            }],
        };
        assert_eq!(report.to_csv(), "shape,dimensions,mu_er_m,mu_an_m,error_pct\nCube,\"5\",3.3000,3.3333,1.000\n");
        assert_eq!(report.max_error_pct(), 1.0);
    }
}
