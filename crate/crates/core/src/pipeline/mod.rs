//! Bake, lookup and render workflow.
//!
//! A bake traces early reflections at every listener-path sample, clusters
//! the samples by mean-free path and then runs a single high-order decay
//! simulation per cluster. The result is persisted as a versioned JSON
//! document; at runtime a listener position or sample index is mapped back
//! to its cluster's RT60.

mod csv_io;
mod validate;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::acoustics::{mfp_from_trace, rt60_from_decay, Rt60Estimate};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::metric::{cluster_path, ClusterMap, ClusterOptions, MuSource, PReverbConstants, PathSample};
use crate::scene::{BandLayout, Scene};
use crate::tracer::{trace_energy_decay, trace_segments, TraceConfig};

pub use csv_io::{read_path_csv, read_schedule_csv};
pub use validate::{
    validate_corridor, validate_table1, CorridorReport, DominantCluster, Table1Report, Table1Row,
    validate_corridor_fixture, ValidationConfig, APERTURE_RADIUS,
};

pub const BAKE_SCHEMA_VERSION: u32 = 1;

/// Default search radius for position lookups (m).
pub const DEFAULT_LOOKUP_RADIUS: f64 = 1.0;

/// Minimum distance used by the inverse-distance law (m).
pub const MIN_DIRECT_DISTANCE: f64 = 0.1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LrSource {
    /// Trace the decay from the cluster's first sample.
    #[default]
    FirstMember,
    /// Trace from the mean position of the cluster's samples.
    Centroid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BakeConfig {
    pub early: TraceConfig,
    pub late: TraceConfig,
    pub constants: PReverbConstants,
    pub clustering: ClusterOptions,
    pub lr_source: LrSource,
}

impl BakeConfig {
    /// 500 × 20 early trace, 500 × 300 late trace, default metric constants.
    pub fn with_seed(seed: u64) -> BakeConfig {
        BakeConfig {
            early: TraceConfig::early_reflections(seed),
            late: TraceConfig::late_reverberation(seed),
            constants: PReverbConstants::default(),
            clustering: ClusterOptions::default(),
            lr_source: LrSource::default(),
        }
    }
}

impl Default for BakeConfig {
    fn default() -> Self {
        BakeConfig::with_seed(1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BakeFile {
    pub schema_version: u32,
    pub tool_version: String,
    /// Seconds since the Unix epoch; excluded from comparisons via [`BakeFile::canonical_json`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_unix_s: Option<u64>,
    pub scene_fingerprint: String,
    pub bands: BandLayout,
    pub config: BakeConfig,
    pub samples: Vec<PathSample>,
    pub clusters: ClusterMap,
}

impl BakeFile {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON without the timestamp.
    pub fn canonical_json(&self) -> Result<String> {
        BakeFile { created_unix_s: None, ..self.clone() }.to_json()
    }

    pub fn from_json(text: &str) -> Result<BakeFile> {
        let bake: BakeFile = serde_json::from_str(text)?;
        if bake.schema_version != BAKE_SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "bake schema version {} is not supported (expected {BAKE_SCHEMA_VERSION})",
                bake.schema_version
            )));
        }
        if bake.clusters.sample_count() != bake.samples.len() || bake.clusters.len() > bake.samples.len() {
            return Err(Error::InvalidArgument("bake clusters do not partition its samples".into()));
        }
        if let Some(i) = bake.clusters.clusters.iter().position(|c| c.rt60.is_none()) {
            return Err(Error::MissingRt60(i));
        }
        Ok(bake)
    }

    /// Fail if the bake was produced for a different scene.
    pub fn check_scene(&self, scene: &Scene) -> Result<()> {
        let actual = scene_fingerprint(scene);
        if actual != self.scene_fingerprint {
            return Err(Error::StaleBake { expected: self.scene_fingerprint.clone(), actual });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BakeStats {
    pub n_points: usize,
    pub n_clusters: usize,
    /// Mean early-reflection trace time per point (ms).
    pub t_er_ms: f64,
    /// Mean decay simulation time per cluster (ms).
    pub t_lr_ms: f64,
    /// High-order simulations actually executed.
    pub lr_simulations: usize,
    pub lr_calls_saved: usize,
}

/// SHA-256 over triangle coordinates, material assignments and absorption tables.
pub fn scene_fingerprint(scene: &Scene) -> String {
    let mut h = Sha256::new();
    for t in scene.triangles() {
        for v in [t.v0, t.v1, t.v2] {
            for c in [v.x, v.y, v.z] {
                h.update(c.to_le_bytes());
            }
        }
        h.update((t.material_id as u64).to_le_bytes());
    }
    for m in scene.materials() {
        h.update(m.name.as_bytes());
        h.update([0]);
        for a in m.absorption {
            h.update(a.to_le_bytes());
        }
    }
    for e in scene.bands().edges {
        h.update(e.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Mean-free path at every position from an early-reflection trace.
pub fn sample_path(scene: &Scene, positions: &[Vec3], early: &TraceConfig) -> Result<(Vec<PathSample>, Vec<f64>)> {
    let results: Vec<Result<(PathSample, f64)>> = positions
        .par_iter()
        .enumerate()
        .map(|(index, &position)| {
            let started = Instant::now();
            let estimate = trace_segments(scene, position, early)
                .and_then(|t| mfp_from_trace(&t))
                .map_err(|e| Error::at_point(index, e))?;
            let ms = started.elapsed().as_secs_f64() * 1e3;
            Ok((PathSample { index, position, mu: estimate.mu, mu_source: MuSource::ErTrace }, ms))
        })
        .collect();
    let mut samples = Vec::with_capacity(positions.len());
    let mut times = Vec::with_capacity(positions.len());
    for r in results {
        let (s, t) = r?;
        samples.push(s);
        times.push(t);
    }
    Ok((samples, times))
}

/// RT60 from one high-order decay simulation at `position`.
pub fn pointwise_rt60(scene: &Scene, position: Vec3, late: &TraceConfig) -> Result<Rt60Estimate> {
    rt60_from_decay(&trace_energy_decay(scene, position, late)?)
}

/// Cluster a listener path and compute one RT60 per cluster.
pub fn bake(scene: &Scene, positions: &[Vec3], config: &BakeConfig) -> Result<(BakeFile, BakeStats)> {
    if positions.is_empty() {
        return Err(Error::InvalidArgument("listener path is empty".into()));
    }
    let (samples, er_times) = sample_path(scene, positions, &config.early)?;
    let mut clusters = cluster_path(&samples, &config.constants, &config.clustering)?;

    let lr_calls = AtomicUsize::new(0);
    let lr_results: Vec<Result<(Rt60Estimate, f64)>> = clusters
        .clusters
        .par_iter()
        .map(|c| {
            let members = &samples[c.start..c.end];
            let position = match config.lr_source {
                LrSource::FirstMember => members[0].position,
                LrSource::Centroid => {
                    members.iter().fold(Vec3::ZERO, |acc, s| acc + s.position) / members.len() as f64
                }
            };
            let started = Instant::now();
            lr_calls.fetch_add(1, Ordering::Relaxed);
            let rt60 = pointwise_rt60(scene, position, &config.late).map_err(|e| Error::at_point(c.start, e))?;
            Ok((rt60, started.elapsed().as_secs_f64() * 1e3))
        })
        .collect();
    let mut lr_times = Vec::with_capacity(lr_results.len());
    for (cluster, result) in clusters.clusters.iter_mut().zip(lr_results) {
        let (rt60, ms) = result?;
        cluster.rt60 = Some(rt60);
        lr_times.push(ms);
    }
    let lr_simulations = lr_calls.into_inner();
    assert_eq!(lr_simulations, clusters.len(), "one decay simulation per cluster");

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let stats = BakeStats {
        n_points: samples.len(),
        n_clusters: clusters.len(),
        t_er_ms: mean(&er_times),
        t_lr_ms: mean(&lr_times),
        lr_simulations,
        lr_calls_saved: samples.len() - clusters.len(),
    };
    let file = BakeFile {
        schema_version: BAKE_SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix_s: None,
        scene_fingerprint: scene_fingerprint(scene),
        bands: *scene.bands(),
        config: *config,
        samples,
        clusters,
    };
    Ok((file, stats))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LookupQuery {
    Index(usize),
    Position { position: Vec3, radius: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LookupResult {
    pub sample_index: usize,
    pub cluster: usize,
    pub rt60: Rt60Estimate,
    /// Distance from the queried position to the matched sample (0 for index queries).
    pub distance: f64,
}

/// Owning cluster and RT60 of a baked sample, or of the sample nearest to a position.
pub fn lookup(bake: &BakeFile, query: LookupQuery) -> Result<LookupResult> {
    let (sample_index, distance) = match query {
        LookupQuery::Index(i) => {
            if i >= bake.samples.len() {
                return Err(Error::InvalidArgument(format!(
                    "sample index {i} out of range (bake has {} samples)",
                    bake.samples.len()
                )));
            }
            (i, 0.0)
        }
        LookupQuery::Position { position, radius } => {
            let (i, d) = bake
                .samples
                .iter()
                .map(|s| (s.index, (s.position - position).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                .ok_or_else(|| Error::InvalidArgument("bake has no samples".into()))?;
            if d > radius {
                return Err(Error::OutOfCoverage { position, distance: d, radius });
            }
            (i, d)
        }
    };
    let cluster = bake
        .clusters
        .cluster_of(sample_index)
        .ok_or_else(|| Error::InvalidArgument(format!("sample {sample_index} belongs to no cluster")))?;
    let rt60 = bake.clusters.clusters[cluster].rt60.clone().ok_or(Error::MissingRt60(cluster))?;
    Ok(LookupResult { sample_index, cluster, rt60, distance })
}

/// Inverse-distance gain of the direct path, or 0 when it is occluded.
pub fn direct_sound_gain(source: Vec3, listener: Vec3, scene: &Scene) -> Result<f64> {
    let distance = (listener - source).norm();
    if !(distance > 0.0) {
        return Err(Error::InvalidArgument("source and listener coincide".into()));
    }
    if !scene.visible(source, listener) {
        return Ok(0.0);
    }
    Ok(1.0 / distance.max(MIN_DIRECT_DISTANCE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn cube_path(n: usize) -> Vec<Vec3> {
        (0..n).map(|i| Vec3::new(-1.0 + 2.0 * i as f64 / n as f64, 0.2, -0.1)).collect()
    }

    #[test]
    fn uniform_cube_bakes_to_one_cluster() {
        let scene = fixtures::cube(5.0).load().unwrap();
        let mut config = BakeConfig::with_seed(3);
        config.late = TraceConfig::new(200, 150, 3);
        let (file, stats) = bake(&scene, &cube_path(100), &config).unwrap();
        assert_eq!(stats.n_clusters, 1, "{:?}", file.clusters.clusters.iter().map(|c| c.mu_ref).collect::<Vec<_>>());
        assert_eq!(stats.lr_simulations, 1);
        assert_eq!(stats.lr_calls_saved, 99);
        assert!(file.clusters.clusters[0].rt60.is_some());
    }

    #[test]
    fn empty_path_is_an_error() {
        let scene = fixtures::cube(5.0).load().unwrap();
        assert!(bake(&scene, &[], &BakeConfig::default()).is_err());
    }

    #[test]
    fn bad_point_is_reported_by_index() {
        let scene = fixtures::cube(5.0).load().unwrap();
        let mut path = cube_path(4);
        path[2] = Vec3::new(9.0, 0.0, 0.0);
        match bake(&scene, &path, &BakeConfig::default()) {
            Err(Error::AtPoint { index: 2, source }) => assert!(matches!(*source, Error::SourceOutsideScene(_))),
            other => panic!("{other:?}"),
        }
    }

    fn small_bake() -> BakeFile {
        let scene = fixtures::cube(5.0).load().unwrap();
        let mut config = BakeConfig::with_seed(5);
        config.late = TraceConfig::new(100, 150, 5);
        bake(&scene, &cube_path(20), &config).unwrap().0
    }

    #[test]
    fn lookup_by_index_and_position() {
        let file = small_bake();
        let hit = lookup(&file, LookupQuery::Index(17)).unwrap();
        let expected = file.clusters.cluster_of(17).unwrap();
        assert_eq!(hit.cluster, expected);
        assert_eq!(Some(hit.rt60), file.clusters.clusters[expected].rt60);

        let p0 = file.samples[0].position;
        let hit = lookup(&file, LookupQuery::Position { position: p0, radius: DEFAULT_LOOKUP_RADIUS }).unwrap();
        assert_eq!((hit.sample_index, hit.distance), (0, 0.0));

        let far = Vec3::new(10_000.0, 0.0, 0.0);
        let err = lookup(&file, LookupQuery::Position { position: far, radius: DEFAULT_LOOKUP_RADIUS }).unwrap_err();
        assert!(matches!(err, Error::OutOfCoverage { .. }));
        assert!(lookup(&file, LookupQuery::Index(20)).is_err());
    }

    #[test]
    fn bake_file_round_trips_through_json() {
        let mut file = small_bake();
        file.created_unix_s = Some(1_700_000_000);
        let text = file.to_json().unwrap();
        let back = BakeFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.canonical_json().unwrap(), BakeFile { created_unix_s: None, ..file }.to_json().unwrap());
    }

    #[test]
    fn stale_bake_is_detected() {
        let file = small_bake();
        assert!(file.check_scene(&fixtures::cube(5.0).load().unwrap()).is_ok());
        let other = fixtures::cube(5.5).load().unwrap();
        assert!(matches!(file.check_scene(&other), Err(Error::StaleBake { .. })));
    }

    #[test]
    fn direct_gain() {
        let corridor = fixtures::corridor();
        let scene = corridor.source.load().unwrap();
        let a = Vec3::new(2.0, 0.0, 1.5);
        assert!((direct_sound_gain(a, Vec3::new(4.0, 0.0, 1.5), &scene).unwrap() - 0.5).abs() < 1e-12);
        assert!((direct_sound_gain(a, Vec3::new(2.05, 0.0, 1.5), &scene).unwrap() - 10.0).abs() < 1e-12);
        let door = corridor.apertures[0];
        let (before, after) = (door.min.x - 1.0, door.max.x + 1.0);
        let (c, z) = (door.centroid(), door.centroid().z);
        // wall between rooms 1 and 2, beside the doorway
        let beside = door.max.y + 0.5;
        assert_eq!(direct_sound_gain(Vec3::new(before, beside, z), Vec3::new(after, beside, z), &scene).unwrap(), 0.0);
        // through the doorway
        assert!(direct_sound_gain(Vec3::new(before, c.y, z), Vec3::new(after, c.y, z), &scene).unwrap() > 0.0);
        assert!(direct_sound_gain(a, a, &scene).is_err());
    }
}
