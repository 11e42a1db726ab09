use preverb::acoustics::{mfp_analytic, mfp_from_trace};
use preverb::dsp::{params_from_rt60, render_path, render_reverb, AudioBuffer, ScheduleEntry, CROSSFADE_SECONDS};
use preverb::fixtures;
use preverb::metric::{cluster_path, ClusterOptions, MuSource, PReverbConstants, PathSample};
use preverb::pipeline::{bake, lookup, BakeConfig, LookupQuery};
use preverb::scene::{Scene, Triangle};
use preverb::tracer::{ray_direction, trace_segments, TraceConfig};
use preverb::Vec3;
use proptest::prelude::*;

#[test]
fn ray_directions_cover_the_sphere_uniformly() {
    let n = 100_000;
    let mut octants = [0usize; 8];
    let mut sum = Vec3::splat(0.0);
    for i in 0..n {
        let d = ray_direction(42, i);
        assert!((d.norm() - 1.0).abs() < 1e-12);
        octants[(d.x > 0.0) as usize | ((d.y > 0.0) as usize) << 1 | ((d.z > 0.0) as usize) << 2] += 1;
        sum += d;
    }
    // binomial sigma for p = 1/8 at n = 1e5 is ~105; 6 sigma band
    for count in octants {
        assert!((count as f64 - n as f64 / 8.0).abs() < 650.0, "{octants:?}");
    }
    // each component of the mean has sigma 1/sqrt(3n) ~ 0.0018
    assert!((sum / n as f64).norm() < 0.01, "{}", sum / n as f64);
}

#[test]
fn ray_directions_depend_only_on_seed_and_index() {
    assert_eq!(ray_direction(9, 123), ray_direction(9, 123));
    assert_ne!(ray_direction(9, 123), ray_direction(9, 124));
    assert_ne!(ray_direction(9, 123), ray_direction(10, 123));
}

fn unit(v: (f64, f64, f64)) -> Option<Vec3> {
    let v = Vec3::new(v.0, v.1, v.2);
    (v.norm() > 1e-3).then(|| v.normalized())
}

proptest! {
    #[test]
    fn reflection_preserves_length_and_mirrors_the_normal_component(
        d in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0),
        n in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0),
    ) {
        let (Some(d), Some(n)) = (unit(d), unit(n)) else { return Ok(()) };
        let r = d.reflect(n);
        prop_assert!((r.norm() - 1.0).abs() < 1e-12);
        prop_assert!((r.dot(n) + d.dot(n)).abs() < 1e-12);
        let tangential = |v: Vec3| v - n * v.dot(n);
        prop_assert!((tangential(r) - tangential(d)).norm() < 1e-12);
        prop_assert!((r.reflect(n) - d).norm() < 1e-12);
    }
}

fn rotate(p: Vec3, yaw: f64, pitch: f64) -> Vec3 {
    let (sy, cy) = yaw.sin_cos();
    let (sp, cp) = pitch.sin_cos();
    let q = Vec3::new(cy * p.x - sy * p.y, sy * p.x + cy * p.y, p.z);
    Vec3::new(q.x, cp * q.y - sp * q.z, sp * q.y + cp * q.z)
}

fn transformed(scene: &Scene, f: impl Fn(Vec3) -> Vec3) -> Scene {
    let tris = scene
        .triangles()
        .iter()
        .map(|t| Triangle { v0: f(t.v0), v1: f(t.v1), v2: f(t.v2), material_id: t.material_id })
        .collect();
    Scene::new(tris, scene.materials().to_vec(), scene.bands().clone()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn volume_and_area_survive_rigid_motion(
        yaw in 0.0f64..std::f64::consts::TAU,
        pitch in 0.0f64..std::f64::consts::TAU,
        shift in (-50.0f64..50.0, -50.0f64..50.0, -50.0f64..50.0),
        which in 0usize..4,
    ) {
        let shape = &fixtures::table1_shapes()[which];
        let scene = shape.source.load().unwrap();
        let (v0, s0) = scene.analytic_volume_and_area().unwrap();
        let t = Vec3::new(shift.0, shift.1, shift.2);
        let moved = transformed(&scene, |p| rotate(p, yaw, pitch) + t);
        let (v1, s1) = moved.analytic_volume_and_area().unwrap();
        prop_assert!((v1 - v0).abs() <= 1e-9 * v0.max(1.0), "{} {} vs {}", shape.name, v1, v0);
        prop_assert!((s1 - s0).abs() <= 1e-9 * s0.max(1.0));
    }

    #[test]
    fn volume_and_area_ignore_face_order(seed in any::<u64>(), which in 0usize..4) {
        let scene = fixtures::table1_shapes()[which].source.load().unwrap();
        let (v0, s0) = scene.analytic_volume_and_area().unwrap();
        let mut tris = scene.triangles().to_vec();
        let mut state = seed | 1;
        for i in (1..tris.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            tris.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let shuffled = Scene::new(tris, scene.materials().to_vec(), scene.bands().clone()).unwrap();
        let (v1, s1) = shuffled.analytic_volume_and_area().unwrap();
        prop_assert!((v1 - v0).abs() <= 1e-9 * v0);
        prop_assert!((s1 - s0).abs() <= 1e-9 * s0);
    }
}

#[test]
fn cube_mean_free_path_is_within_five_percent_for_most_seeds() {
    for edge in [2.0, 5.0, 10.0] {
        let scene = fixtures::cube(edge).load().unwrap();
        let (v, s) = scene.analytic_volume_and_area().unwrap();
        let mu_an = mfp_analytic(v, s).unwrap();
        let source = Vec3::new(0.06, -0.04, 0.02) * edge;
        let within = (0..100)
            .filter(|&seed| {
                let trace = trace_segments(&scene, source, &TraceConfig::early_reflections(seed)).unwrap();
                (mfp_from_trace(&trace).unwrap().mu - mu_an).abs() / mu_an <= 0.05
            })
            .count();
        assert!(within >= 95, "edge {edge}: {within}/100 seeds within 5%");
    }
}

fn lcg_signal(seed: u64, len: usize) -> Vec<f64> {
    let mut s = seed;
    (0..len)
        .map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

#[test]
fn reverberator_is_linear_and_time_invariant() {
    let rate = 48_000;
    let p = params_from_rt60(0.8, rate).unwrap();
    let x = lcg_signal(1, 4_000);
    let y = lcg_signal(2, 4_000);
    let (a, b) = (0.7, -1.3);
    let mix: Vec<f64> = x.iter().zip(&y).map(|(x, y)| a * x + b * y).collect();
    let rx = render_reverb(&AudioBuffer::new(rate, x.clone()).unwrap(), &p).unwrap();
    let ry = render_reverb(&AudioBuffer::new(rate, y).unwrap(), &p).unwrap();
    let rm = render_reverb(&AudioBuffer::new(rate, mix).unwrap(), &p).unwrap();
    for i in 0..rm.len() {
        assert!((rm.samples[i] - (a * rx.samples[i] + b * ry.samples[i])).abs() < 1e-9, "sample {i}");
    }

    let shift = 777;
    let mut delayed = vec![0.0; shift];
    delayed.extend(&x);
    let rd = render_reverb(&AudioBuffer::new(rate, delayed).unwrap(), &p).unwrap();
    for i in 0..rx.len() {
        assert!((rd.samples[i + shift] - rx.samples[i]).abs() < 1e-9, "sample {i}");
    }
    assert!(rd.samples[..shift].iter().all(|&s| s == 0.0));
}

#[test]
fn constant_schedule_matches_plain_render_after_the_fade() {
    let rate = 44_100;
    let samples: Vec<PathSample> = (0..4)
        .map(|index| PathSample { index, position: Vec3::new(index as f64, 0.0, 0.0), mu: 3.0, mu_source: MuSource::Analytic })
        .collect();
    let mut map = cluster_path(&samples, &PReverbConstants::default(), &ClusterOptions::default()).unwrap();
    assert_eq!(map.len(), 1);
    let rt = 1.2;
    map.clusters[0].rt60 = Some(preverb::acoustics::Rt60Estimate {
        bands: vec![rt; 4],
        method: preverb::acoustics::Rt60Method::DecayRegression,
        fit_quality: None,
    });
    let dry = AudioBuffer::new(rate, lcg_signal(5, rate as usize)).unwrap();
    let schedule = [ScheduleEntry { t_start_s: 0.0, sample_index: 2 }];
    let path = render_path(&dry, &map, &schedule).unwrap();
    let plain = render_reverb(&dry, &params_from_rt60(rt, rate).unwrap()).unwrap();
    assert_eq!(path.len(), plain.len());
    let settle = (CROSSFADE_SECONDS * rate as f64) as usize;
    for i in settle..plain.len() {
        assert!((path.samples[i] - plain.samples[i]).abs() < 1e-9, "sample {i}");
    }
}

#[test]
fn every_baked_sample_looks_up_to_its_own_cluster() {
    let scene = fixtures::cube(5.0).load().unwrap();
    let path: Vec<Vec3> = (0..30).map(|i| Vec3::new(-2.0 + 0.13 * i as f64, 0.4, -0.3)).collect();
    let mut config = BakeConfig::with_seed(11);
    config.late = TraceConfig::new(200, 150, 11);
    let (file, stats) = bake(&scene, &path, &config).unwrap();
    assert_eq!(stats.lr_simulations, stats.n_clusters);
    assert_eq!(stats.lr_calls_saved, stats.n_points - stats.n_clusters);
    for s in &file.samples {
        let r = lookup(&file, LookupQuery::Index(s.index)).unwrap();
        assert!(file.clusters.clusters[r.cluster].contains(s.index));
        let by_pos = lookup(&file, LookupQuery::Position { position: s.position, radius: 0.01 }).unwrap();
        assert_eq!(by_pos.sample_index, s.index);
        assert_eq!(by_pos.distance, 0.0);
    }
}
