//! The psychometric side of the pipeline: detection probability of an
//! early-reflection change, the late-reverberation JND, and greedy clustering
//! of a listener path by mean-free path.
//!
//! ```text
//! cargo run --example perceptual_metric
//! ```

use preverb::metric::{
    cluster_path, detection_probability_er, jnd_er, jnd_lr, ClusterOptions, ClusterReference, JndMode, MuSource,
    PReverbConstants, PathSample,
};
use preverb::Vec3;

fn main() -> preverb::Result<()> {
    let c = PReverbConstants::default();
    for mu in [2.0, 2.03, 2.06, 2.1, 2.17] {
        let d = detection_probability_er(mu, &c);
        println!("P(detect | mu = {mu:.2}) = {:.3}{}", d.probability, if d.extrapolated { " (extrapolated)" } else { "" });
    }
    println!("fitted ER JND at the reference room: {:.4} m (configured {})", c.fitted_jnd_er(), c.jnd_er_abs);
    for mu in [2.0, 4.0, 8.0] {
        println!("mu {mu}: ER JND {:.3} m, LR JND {:.3} m", jnd_er(mu, &c), jnd_lr(mu, &c)?);
    }

    // a path that crosses from a small room into a larger one
    let mus = [2.00, 2.01, 2.015, 2.02, 2.3, 2.6, 2.9, 3.0, 3.01, 3.02, 3.025, 3.04];
    let samples: Vec<PathSample> = mus
        .iter()
        .enumerate()
        .map(|(index, &mu)| PathSample { index, position: Vec3::new(index as f64, 0.0, 1.5), mu, mu_source: MuSource::ErTrace })
        .collect();
    for (label, opts) in [
        ("relative, first member", ClusterOptions::default()),
        ("absolute, first member", ClusterOptions { jnd_mode: JndMode::Absolute, ..Default::default() }),
        ("relative, running mean", ClusterOptions { reference: ClusterReference::RunningMean, ..Default::default() }),
    ] {
        let map = cluster_path(&samples, &c, &opts)?;
        let ranges: Vec<String> = map.clusters.iter().map(|cl| format!("[{}..{})", cl.start, cl.end)).collect();
        println!("{label:<24} {} clusters: {}", map.len(), ranges.join(" "));
    }
    Ok(())
}
