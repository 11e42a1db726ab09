//! Bake the three-room corridor and check every sample against its own decay simulation.
//!
//! ```text
//! cargo run --release --example validate_corridor [seed]
//! ```

use preverb::pipeline::{validate_corridor, BakeConfig};

fn main() -> preverb::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let report = validate_corridor(&BakeConfig::with_seed(seed))?;
    print!("{}", report.to_csv());
    eprintln!("clusters: {}  lr simulations: {}", report.bake.clusters.len(), report.stats.lr_simulations);
    eprintln!("t_er {:.1} ms/point, t_lr {:.1} ms/cluster", report.stats.t_er_ms, report.stats.t_lr_ms);
    for d in &report.dominant {
        eprintln!(
            "cluster {} [{}, {}): mu_mean {:.3} m (max dev {:.2}%), rt60 {:.3} s (max pointwise dev {:.2}%)",
            d.id,
            d.start,
            d.end,
            d.mu_mean,
            d.mu_diff_max_pct,
            d.rt60.broadband(),
            d.rt60_diff_max_pct
        );
    }
    eprintln!("dominant coverage: {:.1}%", 100.0 * report.coverage);
    eprintln!("aperture samples {:?}, merged into dominant {:?}", report.aperture_samples, report.aperture_merged);
    Ok(())
}
