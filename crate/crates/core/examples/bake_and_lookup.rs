//! Bake the three-room corridor: trace every path point, cluster, simulate one
//! decay per cluster, save the bake file and query it.
//!
//! ```text
//! cargo run --release --example bake_and_lookup [out.json]
//! ```

use preverb::fixtures;
use preverb::pipeline::{bake, lookup, BakeConfig, BakeFile, LookupQuery};
use preverb::Vec3;

fn main() -> preverb::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "corridor_bake.json".into());
    let fixture = fixtures::corridor();
    let scene = fixture.source.load()?;
    let (file, stats) = bake(&scene, &fixture.path, &BakeConfig::with_seed(1))?;
    println!(
        "{} points, {} clusters, {} decay simulations ({} avoided)",
        stats.n_points, stats.n_clusters, stats.lr_simulations, stats.lr_calls_saved
    );
    println!("mean ER trace {:.1} ms/point, mean decay simulation {:.1} ms/cluster", stats.t_er_ms, stats.t_lr_ms);
    for (id, c) in file.clusters.clusters.iter().enumerate() {
        let rt = c.rt60.as_ref().expect("baked");
        println!("  cluster {id:>2}: samples [{:>2}, {:>2})  mu {:.3} m  rt60 {:.3} s", c.start, c.end, c.mu_mean, rt.broadband());
    }

    std::fs::write(&out, file.to_json()?)?;
    let reloaded = BakeFile::from_json(&std::fs::read_to_string(&out)?)?;
    reloaded.check_scene(&scene)?;
    println!("wrote {out}");

    let by_index = lookup(&reloaded, LookupQuery::Index(17))?;
    println!("sample 17 -> cluster {} rt60 {:.3} s", by_index.cluster, by_index.rt60.broadband());
    let near = lookup(&reloaded, LookupQuery::Position { position: Vec3::new(12.0, 0.5, 1.6), radius: 1.0 })?;
    println!("(12, 0.5, 1.6) -> sample {} at {:.2} m, cluster {}", near.sample_index, near.distance, near.cluster);
    if let Err(e) = lookup(&reloaded, LookupQuery::Position { position: Vec3::new(1e4, 0.0, 0.0), radius: 1.0 }) {
        println!("far away: {e}");
    }
    Ok(())
}
