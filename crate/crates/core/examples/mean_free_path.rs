//! Estimate the mean-free path of a room from low-order specular reflections
//! and compare it with the closed-form 4V/S.
//!
//! ```text
//! cargo run --release --example mean_free_path [rays] [bounces]
//! ```

use preverb::acoustics::{mfp_analytic, mfp_from_trace};
use preverb::fixtures;
use preverb::tracer::{trace_segments, TraceConfig};
use preverb::Vec3;

fn main() -> preverb::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let rays = args.next().unwrap_or(500);
    let bounces = args.next().unwrap_or(20);
    let cfg = TraceConfig::new(rays, bounces, 7);

    let scene = fixtures::prism(2.0, 3.0, 4.0).load()?;
    let (v, s) = scene.analytic_volume_and_area()?;
    let trace = trace_segments(&scene, Vec3::new(0.1, 0.2, -0.3), &cfg)?;
    let est = mfp_from_trace(&trace)?;
    println!("prism 2x3x4: mu_er {:.4} m over {} segments, mu_an {:.4} m", est.mu, est.segments_used, mfp_analytic(v, s)?);

    // the estimate is a property of the room, not of the listener position
    for x in [-0.8, -0.4, 0.0, 0.4, 0.8] {
        let p = Vec3::new(x, 0.0, 0.0);
        println!("  source {p}: mu_er {:.4} m", mfp_from_trace(&trace_segments(&scene, p, &cfg)?)?.mu);
    }

    // first few segments of ray 0
    let first = &trace.rays[0];
    let lengths: Vec<String> = first.segments.iter().take(6).map(|d| format!("{d:.3}")).collect();
    println!("ray 0 segment lengths: {} ...", lengths.join(", "));
    Ok(())
}
