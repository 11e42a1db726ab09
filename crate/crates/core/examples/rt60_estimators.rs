//! Compare Sabine, Eyring (mean-free-path form) and energy-decay regression on
//! a uniformly absorbing 5 m cube.
//!
//! ```text
//! cargo run --release --example rt60_estimators
//! ```

use preverb::acoustics::{mean_absorption, mfp_from_trace, rt60_from_decay, rt60_from_mfp, rt60_sabine};
use preverb::fixtures;
use preverb::tracer::{trace_energy_decay, trace_segments, TraceConfig};
use preverb::Vec3;

fn main() -> preverb::Result<()> {
    let source = Vec3::new(0.3, -0.2, 0.1);
    println!("alpha   sabine   eyring   decay    r2");
    for alpha in [0.1, 0.2, 0.4] {
        let scene = fixtures::cube_with_absorption(5.0, alpha).load()?;
        let (v, s) = scene.analytic_volume_and_area()?;
        let a = mean_absorption(&scene);
        let sabine = rt60_sabine(v, s, &a)?;
        let mu = mfp_from_trace(&trace_segments(&scene, source, &TraceConfig::early_reflections(1))?)?.mu;
        let eyring = rt60_from_mfp(mu, &a)?;
        let decay = rt60_from_decay(&trace_energy_decay(&scene, source, &TraceConfig::late_reverberation(1))?)?;
        println!(
            "{alpha:<6}  {:.3}    {:.3}    {:.3}    {:.4}",
            sabine.broadband(),
            eyring.broadband(),
            decay.broadband(),
            decay.fit_quality.as_ref().map_or(f64::NAN, |q| q[0])
        );
    }
    Ok(())
}
