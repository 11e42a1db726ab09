//! Parameterize the Schroeder reverberator from an RT60, render an impulse
//! response and a dry signal, and switch RT60 mid-signal along a schedule.
//!
//! ```text
//! cargo run --release --example render_reverb [out_dir]
//! ```

use std::path::PathBuf;

use preverb::acoustics::{rt60_from_decay, Rt60Estimate, Rt60Method};
use preverb::dsp::{params_from_rt60, render_path, render_reverb, wav_write, AudioBuffer, ScheduleEntry};
use preverb::metric::{Cluster, ClusterMap};
use preverb::tracer::{EnergyDecayCurve, DECAY_BIN_WIDTH};

fn main() -> preverb::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let rate = 44_100;

    for target in [0.5, 1.0, 2.0] {
        let params = params_from_rt60(target, rate)?;
        let ir = render_reverb(&AudioBuffer::impulse(rate, 1), &params)?;
        let curve = EnergyDecayCurve::from_impulse_response(&ir.samples, rate as f64, DECAY_BIN_WIDTH)?;
        let measured = rt60_from_decay(&curve)?.broadband();
        println!("target {target:.1} s: comb gains {:.4?}, measured {measured:.3} s", params.comb_gains);
    }

    // half a second of decaying noise bursts, 4 s long
    let mut state = 0x2545_f491_u32;
    let dry: Vec<f64> = (0..4 * rate as usize)
        .map(|n| {
            state ^= state << 13;
            state ^= state >> 17;
            state ^= state << 5;
            let t = (n % (rate as usize)) as f64 / rate as f64;
            let noise = state as f64 / u32::MAX as f64 - 0.5;
            if t < 0.05 { 0.5 * noise } else { 0.0 }
        })
        .collect();
    let dry = AudioBuffer::new(rate, dry)?;

    let cluster = |start, end, rt: f64| Cluster {
        start,
        end,
        mu_ref: 3.0,
        mu_mean: 3.0,
        jnd_rel: 0.01,
        rt60: Some(Rt60Estimate { bands: vec![rt; 4], method: Rt60Method::DecayRegression, fit_quality: None }),
    };
    let map = ClusterMap { clusters: vec![cluster(0, 10, 0.4), cluster(10, 20, 1.8)] };
    let schedule = [ScheduleEntry { t_start_s: 0.0, sample_index: 3 }, ScheduleEntry { t_start_s: 2.0, sample_index: 14 }];
    let wet = render_path(&dry, &map, &schedule)?;
    println!("rendered {:.2} s, peak {:.3}", wet.duration(), wet.peak());
    std::fs::write(dir.join("dry.wav"), wav_write(&dry)?)?;
    std::fs::write(dir.join("wet.wav"), wav_write(&wet)?)?;
    println!("wrote {} and {}", dir.join("dry.wav").display(), dir.join("wet.wav").display());
    Ok(())
}
