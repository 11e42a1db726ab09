//! Schroeder reverberator: four parallel feedback combs into two series allpasses.
//!
//! Comb feedback gains follow `g = 10^(−3 d / RT60)`, so every comb loses
//! exactly 60 dB over RT60 seconds regardless of its delay `d`.

use serde::{Deserialize, Serialize};

use super::AudioBuffer;
use crate::error::{Error, Result};
use crate::metric::ClusterMap;

pub const COMB_DELAYS_MS: [f64; 4] = [29.7, 37.1, 41.1, 43.7];
pub const ALLPASS_DELAYS_MS: [f64; 2] = [5.0, 1.7];
pub const DEFAULT_ALLPASS_GAIN: f64 = 0.7;

/// Length of the linear comb-gain ramp at a cluster switch.
pub const CROSSFADE_SECONDS: f64 = 0.05;

/// Tail is rendered until the reverberator has decayed by this much.
const TAIL_DB: f64 = 80.0;

const MIN_COMB_GAIN: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReverbParams {
    pub sample_rate: u32,
    pub rt60: f64,
    pub comb_delays: [usize; 4],
    pub comb_gains: [f64; 4],
    pub allpass_delays: [usize; 2],
    pub allpass_gain: f64,
    pub wet_dry_mix: f64,
}

/// Feedback gain giving 60 dB of decay per `rt60` seconds for a loop of `delay_s` seconds.
pub fn comb_gain(delay_s: f64, rt60: f64) -> f64 {
    10f64.powf(-3.0 * delay_s / rt60)
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Sample counts nearest to `targets_ms`, nudged until pairwise coprime.
fn coprime_delays<const N: usize>(targets_ms: [f64; N], sample_rate: u32) -> [usize; N] {
    let mut chosen = [0usize; N];
    for k in 0..N {
        let exact = targets_ms[k] * 1e-3 * sample_rate as f64;
        let base = exact.round() as i64;
        let mut candidates: Vec<i64> = (base - 8..=base + 8).filter(|&c| c > 1).collect();
        candidates.sort_by(|a, b| ((*a as f64 - exact).abs()).total_cmp(&(*b as f64 - exact).abs()).then(a.cmp(b)));
        chosen[k] = candidates
            .into_iter()
            .map(|c| c as usize)
            .find(|&c| chosen[..k].iter().all(|&p| gcd(p, c) == 1))
            .expect("a coprime delay exists within 8 samples");
    }
    chosen
}

/// Classic Schroeder parameterization for a target RT60.
pub fn params_from_rt60(rt60: f64, sample_rate: u32) -> Result<ReverbParams> {
    if !(rt60.is_finite() && rt60 > 0.0) {
        return Err(Error::InvalidArgument(format!("rt60 must be positive, got {rt60}")));
    }
    if sample_rate != 44_100 && sample_rate != 48_000 {
        return Err(Error::InvalidArgument(format!("unsupported sample rate {sample_rate}; use 44100 or 48000")));
    }
    let comb_delays = coprime_delays(COMB_DELAYS_MS, sample_rate);
    let comb_gains = comb_delays.map(|d| comb_gain(d as f64 / sample_rate as f64, rt60));
    if let Some(&gain) = comb_gains.iter().find(|&&g| g < MIN_COMB_GAIN) {
        return Err(Error::DegenerateFilter { rt60, gain });
    }
    let allpass_delays = ALLPASS_DELAYS_MS.map(|ms| (ms * 1e-3 * sample_rate as f64).round() as usize);
    Ok(ReverbParams {
        sample_rate,
        rt60,
        comb_delays,
        comb_gains,
        allpass_delays,
        allpass_gain: DEFAULT_ALLPASS_GAIN,
        wet_dry_mix: 1.0,
    })
}

/// Samples needed after the input ends for the response to fall by 80 dB.
pub fn tail_samples(params: &ReverbParams) -> usize {
    let loops_for = |g: f64| TAIL_DB / (-20.0 * g.log10());
    let comb = params
        .comb_delays
        .iter()
        .zip(&params.comb_gains)
        .map(|(&d, &g)| (loops_for(g) * d as f64).ceil() as usize + d)
        .max()
        .unwrap_or(0);
    let allpass: usize = params
        .allpass_delays
        .iter()
        .map(|&d| (loops_for(params.allpass_gain) * d as f64).ceil() as usize + d)
        .sum();
    comb + allpass
}

struct DelayLine {
    buffer: Vec<f64>,
    pos: usize,
}

impl DelayLine {
    fn new(len: usize) -> DelayLine {
        DelayLine { buffer: vec![0.0; len.max(1)], pos: 0 }
    }

    /// Sample written `len` steps ago.
    fn read(&self) -> f64 {
        self.buffer[self.pos]
    }

    fn write_advance(&mut self, v: f64) {
        self.buffer[self.pos] = v;
        self.pos = (self.pos + 1) % self.buffer.len();
    }
}

/// Filter state of one render. Comb gains are supplied per sample so they can be ramped.
pub struct Reverberator {
    combs: Vec<DelayLine>,
    allpasses: Vec<DelayLine>,
    allpass_gain: f64,
}

impl Reverberator {
    pub fn new(params: &ReverbParams) -> Reverberator {
        Reverberator {
            combs: params.comb_delays.iter().map(|&d| DelayLine::new(d)).collect(),
            allpasses: params.allpass_delays.iter().map(|&d| DelayLine::new(d)).collect(),
            allpass_gain: params.allpass_gain,
        }
    }

    /// One wet output sample.
    pub fn process(&mut self, x: f64, comb_gains: &[f64; 4]) -> f64 {
        let mut sum = 0.0;
        for (line, g) in self.combs.iter_mut().zip(comb_gains) {
            // y[n] = x[n - d] + g y[n - d]
            let y = line.read();
            line.write_advance(x + g * y);
            sum += y;
        }
        let mut s = 0.25 * sum;
        for line in &mut self.allpasses {
            // v[n] = s[n] + g v[n - d];  y[n] = v[n - d] - g v[n]
            let delayed = line.read();
            let v = s + self.allpass_gain * delayed;
            line.write_advance(v);
            s = delayed - self.allpass_gain * v;
        }
        s
    }
}

fn check_rate(dry: &AudioBuffer, params: &ReverbParams) -> Result<()> {
    if dry.sample_rate != params.sample_rate {
        return Err(Error::SampleRateMismatch { signal: dry.sample_rate, filter: params.sample_rate });
    }
    Ok(())
}

/// Reverberate `dry` and append the decaying tail.
pub fn render_reverb(dry: &AudioBuffer, params: &ReverbParams) -> Result<AudioBuffer> {
    check_rate(dry, params)?;
    let mut filter = Reverberator::new(params);
    let len = dry.len() + tail_samples(params);
    let mix = params.wet_dry_mix;
    let samples = (0..len)
        .map(|n| {
            let x = dry.samples.get(n).copied().unwrap_or(0.0);
            mix * filter.process(x, &params.comb_gains) + (1.0 - mix) * x
        })
        .collect();
    Ok(AudioBuffer { sample_rate: dry.sample_rate, samples })
}

/// From `t_start_s` on, the listener is at baked path sample `sample_index`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub t_start_s: f64,
    pub sample_index: usize,
}

/// Render with the RT60 of whichever cluster the listener is in.
///
/// The schedule must start at `t = 0` and increase strictly. Comb gains ramp
/// linearly over [`CROSSFADE_SECONDS`] whenever the cluster changes.
pub fn render_path(dry: &AudioBuffer, clusters: &ClusterMap, schedule: &[ScheduleEntry]) -> Result<AudioBuffer> {
    let first = schedule.first().ok_or_else(|| Error::Schedule("empty schedule".into()))?;
    if first.t_start_s > 0.0 {
        return Err(Error::Schedule(format!("gap: schedule starts at {} s, not 0", first.t_start_s)));
    }
    if let Some(w) = schedule.windows(2).find(|w| !(w[1].t_start_s > w[0].t_start_s)) {
        return Err(Error::Schedule(format!("entries at {} s and {} s are not increasing", w[0].t_start_s, w[1].t_start_s)));
    }
    let rate = dry.sample_rate;
    let mut params = Vec::with_capacity(schedule.len());
    for entry in schedule {
        let cluster = clusters.cluster_of(entry.sample_index).ok_or_else(|| {
            Error::Schedule(format!("sample index {} is not part of the bake", entry.sample_index))
        })?;
        let rt60 = clusters.clusters[cluster].rt60.as_ref().ok_or(Error::MissingRt60(cluster))?;
        params.push((cluster, params_from_rt60(rt60.broadband(), rate)?));
    }
    let last = &params.last().expect("non-empty").1;
    let len = dry.len() + tail_samples(last);
    let switch_at: Vec<usize> = schedule.iter().map(|e| (e.t_start_s.max(0.0) * rate as f64).round() as usize).collect();
    let fade = ((CROSSFADE_SECONDS * rate as f64).round() as usize).max(1);

    let mut filter = Reverberator::new(&params[0].1);
    let mix = params[0].1.wet_dry_mix;
    let mut gains = params[0].1.comb_gains;
    let mut ramp_from = gains;
    let mut target = 0usize;
    let mut ramp_start: Option<usize> = None;
    let mut samples = Vec::with_capacity(len);
    for n in 0..len {
        while target + 1 < params.len() && switch_at[target + 1] <= n {
            target += 1;
            if params[target].0 != params[target - 1].0 || params[target].1.comb_gains != gains {
                ramp_from = gains;
                ramp_start = Some(switch_at[target]);
            }
        }
        if let Some(start) = ramp_start {
            let to = params[target].1.comb_gains;
            let f = ((n - start) as f64 / fade as f64).min(1.0);
            for k in 0..4 {
                gains[k] = ramp_from[k] + f * (to[k] - ramp_from[k]);
            }
            if f >= 1.0 {
                ramp_start = None;
            }
        }
        let x = dry.samples.get(n).copied().unwrap_or(0.0);
        samples.push(mix * filter.process(x, &gains) + (1.0 - mix) * x);
    }
    Ok(AudioBuffer { sample_rate: rate, samples })
}
