//! Audio side: mono buffers, WAV I/O and the RT60-driven reverberator.

mod reverb;
mod wav;

pub use reverb::{
    comb_gain, params_from_rt60, render_path, render_reverb, tail_samples, Reverberator, ReverbParams,
    ScheduleEntry, ALLPASS_DELAYS_MS, COMB_DELAYS_MS, CROSSFADE_SECONDS, DEFAULT_ALLPASS_GAIN,
};
pub use wav::{wav_read, wav_write};

use crate::error::{Error, Result};

/// Mono audio at a fixed sample rate.
#[derive(Clone, Debug, PartialEq)]
pub struct AudioBuffer {
    pub sample_rate: u32,
    pub samples: Vec<f64>,
}

impl AudioBuffer {
    pub fn new(sample_rate: u32, samples: Vec<f64>) -> Result<AudioBuffer> {
        if sample_rate == 0 {
            return Err(Error::InvalidArgument("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample {i} is not finite")));
        }
        Ok(AudioBuffer { sample_rate, samples })
    }

    pub fn silence(sample_rate: u32, len: usize) -> AudioBuffer {
        AudioBuffer { sample_rate, samples: vec![0.0; len] }
    }

    /// Unit impulse followed by `len - 1` zeros.
    pub fn impulse(sample_rate: u32, len: usize) -> AudioBuffer {
        let mut b = AudioBuffer::silence(sample_rate, len.max(1));
        b.samples[0] = 1.0;
        b
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Largest absolute sample value.
    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.abs()))
    }
}
