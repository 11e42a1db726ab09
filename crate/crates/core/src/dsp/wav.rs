//! 16-bit PCM mono WAV, backed by `hound`.

use std::io::Cursor;

use super::AudioBuffer;
use crate::error::{Error, Result};

fn wav_err(e: hound::Error) -> Error {
    Error::Wav(e.to_string())
}

pub fn wav_read(bytes: &[u8]) -> Result<AudioBuffer> {
    let reader = hound::WavReader::new(Cursor::new(bytes)).map_err(wav_err)?;
    let spec = reader.spec();
    if spec.channels != 1 || spec.bits_per_sample != 16 || spec.sample_format != hound::SampleFormat::Int {
        return Err(Error::Wav(format!(
            "unsupported encoding: {} channel(s), {}-bit {:?}; expected 16-bit PCM mono",
            spec.channels, spec.bits_per_sample, spec.sample_format
        )));
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| v as f64 / 32768.0))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(wav_err)?;
    AudioBuffer::new(spec.sample_rate, samples)
}

/// Samples outside `[-1, 1)` are clamped to the 16-bit range.
pub fn wav_write(buffer: &AudioBuffer) -> Result<Vec<u8>> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: buffer.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut cursor = Cursor::new(Vec::new());
    {
        let mut writer = hound::WavWriter::new(&mut cursor, spec).map_err(wav_err)?;
        for &s in &buffer.samples {
            let q = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
            writer.write_sample(q).map_err(wav_err)?;
        }
        writer.finalize().map_err(wav_err)?;
    }
    Ok(cursor.into_inner())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sine_round_trip_within_one_lsb() {
        let rate = 44_100;
        let sine: Vec<f64> =
            (0..rate).map(|n| (2.0 * std::f64::consts::PI * 440.0 * n as f64 / rate as f64).sin()).collect();
        let buf = AudioBuffer::new(rate, sine).unwrap();
        let back = wav_read(&wav_write(&buf).unwrap()).unwrap();
        assert_eq!(back.sample_rate, rate);
        assert_eq!(back.len(), buf.len());
        let max_err = buf.samples.iter().zip(&back.samples).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(max_err <= 1.0 / 32768.0, "{max_err}");
    }

    #[test]
    fn truncated_header_is_an_error() {
        let bytes = wav_write(&AudioBuffer::impulse(44_100, 10)).unwrap();
        assert!(matches!(wav_read(&bytes[..20]), Err(Error::Wav(_))));
        assert!(wav_read(b"RIFF").is_err());
    }

    #[test]
    fn zero_length_audio() {
        let bytes = wav_write(&AudioBuffer::silence(48_000, 0)).unwrap();
        let back = wav_read(&bytes).unwrap();
        assert!(back.is_empty());
        assert_eq!(back.sample_rate, 48_000);
    }

    #[test]
    fn stereo_is_unsupported() {
        let spec = hound::WavSpec { channels: 2, sample_rate: 44_100, bits_per_sample: 16, sample_format: hound::SampleFormat::Int };
        let mut cursor = Cursor::new(Vec::new());
        {
            let mut w = hound::WavWriter::new(&mut cursor, spec).unwrap();
            w.write_sample(0i16).unwrap();
            w.write_sample(0i16).unwrap();
            w.finalize().unwrap();
        }
        assert!(matches!(wav_read(&cursor.into_inner()), Err(Error::Wav(m)) if m.contains("unsupported")));
    }

    proptest! {
        #[test]
        fn round_trip_error_bounded(samples in prop::collection::vec(-1.0f64..1.0, 0..500)) {
            let buf = AudioBuffer::new(44_100, samples).unwrap();
            let back = wav_read(&wav_write(&buf).unwrap()).unwrap();
            for (a, b) in buf.samples.iter().zip(&back.samples) {
                prop_assert!((a - b).abs() <= 1.0 / 32768.0);
            }
        }
    }
}
