//! Air interface: delayed/Doppler-shifted path sum, complex AWGN, monostatic
//! round trip and detuning-selective receiver sensitivity.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dsp::{fractional_delay, SINC_HALF_TAPS};
use crate::error::{Error, Result};
use crate::seed;
use crate::waveform::Waveform;

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn round_trip_delay(range_m: f64) -> f64 {
    2.0 * range_m / SPEED_OF_LIGHT
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Path {
    #[serde(rename = "delay_s")]
    pub delay: f64,
    #[serde(rename = "doppler_hz", default)]
    pub doppler: f64,
    /// Linear amplitude gain.
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathSet {
    pub paths: Vec<Path>,
}

impl PathSet {
    pub fn single(delay: f64, gain: f64) -> Self {
        Self {
            paths: vec![Path {
                delay,
                doppler: 0.0,
                gain,
            }],
        }
    }

    pub fn monostatic(range_m: f64, gain: f64) -> Self {
        Self::single(round_trip_delay(range_m), gain)
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths.is_empty() {
            return Err(Error::Config("path set is empty".into()));
        }
        for p in &self.paths {
            if !(p.delay >= 0.0)
                || !p.delay.is_finite()
                || !p.gain.is_finite()
                || p.gain < 0.0
                || !p.doppler.is_finite()
            {
                return Err(Error::Config(format!("invalid path {p:?}")));
            }
        }
        Ok(())
    }
}

/// Complex white Gaussian noise with per-component standard deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Awgn {
    pub sigma: f64,
    pub seed: u64,
}

impl Awgn {
    pub fn off() -> Self {
        Self::default()
    }

    pub fn new(sigma: f64, seed: u64) -> Self {
        Self { sigma, seed }
    }

    pub fn add_to(&self, samples: &mut [Complex64]) {
        if self.sigma == 0.0 {
            return;
        }
        let mut rng = seed::rng(&[self.seed, seed::label("awgn")]);
        for z in samples {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *z += Complex64::new(re, im) * self.sigma;
        }
    }
}

/// Sum over paths of `gain · tx(t - τ) · e^{-j2π c(t) τ} · e^{j2π ν t}` plus AWGN,
/// where `c(t)` is the absolute tuning centre in force. The output is long
/// enough to hold the most delayed copy (and its interpolation tail).
pub fn propagate(tx: &Waveform, paths: &PathSet, awgn: Awgn) -> Result<Waveform> {
    paths.validate()?;
    if !(awgn.sigma >= 0.0) {
        return Err(Error::Domain(format!(
            "AWGN sigma must be >= 0, got {}",
            awgn.sigma
        )));
    }
    let fs = tx.sample_rate;
    let mut extra = 0usize;
    for p in &paths.paths {
        let d = p.delay * fs;
        let frac = (d - d.round()).abs() >= 1e-9;
        extra = extra.max(d.ceil() as usize + if frac { SINC_HALF_TAPS } else { 0 });
    }
    let out_len = tx.len() + extra;
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];

    let mut centres = Vec::with_capacity(out_len);
    for seg in tx.segments() {
        centres.extend(std::iter::repeat_n(seg.centre_hz, seg.end - seg.start));
    }
    let last = centres.last().copied().unwrap_or(tx.carrier);
    centres.resize(out_len, last);

    for p in &paths.paths {
        if p.gain == 0.0 {
            continue;
        }
        let delayed = fractional_delay(&tx.samples, p.delay * fs, out_len);
        for (n, (o, x)) in out.iter_mut().zip(&delayed).enumerate() {
            let phase = -2.0 * PI * centres[n] * p.delay + 2.0 * PI * p.doppler * n as f64 / fs;
            *o += x * Complex64::from_polar(p.gain, phase);
        }
    }
    awgn.add_to(&mut out);
    Ok(Waveform {
        samples: out,
        ..tx.clone()
    })
}

/// Single-target echo at `range_m` with round-trip delay `2R/c`.
pub fn monostatic_echo(tx: &Waveform, range_m: f64, rcs_gain: f64, awgn: Awgn) -> Result<Waveform> {
    if !(range_m >= 0.0) {
        return Err(Error::Domain(format!("range must be >= 0, got {range_m}")));
    }
    propagate(tx, &PathSet::monostatic(range_m, rcs_gain), awgn)
}

/// Piecewise-linear sensitivity versus detuning offset; clamped outside the knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectivityProfile {
    /// `(detuning offset Hz, linear sensitivity)` pairs.
    pub knots: Vec<(f64, f64)>,
}

impl Default for SelectivityProfile {
    fn default() -> Self {
        Self::flat()
    }
}

impl SelectivityProfile {
    pub fn flat() -> Self {
        Self {
            knots: vec![(0.0, 1.0)],
        }
    }

    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        let p = Self { knots };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.knots.is_empty() {
            return Err(Error::Config(
                "selectivity profile needs at least one knot".into(),
            ));
        }
        if self
            .knots
            .iter()
            .any(|k| !(k.1 > 0.0) || !k.0.is_finite() || !k.1.is_finite())
        {
            return Err(Error::Config(
                "selectivity scales must be positive and finite".into(),
            ));
        }
        if self.knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Config(
                "selectivity knots must be strictly increasing".into(),
            ));
        }
        Ok(())
    }

    pub fn eval(&self, detuning: f64) -> f64 {
        let k = &self.knots;
        if detuning <= k[0].0 {
            return k[0].1;
        }
        if detuning >= k[k.len() - 1].0 {
            return k[k.len() - 1].1;
        }
        let i = k.partition_point(|p| p.0 <= detuning);
        let (x0, y0) = k[i - 1];
        let (x1, y1) = k[i];
        y0 + (y1 - y0) * (detuning - x0) / (x1 - x0)
    }
}

/// Scales each tuning segment by the sensitivity at its detuning offset
/// (`detuning_of_carrier` plus the segment's offset from the carrier).
pub fn apply_selectivity(
    w: &Waveform,
    profile: &SelectivityProfile,
    detuning_of_carrier: f64,
) -> Waveform {
    let mut out = w.clone();
    for seg in w.segments() {
        let scale = profile.eval(detuning_of_carrier + seg.centre_hz - w.carrier);
        out.samples[seg.start..seg.end]
            .iter_mut()
            .for_each(|z| *z *= scale);
    }
    out
}
