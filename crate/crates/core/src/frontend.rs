//! LO-coherent atomic front-end: envelope superposition, the noisy slope
//! readout `y = (1/2π)(k0 + n_psn)(μ/ħ)(A cos Δφ + n_bgn + n_qpn)` and
//! per-sample I/Q measurement of baseband waveforms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::atomic::{slope_k0, AtomicParams};
use crate::error::{Error, Result};
use crate::par::{try_map_indexed, ExecMode};
use crate::seed;
use crate::waveform::{check_instantaneous_bandwidth, Waveform, WaveformKind};

/// Minimum A_LO/A_RF for the envelope approximation (20 dB).
pub const LO_RATIO_MIN: f64 = 10.0;
/// Default retune latency, s.
pub const DEFAULT_RETUNE_LATENCY: f64 = 1.0e-3;

fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    if p <= -PI {
        p += 2.0 * PI;
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfTone {
    /// V/m.
    pub amplitude: f64,
    /// rad, in (-π, π].
    pub phase: f64,
    /// rad/s.
    pub omega: f64,
}

impl RfTone {
    pub fn new(amplitude: f64, phase: f64, omega: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !phase.is_finite() || !omega.is_finite() {
            return Err(Error::Domain(format!(
                "invalid tone (A = {amplitude}, φ = {phase}, ω = {omega})"
            )));
        }
        Ok(Self {
            amplitude,
            phase: wrap_phase(phase),
            omega,
        })
    }

    /// Tone whose complex envelope is `z`.
    pub fn from_phasor(z: Complex64, omega: f64) -> Self {
        Self {
            amplitude: z.norm(),
            phase: if z.norm() == 0.0 {
                0.0
            } else {
                wrap_phase(z.arg())
            },
            omega,
        }
    }

    pub fn with_phase(self, phase: f64) -> Self {
        Self {
            phase: wrap_phase(phase),
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct NoiseParams {
    /// Photon-shot noise std (multiplies the slope).
    pub sigma_psn: f64,
    /// Background noise std, field units.
    pub sigma_bgn: f64,
    /// Quantum-projection noise std, field units.
    pub sigma_qpn: f64,
    pub seed: u64,
}

/// Where a draw sits in the keyed noise space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleTap {
    pub stream: u64,
    pub index: u64,
}

impl SampleTap {
    pub fn new(stream: u64, index: u64) -> Self {
        Self { stream, index }
    }
}

/// One realisation of the three readout noises, already scaled.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseDraw {
    pub psn: f64,
    pub bgn: f64,
    pub qpn: f64,
}

impl NoiseParams {
    pub fn silent() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        if [self.sigma_psn, self.sigma_bgn, self.sigma_qpn]
            .iter()
            .all(|s| *s >= 0.0 && s.is_finite())
        {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "noise standard deviations must be >= 0: {self:?}"
            )))
        }
    }

    pub fn is_silent(&self) -> bool {
        self.sigma_psn == 0.0 && self.sigma_bgn == 0.0 && self.sigma_qpn == 0.0
    }

    /// Additive field-referred variance σ_bgn² + σ_qpn².
    pub fn additive_variance(&self) -> f64 {
        self.sigma_bgn * self.sigma_bgn + self.sigma_qpn * self.sigma_qpn
    }

    /// Draw keyed by `(seed, stream, index, branch)`; independent of call order.
    pub fn draw(&self, tap: SampleTap, branch: u64) -> NoiseDraw {
        if self.is_silent() {
            return NoiseDraw::default();
        }
        let mut rng = seed::rng(&[self.seed, tap.stream, tap.index, branch]);
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        let c: f64 = rng.sample(StandardNormal);
        NoiseDraw {
            psn: self.sigma_psn * a,
            bgn: self.sigma_bgn * b,
            qpn: self.sigma_qpn * c,
        }
    }
}

fn check_homodyne(rf: &RfTone, lo: &RfTone) -> Result<()> {
    let tol = 1e-12 * rf.omega.abs().max(lo.omega.abs()).max(1.0);
    if (rf.omega - lo.omega).abs() > tol {
        return Err(Error::Homodyne {
            rf_rad_s: rf.omega,
            lo_rad_s: lo.omega,
        });
    }
    Ok(())
}

fn check_lo_ratio(rf_amplitude: f64, lo_amplitude: f64) -> Result<()> {
    if lo_amplitude < LO_RATIO_MIN * rf_amplitude {
        return Err(Error::LoRatio {
            ratio: lo_amplitude / rf_amplitude,
            min: LO_RATIO_MIN,
        });
    }
    Ok(())
}

/// Envelope `A_LO + A_RF cos(φ_RF - φ_LO)` of the LO-dominated superposition.
pub fn superpose_lo(rf: &RfTone, lo: &RfTone) -> Result<f64> {
    check_homodyne(rf, lo)?;
    check_lo_ratio(rf.amplitude, lo.amplitude)?;
    Ok(lo.amplitude + rf.amplitude * (rf.phase - lo.phase).cos())
}

/// Slope readout for a field projection `projection = A_RF cos Δφ`.
pub fn readout(atomic: &AtomicParams, projection: f64, draw: NoiseDraw) -> f64 {
    (slope_k0(atomic) + draw.psn) * atomic.mu_over_hbar() * (projection + draw.bgn + draw.qpn)
        / (2.0 * PI)
}

fn measure_branch(
    rf: &RfTone,
    lo_phase: f64,
    atomic: &AtomicParams,
    noise: &NoiseParams,
    tap: SampleTap,
    branch: u64,
) -> Result<f64> {
    let projection = rf.amplitude * (rf.phase - lo_phase).cos();
    atomic.check_linear(atomic.peak_shift(projection))?;
    Ok(readout(atomic, projection, noise.draw(tap, branch)))
}

/// In-phase readout of one tone against the LO.
pub fn atomic_measure(
    rf: &RfTone,
    lo: &RfTone,
    atomic: &AtomicParams,
    noise: &NoiseParams,
    tap: SampleTap,
) -> Result<f64> {
    superpose_lo(rf, lo)?;
    measure_branch(rf, lo.phase, atomic, noise, tap, 0)
}

/// I from the LO phase, Q from the LO phase advanced by π/2, with independent noise.
pub fn measure_iq(
    rf: &RfTone,
    lo: &RfTone,
    atomic: &AtomicParams,
    noise: &NoiseParams,
    tap: SampleTap,
) -> Result<Complex64> {
    superpose_lo(rf, lo)?;
    let i = measure_branch(rf, lo.phase, atomic, noise, tap, 0)?;
    let q = measure_branch(rf, lo.phase + 0.5 * PI, atomic, noise, tap, 1)?;
    Ok(Complex64::new(i, q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverConfig {
    /// LO field amplitude, V/m.
    pub lo_amplitude: f64,
    pub lo_phase: f64,
    pub inst_bandwidth_limit: f64,
    /// Dead time after each retune, s.
    pub retune_latency: f64,
    /// Noise stream id for this receiver's readout.
    pub stream: u64,
}

impl Default for ReceiverConfig {
    fn default() -> Self {
        Self {
            lo_amplitude: 100.0,
            lo_phase: 0.0,
            inst_bandwidth_limit: crate::waveform::DEFAULT_INST_BANDWIDTH_LIMIT,
            retune_latency: DEFAULT_RETUNE_LATENCY,
            stream: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IqTrace {
    pub sample_rate: f64,
    pub samples: Vec<Complex64>,
    /// False for samples inside a retune-latency window.
    pub valid: Vec<bool>,
}

impl IqTrace {
    /// Trace with every sample valid.
    pub fn from_samples(sample_rate: f64, samples: Vec<Complex64>) -> Self {
        let valid = vec![true; samples.len()];
        Self {
            sample_rate,
            samples,
            valid,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn invalid_count(&self) -> usize {
        self.valid.iter().filter(|v| !**v).count()
    }
}

/// Marks samples inside `[t_retune, t_retune + latency)` invalid.
pub fn latency_mask(rx: &Waveform, latency: f64) -> Vec<bool> {
    let mut valid = vec![true; rx.len()];
    for r in &rx.retune_schedule {
        let start = rx.retune_index(r.time_s).min(rx.len());
        let end = rx.retune_index(r.time_s + latency).min(rx.len());
        valid[start..end].iter_mut().for_each(|v| *v = false);
    }
    valid
}

/// Per-sample I/Q readout of the baseband field `rx` against an LO at the
/// current tuning centre.
pub fn measure_waveform(
    rx: &Waveform,
    receiver: &ReceiverConfig,
    atomic: &AtomicParams,
    noise: &NoiseParams,
    mode: ExecMode,
) -> Result<IqTrace> {
    atomic.validate()?;
    noise.validate()?;
    if rx.inst_bandwidth > receiver.inst_bandwidth_limit {
        return Err(Error::Bandwidth {
            bandwidth_hz: rx.inst_bandwidth,
            limit_hz: receiver.inst_bandwidth_limit,
        });
    }
    if rx.kind == WaveformKind::FreqHop {
        let report = check_instantaneous_bandwidth(rx, receiver.inst_bandwidth_limit);
        let half = 0.5 * receiver.inst_bandwidth_limit + rx.sample_rate / 1024.0;
        if let Some(seg) = report
            .segments
            .iter()
            .find(|s| s.low_hz < -half || s.high_hz > half)
        {
            return Err(Error::Resonance {
                segment_start_s: seg.start_s,
                low_hz: seg.low_hz,
                high_hz: seg.high_hz,
            });
        }
    }

    let valid = latency_mask(rx, receiver.retune_latency);
    let lo = RfTone::new(receiver.lo_amplitude, receiver.lo_phase, 0.0)?;
    let samples = try_map_indexed(mode, rx.len(), |n| {
        if !valid[n] {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let rf = RfTone::from_phasor(rx.samples[n], lo.omega);
        measure_iq(
            &rf,
            &lo,
            atomic,
            noise,
            SampleTap::new(receiver.stream, n as u64),
        )
    })?;
    Ok(IqTrace {
        sample_rate: rx.sample_rate,
        samples,
        valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveform::{gen_lfm, gen_tone};
    use approx::assert_relative_eq;

    fn tone(a: f64, phi: f64) -> RfTone {
        RfTone::new(a, phi, 2.0 * PI * 10e9).unwrap()
    }

    #[test]
    fn superposition_examples() {
        let lo = tone(1.0, 0.3);
        assert_relative_eq!(
            superpose_lo(&tone(0.01, 0.3), &lo).unwrap(),
            1.01,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            superpose_lo(&tone(0.01, 0.3 + PI / 2.0), &lo).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            superpose_lo(&tone(0.01, 0.3 + PI), &lo).unwrap(),
            0.99,
            max_relative = 1e-15
        );
    }

    #[test]
    fn superposition_errors() {
        let lo = tone(1.0, 0.0);
        let off = RfTone::new(0.01, 0.0, 2.0 * PI * 10.001e9).unwrap();
        assert!(matches!(
            superpose_lo(&off, &lo),
            Err(Error::Homodyne { .. })
        ));
        assert!(matches!(
            superpose_lo(&tone(0.2, 0.0), &lo),
            Err(Error::LoRatio { .. })
        ));
        assert!(superpose_lo(&tone(0.1, 0.0), &lo).is_ok());
    }

    #[test]
    fn tone_phase_is_wrapped() {
        let t = RfTone::new(1.0, 3.0 * PI, 0.0).unwrap();
        assert_relative_eq!(t.phase, PI, max_relative = 1e-12);
        let t = RfTone::new(1.0, -PI, 0.0).unwrap();
        assert_relative_eq!(t.phase, PI, max_relative = 1e-12);
        assert!(RfTone::new(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn noiseless_readout_matches_closed_form() {
        let atomic = AtomicParams::normalized(1.0, 1.0);
        let lo = tone(100.0, 0.0);
        let y = atomic_measure(
            &tone(1.0, 0.0),
            &lo,
            &atomic,
            &NoiseParams::silent(),
            SampleTap::new(0, 0),
        )
        .unwrap();
        // k0 = 1/9 -> y = 1/(18π)
        assert_relative_eq!(y, 1.0 / (18.0 * PI), max_relative = 1e-15);
        assert_relative_eq!(y, 0.017_683_882_565_766, max_relative = 1e-12);
        let y = atomic_measure(
            &tone(1.0, PI / 2.0),
            &lo,
            &atomic,
            &NoiseParams::silent(),
            SampleTap::new(0, 0),
        )
        .unwrap();
        assert!(y.abs() < 1e-17);
    }

    #[test]
    fn iq_recovers_phase_and_scales_linearly() {
        let atomic = AtomicParams::normalized(1.0, 0.7);
        let lo = tone(100.0, 0.4);
        let quiet = NoiseParams::silent();
        let z = measure_iq(&tone(1.0, 0.4), &lo, &atomic, &quiet, SampleTap::new(0, 0)).unwrap();
        assert!(z.re > 0.0 && z.im.abs() < 1e-17);
        let mut rng = seed::rng(&[5]);
        for _ in 0..1000 {
            let dphi: f64 = rng.random_range(-PI..PI);
            let z = measure_iq(
                &tone(2.0, 0.4 + dphi),
                &lo,
                &atomic,
                &quiet,
                SampleTap::new(0, 0),
            )
            .unwrap();
            let mut err = z.arg() - dphi;
            err = wrap_phase(err);
            assert!(err.abs() < 1e-9, "dphi {dphi}: err {err}");
            let z3 = measure_iq(
                &tone(6.0, 0.4 + dphi),
                &lo,
                &atomic,
                &quiet,
                SampleTap::new(0, 0),
            )
            .unwrap();
            assert_relative_eq!(z3.norm(), 3.0 * z.norm(), max_relative = 1e-12);
        }
    }

    #[test]
    fn draws_are_keyed_and_reproducible() {
        let n = NoiseParams {
            sigma_psn: 0.1,
            sigma_bgn: 1.0,
            sigma_qpn: 0.5,
            seed: 99,
        };
        let a = n.draw(SampleTap::new(3, 17), 0);
        let b = n.draw(SampleTap::new(3, 17), 0);
        assert_eq!(a, b);
        assert_ne!(a, n.draw(SampleTap::new(3, 17), 1));
        assert_ne!(a, n.draw(SampleTap::new(3, 18), 0));
        let other = NoiseParams { seed: 100, ..n };
        assert_ne!(a, other.draw(SampleTap::new(3, 17), 0));
    }

    #[test]
    fn saturation_propagates() {
        let atomic = AtomicParams {
            gamma: 10.0,
            ..AtomicParams::normalized(1.0, 1.0)
        };
        // linear region ±0.1 Hz -> projection limit 2π·0.1
        let lo = tone(100.0, 0.0);
        let r = atomic_measure(
            &tone(0.7, 0.0),
            &lo,
            &atomic,
            &NoiseParams::silent(),
            SampleTap::new(0, 0),
        );
        assert!(matches!(r, Err(Error::Saturation { .. })));
    }

    #[test]
    fn constant_carrier_gives_constant_trace() {
        let atomic = AtomicParams::normalized(1.0, 1.0);
        let w = gen_tone(0.0, 1e-4, 1e6).unwrap().scaled(0.5);
        let rx = ReceiverConfig::default();
        let trace =
            measure_waveform(&w, &rx, &atomic, &NoiseParams::silent(), ExecMode::Parallel).unwrap();
        let lo = RfTone::new(rx.lo_amplitude, 0.0, 0.0).unwrap();
        let single = atomic_measure(
            &RfTone::new(0.5, 0.0, 0.0).unwrap(),
            &lo,
            &atomic,
            &NoiseParams::silent(),
            SampleTap::new(0, 0),
        )
        .unwrap();
        assert!(trace
            .samples
            .iter()
            .all(|z| (z.re - single).abs() < 1e-18 && z.im.abs() < 1e-18));
        assert_eq!(trace.invalid_count(), 0);
    }

    #[test]
    fn wide_waveform_violates_bandwidth() {
        let atomic = AtomicParams::normalized(1.0, 1.0);
        let w = gen_lfm(50e6, 2e-6, 125e6).unwrap().scaled(0.1);
        let r = measure_waveform(
            &w,
            &ReceiverConfig::default(),
            &atomic,
            &NoiseParams::silent(),
            ExecMode::Sequential,
        );
        assert!(matches!(r, Err(Error::Bandwidth { .. })));
    }

    #[test]
    fn retune_windows_are_flagged() {
        let atomic = AtomicParams::normalized(1.0, 1.0);
        // three 4 MHz hops left at their absolute offsets: the last one sits
        // 8 MHz from the (never moved) LO
        let fs = 25e6;
        let per_step = 500;
        let samples = (0..3 * per_step)
            .map(|n| {
                let f = 4e6 * (n / per_step) as f64;
                Complex64::from_polar(0.1, 2.0 * PI * f * n as f64 / fs)
            })
            .collect();
        let w = Waveform::new(fs, 0.0, samples, 0.0, vec![], WaveformKind::FreqHop).unwrap();
        let r = measure_waveform(
            &w,
            &ReceiverConfig::default(),
            &atomic,
            &NoiseParams::silent(),
            ExecMode::Parallel,
        );
        assert!(matches!(r, Err(Error::Resonance { .. })), "{r:?}");
    }
}
