//! Range estimation: matched filter, dechirped beat FFT and stepped-frequency
//! synthesis, with resolution and accuracy metrics.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::SPEED_OF_LIGHT;
use crate::dsp::{
    cross_correlate, fft_in_place, ifft_in_place, median, parabolic_offset, windowed_sinc,
    SINC_HALF_TAPS,
};
use crate::error::{Error, Result};
use crate::frontend::IqTrace;
use crate::waveform::{HopPlan, Waveform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RangeMethod {
    MatchedFilter,
    BeatFft,
    SteppedSynth,
}

impl RangeMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            RangeMethod::MatchedFilter => "MATCHED_FILTER",
            RangeMethod::BeatFft => "BEAT_FFT",
            RangeMethod::SteppedSynth => "STEPPED_SYNTH",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeEstimate {
    pub range_m: f64,
    /// Peak magnitude over median magnitude.
    pub peak_metric: f64,
    pub method: RangeMethod,
    /// The searched range extent exceeds the unambiguous window.
    pub ambiguous: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detection {
    Detected(RangeEstimate),
    /// Nothing reached the threshold; `candidate` is the strongest peak anyway.
    NoDetection {
        candidate: RangeEstimate,
        threshold: f64,
    },
}

impl Detection {
    pub fn estimate(&self) -> Option<&RangeEstimate> {
        match self {
            Detection::Detected(e) => Some(e),
            Detection::NoDetection { .. } => None,
        }
    }

    /// Peak location whether or not it passed the threshold.
    pub fn candidate(&self) -> &RangeEstimate {
        match self {
            Detection::Detected(e) | Detection::NoDetection { candidate: e, .. } => e,
        }
    }

    pub fn range(&self) -> Option<f64> {
        self.estimate().map(|e| e.range_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    /// Peak must reach this multiple of the median magnitude.
    pub threshold: f64,
    /// Fine-grid refinement factor before parabolic interpolation.
    pub refine: usize,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            threshold: 8.0,
            refine: 8,
        }
    }
}

fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i)
}

fn classify(estimate: RangeEstimate, cfg: &DetectionConfig) -> Detection {
    if estimate.peak_metric >= cfg.threshold {
        Detection::Detected(estimate)
    } else {
        Detection::NoDetection {
            candidate: estimate,
            threshold: cfg.threshold,
        }
    }
}

/// Band-limited value of `x` at fractional index `t` (zero outside).
fn interpolate(x: &[Complex64], t: f64) -> Complex64 {
    let half = SINC_HALF_TAPS as f64;
    let lo = (t - half).ceil().max(0.0) as usize;
    let hi = ((t + half).floor().max(0.0) as usize).min(x.len().saturating_sub(1));
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, v) in x.iter().enumerate().take(hi + 1).skip(lo) {
        acc += v * windowed_sinc(t - m as f64);
    }
    acc
}

/// Refines an integer peak of a band-limited sequence: windowed-sinc
/// evaluation on a grid of `refine` points per sample, then a 3-point parabola.
fn refine_peak(x: &[Complex64], peak: usize, refine: usize) -> f64 {
    let refine = refine.max(1);
    let step = 1.0 / refine as f64;
    let span = refine as isize;
    let samples: Vec<f64> = (-span..=span)
        .map(|k| interpolate(x, peak as f64 + k as f64 * step).norm())
        .collect();
    let mut best = argmax(&samples);
    best = best.clamp(1, samples.len() - 2);
    let off = parabolic_offset(samples[best - 1], samples[best], samples[best + 1]);
    peak as f64 + ((best as isize - span) as f64 + off) * step
}

/// Cross-correlates `rx` with `reference`; range from the refined correlation peak.
pub fn matched_filter_range(
    rx: &IqTrace,
    reference: &Waveform,
    cfg: &DetectionConfig,
) -> Result<Detection> {
    if reference.is_empty() {
        return Err(Error::Config("reference waveform is empty".into()));
    }
    if rx.len() < reference.len() {
        return Err(Error::Framing(format!(
            "received trace ({}) shorter than reference ({})",
            rx.len(),
            reference.len()
        )));
    }
    // leading zeros let the refinement see negative lags around a zero-delay echo
    let pad = SINC_HALF_TAPS + 1;
    let mut padded = vec![Complex64::new(0.0, 0.0); pad];
    padded.extend(rx.samples.iter().zip(&rx.valid).map(|(z, ok)| {
        if *ok {
            *z
        } else {
            Complex64::new(0.0, 0.0)
        }
    }));
    let corr = cross_correlate(&padded, &reference.samples);
    let mags: Vec<f64> = corr.iter().map(|z| z.norm()).collect();
    let peak = argmax(&mags);
    let metric = mags[peak] / median(&mags).max(f64::MIN_POSITIVE);
    let lag = refine_peak(&corr, peak, cfg.refine) - pad as f64;
    let tau = lag / rx.sample_rate;
    Ok(classify(
        RangeEstimate {
            range_m: (0.5 * SPEED_OF_LIGHT * tau).max(0.0),
            peak_metric: metric,
            method: RangeMethod::MatchedFilter,
            ambiguous: false,
        },
        cfg,
    ))
}

/// `reference · conj(rx)`: an echo delayed by τ becomes a tone at `chirp_rate · τ`.
pub fn dechirp(rx: &[Complex64], reference: &[Complex64]) -> Vec<Complex64> {
    rx.iter()
        .zip(reference)
        .map(|(r, t)| t * r.conj())
        .collect()
}

/// Range from the dominant beat frequency of a dechirped trace.
pub fn beat_fft_range(rx: &IqTrace, chirp_rate: f64, cfg: &DetectionConfig) -> Result<Detection> {
    if rx.is_empty() {
        return Err(Error::Framing("empty beat trace".into()));
    }
    if !(chirp_rate > 0.0) {
        return Err(Error::Config(format!(
            "chirp rate must be > 0, got {chirp_rate}"
        )));
    }
    let n = (rx.len() * cfg.refine.max(1)).next_power_of_two();
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    for (k, (z, ok)) in rx.samples.iter().zip(&rx.valid).enumerate() {
        if *ok {
            spec[k] = *z;
        }
    }
    fft_in_place(&mut spec);
    let mags: Vec<f64> = spec.iter().map(|z| z.norm()).collect();
    let peak = argmax(&mags);
    let metric = mags[peak] / median(&mags).max(f64::MIN_POSITIVE);
    let off = parabolic_offset(mags[(peak + n - 1) % n], mags[peak], mags[(peak + 1) % n]);
    let mut bin = peak as f64 + off;
    if bin > n as f64 / 2.0 {
        bin -= n as f64;
    }
    let beat = bin * rx.sample_rate / n as f64;
    let tau = beat / chirp_rate;
    Ok(classify(
        RangeEstimate {
            range_m: (0.5 * SPEED_OF_LIGHT * tau).max(0.0),
            peak_metric: metric,
            method: RangeMethod::BeatFft,
            ambiguous: false,
        },
        cfg,
    ))
}

/// c / (2B).
pub fn range_resolution(synth_bandwidth: f64) -> Result<f64> {
    if !(synth_bandwidth > 0.0) {
        return Err(Error::Domain(format!(
            "bandwidth must be > 0, got {synth_bandwidth}"
        )));
    }
    Ok(SPEED_OF_LIGHT / (2.0 * synth_bandwidth))
}

/// c / (2 Δf_step).
pub fn unambiguous_range(plan: &HopPlan) -> f64 {
    SPEED_OF_LIGHT / (2.0 * plan.step_spacing)
}

/// Zero-padding factor for the synthetic range profile.
const PROFILE_PAD: usize = 64;

/// Synthetic range profile: magnitude of the inverse DFT across steps, with
/// bin `k` at range `k · c / (2 · n_fft · Δf_step)`.
pub fn synthetic_profile(per_step: &[Complex64]) -> Vec<Complex64> {
    let n = (per_step.len() * PROFILE_PAD).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..per_step.len()].copy_from_slice(per_step);
    ifft_in_place(&mut buf);
    buf
}

/// Inverse-DFT stepped-frequency ranging from one coherent sample per step.
/// `max_expected_range` marks the result ambiguous when it exceeds `c/(2Δf_step)`.
pub fn stepped_synthesis_range(
    per_step: &[Complex64],
    plan: &HopPlan,
    max_expected_range: f64,
    cfg: &DetectionConfig,
) -> Result<Detection> {
    if per_step.len() < 2 {
        return Err(Error::Config(
            "stepped synthesis needs at least two steps".into(),
        ));
    }
    if per_step.len() != plan.steps {
        return Err(Error::LengthMismatch {
            left: per_step.len(),
            right: plan.steps,
        });
    }
    let profile = synthetic_profile(per_step);
    let n = profile.len();
    let mags: Vec<f64> = profile.iter().map(|z| z.norm()).collect();
    let peak = argmax(&mags);
    let metric = mags[peak] / median(&mags).max(f64::MIN_POSITIVE);
    let off = parabolic_offset(mags[(peak + n - 1) % n], mags[peak], mags[(peak + 1) % n]);
    let bin = (peak as f64 + off).rem_euclid(n as f64);
    let window = unambiguous_range(plan);
    Ok(classify(
        RangeEstimate {
            range_m: bin / n as f64 * window,
            peak_metric: metric,
            method: RangeMethod::SteppedSynth,
            ambiguous: max_expected_range >= window,
        },
        cfg,
    ))
}

/// Ideal per-step returns `Σ_k g_k e^{-j4π R_k f_i / c}` for hop frequencies
/// `f_i = f_start + i·Δf_step`.
pub fn stepped_returns(
    plan: &HopPlan,
    f_start: f64,
    targets: &[(f64, Complex64)],
) -> Vec<Complex64> {
    (0..plan.steps)
        .map(|i| {
            let f = f_start + plan.step_frequency(i);
            targets
                .iter()
                .map(|(r, g)| g * Complex64::from_polar(1.0, -4.0 * PI * r * f / SPEED_OF_LIGHT))
                .sum()
        })
        .collect()
}

/// Rayleigh-style two-target test on the stepped profile. The second echo is
/// placed in phase quadrature with the first at the band centre, which makes
/// the coherent profile equal to the incoherent sum of the two responses.
/// Resolved iff the fine profile shows two local maxima above half the peak power.
pub fn resolves_two_targets(
    plan: &HopPlan,
    f_start: f64,
    first_range: f64,
    separation: f64,
) -> bool {
    let second = first_range + separation;
    let f_mid = f_start + plan.step_frequency(plan.steps - 1) / 2.0;
    let theta = |r: f64| 4.0 * PI * f_mid * r / SPEED_OF_LIGHT;
    let psi = theta(second) - theta(first_range) + 0.5 * PI;
    let returns = stepped_returns(
        plan,
        f_start,
        &[
            (first_range, Complex64::new(1.0, 0.0)),
            (second, Complex64::from_polar(1.0, psi)),
        ],
    );
    let res = SPEED_OF_LIGHT / (2.0 * plan.synthesized_bandwidth());
    let lo = first_range - 2.0 * res;
    let hi = second + 2.0 * res;
    let points = 4000;
    let power: Vec<f64> = (0..=points)
        .map(|k| {
            let r = lo + (hi - lo) * k as f64 / points as f64;
            returns
                .iter()
                .enumerate()
                .map(|(i, z)| {
                    z * Complex64::from_polar(
                        1.0,
                        4.0 * PI * r * (f_start + plan.step_frequency(i)) / SPEED_OF_LIGHT,
                    )
                })
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect();
    count_peaks(&power, 0.5) >= 2
}

/// Local maxima of `values` that reach `fraction` of the global maximum.
pub fn count_peaks(values: &[f64], fraction: f64) -> usize {
    let max = values.iter().copied().fold(0.0, f64::max);
    values
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] >= w[2] && w[1] >= fraction * max)
        .count()
}

/// sqrt(mean((est - truth)²)).
pub fn radar_rmse(truths: &[f64], estimates: &[f64]) -> Result<f64> {
    if truths.len() != estimates.len() {
        return Err(Error::LengthMismatch {
            left: truths.len(),
            right: estimates.len(),
        });
    }
    if truths.is_empty() {
        return Err(Error::Domain("RMSE of an empty set".into()));
    }
    let mse = truths
        .iter()
        .zip(estimates)
        .map(|(t, e)| (e - t) * (e - t))
        .sum::<f64>()
        / truths.len() as f64;
    Ok(mse.sqrt())
}

/// Delay-estimation bound (range std, m) for per-step phasors at absolute
/// frequencies `freqs` with per-step SNR `|a|²/σ²` (σ² the complex noise
/// variance of the step estimate); unknown common phase.
pub fn stepped_range_bound(freqs: &[f64], per_step_snr: &[f64]) -> f64 {
    let total: f64 = per_step_snr.iter().sum();
    let mean = freqs
        .iter()
        .zip(per_step_snr)
        .map(|(f, s)| f * s)
        .sum::<f64>()
        / total;
    let info: f64 = freqs
        .iter()
        .zip(per_step_snr)
        .map(|(f, s)| 2.0 * s * (2.0 * PI * (f - mean)).powi(2))
        .sum();
    0.5 * SPEED_OF_LIGHT / info.sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarTrial {
    pub trial: usize,
    pub seed: u64,
    pub truth_m: f64,
    /// Strongest peak, reported even when it missed the threshold.
    pub estimate_m: f64,
    pub detected: bool,
    pub method: RangeMethod,
}

impl RadarTrial {
    pub fn error_m(&self) -> f64 {
        self.estimate_m - self.truth_m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarReport {
    pub trials: Vec<RadarTrial>,
    /// Over every trial: a target is always present, so sub-threshold
    /// peaks still count as the estimate.
    pub rmse_m: f64,
    pub resolution_m: f64,
    pub missed: usize,
}

impl RadarReport {
    pub fn from_trials(trials: Vec<RadarTrial>, resolution_m: f64) -> Result<Self> {
        let truths: Vec<f64> = trials.iter().map(|t| t.truth_m).collect();
        let ests: Vec<f64> = trials.iter().map(|t| t.estimate_m).collect();
        let rmse_m = radar_rmse(&truths, &ests)?;
        Ok(Self {
            missed: trials.iter().filter(|t| !t.detected).count(),
            trials,
            rmse_m,
            resolution_m,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{monostatic_echo, round_trip_delay, Awgn};
    use crate::waveform::gen_lfm;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn trace(w: &Waveform) -> IqTrace {
        IqTrace::from_samples(w.sample_rate, w.samples.clone())
    }

    fn plan(steps: usize, spacing: f64) -> HopPlan {
        HopPlan {
            steps,
            step_spacing: spacing,
            dwell: 1e-3,
            step_bandwidth: 10e3,
            receiver_limit: 10e6,
        }
    }

    #[test]
    fn resolution_examples() {
        assert_relative_eq!(
            range_resolution(1e9).unwrap(),
            0.149_896_229,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            range_resolution(10e6).unwrap(),
            14.989_622_9,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            range_resolution(2e9).unwrap(),
            range_resolution(1e9).unwrap() / 2.0
        );
        assert!(range_resolution(0.0).is_err());
    }

    #[test]
    fn rmse_examples() {
        assert_eq!(radar_rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_relative_eq!(
            radar_rmse(&[1.7, 1.8], &[1.71, 1.79]).unwrap(),
            0.01,
            max_relative = 1e-9
        );
        assert!(matches!(
            radar_rmse(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn matched_filter_zero_range() {
        let tx = gen_lfm(100e6, 2e-6, 250e6).unwrap();
        let mut rx = tx.samples.clone();
        rx.extend(vec![Complex64::new(0.0, 0.0); 200]);
        let det = matched_filter_range(
            &IqTrace::from_samples(250e6, rx),
            &tx,
            &DetectionConfig::default(),
        )
        .unwrap();
        let quantum = 0.5 * SPEED_OF_LIGHT / 250e6 / 8.0;
        assert!(det.range().unwrap() <= quantum, "{det:?}");
    }

    #[test]
    fn matched_filter_recovers_injected_delay() {
        let fs = 2.5e9;
        let tx = gen_lfm(1e9, 1e-6, fs).unwrap().with_carrier(10e9);
        let echo = monostatic_echo(&tx, 1.75, 0.3, Awgn::off()).unwrap();
        let det = matched_filter_range(&trace(&echo), &tx, &DetectionConfig::default()).unwrap();
        let r = det.range().unwrap();
        assert!((r - 1.75).abs() <= 1.5e-3, "estimate {r}");
    }

    #[test]
    fn matched_filter_two_targets_rayleigh() {
        // two equal echoes in carrier-phase quadrature: resolved at 15 cm, merged at 10 cm
        let fs = 5e9;
        let count = |sep: f64| -> usize {
            let dt = round_trip_delay(sep);
            let fc = 10.25 / dt;
            let tx = gen_lfm(1e9, 0.5e-6, fs).unwrap().with_carrier(fc);
            let paths = crate::channel::PathSet {
                paths: vec![
                    crate::channel::Path {
                        delay: round_trip_delay(1.6),
                        doppler: 0.0,
                        gain: 1.0,
                    },
                    crate::channel::Path {
                        delay: round_trip_delay(1.6 + sep),
                        doppler: 0.0,
                        gain: 1.0,
                    },
                ],
            };
            let rx = crate::channel::propagate(&tx, &paths, Awgn::off()).unwrap();
            let mut padded = rx.samples.clone();
            padded.extend(vec![Complex64::new(0.0, 0.0); 10]);
            let corr = cross_correlate(&padded, &tx.samples);
            let fine: Vec<f64> = (0..corr.len() * 16)
                .map(|k| interpolate(&corr, k as f64 / 16.0).norm_sqr())
                .collect();
            count_peaks(&fine, 0.5)
        };
        assert_eq!(count(0.15), 2);
        assert_eq!(count(0.10), 1);
    }

    #[test]
    fn matched_filter_shift_theorem() {
        let fs = 250e6;
        let tx = gen_lfm(100e6, 2e-6, fs).unwrap();
        let echo = monostatic_echo(&tx, 3.3, 1.0, Awgn::off()).unwrap();
        let base = matched_filter_range(&trace(&echo), &tx, &DetectionConfig::default())
            .unwrap()
            .range()
            .unwrap();
        for k in [1usize, 5, 17] {
            let mut shifted = vec![Complex64::new(0.0, 0.0); k];
            shifted.extend_from_slice(&echo.samples);
            let r = matched_filter_range(
                &IqTrace::from_samples(fs, shifted),
                &tx,
                &DetectionConfig::default(),
            )
            .unwrap()
            .range()
            .unwrap();
            let want = base + k as f64 * SPEED_OF_LIGHT / (2.0 * fs);
            assert!((r - want).abs() < 1e-9, "k={k}: {r} vs {want}");
        }
    }

    #[test]
    fn matched_filter_framing() {
        let tx = gen_lfm(1e6, 1e-4, 4e6).unwrap();
        let short = IqTrace::from_samples(4e6, tx.samples[..10].to_vec());
        assert!(matches!(
            matched_filter_range(&short, &tx, &DetectionConfig::default()),
            Err(Error::Framing(_))
        ));
    }

    #[test]
    fn beat_examples() {
        let fs = 10e6;
        let n = 2000;
        let rate = 1e12;
        let dc = IqTrace::from_samples(fs, vec![Complex64::new(1.0, 0.0); n]);
        assert_eq!(
            beat_fft_range(&dc, rate, &DetectionConfig::default())
                .unwrap()
                .range(),
            Some(0.0)
        );

        let fb = rate * 12e-9;
        let tone = (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * fb * k as f64 / fs))
            .collect();
        let r = beat_fft_range(
            &IqTrace::from_samples(fs, tone),
            rate,
            &DetectionConfig::default(),
        )
        .unwrap()
        .range()
        .unwrap();
        assert!((r - 1.798_754_748).abs() < 1e-2, "{r}");

        let mut rng = crate::seed::rng(&[8]);
        let noise: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let det = beat_fft_range(
            &IqTrace::from_samples(fs, noise),
            rate,
            &DetectionConfig::default(),
        )
        .unwrap();
        assert!(matches!(det, Detection::NoDetection { .. }));
    }

    #[test]
    fn dechirped_echo_gives_range() {
        let (b, t, fs) = (200e6, 10e-6, 500e6);
        let tx = gen_lfm(b, t, fs).unwrap();
        let echo = monostatic_echo(&tx, 30.0, 1.0, Awgn::off()).unwrap();
        let beat = dechirp(&echo.samples[..tx.len()], &tx.samples);
        let r = beat_fft_range(
            &IqTrace::from_samples(fs, beat),
            b / t,
            &DetectionConfig::default(),
        )
        .unwrap()
        .range()
        .unwrap();
        assert!(
            (r - 30.0).abs() < range_resolution(b).unwrap() / 20.0,
            "{r}"
        );
    }

    #[test]
    fn stepped_examples() {
        let p = plan(100, 10e6);
        let same = vec![Complex64::new(0.3, 0.4); 100];
        assert_eq!(
            stepped_synthesis_range(&same, &p, 10.0, &DetectionConfig::default())
                .unwrap()
                .range(),
            Some(0.0)
        );
        assert_relative_eq!(
            range_resolution(p.synthesized_bandwidth()).unwrap(),
            0.149_896_229,
            max_relative = 1e-9
        );

        let z = stepped_returns(&p, 10e9, &[(1.7, Complex64::new(1.0, 0.0))]);
        let det = stepped_synthesis_range(&z, &p, 10.0, &DetectionConfig::default()).unwrap();
        let est = det.estimate().unwrap();
        assert!((est.range_m - 1.7).abs() < 0.149_896_229 / 100.0);
        assert!(!est.ambiguous);
        assert!(
            stepped_synthesis_range(&z, &p, 20.0, &DetectionConfig::default())
                .unwrap()
                .estimate()
                .unwrap()
                .ambiguous
        );
        assert!(
            stepped_synthesis_range(&z[..1], &plan(1, 10e6), 1.0, &DetectionConfig::default())
                .is_err()
        );
    }

    #[test]
    fn stepped_matches_brute_force_grid_search() {
        let mut rng = crate::seed::rng(&[21]);
        for _ in 0..30 {
            let steps = rng.random_range(2..=16);
            let p = plan(steps, rng.random_range(5e6..50e6));
            let window = unambiguous_range(&p);
            let truth = rng.random_range(0.05..0.95) * window;
            let z = stepped_returns(
                &p,
                rng.random_range(1e9..20e9),
                &[(
                    truth,
                    Complex64::from_polar(1.0, rng.random_range(0.0..6.0)),
                )],
            );
            let est = stepped_synthesis_range(
                &z,
                &p,
                0.0,
                &DetectionConfig {
                    threshold: 0.0,
                    refine: 1,
                },
            )
            .unwrap()
            .range()
            .unwrap();
            // oracle: maximize |Σ z_i e^{+j4π r iΔf/c}| over a fine grid, then golden-section polish
            let obj = |r: f64| -> f64 {
                z.iter()
                    .enumerate()
                    .map(|(i, v)| {
                        v * Complex64::from_polar(
                            1.0,
                            4.0 * PI * r * p.step_frequency(i) / SPEED_OF_LIGHT,
                        )
                    })
                    .sum::<Complex64>()
                    .norm()
            };
            let grid = 20000;
            let mut best = 0.0;
            let mut best_v = -1.0;
            for k in 0..grid {
                let r = window * k as f64 / grid as f64;
                let v = obj(r);
                if v > best_v {
                    best_v = v;
                    best = r;
                }
            }
            let (mut a, mut b) = (best - window / grid as f64, best + window / grid as f64);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..100 {
                let c = b - g * (b - a);
                let d = a + g * (b - a);
                if obj(c) > obj(d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            let oracle = 0.5 * (a + b);
            let res = range_resolution(p.synthesized_bandwidth()).unwrap();
            assert!(
                (est - oracle).abs() < res / 1e3,
                "steps {steps}: {est} vs {oracle} (res {res})"
            );
        }
    }

    #[test]
    fn two_target_resolvability() {
        let p = plan(100, 10e6);
        assert!(resolves_two_targets(&p, 10e9, 1.6, 0.15));
        assert!(!resolves_two_targets(&p, 10e9, 1.6, 0.10));
    }

    #[test]
    fn bound_scales_with_snr() {
        let p = plan(100, 10e6);
        let freqs: Vec<f64> = (0..100).map(|i| 10e9 + p.step_frequency(i)).collect();
        let b1 = stepped_range_bound(&freqs, &vec![1.0; 100]);
        let b4 = stepped_range_bound(&freqs, &vec![4.0; 100]);
        assert_relative_eq!(b1 / b4, 2.0, max_relative = 1e-12);
        // uniform steps: σ_f = Δf·sqrt((N²-1)/12)
        let sigma_f = 10e6 * ((100.0f64 * 100.0 - 1.0) / 12.0).sqrt();
        let want = SPEED_OF_LIGHT / (4.0 * PI * sigma_f * (2.0 * 100.0f64).sqrt());
        assert_relative_eq!(b1, want, max_relative = 1e-9);
    }
}
