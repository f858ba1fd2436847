//! Scenario execution. Every trial draws from streams keyed by
//! `(master_seed, scenario, trial)`, so records do not depend on execution
//! order or on which other trials ran.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{CommsSection, RadarMethodChoice, RadarSection, ScenarioConfig, ScenarioKind};
use crate::atomic::{
    at_splitting, lia_gradient_at, lia_gradient_readout, model_spectrum, rabi_from_field, slope_k0,
    AtomicParams, DetuningGrid,
};
use crate::channel::{
    apply_selectivity, propagate, round_trip_delay, Awgn, PathSet, SelectivityProfile,
};
use crate::comms::{
    demod_fsk, ebn0_for_ber, inject_interference, measure_ber_with_erasures, sigma_for_ebn0,
    BerReport,
};
use crate::error::{Error, Result};
use crate::frontend::{latency_mask, measure_waveform, IqTrace, NoiseParams};
use crate::par::{try_map_indexed, ExecMode};
use crate::radar::{
    beat_fft_range, dechirp, matched_filter_range, range_resolution, stepped_range_bound,
    stepped_synthesis_range, DetectionConfig, RadarReport, RadarTrial, RangeMethod,
};
use crate::seed;
use crate::stats;
use crate::waveform::{
    check_instantaneous_bandwidth, gen_freq_hop, gen_fsk, gen_lfm, HopPlan, Waveform,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Seed of trial `trial`: `derive(master_seed, label(kind), trial)`.
pub fn trial_seed(cfg: &ScenarioConfig, trial: usize) -> u64 {
    seed::derive(&[cfg.seed, seed::label(cfg.kind.as_str()), trial as u64])
}

fn sub_seed(trial_seed: u64, what: &str) -> u64 {
    seed::derive(&[trial_seed, seed::label(what)])
}

/// Per-component noise that, after the readout's phase-shot noise, has the
/// effective per-component variance `sigma_eff²` for a signal of amplitude `amplitude`.
/// Front-end additive noise is subtracted; the remainder is thermal AWGN.
fn awgn_for_effective(
    sigma_eff: f64,
    noise: &NoiseParams,
    atomic: &AtomicParams,
    amplitude: f64,
) -> Result<f64> {
    let r = noise.sigma_psn / slope_k0(atomic);
    let total = (sigma_eff * sigma_eff - r * r * amplitude * amplitude / 2.0) / (1.0 + r * r);
    let thermal = total - noise.additive_variance();
    if !(thermal >= 0.0) {
        return Err(Error::Config(format!(
            "front-end noise alone exceeds the calibration target (effective sigma {sigma_eff:.6e})"
        )));
    }
    Ok(thermal.sqrt())
}

fn effective_sigma(
    sigma_awgn: f64,
    noise: &NoiseParams,
    atomic: &AtomicParams,
    amplitude: f64,
) -> f64 {
    let r = noise.sigma_psn / slope_k0(atomic);
    let n2 = sigma_awgn * sigma_awgn + noise.additive_variance();
    (n2 * (1.0 + r * r) + r * r * amplitude * amplitude / 2.0).sqrt()
}

/// Everything a radar trial needs that does not depend on the trial.
#[derive(Debug, Clone)]
pub struct RadarSetup {
    pub section: RadarSection,
    pub tx: Waveform,
    pub plan: Option<HopPlan>,
    pub samples_per_step: usize,
    pub valid_per_step: Vec<usize>,
    pub awgn_sigma: f64,
    /// Delay-estimation bound at `awgn_sigma` (stepped only), m.
    pub bound_m: Option<f64>,
    pub resolution_m: f64,
}

pub fn radar_setup(cfg: &ScenarioConfig) -> Result<RadarSetup> {
    let r = cfg
        .radar
        .clone()
        .ok_or_else(|| Error::Config("radar section missing".into()))?;
    let atomic = cfg.atomic.params();
    let noise = cfg.noise.params(0);
    match r.method {
        RadarMethodChoice::SteppedSynth => {
            let plan = r.plan(cfg.receiver.inst_bandwidth_limit_hz);
            let tx = gen_freq_hop(&plan, r.sample_rate_hz)?.with_carrier(r.start_frequency_hz);
            let per = tx.len() / plan.steps;
            let mask = latency_mask(&tx, cfg.receiver.retune_latency_s);
            let valid_per_step: Vec<usize> = (0..plan.steps)
                .map(|i| mask[i * per..(i + 1) * per].iter().filter(|v| **v).count())
                .collect();
            if let Some(i) = valid_per_step.iter().position(|n| *n == 0) {
                return Err(Error::Config(format!(
                    "step {i} has no valid samples: dwell {} s does not outlast retune latency {} s",
                    r.dwell_s, cfg.receiver.retune_latency_s
                )));
            }
            let freqs: Vec<f64> = (0..plan.steps)
                .map(|i| r.start_frequency_hz + plan.step_frequency(i))
                .collect();
            // per-step SNR at unit effective sigma: n_i A² / 2
            let unit_snr: Vec<f64> = valid_per_step
                .iter()
                .map(|n| *n as f64 * r.echo_gain * r.echo_gain / 2.0)
                .collect();
            let unit_bound = stepped_range_bound(&freqs, &unit_snr);
            let awgn_sigma = match (cfg.channel.awgn_sigma_v_per_m, r.target_bound_m) {
                (Some(s), _) => s,
                (None, Some(target)) => {
                    awgn_for_effective(target / unit_bound, &noise, &atomic, r.echo_gain)?
                }
                (None, None) => 0.0,
            };
            let eff = effective_sigma(awgn_sigma, &noise, &atomic, r.echo_gain);
            Ok(RadarSetup {
                resolution_m: range_resolution(plan.synthesized_bandwidth())?,
                samples_per_step: per,
                valid_per_step,
                awgn_sigma,
                bound_m: Some(unit_bound * eff),
                plan: Some(plan),
                tx,
                section: r,
            })
        }
        RadarMethodChoice::MatchedFilter | RadarMethodChoice::BeatFft => {
            let tx = gen_lfm(r.lfm_bandwidth_hz, r.lfm_duration_s, r.sample_rate_hz)?
                .with_carrier(r.start_frequency_hz);
            Ok(RadarSetup {
                resolution_m: range_resolution(r.lfm_bandwidth_hz)?,
                samples_per_step: tx.len(),
                valid_per_step: vec![tx.len()],
                awgn_sigma: cfg.channel.awgn_sigma_v_per_m.unwrap_or(0.0),
                bound_m: None,
                plan: None,
                tx,
                section: r,
            })
        }
    }
}

pub fn run_radar_trial(
    cfg: &ScenarioConfig,
    setup: &RadarSetup,
    trial: usize,
) -> Result<RadarTrial> {
    let r = &setup.section;
    let ts = trial_seed(cfg, trial);
    let mut rng = seed::rng(&[ts, seed::label("target")]);
    let truth = if r.range_max_m > r.range_min_m {
        rng.random_range(r.range_min_m..r.range_max_m)
    } else {
        r.range_min_m
    };
    let echo = propagate(
        &setup.tx,
        &PathSet::single(round_trip_delay(truth), r.echo_gain),
        Awgn::new(setup.awgn_sigma, sub_seed(ts, "awgn")),
    )?;
    let receiver = cfg.receiver.config(seed::label("radar"));
    let noise = cfg.noise.params(sub_seed(ts, "frontend"));
    let trace = measure_waveform(
        &echo,
        &receiver,
        &cfg.atomic.params(),
        &noise,
        ExecMode::Sequential,
    )?;
    let det_cfg = DetectionConfig {
        threshold: r.detection_threshold,
        refine: r.refine,
    };
    let (detection, method) = match (r.method, &setup.plan) {
        (RadarMethodChoice::SteppedSynth, Some(plan)) => {
            let per = setup.samples_per_step;
            let per_step: Vec<Complex64> = (0..plan.steps)
                .map(|i| {
                    let span = i * per..(i + 1) * per;
                    let sum: Complex64 = trace.samples[span.clone()]
                        .iter()
                        .zip(&trace.valid[span])
                        .filter(|(_, ok)| **ok)
                        .map(|(z, _)| *z)
                        .sum();
                    sum / setup.valid_per_step[i] as f64
                })
                .collect();
            (
                stepped_synthesis_range(&per_step, plan, r.max_expected_range_m, &det_cfg)?,
                RangeMethod::SteppedSynth,
            )
        }
        (RadarMethodChoice::BeatFft, _) => {
            let n = setup.tx.len();
            let beat = dechirp(&trace.samples[..n], &setup.tx.samples);
            let beat_trace = IqTrace {
                sample_rate: trace.sample_rate,
                samples: beat,
                valid: trace.valid[..n].to_vec(),
            };
            (
                beat_fft_range(&beat_trace, r.lfm_bandwidth_hz / r.lfm_duration_s, &det_cfg)?,
                RangeMethod::BeatFft,
            )
        }
        _ => (
            matched_filter_range(&trace, &setup.tx, &det_cfg)?,
            RangeMethod::MatchedFilter,
        ),
    };
    Ok(RadarTrial {
        trial,
        seed: ts,
        truth_m: truth,
        estimate_m: detection.candidate().range_m,
        detected: detection.estimate().is_some(),
        method,
    })
}

#[derive(Debug, Clone)]
pub struct CommsSetup {
    pub section: CommsSection,
    pub awgn_sigma: f64,
    /// Eb/N0 of the effective noise, dB.
    pub ebn0_db: f64,
    pub interferer: Option<Waveform>,
    pub paths: PathSet,
    pub selectivity: SelectivityProfile,
    pub timing_offset: usize,
}

pub fn comms_setup(cfg: &ScenarioConfig) -> Result<CommsSetup> {
    let c = cfg
        .comms
        .clone()
        .ok_or_else(|| Error::Config("comms section missing".into()))?;
    let fsk = c.fsk();
    let atomic = cfg.atomic.params();
    let noise = cfg.noise.params(0);
    let a = c.amplitude_v_per_m;
    let target_ebn0 = match (c.ebn0_db, c.target_awgn_ber) {
        (Some(e), _) => Some(e),
        (None, Some(b)) => Some(ebn0_for_ber(c.order, b)?),
        (None, None) => None,
    };
    let awgn_sigma = match (cfg.channel.awgn_sigma_v_per_m, target_ebn0) {
        (Some(s), _) => s,
        (None, Some(e)) => awgn_for_effective(sigma_for_ebn0(&fsk, a, e), &noise, &atomic, a)?,
        (None, None) => 0.0,
    };
    let eff = effective_sigma(awgn_sigma, &noise, &atomic, a);
    let eb = a * a * fsk.samples_per_symbol() as f64 / fsk.bits_per_symbol() as f64;
    let ebn0_db = 10.0 * (eb / (2.0 * eff * eff)).log10();
    let interferer = if c.isr_db.is_finite() {
        Some(gen_lfm(
            c.interferer_bandwidth_hz,
            c.interferer_duration_s,
            c.sample_rate_hz,
        )?)
    } else {
        None
    };
    let paths = cfg.channel.path_set();
    let first_delay = paths
        .paths
        .iter()
        .map(|p| p.delay)
        .fold(f64::INFINITY, f64::min);
    Ok(CommsSetup {
        timing_offset: (first_delay * c.sample_rate_hz).round() as usize,
        selectivity: cfg.channel.selectivity()?,
        paths,
        awgn_sigma,
        ebn0_db,
        interferer,
        section: c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommsTrial {
    pub trial: usize,
    pub report: BerReport,
}

/// Transmits the trial's bits through interference, channel and receiver and
/// returns the decoded bits' BER.
pub fn run_comms_trial(
    cfg: &ScenarioConfig,
    setup: &CommsSetup,
    trial: usize,
) -> Result<CommsTrial> {
    let c = &setup.section;
    let fsk = c.fsk();
    let ts = trial_seed(cfg, trial);
    let mut rng = seed::rng(&[ts, seed::label("bits")]);
    let bits: Vec<u8> = (0..c.symbols_per_trial * fsk.bits_per_symbol())
        .map(|_| rng.random_range(0..2u8))
        .collect();
    let mut w = gen_fsk(&bits, &fsk)?.scaled(c.amplitude_v_per_m);
    if let Some(i) = &setup.interferer {
        w = inject_interference(&w, i, c.isr_db)?;
    }
    let rx = propagate(
        &w,
        &setup.paths,
        Awgn::new(setup.awgn_sigma, sub_seed(ts, "awgn")),
    )?;
    let rx = apply_selectivity(&rx, &setup.selectivity, cfg.channel.carrier_detuning_hz);
    let receiver = cfg.receiver.config(seed::label("comms"));
    let noise = cfg.noise.params(sub_seed(ts, "frontend"));
    let trace = measure_waveform(
        &rx,
        &receiver,
        &cfg.atomic.params(),
        &noise,
        ExecMode::Sequential,
    )?;
    let n = (c.symbols_per_trial * fsk.samples_per_symbol())
        .min(trace.len().saturating_sub(setup.timing_offset));
    let span = setup.timing_offset..setup.timing_offset + n;
    let aligned = IqTrace {
        sample_rate: trace.sample_rate,
        samples: trace.samples[span.clone()].to_vec(),
        valid: trace.valid[span].to_vec(),
    };
    let decision = demod_fsk(&aligned, &fsk)?;
    let report = measure_ber_with_erasures(&bits, &decision, c.erasure)?.with_context(
        setup.ebn0_db,
        c.isr_db,
        ts,
    );
    Ok(CommsTrial { trial, report })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDemo {
    pub detuning_hz: Vec<f64>,
    pub p_out_lo: Vec<f64>,
    pub gradient_lo: Vec<f64>,
    /// Present when the RF amplitude is non-zero.
    pub p_out_rf: Option<Vec<f64>>,
    pub gradient_rf: Option<Vec<f64>>,
    pub k0: f64,
    pub peak_separation_hz: f64,
    pub peak_shift_hz: f64,
    pub dither_hz: f64,
    pub tracked_peak_lo_hz: f64,
    pub tracked_peak_rf_hz: f64,
    pub gradient_at_f0_lo: f64,
    pub gradient_at_f0_rf: f64,
}

/// LO-only and LO+RF spectra with their lock-in gradients across the grid.
pub fn emit_spectrum_demo(cfg: &ScenarioConfig) -> Result<SpectrumDemo> {
    let s = cfg
        .spectrum
        .clone()
        .ok_or_else(|| Error::Config("spectrum section missing".into()))?;
    let atomic = cfg.atomic.params();
    atomic.validate()?;
    let separation = match s.peak_separation_hz {
        Some(d) => d,
        None => at_splitting(
            rabi_from_field(cfg.receiver.lo_amplitude_v_per_m, &atomic)?,
            atomic.scan_ratio_k,
        )?,
    };
    let dither = s.dither_hz.unwrap_or(atomic.gamma / 100.0);
    let grid = DetuningGrid::around(&atomic, s.half_span_gammas, s.points);
    let projection = s.rf_amplitude_v_per_m * (s.rf_phase_rad - cfg.receiver.lo_phase_rad).cos();
    let shift = atomic.peak_shift(projection);

    let lo = model_spectrum(&atomic, separation, 0.0, &grid)?;
    let gradient_lo: Vec<f64> = lo
        .detuning_grid
        .iter()
        .map(|&f| lia_gradient_at(&lo, f, dither))
        .collect();
    let g0_lo = lia_gradient_readout(&lo, &atomic, dither)?;
    let (p_out_rf, gradient_rf, g0_rf) = if s.rf_amplitude_v_per_m > 0.0 {
        let rf = model_spectrum(&atomic, separation, shift, &grid)?;
        let g: Vec<f64> = rf
            .detuning_grid
            .iter()
            .map(|&f| lia_gradient_at(&rf, f, dither))
            .collect();
        let g0 = lia_gradient_readout(&rf, &atomic, dither)?;
        (Some(rf.p_out), Some(g), g0)
    } else {
        (None, None, g0_lo)
    };
    Ok(SpectrumDemo {
        detuning_hz: lo.detuning_grid,
        p_out_lo: lo.p_out,
        gradient_lo,
        p_out_rf,
        gradient_rf,
        k0: slope_k0(&atomic),
        peak_separation_hz: separation,
        peak_shift_hz: shift,
        dither_hz: dither,
        tracked_peak_lo_hz: atomic.f0,
        tracked_peak_rf_hz: atomic.f0 + shift,
        gradient_at_f0_lo: g0_lo,
        gradient_at_f0_rf: g0_rf,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateCase {
    pub name: String,
    pub declared_bandwidth_hz: f64,
    pub max_occupancy_hz: f64,
    pub limit_hz: f64,
    pub accepted: bool,
    /// Receiver error for rejected waveforms.
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateResult {
    pub lfm: GateCase,
    pub hop: GateCase,
    pub synthesized_bandwidth_hz: f64,
}

impl GateResult {
    /// The wide chirp is rejected while the hop plan is accepted.
    pub fn pass(&self) -> bool {
        !self.lfm.accepted && self.hop.accepted
    }
}

fn gate_case(name: &str, w: &Waveform, cfg: &ScenarioConfig) -> GateCase {
    let limit = cfg.receiver.inst_bandwidth_limit_hz;
    let occupancy = check_instantaneous_bandwidth(w, limit);
    let receiver = cfg.receiver.config(seed::label("gate"));
    let outcome = measure_waveform(
        w,
        &receiver,
        &cfg.atomic.params(),
        &NoiseParams::silent(),
        ExecMode::Parallel,
    );
    let reason = match (&outcome, occupancy.pass) {
        (Err(e), _) => Some(e.to_string()),
        (Ok(_), false) => Some(format!(
            "occupied bandwidth {:.6e} Hz above limit",
            occupancy.max_occupancy_hz
        )),
        (Ok(_), true) => None,
    };
    GateCase {
        name: name.into(),
        declared_bandwidth_hz: w.inst_bandwidth,
        max_occupancy_hz: occupancy.max_occupancy_hz,
        limit_hz: limit,
        accepted: reason.is_none(),
        reason,
    }
}

pub fn run_bandwidth_gate(cfg: &ScenarioConfig) -> Result<GateResult> {
    let g = cfg
        .gate
        .clone()
        .ok_or_else(|| Error::Config("gate section missing".into()))?;
    let lfm = gen_lfm(g.lfm_bandwidth_hz, g.lfm_duration_s, g.lfm_sample_rate_hz)?;
    let plan = HopPlan {
        steps: g.hop_steps,
        step_spacing: g.hop_step_spacing_hz,
        dwell: g.hop_dwell_s,
        step_bandwidth: g.hop_step_bandwidth_hz,
        receiver_limit: cfg.receiver.inst_bandwidth_limit_hz,
    };
    let hop = gen_freq_hop(&plan, g.hop_sample_rate_hz)?;
    Ok(GateResult {
        lfm: gate_case("lfm", &lfm, cfg),
        hop: gate_case("freq_hop", &hop, cfg),
        synthesized_bandwidth_hz: plan.synthesized_bandwidth(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarRun {
    pub report: RadarReport,
    pub awgn_sigma: f64,
    pub bound_m: Option<f64>,
    pub acceptance_rmse_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommsRun {
    pub trials: Vec<CommsTrial>,
    pub awgn_sigma: f64,
    pub ebn0_db: f64,
    pub acceptance_ber: f64,
}

impl CommsRun {
    /// Pooled errors over pooled bits.
    pub fn ber(&self) -> f64 {
        let bits: usize = self.trials.iter().map(|t| t.report.n_bits).sum();
        let errs: usize = self.trials.iter().map(|t| t.report.n_errors).sum();
        errs as f64 / bits as f64
    }

    pub fn per_trial_ber(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.report.ber).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Records {
    Radar(RadarRun),
    Comms(CommsRun),
    Spectrum(Box<SpectrumDemo>),
    Gate(GateResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub config_hash: String,
    pub kind: ScenarioKind,
    pub seed: u64,
    pub records: Records,
    pub wall_clock_s: f64,
    pub version: String,
}

impl ScenarioReport {
    /// Whether the run meets its acceptance threshold; `None` when the
    /// scenario has none.
    pub fn acceptance(&self) -> Option<bool> {
        match &self.records {
            Records::Radar(r) => Some(r.report.rmse_m <= r.acceptance_rmse_m),
            Records::Comms(c) => Some(c.ber() <= c.acceptance_ber),
            Records::Gate(g) => Some(g.pass()),
            Records::Spectrum(_) => None,
        }
    }

    /// Headline number: RMSE (m), pooled BER, or gradient change.
    pub fn metric(&self) -> f64 {
        match &self.records {
            Records::Radar(r) => r.report.rmse_m,
            Records::Comms(c) => c.ber(),
            Records::Gate(g) => g.hop.max_occupancy_hz,
            Records::Spectrum(s) => s.gradient_at_f0_rf - s.gradient_at_f0_lo,
        }
    }

    /// Combines disjoint trial sets of the same configuration.
    pub fn merge(&self, other: &ScenarioReport) -> Result<ScenarioReport> {
        if self.config_hash != other.config_hash {
            return Err(Error::HashMismatch(
                self.config_hash.clone(),
                other.config_hash.clone(),
            ));
        }
        let records = match (&self.records, &other.records) {
            (Records::Radar(a), Records::Radar(b)) => {
                let trials = merge_by_trial(&a.report.trials, &b.report.trials, |t| t.trial)?;
                Records::Radar(RadarRun {
                    report: RadarReport::from_trials(trials, a.report.resolution_m)?,
                    ..a.clone()
                })
            }
            (Records::Comms(a), Records::Comms(b)) => Records::Comms(CommsRun {
                trials: merge_by_trial(&a.trials, &b.trials, |t| t.trial)?,
                ..a.clone()
            }),
            _ => {
                return Err(Error::Config(
                    "only radar and comms trial sets can be merged".into(),
                ))
            }
        };
        Ok(ScenarioReport {
            records,
            wall_clock_s: self.wall_clock_s + other.wall_clock_s,
            ..self.clone()
        })
    }
}

fn merge_by_trial<T: Clone>(a: &[T], b: &[T], key: impl Fn(&T) -> usize) -> Result<Vec<T>> {
    let mut all: Vec<T> = a.iter().chain(b).cloned().collect();
    all.sort_by_key(|t| key(t));
    if let Some(w) = all.windows(2).find(|w| key(&w[0]) == key(&w[1])) {
        return Err(Error::Config(format!(
            "trial {} present in both reports",
            key(&w[0])
        )));
    }
    Ok(all)
}

/// Runs the listed trial indices (in any order) and assembles a report
/// keyed by trial index.
pub fn run_trials(
    cfg: &ScenarioConfig,
    trials: &[usize],
    mode: ExecMode,
) -> Result<ScenarioReport> {
    cfg.validate()?;
    let started = Instant::now();
    let records = match cfg.kind {
        ScenarioKind::RadarRanging => {
            let setup = radar_setup(cfg)?;
            let mut out = try_map_indexed(mode, trials.len(), |k| {
                run_radar_trial(cfg, &setup, trials[k]).map_err(|e| e.in_trial(trials[k]))
            })?;
            out.sort_by_key(|t| t.trial);
            Records::Radar(RadarRun {
                report: RadarReport::from_trials(out, setup.resolution_m)?,
                awgn_sigma: setup.awgn_sigma,
                bound_m: setup.bound_m,
                acceptance_rmse_m: setup.section.acceptance_rmse_m,
            })
        }
        ScenarioKind::CommsBer => {
            let setup = comms_setup(cfg)?;
            let mut out = try_map_indexed(mode, trials.len(), |k| {
                run_comms_trial(cfg, &setup, trials[k]).map_err(|e| e.in_trial(trials[k]))
            })?;
            out.sort_by_key(|t| t.trial);
            Records::Comms(CommsRun {
                trials: out,
                awgn_sigma: setup.awgn_sigma,
                ebn0_db: setup.ebn0_db,
                acceptance_ber: setup.section.acceptance_ber,
            })
        }
        ScenarioKind::SpectrumDemo => Records::Spectrum(Box::new(emit_spectrum_demo(cfg)?)),
        ScenarioKind::BandwidthGate => Records::Gate(run_bandwidth_gate(cfg)?),
    };
    Ok(ScenarioReport {
        config_hash: cfg.hash(),
        kind: cfg.kind,
        seed: cfg.seed,
        records,
        wall_clock_s: started.elapsed().as_secs_f64(),
        version: VERSION.to_string(),
    })
}

pub fn run_scenario(cfg: &ScenarioConfig, mode: ExecMode) -> Result<ScenarioReport> {
    let all: Vec<usize> = (0..cfg.trials).collect();
    run_trials(cfg, &all, mode)
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub config: ScenarioConfig,
    pub report: ScenarioReport,
}

/// One independent run per axis value. Each point gets its own master seed
/// derived from the base seed, the axis name and the point index.
pub fn sweep(
    base: &ScenarioConfig,
    axis: &str,
    values: &[f64],
    mode: ExecMode,
) -> Result<Vec<SweepPoint>> {
    base.validate()?;
    let doc: toml::Value = toml::from_str(&base.canonical()).map_err(|e: toml::de::Error| {
        Error::Config(format!("canonical config does not reparse: {e}"))
    })?;
    let resolved = super::config::get_path(&doc, axis)
        .or_else(|| axis_default(base, axis))
        .ok_or_else(|| Error::Schema {
            path: axis.into(),
            message: "sweep axis does not resolve to a config field".into(),
        })?;
    let integer = match resolved {
        toml::Value::Integer(_) => true,
        toml::Value::Float(_) => false,
        _ => {
            return Err(Error::Schema {
                path: axis.into(),
                message: "sweep axis is not numeric".into(),
            })
        }
    };
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut point = doc.clone();
            let value = if integer {
                if v.fract() != 0.0 || v < 0.0 {
                    return Err(Error::Schema {
                        path: axis.into(),
                        message: format!("integer axis cannot take {v}"),
                    });
                }
                toml::Value::Integer(v as i64)
            } else {
                toml::Value::Float(v)
            };
            super::config::set_path(&mut point, axis, value)?;
            // TOML integers are signed, so keep the derived seed within 63 bits
            let seed =
                seed::derive(&[base.seed, seed::label("sweep"), seed::label(axis), i as u64]) >> 1;
            super::config::set_path(&mut point, "seed", toml::Value::Integer(seed as i64))?;
            let mut config = ScenarioConfig::from_value(point)?;
            config.seed = seed;
            config.output_dir = base.output_dir.clone();
            let report = run_scenario(&config, mode)?;
            Ok(SweepPoint {
                value: v,
                config,
                report,
            })
        })
        .collect()
}

/// Optional fields that are absent from the canonical text still name valid axes.
fn axis_default(base: &ScenarioConfig, axis: &str) -> Option<&'static toml::Value> {
    static FLOAT: toml::Value = toml::Value::Float(0.0);
    let optional = [
        "channel.awgn_sigma_v_per_m",
        "comms.ebn0_db",
        "comms.target_awgn_ber",
        "radar.target_bound_m",
        "spectrum.peak_separation_hz",
        "spectrum.dither_hz",
    ];
    let section_present = match axis.split('.').next() {
        Some("comms") => base.comms.is_some(),
        Some("radar") => base.radar.is_some(),
        Some("spectrum") => base.spectrum.is_some(),
        _ => true,
    };
    (section_present && optional.contains(&axis)).then_some(&FLOAT)
}

/// Whether the per-trial BERs of a sweep never show a significant move
/// against `increasing` (95% bootstrap, 1000 resamples).
pub fn ber_trend_holds(points: &[SweepPoint], increasing: bool, seed: u64) -> Result<bool> {
    let mut groups: Vec<(f64, Vec<f64>)> = points
        .iter()
        .filter_map(|p| match &p.report.records {
            Records::Comms(c) => Some((p.value, c.per_trial_ber())),
            _ => None,
        })
        .collect();
    groups.sort_by(|a, b| a.0.total_cmp(&b.0));
    if !increasing {
        groups.reverse();
    }
    let series: Vec<Vec<f64>> = groups.into_iter().map(|g| g.1).collect();
    stats::non_decreasing(&series, stats::DEFAULT_RESAMPLES, 0.95, seed)
}
