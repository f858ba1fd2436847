//! Scenario files: TOML with unit-suffixed keys, unknown keys rejected.
//!
//! Environment overrides use the prefix `RYDAR_` and `__` between path
//! segments, lower-cased: `RYDAR_COMMS__ISR_DB=-24` sets `comms.isr_db`.
//! Values are parsed as TOML literals, falling back to a plain string.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::atomic::{AtomicParams, UnitMode};
use crate::channel::{Path as ChannelPath, PathSet, SelectivityProfile};
use crate::comms::ErasurePolicy;
use crate::error::{Error, Result};
use crate::frontend::{NoiseParams, ReceiverConfig};
use crate::waveform::{FskParams, HopPlan};

pub const ENV_PREFIX: &str = "RYDAR_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    RadarRanging,
    CommsBer,
    SpectrumDemo,
    BandwidthGate,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::RadarRanging => "radar_ranging",
            ScenarioKind::CommsBer => "comms_ber",
            ScenarioKind::SpectrumDemo => "spectrum_demo",
            ScenarioKind::BandwidthGate => "bandwidth_gate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub trials: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub atomic: AtomicSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub receiver: ReceiverSection,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radar: Option<RadarSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comms: Option<CommsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AtomicSection {
    pub omega_p_rad_s: f64,
    pub omega_c_rad_s: f64,
    /// Ignored (treated as 1) in normalized units.
    pub mu_c_m: f64,
    pub units: UnitMode,
    pub scan_ratio_k: f64,
    pub f0_hz: f64,
    pub gamma_hz: f64,
    pub linear_fraction: f64,
}

impl Default for AtomicSection {
    fn default() -> Self {
        let p = AtomicParams::default();
        Self {
            omega_p_rad_s: p.omega_p,
            omega_c_rad_s: p.omega_c,
            mu_c_m: p.mu,
            units: p.units,
            scan_ratio_k: p.scan_ratio_k,
            f0_hz: p.f0,
            gamma_hz: p.gamma,
            linear_fraction: p.linear_fraction,
        }
    }
}

impl AtomicSection {
    pub fn params(&self) -> AtomicParams {
        AtomicParams {
            omega_p: self.omega_p_rad_s,
            omega_c: self.omega_c_rad_s,
            mu: match self.units {
                UnitMode::Si => self.mu_c_m,
                UnitMode::Normalized => 1.0,
            },
            units: self.units,
            scan_ratio_k: self.scan_ratio_k,
            f0: self.f0_hz,
            gamma: self.gamma_hz,
            linear_fraction: self.linear_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    /// Same units as k0, i.e. s²/rad².
    pub sigma_psn_s2_per_rad2: f64,
    pub sigma_bgn_v_per_m: f64,
    pub sigma_qpn_v_per_m: f64,
}

impl NoiseSection {
    pub fn params(&self, seed: u64) -> NoiseParams {
        NoiseParams {
            sigma_psn: self.sigma_psn_s2_per_rad2,
            sigma_bgn: self.sigma_bgn_v_per_m,
            sigma_qpn: self.sigma_qpn_v_per_m,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReceiverSection {
    pub lo_amplitude_v_per_m: f64,
    pub lo_phase_rad: f64,
    pub inst_bandwidth_limit_hz: f64,
    pub retune_latency_s: f64,
}

impl Default for ReceiverSection {
    fn default() -> Self {
        let r = ReceiverConfig::default();
        Self {
            lo_amplitude_v_per_m: r.lo_amplitude,
            lo_phase_rad: r.lo_phase,
            inst_bandwidth_limit_hz: r.inst_bandwidth_limit,
            retune_latency_s: r.retune_latency,
        }
    }
}

impl ReceiverSection {
    pub fn config(&self, stream: u64) -> ReceiverConfig {
        ReceiverConfig {
            lo_amplitude: self.lo_amplitude_v_per_m,
            lo_phase: self.lo_phase_rad,
            inst_bandwidth_limit: self.inst_bandwidth_limit_hz,
            retune_latency: self.retune_latency_s,
            stream,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelSection {
    /// Per-component AWGN at the receiver input. When absent, radar and comms
    /// scenarios calibrate it from their targets.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub awgn_sigma_v_per_m: Option<f64>,
    /// Extra propagation paths (comms only; radar builds its own echo).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<ChannelPath>,
    /// `[detuning_hz, gain]` knots of the vapor-cell selectivity.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub selectivity_hz_gain: Vec<[f64; 2]>,
    pub carrier_detuning_hz: f64,
}

impl ChannelSection {
    pub fn path_set(&self) -> PathSet {
        if self.paths.is_empty() {
            PathSet::single(0.0, 1.0)
        } else {
            PathSet {
                paths: self.paths.clone(),
            }
        }
    }

    pub fn selectivity(&self) -> Result<SelectivityProfile> {
        if self.selectivity_hz_gain.is_empty() {
            Ok(SelectivityProfile::flat())
        } else {
            SelectivityProfile::new(
                self.selectivity_hz_gain
                    .iter()
                    .map(|k| (k[0], k[1]))
                    .collect(),
            )
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadarMethodChoice {
    SteppedSynth,
    MatchedFilter,
    BeatFft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadarSection {
    pub method: RadarMethodChoice,
    pub start_frequency_hz: f64,
    pub steps: usize,
    pub step_spacing_hz: f64,
    pub dwell_s: f64,
    pub step_bandwidth_hz: f64,
    pub sample_rate_hz: f64,
    /// LFM parameters for the matched-filter and beat-FFT methods.
    pub lfm_bandwidth_hz: f64,
    pub lfm_duration_s: f64,
    pub range_min_m: f64,
    pub range_max_m: f64,
    pub echo_gain: f64,
    /// Calibrate the AWGN so the delay-estimation bound equals this (stepped only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_bound_m: Option<f64>,
    pub max_expected_range_m: f64,
    pub detection_threshold: f64,
    pub refine: usize,
    pub acceptance_rmse_m: f64,
}

impl Default for RadarSection {
    fn default() -> Self {
        Self {
            method: RadarMethodChoice::SteppedSynth,
            start_frequency_hz: 10e9,
            steps: 100,
            step_spacing_hz: 10e6,
            dwell_s: 1.1e-3,
            step_bandwidth_hz: 100e3,
            sample_rate_hz: 250e3,
            lfm_bandwidth_hz: 4e6,
            lfm_duration_s: 100e-6,
            range_min_m: 1.6,
            range_max_m: 1.9,
            echo_gain: 1.0,
            target_bound_m: None,
            max_expected_range_m: 5.0,
            detection_threshold: 8.0,
            refine: 8,
            acceptance_rmse_m: 0.0208,
        }
    }
}

impl RadarSection {
    pub fn plan(&self, receiver_limit: f64) -> HopPlan {
        HopPlan {
            steps: self.steps,
            step_spacing: self.step_spacing_hz,
            dwell: self.dwell_s,
            step_bandwidth: self.step_bandwidth_hz,
            receiver_limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CommsSection {
    pub order: usize,
    pub symbol_rate_hz: f64,
    pub tone_spacing_hz: f64,
    pub sample_rate_hz: f64,
    pub allow_non_orthogonal: bool,
    pub symbols_per_trial: usize,
    pub amplitude_v_per_m: f64,
    /// Eb/N0 of the thermal channel; alternatives are `target_awgn_ber` or an
    /// explicit `channel.awgn_sigma_v_per_m`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ebn0_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_awgn_ber: Option<f64>,
    /// Interference-to-signal ratio; `-inf` disables the interferer.
    pub isr_db: f64,
    pub interferer_bandwidth_hz: f64,
    pub interferer_duration_s: f64,
    pub erasure: ErasurePolicy,
    pub acceptance_ber: f64,
}

impl Default for CommsSection {
    fn default() -> Self {
        Self {
            order: 4,
            symbol_rate_hz: 80e3,
            tone_spacing_hz: 80e3,
            sample_rate_hz: 1.28e6,
            allow_non_orthogonal: false,
            symbols_per_trial: 5000,
            amplitude_v_per_m: 1.0,
            ebn0_db: None,
            target_awgn_ber: None,
            isr_db: f64::NEG_INFINITY,
            interferer_bandwidth_hz: 500e3,
            interferer_duration_s: 1e-3,
            erasure: ErasurePolicy::Drop,
            acceptance_ber: 0.0397,
        }
    }
}

impl CommsSection {
    pub fn fsk(&self) -> FskParams {
        FskParams {
            order: self.order,
            symbol_rate: self.symbol_rate_hz,
            tone_spacing: self.tone_spacing_hz,
            sample_rate: self.sample_rate_hz,
            allow_non_orthogonal: self.allow_non_orthogonal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub rf_amplitude_v_per_m: f64,
    pub rf_phase_rad: f64,
    /// Defaults to the AT splitting produced by the LO field.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_separation_hz: Option<f64>,
    pub half_span_gammas: f64,
    pub points: usize,
    /// Defaults to gamma/100.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dither_hz: Option<f64>,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            rf_amplitude_v_per_m: 0.0,
            rf_phase_rad: 0.0,
            peak_separation_hz: None,
            half_span_gammas: 4.0,
            points: 2001,
            dither_hz: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateSection {
    pub lfm_bandwidth_hz: f64,
    pub lfm_duration_s: f64,
    pub lfm_sample_rate_hz: f64,
    pub hop_steps: usize,
    pub hop_step_spacing_hz: f64,
    pub hop_dwell_s: f64,
    pub hop_step_bandwidth_hz: f64,
    pub hop_sample_rate_hz: f64,
}

impl Default for GateSection {
    fn default() -> Self {
        Self {
            lfm_bandwidth_hz: 50e6,
            lfm_duration_s: 20e-6,
            lfm_sample_rate_hz: 125e6,
            hop_steps: 200,
            hop_step_spacing_hz: 5e6,
            hop_dwell_s: 100e-6,
            hop_step_bandwidth_hz: 1e6,
            hop_sample_rate_hz: 2.5e6,
        }
    }
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(schema(
            path,
            format!("must be a finite positive number, got {v}"),
        ))
    }
}

fn non_negative(path: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(schema(path, format!("must be finite and >= 0, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn from_value(value: toml::Value) -> Result<Self> {
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            schema(&path, e.into_inner().message().trim().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_value(parse_document(text)?)
    }

    /// Reads a scenario file and applies `RYDAR_*` overrides from `env`.
    pub fn load(path: &Path, env: impl IntoIterator<Item = (String, String)>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut doc = parse_document(&text)?;
        apply_env_overrides(&mut doc, env)?;
        Self::from_value(doc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(schema("trials", "must be >= 1"));
        }
        if self.seed > i64::MAX as u64 {
            return Err(schema("seed", "must fit in a TOML integer (< 2^63)"));
        }
        let a = &self.atomic;
        positive("atomic.omega_p_rad_s", a.omega_p_rad_s)?;
        non_negative("atomic.omega_c_rad_s", a.omega_c_rad_s)?;
        positive("atomic.mu_c_m", a.mu_c_m)?;
        positive("atomic.scan_ratio_k", a.scan_ratio_k)?;
        positive("atomic.gamma_hz", a.gamma_hz)?;
        positive("atomic.linear_fraction", a.linear_fraction)?;
        if !a.f0_hz.is_finite() {
            return Err(schema("atomic.f0_hz", "must be finite"));
        }
        non_negative(
            "noise.sigma_psn_s2_per_rad2",
            self.noise.sigma_psn_s2_per_rad2,
        )?;
        non_negative("noise.sigma_bgn_v_per_m", self.noise.sigma_bgn_v_per_m)?;
        non_negative("noise.sigma_qpn_v_per_m", self.noise.sigma_qpn_v_per_m)?;
        positive(
            "receiver.lo_amplitude_v_per_m",
            self.receiver.lo_amplitude_v_per_m,
        )?;
        positive(
            "receiver.inst_bandwidth_limit_hz",
            self.receiver.inst_bandwidth_limit_hz,
        )?;
        non_negative("receiver.retune_latency_s", self.receiver.retune_latency_s)?;
        if let Some(s) = self.channel.awgn_sigma_v_per_m {
            non_negative("channel.awgn_sigma_v_per_m", s)?;
        }
        self.channel
            .path_set()
            .validate()
            .map_err(|e| schema("channel.paths", e.to_string()))?;
        self.channel
            .selectivity()
            .map_err(|e| schema("channel.selectivity_hz_gain", e.to_string()))?;

        match self.kind {
            ScenarioKind::RadarRanging => {
                let r = self
                    .radar
                    .as_ref()
                    .ok_or_else(|| schema("radar", "required for radar_ranging"))?;
                self.validate_radar(r)?;
            }
            ScenarioKind::CommsBer => {
                let c = self
                    .comms
                    .as_ref()
                    .ok_or_else(|| schema("comms", "required for comms_ber"))?;
                self.validate_comms(c)?;
            }
            ScenarioKind::SpectrumDemo => {
                let s = self
                    .spectrum
                    .as_ref()
                    .ok_or_else(|| schema("spectrum", "required for spectrum_demo"))?;
                non_negative("spectrum.rf_amplitude_v_per_m", s.rf_amplitude_v_per_m)?;
                positive("spectrum.half_span_gammas", s.half_span_gammas)?;
                if s.points < 3 {
                    return Err(schema("spectrum.points", "must be >= 3"));
                }
                if let Some(d) = s.dither_hz {
                    positive("spectrum.dither_hz", d)?;
                }
                if let Some(d) = s.peak_separation_hz {
                    non_negative("spectrum.peak_separation_hz", d)?;
                }
            }
            ScenarioKind::BandwidthGate => {
                let g = self
                    .gate
                    .as_ref()
                    .ok_or_else(|| schema("gate", "required for bandwidth_gate"))?;
                positive("gate.lfm_bandwidth_hz", g.lfm_bandwidth_hz)?;
                positive("gate.lfm_duration_s", g.lfm_duration_s)?;
                positive("gate.lfm_sample_rate_hz", g.lfm_sample_rate_hz)?;
                positive("gate.hop_step_spacing_hz", g.hop_step_spacing_hz)?;
                positive("gate.hop_dwell_s", g.hop_dwell_s)?;
                non_negative("gate.hop_step_bandwidth_hz", g.hop_step_bandwidth_hz)?;
                positive("gate.hop_sample_rate_hz", g.hop_sample_rate_hz)?;
                if g.hop_steps == 0 {
                    return Err(schema("gate.hop_steps", "must be >= 1"));
                }
            }
        }
        Ok(())
    }

    fn validate_radar(&self, r: &RadarSection) -> Result<()> {
        positive("radar.start_frequency_hz", r.start_frequency_hz)?;
        positive("radar.sample_rate_hz", r.sample_rate_hz)?;
        non_negative("radar.range_min_m", r.range_min_m)?;
        if !(r.range_max_m >= r.range_min_m) || !r.range_max_m.is_finite() {
            return Err(schema(
                "radar.range_max_m",
                "must be finite and >= range_min_m",
            ));
        }
        positive("radar.echo_gain", r.echo_gain)?;
        non_negative("radar.max_expected_range_m", r.max_expected_range_m)?;
        non_negative("radar.detection_threshold", r.detection_threshold)?;
        positive("radar.acceptance_rmse_m", r.acceptance_rmse_m)?;
        match r.method {
            RadarMethodChoice::SteppedSynth => {
                if r.steps < 2 {
                    return Err(schema("radar.steps", "stepped synthesis needs >= 2 steps"));
                }
                positive("radar.step_spacing_hz", r.step_spacing_hz)?;
                positive("radar.dwell_s", r.dwell_s)?;
                non_negative("radar.step_bandwidth_hz", r.step_bandwidth_hz)?;
            }
            RadarMethodChoice::MatchedFilter | RadarMethodChoice::BeatFft => {
                positive("radar.lfm_bandwidth_hz", r.lfm_bandwidth_hz)?;
                positive("radar.lfm_duration_s", r.lfm_duration_s)?;
                if r.target_bound_m.is_some() {
                    return Err(schema(
                        "radar.target_bound_m",
                        "calibration is only defined for stepped_synth",
                    ));
                }
            }
        }
        match (self.channel.awgn_sigma_v_per_m, r.target_bound_m) {
            (Some(_), Some(_)) => Err(schema(
                "radar.target_bound_m",
                "give either channel.awgn_sigma_v_per_m or radar.target_bound_m, not both",
            )),
            (None, Some(b)) => positive("radar.target_bound_m", b),
            _ => Ok(()),
        }
    }

    fn validate_comms(&self, c: &CommsSection) -> Result<()> {
        c.fsk()
            .validate()
            .map_err(|e| schema("comms", e.to_string()))?;
        if c.symbols_per_trial == 0 {
            return Err(schema("comms.symbols_per_trial", "must be >= 1"));
        }
        positive("comms.amplitude_v_per_m", c.amplitude_v_per_m)?;
        if c.isr_db.is_nan() || c.isr_db == f64::INFINITY {
            return Err(schema("comms.isr_db", "must be finite or -inf"));
        }
        if c.isr_db.is_finite() {
            positive("comms.interferer_bandwidth_hz", c.interferer_bandwidth_hz)?;
            positive("comms.interferer_duration_s", c.interferer_duration_s)?;
        }
        positive("comms.acceptance_ber", c.acceptance_ber)?;
        let given = [
            self.channel.awgn_sigma_v_per_m.is_some(),
            c.ebn0_db.is_some(),
            c.target_awgn_ber.is_some(),
        ];
        if given.iter().filter(|g| **g).count() > 1 {
            return Err(schema(
                "comms.ebn0_db",
                "set at most one of channel.awgn_sigma_v_per_m, comms.ebn0_db, comms.target_awgn_ber",
            ));
        }
        if let Some(b) = c.target_awgn_ber {
            if !(b > 0.0 && b < 0.5) {
                return Err(schema(
                    "comms.target_awgn_ber",
                    format!("must be in (0, 0.5), got {b}"),
                ));
            }
        }
        if let Some(e) = c.ebn0_db {
            if !e.is_finite() {
                return Err(schema("comms.ebn0_db", "must be finite"));
            }
        }
        Ok(())
    }

    /// Canonical TOML text of the numeric configuration (output location excluded).
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        toml::to_string(&c).expect("scenario config is always serializable")
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

pub fn parse_document(text: &str) -> Result<toml::Value> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| schema("<document>", e.message().to_string()))?;
    Ok(toml::Value::Table(table))
}

fn parse_literal(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Sets a dotted `path` in `doc`, creating intermediate tables.
pub fn set_path(doc: &mut toml::Value, path: &str, value: toml::Value) -> Result<()> {
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(schema(path, "empty path segment"));
    }
    let mut node = doc;
    for (i, part) in parts.iter().enumerate() {
        let table = node
            .as_table_mut()
            .ok_or_else(|| schema(&parts[..i].join("."), "not a table"))?;
        if i + 1 == parts.len() {
            table.insert((*part).to_string(), value);
            return Ok(());
        }
        node = table
            .entry((*part).to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    unreachable!("loop returns on the last segment")
}

/// Looks up a dotted path.
pub fn get_path<'a>(doc: &'a toml::Value, path: &str) -> Option<&'a toml::Value> {
    path.split('.')
        .try_fold(doc, |node, part| node.as_table()?.get(part))
}

/// Applies `RYDAR_A__B=value` pairs as `a.b = value`. Other variables are ignored.
pub fn apply_env_overrides(
    doc: &mut toml::Value,
    env: impl IntoIterator<Item = (String, String)>,
) -> Result<()> {
    let mut pairs: Vec<(String, String)> = env
        .into_iter()
        .filter_map(|(k, v)| {
            k.strip_prefix(ENV_PREFIX)
                .map(|rest| (rest.to_ascii_lowercase().replace("__", "."), v))
        })
        .collect();
    pairs.sort();
    for (path, raw) in pairs {
        set_path(doc, &path, parse_literal(&raw))?;
    }
    Ok(())
}
