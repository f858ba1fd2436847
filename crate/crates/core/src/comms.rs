//! M-FSK demodulation, BER bookkeeping and interference injection.

use std::f64::consts::PI;
use std::fs::OpenOptions;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::mean_power;
use crate::error::{Error, Result};
use crate::frontend::IqTrace;
use crate::report::fmt_f64;
use crate::waveform::{FskParams, Waveform};

/// What to do with symbols that contain retune-invalidated samples.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErasurePolicy {
    /// Leave their bits out of the BER denominator.
    #[default]
    Drop,
    /// Count every bit of an erased symbol as an error.
    CountAsError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FskDecision {
    pub symbols: Vec<usize>,
    pub bits: Vec<u8>,
    /// Per symbol: some sample in its span was flagged invalid.
    pub erased: Vec<bool>,
}

/// Non-coherent energy detection: each symbol is correlated against the M
/// tone templates and the largest magnitude wins. Timing is assumed aligned
/// to sample 0; a trailing partial symbol is ignored.
pub fn demod_fsk(rx: &IqTrace, params: &FskParams) -> Result<FskDecision> {
    params.validate()?;
    if (rx.sample_rate - params.sample_rate).abs() > 1e-9 * params.sample_rate {
        return Err(Error::Config(format!(
            "trace sampled at {} Hz, demodulator expects {} Hz",
            rx.sample_rate, params.sample_rate
        )));
    }
    let sps = params.samples_per_symbol();
    let n_sym = rx.len() / sps;
    if n_sym == 0 {
        return Err(Error::Framing(format!(
            "trace of {} samples is shorter than one symbol ({sps} samples)",
            rx.len()
        )));
    }
    // one symbol of each template; the absolute-time phase drops out of |z|
    let templates: Vec<Vec<Complex64>> = (0..params.order)
        .map(|m| {
            let w = 2.0 * PI * params.tone_offset(m) / params.sample_rate;
            (0..sps)
                .map(|k| Complex64::from_polar(1.0, -w * k as f64))
                .collect()
        })
        .collect();

    let mut symbols = Vec::with_capacity(n_sym);
    let mut erased = Vec::with_capacity(n_sym);
    let mut bits = Vec::with_capacity(n_sym * params.bits_per_symbol());
    for j in 0..n_sym {
        let span = j * sps..(j + 1) * sps;
        let chunk = &rx.samples[span.clone()];
        erased.push(rx.valid[span].iter().any(|ok| !ok));
        let (best, _) = templates
            .iter()
            .map(|t| {
                chunk
                    .iter()
                    .zip(t)
                    .map(|(r, c)| r * c)
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (m, e)| if e > acc.1 { (m, e) } else { acc },
            );
        symbols.push(best);
        params.bits_of(best, &mut bits);
    }
    Ok(FskDecision {
        symbols,
        bits,
        erased,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerReport {
    pub n_bits: usize,
    pub n_errors: usize,
    pub ber: f64,
    /// Eb/N0 of the run in dB; NaN when not recorded.
    pub snr_db: f64,
    pub isr_db: f64,
    pub seed: u64,
}

impl BerReport {
    fn from_counts(n_bits: usize, n_errors: usize) -> Result<Self> {
        if n_bits == 0 {
            return Err(Error::Domain("BER over zero bits".into()));
        }
        Ok(Self {
            n_bits,
            n_errors,
            ber: n_errors as f64 / n_bits as f64,
            snr_db: f64::NAN,
            isr_db: f64::NAN,
            seed: 0,
        })
    }

    pub fn with_context(mut self, snr_db: f64, isr_db: f64, seed: u64) -> Self {
        self.snr_db = snr_db;
        self.isr_db = isr_db;
        self.seed = seed;
        self
    }
}

/// Hamming distance over length.
pub fn measure_ber(tx_bits: &[u8], rx_bits: &[u8]) -> Result<BerReport> {
    if tx_bits.len() != rx_bits.len() {
        return Err(Error::LengthMismatch {
            left: tx_bits.len(),
            right: rx_bits.len(),
        });
    }
    let errors = tx_bits
        .iter()
        .zip(rx_bits)
        .filter(|(a, b)| (*a ^ *b) & 1 == 1)
        .count();
    BerReport::from_counts(tx_bits.len(), errors)
}

/// BER of a demodulator decision with erased symbols handled by `policy`.
/// Extra transmitted bits beyond the decoded symbols are ignored.
pub fn measure_ber_with_erasures(
    tx_bits: &[u8],
    decision: &FskDecision,
    policy: ErasurePolicy,
) -> Result<BerReport> {
    let k = if decision.symbols.is_empty() {
        return Err(Error::Framing("no symbols decoded".into()));
    } else {
        decision.bits.len() / decision.symbols.len()
    };
    if tx_bits.len() < decision.bits.len() {
        return Err(Error::LengthMismatch {
            left: tx_bits.len(),
            right: decision.bits.len(),
        });
    }
    let mut n_bits = 0;
    let mut n_errors = 0;
    for (j, erased) in decision.erased.iter().enumerate() {
        let span = j * k..(j + 1) * k;
        match (erased, policy) {
            (true, ErasurePolicy::Drop) => {}
            (true, ErasurePolicy::CountAsError) => {
                n_bits += k;
                n_errors += k;
            }
            (false, _) => {
                n_bits += k;
                n_errors += tx_bits[span.clone()]
                    .iter()
                    .zip(&decision.bits[span])
                    .filter(|(a, b)| (*a ^ *b) & 1 == 1)
                    .count();
            }
        }
    }
    BerReport::from_counts(n_bits, n_errors)
}

/// The scaled, tiled interferer that `inject_interference` adds.
pub fn scaled_interference(
    rx: &Waveform,
    interferer: &Waveform,
    isr_db: f64,
) -> Result<Vec<Complex64>> {
    if interferer.is_empty() {
        return Err(Error::Config("interferer waveform is empty".into()));
    }
    if (rx.sample_rate - interferer.sample_rate).abs() > 1e-9 * rx.sample_rate {
        return Err(Error::Config(format!(
            "interferer sampled at {} Hz, signal at {} Hz",
            interferer.sample_rate, rx.sample_rate
        )));
    }
    if isr_db.is_nan() || isr_db == f64::INFINITY {
        return Err(Error::Domain(format!(
            "ISR must be finite or -inf, got {isr_db}"
        )));
    }
    let tiled: Vec<Complex64> = interferer
        .samples
        .iter()
        .cycle()
        .take(rx.len())
        .copied()
        .collect();
    if isr_db == f64::NEG_INFINITY {
        return Ok(vec![Complex64::new(0.0, 0.0); rx.len()]);
    }
    let p_s = mean_power(&rx.samples);
    let p_i = mean_power(&tiled);
    if !(p_s > 0.0) || !(p_i > 0.0) {
        return Err(Error::UndefinedRatio);
    }
    let scale = (10f64.powf(isr_db / 10.0) * p_s / p_i).sqrt();
    Ok(tiled.into_iter().map(|z| z * scale).collect())
}

/// Adds `interferer` (tiled or truncated to the signal length) so that
/// `P_I / P_S = 10^(isr_db/10)` over the signal. `-inf` returns the input.
pub fn inject_interference(rx: &Waveform, interferer: &Waveform, isr_db: f64) -> Result<Waveform> {
    if isr_db == f64::NEG_INFINITY {
        return Ok(rx.clone());
    }
    let add = scaled_interference(rx, interferer, isr_db)?;
    let mut out = rx.clone();
    for (s, i) in out.samples.iter_mut().zip(add) {
        *s += i;
    }
    out.inst_bandwidth = rx.inst_bandwidth.max(interferer.inst_bandwidth);
    Ok(out)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact symbol-error probability of non-coherent orthogonal M-FSK in AWGN.
pub fn noncoherent_mfsk_ser(order: usize, es_n0: f64) -> f64 {
    (1..order)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * binomial(order - 1, k) / (k as f64 + 1.0)
                * (-(k as f64) / (k as f64 + 1.0) * es_n0).exp()
        })
        .sum()
}

/// Bit-error probability for orthogonal M-FSK: `P_s · M / (2(M-1))`.
pub fn noncoherent_mfsk_ber(order: usize, eb_n0_db: f64) -> f64 {
    let k = order.trailing_zeros() as f64;
    let es_n0 = k * 10f64.powf(eb_n0_db / 10.0);
    noncoherent_mfsk_ser(order, es_n0) * order as f64 / (2.0 * (order as f64 - 1.0))
}

/// Eb/N0 (dB) at which the closed-form BER equals `target`.
pub fn ebn0_for_ber(order: usize, target: f64) -> Result<f64> {
    let worst = noncoherent_mfsk_ber(order, -60.0);
    if !(target > 0.0 && target < worst) {
        return Err(Error::Domain(format!(
            "target BER {target} outside (0, {worst})"
        )));
    }
    let (mut lo, mut hi) = (-60.0, 60.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if noncoherent_mfsk_ber(order, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Per-component noise sigma giving `eb_n0_db` for tones of amplitude
/// `amplitude` (`Es = A²·Ns`, `N0 = 2σ²`).
pub fn sigma_for_ebn0(params: &FskParams, amplitude: f64, eb_n0_db: f64) -> f64 {
    let es = amplitude * amplitude * params.samples_per_symbol() as f64;
    let eb = es / params.bits_per_symbol() as f64;
    (eb / (2.0 * 10f64.powf(eb_n0_db / 10.0))).sqrt()
}

pub const BER_CSV_HEADER: [&str; 7] = [
    "trial", "seed", "snr_db", "isr_db", "n_bits", "n_errors", "ber",
];

/// Appends one row per report, writing the header when the file is new or empty.
pub fn append_ber_csv(path: &Path, rows: &[(usize, BerReport)]) -> Result<()> {
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let fresh = file.metadata()?.len() == 0;
    let mut w = csv::Writer::from_writer(file);
    if fresh {
        w.write_record(BER_CSV_HEADER)?;
    }
    for (trial, r) in rows {
        w.write_record([
            trial.to_string(),
            r.seed.to_string(),
            fmt_f64(r.snr_db),
            fmt_f64(r.isr_db),
            r.n_bits.to_string(),
            r.n_errors.to_string(),
            fmt_f64(r.ber),
        ])?;
    }
    w.flush()?;
    Ok(())
}
