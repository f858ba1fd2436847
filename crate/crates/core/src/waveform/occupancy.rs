//! Short-time spectral occupancy: 99%-power bandwidth over sliding 64-sample
//! windows, unioned over each tuning segment.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::Waveform;
use crate::dsp::fft_in_place;

pub const OCCUPANCY_WINDOW: usize = 64;
pub const OCCUPANCY_HOP: usize = 32;
pub const OCCUPANCY_POWER_FRACTION: f64 = 0.99;
const PAD: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentOccupancy {
    pub start_s: f64,
    pub centre_hz: f64,
    /// Lowest occupied baseband frequency relative to the centre, Hz.
    pub low_hz: f64,
    pub high_hz: f64,
    /// Width of the union of per-window occupied bands, Hz.
    pub occupancy_hz: f64,
    pub windows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthReport {
    pub pass: bool,
    pub limit_hz: f64,
    pub max_occupancy_hz: f64,
    pub segments: Vec<SegmentOccupancy>,
    /// Windows dropped because they straddle a retune.
    pub skipped_windows: usize,
}

impl BandwidthReport {
    pub fn violations(&self) -> impl Iterator<Item = &SegmentOccupancy> {
        self.segments
            .iter()
            .filter(move |s| s.occupancy_hz > self.limit_hz)
    }
}

fn hann() -> [f64; OCCUPANCY_WINDOW] {
    let mut w = [0.0; OCCUPANCY_WINDOW];
    for (n, v) in w.iter_mut().enumerate() {
        *v = 0.5 - 0.5 * (2.0 * PI * (n as f64 + 0.5) / OCCUPANCY_WINDOW as f64).cos();
    }
    w
}

/// Power-quantile band edges of one window, in units of padded bins relative
/// to DC. `None` for an all-zero window.
fn band_edges(
    chunk: &[Complex64],
    window: &[f64; OCCUPANCY_WINDOW],
    buf: &mut [Complex64],
) -> Option<(f64, f64)> {
    buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
    for (k, (x, w)) in chunk.iter().zip(window).enumerate() {
        buf[k] = x * w;
    }
    fft_in_place(buf);
    // reorder to ascending frequency: bins -PAD/2 .. PAD/2-1
    let power: Vec<f64> = (0..PAD)
        .map(|k| buf[(k + PAD / 2) % PAD].norm_sqr())
        .collect();
    let total: f64 = power.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let tail = 0.5 * (1.0 - OCCUPANCY_POWER_FRACTION) * total;
    // each bin spreads its power uniformly over [k - 1/2, k + 1/2]
    let quantile = |target: f64| -> f64 {
        let mut acc = 0.0;
        for (k, p) in power.iter().enumerate() {
            if acc + p >= target && *p > 0.0 {
                return k as f64 - 0.5 + (target - acc) / p - (PAD / 2) as f64;
            }
            acc += p;
        }
        (PAD / 2) as f64 - 0.5
    };
    Some((quantile(tail), quantile(total - tail)))
}

/// Checks every tuning segment's occupied band against `limit`.
///
/// Window edges are corrected for the Hann kernel's own 99% width, so a pure
/// tone occupies zero bandwidth. Occupancy below one padded bin is reported
/// as zero (not resolvable by the analysis).
pub fn check_instantaneous_bandwidth(w: &Waveform, limit: f64) -> BandwidthReport {
    let window = hann();
    let mut buf = vec![Complex64::new(0.0, 0.0); PAD];
    let dc = [Complex64::new(1.0, 0.0); OCCUPANCY_WINDOW];
    let (ref_lo, ref_hi) = band_edges(&dc, &window, &mut buf).expect("non-zero reference");
    let kernel_half = 0.5 * (ref_hi - ref_lo);
    let bin_hz = w.sample_rate / PAD as f64;

    let mut segments = Vec::new();
    let mut skipped = 0;
    for seg in w.segments() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut count = 0;
        let mut start = seg.start;
        while start + OCCUPANCY_WINDOW <= w.len() && start < seg.end {
            if start + OCCUPANCY_WINDOW > seg.end {
                skipped += 1;
                start += OCCUPANCY_HOP;
                continue;
            }
            if let Some((a, b)) = band_edges(
                &w.samples[start..start + OCCUPANCY_WINDOW],
                &window,
                &mut buf,
            ) {
                let (mut a, mut b) = (a + kernel_half, b - kernel_half);
                if b < a {
                    let mid = 0.5 * (a + b);
                    a = mid;
                    b = mid;
                }
                lo = lo.min(a);
                hi = hi.max(b);
                count += 1;
            }
            start += OCCUPANCY_HOP;
        }
        if count == 0 {
            continue;
        }
        let mut occupancy = (hi - lo) * bin_hz;
        if occupancy < bin_hz {
            occupancy = 0.0;
        }
        segments.push(SegmentOccupancy {
            start_s: w.time(seg.start),
            centre_hz: seg.centre_hz,
            low_hz: lo * bin_hz,
            high_hz: hi * bin_hz,
            occupancy_hz: occupancy,
            windows: count,
        });
    }
    let max_occupancy_hz = segments.iter().map(|s| s.occupancy_hz).fold(0.0, f64::max);
    BandwidthReport {
        pass: max_occupancy_hz <= limit,
        limit_hz: limit,
        max_occupancy_hz,
        segments,
        skipped_windows: skipped,
    }
}
