//! Shared signal-processing primitives: FFT wrappers, fractional delay,
//! cross-correlation and peak refinement.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Half-length of the windowed-sinc fractional delay kernel (64 taps total).
pub const SINC_HALF_TAPS: usize = 32;
const KAISER_BETA: f64 = 9.0;

pub fn fft_in_place(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

/// Unnormalized inverse FFT.
pub fn ifft_in_place(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(buf.len()).process(buf);
}

pub fn mean_power(x: &[Complex64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|z| z.norm_sqr()).sum::<f64>() / x.len() as f64
}

pub fn energy(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Vertex offset of the parabola through three equally spaced samples,
/// relative to the middle sample. Clamped to [-0.5, 0.5].
pub fn parabolic_offset(left: f64, centre: f64, right: f64) -> f64 {
    let denom = left - 2.0 * centre + right;
    if denom.abs() < f64::MIN_POSITIVE || !denom.is_finite() {
        return 0.0;
    }
    (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
}

fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-12 {
        1.0
    } else {
        let a = std::f64::consts::PI * t;
        a.sin() / a
    }
}

/// Kaiser-windowed sinc evaluated at `t` samples from the kernel centre.
pub fn windowed_sinc(t: f64) -> f64 {
    let half = SINC_HALF_TAPS as f64;
    if t.abs() >= half {
        return 0.0;
    }
    let r = t / half;
    sinc(t) * bessel_i0(KAISER_BETA * (1.0 - r * r).sqrt()) / bessel_i0(KAISER_BETA)
}

/// Delays `x` by `delay` samples (non-negative, possibly fractional) into an
/// output of `out_len` samples. Integer delays are exact shifts.
pub fn fractional_delay(x: &[Complex64], delay: f64, out_len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    let rounded = delay.round();
    if (delay - rounded).abs() < 1e-9 {
        let shift = rounded as usize;
        for (n, slot) in out.iter_mut().enumerate().skip(shift) {
            if let Some(v) = x.get(n - shift) {
                *slot = *v;
            }
        }
        return out;
    }
    // out[n] = Σ_k x[n - whole - k] · h(k - frac), one kernel for every n
    let whole = delay.floor();
    let frac = delay - whole;
    let whole = whole as isize;
    let taps = SINC_HALF_TAPS as isize;
    let kernel: Vec<(isize, f64)> = (1 - taps..=taps)
        .map(|k| (k, windowed_sinc(k as f64 - frac)))
        .collect();
    for (n, slot) in out.iter_mut().enumerate() {
        let base = n as isize - whole;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(k, w) in &kernel {
            let m = base - k;
            if m >= 0 && (m as usize) < x.len() {
                acc += x[m as usize] * w;
            }
        }
        *slot = acc;
    }
    out
}

/// Cross-correlation `c[l] = Σ_n rx[n + l]·conj(reference[n])` for
/// `l = 0..=rx.len() - reference.len()`, via FFT.
pub fn cross_correlate(rx: &[Complex64], reference: &[Complex64]) -> Vec<Complex64> {
    assert!(rx.len() >= reference.len() && !reference.is_empty());
    let n = (rx.len() + reference.len()).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); n];
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    a[..rx.len()].copy_from_slice(rx);
    b[..reference.len()].copy_from_slice(reference);
    fft_in_place(&mut a);
    fft_in_place(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y.conj();
    }
    ifft_in_place(&mut a);
    let scale = 1.0 / n as f64;
    a.truncate(rx.len() - reference.len() + 1);
    a.iter_mut().for_each(|z| *z *= scale);
    a
}

/// Band-limited upsampling by zero-padding the spectrum.
pub fn upsample(x: &[Complex64], factor: usize) -> Vec<Complex64> {
    if factor <= 1 || x.len() < 2 {
        return x.to_vec();
    }
    let n = x.len();
    let mut spec = x.to_vec();
    fft_in_place(&mut spec);
    let m = n * factor;
    let mut padded = vec![Complex64::new(0.0, 0.0); m];
    let pos = n.div_ceil(2);
    padded[..pos].copy_from_slice(&spec[..pos]);
    let neg = n - pos;
    padded[m - neg..].copy_from_slice(&spec[pos..]);
    if n.is_multiple_of(2) {
        // split the Nyquist bin between both halves
        let nyq = spec[n / 2] * 0.5;
        padded[n / 2] = nyq;
        padded[m - n / 2] = nyq;
    }
    ifft_in_place(&mut padded);
    let scale = 1.0 / n as f64;
    padded.iter_mut().for_each(|z| *z *= scale);
    padded
}
