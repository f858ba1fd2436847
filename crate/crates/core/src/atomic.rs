//! EIT-AT readout model: Rabi frequency, Autler-Townes splitting, the
//! curvature slope `k0` and a dual-Lorentzian transmission profile pinned to it,
//! plus a lock-in (dither + first-harmonic) gradient readout.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Samples per dither period used by the lock-in simulation.
pub const LIA_SAMPLES_PER_PERIOD: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UnitMode {
    Si,
    /// μ = ħ = 1.
    #[default]
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomicParams {
    /// Probe Rabi frequency, rad/s.
    pub omega_p: f64,
    /// Coupling Rabi frequency, rad/s.
    pub omega_c: f64,
    /// Transition dipole moment, C·m (1.0 in normalized mode).
    pub mu: f64,
    pub units: UnitMode,
    /// ω_p/ω_c for coupling-laser scanning, 1 for probe-laser scanning.
    pub scan_ratio_k: f64,
    /// Detuning of the LO-only tracked peak, Hz.
    pub f0: f64,
    /// FWHM of each AT peak, Hz.
    pub gamma: f64,
    /// Linear-region guard as a fraction of `gamma`.
    pub linear_fraction: f64,
}

impl Default for AtomicParams {
    fn default() -> Self {
        Self {
            omega_p: 1.0,
            omega_c: 1.0,
            mu: 1.0,
            units: UnitMode::Normalized,
            scan_ratio_k: 1.0,
            f0: 0.0,
            gamma: 1.0e6,
            linear_fraction: 0.01,
        }
    }
}

impl AtomicParams {
    /// Normalized-unit parameters with the default linewidth.
    pub fn normalized(omega_p: f64, omega_c: f64) -> Self {
        Self {
            omega_p,
            omega_c,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.omega_p > 0.0
            && self.omega_c >= 0.0
            && self.gamma > 0.0
            && self.scan_ratio_k > 0.0
            && self.mu > 0.0
            && self.linear_fraction > 0.0
            && self.f0.is_finite()
            && self.omega_p.is_finite()
            && self.omega_c.is_finite()
            && self.gamma.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "invalid atomic parameters: {self:?}"
            )))
        }
    }

    pub fn hbar(&self) -> f64 {
        match self.units {
            UnitMode::Si => HBAR_SI,
            UnitMode::Normalized => 1.0,
        }
    }

    pub fn mu_over_hbar(&self) -> f64 {
        self.mu / self.hbar()
    }

    /// Half-width of the region around `f0` where the readout is treated as linear.
    pub fn linear_region(&self) -> f64 {
        self.linear_fraction * self.gamma
    }

    /// Peak displacement `(1/2π)(μ/ħ)·field` produced by a field projection.
    pub fn peak_shift(&self, field: f64) -> f64 {
        field * self.mu_over_hbar() / (2.0 * PI)
    }

    pub fn check_linear(&self, shift: f64) -> Result<()> {
        let limit = self.linear_region();
        if shift.abs() > limit || !shift.is_finite() {
            return Err(Error::Saturation {
                shift_hz: shift,
                limit_hz: limit,
            });
        }
        Ok(())
    }
}

/// Ω = μE/ħ.
pub fn rabi_from_field(field: f64, params: &AtomicParams) -> Result<f64> {
    if !(field >= 0.0) {
        return Err(Error::Domain(format!(
            "field amplitude must be >= 0, got {field}"
        )));
    }
    Ok(params.mu_over_hbar() * field)
}

/// Δf = kΩ/2π.
pub fn at_splitting(omega: f64, scan_ratio_k: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!(
            "Rabi frequency must be >= 0, got {omega}"
        )));
    }
    Ok(scan_ratio_k * omega / (2.0 * PI))
}

/// k0 = Ωp²/(2Ωp² + Ωc²)².
pub fn slope_k0(params: &AtomicParams) -> f64 {
    let p2 = params.omega_p * params.omega_p;
    let d = 2.0 * p2 + params.omega_c * params.omega_c;
    p2 / (d * d)
}

/// Sum of two equal Lorentzian peaks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualLorentzian {
    pub tracked_centre: f64,
    pub other_centre: f64,
    pub hwhm: f64,
    pub amplitude: f64,
}

impl DualLorentzian {
    fn unit(&self, x: f64) -> (f64, f64, f64, f64) {
        // L(u) = 1/(1+u²) and its first three derivatives in x
        let g = self.hwhm;
        let u = x / g;
        let q = 1.0 + u * u;
        let l0 = 1.0 / q;
        let l1 = -2.0 * u / (q * q) / g;
        let l2 = 2.0 * (3.0 * u * u - 1.0) / (q * q * q) / (g * g);
        let l3 = 24.0 * u * (1.0 - u * u) / (q * q * q * q) / (g * g * g);
        (l0, l1, l2, l3)
    }

    fn combine(&self, f: f64, pick: impl Fn((f64, f64, f64, f64)) -> f64) -> f64 {
        self.amplitude
            * (pick(self.unit(f - self.tracked_centre)) + pick(self.unit(f - self.other_centre)))
    }

    pub fn value(&self, f: f64) -> f64 {
        self.combine(f, |d| d.0)
    }

    pub fn first_derivative(&self, f: f64) -> f64 {
        self.combine(f, |d| d.1)
    }

    pub fn second_derivative(&self, f: f64) -> f64 {
        self.combine(f, |d| d.2)
    }

    pub fn third_derivative(&self, f: f64) -> f64 {
        self.combine(f, |d| d.3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl DetuningGrid {
    /// Grid of `points` samples spanning `f0 ± half_span_gammas·gamma`.
    pub fn around(params: &AtomicParams, half_span_gammas: f64, points: usize) -> Self {
        Self {
            start: params.f0 - half_span_gammas * params.gamma,
            stop: params.f0 + half_span_gammas * params.gamma,
            points,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        if n == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (n - 1) as f64;
        (0..n).map(|i| self.start + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumProfile {
    pub detuning_grid: Vec<f64>,
    pub p_out: Vec<f64>,
    /// Separation between the two AT peaks, Hz.
    pub peak_separation: f64,
    pub tracked_peak: f64,
    pub lineshape: DualLorentzian,
}

impl SpectrumProfile {
    pub fn eval(&self, f: f64) -> f64 {
        self.lineshape.value(f)
    }

    pub fn local_maxima(&self) -> usize {
        self.p_out
            .windows(3)
            .filter(|w| w[1] > w[0] && w[1] >= w[2])
            .count()
    }
}

/// Dual-Lorentzian transmission profile. The tracked peak sits at
/// `f0 + peak_shift` and the second peak `peak_separation` below it. The
/// amplitude is fixed so that the unshifted profile has curvature exactly
/// `-k0` at `f0`; shifting translates the profile rigidly.
pub fn model_spectrum(
    params: &AtomicParams,
    peak_separation: f64,
    peak_shift: f64,
    grid: &DetuningGrid,
) -> Result<SpectrumProfile> {
    params.validate()?;
    if !(peak_separation >= 0.0) {
        return Err(Error::Domain(format!(
            "peak separation must be >= 0, got {peak_separation}"
        )));
    }
    if grid.points < 3 || !(grid.stop > grid.start) {
        return Err(Error::Domain(
            "detuning grid must be increasing with >= 3 points".into(),
        ));
    }
    params.check_linear(peak_shift)?;

    let hwhm = 0.5 * params.gamma;
    let base = DualLorentzian {
        tracked_centre: params.f0,
        other_centre: params.f0 - peak_separation,
        hwhm,
        amplitude: 1.0,
    };
    let amplitude = -slope_k0(params) / base.second_derivative(params.f0);
    let lineshape = DualLorentzian {
        tracked_centre: params.f0 + peak_shift,
        other_centre: params.f0 + peak_shift - peak_separation,
        hwhm,
        amplitude,
    };
    let detuning_grid = grid.values();
    let p_out = detuning_grid.iter().map(|&f| lineshape.value(f)).collect();
    Ok(SpectrumProfile {
        detuning_grid,
        p_out,
        peak_separation,
        tracked_peak: params.f0 + peak_shift,
        lineshape,
    })
}

/// Lock-in estimate of dP/df at `centre`: sinusoidal dither of amplitude
/// `dither`, first-harmonic synchronous detection over one period.
pub fn lia_gradient_at(profile: &SpectrumProfile, centre: f64, dither: f64) -> f64 {
    let n = LIA_SAMPLES_PER_PERIOD;
    let acc: f64 = (0..n)
        .map(|i| {
            let phase = 2.0 * PI * i as f64 / n as f64;
            let s = phase.sin();
            profile.eval(centre + dither * s) * s
        })
        .sum();
    2.0 * acc / n as f64 / dither
}

pub fn lia_gradient_readout(
    profile: &SpectrumProfile,
    params: &AtomicParams,
    dither_amplitude: f64,
) -> Result<f64> {
    let limit = params.gamma / 10.0;
    if !(dither_amplitude > 0.0 && dither_amplitude <= limit) {
        return Err(Error::Precision {
            dither_hz: dither_amplitude,
            limit_hz: limit,
        });
    }
    Ok(lia_gradient_at(profile, params.f0, dither_amplitude))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit_params(op: f64, oc: f64, gamma: f64) -> AtomicParams {
        AtomicParams {
            gamma,
            ..AtomicParams::normalized(op, oc)
        }
    }

    #[test]
    fn rabi_is_linear_and_rejects_negative_field() {
        let p = AtomicParams::default();
        assert_eq!(rabi_from_field(0.0, &p).unwrap(), 0.0);
        assert_eq!(rabi_from_field(3.5, &p).unwrap(), 3.5);
        assert_eq!(
            rabi_from_field(7.0, &p).unwrap(),
            2.0 * rabi_from_field(3.5, &p).unwrap()
        );
        assert!(matches!(rabi_from_field(-1.0, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn si_mode_uses_physical_hbar() {
        let p = AtomicParams {
            units: UnitMode::Si,
            mu: 2.0e-29,
            ..AtomicParams::default()
        };
        assert_relative_eq!(
            rabi_from_field(1.0, &p).unwrap(),
            2.0e-29 / HBAR_SI,
            max_relative = 1e-15
        );
    }

    #[test]
    fn splitting_examples() {
        assert_relative_eq!(
            at_splitting(2.0 * PI * 1e7, 1.0).unwrap(),
            1e7,
            max_relative = 1e-15
        );
        let w = 1234.5;
        assert_eq!(
            at_splitting(w, 0.5).unwrap(),
            0.5 * at_splitting(w, 1.0).unwrap()
        );
        assert_eq!(at_splitting(0.0, 0.3).unwrap(), 0.0);
        assert!(at_splitting(-1.0, 1.0).is_err());
    }

    #[test]
    fn k0_examples() {
        assert_eq!(slope_k0(&AtomicParams::normalized(1.0, 0.0)), 0.25);
        assert_relative_eq!(
            slope_k0(&AtomicParams::normalized(1.0, 1.0)),
            1.0 / 9.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            slope_k0(&AtomicParams::normalized(2.0, 2.0)),
            1.0 / 36.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn unshifted_single_peak_has_zero_gradient() {
        let p = unit_params(1.0, 1.0, 1.0);
        let grid = DetuningGrid::around(&p, 5.0, 201);
        let prof = model_spectrum(&p, 0.0, 0.0, &grid).unwrap();
        assert_eq!(prof.local_maxima(), 1);
        let g = lia_gradient_readout(&prof, &p, 0.01).unwrap();
        assert!(g.abs() < 1e-15, "{g}");
    }

    #[test]
    fn resolved_splitting_has_two_symmetric_maxima() {
        let p = unit_params(1.0, 0.5, 1.0);
        let grid = DetuningGrid {
            start: -5.0,
            stop: 3.0,
            points: 801,
        };
        let prof = model_spectrum(&p, 2.0, 0.0, &grid).unwrap();
        assert_eq!(prof.local_maxima(), 2);
        assert!(prof.p_out.iter().all(|v| v.is_finite() && *v >= 0.0));
        // symmetric about the midpoint f = -1
        for x in [0.1, 0.7, 1.9] {
            assert_relative_eq!(
                prof.eval(-1.0 + x),
                prof.eval(-1.0 - x),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn shift_outside_linear_region_saturates() {
        let p = unit_params(1.0, 1.0, 1.0);
        let grid = DetuningGrid::around(&p, 5.0, 11);
        assert!(model_spectrum(&p, 3.0, 0.01, &grid).is_ok());
        assert!(matches!(
            model_spectrum(&p, 3.0, 0.0101, &grid),
            Err(Error::Saturation { .. })
        ));
    }

    #[test]
    fn dither_bound_enforced() {
        let p = unit_params(1.0, 1.0, 1.0);
        let prof = model_spectrum(&p, 3.0, 0.0, &DetuningGrid::around(&p, 5.0, 11)).unwrap();
        assert!(lia_gradient_readout(&prof, &p, 0.1).is_ok());
        assert!(matches!(
            lia_gradient_readout(&prof, &p, 0.1001),
            Err(Error::Precision { .. })
        ));
        assert!(lia_gradient_readout(&prof, &p, 0.0).is_err());
    }

    #[test]
    fn readout_tracks_analytic_derivative() {
        let p = unit_params(1.3, 0.4, 2.0);
        let prof = model_spectrum(&p, 6.0, 0.015, &DetuningGrid::around(&p, 5.0, 11)).unwrap();
        let analytic = prof.lineshape.first_derivative(p.f0);
        let d = 2e-3;
        let got = lia_gradient_readout(&prof, &p, d).unwrap();
        // bias of first-harmonic detection is P'''·d²/8
        let bias = prof.lineshape.third_derivative(p.f0) * d * d / 8.0;
        assert_relative_eq!(got, analytic + bias, max_relative = 1e-6);
    }

    proptest! {
        #[test]
        fn k0_bounded_and_scale_covariant(op in 0.01f64..100.0, oc in 0.0f64..100.0, a in 0.01f64..100.0) {
            let k0 = slope_k0(&AtomicParams::normalized(op, oc));
            prop_assert!(k0 > 0.0 && k0 <= 0.25 / (op * op) * (1.0 + 1e-15));
            let scaled = slope_k0(&AtomicParams::normalized(a * op, a * oc));
            prop_assert!((scaled * a * a - k0).abs() <= 1e-12 * k0);
        }

        #[test]
        fn splitting_is_linear(w in 0.0f64..1e9, alpha in 0.0f64..10.0, k in 0.01f64..10.0) {
            let lhs = at_splitting(alpha * w, k).unwrap();
            let rhs = alpha * at_splitting(w, k).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
        }
    }
}
