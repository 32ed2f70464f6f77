//! Finite-blocklength rate and outage over Rayleigh block fading.
//!
//! The normal approximation gives the largest rate decodable at blocklength
//! `n` with error probability `eps` over an AWGN channel of SNR `gamma`.
//! Inverting it gives the conditional error probability at a fixed rate, and
//! averaging that over an exponentially distributed channel gain gives the
//! outage probability. The average has no closed form; [`outage_rayleigh_exact`]
//! evaluates it by quadrature and [`outage_rayleigh_approx`] uses the
//! linearized closed form.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::mathcore::{self, q_inv, shannon_c, Probability, Quadrature, Snr, Support, LOG2_E};

/// Absolute tolerance of the outage quadratures.
pub const OUTAGE_ABS_TOL: f64 = 1e-14;
/// Relative tolerance of the outage quadratures.
pub const OUTAGE_REL_TOL: f64 = 1e-10;

/// Rate and data blocklength of a transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodingSpec {
    rate: f64,
    blocklength: u32,
}

impl CodingSpec {
    pub fn new(rate: f64, blocklength: u32) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::domain(format!("rate must be positive, got {rate}")));
        }
        if blocklength < 1 {
            return Err(Error::domain("blocklength must be at least 1"));
        }
        Ok(CodingSpec { rate, blocklength })
    }

    /// Bits per channel use.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn blocklength(&self) -> u32 {
        self.blocklength
    }

    /// Information bits `k = R n`.
    pub fn info_bits(&self) -> f64 {
        self.rate * self.blocklength as f64
    }

    /// SNR at which capacity equals the rate, `2^R - 1`.
    pub fn threshold_snr(&self) -> f64 {
        (self.rate * LN_2).exp_m1()
    }
}

/// How the rate enters the `e^{2R}` term of the closed-form outage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MuLogMode {
    /// `e^{2R}` with `R` in bits per channel use, as printed.
    #[default]
    Bits,
    /// `e^{2 R ln 2}`: the rate converted to nats first.
    Nats,
}

impl MuLogMode {
    pub fn label(self) -> &'static str {
        match self {
            MuLogMode::Bits => "bits",
            MuLogMode::Nats => "nats",
        }
    }
}

/// Maximum coding rate (bpcu) at blocklength `n`, error probability `eps` and
/// SNR `snr`: `C - sqrt(V/n) Q^{-1}(eps) log2(e)`.
pub fn max_rate(n: u32, eps: Probability, snr: Snr) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("blocklength must be at least 1"));
    }
    if !(snr.linear() > 0.0) {
        return Err(Error::domain("max_rate needs a positive SNR"));
    }
    let penalty = (mathcore::dispersion_v(snr) / n as f64).sqrt() * q_inv(eps.value())? * LOG2_E;
    Ok(shannon_c(snr) - penalty)
}

/// Conditional error probability at instantaneous SNR `x` (raw float path).
#[inline]
pub(crate) fn conditional_error(x: f64, blocklength: f64, rate: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let v = mathcore::dispersion(x);
    mathcore::qfunc_raw(blocklength.sqrt() * (x.ln_1p() - rate * LN_2) / v.sqrt())
}

/// Error probability of a rate-`R` code over AWGN at SNR `snr`, the inverse
/// map of [`max_rate`].
pub fn outage_awgn_conditional(snr: Snr, spec: CodingSpec) -> Probability {
    Probability::clamped(conditional_error(snr.linear(), spec.blocklength as f64, spec.rate))
}

/// Multiples of the transition point `center` used as breakpoints: dense
/// around the transition, then geometric through the slowly decaying tail of
/// short codes.
const TRANSITION_MULTIPLES: [f64; 13] = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0];

/// End of the finite part of an outage integral with transition at `center`.
pub(crate) fn transition_extent(center: f64) -> f64 {
    256.0 * center
}

/// Quadrature settings for an integrand whose transition sits at `center`
/// and whose weight varies on the scales in `scales`.
pub(crate) fn transition_quadrature(center: f64, scales: &[f64]) -> Quadrature {
    let weight_points = scales.iter().flat_map(|&s| [0.25, 1.0, 4.0, 16.0, 64.0].map(|k| k * s));
    Quadrature::new(OUTAGE_ABS_TOL)
        .rel_tol(OUTAGE_REL_TOL)
        .max_intervals(4000)
        .breakpoints(TRANSITION_MULTIPLES.map(|k| k * center))
        .breakpoints(weight_points)
}

/// Outage probability over Rayleigh fading with mean SNR `mean_snr`, by
/// quadrature of the conditional error against the exponential gain density.
pub fn outage_rayleigh_exact(spec: CodingSpec, mean_snr: Snr) -> Result<Probability> {
    let g = mean_snr.linear();
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::domain("mean SNR must be positive and finite"));
    }
    let n = spec.blocklength as f64;
    let rate = spec.rate;
    // gain t at which the instantaneous SNR hits the rate threshold
    let t_star = spec.threshold_snr() / g;
    // beyond t = 700 the exponential weight is below the smallest normal double
    let split = transition_extent(t_star).min(700.0);

    let head = transition_quadrature(t_star, &[1.0])
        .integrate(|t| conditional_error(g * t, n, rate) * (-t).exp(), Support::Finite { lower: 0.0, upper: split })?;
    if split >= 700.0 {
        return Ok(Probability::clamped(head.value));
    }
    // remaining mass through u = e^{-t}, u in (0, e^{-split}]
    let tail = Quadrature::new(OUTAGE_ABS_TOL).rel_tol(OUTAGE_REL_TOL).integrate(
        |u| if u > 0.0 { conditional_error(-g * u.ln(), n, rate) } else { 0.0 },
        Support::Finite { lower: 0.0, upper: (-split).exp() },
    )?;
    Ok(Probability::clamped(head.value + tail.value))
}

/// Parameters of the closed-form outage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageApproxParams {
    /// Normalized threshold `(2^R - 1) / gamma`.
    pub theta: f64,
    /// `gamma mu sqrt(2 pi)`.
    pub zeta: f64,
    /// Slope of the linearized error curve, `sqrt((n / 2pi) / (e^{2R} - 1))`.
    pub mu: f64,
}

impl OutageApproxParams {
    pub fn new(spec: CodingSpec, mean_snr: Snr, mode: MuLogMode) -> Result<Self> {
        let g = mean_snr.linear();
        if !(g > 0.0) {
            return Err(Error::domain("closed-form outage needs a positive mean SNR"));
        }
        let r = match mode {
            MuLogMode::Bits => spec.rate,
            MuLogMode::Nats => spec.rate * LN_2,
        };
        let mu = ((spec.blocklength as f64 / (2.0 * PI)) / (2.0 * r).exp_m1()).sqrt();
        Ok(OutageApproxParams { theta: spec.threshold_snr() / g, zeta: g * mu * (2.0 * PI).sqrt(), mu })
    }
}

/// `ln(sinh(x) / x)`, accurate for small and large `x`.
fn ln_sinhc(x: f64) -> f64 {
    if x < 1e-3 {
        let x2 = x * x;
        x2 / 6.0 - x2 * x2 / 180.0
    } else if x < 20.0 {
        (x.sinh() / x).ln()
    } else {
        x - (2.0 * x).ln() + (-(-2.0 * x).exp()).ln_1p()
    }
}

/// Closed-form outage
/// `1 - (zeta / sqrt(2pi)) e^{-theta} [e^{x} - e^{-x}]` with
/// `x = sqrt(pi / (2 zeta²))`.
///
/// The expression averages a linearized error curve, which falls from 1 to 0
/// over the normalized gains `[theta - x, theta + x]`, against the unit
/// exponential density. With `x = 1/(2 gamma mu)` the bracket times
/// `zeta/sqrt(2pi)` is `sinh(x)/x`, so it is evaluated as
/// `-expm1(ln(sinh(x)/x) - theta)` to keep precision when the outage is tiny.
///
/// When `theta < x` (very short codes) the linearized ramp starts below zero
/// gain, where the density has no support, and the printed form turns
/// negative. The same average is then taken over `[0, theta + x]`, giving
/// `(s - 1 + e^{-s}) / (2x)` with `s = theta + x`; both forms agree at
/// `theta = x`.
pub fn outage_rayleigh_approx(spec: CodingSpec, mean_snr: Snr, mode: MuLogMode) -> Result<Probability> {
    let params = OutageApproxParams::new(spec, mean_snr, mode)?;
    let x = (PI / (2.0 * params.zeta * params.zeta)).sqrt();
    let eps = if params.theta >= x {
        -(ln_sinhc(x) - params.theta).exp_m1()
    } else {
        let s = params.theta + x;
        (s + (-s).exp_m1()) / (2.0 * x)
    };
    Ok(Probability::clamped(eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(rate: f64, n: u32) -> CodingSpec {
        CodingSpec::new(rate, n).unwrap()
    }

    fn snr(x: f64) -> Snr {
        Snr::new(x).unwrap()
    }

    #[test]
    fn coding_spec_validation() {
        assert!(CodingSpec::new(0.0, 10).is_err());
        assert!(CodingSpec::new(0.5, 0).is_err());
        assert_eq!(spec(0.5, 400).info_bits(), 200.0);
    }

    #[test]
    fn max_rate_examples() {
        let g = snr(10.0);
        let half = Probability::new(0.5).unwrap();
        assert!((max_rate(100, half, g).unwrap() - shannon_c(g)).abs() < 1e-15);
        let eps = Probability::new(1e-3).unwrap();
        assert!(max_rate(2000, eps, g).unwrap() > max_rate(200, eps, g).unwrap());
        // mpmath: log2(11) - sqrt(120/121/500) * Q^{-1}(1e-3) * log2(e)
        assert!((max_rate(500, eps, g).unwrap() - 3.2608776357952484).abs() < 1e-12);
    }

    #[test]
    fn conditional_examples() {
        let s = spec(1.0, 300);
        assert!((outage_awgn_conditional(snr(1.0), s).value() - 0.5).abs() < 1e-15);
        assert!(outage_awgn_conditional(snr(1e9), s).value() < 1e-15);
        assert_eq!(outage_awgn_conditional(snr(0.0), s).value(), 1.0);
    }

    #[test]
    fn exact_limits() {
        // as the rate vanishes the outage tends to E[Q(sqrt(n x / 2))], about 2e-4 here
        let tiny_rate = outage_rayleigh_exact(spec(1e-6, 500), snr(10.0)).unwrap().value();
        assert!(((tiny_rate - 1.987896181156058e-4) / tiny_rate).abs() < 1e-9, "{tiny_rate:e}");
        assert!(tiny_rate < outage_rayleigh_exact(spec(0.01, 500), snr(10.0)).unwrap().value());
        let weak = outage_rayleigh_exact(spec(0.5, 500), snr(1e-6)).unwrap();
        assert!(weak.value() > 0.9999);
        assert!(outage_rayleigh_exact(spec(0.5, 500), snr(0.0)).is_err());
    }

    #[test]
    fn exact_reference_value() {
        // 30-digit mpmath quadrature of the same expectation
        let got = outage_rayleigh_exact(spec(0.5, 500), snr(10.0)).unwrap().value();
        assert!(((got - 0.04076873096632533) / got).abs() < 1e-9, "{got}");
        let got = outage_rayleigh_exact(spec(0.1, 100), snr(10f64.powf(2.5))).unwrap().value();
        assert!(((got - 2.57960852051952984e-4) / got).abs() < 1e-9, "{got}");
    }

    #[test]
    fn approx_short_code_branch() {
        let s = spec(0.5, 4);
        let g = 0.3;
        let params = OutageApproxParams::new(s, snr(g), MuLogMode::Bits).unwrap();
        let x = 1.0 / (2.0 * g * params.mu);
        assert!(params.theta < x);
        let eps = outage_rayleigh_approx(s, snr(g), MuLogMode::Bits).unwrap().value();
        let want = (params.theta + x - 1.0 + (-(params.theta + x)).exp()) / (2.0 * x);
        assert!((eps - want).abs() < 1e-15 && eps > 0.5 && eps < 1.0);
        // which branch applies depends on (n, R) only; within it the outage falls with SNR
        let mut prev = 1.0;
        for k in 0..400 {
            let g = 0.05 * 1.02f64.powi(k);
            let e = outage_rayleigh_approx(s, snr(g), MuLogMode::Bits).unwrap().value();
            assert!(e <= prev + 1e-12 && e > 0.0, "{g} {e}");
            prev = e;
        }
    }

    #[test]
    fn approx_params_recompute() {
        let s = spec(0.5, 300);
        let p = OutageApproxParams::new(s, snr(10.0), MuLogMode::Bits).unwrap();
        let mu = ((300.0 / (2.0 * PI)) / (1f64.exp() - 1.0)).sqrt();
        assert!((p.theta - (2f64.sqrt() - 1.0) / 10.0).abs() < 1e-12);
        assert!((p.mu - mu).abs() < 1e-12);
        assert!((p.zeta - 10.0 * mu * (2.0 * PI).sqrt()).abs() < 1e-12);
        let n = OutageApproxParams::new(s, snr(10.0), MuLogMode::Nats).unwrap();
        assert!((n.mu - ((300.0 / (2.0 * PI)) / 1.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn approx_high_snr_asymptote() {
        let theta = 2f64.sqrt() - 1.0;
        let eps = outage_rayleigh_approx(spec(0.5, 1000), snr(1e6), MuLogMode::Bits).unwrap().value();
        assert!(((eps - theta / 1e6) / (theta / 1e6)).abs() < 0.01);
    }

    #[test]
    fn approx_tracks_exact_at_reference_point() {
        let s = spec(0.5, 500);
        let exact = outage_rayleigh_exact(s, snr(10.0)).unwrap().value();
        for mode in [MuLogMode::Bits, MuLogMode::Nats] {
            let approx = outage_rayleigh_approx(s, snr(10.0), mode).unwrap().value();
            assert!(((approx - exact) / exact).abs() < 0.1);
        }
    }

    #[test]
    fn approx_monotone_in_snr() {
        let s = spec(0.5, 500);
        let lo = outage_rayleigh_approx(s, Snr::from_db(5.0).unwrap(), MuLogMode::Bits).unwrap();
        let hi = outage_rayleigh_approx(s, Snr::from_db(15.0).unwrap(), MuLogMode::Bits).unwrap();
        assert!(lo > hi);
    }

    #[test]
    fn ln_sinhc_branches_join() {
        for x in [1e-3, 20.0] {
            let below = ln_sinhc(x * (1.0 - 1e-12));
            let above = ln_sinhc(x * (1.0 + 1e-12));
            assert!((below - above).abs() < 1e-9 * above.abs().max(1e-6));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn rate_and_conditional_are_inverse(n in 50u32..3000, log_eps in -8.0f64..-0.5, db in -5.0f64..30.0) {
            let eps = 10f64.powf(log_eps);
            let g = Snr::from_db(db).unwrap();
            let rate = max_rate(n, Probability::new(eps).unwrap(), g).unwrap();
            prop_assume!(rate > 0.0);
            let back = outage_awgn_conditional(g, CodingSpec::new(rate, n).unwrap()).value();
            prop_assert!((back - eps).abs() < 1e-9 + 1e-9 * eps);
        }

        #[test]
        fn outages_are_probabilities(n in 1u32..3000, rate in 0.01f64..4.0, db in -20.0f64..40.0) {
            let s = CodingSpec::new(rate, n).unwrap();
            let g = Snr::from_db(db).unwrap();
            for mode in [MuLogMode::Bits, MuLogMode::Nats] {
                let e = outage_rayleigh_approx(s, g, mode).unwrap().value();
                prop_assert!((0.0..=1.0).contains(&e));
            }
        }
    }
}
