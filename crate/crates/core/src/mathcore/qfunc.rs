use super::erfc::erfc;
use super::types::Probability;
use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Beyond this point the tail is evaluated by continued fraction.
const CF_THRESHOLD: f64 = 6.0;

/// Q(x) underflows to zero past this point.
const UNDERFLOW: f64 = 38.5;

/// Standard normal density.
pub fn gaussian_pdf(x: f64) -> f64 {
    // exp(-x²/2) with x² split so the head is exact
    let head = f64::from_bits(x.abs().to_bits() & 0xffff_ffff_0000_0000);
    let tail = x.abs() - head;
    FRAC_1_SQRT_2PI * (-0.5 * head * head).exp() * (-0.5 * tail * (x.abs() + head)).exp()
}

/// Mills ratio `Q(x)/φ(x)` for large positive `x`, by the Laplace continued
/// fraction `1/(x + 1/(x + 2/(x + 3/(x + ...))))` evaluated with Lentz's method.
fn mills_ratio(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// Gaussian tail `Q(x)` as a raw float; the hot path for quadrature and
/// sampling.
#[inline]
pub(crate) fn q(x: f64) -> f64 {
    if x > UNDERFLOW {
        0.0
    } else if x > CF_THRESHOLD {
        gaussian_pdf(x) * mills_ratio(x)
    } else if x < -CF_THRESHOLD {
        1.0 - q(-x)
    } else {
        0.5 * erfc(x * std::f64::consts::FRAC_1_SQRT_2)
    }
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_func(x: f64) -> Probability {
    Probability::clamped(q(x))
}

/// Inverse of [`q_func`]: the `x` with `Q(x) = p`, for `p` in `(0, 1)`.
pub fn q_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("q_inv requires 0 < p < 1, got {p}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        return Ok(-upper_tail_inv(1.0 - p));
    }
    Ok(upper_tail_inv(p))
}

/// Solves `Q(x) = p` for `p < 0.5` (so `x > 0`) by Newton on `ln Q(x) - ln p`,
/// with bisection whenever an iterate leaves the bracket.
fn upper_tail_inv(p: f64) -> f64 {
    let target = p.ln();
    let (mut lo, mut hi) = (0.0, UNDERFLOW);

    // Abramowitz & Stegun 26.2.23 as the starting point.
    let t = (-2.0 * target).sqrt();
    let mut x = t - (2.515517 + t * (0.802853 + t * 0.010328)) / (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308)));
    x = x.clamp(lo, hi);

    for _ in 0..100 {
        let qx = q(x);
        let g = qx.ln() - target;
        if g > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = g * qx / gaussian_pdf(x);
        let mut next = x + step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1.0) {
            return next;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Q(x) from a 40-digit mpmath evaluation of erfc(x/sqrt(2))/2.
    const REFERENCE: [(f64, f64); 9] = [
        (0.5, 3.085375387259869e-01),
        (1.3, 9.680048458561033e-02),
        (2.0, 2.275013194817921e-02),
        (3.090232306167814, 9.999999999999982e-04),
        (4.0, 3.167124183311992e-05),
        (5.5, 1.898956246588772e-08),
        (6.5, 4.016000583859118e-11),
        (7.25, 2.083858158672069e-13),
        (8.0, 6.220960574271784e-16),
    ];

    #[test]
    fn median_and_reflection() {
        assert_eq!(q_func(0.0).value(), 0.5);
        let x = 1.3;
        assert!((q_func(-x).value() + q_func(x).value() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn relative_accuracy_against_reference() {
        for (x, want) in REFERENCE {
            let got = q(x);
            assert!(((got - want) / want).abs() < 1e-12, "Q({x}) = {got:e}, want {want:e}");
        }
        assert!(q(8.0) < 1e-15);
    }

    #[test]
    fn continued_fraction_joins_erfc() {
        let below = 0.5 * erfc(CF_THRESHOLD / std::f64::consts::SQRT_2);
        let above = gaussian_pdf(CF_THRESHOLD) * mills_ratio(CF_THRESHOLD);
        assert!(((below - above) / below).abs() < 1e-13);
    }

    #[test]
    fn inverse_values() {
        assert_eq!(q_inv(0.5).unwrap(), 0.0);
        // bisection on q_func to 1e-12 gives 3.090232306167814
        assert!((q_inv(1e-3).unwrap() - 3.090232306167814).abs() < 1e-9);
        assert!((q_inv(q_func(2.0).value()).unwrap() - 2.0).abs() < 1e-10);
        assert!((q_inv(1e-300).unwrap() - 37.0470962993612).abs() < 1e-9);
    }

    #[test]
    fn inverse_domain() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(q_inv(p).is_err(), "{p}");
        }
    }

    #[test]
    fn inverse_by_bisection() {
        fn bisect(p: f64) -> f64 {
            let (mut lo, mut hi) = (-40.0, 40.0);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if q(mid) > p {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }
        for p in [0.4, 0.1, 1e-2, 1e-5, 1e-9, 0.9, 0.999] {
            assert!((q_inv(p).unwrap() - bisect(p)).abs() < 1e-10, "{p}");
        }
    }

    proptest! {
        #[test]
        fn strictly_decreasing(x in -8.0f64..8.0, d in 1e-6f64..2.0) {
            prop_assert!(q(x) > q(x + d));
        }

        #[test]
        fn inverse_round_trip(x in -6.0f64..6.0) {
            let p = q(x);
            // near p = 1 the argument is only resolved to one ulp of p over the density
            let resolution = 1e-10f64.max(4.0 * f64::EPSILON / gaussian_pdf(x));
            prop_assert!((q_inv(p).unwrap() - x).abs() < resolution);
        }

        #[test]
        fn forward_of_inverse(p in 1e-12f64..0.999999) {
            prop_assert!((q(q_inv(p).unwrap()) - p).abs() < 1e-10);
        }
    }
}
