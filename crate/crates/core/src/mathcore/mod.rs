//! Special functions and numerical primitives.

mod erfc;
mod qfunc;
mod quadrature;
mod types;

pub use erfc::erfc;
pub(crate) use qfunc::q as qfunc_raw;
pub use qfunc::{gaussian_pdf, q_func, q_inv};
pub use quadrature::{integrate, Integral, Quadrature, Support};
pub use types::{Probability, Snr};

/// `log2(e)`, the factor converting nats to bits.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Shannon capacity `log2(1 + snr)` in bits per channel use.
pub fn shannon_c(snr: Snr) -> f64 {
    snr.linear().ln_1p() * LOG2_E
}

/// Channel dispersion `snr (2 + snr) / (1 + snr)^2` in nats².
pub fn dispersion_v(snr: Snr) -> f64 {
    dispersion(snr.linear())
}

#[inline]
pub(crate) fn dispersion(x: f64) -> f64 {
    // 1 - 1/(1+x)^2; the product form keeps small x accurate, the difference
    // form keeps huge x finite
    let r = 1.0 / (1.0 + x);
    if x < 1.0 {
        x * (2.0 + x) * r * r
    } else {
        1.0 - r * r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacity_values() {
        assert_eq!(shannon_c(Snr::new(0.0).unwrap()), 0.0);
        assert!((shannon_c(Snr::new(1.0).unwrap()) - 1.0).abs() < 1e-15);
        assert!((shannon_c(Snr::new(3.0).unwrap()) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn dispersion_values() {
        assert_eq!(dispersion_v(Snr::new(0.0).unwrap()), 0.0);
        assert!((dispersion_v(Snr::new(1.0).unwrap()) - 0.75).abs() < 1e-15);
        let big = dispersion_v(Snr::new(1e9).unwrap());
        assert!(big <= 1.0 && (1.0 - big) < 1e-8);
        assert_eq!(dispersion_v(Snr::new(1e200).unwrap()), 1.0);
        let small = dispersion_v(Snr::new(1e-12).unwrap());
        assert!(((small - 2e-12) / 2e-12).abs() < 1e-11);
    }
}
