//! Link-level analysis of short-packet transmissions with in-band pilots.
//!
//! The crate computes outage probability, latency and goodput for a
//! point-to-point link and for a decode-and-forward relay link whose
//! destination combines the source and relay copies. Channel knowledge comes
//! from MMSE estimation over a pilot block, under either an average or a peak
//! power constraint on the pilots.
//!
//! Modules, bottom up:
//!
//! * [`mathcore`]: Gaussian tail function, its inverse, capacity and
//!   dispersion, adaptive quadrature.
//! * [`estimation`]: MMSE variances, effective SNR, optimal pilot count.
//! * [`fbl`]: finite-blocklength rate and Rayleigh outage (exact and closed form).
//! * [`relaying`]: scenario description, per-link budgets, direct and DF outage.
//! * [`montecarlo`]: stochastic oracle for every analytic outage.
//! * [`optimizer`]: minimum latency and maximum goodput operating points.
//! * [`cli`]: configuration files, CSV tables, run manifests and plot scripts.

// Coefficient tables and reference values keep every digit of their source;
// negated float comparisons are deliberate NaN-rejecting guards.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimation;
pub mod fbl;
pub mod mathcore;
pub mod montecarlo;
pub mod optimizer;
pub mod relaying;

pub use error::{Error, Result};
pub use mathcore::{Probability, Snr};
