//! MMSE pilot-based channel estimation.
//!
//! A block of `n` channel uses carries pilots followed by data. The receiver
//! forms the MMSE estimate of the Rayleigh coefficient from the pilots; the
//! residual error acts as extra noise during data detection, which turns the
//! data SNR into a smaller effective SNR.
//!
//! Two pilot power policies are modelled:
//!
//! * average power constraint (APC): a single pilot takes an optimized share
//!   `psi` of the block energy `nP`;
//! * peak power constraint (PPC): each pilot symbol is capped at `kappa * P`,
//!   so the training energy is `kappa * n_p * P` and the count `n_p` is
//!   optimized instead.

use std::fmt;

use crate::error::{Error, Result};
use crate::mathcore::Snr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PilotPolicy {
    Apc,
    Ppc { kappa: f64 },
    PerfectCsi,
}

impl PilotPolicy {
    pub fn ppc(kappa: f64) -> Result<Self> {
        if kappa >= 1.0 && kappa.is_finite() {
            Ok(PilotPolicy::Ppc { kappa })
        } else {
            Err(Error::domain(format!("peak power factor must be >= 1, got {kappa}")))
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PilotPolicy::Apc => "apc",
            PilotPolicy::Ppc { .. } => "ppc",
            PilotPolicy::PerfectCsi => "pcsi",
        }
    }
}

impl fmt::Display for PilotPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PilotPolicy::Ppc { kappa } => write!(f, "ppc(kappa={kappa})"),
            other => f.write_str(other.label()),
        }
    }
}

/// Variances of the MMSE estimate and of its error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmseVariances {
    pub sigma2_hat: f64,
    pub sigma2_tilde: f64,
}

/// Estimate and error variances for pilot energy `||x_t||²` and channel
/// variance `sigma2`.
pub fn mmse_variances(pilot_energy: f64, sigma2: f64) -> Result<MmseVariances> {
    if !(pilot_energy >= 0.0) {
        return Err(Error::domain(format!("pilot energy {pilot_energy} must be >= 0")));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::domain(format!("channel variance {sigma2} must be > 0")));
    }
    if pilot_energy.is_infinite() {
        return Ok(MmseVariances { sigma2_hat: sigma2, sigma2_tilde: 0.0 });
    }
    let denom = sigma2 * pilot_energy + 1.0;
    Ok(MmseVariances { sigma2_hat: sigma2 * sigma2 * pilot_energy / denom, sigma2_tilde: sigma2 / denom })
}

/// Effective SNR `sigma_d² (1 - sigma2_tilde) / (1 + sigma2_tilde sigma_d²)`
/// for a unit-variance channel.
pub fn effective_snr(sigma2_tilde: f64, data_snr: Snr) -> Result<Snr> {
    if !(0.0..=1.0).contains(&sigma2_tilde) {
        return Err(Error::domain(format!("error variance {sigma2_tilde} outside [0, 1]")));
    }
    let d = data_snr.linear();
    Snr::new(d * (1.0 - sigma2_tilde) / (1.0 + sigma2_tilde * d))
}

/// Outcome of estimating one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationResult {
    /// Training energy `||x_t||²`; infinite under perfect CSI.
    pub pilot_energy: f64,
    pub sigma2_hat: f64,
    pub sigma2_tilde: f64,
    /// Mean SNR of a data symbol.
    pub data_snr: Snr,
    pub gamma_eff: Snr,
}

impl EstimationResult {
    fn from_energies(pilot_energy: f64, data_snr: f64) -> Result<Self> {
        let v = mmse_variances(pilot_energy, 1.0)?;
        let data_snr = Snr::new(data_snr)?;
        Ok(EstimationResult {
            pilot_energy,
            sigma2_hat: v.sigma2_hat,
            sigma2_tilde: v.sigma2_tilde,
            data_snr,
            gamma_eff: effective_snr(v.sigma2_tilde, data_snr)?,
        })
    }

    pub fn perfect(snr: Snr) -> Self {
        EstimationResult {
            pilot_energy: f64::INFINITY,
            sigma2_hat: 1.0,
            sigma2_tilde: 0.0,
            data_snr: snr,
            gamma_eff: snr,
        }
    }
}

/// The `D` and `F` terms of the APC closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApcIntermediates {
    pub d: f64,
    pub f: f64,
}

impl ApcIntermediates {
    /// `D = (n + nP - 1) / ((n - 2) n P)`,
    /// `F = (n - 1)(n² P (1 + P) + n - 1) / ((n - 2)² n² P²)`.
    pub fn new(n: u32, power: Snr) -> Result<Self> {
        if n <= 2 {
            return Err(Error::InvalidRegime(format!("APC needs n >= 3, got {n}")));
        }
        let p = power.linear();
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::domain(format!("APC needs finite P > 0, got {p}")));
        }
        let n = n as f64;
        let d = (n + n * p - 1.0) / ((n - 2.0) * n * p);
        let f = (n - 1.0) * (n * n * p * (1.0 + p) + n - 1.0) / ((n - 2.0).powi(2) * n * n * p * p);
        Ok(ApcIntermediates { d, f })
    }
}

/// Effective SNR of a block of `n` channel uses with one optimally powered
/// pilot under an average power budget `nP`.
pub fn apc_effective_snr(n: u32, power: Snr) -> Result<Snr> {
    let ApcIntermediates { d, f } = ApcIntermediates::new(n, power)?;
    let root_f = f.sqrt();
    let lead = 1.0 + d - root_f;
    let gap = root_f - d;
    if !(lead > 0.0 && gap > 0.0) {
        return Err(Error::InvalidRegime(format!("APC closed form is nonpositive at n={n}, P={}", power.linear())));
    }
    let n = n as f64;
    Snr::new(n * power.linear() * lead * gap / ((n - 2.0) * root_f))
}

/// The single-pilot APC allocation spelled out: pilot share `psi` of the
/// block energy and the resulting estimation quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApcSplit {
    pub psi: f64,
    pub estimation: EstimationResult,
}

/// Splits `nP` between one pilot (`psi n P`) and `n - 1` data symbols so the
/// effective SNR is maximal.
///
/// With `u = nP`, the effective SNR is proportional to
/// `psi (1 - psi) / (a + b psi)` where `a = n - 1 + u` and `b = u (n - 2)`;
/// its maximizer is the positive root of `b psi² + 2 a psi - a = 0`.
pub fn apc_pilot_split(n: u32, power: Snr) -> Result<ApcSplit> {
    if n <= 2 {
        return Err(Error::InvalidRegime(format!("APC needs n >= 3, got {n}")));
    }
    let p = power.linear();
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::domain(format!("APC needs finite P > 0, got {p}")));
    }
    let nf = n as f64;
    let u = nf * p;
    let a = nf - 1.0 + u;
    let b = u * (nf - 2.0);
    let psi = a / ((a * a + a * b).sqrt() + a);
    let estimation = EstimationResult::from_energies(psi * u, (1.0 - psi) * u / (nf - 1.0))?;
    Ok(ApcSplit { psi, estimation })
}

fn check_ppc(n: u32, pilots: u32, kappa: f64, power: Snr) -> Result<()> {
    if pilots < 1 || pilots >= n {
        return Err(Error::domain(format!("pilot count must satisfy 1 <= n_p < n, got n_p={pilots}, n={n}")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::domain(format!("peak power factor must be positive, got {kappa}")));
    }
    if pilots as f64 * kappa > n as f64 {
        return Err(Error::domain(format!(
            "pilot energy exceeds block budget: n_p*kappa = {} > n = {n}",
            pilots as f64 * kappa
        )));
    }
    if !power.linear().is_finite() {
        return Err(Error::domain("power must be finite"));
    }
    Ok(())
}

/// PPC effective SNR on real-valued arguments.
#[inline]
pub(crate) fn ppc_gamma(n: f64, pilots: f64, kappa: f64, p: f64) -> f64 {
    let num = pilots * kappa * (n - pilots * kappa) * p * p;
    let den = (n - pilots * kappa + (n - pilots) * pilots * kappa) * p + n - pilots;
    num / den
}

/// Effective SNR with `n_p` pilots at peak power `kappa P` and the remaining
/// energy spread over `n - n_p` data symbols.
pub fn ppc_effective_snr(n: u32, pilots: u32, kappa: f64, power: Snr) -> Result<Snr> {
    check_ppc(n, pilots, kappa, power)?;
    Snr::new(ppc_gamma(n as f64, pilots as f64, kappa, power.linear()).max(0.0))
}

/// The PPC link spelled out through pilot energy `kappa n_p P` and data power
/// `(nP - kappa n_p P) / (n - n_p)`.
pub fn ppc_estimation(n: u32, pilots: u32, kappa: f64, power: Snr) -> Result<EstimationResult> {
    check_ppc(n, pilots, kappa, power)?;
    let p = power.linear();
    let (nf, m) = (n as f64, pilots as f64);
    EstimationResult::from_energies(kappa * m * p, ((nf - kappa * m) * p / (nf - m)).max(0.0))
}

/// Coefficients of the quadratic whose root in `(0, n/kappa)` maximizes the
/// PPC effective SNR over real pilot counts.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotQuadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Finite real roots, ascending.
    pub roots: Vec<f64>,
}

impl PilotQuadratic {
    pub fn new(n: u32, kappa: f64, power: Snr) -> Self {
        let (n, k, p) = (n as f64, kappa, power.linear());
        let (k2, k3, p2, p3) = (k * k, k * k * k, p * p, p * p * p);
        let a = k2 * p2 + k3 * p3 - n * k3 * p3 + n * k2 * p3;
        let b = -2.0 * n * k2 * p2 - 2.0 * n * k2 * p3;
        let c = n * n * k * p2 + n * n * k * p3;

        let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
        // q = -(b + sign(b) sqrt(disc)) / 2 avoids cancellation; roots are q/a and c/q
        let q = -0.5 * (b + b.signum() * disc);
        let mut roots: Vec<f64> = [q / a, c / q].into_iter().filter(|r| r.is_finite()).collect();
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        PilotQuadratic { a, b, c, roots }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }

    /// The root that maximizes the effective SNR: `(-B - sqrt(B² - 4AC)) / 2A`.
    ///
    /// Evaluated as `C / q`, which stays finite when `A` vanishes and then
    /// reduces to the linear solution `-C / B`.
    pub fn training_root(&self) -> f64 {
        let disc = (self.b * self.b - 4.0 * self.a * self.c).max(0.0).sqrt();
        let q = -0.5 * (self.b + self.b.signum() * disc);
        self.c / q
    }
}

/// Largest admissible pilot count: `n_p * kappa <= n` and `n_p < n`.
pub fn max_pilot_count(n: u32, kappa: f64) -> u32 {
    let by_energy = (n as f64 / kappa).floor();
    let by_length = n.saturating_sub(1) as f64;
    by_energy.min(by_length).max(0.0) as u32
}

/// Integer pilot count maximizing the PPC effective SNR.
///
/// The real maximizer comes from the quadratic; the integer answer is the
/// better of its floor and ceiling (ties go to fewer pilots).
pub fn optimal_pilot_count(n: u32, kappa: f64, power: Snr) -> Result<u32> {
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(Error::domain(format!("peak power factor must be >= 1, got {kappa}")));
    }
    if !(power.linear() > 0.0 && power.linear().is_finite()) {
        return Err(Error::domain("optimal pilot count needs finite P > 0"));
    }
    let upper = max_pilot_count(n, kappa);
    if n < 2 || upper < 1 {
        return Err(Error::domain(format!("no feasible pilot count for n={n}, kappa={kappa}")));
    }
    let root = PilotQuadratic::new(n, kappa, power).training_root();
    let root = if root.is_finite() { root.clamp(1.0, upper as f64) } else { 1.0 };
    let lo = root.floor() as u32;
    let hi = (root.ceil() as u32).min(upper);
    if lo == hi {
        return Ok(lo);
    }
    let (nf, p) = (n as f64, power.linear());
    let g_lo = ppc_gamma(nf, lo as f64, kappa, p);
    let g_hi = ppc_gamma(nf, hi as f64, kappa, p);
    Ok(if g_hi > g_lo { hi } else { lo })
}
