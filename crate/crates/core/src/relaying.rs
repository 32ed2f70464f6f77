//! Direct transmission and decode-and-forward relaying with maximum ratio
//! combining at the destination.
//!
//! Geometry: the source–destination distance is 1 and the relay sits at
//! distance `beta` from the source, `1 - beta` from the destination. `Z` is the
//! source–destination link, `X` source–relay and `Y` relay–destination.
//!
//! In the first phase the source broadcasts over `n_source` channel uses. If
//! the relay decodes, it forwards over `n_relay` channel uses and the
//! destination combines both copies, whose SNRs add. The composite outage is
//! `eps_X eps_Z + (1 - eps_X) eps_SRD`.

use crate::error::{Error, Result};
use crate::estimation::{apc_pilot_split, optimal_pilot_count, ppc_estimation, EstimationResult, PilotPolicy};
use crate::fbl::{
    conditional_error, outage_rayleigh_approx, outage_rayleigh_exact, transition_extent, transition_quadrature,
    CodingSpec, MuLogMode, OUTAGE_ABS_TOL, OUTAGE_REL_TOL,
};
use crate::mathcore::{Probability, Quadrature, Snr, Support};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Point-to-point transmission, no relay.
    Direct,
    /// Decode-and-forward with MRC at the destination.
    DecodeForward,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Direct => "dt",
            Scheme::DecodeForward => "df",
        }
    }
}

/// How the power budget maps to per-link transmit power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PowerMode {
    /// Every active transmitter uses the full `P`.
    #[default]
    PerLink,
    /// Source uses `eta P`, relay `(1 - eta) P`.
    TotalSplit,
}

/// Distance used for the relay–destination path loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GammaYDistance {
    /// `d_RD = 1 - beta`.
    #[default]
    RelayDestination,
    /// `d_SD = 1`, the literal printed form.
    SourceDestination,
}

/// Data blocklength used for the combined (MRC) decoding attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MrcBlocklength {
    /// Data length of the relaying phase.
    #[default]
    RelayPhase,
    /// Data lengths of both phases together.
    Combined,
}

/// Evaluation of the single-link outages entering the composite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OutageMethod {
    /// Linearized closed form.
    #[default]
    ClosedForm,
    /// Quadrature of the exact fading expectation.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PilotCount {
    /// PPC optimum for the phase blocklength.
    #[default]
    Optimal,
    Fixed(u32),
}

/// Complete description of one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Transmit power `P` (linear SNR at unit distance).
    pub power: Snr,
    pub eta: f64,
    pub beta: f64,
    pub alpha: f64,
    /// Coding rate in bits per channel use.
    pub rate: f64,
    pub n_source: u32,
    pub n_relay: u32,
    /// Pilots per phase under PPC.
    pub pilots: PilotCount,
    pub policy: PilotPolicy,
    /// Symbol period in seconds.
    pub symbol_period: f64,
    pub power_mode: PowerMode,
    pub gamma_y_distance: GammaYDistance,
    pub mrc_blocklength: MrcBlocklength,
    pub mu_log_mode: MuLogMode,
    pub outage_method: OutageMethod,
    /// Count pilot channel uses in the latency as well.
    pub latency_includes_pilots: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            power: Snr::new(10.0).expect("valid"),
            eta: 0.5,
            beta: 0.5,
            alpha: 4.0,
            rate: 0.5,
            n_source: 500,
            n_relay: 500,
            pilots: PilotCount::Optimal,
            policy: PilotPolicy::Ppc { kappa: 3.0 },
            symbol_period: 8.33e-6,
            power_mode: PowerMode::PerLink,
            gamma_y_distance: GammaYDistance::RelayDestination,
            mrc_blocklength: MrcBlocklength::RelayPhase,
            mu_log_mode: MuLogMode::Bits,
            outage_method: OutageMethod::ClosedForm,
            latency_includes_pilots: false,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Scenario(msg));
        let p = self.power.linear();
        if !(p > 0.0 && p.is_finite()) {
            return bad(format!("power must be positive and finite, got {p}"));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return bad(format!("eta must lie in (0, 1), got {}", self.eta));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad(format!("beta must lie in (0, 1), got {}", self.beta));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("path-loss exponent must be positive, got {}", self.alpha));
        }
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return bad(format!("rate must be positive, got {}", self.rate));
        }
        if !(self.symbol_period > 0.0 && self.symbol_period.is_finite()) {
            return bad(format!("symbol period must be positive, got {}", self.symbol_period));
        }
        if self.n_source < 1 || self.n_relay < 1 {
            return bad("blocklengths must be at least 1".into());
        }
        if let PilotPolicy::Ppc { kappa } = self.policy {
            if !(kappa >= 1.0 && kappa.is_finite()) {
                return bad(format!("kappa must be >= 1, got {kappa}"));
            }
        }
        if let PilotCount::Fixed(m) = self.pilots {
            if m >= self.n_source.min(self.n_relay) {
                return bad(format!(
                    "pilot count {m} must be below both blocklengths ({}, {})",
                    self.n_source, self.n_relay
                ));
            }
        }
        Ok(())
    }

    /// `(d_SD, d_SR, d_RD)`.
    pub fn distances(&self) -> (f64, f64, f64) {
        (1.0, self.beta, 1.0 - self.beta)
    }

    /// Average received SNR of the `Z`, `X` and `Y` links with perfect CSI.
    pub fn receive_snrs(&self) -> Result<[Snr; 3]> {
        let p = self.power.linear();
        let (d_sd, d_sr, d_rd) = self.distances();
        let (source, relay) = match self.power_mode {
            PowerMode::PerLink => (1.0, 1.0),
            PowerMode::TotalSplit => (self.eta, 1.0 - self.eta),
        };
        let d_y = match self.gamma_y_distance {
            GammaYDistance::RelayDestination => d_rd,
            GammaYDistance::SourceDestination => d_sd,
        };
        Ok([
            Snr::new(source * d_sd.powf(-self.alpha) * p)?,
            Snr::new(source * d_sr.powf(-self.alpha) * p)?,
            Snr::new(relay * d_y.powf(-self.alpha) * p)?,
        ])
    }

    /// Pilot symbols in a phase of `n` channel uses.
    pub fn phase_pilots(&self, n: u32) -> Result<u32> {
        match self.policy {
            PilotPolicy::PerfectCsi => Ok(0),
            PilotPolicy::Apc => Ok(1),
            PilotPolicy::Ppc { kappa } => match self.pilots {
                PilotCount::Fixed(m) => Ok(m),
                PilotCount::Optimal => optimal_pilot_count(n, kappa, self.power),
            },
        }
    }
}

/// Estimation outcome of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkEstimate {
    /// Average received SNR with perfect CSI.
    pub receive_snr: Snr,
    /// Blocklength of the phase the link belongs to.
    pub blocklength: u32,
    pub pilots: u32,
    pub estimation: EstimationResult,
}

impl LinkEstimate {
    pub fn gamma_eff(&self) -> Snr {
        self.estimation.gamma_eff
    }

    pub fn data_length(&self) -> u32 {
        self.blocklength - self.pilots
    }
}

/// Effective SNRs of the three links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub z: LinkEstimate,
    pub x: LinkEstimate,
    pub y: LinkEstimate,
}

fn estimate_link(policy: PilotPolicy, receive_snr: Snr, blocklength: u32, pilots: u32) -> Result<LinkEstimate> {
    let estimation = match policy {
        PilotPolicy::PerfectCsi => EstimationResult::perfect(receive_snr),
        PilotPolicy::Apc => apc_pilot_split(blocklength, receive_snr)?.estimation,
        PilotPolicy::Ppc { kappa } => ppc_estimation(blocklength, pilots, kappa, receive_snr)?,
    };
    Ok(LinkEstimate { receive_snr, blocklength, pilots, estimation })
}

/// Per-link effective SNRs after estimation.
pub fn link_budget(cfg: &ScenarioConfig) -> Result<LinkBudget> {
    cfg.validate()?;
    let [rz, rx, ry] = cfg.receive_snrs()?;
    let source_pilots = cfg.phase_pilots(cfg.n_source)?;
    let relay_pilots = cfg.phase_pilots(cfg.n_relay)?;
    Ok(LinkBudget {
        z: estimate_link(cfg.policy, rz, cfg.n_source, source_pilots)?,
        x: estimate_link(cfg.policy, rx, cfg.n_source, source_pilots)?,
        y: estimate_link(cfg.policy, ry, cfg.n_relay, relay_pilots)?,
    })
}

fn data_spec(rate: f64, data_length: u32) -> Result<CodingSpec> {
    if data_length < 1 {
        return Err(Error::Scenario("no channel uses left for data".into()));
    }
    CodingSpec::new(rate, data_length)
}

/// Single-link outage with the configured evaluation method.
pub fn single_link_outage(cfg: &ScenarioConfig, data_length: u32, snr: Snr) -> Result<Probability> {
    let spec = data_spec(cfg.rate, data_length)?;
    if snr.linear() == 0.0 {
        return Ok(Probability::ONE);
    }
    match cfg.outage_method {
        OutageMethod::ClosedForm => outage_rayleigh_approx(spec, snr, cfg.mu_log_mode),
        OutageMethod::Quadrature => outage_rayleigh_exact(spec, snr),
    }
}

/// Outage of point-to-point transmission over the `Z` link.
pub fn outage_direct(cfg: &ScenarioConfig) -> Result<Probability> {
    let budget = link_budget(cfg)?;
    single_link_outage(cfg, budget.z.data_length(), budget.z.gamma_eff())
}

/// Density of the sum of two independent exponentials with means `g_hi >= g_lo`.
fn sum_density(g_hi: f64, g_lo: f64) -> impl Fn(f64) -> f64 {
    let equal = g_hi - g_lo < 1e-6 * g_hi;
    let mean = 0.5 * (g_hi + g_lo);
    let rate_gap = 1.0 / g_lo - 1.0 / g_hi;
    move |x: f64| {
        if equal {
            x * (-x / mean).exp() / (mean * mean)
        } else {
            -(-x / g_hi).exp() * (-x * rate_gap).exp_m1() / (g_hi - g_lo)
        }
    }
}

/// Outage after combining two independently Rayleigh-faded copies with mean
/// SNRs `g1` and `g2`: the conditional error averaged over the
/// hypoexponential density of their sum.
pub fn outage_mrc(g1: Snr, g2: Snr, spec: CodingSpec) -> Result<Probability> {
    let (g_hi, g_lo) = if g1.linear() >= g2.linear() { (g1.linear(), g2.linear()) } else { (g2.linear(), g1.linear()) };
    if !(g_lo > 0.0 && g_hi.is_finite()) {
        return Err(Error::domain("MRC outage needs positive finite branch SNRs"));
    }
    let density = sum_density(g_hi, g_lo);
    let n = spec.blocklength() as f64;
    let rate = spec.rate();
    let threshold = spec.threshold_snr();
    let split = transition_extent(threshold);
    let integrand = |x: f64| conditional_error(x, n, rate) * density(x);

    let head = transition_quadrature(threshold, &[g_lo, g_hi])
        .integrate(integrand, Support::Finite { lower: 0.0, upper: split })?;
    let tail = Quadrature::new(OUTAGE_ABS_TOL)
        .rel_tol(OUTAGE_REL_TOL)
        .max_intervals(4000)
        .integrate(integrand, Support::SemiInfinite { lower: split })?;
    Ok(Probability::clamped(head.value + tail.value))
}

/// Per-link outages and the DF composite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageBreakdown {
    pub eps_z: Probability,
    pub eps_x: Probability,
    pub eps_srd: Probability,
    pub eps_df: Probability,
}

/// `eps_X eps_Z + (1 - eps_X) eps_SRD`.
pub fn compose_df(eps_z: Probability, eps_x: Probability, eps_srd: Probability) -> Probability {
    let (z, x, s) = (eps_z.value(), eps_x.value(), eps_srd.value());
    Probability::clamped(x * z + (1.0 - x) * s)
}

/// Data blocklength of the combined decoding attempt.
pub fn mrc_data_length(cfg: &ScenarioConfig, budget: &LinkBudget) -> u32 {
    match cfg.mrc_blocklength {
        MrcBlocklength::RelayPhase => budget.y.data_length(),
        MrcBlocklength::Combined => budget.z.data_length() + budget.y.data_length(),
    }
}

/// Decode-and-forward outage with MRC at the destination.
pub fn outage_df(cfg: &ScenarioConfig) -> Result<OutageBreakdown> {
    let budget = link_budget(cfg)?;
    outage_df_with_budget(cfg, &budget)
}

pub(crate) fn outage_df_with_budget(cfg: &ScenarioConfig, budget: &LinkBudget) -> Result<OutageBreakdown> {
    let eps_z = single_link_outage(cfg, budget.z.data_length(), budget.z.gamma_eff())?;
    let eps_x = single_link_outage(cfg, budget.x.data_length(), budget.x.gamma_eff())?;
    let mrc_spec = data_spec(cfg.rate, mrc_data_length(cfg, budget))?;
    let (gz, gy) = (budget.z.gamma_eff(), budget.y.gamma_eff());
    let eps_srd = if gz.linear() == 0.0 && gy.linear() == 0.0 {
        Probability::ONE
    } else if gz.linear() == 0.0 || gy.linear() == 0.0 {
        outage_rayleigh_exact(mrc_spec, if gz.linear() > 0.0 { gz } else { gy })?
    } else {
        outage_mrc(gz, gy, mrc_spec)?
    };
    Ok(OutageBreakdown { eps_z, eps_x, eps_srd, eps_df: compose_df(eps_z, eps_x, eps_srd) })
}

/// Outage, pilot and channel-use accounting of one scheme at one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeOutcome {
    pub epsilon: Probability,
    /// Pilots per phase.
    pub pilots: u32,
    /// Total channel uses across phases.
    pub channel_uses: u32,
    /// Total pilot channel uses across phases.
    pub pilot_uses: u32,
    /// Total data channel uses across phases.
    pub data_uses: u32,
    /// Effective SNR of the source–destination link.
    pub gamma_eff: Snr,
}

pub fn evaluate_scheme(cfg: &ScenarioConfig, scheme: Scheme) -> Result<SchemeOutcome> {
    let budget = link_budget(cfg)?;
    let gamma_eff = budget.z.gamma_eff();
    Ok(match scheme {
        Scheme::Direct => SchemeOutcome {
            epsilon: single_link_outage(cfg, budget.z.data_length(), gamma_eff)?,
            pilots: budget.z.pilots,
            channel_uses: cfg.n_source,
            pilot_uses: budget.z.pilots,
            data_uses: budget.z.data_length(),
            gamma_eff,
        },
        Scheme::DecodeForward => SchemeOutcome {
            epsilon: outage_df_with_budget(cfg, &budget)?.eps_df,
            pilots: budget.z.pilots,
            channel_uses: cfg.n_source + cfg.n_relay,
            pilot_uses: budget.z.pilots + budget.y.pilots,
            data_uses: budget.z.data_length() + budget.y.data_length(),
            gamma_eff,
        },
    })
}

/// Delay of `data_uses` channel uses, in seconds.
pub fn latency(cfg: &ScenarioConfig, data_uses: u32) -> Result<f64> {
    if data_uses < 1 {
        return Err(Error::domain("latency needs at least one channel use"));
    }
    Ok(cfg.symbol_period * data_uses as f64)
}

/// Normalized goodput `(1 - n_p / n) R (1 - eps)` in bits per channel use.
pub fn goodput(n: u32, pilots: u32, rate: f64, eps: Probability) -> Result<f64> {
    if pilots >= n {
        return Err(Error::domain(format!("goodput needs n_p < n, got n_p={pilots}, n={n}")));
    }
    Ok((1.0 - pilots as f64 / n as f64) * rate * (1.0 - eps.value()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{apc_effective_snr, ppc_effective_snr};
    use proptest::prelude::*;

    fn snr(x: f64) -> Snr {
        Snr::new(x).unwrap()
    }

    fn pcsi() -> ScenarioConfig {
        ScenarioConfig { policy: PilotPolicy::PerfectCsi, power_mode: PowerMode::TotalSplit, ..Default::default() }
    }

    #[test]
    fn validation() {
        assert!(ScenarioConfig::default().validate().is_ok());
        for cfg in [
            ScenarioConfig { eta: 1.0, ..Default::default() },
            ScenarioConfig { beta: 0.0, ..Default::default() },
            ScenarioConfig { rate: 0.0, ..Default::default() },
            ScenarioConfig { pilots: PilotCount::Fixed(500), ..Default::default() },
            ScenarioConfig { policy: PilotPolicy::Ppc { kappa: 0.5 }, ..Default::default() },
        ] {
            assert!(matches!(cfg.validate(), Err(Error::Scenario(_))), "{cfg:?}");
        }
    }

    #[test]
    fn perfect_csi_budget_is_the_average_snr() {
        let b = link_budget(&pcsi()).unwrap();
        assert!((b.x.gamma_eff().linear() - 80.0).abs() < 1e-12);
        assert!((b.z.gamma_eff().linear() - 5.0).abs() < 1e-12);
        assert!((b.y.gamma_eff().linear() - 80.0).abs() < 1e-12);
        let literal = ScenarioConfig { gamma_y_distance: GammaYDistance::SourceDestination, ..pcsi() };
        assert!((link_budget(&literal).unwrap().y.gamma_eff().linear() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn estimation_penalty_is_strict() {
        let cfg =
            ScenarioConfig { n_source: 300, n_relay: 300, power_mode: PowerMode::TotalSplit, ..Default::default() };
        let b = link_budget(&cfg).unwrap();
        assert!(b.z.gamma_eff().linear() < 5.0);
        // same number through the closed-form PPC expression
        let direct = ppc_effective_snr(300, b.z.pilots, 3.0, snr(5.0)).unwrap().linear();
        assert!(((b.z.gamma_eff().linear() - direct) / direct).abs() < 1e-12);
        let apc = ScenarioConfig { policy: PilotPolicy::Apc, ..cfg };
        let b = link_budget(&apc).unwrap();
        let direct = apc_effective_snr(300, snr(5.0)).unwrap().linear();
        assert!(((b.z.gamma_eff().linear() - direct) / direct).abs() < 1e-12);
        assert_eq!(b.z.pilots, 1);
    }

    #[test]
    fn direct_is_closed_form_on_z_link() {
        let cfg = ScenarioConfig::default();
        let b = link_budget(&cfg).unwrap();
        let spec = CodingSpec::new(cfg.rate, cfg.n_source - b.z.pilots).unwrap();
        let want = outage_rayleigh_approx(spec, b.z.gamma_eff(), cfg.mu_log_mode).unwrap();
        assert_eq!(outage_direct(&cfg).unwrap(), want);
        let strong = ScenarioConfig { power: snr(1e12), ..Default::default() };
        assert!(outage_direct(&strong).unwrap().value() < 1e-10);
    }

    #[test]
    fn direct_quadrature_reference() {
        // 20 dB, n_S = 564, R = 0.5, perfect CSI: mpmath quadrature reference
        let cfg = ScenarioConfig {
            power: Snr::from_db(20.0).unwrap(),
            n_source: 564,
            n_relay: 564,
            policy: PilotPolicy::PerfectCsi,
            outage_method: OutageMethod::Quadrature,
            ..Default::default()
        };
        let got = outage_direct(&cfg).unwrap().value();
        assert!(((got - DIRECT_20DB_564) / got).abs() < 1e-8, "{got:e}");
    }

    const DIRECT_20DB_564: f64 = 4.152182038108000e-3;

    #[test]
    fn mrc_degenerates_to_single_link() {
        let spec = CodingSpec::new(0.5, 500).unwrap();
        let single = outage_rayleigh_exact(spec, snr(5.0)).unwrap().value();
        let mrc = outage_mrc(snr(5.0), snr(1e-9), spec).unwrap().value();
        assert!((single - mrc).abs() < 1e-6);
    }

    #[test]
    fn mrc_symmetric_and_equal_means() {
        let spec = CodingSpec::new(0.5, 500).unwrap();
        let a = outage_mrc(snr(3.0), snr(40.0), spec).unwrap().value();
        let b = outage_mrc(snr(40.0), snr(3.0), spec).unwrap().value();
        assert!((a - b).abs() <= 1e-12);
        // equal-mean branch against a nearly equal pair through the general density
        let eq = outage_mrc(snr(5.0), snr(5.0), spec).unwrap().value();
        let near = outage_mrc(snr(5.0), snr(5.0 * (1.0 + 1e-4)), spec).unwrap().value();
        assert!(((eq - near) / eq).abs() < 1e-3);
    }

    #[test]
    fn mrc_equal_means_reference() {
        // mpmath: E[cond(X)] with X ~ Gamma(2, 5), n = 500, R = 0.5
        let got = outage_mrc(snr(5.0), snr(5.0), CodingSpec::new(0.5, 500).unwrap()).unwrap().value();
        assert!(((got - MRC_5_5) / got).abs() < 1e-8, "{got:e}");
    }

    const MRC_5_5: f64 = 3.3140488521273032e-3;

    #[test]
    fn mrc_dominates_single_links() {
        let spec = CodingSpec::new(0.5, 300).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let g1 = snr(10f64.powf(-0.5 + 0.3 * i as f64));
                let g2 = snr(10f64.powf(-0.5 + 0.3 * j as f64));
                let m = outage_mrc(g1, g2, spec).unwrap().value();
                let s1 = outage_rayleigh_exact(spec, g1).unwrap().value();
                let s2 = outage_rayleigh_exact(spec, g2).unwrap().value();
                assert!(m <= s1.min(s2), "{g1} {g2}");
            }
        }
    }

    #[test]
    fn df_limits() {
        let z = Probability::new(0.1).unwrap();
        let s = Probability::new(0.01).unwrap();
        assert_eq!(compose_df(z, Probability::ONE, s), z);
        assert_eq!(compose_df(z, Probability::ZERO, s), s);

        // a relay next to the source decodes almost surely
        let near_source = ScenarioConfig { beta: 0.01, ..Default::default() };
        let b = outage_df(&near_source).unwrap();
        assert!(b.eps_x.value() < 1e-6);
        assert!((b.eps_df.value() - b.eps_srd.value()).abs() < 1e-5 * b.eps_srd.value());
    }

    #[test]
    fn cooperation_beats_direct_at_defaults() {
        let cfg = ScenarioConfig { policy: PilotPolicy::PerfectCsi, ..Default::default() };
        assert!(outage_df(&cfg).unwrap().eps_df < outage_direct(&cfg).unwrap());
    }

    #[test]
    fn df_monotone_in_power() {
        let mut prev = 1.0;
        for db in (-5..=25).step_by(5) {
            let cfg = ScenarioConfig { power: Snr::from_db(db as f64).unwrap(), ..Default::default() };
            let b = outage_df(&cfg).unwrap();
            for p in [b.eps_z, b.eps_x, b.eps_srd, b.eps_df] {
                assert!((0.0..=1.0).contains(&p.value()));
            }
            assert!(b.eps_df.value() < prev);
            assert!(b.eps_df <= b.eps_z);
            prev = b.eps_df.value();
        }
    }

    #[test]
    fn latency_examples() {
        let cfg = ScenarioConfig::default();
        assert!((latency(&cfg, 564).unwrap() - 4.69812e-3).abs() < 1e-12);
        assert!((latency(&cfg, 1).unwrap() - 8.33e-6).abs() < 1e-18);
        assert!(latency(&cfg, 0).is_err());
    }

    #[test]
    fn goodput_examples() {
        assert_eq!(goodput(100, 0, 0.5, Probability::ZERO).unwrap(), 0.5);
        assert_eq!(goodput(100, 10, 0.5, Probability::ONE).unwrap(), 0.0);
        let g = goodput(400, 40, 0.5, Probability::new(1e-3).unwrap()).unwrap();
        assert!((g - 0.44955).abs() < 1e-15);
        assert!(goodput(10, 10, 0.5, Probability::ZERO).is_err());
    }

    proptest! {
        #[test]
        fn composite_identity(z in 1e-9f64..1.0, x in 0.0f64..=1.0, s in 0.0f64..1.0) {
            let printed = z * (x + (1.0 - x) * s / z);
            let got = compose_df(
                Probability::new(z).unwrap(), Probability::new(x).unwrap(), Probability::new(s).unwrap(),
            ).value();
            prop_assert!((got - printed).abs() <= 1e-15);
        }
    }
}
