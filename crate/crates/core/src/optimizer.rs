//! Operating points: minimum latency and maximum goodput for a target outage.
//!
//! The search is an exhaustive integer scan over the total blocklength `n`.
//! Direct transmission uses `n` channel uses in one phase; decode-and-forward
//! splits an even `n` into two equal phases. At every candidate the pilot count
//! per phase follows the scenario's pilot rule (the PPC optimum by default).

use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mathcore::Probability;
use crate::relaying::{evaluate_scheme, goodput, latency, ScenarioConfig, Scheme, SchemeOutcome};

/// Smallest and largest admissible outage targets.
pub const TARGET_RANGE: (f64, f64) = (1e-5, 1e-1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Latency,
    Goodput,
}

/// One feasible operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Total channel uses across phases.
    pub n_opt: u32,
    /// Pilots per phase.
    pub n_p_opt: u32,
    pub achieved_eps: Probability,
    pub latency_s: f64,
    pub goodput: f64,
    /// Data channel uses across phases.
    pub data_uses: u32,
}

/// Result for one target; `operating` is `None` when no blocklength in the
/// range meets the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierPoint {
    pub eps_target: Probability,
    pub operating: Option<OperatingPoint>,
}

impl FrontierPoint {
    pub fn is_feasible(&self) -> bool {
        self.operating.is_some()
    }
}

/// Scenario with the phase blocklengths implied by a total blocklength.
pub fn scenario_for(cfg: &ScenarioConfig, scheme: Scheme, n: u32) -> Option<ScenarioConfig> {
    let (n_source, n_relay) = match scheme {
        Scheme::Direct => (n, cfg.n_relay.max(1)),
        Scheme::DecodeForward if n % 2 == 0 && n >= 2 => (n / 2, n / 2),
        Scheme::DecodeForward => return None,
    };
    Some(ScenarioConfig { n_source, n_relay, ..cfg.clone() })
}

fn check_target(eps: Probability) -> Result<()> {
    let (lo, hi) = TARGET_RANGE;
    if !(lo..=hi).contains(&eps.value()) {
        return Err(Error::domain(format!("outage target must lie in [{lo:e}, {hi:e}], got {eps}")));
    }
    Ok(())
}

/// Evaluated candidate blocklength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub n: u32,
    pub outcome: SchemeOutcome,
    pub latency_s: f64,
    pub goodput: f64,
}

impl Candidate {
    fn operating(&self) -> OperatingPoint {
        OperatingPoint {
            n_opt: self.n,
            n_p_opt: self.outcome.pilots,
            achieved_eps: self.outcome.epsilon,
            latency_s: self.latency_s,
            goodput: self.goodput,
            data_uses: self.outcome.data_uses,
        }
    }
}

/// Evaluate one total blocklength; `None` when it leaves no room for data.
pub fn evaluate_candidate(cfg: &ScenarioConfig, scheme: Scheme, n: u32) -> Result<Option<Candidate>> {
    let Some(sc) = scenario_for(cfg, scheme, n) else {
        return Ok(None);
    };
    let phases: &[u32] = match scheme {
        Scheme::Direct => &[sc.n_source],
        Scheme::DecodeForward => &[sc.n_source, sc.n_relay],
    };
    for &phase in phases {
        match sc.phase_pilots(phase) {
            Ok(m) if m < phase => {}
            Ok(_) | Err(Error::Domain(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    if let Err(Error::Scenario(_)) = sc.validate() {
        return Ok(None);
    }
    let outcome = evaluate_scheme(&sc, scheme)?;
    let uses = if cfg.latency_includes_pilots { outcome.data_uses + outcome.pilot_uses } else { outcome.data_uses };
    Ok(Some(Candidate {
        n,
        outcome,
        latency_s: latency(&sc, uses)?,
        goodput: goodput(outcome.channel_uses, outcome.pilot_uses, sc.rate, outcome.epsilon)?,
    }))
}

/// Evaluate every blocklength in `n_range`, in ascending order.
pub fn scan(cfg: &ScenarioConfig, scheme: Scheme, n_range: RangeInclusive<u32>) -> Result<Vec<Candidate>> {
    cfg.validate()?;
    let ns: Vec<u32> = n_range.collect();
    let evaluated: Result<Vec<Option<Candidate>>> =
        ns.par_iter().map(|&n| evaluate_candidate(cfg, scheme, n)).collect();
    Ok(evaluated?.into_iter().flatten().collect())
}

/// Best feasible candidate for a target under an objective. Ties go to the
/// smaller blocklength.
pub fn select(candidates: &[Candidate], eps_target: Probability, objective: Objective) -> Option<OperatingPoint> {
    let mut best: Option<&Candidate> = None;
    for c in candidates.iter().filter(|c| c.outcome.epsilon <= eps_target) {
        let better = match best {
            None => true,
            Some(b) => match objective {
                Objective::Latency => c.latency_s < b.latency_s || (c.latency_s == b.latency_s && c.n < b.n),
                Objective::Goodput => c.goodput > b.goodput || (c.goodput == b.goodput && c.n < b.n),
            },
        };
        if better {
            best = Some(c);
        }
    }
    best.map(Candidate::operating)
}

/// Smallest-latency blocklength meeting `eps_target`.
pub fn min_latency(
    cfg: &ScenarioConfig,
    scheme: Scheme,
    eps_target: Probability,
    n_range: RangeInclusive<u32>,
) -> Result<FrontierPoint> {
    check_target(eps_target)?;
    let candidates = scan(cfg, scheme, n_range)?;
    Ok(FrontierPoint { eps_target, operating: select(&candidates, eps_target, Objective::Latency) })
}

/// Highest-goodput blocklength meeting `eps_target`.
pub fn max_goodput(
    cfg: &ScenarioConfig,
    scheme: Scheme,
    eps_target: Probability,
    n_range: RangeInclusive<u32>,
) -> Result<FrontierPoint> {
    check_target(eps_target)?;
    let candidates = scan(cfg, scheme, n_range)?;
    Ok(FrontierPoint { eps_target, operating: select(&candidates, eps_target, Objective::Goodput) })
}

/// One point per target, in the order given; infeasible targets are kept.
pub fn frontier(
    cfg: &ScenarioConfig,
    scheme: Scheme,
    eps_grid: &[Probability],
    objective: Objective,
    n_range: RangeInclusive<u32>,
) -> Result<Vec<FrontierPoint>> {
    for &eps in eps_grid {
        check_target(eps)?;
    }
    let candidates = scan(cfg, scheme, n_range)?;
    Ok(eps_grid
        .iter()
        .map(|&eps_target| FrontierPoint { eps_target, operating: select(&candidates, eps_target, objective) })
        .collect())
}

/// `1 - reliability / 100` for a reliability in percent.
pub fn target_from_reliability(percent: f64) -> Result<Probability> {
    Probability::new(1.0 - percent / 100.0)
}
