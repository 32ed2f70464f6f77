//! Subcommand bodies: each turns a resolved [`RunConfig`] into a table.

use rayon::prelude::*;

use super::config::{PolicyKind, RunConfig};
use super::table::{sci, Table};
use crate::error::Result;
use crate::estimation::{mmse_variances, optimal_pilot_count, ppc_effective_snr};
use crate::fbl::CodingSpec;
use crate::mathcore::{Probability, Snr};
use crate::montecarlo::{simulate_estimator, simulate_estimator_at, simulate_outage, SimMode, SimSpec};
use crate::optimizer::{frontier, Objective};
use crate::relaying::{
    evaluate_scheme, link_budget, mrc_data_length, outage_df, outage_direct, outage_mrc, OutageMethod, ScenarioConfig,
    Scheme,
};

pub const SCHEMA_SWEEP_SNR: &str = "sweep_snr/1";
pub const SCHEMA_SWEEP_KAPPA: &str = "sweep_kappa/1";
pub const SCHEMA_LATENCY: &str = "latency/1";
pub const SCHEMA_GOODPUT: &str = "goodput/1";
pub const SCHEMA_SIMULATE: &str = "simulate/1";
pub const SCHEMA_SIMULATE_ESTIMATOR: &str = "simulate_estimator/1";

/// Outage against SNR for every configured scheme and policy.
pub fn sweep_snr(cfg: &RunConfig) -> Result<Table> {
    let mut jobs: Vec<(Scheme, PolicyKind, f64)> = Vec::new();
    for &scheme in &cfg.sweep.schemes {
        for &policy in &cfg.sweep.policies {
            for &db in &cfg.sweep.snr_db {
                jobs.push((scheme, policy, db));
            }
        }
    }
    let rows: Result<Vec<Vec<String>>> = jobs
        .par_iter()
        .map(|&(scheme, policy, db)| {
            let sc = cfg.scenario_with(policy, db)?;
            let out = evaluate_scheme(&sc, scheme)?;
            Ok(vec![
                db.to_string(),
                scheme.label().to_string(),
                policy.label().to_string(),
                sci(out.epsilon.value()),
                out.pilots.to_string(),
                sci(out.gamma_eff.linear()),
            ])
        })
        .collect();
    let mut table = Table::new(SCHEMA_SWEEP_SNR, &["snr_db", "scheme", "policy", "epsilon", "n_p_used", "gamma_eff"]);
    rows?.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Optimal pilot count over blocklengths and peak-power factors.
pub fn sweep_kappa(cfg: &RunConfig) -> Result<Table> {
    let power = Snr::from_db(cfg.scenario.power_db)?;
    let mut table = Table::new(SCHEMA_SWEEP_KAPPA, &["n", "kappa", "n_p_opt", "gamma_eff"]);
    for &n in &cfg.sweep.n_list {
        for &kappa in &cfg.sweep.kappa_list {
            let m = optimal_pilot_count(n, kappa, power)?;
            let g = ppc_effective_snr(n, m, kappa, power)?;
            table.push(vec![n.to_string(), kappa.to_string(), m.to_string(), sci(g.linear())]);
        }
    }
    Ok(table)
}

fn reliability_pct(eps: f64) -> String {
    let s = format!("{:.6}", 100.0 * (1.0 - eps));
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Frontier table; the flag is true when no target is feasible.
pub fn frontier_table(cfg: &RunConfig, objective: Objective) -> Result<(Table, bool)> {
    let scenario = cfg.scenario()?;
    let grid: Vec<Probability> = cfg.sweep.eps_grid.iter().map(|&e| Probability::new(e)).collect::<Result<_>>()?;
    let points = frontier(&scenario, cfg.scheme, &grid, objective, cfg.sweep.n_min..=cfg.sweep.n_max)?;
    let schema = match objective {
        Objective::Latency => SCHEMA_LATENCY,
        Objective::Goodput => SCHEMA_GOODPUT,
    };
    let mut table = Table::new(
        schema,
        &["epsilon_target", "reliability_pct", "n_opt", "n_p_opt", "latency_ms", "goodput_bpcu", "feasible"],
    );
    for pt in &points {
        let eps = pt.eps_target.value();
        let mut row = vec![sci(eps), reliability_pct(eps)];
        match pt.operating {
            Some(op) => row.extend([
                op.n_opt.to_string(),
                op.n_p_opt.to_string(),
                sci(op.latency_s * 1e3),
                sci(op.goodput),
                "true".into(),
            ]),
            None => row.extend(["", "", "", ""].map(String::from).into_iter().chain(["false".to_string()])),
        }
        table.push(row);
    }
    let none = points.iter().all(|p| !p.is_feasible());
    Ok((table, none))
}

/// Exact (quadrature) and closed-form analytic values for an outage mode.
pub fn analytic_outage(cfg: &ScenarioConfig, mode: SimMode) -> Result<(f64, f64)> {
    let with = |method| ScenarioConfig { outage_method: method, ..cfg.clone() };
    let (exact, closed) = (with(OutageMethod::Quadrature), with(OutageMethod::ClosedForm));
    Ok(match mode {
        SimMode::Direct => (outage_direct(&exact)?.value(), outage_direct(&closed)?.value()),
        SimMode::RelayDf => (outage_df(&exact)?.eps_df.value(), outage_df(&closed)?.eps_df.value()),
        SimMode::MrcOnly | SimMode::EstimatorCheck => {
            let b = link_budget(cfg)?;
            let spec = CodingSpec::new(cfg.rate, mrc_data_length(cfg, &b))?;
            let v = outage_mrc(b.z.gamma_eff(), b.y.gamma_eff(), spec)?.value();
            (v, v)
        }
    })
}

/// Monte Carlo run next to its analytic counterpart.
pub fn simulate(cfg: &RunConfig) -> Result<Table> {
    let scenario = cfg.scenario()?;
    let sim = &cfg.simulate;
    let spec = SimSpec { samples: sim.samples, seed: sim.seed, scenario, mode: sim.mode, sampling: sim.sampling };
    if sim.mode == SimMode::EstimatorCheck {
        return simulate_estimators(cfg, &spec);
    }
    let r = simulate_outage(&spec)?;
    let (exact, closed) = analytic_outage(&spec.scenario, spec.mode)?;
    let z = if r.std_err > 0.0 { (r.epsilon.value() - exact).abs() / r.std_err } else { 0.0 };
    let mut table = Table::new(
        SCHEMA_SIMULATE,
        &[
            "mode",
            "samples",
            "seed",
            "importance",
            "epsilon_mc",
            "std_err",
            "sample_std_err",
            "epsilon_analytic",
            "epsilon_closed_form",
            "z_score",
        ],
    );
    table.push(vec![
        sim.mode.label().into(),
        r.samples_used.to_string(),
        sim.seed.to_string(),
        r.importance.to_string(),
        sci(r.epsilon.value()),
        sci(r.std_err),
        sci(r.sample_std_err),
        sci(exact),
        sci(closed),
        format!("{z:.3}"),
    ]);
    Ok(table)
}

fn simulate_estimators(cfg: &RunConfig, spec: &SimSpec) -> Result<Table> {
    let sim = &cfg.simulate;
    let mut table = Table::new(
        SCHEMA_SIMULATE_ESTIMATOR,
        &[
            "pilot_energy",
            "pilots",
            "samples",
            "sigma2_hat_mc",
            "sigma2_hat_se",
            "sigma2_hat",
            "sigma2_tilde_mc",
            "sigma2_tilde_se",
            "sigma2_tilde",
        ],
    );
    let pilots = spec.scenario.phase_pilots(spec.scenario.n_source)?.max(1);
    let mut runs = Vec::new();
    for &energy in &sim.pilot_energies {
        runs.push((simulate_estimator_at(energy, pilots, 1.0, sim.samples, sim.seed)?, pilots));
    }
    // the scenario's own pilot energy last
    runs.push((simulate_estimator(spec)?, pilots));
    for (s, m) in runs {
        let r = mmse_variances(s.pilot_energy, 1.0)?;
        table.push(vec![
            sci(s.pilot_energy),
            m.to_string(),
            s.samples_used.to_string(),
            sci(s.sigma2_hat),
            sci(s.sigma2_hat_se),
            sci(r.sigma2_hat),
            sci(s.sigma2_tilde),
            sci(s.sigma2_tilde_se),
            sci(r.sigma2_tilde),
        ]);
    }
    Ok(table)
}
