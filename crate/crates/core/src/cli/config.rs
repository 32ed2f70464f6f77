//! Run configuration: flat `key = value` text with `[scenario]`, `[policy]`,
//! `[sweep]` and `[simulate]` sections.
//!
//! Powers are given in dB here and converted to linear SNR when a
//! [`ScenarioConfig`] is built. A `[manifest]` section is skipped, so a run
//! manifest can be fed back as a configuration.

use std::fmt::{self, Write as _};

use crate::estimation::PilotPolicy;
use crate::fbl::MuLogMode;
use crate::mathcore::Snr;
use crate::montecarlo::{Sampling, SimMode};
use crate::relaying::{GammaYDistance, MrcBlocklength, OutageMethod, PilotCount, PowerMode, ScenarioConfig, Scheme};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based line in the configuration text, if the error has one.
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        ConfigError { line: None, message: message.into() }
    }

    fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError { line: Some(line), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config line {line}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Apc,
    Ppc,
    Pcsi,
}

impl PolicyKind {
    pub fn label(self) -> &'static str {
        match self {
            PolicyKind::Apc => "apc",
            PolicyKind::Ppc => "ppc",
            PolicyKind::Pcsi => "pcsi",
        }
    }

    pub fn with_kappa(self, kappa: f64) -> PilotPolicy {
        match self {
            PolicyKind::Apc => PilotPolicy::Apc,
            PolicyKind::Ppc => PilotPolicy::Ppc { kappa },
            PolicyKind::Pcsi => PilotPolicy::PerfectCsi,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSection {
    pub power_db: f64,
    pub eta: f64,
    pub beta: f64,
    pub alpha: f64,
    pub rate: f64,
    pub n_source: u32,
    pub n_relay: u32,
    pub pilots: PilotCount,
    pub symbol_period: f64,
    pub power_mode: PowerMode,
    pub gamma_y_mode: GammaYDistance,
    pub mrc_n_mode: MrcBlocklength,
    pub mu_log_mode: MuLogMode,
    pub outage_method: OutageMethod,
    pub latency_includes_pilots: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub snr_db: Vec<f64>,
    pub kappa_list: Vec<f64>,
    pub n_list: Vec<u32>,
    pub eps_grid: Vec<f64>,
    pub n_min: u32,
    pub n_max: u32,
    pub schemes: Vec<Scheme>,
    pub policies: Vec<PolicyKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateSection {
    pub mode: SimMode,
    pub samples: u64,
    pub seed: u64,
    pub sampling: Sampling,
    pub pilot_energies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioSection,
    pub policy: PolicyKind,
    pub kappa: f64,
    /// Scheme for single-scheme commands.
    pub scheme: Scheme,
    pub sweep: SweepSection,
    pub simulate: SimulateSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = ScenarioConfig::default();
        RunConfig {
            scenario: ScenarioSection {
                power_db: 10.0,
                eta: s.eta,
                beta: s.beta,
                alpha: s.alpha,
                rate: s.rate,
                n_source: s.n_source,
                n_relay: s.n_relay,
                pilots: s.pilots,
                symbol_period: s.symbol_period,
                power_mode: s.power_mode,
                gamma_y_mode: s.gamma_y_distance,
                mrc_n_mode: s.mrc_blocklength,
                mu_log_mode: s.mu_log_mode,
                outage_method: s.outage_method,
                latency_includes_pilots: s.latency_includes_pilots,
            },
            policy: PolicyKind::Ppc,
            kappa: 3.0,
            scheme: Scheme::DecodeForward,
            sweep: SweepSection {
                snr_db: (0..=12).map(|i| -5.0 + 2.5 * i as f64).collect(),
                kappa_list: vec![2.0, 4.0, 8.0],
                n_list: (1..=10).map(|i| 100 * i).collect(),
                eps_grid: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
                n_min: 2,
                n_max: 2000,
                schemes: vec![Scheme::Direct, Scheme::DecodeForward],
                policies: vec![PolicyKind::Apc, PolicyKind::Ppc, PolicyKind::Pcsi],
            },
            simulate: SimulateSection {
                mode: SimMode::Direct,
                samples: 1_000_000,
                seed: 1,
                sampling: Sampling::Auto,
                pilot_energies: vec![0.1, 1.0, 10.0, 100.0],
            },
        }
    }
}

impl RunConfig {
    /// Scenario at the configured power with the given policy.
    pub fn scenario_with(&self, policy: PolicyKind, power_db: f64) -> crate::Result<ScenarioConfig> {
        let s = &self.scenario;
        Ok(ScenarioConfig {
            power: Snr::from_db(power_db)?,
            eta: s.eta,
            beta: s.beta,
            alpha: s.alpha,
            rate: s.rate,
            n_source: s.n_source,
            n_relay: s.n_relay,
            pilots: s.pilots,
            policy: policy.with_kappa(self.kappa),
            symbol_period: s.symbol_period,
            power_mode: s.power_mode,
            gamma_y_distance: s.gamma_y_mode,
            mrc_blocklength: s.mrc_n_mode,
            mu_log_mode: s.mu_log_mode,
            outage_method: s.outage_method,
            latency_includes_pilots: s.latency_includes_pilots,
        })
    }

    pub fn scenario(&self) -> crate::Result<ScenarioConfig> {
        self.scenario_with(self.policy, self.scenario.power_db)
    }

    /// Check everything a command might use.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let cfg = self.scenario().map_err(|e| ConfigError::new(e.to_string()))?;
        cfg.validate().map_err(|e| ConfigError::new(e.to_string()))?;
        let sw = &self.sweep;
        if sw.snr_db.iter().any(|x| !x.is_finite()) {
            return Err(ConfigError::new("snr_db values must be finite"));
        }
        if sw.kappa_list.iter().any(|k| !(*k >= 1.0 && k.is_finite())) {
            return Err(ConfigError::new("kappa_list entries must be >= 1"));
        }
        if sw.eps_grid.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return Err(ConfigError::new("eps_grid entries must lie in (0, 1)"));
        }
        if sw.n_min > sw.n_max {
            return Err(ConfigError::new(format!("n_min {} exceeds n_max {}", sw.n_min, sw.n_max)));
        }
        if self.simulate.samples < 2 {
            return Err(ConfigError::new("samples must be at least 2"));
        }
        if self.simulate.pilot_energies.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
            return Err(ConfigError::new("pilot_energies must be finite and non-negative"));
        }
        Ok(())
    }

    /// Canonical text form; parsing it gives back the same configuration.
    pub fn render(&self) -> String {
        let s = &self.scenario;
        let sw = &self.sweep;
        let sim = &self.simulate;
        let pilots = match s.pilots {
            PilotCount::Optimal => "optimal".to_string(),
            PilotCount::Fixed(m) => m.to_string(),
        };
        let sections: [(&str, Vec<(&str, String)>); 4] = [
            (
                "scenario",
                vec![
                    ("power_db", s.power_db.to_string()),
                    ("eta", s.eta.to_string()),
                    ("beta", s.beta.to_string()),
                    ("alpha", s.alpha.to_string()),
                    ("rate", s.rate.to_string()),
                    ("n_source", s.n_source.to_string()),
                    ("n_relay", s.n_relay.to_string()),
                    ("pilots", pilots),
                    ("symbol_period", s.symbol_period.to_string()),
                    ("power_mode", power_mode_label(s.power_mode).into()),
                    ("gamma_y_mode", gamma_y_label(s.gamma_y_mode).into()),
                    ("mrc_n_mode", mrc_label(s.mrc_n_mode).into()),
                    ("mu_log_mode", s.mu_log_mode.label().into()),
                    ("outage_method", outage_method_label(s.outage_method).into()),
                    ("latency_includes_pilots", s.latency_includes_pilots.to_string()),
                ],
            ),
            (
                "policy",
                vec![
                    ("policy", self.policy.label().into()),
                    ("kappa", self.kappa.to_string()),
                    ("scheme", self.scheme.label().into()),
                ],
            ),
            (
                "sweep",
                vec![
                    ("snr_db", join(&sw.snr_db)),
                    ("kappa_list", join(&sw.kappa_list)),
                    ("n_list", join(&sw.n_list)),
                    ("eps_grid", join(&sw.eps_grid)),
                    ("n_min", sw.n_min.to_string()),
                    ("n_max", sw.n_max.to_string()),
                    ("schemes", sw.schemes.iter().map(|s| s.label()).collect::<Vec<_>>().join(", ")),
                    ("policies", sw.policies.iter().map(|p| p.label()).collect::<Vec<_>>().join(", ")),
                ],
            ),
            (
                "simulate",
                vec![
                    ("mode", sim.mode.label().into()),
                    ("samples", sim.samples.to_string()),
                    ("seed", sim.seed.to_string()),
                    ("sampling", sampling_label(sim.sampling).into()),
                    ("pilot_energies", join(&sim.pilot_energies)),
                ],
            ),
        ];
        let mut out = String::new();
        for (i, (name, entries)) in sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "[{name}]");
            for (k, v) in entries {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

pub fn power_mode_label(m: PowerMode) -> &'static str {
    match m {
        PowerMode::PerLink => "per_link",
        PowerMode::TotalSplit => "total_split",
    }
}

pub fn gamma_y_label(m: GammaYDistance) -> &'static str {
    match m {
        GammaYDistance::RelayDestination => "drd",
        GammaYDistance::SourceDestination => "dsd",
    }
}

pub fn mrc_label(m: MrcBlocklength) -> &'static str {
    match m {
        MrcBlocklength::RelayPhase => "relay",
        MrcBlocklength::Combined => "combined",
    }
}

pub fn outage_method_label(m: OutageMethod) -> &'static str {
    match m {
        OutageMethod::ClosedForm => "closed_form",
        OutageMethod::Quadrature => "quadrature",
    }
}

pub fn sampling_label(m: Sampling) -> &'static str {
    match m {
        Sampling::Auto => "auto",
        Sampling::Plain => "plain",
        Sampling::Importance => "importance",
    }
}

fn choice<T: Copy>(value: &str, options: &[(&str, T)]) -> Result<T, String> {
    options.iter().find(|(label, _)| *label == value).map(|(_, v)| *v).ok_or_else(|| {
        let names: Vec<&str> = options.iter().map(|(l, _)| *l).collect();
        format!("expected one of {}, got `{value}`", names.join(", "))
    })
}

pub fn parse_scheme(v: &str) -> Result<Scheme, String> {
    choice(v, &[("dt", Scheme::Direct), ("df", Scheme::DecodeForward)])
}

pub fn parse_policy(v: &str) -> Result<PolicyKind, String> {
    choice(v, &[("apc", PolicyKind::Apc), ("ppc", PolicyKind::Ppc), ("pcsi", PolicyKind::Pcsi)])
}

pub fn parse_gamma_y(v: &str) -> Result<GammaYDistance, String> {
    choice(v, &[("drd", GammaYDistance::RelayDestination), ("dsd", GammaYDistance::SourceDestination)])
}

pub fn parse_mrc(v: &str) -> Result<MrcBlocklength, String> {
    choice(v, &[("relay", MrcBlocklength::RelayPhase), ("combined", MrcBlocklength::Combined)])
}

pub fn parse_mu_log(v: &str) -> Result<MuLogMode, String> {
    choice(v, &[("bits", MuLogMode::Bits), ("nats", MuLogMode::Nats)])
}

fn parse_f64(v: &str) -> Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("expected a number, got `{v}`"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("expected a finite number, got `{v}`"))
    }
}

fn parse_int<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("expected a non-negative integer, got `{v}`"))
}

fn parse_bool(v: &str) -> Result<bool, String> {
    choice(v, &[("true", true), ("false", false)])
}

fn parse_list<T>(v: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let items: Result<Vec<T>, String> = v.split(',').map(|s| item(s.trim())).collect();
    let items = items?;
    if items.is_empty() {
        return Err("expected a non-empty list".into());
    }
    Ok(items)
}

/// `start:stop:step` (inclusive) or a comma-separated list.
fn parse_f64_grid(v: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (parse_f64(start)?, parse_f64(stop)?, parse_f64(step)?);
            if !(step > 0.0) || stop < start {
                return Err(format!("range `{v}` needs start <= stop and a positive step"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            if count > 100_000 {
                return Err(format!("range `{v}` has too many points"));
            }
            Ok((0..=count).map(|i| start + step * i as f64).collect())
        }
        [_] => parse_list(v, parse_f64),
        _ => Err(format!("expected `start:stop:step` or a list, got `{v}`")),
    }
}

fn parse_u32_grid(v: &str) -> Result<Vec<u32>, String> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step): (u32, u32, u32) = (parse_int(start)?, parse_int(stop)?, parse_int(step)?);
            if step == 0 || stop < start {
                return Err(format!("range `{v}` needs start <= stop and a positive step"));
            }
            Ok((start..=stop).step_by(step as usize).collect())
        }
        [_] => parse_list(v, parse_int),
        _ => Err(format!("expected `start:stop:step` or a list, got `{v}`")),
    }
}

fn apply(cfg: &mut RunConfig, section: &str, key: &str, v: &str) -> Result<(), String> {
    let s = &mut cfg.scenario;
    match (section, key) {
        ("scenario", "power_db") => s.power_db = parse_f64(v)?,
        ("scenario", "eta") => s.eta = parse_f64(v)?,
        ("scenario", "beta") => s.beta = parse_f64(v)?,
        ("scenario", "alpha") => s.alpha = parse_f64(v)?,
        ("scenario", "rate") => s.rate = parse_f64(v)?,
        ("scenario", "n_source") => s.n_source = parse_int(v)?,
        ("scenario", "n_relay") => s.n_relay = parse_int(v)?,
        ("scenario", "pilots") => {
            s.pilots = if v == "optimal" { PilotCount::Optimal } else { PilotCount::Fixed(parse_int(v)?) }
        }
        ("scenario", "symbol_period") => s.symbol_period = parse_f64(v)?,
        ("scenario", "power_mode") => {
            s.power_mode = choice(v, &[("per_link", PowerMode::PerLink), ("total_split", PowerMode::TotalSplit)])?
        }
        ("scenario", "gamma_y_mode") => s.gamma_y_mode = parse_gamma_y(v)?,
        ("scenario", "mrc_n_mode") => s.mrc_n_mode = parse_mrc(v)?,
        ("scenario", "mu_log_mode") => s.mu_log_mode = parse_mu_log(v)?,
        ("scenario", "outage_method") => {
            s.outage_method =
                choice(v, &[("closed_form", OutageMethod::ClosedForm), ("quadrature", OutageMethod::Quadrature)])?
        }
        ("scenario", "latency_includes_pilots") => s.latency_includes_pilots = parse_bool(v)?,
        ("policy", "policy") => cfg.policy = parse_policy(v)?,
        ("policy", "kappa") => cfg.kappa = parse_f64(v)?,
        ("policy", "scheme") => cfg.scheme = parse_scheme(v)?,
        ("sweep", "snr_db") => cfg.sweep.snr_db = parse_f64_grid(v)?,
        ("sweep", "kappa_list") => cfg.sweep.kappa_list = parse_f64_grid(v)?,
        ("sweep", "n_list") => cfg.sweep.n_list = parse_u32_grid(v)?,
        ("sweep", "eps_grid") => cfg.sweep.eps_grid = parse_list(v, parse_f64)?,
        ("sweep", "n_min") => cfg.sweep.n_min = parse_int(v)?,
        ("sweep", "n_max") => cfg.sweep.n_max = parse_int(v)?,
        ("sweep", "schemes") => cfg.sweep.schemes = parse_list(v, parse_scheme)?,
        ("sweep", "policies") => cfg.sweep.policies = parse_list(v, parse_policy)?,
        ("simulate", "mode") => {
            cfg.simulate.mode = choice(
                v,
                &[
                    ("direct", SimMode::Direct),
                    ("relay_df", SimMode::RelayDf),
                    ("mrc_only", SimMode::MrcOnly),
                    ("estimator_check", SimMode::EstimatorCheck),
                ],
            )?
        }
        ("simulate", "samples") => cfg.simulate.samples = parse_int(v)?,
        ("simulate", "seed") => cfg.simulate.seed = parse_int(v)?,
        ("simulate", "sampling") => {
            cfg.simulate.sampling = choice(
                v,
                &[("auto", Sampling::Auto), ("plain", Sampling::Plain), ("importance", Sampling::Importance)],
            )?
        }
        ("simulate", "pilot_energies") => cfg.simulate.pilot_energies = parse_list(v, parse_f64)?,
        _ => return Err(format!("unknown key `{key}` in section [{section}]")),
    }
    Ok(())
}

/// Parse configuration text on top of the defaults.
pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut section: Option<String> = None;
    let mut seen = std::collections::HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::at(line_no, format!("malformed section header `{line}`")))?
                .trim();
            if !matches!(name, "scenario" | "policy" | "sweep" | "simulate" | "manifest") {
                return Err(ConfigError::at(line_no, format!("unknown section [{name}]")));
            }
            section = Some(name.to_string());
            continue;
        }
        let Some(section) = section.as_deref() else {
            return Err(ConfigError::at(line_no, "key outside of any section"));
        };
        if section == "manifest" {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line_no, format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert((section.to_string(), key.to_string())) {
            return Err(ConfigError::at(line_no, format!("duplicate key `{key}` in section [{section}]")));
        }
        apply(&mut cfg, section, key, value).map_err(|m| ConfigError::at(line_no, m))?;
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        let text = cfg.render();
        assert_eq!(parse(&text).unwrap(), cfg);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn edited_round_trip() {
        let text = "[scenario]\npower_db = 20 # per link\nrate = 0.25\npilots = 7\nmu_log_mode = nats\n\
                    [policy]\npolicy = apc\n[sweep]\nsnr_db = 0:10:2.5\nn_list = 100:300:100\n\
                    schemes = df\n[simulate]\nmode = relay_df\nseed = 42\n";
        let cfg = parse(text).unwrap();
        assert_eq!(cfg.scenario.power_db, 20.0);
        assert_eq!(cfg.scenario.pilots, PilotCount::Fixed(7));
        assert_eq!(cfg.scenario.mu_log_mode, MuLogMode::Nats);
        assert_eq!(cfg.policy, PolicyKind::Apc);
        assert_eq!(cfg.sweep.snr_db, vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        assert_eq!(cfg.sweep.n_list, vec![100, 200, 300]);
        assert_eq!(cfg.sweep.schemes, vec![Scheme::DecodeForward]);
        assert_eq!(cfg.simulate.mode, SimMode::RelayDf);
        assert_eq!(parse(&cfg.render()).unwrap(), cfg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("[scenario]\n\neta = x\n", 3),
            ("eta = 0.5\n", 1),
            ("[scenario]\nfoo = 1\n", 2),
            ("[nope]\n", 1),
            ("[scenario]\neta = 0.5\neta = 0.4\n", 3),
            ("[policy]\npolicy = magic\n", 2),
            ("[sweep]\nsnr_db = 5:0:1\n", 2),
            ("[scenario]\njunk\n", 2),
        ];
        for (text, line) in cases {
            let err = parse(text).unwrap_err();
            assert_eq!(err.line, Some(line), "{text:?}: {err}");
            assert!(err.to_string().starts_with(&format!("config line {line}:")));
        }
    }

    #[test]
    fn manifest_section_is_ignored() {
        let text = "[manifest]\nversion = 9\nanything = goes\n[scenario]\neta = 0.4\n";
        assert_eq!(parse(text).unwrap().scenario.eta, 0.4);
    }

    #[test]
    fn validation_catches_out_of_range_values() {
        let cfg = parse("[scenario]\neta = 1.5\n").unwrap();
        assert!(cfg.validate().is_err());
        let cfg = parse("[sweep]\nkappa_list = 0.5\n").unwrap();
        assert!(cfg.validate().is_err());
    }
}
