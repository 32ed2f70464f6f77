//! Monte Carlo oracle for the analytic outage expressions.
//!
//! Each sample draws independent unit-mean exponential fading gains, scales
//! them by the effective link SNRs and averages the conditional error
//! probability (not a hard threshold), so the estimator targets the same
//! functional as the quadrature routines.
//!
//! Samples are split into fixed-size blocks. Block `b` draws from the ChaCha
//! stream `b` of the run seed, and block statistics are merged in block order,
//! so results are bit-identical for any number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimation::{mmse_variances, PilotPolicy};
use crate::fbl::{conditional_error, CodingSpec};
use crate::mathcore::{Probability, Snr};
use crate::relaying::{link_budget, mrc_data_length, ScenarioConfig};

const BLOCK: u64 = 1 << 16;
/// Below this plain estimate the automatic mode switches to importance sampling.
const IMPORTANCE_THRESHOLD: f64 = 1e-4;
const PILOT_RUN: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimMode {
    /// Source–destination link alone.
    Direct,
    /// Decode-and-forward composite.
    RelayDf,
    /// Combined source and relay copies only.
    MrcOnly,
    /// MMSE estimator variances.
    EstimatorCheck,
}

impl SimMode {
    pub fn label(self) -> &'static str {
        match self {
            SimMode::Direct => "direct",
            SimMode::RelayDf => "relay_df",
            SimMode::MrcOnly => "mrc_only",
            SimMode::EstimatorCheck => "estimator_check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Sampling {
    /// Plain sampling, switching to importance sampling when a pilot run
    /// estimates the outage below `1e-4`.
    #[default]
    Auto,
    Plain,
    Importance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSpec {
    pub samples: u64,
    pub seed: u64,
    pub scenario: ScenarioConfig,
    pub mode: SimMode,
    pub sampling: Sampling,
}

impl SimSpec {
    pub fn new(scenario: ScenarioConfig, mode: SimMode, samples: u64, seed: u64) -> Self {
        SimSpec { samples, seed, scenario, mode, sampling: Sampling::Auto }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub epsilon: Probability,
    /// `sqrt(eps (1 - eps) / samples)` for plain sampling; the delta-method
    /// error of the self-normalized estimator under importance sampling.
    pub std_err: f64,
    /// Standard error from the empirical variance of the per-sample values.
    pub sample_std_err: f64,
    pub samples_used: u64,
    pub importance: bool,
}

/// What a single sample evaluates, given unit-mean fading gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// One link: mean SNR and data blocklength.
    Single { snr: f64, blocklength: u32 },
    /// Sum of two branches decoded over `blocklength` channel uses.
    Mrc { snr1: f64, snr2: f64, blocklength: u32 },
    /// `e_X e_Z + (1 - e_X) e_SRD` with the per-sample conditional errors.
    DecodeForward { z: f64, x: f64, y: f64, source_length: u32, mrc_length: u32 },
}

impl Kernel {
    fn means(&self) -> ([f64; 3], usize) {
        match *self {
            Kernel::Single { snr, .. } => ([snr, 0.0, 0.0], 1),
            Kernel::Mrc { snr1, snr2, .. } => ([snr1, snr2, 0.0], 2),
            Kernel::DecodeForward { z, x, y, .. } => ([z, x, y], 3),
        }
    }

    fn eval(&self, g: &[f64; 3], rate: f64) -> f64 {
        match *self {
            Kernel::Single { snr, blocklength } => conditional_error(snr * g[0], blocklength as f64, rate),
            Kernel::Mrc { snr1, snr2, blocklength } => {
                conditional_error(snr1 * g[0] + snr2 * g[1], blocklength as f64, rate)
            }
            Kernel::DecodeForward { z, x, y, source_length, mrc_length } => {
                let e_z = conditional_error(z * g[0], source_length as f64, rate);
                let e_x = conditional_error(x * g[1], source_length as f64, rate);
                let e_srd = conditional_error(z * g[0] + y * g[2], mrc_length as f64, rate);
                e_x * e_z + (1.0 - e_x) * e_srd
            }
        }
    }
}

/// Running sums of one block.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    w: f64,
    wf: f64,
    w2: f64,
    w2f: f64,
    w2f2: f64,
    // plain-sampling mean and centered second moment (Chan merge)
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, weight: f64, value: f64) {
        self.count += 1;
        self.w += weight;
        self.wf += weight * value;
        let w2 = weight * weight;
        self.w2 += w2;
        self.w2f += w2 * value;
        self.w2f2 += w2 * value * value;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.count == 0 {
            return b;
        }
        if b.count == 0 {
            return a;
        }
        let count = a.count + b.count;
        let delta = b.mean - a.mean;
        let (na, nb, n) = (a.count as f64, b.count as f64, count as f64);
        Moments {
            count,
            w: a.w + b.w,
            wf: a.wf + b.wf,
            w2: a.w2 + b.w2,
            w2f: a.w2f + b.w2f,
            w2f2: a.w2f2 + b.w2f2,
            mean: a.mean + delta * nb / n,
            m2: a.m2 + b.m2 + delta * delta * na * nb / n,
        }
    }
}

/// Merge in a fixed pairwise tree so the result only depends on the block order.
fn pairwise(blocks: &[Moments]) -> Moments {
    match blocks.len() {
        0 => Moments::default(),
        1 => blocks[0],
        len => {
            let (l, r) = blocks.split_at(len / 2);
            Moments::merge(pairwise(l), pairwise(r))
        }
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Exponential twisting with a defensive mixture: each gain is drawn from
/// `Exp(1)` or `Exp(lambda)` with equal probability, which keeps the
/// likelihood ratio bounded by 2 per link.
#[derive(Debug, Clone, Copy)]
struct Twist {
    lambda: [f64; 3],
}

impl Twist {
    fn new(kernel: &Kernel, rate: f64) -> Self {
        let (means, links) = kernel.means();
        let threshold = rate.exp2() - 1.0;
        let mut lambda = [1.0; 3];
        for i in 0..links {
            if means[i] > 0.0 {
                lambda[i] = (means[i] / threshold).clamp(1.0, 1e12);
            }
        }
        Twist { lambda }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, links: usize, g: &mut [f64; 3]) -> f64 {
        let mut weight = 1.0;
        for (gain, &l) in g.iter_mut().zip(&self.lambda).take(links) {
            let e: f64 = Exp1.sample(rng);
            let t = if rng.random::<bool>() { e } else { e / l };
            // target density over mixture density
            weight /= 0.5 + 0.5 * l * (-(l - 1.0) * t).exp();
            *gain = t;
        }
        weight
    }
}

fn run_blocks(kernel: &Kernel, rate: f64, samples: u64, seed: u64, twist: Option<Twist>) -> Moments {
    let (_, links) = kernel.means();
    let blocks = samples.div_ceil(BLOCK);
    let parts: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let len = BLOCK.min(samples - b * BLOCK);
            let mut m = Moments::default();
            let mut g = [0.0; 3];
            for _ in 0..len {
                let weight = match &twist {
                    None => {
                        for gi in g.iter_mut().take(links) {
                            *gi = Exp1.sample(&mut rng);
                        }
                        1.0
                    }
                    Some(t) => t.draw(&mut rng, links, &mut g),
                };
                m.push(weight, kernel.eval(&g, rate));
            }
            m
        })
        .collect();
    pairwise(&parts)
}

fn finish(m: Moments, importance: bool) -> SimResult {
    let n = m.count as f64;
    if importance {
        let eps = if m.w > 0.0 { m.wf / m.w } else { 0.0 };
        let var = (m.w2f2 - 2.0 * eps * m.w2f + eps * eps * m.w2).max(0.0);
        let se = var.sqrt() / m.w;
        SimResult {
            epsilon: Probability::clamped(eps),
            std_err: se,
            sample_std_err: se,
            samples_used: m.count,
            importance,
        }
    } else {
        let eps = m.mean.clamp(0.0, 1.0);
        let sample_var = if m.count > 1 { m.m2 / (n - 1.0) } else { 0.0 };
        SimResult {
            epsilon: Probability::clamped(eps),
            std_err: (eps * (1.0 - eps) / n).sqrt(),
            sample_std_err: (sample_var / n).sqrt(),
            samples_used: m.count,
            importance,
        }
    }
}

/// Estimate `E[kernel]` over independent Rayleigh fading on every link.
pub fn simulate_kernel(kernel: Kernel, rate: f64, samples: u64, seed: u64, sampling: Sampling) -> Result<SimResult> {
    if samples < 1 {
        return Err(Error::domain("at least one sample is required"));
    }
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::domain(format!("rate must be positive, got {rate}")));
    }
    let (means, links) = kernel.means();
    if means[..links].iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
        return Err(Error::domain("mean SNRs must be finite and non-negative"));
    }
    let importance = match sampling {
        Sampling::Plain => false,
        Sampling::Importance => true,
        Sampling::Auto => {
            // the pilot run uses the seed's last stream, disjoint from the main run's blocks
            let pilot = run_blocks(&kernel, rate, PILOT_RUN.min(samples), seed ^ 0x9e37_79b9_7f4a_7c15, None);
            pilot.mean < IMPORTANCE_THRESHOLD
        }
    };
    let twist = importance.then(|| Twist::new(&kernel, rate));
    Ok(finish(run_blocks(&kernel, rate, samples, seed, twist), importance))
}

/// Single Rayleigh link with mean SNR `mean_snr`.
pub fn simulate_rayleigh(spec: CodingSpec, mean_snr: Snr, samples: u64, seed: u64) -> Result<SimResult> {
    let kernel = Kernel::Single { snr: mean_snr.linear(), blocklength: spec.blocklength() };
    simulate_kernel(kernel, spec.rate(), samples, seed, Sampling::Auto)
}

/// Kernel of an outage mode at a scenario, using its effective link SNRs.
pub fn scenario_kernel(cfg: &ScenarioConfig, mode: SimMode) -> Result<Kernel> {
    let budget = link_budget(cfg)?;
    let source_length = budget.z.data_length();
    let mrc_length = mrc_data_length(cfg, &budget);
    if source_length < 1 || mrc_length < 1 {
        return Err(Error::Scenario("no channel uses left for data".into()));
    }
    let (z, x, y) = (budget.z.gamma_eff().linear(), budget.x.gamma_eff().linear(), budget.y.gamma_eff().linear());
    match mode {
        SimMode::Direct => Ok(Kernel::Single { snr: z, blocklength: source_length }),
        SimMode::MrcOnly => Ok(Kernel::Mrc { snr1: z, snr2: y, blocklength: mrc_length }),
        SimMode::RelayDf => Ok(Kernel::DecodeForward { z, x, y, source_length, mrc_length }),
        SimMode::EstimatorCheck => Err(Error::InvalidRegime("estimator_check is not an outage mode".into())),
    }
}

/// Outage estimate for the spec's mode and scenario.
pub fn simulate_outage(spec: &SimSpec) -> Result<SimResult> {
    let kernel = scenario_kernel(&spec.scenario, spec.mode)?;
    simulate_kernel(kernel, spec.scenario.rate, spec.samples, spec.seed, spec.sampling)
}

/// Empirical MMSE variances with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorStats {
    pub pilot_energy: f64,
    pub sigma2_hat: f64,
    pub sigma2_hat_se: f64,
    pub sigma2_tilde: f64,
    pub sigma2_tilde_se: f64,
    pub samples_used: u64,
}

fn complex_normal(rng: &mut ChaCha8Rng, variance: f64) -> (f64, f64) {
    let s = (0.5 * variance).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    (s * re, s * im)
}

/// Draw `h ~ CN(0, sigma2)` and unit-variance noise, send `pilots` equal
/// pilot symbols of total energy `pilot_energy`, and apply
/// `h_hat = sigma2 / (sigma2 E + 1) x^H y`.
pub fn simulate_estimator_at(
    pilot_energy: f64,
    pilots: u32,
    sigma2: f64,
    samples: u64,
    seed: u64,
) -> Result<EstimatorStats> {
    let reference = mmse_variances(pilot_energy, sigma2)?;
    if samples < 2 {
        return Err(Error::domain("at least two samples are required"));
    }
    let pilots = pilots.max(1);
    let amplitude = (pilot_energy / pilots as f64).sqrt();
    let gain = sigma2 / (sigma2 * pilot_energy + 1.0);
    debug_assert!((gain * sigma2 * pilot_energy - reference.sigma2_hat).abs() <= 1e-9 * sigma2.max(1.0));

    let blocks = samples.div_ceil(BLOCK);
    let parts: Vec<(Moments, Moments)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let len = BLOCK.min(samples - b * BLOCK);
            let (mut hat, mut tilde) = (Moments::default(), Moments::default());
            for _ in 0..len {
                let (hr, hi) = complex_normal(&mut rng, sigma2);
                // x^H y with real pilots of amplitude a: sum_i a (h a + w_i)
                let (mut sr, mut si) = (0.0, 0.0);
                for _ in 0..pilots {
                    let (wr, wi) = complex_normal(&mut rng, 1.0);
                    sr += amplitude * (hr * amplitude + wr);
                    si += amplitude * (hi * amplitude + wi);
                }
                let (er, ei) = (gain * sr, gain * si);
                hat.push(1.0, er * er + ei * ei);
                tilde.push(1.0, (hr - er).powi(2) + (hi - ei).powi(2));
            }
            (hat, tilde)
        })
        .collect();
    let hat: Vec<Moments> = parts.iter().map(|p| p.0).collect();
    let tilde: Vec<Moments> = parts.iter().map(|p| p.1).collect();
    let (hat, tilde) = (pairwise(&hat), pairwise(&tilde));
    let n = samples as f64;
    Ok(EstimatorStats {
        pilot_energy,
        sigma2_hat: hat.mean,
        sigma2_hat_se: (hat.m2 / (n - 1.0) / n).sqrt(),
        sigma2_tilde: tilde.mean,
        sigma2_tilde_se: (tilde.m2 / (n - 1.0) / n).sqrt(),
        samples_used: samples,
    })
}

/// Estimator check at the scenario's source-phase pilot energy `kappa n_p P`
/// (PPC) or `P` per pilot otherwise, with unit channel variance.
pub fn simulate_estimator(spec: &SimSpec) -> Result<EstimatorStats> {
    if spec.mode != SimMode::EstimatorCheck {
        return Err(Error::InvalidRegime(format!("{} is not the estimator_check mode", spec.mode.label())));
    }
    let cfg = &spec.scenario;
    cfg.validate()?;
    let pilots = cfg.phase_pilots(cfg.n_source)?;
    let p = cfg.power.linear();
    let energy = match cfg.policy {
        PilotPolicy::Ppc { kappa } => kappa * pilots as f64 * p,
        PilotPolicy::Apc | PilotPolicy::PerfectCsi => pilots.max(1) as f64 * p,
    };
    simulate_estimator_at(energy, pilots, 1.0, spec.samples, spec.seed)
}
