//! C ABI over the `urllc_pilot` library.
//!
//! Conventions:
//!
//! * Every fallible function returns an [`UpStatus`] and writes its result
//!   through an out-pointer, which is left untouched on failure.
//! * On failure, [`up_last_error_message`] describes the error. The string
//!   belongs to the calling thread and stays valid until that thread's next
//!   call into this library.
//! * Scenarios are opaque handles created by [`up_scenario_new`] or
//!   [`up_scenario_from_config`] and released with [`up_scenario_free`].
//!   A handle may be read from several threads at once but must not be
//!   modified concurrently.
//! * Panics never cross the boundary; they surface as `UP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use urllc_pilot::cli::config;
use urllc_pilot::estimation::{optimal_pilot_count, PilotPolicy};
use urllc_pilot::fbl::MuLogMode;
use urllc_pilot::mathcore::{q_func, q_inv};
use urllc_pilot::optimizer::{max_goodput, min_latency, FrontierPoint};
use urllc_pilot::relaying::{
    outage_df, outage_direct, GammaYDistance, MrcBlocklength, OutageMethod, PilotCount, PowerMode, ScenarioConfig,
    Scheme,
};
use urllc_pilot::{Error, Probability, Snr};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    /// No blocklength in the range meets the target.
    Infeasible = 4,
    Quadrature = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpScheme {
    Direct = 0,
    DecodeForward = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpPolicy {
    Apc = 0,
    Ppc = 1,
    PerfectCsi = 2,
}

/// Alternative modelling conventions; see the library documentation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpConventions {
    /// 0 per-link power, 1 total power split by eta.
    pub total_power_split: u8,
    /// 0 relay-destination distance, 1 source-destination distance.
    pub gamma_y_source_destination: u8,
    /// 0 relay-phase data length, 1 both phases.
    pub mrc_combined_blocklength: u8,
    /// 0 rate in bits, 1 rate in nats inside the closed-form slope.
    pub mu_log_nats: u8,
    /// 0 closed form, 1 quadrature for single-link outages.
    pub outage_quadrature: u8,
    /// 0 latency counts data symbols only, 1 pilots too.
    pub latency_includes_pilots: u8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UpOutageBreakdown {
    pub eps_z: f64,
    pub eps_x: f64,
    pub eps_srd: f64,
    pub eps_df: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UpOperatingPoint {
    pub eps_target: f64,
    pub n_opt: u32,
    pub n_p_opt: u32,
    pub achieved_eps: f64,
    pub latency_s: f64,
    pub goodput: f64,
    pub data_uses: u32,
}

/// Opaque scenario handle.
pub struct UpScenario {
    config: ScenarioConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(UpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Scenario(_) => UpStatus::InvalidArgument,
            Error::Domain(_) | Error::InvalidRegime(_) => UpStatus::Domain,
            Error::Quadrature { .. } => UpStatus::Quadrature,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(UpStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(UpStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> UpStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UpStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            UpStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be null or valid for writes of `T`.
unsafe fn write<T>(ptr: *mut T, what: &str, value: T) -> Result<(), Fail> {
    match ptr.as_mut() {
        Some(slot) => {
            *slot = value;
            Ok(())
        }
        None => Err(null(what)),
    }
}

/// # Safety
/// `ptr` must be null or a live handle.
unsafe fn handle<'a>(ptr: *const UpScenario) -> Result<&'a ScenarioConfig, Fail> {
    ptr.as_ref().map(|s| &s.config).ok_or_else(|| null("scenario"))
}

/// # Safety
/// `ptr` must be null or a live handle not used concurrently.
unsafe fn handle_mut<'a>(ptr: *mut UpScenario) -> Result<&'a mut ScenarioConfig, Fail> {
    ptr.as_mut().map(|s| &mut s.config).ok_or_else(|| null("scenario"))
}

fn finite(x: f64, what: &str) -> Result<f64, Fail> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(format!("{what} must be finite, got {x}")))
    }
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn up_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the calling thread's last failure, empty after a success.
#[no_mangle]
pub extern "C" fn up_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Scenario with the library defaults (10 dB per link, PPC with kappa 3,
/// 500 channel uses per phase). Never returns null.
#[no_mangle]
pub extern "C" fn up_scenario_new() -> *mut UpScenario {
    Box::into_raw(Box::new(UpScenario { config: ScenarioConfig::default() }))
}

/// Scenario from configuration text (`[scenario]` and `[policy]` sections).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn up_scenario_from_config(text: *const c_char, out: *mut *mut UpScenario) -> UpStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(text).to_str().map_err(|_| invalid("config text is not UTF-8"))?;
        let run = config::parse(text).map_err(|e| invalid(e.to_string()))?;
        let config = run.scenario()?;
        config.validate()?;
        write(out, "out", Box::into_raw(Box::new(UpScenario { config })))
    })
}

/// Release a handle; null is ignored.
///
/// # Safety
/// `scenario` must be null or a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn up_scenario_free(scenario: *mut UpScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Transmit power per link in dB.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn up_scenario_set_power_db(scenario: *mut UpScenario, power_db: f64) -> UpStatus {
    guard(|| {
        let cfg = handle_mut(scenario)?;
        cfg.power = Snr::from_db(finite(power_db, "power")?)?;
        Ok(())
    })
}

/// Coding rate in bits per channel use.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn up_scenario_set_rate(scenario: *mut UpScenario, rate: f64) -> UpStatus {
    guard(|| {
        let rate = finite(rate, "rate")?;
        if rate <= 0.0 {
            return Err(invalid(format!("rate must be positive, got {rate}")));
        }
        handle_mut(scenario)?.rate = rate;
        Ok(())
    })
}

/// Blocklengths of the source and relay phases.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn up_scenario_set_blocklengths(
    scenario: *mut UpScenario,
    n_source: u32,
    n_relay: u32,
) -> UpStatus {
    guard(|| {
        if n_source < 1 || n_relay < 1 {
            return Err(invalid("blocklengths must be at least 1"));
        }
        let cfg = handle_mut(scenario)?;
        cfg.n_source = n_source;
        cfg.n_relay = n_relay;
        Ok(())
    })
}

/// Power split `eta`, relay position `beta` and path-loss exponent `alpha`.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn up_scenario_set_geometry(
    scenario: *mut UpScenario,
    eta: f64,
    beta: f64,
    alpha: f64,
) -> UpStatus {
    guard(|| {
        let cfg = handle_mut(scenario)?;
        let candidate = ScenarioConfig {
            eta: finite(eta, "eta")?,
            beta: finite(beta, "beta")?,
            alpha: finite(alpha, "alpha")?,
            ..cfg.clone()
        };
        candidate.validate()?;
        *cfg = candidate;
        Ok(())
    })
}

/// Pilot policy, one of `UpPolicy`; `kappa` is only read for PPC.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn up_scenario_set_policy(scenario: *mut UpScenario, policy: u32, kappa: f64) -> UpStatus {
    guard(|| {
        let policy = match policy {
            p if p == UpPolicy::Apc as u32 => PilotPolicy::Apc,
            p if p == UpPolicy::Ppc as u32 => PilotPolicy::ppc(finite(kappa, "kappa")?)?,
            p if p == UpPolicy::PerfectCsi as u32 => PilotPolicy::PerfectCsi,
            p => return Err(invalid(format!("unknown policy {p}"))),
        };
        handle_mut(scenario)?.policy = policy;
        Ok(())
    })
}

/// Pilots per phase under PPC; 0 selects the optimum.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn up_scenario_set_pilots(scenario: *mut UpScenario, pilots: u32) -> UpStatus {
    guard(|| {
        handle_mut(scenario)?.pilots = if pilots == 0 { PilotCount::Optimal } else { PilotCount::Fixed(pilots) };
        Ok(())
    })
}

/// Modelling conventions; every field is 0 or 1.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn up_scenario_set_conventions(
    scenario: *mut UpScenario,
    conventions: UpConventions,
) -> UpStatus {
    guard(|| {
        let c = conventions;
        let flags = [
            c.total_power_split,
            c.gamma_y_source_destination,
            c.mrc_combined_blocklength,
            c.mu_log_nats,
            c.outage_quadrature,
            c.latency_includes_pilots,
        ];
        if flags.iter().any(|&f| f > 1) {
            return Err(invalid("convention flags must be 0 or 1"));
        }
        let cfg = handle_mut(scenario)?;
        cfg.power_mode = if c.total_power_split == 1 { PowerMode::TotalSplit } else { PowerMode::PerLink };
        cfg.gamma_y_distance = if c.gamma_y_source_destination == 1 {
            GammaYDistance::SourceDestination
        } else {
            GammaYDistance::RelayDestination
        };
        cfg.mrc_blocklength =
            if c.mrc_combined_blocklength == 1 { MrcBlocklength::Combined } else { MrcBlocklength::RelayPhase };
        cfg.mu_log_mode = if c.mu_log_nats == 1 { MuLogMode::Nats } else { MuLogMode::Bits };
        cfg.outage_method = if c.outage_quadrature == 1 { OutageMethod::Quadrature } else { OutageMethod::ClosedForm };
        cfg.latency_includes_pilots = c.latency_includes_pilots == 1;
        Ok(())
    })
}

/// Outage of direct transmission.
///
/// # Safety
/// `scenario` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn up_outage_direct(scenario: *const UpScenario, out: *mut f64) -> UpStatus {
    guard(|| {
        let cfg = handle(scenario)?;
        if out.is_null() {
            return Err(null("out"));
        }
        write(out, "out", outage_direct(cfg)?.value())
    })
}

/// Decode-and-forward outage with its per-link parts.
///
/// # Safety
/// `scenario` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn up_outage_df(scenario: *const UpScenario, out: *mut UpOutageBreakdown) -> UpStatus {
    guard(|| {
        let cfg = handle(scenario)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let b = outage_df(cfg)?;
        write(
            out,
            "out",
            UpOutageBreakdown {
                eps_z: b.eps_z.value(),
                eps_x: b.eps_x.value(),
                eps_srd: b.eps_srd.value(),
                eps_df: b.eps_df.value(),
            },
        )
    })
}

fn scheme(s: u32) -> Result<Scheme, Fail> {
    match s {
        s if s == UpScheme::Direct as u32 => Ok(Scheme::Direct),
        s if s == UpScheme::DecodeForward as u32 => Ok(Scheme::DecodeForward),
        s => Err(invalid(format!("unknown scheme {s}"))),
    }
}

unsafe fn operating(point: FrontierPoint, out: *mut UpOperatingPoint) -> Result<(), Fail> {
    let Some(op) = point.operating else {
        return Err(Fail(
            UpStatus::Infeasible,
            format!("no blocklength in the range meets outage {}", point.eps_target),
        ));
    };
    write(
        out,
        "out",
        UpOperatingPoint {
            eps_target: point.eps_target.value(),
            n_opt: op.n_opt,
            n_p_opt: op.n_p_opt,
            achieved_eps: op.achieved_eps.value(),
            latency_s: op.latency_s,
            goodput: op.goodput,
            data_uses: op.data_uses,
        },
    )
}

type Search =
    fn(&ScenarioConfig, Scheme, Probability, std::ops::RangeInclusive<u32>) -> urllc_pilot::Result<FrontierPoint>;

unsafe fn optimize(
    search: Search,
    scenario_ptr: *const UpScenario,
    scheme_sel: u32,
    eps_target: f64,
    n_min: u32,
    n_max: u32,
    out: *mut UpOperatingPoint,
) -> UpStatus {
    guard(|| {
        let cfg = handle(scenario_ptr)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if n_min > n_max {
            return Err(invalid(format!("empty blocklength range {n_min}..={n_max}")));
        }
        let eps = Probability::new(eps_target)?;
        operating(search(cfg, scheme(scheme_sel)?, eps, n_min..=n_max)?, out)
    })
}

/// Smallest-latency total blocklength in `[n_min, n_max]` meeting
/// `eps_target`, for `scheme` one of `UpScheme`; `UP_STATUS_INFEASIBLE`
/// when none does.
///
/// # Safety
/// `scenario` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn up_min_latency(
    scenario: *const UpScenario,
    scheme: u32,
    eps_target: f64,
    n_min: u32,
    n_max: u32,
    out: *mut UpOperatingPoint,
) -> UpStatus {
    optimize(min_latency, scenario, scheme, eps_target, n_min, n_max, out)
}

/// Highest-goodput total blocklength in `[n_min, n_max]` meeting
/// `eps_target`, for `scheme` one of `UpScheme`; `UP_STATUS_INFEASIBLE`
/// when none does.
///
/// # Safety
/// `scenario` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn up_max_goodput(
    scenario: *const UpScenario,
    scheme: u32,
    eps_target: f64,
    n_min: u32,
    n_max: u32,
    out: *mut UpOperatingPoint,
) -> UpStatus {
    optimize(max_goodput, scenario, scheme, eps_target, n_min, n_max, out)
}

/// Gaussian tail probability.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn up_q_func(x: f64, out: *mut f64) -> UpStatus {
    guard(|| {
        if x.is_nan() {
            return Err(invalid("x is NaN"));
        }
        write(out, "out", q_func(x).value())
    })
}

/// Inverse Gaussian tail probability for `0 < p < 1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn up_q_inv(p: f64, out: *mut f64) -> UpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        write(out, "out", q_inv(p)?)
    })
}

/// Pilot count maximizing the PPC effective SNR at blocklength `n`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn up_optimal_pilot_count(n: u32, kappa: f64, power_linear: f64, out: *mut u32) -> UpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let power = Snr::new(finite(power_linear, "power")?)?;
        write(out, "out", optimal_pilot_count(n, kappa, power)?)
    })
}
