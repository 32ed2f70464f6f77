use std::ffi::{CStr, CString};
use std::ptr;

use urllc_pilot::mathcore::q_func;
use urllc_pilot::optimizer::min_latency;
use urllc_pilot::relaying::{outage_df, ScenarioConfig, Scheme};
use urllc_pilot::{Probability, Snr};
use urllc_pilot_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(up_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(up_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn default_scenario_matches_the_library() {
    let h = up_scenario_new();
    let mut b = UpOutageBreakdown::default();
    assert_eq!(unsafe { up_outage_df(h, &mut b) }, UpStatus::Ok);
    let want = outage_df(&ScenarioConfig::default()).unwrap();
    assert_eq!(b.eps_df, want.eps_df.value());
    assert_eq!(b.eps_z, want.eps_z.value());
    let mut direct = 0.0;
    assert_eq!(unsafe { up_outage_direct(h, &mut direct) }, UpStatus::Ok);
    assert_eq!(direct, want.eps_z.value());
    assert_eq!(last_error(), "");
    unsafe { up_scenario_free(h) };
}

#[test]
fn setters_change_results() {
    let h = up_scenario_new();
    let mut low = 0.0;
    let mut high = 0.0;
    unsafe {
        assert_eq!(up_outage_direct(h, &mut low), UpStatus::Ok);
        assert_eq!(up_scenario_set_power_db(h, 20.0), UpStatus::Ok);
        assert_eq!(up_outage_direct(h, &mut high), UpStatus::Ok);
        assert!(high < low);
        assert_eq!(up_scenario_set_policy(h, UpPolicy::PerfectCsi as u32, 0.0), UpStatus::Ok);
        assert_eq!(up_scenario_set_blocklengths(h, 300, 300), UpStatus::Ok);
        assert_eq!(up_scenario_set_rate(h, 0.25), UpStatus::Ok);
        assert_eq!(up_scenario_set_geometry(h, 0.5, 0.3, 3.0), UpStatus::Ok);
        assert_eq!(up_scenario_set_pilots(h, 0), UpStatus::Ok);
        let conv = UpConventions {
            total_power_split: 0,
            gamma_y_source_destination: 0,
            mrc_combined_blocklength: 1,
            mu_log_nats: 0,
            outage_quadrature: 1,
            latency_includes_pilots: 0,
        };
        assert_eq!(up_scenario_set_conventions(h, conv), UpStatus::Ok);
        let mut b = UpOutageBreakdown::default();
        assert_eq!(up_outage_df(h, &mut b), UpStatus::Ok);
        assert!(b.eps_df <= b.eps_z);
        up_scenario_free(h);
    }
}

#[test]
fn invalid_arguments_are_reported() {
    let h = up_scenario_new();
    unsafe {
        assert_eq!(up_scenario_set_geometry(h, 1.5, 0.5, 4.0), UpStatus::InvalidArgument);
        assert!(last_error().contains("eta"), "{}", last_error());
        assert_eq!(up_scenario_set_rate(h, f64::NAN), UpStatus::InvalidArgument);
        assert_eq!(up_scenario_set_policy(h, 9, 3.0), UpStatus::InvalidArgument);
        assert_eq!(up_scenario_set_policy(h, UpPolicy::Ppc as u32, 0.5), UpStatus::Domain);
        let bad = UpConventions {
            total_power_split: 2,
            gamma_y_source_destination: 0,
            mrc_combined_blocklength: 0,
            mu_log_nats: 0,
            outage_quadrature: 0,
            latency_includes_pilots: 0,
        };
        assert_eq!(up_scenario_set_conventions(h, bad), UpStatus::InvalidArgument);
        let mut x = 0.0;
        assert_eq!(up_q_inv(1.5, &mut x), UpStatus::Domain);
        assert_eq!(x, 0.0);
        let mut op = UpOperatingPoint::default();
        assert_eq!(up_min_latency(h, 7, 1e-3, 2, 100, &mut op), UpStatus::InvalidArgument);
        assert_eq!(up_min_latency(h, UpScheme::Direct as u32, 1e-3, 100, 2, &mut op), UpStatus::InvalidArgument);
        assert_eq!(up_min_latency(h, UpScheme::Direct as u32, 0.5, 2, 100, &mut op), UpStatus::Domain);
        // a success clears the message
        assert_eq!(up_q_func(0.0, &mut x), UpStatus::Ok);
        assert_eq!(last_error(), "");
        up_scenario_free(h);
    }
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        let mut x = 0.0;
        assert_eq!(up_outage_direct(ptr::null(), &mut x), UpStatus::NullPointer);
        let h = up_scenario_new();
        assert_eq!(up_outage_direct(h, ptr::null_mut()), UpStatus::NullPointer);
        assert_eq!(up_outage_df(h, ptr::null_mut()), UpStatus::NullPointer);
        assert_eq!(up_q_func(1.0, ptr::null_mut()), UpStatus::NullPointer);
        assert_eq!(up_scenario_set_power_db(ptr::null_mut(), 10.0), UpStatus::NullPointer);
        assert_eq!(up_scenario_from_config(ptr::null(), ptr::null_mut()), UpStatus::NullPointer);
        up_scenario_free(ptr::null_mut());
        up_scenario_free(h);
    }
}

#[test]
fn scenario_from_config_text() {
    let text = CString::new("[scenario]\npower_db = 20\nn_source = 200\nn_relay = 200\n[policy]\nkappa = 2\n").unwrap();
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(up_scenario_from_config(text.as_ptr(), &mut h), UpStatus::Ok);
        let mut b = UpOutageBreakdown::default();
        assert_eq!(up_outage_df(h, &mut b), UpStatus::Ok);
        let cfg = ScenarioConfig {
            power: Snr::from_db(20.0).unwrap(),
            n_source: 200,
            n_relay: 200,
            policy: urllc_pilot::estimation::PilotPolicy::Ppc { kappa: 2.0 },
            ..Default::default()
        };
        assert_eq!(b.eps_df, outage_df(&cfg).unwrap().eps_df.value());
        up_scenario_free(h);

        let bad = CString::new("[scenario]\nbogus = 1\n").unwrap();
        let mut h2 = ptr::null_mut();
        assert_eq!(up_scenario_from_config(bad.as_ptr(), &mut h2), UpStatus::InvalidArgument);
        assert!(h2.is_null());
        assert!(last_error().contains("line 2"), "{}", last_error());
    }
}

#[test]
fn optimizer_through_the_abi() {
    let h = up_scenario_new();
    let mut op = UpOperatingPoint::default();
    unsafe {
        assert_eq!(up_scenario_set_power_db(h, 20.0), UpStatus::Ok);
        assert_eq!(up_min_latency(h, UpScheme::DecodeForward as u32, 1e-3, 2, 400, &mut op), UpStatus::Ok);
    }
    let cfg = ScenarioConfig { power: Snr::from_db(20.0).unwrap(), ..Default::default() };
    let want =
        min_latency(&cfg, Scheme::DecodeForward, Probability::new(1e-3).unwrap(), 2..=400).unwrap().operating.unwrap();
    assert_eq!(op.n_opt, want.n_opt);
    assert_eq!(op.n_p_opt, want.n_p_opt);
    assert_eq!(op.latency_s, want.latency_s);
    assert_eq!(op.eps_target, 1e-3);
    unsafe {
        assert_eq!(up_scenario_set_power_db(h, -5.0), UpStatus::Ok);
        assert_eq!(up_max_goodput(h, UpScheme::Direct as u32, 1e-5, 2, 100, &mut op), UpStatus::Infeasible);
        assert!(last_error().contains("no blocklength"));
        up_scenario_free(h);
    }
}

#[test]
fn scalar_helpers() {
    let mut x = 0.0;
    let mut m = 0u32;
    unsafe {
        assert_eq!(up_q_func(2.0, &mut x), UpStatus::Ok);
        assert_eq!(x, q_func(2.0).value());
        assert_eq!(up_q_inv(x, &mut x), UpStatus::Ok);
        assert!((x - 2.0).abs() < 1e-12);
        assert_eq!(up_optimal_pilot_count(1000, 1000.0, 10.0, &mut m), UpStatus::Ok);
        assert_eq!(m, 1);
        assert_eq!(up_optimal_pilot_count(10, 11.0, 10.0, &mut m), UpStatus::Domain);
    }
}

#[test]
fn error_messages_are_per_thread() {
    let mut x = 0.0;
    assert_eq!(unsafe { up_q_inv(2.0, &mut x) }, UpStatus::Domain);
    let other = std::thread::spawn(last_error).join().unwrap();
    assert_eq!(other, "");
    assert!(!last_error().is_empty());
}
