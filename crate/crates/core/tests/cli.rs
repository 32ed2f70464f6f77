use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_urllc-pilot");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().expect("run binary")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("run.cfg");
    fs::write(
        &path,
        "[scenario]\npower_db = 20\n\n[sweep]\nsnr_db = -5, 5, 15, 25\nn_list = 100, 200\nkappa_list = 2, 4\n\
         eps_grid = 1e-1, 1e-2, 1e-3\nn_min = 2\nn_max = 300\n\n[simulate]\nsamples = 20000\nseed = 7\n",
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn every_command_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    for (cmd, schema) in [
        ("sweep-snr", "sweep_snr/1"),
        ("sweep-kappa", "sweep_kappa/1"),
        ("latency", "latency/1"),
        ("goodput", "goodput/1"),
        ("simulate", "simulate/1"),
    ] {
        let out = run(dir.path(), &[cmd, "--config", &cfg, "--out", "o"]);
        assert_eq!(code(&out), 0, "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let name = cmd.replace('-', "_");
        let csv = fs::read_to_string(dir.path().join(format!("o/{name}.csv"))).unwrap();
        assert_eq!(csv.lines().next().unwrap(), format!("# schema: {schema}"));
        assert!(csv.lines().count() > 2, "{cmd} wrote no rows");
        let manifest = fs::read_to_string(dir.path().join(format!("o/{name}.manifest"))).unwrap();
        assert!(manifest.starts_with("[manifest]"));
        assert!(manifest.contains("mu_log_mode"));
    }
}

#[test]
fn rerun_from_manifest_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    for cmd in ["sweep-snr", "latency", "simulate"] {
        let first = run(dir.path(), &[cmd, "--config", &cfg, "--out", "a", "--kappa", "4"]);
        assert_eq!(code(&first), 0);
        let name = cmd.replace('-', "_");
        let manifest = format!("a/{name}.manifest");
        let second = run(dir.path(), &[cmd, "--config", &manifest, "--out", "b"]);
        assert_eq!(code(&second), 0, "{}", String::from_utf8_lossy(&second.stderr));
        let a = fs::read(dir.path().join(format!("a/{name}.csv"))).unwrap();
        let b = fs::read(dir.path().join(format!("b/{name}.csv"))).unwrap();
        assert_eq!(a, b, "{cmd} output differs on rerun");
    }
}

#[test]
fn plot_script_embeds_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    assert_eq!(code(&run(dir.path(), &["sweep-snr", "--config", &cfg, "--out", "o"])), 0);
    let out = run(dir.path(), &["plot", "--csv", "o/sweep_snr.csv", "--figure", "fig2", "--out", "o"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let script = fs::read_to_string(dir.path().join("o/fig2.py")).unwrap();
    assert!(script.contains("matplotlib"));
    assert!(script.contains("Agg"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());

    fs::write(dir.path().join("bad.cfg"), "[scenario]\nrate = fast\n").unwrap();
    let out = run(dir.path(), &["sweep-snr", "--config", "bad.cfg"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    assert_eq!(code(&run(dir.path(), &["no-such-command"])), 2);
    assert_eq!(code(&run(dir.path(), &["sweep-snr", "--config", "missing.cfg"])), 2);
    assert_eq!(code(&run(dir.path(), &["latency", "--eps-grid", "0.5"])), 2);

    // a table of the wrong schema for the figure
    assert_eq!(code(&run(dir.path(), &["sweep-kappa", "--config", &cfg, "--out", "o"])), 0);
    let out = run(dir.path(), &["plot", "--csv", "o/sweep_kappa.csv", "--figure", "fig2", "--out", "o"]);
    assert_eq!(code(&out), 3);

    fs::write(
        dir.path().join("weak.cfg"),
        "[scenario]\npower_db = -5\n[sweep]\neps_grid = 1e-5\nn_min = 2\nn_max = 100\n",
    )
    .unwrap();
    let out = run(dir.path(), &["latency", "--config", "weak.cfg", "--out", "w"]);
    assert_eq!(code(&out), 4);
    assert!(dir.path().join("w/latency.csv").exists());
}

#[test]
fn seed_changes_simulation_only_through_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    for (out, seed) in [("s1", "1"), ("s1b", "1"), ("s2", "2")] {
        assert_eq!(code(&run(dir.path(), &["simulate", "--config", &cfg, "--seed", seed, "--out", out])), 0);
    }
    let read = |d: &str| fs::read(dir.path().join(format!("{d}/simulate.csv"))).unwrap();
    assert_eq!(read("s1"), read("s1b"));
    assert_ne!(read("s1"), read("s2"));
}
