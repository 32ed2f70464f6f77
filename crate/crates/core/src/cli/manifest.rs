//! Run manifests written next to every output file.
//!
//! A manifest is a configuration file with an extra `[manifest]` section, so
//! passing it back through `--config` repeats the run.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::config::{gamma_y_label, mrc_label, outage_method_label, power_mode_label, RunConfig};

/// SHA-256 over `blob <len>\0<content>`, git's object framing.
pub fn content_hash(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command_line: String,
    pub schema: String,
    pub output_file: String,
    pub output_hash: String,
    /// Named inputs and their content hashes.
    pub inputs: Vec<(String, String)>,
    pub config: RunConfig,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let snapshot = self.config.render();
        let s = &self.config.scenario;
        let mut out = String::new();
        let mut kv = |k: &str, v: &str| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("version", env!("CARGO_PKG_VERSION"));
        kv("command", &self.command_line);
        kv("schema", &self.schema);
        kv("output", &self.output_file);
        kv("output_hash", &self.output_hash);
        kv("config_hash", &content_hash(snapshot.as_bytes()));
        for (name, hash) in &self.inputs {
            kv(&format!("input_hash.{name}"), hash);
        }
        kv("mu_log_mode", s.mu_log_mode.label());
        kv("gamma_y_mode", gamma_y_label(s.gamma_y_mode));
        kv("mrc_n_mode", mrc_label(s.mrc_n_mode));
        kv("power_mode", power_mode_label(s.power_mode));
        kv("outage_method", outage_method_label(s.outage_method));
        format!("[manifest]\n{out}\n{snapshot}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config;

    #[test]
    fn hash_matches_git_framing() {
        // sha256 of "blob 0\0"
        assert_eq!(content_hash(b""), "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813");
    }

    #[test]
    fn manifest_parses_as_config() {
        let m = RunManifest {
            command_line: "latency --kappa 2".into(),
            schema: "latency/1".into(),
            output_file: "latency.csv".into(),
            output_hash: content_hash(b"x"),
            inputs: vec![],
            config: RunConfig { kappa: 2.0, ..Default::default() },
        };
        let text = m.render();
        assert!(text.contains("mu_log_mode = bits"));
        assert_eq!(config::parse(&text).unwrap(), m.config);
    }
}
