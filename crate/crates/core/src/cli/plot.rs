//! Plot scripts: self-contained matplotlib programs with the data embedded.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    /// Outage against SNR per scheme and policy.
    Fig2,
    /// Optimal pilot count against blocklength per kappa.
    Fig3,
    /// Minimum latency against target outage.
    Fig4,
    /// Goodput against target outage.
    Fig5,
}

impl Figure {
    pub fn label(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        }
    }

    pub fn schema(self) -> &'static str {
        match self {
            Figure::Fig2 => super::commands::SCHEMA_SWEEP_SNR,
            Figure::Fig3 => super::commands::SCHEMA_SWEEP_KAPPA,
            Figure::Fig4 => super::commands::SCHEMA_LATENCY,
            Figure::Fig5 => super::commands::SCHEMA_GOODPUT,
        }
    }
}

struct Spec {
    x: &'static str,
    y: &'static str,
    series: &'static [&'static str],
    x_label: &'static str,
    y_label: &'static str,
    log_x: bool,
    log_y: bool,
    /// Which axis carries the outage probability, for the shaded region.
    shade: Option<char>,
    feasible_only: bool,
}

fn spec(figure: Figure) -> Spec {
    match figure {
        Figure::Fig2 => Spec {
            x: "snr_db",
            y: "epsilon",
            series: &["scheme", "policy"],
            x_label: "SNR per link [dB]",
            y_label: "outage probability",
            log_x: false,
            log_y: true,
            shade: Some('y'),
            feasible_only: false,
        },
        Figure::Fig3 => Spec {
            x: "n",
            y: "n_p_opt",
            series: &["kappa"],
            x_label: "blocklength n",
            y_label: "optimal pilot count",
            log_x: false,
            log_y: false,
            shade: None,
            feasible_only: false,
        },
        Figure::Fig4 => Spec {
            x: "epsilon_target",
            y: "latency_ms",
            series: &[],
            x_label: "target outage probability",
            y_label: "latency [ms]",
            log_x: true,
            log_y: false,
            shade: Some('x'),
            feasible_only: true,
        },
        Figure::Fig5 => Spec {
            x: "epsilon_target",
            y: "goodput_bpcu",
            series: &[],
            x_label: "target outage probability",
            y_label: "goodput [bpcu]",
            log_x: true,
            log_y: false,
            shade: Some('x'),
            feasible_only: true,
        },
    }
}

fn number(table: &Table, row: &[String], col: usize) -> Result<f64, String> {
    row[col].parse().map_err(|_| format!("column `{}` holds `{}`, not a number", table.header[col], row[col]))
}

/// Script that draws `figure` from `table`, or a message naming the schema
/// or column problem.
pub fn render_script(figure: Figure, table: &Table) -> Result<String, String> {
    if table.schema != figure.schema() {
        return Err(format!("{} needs a `{}` table, got `{}`", figure.label(), figure.schema(), table.schema));
    }
    let sp = spec(figure);
    let col = |name: &str| table.column(name).ok_or_else(|| format!("missing column `{name}`"));
    let (xc, yc) = (col(sp.x)?, col(sp.y)?);
    let series_cols: Vec<usize> = sp.series.iter().map(|s| col(s)).collect::<Result<_, _>>()?;
    let feasible = if sp.feasible_only { Some(col("feasible")?) } else { None };

    let mut series: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for row in &table.rows {
        if let Some(f) = feasible {
            if row[f] != "true" {
                continue;
            }
        }
        let name = if series_cols.is_empty() {
            sp.y.to_string()
        } else {
            series_cols.iter().map(|&c| row[c].as_str()).collect::<Vec<_>>().join(" ")
        };
        let entry = series.entry(name).or_default();
        entry.0.push(number(table, row, xc)?);
        entry.1.push(number(table, row, yc)?);
    }

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        "# Generated by urllc-pilot {}; renders {}.svg next to this script.",
        env!("CARGO_PKG_VERSION"),
        figure.label()
    );
    let _ = writeln!(w, "import os\nimport matplotlib\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n");
    let _ = writeln!(w, "SERIES = {{");
    for (name, (xs, ys)) in &series {
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(", ");
        let _ = writeln!(w, "    {name:?}: ([{}], [{}]),", fmt(xs), fmt(ys));
    }
    let _ = writeln!(w, "}}\n");
    let _ = writeln!(w, "fig, ax = plt.subplots(figsize=(6.4, 4.8))");
    let _ = writeln!(w, "for name, (xs, ys) in SERIES.items():");
    let _ = writeln!(w, "    ax.plot(xs, ys, marker=\"o\", markersize=3, label=name)");
    if sp.log_x {
        let _ = writeln!(w, "ax.set_xscale(\"log\")");
    }
    if sp.log_y {
        let _ = writeln!(w, "ax.set_yscale(\"log\")");
    }
    match sp.shade {
        Some('y') => {
            let _ = writeln!(w, "lo, hi = ax.get_ylim()\nax.axhspan(min(lo, 1e-3), 1e-3, color=\"0.85\", zorder=0, label=\"URR\")\nax.set_ylim(lo, hi)");
        }
        Some(_) => {
            let _ = writeln!(w, "lo, hi = ax.get_xlim()\nax.axvspan(min(lo, 1e-3), 1e-3, color=\"0.85\", zorder=0, label=\"URR\")\nax.set_xlim(lo, hi)");
        }
        None => {}
    }
    let _ = writeln!(w, "ax.set_xlabel({:?})\nax.set_ylabel({:?})", sp.x_label, sp.y_label);
    let _ = writeln!(w, "ax.grid(True, which=\"both\", alpha=0.3)\nax.legend(fontsize=\"small\")\nfig.tight_layout()");
    let _ = writeln!(
        w,
        "fig.savefig(os.path.join(os.path.dirname(os.path.abspath(__file__)), {:?}))",
        format!("{}.svg", figure.label())
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn latency_table() -> Table {
        let mut t = Table::new(
            super::super::commands::SCHEMA_LATENCY,
            &["epsilon_target", "reliability_pct", "n_opt", "n_p_opt", "latency_ms", "goodput_bpcu", "feasible"],
        );
        t.push(["1.00000e-1", "90", "40", "3", "0.3", "0.4", "true"].map(String::from).to_vec());
        t.push(["1.00000e-5", "99.999", "", "", "", "", "false"].map(String::from).to_vec());
        t
    }

    #[test]
    fn schema_mismatch_is_rejected() {
        assert!(render_script(Figure::Fig2, &latency_table()).unwrap_err().contains("sweep_snr"));
    }

    #[test]
    fn infeasible_rows_are_skipped() {
        let script = render_script(Figure::Fig4, &latency_table()).unwrap();
        assert!(script.contains("\"latency_ms\": ([1e-1], [3e-1]),"), "{script}");
        assert!(script.contains("axvspan"));
        assert!(script.contains("set_xscale(\"log\")"));
    }
}
