//! Machine-readable experiment reports.
//!
//! The report body is a pure function of the config (seed included): two
//! runs of the same config serialize to byte-identical bodies. Wall-clock
//! time lives outside the body.

use serde::Serialize;

use crate::config::{ExperimentConfig, Scenario};

pub const SCHEMA_VERSION: &str = "1";

/// One named check with its observed value and bound.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Verdict {
    pub fn checked(name: &str, observed: f64, threshold: f64) -> Self {
        Verdict {
            name: name.to_owned(),
            pass: observed <= threshold,
            observed: Some(observed),
            threshold: Some(threshold),
            detail: String::new(),
        }
    }

    pub fn boolean(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            name: name.to_owned(),
            pass,
            observed: None,
            threshold: None,
            detail: detail.into(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// Scenario-specific summary statistics.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Summary {
    Spread {
        fitted_slope: f64,
        critical_time: f64,
        saturation_width: f64,
        widths: Vec<(f64, f64)>,
    },
    Wigner {
        trials: u64,
        outside_identical_fraction: f64,
        branch_stats: Vec<BranchStat>,
        worst_z: f64,
    },
    Einstein {
        trials: u64,
        left_frequency: f64,
        expected_left: f64,
        collapsed_cleanly: u64,
    },
    Entangle {
        max_identity_residual: f64,
        variance_checks: Vec<VarianceCheck>,
        nonsignaling_tvd: f64,
        nonsignaling_threshold: f64,
        mutant_tvd: f64,
    },
    Chsh {
        deterministic_max: f64,
        mixture_max_s: f64,
        mixture_max_excess: f64,
        pr_box_s: f64,
        strategies: Vec<ChshRow>,
    },
    Noclone {
        conservation_checks: u64,
        conservation_failures: u64,
        min_deficit: f64,
        clonable_count: u64,
        delta_clonable: bool,
        additivity_max_gap: f64,
    },
    HvOracle {
        cases: Vec<OracleCase>,
        worst_tvd_margin: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchStat {
    pub pattern: String,
    pub weight: f64,
    pub observed: u64,
    pub expected: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VarianceCheck {
    pub family: String,
    pub var_a: f64,
    pub var_l: f64,
    pub var_b: f64,
    pub relative_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChshRow {
    pub label: String,
    pub s: f64,
    pub standard_error: f64,
    pub within_bound: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleCase {
    pub state: String,
    pub steps: usize,
    pub observe: usize,
    pub tvd: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Deterministic part of a report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportBody {
    pub schema_version: String,
    pub scenario: Scenario,
    pub config: ExperimentConfig,
    pub summary: Summary,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
}

/// Full report: body plus wall-clock time.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    #[serde(flatten)]
    pub body: ReportBody,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig, summary: Summary, verdicts: Vec<Verdict>) -> Self {
        let pass = verdicts.iter().all(|v| v.pass);
        ExperimentReport {
            body: ReportBody {
                schema_version: SCHEMA_VERSION.to_owned(),
                scenario: config.scenario,
                config,
                summary,
                verdicts,
                pass,
            },
            wall_clock_seconds: 0.0,
        }
    }

    /// Canonical serialization of the body alone; the reproducibility
    /// contract is byte identity of this string.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.body).expect("report body serializes")
    }

    /// Full report including wall-clock time.
    pub fn full_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Tabular view of per-case data, written when the output format is CSV.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| (*s).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_checked_compares_to_threshold() {
        assert!(Verdict::checked("x", 0.5, 1.0).pass);
        assert!(!Verdict::checked("x", 2.0, 1.0).pass);
    }

    #[test]
    fn body_excludes_wall_clock() {
        let config = ExperimentConfig::with_defaults(Scenario::Chsh);
        let report = ExperimentReport::new(
            config,
            Summary::Chsh {
                deterministic_max: 2.0,
                mixture_max_s: 1.5,
                mixture_max_excess: 0.0,
                pr_box_s: 4.0,
                strategies: vec![],
            },
            vec![Verdict::boolean("ok", true, "")],
        );
        assert!(!report.body_json().contains("wall_clock"));
        assert!(report.full_json().contains("wall_clock_seconds"));
    }

    #[test]
    fn csv_table_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,2\n");
    }
}
