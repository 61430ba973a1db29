//! Verification reports and their JSON and CSV forms.
//!
//! Reports contain no timing, so the JSON of a fixed configuration is
//! byte-identical between runs. Non-finite residuals serialize as `null`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use holoherm::Error;
use serde::Serialize;

use crate::config::SuiteConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// Passes when every residual is below the tolerance.
    Below,
    /// Passes when every residual is at least the threshold.
    Above,
    /// Values are recorded; only errors make it fail.
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub id: String,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub key: String,
    pub anchor: String,
    pub description: String,
    pub comparison: Comparison,
    pub tolerance: Option<f64>,
    pub cases: Vec<Case>,
    pub max_residual: Option<f64>,
    pub min_residual: Option<f64>,
    pub errors: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub non_finite: bool,
    pub pass: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckReport {
    pub fn failing_cases(&self) -> Vec<&Case> {
        self.cases
            .iter()
            .filter(|c| match (c.residual, self.comparison, self.tolerance) {
                (None, _, _) => true,
                (Some(r), Comparison::Below, Some(t)) => r >= t,
                (Some(r), Comparison::Above, Some(t)) => r < t,
                _ => false,
            })
            .collect()
    }
}

/// Accumulates the cases of one check.
#[derive(Debug)]
pub struct CheckBuilder {
    report: CheckReport,
    started: std::time::Instant,
}

impl CheckBuilder {
    pub fn new(
        key: &str,
        anchor: &str,
        description: &str,
        comparison: Comparison,
        cfg: &SuiteConfig,
    ) -> Self {
        let tolerance = match comparison {
            Comparison::Below => Some(cfg.tolerance(key)),
            Comparison::Above => Some(cfg.threshold(key)),
            Comparison::Report => None,
        };
        CheckBuilder {
            report: CheckReport {
                key: key.to_string(),
                anchor: anchor.to_string(),
                description: description.to_string(),
                comparison,
                tolerance,
                cases: Vec::new(),
                max_residual: None,
                min_residual: None,
                errors: Vec::new(),
                note: None,
                non_finite: false,
                pass: false,
                elapsed: Duration::ZERO,
            },
            started: std::time::Instant::now(),
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.report.note = Some(note.into());
        self
    }

    pub fn record(&mut self, id: impl Into<String>, residual: Result<f64, Error>) {
        let id = id.into();
        match residual {
            Ok(r) if r.is_finite() => self.report.cases.push(Case {
                id,
                residual: Some(r),
            }),
            Ok(r) => {
                self.report.non_finite = true;
                self.report.errors.push(format!("{id}: residual is {r}"));
                self.report.cases.push(Case { id, residual: None });
            }
            Err(e) => {
                if e.is_numerical() {
                    self.report.non_finite = true;
                }
                self.report.errors.push(format!("{id}: {e}"));
                self.report.cases.push(Case { id, residual: None });
            }
        }
    }

    pub fn finish(mut self) -> CheckReport {
        let r = &mut self.report;
        let finite: Vec<f64> = r.cases.iter().filter_map(|c| c.residual).collect();
        r.max_residual = finite.iter().copied().reduce(f64::max);
        r.min_residual = finite.iter().copied().reduce(f64::min);
        let complete = r.errors.is_empty() && !r.cases.is_empty();
        r.pass = complete
            && match (r.comparison, r.tolerance) {
                (Comparison::Below, Some(t)) => r.max_residual.is_some_and(|m| m < t),
                (Comparison::Above, Some(t)) => r.min_residual.is_some_and(|m| m >= t),
                _ => true,
            };
        r.elapsed = self.started.elapsed();
        self.report
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub s_values: Vec<f64>,
    pub ellipse_params: Vec<[f64; 2]>,
    pub n_max: usize,
    pub nodes: usize,
    pub projection_nodes: usize,
    pub seed: u64,
    pub ks_prefactor_scale: f64,
    pub tolerances: std::collections::BTreeMap<String, f64>,
}

impl ConfigEcho {
    pub fn new(cfg: &SuiteConfig) -> Self {
        ConfigEcho {
            s_values: cfg.s_values.clone(),
            ellipse_params: cfg
                .ellipse_list()
                .into_iter()
                .map(|(a, b)| [a, b])
                .collect(),
            n_max: cfg.n_max,
            nodes: cfg.nodes,
            projection_nodes: cfg.projection_nodes,
            seed: cfg.seed,
            ks_prefactor_scale: cfg.ks_prefactor_scale,
            tolerances: cfg.resolved_tolerances(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub anchors: Vec<String>,
    pub config: ConfigEcho,
    pub checks: Vec<CheckReport>,
    /// Largest `residual / tolerance` over the `below` checks.
    pub max_residual_ratio: Option<f64>,
    pub non_finite: bool,
    pub pass: bool,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerificationReport {
    pub fn new(
        suite: &str,
        cfg: &SuiteConfig,
        checks: Vec<CheckReport>,
        wall_time: Duration,
    ) -> Self {
        let mut anchors: Vec<String> = Vec::new();
        for c in &checks {
            if !anchors.contains(&c.anchor) {
                anchors.push(c.anchor.clone());
            }
        }
        let max_residual_ratio = checks
            .iter()
            .filter(|c| c.comparison == Comparison::Below)
            .filter_map(|c| Some(c.max_residual? / c.tolerance?))
            .reduce(f64::max);
        VerificationReport {
            suite: suite.to_string(),
            anchors,
            config: ConfigEcho::new(cfg),
            non_finite: checks.iter().any(|c| c.non_finite),
            pass: checks.iter().all(|c| c.pass),
            checks,
            max_residual_ratio,
            wall_time,
        }
    }

    pub fn check(&self, key: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.key == key)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    suite: &'a str,
    check: &'a str,
    case_id: &'a str,
    residual: Option<f64>,
    tolerance: Option<f64>,
    pass: bool,
}

/// Writes `<suite>.json` for every report, and `summary.csv` too when asked
/// for CSV. Returns the paths written.
pub fn write_reports(
    reports: &[VerificationReport],
    dir: &Path,
    format: Format,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for r in reports {
        let path = dir.join(format!("{}.json", r.suite));
        fs::write(&path, r.to_json())?;
        written.push(path);
    }
    if format == Format::Csv {
        let path = dir.join("summary.csv");
        let mut w = csv::Writer::from_path(&path)?;
        for r in reports {
            for c in &r.checks {
                let failing = c.failing_cases();
                for case in &c.cases {
                    w.serialize(CsvRow {
                        suite: &r.suite,
                        check: &c.key,
                        case_id: &case.id,
                        residual: case.residual,
                        tolerance: c.tolerance,
                        pass: !failing.iter().any(|f| f.id == case.id),
                    })?;
                }
            }
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

/// 0 when everything passed, 3 when a non-finite value was met, 1 otherwise.
pub fn exit_code(reports: &[VerificationReport]) -> i32 {
    if reports.iter().any(|r| r.non_finite) {
        3
    } else if reports.iter().all(|r| r.pass) {
        0
    } else {
        1
    }
}
