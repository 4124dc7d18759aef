//! The report document and its JSON, CSV and table renderings.
//!
//! JSON output is a pure function of the report, so identical runs give
//! byte-identical files.

use std::fmt::Write as _;

use hardy_lab::constants::{Bracket, ReductionExponents};
use hardy_lab::geometry::{SphereMeasure, SphereMethod};
use hardy_lab::oracle::OracleResult;
use hardy_lab::sharpness::SharpnessReport;
use hardy_lab::VerificationReport;
use serde::Serialize;

use crate::config::{Format, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Pass,
    Fail,
    NothingVerified,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NothingVerified => "nothing_verified",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupInfo {
    pub label: String,
    pub exponents: Vec<f64>,
    pub homogeneous_dimension: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormInfo {
    pub kind: String,
    pub bounding_radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsInfo {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: &'static str,
    pub status: Status,
    pub seed: u64,
    pub group: GroupInfo,
    pub norm: NormInfo,
    pub params: ParamsInfo,
    pub grid: GridInfo,
    pub constant: Option<f64>,
    pub ratio: Option<f64>,
    pub attainment: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sphere: Option<SphereMeasure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<Bracket>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<ReductionExponents>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<VerificationReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sharpness: Option<SharpnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleResult>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, cfg: &RunConfig) -> Self {
        let group = match &cfg.group {
            Some(g) => GroupInfo {
                label: g.label.clone(),
                exponents: g.spec.exponents().to_vec(),
                homogeneous_dimension: g.spec.q(),
            },
            None => GroupInfo {
                label: "half_line".into(),
                exponents: vec![1.0],
                homogeneous_dimension: 1.0,
            },
        };
        let norm = match &cfg.norm {
            Some(n) => NormInfo {
                kind: n.kind.label().into(),
                bounding_radius: n.bounding_radius,
            },
            None => NormInfo {
                kind: "abs".into(),
                bounding_radius: 1.0,
            },
        };
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            status: Status::Ok,
            seed: cfg.seed,
            group,
            norm,
            params: ParamsInfo {
                p: cfg.p,
                q: cfg.q,
                alpha: cfg.alpha,
                beta: cfg.beta,
            },
            grid: GridInfo {
                r_min: cfg.grid.r_min(),
                r_max: cfg.grid.r_max(),
                nodes: cfg.grid.len(),
            },
            constant: None,
            ratio: None,
            attainment: None,
            sphere: None,
            bracket: None,
            exponents: None,
            checks: None,
            sharpness: None,
            oracle: None,
            notes: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.csv(),
            Format::Table => self.table(),
        }
    }

    /// Plot data: the search trace for `sharpness`, the check list for
    /// `verify`, a single summary row otherwise.
    fn csv(&self) -> String {
        let mut s = String::new();
        if let Some(sh) = &self.sharpness {
            s.push_str("evaluation");
            if let Some(t) = sh.search_trace.first() {
                for (name, _) in profile_params(&t.parameters) {
                    let _ = write!(s, ",{name}");
                }
            }
            s.push_str(",ratio,best,attainment\n");
            for (i, t) in sh.search_trace.iter().enumerate() {
                let _ = write!(s, "{i}");
                for (_, v) in profile_params(&t.parameters) {
                    let _ = write!(s, ",{v:e}");
                }
                let _ = writeln!(
                    s,
                    ",{:e},{:e},{:e}",
                    t.ratio,
                    t.best,
                    t.ratio / sh.target_constant
                );
            }
        } else if let Some(checks) = &self.checks {
            s.push_str("check,passed,computed,reference,discrepancy,stderr,tolerance\n");
            for c in checks {
                let _ = writeln!(
                    s,
                    "\"{}\",{},{:e},{},{:e},{},{:e}",
                    c.check.replace('"', "'"),
                    c.passed,
                    c.computed,
                    opt(c.reference),
                    c.discrepancy,
                    opt(c.stderr),
                    c.tolerance
                );
            }
        } else {
            s.push_str("command,group,norm,p,q,alpha,beta,seed,constant,ratio,attainment,sphere\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                self.command,
                self.group.label.replace(',', ";"),
                self.norm.kind,
                opt(self.params.p),
                opt(self.params.q),
                opt(self.params.alpha),
                opt(self.params.beta),
                self.seed,
                opt(self.constant),
                opt(self.ratio),
                opt(self.attainment),
                opt(self.sphere.map(|m| m.value)),
            );
        }
        s
    }

    fn table(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("command".into(), self.command.into()),
            ("status".into(), self.status.label().into()),
            (
                "group".into(),
                format!(
                    "{} (Q = {})",
                    self.group.label, self.group.homogeneous_dimension
                ),
            ),
            ("norm".into(), self.norm.kind.clone()),
            ("seed".into(), self.seed.to_string()),
        ];
        for (k, v) in [
            ("p", self.params.p),
            ("q", self.params.q),
            ("alpha", self.params.alpha),
            ("beta", self.params.beta),
            ("constant", self.constant),
            ("ratio", self.ratio),
            ("attainment", self.attainment),
        ] {
            if let Some(v) = v {
                rows.push((k.into(), format!("{v:.12}")));
            }
        }
        if let Some(m) = &self.sphere {
            rows.push((
                "sphere |S|".into(),
                format!(
                    "{:.10} ± {:.2e} ({})",
                    m.value,
                    m.stderr,
                    method_label(m.method)
                ),
            ));
        }
        if let Some(b) = &self.bracket {
            rows.push((
                "bracket".into(),
                format!("[{:.10}, {:.10}]", b.lower, b.upper),
            ));
        }
        if let Some(e) = &self.exponents {
            for (k, v) in [
                ("lambda", e.lambda),
                ("mu", e.mu),
                ("gamma", e.gamma),
                ("delta", e.delta),
                ("alpha_tilde", e.alpha_tilde),
                ("beta_tilde", e.beta_tilde),
            ] {
                rows.push((k.into(), format!("{v:.12}")));
            }
        }
        if let Some(o) = &self.oracle {
            rows.push((
                "oracle".into(),
                format!("{:.8} (raw {:.8})", o.value, o.raw),
            ));
        }
        if let Some(sh) = &self.sharpness {
            rows.push(("best profile".into(), format!("{:?}", sh.best_parameters)));
            rows.push(("evaluations".into(), sh.search_trace.len().to_string()));
        }
        if let Some(checks) = &self.checks {
            let failed = checks.iter().filter(|c| !c.passed).count();
            rows.push((
                "checks".into(),
                format!("{} run, {failed} failed", checks.len()),
            ));
            for c in checks.iter().filter(|c| !c.passed) {
                rows.push(("FAILED".into(), c.check.clone()));
            }
        }
        for n in &self.notes {
            rows.push(("note".into(), n.clone()));
        }
        let width = rows
            .iter()
            .map(|(k, _)| k.chars().count())
            .max()
            .unwrap_or(0);
        let mut s = String::new();
        for (k, v) in rows {
            let _ = writeln!(s, "{k:<width$}  {v}");
        }
        s
    }
}

fn method_label(m: SphereMethod) -> &'static str {
    match m {
        SphereMethod::Analytic => "analytic",
        SphereMethod::MonteCarlo => "monte_carlo",
        SphereMethod::Convention => "convention",
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn profile_params(p: &hardy_lab::profile::Profile) -> Vec<(&'static str, f64)> {
    use hardy_lab::profile::Profile;
    match p {
        Profile::TruncatedPower { s, eps, r } => vec![("s", *s), ("eps", *eps), ("r", *r)],
        Profile::Bliss { c, a, b } => vec![("c", *c), ("a", *a), ("b", *b)],
        _ => Vec::new(),
    }
}
