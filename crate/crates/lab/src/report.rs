//! Verdicts and the JSON experiment report.

use std::process::ExitCode;

use serde::{Deserialize, Serialize};

use crate::config::Config;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// Not enough precision to decide.
    Inconclusive,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> ExitCode {
        match self {
            Status::Pass => ExitCode::from(0),
            Status::Fail => ExitCode::from(1),
            Status::Inconclusive => ExitCode::from(2),
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// `estimate ≤ bound + 3σ`; inconclusive without a standard error or
    /// below `ess_min` effective samples.
    pub fn upper_bound(estimate: f64, stderr: Option<f64>, ess: Option<f64>, bound: f64, ess_min: f64) -> Self {
        match (stderr, ess) {
            (Some(se), Some(ess)) if ess >= ess_min => Self::from_bool(estimate <= bound + 3.0 * se),
            // a violation beyond any plausible error is a failure regardless
            (Some(se), _) if estimate > bound + 10.0 * se.max(1e-3 * bound.abs()) => Status::Fail,
            _ => Status::Inconclusive,
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// One named comparison of an observed value against a bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    /// The invariant or bound being tested.
    pub name: String,
    pub instance: String,
    pub observed: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub status: Status,
}

impl Check {
    pub fn new(suite: &str, name: &str, instance: impl Into<String>, observed: f64, bound: f64, tolerance: f64, ok: bool) -> Self {
        Self {
            suite: suite.into(),
            name: name.into(),
            instance: instance.into(),
            observed,
            bound,
            tolerance,
            status: Status::from_bool(ok),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{:<12} {:<7} {} [{}] observed={:e} bound={:e} tol={:e}",
            self.status.word(),
            self.suite,
            self.name,
            self.instance,
            self.observed,
            self.bound,
            self.tolerance
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub y_x: i64,
    pub y_y: i64,
    pub s: f64,
    #[serde(rename = "Wbar")]
    pub wbar: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub eta_instance: Option<f64>,
    pub eta_asymptotic: f64,
    pub bound: f64,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub pass: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    /// Slope of `ln E[e^{s u_y}]` against `ln|y|_∞`.
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub ci95: [f64; 2],
    pub minus_eta_instance: Option<f64>,
    pub minus_eta_asymptotic: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub command: String,
    pub seed: u64,
    pub config_digest: String,
    /// The merged configuration; rerun with `--config` on this text.
    pub config: String,
    pub vrjp_lab: String,
    pub vrjp_core: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub metadata: Metadata,
    pub status: Status,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub decay: Vec<DecayRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<SlopeFit>,
}

impl ExperimentReport {
    pub fn new(command: &str, cfg: &Config) -> Self {
        Self {
            metadata: Metadata {
                command: command.into(),
                seed: cfg.run.seed,
                config_digest: cfg.digest(),
                config: cfg.to_toml(),
                vrjp_lab: env!("CARGO_PKG_VERSION").into(),
                vrjp_core: vrjp_core::VERSION.into(),
            },
            status: Status::Pass,
            checks: Vec::new(),
            decay: Vec::new(),
            slope: None,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.status = self.status.max(check.status);
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        for c in checks {
            self.push(c);
        }
    }

    pub fn push_row(&mut self, row: DecayRow) {
        self.status = self.status.max(row.pass);
        self.decay.push(row);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_status_wins() {
        let mut r = ExperimentReport::new("verify", &Config::default());
        r.push(Check::new("t", "a", "", 0.0, 1.0, 0.0, true));
        assert_eq!(r.status, Status::Pass);
        let mut c = Check::new("t", "b", "", 0.0, 1.0, 0.0, true);
        c.status = Status::Inconclusive;
        r.push(c);
        assert_eq!(r.status, Status::Inconclusive);
        r.push(Check::new("t", "c", "", 2.0, 1.0, 0.0, false));
        r.push(Check::new("t", "d", "", 0.0, 1.0, 0.0, true));
        assert_eq!(r.status, Status::Fail);
    }

    #[test]
    fn upper_bound_rule() {
        assert_eq!(Status::upper_bound(1.02, Some(0.01), Some(1e4), 1.0, 400.0), Status::Pass);
        assert_eq!(Status::upper_bound(1.05, Some(0.01), Some(1e4), 1.0, 400.0), Status::Fail);
        assert_eq!(Status::upper_bound(1.05, Some(0.01), Some(10.0), 1.0, 400.0), Status::Inconclusive);
        assert_eq!(Status::upper_bound(0.5, None, None, 1.0, 400.0), Status::Inconclusive);
        assert_eq!(Status::upper_bound(3.0, Some(0.01), Some(10.0), 1.0, 400.0), Status::Fail);
    }
}
