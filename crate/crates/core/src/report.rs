//! The shared record every verification suite emits.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    ExactPass,
    NumericPass,
    Fail,
    VanishingBranch,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub case_id: String,
    pub inputs: serde_json::Value,
    pub lhs: String,
    pub rhs: String,
    pub ratio: Option<String>,
    pub abs_err: Option<f64>,
    pub status: Status,
}

impl Report {
    /// An exact comparison: passes iff `ok`.
    pub fn exact(
        suite: &str,
        case_id: impl Into<String>,
        inputs: serde_json::Value,
        lhs: impl ToString,
        rhs: impl ToString,
        ok: bool,
    ) -> Self {
        Report {
            suite: suite.into(),
            case_id: case_id.into(),
            inputs,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            ratio: None,
            abs_err: if ok { Some(0.0) } else { None },
            status: if ok { Status::ExactPass } else { Status::Fail },
        }
    }

    /// A floating comparison at relative tolerance `tol`.
    pub fn numeric(
        suite: &str,
        case_id: impl Into<String>,
        inputs: serde_json::Value,
        lhs: f64,
        rhs: f64,
        tol: f64,
    ) -> Self {
        let err = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs()).max(1e-300);
        let ok = err <= tol * scale || err <= tol * 1e-300;
        Report {
            suite: suite.into(),
            case_id: case_id.into(),
            inputs,
            lhs: format!("{:.15e}", lhs),
            rhs: format!("{:.15e}", rhs),
            ratio: if rhs != 0.0 {
                Some(format!("{:.15}", lhs / rhs))
            } else {
                None
            },
            abs_err: Some(err),
            status: if ok { Status::NumericPass } else { Status::Fail },
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn with_status(mut self, s: Status) -> Self {
        self.status = s;
        self
    }

    pub fn with_ratio(mut self, r: impl ToString) -> Self {
        self.ratio = Some(r.to_string());
        self
    }
}

pub fn all_passed(reports: &[Report]) -> bool {
    reports.iter().all(Report::passed)
}
