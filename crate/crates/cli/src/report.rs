//! Machine-readable command outcome. Field order is fixed by declaration order, and
//! nested objects are built with sorted keys, so identical runs print identical bytes.

use affsel_core::checkers::{CheckOutcome, Cond1Failure, Witness};
use affsel_core::lp::Certificate;
use affsel_core::selectors::{SelectionResult, Uniqueness};
use affsel_core::svf::AffineMap;
use affsel_core::Tolerances;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Violation,
    Found,
    Infeasible,
    Multiple,
    Invalid,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass | Status::Found | Status::Multiple => 0,
            Status::Violation | Status::Infeasible => 2,
            Status::Invalid | Status::Error => 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TolerancesOut {
    pub eps: f64,
    pub eps_slice: f64,
    pub eps_unique: f64,
    pub eps_x: f64,
}

impl From<&Tolerances<f64>> for TolerancesOut {
    fn from(t: &Tolerances<f64>) -> Self {
        Self {
            eps: t.eps,
            eps_slice: t.eps_slice,
            eps_unique: t.eps_unique,
            eps_x: t.eps_x,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub instance: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checked: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniqueness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violations: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub tolerances: TolerancesOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<f64>,
}

impl Report {
    pub fn new(command: &str, instance: &str, tol: &Tolerances<f64>) -> Self {
        Self {
            command: command.to_string(),
            instance: instance.to_string(),
            status: Status::Error,
            grid: None,
            checked: None,
            witness: None,
            map: None,
            uniqueness: None,
            certificate: None,
            details: None,
            violations: None,
            error: None,
            tolerances: tol.into(),
            duration_ms: None,
        }
    }

    pub fn fail(mut self, status: Status, message: impl ToString) -> Self {
        self.status = status;
        self.error = Some(message.to_string());
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn absorb_check(&mut self, out: &CheckOutcome<f64>) {
        self.status = if out.passed() {
            Status::Pass
        } else {
            Status::Violation
        };
        self.checked = Some(self.checked.unwrap_or(0) + out.checked);
        self.witness = out.witness.as_ref().map(|w| witness(w, None));
    }

    pub fn absorb_selection(&mut self, out: &SelectionResult<f64>) {
        use affsel_core::selectors::SelectionStatus;
        self.status = match out.status {
            SelectionStatus::Found => Status::Found,
            SelectionStatus::Multiple => Status::Multiple,
            SelectionStatus::Infeasible => Status::Infeasible,
        };
        self.map = out.map.as_ref().map(map);
        self.uniqueness = out.uniqueness.as_ref().map(uniqueness);
        self.certificate = out.certificate.as_ref().map(certificate);
        self.witness = out.witness.as_ref().map(|w| witness(w, out.failure));
        if let Some(s) = out.slack {
            self.details = Some(json!({ "slack": s }));
        }
    }
}

pub fn witness(w: &Witness<f64>, failure: Option<Cond1Failure>) -> Value {
    let mut v = json!({ "x": w.x, "y": w.y, "t": w.t, "margin": w.margin });
    if let Some(f) = failure {
        v["failure"] = json!(f.to_string());
    }
    v
}

pub fn map(m: &AffineMap<f64>) -> Value {
    json!({ "c": m.c, "d": m.d })
}

pub fn uniqueness(u: &Uniqueness<f64>) -> Value {
    json!({ "unique": u.unique, "spread": u.spread })
}

pub fn certificate(c: &Certificate<f64>) -> Value {
    Value::Array(
        c.multipliers
            .iter()
            .map(|&(row, y)| json!({ "row": row, "multiplier": y }))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Found.exit_code(), 0);
        assert_eq!(Status::Multiple.exit_code(), 0);
        assert_eq!(Status::Infeasible.exit_code(), 2);
        assert_eq!(Status::Invalid.exit_code(), 1);
    }

    #[test]
    fn optional_fields_are_omitted_in_declaration_order() {
        let r = Report::new("validate", "x.json", &Tolerances::default()).fail(Status::Invalid, "bad");
        let s = r.to_json();
        let keys: Vec<&str> = s
            .lines()
            .filter(|l| l.starts_with("  \""))
            .map(|l| l.trim().split('"').nth(1).unwrap())
            .collect();
        assert_eq!(keys, ["command", "instance", "status", "error", "tolerances"]);
        assert!(s.ends_with("}\n"));
    }
}
