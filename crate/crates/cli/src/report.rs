//! Command reports: a list of named checks plus command-specific data,
//! rendered either as text or as JSON with exact scalars as strings.

use alexsheaf::linalg::{format_vector, Matrix};
use alexsheaf::{Error, Scalar};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub data: Value,
    /// Human-readable body printed after the checks in text mode.
    #[serde(skip)]
    pub text: Vec<String>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Report {
            command: command.to_string(),
            seed,
            checks: Vec::new(),
            data: json!({}),
            text: Vec::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        });
    }

    pub fn error(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: Status::Error,
            detail: detail.into(),
        });
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.data
            .as_object_mut()
            .expect("data is an object")
            .insert(key.to_string(), value);
    }

    pub fn line(&mut self, line: impl Into<String>) {
        self.text.push(line.into());
    }

    /// 0 when every check passed, 2 on an input error, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.status == Status::Error) {
            2
        } else if self.checks.iter().all(|c| c.status == Status::Pass) {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} (seed {})\n", self.command, self.seed);
        for c in &self.checks {
            out.push_str(&format!(
                "  {:<5} {}: {}\n",
                c.status.label(),
                c.name,
                c.detail
            ));
        }
        for l in &self.text {
            out.push_str(l);
            out.push('\n');
        }
        let verdict = match self.exit_code() {
            0 => "PASS",
            1 => "FAIL",
            _ => "ERROR",
        };
        out.push_str(&format!("result: {verdict}\n"));
        out
    }
}

pub fn scalar_json(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

pub fn vector_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(scalar_json).collect())
}

/// Rows of strings.
pub fn matrix_json(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_json(m.row(i))).collect())
}

/// `[a b; c d]`, or `[]` when there are no entries.
pub fn matrix_text(m: &Matrix) -> String {
    if m.rows() * m.cols() == 0 {
        "[]".to_string()
    } else {
        m.to_string()
    }
}

pub fn vector_text(v: &[Scalar]) -> String {
    format_vector(v)
}

/// Structured witness for a failed check.
pub fn witness_json(e: &Error) -> Value {
    match e {
        Error::NotAntisymmetric(a, b) => json!({"kind": "cycle", "elements": [a, b]}),
        Error::PathDependent { from, to, paths } => json!({
            "kind": "path_dependent",
            "from": from,
            "to": to,
            "paths": paths.iter().map(|p| json!({"via": p.via, "product": p.product})).collect::<Vec<_>>(),
        }),
        Error::NotNatural { from, to, lhs, rhs } => json!({
            "kind": "not_natural",
            "from": from,
            "to": to,
            "target_after_component": lhs,
            "component_after_source": rhs,
        }),
        Error::NotOpen { member, missing } => json!({
            "kind": "not_open",
            "member": member,
            "missing_successor": missing,
        }),
        Error::IncompatibleSection {
            from,
            to,
            expected,
            actual,
        } => json!({
            "kind": "incompatible_section",
            "from": from,
            "to": to,
            "restricted": expected,
            "given": actual,
        }),
        Error::GlueConflict {
            element,
            left,
            right,
        } => json!({
            "kind": "glue_conflict",
            "element": element,
            "values": [left, right],
        }),
        other => json!({"kind": "other", "message": other.to_string()}),
    }
}
