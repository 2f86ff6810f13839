//! Serialization helpers and the versioned report envelope shared by the CLI.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::scalar::Scalar;

pub const SCHEMA_VERSION: u32 = 1;

pub fn ser_scalar<S: Scalar, Ser: Serializer>(v: &S, s: Ser) -> Result<Ser::Ok, Ser::Error> {
    s.serialize_str(&v.to_report_string())
}

pub fn ser_scalars<S: Scalar, Ser: Serializer>(v: &[S], s: Ser) -> Result<Ser::Ok, Ser::Error> {
    s.collect_seq(v.iter().map(Scalar::to_report_string))
}

pub fn ser_opt_scalar<S: Scalar, Ser: Serializer>(v: &Option<S>, s: Ser) -> Result<Ser::Ok, Ser::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_report_string()),
        None => s.serialize_none(),
    }
}

pub fn ser_f64<Ser: Serializer>(v: &f64, s: Ser) -> Result<Ser::Ok, Ser::Error> {
    s.serialize_str(&v.to_report_string())
}

pub fn ser_f64s<Ser: Serializer>(v: &[f64], s: Ser) -> Result<Ser::Ok, Ser::Error> {
    s.collect_seq(v.iter().map(|x| x.to_report_string()))
}

pub fn ser_opt_f64<Ser: Serializer>(v: &Option<f64>, s: Ser) -> Result<Ser::Ok, Ser::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_report_string()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(&self) -> bool {
        *self == Verdict::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Top-level document written by every CLI command.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub mode: String,
    pub params: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub summary: BTreeMap<String, String>,
    /// Replayable counterexample for the first failing check.
    pub counterexample: Option<serde_json::Value>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str, mode: &str) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            mode: mode.to_string(),
            params: BTreeMap::new(),
            checks: Vec::new(),
            summary: BTreeMap::new(),
            counterexample: None,
            passed: true,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn summary(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.summary.insert(key.to_string(), value.to_string());
        self
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> &mut Self {
        self.passed &= passed;
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
        self
    }

    /// Keeps only the first counterexample.
    pub fn counterexample(&mut self, value: serde_json::Value) -> &mut Self {
        if self.counterexample.is_none() {
            self.counterexample = Some(value);
        }
        self
    }
}
