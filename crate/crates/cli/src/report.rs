use serde::Serialize;
use serde_json::Value;

use seqcorr::numerics::CMatrix;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: Bound,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= tolerance,
            value,
            bound: Bound::AtMost,
            tolerance,
            details: Value::Null,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value >= bound,
            value,
            bound: Bound::AtLeast,
            tolerance: bound,
            details: Value::Null,
        }
    }

    /// A yes/no check: value 1 for true, passing iff true.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    pub fn with(mut self, details: Value) -> Self {
        self.details = details;
        self
    }
}

/// Row-major complex matrix as nested `[re, im]` pairs.
pub fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| {
                Value::Array(
                    m.row(r)
                        .iter()
                        .map(|z| serde_json::json!([z.re, z.im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedMatrix {
    pub name: String,
    pub entries: Value,
}

impl NamedMatrix {
    pub fn new(name: impl Into<String>, m: &CMatrix) -> Self {
        Self {
            name: name.into(),
            entries: matrix_json(m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub seed: Option<u64>,
    pub tolerance_profile: crate::ToleranceProfile,
    pub inputs: Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<NamedMatrix>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl Report {
    pub fn new(
        command: impl Into<String>,
        seed: Option<u64>,
        tolerance_profile: crate::ToleranceProfile,
        inputs: Value,
        checks: Vec<Check>,
    ) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            seed,
            tolerance_profile,
            inputs,
            checks,
            matrices: Vec::new(),
            passed,
            wall_time_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Checks as `name,passed,value,bound,tolerance` rows, then matrices as
    /// `matrix,row,col,re,im` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,passed,value,bound,tolerance\n");
        for c in &self.checks {
            let bound = match c.bound {
                Bound::AtMost => "at_most",
                Bound::AtLeast => "at_least",
            };
            out.push_str(&format!(
                "{},{},{:e},{bound},{:e}\n",
                csv_field(&c.name),
                c.passed,
                c.value,
                c.tolerance
            ));
        }
        if !self.matrices.is_empty() {
            out.push_str("\nmatrix,row,col,re,im\n");
            for m in &self.matrices {
                for (r, row) in m.entries.as_array().into_iter().flatten().enumerate() {
                    for (col, z) in row.as_array().into_iter().flatten().enumerate() {
                        out.push_str(&format!(
                            "{},{r},{col},{:e},{:e}\n",
                            csv_field(&m.name),
                            z[0].as_f64().unwrap_or(f64::NAN),
                            z[1].as_f64().unwrap_or(f64::NAN)
                        ));
                    }
                }
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
