//! Report records and profile CSVs.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::AnalysisError;

/// One diagnostic in an analysis report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub name: String,
    pub inputs: BTreeMap<String, Value>,
    pub values: BTreeMap<String, Value>,
    pub verdicts: BTreeMap<String, bool>,
    pub tolerances: BTreeMap<String, f64>,
    /// Failing verdicts of a hard record fail the experiment.
    #[serde(default)]
    pub hard: bool,
}

impl DiagnosticRecord {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    pub fn input(mut self, key: &str, v: impl Serialize) -> Self {
        self.inputs.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    pub fn value(mut self, key: &str, v: impl Serialize) -> Self {
        self.values.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    pub fn verdict(mut self, key: &str, pass: bool) -> Self {
        self.verdicts.insert(key.into(), pass);
        self
    }

    pub fn tolerance(mut self, key: &str, t: f64) -> Self {
        self.tolerances.insert(key.into(), t);
        self
    }

    pub fn hard(mut self) -> Self {
        self.hard = true;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|v| *v)
    }
}

/// CSV with columns `radius,value`.
pub fn write_profile_csv<W: Write>(out: W, radii: &[f64], values: &[f64]) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["radius", "value"])?;
    for (r, v) in radii.iter().zip(values) {
        w.write_record([r.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_serializes_with_sorted_keys() {
        let r = DiagnosticRecord::new("x").value("b", 1.5).value("a", vec![1, 2]).verdict("ok", true);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"name":"x","inputs":{},"values":{"a":[1,2],"b":1.5},"verdicts":{"ok":true},"tolerances":{},"hard":false}"#);
        assert!(r.passed());
    }

    #[test]
    fn profile_csv_round_trips_floats() {
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &[0.1, 0.2], &[1.0 / 3.0, 2.0]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, 1.0 / 3.0);
    }
}
