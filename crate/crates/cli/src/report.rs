//! The JSON report written to standard output.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use awkit::Tolerances;

/// A measured residual and the threshold it is held to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub value: f64,
    pub threshold: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, Value>,
    pub residuals: BTreeMap<String, Residual>,
    pub accepted: bool,
    pub artifacts: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: &str, tol: &Tolerances) -> Self {
        let mut tolerances = BTreeMap::new();
        tolerances.insert("pos_slack".into(), Value::from(tol.pos_slack));
        tolerances.insert("cluster_tol".into(), Value::from(tol.cluster_tol));
        tolerances.insert("rank_cutoff".into(), Value::from(tol.rank_cutoff));
        tolerances.insert("jacobi_off_tol".into(), Value::from(tol.jacobi_off_tol));
        tolerances.insert("max_sweeps".into(), Value::from(tol.max_sweeps));
        Self {
            command: command.into(),
            seed: None,
            tolerances,
            residuals: BTreeMap::new(),
            accepted: true,
            artifacts: BTreeMap::new(),
            error: None,
        }
    }

    /// Records `value ≤ threshold`.
    pub fn residual(&mut self, name: &str, value: f64, threshold: f64) {
        self.flag(name, value, threshold, value <= threshold);
    }

    /// Records a residual whose verdict is decided elsewhere.
    pub fn flag(&mut self, name: &str, value: f64, threshold: f64, ok: bool) {
        self.accepted &= ok;
        self.residuals.insert(
            name.into(),
            Residual {
                value,
                threshold,
                ok,
            },
        );
    }

    pub fn artifact(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("artifacts serialize");
        self.artifacts.insert(name.into(), v);
    }

    /// A mathematical rejection: the report is emitted with the reason.
    pub fn reject(&mut self, reason: impl Into<String>) {
        self.accepted = false;
        self.error = Some(reason.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
