//! Outcome of one statistical verification.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// How `pass` was decided from `statistic` and `threshold`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// pass iff statistic <= threshold
    Distance,
    /// pass iff statistic (a p-value) >= threshold (a level)
    PValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub n_samples: usize,
    pub seed: u64,
    pub details: BTreeMap<String, Value>,
}

impl TestReport {
    pub fn distance(name: impl Into<String>, statistic: f64, threshold: f64, n_samples: usize, seed: u64) -> Self {
        Self::build(name.into(), statistic, threshold, n_samples, seed, Convention::Distance)
    }

    pub fn p_value(name: impl Into<String>, p: f64, level: f64, n_samples: usize, seed: u64) -> Self {
        Self::build(name.into(), p, level, n_samples, seed, Convention::PValue)
    }

    fn build(name: String, statistic: f64, threshold: f64, n_samples: usize, seed: u64, conv: Convention) -> Self {
        // NaN compares false either way, so a NaN statistic fails.
        let pass = match conv {
            Convention::Distance => statistic <= threshold,
            Convention::PValue => statistic >= threshold,
        };
        let mut details = BTreeMap::new();
        details.insert("convention".to_string(), serde_json::to_value(conv).unwrap());
        Self { name, statistic, threshold, pass, n_samples, seed, details }
    }

    pub fn convention(&self) -> Option<Convention> {
        self.details.get("convention").and_then(|v| serde_json::from_value(v.clone()).ok())
    }

    pub fn with_detail(mut self, key: &str, value: impl Serialize) -> Self {
        self.details.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    /// Pretty JSON; keys come out in a fixed order (struct order, then
    /// sorted details).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// One-line TAP record, e.g. `ok 3 - idt_test statistic=0.01 threshold=0.03`.
    pub fn to_tap(&self, index: usize) -> String {
        let op = match self.convention() {
            Some(Convention::PValue) => ">=",
            _ => "<=",
        };
        format!(
            "{} {} - {} statistic={:.6e} {} threshold={:.6e} n={} seed={}",
            if self.pass { "ok" } else { "not ok" },
            index,
            self.name,
            self.statistic,
            op,
            self.threshold,
            self.n_samples,
            self.seed
        )
    }
}
