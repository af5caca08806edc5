//! Structured outcome of a verification, scan or search run.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL_VERSION: &str = concat!("ffekr ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inapplicable,
    BudgetExceeded,
}

impl Verdict {
    /// Pass and inapplicable both count as success for exit codes.
    pub fn is_ok(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::Inapplicable)
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inapplicable => "inapplicable",
            Verdict::BudgetExceeded => "budget-exceeded",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub claim_id: String,
    pub field_spec: String,
    pub parameters: BTreeMap<String, Value>,
    pub verdict: Verdict,
    pub witnesses: Vec<Value>,
    pub counters: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub wall_time_ms: u64,
    pub seed: Option<u64>,
    pub tool_version: String,
}

impl Report {
    pub fn new(claim_id: impl Into<String>, field_spec: impl Into<String>) -> Self {
        Report {
            claim_id: claim_id.into(),
            field_spec: field_spec.into(),
            parameters: BTreeMap::new(),
            verdict: Verdict::Pass,
            witnesses: Vec::new(),
            counters: BTreeMap::new(),
            notes: Vec::new(),
            wall_time_ms: 0,
            seed: None,
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        self
    }

    pub fn counter(mut self, key: &str, value: u64) -> Self {
        self.counters.insert(key.to_string(), value);
        self
    }

    pub fn witness(mut self, value: impl Serialize) -> Self {
        self.witnesses.push(serde_json::to_value(value).expect("serializable"));
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn verdict(mut self, v: Verdict) -> Self {
        self.verdict = v;
        self
    }

    /// Stamps the elapsed time and checks that failures carry a witness.
    pub fn finish(mut self, started: Instant) -> Self {
        self.wall_time_ms = started.elapsed().as_millis() as u64;
        assert!(
            self.verdict != Verdict::Fail || !self.witnesses.is_empty(),
            "failing report {} has no witness",
            self.claim_id
        );
        self
    }

    /// The counter shown in CSV output: `scanned` when present, else the
    /// first counter by name.
    pub fn primary_counter(&self) -> Option<u64> {
        self.counters
            .get("scanned")
            .or_else(|| self.counters.values().next())
            .copied()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub const CSV_HEADER: &'static str = "claimId,fieldSpec,verdict,primaryCounter,wallTimeMs";

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.claim_id,
            self.field_spec,
            self.verdict,
            self.primary_counter().map(|c| c.to_string()).unwrap_or_default(),
            self.wall_time_ms
        )
    }

    pub fn to_human(&self) -> String {
        let mut out = format!("[{}] {} over {}", self.verdict, self.claim_id, self.field_spec);
        for (k, v) in &self.parameters {
            out.push_str(&format!(" {k}={v}"));
        }
        for (k, v) in &self.counters {
            out.push_str(&format!(" #{k}={v}"));
        }
        out.push_str(&format!(" ({} ms)", self.wall_time_ms));
        for n in &self.notes {
            out.push_str(&format!("\n    note: {n}"));
        }
        for w in self.witnesses.iter().take(5) {
            out.push_str(&format!("\n    witness: {w}"));
        }
        out
    }
}
