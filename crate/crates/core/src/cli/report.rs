//! Versioned reports with text and JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub kind: String,
    pub verdict: Verdict,
    pub input_digest: String,
    /// Lines printed verbatim in the text rendering, e.g. `H_0 = 1`.
    pub summary: Vec<String>,
    pub facts: BTreeMap<String, Value>,
    pub tables: Vec<Table>,
    pub witnesses: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl Report {
    pub fn new(kind: &str, input_digest: String) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            kind: kind.into(),
            verdict: Verdict::Pass,
            input_digest,
            summary: Vec::new(),
            facts: BTreeMap::new(),
            tables: Vec::new(),
            witnesses: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn fact(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.facts
            .insert(key.into(), serde_json::to_value(value).expect("serializable fact"));
        self
    }

    pub fn line(&mut self, text: impl Into<String>) -> &mut Self {
        self.summary.push(text.into());
        self
    }

    pub fn witness(&mut self, value: impl Serialize) -> &mut Self {
        self.witnesses
            .push(serde_json::to_value(value).expect("serializable witness"));
        self
    }

    /// Fails the verdict unless `ok`, recording `what`.
    pub fn require(&mut self, ok: bool, what: &str) -> &mut Self {
        if !ok {
            self.verdict = Verdict::Fail;
            self.witnesses.push(Value::String(format!("failed: {what}")));
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{} [{verdict}]", self.kind);
        for line in &self.summary {
            let _ = writeln!(out, "{line}");
        }
        for (k, v) in &self.facts {
            let _ = writeln!(out, "{k}: {}", compact(v));
        }
        for t in &self.tables {
            let _ = writeln!(out, "table {}: {}", t.name, t.columns.join(" | "));
            for r in &t.rows {
                let _ = writeln!(out, "  {}", r.join(" | "));
            }
        }
        for w in &self.witnesses {
            let _ = writeln!(out, "witness: {}", compact(w));
        }
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(out, "time: {ms} ms");
        }
        let _ = writeln!(out, "input digest: {}", self.input_digest);
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// SHA-256 of the bytes, hex encoded.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_text() {
        let mut r = Report::new("davis", digest(b"x"));
        r.fact("dims", vec![1, 2]).line("H_0 = 1");
        r.require(false, "exactness");
        r.tables.push(Table {
            name: "t".into(),
            columns: vec!["a".into()],
            rows: vec![vec!["1".into()]],
        });
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_text().contains("H_0 = 1"));
        assert_eq!(r.exit_code(), 1);
        assert!(!r.to_json().contains("timing"));
        assert_eq!(digest(b"abc").len(), 64);
    }
}
