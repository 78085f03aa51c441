//! Structured report format.
//!
//! Fields are declared in alphabetical order and every number is a decimal
//! string, so a parse and re-serialize (through the typed structs or through
//! `serde_json::Value`) reproduces the bytes exactly.

use std::collections::BTreeMap;

use regpart::{Status, VerificationReport};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub index: String,
    pub params: BTreeMap<String, String>,
    pub residue: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub checks_run: String,
    pub failure_count: String,
    pub failures: Vec<FailureRecord>,
    pub id: String,
    pub kind: String,
    pub notes: BTreeMap<String, String>,
    pub status: String,
    pub wall_ms: String,
}

impl Entry {
    pub fn from_report(report: &VerificationReport, wall_ms: u128) -> Entry {
        Entry {
            checks_run: report.checks_run.to_string(),
            failure_count: report.failure_count.to_string(),
            failures: report
                .failures
                .iter()
                .map(|f| FailureRecord {
                    index: f.index.clone(),
                    params: f.params.clone(),
                    residue: f.residue.clone(),
                })
                .collect(),
            id: report.id.clone(),
            kind: report.kind.clone(),
            notes: report.notes.clone(),
            status: report.status().as_str().to_string(),
            wall_ms: wall_ms.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub entries: Vec<Entry>,
    pub run_params: BTreeMap<String, String>,
    pub tool_version: String,
}

impl Document {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("string-only document");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Document> {
        serde_json::from_str(s)
    }
}

/// 0 if something passed and nothing failed, 1 on any failure, 3 if every
/// entry was vacuous (or there were none).
pub fn exit_code(statuses: impl IntoIterator<Item = Status>) -> i32 {
    let (mut pass, mut fail) = (false, false);
    for s in statuses {
        match s {
            Status::Pass => pass = true,
            Status::Fail => fail = true,
            Status::Vacuous => {}
        }
    }
    match (fail, pass) {
        (true, _) => 1,
        (false, true) => 0,
        (false, false) => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use regpart::Failure;

    fn doc() -> Document {
        let mut r = VerificationReport::new("T1.2.iii-printed", "vanishing");
        r.check(true, || unreachable!());
        r.fail(Failure::new(&[("p", "3".into()), ("j", "1".into())], "331.5", "non-integer"));
        r.note("modulus", 2);
        let mut params = BTreeMap::new();
        params.insert("command".into(), "report".into());
        Document {
            entries: vec![Entry::from_report(&r, 12)],
            run_params: params,
            tool_version: "0.1.0".into(),
        }
    }

    #[test]
    fn round_trips_byte_identically() {
        let s = doc().to_json();
        let back = Document::from_json(&s).unwrap();
        assert_eq!(back.to_json(), s);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        let mut again = serde_json::to_string_pretty(&v).unwrap();
        again.push('\n');
        assert_eq!(again, s);
    }

    #[test]
    fn integers_are_strings() {
        let v: serde_json::Value = serde_json::from_str(&doc().to_json()).unwrap();
        let e = &v["entries"][0];
        assert_eq!(e["checks_run"], "1");
        assert_eq!(e["failure_count"], "1");
        assert_eq!(e["status"], "fail");
        assert_eq!(e["failures"][0]["index"], "331.5");
        assert_eq!(e["wall_ms"], "12");
    }

    #[test]
    fn exit_codes() {
        use Status::*;
        assert_eq!(exit_code([Pass, Vacuous]), 0);
        assert_eq!(exit_code([Pass, Fail]), 1);
        assert_eq!(exit_code([Vacuous, Vacuous]), 3);
        assert_eq!(exit_code([]), 3);
    }
}
