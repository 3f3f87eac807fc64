//! Deterministic machine- and human-readable reports. The body carries no
//! timestamps; every numeric claim re-verifies from the echoed inputs.
//! Rationals are serialized as "p/q" strings, never floats.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distribution::{CharacteristicPair, EulerPair};
use crate::error::{Error, Result};
use crate::lattice::ClassVector;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kplus: Vec<i64>,
    pub kminus: Vec<i64>,
    pub e1: Vec<i64>,
    pub e2: Vec<i64>,
}

impl Witness {
    pub fn new(pair: &CharacteristicPair, euler: &EulerPair) -> Self {
        Witness {
            kplus: pair.kplus.0.clone(),
            kminus: pair.kminus.0.clone(),
            e1: euler.e1.0.clone(),
            e2: euler.e2.0.clone(),
        }
    }

    pub fn pair(&self) -> CharacteristicPair {
        CharacteristicPair {
            kplus: ClassVector(self.kplus.clone()),
            kminus: ClassVector(self.kminus.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub query: BTreeMap<String, String>,
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lines: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<i64>,
}

impl Report {
    pub fn new(outcome: impl Into<String>) -> Self {
        Report {
            query: BTreeMap::new(),
            outcome: outcome.into(),
            checks: Vec::new(),
            witness: None,
            values: BTreeMap::new(),
            lines: Vec::new(),
            bound: None,
        }
    }

    pub fn query(mut self, key: &str, value: impl ToString) -> Self {
        self.query.insert(key.into(), value.to_string());
        self
    }

    pub fn check(mut self, name: &str, value: impl ToString, pass: bool) -> Self {
        self.checks.push(Check {
            name: name.into(),
            value: value.to_string(),
            pass,
        });
        self
    }

    pub fn value(mut self, key: &str, value: impl ToString) -> Self {
        self.values.insert(key.into(), value.to_string());
        self
    }

    pub fn line(mut self, line: impl Into<String>) -> Self {
        self.lines.push(line.into());
        self
    }

    pub fn witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn bound(mut self, b: i64) -> Self {
        self.bound = Some(b);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad report JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.query {
            out.push_str(&format!("query.{k}: {v}\n"));
        }
        out.push_str(&format!("outcome: {}\n", self.outcome));
        if let Some(b) = self.bound {
            out.push_str(&format!("bound: {b}\n"));
        }
        for c in &self.checks {
            let mark = if c.pass { "ok" } else { "FAIL" };
            out.push_str(&format!("check.{}: {} [{}]\n", c.name, c.value, mark));
        }
        if let Some(w) = &self.witness {
            out.push_str(&format!("witness.kplus: {}\n", ClassVector(w.kplus.clone())));
            out.push_str(&format!("witness.kminus: {}\n", ClassVector(w.kminus.clone())));
            out.push_str(&format!("witness.e1: {}\n", ClassVector(w.e1.clone())));
            out.push_str(&format!("witness.e2: {}\n", ClassVector(w.e2.clone())));
        }
        for (k, v) in &self.values {
            out.push_str(&format!("{k}: {v}\n"));
        }
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let r = Report::new("realized")
            .query("class", "v1")
            .check("square", "8", true)
            .value("note", "x")
            .bound(6);
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn deterministic_serialization() {
        let mk = || {
            Report::new("ok")
                .query("b", 2)
                .query("a", 1)
                .value("z", 3)
                .value("y", 4)
        };
        assert_eq!(mk().to_json(), mk().to_json());
        assert_eq!(mk().to_text(), mk().to_text());
    }
}
