//! Named convention constants derived at run time, reported alongside
//! every verification result.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub value: Value,
    pub note: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ledger {
    entries: BTreeMap<String, LedgerEntry>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, key: &str, value: Value, note: &str) {
        self.entries.insert(key.to_string(), LedgerEntry { value, note: note.to_string() });
    }

    pub fn record_complex(&mut self, key: &str, z: Complex64, note: &str) {
        self.record(key, complex_json(z), note);
    }

    pub fn get(&self, key: &str) -> Option<&LedgerEntry> {
        self.entries.get(key)
    }

    pub fn merge(&mut self, other: &Ledger) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &LedgerEntry)> {
        self.entries.iter()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("ledger serialises")
    }
}

pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}
