//! Row-based check reports shared by the series identities and the
//! independence checks.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub condition: String,
    pub instantiation: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn push(&mut self, condition: &str, instantiation: String, lhs: String, rhs: String) {
        let pass = lhs == rhs;
        self.entries.push(CheckEntry {
            condition: condition.to_string(),
            instantiation,
            lhs,
            rhs,
            pass,
        });
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.entries.extend(other.entries);
    }

    pub fn violations(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn violations_of<'a>(&'a self, condition: &'a str) -> impl Iterator<Item = &'a CheckEntry> + 'a {
        self.entries.iter().filter(move |e| !e.pass && e.condition == condition)
    }

    pub fn count_of(&self, condition: &str) -> usize {
        self.entries.iter().filter(|e| e.condition == condition).count()
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}
