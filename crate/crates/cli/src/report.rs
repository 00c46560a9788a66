//! Deterministic report rendering shared by all subcommands.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// A flat, order-stable report: a kind tag, scalar facts, and check lines.
#[derive(Debug, Serialize)]
pub struct Report {
    pub kind: String,
    /// Ordered key/value facts.
    pub facts: Vec<(String, Value)>,
    /// Check lines; every `pass = false` line fails the run.
    pub checks: Vec<Check>,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Report {
    pub fn new(kind: &str) -> Report {
        Report { kind: kind.to_string(), facts: Vec::new(), checks: Vec::new() }
    }

    pub fn fact(&mut self, key: &str, value: impl Into<Value>) {
        self.facts.push((key.to_string(), value.into()));
    }

    pub fn fact_map(&mut self, key: &str, map: BTreeMap<String, Value>) {
        self.facts.push((key.to_string(), Value::Object(map.into_iter().collect())));
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), pass, detail: detail.into() });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self, json: bool) {
        if json {
            println!("{}", serde_json::to_string_pretty(self).expect("report serializes"));
            return;
        }
        println!("# {}", self.kind);
        for (k, v) in &self.facts {
            println!("{k}: {}", render_value(v));
        }
        for c in &self.checks {
            println!("{} {}{}", if c.pass { "pass" } else { "FAIL" }, c.name, if c.detail.is_empty() {
                String::new()
            } else {
                format!(": {}", c.detail)
            });
        }
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => serde_json::to_string(other).expect("value serializes"),
    }
}
