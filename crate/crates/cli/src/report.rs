use serde_json::{json, Value};

/// Text lines for people and a JSON mirror for machines. Deterministic given
/// the inputs: nothing here depends on time or scheduling.
#[derive(Debug)]
pub struct Report {
    pub command: Vec<String>,
    pub lines: Vec<String>,
    pub results: Value,
    pub provenance: Value,
    pub passed: bool,
    /// Raw text written verbatim in both modes (generated bundles).
    pub raw: Option<String>,
}

impl Report {
    pub fn new(lines: Vec<String>, results: Value) -> Self {
        Report { command: Vec::new(), lines, results, provenance: Value::Null, passed: true, raw: None }
    }

    pub fn failed(mut self) -> Self {
        self.passed = false;
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "results": self.results,
            "provenance": self.provenance,
            "passed": self.passed,
        })
    }

    pub fn print(&self, json: bool) {
        if let Some(raw) = &self.raw {
            print!("{raw}");
            return;
        }
        if json {
            println!("{}", serde_json::to_string_pretty(&self.to_json()).expect("values serialize"));
        } else {
            for l in &self.lines {
                println!("{l}");
            }
        }
    }
}
