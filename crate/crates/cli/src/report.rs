use bisync::{Check, CheckList};
use serde::Serialize;
use serde_json::{Map, Value};

/// Machine-readable result of one subcommand.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub artifacts: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            pass: true,
            checks: Vec::new(),
            artifacts: Map::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn checks(&mut self, list: CheckList) {
        for c in list {
            self.check(c);
        }
    }

    pub fn artifact<T: Serialize>(&mut self, name: &str, value: T) -> anyhow::Result<()> {
        self.artifacts.insert(name.to_string(), serde_json::to_value(value)?);
        Ok(())
    }
}
