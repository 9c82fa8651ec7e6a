use serde::{Deserialize, Serialize};

/// Outcome of one measured property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Largest deviation seen for this property (0 for exact structural checks).
    pub max_violation: f64,
    /// Location of the worst violation, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn within(name: impl Into<String>, max_violation: f64, tol: f64, witness: Option<String>) -> Self {
        let pass = max_violation <= tol;
        Self {
            name: name.into(),
            pass,
            max_violation,
            witness: if pass { None } else { witness },
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool, witness: Option<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            max_violation: if pass { 0.0 } else { 1.0 },
            witness: if pass { None } else { witness },
        }
    }
}

/// Tracks the worst violation of a property while scanning.
#[derive(Debug, Clone, Default)]
pub(crate) struct Worst {
    pub value: f64,
    pub witness: Option<String>,
}

impl Worst {
    pub fn observe(&mut self, value: f64, witness: impl FnOnce() -> String) {
        if value > self.value {
            self.value = value;
            self.witness = Some(witness());
        }
    }

    pub fn into_check(self, name: &str, tol: f64) -> Check {
        Check::within(name, self.value, tol, self.witness)
    }
}

/// Ordered list of checks; passes iff every entry passes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckList(pub Vec<Check>);

impl CheckList {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn push(&mut self, c: Check) {
        self.0.push(c);
    }

    pub fn pass(&self) -> bool {
        self.0.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.0.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.0.iter().filter(|c| !c.pass)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Check> {
        self.0.iter()
    }

    pub fn extend(&mut self, other: CheckList) {
        self.0.extend(other.0);
    }
}

impl IntoIterator for CheckList {
    type Item = Check;
    type IntoIter = std::vec::IntoIter<Check>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}
