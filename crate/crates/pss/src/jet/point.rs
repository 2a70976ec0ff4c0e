//! Evaluation points in jet space.

use super::variable::JetVariable;
use std::collections::BTreeMap;

/// An assignment of real values to jet coordinates and parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JetPoint {
    pub vars: BTreeMap<JetVariable, f64>,
    pub params: BTreeMap<String, f64>,
}

impl JetPoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_var(mut self, v: JetVariable, value: f64) -> Self {
        self.vars.insert(v, value);
        self
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn var(&self, v: JetVariable) -> Option<f64> {
        self.vars.get(&v).copied()
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    pub fn set_var(&mut self, v: JetVariable, value: f64) {
        self.vars.insert(v, value);
    }

    pub fn set_param(&mut self, name: &str, value: f64) {
        self.params.insert(name.to_string(), value);
    }

    /// Flattens the point to canonical-name/value pairs, jet coordinates
    /// first. Used for witness reporting.
    pub fn named_values(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for (v, val) in &self.vars {
            out.insert(v.to_string(), *val);
        }
        for (p, val) in &self.params {
            out.insert(p.clone(), *val);
        }
        out
    }
}
