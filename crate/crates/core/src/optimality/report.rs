use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Named sup-norm residuals with their tolerances.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a check; a NaN residual fails.
    pub fn push(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) -> bool {
        let pass = residual.abs() <= tolerance;
        self.checks.push(Check {
            name: name.into(),
            residual,
            tolerance,
            pass,
        });
        pass
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

/// Named tolerances with defaults; overrides must name a known check.
#[derive(Debug, Clone, Default)]
pub struct Tolerances {
    values: std::collections::BTreeMap<String, f64>,
}

impl Tolerances {
    pub fn with_defaults(defaults: &[(&str, f64)]) -> Self {
        Self {
            values: defaults.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }

    pub fn get(&self, name: &str) -> f64 {
        self.values.get(name).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, name: &str, value: f64) -> crate::Result<()> {
        if !(value >= 0.0) {
            return Err(crate::Error::InvalidParameter(format!("tolerance {name} must be non-negative")));
        }
        match self.values.get_mut(name) {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => Err(crate::Error::InvalidParameter(format!(
                "unknown tolerance {name}; known: {}",
                self.names().join(", ")
            ))),
        }
    }

    pub fn names(&self) -> Vec<&str> {
        self.values.keys().map(String::as_str).collect()
    }
}
