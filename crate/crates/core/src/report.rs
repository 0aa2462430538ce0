//! Machine-readable result records shared by the samplers, the Fock-space
//! checks and the command-line front end.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MomentValue {
    Real(f64),
    Complex([f64; 2]),
}

impl MomentValue {
    pub fn to_complex(self) -> C64 {
        match self {
            MomentValue::Real(x) => C64::new(x, 0.0),
            MomentValue::Complex([re, im]) => C64::new(re, im),
        }
    }
}

/// A named moment or correlation value. `std_error` and `n_samples` are set
/// exactly when the value is a Monte Carlo estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub label: String,
    pub value: MomentValue,
    pub std_error: Option<f64>,
    pub n_samples: Option<u64>,
}

impl MomentReport {
    pub fn exact(label: impl Into<String>, value: f64) -> Self {
        Self { label: label.into(), value: MomentValue::Real(value), std_error: None, n_samples: None }
    }

    pub fn exact_complex(label: impl Into<String>, value: C64) -> Self {
        let value = if value.im == 0.0 {
            MomentValue::Real(value.re)
        } else {
            MomentValue::Complex([value.re, value.im])
        };
        Self { label: label.into(), value, std_error: None, n_samples: None }
    }

    pub fn estimate(label: impl Into<String>, value: f64, std_error: f64, n_samples: u64) -> Self {
        Self {
            label: label.into(),
            value: MomentValue::Real(value),
            std_error: Some(std_error),
            n_samples: Some(n_samples),
        }
    }

    pub fn is_estimate(&self) -> bool {
        self.std_error.is_some()
    }

    /// Real part of the value.
    pub fn real(&self) -> f64 {
        self.value.to_complex().re
    }

    pub fn complex(&self) -> C64 {
        self.value.to_complex()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("moment reports always serialize")
    }
}

/// One verified identity: its residual, the tolerance it is held to, and the verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            detail: None,
        }
    }

    pub fn failed(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            residual: f64::INFINITY,
            tolerance: 0.0,
            pass: false,
            detail: Some(detail.into()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}
