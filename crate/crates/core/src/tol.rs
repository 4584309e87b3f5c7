use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by the oracles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Constraint slack accepted for LP witnesses.
    pub feas: f64,
    /// Objective agreement for LP values.
    pub obj: f64,
    /// Relative threshold below which a dual functional counts as zero.
    pub zero: f64,
    /// Relative band-pattern residual accepted by locality scans.
    pub band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feas: 1e-9,
            obj: 1e-8,
            zero: 1e-9,
            band: 1e-8,
        }
    }
}

impl Tolerances {
    /// Overrides every relative threshold with a single value, as done by the
    /// CLI `--tol` flag.
    pub fn with_uniform(value: f64) -> Self {
        Self {
            feas: value,
            obj: value * 10.0,
            zero: value,
            band: value * 10.0,
        }
    }
}

/// Three-valued oracle outcome. `Undecided` is never coerced to a boolean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    True,
    False,
    Undecided,
}

impl Truth {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Truth::True
    }

    pub fn is_false(self) -> bool {
        self == Truth::False
    }

    /// Conjunction that keeps `False` dominant over `Undecided`.
    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::Undecided, _) | (_, Truth::Undecided) => Truth::Undecided,
            _ => Truth::True,
        }
    }
}

impl std::fmt::Display for Truth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Undecided => "undecided",
        })
    }
}
