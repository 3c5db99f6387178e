//! Exact target values written as sums of surds over an integer denominator,
//! e.g. `2 sqrt 6` or `(sqrt 2 + sqrt 10) / 2`.

use std::fmt;

use serde::{Deserialize, Serialize};

/// `(sum_k c_k sqrt(r_k)) / denominator`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surd {
    pub terms: Vec<(i64, u64)>,
    pub denominator: i64,
}

impl Surd {
    /// `coef * sqrt(radicand)`.
    pub fn root(coef: i64, radicand: u64) -> Self {
        Self { terms: vec![(coef, radicand)], denominator: 1 }
    }

    pub fn integer(n: i64) -> Self {
        Self::root(n, 1)
    }

    pub fn new(terms: Vec<(i64, u64)>, denominator: i64) -> Self {
        assert!(denominator != 0, "zero denominator");
        Self { terms, denominator }
    }

    pub fn value(&self) -> f64 {
        let num: f64 = self.terms.iter().map(|&(c, r)| c as f64 * (r as f64).sqrt()).sum();
        num / self.denominator as f64
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(c, r)| match (c, r) {
                (c, 1) => c.to_string(),
                (1, r) => format!("sqrt({r})"),
                (-1, r) => format!("-sqrt({r})"),
                (c, r) => format!("{c}*sqrt({r})"),
            })
            .collect();
        let num = parts.join(" + ").replace("+ -", "- ");
        if self.denominator == 1 {
            write!(f, "{num}")
        } else if self.terms.len() > 1 {
            write!(f, "({num})/{}", self.denominator)
        } else {
            write!(f, "{num}/{}", self.denominator)
        }
    }
}
