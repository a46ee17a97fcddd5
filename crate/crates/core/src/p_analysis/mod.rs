//! The operators `T_A`, `F_A`, the alpha quantities built on them, P/P0
//! classification with refutation witnesses and the diagonal scaling
//! certificate.

mod lattice;
mod local;
mod operators;
mod verdict;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Vector;

pub use operators::{
    apply, f_operator, grid_tolerance, objective, objective_modulus, products,
    support_max_product, t_lipschitz, t_operator, Operator,
};
pub use verdict::{alpha_estimate, p_classify, scaling_certificate};

/// Default cap on lattice evaluations.
pub const DEFAULT_MAX_EVALS: u64 = 100_000_000;

fn default_h() -> f64 {
    0.05
}
fn default_starts() -> usize {
    64
}
fn default_iters() -> usize {
    500
}
fn default_max_evals() -> u64 {
    DEFAULT_MAX_EVALS
}

/// How the sphere is searched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum SearchMethod {
    /// Exhaustive lattice with spacing at most `h`.
    Grid {
        #[serde(default = "default_h")]
        h: f64,
    },
    /// Seeded local searches from `starts` random sphere points.
    Multistart {
        #[serde(default = "default_starts")]
        starts: usize,
        #[serde(default = "default_iters")]
        iters: usize,
        #[serde(default)]
        seed: u64,
    },
}

/// Search configuration, e.g. `{"method":"grid","h":0.05}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    #[serde(flatten)]
    pub method: SearchMethod,
    #[serde(default = "default_max_evals")]
    pub max_evals: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig::grid(default_h())
    }
}

impl SearchConfig {
    pub fn grid(h: f64) -> Self {
        SearchConfig { method: SearchMethod::Grid { h }, max_evals: DEFAULT_MAX_EVALS }
    }

    pub fn multistart(starts: usize, iters: usize, seed: u64) -> Self {
        SearchConfig {
            method: SearchMethod::Multistart { starts, iters, seed },
            max_evals: DEFAULT_MAX_EVALS,
        }
    }

    pub fn with_max_evals(mut self, max_evals: u64) -> Self {
        self.max_evals = max_evals;
        self
    }

    pub fn is_grid(&self) -> bool {
        matches!(self.method, SearchMethod::Grid { .. })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: SearchConfig = serde_json::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            SearchMethod::Grid { h } if !(h.is_finite() && h > 0.0 && h <= 2.0) => {
                Err(Error::InvalidConfig(format!("grid spacing h must lie in (0, 2], got {h}")))
            }
            SearchMethod::Multistart { starts: 0, .. } => {
                Err(Error::InvalidConfig("starts must be at least 1".into()))
            }
            SearchMethod::Multistart { iters: 0, .. } => {
                Err(Error::InvalidConfig("iters must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Value of `min_{|x|_inf = 1} max_i x_i op(x)_i` as found by a search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub value: f64,
    pub minimizer: Vector,
    pub operator: Operator,
    pub method: SearchMethod,
    /// True for the exhaustive lattice search only. The certificate is for
    /// the lattice minimum, not the continuous one.
    pub certified: bool,
    /// For lattice results, the band `2 * modulus(h)` around zero in which
    /// the sign of the lattice value may differ from the continuous value.
    pub tolerance: Option<f64>,
    pub evaluations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PClass {
    P,
    #[serde(rename = "P0_NOT_P")]
    P0NotP,
    #[serde(rename = "NOT_P0")]
    NotP0,
}

impl PClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PClass::P => "P",
            PClass::P0NotP => "P0_NOT_P",
            PClass::NotP0 => "NOT_P0",
        }
    }
}

/// Outcome of [`p_classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PVerdict {
    pub class: PClass,
    /// For `NOT_P0`, a point whose products are negative on its whole
    /// support. For `P0_NOT_P`, a point whose largest product is `<= 0`.
    pub witness: Option<Vector>,
    /// `x_i (A x^(m-1))_i` at the witness.
    pub witness_products: Option<Vec<f64>>,
    #[serde(rename = "alpha_T")]
    pub alpha_t: AlphaEstimate,
    /// False when the verdict rests on multistart search alone.
    pub certified: bool,
    pub notes: Vec<String>,
}

impl PVerdict {
    pub fn label(&self) -> &'static str {
        if self.certified {
            "certified"
        } else {
            "empirical"
        }
    }
}

/// Positive diagonal `D` with `x^T D (A x^(m-1)) > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingCertificate {
    pub x: Vector,
    /// One-based index of the unscaled component.
    pub k: usize,
    pub epsilon: f64,
    #[serde(rename = "D")]
    pub d: Vector,
    pub product: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_json_forms() {
        let g = SearchConfig::from_json(r#"{"method":"grid","h":0.05}"#).unwrap();
        assert_eq!(g, SearchConfig::grid(0.05));
        let m = SearchConfig::from_json(r#"{"method":"multistart","starts":64,"iters":500,"seed":1}"#)
            .unwrap();
        assert_eq!(m, SearchConfig::multistart(64, 500, 1));
        let d = SearchConfig::from_json(r#"{"method":"grid"}"#).unwrap();
        assert_eq!(d, SearchConfig::default());
        assert!(SearchConfig::from_json(r#"{"method":"grid","h":0}"#).is_err());
        assert!(SearchConfig::from_json(r#"{"method":"anneal"}"#).is_err());
        let back: SearchConfig = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
