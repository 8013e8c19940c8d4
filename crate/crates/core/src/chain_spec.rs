//! JSON chain specifications and the registry of named families.
//!
//! ```json
//! {"family": "custom", "lambdas": [1.0, 0.5, 0.0], "mus": [0.0, 2.0, 1.0]}
//! {"family": "meixner", "beta": 1.0, "c": 0.25}
//! {"family": "sc-d", "k": 0.7, "sites": 12}
//! {"family": "uniform", "order": 256}
//! {"family": "uniform", "n": 200}
//! {"family": "pst-demo", "n": 9}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{
    pst_demo_chain, uniform_chain, FamilyChain, MeixnerFamily, ScVariant, StieltjesCarlitzFamily,
    TailRule, UniformMode, DEFAULT_QUADRATURE_ORDER, DEFAULT_SITES,
};
use crate::jacobi::{symmetrize, BirthDeathRates, JacobiOperator};
use crate::scalar::Real;
use crate::spectral::{MeasureKind, SpectralChain};

/// Default size of the transfer demonstration chain (`n + 1` sites).
pub const DEFAULT_PST_N: usize = 9;

/// A chain described by family name and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChainSpec {
    /// Finite chain from rates (`lambdas`, `mus`) or directly from the
    /// operator (`diagonal`, `couplings`).
    Custom {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambdas: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mus: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        diagonal: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        couplings: Option<Vec<f64>>,
    },
    Meixner {
        beta: f64,
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sites: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<TailRule>,
    },
    ScC {
        k: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sites: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<TailRule>,
    },
    ScD {
        k: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sites: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<TailRule>,
    },
    /// Continuous measure unless `n` is given, which selects the `n + 1`-site truncation.
    Uniform {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sites: Option<usize>,
    },
    PstDemo {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
}

impl ChainSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid chain spec: {e}")))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("chain spec serializes")
    }

    pub fn family(&self) -> &'static str {
        match self {
            ChainSpec::Custom { .. } => "custom",
            ChainSpec::Meixner { .. } => "meixner",
            ChainSpec::ScC { .. } => "sc-c",
            ChainSpec::ScD { .. } => "sc-d",
            ChainSpec::Uniform { .. } => "uniform",
            ChainSpec::PstDemo { .. } => "pst-demo",
        }
    }

    /// Builds the chain in scalar type `T`.
    pub fn build<T: Real>(&self) -> Result<FamilyChain<T>> {
        let lit = |x: f64| -> T { T::lit(x) };
        let vec_of = |v: &[f64]| -> Vec<T> { v.iter().map(|&x| lit(x)).collect() };
        match self {
            ChainSpec::Custom {
                lambdas,
                mus,
                diagonal,
                couplings,
            } => match (lambdas, mus, diagonal, couplings) {
                (Some(l), Some(m), None, None) => {
                    if l.is_empty() {
                        return Err(Error::parameter("lambdas", "a chain needs at least one site"));
                    }
                    let rates = BirthDeathRates::finite(vec_of(l), vec_of(m))?;
                    let jacobi = symmetrize(&rates, l.len() - 1)?;
                    Ok(FamilyChain {
                        name: "custom",
                        chain: SpectralChain::from_jacobi(jacobi)?,
                        rates: Some(rates),
                        declared_kind: MeasureKind::Discrete,
                        elliptic: None,
                        info: serde_json::json!({"sites": l.len()}),
                    })
                }
                (None, None, Some(b), Some(j)) => {
                    let jacobi = JacobiOperator::new(vec_of(b), vec_of(j))?;
                    Ok(FamilyChain {
                        name: "custom",
                        chain: SpectralChain::from_jacobi(jacobi)?,
                        rates: None,
                        declared_kind: MeasureKind::Discrete,
                        elliptic: None,
                        info: serde_json::json!({"sites": b.len()}),
                    })
                }
                _ => Err(Error::parameter(
                    "lambdas",
                    "custom chains take either lambdas and mus, or diagonal and couplings",
                )),
            },
            ChainSpec::Meixner { beta, c, sites, tail } => MeixnerFamily::new(lit(*beta), lit(*c))?
                .chain(sites.unwrap_or(DEFAULT_SITES), &tail.unwrap_or_default()),
            ChainSpec::ScC { k, sites, tail } => StieltjesCarlitzFamily::new(ScVariant::C, lit(*k))?
                .chain(sites.unwrap_or(DEFAULT_SITES), &tail.unwrap_or_default()),
            ChainSpec::ScD { k, sites, tail } => StieltjesCarlitzFamily::new(ScVariant::D, lit(*k))?
                .chain(sites.unwrap_or(DEFAULT_SITES), &tail.unwrap_or_default()),
            ChainSpec::Uniform { n, order, sites } => {
                let mode = match (n, order, sites) {
                    (Some(n), None, None) => UniformMode::Truncated { n: *n },
                    (None, order, sites) => UniformMode::Continuous {
                        order: order.unwrap_or(DEFAULT_QUADRATURE_ORDER),
                        sites: sites.unwrap_or(DEFAULT_SITES),
                    },
                    _ => {
                        return Err(Error::parameter(
                            "n",
                            "a truncated uniform chain takes no order or sites",
                        ))
                    }
                };
                uniform_chain(mode)
            }
            ChainSpec::PstDemo { n } => pst_demo_chain(n.unwrap_or(DEFAULT_PST_N)),
        }
    }
}

/// One parameter of a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterInfo {
    pub name: &'static str,
    pub range: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub default: Option<&'static str>,
}

/// Registry entry describing a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub measure: &'static str,
    pub parameters: Vec<ParameterInfo>,
}

fn param(name: &'static str, range: &'static str, default: Option<&'static str>) -> ParameterInfo {
    ParameterInfo { name, range, default }
}

/// Every family accepted by [`ChainSpec`].
pub fn registry() -> Vec<FamilyInfo> {
    let sites = || param("sites", "integer >= 1", Some("16"));
    let tail = || param("tail", "{mass_tol > 0, cap >= 1}", Some("{1e-12, 20000}"));
    vec![
        FamilyInfo {
            name: "custom",
            description: "finite chain from birth/death rates or from a Jacobi operator",
            measure: "discrete",
            parameters: vec![
                param("lambdas", "N+1 values, > 0 except the last (>= 0)", None),
                param("mus", "N+1 values, mus[0] >= 0, others > 0", None),
                param("diagonal", "N+1 real values (instead of lambdas/mus)", None),
                param("couplings", "N values > 0 (instead of lambdas/mus)", None),
            ],
        },
        FamilyInfo {
            name: "meixner",
            description: "linear birth and death process, negative binomial measure",
            measure: "discrete",
            parameters: vec![param("beta", "> 0", None), param("c", "(0, 1)", None), sites(), tail()],
        },
        FamilyInfo {
            name: "sc-c",
            description: "Stieltjes-Carlitz C chain, return amplitude cn",
            measure: "discrete",
            parameters: vec![param("k", "(0, 1)", None), sites(), tail()],
        },
        FamilyInfo {
            name: "sc-d",
            description: "Stieltjes-Carlitz D chain, return amplitude dn",
            measure: "discrete",
            parameters: vec![param("k", "(0, 1)", None), sites(), tail()],
        },
        FamilyInfo {
            name: "uniform",
            description: "constant couplings 1/2, Chebyshev measure, return amplitude 2J1(t)/t",
            measure: "continuous",
            parameters: vec![
                param("n", "integer >= 0; selects the finite n+1-site chain", None),
                param("order", "integer >= 1, quadrature order", Some("256")),
                sites(),
            ],
        },
        FamilyInfo {
            name: "pst-demo",
            description: "finite chain with perfect end-to-end transfer at t = pi",
            measure: "discrete",
            parameters: vec![param("n", "integer >= 1; n+1 sites", Some("9"))],
        },
    ]
}
