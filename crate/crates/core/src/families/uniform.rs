//! Uniform chain `Bᵢ = 0`, `Jᵢ = 1/2`.
//!
//! Its measure is `(2/π)√(1 − x²) dx` on `[−1, 1]`, the polynomials are
//! Chebyshev polynomials of the second kind and `f₀₀(t) = 2𝒥₁(t)/t`.

use serde::{Deserialize, Serialize};

use super::FamilyChain;
use crate::error::{Error, Result};
use crate::jacobi::JacobiOperator;
use crate::scalar::Real;
use crate::spectral::{Density, MeasureKind, SpectralChain, SpectralMeasure};

/// Default Gauss rule order for the continuous measure.
pub const DEFAULT_QUADRATURE_ORDER: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UniformMode {
    /// Semi-infinite chain; `sites` sites of the operator are kept for
    /// polynomial evaluation and the measure is integrated by an `order`-point rule.
    Continuous { order: usize, sites: usize },
    /// Finite chain of `n + 1` sites, with its own discrete measure.
    Truncated { n: usize },
}

/// Uniform chain in either mode. The declared measure kind is continuous in
/// both, since the finite chain only approximates the semi-infinite one.
pub fn uniform_chain<T: Real>(mode: UniformMode) -> Result<FamilyChain<T>> {
    let half = T::half();
    let (chain, info) = match mode {
        UniformMode::Continuous { order, sites } => {
            if sites == 0 {
                return Err(Error::parameter("sites", "at least one site is required"));
            }
            if sites > 2 * order {
                return Err(Error::parameter(
                    "order",
                    format!("a {order}-point rule cannot integrate χᵢχⱼ for {sites} sites"),
                ));
            }
            let jacobi = JacobiOperator::from_fns(sites, |_| T::zero(), |_| half)?;
            let measure = SpectralMeasure::continuous(Density::ChebyshevSecondKind, order)?;
            let info = serde_json::json!({"mode": "continuous", "order": order, "sites": sites});
            (SpectralChain::new(jacobi, measure), info)
        }
        UniformMode::Truncated { n } => {
            let jacobi = JacobiOperator::from_fns(n + 1, |_| T::zero(), |_| half)?;
            let info = serde_json::json!({"mode": "truncated", "n": n, "sites": n + 1});
            (SpectralChain::from_jacobi(jacobi)?, info)
        }
    };
    Ok(FamilyChain {
        name: "uniform",
        chain,
        rates: None,
        declared_kind: MeasureKind::Continuous,
        elliptic: None,
        info,
    })
}
