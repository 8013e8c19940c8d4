//! Named chains with closed-form spectral data.
//!
//! Every family provides a Jacobi operator of a requested size together with
//! its orthogonality measure. Infinite supports are truncated by [`TailRule`],
//! which drops atoms only while the neglected part of every Gram entry
//! `Σ Mₛ χᵢ(xₛ) χⱼ(xₛ)`, `i, j < sites`, stays below the mass tolerance.

mod meixner;
mod pst;
mod stieltjes_carlitz;
mod uniform;

pub use meixner::{meixner_chain, MeixnerFamily};
pub use pst::pst_demo_chain;
pub use stieltjes_carlitz::{stieltjes_carlitz_chain, ScVariant, StieltjesCarlitzFamily};
pub use uniform::{uniform_chain, UniformMode, DEFAULT_QUADRATURE_ORDER};

use crate::error::{Error, Result};
use crate::jacobi::{BirthDeathRates, JacobiOperator};
use crate::scalar::Real;
use crate::spectral::{MeasureKind, PolynomialEvaluator, SpectralChain, SpectralMeasure};
use crate::special::EllipticContext;

/// Default operator size for semi-infinite families.
pub const DEFAULT_SITES: usize = 16;

/// Truncation policy for measures with infinitely many atoms.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct TailRule {
    /// Largest neglected weight.
    pub mass_tol: f64,
    /// Most levels (atoms or symmetric atom pairs) ever generated.
    pub cap: usize,
}

impl Default for TailRule {
    fn default() -> Self {
        Self {
            mass_tol: 1e-12,
            cap: 20_000,
        }
    }
}

/// Result of applying a [`TailRule`].
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Truncated<T> {
    pub points: Vec<T>,
    pub masses: Vec<T>,
    /// Neglected plain mass.
    pub tail_mass: f64,
    /// Neglected mass weighted by `Σᵢ χᵢ²`.
    pub weighted_tail: f64,
    pub levels: usize,
}

impl TailRule {
    /// Keeps the shortest prefix of `level(0), level(1), …` whose remaining
    /// weighted mass is below `mass_tol`. Each level is a group of atoms kept or
    /// dropped together.
    pub(crate) fn apply<T: Real>(
        &self,
        jacobi: &JacobiOperator<T>,
        level: impl Fn(usize) -> Vec<(T, T)>,
    ) -> Result<Truncated<T>> {
        let eval = PolynomialEvaluator::new(jacobi);
        let degree = jacobi.size() - 1;
        let stop = self.mass_tol * 1e-6;
        let mut levels = Vec::new();
        let mut plain = Vec::new();
        let mut weighted: Vec<f64> = Vec::new();
        let mut decreasing = 0;
        loop {
            if levels.len() == self.cap {
                return Err(Error::Config(format!(
                    "spectral tail has not converged after {} terms; raise the cap",
                    self.cap
                )));
            }
            let atoms = level(levels.len());
            let mut w = 0.0;
            let mut p = 0.0;
            for &(x, m) in &atoms {
                let seq = eval.sequence(x, degree)?;
                w += (0..=degree)
                    .map(|i| seq.weighted_product(m, i, i).to_f64_lossy())
                    .sum::<f64>();
                p += m.to_f64_lossy();
            }
            if !w.is_finite() {
                return Err(Error::Config("spectral tail weight overflowed".into()));
            }
            match weighted.last() {
                Some(&prev) if w <= prev => decreasing += 1,
                _ => decreasing = 0,
            }
            levels.push(atoms);
            plain.push(p);
            weighted.push(w);
            if w < stop && decreasing >= 3 {
                break;
            }
        }
        let mut suffix = 0.0;
        let mut plain_suffix = 0.0;
        let mut keep = levels.len();
        for k in (1..levels.len()).rev() {
            if suffix + weighted[k] >= self.mass_tol {
                break;
            }
            suffix += weighted[k];
            plain_suffix += plain[k];
            keep = k;
        }
        let (points, masses) = levels.into_iter().take(keep).flatten().unzip();
        Ok(Truncated {
            points,
            masses,
            tail_mass: plain_suffix,
            weighted_tail: suffix,
            levels: keep,
        })
    }
}

/// A named chain ready for dynamics and return analysis.
#[derive(Clone)]
pub struct FamilyChain<T> {
    pub name: &'static str,
    pub chain: SpectralChain<T>,
    /// Birth and death rates when the operator comes from a Markov process.
    pub rates: Option<BirthDeathRates<T>>,
    /// Kind of the untruncated measure; decides the return classification.
    pub declared_kind: MeasureKind,
    pub elliptic: Option<EllipticContext<T>>,
    /// Parameters and truncation data for manifests.
    pub info: serde_json::Value,
}

impl<T: Real> std::fmt::Debug for FamilyChain<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FamilyChain")
            .field("name", &self.name)
            .field("chain", &self.chain)
            .field("rates", &self.rates)
            .field("declared_kind", &self.declared_kind)
            .field("elliptic", &self.elliptic)
            .field("info", &self.info)
            .finish()
    }
}

impl<T: Real> FamilyChain<T> {
    pub fn jacobi(&self) -> &JacobiOperator<T> {
        self.chain.jacobi()
    }

    pub fn measure(&self) -> &SpectralMeasure<T> {
        self.chain.measure()
    }

    pub fn sites(&self) -> usize {
        self.chain.sites()
    }
}
