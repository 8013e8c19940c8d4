//! Stieltjes–Carlitz chains: `Bₙ = 0` with `Jₙ²` alternating between `n²`
//! and `k²n²` by parity.
//!
//! Both variants have lattice spectra with weights built from the nome `q`:
//!
//! ```text
//! C: Jₙ² = k²n² (n even), n² (n odd);  τₛ = (2s+1)π/(2K),  Mₛ ∝ 1/(q^{s+½} + q^{−s−½})
//! D: Jₙ² = n² (n even), k²n² (n odd);  τₛ = sπ/K,          Mₛ ∝ 1/(qˢ + q^{−s})
//! ```
//!
//! The return amplitudes are `cn(ωt; k)` and `dn(ωt; k)`. Neither operator
//! is the symmetrization of a birth and death process.

use serde::{Deserialize, Serialize};

use super::{FamilyChain, TailRule};
use crate::error::{Error, Result};
use crate::jacobi::JacobiOperator;
use crate::returns::{detect_lattice, LatticeOptions};
use crate::scalar::Real;
use crate::special::EllipticContext;
use crate::spectral::{MeasureKind, SpectralChain, SpectralMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScVariant {
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesCarlitzFamily<T> {
    pub variant: ScVariant,
    pub context: EllipticContext<T>,
}

impl<T: Real> StieltjesCarlitzFamily<T> {
    pub fn new(variant: ScVariant, k: T) -> Result<Self> {
        Ok(Self {
            variant,
            context: EllipticContext::new(k)?,
        })
    }

    /// `Jₙ`, `n ≥ 1`.
    pub fn coupling(&self, n: usize) -> T {
        let scaled = match self.variant {
            ScVariant::C => n.is_multiple_of(2),
            ScVariant::D => n % 2 == 1,
        };
        let n = T::from_usize_lossy(n);
        if scaled {
            self.context.k * n
        } else {
            n
        }
    }

    pub fn jacobi(&self, sites: usize) -> Result<JacobiOperator<T>> {
        JacobiOperator::from_fns(sites, |_| T::zero(), |n| self.coupling(n))
    }

    /// Unnormalized atoms `(τ, 1/(q^a + q^{−a}))` of level `level`, in the
    /// overflow-free form `q^a / (1 + q^{2a})`.
    fn level(&self, level: usize) -> Vec<(T, T)> {
        let ctx = &self.context;
        let q = ctx.nome;
        let weight = |a: T| {
            let qa = q.powf(a);
            qa / (T::one() + qa * qa)
        };
        let l = T::from_usize_lossy(level);
        match self.variant {
            ScVariant::C => {
                // s = level and s = −level−1 share |s + ½| = level + ½
                let a = l + T::half();
                let tau = T::PI() * (T::two() * l + T::one()) / (T::two() * ctx.big_k);
                let w = weight(a);
                vec![(-tau, w), (tau, w)]
            }
            ScVariant::D => {
                let tau = T::PI() * l / ctx.big_k;
                let w = weight(l);
                if level == 0 {
                    vec![(T::zero(), w)]
                } else {
                    vec![(-tau, w), (tau, w)]
                }
            }
        }
    }

    /// Leading `sites × sites` block with the lattice measure cut symmetrically
    /// by `rule` and normalized numerically.
    pub fn chain(&self, sites: usize, rule: &TailRule) -> Result<FamilyChain<T>> {
        if sites == 0 {
            return Err(Error::parameter("sites", "at least one site is required"));
        }
        let jacobi = self.jacobi(sites)?;
        // pre-normalize so the tail rule sees probabilities, then renormalize the cut
        let scale: T = (0..400).flat_map(|l| self.level(l)).map(|(_, m)| m).sum();
        let cut = rule.apply(&jacobi, |l| {
            self.level(l).into_iter().map(|(x, m)| (x, m / scale)).collect()
        })?;
        let total: T = cut.masses.iter().copied().sum();
        let masses: Vec<T> = cut.masses.iter().map(|&m| m / total).collect();
        let lowest = cut.points.iter().copied().fold(T::infinity(), T::min);
        let highest = cut.points.iter().copied().fold(T::neg_infinity(), T::max);
        if (lowest + highest).abs() > T::lit(1e-12) * highest.abs().max(T::one()) {
            return Err(Error::Config("truncated spectrum is not symmetric".into()));
        }
        let tail = cut.tail_mass / total.to_f64_lossy();
        let measure = SpectralMeasure::discrete(cut.points, masses)?.with_tail_mass(T::lit(tail));
        let name = match self.variant {
            ScVariant::C => "sc-c",
            ScVariant::D => "sc-d",
        };
        let ctx = &self.context;
        Ok(FamilyChain {
            name,
            chain: SpectralChain::new(jacobi, measure),
            rates: None,
            declared_kind: MeasureKind::Discrete,
            elliptic: Some(self.context),
            info: serde_json::json!({
                "k": ctx.k.to_f64_lossy(),
                "K": ctx.big_k.to_f64_lossy(),
                "K_prime": ctx.big_k_prime.to_f64_lossy(),
                "q": ctx.nome.to_f64_lossy(),
                "eta": (T::one() / (total * scale)).to_f64_lossy(),
                "sites": sites,
                "levels": cut.levels,
                "tail_mass": tail,
            }),
        })
    }

    /// `ω` such that the return amplitude is `cn(ωt)` or `dn(ωt)`, read off the
    /// lattice spacing `Δ` of `measure` as `ω = ΔK/π`.
    pub fn fitted_omega(&self, measure: &SpectralMeasure<T>) -> Result<T> {
        let verdict = detect_lattice(measure, &LatticeOptions::default())?;
        let spacing = verdict
            .evidence
            .spacing
            .ok_or_else(|| Error::Usage("measure is not a lattice; ω cannot be fitted".into()))?;
        Ok(spacing * self.context.big_k / T::PI())
    }

    /// `cn(ωt; k)` or `dn(ωt; k)`.
    pub fn model_amplitude(&self, omega: T, t: T) -> T {
        let (_, cn, dn) = self.context.sn_cn_dn(omega * t);
        match self.variant {
            ScVariant::C => cn,
            ScVariant::D => dn,
        }
    }
}

/// Stieltjes–Carlitz chain of the given variant with `sites` sites.
pub fn stieltjes_carlitz_chain<T: Real>(
    variant: ScVariant,
    k: T,
    sites: usize,
) -> Result<FamilyChain<T>> {
    StieltjesCarlitzFamily::new(variant, k)?.chain(sites, &TailRule::default())
}
