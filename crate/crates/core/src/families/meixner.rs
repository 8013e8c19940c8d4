//! Linear birth and death process `λᵢ = c(i+β)/(1−c)`, `μᵢ = i/(1−c)`.
//!
//! The orthogonality measure is the negative binomial distribution on
//! `{0, 1, 2, …}`, so the return amplitude is `2π`-periodic.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{FamilyChain, TailRule};
use crate::error::{Error, Result};
use crate::jacobi::{BirthDeathRates, JacobiOperator};
use crate::scalar::Real;
use crate::spectral::{MeasureKind, SpectralChain, SpectralMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeixnerFamily<T> {
    pub beta: T,
    pub c: T,
}

impl<T: Real> MeixnerFamily<T> {
    pub fn new(beta: T, c: T) -> Result<Self> {
        if !(beta > T::zero()) || !beta.is_finite() {
            return Err(Error::parameter("beta", format!("β = {beta} must be positive")));
        }
        if !(c > T::zero() && c < T::one()) {
            return Err(Error::parameter("c", format!("c = {c} must lie in (0, 1)")));
        }
        Ok(Self { beta, c })
    }

    pub fn rates(&self) -> BirthDeathRates<T> {
        let Self { beta, c } = *self;
        BirthDeathRates::from_fn(move |i| {
            let n = T::from_usize_lossy(i);
            let d = T::one() - c;
            (c * (n + beta) / d, n / d)
        })
    }

    /// `Bᵢ = ((c+1)i + βc)/(1−c)`.
    pub fn diagonal(&self, i: usize) -> T {
        let n = T::from_usize_lossy(i);
        ((self.c + T::one()) * n + self.beta * self.c) / (T::one() - self.c)
    }

    /// `Jᵢ = √(c i (i+β−1))/(1−c)`.
    pub fn coupling(&self, i: usize) -> T {
        let n = T::from_usize_lossy(i);
        (self.c * n * (n + self.beta - T::one())).sqrt() / (T::one() - self.c)
    }

    pub fn jacobi(&self, sites: usize) -> Result<JacobiOperator<T>> {
        JacobiOperator::from_fns(sites, |i| self.diagonal(i), |i| self.coupling(i))
    }

    /// `Mₛ = (1−c)^β (β)ₛ cˢ / s!`.
    pub fn mass(&self, s: usize) -> T {
        let mut m = (T::one() - self.c).powf(self.beta);
        for r in 0..s {
            let r = T::from_usize_lossy(r);
            m = m * self.c * (self.beta + r) / (r + T::one());
        }
        m
    }

    /// `∫ e^{−ixt} dμ = ((1−c)/(1 − e^{−it} c))^β`.
    pub fn return_amplitude(&self, t: T) -> Complex<T> {
        let (s, co) = t.sin_cos();
        let denom = Complex::new(T::one() - self.c * co, self.c * s);
        denom.powf(-self.beta) * (T::one() - self.c).powf(self.beta)
    }

    /// Leading `sites × sites` block of `J` with the negative binomial measure cut by `rule`.
    pub fn chain(&self, sites: usize, rule: &TailRule) -> Result<FamilyChain<T>> {
        if sites == 0 {
            return Err(Error::parameter("sites", "at least one site is required"));
        }
        let jacobi = self.jacobi(sites)?;
        let (beta, c) = (self.beta, self.c);
        let m0 = (T::one() - c).powf(beta);
        // masses by the ratio recurrence, cached so each level is O(1)
        let masses = std::cell::RefCell::new(vec![m0]);
        let cut = rule.apply(&jacobi, |s| {
            let mut cache = masses.borrow_mut();
            while cache.len() <= s {
                let r = T::from_usize_lossy(cache.len() - 1);
                let next = cache[cache.len() - 1] * c * (beta + r) / (r + T::one());
                cache.push(next);
            }
            vec![(T::from_usize_lossy(s), cache[s])]
        })?;
        let measure = SpectralMeasure::discrete(cut.points, cut.masses)?
            .with_tail_mass(T::lit(cut.tail_mass));
        Ok(FamilyChain {
            name: "meixner",
            chain: SpectralChain::new(jacobi, measure),
            rates: Some(self.rates()),
            declared_kind: MeasureKind::Discrete,
            elliptic: None,
            info: serde_json::json!({
                "beta": beta.to_f64_lossy(),
                "c": c.to_f64_lossy(),
                "sites": sites,
                "atoms": cut.levels,
                "tail_mass": cut.tail_mass,
                "weighted_tail": cut.weighted_tail,
            }),
        })
    }
}

/// Meixner chain with `sites` sites.
pub fn meixner_chain<T: Real>(beta: T, c: T, sites: usize) -> Result<FamilyChain<T>> {
    MeixnerFamily::new(beta, c)?.chain(sites, &TailRule::default())
}
