//! Orthonormal polynomials `χᵢ` of a Jacobi operator and the Karlin–McGregor
//! polynomials `Qᵢ` of a birth–death process.

use crate::error::{Error, Result};
use crate::jacobi::{BirthDeathRates, JacobiOperator};
use crate::scalar::Real;

/// `χ₀(x) … χₙ(x)` stored as mantissa · 2^exponent.
///
/// The three-term recurrence is carried with a shared power-of-two rescale so
/// the sequence never overflows; products `M χᵢ χⱼ` are formed with the
/// exponents folded back in.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSequence<T> {
    mantissa: Vec<T>,
    exponent: Vec<i32>,
}

impl<T: Real> ScaledSequence<T> {
    pub fn len(&self) -> usize {
        self.mantissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mantissa.is_empty()
    }

    /// `χᵢ(x)` as a plain scalar; may be infinite for very large degrees.
    pub fn value(&self, i: usize) -> T {
        self.mantissa[i].scale_pow2(self.exponent[i])
    }

    pub fn scaled(&self, i: usize) -> (T, i32) {
        (self.mantissa[i], self.exponent[i])
    }

    /// `χᵢ = vᵢ / v₀` from the components of an eigenvector with `v₀ ≠ 0`,
    /// with `v₀`'s binary exponent moved into the shared exponent.
    pub(crate) fn from_eigenvector(v: &[T]) -> Self {
        let shift = v[0].abs().log2().floor().to_i32().unwrap_or(0);
        let lead = v[0].scale_pow2(-shift);
        Self {
            mantissa: v.iter().map(|&c| c / lead).collect(),
            exponent: vec![-shift; v.len()],
        }
    }

    /// `mass · χᵢ(x) · χⱼ(x)` without intermediate overflow.
    pub fn weighted_product(&self, mass: T, i: usize, j: usize) -> T {
        (mass * self.mantissa[i] * self.mantissa[j]).scale_pow2(self.exponent[i] + self.exponent[j])
    }
}

/// Evaluates `χᵢ` from `J_{i+1} χ_{i+1} = (x − Bᵢ) χᵢ − Jᵢ χ_{i−1}`.
#[derive(Debug, Clone, Copy)]
pub struct PolynomialEvaluator<'a, T> {
    jacobi: &'a JacobiOperator<T>,
}

impl<'a, T: Real> PolynomialEvaluator<'a, T> {
    pub fn new(jacobi: &'a JacobiOperator<T>) -> Self {
        Self { jacobi }
    }

    /// Largest degree the operator determines.
    pub fn max_degree(&self) -> usize {
        self.jacobi.size() - 1
    }

    /// `χ₀(x) … χₙ(x)`.
    pub fn sequence(&self, x: T, n: usize) -> Result<ScaledSequence<T>> {
        if n > self.max_degree() {
            return Err(Error::parameter(
                "degree",
                format!("degree {n} exceeds evaluator cap {}", self.max_degree()),
            ));
        }
        let b = self.jacobi.diagonal();
        let j = self.jacobi.couplings();
        let limit = T::max_value().sqrt().sqrt();
        let mut mantissa = Vec::with_capacity(n + 1);
        let mut exponent = Vec::with_capacity(n + 1);
        mantissa.push(T::one());
        exponent.push(0);
        let (mut prev, mut cur, mut e) = (T::zero(), T::one(), 0i32);
        for i in 0..n {
            let jm = if i == 0 { T::zero() } else { j[i - 1] };
            let mut next = ((x - b[i]) * cur - jm * prev) / j[i];
            prev = cur;
            if next.abs() > limit {
                let shift = next.abs().log2().floor().to_i32().unwrap_or(0);
                next = next.scale_pow2(-shift);
                prev = prev.scale_pow2(-shift);
                e += shift;
            }
            cur = next;
            mantissa.push(cur);
            exponent.push(e);
        }
        Ok(ScaledSequence { mantissa, exponent })
    }

    /// `χᵢ(x)`.
    pub fn chi(&self, i: usize, x: T) -> Result<T> {
        Ok(self.sequence(x, i)?.value(i))
    }
}

/// `χᵢ(x)` for the operator `jacobi`.
pub fn evaluate_chi<T: Real>(jacobi: &JacobiOperator<T>, i: usize, x: T) -> Result<T> {
    PolynomialEvaluator::new(jacobi).chi(i, x)
}

/// `Qᵢ(x)` from `−x Qⱼ = μⱼ Qⱼ₋₁ − (λⱼ + μⱼ) Qⱼ + λⱼ Qⱼ₊₁`, `Q₀ = 1`.
pub fn evaluate_q<T: Real>(rates: &BirthDeathRates<T>, i: usize, x: T) -> Result<T> {
    if i == 0 {
        return Ok(T::one());
    }
    let (lambdas, mus) = rates.truncate(i - 1, crate::jacobi::Boundary::AbsorbingTail)?;
    let (mut prev, mut cur) = (T::zero(), T::one());
    for k in 0..i {
        if lambdas[k] <= T::zero() {
            return Err(Error::domain(k, "Qᵢ needs a positive birth rate at every lower site"));
        }
        let next = ((lambdas[k] + mus[k] - x) * cur - mus[k] * prev) / lambdas[k];
        prev = cur;
        cur = next;
    }
    Ok(cur)
}
