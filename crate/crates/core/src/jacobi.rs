//! Birth–death rates, their generator matrix, π-coefficients and the symmetric
//! Jacobi operator obtained by the diagonal similarity `J = -U A U⁻¹`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

type RateRule<T> = Arc<dyn Fn(usize) -> (T, T) + Send + Sync>;

#[derive(Clone)]
enum RateSource<T> {
    Finite { lambdas: Vec<T>, mus: Vec<T> },
    Rule(RateRule<T>),
}

/// Birth rates `λᵢ` and death rates `μᵢ` of a birth–death process.
///
/// A finite chain on sites `0..=N` stores both sequences explicitly; its last
/// birth rate `λ_N` is ignored under a reflecting truncation. A semi-infinite
/// chain is described by a rule `i ↦ (λᵢ, μᵢ)` evaluated on demand and
/// validated lazily at every index that is actually used.
#[derive(Clone)]
pub struct BirthDeathRates<T> {
    source: RateSource<T>,
}

impl<T: Real> BirthDeathRates<T> {
    /// Finite chain with `lambdas.len() == mus.len()` sites.
    pub fn finite(lambdas: Vec<T>, mus: Vec<T>) -> Result<Self> {
        if lambdas.is_empty() || lambdas.len() != mus.len() {
            return Err(Error::parameter(
                "lambdas",
                format!(
                    "expected equally long, non-empty rate sequences (got {} birth and {} death rates)",
                    lambdas.len(),
                    mus.len()
                ),
            ));
        }
        let last = lambdas.len() - 1;
        for i in 0..=last {
            check_site(i, lambdas[i], mus[i], i == last)?;
        }
        Ok(Self {
            source: RateSource::Finite { lambdas, mus },
        })
    }

    /// Semi-infinite chain defined by a rule.
    pub fn from_fn<F>(rule: F) -> Self
    where
        F: Fn(usize) -> (T, T) + Send + Sync + 'static,
    {
        Self {
            source: RateSource::Rule(Arc::new(rule)),
        }
    }

    /// Number of sites for a finite chain, `None` for a semi-infinite one.
    pub fn sites(&self) -> Option<usize> {
        match &self.source {
            RateSource::Finite { lambdas, .. } => Some(lambdas.len()),
            RateSource::Rule(_) => None,
        }
    }

    /// `(λᵢ, μᵢ)` without validation; `None` past the end of a finite chain.
    pub fn get(&self, i: usize) -> Option<(T, T)> {
        match &self.source {
            RateSource::Finite { lambdas, mus } => {
                lambdas.get(i).map(|&l| (l, mus[i]))
            }
            RateSource::Rule(rule) => Some(rule(i)),
        }
    }

    /// Validated rates of sites `0..=n`, with `λ_n` replaced according to `boundary`.
    pub fn truncate(&self, n: usize, boundary: Boundary) -> Result<(Vec<T>, Vec<T>)> {
        if let Some(sites) = self.sites() {
            if n >= sites {
                return Err(Error::domain(
                    n,
                    format!("truncation order exceeds the {sites}-site chain"),
                ));
            }
        }
        let mut lambdas = Vec::with_capacity(n + 1);
        let mut mus = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let (l, m) = self.get(i).expect("index checked against chain length");
            let is_last_site = self.sites() == Some(i + 1);
            check_site(i, l, m, is_last_site)?;
            lambdas.push(l);
            mus.push(m);
        }
        if boundary == Boundary::Reflecting {
            lambdas[n] = T::zero();
        }
        Ok((lambdas, mus))
    }
}

fn check_site<T: Real>(i: usize, lambda: T, mu: T, last_of_finite: bool) -> Result<()> {
    if !lambda.is_finite() || !mu.is_finite() {
        return Err(Error::domain(i, "rates must be finite"));
    }
    if last_of_finite {
        if lambda < T::zero() {
            return Err(Error::domain(i, format!("birth rate {lambda} is negative")));
        }
    } else if lambda <= T::zero() {
        return Err(Error::domain(i, format!("birth rate {lambda} is not positive")));
    }
    if i == 0 {
        if mu < T::zero() {
            return Err(Error::domain(0, format!("death rate {mu} is negative")));
        }
    } else if mu <= T::zero() {
        return Err(Error::domain(i, format!("death rate {mu} is not positive")));
    }
    Ok(())
}

impl<T: Real> fmt::Debug for BirthDeathRates<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            RateSource::Finite { lambdas, mus } => f
                .debug_struct("BirthDeathRates")
                .field("lambdas", lambdas)
                .field("mus", mus)
                .finish(),
            RateSource::Rule(_) => f.write_str("BirthDeathRates(<rule>)"),
        }
    }
}

/// How a chain is cut off at the truncation order `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// `λ_N := 0`; rows of the generator sum to zero.
    #[default]
    Reflecting,
    /// `λ_N` kept; mass leaks out of the truncated state space.
    AbsorbingTail,
}

/// Tridiagonal generator `A` of the forward equation `dP/dt = P A`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix<T> {
    diag: Vec<T>,
    upper: Vec<T>,
    lower: Vec<T>,
    boundary: Boundary,
}

impl<T: Real> GeneratorMatrix<T> {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Diagonal `-(λᵢ + μᵢ)`.
    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    /// Superdiagonal `λ₀ … λ_{N-1}`.
    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    /// Subdiagonal `μ₁ … μ_N`.
    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.size())
            .map(|i| {
                let mut s = self.diag[i];
                if i + 1 < self.size() {
                    s = s + self.upper[i];
                }
                if i > 0 {
                    s = s + self.lower[i - 1];
                }
                s
            })
            .collect()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.size();
        let mut a = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i + 1 < n {
                a[i][i + 1] = self.upper[i];
                a[i + 1][i] = self.lower[i];
            }
        }
        a
    }
}

/// Symmetric tridiagonal matrix with diagonal `Bᵢ` and positive couplings `Jᵢ`.
///
/// `couplings()[k]` holds `J_{k+1}`, the entry linking sites `k` and `k+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiOperator<T> {
    b: Vec<T>,
    j: Vec<T>,
}

impl<T: Real> JacobiOperator<T> {
    pub fn new(diagonal: Vec<T>, couplings: Vec<T>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::parameter("diagonal", "a Jacobi operator needs at least one site"));
        }
        if couplings.len() + 1 != diagonal.len() {
            return Err(Error::parameter(
                "couplings",
                format!(
                    "expected {} couplings for {} sites, got {}",
                    diagonal.len() - 1,
                    diagonal.len(),
                    couplings.len()
                ),
            ));
        }
        if let Some(i) = diagonal.iter().position(|b| !b.is_finite()) {
            return Err(Error::domain(i, "diagonal entry is not finite"));
        }
        if let Some(k) = couplings.iter().position(|&c| !(c > T::zero()) || !c.is_finite()) {
            return Err(Error::domain(k + 1, format!("coupling {} is not positive", couplings[k])));
        }
        Ok(Self {
            b: diagonal,
            j: couplings,
        })
    }

    /// Builds `size` sites from rules for `Bᵢ` (i ≥ 0) and `Jᵢ` (i ≥ 1).
    pub fn from_fns(
        size: usize,
        diagonal: impl Fn(usize) -> T,
        coupling: impl Fn(usize) -> T,
    ) -> Result<Self> {
        Self::new(
            (0..size).map(diagonal).collect(),
            (1..size).map(coupling).collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.b.len()
    }

    pub fn diagonal(&self) -> &[T] {
        &self.b
    }

    pub fn couplings(&self) -> &[T] {
        &self.j
    }

    /// `Jᵢ` with the conventions `J₀ = 0` and `Jᵢ = 0` past the last site.
    pub fn coupling(&self, i: usize) -> T {
        if i == 0 {
            T::zero()
        } else {
            self.j.get(i - 1).copied().unwrap_or_else(T::zero)
        }
    }

    /// Leading `m × m` block.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.size() {
            return Err(Error::parameter(
                "m",
                format!("prefix size {m} outside 1..={}", self.size()),
            ));
        }
        Ok(Self {
            b: self.b[..m].to_vec(),
            j: self.j[..m - 1].to_vec(),
        })
    }

    /// `(α J)`, used for scale-covariance checks.
    pub fn scaled(&self, alpha: T) -> Result<Self> {
        Self::new(
            self.b.iter().map(|&b| b * alpha).collect(),
            self.j.iter().map(|&j| j * alpha).collect(),
        )
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut s = self.b[i] * v[i];
                if i > 0 {
                    s = s + self.j[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s = s + self.j[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.size();
        let mut a = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            a[i][i] = self.b[i];
            if i + 1 < n {
                a[i][i + 1] = self.j[i];
                a[i + 1][i] = self.j[i];
            }
        }
        a
    }
}

/// `πᵢ = (λ₀⋯λᵢ₋₁)/(μ₁⋯μᵢ)`, kept both as direct ratios and as logarithms.
#[derive(Debug, Clone, PartialEq)]
pub struct PiCoefficients<T> {
    direct: Vec<T>,
    ln: Vec<T>,
}

impl<T: Real> PiCoefficients<T> {
    pub fn len(&self) -> usize {
        self.ln.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln.is_empty()
    }

    pub fn ln(&self, i: usize) -> T {
        self.ln[i]
    }

    /// `πᵢ`, from the direct recurrence while it stays representable.
    pub fn value(&self, i: usize) -> T {
        let d = self.direct[i];
        if d.is_normal() {
            d
        } else {
            self.ln[i].exp()
        }
    }

    /// `πⱼ / πᵢ`.
    pub fn ratio(&self, i: usize, j: usize) -> T {
        let (a, b) = (self.direct[i], self.direct[j]);
        if a.is_normal() && b.is_normal() {
            b / a
        } else {
            (self.ln[j] - self.ln[i]).exp()
        }
    }

    /// `(πⱼ / πᵢ)^{1/2}`.
    pub fn sqrt_ratio(&self, i: usize, j: usize) -> T {
        let (a, b) = (self.direct[i], self.direct[j]);
        if a.is_normal() && b.is_normal() {
            (b / a).sqrt()
        } else {
            ((self.ln[j] - self.ln[i]) * T::half()).exp()
        }
    }
}

/// `πᵢ` for `i = 0..=n` via `πᵢ₊₁ = πᵢ λᵢ / μᵢ₊₁`.
pub fn pi_coefficients<T: Real>(rates: &BirthDeathRates<T>, n: usize) -> Result<PiCoefficients<T>> {
    let (lambdas, mus) = rates.truncate(n, Boundary::AbsorbingTail)?;
    let mut direct = Vec::with_capacity(n + 1);
    let mut ln = Vec::with_capacity(n + 1);
    direct.push(T::one());
    ln.push(T::zero());
    for i in 0..n {
        let (l, m) = (lambdas[i], mus[i + 1]);
        if m <= T::zero() {
            return Err(Error::domain(i + 1, "death rate must be positive for π-coefficients"));
        }
        direct.push(direct[i] * (l / m));
        ln.push(ln[i] + l.ln() - m.ln());
    }
    Ok(PiCoefficients { direct, ln })
}

/// Generator `A` on sites `0..=n`.
pub fn generator<T: Real>(
    rates: &BirthDeathRates<T>,
    n: usize,
    boundary: Boundary,
) -> Result<GeneratorMatrix<T>> {
    let (lambdas, mus) = rates.truncate(n, boundary)?;
    Ok(GeneratorMatrix {
        diag: (0..=n).map(|i| -(lambdas[i] + mus[i])).collect(),
        upper: lambdas[..n].to_vec(),
        lower: mus[1..].to_vec(),
        boundary,
    })
}

/// `J = -U A U⁻¹` for the reflecting truncation at order `n`.
pub fn symmetrize<T: Real>(rates: &BirthDeathRates<T>, n: usize) -> Result<JacobiOperator<T>> {
    symmetrize_with(rates, n, Boundary::Reflecting)
}

/// `Bᵢ = λᵢ + μᵢ`, `Jᵢ = √(λᵢ₋₁ μᵢ)` with the given truncation boundary.
pub fn symmetrize_with<T: Real>(
    rates: &BirthDeathRates<T>,
    n: usize,
    boundary: Boundary,
) -> Result<JacobiOperator<T>> {
    let (lambdas, mus) = rates.truncate(n, boundary)?;
    JacobiOperator::new(
        (0..=n).map(|i| lambdas[i] + mus[i]).collect(),
        (1..=n).map(|i| (lambdas[i - 1] * mus[i]).sqrt()).collect(),
    )
}

/// Inverse of [`symmetrize`]: recovers rates from `J` and a chosen `μ₀ ≥ 0`.
///
/// Fails with a domain error when `J` admits no birth–death interpretation,
/// e.g. a zero diagonal.
pub fn rates_of<T: Real>(jacobi: &JacobiOperator<T>, mu0: T) -> Result<BirthDeathRates<T>> {
    if mu0 < T::zero() {
        return Err(Error::domain(0, "μ₀ must be nonnegative"));
    }
    let n = jacobi.size() - 1;
    let b = jacobi.diagonal();
    let eps = T::epsilon();
    // first-order bound on the rounding error carried by μᵢ; the subtraction
    // λ = B − μ can amplify it, so the boundary test uses it as slack
    let mut mu_err = T::zero();
    let mut lambdas = Vec::with_capacity(n + 1);
    let mut mus = Vec::with_capacity(n + 1);
    mus.push(mu0);
    for i in 0..=n {
        let lambda = b[i] - mus[i];
        let lambda_err = mu_err + eps * (b[i].abs() + mus[i].abs());
        if i < n {
            if !(lambda > T::zero()) {
                return Err(Error::domain(
                    i,
                    format!("recovered birth rate {lambda} is not positive"),
                ));
            }
            let coupling = jacobi.couplings()[i];
            let mu = coupling * coupling / lambda;
            mu_err = mu * (T::lit(3.0) * eps + lambda_err / lambda);
            mus.push(mu);
            lambdas.push(lambda);
        } else {
            let slack = T::lit(16.0) * lambda_err;
            if lambda < -slack {
                return Err(Error::domain(
                    i,
                    format!("recovered boundary birth rate {lambda} is negative"),
                ));
            }
            lambdas.push(if lambda.abs() <= slack { T::zero() } else { lambda });
        }
    }
    BirthDeathRates::finite(lambdas, mus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_half(n: usize) -> BirthDeathRates<f64> {
        let mut mus = vec![0.5; n + 1];
        mus[0] = 0.0;
        BirthDeathRates::finite(vec![0.5; n + 1], mus).unwrap()
    }

    #[test]
    fn constant_rates_symmetrize() {
        let rates = BirthDeathRates::<f64>::from_fn(|i| (0.5, if i == 0 { 0.0 } else { 0.5 }));
        let j = symmetrize_with(&rates, 6, Boundary::AbsorbingTail).unwrap();
        assert_eq!(j.diagonal()[0], 0.5);
        for i in 1..=6 {
            assert_eq!(j.diagonal()[i], 1.0);
            assert_eq!(j.coupling(i), 0.5);
        }
        assert_eq!(j.coupling(0), 0.0);
        assert_eq!(j.coupling(7), 0.0);
    }

    #[test]
    fn reflecting_truncation_drops_last_birth_rate() {
        let j = symmetrize(&constant_half(4), 4).unwrap();
        assert_eq!(j.diagonal()[4], 0.5);
        let a = generator(&constant_half(4), 4, Boundary::Reflecting).unwrap();
        assert!(a.row_sums().iter().all(|s| s.abs() < 1e-15));
    }

    #[test]
    fn two_state_generator() {
        let rates = BirthDeathRates::finite(vec![1.0, 0.0], vec![0.0, 2.0]).unwrap();
        let a = generator(&rates, 1, Boundary::Reflecting).unwrap();
        assert_eq!(a.to_dense(), vec![vec![-1.0, 1.0], vec![2.0, -2.0]]);
    }

    #[test]
    fn meixner_first_coupling() {
        let (beta, c) = (1.0f64, 0.25);
        let rates = BirthDeathRates::from_fn(move |i| {
            let i = i as f64;
            (c * (i + beta) / (1.0 - c), i / (1.0 - c))
        });
        let j = symmetrize_with(&rates, 3, Boundary::AbsorbingTail).unwrap();
        assert!((j.coupling(1) - 2.0 / 3.0).abs() < 1e-15);
        let pi = pi_coefficients(&rates, 2).unwrap();
        let expected = c * c * beta * (beta + 1.0) / 2.0;
        assert!((pi.value(2) - expected).abs() < 1e-15);
    }

    #[test]
    fn pi_of_constant_rates_is_one() {
        let pi = pi_coefficients(&constant_half(10), 10).unwrap();
        for i in 0..=10 {
            assert_eq!(pi.value(i), 1.0);
        }
    }

    #[test]
    fn pi_survives_overflowing_products() {
        let rates = BirthDeathRates::<f64>::from_fn(|i| (1e3, if i == 0 { 0.0 } else { 1e-3 }));
        let pi = pi_coefficients(&rates, 200).unwrap();
        assert!(pi.direct[200].is_infinite());
        let expected = 200.0 * 1e6f64.ln();
        assert!((pi.ln(200) - expected).abs() < 1e-9 * expected);
        assert!((pi.ratio(199, 200) - 1e6).abs() < 1e-3);
        assert!((pi.sqrt_ratio(200, 199) - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn invalid_rates_name_the_index() {
        let err = BirthDeathRates::finite(vec![1.0, -1.0, 0.0], vec![0.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Domain { index: 1, .. }));
        let err = BirthDeathRates::finite(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::Domain { index: 1, .. }));
        let lazy = BirthDeathRates::<f64>::from_fn(|i| (if i == 3 { 0.0 } else { 1.0 }, 1.0));
        let err = symmetrize(&lazy, 5).unwrap_err();
        assert!(matches!(err, Error::Domain { index: 3, .. }));
    }

    #[test]
    fn rates_of_rejects_zero_diagonal() {
        let j = JacobiOperator::new(vec![0.0; 4], vec![1.0, 0.5, 1.0]).unwrap();
        assert!(matches!(rates_of(&j, 0.0), Err(Error::Domain { index: 0, .. })));
    }

    #[test]
    fn rates_of_inverts_symmetrize() {
        let rates =
            BirthDeathRates::finite(vec![0.7f64, 1.3, 0.4, 0.0], vec![0.0, 1.1, 0.2, 1.9]).unwrap();
        let back = rates_of(&symmetrize(&rates, 3).unwrap(), 0.0).unwrap();
        for i in 0..4 {
            let (l0, m0) = rates.get(i).unwrap();
            let (l1, m1) = back.get(i).unwrap();
            assert!((l0 - l1).abs() < 1e-12 && (m0 - m1).abs() < 1e-12);
        }
    }
}
