//! Orthogonality measures of Jacobi operators.

mod poly;
mod tridiag;

pub use poly::{evaluate_chi, evaluate_q, PolynomialEvaluator, ScaledSequence};
pub use tridiag::{eigen_first_components, eigen_vectors};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::JacobiOperator;
use crate::scalar::Real;

/// Tolerance on `|total mass − 1|` accepted by operations that need a probability measure.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Relative gap (to the spectral spread) under which eigenvalues are merged.
pub const CLUSTER_TOLERANCE: f64 = 1e-12;

/// Whether a measure has atoms, an absolutely continuous part, or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeasureKind {
    Discrete,
    Continuous,
    Mixed,
}

/// Known densities for absolutely continuous parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Density {
    /// `(2/π) √(1 − x²)` on `[−1, 1]`.
    ChebyshevSecondKind,
}

impl Density {
    pub fn support<T: Real>(self) -> (T, T) {
        match self {
            Density::ChebyshevSecondKind => (-T::one(), T::one()),
        }
    }

    pub fn eval<T: Real>(self, x: T) -> T {
        match self {
            Density::ChebyshevSecondKind => {
                if x.abs() >= T::one() {
                    T::zero()
                } else {
                    T::two() / T::PI() * (T::one() - x * x).sqrt()
                }
            }
        }
    }

    /// `m`-point Gauss rule for this density; exact for polynomials of degree `< 2m`.
    pub fn gauss_rule<T: Real>(self, m: usize) -> (Vec<T>, Vec<T>) {
        match self {
            Density::ChebyshevSecondKind => {
                let h = T::PI() / T::from_usize_lossy(m + 1);
                let scale = T::two() / T::from_usize_lossy(m + 1);
                // Ascending nodes: cos(kπ/(m+1)) for k = m, …, 1.
                (1..=m)
                    .rev()
                    .map(|k| {
                        let theta = h * T::from_usize_lossy(k);
                        (theta.cos(), scale * theta.sin() * theta.sin())
                    })
                    .unzip()
            }
        }
    }
}

/// Absolutely continuous part `w(x) dx` together with the quadrature used to integrate it.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousPart<T> {
    pub density: Density,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> ContinuousPart<T> {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn mass(&self) -> T {
        self.weights.iter().copied().sum()
    }
}

/// Positive measure `dμ` with atoms `(xₛ, Mₛ)` and an optional continuous part.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure<T> {
    points: Vec<T>,
    masses: Vec<T>,
    continuous: Option<ContinuousPart<T>>,
    tail_mass: T,
}

impl<T: Real> SpectralMeasure<T> {
    /// Purely atomic measure. Points are sorted; coincident points are merged.
    pub fn discrete(points: Vec<T>, masses: Vec<T>) -> Result<Self> {
        if points.len() != masses.len() {
            return Err(Error::parameter(
                "masses",
                format!("{} points but {} masses", points.len(), masses.len()),
            ));
        }
        if let Some(s) = points.iter().position(|x| !x.is_finite()) {
            return Err(Error::domain(s, "spectral point is not finite"));
        }
        if let Some(s) = masses.iter().position(|&m| !(m >= T::zero()) || !m.is_finite()) {
            return Err(Error::domain(s, format!("mass {} is negative or not finite", masses[s])));
        }
        let mut atoms: Vec<(T, T)> = points.into_iter().zip(masses).collect();
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite points"));
        let mut points = Vec::with_capacity(atoms.len());
        let mut masses: Vec<T> = Vec::with_capacity(atoms.len());
        for (x, m) in atoms {
            if points.last() == Some(&x) {
                let last = masses.len() - 1;
                masses[last] = masses[last] + m;
            } else {
                points.push(x);
                masses.push(m);
            }
        }
        Ok(Self {
            points,
            masses,
            continuous: None,
            tail_mass: T::zero(),
        })
    }

    /// Absolutely continuous measure with density `density`, integrated by its `m`-point Gauss rule.
    pub fn continuous(density: Density, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::parameter("order", "quadrature order must be positive"));
        }
        let (nodes, weights) = density.gauss_rule(order);
        Ok(Self {
            points: Vec::new(),
            masses: Vec::new(),
            continuous: Some(ContinuousPart {
                density,
                nodes,
                weights,
            }),
            tail_mass: T::zero(),
        })
    }

    /// Records a bound on mass excluded by truncating an infinite support.
    pub fn with_tail_mass(mut self, tail: T) -> Self {
        self.tail_mass = tail;
        self
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn continuous_part(&self) -> Option<&ContinuousPart<T>> {
        self.continuous.as_ref()
    }

    pub fn tail_mass(&self) -> T {
        self.tail_mass
    }

    pub fn kind(&self) -> MeasureKind {
        match (self.points.is_empty(), self.continuous.is_some()) {
            (_, false) => MeasureKind::Discrete,
            (true, true) => MeasureKind::Continuous,
            (false, true) => MeasureKind::Mixed,
        }
    }

    pub fn atomic_mass(&self) -> T {
        self.masses.iter().copied().sum()
    }

    pub fn continuous_mass(&self) -> T {
        self.continuous.as_ref().map_or(T::zero(), |c| c.mass())
    }

    pub fn total_mass(&self) -> T {
        self.atomic_mass() + self.continuous_mass()
    }

    /// Every `(x, weight)` pair used to integrate against the measure:
    /// atoms first, then quadrature nodes of the continuous part.
    pub fn nodes(&self) -> impl Iterator<Item = (T, T)> + '_ {
        let atoms = self.points.iter().copied().zip(self.masses.iter().copied());
        let quad = self
            .continuous
            .iter()
            .flat_map(|c| c.nodes.iter().copied().zip(c.weights.iter().copied()));
        atoms.chain(quad)
    }

    pub fn node_count(&self) -> usize {
        self.points.len() + self.continuous.as_ref().map_or(0, |c| c.order())
    }

    /// `∫ g dμ`.
    pub fn integrate(&self, g: impl Fn(T) -> T) -> T {
        self.nodes().map(|(x, w)| w * g(x)).sum()
    }

    pub fn moment(&self, k: i32) -> T {
        self.integrate(|x| x.powi(k))
    }

    /// Fails unless the total mass is 1 within `MASS_TOLERANCE`, widened to the
    /// recorded tail mass and to the scalar's rounding floor.
    pub fn ensure_normalized(&self) -> Result<()> {
        let total = self.total_mass();
        let tol = T::lit(MASS_TOLERANCE)
            .max(self.tail_mass)
            .max(T::epsilon() * T::from_usize_lossy(16 + self.node_count()));
        if (total - T::one()).abs() > tol {
            return Err(Error::Usage(format!(
                "measure is not normalized: total mass {total} differs from 1 by more than {tol}"
            )));
        }
        Ok(())
    }

    /// Same support with every weight multiplied by `factor(node index, x)`.
    pub fn reweighted(&self, factor: impl Fn(usize, T) -> T) -> Self {
        self.map_weights(|s, x, w| w * factor(s, x))
    }

    /// Same support with each weight replaced by `weight(node index, x, w)`,
    /// indices following [`SpectralMeasure::nodes`].
    pub fn map_weights(&self, weight: impl Fn(usize, T, T) -> T) -> Self {
        let np = self.points.len();
        let masses = self
            .points
            .iter()
            .zip(&self.masses)
            .enumerate()
            .map(|(s, (&x, &m))| weight(s, x, m))
            .collect();
        let continuous = self.continuous.as_ref().map(|c| ContinuousPart {
            density: c.density,
            nodes: c.nodes.clone(),
            weights: c
                .nodes
                .iter()
                .zip(&c.weights)
                .enumerate()
                .map(|(k, (&x, &w))| weight(np + k, x, w))
                .collect(),
        });
        Self {
            points: self.points.clone(),
            masses,
            continuous,
            tail_mass: self.tail_mass,
        }
    }

    /// Merges atoms closer than `rel_tol · spread`, keeping the mass-weighted centre.
    pub fn merge_clustered(&self, rel_tol: T) -> Self {
        if self.points.len() < 2 {
            return self.clone();
        }
        let spread = self.points[self.points.len() - 1] - self.points[0];
        let gap = rel_tol * spread;
        let mut points: Vec<T> = Vec::with_capacity(self.points.len());
        let mut masses: Vec<T> = Vec::with_capacity(self.points.len());
        for (&x, &m) in self.points.iter().zip(&self.masses) {
            match points.last_mut() {
                Some(last) if x - *last <= gap => {
                    let k = masses.len() - 1;
                    let total = masses[k] + m;
                    if total > T::zero() {
                        *last = (*last * masses[k] + x * m) / total;
                    }
                    masses[k] = total;
                }
                _ => {
                    points.push(x);
                    masses.push(m);
                }
            }
        }
        Self {
            points,
            masses,
            continuous: self.continuous.clone(),
            tail_mass: self.tail_mass,
        }
    }

    /// `{"points": [...], "masses": [...]}` plus continuous and tail metadata when present.
    pub fn to_json(&self) -> serde_json::Value {
        let f = |v: &[T]| v.iter().map(|x| x.to_f64_lossy()).collect::<Vec<f64>>();
        let mut obj = serde_json::json!({
            "points": f(&self.points),
            "masses": f(&self.masses),
        });
        if let Some(c) = &self.continuous {
            obj["continuous"] = serde_json::json!({
                "density": c.density,
                "nodes": f(&c.nodes),
                "weights": f(&c.weights),
            });
        }
        if self.tail_mass > T::zero() {
            obj["tail_mass"] = serde_json::json!(self.tail_mass.to_f64_lossy());
        }
        obj
    }
}

/// Discrete orthogonality measure of a finite Jacobi operator: eigenvalues as
/// points and squared first eigenvector components as masses.
pub fn eigendecompose<T: Real>(jacobi: &JacobiOperator<T>) -> Result<SpectralMeasure<T>> {
    let (values, first) = eigen_first_components(jacobi.diagonal(), jacobi.couplings())?;
    let masses: Vec<T> = first.iter().map(|&z| z * z).collect();
    let total: T = masses.iter().copied().sum();
    let masses = masses.into_iter().map(|m| m / total).collect();
    Ok(SpectralMeasure::discrete(values, masses)?.merge_clustered(T::lit(CLUSTER_TOLERANCE)))
}

/// A Jacobi operator paired with its orthogonality measure.
///
/// The operator may be a leading block of a semi-infinite one whose measure
/// is known in closed form; only `χᵢ` with `i < jacobi.size()` are available.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralChain<T> {
    jacobi: JacobiOperator<T>,
    measure: SpectralMeasure<T>,
    /// Eigenvectors in node order, kept for finite chains. Reading `χᵢ(xₛ)`
    /// off them avoids the forward recurrence, which loses accuracy where an
    /// eigenvector decays.
    modes: Option<Vec<Vec<T>>>,
}

impl<T: Real> SpectralChain<T> {
    /// Finite chain; the measure comes from [`eigendecompose`].
    pub fn from_jacobi(jacobi: JacobiOperator<T>) -> Result<Self> {
        let (values, mut vectors) = eigen_vectors(jacobi.diagonal(), jacobi.couplings())?;
        let masses: Vec<T> = vectors.iter().map(|v| v[0] * v[0]).collect();
        let total: T = masses.iter().copied().sum();
        let masses = masses.into_iter().map(|m| m / total).collect();
        let measure = SpectralMeasure::discrete(values.clone(), masses)?
            .merge_clustered(T::lit(CLUSTER_TOLERANCE));
        let exact = measure.points() == values.as_slice()
            && vectors.iter().all(|v| v[0] != T::zero());
        let modes = exact.then(|| {
            for v in vectors.iter_mut() {
                if v[0] < T::zero() {
                    v.iter_mut().for_each(|c| *c = -*c);
                }
            }
            vectors
        });
        Ok(Self { jacobi, measure, modes })
    }

    pub fn new(jacobi: JacobiOperator<T>, measure: SpectralMeasure<T>) -> Self {
        Self {
            jacobi,
            measure,
            modes: None,
        }
    }

    pub fn jacobi(&self) -> &JacobiOperator<T> {
        &self.jacobi
    }

    pub fn measure(&self) -> &SpectralMeasure<T> {
        &self.measure
    }

    pub fn sites(&self) -> usize {
        self.jacobi.size()
    }

    /// `χ₀ … χ_degree` at every node of the measure, in [`SpectralMeasure::nodes`] order.
    pub fn chi_table(&self, degree: usize) -> Result<Vec<ScaledSequence<T>>> {
        if let Some(modes) = &self.modes {
            if degree < self.sites() {
                return Ok(modes
                    .iter()
                    .map(|v| ScaledSequence::from_eigenvector(&v[..=degree]))
                    .collect());
            }
        }
        let eval = PolynomialEvaluator::new(&self.jacobi);
        self.measure.nodes().map(|(x, _)| eval.sequence(x, degree)).collect()
    }

    /// `Σₛ Mₛ χᵢ(xₛ) χⱼ(xₛ)` for all `i, j ≤ degree`.
    pub fn gram(&self, degree: usize) -> Result<Vec<Vec<T>>> {
        let table = self.chi_table(degree)?;
        let weights: Vec<T> = self.measure.nodes().map(|(_, w)| w).collect();
        Ok((0..=degree)
            .map(|i| {
                (0..=degree)
                    .map(|j| {
                        table
                            .iter()
                            .zip(&weights)
                            .map(|(seq, &w)| seq.weighted_product(w, i, j))
                            .sum()
                    })
                    .collect()
            })
            .collect())
    }
}
