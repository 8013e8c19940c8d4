//! Return analysis: characteristic functions, lattice detection and the
//! perfect / almost perfect / no return classification.
//!
//! The return amplitude at the origin is `f₀₀(t) = F(−t)` with
//! `F(t) = ∫ e^{ixt} dμ(x)`. A lattice measure (support in `ξ + (2π/t₀)ℤ`)
//! returns perfectly at `t₀` from every site; any other purely atomic measure
//! returns almost perfectly; a measure with a continuous part does not return.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dynamics::AmplitudeSeries;
use crate::error::{Error, Result};
use crate::jacobi::JacobiOperator;
use crate::scalar::Real;
use crate::spectral::{MeasureKind, PolynomialEvaluator, SpectralMeasure};

/// Verdict class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReturnClass {
    Perfect,
    AlmostPerfect,
    NoReturn,
}

impl ReturnClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ReturnClass::Perfect => "Perfect",
            ReturnClass::AlmostPerfect => "AlmostPerfect",
            ReturnClass::NoReturn => "NoReturn",
        }
    }
}

/// Tolerances for [`detect_lattice`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LatticeOptions {
    /// Residual tolerance relative to the spread of the spectrum.
    pub tol: f64,
    /// Largest lattice index allowed for the smallest gap.
    pub max_denominator: u64,
    /// Atoms lighter than this are left out of the fit.
    pub mass_floor: f64,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_denominator: 1_000_000,
            mass_floor: 1e-13,
        }
    }
}

impl LatticeOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Numbers behind a verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence<T> {
    /// Atoms used in the lattice fit.
    pub atoms: usize,
    /// Mass of atoms below the floor.
    pub ignored_mass: T,
    pub continuous_mass: T,
    /// Mass lost by truncating an infinite support.
    pub tail_mass: T,
    /// Lattice spacing `Δ = 2π/t₀` of the best fit, when one was found.
    pub spacing: Option<T>,
    /// Largest `|gap − nΔ|` of the fit.
    pub residual: Option<T>,
    /// Absolute residual tolerance that was applied.
    pub tolerance: Option<T>,
    pub declared_kind: Option<MeasureKind>,
    /// Set when the verdict follows from too few atoms to test anything.
    pub degenerate: bool,
    pub note: Option<String>,
}

impl<T: Real> Evidence<T> {
    fn new(measure: &SpectralMeasure<T>) -> Self {
        Self {
            atoms: 0,
            ignored_mass: T::zero(),
            continuous_mass: measure.continuous_mass(),
            tail_mass: measure.tail_mass(),
            spacing: None,
            residual: None,
            tolerance: None,
            declared_kind: None,
            degenerate: false,
            note: None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let f = |x: T| x.to_f64_lossy();
        let mut obj = serde_json::json!({
            "atoms": self.atoms,
            "ignored_mass": f(self.ignored_mass),
            "continuous_mass": f(self.continuous_mass),
            "tail_mass": f(self.tail_mass),
            "degenerate": self.degenerate,
        });
        if let Some(d) = self.spacing {
            obj["spacing"] = f(d).into();
        }
        if let Some(r) = self.residual {
            obj["residual"] = f(r).into();
        }
        if let Some(t) = self.tolerance {
            obj["tolerance"] = f(t).into();
        }
        if let Some(k) = self.declared_kind {
            obj["declared_kind"] = serde_json::to_value(k).expect("enum serializes");
        }
        if let Some(n) = &self.note {
            obj["note"] = n.clone().into();
        }
        obj
    }
}

/// Classification result. `t0` and `xi` are present exactly for `Perfect`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnVerdict<T> {
    pub class: ReturnClass,
    pub t0: Option<T>,
    pub xi: Option<T>,
    pub evidence: Evidence<T>,
}

impl<T: Real> ReturnVerdict<T> {
    /// `{"class": ..., "t0": ..., "xi": ..., "evidence": {...}}`, omitting absent fields.
    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::json!({ "class": self.class.as_str() });
        if let Some(t0) = self.t0 {
            obj["t0"] = t0.to_f64_lossy().into();
        }
        if let Some(xi) = self.xi {
            obj["xi"] = xi.to_f64_lossy().into();
        }
        obj["evidence"] = self.evidence.to_json();
        obj
    }
}

/// `F(t) = ∫ e^{ixt} dμ(x)` for a fixed measure.
///
/// Values are divided by the total mass, so `F(0) = 1` up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicFunction<T> {
    nodes: Vec<(T, T)>,
    total: T,
}

impl<T: Real> CharacteristicFunction<T> {
    pub fn new(measure: &SpectralMeasure<T>) -> Result<Self> {
        measure.ensure_normalized()?;
        Ok(Self {
            nodes: measure.nodes().collect(),
            total: measure.total_mass(),
        })
    }

    /// `F(t)`.
    pub fn eval(&self, t: T) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for &(x, w) in &self.nodes {
            let (s, c) = (x * t).sin_cos();
            acc = acc + Complex::new(w * c, w * s);
        }
        acc / self.total
    }

    /// `∫ e^{−ixt} dμ = F(−t)`, the return amplitude `f₀₀(t)`.
    pub fn return_amplitude(&self, t: T) -> Complex<T> {
        self.eval(-t)
    }
}

/// `F(t) = ∫ e^{ixt} dμ(x)`.
pub fn characteristic<T: Real>(measure: &SpectralMeasure<T>, t: T) -> Result<Complex<T>> {
    Ok(CharacteristicFunction::new(measure)?.eval(t))
}

/// `dμᵢ = χᵢ² dμ`, whose characteristic function gives `f_ii(t) = Fᵢ(−t)`.
pub fn modified_measure<T: Real>(
    measure: &SpectralMeasure<T>,
    jacobi: &JacobiOperator<T>,
    i: usize,
) -> Result<SpectralMeasure<T>> {
    if i == 0 {
        return Ok(measure.clone());
    }
    let eval = PolynomialEvaluator::new(jacobi);
    let table = measure
        .nodes()
        .map(|(x, _)| eval.sequence(x, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(measure.map_weights(|s, _, w| table[s].weighted_product(w, i, i)))
}

/// Largest lattice `ξ + Δℤ` containing every atom heavier than the mass floor.
///
/// Gaps to the lowest atom are rationalized against the smallest gap by
/// continued fractions, stopping at the first convergent whose error is within
/// `tol · spread`. The common denominator must not exceed
/// `max_denominator`. Requires at least two atoms; with exactly two the verdict
/// is `Perfect` and flagged degenerate, since any two points lie on a lattice.
pub fn detect_lattice<T: Real>(
    measure: &SpectralMeasure<T>,
    opts: &LatticeOptions,
) -> Result<ReturnVerdict<T>> {
    let mut evidence = Evidence::new(measure);
    let floor = T::lit(opts.mass_floor);
    if evidence.continuous_mass > floor {
        evidence.note = Some("continuous component above the mass floor".into());
        return Ok(no_return(evidence));
    }
    let mut atoms = Vec::new();
    for (&x, &m) in measure.points().iter().zip(measure.masses()) {
        if m >= floor {
            atoms.push(x);
        } else {
            evidence.ignored_mass = evidence.ignored_mass + m;
        }
    }
    evidence.atoms = atoms.len();
    if atoms.len() < 2 {
        return Err(Error::Usage(format!(
            "lattice detection needs at least two atoms above the mass floor, found {}",
            atoms.len()
        )));
    }
    let x0 = atoms[0];
    let gaps: Vec<T> = atoms[1..].iter().map(|&x| x - x0).collect();
    let spread = gaps[gaps.len() - 1];
    let tol = T::lit(opts.tol) * spread;
    evidence.tolerance = Some(tol);
    evidence.degenerate = atoms.len() == 2;

    match fit_lattice(&gaps, tol, opts.max_denominator) {
        Some((delta, residual)) => {
            evidence.spacing = Some(delta);
            evidence.residual = Some(residual);
            let mut xi = x0 - (x0 / delta).floor() * delta;
            if delta - xi <= tol {
                xi = T::zero();
            }
            Ok(ReturnVerdict {
                class: ReturnClass::Perfect,
                t0: Some(T::two() * T::PI() / delta),
                xi: Some(xi),
                evidence,
            })
        }
        None => {
            evidence.note = Some("gaps are not commensurate within tolerance".into());
            Ok(ReturnVerdict {
                class: ReturnClass::AlmostPerfect,
                t0: None,
                xi: None,
                evidence,
            })
        }
    }
}

fn no_return<T>(evidence: Evidence<T>) -> ReturnVerdict<T> {
    ReturnVerdict {
        class: ReturnClass::NoReturn,
        t0: None,
        xi: None,
        evidence,
    }
}

/// `(Δ, max residual)` for positive increasing `gaps`, or `None`.
fn fit_lattice<T: Real>(gaps: &[T], tol: T, cap: u64) -> Option<(T, T)> {
    let g1 = gaps[0];
    if !(g1 > tol) {
        return None;
    }
    let cap = cap as u128;
    let mut fractions = Vec::with_capacity(gaps.len());
    let mut lcm: u128 = 1;
    for &g in gaps {
        let r = g / g1;
        let (p, q) = rationalize(r, cap, |p, q| {
            let approx = T::from_u128(p)? / T::from_u128(q)?;
            Some(g1 * (r - approx).abs() <= tol)
        })?;
        lcm = lcm / gcd(lcm, q) * q;
        if lcm > cap {
            return None;
        }
        fractions.push((p, q));
    }
    let indices: Vec<T> = fractions
        .iter()
        .map(|&(p, q)| T::from_u128(p * (lcm / q)))
        .collect::<Option<_>>()?;
    let num: T = indices.iter().zip(gaps).map(|(&n, &g)| n * g).sum();
    let den: T = indices.iter().map(|&n| n * n).sum();
    let delta = num / den;
    let residual = indices
        .iter()
        .zip(gaps)
        .map(|(&n, &g)| (g - n * delta).abs())
        .fold(T::zero(), T::max);
    (residual <= tol).then_some((delta, residual))
}

/// First continued-fraction convergent `p/q` of `r ≥ 0` with `q ≤ cap` that `accept`s.
fn rationalize<T: Real>(
    r: T,
    cap: u128,
    accept: impl Fn(u128, u128) -> Option<bool>,
) -> Option<(u128, u128)> {
    let (mut h1, mut h2): (u128, u128) = (1, 0);
    let (mut k1, mut k2): (u128, u128) = (0, 1);
    let mut x = r;
    for _ in 0..64 {
        let a = x.floor();
        let ai = a.to_u128()?;
        let h = ai.checked_mul(h1)?.checked_add(h2)?;
        let k = ai.checked_mul(k1)?.checked_add(k2)?;
        if k > cap {
            return None;
        }
        if accept(h, k)? {
            return Some((h, k));
        }
        let frac = x - a;
        if frac <= T::zero() {
            return None;
        }
        x = frac.recip();
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
    }
    None
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Classifies return behaviour.
///
/// Finite truncations of infinite supports are always atomic, so the kind the
/// measure is declared to have decides between `NoReturn` and the lattice
/// test: `Continuous` and `Mixed` give `NoReturn`, `Discrete` runs
/// [`detect_lattice`].
pub fn classify<T: Real>(
    measure: &SpectralMeasure<T>,
    declared: MeasureKind,
    opts: &LatticeOptions,
) -> Result<ReturnVerdict<T>> {
    let floor = T::lit(opts.mass_floor);
    if declared != MeasureKind::Discrete || measure.continuous_mass() > floor {
        let mut evidence = Evidence::new(measure);
        evidence.declared_kind = Some(declared);
        evidence.note = Some("measure has a continuous component".into());
        return Ok(no_return(evidence));
    }
    let heavy = measure.masses().iter().filter(|&&m| m >= floor).count();
    let mut verdict = if heavy < 2 {
        let mut evidence = Evidence::new(measure);
        evidence.atoms = heavy;
        evidence.degenerate = true;
        evidence.note = Some("single atom: |F(t)| = 1 for every t".into());
        ReturnVerdict {
            class: ReturnClass::Perfect,
            t0: Some(T::zero()),
            xi: measure.points().first().copied(),
            evidence,
        }
    } else {
        detect_lattice(measure, opts)?
    };
    verdict.evidence.declared_kind = Some(declared);
    Ok(verdict)
}

/// `f₀₀(t) = Σₛ Mₛ e^{−i t τₛ}` summed over the heaviest terms first.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmostPeriodicSeries<T> {
    /// `(τₛ, Mₛ)` by decreasing mass.
    terms: Vec<(T, T)>,
}

impl<T: Real> AlmostPeriodicSeries<T> {
    pub fn new(points: &[T], masses: &[T]) -> Result<Self> {
        let measure = SpectralMeasure::discrete(points.to_vec(), masses.to_vec())?;
        measure.ensure_normalized()?;
        Ok(Self::from_sorted(&measure))
    }

    pub fn from_measure(measure: &SpectralMeasure<T>) -> Result<Self> {
        if measure.continuous_part().is_some() {
            return Err(Error::Usage("almost periodic series needs a purely atomic measure".into()));
        }
        measure.ensure_normalized()?;
        Ok(Self::from_sorted(measure))
    }

    fn from_sorted(measure: &SpectralMeasure<T>) -> Self {
        let mut terms: Vec<(T, T)> = measure
            .points()
            .iter()
            .copied()
            .zip(measure.masses().iter().copied())
            .collect();
        terms.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite masses"));
        Self { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of the `terms` heaviest terms and the total mass left out, which bounds the error.
    pub fn partial_sum(&self, t: T, terms: usize) -> (Complex<T>, T) {
        let n = terms.min(self.terms.len());
        let mut acc = Complex::new(T::zero(), T::zero());
        for &(tau, m) in &self.terms[..n] {
            let (s, c) = (tau * t).sin_cos();
            acc = acc + Complex::new(m * c, -m * s);
        }
        let tail = self.terms[n..].iter().map(|&(_, m)| m).sum();
        (acc, tail)
    }

    pub fn eval(&self, t: T) -> Complex<T> {
        self.partial_sum(t, self.terms.len()).0
    }
}

/// A refined local maximum of `|f(t)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPeak<T> {
    pub t: T,
    pub modulus: T,
}

/// Local maxima of `|f|` along a uniformly sampled series, refined by a
/// three-point parabola and sorted by decreasing modulus.
///
/// Endpoints count when they are not below their single neighbour, so a
/// constant series yields every sample.
pub fn return_probability_scan<T: Real>(series: &AmplitudeSeries<T>) -> Result<Vec<ScanPeak<T>>> {
    let t = &series.times;
    let a = series.moduli();
    if a.is_empty() || t.len() != a.len() {
        return Err(Error::Usage("return scan needs a non-empty series".into()));
    }
    if a.len() == 1 {
        return Ok(vec![ScanPeak { t: t[0], modulus: a[0] }]);
    }
    let h = t[1] - t[0];
    let slack = T::lit(1e-9) * h.abs().max(t[t.len() - 1].abs() * T::epsilon());
    if !(h > T::zero()) || t.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > slack.max(h * T::lit(1e-6))) {
        return Err(Error::Usage("return scan needs uniformly increasing times".into()));
    }
    let n = a.len();
    let mut peaks = Vec::new();
    for k in 0..n {
        let left = if k > 0 { a[k] >= a[k - 1] } else { true };
        let right = if k + 1 < n { a[k] >= a[k + 1] } else { true };
        if !(left && right) {
            continue;
        }
        let mut peak = ScanPeak { t: t[k], modulus: a[k] };
        if k > 0 && k + 1 < n {
            let (y0, y1, y2) = (a[k - 1], a[k], a[k + 1]);
            let curv = y0 - T::two() * y1 + y2;
            if curv < T::zero() {
                let d = T::half() * (y0 - y2) / curv;
                peak.t = t[k] + d * h;
                peak.modulus = y1 - T::lit(0.25) * (y0 - y2) * d;
            }
        }
        peaks.push(peak);
    }
    peaks.sort_by(|p, q| q.modulus.partial_cmp(&p.modulus).expect("finite moduli"));
    Ok(peaks)
}
