//! Classical transition probabilities and quantum transition amplitudes from
//! the spectral measure.
//!
//! Both are a single sum over the nodes of `dμ`:
//!
//! ```text
//! P_ij(t) = (πⱼ/πᵢ)^{1/2} Σₛ Mₛ χᵢ(xₛ) χⱼ(xₛ) e^{−xₛ t}
//! f_ij(t) =              Σₛ Mₛ χᵢ(xₛ) χⱼ(xₛ) e^{−i xₛ t}
//! ```
//!
//! The stored operator has positive couplings, so it is `−U A U⁻¹` conjugated
//! by `diag((−1)ⁱ)`; the classical sum carries the matching sign `(−1)^{i+j}`.
//!
//! Amplitudes use the convention `f(t) = exp(−iJt)`, so `i df/dt = f J`.
//! The `Mₛ χᵢ χⱼ` products are tabulated once per `(i, j)` and reused for
//! every time point.

use std::io::{self, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::jacobi::{pi_coefficients, BirthDeathRates, Boundary};
use crate::scalar::Real;
use crate::spectral::SpectralChain;

/// `P_ij(t)` sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilitySeries<T> {
    pub i: usize,
    pub j: usize,
    pub times: Vec<T>,
    pub values: Vec<T>,
}

/// `f_ij(t)` sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSeries<T> {
    pub i: usize,
    pub j: usize,
    pub times: Vec<T>,
    pub values: Vec<Complex<T>>,
}

/// Maps `−0` to `+0` so CSV output never shows a signed zero.
fn unsigned_zero<T: Real>(x: T) -> T {
    x + T::zero()
}

impl<T: Real> ProbabilitySeries<T> {
    pub fn file_name(&self) -> String {
        format!("p_{}_{}.csv", self.i, self.j)
    }

    /// CSV with header `t,p`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,p")?;
        for (t, p) in self.times.iter().zip(&self.values) {
            writeln!(out, "{:.16e},{:.16e}", t, unsigned_zero(*p))?;
        }
        Ok(())
    }
}

impl<T: Real> AmplitudeSeries<T> {
    pub fn file_name(&self) -> String {
        format!("f_{}_{}.csv", self.i, self.j)
    }

    pub fn moduli(&self) -> Vec<T> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// CSV with header `t,re,im,abs`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,re,im,abs")?;
        for (t, z) in self.times.iter().zip(&self.values) {
            let (re, im) = (unsigned_zero(z.re), unsigned_zero(z.im));
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", t, re, im, z.norm())?;
        }
        Ok(())
    }
}

/// `steps` equally spaced points on `[t_min, t_max]`; a single point when the ends coincide.
pub fn time_grid<T: Real>(t_min: T, t_max: T, steps: usize) -> Result<Vec<T>> {
    if t_min == t_max {
        return Ok(vec![t_min]);
    }
    if !(t_max > t_min) {
        return Err(Error::parameter("t_max", format!("t_max {t_max} must exceed t_min {t_min}")));
    }
    if steps < 2 {
        return Err(Error::parameter("steps", "a time grid needs at least two points"));
    }
    let h = (t_max - t_min) / T::from_usize_lossy(steps - 1);
    Ok((0..steps)
        .map(|k| {
            if k == steps - 1 {
                t_max
            } else {
                t_min + h * T::from_usize_lossy(k)
            }
        })
        .collect())
}

/// Spectral kernel table `(xₛ, Mₛ χᵢ(xₛ) χⱼ(xₛ))` for one pair of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct PairKernel<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> PairKernel<T> {
    pub fn new(chain: &SpectralChain<T>, i: usize, j: usize) -> Result<Self> {
        check_site(chain, i)?;
        check_site(chain, j)?;
        let table = chain.chi_table(i.max(j))?;
        let (nodes, weights) = chain
            .measure()
            .nodes()
            .zip(&table)
            .map(|((x, w), seq)| (x, seq.weighted_product(w, i, j)))
            .unzip();
        Ok(Self { nodes, weights })
    }

    /// `Σₛ wₛ e^{−i xₛ t}`.
    pub fn quantum(&self, t: T) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let (s, c) = (x * t).sin_cos();
            acc = acc + Complex::new(w * c, -w * s);
        }
        acc
    }

    /// `Σₛ wₛ e^{−xₛ t}`.
    pub fn classical(&self, t: T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * (-x * t).exp())
            .sum()
    }
}

fn check_site<T: Real>(chain: &SpectralChain<T>, i: usize) -> Result<()> {
    if i >= chain.sites() {
        return Err(Error::parameter(
            "site",
            format!("site {i} outside the {}-site operator", chain.sites()),
        ));
    }
    Ok(())
}

/// `f_ij(t)` on `times`.
pub fn quantum_amplitude<T: Real>(
    chain: &SpectralChain<T>,
    i: usize,
    j: usize,
    times: &[T],
) -> Result<AmplitudeSeries<T>> {
    let kernel = PairKernel::new(chain, i, j)?;
    Ok(AmplitudeSeries {
        i,
        j,
        times: times.to_vec(),
        values: times.iter().map(|&t| kernel.quantum(t)).collect(),
    })
}

/// Full matrix `[f_ij(t)]` over every site of the operator.
pub fn quantum_propagator<T: Real>(chain: &SpectralChain<T>, t: T) -> Result<Vec<Vec<Complex<T>>>> {
    let n = chain.sites();
    let table = chain.chi_table(n - 1)?;
    let nodes: Vec<(T, T)> = chain.measure().nodes().collect();
    let phases: Vec<Complex<T>> = nodes
        .iter()
        .map(|&(x, _)| {
            let (s, c) = (x * t).sin_cos();
            Complex::new(c, -s)
        })
        .collect();
    let mut out = vec![vec![Complex::new(T::zero(), T::zero()); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex::new(T::zero(), T::zero());
            for ((seq, &(_, w)), phase) in table.iter().zip(&nodes).zip(&phases) {
                acc = acc + phase * seq.weighted_product(w, i, j);
            }
            out[i][j] = acc;
            out[j][i] = acc;
        }
    }
    Ok(out)
}

/// Checks that the operator's entries feeding `χ₀ … χ_degree` are those of `rates`.
fn check_provenance<T: Real>(
    chain: &SpectralChain<T>,
    rates: &BirthDeathRates<T>,
    degree: usize,
) -> Result<()> {
    if degree == 0 {
        return Ok(());
    }
    let (lambdas, mus) = rates.truncate(degree, Boundary::AbsorbingTail)?;
    let jac = chain.jacobi();
    let tol = T::lit(1e-12);
    let close = |a: T, b: T| (a - b).abs() <= tol * a.abs().max(b.abs()).max(T::one());
    for k in 0..degree {
        if !close(jac.diagonal()[k], lambdas[k] + mus[k]) {
            return Err(Error::Usage(format!(
                "measure and rates disagree: B_{k} = {} but λ_{k} + μ_{k} = {}",
                jac.diagonal()[k],
                lambdas[k] + mus[k]
            )));
        }
        let coupling = (lambdas[k] * mus[k + 1]).sqrt();
        if !close(jac.coupling(k + 1), coupling) {
            return Err(Error::Usage(format!(
                "measure and rates disagree: J_{} = {} but √(λ_{k} μ_{}) = {}",
                k + 1,
                jac.coupling(k + 1),
                k + 1,
                coupling
            )));
        }
    }
    Ok(())
}

fn parity<T: Real>(k: usize) -> T {
    if k.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

fn check_times<T: Real>(times: &[T]) -> Result<()> {
    if let Some(t) = times.iter().find(|&&t| !(t >= T::zero())) {
        return Err(Error::parameter("times", format!("classical evolution needs t ≥ 0, got {t}")));
    }
    Ok(())
}

/// `P_ij(t)` on `times` (all `t ≥ 0`).
///
/// `chain` must be the spectral data of `J = −U A U⁻¹` built from `rates`.
pub fn classical_transition<T: Real>(
    chain: &SpectralChain<T>,
    rates: &BirthDeathRates<T>,
    i: usize,
    j: usize,
    times: &[T],
) -> Result<ProbabilitySeries<T>> {
    check_times(times)?;
    check_provenance(chain, rates, i.max(j))?;
    let pi = pi_coefficients(rates, i.max(j))?;
    let factor = parity::<T>(i + j) * pi.sqrt_ratio(i, j);
    let kernel = PairKernel::new(chain, i, j)?;
    Ok(ProbabilitySeries {
        i,
        j,
        times: times.to_vec(),
        values: times.iter().map(|&t| factor * kernel.classical(t)).collect(),
    })
}

/// Full matrix `[P_ij(t)]` over every site of the operator.
pub fn classical_propagator<T: Real>(
    chain: &SpectralChain<T>,
    rates: &BirthDeathRates<T>,
    t: T,
) -> Result<Vec<Vec<T>>> {
    check_times(&[t])?;
    let n = chain.sites();
    check_provenance(chain, rates, n - 1)?;
    let pi = pi_coefficients(rates, n - 1)?;
    let table = chain.chi_table(n - 1)?;
    let nodes: Vec<(T, T)> = chain.measure().nodes().collect();
    let decay: Vec<T> = nodes.iter().map(|&(x, _)| (-x * t).exp()).collect();
    let mut out = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let sym: T = table
                .iter()
                .zip(&nodes)
                .zip(&decay)
                .map(|((seq, &(_, w)), &d)| d * seq.weighted_product(w, i, j))
                .sum();
            let sym = parity::<T>(i + j) * sym;
            out[i][j] = pi.sqrt_ratio(i, j) * sym;
            out[j][i] = pi.sqrt_ratio(j, i) * sym;
        }
    }
    Ok(out)
}

/// `e^{−2t} I_{i−j}(2t)`: transition probability of the symmetric unit-rate
/// walk on all of ℤ. Serves as a sanity curve for interior sites of long chains.
pub fn doubly_infinite_reference<T: Real>(i: i64, j: i64, t: T) -> T {
    let k = (i - j) as i32;
    crate::special::modified_bessel_i_scaled(k, T::two() * t)
}
