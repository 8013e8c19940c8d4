//! Helpers shared by the integration tests: the random chain corpus and small
//! dense-matrix utilities used as independent oracles.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_walk::{symmetrize, BirthDeathRates, JacobiOperator, SpectralChain};

pub const CORPUS_SEED: u64 = 0x5eed_2024;

/// A finite reflecting chain with rates uniform in (0.1, 2) and `μ₀ = 0`.
#[derive(Debug, Clone)]
pub struct RandomChain {
    pub rates: BirthDeathRates<f64>,
    pub jacobi: JacobiOperator<f64>,
    pub chain: SpectralChain<f64>,
    pub n: usize,
}

pub fn random_chain(rng: &mut impl Rng, n: usize) -> RandomChain {
    let mut lambdas: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.1..2.0)).collect();
    let mut mus: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.1..2.0)).collect();
    lambdas[n] = 0.0;
    mus[0] = 0.0;
    let rates = BirthDeathRates::finite(lambdas, mus).unwrap();
    let jacobi = symmetrize(&rates, n).unwrap();
    let chain = SpectralChain::from_jacobi(jacobi.clone()).unwrap();
    RandomChain { rates, jacobi, chain, n }
}

/// `count` chains with `N` drawn from 4..=12 (5 to 13 sites).
pub fn corpus(seed: u64, count: usize) -> Vec<RandomChain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(4..=12);
            random_chain(&mut rng, n)
        })
        .collect()
}

/// A symmetric tridiagonal operator with entries drawn from the given ranges.
pub fn random_jacobi(rng: &mut impl Rng, n: usize) -> JacobiOperator<f64> {
    let b = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let j = (0..n).map(|_| rng.gen_range(0.2..1.5)).collect();
    JacobiOperator::new(b, j).unwrap()
}

pub fn dense(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// Largest entrywise `|a − b|`.
pub fn max_diff(a: &[Vec<f64>], b: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in a.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            worst = worst.max((x - b[(i, j)]).abs());
        }
    }
    worst
}

/// Golden-section minimum of `f` on `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5.0f64.sqrt() - 1.0) / 2.0;
    while b - a > tol {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}
