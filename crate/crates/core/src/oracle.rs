//! Dense matrix-exponential reference path, independent of the spectral code.
//!
//! The classical generator is exponentiated by scaling and squaring, the
//! symmetric Hamiltonian through a dense symmetric eigendecomposition. Both
//! come from `nalgebra` and work in `f64` only.

use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::jacobi::{GeneratorMatrix, JacobiOperator};

/// Largest matrix the oracle accepts.
pub const ORACLE_MAX_SIZE: usize = 64;

fn check_size(n: usize) -> Result<()> {
    if n > ORACLE_MAX_SIZE {
        return Err(Error::Usage(format!(
            "oracle limited to {ORACLE_MAX_SIZE} sites, got {n}"
        )));
    }
    Ok(())
}

fn dense(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// `exp(t M)` for a dense square matrix given row by row.
pub fn expm(matrix: &[Vec<f64>], t: f64) -> Result<DMatrix<f64>> {
    check_size(matrix.len())?;
    Ok((dense(matrix) * t).exp())
}

/// `exp(t A)`, the classical transition matrix.
pub fn expm_generator(generator: &GeneratorMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    expm(&generator.to_dense(), t)
}

/// `exp(−i J t)`, the quantum propagator.
pub fn unitary_propagator(jacobi: &JacobiOperator<f64>, t: f64) -> Result<DMatrix<Complex<f64>>> {
    check_size(jacobi.size())?;
    let eig = SymmetricEigen::new(dense(&jacobi.to_dense()));
    let n = jacobi.size();
    let v = &eig.eigenvectors;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        (0..n).fold(Complex::new(0.0, 0.0), |acc, s| {
            let phase = Complex::new(0.0, -eig.eigenvalues[s] * t).exp();
            acc + phase * (v[(i, s)] * v[(j, s)])
        })
    }))
}
