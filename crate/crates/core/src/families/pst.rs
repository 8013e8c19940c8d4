//! Finite chain with perfect end-to-end transfer.
//!
//! `Bᵢ = 0` and `Jₙ = √(n(N+1−n))/2` for `n = 1..N` make `J` the `x`
//! component of a spin-`N/2`, so the spectrum is `−N/2, …, N/2` with unit
//! spacing. Transfer from site 0 to site `N` is perfect at `t = π` and the
//! walk returns to site 0 at `t = 2π`.

use super::FamilyChain;
use crate::error::{Error, Result};
use crate::jacobi::JacobiOperator;
use crate::scalar::Real;
use crate::spectral::{MeasureKind, SpectralChain};

/// Chain of `n + 1` sites, `n ≥ 1`.
pub fn pst_demo_chain<T: Real>(n: usize) -> Result<FamilyChain<T>> {
    if n == 0 {
        return Err(Error::parameter("n", "the transfer chain needs at least two sites"));
    }
    let big_n = T::from_usize_lossy(n);
    let jacobi = JacobiOperator::from_fns(
        n + 1,
        |_| T::zero(),
        |k| {
            let k = T::from_usize_lossy(k);
            (k * (big_n + T::one() - k)).sqrt() * T::half()
        },
    )?;
    Ok(FamilyChain {
        name: "pst-demo",
        chain: SpectralChain::from_jacobi(jacobi)?,
        rates: None,
        declared_kind: MeasureKind::Discrete,
        elliptic: None,
        info: serde_json::json!({
            "n": n,
            "sites": n + 1,
            "transfer_time": std::f64::consts::PI,
        }),
    })
}
