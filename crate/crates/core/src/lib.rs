//! Birth and death processes and continuous-time quantum walks through the
//! spectral measure of their Jacobi operator.
//!
//! A chain is a symmetric tridiagonal operator `J` with diagonal `Bᵢ` and
//! couplings `Jᵢ > 0`. For a birth and death process with rates `λᵢ, μᵢ`,
//! `Bᵢ = λᵢ + μᵢ` and `Jᵢ = √(λᵢ₋₁μᵢ)`. Given the orthogonality measure `dμ` of
//! `J` and the orthonormal polynomials `χᵢ`,
//!
//! ```text
//! P_ij(t) = (πⱼ/πᵢ)^{1/2} (−1)^{i+j} ∫ e^{−xt} χᵢ(x) χⱼ(x) dμ(x)
//! f_ij(t) = ∫ e^{−ixt} χᵢ(x) χⱼ(x) dμ(x) = ⟨i| e^{−iJt} |j⟩
//! ```
//!
//! give the classical transition probabilities and the quantum amplitudes.
//! The return amplitude `f₀₀` is the characteristic function of `dμ`
//! evaluated at `−t`, which decides perfect, almost perfect or no return.
//!
//! Every numerical routine is generic over [`Real`] (`f32` or `f64`). The
//! dense cross-check in [`oracle`] is `f64` only.
//!
//! ```
//! use spectral_walk::{families::pst_demo_chain, dynamics::quantum_amplitude};
//!
//! let chain = pst_demo_chain::<f64>(9).unwrap();
//! let f = quantum_amplitude(&chain.chain, 0, 9, &[std::f64::consts::PI]).unwrap();
//! assert!((f.values[0].norm() - 1.0).abs() < 1e-10);
//! ```

pub mod chain_spec;
pub mod dynamics;
pub mod error;
pub mod families;
pub mod jacobi;
pub mod oracle;
pub mod returns;
pub mod scalar;
pub mod special;
pub mod spectral;

pub use chain_spec::{registry, ChainSpec, FamilyInfo};
pub use dynamics::{
    classical_propagator, classical_transition, quantum_amplitude, quantum_propagator, time_grid,
    AmplitudeSeries, ProbabilitySeries,
};
pub use error::{Error, Result};
pub use families::{FamilyChain, TailRule};
pub use jacobi::{
    generator, pi_coefficients, rates_of, symmetrize, BirthDeathRates, Boundary, GeneratorMatrix,
    JacobiOperator, PiCoefficients,
};
pub use returns::{
    characteristic, classify, detect_lattice, modified_measure, return_probability_scan,
    AlmostPeriodicSeries, CharacteristicFunction, LatticeOptions, ReturnClass, ReturnVerdict,
};
pub use scalar::Real;
pub use spectral::{eigendecompose, MeasureKind, SpectralChain, SpectralMeasure};

/// Double precision instantiations.
pub type Rates = BirthDeathRates<f64>;
pub type Jacobi = JacobiOperator<f64>;
pub type Measure = SpectralMeasure<f64>;
pub type Chain = SpectralChain<f64>;
pub type Verdict = ReturnVerdict<f64>;

/// Single precision instantiations.
pub type Rates32 = BirthDeathRates<f32>;
pub type Jacobi32 = JacobiOperator<f32>;
pub type Measure32 = SpectralMeasure<f32>;
pub type Chain32 = SpectralChain<f32>;
pub type Verdict32 = ReturnVerdict<f32>;
