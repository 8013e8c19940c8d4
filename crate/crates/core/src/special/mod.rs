//! Special functions needed by the closed-form chain families.

pub mod bessel;
pub mod elliptic;

pub use bessel::{bessel_j, bessel_j1, jinc, modified_bessel_i, modified_bessel_i_scaled};
pub use elliptic::{agm, complete_k, elliptic_context, jacobi_cn_dn, EllipticContext};
