//! Complete elliptic integrals and the Jacobi elliptic functions `sn`, `cn`, `dn`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_AGM_STEPS: usize = 64;

/// Arithmetic–geometric mean of `a` and `b`.
pub fn agm<T: Real>(mut a: T, mut b: T) -> T {
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= T::epsilon() * a.abs() {
            break;
        }
        let next = (a + b) * T::half();
        b = (a * b).sqrt();
        a = next;
    }
    (a + b) * T::half()
}

/// `K(k) = ∫₀^{π/2} dφ / √(1 − k² sin²φ)` for modulus `0 ≤ k < 1`.
pub fn complete_k<T: Real>(k: T) -> T {
    let kp = ((T::one() - k) * (T::one() + k)).sqrt();
    T::PI() / (T::two() * agm(T::one(), kp))
}

/// Modulus-dependent constants shared by the elliptic function routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticContext<T> {
    /// Modulus `k`.
    pub k: T,
    /// Complementary modulus `k′ = √(1 − k²)`.
    pub k_prime: T,
    /// `K(k)`.
    pub big_k: T,
    /// `K′ = K(k′)`.
    pub big_k_prime: T,
    /// Nome `q = exp(−π K′/K)`.
    pub nome: T,
}

impl<T: Real> EllipticContext<T> {
    pub fn new(k: T) -> Result<Self> {
        if !(k > T::zero() && k < T::one()) {
            return Err(Error::parameter("k", format!("modulus {k} must lie in (0, 1)")));
        }
        let k_prime = ((T::one() - k) * (T::one() + k)).sqrt();
        let big_k = T::PI() / (T::two() * agm(T::one(), k_prime));
        let big_k_prime = T::PI() / (T::two() * agm(T::one(), k));
        Ok(Self {
            k,
            k_prime,
            big_k,
            big_k_prime,
            nome: (-T::PI() * big_k_prime / big_k).exp(),
        })
    }

    /// `(sn, cn, dn)(u; k)`.
    pub fn sn_cn_dn(&self, u: T) -> (T, T, T) {
        // sn and cn have period 4K; reducing first keeps the Landen phase small.
        let period = T::lit(4.0) * self.big_k;
        let u = u - period * (u / period).round();
        let k = self.k;
        let m = k * k;
        if m < T::epsilon() {
            let (s, c) = u.sin_cos();
            let shift = m * T::lit(0.25) * (u - s * c);
            return (s - shift * c, c + shift * s, T::one() - m * T::half() * s * s);
        }

        let mut a = vec![T::one()];
        let mut c = vec![k];
        let mut b = self.k_prime;
        while c.last().expect("seeded").abs() > T::epsilon() && a.len() < MAX_AGM_STEPS {
            let an = *a.last().expect("seeded");
            c.push((an - b) * T::half());
            a.push((an + b) * T::half());
            b = (an * b).sqrt();
        }
        let steps = a.len() - 1;
        let mut phi = T::two().powi(steps as i32) * a[steps] * u;
        for n in (1..=steps).rev() {
            phi = (phi + (c[n] / a[n] * phi.sin()).asin()) * T::half();
        }
        let (sn, cn) = phi.sin_cos();
        let dn = (T::one() - m * sn * sn).sqrt();
        (sn, cn, dn)
    }

    pub fn cn(&self, u: T) -> T {
        self.sn_cn_dn(u).1
    }

    pub fn dn(&self, u: T) -> T {
        self.sn_cn_dn(u).2
    }
}

/// Elliptic constants for modulus `k`.
pub fn elliptic_context<T: Real>(k: T) -> Result<EllipticContext<T>> {
    EllipticContext::new(k)
}

/// `(cn, dn)(z; k)`.
pub fn jacobi_cn_dn<T: Real>(z: T, context: &EllipticContext<T>) -> (T, T) {
    let (_, cn, dn) = context.sn_cn_dn(z);
    (cn, dn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Composite Gauss–Legendre (5-point) on many panels: the integrand is smooth for k < 1.
    fn k_by_quadrature(k: f64) -> f64 {
        let nodes = [
            0.0,
            0.538_469_310_105_683_1,
            -0.538_469_310_105_683_1,
            0.906_179_845_938_664,
            -0.906_179_845_938_664,
        ];
        let weights = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let panels = 400;
        let h = PI / 2.0 / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in nodes.iter().zip(&weights) {
                let phi = mid + 0.5 * h * x;
                total += 0.5 * h * w / (1.0 - k * k * phi.sin().powi(2)).sqrt();
            }
        }
        total
    }

    #[test]
    fn k_matches_quadrature() {
        for k in [0.1f64, 0.5, 0.9] {
            let ctx = EllipticContext::new(k).unwrap();
            assert!((ctx.big_k - k_by_quadrature(k)).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn k_reference_values() {
        // mpmath: K, K′ and the nome
        let refs = [
            (0.3f64, 1.6080486199305128, 2.627773332084344, 0.005894144434269082),
            (0.7, 1.8456939983747234, 1.8626408023327385, 0.041985198167183324),
        ];
        for (k, kk, kkp, q) in refs {
            let ctx = EllipticContext::new(k).unwrap();
            assert!((ctx.big_k - kk).abs() < 1e-14 * kk);
            assert!((ctx.big_k_prime - kkp).abs() < 1e-14 * kkp);
            assert!((ctx.nome - q).abs() < 1e-13 * q);
        }
    }

    #[test]
    fn small_modulus_limit() {
        assert!((complete_k(1e-9f64) - PI / 2.0).abs() < 1e-15);
        assert!(EllipticContext::new(0.0f64).is_err());
        assert!(EllipticContext::new(1.0f64).is_err());
    }

    #[test]
    fn self_dual_modulus() {
        let ctx = EllipticContext::new(0.5f64.sqrt()).unwrap();
        assert!((ctx.big_k - ctx.big_k_prime).abs() < 1e-14);
        assert!((ctx.nome - (-PI).exp()).abs() < 1e-15);
        assert!((ctx.nome - 0.0432139).abs() < 1e-7);
    }

    #[test]
    fn cn_dn_identities() {
        for k in [0.1f64, 0.3, 0.7, 0.9] {
            let ctx = EllipticContext::new(k).unwrap();
            let (cn0, dn0) = jacobi_cn_dn(0.0, &ctx);
            assert_eq!((cn0, dn0), (1.0, 1.0));
            let (s, c, d) = ctx.sn_cn_dn(ctx.big_k);
            assert!((s - 1.0).abs() < 1e-12);
            assert!(c.abs() < 1e-12);
            assert!((d - ctx.k_prime).abs() < 1e-12);
            for i in 0..50 {
                let u = -7.0 + 0.3 * i as f64;
                let (s, c, d) = ctx.sn_cn_dn(u);
                assert!((s * s + c * c - 1.0).abs() < 1e-14);
                assert!((d * d + k * k * s * s - 1.0).abs() < 1e-14);
                let (_, c4, _) = ctx.sn_cn_dn(u + 4.0 * ctx.big_k);
                assert!((c - c4).abs() < 1e-12);
                assert!((d - ctx.dn(u + 2.0 * ctx.big_k)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cn_dn_reference_values() {
        let refs = [
            (0.3f64, 1.1f64, 0.4674812610981957, 0.9641931785970156, 0.8840029810594762),
            (0.7, 2.5, -0.4644741131246447, 0.7846723767686954, 0.885586697188409),
            (0.9, -4.0, -0.8582629707520176, 0.886937661192095, -0.5132101645874927),
        ];
        for (k, u, cn, dn, sn) in refs {
            let ctx = EllipticContext::new(k).unwrap();
            let (s, c, d) = ctx.sn_cn_dn(u);
            assert!((c - cn).abs() < 1e-13 && (d - dn).abs() < 1e-13 && (s - sn).abs() < 1e-13);
        }
    }
}
