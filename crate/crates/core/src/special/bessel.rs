//! Bessel functions `𝒥ₙ` and modified Bessel functions `Iₙ` of integer order.
//!
//! Small arguments use the power series; everything else uses Miller's
//! backward recurrence normalized by the generating-function identities
//! `𝒥₀ + 2Σ𝒥₂ₖ = 1` and `I₀ + 2ΣIₖ = eˣ`.

use crate::scalar::Real;

const SERIES_LIMIT: f64 = 8.0;
const MILLER_MARGIN: usize = 40;

/// `𝒥ₙ(t)` for integer `n ≥ 0`.
pub fn bessel_j<T: Real>(n: usize, t: T) -> T {
    if t == T::zero() {
        return if n == 0 { T::one() } else { T::zero() };
    }
    let sign = if t < T::zero() && n % 2 == 1 { -T::one() } else { T::one() };
    let x = t.abs();
    let value = if x <= T::lit(SERIES_LIMIT) {
        bessel_j_series(n, x)
    } else {
        bessel_j_miller(n, x)
    };
    sign * value
}

/// `𝒥₁(t)`.
pub fn bessel_j1<T: Real>(t: T) -> T {
    bessel_j(1, t)
}

/// `2𝒥₁(t)/t`, continuous at `t = 0` where it equals 1.
pub fn jinc<T: Real>(t: T) -> T {
    if t.abs() < T::lit(1e-6) {
        // 1 − t²/8 + t⁴/192
        let t2 = t * t;
        T::one() - t2 / T::lit(8.0) + t2 * t2 / T::lit(192.0)
    } else {
        T::two() * bessel_j1(t) / t
    }
}

fn bessel_j_series<T: Real>(n: usize, x: T) -> T {
    let half = x * T::half();
    let mut term = T::one();
    for k in 1..=n {
        term = term * half / T::from_usize_lossy(k);
    }
    let q = -half * half;
    let mut sum = term;
    for m in 1..200 {
        term = term * q / (T::from_usize_lossy(m) * T::from_usize_lossy(m + n));
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    sum
}

fn bessel_j_miller<T: Real>(n: usize, x: T) -> T {
    let start = {
        let s = n.max(x.ceil().to_usize().unwrap_or(0)) + MILLER_MARGIN;
        s + s % 2
    };
    let limit = T::max_value().sqrt().sqrt();
    let two_over_x = T::two() / x;
    let (mut next, mut cur) = (T::zero(), T::min_positive_value().sqrt());
    let mut norm = T::zero();
    let mut target = T::zero();
    for k in (1..=start).rev() {
        // cur = j_k, next = j_{k+1}
        if k == n {
            target = cur;
        }
        if k % 2 == 0 {
            norm = norm + T::two() * cur;
        }
        let prev = T::from_usize_lossy(k) * two_over_x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > limit {
            let s = limit.recip();
            cur = cur * s;
            next = next * s;
            norm = norm * s;
            target = target * s;
        }
    }
    if n == 0 {
        target = cur;
    }
    norm = norm + cur;
    target / norm
}

/// `e^{−|t|} Iₖ(t)`, bounded for every real `t`.
pub fn modified_bessel_i_scaled<T: Real>(k: i32, t: T) -> T {
    let n = k.unsigned_abs() as usize;
    if t == T::zero() {
        return if n == 0 { T::one() } else { T::zero() };
    }
    let sign = if t < T::zero() && n % 2 == 1 { -T::one() } else { T::one() };
    let x = t.abs();
    let start = n + x.ceil().to_usize().unwrap_or(0) + MILLER_MARGIN;
    let limit = T::max_value().sqrt().sqrt();
    let two_over_x = T::two() / x;
    let (mut next, mut cur) = (T::zero(), T::min_positive_value().sqrt());
    let (mut norm, mut target) = (T::zero(), T::zero());
    for m in (1..=start).rev() {
        if m == n {
            target = cur;
        }
        norm = norm + T::two() * cur;
        let prev = T::from_usize_lossy(m) * two_over_x * cur + next;
        next = cur;
        cur = prev;
        if cur.abs() > limit {
            let s = limit.recip();
            cur = cur * s;
            next = next * s;
            norm = norm * s;
            target = target * s;
        }
    }
    if n == 0 {
        target = cur;
    }
    norm = norm + cur;
    sign * target / norm
}

/// `Iₖ(t)`.
pub fn modified_bessel_i<T: Real>(k: i32, t: T) -> T {
    modified_bessel_i_scaled(k, t) * t.abs().exp()
}
