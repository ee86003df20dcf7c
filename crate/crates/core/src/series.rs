//! Truncated formal power series with exact rational coefficients.
//!
//! A series is a coefficient vector `c[k]` of `t^k`; every operation takes the
//! number of coefficients to keep.

use crate::rational::Q;
use num_traits::{One, Zero};

pub fn truncate(a: &[Q], len: usize) -> Vec<Q> {
    let mut v: Vec<Q> = a.iter().take(len).cloned().collect();
    v.resize(len, Q::zero());
    v
}

pub fn add(a: &[Q], b: &[Q], len: usize) -> Vec<Q> {
    (0..len)
        .map(|k| a.get(k).cloned().unwrap_or_else(Q::zero) + b.get(k).cloned().unwrap_or_else(Q::zero))
        .collect()
}

pub fn sub(a: &[Q], b: &[Q], len: usize) -> Vec<Q> {
    (0..len)
        .map(|k| a.get(k).cloned().unwrap_or_else(Q::zero) - b.get(k).cloned().unwrap_or_else(Q::zero))
        .collect()
}

pub fn scale(a: &[Q], c: &Q) -> Vec<Q> {
    a.iter().map(|x| x * c).collect()
}

/// Multiplies by `t^k`.
pub fn shift(a: &[Q], k: usize, len: usize) -> Vec<Q> {
    (0..len)
        .map(|i| if i < k { Q::zero() } else { a.get(i - k).cloned().unwrap_or_else(Q::zero) })
        .collect()
}

pub fn mul(a: &[Q], b: &[Q], len: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Multiplicative inverse; requires a nonzero constant term.
pub fn inv(a: &[Q], len: usize) -> Vec<Q> {
    assert!(!a.is_empty() && !a[0].is_zero(), "series inverse needs a nonzero constant term");
    let c0 = a[0].recip();
    let mut out = vec![Q::zero(); len];
    if len == 0 {
        return out;
    }
    out[0] = c0.clone();
    for n in 1..len {
        let mut acc = Q::zero();
        for k in 1..=n.min(a.len() - 1) {
            if !a[k].is_zero() {
                acc += &a[k] * &out[n - k];
            }
        }
        out[n] = -acc * &c0;
    }
    out
}

/// `outer(inner(t))`; requires `inner(0) = 0`.
pub fn compose(outer: &[Q], inner: &[Q], len: usize) -> Vec<Q> {
    assert!(inner.first().is_none_or(Zero::is_zero), "inner series must vanish at 0");
    let n = outer.len().min(len);
    let mut acc = vec![Q::zero(); len];
    for k in (0..n).rev() {
        acc = mul(&acc, inner, len);
        if len > 0 {
            acc[0] += &outer[k];
        }
    }
    acc
}

/// Compositional inverse of `h` with `h(0) = 0`, `h'(0) ≠ 0`, via Lagrange
/// inversion: `[w^n] g = (1/n) [t^{n-1}] (t/h(t))^n`.
pub fn reversion(h: &[Q], len: usize) -> Vec<Q> {
    assert!(h.len() >= 2 && h[0].is_zero() && !h[1].is_zero(), "reversion needs h(0)=0, h'(0)≠0");
    let mut out = vec![Q::zero(); len];
    if len < 2 {
        return out;
    }
    let quotient = inv(&h[1..], len);
    let mut power = vec![Q::one()];
    for n in 1..len {
        power = mul(&power, &quotient, len);
        out[n] = &power[n - 1] / Q::from_integer((n as i64).into());
    }
    out
}
