//! Moment sequences, their G/K/F/R transforms and the convolutions.
//!
//! Everything runs on power series in `t = 1/z`: with `M(t) = Σ M_n t^n`,
//! `G = t·M(t)`, `K = (1 − 1/M)/t` and `F = z − K`. A distribution known to
//! order N (moments M_0..M_N) has K coefficients K_0..K_{N−1}.

use crate::error::{Error, Result};
use crate::rational::{format_q, Q};
use crate::report::CheckReport;
use crate::series;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSeq {
    coeffs: Vec<Q>,
}

impl MomentSeq {
    pub fn new(coeffs: Vec<Q>) -> Result<Self> {
        if coeffs.first().is_none_or(|m0| !m0.is_one()) {
            return Err(Error::NotNormalized);
        }
        Ok(MomentSeq { coeffs })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        MomentSeq::new(values.iter().map(|&v| crate::rational::q(v)).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn get(&self, n: usize) -> &Q {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn truncated(&self, order: usize) -> Result<MomentSeq> {
        if order > self.order() {
            return Err(Error::OrderTooHigh {
                requested: order,
                available: self.order(),
            });
        }
        Ok(MomentSeq {
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_q).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformKind {
    M,
    G,
    K,
    F,
    R,
}

/// Coefficient conventions:
/// - `M`: `coeffs[n]` multiplies `z^n`;
/// - `G`: `coeffs[n]` multiplies `z^{-(n+1)}`;
/// - `K`: `coeffs[n]` multiplies `z^{-n}`;
/// - `F`: `coeffs[n]` multiplies `z^{1-n}` (so `coeffs[0] = 1`);
/// - `R`: `coeffs[n]` multiplies `z^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformSeries {
    pub kind: TransformKind,
    pub coeffs: Vec<Q>,
}

/// A spectral distribution known through finitely many moments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    moments: MomentSeq,
}

impl From<MomentSeq> for Distribution {
    fn from(moments: MomentSeq) -> Self {
        Distribution { moments }
    }
}

impl Distribution {
    pub fn new(moments: MomentSeq) -> Self {
        Distribution { moments }
    }

    /// Point mass at zero, to the given order.
    pub fn delta0(order: usize) -> Self {
        let mut c = vec![Q::zero(); order + 1];
        c[0] = Q::one();
        Distribution {
            moments: MomentSeq { coeffs: c },
        }
    }

    pub fn moments(&self) -> &MomentSeq {
        &self.moments
    }

    pub fn order(&self) -> usize {
        self.moments.order()
    }

    pub fn truncated(&self, order: usize) -> Result<Distribution> {
        Ok(Distribution {
            moments: self.moments.truncated(order)?,
        })
    }

    /// K_0..K_{N−1}.
    pub fn k_series(&self) -> Vec<Q> {
        let n = self.order();
        let inv_m = series::inv(self.moments.coeffs(), n + 1);
        (1..=n).map(|k| -inv_m[k].clone()).collect()
    }

    /// Inverse of [`Distribution::k_series`]: `M = 1/(1 − t K)`.
    pub fn from_k(k: &[Q]) -> Distribution {
        let len = k.len() + 1;
        let mut denom = vec![Q::zero(); len];
        denom[0] = Q::one();
        for (i, c) in k.iter().enumerate() {
            denom[i + 1] = -c.clone();
        }
        Distribution {
            moments: MomentSeq {
                coeffs: series::inv(&denom, len),
            },
        }
    }

    /// `G` as a power series in `t`: `t·M(t)`, with N+2 coefficients.
    fn g_in_t(&self) -> Vec<Q> {
        let mut g = vec![Q::zero()];
        g.extend(self.moments.coeffs().iter().cloned());
        g
    }

    /// R_0..R_{N−1}, i.e. the free cumulants κ_1..κ_N.
    pub fn r_series(&self) -> Vec<Q> {
        let n = self.order();
        let g_inv = series::reversion(&self.g_in_t(), n + 2);
        let q_inv = series::inv(&g_inv[1..], n + 1);
        q_inv[1..].to_vec()
    }

    pub fn from_r(r: &[Q]) -> Distribution {
        let n = r.len();
        let mut q_inv = vec![Q::one()];
        q_inv.extend(r.iter().cloned());
        let q = series::inv(&q_inv, n + 1);
        let mut g_inv = vec![Q::zero()];
        g_inv.extend(q);
        let g = series::reversion(&g_inv, n + 2);
        Distribution {
            moments: MomentSeq {
                coeffs: g[1..].to_vec(),
            },
        }
    }

    /// F coefficients (of `z^{1−n}`), N+1 of them.
    pub fn f_series(&self) -> Vec<Q> {
        series::inv(self.moments.coeffs(), self.order() + 1)
    }

    pub fn to_transform(&self, kind: TransformKind) -> TransformSeries {
        let coeffs = match kind {
            TransformKind::M | TransformKind::G => self.moments.coeffs().to_vec(),
            TransformKind::K => self.k_series(),
            TransformKind::F => self.f_series(),
            TransformKind::R => self.r_series(),
        };
        TransformSeries { kind, coeffs }
    }
}

fn common_order(a: &Distribution, b: &Distribution, order: usize) -> Result<()> {
    let available = a.order().min(b.order());
    if order > available {
        return Err(Error::OrderTooHigh {
            requested: order,
            available,
        });
    }
    Ok(())
}

/// K-additive combination.
pub fn boolean_conv(a: &Distribution, b: &Distribution, order: usize) -> Result<Distribution> {
    common_order(a, b, order)?;
    let ka = a.truncated(order)?.k_series();
    let kb = b.truncated(order)?.k_series();
    Ok(Distribution::from_k(&series::add(&ka, &kb, order)))
}

/// R-additive combination.
pub fn free_conv(a: &Distribution, b: &Distribution, order: usize) -> Result<Distribution> {
    common_order(a, b, order)?;
    let ra = a.truncated(order)?.r_series();
    let rb = b.truncated(order)?.r_series();
    Ok(Distribution::from_r(&series::add(&ra, &rb, order)))
}

/// `K_a(F_b(z))` as a series in t: substitute `1/F_b = G_b = t·M_b(t)`.
fn k_after_f(a: &Distribution, b: &Distribution, order: usize) -> Vec<Q> {
    let ka = a.truncated(order).expect("order checked").k_series();
    let gb = b.truncated(order).expect("order checked").g_in_t();
    series::compose(&ka, &gb, order)
}

/// `F_a ∘ F_b`.
pub fn monotone_conv(a: &Distribution, b: &Distribution, order: usize) -> Result<Distribution> {
    common_order(a, b, order)?;
    let kb = b.truncated(order)?.k_series();
    Ok(Distribution::from_k(&series::add(&kb, &k_after_f(a, b, order), order)))
}

/// `K_a ∘ F_b`.
pub fn orth_conv(a: &Distribution, b: &Distribution, order: usize) -> Result<Distribution> {
    common_order(a, b, order)?;
    Ok(Distribution::from_k(&k_after_f(a, b, order)))
}

/// The pair (a ⊢_m b, b ⊢_m a) from the alternating recursion with
/// a ⊢_0 b = a.
fn orth_iterates(a: &Distribution, b: &Distribution, m: usize, order: usize) -> Result<(Distribution, Distribution)> {
    common_order(a, b, order)?;
    let mut left = a.truncated(order)?;
    let mut right = b.truncated(order)?;
    for _ in 0..m {
        let nl = orth_conv(a, &right, order)?;
        let nr = orth_conv(b, &left, order)?;
        left = nl;
        right = nr;
    }
    Ok((left, right))
}

/// The limit of a ⊢_m b; ⌈order/2⌉ + 1 iterations fix all moments up to
/// `order`.
pub fn sfree_conv(a: &Distribution, b: &Distribution, order: usize) -> Result<Distribution> {
    Ok(orth_iterates(a, b, order.div_ceil(2) + 1, order)?.0)
}

/// (a ⊢_m b) ⊎ (b ⊢_m a).
pub fn mfree_conv(a: &Distribution, b: &Distribution, m: usize, order: usize) -> Result<Distribution> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let (left, right) = orth_iterates(a, b, m, order)?;
    boolean_conv(&left, &right, order)
}

/// `G_a(z − K_b(z − K_a(z − …)))` with `depth` nested K's.
pub fn free_conv_continued(a: &Distribution, b: &Distribution, depth: usize, order: usize) -> Result<Distribution> {
    common_order(a, b, order)?;
    let len = order + 2;
    let ka = a.truncated(order)?.k_series();
    let kb = b.truncated(order)?.k_series();
    // argument w = z − u(t); 1/w = t / (1 − t u(t))
    let recip = |u: &[Q]| {
        let mut d = vec![Q::one()];
        d.extend(u.iter().map(|c| -c.clone()));
        series::shift(&series::inv(&d, len), 1, len)
    };
    let mut u = vec![Q::zero(); len];
    for level in (1..=depth).rev() {
        let k = if level % 2 == 1 { &kb } else { &ka };
        u = series::compose(k, &recip(&u), len);
    }
    let g = series::compose(&a.truncated(order)?.g_in_t(), &recip(&u), len);
    Ok(Distribution {
        moments: MomentSeq::new(g[1..=order + 1].to_vec())?,
    })
}

/// F coefficients of `F_a(F_b(z))`, computed through moments:
/// `1 / G_a(F_b(z))` with `G_a(w) = Σ M_n w^{-n-1}` and `1/F_b = G_b`.
pub fn compose_f(a: &Distribution, b: &Distribution, order: usize) -> Result<Vec<Q>> {
    common_order(a, b, order)?;
    let len = order + 2;
    let ga = a.truncated(order)?.g_in_t();
    let gb = b.truncated(order)?.g_in_t();
    let g = series::compose(&ga, &gb, len);
    Ok(series::inv(&g[1..], order + 1))
}

fn z_series(order: usize) -> Vec<Q> {
    let mut z = vec![Q::zero(); order + 1];
    z[0] = Q::one();
    z
}

fn push_rows(report: &mut CheckReport, condition: &str, lhs: &[Q], rhs: &[Q]) {
    for (n, (l, r)) in lhs.iter().zip(rhs).enumerate() {
        report.push(condition, format!("coefficient of z^{}", 1 - n as i64), format_q(l), format_q(r));
    }
}

/// The boolean and orthogonal F-identities, coefficient by coefficient:
/// `F_{a⊎b} = F_a + F_b − z` and `F_{a⊢b} = F_a(F_b) − F_b + z`.
pub fn check_prop31(a: &Distribution, b: &Distribution, order: usize) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    let z = z_series(order);
    let fa = a.truncated(order)?.f_series();
    let fb = b.truncated(order)?.f_series();

    let lhs = boolean_conv(a, b, order)?.f_series();
    let rhs = series::sub(&series::add(&fa, &fb, order + 1), &z, order + 1);
    push_rows(&mut report, "boolean F-identity", &lhs, &rhs);

    let lhs = orth_conv(a, b, order)?.f_series();
    let fab = compose_f(a, b, order)?;
    let rhs = series::add(&series::sub(&fab, &fb, order + 1), &z, order + 1);
    push_rows(&mut report, "orthogonal F-identity", &lhs, &rhs);
    Ok(report)
}

/// The subordination identities of the free convolution through the s-free
/// convolution: `F_{a⊞b} = F_a(F_{b⊳a}) = F_b(F_{a⊳b})` and the star form
/// `F_{a⊞b} = F_{a⊳b} + F_{b⊳a} − z`.
pub fn check_subordination(a: &Distribution, b: &Distribution, order: usize) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    let free = free_conv(a, b, order)?.f_series();
    let ba = sfree_conv(b, a, order)?;
    let ab = sfree_conv(a, b, order)?;
    push_rows(&mut report, "free F = F_a(F_{b|>a})", &free, &compose_f(a, &ba, order)?);
    push_rows(&mut report, "free F = F_b(F_{a|>b})", &free, &compose_f(b, &ab, order)?);
    let star = series::sub(&series::add(&ab.f_series(), &ba.f_series(), order + 1), &z_series(order), order + 1);
    push_rows(&mut report, "free F = F_{a|>b} + F_{b|>a} - z", &free, &star);
    Ok(report)
}

/// The variant `F_{a⊞b} = F_a(F_{b⊳a}) + F_b(F_{a⊳b}) − z`. Together with
/// the composition identities it would force `F_{a⊞b} = z`, so it fails for
/// every non-trivial pair; kept to document that.
pub fn check_subordination_sum_variant(a: &Distribution, b: &Distribution, order: usize) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    let free = free_conv(a, b, order)?.f_series();
    let left = compose_f(a, &sfree_conv(b, a, order)?, order)?;
    let right = compose_f(b, &sfree_conv(a, b, order)?, order)?;
    let sum = series::sub(&series::add(&left, &right, order + 1), &z_series(order), order + 1);
    push_rows(&mut report, "free F = F_a(F_{b|>a}) + F_b(F_{a|>b}) - z", &free, &sum);
    Ok(report)
}
