//! Jacobi parameters (α, ω) and their exchange with moment sequences.

use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q, Q};
use crate::series;
use crate::transforms::{Distribution, MomentSeq};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// How the sequences continue past the stored entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    /// The continued fraction stops: the Jacobi matrix has `alpha.len()` rows.
    Finite,
    /// Only a prefix is known.
    Truncated,
    /// Entries `preperiod..preperiod + period` repeat forever.
    Periodic { preperiod: usize, period: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiParams {
    alpha: Vec<Q>,
    omega: Vec<Q>,
    tail: Tail,
}

fn check_omega(omega: &[Q]) -> Result<()> {
    match omega.iter().position(Signed::is_negative) {
        Some(index) => Err(Error::NegativeOmega {
            index,
            value: format_q(&omega[index]),
        }),
        None => Ok(()),
    }
}

impl JacobiParams {
    /// Finite Jacobi matrix; cut at the first zero ω.
    pub fn finite(mut alpha: Vec<Q>, mut omega: Vec<Q>) -> Result<Self> {
        check_omega(&omega)?;
        if alpha.is_empty() || alpha.len() != omega.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "finite Jacobi data needs len(alpha) = len(omega) + 1, got {} and {}",
                alpha.len(),
                omega.len()
            )));
        }
        if let Some(z) = omega.iter().position(Zero::is_zero) {
            omega.truncate(z);
            alpha.truncate(z + 1);
        }
        Ok(JacobiParams {
            alpha,
            omega,
            tail: Tail::Finite,
        })
    }

    /// Known prefix of an unknown continuation.
    pub fn truncated(alpha: Vec<Q>, omega: Vec<Q>) -> Result<Self> {
        check_omega(&omega)?;
        if alpha.len() != omega.len() && alpha.len() != omega.len() + 1 {
            return Err(Error::InvalidParameter("truncated Jacobi data has mismatched lengths".into()));
        }
        if omega.iter().any(Zero::is_zero) {
            let z = omega.iter().position(Zero::is_zero).unwrap_or(0);
            let mut alpha = alpha;
            let mut omega = omega;
            omega.truncate(z);
            alpha.truncate(z + 1);
            return JacobiParams::finite(alpha, omega);
        }
        Ok(JacobiParams {
            alpha,
            omega,
            tail: Tail::Truncated,
        })
    }

    /// Eventually periodic data: entries past `preperiod + period` are
    /// dropped; the cycle must have positive ω.
    pub fn periodic(mut alpha: Vec<Q>, mut omega: Vec<Q>, preperiod: usize, period: usize) -> Result<Self> {
        check_omega(&omega)?;
        let len = preperiod + period;
        if period == 0 || alpha.len() < len || omega.len() < len {
            return Err(Error::InvalidParameter(format!(
                "periodic Jacobi data needs {len} entries of alpha and omega"
            )));
        }
        alpha.truncate(len);
        omega.truncate(len);
        if omega.iter().any(Zero::is_zero) {
            return Err(Error::InvalidParameter("periodic Jacobi data must have positive omega".into()));
        }
        Ok(JacobiParams {
            alpha,
            omega,
            tail: Tail::Periodic { preperiod, period },
        })
    }

    pub fn alpha(&self) -> &[Q] {
        &self.alpha
    }

    pub fn omega(&self) -> &[Q] {
        &self.omega
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    fn cycled(&self, n: usize) -> usize {
        match self.tail {
            Tail::Periodic { preperiod, period } if n >= preperiod => preperiod + (n - preperiod) % period,
            _ => n,
        }
    }

    /// α_n, or `None` past the known prefix of truncated data.
    pub fn alpha_at(&self, n: usize) -> Option<Q> {
        let i = self.cycled(n);
        match self.alpha.get(i) {
            Some(a) => Some(a.clone()),
            None if self.tail == Tail::Finite => Some(Q::zero()),
            None => None,
        }
    }

    pub fn omega_at(&self, n: usize) -> Option<Q> {
        let i = self.cycled(n);
        match self.omega.get(i) {
            Some(w) => Some(w.clone()),
            None if self.tail == Tail::Finite => Some(Q::zero()),
            None => None,
        }
    }

    /// Number of diagonal entries used when the data is read as a finite
    /// Jacobi matrix (finite and truncated data).
    pub fn matrix_size(&self) -> usize {
        match self.tail {
            Tail::Finite => self.alpha.len(),
            _ => self.alpha.len().min(self.omega.len() + 1),
        }
    }

    pub fn to_json(&self) -> JacobiJson {
        JacobiJson {
            alpha: self.alpha.iter().map(format_q).collect(),
            omega: self.omega.iter().map(format_q).collect(),
            tail: match self.tail {
                Tail::Periodic { preperiod, period } => Some(TailJson { preperiod, period }),
                _ => None,
            },
            truncated: self.tail == Tail::Truncated,
        }
    }

    pub fn from_json(json: &JacobiJson) -> Result<Self> {
        let parse = |v: &[String]| -> Result<Vec<Q>> {
            v.iter()
                .map(|s| parse_q(s).ok_or_else(|| Error::InvalidParameter(format!("bad rational {s:?}"))))
                .collect()
        };
        let alpha = parse(&json.alpha)?;
        let mut omega = parse(&json.omega)?;
        match json.tail {
            Some(TailJson { preperiod, period }) => JacobiParams::periodic(alpha, omega, preperiod, period),
            None if json.truncated => JacobiParams::truncated(alpha, omega),
            None => {
                // trailing zero ω marks termination explicitly
                if omega.len() >= alpha.len() {
                    omega.truncate(alpha.len().saturating_sub(1));
                }
                JacobiParams::finite(alpha, omega)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TailJson {
    pub preperiod: usize,
    pub period: usize,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct JacobiJson {
    pub alpha: Vec<String>,
    pub omega: Vec<String>,
    pub tail: Option<TailJson>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub truncated: bool,
}

/// Peels the J-fraction `M = 1/(1 − α₀t − ω₀t²M')` level by level.
pub fn moments_to_jacobi(d: &Distribution) -> Result<JacobiParams> {
    let mut current: Vec<Q> = d.moments().coeffs().to_vec();
    let mut alpha = Vec::new();
    let mut omega = Vec::new();
    loop {
        let len = current.len();
        if len < 2 {
            break;
        }
        let inv = series::inv(&current, len);
        let p: Vec<Q> = inv.iter().enumerate().map(|(i, c)| if i == 0 { Q::zero() } else { -c.clone() }).collect();
        alpha.push(p[1].clone());
        if len < 3 {
            break;
        }
        let w = p[2].clone();
        if w.is_negative() {
            return Err(Error::NegativeOmega {
                index: omega.len(),
                value: format_q(&w),
            });
        }
        if w.is_zero() {
            if p[3..].iter().any(|c| !c.is_zero()) {
                return Err(Error::InconsistentTermination { index: omega.len() });
            }
            return JacobiParams::finite(alpha, omega);
        }
        let next: Vec<Q> = p[2..].iter().map(|c| c / &w).collect();
        omega.push(w);
        current = next;
    }
    JacobiParams::truncated(alpha, omega)
}

/// Moments M_0..M_order from the continued fraction, evaluated bottom-up.
pub fn jacobi_to_moments(j: &JacobiParams, order: usize) -> Result<MomentSeq> {
    let len = order + 1;
    let depth = order / 2 + 1;
    let mut level = depth;
    if j.tail() == Tail::Finite {
        level = level.min(j.alpha().len());
    }
    let mut below = vec![Q::one()];
    for k in (0..level).rev() {
        let need_alpha = 2 * k < order;
        let need_omega = 2 * k + 1 < order;
        let a = if need_alpha { j.alpha_at(k) } else { Some(Q::zero()) };
        let w = if need_omega { j.omega_at(k) } else { Some(Q::zero()) };
        let (Some(a), Some(w)) = (a, w) else {
            return Err(Error::OrderTooHigh {
                requested: order,
                available: 2 * k,
            });
        };
        let mut denom = vec![Q::zero(); len];
        denom[0] = Q::one();
        if len > 1 {
            denom[1] = -a;
        }
        let tail = series::scale(&series::shift(&below, 2, len), &w);
        let denom = series::sub(&denom, &tail, len);
        below = series::inv(&denom, len);
    }
    below.resize(len, Q::zero());
    MomentSeq::new(below)
}
