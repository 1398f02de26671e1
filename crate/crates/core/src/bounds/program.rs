//! Exhaustive check of the max–min program behind the large-s bound.
//!
//! Servers fall into four classes with counts `l, r, u, w` summing to `m`.
//! Two ways of counting `Σ k_i` give
//!
//! ```text
//! F = l(p+t)/2  + r(p+t-1)/2   + u(p+t-1)/2 + w(p+t-2)/2
//! G = l(p+3t)/4 + r(2p+3t-1)/4 + u(p+t-1)/2 + w(3p+t-2)/4
//! ```
//!
//! and `Σ k_i <= min{F, G}`. The continuous optimum is
//! `m(p² + tp + 2t) / (2(p+1))`, reached at `u = w = 0`,
//! `l = m(t+1)/(p+1)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{ratio, Rational};

/// Largest `m` the enumeration accepts.
pub const PROGRAM_MAX_M: u64 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ServerPartition {
    pub l: u64,
    pub r: u64,
    pub u: u64,
    pub w: u64,
}

impl ServerPartition {
    pub fn m(&self) -> u64 {
        self.l + self.r + self.u + self.w
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramCheck {
    pub t: u64,
    pub d: u64,
    pub m: u64,
    /// Integer-point maximum of `min{F, G}`.
    pub best: Rational,
    /// An optimal partition; among optima, the one with smallest `(u, w)`
    /// and then largest `l`.
    pub argmax: ServerPartition,
    pub continuous_optimum: Rational,
    /// Some optimal partition has `u = 0`.
    pub optimum_with_u_zero: bool,
    /// Some optimal partition has `u = w = 0`.
    pub optimum_with_u_w_zero: bool,
}

impl ProgramCheck {
    /// `best / (p·m)`, comparable with the large-s bound.
    pub fn normalized(&self) -> Rational {
        &self.best / Rational::from_integer(((self.t + self.d) * self.m).into())
    }
}

/// `(4F, 4G)` in integers.
fn objectives(p: u64, t: u64, x: &ServerPartition) -> (u128, u128) {
    let (p, t) = (p as u128, t as u128);
    let (l, r, u, w) = (x.l as u128, x.r as u128, x.u as u128, x.w as u128);
    let f = 2 * l * (p + t) + 2 * r * (p + t - 1) + 2 * u * (p + t - 1) + 2 * w * (p + t - 2);
    let g = l * (p + 3 * t) + r * (2 * p + 3 * t - 1) + 2 * u * (p + t - 1) + w * (3 * p + t - 2);
    (f, g)
}

/// Maximizes `min{F, G}` over every partition of `m` and checks it against
/// the continuous optimum. Fails if the integer optimum exceeds the
/// continuous one or if no optimum has `u = 0`.
pub fn max_min_program(t: u64, d: u64, m: u64) -> Result<ProgramCheck> {
    if t < 2 || d <= t {
        return Err(Error::InvalidParameters(format!(
            "max-min program needs t >= 2 and d > t, got t = {t}, d = {d}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidParameters(
            "max-min program needs m >= 1".into(),
        ));
    }
    if m > PROGRAM_MAX_M {
        return Err(Error::CapExceeded {
            what: "program size m",
            value: m as usize,
            cap: PROGRAM_MAX_M as usize,
        });
    }
    let p = t + d;

    let mut best = 0u128;
    let mut optima: Vec<ServerPartition> = Vec::new();
    for l in 0..=m {
        for r in 0..=m - l {
            for u in 0..=m - l - r {
                let x = ServerPartition {
                    l,
                    r,
                    u,
                    w: m - l - r - u,
                };
                let (f, g) = objectives(p, t, &x);
                let v = f.min(g);
                if v > best {
                    best = v;
                    optima.clear();
                }
                if v == best {
                    optima.push(x);
                }
            }
        }
    }
    let argmax = *optima
        .iter()
        .min_by_key(|x| (x.u, x.w, std::cmp::Reverse(x.l)))
        .expect("m >= 1 gives at least one partition");

    let best = ratio(best as u64, 4u64);
    let continuous_optimum = ratio(m * (p * p + t * p + 2 * t), 2 * (p + 1));
    let check = ProgramCheck {
        t,
        d,
        m,
        best,
        argmax,
        continuous_optimum,
        optimum_with_u_zero: optima.iter().any(|x| x.u == 0),
        optimum_with_u_w_zero: optima.iter().any(|x| x.u == 0 && x.w == 0),
    };
    if check.best > check.continuous_optimum {
        return Err(Error::Internal(format!(
            "integer optimum {} exceeds continuous optimum {}",
            check.best, check.continuous_optimum
        )));
    }
    if !check.optimum_with_u_zero {
        return Err(Error::Internal("no optimal partition has u = 0".into()));
    }
    Ok(check)
}
