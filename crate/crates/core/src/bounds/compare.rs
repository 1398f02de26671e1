use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{ratio, Rational};

use super::{be_rate, paired_rate_floor, ub_large_s, ServerCounts};

/// Earlier constructions known only through their rate formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PriorFamily {
    /// `p = rt - (r-2)r - 1`, `3 <= r <= t`.
    Quadratic { r: u64, t: u64 },
    /// `p = rt + d`, `r >= 2`, `t >= r`, `1 <= d <= t-1`.
    Fractional { r: u64, t: u64, d: u64 },
    /// Integer `s > 2` with `t >= s`.
    Integral { s: u64, t: u64 },
    /// Integer `s > 2` with `(s-1)t = lb` and `l + b <= t`.
    Factored { s: u64, t: u64, l: u64, b: u64 },
}

fn range(msg: String) -> Error {
    Error::InvalidParameters(msg)
}

impl PriorFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PriorFamily::Quadratic { r, t } if (3..=t).contains(&r) => Ok(()),
            PriorFamily::Fractional { r, t, d } if r >= 2 && t >= r && d >= 1 && d < t => Ok(()),
            PriorFamily::Integral { s, t } if s > 2 && t >= s => Ok(()),
            PriorFamily::Factored { s, t, l, b }
                if s > 2 && l >= 1 && b >= 1 && l * b == (s - 1) * t && l + b <= t =>
            {
                Ok(())
            }
            other => Err(range(format!("parameters out of range for {other}"))),
        }
    }

    /// Number of items `p`.
    pub fn p(&self) -> u64 {
        match *self {
            PriorFamily::Quadratic { r, t } => r * t + 2 * r - r * r - 1,
            PriorFamily::Fractional { r, t, d } => r * t + d,
            PriorFamily::Integral { s, t } | PriorFamily::Factored { s, t, .. } => s * t,
        }
    }

    pub fn t(&self) -> u64 {
        match *self {
            PriorFamily::Quadratic { t, .. }
            | PriorFamily::Fractional { t, .. }
            | PriorFamily::Integral { t, .. }
            | PriorFamily::Factored { t, .. } => t,
        }
    }

    pub fn rate(&self) -> Result<Rational> {
        self.validate()?;
        let half = ratio(1, 2);
        Ok(match *self {
            PriorFamily::Quadratic { r, t } => half + ratio(t - r + 1, 2 * self.p()),
            PriorFamily::Fractional { r, t, d } => {
                let p = r * t + d;
                Rational::one() - ratio((p - t + r) * (p - t), p * (2 * p - 2 * t + r))
            }
            PriorFamily::Integral { s, t } => ratio(s * t + t + 1, s * (2 * t + 1)),
            PriorFamily::Factored { s, t, l, .. } => ratio(s + 1, 2 * s) - ratio(l, 2 * s * t),
        })
    }

    /// Every family instance whose parameters give `p` items of `t` cells.
    pub fn applicable(p: u64, t: u64) -> Vec<PriorFamily> {
        let mut out = Vec::new();
        for r in 3..=t {
            if r * t + 2 * r >= r * r + 1 && r * t + 2 * r - r * r - 1 == p {
                out.push(PriorFamily::Quadratic { r, t });
            }
        }
        if t >= 2 {
            let (r, d) = (p / t, p % t);
            if r >= 2 && t >= r && d >= 1 {
                out.push(PriorFamily::Fractional { r, t, d });
            }
        }
        if t >= 1 && p % t == 0 {
            let s = p / t;
            if s > 2 && t >= s {
                out.push(PriorFamily::Integral { s, t });
            }
            if s > 2 {
                let n = (s - 1) * t;
                for l in 1..=n {
                    if n % l == 0 && l + n / l <= t {
                        out.push(PriorFamily::Factored { s, t, l, b: n / l });
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for PriorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PriorFamily::Quadratic { r, t } => write!(f, "quadratic(r={r}, t={t})"),
            PriorFamily::Fractional { r, t, d } => write!(f, "fractional(r={r}, t={t}, d={d})"),
            PriorFamily::Integral { s, t } => write!(f, "integral(s={s}, t={t})"),
            PriorFamily::Factored { s, t, l, b } => {
                write!(f, "factored(s={s}, t={t}, l={l}, b={b})")
            }
        }
    }
}

/// One strict-inequality check between a construction rate and a prior one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub family: PriorFamily,
    pub prior_rate: Rational,
    /// `modified rate - prior rate`; positive means strictly better.
    pub margin: Rational,
}

impl Comparison {
    pub fn is_strict(&self) -> bool {
        self.margin > Rational::zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonReport {
    pub p: u64,
    pub t: u64,
    pub modified_rate: Rational,
    /// `(p + t - 1) / (2p)`, strictly below every paired construction.
    pub floor: Rational,
    /// Layered construction rate, when `t` divides `p`.
    pub be_rate: Option<Rational>,
    /// Large-s upper bound at `d = p - t`, when `t >= 2`.
    pub upper: Option<Rational>,
    /// Whether the large-s bound beats the small-s bound here.
    pub upper_improves: Option<bool>,
    pub comparisons: Vec<Comparison>,
    pub notes: Vec<String>,
}

impl ComparisonReport {
    /// Every strict inequality the report covers holds: each prior rate is
    /// beaten, the construction sits strictly between floor and upper
    /// bound, and the large-s bound improves on the small-s bound.
    pub fn all_strict(&self) -> bool {
        self.comparisons.iter().all(Comparison::is_strict)
            && self.modified_rate > self.floor
            && self
                .upper
                .as_ref()
                .map_or(true, |u| self.modified_rate < *u)
            && self.upper_improves.unwrap_or(true)
    }
}

/// Compares the modified construction at `p` items of `t` cells with every
/// applicable prior family. Requires `p > 2t`.
pub fn compare_with_prior_at(p: u64, t: u64) -> Result<ComparisonReport> {
    if t < 1 || p <= 2 * t {
        return Err(range(format!(
            "comparisons are defined for s > 2, got p = {p}, t = {t}"
        )));
    }
    let modified_rate = ServerCounts::modified(p as usize, t as usize)?.rate();
    let mut notes = Vec::new();

    let be = if p % t == 0 {
        Some(be_rate(p / t, t)?)
    } else {
        notes.push("layered construction needs integer s".to_string());
        None
    };
    let (upper, upper_improves) = if t >= 2 {
        (
            Some(ub_large_s(t, p - t)?),
            Some(super::large_s_bound_improves(t, p - t)?),
        )
    } else {
        notes.push("large-s bound needs t >= 2".to_string());
        (None, None)
    };

    let families = PriorFamily::applicable(p, t);
    for (name, present) in [
        (
            "quadratic",
            families
                .iter()
                .any(|f| matches!(f, PriorFamily::Quadratic { .. })),
        ),
        (
            "fractional",
            families
                .iter()
                .any(|f| matches!(f, PriorFamily::Fractional { .. })),
        ),
        (
            "integral",
            families
                .iter()
                .any(|f| matches!(f, PriorFamily::Integral { .. })),
        ),
        (
            "factored",
            families
                .iter()
                .any(|f| matches!(f, PriorFamily::Factored { .. })),
        ),
    ] {
        if !present {
            notes.push(format!("{name} family does not apply at p={p}, t={t}"));
        }
    }
    let comparisons = families
        .into_iter()
        .map(|family| {
            let prior_rate = family.rate()?;
            Ok(Comparison {
                family,
                margin: &modified_rate - &prior_rate,
                prior_rate,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ComparisonReport {
        p,
        t,
        floor: paired_rate_floor(p, t),
        modified_rate,
        be_rate: be,
        upper,
        upper_improves,
        comparisons,
        notes,
    })
}

/// [`compare_with_prior_at`] for integer `s > 2`.
pub fn compare_with_prior(s: u64, t: u64) -> Result<ComparisonReport> {
    if s <= 2 {
        return Err(range(format!(
            "comparisons are defined for s > 2, got s = {s}"
        )));
    }
    compare_with_prior_at(s * t, t)
}
