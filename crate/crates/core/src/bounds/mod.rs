//! Exact rational rate bounds and construction rates.
//!
//! Every function returns a reduced [`Rational`]; nothing here touches
//! floating point.

mod compare;
mod program;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::combinatorics::binomial;
use crate::constructions::{be_server_counts, small_s_params};
use crate::error::{Error, Result};
use crate::rational::{from_biguint, integer, ratio, Rational};

pub use compare::{
    compare_with_prior, compare_with_prior_at, Comparison, ComparisonReport, PriorFamily,
};
pub use program::{max_min_program, ProgramCheck, ServerPartition, PROGRAM_MAX_M};

fn range(msg: String) -> Error {
    Error::InvalidParameters(msg)
}

/// Upper bound `2^{s-1} / (2^s - 1)` for one cell per server.
pub fn ub_single_cell(s: u32) -> Result<Rational> {
    if s == 0 {
        return Err(range("single-cell bound needs s >= 1".into()));
    }
    let half = BigInt::one() << (s - 1);
    let full = (BigInt::one() << s) - 1;
    Ok(Rational::new(half, full))
}

/// Lower bound `s / (2s - 1)` achieved when `t = s - 1`.
pub fn lb_t_one_below_s(s: u64) -> Result<Rational> {
    if s < 3 {
        return Err(range(format!(
            "lower bound at t = s - 1 needs s >= 3, got {s}"
        )));
    }
    Ok(ratio(s, 2 * s - 1))
}

/// Asymptotic upper bound `(s + 1) / (2s)` for rational `s > 1`.
pub fn ub_asymptotic(s: &Rational) -> Result<Rational> {
    if *s <= Rational::one() {
        return Err(range(format!("asymptotic bound needs s > 1, got {s}")));
    }
    Ok((s + Rational::one()) / (s * integer(2)))
}

/// Upper bound `((2d+1)t + d²) / ((t+d)(2d+1))` at `s = 1 + d/t`; tight for
/// `d <= t`.
pub fn ub_small_s(t: u64, d: u64) -> Result<Rational> {
    if t < 2 || d < 1 {
        return Err(range(format!(
            "small-s bound needs t >= 2, d >= 1, got t = {t}, d = {d}"
        )));
    }
    Ok(ratio((2 * d + 1) * t + d * d, (t + d) * (2 * d + 1)))
}

/// Upper bound `(d² + 2t² + 3td + 2t) / (2(t+d)(d+t+1))` for `d > t`.
pub fn ub_large_s(t: u64, d: u64) -> Result<Rational> {
    if t < 2 || d <= t {
        return Err(range(format!(
            "large-s bound needs t >= 2 and d > t, got t = {t}, d = {d}"
        )));
    }
    Ok(ratio(
        d * d + 2 * t * t + 3 * t * d + 2 * t,
        2 * (t + d) * (d + t + 1),
    ))
}

/// Whether the large-s bound is strictly below the small-s one at `(t, d)`.
pub fn large_s_bound_improves(t: u64, d: u64) -> Result<bool> {
    Ok(ub_large_s(t, d)? < ub_small_s(t, d)?)
}

/// `(ts + t - 1) / (2ts)` written with `p = ts`: the rate every paired
/// construction strictly exceeds.
pub fn paired_rate_floor(p: u64, t: u64) -> Rational {
    ratio(p + t - 1, 2 * p)
}

/// Singleton (`α`) and non-singleton (`β`) column counts of a construction
/// in which every column missing an item pairs up with another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServerCounts {
    pub p: usize,
    pub t: usize,
    pub singleton: BigUint,
    pub non_singleton: BigUint,
}

impl ServerCounts {
    /// Counts of the modified construction at `p` items: every singleton
    /// server `C(p-t-1, t-1)` times and every server of type `t+1..=p-t+1`
    /// once. Defined for `p >= 2t`.
    pub fn modified(p: usize, t: usize) -> Result<Self> {
        if t < 1 || p < 2 * t {
            return Err(range(format!(
                "modified counts need t >= 1 and p >= 2t, got p = {p}, t = {t}"
            )));
        }
        let (p64, t64) = (p as u64, t as u64);
        let singleton = binomial(p64, t64) * binomial(p64 - t64 - 1, t64 - 1);
        let width = p64 - t64 + 1;
        let types: BigUint = (t64 + 1..=width).map(|j| binomial(width, j)).sum();
        Ok(ServerCounts {
            p,
            t,
            singleton,
            non_singleton: binomial(p64, t64 - 1) * types,
        })
    }

    pub fn m(&self) -> BigUint {
        &self.singleton + &self.non_singleton
    }

    /// `((p+t)α + (p+t-1)β) / (2p)`.
    pub fn k(&self) -> Rational {
        let (p, t) = (self.p as u64, self.t as u64);
        (from_biguint(&self.singleton) * integer(p + t)
            + from_biguint(&self.non_singleton) * integer(p + t - 1))
            / integer(2 * p)
    }

    pub fn rate(&self) -> Rational {
        self.k() / from_biguint(&self.m())
    }
}

/// Rate of the modified construction for integer `s > 2`.
pub fn modified_rate(s: u64, t: u64) -> Result<Rational> {
    if s < 3 || t < 1 {
        return Err(range(format!(
            "modified rate needs integer s > 2, t >= 1, got s = {s}, t = {t}"
        )));
    }
    Ok(ServerCounts::modified((s * t) as usize, t as usize)?.rate())
}

/// Rate of the layered construction for integer `s > 2`.
pub fn be_rate(s: u64, t: u64) -> Result<Rational> {
    Ok(be_server_counts(s as usize, t as usize)?.rate())
}

/// `A / B` where `A` and `B` count the singleton and other columns of the
/// modified construction at `p = 2t + d`.
pub fn ab_ratio(t: u64, d: u64) -> Result<Rational> {
    if t < 2 || d < 1 || d >= t {
        return Err(range(format!(
            "A/B ratio needs 1 <= d <= t - 1, got t = {t}, d = {d}"
        )));
    }
    let a = binomial(2 * t + d, t) * binomial(t + d - 1, t - 1);
    let sum: BigUint = (0..=d).map(|i| binomial(t + d + 1, i)).sum();
    let b = binomial(2 * t + d, t - 1) * sum;
    Ok(from_biguint(&a) / from_biguint(&b))
}

/// `(4t + 2)·C(2t-1, t-1) > 4^t`.
pub fn central_binomial_exceeds_power(t: u64) -> bool {
    assert!(t >= 1, "defined for t >= 1");
    BigUint::from(4 * t + 2) * binomial(2 * t - 1, t - 1) > BigUint::one() << (2 * t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
}

/// One row of a bound table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundValue {
    #[serde(serialize_with = "serialize_fraction")]
    pub value: Rational,
    pub kind: BoundKind,
    pub source: String,
    pub params: String,
}

fn serialize_fraction<S: serde::Serializer>(
    v: &Rational,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&crate::rational::fraction(v))
}

impl BoundValue {
    fn new(value: Rational, kind: BoundKind, source: &str, params: String) -> Self {
        debug_assert!(value > Rational::zero() && value <= Rational::one());
        BoundValue {
            value,
            kind,
            source: source.to_string(),
            params,
        }
    }
}

/// Bounds and construction rates that apply at integer storage ratio `s`.
pub fn catalog_for_s(s: u64) -> Result<Vec<BoundValue>> {
    if s < 1 || s > 63 {
        return Err(range(format!("s must be in 1..=63, got {s}")));
    }
    let mut rows = vec![BoundValue::new(
        ub_single_cell(s as u32)?,
        BoundKind::Upper,
        "single-cell upper bound",
        format!("s={s}, t=1"),
    )];
    if s >= 3 {
        rows.push(BoundValue::new(
            lb_t_one_below_s(s)?,
            BoundKind::Lower,
            "lower bound at t = s-1",
            format!("s={s}, t={}", s - 1),
        ));
    }
    if s >= 2 {
        rows.push(BoundValue::new(
            ub_asymptotic(&integer(s))?,
            BoundKind::Upper,
            "asymptotic upper bound",
            format!("s={s}"),
        ));
    }
    Ok(rows)
}

/// Bounds and construction rates at `p = t + d`, i.e. `s = 1 + d/t`.
pub fn catalog_for_td(t: u64, d: u64) -> Result<Vec<BoundValue>> {
    if t < 2 || d < 1 {
        return Err(range(format!(
            "need t >= 2 and d >= 1, got t = {t}, d = {d}"
        )));
    }
    let p = t + d;
    let params = format!("t={t}, d={d}");
    let mut rows = vec![
        BoundValue::new(
            ub_small_s(t, d)?,
            BoundKind::Upper,
            "small-s upper bound",
            params.clone(),
        ),
        BoundValue::new(
            ub_asymptotic(&ratio(p, t))?,
            BoundKind::Upper,
            "asymptotic upper bound",
            format!("s={}", crate::rational::fraction(&ratio(p, t))),
        ),
    ];
    if d <= t {
        if let Ok(sp) = small_s_params(t as usize, d as usize) {
            rows.push(BoundValue::new(
                ratio(sp.k as u64, sp.m as u64),
                BoundKind::Lower,
                "small-s construction rate",
                format!("{params}, m={}, k={}", sp.m, sp.k),
            ));
        }
    } else {
        rows.push(BoundValue::new(
            ub_large_s(t, d)?,
            BoundKind::Upper,
            "large-s upper bound",
            params.clone(),
        ));
        let counts = ServerCounts::modified(p as usize, t as usize)?;
        rows.push(BoundValue::new(
            counts.rate(),
            BoundKind::Lower,
            "modified construction rate",
            format!("{params}, m={}", counts.m()),
        ));
        if d % t == 0 {
            let s = p / t;
            let counts = be_server_counts(s as usize, t as usize)?;
            rows.push(BoundValue::new(
                counts.rate(),
                BoundKind::Lower,
                "layered construction rate",
                format!("s={s}, t={t}, m={}", counts.m()),
            ));
        }
        for family in PriorFamily::applicable(p, t) {
            rows.push(BoundValue::new(
                family.rate()?,
                BoundKind::Lower,
                "prior construction rate",
                family.to_string(),
            ));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    #[test]
    fn single_cell_values() {
        assert_eq!(ub_single_cell(1).unwrap(), q(1, 1));
        assert_eq!(ub_single_cell(2).unwrap(), q(2, 3));
        assert_eq!(ub_single_cell(3).unwrap(), q(4, 7));
        assert_eq!(ub_single_cell(4).unwrap(), q(8, 15));
        assert!(ub_single_cell(0).is_err());
    }

    #[test]
    fn t_one_below_s_values() {
        assert_eq!(lb_t_one_below_s(3).unwrap(), q(3, 5));
        assert_eq!(lb_t_one_below_s(4).unwrap(), q(4, 7));
        assert!(lb_t_one_below_s(2).is_err());
    }

    #[test]
    fn asymptotic_values() {
        assert_eq!(ub_asymptotic(&integer(2)).unwrap(), q(3, 4));
        assert_eq!(ub_asymptotic(&integer(3)).unwrap(), q(2, 3));
        assert_eq!(ub_asymptotic(&q(3, 2)).unwrap(), q(5, 6));
        assert!(ub_asymptotic(&integer(1)).is_err());
    }

    #[test]
    fn small_s_values() {
        for t in 2..30 {
            assert_eq!(ub_small_s(t, t).unwrap(), ratio(3 * t + 1, 4 * t + 2));
        }
        assert_eq!(ub_small_s(23, 5).unwrap(), q(139, 154));
        assert_eq!(ub_small_s(2, 1).unwrap(), q(7, 9));
        for t in 2..20u64 {
            for d in 1..10u64 {
                let alt = Rational::one() - ratio(d * d + d, (t + d) * (2 * d + 1));
                assert_eq!(ub_small_s(t, d).unwrap(), alt);
            }
        }
        assert!(ub_small_s(1, 1).is_err());
    }

    #[test]
    fn large_s_values() {
        assert_eq!(ub_large_s(2, 4).unwrap(), q(13, 21));
        assert_eq!(ub_large_s(2, 3).unwrap(), q(13, 20));
        assert!(ub_large_s(3, 3).is_err());
    }

    #[test]
    fn improvement_examples() {
        assert_eq!(ub_small_s(2, 4).unwrap(), q(17, 27));
        assert!(large_s_bound_improves(2, 4).unwrap());
        assert!(large_s_bound_improves(2, 3).unwrap());
        assert!(large_s_bound_improves(3, 2).is_err());
    }

    #[test]
    fn modified_counts_and_rates() {
        let c = ServerCounts::modified(6, 2).unwrap();
        assert_eq!(c.m(), BigUint::from(141u32));
        assert_eq!(c.k(), integer(86));
        assert_eq!(modified_rate(3, 2).unwrap(), q(86, 141));
        let c = ServerCounts::modified(8, 2).unwrap();
        assert_eq!(c.m(), BigUint::from(932u32));
        assert!(c.k().is_integer());
        assert_eq!(modified_rate(3, 1).unwrap(), q(4, 7));
        assert!(modified_rate(2, 2).is_err());
    }

    #[test]
    fn modified_k_is_integral() {
        for s in 3..6 {
            for t in 1..6 {
                let c = ServerCounts::modified(s * t, t).unwrap();
                assert!(c.k().is_integer(), "s={s} t={t}");
            }
        }
    }

    #[test]
    fn be_rates() {
        assert_eq!(be_rate(3, 2).unwrap(), q(79, 129));
        let r = be_rate(4, 2).unwrap();
        assert_eq!(r, q(1221, 2124));
    }

    #[test]
    fn single_item_per_cell_rates_meet_the_single_cell_bound() {
        for s in 3..8u64 {
            assert_eq!(
                modified_rate(s, 1).unwrap(),
                ub_single_cell(s as u32).unwrap()
            );
            assert_eq!(be_rate(s, 1).unwrap(), ub_single_cell(s as u32).unwrap());
        }
    }

    #[test]
    fn ab_ratio_bounds() {
        for t in 2..25u64 {
            for d in 1..t {
                let r = ab_ratio(t, d).unwrap();
                assert!(r > ratio(1, t + d), "t={t} d={d}");
                // The sharper (t+1)/(d(t+d)) estimate holds only from d = 2 on;
                // at d = 1 the binomial sum is t + 3, not at most t + 2.
                assert_eq!(r >= ratio(t + 1, d * (t + d)), d >= 2, "t={t} d={d}");
            }
        }
        assert!(ab_ratio(3, 3).is_err());
    }

    #[test]
    fn ab_ratio_matches_counts() {
        for t in 2..8usize {
            for d in 1..t {
                let c = ServerCounts::modified(2 * t + d, t).unwrap();
                let direct = from_biguint(&c.singleton) / from_biguint(&c.non_singleton);
                assert_eq!(ab_ratio(t as u64, d as u64).unwrap(), direct);
            }
        }
    }

    #[test]
    fn central_binomial_inequality() {
        for t in 1..=20 {
            assert!(central_binomial_exceeds_power(t));
        }
    }

    #[test]
    fn catalogs() {
        let rows = catalog_for_s(4).unwrap();
        assert_eq!(rows[0].value, q(8, 15));
        assert_eq!(rows.len(), 3);
        let rows = catalog_for_td(23, 5).unwrap();
        assert!(rows.iter().filter(|r| r.value == q(139, 154)).count() == 2);
        let rows = catalog_for_td(2, 4).unwrap();
        assert!(rows.iter().any(|r| r.value == q(13, 21)));
        assert!(rows.iter().any(|r| r.value == q(86, 141)));
        assert!(rows.iter().any(|r| r.value == q(79, 129)));
        assert!(catalog_for_td(1, 1).is_err());
        assert!(catalog_for_s(0).is_err());
    }

    #[test]
    fn catalog_values_are_rates() {
        for t in 2..8 {
            for d in 1..12 {
                for row in catalog_for_td(t, d).unwrap() {
                    assert!(row.value > Rational::zero() && row.value <= Rational::one());
                }
            }
        }
    }
}
