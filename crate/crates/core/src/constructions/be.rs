//! The layered construction for integer `s`.
//!
//! Layer `T_r` (`1 <= r <= s`) holds every server of type `(r-1)t + 1`:
//! `t - 1` singleton cells and a sum over `(r-1)t + 1` of the remaining
//! items (`T_1` is every singleton server). Layer `T_r` is repeated `η_r`
//! times. For an item `i`, graph `G_r` joins a copy of a `T_r` server not
//! touching `i` to a copy of a `T_{r+1}` server summing `i` when the former's
//! `rt` items are exactly the latter's summands other than `i`. The `η_r`
//! make every `G_r` biregular with equal sides, hence perfectly matchable.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::bounds::ServerCounts;
use crate::code::{ArrayCode, Witness};
use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::matching::{is_perfect, max_matching, BipartiteGraph};
use crate::rational::Rational;

use super::layout::{pair, Layout, ServerSpec};
use super::BuildOptions;

/// Layer multiplicities `η_1..η_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeMultiplicities {
    pub s: usize,
    pub t: usize,
    pub etas: Vec<BigUint>,
}

fn check_params(s: usize, t: usize) -> Result<()> {
    if s < 3 || t < 1 {
        return Err(Error::InvalidParameters(format!(
            "layered construction needs integer s >= 3 and t >= 1, got s = {s}, t = {t}"
        )));
    }
    Ok(())
}

/// The smallest positive integers with `η_1 : η_2 = C(p-t-1, t-1) : 1` and
/// `η_r : η_{r+1} = C(p-rt-1, t-1) : C(rt, t-1)` for `2 <= r < s`.
pub fn be_multiplicities(s: usize, t: usize) -> Result<BeMultiplicities> {
    check_params(s, t)?;
    let p = (s * t) as u64;
    let t64 = t as u64;
    let mut rel = vec![Rational::one()];
    for r in 1..s as u64 {
        let (left, right) = if r == 1 {
            (binomial(p - t64 - 1, t64 - 1), BigUint::one())
        } else {
            (
                binomial(p - r * t64 - 1, t64 - 1),
                binomial(r * t64, t64 - 1),
            )
        };
        let prev = rel.last().unwrap().clone();
        rel.push(prev * Rational::new(BigInt::from(right), BigInt::from(left)));
    }
    let lcm = rel.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = rel
        .iter()
        .map(|x| (x * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let etas = scaled
        .into_iter()
        .map(|x| (x / &g).to_biguint().expect("positive"))
        .collect();
    Ok(BeMultiplicities { s, t, etas })
}

/// `|T_r|`: C(p, t) for r = 1, C(p, t-1)·C(p-t+1, (r-1)t+1) otherwise.
fn layer_size(p: u64, t: u64, r: u64) -> BigUint {
    if r == 1 {
        binomial(p, t)
    } else {
        binomial(p, t - 1) * binomial(p - t + 1, (r - 1) * t + 1)
    }
}

/// Singleton and non-singleton column counts of the layered construction.
pub fn be_server_counts(s: usize, t: usize) -> Result<ServerCounts> {
    let etas = be_multiplicities(s, t)?;
    let (p, t64) = ((s * t) as u64, t as u64);
    let singleton = &etas.etas[0] * layer_size(p, t64, 1);
    let non_singleton = (2..=s as u64)
        .map(|r| &etas.etas[r as usize - 1] * layer_size(p, t64, r))
        .sum();
    Ok(ServerCounts {
        p: s * t,
        t,
        singleton,
        non_singleton,
    })
}

pub fn construct_be(s: usize, t: usize, opts: &BuildOptions) -> Result<(ArrayCode, Witness)> {
    let counts = be_server_counts(s, t)?;
    opts.guard(&counts.m())?;
    let etas: Vec<usize> = be_multiplicities(s, t)?
        .etas
        .iter()
        .map(|e| e.to_usize().expect("bounded by the size guard"))
        .collect();
    let p = s * t;

    let mut distinct = Vec::new();
    for y in (0..p).combinations(t) {
        distinct.push((ServerSpec::singleton(y), etas[0]));
    }
    for r in 2..=s {
        let width = (r - 1) * t + 1;
        for z in (0..p).combinations(t - 1) {
            let rest: Vec<usize> = (0..p).filter(|x| z.binary_search(x).is_err()).collect();
            for sum in rest.into_iter().combinations(width) {
                distinct.push((ServerSpec::with_sum(z.clone(), sum), etas[r - 1]));
            }
        }
    }
    let layout = Layout::new(distinct);
    let code = layout.build_code(opts.field, t, p)?;

    let items = (0..p)
        .into_par_iter()
        .map(|i| item_subsets(&layout, s, t, i))
        .collect::<Result<Vec<_>>>()?;
    Ok((code, Witness::new(items)))
}

/// Layer index of a column: 1 for singleton servers, else from the sum width.
fn layer_of(spec: &ServerSpec, t: usize) -> usize {
    if spec.is_singleton() {
        1
    } else {
        (spec.sum.len() - 1) / t + 1
    }
}

fn item_subsets(layout: &Layout, s: usize, t: usize, item: usize) -> Result<Vec<Vec<usize>>> {
    let mut subsets = layout.singleton_subsets(item);
    let mut lower: Vec<Vec<usize>> = vec![Vec::new(); s + 1];
    let mut upper: Vec<Vec<usize>> = vec![Vec::new(); s + 1];
    for (j, spec) in layout.specs.iter().enumerate() {
        if spec.has_singleton(item) {
            continue;
        }
        let r = layer_of(spec, t);
        if spec.sums(item) {
            upper[r].push(j);
        } else {
            lower[r].push(j);
        }
    }

    for r in 1..s {
        let left = &lower[r];
        let right = &upper[r + 1];
        let mut by_key: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (v, &col) in right.iter().enumerate() {
            let key: Vec<usize> = layout.specs[col]
                .sum
                .iter()
                .copied()
                .filter(|&x| x != item)
                .collect();
            by_key.entry(key).or_default().push(v);
        }
        let mut graph = BipartiteGraph::new(left.len(), right.len());
        for (u, &col) in left.iter().enumerate() {
            if let Some(vs) = by_key.get(&layout.specs[col].all_items()) {
                for &v in vs {
                    graph.add_edge(u, v)?;
                }
            }
        }
        graph.finish();
        let matching = max_matching(&graph);
        if !is_perfect(&graph, &matching) {
            return Err(Error::Internal(format!(
                "layer graph {r} for item {item} has no perfect matching ({} of {}x{})",
                matching.len(),
                left.len(),
                right.len()
            )));
        }
        subsets.extend(
            matching
                .pairs()
                .iter()
                .map(|&(u, v)| pair(left[u], right[v])),
        );
    }
    if !lower[s].is_empty() {
        return Err(Error::Internal("top layer server misses the item".into()));
    }
    Ok(subsets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn etas(s: usize, t: usize) -> Vec<u64> {
        be_multiplicities(s, t)
            .unwrap()
            .etas
            .iter()
            .map(|e| e.to_u64().unwrap())
            .collect()
    }

    #[test]
    fn s3_t2_chain() {
        // η₁:η₂ = C(3,1):1 = 3:1 and η₂:η₃ = C(1,1):C(4,1) = 1:4.
        assert_eq!(etas(3, 2), vec![3, 1, 4]);
    }

    #[test]
    fn s3_general_ratios() {
        for t in 1..=6u64 {
            let e = etas(3, t as usize);
            let b = |n, k| binomial(n, k).to_u64().unwrap();
            assert_eq!(e[0] * 1, e[1] * b(2 * t - 1, t - 1));
            assert_eq!(e[1] * b(2 * t, t - 1), e[2] * b(t - 1, t - 1));
        }
    }

    #[test]
    fn s4_matches_closed_form_after_gcd_reduction() {
        for t in 1..=7u64 {
            let b = |n, k| binomial(n, k).to_u64().unwrap();
            let closed_form = [
                (t + 1) * b(3 * t - 1, t - 1),
                t + 1,
                2 * t,
                2 * t * b(3 * t, t - 1),
            ];
            let g = closed_form.iter().fold(0u64, |acc, &x| acc.gcd(&x));
            let reduced: Vec<u64> = closed_form.iter().map(|x| x / g).collect();
            assert_eq!(etas(4, t as usize), reduced, "t = {t}");
        }
    }

    #[test]
    fn column_counts() {
        assert_eq!(
            be_server_counts(3, 2).unwrap().m(),
            BigUint::from(45u32 + 60 + 24)
        );
        // η = (15, 3, 4, 24): 28·15 + 280·3 + 168·4 + 8·24.
        assert_eq!(be_server_counts(4, 2).unwrap().m(), BigUint::from(2124u32));
    }

    #[test]
    fn rejects_small_s() {
        assert!(be_multiplicities(2, 3).is_err());
        assert!(construct_be(2, 3, &BuildOptions::default()).is_err());
    }

    #[test]
    fn size_guard_reports_without_building() {
        let opts = BuildOptions::default().with_max_columns(1000);
        match construct_be(4, 2, &opts) {
            Err(Error::SizeGuard { required, limit }) => {
                assert_eq!(required, BigUint::from(2124u32));
                assert_eq!(limit, 1000);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
