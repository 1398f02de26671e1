//! Every singleton server `δ = C(p-t-1, t-1)` times, plus every server of
//! type `j` for `t+1 <= j <= p-t+1` exactly once.
//!
//! Pairing for item `i`: a copy of singleton server `Y` (with `i ∉ Y`) goes
//! with a type-`(t+1)` server summing `{i} ∪ Y`; there are exactly `δ` of
//! those, one per choice of singleton cells. A type-`j` server `(Z, S)` not
//! touching `i` goes with `(Z, S ∪ {i})`.

use itertools::Itertools;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::bounds::ServerCounts;
use crate::code::{ArrayCode, Witness};
use crate::combinatorics::binomial;
use crate::error::{Error, Result};

use super::layout::{pair, Layout, ServerSpec};
use super::BuildOptions;

fn check_params(s: usize, t: usize) -> Result<()> {
    if s < 3 || t < 1 {
        return Err(Error::InvalidParameters(format!(
            "modified construction needs integer s >= 3 and t >= 1, got s = {s}, t = {t}"
        )));
    }
    Ok(())
}

/// Closed-form column counts for the modified construction at `p = st`.
pub fn modified_server_counts(s: usize, t: usize) -> Result<ServerCounts> {
    check_params(s, t)?;
    ServerCounts::modified(s * t, t)
}

pub fn construct_modified(s: usize, t: usize, opts: &BuildOptions) -> Result<(ArrayCode, Witness)> {
    let counts = modified_server_counts(s, t)?;
    opts.guard(&counts.m())?;
    let p = s * t;
    let delta = binomial((p - t - 1) as u64, (t - 1) as u64)
        .to_usize()
        .expect("bounded by the size guard");

    let mut distinct = Vec::new();
    for y in (0..p).combinations(t) {
        distinct.push((ServerSpec::singleton(y), delta));
    }
    for z in (0..p).combinations(t - 1) {
        let rest: Vec<usize> = (0..p).filter(|x| z.binary_search(x).is_err()).collect();
        for j in t + 1..=p - t + 1 {
            for sum in rest.iter().copied().combinations(j) {
                distinct.push((ServerSpec::with_sum(z.clone(), sum), 1));
            }
        }
    }
    let layout = Layout::new(distinct);
    let code = layout.build_code(opts.field, t, p)?;

    let items = (0..p)
        .into_par_iter()
        .map(|i| item_subsets(&layout, p, t, i))
        .collect::<Result<Vec<_>>>()?;
    Ok((code, Witness::new(items)))
}

fn item_subsets(layout: &Layout, p: usize, t: usize, item: usize) -> Result<Vec<Vec<usize>>> {
    let mut subsets = layout.singleton_subsets(item);
    let missing = |what: String| Error::Internal(format!("item {item}: no partner for {what}"));

    let mut j = 0;
    while j < layout.len() {
        let spec = &layout.specs[j];
        let copies = layout.columns_of(spec).expect("spec from layout");
        let touches = spec.has_singleton(item) || spec.sums(item);
        if spec.is_singleton() && !touches {
            let mut sum = spec.singletons.clone();
            sum.push(item);
            sum.sort_unstable();
            let others: Vec<usize> = (0..p).filter(|x| sum.binary_search(x).is_err()).collect();
            let partners = others
                .into_iter()
                .combinations(t - 1)
                .map(|z| ServerSpec::with_sum(z, sum.clone()));
            let mut count = 0;
            for (copy, partner) in copies.clone().zip(partners) {
                let col = layout
                    .columns_of(&partner)
                    .ok_or_else(|| missing(format!("{spec:?}")))?
                    .start;
                subsets.push(pair(copy, col));
                count += 1;
            }
            if count != copies.len() {
                return Err(missing(format!("copies of {spec:?}")));
            }
        } else if !spec.is_singleton() && !touches && spec.sum.len() < p - t + 1 {
            let mut sum = spec.sum.clone();
            sum.push(item);
            let partner = ServerSpec::with_sum(spec.singletons.clone(), sum);
            let col = layout
                .columns_of(&partner)
                .ok_or_else(|| missing(format!("{spec:?}")))?
                .start;
            for copy in copies.clone() {
                subsets.push(pair(copy, col));
            }
        }
        j = copies.end;
    }
    Ok(subsets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::Zero;

    #[test]
    fn closed_form_counts() {
        assert_eq!(
            modified_server_counts(3, 2).unwrap().m(),
            BigUint::from(141u32)
        );
        assert_eq!(
            modified_server_counts(4, 2).unwrap().m(),
            BigUint::from(932u32)
        );
        assert!(modified_server_counts(2, 2).is_err());
    }

    #[test]
    fn built_column_count_matches_closed_form() {
        for (s, t) in [(3, 1), (3, 2), (4, 1), (4, 2), (3, 3)] {
            let (code, w) = construct_modified(s, t, &BuildOptions::default()).unwrap();
            let counts = modified_server_counts(s, t).unwrap();
            assert_eq!(BigUint::from(code.m()), counts.m(), "s={s} t={t}");
            assert_eq!(w.num_items(), s * t);
            assert!(!w.subsets(0).is_empty());
            assert!(counts.singleton > BigUint::zero());
        }
    }
}
