//! Exact checks of the k-PIR property.
//!
//! [`verify_witness`] validates a supplied witness; [`brute_force_k`] is an
//! independent oracle that finds the true maximum number of disjoint
//! spanning subsets for small codes.

use rayon::prelude::*;
use serde::Serialize;

use crate::code::{ArrayCode, Witness};
use crate::error::{Error, Result};
use crate::gf::SpanBasis;

/// Default column cap for the exhaustive oracle.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 14;

/// Hard ceiling imposed by the 64-bit subset masks.
const MASK_LIMIT: usize = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureReason {
    /// Shares a column with a subset accepted earlier for the same item.
    Overlap,
    DoesNotSpan,
    ColumnOutOfRange,
    /// The witness lists no subsets for this item.
    MissingItem,
    /// The witness lists an item index `>= p`.
    ExtraItem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub item: usize,
    /// Position of the subset in the item's list, when one is involved.
    pub subset_index: Option<usize>,
    pub subset: Vec<usize>,
    pub reason: FailureReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    /// Valid disjoint subsets found for each item.
    pub per_item: Vec<usize>,
    /// `min` over items.
    pub k: usize,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

fn basis_of(code: &ArrayCode, columns: impl IntoIterator<Item = usize>) -> SpanBasis {
    let mut basis = SpanBasis::new(code.field(), code.p());
    for j in columns {
        for cell in code.column(j).cells() {
            basis.insert(cell).expect("cells validated by ArrayCode");
        }
    }
    basis
}

/// Whether the cells of the columns in `subset` span `e_item`.
pub fn spans(code: &ArrayCode, subset: &[usize], item: usize) -> Result<bool> {
    if item >= code.p() {
        return Err(Error::IndexOutOfRange {
            index: item,
            limit: code.p(),
        });
    }
    if let Some(&j) = subset.iter().find(|&&j| j >= code.m()) {
        return Err(Error::IndexOutOfRange {
            index: j,
            limit: code.m(),
        });
    }
    Ok(basis_of(code, subset.iter().copied()).contains_unit(item))
}

/// Counts, per item, the witness subsets that span the item and are
/// disjoint from the subsets accepted before them. Invalid subsets are
/// reported and skipped rather than aborting the check.
pub fn verify_witness(code: &ArrayCode, witness: &Witness) -> VerificationReport {
    let results: Vec<(usize, Vec<Failure>)> = (0..code.p())
        .into_par_iter()
        .map(|item| verify_item(code, witness, item))
        .collect();

    let mut per_item = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (count, mut f) in results {
        per_item.push(count);
        failures.append(&mut f);
    }
    for item in code.p()..witness.num_items() {
        failures.push(Failure {
            item,
            subset_index: None,
            subset: Vec::new(),
            reason: FailureReason::ExtraItem,
        });
    }
    let k = per_item.iter().copied().min().unwrap_or(0);
    VerificationReport {
        per_item,
        k,
        failures,
    }
}

fn verify_item(code: &ArrayCode, witness: &Witness, item: usize) -> (usize, Vec<Failure>) {
    let mut failures = Vec::new();
    if item >= witness.num_items() || witness.subsets(item).is_empty() {
        failures.push(Failure {
            item,
            subset_index: None,
            subset: Vec::new(),
            reason: FailureReason::MissingItem,
        });
        return (0, failures);
    }
    let mut used = vec![false; code.m()];
    let mut count = 0;
    for (idx, subset) in witness.subsets(item).iter().enumerate() {
        let mut fail = |reason| {
            failures.push(Failure {
                item,
                subset_index: Some(idx),
                subset: subset.clone(),
                reason,
            })
        };
        let mut cols = subset.clone();
        cols.sort_unstable();
        cols.dedup();
        if cols.iter().any(|&j| j >= code.m()) {
            fail(FailureReason::ColumnOutOfRange);
            continue;
        }
        if cols.is_empty() || !basis_of(code, cols.iter().copied()).contains_unit(item) {
            fail(FailureReason::DoesNotSpan);
            continue;
        }
        if cols.iter().any(|&j| used[j]) {
            fail(FailureReason::Overlap);
            continue;
        }
        for &j in &cols {
            used[j] = true;
        }
        count += 1;
    }
    (count, failures)
}

fn check_cap(code: &ArrayCode, max_m: usize) -> Result<()> {
    let cap = max_m.min(MASK_LIMIT);
    if code.m() > cap {
        return Err(Error::CapExceeded {
            what: "number of columns",
            value: code.m(),
            cap,
        });
    }
    Ok(())
}

/// Every inclusion-minimal set of columns spanning `e_item`, as bit masks,
/// in order of increasing size.
pub fn minimal_spanning_subsets(code: &ArrayCode, item: usize, max_m: usize) -> Result<Vec<u64>> {
    check_cap(code, max_m)?;
    if item >= code.p() {
        return Err(Error::IndexOutOfRange {
            index: item,
            limit: code.p(),
        });
    }
    let m = code.m();
    let mut minimal: Vec<u64> = Vec::new();
    for size in 1..=m {
        for cols in itertools::Itertools::combinations(0..m, size) {
            let mask = cols.iter().fold(0u64, |acc, &j| acc | 1 << j);
            if minimal.iter().any(|&s| s & mask == s) {
                continue;
            }
            if basis_of(code, cols.iter().copied()).contains_unit(item) {
                minimal.push(mask);
            }
        }
    }
    Ok(minimal)
}

/// Exact maximum number of pairwise disjoint column subsets spanning
/// `e_item`: minimal spanning subsets, then branch-and-bound set packing.
pub fn brute_force_k(code: &ArrayCode, item: usize, max_m: usize) -> Result<usize> {
    let sets = minimal_spanning_subsets(code, item, max_m)?;
    let all = if code.m() == 64 {
        u64::MAX
    } else {
        (1u64 << code.m()) - 1
    };
    let mut best = 0;
    pack(&sets, 0, 0, 0, all, &mut best);
    Ok(best)
}

/// `sets` is sorted by size, so `sets[start]` has the fewest columns of
/// what remains and bounds how many more sets fit in the free columns.
fn pack(sets: &[u64], start: usize, used: u64, count: usize, all: u64, best: &mut usize) {
    if count > *best {
        *best = count;
    }
    let Some(&smallest) = sets.get(start) else {
        return;
    };
    let free = (all & !used).count_ones() as usize;
    if count + free / smallest.count_ones() as usize <= *best {
        return;
    }
    for idx in start..sets.len() {
        let s = sets[idx];
        if s & used == 0 {
            pack(sets, idx + 1, used | s, count + 1, all, best);
        }
    }
}

/// The code-level `k`: the minimum of [`brute_force_k`] over all items.
pub fn max_k(code: &ArrayCode, max_m: usize) -> Result<usize> {
    check_cap(code, max_m)?;
    let ks = (0..code.p())
        .into_par_iter()
        .map(|i| brute_force_k(code, i, max_m))
        .collect::<Result<Vec<_>>>()?;
    Ok(ks.into_iter().min().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::Server;
    use crate::constructions::intro_example;
    use crate::gf::{CoeffVector, PrimeField};

    #[test]
    fn intro_spans() {
        let (code, _) = intro_example();
        // 1-indexed {1}, {3,4}, {2} become {0}, {2,3}, {1} here.
        assert!(spans(&code, &[0], 0).unwrap());
        assert!(spans(&code, &[2, 3], 0).unwrap());
        assert!(!spans(&code, &[1], 0).unwrap());
        assert!(spans(&code, &[9], 0).is_err());
        assert!(spans(&code, &[0], 6).is_err());
    }

    #[test]
    fn intro_witness_is_valid() {
        let (code, witness) = intro_example();
        let report = verify_witness(&code, &witness);
        assert!(report.is_valid(), "{:?}", report.failures);
        assert_eq!(report.k, 4);
        assert_eq!(report.per_item, vec![4; 6]);
    }

    #[test]
    fn overlap_is_reported_and_not_counted() {
        let (code, mut witness) = intro_example();
        witness.items_mut()[0].push(vec![0, 1]);
        let report = verify_witness(&code, &witness);
        assert_eq!(report.per_item[0], 4);
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].reason, FailureReason::Overlap);
        assert_eq!(report.failures[0].subset_index, Some(4));
    }

    #[test]
    fn empty_subset_does_not_span() {
        let (code, mut witness) = intro_example();
        witness.items_mut()[2].insert(0, vec![]);
        let report = verify_witness(&code, &witness);
        assert_eq!(report.failures[0].reason, FailureReason::DoesNotSpan);
        assert_eq!(report.per_item[2], 4);
    }

    #[test]
    fn missing_and_extra_items() {
        let (code, witness) = intro_example();
        let mut short = witness.clone();
        short.items_mut().truncate(5);
        let report = verify_witness(&code, &short);
        assert_eq!(report.k, 0);
        assert_eq!(report.failures[0].reason, FailureReason::MissingItem);

        let mut long = witness;
        long.items_mut().push(vec![vec![0]]);
        let report = verify_witness(&code, &long);
        assert_eq!(
            report.failures.last().unwrap().reason,
            FailureReason::ExtraItem
        );

        let mut bad = intro_example().1;
        bad.items_mut()[0][0] = vec![17];
        let report = verify_witness(&code, &bad);
        assert_eq!(report.failures[0].reason, FailureReason::ColumnOutOfRange);
    }

    #[test]
    fn intro_oracle() {
        let (code, _) = intro_example();
        for i in 0..6 {
            assert_eq!(brute_force_k(&code, i, DEFAULT_BRUTE_FORCE_CAP).unwrap(), 4);
        }
        assert_eq!(max_k(&code, DEFAULT_BRUTE_FORCE_CAP).unwrap(), 4);
    }

    #[test]
    fn single_column_oracle() {
        let code = ArrayCode::new(
            PrimeField::BINARY,
            1,
            2,
            vec![Server::new(vec![CoeffVector::unit(2, 0)])],
        )
        .unwrap();
        assert_eq!(brute_force_k(&code, 0, 14).unwrap(), 1);
        assert_eq!(brute_force_k(&code, 1, 14).unwrap(), 0);
    }

    #[test]
    fn full_replication_gives_k_equal_m() {
        let p = 3;
        let full = Server::new((0..p).map(|i| CoeffVector::unit(p, i)).collect());
        let code = ArrayCode::new(PrimeField::BINARY, p, p, vec![full; 5]).unwrap();
        assert_eq!(max_k(&code, 14).unwrap(), 5);
    }

    #[test]
    fn cap_enforced() {
        let (code, _) = intro_example();
        assert!(matches!(
            brute_force_k(&code, 0, 5),
            Err(Error::CapExceeded {
                value: 6,
                cap: 5,
                ..
            })
        ));
        assert!(max_k(&code, 5).is_err());
    }

    #[test]
    fn minimal_sets_are_minimal() {
        let (code, _) = intro_example();
        let sets = minimal_spanning_subsets(&code, 0, 14).unwrap();
        for &s in &sets {
            let cols: Vec<usize> = (0..6).filter(|j| s >> j & 1 == 1).collect();
            assert!(spans(&code, &cols, 0).unwrap());
            for drop in 0..cols.len() {
                let mut fewer = cols.clone();
                fewer.remove(drop);
                assert!(!spans(&code, &fewer, 0).unwrap());
            }
        }
    }
}
