use pir_array_codes::constructions::{
    construct_be, construct_modified, construct_small_s, intro_example, BuildOptions,
};
use pir_array_codes::format::{deserialize, serialize};
use pir_array_codes::verifier::{brute_force_k, spans, verify_witness, FailureReason};
use pir_array_codes::{ArrayCode, CoeffVector, PrimeField, Server};
use proptest::prelude::*;

#[test]
fn constructions_round_trip() {
    let opts = BuildOptions::default();
    let built = [
        intro_example(),
        construct_small_s(23, 5, &opts).unwrap(),
        construct_modified(3, 2, &opts).unwrap(),
        construct_be(3, 2, &opts).unwrap(),
    ];
    for (code, witness) in built {
        let text = serialize(&code, Some(&witness));
        let (back, w) = deserialize(&text).unwrap();
        assert_eq!(back, code);
        assert_eq!(w.as_ref(), Some(&witness));
        assert!(verify_witness(&back, &w.unwrap()).is_valid());
        assert_eq!(serialize(&back, None), serialize(&code, None));
    }
}

#[test]
fn corrupted_files_are_rejected() {
    let (code, witness) = intro_example();
    let text = serialize(&code, Some(&witness));
    assert!(text.contains("\"t\":3,"));
    assert!(deserialize(&text.replacen("\"t\":3,", "\"t\":4,", 1)).is_err());
    assert!(deserialize(&text.replacen("\"m\":6,", "\"m\":7,", 1)).is_err());
    assert!(deserialize(&text.replacen("\"q\":2,", "\"q\":4,", 1)).is_err());
    assert!(deserialize(&text.replacen("\"version\":1,", "\"version\":2,", 1)).is_err());
    assert!(deserialize(&text[..text.len() / 2]).is_err());
    assert!(deserialize("{}").is_err());
}

fn random_code() -> impl Strategy<Value = ArrayCode> {
    (
        prop::sample::select(vec![2u32, 3]),
        1usize..=2,
        2usize..=4,
        1usize..=6,
    )
        .prop_flat_map(|(q, t, p, m)| {
            prop::collection::vec(prop::collection::vec(prop::collection::vec(0..q, p), t), m)
                .prop_map(move |cols| {
                    let columns = cols
                        .into_iter()
                        .map(|cells| Server::new(cells.into_iter().map(CoeffVector::new).collect()))
                        .collect();
                    ArrayCode::new(PrimeField::new(q).unwrap(), t, p, columns).unwrap()
                })
        })
}

/// Maximum number of disjoint spanning subsets by plain recursion over
/// every subset of the remaining columns.
fn naive_k(code: &ArrayCode, item: usize, free: u32) -> usize {
    let mut best = 0;
    let mut sub = free;
    while sub != 0 {
        let cols: Vec<usize> = (0..code.m()).filter(|j| sub >> j & 1 == 1).collect();
        if spans(code, &cols, item).unwrap() {
            best = best.max(1 + naive_k(code, item, free & !sub));
        }
        sub = (sub - 1) & free;
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_codes_round_trip(code in random_code()) {
        let (back, w) = deserialize(&serialize(&code, None)).unwrap();
        prop_assert_eq!(back, code);
        prop_assert!(w.is_none());
    }

    #[test]
    fn oracle_matches_naive_search(code in random_code()) {
        for item in 0..code.p() {
            let full = (1u32 << code.m()) - 1;
            prop_assert_eq!(brute_force_k(&code, item, 14).unwrap(), naive_k(&code, item, full));
        }
    }

    #[test]
    fn adding_a_column_never_lowers_k(code in random_code(), extra in 0usize..6) {
        let extra = code.column(extra % code.m()).clone();
        let bigger = code.with_column(extra).unwrap();
        for item in 0..code.p() {
            prop_assert!(brute_force_k(&bigger, item, 14).unwrap() >= brute_force_k(&code, item, 14).unwrap());
        }
    }

    #[test]
    fn spanning_is_monotone(code in random_code(), mask in 0u32..64, more in 0u32..64) {
        let m = code.m();
        let small: Vec<usize> = (0..m).filter(|j| mask >> j & 1 == 1).collect();
        let large: Vec<usize> = (0..m).filter(|j| (mask | more) >> j & 1 == 1).collect();
        for item in 0..code.p() {
            if spans(&code, &small, item).unwrap() {
                prop_assert!(spans(&code, &large, item).unwrap());
            }
        }
    }

    #[test]
    fn witness_count_never_exceeds_oracle(code in random_code()) {
        // Greedy witness: single columns first, then disjoint pairs.
        let mut items = Vec::new();
        for item in 0..code.p() {
            let mut used = vec![false; code.m()];
            let mut subsets = Vec::new();
            for j in 0..code.m() {
                if spans(&code, &[j], item).unwrap() {
                    used[j] = true;
                    subsets.push(vec![j]);
                }
            }
            for a in 0..code.m() {
                for b in a + 1..code.m() {
                    if !used[a] && !used[b] && spans(&code, &[a, b], item).unwrap() {
                        used[a] = true;
                        used[b] = true;
                        subsets.push(vec![a, b]);
                    }
                }
            }
            items.push(subsets);
        }
        let report = verify_witness(&code, &pir_array_codes::Witness::new(items));
        // Items with no subset at all are the only reportable problem.
        prop_assert!(report.failures.iter().all(|f| f.reason == FailureReason::MissingItem));
        for item in 0..code.p() {
            prop_assert!(report.per_item[item] <= brute_force_k(&code, item, 14).unwrap());
        }
    }
}
