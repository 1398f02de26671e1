use crate::code::{ArrayCode, Server, Witness};
use crate::gf::{CoeffVector, PrimeField};

const P: usize = 6;

/// The `[3 × 6, 6]` 4-PIR code over GF(2).
///
/// Column `j` stores `x_j`, `x_{j+1}` and `x_{j+2} + x_{j+3}` (indices mod 6).
/// Item `i` is recovered by columns `{i}`, `{i-1}`, `{i+1, i-2}` and
/// `{i+2, i+3}`.
pub fn intro_example() -> (ArrayCode, Witness) {
    let columns = (0..P)
        .map(|j| {
            Server::new(vec![
                CoeffVector::unit(P, j),
                CoeffVector::unit(P, (j + 1) % P),
                CoeffVector::indicator(P, [(j + 2) % P, (j + 3) % P]),
            ])
        })
        .collect();
    let code = ArrayCode::new(PrimeField::BINARY, 3, P, columns).expect("fixed shape");

    let witness = Witness::new(
        (0..P)
            .map(|i| {
                let at = |off: usize| (i + off) % P;
                [
                    vec![at(0)],
                    vec![at(5)],
                    vec![at(1), at(4)],
                    vec![at(2), at(3)],
                ]
                .into_iter()
                .map(|mut s| {
                    s.sort_unstable();
                    s
                })
                .collect()
            })
            .collect(),
    );
    (code, witness)
}
