//! Dense linear algebra over a prime field GF(q).
//!
//! Vectors are plain coefficient lists. Span computations go through
//! [`SpanBasis`], an incremental echelon basis indexed by pivot column. Over
//! GF(2) the basis packs rows into 64-bit words; every other modulus uses the
//! generic dense path. Both paths produce the same reduced row-echelon form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime field GF(q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    modulus: u32,
}

impl PrimeField {
    pub const BINARY: PrimeField = PrimeField { modulus: 2 };

    pub fn new(modulus: u32) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(Error::InvalidModulus(modulus));
        }
        Ok(Self { modulus })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.modulus
    }

    #[inline]
    pub fn is_binary(self) -> bool {
        self.modulus == 2
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.modulus as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.modulus as u64 - b as u64) % self.modulus as u64) as u32
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.modulus as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        self.sub(0, a)
    }

    /// Multiplicative inverse by Fermat's little theorem. `a` must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(a % self.modulus != 0);
        self.pow(a, self.modulus - 2)
    }

    pub fn pow(self, mut base: u32, mut exp: u32) -> u32 {
        let mut acc = 1 % self.modulus;
        base %= self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        Self::BINARY
    }
}

impl TryFrom<u32> for PrimeField {
    type Error = Error;

    fn try_from(q: u32) -> Result<Self> {
        Self::new(q)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.modulus
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// One storage cell: the coefficients of a linear combination of the items.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoeffVector(Vec<u32>);

impl CoeffVector {
    pub fn new(coeffs: Vec<u32>) -> Self {
        Self(coeffs)
    }

    pub fn zero(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// The standard basis vector `e_index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = vec![0; len];
        v[index] = 1;
        Self(v)
    }

    /// The all-ones indicator of `items`.
    pub fn indicator<I: IntoIterator<Item = usize>>(len: usize, items: I) -> Self {
        let mut v = vec![0; len];
        for i in items {
            v[i] = 1;
        }
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }

    pub fn get(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Indices with a nonzero coefficient, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, _)| i)
    }

    pub fn support_len(&self) -> usize {
        self.0.iter().filter(|&&c| c != 0).count()
    }

    /// `Some(i)` when the vector is a nonzero multiple of `e_i`.
    pub fn singleton_index(&self) -> Option<usize> {
        let mut it = self.support();
        match (it.next(), it.next()) {
            (Some(i), None) => Some(i),
            _ => None,
        }
    }

    /// Checks that every coefficient is reduced modulo the field size.
    pub fn check_reduced(&self, field: PrimeField) -> Result<()> {
        match self.0.iter().find(|&&c| c >= field.modulus()) {
            Some(&value) => Err(Error::CoefficientOutOfRange {
                value,
                modulus: field.modulus(),
            }),
            None => Ok(()),
        }
    }

    /// Applies an item relabelling: coordinate `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = vec![0; self.0.len()];
        for (i, &c) in self.0.iter().enumerate() {
            out[perm[i]] = c;
        }
        Self(out)
    }
}

impl fmt::Debug for CoeffVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<u32>> for CoeffVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

/// Incremental echelon basis of a subspace of GF(q)^len.
///
/// Each stored row is normalized to have a leading 1 at its pivot and zeros
/// before it. Rows are kept in a table indexed by pivot column.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    field: PrimeField,
    len: usize,
    rank: usize,
    repr: Repr,
}

#[derive(Clone, Debug)]
enum Repr {
    Binary {
        words: usize,
        rows: Vec<Option<Vec<u64>>>,
    },
    Dense {
        rows: Vec<Option<Vec<u32>>>,
    },
}

impl SpanBasis {
    pub fn new(field: PrimeField, len: usize) -> Self {
        let repr = if field.is_binary() {
            Repr::Binary {
                words: len.div_ceil(64),
                rows: vec![None; len],
            }
        } else {
            Repr::Dense {
                rows: vec![None; len],
            }
        };
        Self {
            field,
            len,
            rank: 0,
            repr,
        }
    }

    /// Forces the generic representation regardless of the modulus.
    #[cfg(test)]
    fn new_dense(field: PrimeField, len: usize) -> Self {
        Self {
            field,
            len,
            rank: 0,
            repr: Repr::Dense {
                rows: vec![None; len],
            },
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vector_len(&self) -> usize {
        self.len
    }

    fn check(&self, v: &CoeffVector) -> Result<()> {
        if v.len() != self.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                found: v.len(),
            });
        }
        v.check_reduced(self.field)
    }

    /// Adds `v` to the basis. Returns `true` when it was independent.
    pub fn insert(&mut self, v: &CoeffVector) -> Result<bool> {
        self.check(v)?;
        let field = self.field;
        let added = match &mut self.repr {
            Repr::Binary { words, rows } => {
                let mut bits = pack(v.as_slice(), *words);
                match reduce_binary(rows, &mut bits) {
                    Some(pivot) => {
                        rows[pivot] = Some(bits);
                        true
                    }
                    None => false,
                }
            }
            Repr::Dense { rows } => {
                let mut coeffs = v.as_slice().to_vec();
                match reduce_dense(field, rows, &mut coeffs) {
                    Some(pivot) => {
                        let scale = field.inv(coeffs[pivot]);
                        for c in coeffs[pivot..].iter_mut() {
                            *c = field.mul(*c, scale);
                        }
                        rows[pivot] = Some(coeffs);
                        true
                    }
                    None => false,
                }
            }
        };
        if added {
            self.rank += 1;
        }
        Ok(added)
    }

    /// Whether `v` lies in the span of the inserted vectors.
    pub fn contains(&self, v: &CoeffVector) -> Result<bool> {
        self.check(v)?;
        Ok(match &self.repr {
            Repr::Binary { words, rows } => {
                let mut bits = pack(v.as_slice(), *words);
                reduce_binary(rows, &mut bits).is_none()
            }
            Repr::Dense { rows } => {
                let mut coeffs = v.as_slice().to_vec();
                reduce_dense(self.field, rows, &mut coeffs).is_none()
            }
        })
    }

    /// `e_index` membership without materializing the unit vector.
    pub fn contains_unit(&self, index: usize) -> bool {
        let unit = CoeffVector::unit(self.len, index);
        self.contains(&unit).unwrap_or(false)
    }

    /// The reduced row-echelon basis, rows ordered by pivot.
    pub fn to_rref(&self) -> RowEchelon {
        let field = self.field;
        let (basis, pivots) = match &self.repr {
            Repr::Binary { words: _, rows } => {
                let pivots: Vec<usize> = (0..self.len).filter(|&c| rows[c].is_some()).collect();
                let mut table: Vec<Vec<u64>> =
                    pivots.iter().map(|&c| rows[c].clone().unwrap()).collect();
                for a in (0..pivots.len()).rev() {
                    let c = pivots[a];
                    let row = table[a].clone();
                    for (b, other) in table.iter_mut().enumerate() {
                        if b != a && bit(other, c) {
                            xor_from(other, &row, c / 64);
                        }
                    }
                }
                let basis = table
                    .iter()
                    .map(|bits| CoeffVector(unpack(bits, self.len)))
                    .collect();
                (basis, pivots)
            }
            Repr::Dense { rows } => {
                let pivots: Vec<usize> = (0..self.len).filter(|&c| rows[c].is_some()).collect();
                let mut table: Vec<Vec<u32>> =
                    pivots.iter().map(|&c| rows[c].clone().unwrap()).collect();
                for a in (0..pivots.len()).rev() {
                    let c = pivots[a];
                    let row = table[a].clone();
                    for (b, other) in table.iter_mut().enumerate() {
                        if b != a && other[c] != 0 {
                            let factor = other[c];
                            axpy(field, other, &row, factor, c);
                        }
                    }
                }
                (table.into_iter().map(CoeffVector).collect(), pivots)
            }
        };
        RowEchelon { basis, pivots }
    }
}

/// A reduced row-echelon basis together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowEchelon {
    basis: Vec<CoeffVector>,
    pivots: Vec<usize>,
}

impl RowEchelon {
    pub fn basis(&self) -> &[CoeffVector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn into_basis(self) -> Vec<CoeffVector> {
        self.basis
    }
}

/// Reduced row-echelon form of the span of `rows`.
///
/// All rows must share one length; an empty input has rank 0.
pub fn row_reduce(field: PrimeField, rows: &[CoeffVector]) -> Result<RowEchelon> {
    let Some(first) = rows.first() else {
        return Ok(RowEchelon {
            basis: Vec::new(),
            pivots: Vec::new(),
        });
    };
    let mut basis = SpanBasis::new(field, first.len());
    for r in rows {
        basis.insert(r)?;
    }
    Ok(basis.to_rref())
}

pub fn rank(field: PrimeField, rows: &[CoeffVector]) -> Result<usize> {
    Ok(row_reduce(field, rows)?.rank())
}

/// Whether `target` lies in the row span of `rows`.
pub fn in_span<'a, I>(field: PrimeField, rows: I, target: &CoeffVector) -> Result<bool>
where
    I: IntoIterator<Item = &'a CoeffVector>,
{
    let mut basis = SpanBasis::new(field, target.len());
    for r in rows {
        basis.insert(r)?;
    }
    basis.contains(target)
}

fn pack(coeffs: &[u32], words: usize) -> Vec<u64> {
    let mut bits = vec![0u64; words];
    for (i, &c) in coeffs.iter().enumerate() {
        if c & 1 == 1 {
            bits[i / 64] |= 1 << (i % 64);
        }
    }
    bits
}

fn unpack(bits: &[u64], len: usize) -> Vec<u32> {
    (0..len)
        .map(|i| ((bits[i / 64] >> (i % 64)) & 1) as u32)
        .collect()
}

#[inline]
fn bit(bits: &[u64], i: usize) -> bool {
    (bits[i / 64] >> (i % 64)) & 1 == 1
}

#[inline]
fn xor_from(dst: &mut [u64], src: &[u64], start_word: usize) {
    for (d, s) in dst[start_word..].iter_mut().zip(&src[start_word..]) {
        *d ^= s;
    }
}

/// Eliminates every pivot column from `v`; returns the lowest remaining set
/// bit, or `None` if `v` reduced to zero.
fn reduce_binary(rows: &[Option<Vec<u64>>], v: &mut [u64]) -> Option<usize> {
    let mut first_free = None;
    for w in 0..v.len() {
        let mut skip = 0u64;
        loop {
            let candidates = v[w] & !skip;
            if candidates == 0 {
                break;
            }
            let b = candidates.trailing_zeros() as usize;
            let col = w * 64 + b;
            match &rows[col] {
                Some(row) => xor_from(v, row, w),
                None => {
                    skip |= 1 << b;
                    first_free.get_or_insert(col);
                }
            }
        }
    }
    first_free
}

/// `dst -= factor * src`, touching columns from `start` on.
#[inline]
fn axpy(field: PrimeField, dst: &mut [u32], src: &[u32], factor: u32, start: usize) {
    for (d, &s) in dst[start..].iter_mut().zip(&src[start..]) {
        if s != 0 {
            *d = field.sub(*d, field.mul(factor, s));
        }
    }
}

fn reduce_dense(field: PrimeField, rows: &[Option<Vec<u32>>], v: &mut [u32]) -> Option<usize> {
    let mut first_free = None;
    for col in 0..v.len() {
        if v[col] == 0 {
            continue;
        }
        match &rows[col] {
            Some(row) => {
                let factor = v[col];
                axpy(field, v, row, factor, col);
            }
            None => {
                first_free.get_or_insert(col);
            }
        }
    }
    first_free
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[u32]) -> CoeffVector {
        CoeffVector::new(c.to_vec())
    }

    #[test]
    fn empty_input_has_rank_zero() {
        let r = row_reduce(PrimeField::BINARY, &[]).unwrap();
        assert_eq!(r.rank(), 0);
        assert!(r.basis().is_empty());
    }

    #[test]
    fn duplicate_rows_collapse() {
        let e1 = CoeffVector::unit(3, 1);
        let r = row_reduce(PrimeField::BINARY, &[e1.clone(), e1]).unwrap();
        assert_eq!(r.rank(), 1);
    }

    #[test]
    fn hand_elimination_gf2() {
        // (1,1,0) + (0,1,1) = (1,0,1) over GF(2).
        let r = row_reduce(PrimeField::BINARY, &[v(&[1, 1, 0]), v(&[0, 1, 1])]).unwrap();
        assert_eq!(r.rank(), 2);
        assert_eq!(r.basis(), &[v(&[1, 0, 1]), v(&[0, 1, 1])]);
        assert_eq!(r.pivots(), &[0, 1]);
    }

    #[test]
    fn hand_elimination_gf5() {
        let f = PrimeField::new(5).unwrap();
        // (2,4,0) ~ (1,2,0); (0,3,1) ~ (0,1,2); first minus 2*second = (1,0,1).
        let r = row_reduce(f, &[v(&[2, 4, 0]), v(&[0, 3, 1])]).unwrap();
        assert_eq!(r.basis(), &[v(&[1, 0, 1]), v(&[0, 1, 2])]);
    }

    #[test]
    fn membership_examples() {
        let f = PrimeField::BINARY;
        assert!(in_span(f, &[v(&[1, 1, 0])], &v(&[1, 1, 0])).unwrap());
        assert!(in_span(f, &[v(&[0, 1, 0]), v(&[1, 1, 0])], &v(&[1, 0, 0])).unwrap());
        assert!(!in_span(f, &[v(&[0, 1, 0]), v(&[0, 0, 1])], &v(&[1, 0, 0])).unwrap());
    }

    #[test]
    fn mixed_lengths_rejected() {
        let err = row_reduce(PrimeField::BINARY, &[v(&[1, 0]), v(&[1, 0, 0])]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
        assert!(in_span(PrimeField::BINARY, &[v(&[1, 0])], &v(&[1])).is_err());
    }

    #[test]
    fn unreduced_coefficients_rejected() {
        let f = PrimeField::new(3).unwrap();
        assert!(matches!(
            row_reduce(f, &[v(&[3, 0])]),
            Err(Error::CoefficientOutOfRange {
                value: 3,
                modulus: 3
            })
        ));
    }

    #[test]
    fn composite_modulus_rejected() {
        assert_eq!(PrimeField::new(4), Err(Error::InvalidModulus(4)));
        assert_eq!(PrimeField::new(1), Err(Error::InvalidModulus(1)));
        assert!(PrimeField::new(65521).is_ok());
    }

    #[test]
    fn inverse_round_trip() {
        let f = PrimeField::new(13).unwrap();
        for a in 1..13 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn wide_binary_vectors_cross_word_boundary() {
        let len = 130;
        let a = CoeffVector::indicator(len, [3, 64, 129]);
        let b = CoeffVector::indicator(len, [64, 129]);
        let mut basis = SpanBasis::new(PrimeField::BINARY, len);
        basis.insert(&a).unwrap();
        basis.insert(&b).unwrap();
        assert!(basis.contains_unit(3));
        assert!(!basis.contains_unit(64));
        let rref = basis.to_rref();
        assert_eq!(rref.basis()[0], CoeffVector::unit(len, 3));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use std::collections::HashSet;

        fn matrix(q: u32) -> impl Strategy<Value = (usize, Vec<Vec<u32>>, Vec<u32>)> {
            (1usize..8).prop_flat_map(move |len| {
                (
                    Just(len),
                    prop::collection::vec(prop::collection::vec(0..q, len), 0..7),
                    prop::collection::vec(0..q, len),
                )
            })
        }

        fn vecs(rows: &[Vec<u32>]) -> Vec<CoeffVector> {
            rows.iter().map(|r| CoeffVector::new(r.clone())).collect()
        }

        /// Size of the span by enumerating every linear combination.
        fn span_size(field: PrimeField, len: usize, rows: &[Vec<u32>]) -> usize {
            let q = field.modulus();
            let mut seen = HashSet::new();
            let total = (q as usize).pow(rows.len() as u32);
            for mut code in 0..total {
                let mut acc = vec![0u32; len];
                for row in rows {
                    let c = (code % q as usize) as u32;
                    code /= q as usize;
                    for (a, &x) in acc.iter_mut().zip(row) {
                        *a = field.add(*a, field.mul(c, x));
                    }
                }
                seen.insert(acc);
            }
            seen.len()
        }

        proptest! {
            #[test]
            fn packed_and_dense_binary_agree((len, rows, target) in matrix(2)) {
                let mut packed = SpanBasis::new(PrimeField::BINARY, len);
                let mut dense = SpanBasis::new_dense(PrimeField::BINARY, len);
                for r in vecs(&rows) {
                    prop_assert_eq!(packed.insert(&r).unwrap(), dense.insert(&r).unwrap());
                }
                let t = CoeffVector::new(target);
                prop_assert_eq!(packed.contains(&t).unwrap(), dense.contains(&t).unwrap());
                prop_assert_eq!(packed.to_rref(), dense.to_rref());
            }

            #[test]
            fn rank_matches_span_enumeration(q in prop::sample::select(vec![2u32, 3, 5]), seed in matrix(5)) {
                let field = PrimeField::new(q).unwrap();
                let (len, rows, _) = seed;
                let rows: Vec<Vec<u32>> = rows.into_iter().take(4)
                    .map(|r| r.into_iter().map(|x| x % q).collect()).collect();
                let r = rank(field, &vecs(&rows)).unwrap();
                prop_assert!(r <= rows.len().min(len));
                prop_assert_eq!((q as usize).pow(r as u32), span_size(field, len, &rows));
            }

            #[test]
            fn membership_iff_rank_unchanged(q in prop::sample::select(vec![2u32, 3, 7]), seed in matrix(7)) {
                let field = PrimeField::new(q).unwrap();
                let (_, rows, target) = seed;
                let rows: Vec<Vec<u32>> = rows.into_iter()
                    .map(|r| r.into_iter().map(|x| x % q).collect()).collect();
                let target = CoeffVector::new(target.into_iter().map(|x| x % q).collect());
                let base = vecs(&rows);
                let mut extended = base.clone();
                extended.push(target.clone());
                let member = in_span(field, &base, &target).unwrap();
                prop_assert_eq!(member, rank(field, &extended).unwrap() == rank(field, &base).unwrap());
            }

            #[test]
            fn row_reduce_is_idempotent(q in prop::sample::select(vec![2u32, 3, 5]), seed in matrix(5)) {
                let field = PrimeField::new(q).unwrap();
                let (_, rows, _) = seed;
                let rows: Vec<Vec<u32>> = rows.into_iter()
                    .map(|r| r.into_iter().map(|x| x % q).collect()).collect();
                let once = row_reduce(field, &vecs(&rows)).unwrap();
                let twice = row_reduce(field, once.basis()).unwrap();
                prop_assert_eq!(once, twice);
            }
        }
    }
}
