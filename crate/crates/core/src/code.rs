//! The array-code data model.
//!
//! A `[t × m, p]` array code has `m` servers (columns), each holding `t`
//! cells; a cell is a linear combination of the `p` items `x_0..x_{p-1}`.
//! Items are 0-indexed throughout.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{CoeffVector, PrimeField, SpanBasis};
use crate::rational::Rational;

/// Shape classification of a server.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ServerKind {
    /// Every cell stores a single item.
    Singleton,
    /// `t - 1` singleton cells plus the sum of every remaining item.
    Sigma,
    /// `t - 1` singleton cells plus the sum of `j` of the remaining items,
    /// where `2 <= j < p - t + 1`.
    TypeJ(usize),
    General,
}

/// One column of an array code.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Server {
    cells: Vec<CoeffVector>,
    kind: ServerKind,
}

impl Server {
    /// Wraps arbitrary cells and classifies them.
    pub fn new(cells: Vec<CoeffVector>) -> Self {
        let kind = classify(&cells);
        Self { cells, kind }
    }

    /// A server whose cells are `e_y` for every `y` in `stored`.
    pub fn singleton(stored: &[usize], t: usize, p: usize) -> Result<Self> {
        let stored = distinct_items(stored, p)?;
        if stored.len() != t {
            return Err(Error::InvalidServer(format!(
                "singleton server needs {t} distinct items, got {}",
                stored.len()
            )));
        }
        let cells = stored.iter().map(|&y| CoeffVector::unit(p, y)).collect();
        Ok(Self {
            cells,
            kind: ServerKind::Singleton,
        })
    }

    /// `t - 1` singleton cells plus one cell holding the sum of `sum_set`.
    pub fn with_sum(singletons: &[usize], sum_set: &[usize], t: usize, p: usize) -> Result<Self> {
        let singles = distinct_items(singletons, p)?;
        let support = distinct_items(sum_set, p)?;
        if singles.len() + 1 != t {
            return Err(Error::InvalidServer(format!(
                "expected {} singleton items, got {}",
                t - 1,
                singles.len()
            )));
        }
        if support.len() < 2 {
            return Err(Error::InvalidServer(
                "summation cell must cover at least two items".into(),
            ));
        }
        if let Some(y) = singles.intersection(&support).next() {
            return Err(Error::InvalidServer(format!(
                "item {y} is both a singleton and part of the sum"
            )));
        }
        let kind = if singles.len() + support.len() == p {
            ServerKind::Sigma
        } else {
            ServerKind::TypeJ(support.len())
        };
        let mut cells: Vec<CoeffVector> =
            singles.iter().map(|&y| CoeffVector::unit(p, y)).collect();
        cells.push(CoeffVector::indicator(p, support.iter().copied()));
        Ok(Self { cells, kind })
    }

    pub fn cells(&self) -> &[CoeffVector] {
        &self.cells
    }

    pub fn kind(&self) -> ServerKind {
        self.kind
    }

    /// Items stored in a cell of their own.
    pub fn singleton_items(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells.iter().filter_map(CoeffVector::singleton_index)
    }

    pub fn stores_singleton(&self, item: usize) -> bool {
        self.singleton_items().any(|y| y == item)
    }

    /// Canonical form for multiset comparisons: cells sorted.
    pub fn canonical(&self) -> Vec<CoeffVector> {
        let mut cells = self.cells.clone();
        cells.sort();
        cells
    }

    /// The server after relabelling item `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::new(self.cells.iter().map(|c| c.permuted(perm)).collect())
    }
}

fn distinct_items(items: &[usize], p: usize) -> Result<BTreeSet<usize>> {
    let mut set = BTreeSet::new();
    for &i in items {
        if i >= p {
            return Err(Error::IndexOutOfRange { index: i, limit: p });
        }
        if !set.insert(i) {
            return Err(Error::InvalidServer(format!("item {i} listed twice")));
        }
    }
    Ok(set)
}

fn classify(cells: &[CoeffVector]) -> ServerKind {
    let Some(p) = cells.first().map(CoeffVector::len) else {
        return ServerKind::General;
    };
    let mut singles = BTreeSet::new();
    let mut others = Vec::new();
    for c in cells {
        match c.singleton_index() {
            Some(i) if singles.insert(i) => {}
            Some(_) => return ServerKind::General,
            None => others.push(c),
        }
    }
    match others.as_slice() {
        [] => ServerKind::Singleton,
        [sum] => {
            if sum.as_slice().iter().any(|&c| c > 1) {
                return ServerKind::General;
            }
            let support: Vec<usize> = sum.support().collect();
            if support.iter().any(|i| singles.contains(i)) {
                ServerKind::General
            } else if singles.len() + support.len() == p {
                ServerKind::Sigma
            } else {
                ServerKind::TypeJ(support.len())
            }
        }
        _ => ServerKind::General,
    }
}

/// A `[t × m, p]` array code over GF(q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrayCode {
    field: PrimeField,
    t: usize,
    p: usize,
    columns: Vec<Server>,
}

impl ArrayCode {
    /// Checks the shape: every column has `t` cells of length `p`, with
    /// coefficients reduced modulo q. Rank and storage assumptions are not
    /// enforced here; see [`ArrayCode::check_assumptions`].
    pub fn new(field: PrimeField, t: usize, p: usize, columns: Vec<Server>) -> Result<Self> {
        if t == 0 || p == 0 {
            return Err(Error::InvalidCode("t and p must be positive".into()));
        }
        for (j, col) in columns.iter().enumerate() {
            if col.cells.len() != t {
                return Err(Error::InvalidCode(format!(
                    "column {j} has {} cells, expected {t}",
                    col.cells.len()
                )));
            }
            for cell in &col.cells {
                if cell.len() != p {
                    return Err(Error::DimensionMismatch {
                        expected: p,
                        found: cell.len(),
                    });
                }
                cell.check_reduced(field)?;
            }
        }
        Ok(Self {
            field,
            t,
            p,
            columns,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Server] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Server {
        &self.columns[j]
    }

    /// A copy of this code with one extra column appended.
    pub fn with_column(&self, server: Server) -> Result<Self> {
        let mut columns = self.columns.clone();
        columns.push(server);
        Self::new(self.field, self.t, self.p, columns)
    }

    /// Storage ratio `s = p / t`.
    pub fn storage_ratio(&self) -> Rational {
        Rational::new(BigInt::from(self.p), BigInt::from(self.t))
    }

    /// Sorted canonical columns, for comparing codes as multisets of servers.
    pub fn column_multiset(&self) -> Vec<Vec<CoeffVector>> {
        let mut cols: Vec<_> = self.columns.iter().map(Server::canonical).collect();
        cols.sort();
        cols
    }

    /// Reports every column that breaks one of the storage assumptions.
    ///
    /// An empty report means: each column has rank `t`; every item a column
    /// can recover alone is stored there as a singleton cell; and such an
    /// item appears in no other cell of that column.
    pub fn check_assumptions(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        for (j, col) in self.columns.iter().enumerate() {
            let mut basis = SpanBasis::new(self.field, self.p);
            for cell in &col.cells {
                basis.insert(cell).expect("cells validated at construction");
            }
            if basis.rank() < self.t {
                report.push(Violation::RankDeficient {
                    column: j,
                    rank: basis.rank(),
                });
            }
            let singles: BTreeSet<usize> = col.singleton_items().collect();
            for item in 0..self.p {
                if !singles.contains(&item) && basis.contains_unit(item) {
                    report.push(Violation::DerivableNotStored { column: j, item });
                }
            }
            for &item in &singles {
                let uses = col.cells.iter().filter(|c| c.get(item) != 0).count();
                if uses > 1 {
                    report.push(Violation::SingletonReused { column: j, item });
                }
            }
        }
        report
    }
}

/// A breach of the storage assumptions, reported per column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The column's cells span fewer than `t` dimensions.
    RankDeficient { column: usize, rank: usize },
    /// `x_item` is recoverable from the column alone but has no cell of its own.
    DerivableNotStored { column: usize, item: usize },
    /// `x_item` has a singleton cell and also appears in another cell.
    SingletonReused { column: usize, item: usize },
}

/// Per-item lists of column subsets; each subset is meant to span `e_item`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    items: Vec<Vec<Vec<usize>>>,
}

impl Witness {
    pub fn new(items: Vec<Vec<Vec<usize>>>) -> Self {
        Self { items }
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    /// Subsets recorded for `item`; empty if the item is not covered.
    pub fn subsets(&self, item: usize) -> &[Vec<usize>] {
        self.items.get(item).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn items(&self) -> &[Vec<Vec<usize>>] {
        &self.items
    }

    pub fn items_mut(&mut self) -> &mut Vec<Vec<Vec<usize>>> {
        &mut self.items
    }
}

/// PIR rate `k / m`, reduced.
pub fn rate(k: u64, m: u64) -> Result<Rational> {
    if m == 0 {
        return Err(Error::InvalidParameters("rate needs m > 0".into()));
    }
    Ok(Rational::new(BigInt::from(k), BigInt::from(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn cells(rows: &[&[usize]], p: usize) -> Vec<CoeffVector> {
        rows.iter()
            .map(|r| CoeffVector::indicator(p, r.iter().copied()))
            .collect()
    }

    #[test]
    fn singleton_server_cells() {
        let s = Server::singleton(&[0, 1], 2, 3).unwrap();
        assert_eq!(
            s.cells(),
            &[CoeffVector::unit(3, 0), CoeffVector::unit(3, 1)]
        );
        assert_eq!(s.kind(), ServerKind::Singleton);
    }

    #[test]
    fn singleton_server_wrong_size() {
        assert!(Server::singleton(&[0, 1], 3, 6).is_err());
        assert!(Server::singleton(&[0, 0, 1], 3, 6).is_err());
        assert!(Server::singleton(&[0, 1, 7], 3, 6).is_err());
    }

    #[test]
    fn sigma_and_type_j_servers() {
        let s = Server::with_sum(&[0, 1], &[2, 3, 4, 5], 3, 6).unwrap();
        assert_eq!(s.kind(), ServerKind::Sigma);
        assert_eq!(s.cells()[2], CoeffVector::indicator(6, [2, 3, 4, 5]));

        // s = 4, t = 3: a type-(t+1) server.
        let s = Server::with_sum(&[0, 1], &[2, 3, 4, 5], 3, 12).unwrap();
        assert_eq!(s.kind(), ServerKind::TypeJ(4));
    }

    #[test]
    fn sum_server_errors() {
        assert!(Server::with_sum(&[0, 1], &[1, 2, 3], 3, 6).is_err());
        assert!(Server::with_sum(&[0, 1], &[2], 3, 6).is_err());
        assert!(Server::with_sum(&[0], &[2, 3], 3, 6).is_err());
    }

    #[test]
    fn classification_matches_constructors() {
        let a = Server::with_sum(&[4], &[0, 1, 2], 2, 6).unwrap();
        assert_eq!(Server::new(a.cells().to_vec()).kind(), a.kind());
        let general = Server::new(cells(&[&[0, 1], &[1, 2]], 3));
        assert_eq!(general.kind(), ServerKind::General);
    }

    #[test]
    fn assumption_violations() {
        let f = PrimeField::BINARY;
        let derivable =
            ArrayCode::new(f, 2, 3, vec![Server::new(cells(&[&[0], &[0, 1]], 3))]).unwrap();
        assert_eq!(
            derivable.check_assumptions(),
            vec![
                Violation::DerivableNotStored { column: 0, item: 1 },
                Violation::SingletonReused { column: 0, item: 0 },
            ]
        );

        let reused =
            ArrayCode::new(f, 2, 3, vec![Server::new(cells(&[&[0], &[0, 1, 2]], 3))]).unwrap();
        assert_eq!(
            reused.check_assumptions(),
            vec![Violation::SingletonReused { column: 0, item: 0 }]
        );

        let deficient =
            ArrayCode::new(f, 2, 3, vec![Server::new(cells(&[&[1, 2], &[1, 2]], 3))]).unwrap();
        assert_eq!(
            deficient.check_assumptions(),
            vec![Violation::RankDeficient { column: 0, rank: 1 }]
        );
    }

    #[test]
    fn shape_validation() {
        let f = PrimeField::BINARY;
        let short = Server::new(cells(&[&[0]], 3));
        assert!(ArrayCode::new(f, 2, 3, vec![short]).is_err());
        let wrong_len = Server::new(cells(&[&[0], &[1]], 4));
        assert!(ArrayCode::new(f, 2, 3, vec![wrong_len]).is_err());
        let big = Server::new(vec![
            CoeffVector::new(vec![2, 0, 0]),
            CoeffVector::unit(3, 1),
        ]);
        assert!(ArrayCode::new(f, 2, 3, vec![big]).is_err());
    }

    #[test]
    fn rates() {
        assert_eq!(rate(4, 6).unwrap(), ratio(2, 3));
        assert_eq!(rate(139, 154).unwrap(), ratio(139, 154));
        assert_eq!(rate(0, 5).unwrap(), ratio(0, 1));
        assert!(rate(1, 0).is_err());
    }

    #[test]
    fn storage_ratio_is_p_over_t() {
        let code = ArrayCode::new(PrimeField::BINARY, 3, 6, vec![]).unwrap();
        assert_eq!(code.storage_ratio(), ratio(2, 1));
    }
}
