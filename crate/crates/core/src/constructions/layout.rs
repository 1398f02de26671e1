use std::collections::HashMap;
use std::ops::Range;

use crate::code::{ArrayCode, Server};
use crate::error::Result;
use crate::gf::PrimeField;

/// A server described by its singleton items and its summation support.
/// Both lists are sorted; `sum` is empty for a singleton server.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct ServerSpec {
    pub singletons: Vec<usize>,
    pub sum: Vec<usize>,
}

impl ServerSpec {
    pub fn singleton(mut items: Vec<usize>) -> Self {
        items.sort_unstable();
        Self {
            singletons: items,
            sum: Vec::new(),
        }
    }

    pub fn with_sum(mut singletons: Vec<usize>, mut sum: Vec<usize>) -> Self {
        singletons.sort_unstable();
        sum.sort_unstable();
        Self { singletons, sum }
    }

    pub fn is_singleton(&self) -> bool {
        self.sum.is_empty()
    }

    pub fn has_singleton(&self, item: usize) -> bool {
        self.singletons.binary_search(&item).is_ok()
    }

    pub fn sums(&self, item: usize) -> bool {
        self.sum.binary_search(&item).is_ok()
    }

    /// Every item the server touches, sorted.
    pub fn all_items(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.singletons.iter().chain(&self.sum).copied().collect();
        all.sort_unstable();
        all
    }

    fn to_server(&self, t: usize, p: usize) -> Result<Server> {
        if self.is_singleton() {
            Server::singleton(&self.singletons, t, p)
        } else {
            Server::with_sum(&self.singletons, &self.sum, t, p)
        }
    }
}

/// Materialized column order: singleton servers first, then sum servers,
/// each group lexicographic; copies of one server are adjacent.
pub(crate) struct Layout {
    pub specs: Vec<ServerSpec>,
    ranges: HashMap<ServerSpec, Range<usize>>,
}

impl Layout {
    pub fn new(mut distinct: Vec<(ServerSpec, usize)>) -> Self {
        distinct.sort_by(|(a, _), (b, _)| {
            (!a.is_singleton(), &a.singletons, &a.sum).cmp(&(
                !b.is_singleton(),
                &b.singletons,
                &b.sum,
            ))
        });
        let total = distinct.iter().map(|(_, n)| n).sum();
        let mut specs = Vec::with_capacity(total);
        let mut ranges = HashMap::with_capacity(distinct.len());
        for (spec, copies) in distinct {
            let start = specs.len();
            specs.extend(std::iter::repeat_n(spec.clone(), copies));
            ranges.insert(spec, start..start + copies);
        }
        Self { specs, ranges }
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    /// Column indices holding copies of `spec`.
    pub fn columns_of(&self, spec: &ServerSpec) -> Option<Range<usize>> {
        self.ranges.get(spec).cloned()
    }

    pub fn build_code(&self, field: PrimeField, t: usize, p: usize) -> Result<ArrayCode> {
        let columns = self
            .specs
            .iter()
            .map(|s| s.to_server(t, p))
            .collect::<Result<Vec<_>>>()?;
        ArrayCode::new(field, t, p, columns)
    }

    /// Columns storing `item` as a singleton, each as a one-element subset.
    pub fn singleton_subsets(&self, item: usize) -> Vec<Vec<usize>> {
        self.specs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.has_singleton(item))
            .map(|(j, _)| vec![j])
            .collect()
    }
}

pub(crate) fn pair(a: usize, b: usize) -> Vec<usize> {
    if a < b {
        vec![a, b]
    } else {
        vec![b, a]
    }
}
