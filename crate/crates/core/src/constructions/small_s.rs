//! Optimal-rate codes for `1 < s <= 2` with the minimum number of servers.
//!
//! With `p = t + d`, `ω = gcd(d² + d, p(2d + 1))` split as `ω = ω₁ω₂`
//! (`ω₁ | d`, `ω₂ | d + 1`), `d = ω₁d₁`, `d + 1 = ω₂d₂` and `p = μω`, the
//! code uses
//!
//! * singleton servers `Ā_j` for `0 <= j < μω₂`, each repeated `d₂` times,
//!   where `A_j = {j + α + βμω₂ : α < d₁, β < ω₁}` is the set of items the
//!   server does *not* store;
//! * Σ-servers `ΣB_j` for `0 <= j < μω₁`, each repeated `d₁` times, storing
//!   every item outside `B_j = {j + γd₁ + λμω₁ : γ < d₂, λ < ω₂}` as a
//!   singleton and the sum of `B_j` in the last cell.
//!
//! All indices are taken mod `p`. For an item `i`, the singleton servers and
//! Σ-servers that miss `i` are paired by a maximum matching on the graph
//! joining `Ā_a` and `ΣB_b` whenever `A_a ∩ B_b = {i}`.

use num_integer::Integer;
use rayon::prelude::*;

use crate::code::{ArrayCode, Witness};
use crate::error::{Error, Result};
use crate::matching::{is_perfect, max_matching, BipartiteGraph};

use super::layout::{pair, Layout, ServerSpec};
use super::BuildOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SmallSParams {
    pub t: usize,
    pub d: usize,
    pub p: usize,
    pub omega: usize,
    pub omega1: usize,
    pub omega2: usize,
    pub d1: usize,
    pub d2: usize,
    pub mu: usize,
    /// Number of servers, `μ(2d + 1)`.
    pub m: usize,
    /// Servers per item, `(d² + 2td + t) / ω`.
    pub k: usize,
}

pub fn small_s_params(t: usize, d: usize) -> Result<SmallSParams> {
    if t < 2 || d < 1 || d > t {
        return Err(Error::InvalidParameters(format!(
            "need t >= 2 and 1 <= d <= t, got t = {t}, d = {d}"
        )));
    }
    if t + d <= d * d {
        return Err(Error::InvalidParameters(format!(
            "need t > d² - d, got t = {t}, d = {d}"
        )));
    }
    let p = t + d;
    let omega = (d * d + d).gcd(&(p * (2 * d + 1)));
    let omega1 = omega.gcd(&d);
    let omega2 = omega.gcd(&(d + 1));
    if omega1 * omega2 != omega || p % omega != 0 || (d * d + 2 * t * d + t) % omega != 0 {
        return Err(Error::Internal(format!(
            "integrality failed for t = {t}, d = {d}"
        )));
    }
    let mu = p / omega;
    Ok(SmallSParams {
        t,
        d,
        p,
        omega,
        omega1,
        omega2,
        d1: d / omega1,
        d2: (d + 1) / omega2,
        mu,
        m: mu * (2 * d + 1),
        k: (d * d + 2 * t * d + t) / omega,
    })
}

impl SmallSParams {
    /// Number of distinct singleton servers, `μω₂`.
    pub fn singleton_classes(&self) -> usize {
        self.mu * self.omega2
    }

    /// Number of distinct Σ-servers, `μω₁`.
    pub fn sigma_classes(&self) -> usize {
        self.mu * self.omega1
    }

    /// `A_j`, sorted.
    pub fn a_set(&self, j: usize) -> Vec<usize> {
        let mut set: Vec<usize> = (0..self.omega1)
            .flat_map(|beta| {
                (0..self.d1).map(move |alpha| (j + alpha + beta * self.mu * self.omega2) % self.p)
            })
            .collect();
        set.sort_unstable();
        set
    }

    /// `B_j`, sorted.
    pub fn b_set(&self, j: usize) -> Vec<usize> {
        let mut set: Vec<usize> = (0..self.omega2)
            .flat_map(|lambda| {
                (0..self.d2).map(move |gamma| {
                    (j + gamma * self.d1 + lambda * self.mu * self.omega1) % self.p
                })
            })
            .collect();
        set.sort_unstable();
        set
    }

    /// The second Σ-index whose server can lose edges when `t < d²`,
    /// `μω₁ - d₁(d₂ - 1)`.
    pub fn special_sigma_index(&self) -> usize {
        self.mu * self.omega1 - self.d1 * (self.d2 - 1)
    }

    fn complement(&self, set: &[usize]) -> Vec<usize> {
        (0..self.p)
            .filter(|x| set.binary_search(x).is_err())
            .collect()
    }
}

/// The pairing graph for one item, on server classes with multiplicity.
#[derive(Clone, Debug)]
pub struct ItemGraph {
    pub graph: BipartiteGraph,
    /// Σ-index `j` of each left vertex (a copy of `ΣB_j` with `item ∈ B_j`).
    pub sigma_index: Vec<usize>,
    /// Index `j` of each right vertex (a copy of `Ā_j` with `item ∈ A_j`).
    pub singleton_index: Vec<usize>,
}

fn intersection_len(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|x| b.binary_search(x).is_ok()).count()
}

/// Builds the bipartite graph between the Σ-servers and singleton servers
/// that miss `item`: `ΣB_b` joins `Ā_a` iff `A_a ∩ B_b = {item}`.
pub fn small_s_item_graph(params: &SmallSParams, item: usize) -> ItemGraph {
    let mut sigma_index = Vec::new();
    for j in 0..params.sigma_classes() {
        if params.b_set(j).binary_search(&item).is_ok() {
            sigma_index.extend(std::iter::repeat_n(j, params.d1));
        }
    }
    let mut singleton_index = Vec::new();
    for j in 0..params.singleton_classes() {
        if params.a_set(j).binary_search(&item).is_ok() {
            singleton_index.extend(std::iter::repeat_n(j, params.d2));
        }
    }
    let mut graph = BipartiteGraph::new(sigma_index.len(), singleton_index.len());
    for (u, &b) in sigma_index.iter().enumerate() {
        let b_set = params.b_set(b);
        for (v, &a) in singleton_index.iter().enumerate() {
            if intersection_len(&params.a_set(a), &b_set) == 1 {
                graph.add_edge(u, v).expect("indices in range");
            }
        }
    }
    graph.finish();
    ItemGraph {
        graph,
        sigma_index,
        singleton_index,
    }
}

pub fn construct_small_s(t: usize, d: usize, opts: &BuildOptions) -> Result<(ArrayCode, Witness)> {
    let params = small_s_params(t, d)?;
    opts.guard(&params.m.into())?;

    let mut distinct = Vec::with_capacity(params.singleton_classes() + params.sigma_classes());
    for j in 0..params.singleton_classes() {
        let stored = params.complement(&params.a_set(j));
        distinct.push((ServerSpec::singleton(stored), params.d2));
    }
    for j in 0..params.sigma_classes() {
        let b = params.b_set(j);
        distinct.push((ServerSpec::with_sum(params.complement(&b), b), params.d1));
    }
    let layout = Layout::new(distinct);
    let code = layout.build_code(opts.field, t, params.p)?;

    let items = (0..params.p)
        .into_par_iter()
        .map(|i| item_subsets(&layout, i))
        .collect::<Result<Vec<_>>>()?;
    Ok((code, Witness::new(items)))
}

fn item_subsets(layout: &Layout, item: usize) -> Result<Vec<Vec<usize>>> {
    let mut subsets = layout.singleton_subsets(item);
    let sigma: Vec<usize> = (0..layout.len())
        .filter(|&j| layout.specs[j].sums(item))
        .collect();
    let singles: Vec<usize> = (0..layout.len())
        .filter(|&j| layout.specs[j].is_singleton() && !layout.specs[j].has_singleton(item))
        .collect();

    let mut graph = BipartiteGraph::new(sigma.len(), singles.len());
    for (u, &cs) in sigma.iter().enumerate() {
        let sum = &layout.specs[cs].sum;
        for (v, &cy) in singles.iter().enumerate() {
            let stored = &layout.specs[cy].singletons;
            // The pair spans x_item iff item is the only summand the
            // singleton server does not know.
            let unknown = sum
                .iter()
                .filter(|x| stored.binary_search(x).is_err())
                .count();
            if unknown == 1 {
                graph.add_edge(u, v)?;
            }
        }
    }
    graph.finish();
    let matching = max_matching(&graph);
    if !is_perfect(&graph, &matching) {
        return Err(Error::Internal(format!(
            "no perfect pairing for item {item}: {} of {}x{}",
            matching.len(),
            sigma.len(),
            singles.len()
        )));
    }
    subsets.extend(
        matching
            .pairs()
            .iter()
            .map(|&(u, v)| pair(sigma[u], singles[v])),
    );
    Ok(subsets)
}
