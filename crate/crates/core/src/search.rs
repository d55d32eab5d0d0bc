//! Exhaustive parent-set search over DAGs compatible with a node order.
//!
//! Every (node, candidate parent set) pair is counted once per dataset and
//! kept in a [`CandidateTable`], so several penalties and the complexity
//! profile can be evaluated without recounting.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::data::{count_sufficient_stats, Dataset};
use crate::error::{Error, Result};
use crate::model::{node_df, Dag, NodeOrder};
use crate::num::Real;
use crate::scoring::{lambda_value, node_nal, NodeScore, Penalty};

/// Default in-degree bound.
pub const DEFAULT_MAX_PARENTS: usize = 3;

/// Order-compatible DAGs with bounded in-degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpace {
    order: NodeOrder,
    max_parents: usize,
    candidates: Vec<Vec<Vec<usize>>>,
}

/// Subsets of `items` (sorted) of size at most `max`, by size then lexicographic.
pub fn subsets_by_size(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for size in 1..=max.min(items.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&i| items[i]).collect());
            // advance the rightmost index that can move
            let Some(pos) = (0..size).rev().find(|&p| idx[p] < items.len() - size + p) else {
                break;
            };
            idx[pos] += 1;
            for q in pos + 1..size {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    out
}

impl SearchSpace {
    pub fn new(order: NodeOrder, max_parents: usize) -> Self {
        let candidates = (0..order.len())
            .map(|i| subsets_by_size(&order.predecessors(i), max_parents))
            .collect();
        Self {
            order,
            max_parents,
            candidates,
        }
    }

    pub fn identity(num_nodes: usize, max_parents: usize) -> Self {
        Self::new(NodeOrder::identity(num_nodes), max_parents)
    }

    pub fn order(&self) -> &NodeOrder {
        &self.order
    }

    pub fn max_parents(&self) -> usize {
        self.max_parents
    }

    pub fn num_nodes(&self) -> usize {
        self.order.len()
    }

    pub fn candidates(&self, node: usize) -> &[Vec<usize>] {
        &self.candidates[node]
    }

    pub fn all_candidates(&self) -> &[Vec<Vec<usize>>] {
        &self.candidates
    }

    /// Number of DAGs in the space, saturating.
    pub fn num_dags(&self) -> u128 {
        self.candidates
            .iter()
            .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128))
    }

    /// Every DAG of the space, in mixed-radix order of candidate indices
    /// (node 0 slowest). Intended for small spaces.
    pub fn enumerate_dags(&self) -> Vec<Dag> {
        let n = self.num_nodes();
        let mut idx = vec![0usize; n];
        let mut out = Vec::new();
        loop {
            let parents = (0..n).map(|i| self.candidates[i][idx[i]].clone()).collect();
            out.push(Dag::new(parents).expect("order-compatible"));
            let Some(pos) = (0..n).rev().find(|&p| idx[p] + 1 < self.candidates[p].len()) else {
                break;
            };
            idx[pos] += 1;
            idx[pos + 1..].iter_mut().for_each(|v| *v = 0);
        }
        out
    }
}

/// One point of the complexity profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePoint<T = f64> {
    /// Total complexity `df`.
    pub t: u64,
    /// Best NAL among DAGs with `df = t`.
    pub best_score: T,
    pub dag: Dag,
}

/// NAL and complexity of one candidate parent set.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateStat<T = f64> {
    pub parents: Vec<usize>,
    pub nal: T,
    pub n_i: u64,
    pub df: u64,
}

/// Memoized candidate statistics for one dataset and search space.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateTable<T = f64> {
    n: u64,
    nodes: Vec<Vec<CandidateStat<T>>>,
}

/// `a` beats `b`: higher score, then smaller df, then smaller parent list.
fn beats<T: Real>(a: &NodeScore<T>, b: &NodeScore<T>) -> bool {
    if a.score != b.score {
        return a.score > b.score;
    }
    if a.df != b.df {
        return a.df < b.df;
    }
    a.parents < b.parents
}

fn check_schema(data: &Dataset, space: &SearchSpace) -> Result<()> {
    if data.num_vars() != space.num_nodes() {
        return Err(Error::SchemaMismatch(format!(
            "dataset has {} columns, search space has {} nodes",
            data.num_vars(),
            space.num_nodes()
        )));
    }
    Ok(())
}

fn stat<T: Real>(data: &Dataset, node: usize, parents: &[usize]) -> Result<CandidateStat<T>> {
    let c = count_sufficient_stats(data, node, parents)?;
    Ok(CandidateStat {
        nal: node_nal(&c),
        n_i: c.n_i,
        df: node_df(node, parents, data.variables()),
        parents: parents.to_vec(),
    })
}

fn scored<T: Real>(node: usize, c: &CandidateStat<T>, penalty: &Penalty<T>) -> Result<NodeScore<T>> {
    let score = if c.n_i == 0 {
        T::neg_infinity()
    } else {
        c.nal - lambda_value(penalty, c.n_i)? * T::from_count(c.df)
    };
    Ok(NodeScore {
        node,
        parents: c.parents.clone(),
        nal: c.nal,
        n_i: c.n_i,
        df: c.df,
        score,
    })
}

fn pick_best<T: Real>(node: usize, stats: &[CandidateStat<T>], penalty: &Penalty<T>) -> Result<NodeScore<T>> {
    let mut best: Option<NodeScore<T>> = None;
    for c in stats {
        let s = scored(node, c, penalty)?;
        if s.score == T::neg_infinity() {
            continue;
        }
        if best.as_ref().is_none_or(|b| beats(&s, b)) {
            best = Some(s);
        }
    }
    best.ok_or(Error::AllCandidatesUnobservable(node))
}

impl<T: Real> CandidateTable<T> {
    /// Counts every candidate of every node, in parallel.
    pub fn build(data: &Dataset, space: &SearchSpace) -> Result<Self> {
        check_schema(data, space)?;
        let jobs: Vec<(usize, &Vec<usize>)> = space
            .all_candidates()
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.iter().map(move |p| (i, p)))
            .collect();
        let stats: Vec<CandidateStat<T>> = jobs
            .par_iter()
            .map(|&(i, p)| stat(data, i, p))
            .collect::<Result<_>>()?;
        let mut nodes: Vec<Vec<CandidateStat<T>>> = vec![Vec::new(); space.num_nodes()];
        for ((i, _), s) in jobs.into_iter().zip(stats) {
            nodes[i].push(s);
        }
        Ok(Self {
            n: data.len() as u64,
            nodes,
        })
    }

    /// Dataset size the table was built from.
    pub fn sample_size(&self) -> u64 {
        self.n
    }

    pub fn node(&self, i: usize) -> &[CandidateStat<T>] {
        &self.nodes[i]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn best(&self, node: usize, penalty: &Penalty<T>) -> Result<NodeScore<T>> {
        if node >= self.nodes.len() {
            return Err(Error::IndexOutOfRange {
                index: node,
                limit: self.nodes.len(),
            });
        }
        pick_best(node, &self.nodes[node], penalty)
    }

    /// Per-node winners under the decomposable score.
    pub fn learn_detailed(&self, penalty: &Penalty<T>) -> Result<Vec<NodeScore<T>>> {
        (0..self.nodes.len()).map(|i| self.best(i, penalty)).collect()
    }

    pub fn learn(&self, penalty: &Penalty<T>) -> Result<Dag> {
        let parents = self
            .learn_detailed(penalty)?
            .into_iter()
            .map(|s| s.parents)
            .collect();
        Dag::new(parents)
    }

    /// Best NAL at each achievable total complexity.
    pub fn profile(&self) -> Result<Vec<ProfilePoint<T>>> {
        // per node: best candidate at each df (ties to the smaller parent list)
        let mut fronts: Vec<Vec<(u64, T, usize)>> = Vec::with_capacity(self.nodes.len());
        for (i, stats) in self.nodes.iter().enumerate() {
            let mut by_df: BTreeMap<u64, usize> = BTreeMap::new();
            for (c, s) in stats.iter().enumerate() {
                if s.n_i == 0 {
                    continue;
                }
                by_df
                    .entry(s.df)
                    .and_modify(|cur| {
                        let o = &stats[*cur];
                        if s.nal > o.nal || (s.nal == o.nal && s.parents < o.parents) {
                            *cur = c;
                        }
                    })
                    .or_insert(c);
            }
            if by_df.is_empty() {
                return Err(Error::AllCandidatesUnobservable(i));
            }
            fronts.push(by_df.into_iter().map(|(df, c)| (df, stats[c].nal, c)).collect());
        }

        // knapsack over exact total df; ties go to the lexicographically
        // smaller sequence of parent lists, which prefix-extension preserves
        let mut table: BTreeMap<u64, (T, Vec<usize>)> = BTreeMap::new();
        table.insert(0, (T::zero(), Vec::new()));
        for (i, front) in fronts.iter().enumerate() {
            let mut next: BTreeMap<u64, (T, Vec<usize>)> = BTreeMap::new();
            for (&t, (score, picks)) in &table {
                for &(df, nal, c) in front {
                    let s = *score + nal;
                    let key = t + df;
                    let replace = match next.get(&key) {
                        None => true,
                        Some((cur, cur_picks)) => {
                            s > *cur || (s == *cur && self.prefix_less(picks, c, cur_picks, i))
                        }
                    };
                    if replace {
                        let mut p = picks.clone();
                        p.push(c);
                        next.insert(key, (s, p));
                    }
                }
            }
            table = next;
        }
        table
            .into_iter()
            .map(|(t, (best_score, picks))| {
                let parents = picks
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| self.nodes[i][c].parents.clone())
                    .collect();
                Ok(ProfilePoint {
                    t,
                    best_score,
                    dag: Dag::new(parents)?,
                })
            })
            .collect()
    }

    fn prefix_less(&self, picks: &[usize], last: usize, other: &[usize], node: usize) -> bool {
        for (i, (&a, &b)) in picks.iter().zip(other).enumerate() {
            let (pa, pb) = (&self.nodes[i][a].parents, &self.nodes[i][b].parents);
            if pa != pb {
                return pa < pb;
            }
        }
        self.nodes[node][last].parents < self.nodes[node][other[node]].parents
    }

    /// Global-penalty estimate `argmax_t best_score(t) − λ_n·t`, ties to smaller `t`.
    pub fn learn_global(&self, penalty: &Penalty<T>) -> Result<ProfilePoint<T>> {
        let profile = self.profile()?;
        select_from_profile(&profile, penalty, self.n).cloned()
    }
}

/// Picks the profile point maximizing `best_score − λ_n·t`.
pub fn select_from_profile<'a, T: Real>(
    profile: &'a [ProfilePoint<T>],
    penalty: &Penalty<T>,
    n: u64,
) -> Result<&'a ProfilePoint<T>> {
    let lambda = lambda_value(penalty, n)?;
    let mut best: Option<(&ProfilePoint<T>, T)> = None;
    for p in profile {
        let s = p.best_score - lambda * T::from_count(p.t);
        // profile is sorted by t, so strict improvement keeps the smaller t on ties
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((p, s));
        }
    }
    best.map(|(p, _)| p).ok_or(Error::AllCandidatesUnobservable(0))
}

/// Highest-scoring parent set of one node.
pub fn best_parent_set<T: Real>(
    data: &Dataset,
    node: usize,
    space: &SearchSpace,
    penalty: &Penalty<T>,
) -> Result<NodeScore<T>> {
    check_schema(data, space)?;
    if node >= space.num_nodes() {
        return Err(Error::IndexOutOfRange {
            index: node,
            limit: space.num_nodes(),
        });
    }
    let stats: Vec<CandidateStat<T>> = space
        .candidates(node)
        .par_iter()
        .map(|p| stat(data, node, p))
        .collect::<Result<_>>()?;
    pick_best(node, &stats, penalty)
}

/// `Ĝ = argmax S(G|D_n)` under the decomposable score.
pub fn learn_structure<T: Real>(data: &Dataset, space: &SearchSpace, penalty: &Penalty<T>) -> Result<Dag> {
    CandidateTable::build(data, space)?.learn(penalty)
}

/// `Ĝ(t)` for every achievable total complexity `t`.
pub fn complexity_profile<T: Real>(data: &Dataset, space: &SearchSpace) -> Result<Vec<ProfilePoint<T>>> {
    CandidateTable::build(data, space)?.profile()
}

/// `Ĝ = argmax S(G|D_n)` under the global score, through the profile.
pub fn learn_structure_global<T: Real>(data: &Dataset, space: &SearchSpace, penalty: &Penalty<T>) -> Result<Dag> {
    Ok(CandidateTable::build(data, space)?.learn_global(penalty)?.dag)
}
