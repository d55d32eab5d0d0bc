//! Variables, DAGs, conditional probability tables and network complexity.
//!
//! Categories are dense codes `0..q`. A parent configuration of a node is
//! indexed row-major over its parents in ascending node order, the last
//! parent varying fastest.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;

/// Largest supported cardinality; one code is reserved for the missing marker.
pub const MAX_CARDINALITY: usize = u16::MAX as usize - 1;

/// A categorical variable with `cardinality` states.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub cardinality: usize,
}

impl Variable {
    pub fn new(name: impl Into<String>, cardinality: usize) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidVariable {
                name,
                reason: "empty name".into(),
            });
        }
        if !(2..=MAX_CARDINALITY).contains(&cardinality) {
            return Err(Error::InvalidVariable {
                name,
                reason: format!("cardinality {cardinality} outside 2..={MAX_CARDINALITY}"),
            });
        }
        Ok(Self { name, cardinality })
    }

    /// `count` binary variables named `X1..Xcount`.
    pub fn binary_set(count: usize) -> Vec<Variable> {
        (0..count)
            .map(|i| Variable {
                name: format!("X{}", i + 1),
                cardinality: 2,
            })
            .collect()
    }
}

/// Checks that names are unique and every variable is itself valid.
pub fn validate_variables(vars: &[Variable]) -> Result<()> {
    let mut seen = HashSet::new();
    for v in vars {
        Variable::new(v.name.clone(), v.cardinality)?;
        if !seen.insert(v.name.as_str()) {
            return Err(Error::InvalidVariable {
                name: v.name.clone(),
                reason: "duplicate name".into(),
            });
        }
    }
    Ok(())
}

/// Validates raw parent lists: in-range, sorted, unique, no self loops, acyclic.
pub fn validate_dag(parents: &[Vec<usize>]) -> Result<()> {
    let n = parents.len();
    for (node, ps) in parents.iter().enumerate() {
        if ps.iter().any(|&p| p >= n || p == node) {
            return Err(Error::MalformedParents(node));
        }
        if ps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedParents(node));
        }
    }
    if let Some(cycle) = find_cycle(parents) {
        return Err(Error::CycleDetected(cycle));
    }
    Ok(())
}

/// Returns a cycle as a node path (first node repeated at the end), if any.
fn find_cycle(parents: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let n = parents.len();
    let mut mark = vec![Mark::New; n];
    // Walk parent links; a back edge to an active node closes a cycle.
    for start in 0..n {
        if mark[start] != Mark::New {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        mark[start] = Mark::Active;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if *next < parents[node].len() {
                let p = parents[node][*next];
                *next += 1;
                match mark[p] {
                    Mark::New => {
                        mark[p] = Mark::Active;
                        stack.push((p, 0));
                    }
                    Mark::Active => {
                        let pos = stack.iter().position(|&(v, _)| v == p).unwrap();
                        // stack holds child -> parent links; report in edge direction.
                        let mut path: Vec<usize> = stack[pos..].iter().map(|&(v, _)| v).collect();
                        path.reverse();
                        path.push(path[0]);
                        return Some(path);
                    }
                    Mark::Done => {}
                }
            } else {
                mark[node] = Mark::Done;
                stack.pop();
            }
        }
    }
    None
}

/// A directed acyclic graph stored as sorted parent lists.
///
/// Always valid once constructed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dag {
    parents: Vec<Vec<usize>>,
}

impl Dag {
    pub fn new(parents: Vec<Vec<usize>>) -> Result<Self> {
        validate_dag(&parents)?;
        Ok(Self { parents })
    }

    /// Builds from possibly unsorted parent lists.
    pub fn from_unsorted(mut parents: Vec<Vec<usize>>) -> Result<Self> {
        for ps in &mut parents {
            ps.sort_unstable();
        }
        Self::new(parents)
    }

    pub fn empty(num_nodes: usize) -> Self {
        Self {
            parents: vec![Vec::new(); num_nodes],
        }
    }

    /// Builds from `(parent, child)` edges.
    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut parents = vec![Vec::new(); num_nodes];
        for &(from, to) in edges {
            if to >= num_nodes || from >= num_nodes {
                return Err(Error::IndexOutOfRange {
                    index: from.max(to),
                    limit: num_nodes,
                });
            }
            parents[to].push(from);
        }
        for ps in &mut parents {
            ps.sort_unstable();
            ps.dedup();
        }
        Self::new(parents)
    }

    pub fn num_nodes(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, node: usize) -> &[usize] {
        &self.parents[node]
    }

    pub fn parent_sets(&self) -> &[Vec<usize>] {
        &self.parents
    }

    pub fn into_parent_sets(self) -> Vec<Vec<usize>> {
        self.parents
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.parents[to].binary_search(&from).is_ok()
    }

    /// Directed edges `(parent, child)` ordered by child then parent.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(child, ps)| ps.iter().map(move |&p| (p, child)))
    }

    pub fn num_edges(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// Topological order, choosing the lowest available index first.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.num_nodes();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut children = vec![Vec::new(); n];
        for (p, c) in self.edges() {
            children[p].push(c);
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(node) = ready.pop_first() {
            order.push(node);
            for &c in &children[node] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        order
    }

    /// True iff every edge of `self` is also an edge of `other`.
    pub fn is_subgraph_of(&self, other: &Dag) -> Result<bool> {
        is_subgraph(self, other)
    }

    pub fn is_compatible_with(&self, order: &NodeOrder) -> bool {
        self.num_nodes() == order.len()
            && self
                .edges()
                .all(|(p, c)| order.rank(p) < order.rank(c))
    }
}

/// Partial order on DAGs: `g1 ⊆ g2` iff all edges of `g1` are in `g2`.
pub fn is_subgraph(g1: &Dag, g2: &Dag) -> Result<bool> {
    if g1.num_nodes() != g2.num_nodes() {
        return Err(Error::NodeCountMismatch {
            left: g1.num_nodes(),
            right: g2.num_nodes(),
        });
    }
    Ok(g1.edges().all(|(p, c)| g2.has_edge(p, c)))
}

/// A causality order: a permutation of node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeOrder {
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl NodeOrder {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut rank = vec![usize::MAX; n];
        for (pos, &node) in order.iter().enumerate() {
            if node >= n || rank[node] != usize::MAX {
                return Err(Error::InvalidOrder(format!("{order:?} is not a permutation")));
            }
            rank[node] = pos;
        }
        Ok(Self { order, rank })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
            rank: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }

    /// Position of `node` in the order.
    pub fn rank(&self, node: usize) -> usize {
        self.rank[node]
    }

    /// Nodes that precede `node`, sorted by index.
    pub fn predecessors(&self, node: usize) -> Vec<usize> {
        let mut p = self.order[..self.rank[node]].to_vec();
        p.sort_unstable();
        p
    }
}

/// Number of joint states of `parents` (1 for the empty set).
pub fn parent_config_count(parents: &[usize], vars: &[Variable]) -> usize {
    parents.iter().map(|&p| vars[p].cardinality).product()
}

/// `q(Pa_i)·(q(X_i)−1)`.
pub fn node_df(node: usize, parents: &[usize], vars: &[Variable]) -> u64 {
    (parent_config_count(parents, vars) * (vars[node].cardinality - 1)) as u64
}

/// Total parameter count `Σ_i q(Pa_i)(q(X_i)−1)`.
pub fn df_complexity(dag: &Dag, vars: &[Variable]) -> Result<u64> {
    if dag.num_nodes() != vars.len() {
        return Err(Error::NodeCountMismatch {
            left: dag.num_nodes(),
            right: vars.len(),
        });
    }
    Ok((0..dag.num_nodes())
        .map(|i| node_df(i, dag.parents(i), vars))
        .sum())
}

/// Parent configuration index of a full assignment `state` (indexed by node).
pub fn config_index(parents: &[usize], vars: &[Variable], state: &[usize]) -> usize {
    parents
        .iter()
        .fold(0, |j, &p| j * vars[p].cardinality + state[p])
}

/// Conditional probability tables: `tables[i][j][k] = P(X_i = k | Pa_i = j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt<T = f64> {
    tables: Vec<Vec<Vec<T>>>,
}

impl<T: Real> Cpt<T> {
    /// Checks entries lie in `[0,1]` and rows sum to one. Never renormalizes.
    pub fn new(tables: Vec<Vec<Vec<T>>>) -> Result<Self> {
        let tol = T::row_sum_tolerance();
        for (node, rows) in tables.iter().enumerate() {
            for (j, row) in rows.iter().enumerate() {
                let bad_entry = row
                    .iter()
                    .any(|&p| !(p >= T::zero() && p <= T::one()));
                let sum: T = row.iter().copied().sum();
                if bad_entry || (sum - T::one()).abs() > tol {
                    return Err(Error::InvalidCpt {
                        node,
                        name: format!("#{node}"),
                        reason: format!("row {j} is not a probability vector (sum {sum})"),
                    });
                }
            }
        }
        Ok(Self { tables })
    }

    /// Builds after dividing every row by its sum. Rows must have positive mass.
    pub fn normalized(mut tables: Vec<Vec<Vec<T>>>) -> Result<Self> {
        for (node, rows) in tables.iter_mut().enumerate() {
            for (j, row) in rows.iter_mut().enumerate() {
                let sum: T = row.iter().copied().sum();
                if !(sum > T::zero()) || row.iter().any(|&p| p < T::zero()) {
                    return Err(Error::InvalidCpt {
                        node,
                        name: format!("#{node}"),
                        reason: format!("row {j} cannot be normalized"),
                    });
                }
                for p in row.iter_mut() {
                    *p = *p / sum;
                }
            }
        }
        Self::new(tables)
    }

    pub fn num_nodes(&self) -> usize {
        self.tables.len()
    }

    pub fn node(&self, i: usize) -> &[Vec<T>] {
        &self.tables[i]
    }

    pub fn row(&self, i: usize, j: usize) -> &[T] {
        &self.tables[i][j]
    }

    pub fn prob(&self, i: usize, j: usize, k: usize) -> T {
        self.tables[i][j][k]
    }

    pub fn tables(&self) -> &[Vec<Vec<T>>] {
        &self.tables
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> Cpt<U> {
        Cpt {
            tables: self
                .tables
                .iter()
                .map(|rows| rows.iter().map(|r| r.iter().map(|&p| f(p)).collect()).collect())
                .collect(),
        }
    }
}

/// A discrete Bayesian network `(G, P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet<T = f64> {
    variables: Vec<Variable>,
    dag: Dag,
    cpt: Cpt<T>,
}

impl<T: Real> BayesNet<T> {
    pub fn new(variables: Vec<Variable>, dag: Dag, cpt: Cpt<T>) -> Result<Self> {
        validate_variables(&variables)?;
        if dag.num_nodes() != variables.len() {
            return Err(Error::NodeCountMismatch {
                left: dag.num_nodes(),
                right: variables.len(),
            });
        }
        if cpt.num_nodes() != variables.len() {
            return Err(Error::NodeCountMismatch {
                left: cpt.num_nodes(),
                right: variables.len(),
            });
        }
        for (i, var) in variables.iter().enumerate() {
            let rows = cpt.node(i);
            let configs = parent_config_count(dag.parents(i), &variables);
            let shape_err = |reason: String| Error::InvalidCpt {
                node: i,
                name: var.name.clone(),
                reason,
            };
            if rows.len() != configs {
                return Err(shape_err(format!(
                    "expected {configs} rows, found {}",
                    rows.len()
                )));
            }
            if let Some((j, r)) = rows
                .iter()
                .enumerate()
                .find(|(_, r)| r.len() != var.cardinality)
            {
                return Err(shape_err(format!(
                    "row {j} has {} entries, expected {}",
                    r.len(),
                    var.cardinality
                )));
            }
        }
        Ok(Self {
            variables,
            dag,
            cpt,
        })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpt(&self) -> &Cpt<T> {
        &self.cpt
    }

    pub fn num_nodes(&self) -> usize {
        self.variables.len()
    }

    pub fn df(&self) -> u64 {
        df_complexity(&self.dag, &self.variables).expect("shapes checked on construction")
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.variables.iter().map(|v| v.cardinality).collect()
    }

    /// Converts the parameter type, e.g. to `f32`.
    pub fn cast<U: Real>(&self) -> BayesNet<U> {
        BayesNet {
            variables: self.variables.clone(),
            dag: self.dag.clone(),
            cpt: self.cpt.map(|p| U::lit(p.as_f64())),
        }
    }
}
