//! DAG equivalence (same skeleton and v-structures) and edge F-scores.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::Dag;

/// Undirected edges stored as `(min, max)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Skeleton {
    edges: BTreeSet<(usize, usize)>,
}

impl Skeleton {
    pub fn of(dag: &Dag) -> Self {
        Self {
            edges: dag.edges().map(|(a, b)| (a.min(b), a.max(b))).collect(),
        }
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Unshielded colliders `(x, z, y)` with `x < y` and `x → z ← y`.
pub fn v_structures(dag: &Dag) -> BTreeSet<(usize, usize, usize)> {
    let skel = Skeleton::of(dag);
    let mut out = BTreeSet::new();
    for z in 0..dag.num_nodes() {
        let pa = dag.parents(z);
        for (a, &x) in pa.iter().enumerate() {
            for &y in &pa[a + 1..] {
                if !skel.adjacent(x, y) {
                    out.insert((x, z, y));
                }
            }
        }
    }
    out
}

fn same_size(a: &Dag, b: &Dag) -> Result<()> {
    if a.num_nodes() != b.num_nodes() {
        return Err(Error::NodeCountMismatch {
            left: a.num_nodes(),
            right: b.num_nodes(),
        });
    }
    Ok(())
}

/// Markov equivalence.
pub fn dags_equivalent(g1: &Dag, g2: &Dag) -> Result<bool> {
    same_size(g1, g2)?;
    Ok(Skeleton::of(g1) == Skeleton::of(g2) && v_structures(g1) == v_structures(g2))
}

/// Directed-edge confusion counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeConfusion {
    pub true_positive: usize,
    pub false_positive: usize,
    pub false_negative: usize,
}

impl EdgeConfusion {
    pub fn between(truth: &Dag, estimate: &Dag) -> Result<Self> {
        same_size(truth, estimate)?;
        let tp = estimate.edges().filter(|&(a, b)| truth.has_edge(a, b)).count();
        Ok(Self {
            true_positive: tp,
            false_positive: estimate.num_edges() - tp,
            false_negative: truth.num_edges() - tp,
        })
    }

    /// `None` when the estimate has no edges.
    pub fn precision(&self) -> Option<f64> {
        let d = self.true_positive + self.false_positive;
        (d > 0).then(|| self.true_positive as f64 / d as f64)
    }

    /// `None` when the truth has no edges.
    pub fn recall(&self) -> Option<f64> {
        let d = self.true_positive + self.false_negative;
        (d > 0).then(|| self.true_positive as f64 / d as f64)
    }

    pub fn f_score(&self) -> f64 {
        let tp = self.true_positive as f64;
        if self.true_positive == 0 {
            return if self.false_positive + self.false_negative == 0 { 1.0 } else { 0.0 };
        }
        // 2PR/(P+R) simplified
        2.0 * tp / (2.0 * tp + self.false_positive as f64 + self.false_negative as f64)
    }
}

/// Harmonic mean of directed-edge precision and recall.
pub fn edge_f_score(truth: &Dag, estimate: &Dag) -> Result<f64> {
    Ok(EdgeConfusion::between(truth, estimate)?.f_score())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dag(n: usize, edges: &[(usize, usize)]) -> Dag {
        Dag::from_edges(n, edges).unwrap()
    }

    #[test]
    fn equivalence_examples() {
        assert!(dags_equivalent(&dag(2, &[(0, 1)]), &dag(2, &[(1, 0)])).unwrap());
        let collider = dag(3, &[(0, 2), (1, 2)]);
        let chain = dag(3, &[(0, 2), (2, 1)]);
        assert!(!dags_equivalent(&collider, &chain).unwrap());
        assert!(dags_equivalent(&collider, &collider).unwrap());
        assert!(dags_equivalent(&dag(3, &[(0, 1), (1, 2)]), &dag(3, &[(2, 1), (1, 0)])).unwrap());
        assert!(dags_equivalent(&Dag::empty(2), &Dag::empty(3)).is_err());
    }

    #[test]
    fn shielded_collider_is_not_a_v_structure() {
        assert!(v_structures(&dag(3, &[(0, 1), (0, 2), (1, 2)])).is_empty());
        assert_eq!(v_structures(&dag(3, &[(0, 2), (1, 2)])).len(), 1);
    }

    #[test]
    fn f_score_examples() {
        let chain = dag(2, &[(0, 1)]);
        assert_eq!(edge_f_score(&chain, &chain).unwrap(), 1.0);
        assert_eq!(edge_f_score(&chain, &Dag::empty(2)).unwrap(), 0.0);
        assert_eq!(edge_f_score(&Dag::empty(2), &Dag::empty(2)).unwrap(), 1.0);
        let truth = dag(3, &[(0, 1), (1, 2)]);
        let est = dag(3, &[(0, 1), (0, 2)]);
        let c = EdgeConfusion::between(&truth, &est).unwrap();
        assert_eq!(c.precision(), Some(0.5));
        assert_eq!(c.recall(), Some(0.5));
        assert!((c.f_score() - 0.5).abs() < 1e-15);
        // a reversed edge counts as both a false positive and a false negative
        assert_eq!(edge_f_score(&chain, &dag(2, &[(1, 0)])).unwrap(), 0.0);
    }
}
