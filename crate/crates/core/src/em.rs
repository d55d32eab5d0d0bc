//! The one-step EM objective `Q*` whose self-consistent maximizer is the
//! available-case estimate, so that `Q*(θ̂|θ̂) = n·l(G|D_n)`.
//!
//! Only the objective and its closed-form maximizer are provided; there is
//! no iterated EM.

use crate::data::SufficientCounts;
use crate::error::{Error, Result};
use crate::model::Cpt;
use crate::num::{CompensatedSum, Real};

/// Counts plus reference and target parameters of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct QStarNode<T = f64> {
    pub counts: SufficientCounts,
    /// `P'_{i,j}` over parent configurations.
    pub reference_parent: Vec<T>,
    /// `P'_{i,kj}` as `[j][k]`.
    pub reference: Vec<Vec<T>>,
    /// `P_{i,kj}` as `[j][k]`.
    pub target: Vec<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QStarInput<T = f64> {
    pub n: u64,
    pub nodes: Vec<QStarNode<T>>,
}

/// Closed-form maximizer of `Q*`.
#[derive(Debug, Clone, PartialEq)]
pub struct QStarMaximizer<T = f64> {
    /// `P̂_{i,j} = n_{i,j}/n_i`.
    pub parent_probs: Vec<Vec<T>>,
    /// `P̂_{i,kj} = n_{i,kj}/n_{i,j}`, uniform where `n_{i,j} = 0`.
    pub cpt: Cpt<T>,
    /// `(node, parent configuration)` rows set uniform.
    pub undefined: Vec<(usize, usize)>,
}

impl<T: Real> QStarInput<T> {
    /// Input with `P' = P = θ̂` taken from the maximizer.
    pub fn self_consistent(counts: Vec<SufficientCounts>) -> Result<Self> {
        let m = q_star_maximizer::<T>(&counts)?;
        Ok(Self::with_reference(counts, &m, m.cpt.tables().to_vec()))
    }

    /// Input with reference `m` and arbitrary target tables.
    pub fn with_reference(counts: Vec<SufficientCounts>, m: &QStarMaximizer<T>, target: Vec<Vec<Vec<T>>>) -> Self {
        let n = counts.first().map_or(0, |c| c.n);
        let nodes = counts
            .into_iter()
            .zip(target)
            .enumerate()
            .map(|(i, (counts, target))| QStarNode {
                counts,
                reference_parent: m.parent_probs[i].clone(),
                reference: m.cpt.node(i).to_vec(),
                target,
            })
            .collect();
        Self { n, nodes }
    }
}

fn check_vector<T: Real>(v: &[T], node: usize, config: Option<usize>) -> Result<()> {
    let sum: T = v.iter().copied().sum();
    let in_range = v.iter().all(|&p| p >= T::zero() && p <= T::one());
    if !in_range || (sum - T::one()).abs() > T::row_sum_tolerance() * T::lit(16.0) {
        return Err(Error::NonNormalizedParameters { node, config });
    }
    Ok(())
}

fn check_node<T: Real>(i: usize, node: &QStarNode<T>, n: u64) -> Result<()> {
    let c = &node.counts;
    let configs = c.parent_configs();
    if c.n != n || node.reference_parent.len() != configs || node.reference.len() != configs || node.target.len() != configs {
        return Err(Error::TableMismatch(i));
    }
    check_vector(&node.reference_parent, i, None)?;
    for j in 0..configs {
        if node.reference[j].len() != c.child_states || node.target[j].len() != c.child_states {
            return Err(Error::TableMismatch(i));
        }
        check_vector(&node.reference[j], i, Some(j))?;
        check_vector(&node.target[j], i, Some(j))?;
    }
    Ok(())
}

/// `Q* = Σ_i Σ_{j,k} (n_{i,kj} + (n−n_i)·P'_{i,j}·P'_{i,kj})·ln P_{i,kj}`.
///
/// Zero-weight terms contribute nothing; a zero target probability with
/// positive weight gives `-inf`.
pub fn q_star<T: Real>(input: &QStarInput<T>) -> Result<T> {
    for (i, node) in input.nodes.iter().enumerate() {
        check_node(i, node, input.n)?;
    }
    let mut acc = CompensatedSum::new();
    for node in &input.nodes {
        let c = &node.counts;
        let n_mis = T::from_count(c.n_missing());
        for j in 0..c.parent_configs() {
            for k in 0..c.child_states {
                let w = T::from_count(c.n_ikj(k, j)) + n_mis * node.reference_parent[j] * node.reference[j][k];
                if w == T::zero() {
                    continue;
                }
                let p = node.target[j][k];
                if p == T::zero() {
                    return Ok(T::neg_infinity());
                }
                acc.add(w * p.ln());
            }
        }
    }
    Ok(acc.value())
}

/// `P̂_{i,j} = n_{i,j}/n_i` and `P̂_{i,kj} = n_{i,kj}/n_{i,j}`.
pub fn q_star_maximizer<T: Real>(counts: &[SufficientCounts]) -> Result<QStarMaximizer<T>> {
    let mut parent_probs = Vec::with_capacity(counts.len());
    let mut tables = Vec::with_capacity(counts.len());
    let mut undefined = Vec::new();
    for (i, c) in counts.iter().enumerate() {
        if c.n_i == 0 {
            return Err(Error::UnobservableNode(i));
        }
        let n_i = T::from_count(c.n_i);
        parent_probs.push(c.n_ij.iter().map(|&x| T::from_count(x) / n_i).collect());
        let uniform = T::one() / T::from_count(c.child_states as u64);
        let rows = (0..c.parent_configs())
            .map(|j| {
                let n_ij = c.n_ij[j];
                if n_ij == 0 {
                    undefined.push((i, j));
                    vec![uniform; c.child_states]
                } else {
                    let d = T::from_count(n_ij);
                    c.column(j).iter().map(|&x| T::from_count(x) / d).collect()
                }
            })
            .collect();
        tables.push(rows);
    }
    Ok(QStarMaximizer {
        parent_probs,
        cpt: Cpt::new(tables)?,
        undefined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{count_sufficient_stats, Dataset};
    use crate::model::{Dag, Variable};
    use crate::scoring::nal;

    fn four_records() -> Dataset {
        Dataset::from_complete(
            Variable::binary_set(2),
            &[vec![0, 0], vec![0, 1], vec![1, 1], vec![1, 1]],
        )
        .unwrap()
    }

    fn counts(d: &Dataset, dag: &Dag) -> Vec<SufficientCounts> {
        (0..dag.num_nodes())
            .map(|i| count_sufficient_stats(d, i, dag.parents(i)).unwrap())
            .collect()
    }

    #[test]
    fn maximizer_hand_case() {
        let dag = Dag::new(vec![vec![], vec![0]]).unwrap();
        let m = q_star_maximizer::<f64>(&counts(&four_records(), &dag)).unwrap();
        // rows j, columns k: [[0.5, 0.5], [0, 1]]
        assert_eq!(m.cpt.node(1), &[vec![0.5, 0.5], vec![0.0, 1.0]]);
        assert!(m.undefined.is_empty());
    }

    #[test]
    fn complete_data_reduces_to_loglik() {
        let dag = Dag::new(vec![vec![], vec![0]]).unwrap();
        let d = four_records();
        let input = QStarInput::<f64>::self_consistent(counts(&d, &dag)).unwrap();
        let q = q_star(&input).unwrap();
        let l: f64 = nal(&d, &dag).unwrap();
        assert!((q - 4.0 * l).abs() < 1e-12);
    }

    #[test]
    fn incomplete_identity_and_perturbation() {
        let d = Dataset::from_records(
            Variable::binary_set(2),
            &[
                vec![Some(0), Some(0)],
                vec![Some(0), Some(1)],
                vec![None, Some(1)],
                vec![Some(1), Some(1)],
                vec![Some(1), Some(0)],
                vec![Some(1), None],
            ],
        )
        .unwrap();
        let dag = Dag::new(vec![vec![], vec![0]]).unwrap();
        let c = counts(&d, &dag);
        let input = QStarInput::<f64>::self_consistent(c.clone()).unwrap();
        let q = q_star(&input).unwrap();
        let l: f64 = nal(&d, &dag).unwrap();
        assert!((q - 6.0 * l).abs() < 1e-12);
        let m = q_star_maximizer::<f64>(&c).unwrap();
        let mut t = m.cpt.tables().to_vec();
        t[1][1] = vec![0.6, 0.4];
        let moved = QStarInput::with_reference(c, &m, t);
        assert!(q_star(&moved).unwrap() < q);
    }

    #[test]
    fn errors() {
        let d = Dataset::from_records(Variable::binary_set(2), &[vec![None, Some(1)]]).unwrap();
        let c = counts(&d, &Dag::empty(2));
        assert_eq!(q_star_maximizer::<f64>(&c), Err(Error::UnobservableNode(0)));
        let d = four_records();
        let c = counts(&d, &Dag::empty(2));
        let m = q_star_maximizer::<f64>(&c).unwrap();
        let bad = QStarInput::with_reference(c, &m, vec![vec![vec![0.5, 0.6]], vec![vec![0.5, 0.5]]]);
        assert_eq!(
            q_star(&bad),
            Err(Error::NonNormalizedParameters { node: 0, config: Some(0) })
        );
    }

    #[test]
    fn zero_target_with_weight_is_neg_infinity() {
        let d = four_records();
        let c = counts(&d, &Dag::empty(2));
        let m = q_star_maximizer::<f64>(&c).unwrap();
        let t = vec![vec![vec![1.0, 0.0]], vec![vec![0.25, 0.75]]];
        let q = q_star(&QStarInput::with_reference(c, &m, t)).unwrap();
        assert_eq!(q, f64::NEG_INFINITY);
    }
}
