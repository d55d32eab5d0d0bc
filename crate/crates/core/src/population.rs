//! Exact population quantities by enumeration of the joint state space.
//!
//! Under MCAR the observed conditional tables of any DAG `G` are the true
//! conditionals `P_0(X_i | Pa_i)` and `P_0(Pa_i)`, so everything here is a
//! marginalization of the ground-truth joint distribution. Missingness only
//! enters through the observation probabilities `θ_i(G|G_0)` and `β`.

use crate::equivalence::dags_equivalent;
use crate::error::{Error, Result};
use crate::model::{df_complexity, is_subgraph, BayesNet, Dag};
use crate::num::{xlogx, CompensatedSum, Real};
use crate::sampling::MissingnessModel;

/// Default cap on the number of joint states.
pub const DEFAULT_STATE_CAP: u128 = 1 << 24;

/// Absolute tolerance for NAL equality in identifiability checks.
pub const NAL_TOLERANCE: f64 = 1e-9;

/// Joint distribution over all states; node 0 varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable<T = f64> {
    cards: Vec<usize>,
    probs: Vec<T>,
}

/// `P(Pa = j)` and `P(X = k | Pa = j)` for one node and parent set.
#[derive(Debug, Clone, PartialEq)]
pub struct Conditional<T = f64> {
    pub node: usize,
    pub parents: Vec<usize>,
    pub child_states: usize,
    pub parent_probs: Vec<T>,
    /// Stored at `j * child_states + k`. Uniform where `P(Pa = j) = 0`.
    pub cond: Vec<T>,
    /// Parent configurations with zero probability.
    pub degenerate: Vec<usize>,
}

impl<T: Real> Conditional<T> {
    pub fn cond(&self, k: usize, j: usize) -> T {
        self.cond[j * self.child_states + k]
    }

    /// `Σ_j P(Pa=j) Σ_k P(k|j) ln P(k|j)`.
    pub fn neg_entropy(&self) -> T {
        let mut acc = CompensatedSum::new();
        for (j, &pj) in self.parent_probs.iter().enumerate() {
            if pj > T::zero() {
                let row = &self.cond[j * self.child_states..(j + 1) * self.child_states];
                let inner: T = row.iter().map(|&p| xlogx(p)).sum();
                acc.add(pj * inner);
            }
        }
        acc.value()
    }
}

fn state_count(cards: &[usize]) -> u128 {
    cards.iter().map(|&c| c as u128).product()
}

fn check_cap(cards: &[usize], cap: u128) -> Result<usize> {
    let states = state_count(cards);
    if states > cap {
        return Err(Error::StateSpaceTooLarge { states, cap });
    }
    Ok(states as usize)
}

/// Iterates joint states as digit vectors, node 0 slowest.
fn for_each_state(cards: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let total = cards.iter().product::<usize>();
    let mut digits = vec![0usize; cards.len()];
    for idx in 0..total {
        f(idx, &digits);
        for pos in (0..cards.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < cards[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

fn parent_index(parents: &[usize], cards: &[usize], state: &[usize]) -> usize {
    parents.iter().fold(0, |j, &p| j * cards[p] + state[p])
}

impl<T: Real> JointTable<T> {
    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn num_nodes(&self) -> usize {
        self.cards.len()
    }

    /// Builds from a product of per-node conditionals.
    fn from_factors(cards: &[usize], factors: &[Conditional<T>]) -> Self {
        let mut probs = vec![T::zero(); cards.iter().product()];
        for_each_state(cards, |idx, state| {
            let mut p = T::one();
            for f in factors {
                let j = parent_index(&f.parents, cards, state);
                p = p * f.cond[j * f.child_states + state[f.node]];
            }
            probs[idx] = p;
        });
        Self {
            cards: cards.to_vec(),
            probs,
        }
    }

    /// Marginal and conditional tables of `node` given `parents` (sorted).
    pub fn conditional(&self, node: usize, parents: &[usize]) -> Conditional<T> {
        let q = self.cards[node];
        let configs: usize = parents.iter().map(|&p| self.cards[p]).product();
        let mut joint = vec![T::zero(); configs * q];
        for_each_state(&self.cards, |idx, state| {
            let j = parent_index(parents, &self.cards, state);
            let slot = &mut joint[j * q + state[node]];
            *slot = *slot + self.probs[idx];
        });
        let mut parent_probs = Vec::with_capacity(configs);
        let mut degenerate = Vec::new();
        for j in 0..configs {
            let row = &mut joint[j * q..(j + 1) * q];
            let pj: T = row.iter().copied().sum();
            parent_probs.push(pj);
            if pj > T::zero() {
                for p in row.iter_mut() {
                    *p = *p / pj;
                }
            } else {
                degenerate.push(j);
                let u = T::one() / T::from_count(q as u64);
                row.iter_mut().for_each(|p| *p = u);
            }
        }
        Conditional {
            node,
            parents: parents.to_vec(),
            child_states: q,
            parent_probs,
            cond: joint,
            degenerate,
        }
    }

    /// Total variation distance `½ Σ |p − q|`.
    pub fn total_variation(&self, other: &JointTable<T>) -> Result<T> {
        if self.cards != other.cards {
            return Err(Error::NodeCountMismatch {
                left: self.cards.len(),
                right: other.cards.len(),
            });
        }
        let s: CompensatedSum<T> = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(&a, &b)| (a - b).abs())
            .collect();
        Ok(s.value() * T::lit(0.5))
    }
}

/// `P_0(x) = Π_i P(X_i = x_i | Pa_i = x_{Pa_i})`.
pub fn joint_distribution<T: Real>(net: &BayesNet<T>) -> Result<JointTable<T>> {
    joint_distribution_capped(net, DEFAULT_STATE_CAP)
}

pub fn joint_distribution_capped<T: Real>(net: &BayesNet<T>, cap: u128) -> Result<JointTable<T>> {
    let cards = net.cardinalities();
    check_cap(&cards, cap)?;
    let factors: Vec<Conditional<T>> = (0..net.num_nodes())
        .map(|i| Conditional {
            node: i,
            parents: net.dag().parents(i).to_vec(),
            child_states: cards[i],
            parent_probs: Vec::new(),
            cond: net.cpt().node(i).iter().flatten().copied().collect(),
            degenerate: Vec::new(),
        })
        .collect();
    Ok(JointTable::from_factors(&cards, &factors))
}

/// `P_{G|G_0}` together with the parent configurations set uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedJoint<T = f64> {
    pub table: JointTable<T>,
    /// `(node, parent configuration)` pairs with zero probability under `P_0`.
    pub degenerate: Vec<(usize, usize)>,
}

/// `P_{G|G_0}(x) = Π_i P_0(X_i = x_i | Pa_i(G) = x_{Pa_i})`.
pub fn induced_joint<T: Real>(g: &Dag, net0: &BayesNet<T>) -> Result<InducedJoint<T>> {
    let joint = joint_distribution(net0)?;
    induced_joint_from(g, &joint)
}

pub fn induced_joint_from<T: Real>(g: &Dag, joint: &JointTable<T>) -> Result<InducedJoint<T>> {
    if g.num_nodes() != joint.num_nodes() {
        return Err(Error::NodeCountMismatch {
            left: g.num_nodes(),
            right: joint.num_nodes(),
        });
    }
    let factors: Vec<Conditional<T>> = (0..g.num_nodes())
        .map(|i| joint.conditional(i, g.parents(i)))
        .collect();
    let degenerate = factors
        .iter()
        .flat_map(|f| f.degenerate.iter().map(move |&j| (f.node, j)))
        .collect();
    Ok(InducedJoint {
        table: JointTable::from_factors(&joint.cards, &factors),
        degenerate,
    })
}

/// Observed conditional table of one node under MCAR.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeTheta<T = f64> {
    /// `θ_i(G|G_0)`: probability that the node and all its parents are observed.
    pub theta_i: f64,
    pub conditional: Conditional<T>,
}

impl<T: Real> NodeTheta<T> {
    pub fn theta_ij(&self) -> &[T] {
        &self.conditional.parent_probs
    }

    pub fn theta_ikj(&self, k: usize, j: usize) -> T {
        self.conditional.cond(k, j)
    }
}

/// `θ(G|G_0)` for every node of `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedTable<T = f64> {
    pub nodes: Vec<NodeTheta<T>>,
}

/// `θ_i(G|G_0)` of a (node, parent set) pair.
pub fn observation_probability(missing: &MissingnessModel, num_vars: usize, node: usize, parents: &[usize]) -> f64 {
    let mut subset = parents.to_vec();
    subset.push(node);
    missing.subset_observed(num_vars, &subset)
}

/// Induced observed tables assuming MCAR.
pub fn induced_theta_mcar<T: Real>(g: &Dag, net0: &BayesNet<T>, missing: &MissingnessModel) -> Result<InducedTable<T>> {
    let joint = joint_distribution(net0)?;
    induced_theta_from(g, &joint, missing)
}

pub fn induced_theta_from<T: Real>(
    g: &Dag,
    joint: &JointTable<T>,
    missing: &MissingnessModel,
) -> Result<InducedTable<T>> {
    let n = joint.num_nodes();
    if g.num_nodes() != n {
        return Err(Error::NodeCountMismatch {
            left: g.num_nodes(),
            right: n,
        });
    }
    missing.validate(n)?;
    Ok(InducedTable {
        nodes: (0..n)
            .map(|i| NodeTheta {
                theta_i: observation_probability(missing, n, i, g.parents(i)),
                conditional: joint.conditional(i, g.parents(i)),
            })
            .collect(),
    })
}

/// `l(G|G_0) = Σ_i Σ_j θ_ij Σ_k θ_ikj ln θ_ikj`.
pub fn population_nal<T: Real>(g: &Dag, table: &InducedTable<T>) -> Result<T> {
    if table.nodes.len() != g.num_nodes() {
        return Err(Error::TableMismatch(table.nodes.len().min(g.num_nodes())));
    }
    let mut acc = CompensatedSum::new();
    for (i, node) in table.nodes.iter().enumerate() {
        if node.conditional.node != i || node.conditional.parents != g.parents(i) {
            return Err(Error::TableMismatch(i));
        }
        acc.add(node.conditional.neg_entropy());
    }
    Ok(acc.value())
}

/// Population NAL of `g` straight from a joint table.
pub fn population_nal_from<T: Real>(g: &Dag, joint: &JointTable<T>) -> T {
    (0..g.num_nodes())
        .map(|i| joint.conditional(i, g.parents(i)).neg_entropy())
        .collect::<CompensatedSum<T>>()
        .value()
}

/// One row of an identifiability report.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateReport<T = f64> {
    pub index: usize,
    pub df: u64,
    pub nal: T,
    /// `G_0 ⊆ G`.
    pub contains_truth: bool,
    pub is_maximizer: bool,
    pub is_minimal_maximizer: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentifiabilityReport<T = f64> {
    /// `l(G_0)`.
    pub truth_nal: T,
    pub max_nal: T,
    pub candidates: Vec<CandidateReport<T>>,
    /// Indices of the minimal DAGs attaining the maximum.
    pub minimal_maximizers: Vec<usize>,
    /// `l(G|G_0) ≤ l(G_0)` for supersets of `G_0` and `<` otherwise.
    pub satisfies_definition: bool,
    /// The set of minimal maximizers is exactly `{G_0}`.
    pub identifiable: bool,
    /// Every minimal maximizer is equivalent to `G_0` (and there is one).
    pub class_identifiable: bool,
    /// `β` of the candidate collection.
    pub beta: f64,
}

/// Population-level identifiability of `net0` within `candidates` under MCAR.
pub fn check_identifiability<T: Real>(
    net0: &BayesNet<T>,
    candidates: &[Dag],
    missing: &MissingnessModel,
) -> Result<IdentifiabilityReport<T>> {
    let n = net0.num_nodes();
    missing.validate(n)?;
    for g in candidates {
        if g.num_nodes() != n {
            return Err(Error::NodeCountMismatch {
                left: g.num_nodes(),
                right: n,
            });
        }
    }
    let joint = joint_distribution(net0)?;
    let tol = T::lit(NAL_TOLERANCE);
    let truth = net0.dag();
    let truth_nal = population_nal_from(truth, &joint);

    let nals: Vec<T> = candidates.iter().map(|g| population_nal_from(g, &joint)).collect();
    let max_nal = nals.iter().copied().fold(T::neg_infinity(), T::max);
    let is_max: Vec<bool> = nals.iter().map(|&v| v >= max_nal - tol).collect();

    let mut rows = Vec::with_capacity(candidates.len());
    let mut minimal = Vec::new();
    let mut satisfies_definition = true;
    for (idx, g) in candidates.iter().enumerate() {
        let contains_truth = is_subgraph(truth, g)?;
        let minimal_max = is_max[idx]
            && !candidates.iter().enumerate().any(|(o, h)| {
                o != idx && is_max[o] && h != g && is_subgraph(h, g).unwrap_or(false)
            });
        if minimal_max {
            minimal.push(idx);
        }
        let ok = if contains_truth {
            nals[idx] <= truth_nal + tol
        } else {
            nals[idx] < truth_nal - tol
        };
        satisfies_definition &= ok;
        rows.push(CandidateReport {
            index: idx,
            df: df_complexity(g, net0.variables())?,
            nal: nals[idx],
            contains_truth,
            is_maximizer: is_max[idx],
            is_minimal_maximizer: minimal_max,
        });
    }
    // Duplicated candidates collapse to one minimal element.
    minimal.dedup_by(|a, b| candidates[*a] == candidates[*b]);
    let identifiable = !minimal.is_empty() && minimal.iter().all(|&i| candidates[i] == *truth);
    let class_identifiable = !minimal.is_empty()
        && minimal
            .iter()
            .all(|&i| dags_equivalent(&candidates[i], truth).unwrap_or(false));
    Ok(IdentifiabilityReport {
        truth_nal,
        max_nal,
        candidates: rows,
        minimal_maximizers: minimal,
        satisfies_definition,
        identifiable,
        class_identifiable,
        beta: beta_of_collection(candidates, missing)?,
    })
}

/// `β = min_G min_i { θ_i(G|G_0) : θ_i(G|G_0) > 0 }`. An empty collection gives 1.
pub fn beta_of_collection(candidates: &[Dag], missing: &MissingnessModel) -> Result<f64> {
    let mut beta = f64::INFINITY;
    for g in candidates {
        missing.validate(g.num_nodes())?;
        for i in 0..g.num_nodes() {
            let t = observation_probability(missing, g.num_nodes(), i, g.parents(i));
            if t > 0.0 {
                beta = beta.min(t);
            }
        }
    }
    Ok(if beta.is_finite() { beta } else { 1.0 })
}

/// `β` over parent-set candidates given per node.
pub fn beta_of_parent_sets(candidates: &[Vec<Vec<usize>>], missing: &MissingnessModel) -> Result<f64> {
    let n = candidates.len();
    missing.validate(n)?;
    let beta = candidates
        .iter()
        .enumerate()
        .flat_map(|(i, sets)| sets.iter().map(move |ps| observation_probability(missing, n, i, ps)))
        .filter(|&t| t > 0.0)
        .fold(f64::INFINITY, f64::min);
    Ok(if beta.is_finite() { beta } else { 1.0 })
}

/// All DAGs on `n` nodes (feasible for `n ≤ 4`).
pub fn all_dags(n: usize) -> Vec<Dag> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let mut out = Vec::new();
    // each unordered pair: absent, a→b, b→a
    let total = 3usize.pow(pairs.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut edges = Vec::new();
        for &(a, b) in &pairs {
            match c % 3 {
                1 => edges.push((a, b)),
                2 => edges.push((b, a)),
                _ => {}
            }
            c /= 3;
        }
        if let Ok(d) = Dag::from_edges(n, &edges) {
            out.push(d);
        }
    }
    out.sort();
    out
}
