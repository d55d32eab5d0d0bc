//! Node-average log-likelihood (NAL), the standard average log-likelihood
//! and penalized scores.
//!
//! Logarithms are natural. `0 ln 0 = 0`, and parent configurations with no
//! observations contribute nothing. A node with `n_i = 0` makes its NAL
//! `-inf`, which keeps candidate comparison total.

use crate::data::{count_sufficient_stats, Dataset, SufficientCounts};
use crate::error::{Error, Result};
use crate::model::{df_complexity, node_df, Dag, Variable};
use crate::num::{CompensatedSum, Real};

/// The `λ` schedule of a penalized score. Complexity is always `df`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty<T = f64> {
    None,
    /// `λ_m = 1/m`
    Aic,
    /// `λ_m = ln(m) / (2m)`
    Bic,
    /// `λ_m = coef · m^(−exponent)`
    PowerLaw { coef: T, exponent: T },
}

impl<T: Real> Penalty<T> {
    pub fn power_law(coef: T, exponent: T) -> Result<Self> {
        if !(coef > T::zero()) || !coef.is_finite() {
            return Err(Error::InvalidPenalty(format!("coefficient {coef} must be positive")));
        }
        if !(exponent > T::zero() && exponent < T::one()) {
            return Err(Error::InvalidPenalty(format!("exponent {exponent} must lie in (0,1)")));
        }
        Ok(Penalty::PowerLaw { coef, exponent })
    }

    /// Power law with the `1/N` coefficient used in the experiments.
    pub fn power_law_per_node(num_nodes: usize, exponent: T) -> Result<Self> {
        Self::power_law(T::one() / T::from_count(num_nodes as u64), exponent)
    }

    pub fn lambda(&self, m: u64) -> Result<T> {
        lambda_value(self, m)
    }

    pub fn label(&self) -> String {
        match self {
            Penalty::None => "none".into(),
            Penalty::Aic => "aic".into(),
            Penalty::Bic => "bic".into(),
            Penalty::PowerLaw { exponent, .. } => format!("alpha={exponent}"),
        }
    }
}

/// `λ_m` for the given schedule.
pub fn lambda_value<T: Real>(penalty: &Penalty<T>, m: u64) -> Result<T> {
    if m == 0 {
        return Err(Error::ZeroSampleSize);
    }
    lambda_at(penalty, T::from_count(m))
}

/// `λ` at a real-valued sample size `m > 0`.
pub fn lambda_at<T: Real>(penalty: &Penalty<T>, mf: T) -> Result<T> {
    if !(mf > T::zero()) {
        return Err(Error::ZeroSampleSize);
    }
    Ok(match *penalty {
        Penalty::None => T::zero(),
        Penalty::Aic => T::one() / mf,
        Penalty::Bic => T::lit(0.5) * mf.ln() / mf,
        Penalty::PowerLaw { coef, exponent } => coef * mf.powf(-exponent),
    })
}

/// Per-node term of a decomposable score.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeScore<T = f64> {
    pub node: usize,
    pub parents: Vec<usize>,
    /// `l(X_i | Pa_i, D_n)`, at most zero; `-inf` when `n_i = 0`.
    pub nal: T,
    pub n_i: u64,
    pub df: u64,
    /// `nal − λ_{n_i}·df`.
    pub score: T,
}

/// `l(X_i|Pa_i, D_n) = Σ_j θ̂_ij Σ_k θ̂_ikj ln θ̂_ikj`.
pub fn node_nal<T: Real>(counts: &SufficientCounts) -> T {
    if counts.n_i == 0 {
        return T::neg_infinity();
    }
    let n_i = T::from_count(counts.n_i);
    let mut acc = CompensatedSum::new();
    for (j, &n_ij) in counts.n_ij.iter().enumerate() {
        if n_ij == 0 {
            continue;
        }
        let n_ij_f = T::from_count(n_ij);
        for &c in counts.column(j) {
            if c > 0 {
                let c = T::from_count(c);
                acc.add(c / n_i * (c / n_ij_f).ln());
            }
        }
    }
    // Rounding can leave a tiny positive residue for point masses.
    acc.value().min(T::zero())
}

/// `Σ_j n_ij Σ_k θ̂_ikj ln θ̂_ikj`, the unnormalized node log-likelihood.
fn node_loglik<T: Real>(counts: &SufficientCounts) -> T {
    let mut acc = CompensatedSum::new();
    for (j, &n_ij) in counts.n_ij.iter().enumerate() {
        if n_ij == 0 {
            continue;
        }
        let n_ij_f = T::from_count(n_ij);
        for &c in counts.column(j) {
            if c > 0 {
                let c = T::from_count(c);
                acc.add(c * (c / n_ij_f).ln());
            }
        }
    }
    acc.value()
}

fn check_schema(data: &Dataset, dag: &Dag) -> Result<()> {
    if data.num_vars() != dag.num_nodes() {
        return Err(Error::SchemaMismatch(format!(
            "dataset has {} columns, DAG has {} nodes",
            data.num_vars(),
            dag.num_nodes()
        )));
    }
    Ok(())
}

fn all_counts(data: &Dataset, dag: &Dag) -> Result<Vec<SufficientCounts>> {
    check_schema(data, dag)?;
    (0..dag.num_nodes())
        .map(|i| count_sufficient_stats(data, i, dag.parents(i)))
        .collect()
}

/// `l(G|D_n) = Σ_i l(X_i|Pa_i, D_n)`.
pub fn nal<T: Real>(data: &Dataset, dag: &Dag) -> Result<T> {
    let counts = all_counts(data, dag)?;
    Ok(sum_nal(&counts))
}

fn sum_nal<T: Real>(counts: &[SufficientCounts]) -> T {
    let mut acc = CompensatedSum::new();
    for c in counts {
        let v: T = node_nal(c);
        if v == T::neg_infinity() {
            return v;
        }
        acc.add(v);
    }
    acc.value()
}

/// `l̃(G|D_n) = (1/n) Σ_i Σ_j n_ij Σ_k θ̂_ikj ln θ̂_ikj`.
///
/// Nodes with `n_i = 0` contribute zero; an empty dataset gives `-inf`.
pub fn standard_avg_loglik<T: Real>(data: &Dataset, dag: &Dag) -> Result<T> {
    let counts = all_counts(data, dag)?;
    if data.is_empty() {
        return Ok(T::neg_infinity());
    }
    let n = T::from_count(data.len() as u64);
    // Same per-term arithmetic as node_nal so complete data agrees bit for bit.
    let mut acc = CompensatedSum::new();
    for c in &counts {
        let mut node = CompensatedSum::new();
        for (j, &n_ij) in c.n_ij.iter().enumerate() {
            if n_ij == 0 {
                continue;
            }
            let n_ij_f = T::from_count(n_ij);
            for &x in c.column(j) {
                if x > 0 {
                    let x = T::from_count(x);
                    node.add(x / n * (x / n_ij_f).ln());
                }
            }
        }
        acc.add(node.value().min(T::zero()));
    }
    Ok(acc.value())
}

/// `S(G|D_n) = l(G|D_n) − λ_n·df(G)`.
pub fn score_global<T: Real>(data: &Dataset, dag: &Dag, penalty: &Penalty<T>) -> Result<T> {
    let l: T = nal(data, dag)?;
    if l == T::neg_infinity() {
        return Ok(l);
    }
    let df = df_complexity(dag, data.variables())?;
    Ok(l - lambda_value(penalty, data.len() as u64)? * T::from_count(df))
}

/// Scores one node from its counts with the node-specific `λ_{n_i}`.
pub fn node_score<T: Real>(counts: &SufficientCounts, vars: &[Variable], penalty: &Penalty<T>) -> NodeScore<T> {
    let nal: T = node_nal(counts);
    let df = node_df(counts.node, &counts.parents, vars);
    let score = if counts.n_i == 0 {
        T::neg_infinity()
    } else {
        nal - lambda_value(penalty, counts.n_i).expect("n_i > 0") * T::from_count(df)
    };
    NodeScore {
        node: counts.node,
        parents: counts.parents.clone(),
        nal,
        n_i: counts.n_i,
        df,
        score,
    }
}

/// `Σ_i [ l(X_i|Pa_i, D_n) − λ_{n_i}·df(X_i|Pa_i) ]` with its per-node breakdown.
pub fn score_decomposable<T: Real>(
    data: &Dataset,
    dag: &Dag,
    penalty: &Penalty<T>,
) -> Result<(T, Vec<NodeScore<T>>)> {
    let counts = all_counts(data, dag)?;
    let nodes: Vec<NodeScore<T>> = counts
        .iter()
        .map(|c| node_score(c, data.variables(), penalty))
        .collect();
    let total = if nodes.iter().any(|s| s.score == T::neg_infinity()) {
        T::neg_infinity()
    } else {
        nodes.iter().map(|s| s.score).collect::<CompensatedSum<T>>().value()
    };
    Ok((total, nodes))
}

/// Classic BIC of the regression `X_i | Pa_i` on its observed sub-sample:
/// `Σ n_ikj ln θ̂_ikj − ½ ln(n_i)·df_i`.
pub fn node_bic<T: Real>(counts: &SufficientCounts, vars: &[Variable]) -> T {
    let df = node_df(counts.node, &counts.parents, vars);
    node_loglik::<T>(counts)
        - T::lit(0.5) * T::from_count(counts.n_i).ln() * T::from_count(df)
}
