//! Monte Carlo harness: the two-node wrong-selection study, structure
//! recovery on larger nets and the convergence-rate probe.
//!
//! Replicate `r` of cell `c` draws from `Seed(seed).derive(c << 32 | r)`, so
//! every output is reproducible and independent of thread scheduling.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equivalence::edge_f_score;
use crate::error::{Error, Result};
use crate::io::{load_network, parse_structure};
use crate::model::{BayesNet, Cpt, Dag, NodeOrder, Variable};
use crate::population::beta_of_parent_sets;
use crate::sampling::{apply_mcar_with, forward_sample_with, MissingnessModel, Seed};
use crate::scoring::{nal, score_decomposable, score_global, Penalty};
use crate::search::{CandidateTable, SearchSpace, DEFAULT_MAX_PARENTS};

const ALARM_STRUCTURE: &str = include_str!("../data/alarm_structure.json");

/// ALARM-shaped structure: 37 nodes, 45 edges, `df = 473`.
pub fn alarm_structure() -> (Vec<Variable>, Dag) {
    parse_structure(ALARM_STRUCTURE).expect("bundled structure is valid")
}

/// Two independent binary nodes with marginals `(0.4, 0.6)` and `(0.3, 0.7)`.
pub fn two_node_network() -> BayesNet {
    BayesNet::new(
        Variable::binary_set(2),
        Dag::empty(2),
        Cpt::new(vec![vec![vec![0.4, 0.6]], vec![vec![0.3, 0.7]]]).expect("valid"),
    )
    .expect("valid")
}

/// CPTs putting `peak` on state `j mod q` and spreading the rest evenly.
pub fn peaked_cpt(vars: &[Variable], dag: &Dag, peak: f64) -> Cpt {
    let tables = (0..vars.len())
        .map(|i| {
            let q = vars[i].cardinality;
            let configs: usize = dag.parents(i).iter().map(|&p| vars[p].cardinality).product();
            let rest = (1.0 - peak) / (q - 1) as f64;
            (0..configs)
                .map(|j| (0..q).map(|k| if k == j % q { peak } else { rest }).collect())
                .collect()
        })
        .collect();
    Cpt::normalized(tables).expect("positive rows")
}

/// Eight nodes with cardinalities 2 to 4 and `df = 54`:
/// `A→C, A→D, B→D, C→E, D→F, E→F, B→G, F→G, G→H`.
pub fn synthetic_eight() -> BayesNet {
    let vars: Vec<Variable> = [("A", 2), ("B", 3), ("C", 2), ("D", 4), ("E", 3), ("F", 2), ("G", 3), ("H", 2)]
        .iter()
        .map(|&(n, q)| Variable::new(n, q).expect("valid"))
        .collect();
    let dag = Dag::new(vec![
        vec![],
        vec![],
        vec![0],
        vec![0, 1],
        vec![2],
        vec![3, 4],
        vec![1, 5],
        vec![6],
    ])
    .expect("acyclic");
    let cpt = peaked_cpt(&vars, &dag, 0.75);
    BayesNet::new(vars, dag, cpt).expect("valid")
}

/// ALARM-shaped structure with peaked CPTs (the real tables are not public here).
pub fn alarm_like() -> BayesNet {
    let (vars, dag) = alarm_structure();
    let cpt = peaked_cpt(&vars, &dag, 0.75);
    BayesNet::new(vars, dag, cpt).expect("valid")
}

/// Resolves `two-node`, `synthetic-8`, `alarm` or a network file path.
pub fn builtin_or_file(name: &str) -> Result<BayesNet> {
    match name {
        "two-node" => Ok(two_node_network()),
        "synthetic-8" => Ok(synthetic_eight()),
        "alarm" => Ok(alarm_like()),
        path => load_network(path),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    TwoNode,
    Recovery,
    RateProbe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreMode {
    /// `l(G) − λ_n·df(G)`.
    Global,
    /// `Σ_i l_i − λ_{n_i}·df_i`.
    Decomposable,
}

/// Missingness regime of a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MissingSpec {
    Complete,
    /// First variable observed with probability `beta`, the rest always.
    Beta { beta: f64 },
    Bernoulli { p: Vec<f64> },
    KPerRecord { k: usize },
}

impl MissingSpec {
    pub fn model(&self, num_vars: usize) -> Result<MissingnessModel> {
        let m = match self {
            MissingSpec::Complete => MissingnessModel::complete(num_vars),
            MissingSpec::Beta { beta } => {
                let mut p = vec![1.0; num_vars];
                if let Some(first) = p.first_mut() {
                    *first = *beta;
                }
                MissingnessModel::Bernoulli(p)
            }
            MissingSpec::Bernoulli { p } => MissingnessModel::Bernoulli(p.clone()),
            MissingSpec::KPerRecord { k } => MissingnessModel::KPerRecord(*k),
        };
        m.validate(num_vars).map_err(|e| Error::Config(e.to_string()))?;
        Ok(m)
    }

    pub fn label(&self) -> String {
        match self {
            MissingSpec::Complete => "complete".into(),
            MissingSpec::Beta { beta } => format!("beta={beta}"),
            MissingSpec::Bernoulli { p } => format!(
                "bernoulli={}",
                p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":")
            ),
            MissingSpec::KPerRecord { k } => format!("k={k}"),
        }
    }
}

/// Penalty of a config; `coef` of the power law defaults to `1/N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PenaltySpec {
    None,
    Aic,
    Bic,
    Power {
        alpha: f64,
        #[serde(default)]
        coef: Option<f64>,
    },
}

impl PenaltySpec {
    pub fn penalty(&self, num_nodes: usize) -> Result<Penalty> {
        let p = match *self {
            PenaltySpec::None => Penalty::None,
            PenaltySpec::Aic => Penalty::Aic,
            PenaltySpec::Bic => Penalty::Bic,
            PenaltySpec::Power { alpha, coef } => {
                Penalty::power_law(coef.unwrap_or(1.0 / num_nodes as f64), alpha)
                    .map_err(|e| Error::Config(e.to_string()))?
            }
        };
        Ok(p)
    }

    pub fn label(&self) -> String {
        match self {
            PenaltySpec::None => "none".into(),
            PenaltySpec::Aic => "aic".into(),
            PenaltySpec::Bic => "bic".into(),
            PenaltySpec::Power { alpha, coef: None } => format!("alpha={alpha}"),
            PenaltySpec::Power { alpha, coef: Some(c) } => format!("alpha={alpha};coef={c}"),
        }
    }
}

/// Parent lists of a nested pair `G_0 ⊂ G_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedPair {
    pub g0: Vec<Vec<usize>>,
    pub g1: Vec<Vec<usize>>,
}

fn default_generator() -> String {
    "two-node".into()
}

fn default_missing() -> Vec<MissingSpec> {
    vec![MissingSpec::Complete]
}

fn default_replicates() -> usize {
    1000
}

fn default_max_parents() -> usize {
    DEFAULT_MAX_PARENTS
}

/// JSON experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_generator")]
    pub generator: String,
    pub sample_sizes: Vec<u64>,
    #[serde(default = "default_missing")]
    pub missing: Vec<MissingSpec>,
    #[serde(default)]
    pub penalties: Vec<PenaltySpec>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_max_parents")]
    pub max_parents: usize,
    /// Node names; defaults to a topological order of the generator.
    #[serde(default)]
    pub order: Option<Vec<String>>,
    #[serde(default)]
    pub nested: Option<NestedPair>,
    /// Global for the two-node study, decomposable for recovery by default.
    #[serde(default)]
    pub score: Option<ScoreMode>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.contains(&0) {
            return Err(Error::Config("sample sizes must be a non-empty list of positive integers".into()));
        }
        if self.missing.is_empty() {
            return Err(Error::Config("at least one missingness spec is required".into()));
        }
        if self.kind != ExperimentKind::RateProbe && self.penalties.is_empty() {
            return Err(Error::Config("at least one penalty is required".into()));
        }
        for p in &self.penalties {
            p.penalty(1)?;
        }
        for m in &self.missing {
            match *m {
                MissingSpec::Beta { beta } if !(0.0..=1.0).contains(&beta) => {
                    return Err(Error::Config(format!("beta {beta} outside [0, 1]")));
                }
                MissingSpec::Bernoulli { ref p } if p.iter().any(|x| !(0.0..=1.0).contains(x)) => {
                    return Err(Error::Config("bernoulli probabilities must lie in [0, 1]".into()));
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn score_mode(&self) -> ScoreMode {
        self.score.unwrap_or(match self.kind {
            ExperimentKind::Recovery => ScoreMode::Decomposable,
            _ => ScoreMode::Global,
        })
    }

    fn network(&self) -> Result<BayesNet> {
        builtin_or_file(&self.generator).map_err(|e| Error::Config(format!("generator {:?}: {e}", self.generator)))
    }

    fn penalties_for(&self, num_nodes: usize) -> Result<Vec<Penalty>> {
        self.penalties.iter().map(|p| p.penalty(num_nodes)).collect()
    }

    fn node_order(&self, net: &BayesNet) -> Result<NodeOrder> {
        match &self.order {
            None => NodeOrder::new(net.dag().topological_order()),
            Some(names) => {
                let idx = names
                    .iter()
                    .map(|n| {
                        net.variables()
                            .iter()
                            .position(|v| &v.name == n)
                            .ok_or_else(|| Error::Config(format!("unknown node {n:?} in order")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let order = NodeOrder::new(idx).map_err(|e| Error::Config(e.to_string()))?;
                if !net.dag().is_compatible_with(&order) {
                    return Err(Error::Config("order is not compatible with the generator".into()));
                }
                Ok(order)
            }
        }
    }

    fn nested_pair(&self, net: &BayesNet) -> Result<(Dag, Dag)> {
        let (g0, g1) = match &self.nested {
            Some(p) => (
                Dag::new(p.g0.clone()).map_err(|e| Error::Config(e.to_string()))?,
                Dag::new(p.g1.clone()).map_err(|e| Error::Config(e.to_string()))?,
            ),
            None if net.num_nodes() == 2 => (Dag::empty(2), Dag::new(vec![vec![], vec![0]])?),
            None => return Err(Error::Config("a nested pair is required for this generator".into())),
        };
        if g0.num_nodes() != net.num_nodes() || g1.num_nodes() != net.num_nodes() {
            return Err(Error::Config("nested pair does not match the generator".into()));
        }
        if !g0.is_subgraph_of(&g1)? || g0 == g1 {
            return Err(Error::Config("nested pair must satisfy g0 ⊂ g1".into()));
        }
        Ok((g0, g1))
    }
}

fn replicate_seed(base: u64, cell: usize, r: usize) -> Seed {
    Seed(base).derive(((cell as u64) << 32) | r as u64)
}

fn draw(net: &BayesNet, n: usize, missing: &MissingnessModel, seed: Seed) -> Result<crate::data::Dataset> {
    let mut rng = seed.rng();
    let d = forward_sample_with(net, n, &mut rng);
    apply_mcar_with(&d, missing, &mut rng)
}

/// One cell of the wrong-selection table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WrongSelectionRow {
    pub beta: f64,
    pub n: u64,
    pub penalty: String,
    /// Percentage of replicates with `S(G_1) > S(G_0)`.
    pub wrong_pct: f64,
    /// Monte Carlo standard error of `wrong_pct`, in percentage points.
    pub mc_se: f64,
}

/// `100·√(p(1−p)/R)` for a percentage `p`.
pub fn mc_standard_error(pct: f64, replicates: usize) -> f64 {
    let p = pct / 100.0;
    100.0 * (p * (1.0 - p) / replicates as f64).sqrt()
}

/// Wrong-selection rates of the nested pair `G_0 ⊂ G_1`.
pub fn run_two_node(config: &ExperimentConfig) -> Result<Vec<WrongSelectionRow>> {
    config.validate()?;
    let net = config.network()?;
    let (g0, g1) = config.nested_pair(&net)?;
    let penalties = config.penalties_for(net.num_nodes())?;
    let mode = config.score_mode();
    let r_count = config.replicates;
    let mut rows = Vec::new();
    for (mi, spec) in config.missing.iter().enumerate() {
        let missing = spec.model(net.num_nodes())?;
        let beta = beta_of_parent_sets(&pair_candidates(&g0, &g1), &missing)?;
        for (ni, &n) in config.sample_sizes.iter().enumerate() {
            let cell = mi * config.sample_sizes.len() + ni;
            let wrong: Vec<usize> = (0..r_count)
                .into_par_iter()
                .map(|r| -> Result<Vec<bool>> {
                    let d = draw(&net, n as usize, &missing, replicate_seed(config.seed, cell, r))?;
                    penalties
                        .iter()
                        .map(|p| {
                            let (s0, s1) = match mode {
                                ScoreMode::Global => (score_global(&d, &g0, p)?, score_global(&d, &g1, p)?),
                                ScoreMode::Decomposable => {
                                    (score_decomposable(&d, &g0, p)?.0, score_decomposable(&d, &g1, p)?.0)
                                }
                            };
                            Ok(s1 > s0)
                        })
                        .collect()
                })
                .try_fold(
                    || vec![0usize; penalties.len()],
                    |mut acc, flags| {
                        for (a, f) in acc.iter_mut().zip(flags?) {
                            *a += f as usize;
                        }
                        Ok::<_, Error>(acc)
                    },
                )
                .try_reduce(
                    || vec![0usize; penalties.len()],
                    |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()),
                )?;
            for (spec_p, &w) in config.penalties.iter().zip(&wrong) {
                let pct = 100.0 * w as f64 / r_count as f64;
                rows.push(WrongSelectionRow {
                    beta,
                    n,
                    penalty: spec_p.label(),
                    wrong_pct: pct,
                    mc_se: mc_standard_error(pct, r_count),
                });
            }
        }
    }
    Ok(rows)
}

fn pair_candidates(g0: &Dag, g1: &Dag) -> Vec<Vec<Vec<usize>>> {
    (0..g0.num_nodes())
        .map(|i| vec![g0.parents(i).to_vec(), g1.parents(i).to_vec()])
        .collect()
}

/// Structure recovery summary of one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryRow {
    pub n: u64,
    pub beta: f64,
    pub penalty: String,
    pub mean_f: f64,
    pub mean_df: f64,
    /// Fraction of replicates returning exactly `G_0`.
    pub recovery_rate: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct RecoveryAcc {
    f: f64,
    df: f64,
    exact: usize,
}

/// Learns every replicate under each penalty and compares with `G_0`.
pub fn run_recovery(config: &ExperimentConfig) -> Result<Vec<RecoveryRow>> {
    config.validate()?;
    let net = config.network()?;
    let order = config.node_order(&net)?;
    let space = SearchSpace::new(order, config.max_parents);
    let penalties = config.penalties_for(net.num_nodes())?;
    let mode = config.score_mode();
    let truth = net.dag();
    let vars = net.variables();
    let r_count = config.replicates;
    let mut rows = Vec::new();
    for (mi, spec) in config.missing.iter().enumerate() {
        let missing = spec.model(net.num_nodes())?;
        let beta = beta_of_parent_sets(space.all_candidates(), &missing)?;
        for (ni, &n) in config.sample_sizes.iter().enumerate() {
            let cell = mi * config.sample_sizes.len() + ni;
            let per_rep: Vec<Vec<(f64, u64, bool)>> = (0..r_count)
                .into_par_iter()
                .map(|r| -> Result<Vec<(f64, u64, bool)>> {
                    let d = draw(&net, n as usize, &missing, replicate_seed(config.seed, cell, r))?;
                    let table = CandidateTable::<f64>::build(&d, &space)?;
                    penalties
                        .iter()
                        .map(|p| {
                            let g = match mode {
                                ScoreMode::Decomposable => table.learn(p)?,
                                ScoreMode::Global => table.learn_global(p)?.dag,
                            };
                            let df = crate::model::df_complexity(&g, vars)?;
                            Ok((edge_f_score(truth, &g)?, df, &g == truth))
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            for (pi, spec_p) in config.penalties.iter().enumerate() {
                let acc = per_rep.iter().fold(RecoveryAcc::default(), |mut a, rep| {
                    let (f, df, exact) = rep[pi];
                    a.f += f;
                    a.df += df as f64;
                    a.exact += exact as usize;
                    a
                });
                let r = r_count as f64;
                rows.push(RecoveryRow {
                    n,
                    beta,
                    penalty: spec_p.label(),
                    mean_f: acc.f / r,
                    mean_df: acc.df / r,
                    recovery_rate: acc.exact as f64 / r,
                });
            }
        }
    }
    Ok(rows)
}

/// Spread of `l(G_1|D_n) − l(G_0|D_n)` at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub regime: String,
    pub n: u64,
    pub sd: f64,
    /// Least-squares slope of `ln sd` on `ln n` for the regime.
    pub slope: f64,
}

/// Sample standard deviation (`n − 1` denominator).
pub fn sample_sd(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Empirical rate of the nested NAL difference per missingness regime.
pub fn run_rate_probe(config: &ExperimentConfig) -> Result<Vec<RateRow>> {
    config.validate()?;
    let mut distinct = config.sample_sizes.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InsufficientGrid);
    }
    if config.replicates < 2 {
        return Err(Error::Config("the rate probe needs at least 2 replicates".into()));
    }
    let net = config.network()?;
    let (g0, g1) = config.nested_pair(&net)?;
    let mut rows = Vec::new();
    for (mi, spec) in config.missing.iter().enumerate() {
        let missing = spec.model(net.num_nodes())?;
        let mut sds = Vec::with_capacity(config.sample_sizes.len());
        for (ni, &n) in config.sample_sizes.iter().enumerate() {
            let cell = mi * config.sample_sizes.len() + ni;
            let diffs: Vec<f64> = (0..config.replicates)
                .into_par_iter()
                .map(|r| {
                    let d = draw(&net, n as usize, &missing, replicate_seed(config.seed, cell, r))?;
                    Ok(nal::<f64>(&d, &g1)? - nal::<f64>(&d, &g0)?)
                })
                .collect::<Result<_>>()?;
            sds.push(sample_sd(&diffs));
        }
        let x: Vec<f64> = config.sample_sizes.iter().map(|&n| (n as f64).ln()).collect();
        let y: Vec<f64> = sds.iter().map(|s| s.ln()).collect();
        let slope = ols_slope(&x, &y);
        for (&n, &sd) in config.sample_sizes.iter().zip(&sds) {
            rows.push(RateRow {
                regime: spec.label(),
                n,
                sd,
                slope,
            });
        }
    }
    Ok(rows)
}

/// Writes serializable rows as LF-terminated CSV with a header.
pub fn write_rows<T: Serialize>(rows: &[T], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Wrong-selection percentages of the published two-node study.
///
/// Rows are `(n, β)`; columns are α = 0.2..0.8 in steps of 0.1, then BIC, AIC.
pub const REFERENCE_COLUMNS: [&str; 9] = [
    "alpha=0.2", "alpha=0.3", "alpha=0.4", "alpha=0.5", "alpha=0.6", "alpha=0.7", "alpha=0.8", "bic", "aic",
];

#[rustfmt::skip]
pub const REFERENCE_TABLE: [(u64, f64, [f64; 9]); 20] = [
    (100, 1.0,  [0.0, 0.0, 0.0, 0.3, 0.9, 3.5, 10.6, 2.8, 16.0]),
    (100, 0.99, [0.0, 0.0, 0.0, 0.5, 1.7, 6.6, 17.0, 4.5, 22.9]),
    (100, 0.95, [0.0, 0.0, 0.2, 0.9, 3.8, 12.8, 24.0, 8.7, 31.2]),
    (100, 0.90, [0.0, 0.0, 0.0, 0.7, 6.9, 16.6, 31.5, 12.5, 37.0]),
    (100, 0.75, [0.0, 0.0, 1.1, 7.0, 18.5, 29.9, 40.2, 27.3, 44.4]),
    (1000, 1.0,  [0.0, 0.0, 0.0, 0.0, 0.0, 0.2, 3.6, 0.7, 13.9]),
    (1000, 0.99, [0.0, 0.0, 0.0, 0.0, 0.0, 1.6, 13.3, 2.9, 33.5]),
    (1000, 0.95, [0.0, 0.0, 0.0, 0.0, 0.4, 12.1, 28.8, 17.1, 42.0]),
    (1000, 0.90, [0.0, 0.0, 0.0, 0.1, 3.6, 19.1, 34.7, 23.0, 43.9]),
    (1000, 0.75, [0.0, 0.0, 0.0, 1.9, 15.8, 33.2, 42.4, 36.2, 47.2]),
    (10000, 1.0,  [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.8, 0.2, 15.0]),
    (10000, 0.99, [0.0, 0.0, 0.0, 0.0, 0.0, 2.7, 24.7, 13.9, 44.1]),
    (10000, 0.95, [0.0, 0.0, 0.0, 0.0, 1.5, 21.3, 37.7, 31.6, 47.8]),
    (10000, 0.90, [0.0, 0.0, 0.0, 0.0, 7.0, 28.9, 41.5, 36.5, 47.5]),
    (10000, 0.75, [0.0, 0.0, 0.0, 1.8, 22.3, 41.2, 50.5, 47.3, 53.8]),
    (100000, 1.0,  [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 17.7]),
    (100000, 0.99, [0.0, 0.0, 0.0, 0.0, 0.0, 11.8, 37.8, 35.8, 50.4]),
    (100000, 0.95, [0.0, 0.0, 0.0, 0.0, 3.5, 31.3, 44.6, 43.3, 49.8]),
    (100000, 0.90, [0.0, 0.0, 0.0, 0.0, 13.1, 36.1, 47.2, 46.0, 50.5]),
    (100000, 0.75, [0.0, 0.0, 0.0, 1.0, 21.4, 38.5, 45.5, 45.3, 48.2]),
];

/// Published percentage for a cell, if tabulated.
pub fn reference_pct(n: u64, beta: f64, penalty: &str) -> Option<f64> {
    let col = REFERENCE_COLUMNS.iter().position(|c| *c == penalty)?;
    REFERENCE_TABLE
        .iter()
        .find(|(rn, rb, _)| *rn == n && (rb - beta).abs() < 1e-9)
        .map(|(_, _, v)| v[col])
}

/// Comparison of one measured cell with its published value.
#[derive(Debug, Clone, PartialEq)]
pub struct CellCheck {
    pub row: WrongSelectionRow,
    pub reference: f64,
    /// `[lo, hi]` acceptance band in percentage points.
    pub band: (f64, f64),
    pub pass: bool,
}

/// Band of `±3` standard errors at the published `p`; zero cells allow at most 0.5%.
pub fn acceptance_band(reference: f64, replicates: usize) -> (f64, f64) {
    if reference == 0.0 {
        (0.0, 0.5)
    } else {
        let h = 3.0 * mc_standard_error(reference, replicates);
        (reference - h, reference + h)
    }
}

/// Checks every tabulated row against the published values.
pub fn check_against_reference(rows: &[WrongSelectionRow], replicates: usize) -> Vec<CellCheck> {
    rows.iter()
        .filter_map(|row| {
            let reference = reference_pct(row.n, row.beta, &row.penalty)?;
            let band = acceptance_band(reference, replicates);
            Some(CellCheck {
                row: row.clone(),
                reference,
                band,
                pass: row.wrong_pct >= band.0 - 1e-9 && row.wrong_pct <= band.1 + 1e-9,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_networks() {
        assert_eq!(synthetic_eight().df(), 54);
        let (vars, dag) = alarm_structure();
        assert_eq!(vars.len(), 37);
        assert_eq!(dag.num_edges(), 45);
        assert_eq!(crate::model::df_complexity(&dag, &vars).unwrap(), 473);
        assert!(builtin_or_file("no/such/file.json").is_err());
    }

    #[test]
    fn config_parsing() {
        let c = ExperimentConfig::from_json(
            r#"{"kind":"two-node","sample_sizes":[100],"penalties":[{"type":"bic"},{"type":"power","alpha":0.3}],
                "missing":[{"type":"beta","beta":0.75}],"replicates":10}"#,
        )
        .unwrap();
        assert_eq!(c.score_mode(), ScoreMode::Global);
        assert_eq!(c.penalties[1].label(), "alpha=0.3");
        assert_eq!(
            c.missing[0].model(2).unwrap(),
            MissingnessModel::Bernoulli(vec![0.75, 1.0])
        );
        assert!(ExperimentConfig::from_json(r#"{"kind":"two-node","sample_sizes":[],"penalties":[{"type":"aic"}]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind":"two-node","sample_sizes":[5],"penalties":[{"type":"aic"}],"replicates":0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind":"two-node","sample_sizes":[5],"bogus":1}"#).is_err());
    }

    #[test]
    fn single_n_rate_probe_is_rejected() {
        let c = ExperimentConfig::from_json(r#"{"kind":"rate-probe","sample_sizes":[100, 100],"replicates":5}"#).unwrap();
        assert_eq!(run_rate_probe(&c), Err(Error::InsufficientGrid));
    }

    #[test]
    fn two_node_small_run_is_deterministic() {
        let c = ExperimentConfig::from_json(
            r#"{"kind":"two-node","sample_sizes":[100],"penalties":[{"type":"aic"}],"replicates":50,"seed":7}"#,
        )
        .unwrap();
        let a = run_two_node(&c).unwrap();
        assert_eq!(a, run_two_node(&c).unwrap());
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].beta, 1.0);
    }

    #[test]
    fn reference_lookup_and_bands() {
        assert_eq!(reference_pct(100000, 0.99, "bic"), Some(35.8));
        assert_eq!(reference_pct(100, 1.0, "aic"), Some(16.0));
        assert_eq!(reference_pct(500, 1.0, "aic"), None);
        let (lo, hi) = acceptance_band(16.0, 1000);
        assert!((hi - lo - 6.0 * (0.16f64 * 0.84 / 1000.0).sqrt() * 100.0).abs() < 1e-12);
        assert!((hi - 16.0 - 3.478).abs() < 1e-3);
        assert_eq!(acceptance_band(0.0, 1000), (0.0, 0.5));
    }

    #[test]
    fn slope_of_exact_power_law() {
        let x: Vec<f64> = [100f64, 1000.0, 10000.0].iter().map(|v| v.ln()).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        assert!((ols_slope(&x, &y) + 0.5).abs() < 1e-12);
        assert!((sample_sd(&[1.0, 2.0, 3.0]) - 1.0).abs() < 1e-15);
    }
}
