//! Forward sampling from a network and MCAR masking.
//!
//! All randomness goes through [`Seed::rng`], a ChaCha8 stream seeded with
//! `rand_core`'s `seed_from_u64`. Replicate streams are derived with
//! [`Seed::derive`], so results do not depend on execution order.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, MISSING};
use crate::error::{Error, Result};
use crate::model::BayesNet;
use crate::num::Real;

/// Generator used throughout the crate.
pub type SampleRng = ChaCha8Rng;

/// A 64-bit seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

/// SplitMix64 finalizer.
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    pub fn rng(self) -> SampleRng {
        SampleRng::seed_from_u64(self.0)
    }

    /// `seed ⊕ mix64(index)`.
    pub fn derive(self, index: u64) -> Seed {
        Seed(self.0 ^ mix64(index))
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// How cells go missing, independently of their values.
#[derive(Debug, Clone, PartialEq)]
pub enum MissingnessModel {
    /// Cell of variable `i` is observed with probability `p[i]`, independently.
    Bernoulli(Vec<f64>),
    /// Exactly `k` cells per record are deleted, uniformly without replacement.
    KPerRecord(usize),
}

impl MissingnessModel {
    pub fn complete(num_vars: usize) -> Self {
        MissingnessModel::Bernoulli(vec![1.0; num_vars])
    }

    pub fn validate(&self, num_vars: usize) -> Result<()> {
        match self {
            MissingnessModel::Bernoulli(p) => {
                if p.len() != num_vars {
                    return Err(Error::InvalidMissingness(format!(
                        "{} probabilities for {num_vars} variables",
                        p.len()
                    )));
                }
                if let Some(bad) = p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                    return Err(Error::InvalidMissingness(format!(
                        "observation probability {bad} outside [0,1]"
                    )));
                }
            }
            MissingnessModel::KPerRecord(k) => {
                if *k >= num_vars.max(1) {
                    return Err(Error::InvalidMissingness(format!(
                        "k = {k} must be below the record width {num_vars}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Probability that every variable in `subset` is observed in a record.
    pub fn subset_observed(&self, num_vars: usize, subset: &[usize]) -> f64 {
        match self {
            MissingnessModel::Bernoulli(p) => subset.iter().map(|&i| p[i]).product(),
            MissingnessModel::KPerRecord(k) => {
                subset_observation_probability(num_vars, *k, subset.len())
            }
        }
    }
}

/// Draws `n` complete records by ancestral sampling.
pub fn forward_sample<T: Real>(net: &BayesNet<T>, n: usize, seed: Seed) -> Dataset {
    let mut rng = seed.rng();
    forward_sample_with(net, n, &mut rng)
}

/// Same as [`forward_sample`] but continues an existing stream.
pub fn forward_sample_with<T: Real, R: Rng>(net: &BayesNet<T>, n: usize, rng: &mut R) -> Dataset {
    let vars = net.variables();
    let order = net.dag().topological_order();
    // cumulative rows per node, in f64
    let cumulative: Vec<Vec<Vec<f64>>> = (0..net.num_nodes())
        .map(|i| {
            net.cpt()
                .node(i)
                .iter()
                .map(|row| {
                    let mut acc = 0.0;
                    row.iter()
                        .map(|p| {
                            acc += p.as_f64();
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut columns = vec![Vec::with_capacity(n); vars.len()];
    let mut state = vec![0usize; vars.len()];
    for _ in 0..n {
        for &i in &order {
            let j = net
                .dag()
                .parents(i)
                .iter()
                .fold(0, |j, &p| j * vars[p].cardinality + state[p]);
            let cum = &cumulative[i][j];
            let u: f64 = rng.random();
            let k = cum.iter().position(|&c| u < c).unwrap_or_else(|| {
                // rounding left the last cumulative value just below 1
                cum.iter().rposition(|_| true).unwrap()
            });
            state[i] = k;
        }
        for (col, &v) in columns.iter_mut().zip(&state) {
            col.push(v as u16);
        }
    }
    Dataset::from_columns(vars.to_vec(), columns).expect("sampled codes are in range")
}

/// Masks cells of `data`. Cells already missing stay missing.
pub fn apply_mcar(data: &Dataset, model: &MissingnessModel, seed: Seed) -> Result<Dataset> {
    let mut rng = seed.rng();
    apply_mcar_with(data, model, &mut rng)
}

pub fn apply_mcar_with<R: Rng>(data: &Dataset, model: &MissingnessModel, rng: &mut R) -> Result<Dataset> {
    let width = data.num_vars();
    model.validate(width)?;
    let mut out = data.clone();
    let rows = data.len();
    let cols = out.columns_mut();
    match model {
        MissingnessModel::Bernoulli(p) => {
            for s in 0..rows {
                for (i, col) in cols.iter_mut().enumerate() {
                    let u: f64 = rng.random();
                    if u >= p[i] {
                        col[s] = MISSING;
                    }
                }
            }
        }
        MissingnessModel::KPerRecord(k) => {
            #[allow(clippy::needless_range_loop)]
            for s in 0..rows {
                for i in index::sample(rng, width, *k) {
                    cols[i][s] = MISSING;
                }
            }
        }
    }
    Ok(out)
}

/// `C(N−k, s) / C(N, s)`: chance that a fixed set of `s` cells survives
/// `k` uniform deletions out of `N`.
pub fn subset_observation_probability(num_vars: usize, k: usize, s: usize) -> f64 {
    if s + k > num_vars {
        return 0.0;
    }
    (0..s)
        .map(|t| (num_vars - k - t) as f64 / (num_vars - t) as f64)
        .product()
}
