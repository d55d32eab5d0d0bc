//! Datasets with missing cells, sufficient counts and plug-in estimators.

use num_traits::{FromPrimitive, Num};

use crate::error::{Error, Result};
use crate::model::{parent_config_count, validate_variables, Variable};

/// Stored code of a missing cell.
pub const MISSING: u16 = u16::MAX;

/// `n` records over a fixed schema, stored column-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    variables: Vec<Variable>,
    columns: Vec<Vec<u16>>,
    rows: usize,
}

impl Dataset {
    pub fn empty(variables: Vec<Variable>) -> Result<Self> {
        Self::from_columns(variables.clone(), vec![Vec::new(); variables.len()])
    }

    /// Columns hold category codes or [`MISSING`].
    pub fn from_columns(variables: Vec<Variable>, columns: Vec<Vec<u16>>) -> Result<Self> {
        validate_variables(&variables)?;
        if columns.len() != variables.len() {
            return Err(Error::InvalidData(format!(
                "{} columns for {} variables",
                columns.len(),
                variables.len()
            )));
        }
        let rows = columns.first().map_or(0, Vec::len);
        for (c, (col, var)) in columns.iter().zip(&variables).enumerate() {
            if col.len() != rows {
                return Err(Error::InvalidData(format!("column {c} has {} rows, expected {rows}", col.len())));
            }
            if let Some(row) = col
                .iter()
                .position(|&v| v != MISSING && v as usize >= var.cardinality)
            {
                return Err(Error::InvalidData(format!(
                    "row {row}, column {}: code {} exceeds cardinality {}",
                    var.name, col[row], var.cardinality
                )));
            }
        }
        Ok(Self {
            variables,
            columns,
            rows,
        })
    }

    /// Records as rows of optional category codes.
    pub fn from_records(variables: Vec<Variable>, records: &[Vec<Option<u16>>]) -> Result<Self> {
        let width = variables.len();
        let mut columns = vec![Vec::with_capacity(records.len()); width];
        for (s, rec) in records.iter().enumerate() {
            if rec.len() != width {
                return Err(Error::InvalidData(format!("record {s} has {} cells, expected {width}", rec.len())));
            }
            for (col, cell) in columns.iter_mut().zip(rec) {
                col.push(cell.unwrap_or(MISSING));
            }
        }
        Self::from_columns(variables, columns)
    }

    /// Complete records.
    pub fn from_complete(variables: Vec<Variable>, records: &[Vec<u16>]) -> Result<Self> {
        let recs: Vec<Vec<Option<u16>>> = records
            .iter()
            .map(|r| r.iter().map(|&v| Some(v)).collect())
            .collect();
        Self::from_records(variables, &recs)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    /// Number of records `n`.
    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn column(&self, i: usize) -> &[u16] {
        &self.columns[i]
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<u16> {
        let v = self.columns[col][row];
        (v != MISSING).then_some(v)
    }

    pub fn record(&self, row: usize) -> Vec<Option<u16>> {
        (0..self.num_vars()).map(|c| self.cell(row, c)).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.columns.iter().all(|c| !c.contains(&MISSING))
    }

    pub fn missing_count(&self) -> usize {
        self.columns
            .iter()
            .map(|c| c.iter().filter(|&&v| v == MISSING).count())
            .sum()
    }

    pub(crate) fn columns_mut(&mut self) -> &mut [Vec<u16>] {
        &mut self.columns
    }
}

/// Counts for one node and one candidate parent set.
///
/// Only records where the node and all of its parents are observed contribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SufficientCounts {
    pub node: usize,
    pub parents: Vec<usize>,
    /// `q(X_i)`.
    pub child_states: usize,
    /// Dataset size `n`.
    pub n: u64,
    /// `n_i`.
    pub n_i: u64,
    /// `n_{i,j}` per parent configuration.
    pub n_ij: Vec<u64>,
    /// `n_{i,kj}` stored at `j * child_states + k`.
    pub n_ikj: Vec<u64>,
}

impl SufficientCounts {
    pub fn parent_configs(&self) -> usize {
        self.n_ij.len()
    }

    pub fn n_ikj(&self, k: usize, j: usize) -> u64 {
        self.n_ikj[j * self.child_states + k]
    }

    /// `n_{i,kj}` for configuration `j` as a slice over `k`.
    pub fn column(&self, j: usize) -> &[u64] {
        &self.n_ikj[j * self.child_states..(j + 1) * self.child_states]
    }

    /// `n − n_i`.
    pub fn n_missing(&self) -> u64 {
        self.n - self.n_i
    }
}

/// Tallies `n_i`, `n_{i,j}` and `n_{i,kj}` for `node` given sorted `parents`.
pub fn count_sufficient_stats(data: &Dataset, node: usize, parents: &[usize]) -> Result<SufficientCounts> {
    let width = data.num_vars();
    for &i in parents.iter().chain(std::iter::once(&node)) {
        if i >= width {
            return Err(Error::IndexOutOfRange { index: i, limit: width });
        }
    }
    if parents.contains(&node) {
        return Err(Error::InvalidParentSet {
            node,
            reason: "node listed among its own parents".into(),
        });
    }
    if parents.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParentSet {
            node,
            reason: "parents must be sorted and unique".into(),
        });
    }

    let vars = data.variables();
    let q = vars[node].cardinality;
    let configs = parent_config_count(parents, vars);
    let mut n_ikj = vec![0u64; configs * q];
    let child = data.column(node);
    let parent_cols: Vec<(&[u16], usize)> = parents
        .iter()
        .map(|&p| (data.column(p), vars[p].cardinality))
        .collect();

    'records: for (s, &k) in child.iter().enumerate() {
        if k == MISSING {
            continue;
        }
        let mut j = 0usize;
        for &(col, card) in &parent_cols {
            let v = col[s];
            if v == MISSING {
                continue 'records;
            }
            j = j * card + v as usize;
        }
        n_ikj[j * q + k as usize] += 1;
    }

    let n_ij: Vec<u64> = n_ikj.chunks(q).map(|c| c.iter().sum()).collect();
    let n_i = n_ij.iter().sum();
    Ok(SufficientCounts {
        node,
        parents: parents.to_vec(),
        child_states: q,
        n: data.len() as u64,
        n_i,
        n_ij,
        n_ikj,
    })
}

/// Plug-in estimates; `None` marks a ratio with zero denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedTable<T> {
    /// `n_i / n`.
    pub theta_i: Option<T>,
    /// `n_{i,j} / n_i`.
    pub theta_ij: Vec<Option<T>>,
    /// `n_{i,kj} / n_{i,j}` stored at `j * child_states + k`.
    pub theta_ikj: Vec<Option<T>>,
    pub child_states: usize,
}

impl<T: Clone> ObservedTable<T> {
    pub fn theta_ikj(&self, k: usize, j: usize) -> Option<T> {
        self.theta_ikj[j * self.child_states + k].clone()
    }
}

fn ratio<T: Num + FromPrimitive>(num: u64, den: u64) -> Option<T> {
    (den > 0).then(|| T::from_u64(num).expect("count") / T::from_u64(den).expect("count"))
}

/// Point estimators `θ̂_i`, `θ̂_{i,j}`, `θ̂_{i,kj}`.
///
/// Generic over any numeric field, so rationals give exact values.
pub fn estimate_theta<T: Num + FromPrimitive + Clone>(counts: &SufficientCounts) -> ObservedTable<T> {
    let q = counts.child_states;
    ObservedTable {
        theta_i: ratio(counts.n_i, counts.n),
        theta_ij: counts.n_ij.iter().map(|&c| ratio(c, counts.n_i)).collect(),
        theta_ikj: counts
            .n_ikj
            .iter()
            .enumerate()
            .map(|(idx, &c)| ratio(c, counts.n_ij[idx / q]))
            .collect(),
        child_states: q,
    }
}
