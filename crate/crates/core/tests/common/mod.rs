#![allow(dead_code)]

use nalbn::model::Cpt;
use nalbn::{BayesNet, Dag, Dataset, Variable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vars<R: Rng>(rng: &mut R, n: usize, max_card: usize) -> Vec<Variable> {
    (0..n)
        .map(|i| Variable::new(format!("V{i}"), rng.random_range(2..=max_card)).unwrap())
        .collect()
}

/// Random DAG whose edges all respect the identity order, then relabelled by `perm`.
pub fn random_dag<R: Rng>(rng: &mut R, n: usize, edge_prob: f64, max_parents: usize) -> Dag {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let mut edges = Vec::new();
    for child in 0..n {
        let mut count = 0;
        for parent in 0..child {
            if count < max_parents && rng.random_bool(edge_prob) {
                edges.push((perm[parent], perm[child]));
                count += 1;
            }
        }
    }
    Dag::from_edges(n, &edges).unwrap()
}

/// Strictly positive random CPTs.
pub fn random_net<R: Rng>(rng: &mut R, vars: Vec<Variable>, dag: Dag) -> BayesNet {
    let tables = (0..vars.len())
        .map(|i| {
            let configs: usize = dag.parents(i).iter().map(|&p| vars[p].cardinality).product();
            (0..configs)
                .map(|_| (0..vars[i].cardinality).map(|_| 0.05 + rng.random::<f64>()).collect())
                .collect()
        })
        .collect();
    BayesNet::new(vars, dag, Cpt::normalized(tables).unwrap()).unwrap()
}

/// Uniform random codes, each cell missing with probability `miss`.
pub fn random_data<R: Rng>(rng: &mut R, vars: &[Variable], n: usize, miss: f64) -> Dataset {
    let records: Vec<Vec<Option<u16>>> = (0..n)
        .map(|_| {
            vars.iter()
                .map(|v| {
                    if rng.random_bool(miss) {
                        None
                    } else {
                        Some(rng.random_range(0..v.cardinality) as u16)
                    }
                })
                .collect()
        })
        .collect();
    Dataset::from_records(vars.to_vec(), &records).unwrap()
}

/// Every parent-set assignment compatible with `order` and the in-degree cap,
/// built from bitmasks independently of the library's enumeration.
pub fn brute_force_dags(order: &[usize], max_parents: usize) -> Vec<Dag> {
    let n = order.len();
    let mut rank = vec![0; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let options: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|i| {
            let preds: Vec<usize> = (0..n).filter(|&j| rank[j] < rank[i]).collect();
            (0u32..(1 << preds.len()))
                .filter(|m| m.count_ones() as usize <= max_parents)
                .map(|m| {
                    (0..preds.len())
                        .filter(|b| m & (1 << b) != 0)
                        .map(|b| preds[b])
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        out.push(Dag::new((0..n).map(|i| options[i][idx[i]].clone()).collect()).unwrap());
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < options[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

pub fn random_order<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    perm
}

/// Entropy-based NAL of a single column, `Σ p ln p` over observed cells.
pub fn column_neg_entropy(col: &[u16], card: usize) -> f64 {
    let mut counts = vec![0f64; card];
    let mut total = 0.0;
    for &v in col {
        if v != nalbn::MISSING {
            counts[v as usize] += 1.0;
            total += 1.0;
        }
    }
    counts.iter().filter(|&&c| c > 0.0).map(|c| c / total * (c / total).ln()).sum()
}
