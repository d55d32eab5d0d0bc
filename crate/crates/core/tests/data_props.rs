mod common;

use nalbn::{count_sufficient_stats, estimate_theta, forward_sample, Dag, Dataset, Seed, Variable};
use nalbn::{apply_mcar, BayesNet, Cpt, MissingnessModel};
use num_rational::Ratio;
use proptest::prelude::*;

fn hand_data() -> Dataset {
    Dataset::from_complete(Variable::binary_set(2), &[vec![0, 0], vec![0, 1], vec![1, 1], vec![1, 1]]).unwrap()
}

/// Straight record-by-record tally used as an oracle.
fn tally(data: &Dataset, node: usize, parents: &[usize]) -> (u64, Vec<u64>, Vec<u64>) {
    let vars = data.variables();
    let q = vars[node].cardinality;
    let configs: usize = parents.iter().map(|&p| vars[p].cardinality).product();
    let (mut n_i, mut n_ij, mut n_ikj) = (0, vec![0; configs], vec![0; configs * q]);
    for s in 0..data.len() {
        let rec = data.record(s);
        let Some(k) = rec[node] else { continue };
        if parents.iter().any(|&p| rec[p].is_none()) {
            continue;
        }
        let mut j = 0;
        for &p in parents {
            j = j * vars[p].cardinality + rec[p].unwrap() as usize;
        }
        n_i += 1;
        n_ij[j] += 1;
        n_ikj[j * q + k as usize] += 1;
    }
    (n_i, n_ij, n_ikj)
}

#[test]
fn hand_counts() {
    let d = hand_data();
    let c = count_sufficient_stats(&d, 1, &[0]).unwrap();
    assert_eq!((c.n_i, c.n_ij.clone()), (4, vec![2, 2]));
    assert_eq!(c.column(0), &[1, 1]);
    assert_eq!(c.column(1), &[0, 2]);
    let c = count_sufficient_stats(&d, 1, &[]).unwrap();
    assert_eq!((c.n_i, c.n_ij.clone(), c.n_ikj.clone()), (4, vec![4], vec![1, 3]));

    let masked = Dataset::from_records(
        Variable::binary_set(2),
        &[vec![None, Some(0)], vec![None, Some(1)]],
    )
    .unwrap();
    let c = count_sufficient_stats(&masked, 1, &[0]).unwrap();
    assert_eq!(c.n_i, 0);
    assert!(c.n_ij.iter().chain(&c.n_ikj).all(|&v| v == 0));
    assert!(count_sufficient_stats(&masked, 2, &[]).is_err());
}

#[test]
fn hand_estimates_are_exact() {
    let c = count_sufficient_stats(&hand_data(), 1, &[0]).unwrap();
    let t = estimate_theta::<Ratio<u64>>(&c);
    let r = |a, b| Some(Ratio::new(a, b));
    assert_eq!(t.theta_i, r(1, 1));
    assert_eq!(t.theta_ij, vec![r(1, 2), r(1, 2)]);
    assert_eq!(t.theta_ikj(0, 0), r(1, 2));
    assert_eq!(t.theta_ikj(1, 0), r(1, 2));
    assert_eq!(t.theta_ikj(0, 1), r(0, 1));
    assert_eq!(t.theta_ikj(1, 1), r(1, 1));

    let d = Dataset::from_complete(Variable::binary_set(2), &[vec![0, 0], vec![0, 1]]).unwrap();
    let t = estimate_theta::<f64>(&count_sufficient_stats(&d, 1, &[0]).unwrap());
    assert_eq!(t.theta_ikj(0, 1), None);
    assert_eq!(t.theta_ikj(0, 0), Some(0.5));
}

#[test]
fn estimators_are_unbiased_under_mcar() {
    let net = BayesNet::new(
        Variable::binary_set(2),
        Dag::new(vec![vec![], vec![0]]).unwrap(),
        Cpt::new(vec![vec![vec![0.3, 0.7]], vec![vec![0.8, 0.2], vec![0.35, 0.65]]]).unwrap(),
    )
    .unwrap();
    let missing = MissingnessModel::Bernoulli(vec![0.75, 0.9]);
    let truth = [[0.8, 0.2], [0.35, 0.65]];
    let mut sums = vec![Vec::new(); 4];
    for r in 0..2000u64 {
        let d = forward_sample(&net, 15, Seed(5).derive(r));
        let d = apply_mcar(&d, &missing, Seed(6).derive(r)).unwrap();
        let t = estimate_theta::<f64>(&count_sufficient_stats(&d, 1, &[0]).unwrap());
        for j in 0..2 {
            for k in 0..2 {
                if let Some(v) = t.theta_ikj(k, j) {
                    sums[j * 2 + k].push(v);
                }
            }
        }
    }
    for j in 0..2 {
        for k in 0..2 {
            let xs = &sums[j * 2 + k];
            let m = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / m;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
            let se = (var / m).sqrt();
            assert!((mean - truth[j][k]).abs() <= 3.0 * se, "j={j} k={k}: {mean} vs {}", truth[j][k]);
        }
    }
}

proptest! {
    #[test]
    fn counts_are_consistent(seed in any::<u64>(), n in 0usize..60, miss in 0.0f64..0.6) {
        let mut rng = common::rng(seed);
        let vars = common::random_vars(&mut rng, 4, 4);
        let d = common::random_data(&mut rng, &vars, n, miss);
        for node in 0..4 {
            for mask in 0u32..16 {
                if mask & (1 << node) != 0 {
                    continue;
                }
                let parents: Vec<usize> = (0..4).filter(|b| mask & (1 << b) != 0).collect();
                let c = count_sufficient_stats(&d, node, &parents).unwrap();
                prop_assert_eq!(c.n, n as u64);
                prop_assert!(c.n_i <= c.n);
                prop_assert_eq!(c.n_ij.iter().sum::<u64>(), c.n_i);
                for j in 0..c.parent_configs() {
                    prop_assert_eq!(c.column(j).iter().sum::<u64>(), c.n_ij[j]);
                }
                prop_assert_eq!((c.n_i, c.n_ij.clone(), c.n_ikj.clone()), tally(&d, node, &parents));
                prop_assert_eq!(&c, &count_sufficient_stats(&d.clone(), node, &parents).unwrap());
            }
        }
    }

    #[test]
    fn float_estimates_match_rationals(seed in any::<u64>(), n in 1usize..40) {
        let mut rng = common::rng(seed);
        let vars = common::random_vars(&mut rng, 3, 3);
        let d = common::random_data(&mut rng, &vars, n, 0.2);
        let c = count_sufficient_stats(&d, 2, &[0, 1]).unwrap();
        let exact = estimate_theta::<Ratio<u64>>(&c);
        let float = estimate_theta::<f64>(&c);
        let to_f = |r: Option<Ratio<u64>>| r.map(|r| *r.numer() as f64 / *r.denom() as f64);
        prop_assert_eq!(to_f(exact.theta_i), float.theta_i);
        for (a, b) in exact.theta_ij.iter().zip(&float.theta_ij) {
            prop_assert_eq!(to_f(*a), *b);
        }
        for (a, b) in exact.theta_ikj.iter().zip(&float.theta_ikj) {
            prop_assert_eq!(to_f(*a), *b);
        }
    }
}
