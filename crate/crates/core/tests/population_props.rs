mod common;

use approx::assert_abs_diff_eq;
use nalbn::experiments::{synthetic_eight, two_node_network};
use nalbn::population::{all_dags, beta_of_parent_sets, population_nal_from};
use nalbn::search::subsets_by_size;
use nalbn::{
    apply_mcar, beta_of_collection, check_identifiability, forward_sample, induced_joint, induced_theta_mcar,
    joint_distribution, nal, population_nal, BayesNet, Cpt, Dag, MissingnessModel, NodeOrder, SearchSpace, Seed,
    Variable,
};

fn dependent_pair() -> BayesNet {
    BayesNet::new(
        Variable::binary_set(2),
        Dag::new(vec![vec![], vec![0]]).unwrap(),
        Cpt::new(vec![vec![vec![0.4, 0.6]], vec![vec![0.9, 0.1], vec![0.2, 0.8]]]).unwrap(),
    )
    .unwrap()
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter().map(|x| x * x.ln()).sum::<f64>()
}

#[test]
fn independent_pair_joint_and_nal() {
    let net = two_node_network();
    let joint = joint_distribution(&net).unwrap();
    for (got, want) in joint.probs().iter().zip([0.12, 0.28, 0.18, 0.42]) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
    }
    let missing = MissingnessModel::Bernoulli(vec![0.75, 1.0]);
    let empty = Dag::empty(2);
    let l = population_nal(&empty, &induced_theta_mcar(&empty, &net, &missing).unwrap()).unwrap();
    let want = -(entropy(&[0.4, 0.6]) + entropy(&[0.3, 0.7]));
    assert_abs_diff_eq!(l, want, epsilon = 1e-12);
    assert_abs_diff_eq!(l, -1.2839, epsilon = 5e-5);

    let chain = Dag::new(vec![vec![], vec![0]]).unwrap();
    let table = induced_theta_mcar(&chain, &net, &missing).unwrap();
    for j in 0..2 {
        assert_abs_diff_eq!(table.nodes[1].conditional.cond(0, j), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(table.nodes[1].conditional.cond(1, j), 0.7, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(table.nodes[0].theta_i, 0.75, epsilon = 1e-15);
}

#[test]
fn induced_joint_of_empty_dag_is_the_marginal_product() {
    let net = dependent_pair();
    let p0 = joint_distribution(&net).unwrap();
    let ind = induced_joint(&Dag::empty(2), &net).unwrap();
    let m1 = [0.4 * 0.9 + 0.6 * 0.2, 0.4 * 0.1 + 0.6 * 0.8];
    let want = [0.4 * m1[0], 0.4 * m1[1], 0.6 * m1[0], 0.6 * m1[1]];
    for (got, w) in ind.table.probs().iter().zip(want) {
        assert_abs_diff_eq!(*got, w, epsilon = 1e-12);
    }
    assert!(ind.table.total_variation(&p0).unwrap() > 0.1);
    let same = induced_joint(net.dag(), &net).unwrap();
    assert!(same.table.total_variation(&p0).unwrap() < 1e-12);
}

#[test]
fn identifiability_examples() {
    let net = two_node_network();
    let cands = vec![Dag::empty(2), Dag::new(vec![vec![], vec![0]]).unwrap()];
    let r = check_identifiability(&net, &cands, &MissingnessModel::complete(2)).unwrap();
    assert!(r.identifiable && r.satisfies_definition);
    assert_eq!(r.minimal_maximizers, vec![0]);
    assert_abs_diff_eq!(r.candidates[1].nal, r.truth_nal, epsilon = 1e-12);

    // Order-compatible sets are always identifiable under MCAR.
    let mut rng = common::rng(31);
    for _ in 0..20 {
        let vars = common::random_vars(&mut rng, 3, 3);
        let dag = common::random_dag(&mut rng, 3, 0.6, 2);
        let order = NodeOrder::new(dag.topological_order()).unwrap();
        let net = common::random_net(&mut rng, vars, dag);
        let cands = SearchSpace::new(order, 2).enumerate_dags();
        let missing = MissingnessModel::Bernoulli(vec![0.9, 0.6, 0.8]);
        let r = check_identifiability(&net, &cands, &missing).unwrap();
        assert!(r.identifiable && r.satisfies_definition);
    }

    // Truth 0 -> 1 with 2 isolated; 1 -> 0 <- 2 misses the truth yet keeps its NAL.
    let vars = Variable::binary_set(3);
    let g0 = Dag::new(vec![vec![], vec![0], vec![]]).unwrap();
    let net = BayesNet::new(
        vars,
        g0,
        Cpt::new(vec![
            vec![vec![0.4, 0.6]],
            vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            vec![vec![0.5, 0.5]],
        ])
        .unwrap(),
    )
    .unwrap();
    let cands = vec![Dag::empty(3), Dag::new(vec![vec![1, 2], vec![], vec![]]).unwrap()];
    let r = check_identifiability(&net, &cands, &MissingnessModel::complete(3)).unwrap();
    assert!(!r.satisfies_definition);
    assert!(!r.identifiable);
}

#[test]
fn beta_values() {
    let dags = all_dags(2);
    assert_eq!(beta_of_collection(&dags, &MissingnessModel::complete(2)).unwrap(), 1.0);
    let pair = vec![Dag::empty(2), Dag::new(vec![vec![], vec![0]]).unwrap()];
    let b = beta_of_collection(&pair, &MissingnessModel::Bernoulli(vec![0.75, 1.0])).unwrap();
    assert_abs_diff_eq!(b, 0.75, epsilon = 1e-15);

    let sets: Vec<Vec<Vec<usize>>> = (0..37)
        .map(|i| {
            let others: Vec<usize> = (0..37).filter(|&v| v != i).collect();
            subsets_by_size(&others, 2)
        })
        .collect();
    let b = beta_of_parent_sets(&sets, &MissingnessModel::KPerRecord(2)).unwrap();
    assert_abs_diff_eq!(b, 0.8423, epsilon = 5e-5);
    assert_abs_diff_eq!(b, (35.0 * 34.0 * 33.0) / (37.0 * 36.0 * 35.0), epsilon = 1e-12);
}

#[test]
fn sample_nal_converges_to_population() {
    let net = synthetic_eight();
    let missing = MissingnessModel::Bernoulli(vec![0.9; 8]);
    let l0 = population_nal(net.dag(), &induced_theta_mcar(net.dag(), &net, &missing).unwrap()).unwrap();
    let d = forward_sample(&net, 100_000, Seed(41));
    let d = apply_mcar(&d, &missing, Seed(42)).unwrap();
    let l: f64 = nal(&d, net.dag()).unwrap();
    assert!((l - l0).abs() < 0.01, "{l} vs {l0}");
    let joint = joint_distribution(&net).unwrap();
    assert_abs_diff_eq!(population_nal_from(net.dag(), &joint), l0, epsilon = 1e-9);
}
