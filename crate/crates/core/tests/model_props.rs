mod common;

use nalbn::experiments::alarm_structure;
use nalbn::{df_complexity, is_subgraph, Dag, Error, NodeOrder};
use proptest::prelude::*;

#[test]
fn alarm_shape() {
    let (vars, dag) = alarm_structure();
    assert_eq!(vars.len(), 37);
    assert_eq!(dag.num_edges(), 45);
    assert_eq!(df_complexity(&dag, &vars).unwrap(), 473);
}

#[test]
fn cycles_and_bad_orders_are_rejected() {
    assert!(matches!(Dag::new(vec![vec![2], vec![0], vec![1]]), Err(Error::CycleDetected(_))));
    assert!(Dag::new(vec![vec![0]]).is_err());
    assert!(NodeOrder::new(vec![0, 0, 1]).is_err());
    assert!(is_subgraph(&Dag::empty(2), &Dag::empty(3)).is_err());
}

proptest! {
    #[test]
    fn subgraph_is_a_partial_order(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let g: Vec<Dag> = (0..3).map(|_| common::random_dag(&mut rng, 4, 0.5, 3)).collect();
        for a in &g {
            prop_assert!(is_subgraph(a, a).unwrap());
            for b in &g {
                if is_subgraph(a, b).unwrap() && is_subgraph(b, a).unwrap() {
                    prop_assert_eq!(a, b);
                }
                for c in &g {
                    if is_subgraph(a, b).unwrap() && is_subgraph(b, c).unwrap() {
                        prop_assert!(is_subgraph(a, c).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn df_grows_with_every_added_edge(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let vars = common::random_vars(&mut rng, 5, 4);
        let dag = common::random_dag(&mut rng, 5, 0.3, 4);
        let base = df_complexity(&dag, &vars).unwrap();
        for from in 0..5 {
            for to in 0..5 {
                if from == to || dag.has_edge(from, to) {
                    continue;
                }
                let mut sets = dag.parent_sets().to_vec();
                sets[to].push(from);
                if let Ok(bigger) = Dag::from_unsorted(sets) {
                    prop_assert!(is_subgraph(&dag, &bigger).unwrap());
                    prop_assert!(df_complexity(&bigger, &vars).unwrap() > base);
                }
            }
        }
    }
}
