//! Structure learning of discrete Bayesian networks from incomplete data
//! with the node-average log-likelihood (NAL).
//!
//! The core is generic over the floating scalar through [`Real`]; `f64`
//! aliases are the defaults and `*32` aliases cover single precision.

// `!(x > 0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod em;
pub mod equivalence;
pub mod error;
pub mod experiments;
pub mod io;
pub mod model;
pub mod num;
pub mod population;
pub mod sampling;
pub mod scoring;
pub mod search;

pub use data::{count_sufficient_stats, estimate_theta, Dataset, ObservedTable, SufficientCounts, MISSING};
pub use em::{q_star, q_star_maximizer, QStarInput, QStarMaximizer, QStarNode};
pub use equivalence::{dags_equivalent, edge_f_score, v_structures, EdgeConfusion, Skeleton};
pub use error::{Error, Result};
pub use model::{df_complexity, is_subgraph, validate_dag, BayesNet, Cpt, Dag, NodeOrder, Variable};
pub use num::Real;
pub use population::{
    beta_of_collection, check_identifiability, induced_joint, induced_theta_mcar, joint_distribution,
    population_nal, IdentifiabilityReport, InducedJoint, InducedTable, JointTable,
};
pub use sampling::{apply_mcar, forward_sample, subset_observation_probability, MissingnessModel, Seed};
pub use scoring::{
    lambda_value, nal, node_nal, score_decomposable, score_global, standard_avg_loglik, NodeScore, Penalty,
};
pub use search::{
    best_parent_set, complexity_profile, learn_structure, learn_structure_global, CandidateTable, ProfilePoint,
    SearchSpace,
};

/// Single-precision network.
pub type BayesNet32 = BayesNet<f32>;
pub type Cpt32 = Cpt<f32>;
pub type Penalty32 = Penalty<f32>;
pub type NodeScore32 = NodeScore<f32>;
pub type JointTable32 = JointTable<f32>;
pub type ProfilePoint32 = ProfilePoint<f32>;
pub type CandidateTable32 = CandidateTable<f32>;
pub type QStarInput32 = QStarInput<f32>;

/// Double-precision network.
pub type BayesNet64 = BayesNet<f64>;
pub type Cpt64 = Cpt<f64>;
pub type Penalty64 = Penalty<f64>;
pub type NodeScore64 = NodeScore<f64>;
pub type JointTable64 = JointTable<f64>;
pub type ProfilePoint64 = ProfilePoint<f64>;
pub type CandidateTable64 = CandidateTable<f64>;
pub type QStarInput64 = QStarInput<f64>;
