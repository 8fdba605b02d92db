//! Isotonic regression on partial orders.
//!
//! Given a dag (or points under domination, or an arbitrary comparator) and
//! integer values with nonnegative integer weights on its vertices, the
//! solvers produce the closest isotonic function — one that never decreases
//! along the order — under a choice of metrics:
//!
//! - **L0** (weighted change count): [`l0_regress`], [`l0_regress_points`],
//!   [`l0_regress_pairwise`]. Solved exactly via a maximum-weight antichain
//!   of the violator graph, found by minimum flow with lower bounds.
//! - **L1** and **L2**: [`l1_regress`], [`l2_exact`] and their point
//!   variants. Solved exactly by metric partitioning: binary splits over a
//!   value grid, each split an L0 instance; L2 recovers exact rational
//!   level means from a fine grid.
//! - **Lp, p > 1**: [`lp_approx`], grid-accurate approximation with the
//!   same partitioning.
//!
//! Linear orders get dedicated fast paths in [`chain`].

pub mod bits;
pub mod chain;
pub mod error;
pub mod flow;
pub mod l0;
pub mod oracle;
pub mod order;
pub mod partition;
pub mod rational;
mod relation;
pub mod violator;

pub use chain::{binary_l1_chain, l0_chain, l1_chain, pav_l2};
pub use error::{Error, Result};
pub use l0::{extend_antichain, l0_regress, l0_regress_pairwise, l0_regress_points};
pub use oracle::{oracle_antichain, oracle_l2_maxmin, oracle_regress};
pub use order::{
    isotonic_check, prune_nonviolating, regression_error, topological_order, Dag, Diagnostics,
    ErrorSum, Metric, Pruned, RegressionResult, WeightedFunction,
};
pub use partition::{
    binary_l1, l1_regress, l1_regress_points, l2_exact, l2_exact_points, lp_approx,
    lp_approx_points,
};
pub use rational::{format_rat, parse_rat, rat, Rat};
pub use violator::{
    boxes_to_domination, rendezvous_violator, steiner_relation, transitive_closure,
    violator_closure, violator_pairwise, PointSet, SteinerCoordinate, SteinerOrder, ViolatorDag,
};
