//! Probabilistic single-copy conversion of bipartite pure states on the
//! majorization lattice.
//!
//! * [`schmidt`]: canonical Schmidt vectors and the majorization preorder.
//! * [`lattice`]: meet and join (optimal common resource / product).
//! * [`ladder`]: entanglement monotones, optimal probability, ratio ladder.
//! * [`protocols`]: vidal, greedy and thrifty plans, multi-state planning.
//! * [`oracle_sim`]: dense state-vector simulator used as a cross-check.
//! * [`sampling`] and [`sweep`]: random instances and property sweeps.
//! * [`cli`]: the `majlat` command-line front end.

pub mod cli;
pub mod error;
pub mod ladder;
pub mod lattice;
pub mod oracle_sim;
pub mod protocols;
pub mod sampling;
pub mod schmidt;
pub mod sweep;
pub mod tolerance;

pub use error::{Error, Result};
pub use ladder::{intermediate_state, monotones, p_max, r_vector, ratio_ladder, RatioLadder};
pub use lattice::{join, join_many, meet, meet_many};
pub use protocols::{
    plan_greedy, plan_multi_source, plan_multi_target, plan_thrifty, plan_vidal, ConversionPlan,
    NamedState, PlanStep, Protocol,
};
pub use schmidt::{canonicalize, compare, MajOrder, ProbVec};
