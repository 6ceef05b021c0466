//! Reference evaluators that do not use the pairing/permutation machinery.

pub mod mc;
pub mod wick;

pub use mc::{mc_oracle, McReport};
pub use wick::{budget_from_env, wick_oracle, wick_oracle_with_budget, work_estimate};
