//! Local analysis of bounded-degree graphs: neighborhood statistics,
//! mass-transport verification, small-component edge cuts, and transfer
//! of a partition's local statistics onto new graphs.
//!
//! The pieces fit together as a pipeline:
//!
//! 1. [`generators`] builds deterministic graph families.
//! 2. [`rooted`] + [`canon`] turn neighborhoods into canonical codes.
//! 3. [`stats`] collects root-neighborhood distributions, compares them
//!    in total variation, and checks mass-transport identities exactly.
//! 4. [`partition`] produces and verifies edge cuts whose removal
//!    leaves only components of bounded size.
//! 5. [`transfer`] estimates pattern statistics of a cut ensemble and
//!    replays them on another graph through keyed local randomness,
//!    with an explicit quality bound.
//!
//! Everything randomized is keyed off explicit seeds and is bit-stable
//! across runs and platforms. See the `examples/` directory for one
//! runnable walkthrough per capability.

pub mod canon;
pub mod error;
pub mod exact;
pub mod generators;
pub mod graph;
pub mod partition;
pub mod rng;
pub mod rooted;
pub mod stats;
pub mod transfer;

pub use canon::{canonical_code_marked, canonical_code_rooted, CanonicalCode, CodeCache};
pub use error::{Error, Result};
pub use exact::Rat;
pub use graph::Graph;
pub use partition::{
    brute_force_optimal_cut, build_ensemble, components_after_removal, derandomize_cut,
    greedy_ball_partition, grid_block_cut, random_shifted_partition, verify_partition, CutEnsemble,
    EdgeCut, PartitionQuality, WeightedCut,
};
pub use rooted::{ball, neighborhood_of_set, rooted_distance, MarkedBall, RootedBall, RootedDistance};
pub use stats::{mtp_check, psi, sample_psi, tv_distance, LocalFunction, NeighborhoodDistribution};
pub use transfer::{
    choose_r, component_of, enumerate_connected_sets, epsilon_tilde, estimate_ptilde,
    local_partition, raw_transfer_bound, transfer_experiment, ComponentStats, LocalCutOutcome,
    PatternEntry, RadiusSelection, RadiusStep, SetBudget, TransferConfig, TransferReport,
};
