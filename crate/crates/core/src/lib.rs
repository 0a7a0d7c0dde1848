//! Generalized (POVM) qubit measurements and what joint measurability
//! buys you.
//!
//! The crate covers four connected pieces of machinery at desk scale:
//!
//! - **Measurements** ([`povm`], [`linalg`], [`states`]): dense 2x2/4x4
//!   complex-Hermitian linear algebra, sharp and noisy spin POVMs, Lüders
//!   state updates, entropies of bipartite qubit states.
//! - **Compatibility** ([`compat`]): decides whether a collection of
//!   dichotomic qubit POVMs admits a grand POVM, via Dykstra alternating
//!   projections over second-order-cone Bloch constraints, with bisection
//!   searches for unsharpness thresholds.
//! - **Uncertainty** ([`uncertainty`]): Maassen-Uffink-type entropy
//!   bounds with and without quantum memory, the singlet prediction game,
//!   and the entropic steering inequality.
//! - **Moments** ([`moments`]): sequential unsharp-sharp measurement
//!   statistics on trine axes, moment-matrix positivity, and the
//!   three-term Leggett-Garg inequality.
//!
//! [`sampling`] adds a deterministic, seeded Monte Carlo layer for
//! empirical validation of the analytic tables.

pub mod compat;
pub mod error;
pub mod linalg;
pub mod moments;
pub mod povm;
pub mod sampling;
pub mod states;
pub mod uncertainty;

pub use compat::{
    canonical_pair_grand_povm, pair_criterion_unbiased, solve_feasibility, threshold,
    threshold_with_gap, BlochEffect, FeasibilityReport, GrandPovm, GrandPovmProblem, SolveConfig,
    ThresholdMode, ThresholdSearch, Verdict,
};
pub use error::{Error, Result};
pub use linalg::{
    eig_hermitian, kron, partial_trace, sqrt_psd, trace_norm, ComplexMat, HermitianOp, Subsystem,
};
pub use moments::{
    build_moment_matrix, lgi_value, moment_eigenvalues, pair_correlation, positivity_threshold,
    sequential_correlations, sequential_pair_table, trine_axes, CorrelationTriple, MomentMatrix,
};
pub use povm::{
    expectation, luders_update, noisy_spin, outcome_distribution, sharp_spin, validate, Axis,
    Effect, Outcome, Povm, ValidationReport,
};
pub use sampling::{
    empirical_conditional_entropy, empirical_correlation, sample_table, SampleRun,
    Xoshiro256StarStar,
};
pub use states::{
    conditional_vn_entropy, cq_post_measurement, measured_conditional_entropy, product_state,
    singlet, von_neumann_entropy, CqState, DensityOp,
};
pub use uncertainty::{
    beating_threshold, binary_entropy, game_lhs, joint_table, memory_bound, mu_bound, overlap_c,
    run_game, GameReport, JointProbTable,
};
