//! Symmetric eigensolver, functional calculus and randomized checks of
//! `n`-monotonicity and `n`-convexity.
//!
//! Only real symmetric matrices are sampled. The classes are defined over
//! complex Hermitian matrices; for the real functions handled here the two
//! are assumed to agree, which this crate does not verify.

pub mod calculus;
pub mod checks;
pub mod eigen;
pub mod sampling;

pub use calculus::apply_function;
pub use checks::{
    check_contraction, check_n_concave, check_n_convex, check_n_monotone, loewner_psd_probe, run_check, trial_context,
    OrderCheckConfig, OrderCheckReport, Verdict,
};
pub use eigen::{sym_eigen, SpectralDecomposition};
pub use sampling::{random_orthogonal, sample_ordered_pair, SamplingConfig, SamplingWindow};
