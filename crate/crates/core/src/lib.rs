//! Loewner matrices of real functions, conditional definiteness tests and
//! randomized checks of matrix monotonicity and convexity of finite order.
//!
//! The crate is organised bottom-up:
//!
//! - [`funcs`]: symbolic test functions with exact values and derivatives
//! - [`divdiff`]: first and second divided differences
//! - [`loewner`]: Loewner matrices and weighted transforms `w(t) f(t)`
//! - [`definiteness`]: PSD, conditionally positive/negative definite tests
//! - [`matorder`]: Jacobi eigensolver, functional calculus, order checks
//! - [`intervals`]: Möbius conjugation between `(a, b)` and `(0, ∞)`
//! - [`search`]: α sweeps, counterexample hunts and implication probes
//!
//! Property checkers are registered by name in a [`property::PropertyRegistry`]
//! so frontends can pick them at runtime.

pub mod definiteness;
pub mod divdiff;
pub mod error;
pub mod funcs;
pub mod intervals;
pub mod linalg;
pub mod loewner;
pub mod matorder;
pub mod property;
pub mod rng;
pub mod search;
pub mod witness;

pub use definiteness::{Definiteness, DefinitenessVerdict};
pub use divdiff::{fdd, sdd, ConfluencePolicy};
pub use error::{Error, Result};
pub use funcs::{FunctionDescriptor, Interval, Weight, WeightTag};
pub use linalg::Matrix;
pub use loewner::{LoewnerMatrix, PointTuple};
pub use matorder::{OrderCheckConfig, OrderCheckReport, SpectralDecomposition};
pub use property::{Property, PropertyCheck, PropertyRegistry};
pub use witness::Witness;
