//! Finitary set functors at desk scale.
//!
//! The crate makes the classical fixed-point constructions on finitary set
//! functors executable on small instances:
//!
//! - [`functor`]: a grammar of finitary set functors with exact evaluation on
//!   finite sets and functions, and the splitting-based checker that functor
//!   images of nonempty intersection squares are pullbacks;
//! - [`chains`]: finite prefixes of the initial-algebra and
//!   terminal-coalgebra chains with their connecting maps and convergence
//!   detection;
//! - [`algebra`]: initial-algebra elements as finite canonical terms, the
//!   one-layer unfold/fold pair, and the embedding of terms into rational
//!   behaviors;
//! - [`coalgebra`]: finite coalgebras, depth-`n` behavioral projections, and
//!   bisimilarity by kernel refinement along the final chain;
//! - [`metric`]: the canonical ultrametric (distances as exact exponents),
//!   the ε-approximants relative to a base point in `F(∅)`, the induced
//!   partial order, and density witnesses;
//! - [`gset`]: finite group actions, orbits, connected objects, and width
//!   bookkeeping;
//! - [`demo`]: reproducible worked examples and counterexample shadows.

pub mod algebra;
pub mod chains;
pub mod coalgebra;
pub mod demo;
pub mod error;
pub mod finset;
pub mod functor;
pub mod gset;
pub mod metric;
pub mod report;
pub mod util;
pub mod value;

pub use algebra::{embed_term, fold_term, unfold_term, validate_term, Term};
pub use chains::{
    detect_convergence, initial_chain, stage_label, terminal_chain, truncate_at_depth,
    u_bar_projection, ChainPrefix, Direction,
};
pub use coalgebra::{
    behavioral_partition, behaviorally_equal, is_homomorphism, minimize, minimize_with_witness,
    project, Coalgebra, Partition, RationalElement,
};
pub use error::{Error, Result};
pub use finset::{compose, pullback, FiniteFunction, FiniteSet};
pub use functor::{check_intersection_preservation, FunctorExpr, DEFAULT_SIZE_LIMIT};
pub use gset::{
    connected_objects, hom_count, hom_count_brute, orbits, power, width_report, FiniteGroup,
    GAction,
};
pub use metric::{completion_witness, distance, epsilon, leq, BasePoint, Distance};
pub use report::{Check, VerificationReport};
pub use value::{CanonValue, RawValue, POINT};
