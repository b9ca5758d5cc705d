//! Certified lower and upper enclosures for double integrals of functions that
//! are convex on the coordinates of a rectangle.
//!
//! The building blocks are the composite midpoint (lower) and trapezoid
//! (upper) sums of [`bounds`]. [`rect`] applies them along both coordinates to
//! produce two-sided bounds, single inequalities and the classical five-term
//! chains of means. [`convexity`] checks the coordinate-convexity hypothesis by
//! sampling and generates random test functions, and [`oracle`] provides an
//! independent Simpson reference.

pub mod bounds;
pub mod convexity;
pub mod corpus;
pub mod error;
pub mod expr;
pub mod func;
pub mod oracle;
pub mod quadrature;
pub mod rect;

pub use bounds::{lemma1_bounds, lemma2_upper, midpoint_lower, trapezoid_upper, BoundPair, Interval, Partition1D};
pub use error::{Error, Result};
pub use func::{Fn1D, Fn2D};
pub use rect::{
    bakula_chain, dragomir_chain, theorem3_discrete_bounds, theorem3_terms, theorem4_terms,
    theorem5_terms, theorem6_upper, ChainReport, InnerScheme, Rect,
};
