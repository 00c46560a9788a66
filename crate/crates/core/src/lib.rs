//! Symbolic and numeric toolkit for k-contact geometry and Lie systems.
//!
//! The crate provides an exact computer-algebra kernel (multivariate rational
//! functions over the rationals), exterior calculus over coordinate charts,
//! k-contact structure verification and construction, Lie-system level
//! algebra (bracket closures, structure constants, diagonal prolongations,
//! companion systems for constants of motion), fixed-step numeric
//! verification, and a corpus of golden example systems exercising the whole
//! pipeline.

pub mod chart;
pub mod error;
pub mod expr;
pub mod exterior;
pub mod kcontact;
pub mod liesys;
pub mod corpus;
pub mod numeric;
pub mod linalg;
pub mod rng;
pub mod span;

pub use chart::Chart;
pub use error::{CalcError, CorpusError, ExprError, KContactError, LieError, LinAlgError, NumericError};
pub use expr::{parse, Expr};
