//! Numerical toolkit for weighted composition operators on logarithmic
//! Bloch-type spaces of the unit disk.
//!
//! Everything is built on a weighted sup-norm solver over a boundary-clustered
//! polar grid. Operator quantities are computed through derivative identities,
//! so no quadrature is ever performed.

pub mod analytic;
pub mod error;
pub mod grid;
pub mod norms;
pub mod operators;
pub mod optimize;
pub mod report;
pub mod testfns;
pub mod verify;
pub mod weights;
pub mod zygmund;

pub use analytic::{AnalyticExpr, SymbolPair};
pub use error::{Error, Result};
pub use grid::GridSpec;
pub use norms::{monomial_growth_norm, NormValue, SupResult, SupSolver};
pub use weights::{Weight, WeightId};
