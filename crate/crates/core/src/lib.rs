//! Exact germ calculus on truncated multivariate Taylor series over `Q(i)`.
//!
//! Germs are represented by [`Jet`]s. The elementary operators live in [`operators`],
//! operator expressions and their shift analysis in [`calculus`], exponential-polynomial
//! implicit systems in [`implicit`] and the blow-up of the origin of `C^2` in [`blowup`].

pub mod blowup;
pub mod calculus;
pub mod error;
pub mod gaussian;
pub mod implicit;
pub mod jet;
pub mod json;
pub mod multi_index;
pub mod operators;
pub mod poly;

pub use error::{GermError, ParseError};
pub use gaussian::GaussianRational;
pub use jet::{Jet, JetTuple, Point};
pub use multi_index::MultiIndex;
pub use poly::Polynomial;
