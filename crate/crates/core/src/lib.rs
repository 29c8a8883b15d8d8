pub mod bounds;
pub mod chebyshev;
pub mod collocation;
pub mod error;
pub mod expr;
pub mod maps;
pub mod precision;

pub use error::{Error, ErrorKind, Result};
pub use precision::{make_context, Interval, PrecisionContext, Real};
