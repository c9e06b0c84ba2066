pub mod dualize;
pub mod embedder;
pub mod error;
pub mod homlattice;
pub mod lefschetz;
pub mod mcg;
pub mod obstruction;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod plumbing;
pub mod substitution;

pub use error::{Error, ParseError, Result};
