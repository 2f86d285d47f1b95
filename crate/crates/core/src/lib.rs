//! Lipschitz-type extension of maps with values in Banach function spaces over
//! finite measure spaces, with numerical checks of the extension theorems and
//! of their interpolated versions.

pub mod bfs;
pub mod cli;
pub mod check;
pub mod error;
pub mod extension;
pub mod gen;
pub mod interp;
pub mod map;
pub mod measure_extension;
pub mod metric;
pub mod numeric;
mod par;
pub mod subset;
pub mod suites;
pub mod tol;

pub use bfs::{BfsSpec, FiniteMeasureSpace, FunctionNorm, SetFunctionTable};
pub use error::{Error, Result, Witness};
pub use map::SampledMap;
pub use metric::FiniteMetricSpace;
pub use subset::Subset;
