pub mod catalog;
pub mod convert;
pub mod counting;
pub mod error;
pub mod exec;
pub mod involutions;
pub mod io;
pub mod metric;
pub mod numerics;
pub mod sampling;
pub mod spectra;
pub mod symmetry;

pub use error::{PtError, Result};
pub use numerics::{ComplexMatrix, ToleranceConfig};
