//! Graded algebra engine: Grassmann coefficients, exponential-polynomial
//! functions, the super star product and the structures built on it.

pub mod error;
pub mod exppoly;
pub mod grassmann;
pub mod gwaction;
pub mod heisenberg;
pub mod hilbert;
pub mod ledger;
pub mod poly;
pub mod qgroup;
pub mod sampling;
pub mod starprod;
pub mod superfun;
pub mod supertorus;
pub mod udf;
pub mod verify;

pub use error::{Error, Result};
pub use exppoly::{ExpPoly, ExpPolyFunction};
pub use grassmann::{AuxNumber, Coefficient, Grassmann, GrassmannElement, IndexSet};
