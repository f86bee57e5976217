//! Trees of cylinders, cross-connected components and the regular
//! neighbourhood of a family of almost invariant sets, computed on finite
//! windows of a simplicial tree.

pub mod dot;
pub mod error;
pub mod fixtures;
pub mod forest;
pub mod gen;
pub mod io;
pub mod qh;
pub mod rn;
pub mod tc;
pub mod verify;
pub mod window;

pub use error::{Error, Result};
