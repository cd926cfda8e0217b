//! Steady states of the 1D Poisson-Nernst-Planck system with no-flux
//! boundaries, computed through the charge-conserving Poisson-Boltzmann
//! (CCPB) equation in its inverse-integral form.

pub mod analysis;
pub mod donnan;
pub mod error;
pub mod fd;
pub mod kernel;
pub mod output;
pub mod quadrature;
pub mod roots;
pub mod solver;

pub use error::{Error, Result};
