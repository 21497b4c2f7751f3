//! Dynamic one-dimensional two-phase simulator of a proton exchange membrane
//! fuel cell.
//!
//! The cell is discretised across its thickness into anode and cathode gas
//! channels (lumped), diffusion layers, catalyst layers and the membrane.
//! The crate evaluates the transport and electrochemical laws, integrates the
//! resulting stiff system implicitly, finds steady states, sweeps
//! polarization curves and calibrates the undetermined kinetic parameters.

pub mod calibration;
pub mod cell;
pub mod error;
pub mod polarization;
pub mod properties;
pub mod scenario;
pub mod solver;
pub mod transport;

pub use error::{Error, Result};
