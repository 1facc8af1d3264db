//! Spectral-efficiency simulator for active STAR-RIS-assisted cell-free
//! massive MIMO with phase errors and channel aging.

pub mod channel;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod estimation;
pub mod experiments;
pub mod monte_carlo;
pub mod numerics;
pub mod ris;
pub mod scenario;
pub mod system;

pub use error::{Error, Result};
