//! 2-adic scalars, unramified local rings and the 2-adic regulator.

pub mod q2;

pub use q2::{sqrt_neg_q, Q2, Q2i};
pub mod local;
pub mod regulator;
pub use regulator::{regulator_2adic, RegulatorError, RegulatorResult};

pub use local::{hensel_root_from, hensel_roots, Local2, Local2Ring, LocalError};
