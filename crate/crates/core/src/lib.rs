//! Exact piecewise-constant numerics for continuous Schauder frames.
//!
//! All integrands are step functions, so reconstruction integrals, set
//! suprema and norms are evaluated in closed form over cells.

pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod lp;
pub mod par;
pub mod pettis;
pub mod sampling;
pub mod stepfn;
pub mod translate_frame;
pub mod wavelet_frame;

pub use diagnostics::{DiscreteFrame, IndexSet, SpaceTag};
pub use error::{Error, Result};
pub use lp::CoordinateVector;
pub use par::Execution;
pub use pettis::IntervalSet;
pub use stepfn::StepFunction;
pub use translate_frame::{Generator, RademacherSpec};
pub use wavelet_frame::WaveletSystem;
