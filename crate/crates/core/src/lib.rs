//! Steady states, fluctuations and finite-size quantum dynamics of the
//! anisotropic open quantum Rabi model.

pub mod error;
pub mod fit;
pub mod fluctuations;
pub mod meanfield;
pub mod numeric;
pub mod ode;
pub mod params;
pub mod path;
pub mod quantum;
pub mod semiclassical;

pub use error::{Error, Result};
pub use meanfield::{Branch, MeanFieldSolution, Phase, PhaseBoundaries, PhasePoint, Stability};
pub use num_complex::Complex64;
pub use params::{ModelParams, ParamFile, RenormalizedParams, Violation};
pub use path::Line;
