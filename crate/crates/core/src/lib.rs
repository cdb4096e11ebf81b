//! Rotationally symmetric translating solitons of mean curvature flow.
pub mod asymptotics;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod funnel;
pub mod ode;
pub mod profile_ode;
pub mod quad;
pub mod report;
pub mod subsolution;
pub mod sweep;

pub use error::{Error, Result};
