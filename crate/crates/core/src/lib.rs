pub mod action;
pub mod catalog;
pub mod amenability;
pub mod config;
pub mod covering;
pub mod error;
pub mod graph;
pub mod hyperbolic;
pub mod isoperimetry;
pub mod lazy;
pub mod linalg;
pub mod renormalize;
pub mod report;
pub mod sample;
pub mod scenario;
pub mod spectral;

pub use error::{Error, Result};

pub use graph::{Graph, GraphFunction, LocallyFinite};
pub use scenario::{run_scenario, Outcome, Scenario, TheoremReport};
pub use spectral::SpectralEstimate;
