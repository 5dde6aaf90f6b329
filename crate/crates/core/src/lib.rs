//! Transient simulation of a water-cooled photovoltaic/thermal collector
//! with a mixed storage tank.
//!
//! - [`params`]: design, datasheet and weather records with loaders.
//! - [`thermal`]: loss coefficients, collector factors and the
//!   tank → back surface → cell temperature chain.
//! - [`electrical`]: single-diode module model, I–V curves and MPP.
//! - [`engine`]: time march, efficiencies and RMS validation.
//! - [`exec`]: parallel/sequential fan-out for independent runs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod electrical;
pub mod engine;
pub mod error;
pub mod exec;
pub mod params;
pub mod thermal;

pub use electrical::{CircuitVariant, DiodeModel, OperatingPoint, ReferenceParams};
pub use engine::{run_simulation, ElectricalMode, SimulationOptions, SimulationRecord, ValidationReport};
pub use error::{Error, Result};
pub use exec::Execution;
pub use params::{CollectorDesign, DatasheetSpec, WeatherSample, WeatherSeries};
pub use thermal::{DerivedCoefficients, LossModel};
