//! Energy-efficiency (state of efficiency, SOE) analysis of lithium-ion
//! cycling telemetry.
//!
//! The pipeline per battery is: parse the long-form telemetry and its
//! metadata ([`cycledata`]), drop the first and anomalous cycles, integrate
//! per-cycle energies and capacities ([`metrics`]), check the SOE series for
//! linearity with a Mann-Kendall test on its first difference and fit the
//! linear trend ([`trend`]), then assemble reports ([`report`]).
//!
//! SOE is `E_discharged / E_charged` for one full cycle. Charged and
//! discharged energy are sums of `V·I·Δt` over the sampled phase, with `Δt`
//! taken from timestamps. Dissipated energy is reported as the difference.

pub mod cycledata;
pub mod error;
pub mod metrics;
pub mod report;
pub mod trend;

pub use error::{Error, Result};
