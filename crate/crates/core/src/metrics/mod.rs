//! Per-cycle energy and capacity metrics.
//!
//! Energies are integrated in joules from `V·I` products; capacities in
//! ampere-hours from `I`. Reports convert energies to watt-hours for display.

mod correlation;
mod cycle;
mod integrate;

pub use correlation::pearson;
pub use cycle::{
    compute_cycle_metrics, compute_series, cycle_soe, CycleMetrics, MetricsSeries, SeriesPoint,
    SkippedCycle,
};
pub use integrate::{integrate_charge, integrate_power, IntegrationRule};
