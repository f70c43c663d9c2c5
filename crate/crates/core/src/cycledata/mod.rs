//! Telemetry data model, interchange-format parsing, cleaning and
//! segmentation of variable-condition histories.

mod clean;
mod metadata;
mod model;
mod segment;
mod telemetry;

pub use clean::{
    clean_history, CleanedHistory, CleaningAudit, CleaningPolicy, RemovalReason, RemovedCycle,
};
pub use metadata::{
    ConditionOverride, ConditionPatch, Metadata, SegmentFile, SegmentFileEntry, SegmentSpec,
    DEFAULT_CHARGE_VOLTAGE_V,
};
pub use model::{
    AnomalyFlag, BatteryHistory, CycleRecord, OperatingConditions, PhaseKind, PhaseTrace, Sample,
    Segment,
};
pub use segment::segment_history;
pub use telemetry::{
    history_metadata, parse_history, read_history, write_telemetry, TELEMETRY_HEADER,
};
