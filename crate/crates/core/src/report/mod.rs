//! Per-partition metric reports and their JSON and Markdown renderings.

pub mod annotations;
mod compute;
mod render;

pub use annotations::{info, Family, MetricInfo, UciStage, MANIFEST};
pub use compute::{
    check_identities, compute_report, Coverage, LearningSection, MetricReport, ReportError,
    ReportParams,
};
pub use render::{fmt6, render, to_json_string, Format, RenderError, REPORT_SCHEMA};
