use super::annotations::{Family, MetricInfo, MANIFEST};
use super::compute::MetricReport;
use crate::ratio::{Ratio, SignedRatio};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Map, Value};
use std::fmt::Write as _;
use std::io;
use std::str::FromStr;
use thiserror::Error;

pub const REPORT_SCHEMA: &str = "report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("unknown format '{0}' (expected json or markdown)")]
    UnknownFormat(String),
    #[error("no reports to render")]
    Empty,
}

impl FromStr for Format {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(RenderError::UnknownFormat(other.to_string())),
        }
    }
}

/// Fixed six-decimal rendering; never prints `-0.000000`.
pub fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// Pretty JSON whose floats always carry six decimals.
struct SixDecimals<'a>(PrettyFormatter<'a>);

impl Formatter for SixDecimals<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt6(value).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        w.write_all(fmt6(value as f64).as_bytes())
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes through a `Value`, so object keys come out sorted.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("report types serialize to JSON");
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, SixDecimals(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("writing to memory");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

enum Cell {
    Ratio(Ratio),
    Signed(SignedRatio),
    Real {
        value: Option<f64>,
        count: Option<u64>,
    },
    Detail {
        summary: String,
        count: String,
        json: Value,
    },
}

impl Cell {
    fn json(&self) -> Value {
        match self {
            Cell::Ratio(r) => serde_json::to_value(r).expect("ratio"),
            Cell::Signed(r) => serde_json::to_value(r).expect("ratio"),
            Cell::Real { value, count } => {
                let mut m = Map::new();
                m.insert("value".into(), json!(value));
                if let Some(c) = count {
                    m.insert("count".into(), json!(c));
                }
                Value::Object(m)
            }
            Cell::Detail { json, .. } => json.clone(),
        }
    }

    fn count(&self) -> String {
        match self {
            Cell::Ratio(r) => r.to_string(),
            Cell::Signed(r) => r.to_string(),
            Cell::Real { count, .. } => count.map_or(String::new(), |c| format!("n={c}")),
            Cell::Detail { count, .. } => count.clone(),
        }
    }

    fn value(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("undefined".to_string(), fmt6);
        match self {
            Cell::Ratio(r) => opt(r.value()),
            Cell::Signed(r) => opt(r.value()),
            Cell::Real { value, .. } => opt(*value),
            Cell::Detail { summary, .. } => summary.clone(),
        }
    }
}

fn cell(r: &MetricReport, name: &str) -> Cell {
    let (o, rel, s, l) = (&r.outcome, &r.reliance, &r.safety, &r.learning);
    let c = &rel.conditional;
    match name {
        "acc_h0" => Cell::Ratio(o.acc_h0),
        "acc_ai" => Cell::Ratio(o.acc_ai),
        "acc_team" => Cell::Ratio(o.acc_team),
        "team_gain_vs_human" => Cell::Signed(o.gain_vs_human),
        "team_gain_vs_ai" => Cell::Signed(o.gain_vs_ai),
        "acc_oracle" => Cell::Ratio(o.acc_oracle),
        "regret_best" => Cell::Signed(o.regret_best),
        "accept_on_correct" => Cell::Ratio(c.accept_on_correct),
        "accept_on_wrong" => Cell::Ratio(c.accept_on_wrong),
        "reject_on_correct" => Cell::Ratio(c.reject_on_correct),
        "reject_on_wrong" => Cell::Ratio(c.reject_on_wrong),
        "changed" => Cell::Ratio(rel.changes.changed),
        "changed_to_right" => Cell::Ratio(rel.changes.changed_to_right),
        "changed_to_wrong" => Cell::Ratio(rel.changes.changed_to_wrong),
        "reliance_slope" => Cell::Real {
            value: c.reliance_slope,
            count: None,
        },
        "intervention_latency" => Cell::Real {
            value: rel.latency.mean_ms,
            count: Some(rel.latency.count),
        },
        "update_asymmetry" => match &r.update_asymmetry {
            Some(a) => {
                let mut json = serde_json::to_value(a).expect("asymmetry");
                json["status"] = json!("computed");
                let summary = match a.persistence {
                    Some(p) => format!("{} (persistence {})", a.classification.as_str(), fmt6(p)),
                    None => a.classification.as_str().to_string(),
                };
                let count = a
                    .exposure_index
                    .map_or(String::new(), |e| format!("exposure at {e}"));
                Cell::Detail {
                    summary,
                    count,
                    json,
                }
            }
            None => Cell::Detail {
                summary: "skipped".into(),
                count: String::new(),
                json: json!({"status": "skipped"}),
            },
        },
        "ai_help" => Cell::Ratio(s.ai_help),
        "ai_harm" => Cell::Ratio(s.ai_harm),
        "missed_help" => Cell::Ratio(s.missed_help),
        "correct_ignore" => Cell::Ratio(s.correct_ignore),
        "near_miss_rate" => Cell::Ratio(s.near_miss),
        "rollback_rate" => Cell::Ratio(s.rollback_rate),
        "escalation_rate" => Cell::Ratio(s.escalation_rate),
        "contradiction_rate" => Cell::Ratio(s.contradiction_rate),
        "calibration_gap" => Cell::Real {
            value: l.calibration_gap.value,
            count: Some(l.calibration_gap.count),
        },
        "slope_over_time" => {
            let t = &l.slope_trajectory;
            Cell::Detail {
                summary: format!(
                    "delta {}",
                    t.delta_slope.map_or("undefined".to_string(), fmt6)
                ),
                count: format!("{} blocks ({})", t.slopes_by_block.len(), l.blocking),
                json: json!({
                    "blocking": l.blocking,
                    "blocks": t.slopes_by_block,
                    "delta_slope": t.delta_slope,
                }),
            }
        }
        "retention" => Cell::Detail {
            summary: l
                .retention
                .diagnostic
                .clone()
                .unwrap_or_else(|| diff_summary(l.retention.diffs.iter().map(|d| d.diff))),
            count: format!("{} comparisons", l.retention.diffs.len()),
            json: serde_json::to_value(&l.retention).expect("retention"),
        },
        "transfer" => Cell::Detail {
            summary: if l.transfer.is_empty() {
                "needs at least two tasks".to_string()
            } else {
                diff_summary(l.transfer.iter().map(|d| d.diff))
            },
            count: format!("{} comparisons", l.transfer.len()),
            json: json!({ "diffs": l.transfer }),
        },
        "time_to_calibration" => {
            let (summary, status) = match (l.time_to_calibration_computed, l.time_to_calibration) {
                (false, _) => ("skipped".to_string(), "skipped"),
                (true, Some(i)) => (format!("index {i}"), "computed"),
                (true, None) => ("not reached".to_string(), "computed"),
            };
            Cell::Detail {
                summary,
                count: format!("window {}", r.parameters.calibration.window),
                json: json!({"status": status, "value": l.time_to_calibration}),
            }
        }
        other => unreachable!("manifest entry '{other}' has no value"),
    }
}

fn diff_summary(diffs: impl Iterator<Item = Option<f64>>) -> String {
    let max = diffs
        .flatten()
        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
    match max {
        Some(m) => format!("max |diff| {}", fmt6(m)),
        None => "undefined".to_string(),
    }
}

fn report_json(r: &MetricReport) -> Value {
    let mut families = Map::new();
    for family in Family::ALL {
        let mut metrics = Map::new();
        for info in MANIFEST.iter().filter(|m| m.family == family) {
            let mut entry = match cell(r, info.name).json() {
                Value::Object(m) => m,
                other => Map::from_iter([("value".to_string(), other)]),
            };
            annotate(&mut entry, info);
            metrics.insert(info.name.to_string(), Value::Object(entry));
        }
        families.insert(family.key().to_string(), Value::Object(metrics));
    }
    let mut parameters = serde_json::to_value(&r.parameters).expect("parameters");
    parameters["source"] =
        json!("engine defaults or command-line overrides; not part of the metric definitions");
    json!({
        "partition": r.partition,
        "partition_keys": r.partition_keys,
        "coverage": r.coverage,
        "metrics": families,
        "notes": {
            "error_recovery": "reported as ai_help",
            "error_amplification": "reported as ai_harm",
            "rollback_ai_agreeing": r.safety.rollback_ai_agreeing,
            "escalate_policy_records": r.safety.policy_escalate,
        },
        "parameters": parameters,
        "diagnostics": r.diagnostics,
    })
}

fn annotate(entry: &mut Map<String, Value>, info: &MetricInfo) {
    entry.insert("label".into(), json!(info.label));
    entry.insert("uci_stage".into(), json!(info.stage.as_str()));
    entry.insert("design_action".into(), json!(info.design_action));
}

fn markdown(reports: &[MetricReport]) -> String {
    let mut out = String::from("# Readiness report\n");
    for r in reports {
        let cov = &r.coverage;
        let _ = write!(out, "\n## Partition: {}", r.partition);
        if !r.partition_keys.is_empty() {
            let _ = write!(out, " ({})", r.partition_keys.join(", "));
        }
        let _ = writeln!(
            out,
            "\n\nRecords: {} (AI correct {}, AI wrong {}); timed {}; with confidence {}; with risk {}.",
            cov.records, cov.ai_correct, cov.ai_wrong, cov.timed, cov.with_confidence, cov.with_risk
        );
        for family in Family::ALL {
            let _ = writeln!(out, "\n### {} ({})\n", family.title(), family.question());
            out.push_str("| Metric | Count | Value | U-C-I stage | Design action |\n");
            out.push_str("|---|---|---|---|---|\n");
            for info in MANIFEST.iter().filter(|m| m.family == family) {
                let c = cell(r, info.name);
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} |",
                    info.label,
                    c.count(),
                    c.value(),
                    info.stage,
                    info.design_action
                );
            }
        }
        let p = &r.parameters;
        let _ = writeln!(
            out,
            "\nEngine parameters (implementation choices, not metric definitions): asymmetry window {}, epsilon {}, persistence threshold {}; calibration window {}, epsilon {}, stability {}; block size {}.",
            p.asymmetry.window,
            p.asymmetry.epsilon,
            p.asymmetry.persistence_threshold,
            p.calibration.window,
            p.calibration.epsilon,
            p.calibration.stability,
            p.block_size
        );
        if !r.diagnostics.is_empty() {
            out.push_str("\n### Diagnostics\n\n");
            for d in &r.diagnostics {
                let _ = writeln!(out, "- {d}");
            }
        }
    }
    out
}

pub fn render(reports: &[MetricReport], format: Format) -> Result<String, RenderError> {
    if reports.is_empty() {
        return Err(RenderError::Empty);
    }
    Ok(match format {
        Format::Json => to_json_string(&json!({
            "schema": REPORT_SCHEMA,
            "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
        })),
        Format::Markdown => markdown(reports),
    })
}
