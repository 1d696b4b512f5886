//! Reading and writing trace files.
//!
//! The canonical format is UTF-8 JSONL. The first line is a header object
//!
//! ```text
//! {"schema":"trace/1","alphabet":["0","1"]}
//! ```
//!
//! and every following line is one record whose keys are the
//! [`DecisionRecord`] field names. Header keys other than `schema` and
//! `alphabet` become trace metadata; record keys outside the schema are kept
//! in [`DecisionRecord::extra`]. Two optional header keys are consumed by the
//! reader instead of being kept:
//!
//! - `confidence_scale: [lo, hi]` maps confidences linearly from `[lo, hi]`
//!   onto `[0, 1]` (for Likert-style logs),
//! - `timestamps: "epoch_ms" | "rfc3339"` declares the timestamp encoding.
//!   Either encoding is accepted per value; timestamps are always written as
//!   integer epoch milliseconds.
//!
//! CSV is supported as an import/export convenience through a
//! [`ColumnMapping`] from trace fields to column names.

use crate::trace::{validate_trace, DecisionRecord, Label, Policy, Risk, Trace, ValidationErrors};
use serde_json::{Map, Value};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, Read, Write};
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "trace/1";

/// Every record field name, in on-disk order.
pub const RECORD_FIELDS: [&str; 19] = [
    "case_id",
    "ground_truth",
    "human_initial",
    "ai_prediction",
    "human_final",
    "confidence",
    "t_ai_shown",
    "t_final",
    "risk",
    "rollback",
    "escalated",
    "policy",
    "feedback_observed",
    "participant_id",
    "session_id",
    "block_id",
    "task_id",
    "condition_id",
    "model_version",
];

pub const REQUIRED_FIELDS: [&str; 5] = [
    "case_id",
    "ground_truth",
    "human_initial",
    "ai_prediction",
    "human_final",
];

/// A problem at a specific place in the input. `line` is 1-based and counts
/// physical lines (JSONL) or CSV rows including the header row.
#[derive(Debug, Clone, PartialEq)]
pub struct InputProblem {
    pub line: u64,
    pub column: Option<String>,
    pub message: String,
}

impl fmt::Display for InputProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.column {
            Some(c) => write!(f, "row {}, column '{}': {}", self.line, c, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

fn join_problems(problems: &[InputProblem]) -> String {
    problems
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed reading input: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing header: the first line must be {{\"schema\":\"{SCHEMA_VERSION}\",\"alphabet\":[...]}}")]
    MissingHeader,
    #[error("unknown schema version '{0}' (expected '{SCHEMA_VERSION}')")]
    UnknownSchema(String),
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("malformed input: {}", join_problems(.0))]
    Malformed(Vec<InputProblem>),
    #[error("unmapped required field '{0}'")]
    UnmappedRequiredField(String),
    #[error("bad column mapping: {0}")]
    BadMapping(String),
    #[error("csv: {0}")]
    Csv(String),
}

impl IngestError {
    /// The located problems, when the error points at specific input.
    pub fn problems(&self) -> &[InputProblem] {
        match self {
            IngestError::Malformed(p) => p,
            _ => &[],
        }
    }
}

/// Records as read from a file, before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTrace {
    pub records: Vec<DecisionRecord>,
    pub alphabet: Vec<Label>,
    pub metadata: BTreeMap<String, Value>,
}

impl RawTrace {
    pub fn validate(self) -> Result<Trace, ValidationErrors> {
        let metadata = self.metadata;
        validate_trace(self.records, self.alphabet).map(|t| t.with_metadata(metadata))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ConfidenceScale {
    lo: f64,
    hi: f64,
}

impl ConfidenceScale {
    fn parse(value: &Value) -> Result<Self, String> {
        let pair = value
            .as_array()
            .filter(|a| a.len() == 2)
            .and_then(|a| Some((a[0].as_f64()?, a[1].as_f64()?)))
            .ok_or("confidence_scale must be [lo, hi]")?;
        if pair.1 > pair.0 {
            Ok(Self {
                lo: pair.0,
                hi: pair.1,
            })
        } else {
            Err("confidence_scale needs hi > lo".into())
        }
    }

    fn normalize(&self, c: f64) -> f64 {
        (c - self.lo) / (self.hi - self.lo)
    }
}

fn parse_label_list(value: &Value, what: &str) -> Result<Vec<Label>, String> {
    value
        .as_array()
        .ok_or_else(|| format!("{what} must be an array of labels"))?
        .iter()
        .map(|v| label_from_value(v).ok_or_else(|| format!("{what} entries must be strings")))
        .collect()
}

fn label_from_value(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) if n.is_i64() || n.is_u64() => Some(n.to_string()),
        _ => None,
    }
}

fn parse_timestamp_str(s: &str) -> Result<i64, String> {
    if let Ok(ms) = s.parse::<i64>() {
        return Ok(ms);
    }
    chrono::DateTime::parse_from_rfc3339(s)
        .map(|dt| dt.timestamp_millis())
        .map_err(|_| format!("'{s}' is neither epoch milliseconds nor an RFC 3339 timestamp"))
}

/// Builds a record from a parsed JSON object, moving unknown keys to `extra`.
fn record_from_object(
    mut obj: Map<String, Value>,
    scale: Option<ConfidenceScale>,
) -> Result<DecisionRecord, String> {
    fn take(obj: &mut Map<String, Value>, key: &str) -> Option<Value> {
        obj.remove(key).filter(|v| !v.is_null())
    }
    fn required(obj: &mut Map<String, Value>, key: &str) -> Result<String, String> {
        let v = take(obj, key).ok_or_else(|| format!("missing required field '{key}'"))?;
        label_from_value(&v).ok_or_else(|| format!("field '{key}' must be a string"))
    }
    fn opt_string(obj: &mut Map<String, Value>, key: &str) -> Result<Option<String>, String> {
        take(obj, key)
            .map(|v| label_from_value(&v).ok_or_else(|| format!("field '{key}' must be a string")))
            .transpose()
    }
    fn flag(obj: &mut Map<String, Value>, key: &str) -> Result<bool, String> {
        match take(obj, key) {
            None => Ok(false),
            Some(Value::Bool(b)) => Ok(b),
            Some(_) => Err(format!("field '{key}' must be a boolean")),
        }
    }
    fn timestamp(obj: &mut Map<String, Value>, key: &str) -> Result<Option<i64>, String> {
        match take(obj, key) {
            None => Ok(None),
            Some(Value::Number(n)) => n
                .as_i64()
                .map(Some)
                .ok_or_else(|| format!("field '{key}' must be integer epoch milliseconds")),
            Some(Value::String(s)) => parse_timestamp_str(&s)
                .map(Some)
                .map_err(|e| format!("field '{key}': {e}")),
            Some(_) => Err(format!("field '{key}' must be a timestamp")),
        }
    }

    let mut record = DecisionRecord {
        case_id: required(&mut obj, "case_id")?,
        ground_truth: required(&mut obj, "ground_truth")?,
        human_initial: required(&mut obj, "human_initial")?,
        ai_prediction: required(&mut obj, "ai_prediction")?,
        human_final: required(&mut obj, "human_final")?,
        ..Default::default()
    };
    record.confidence = match take(&mut obj, "confidence") {
        None => None,
        Some(v) => {
            let c = v.as_f64().ok_or("field 'confidence' must be a number")?;
            Some(scale.map_or(c, |s| s.normalize(c)))
        }
    };
    record.t_ai_shown = timestamp(&mut obj, "t_ai_shown")?;
    record.t_final = timestamp(&mut obj, "t_final")?;
    record.risk = opt_string(&mut obj, "risk")?
        .map(|s| s.parse::<Risk>())
        .transpose()?;
    record.rollback = flag(&mut obj, "rollback")?;
    record.escalated = flag(&mut obj, "escalated")?;
    record.policy = opt_string(&mut obj, "policy")?
        .map(|s| s.parse::<Policy>())
        .transpose()?;
    record.feedback_observed = flag(&mut obj, "feedback_observed")?;
    record.participant_id = opt_string(&mut obj, "participant_id")?;
    record.session_id = opt_string(&mut obj, "session_id")?;
    record.block_id = opt_string(&mut obj, "block_id")?;
    record.task_id = opt_string(&mut obj, "task_id")?;
    record.condition_id = opt_string(&mut obj, "condition_id")?;
    record.model_version = opt_string(&mut obj, "model_version")?;
    record.extra = obj.into_iter().collect();
    Ok(record)
}

struct Header {
    alphabet: Vec<Label>,
    metadata: BTreeMap<String, Value>,
    scale: Option<ConfidenceScale>,
}

fn parse_header(line: &str) -> Result<Header, IngestError> {
    let mut obj: Map<String, Value> = match serde_json::from_str::<Value>(line) {
        Ok(Value::Object(obj)) if obj.contains_key("schema") => obj,
        _ => return Err(IngestError::MissingHeader),
    };
    match obj.remove("schema") {
        Some(Value::String(s)) if s == SCHEMA_VERSION => {}
        Some(other) => {
            let version = other
                .as_str()
                .map_or_else(|| other.to_string(), str::to_string);
            return Err(IngestError::UnknownSchema(version));
        }
        None => unreachable!(),
    }
    let alphabet = obj
        .remove("alphabet")
        .ok_or_else(|| IngestError::BadHeader("missing 'alphabet'".into()))
        .and_then(|v| parse_label_list(&v, "alphabet").map_err(IngestError::BadHeader))?;
    let scale = obj
        .remove("confidence_scale")
        .map(|v| ConfidenceScale::parse(&v))
        .transpose()
        .map_err(IngestError::BadHeader)?;
    if let Some(enc) = obj.remove("timestamps") {
        match enc.as_str() {
            Some("epoch_ms" | "rfc3339") => {}
            _ => {
                return Err(IngestError::BadHeader(format!(
                    "timestamps must be \"epoch_ms\" or \"rfc3339\", got {enc}"
                )))
            }
        }
    }
    Ok(Header {
        alphabet,
        metadata: obj.into_iter().collect(),
        scale,
    })
}

/// Reads a JSONL trace. Blank lines are skipped; every malformed line is
/// reported with its 1-based line number.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<RawTrace, IngestError> {
    let mut lines = input.lines();
    let header = match lines.next() {
        None => return Err(IngestError::MissingHeader),
        Some(line) => parse_header(&line?)?,
    };

    let mut records = Vec::new();
    let mut problems = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line_no = i as u64 + 2;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = match serde_json::from_str::<Value>(&line) {
            Ok(Value::Object(obj)) => record_from_object(obj, header.scale),
            Ok(_) => Err("record must be a JSON object".to_string()),
            Err(e) => Err(format!("invalid JSON: {e}")),
        };
        match parsed {
            Ok(r) => records.push(r),
            Err(message) => problems.push(InputProblem {
                line: line_no,
                column: None,
                message,
            }),
        }
    }
    if !problems.is_empty() {
        return Err(IngestError::Malformed(problems));
    }
    Ok(RawTrace {
        records,
        alphabet: header.alphabet,
        metadata: header.metadata,
    })
}

/// Writes a trace as JSONL. `read_jsonl` followed by validation reproduces
/// the same trace.
pub fn write_jsonl<W: Write>(trace: &Trace, out: W) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(out);
    out.write_all(b"{\"schema\":")?;
    serde_json::to_writer(&mut out, SCHEMA_VERSION)?;
    out.write_all(b",\"alphabet\":")?;
    serde_json::to_writer(&mut out, trace.alphabet())?;
    for (k, v) in trace.metadata() {
        if k == "schema" || k == "alphabet" {
            continue;
        }
        out.write_all(b",")?;
        serde_json::to_writer(&mut out, k)?;
        out.write_all(b":")?;
        serde_json::to_writer(&mut out, v)?;
    }
    out.write_all(b"}\n")?;
    for r in trace.records() {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Assignment of trace fields to CSV column names, plus the label alphabet
/// (CSV has no header line to declare one).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ColumnMapping {
    columns: BTreeMap<String, String>,
    alphabet: Option<Vec<Label>>,
    confidence_scale: Option<ConfidenceScale>,
}

impl ColumnMapping {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every field mapped to the column of the same name.
    pub fn identity() -> Self {
        let columns = RECORD_FIELDS
            .iter()
            .map(|f| (f.to_string(), f.to_string()))
            .collect();
        Self {
            columns,
            ..Self::default()
        }
    }

    pub fn map(mut self, field: &str, column: &str) -> Result<Self, IngestError> {
        if !RECORD_FIELDS.contains(&field) {
            return Err(IngestError::BadMapping(format!(
                "unknown trace field '{field}'"
            )));
        }
        self.columns.insert(field.to_string(), column.to_string());
        Ok(self)
    }

    pub fn with_alphabet(mut self, alphabet: Vec<Label>) -> Self {
        self.alphabet = Some(alphabet);
        self
    }

    /// Parses a mapping file: a JSON object from trace field name to column
    /// name. The optional keys `alphabet` (array of labels) and
    /// `confidence_scale` (`[lo, hi]`) are also accepted.
    pub fn from_json(text: &str) -> Result<Self, IngestError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| IngestError::BadMapping(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| IngestError::BadMapping("mapping must be a JSON object".into()))?;
        let mut mapping = Self::new();
        for (key, v) in obj {
            match key.as_str() {
                "alphabet" => {
                    mapping.alphabet =
                        Some(parse_label_list(v, "alphabet").map_err(IngestError::BadMapping)?)
                }
                "confidence_scale" => {
                    mapping.confidence_scale =
                        Some(ConfidenceScale::parse(v).map_err(IngestError::BadMapping)?)
                }
                field => {
                    let column = v.as_str().ok_or_else(|| {
                        IngestError::BadMapping(format!("column for '{field}' must be a string"))
                    })?;
                    mapping = mapping.map(field, column)?;
                }
            }
        }
        Ok(mapping)
    }

    pub fn column(&self, field: &str) -> Option<&str> {
        self.columns.get(field).map(String::as_str)
    }
}

fn parse_bool_cell(s: &str) -> Result<bool, String> {
    match s {
        "" | "false" => Ok(false),
        "true" => Ok(true),
        other => Err(format!("expected true or false, got '{other}'")),
    }
}

/// Reads a CSV trace. The first row is the header.
///
/// When `mapping` is `None`, each field is read from the column of the same
/// name if present. Empty cells are absent optional values. Without a
/// declared alphabet the sorted set of observed labels is used.
pub fn read_csv<R: Read>(
    input: R,
    mapping: Option<&ColumnMapping>,
) -> Result<RawTrace, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Csv(e.to_string()))?
        .clone();
    let position: HashMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();

    let default_mapping;
    let mapping = match mapping {
        Some(m) => m,
        None => {
            let mut m = ColumnMapping::identity();
            m.columns
                .retain(|_, col| position.contains_key(col.as_str()));
            default_mapping = m;
            &default_mapping
        }
    };
    for field in REQUIRED_FIELDS {
        if mapping.column(field).is_none() {
            return Err(IngestError::UnmappedRequiredField(field.to_string()));
        }
    }
    // field -> column index
    let mut field_index: HashMap<&str, usize> = HashMap::new();
    for (field, column) in &mapping.columns {
        let idx = *position.get(column.as_str()).ok_or_else(|| {
            IngestError::BadMapping(format!(
                "column '{column}' (for '{field}') not in CSV header"
            ))
        })?;
        field_index.insert(field.as_str(), idx);
    }
    let mapped: BTreeSet<usize> = field_index.values().copied().collect();
    let extra_columns: Vec<(usize, &str)> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| !mapped.contains(i))
        .collect();

    let mut records = Vec::new();
    let mut problems = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| IngestError::Csv(e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let cell = |field: &str| {
            field_index
                .get(field)
                .and_then(|&i| row.get(i))
                .unwrap_or("")
        };
        let mut fail = |field: &str, message: String| {
            problems.push(InputProblem {
                line,
                column: mapping.column(field).map(str::to_string),
                message,
            })
        };

        let mut record = DecisionRecord::default();
        let mut ok = true;
        for (field, slot) in [
            ("case_id", &mut record.case_id),
            ("ground_truth", &mut record.ground_truth),
            ("human_initial", &mut record.human_initial),
            ("ai_prediction", &mut record.ai_prediction),
            ("human_final", &mut record.human_final),
        ] {
            let v = cell(field);
            if v.is_empty() {
                fail(field, format!("empty required field '{field}'"));
                ok = false;
            }
            *slot = v.to_string();
        }
        let c = cell("confidence");
        if !c.is_empty() {
            match c.parse::<f64>() {
                Ok(c) => {
                    record.confidence = Some(mapping.confidence_scale.map_or(c, |s| s.normalize(c)))
                }
                Err(_) => {
                    fail("confidence", format!("'{c}' is not a number"));
                    ok = false;
                }
            }
        }
        for (field, slot) in [
            ("t_ai_shown", &mut record.t_ai_shown),
            ("t_final", &mut record.t_final),
        ] {
            let v = cell(field);
            if !v.is_empty() {
                match parse_timestamp_str(v) {
                    Ok(ms) => *slot = Some(ms),
                    Err(e) => {
                        fail(field, e);
                        ok = false;
                    }
                }
            }
        }
        let v = cell("risk");
        if !v.is_empty() {
            match v.parse() {
                Ok(r) => record.risk = Some(r),
                Err(e) => {
                    fail("risk", e);
                    ok = false;
                }
            }
        }
        let v = cell("policy");
        if !v.is_empty() {
            match v.parse() {
                Ok(p) => record.policy = Some(p),
                Err(e) => {
                    fail("policy", e);
                    ok = false;
                }
            }
        }
        for (field, slot) in [
            ("rollback", &mut record.rollback),
            ("escalated", &mut record.escalated),
            ("feedback_observed", &mut record.feedback_observed),
        ] {
            match parse_bool_cell(cell(field)) {
                Ok(b) => *slot = b,
                Err(e) => {
                    fail(field, e);
                    ok = false;
                }
            }
        }
        for (field, slot) in [
            ("participant_id", &mut record.participant_id),
            ("session_id", &mut record.session_id),
            ("block_id", &mut record.block_id),
            ("task_id", &mut record.task_id),
            ("condition_id", &mut record.condition_id),
            ("model_version", &mut record.model_version),
        ] {
            let v = cell(field);
            if !v.is_empty() {
                *slot = Some(v.to_string());
            }
        }
        for &(i, name) in &extra_columns {
            if let Some(v) = row.get(i).filter(|v| !v.is_empty()) {
                record
                    .extra
                    .insert(name.to_string(), Value::String(v.to_string()));
            }
        }
        if ok {
            records.push(record);
        }
    }
    if !problems.is_empty() {
        return Err(IngestError::Malformed(problems));
    }

    let alphabet = match &mapping.alphabet {
        Some(a) => a.clone(),
        None => records
            .iter()
            .flat_map(|r| {
                [
                    &r.ground_truth,
                    &r.human_initial,
                    &r.ai_prediction,
                    &r.human_final,
                ]
            })
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    Ok(RawTrace {
        records,
        alphabet,
        metadata: BTreeMap::new(),
    })
}

/// Writes a trace as CSV with one column per record field followed by the
/// sorted union of extra keys. Non-string extra values are written as JSON.
pub fn write_csv<W: Write>(trace: &Trace, out: W) -> Result<(), IngestError> {
    let extra_keys: BTreeSet<&str> = trace
        .records()
        .iter()
        .flat_map(|r| r.extra.keys().map(String::as_str))
        .collect();
    let mut writer = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| IngestError::Csv(e.to_string());
    writer
        .write_record(
            RECORD_FIELDS
                .iter()
                .copied()
                .chain(extra_keys.iter().copied()),
        )
        .map_err(csv_err)?;

    fn opt<T: ToString>(v: &Option<T>) -> String {
        v.as_ref().map_or_else(String::new, T::to_string)
    }
    for r in trace.records() {
        let mut row: Vec<String> = vec![
            r.case_id.clone(),
            r.ground_truth.clone(),
            r.human_initial.clone(),
            r.ai_prediction.clone(),
            r.human_final.clone(),
            opt(&r.confidence),
            opt(&r.t_ai_shown),
            opt(&r.t_final),
            r.risk.map_or_else(String::new, |x| x.as_str().to_string()),
            r.rollback.to_string(),
            r.escalated.to_string(),
            r.policy
                .map_or_else(String::new, |x| x.as_str().to_string()),
            r.feedback_observed.to_string(),
            opt(&r.participant_id),
            opt(&r.session_id),
            opt(&r.block_id),
            opt(&r.task_id),
            opt(&r.condition_id),
            opt(&r.model_version),
        ];
        for key in &extra_keys {
            row.push(match r.extra.get(*key) {
                None => String::new(),
                Some(Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
            });
        }
        writer.write_record(&row).map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = r#"{"schema":"trace/1","alphabet":["0","1"]}"#;

    fn jsonl(lines: &[&str]) -> String {
        let mut s = String::new();
        for l in lines {
            s.push_str(l);
            s.push('\n');
        }
        s
    }

    #[test]
    fn header_plus_three_records() {
        let text = jsonl(&[
            HEADER,
            r#"{"case_id":"a","ground_truth":"1","human_initial":"1","ai_prediction":"1","human_final":"1"}"#,
            r#"{"case_id":"b","ground_truth":"1","human_initial":"0","ai_prediction":"1","human_final":"1","confidence":0.5}"#,
            r#"{"case_id":"c","ground_truth":"0","human_initial":"0","ai_prediction":"1","human_final":"0","risk":"high","note":"x"}"#,
        ]);
        let raw = read_jsonl(text.as_bytes()).unwrap();
        assert_eq!(raw.records.len(), 3);
        assert_eq!(raw.alphabet, ["0", "1"]);
        assert_eq!(raw.records[1].confidence, Some(0.5));
        assert_eq!(raw.records[2].risk, Some(Risk::High));
        assert_eq!(raw.records[2].extra["note"], Value::String("x".into()));
    }

    #[test]
    fn empty_file_is_missing_header() {
        assert!(matches!(
            read_jsonl(&b""[..]),
            Err(IngestError::MissingHeader)
        ));
        let text = jsonl(&[r#"{"case_id":"a"}"#]);
        assert!(matches!(
            read_jsonl(text.as_bytes()),
            Err(IngestError::MissingHeader)
        ));
    }

    #[test]
    fn unknown_schema_version() {
        let text = jsonl(&[r#"{"schema":"trace/9","alphabet":["0","1"]}"#]);
        match read_jsonl(text.as_bytes()) {
            Err(IngestError::UnknownSchema(v)) => assert_eq!(v, "trace/9"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_line_is_named() {
        let ok = r#"{"case_id":"a","ground_truth":"1","human_initial":"1","ai_prediction":"1","human_final":"1"}"#;
        let text = jsonl(&[HEADER, ok, &ok.replace("\"a\"", "\"b\""), "{not json"]);
        let err = read_jsonl(text.as_bytes()).unwrap_err();
        assert_eq!(err.problems().len(), 1);
        assert_eq!(err.problems()[0].line, 4);
        assert!(err.to_string().contains("line 4"));
    }

    #[test]
    fn wrong_types_are_malformed() {
        let text = jsonl(&[
            HEADER,
            r#"{"case_id":"a","ground_truth":"1","human_initial":"1","ai_prediction":"1","human_final":"1","rollback":"yes"}"#,
            r#"{"case_id":"b","ground_truth":"1","human_initial":"1","ai_prediction":"1"}"#,
        ]);
        let err = read_jsonl(text.as_bytes()).unwrap_err();
        let lines: Vec<_> = err.problems().iter().map(|p| p.line).collect();
        assert_eq!(lines, [2, 3]);
        assert!(err.problems()[1].message.contains("human_final"));
    }

    #[test]
    fn rfc3339_timestamps_and_confidence_scale() {
        let text = jsonl(&[
            r#"{"schema":"trace/1","alphabet":["0","1"],"confidence_scale":[1,5],"study":"pilot"}"#,
            r#"{"case_id":"a","ground_truth":"1","human_initial":"1","ai_prediction":"1","human_final":"1","confidence":4,"t_ai_shown":"1970-01-01T00:00:01Z","t_final":1500}"#,
        ]);
        let raw = read_jsonl(text.as_bytes()).unwrap();
        assert_eq!(raw.records[0].confidence, Some(0.75));
        assert_eq!(raw.records[0].t_ai_shown, Some(1000));
        assert_eq!(raw.records[0].latency_ms(), Some(500));
        assert_eq!(raw.metadata.len(), 1);
        assert_eq!(raw.metadata["study"], Value::String("pilot".into()));
    }

    #[test]
    fn header_only_output_for_empty_trace() {
        let t = Trace::empty(vec!["0".into(), "1".into()]).unwrap();
        let mut out = Vec::new();
        write_jsonl(&t, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), format!("{HEADER}\n"));
    }

    const CSV_HEAD: &str = "id,gt,h0,ai,h1,rollback\n";

    fn csv_mapping() -> ColumnMapping {
        ColumnMapping::from_json(
            r#"{"case_id":"id","ground_truth":"gt","human_initial":"h0","ai_prediction":"ai","human_final":"h1","rollback":"rollback"}"#,
        )
        .unwrap()
    }

    #[test]
    fn csv_four_rows() {
        let text =
            format!("{CSV_HEAD}a,1,1,1,1,false\nb,0,1,0,0,true\nc,1,0,1,1,\nd,0,0,0,0,false\n");
        let raw = read_csv(text.as_bytes(), Some(&csv_mapping())).unwrap();
        assert_eq!(raw.records.len(), 4);
        assert!(raw.records[1].rollback);
        assert_eq!(raw.alphabet, ["0", "1"]);
        assert!(raw.validate().is_ok());
    }

    #[test]
    fn csv_missing_required_mapping() {
        let m = ColumnMapping::from_json(
            r#"{"case_id":"id","human_initial":"h0","ai_prediction":"ai","human_final":"h1"}"#,
        )
        .unwrap();
        let err = read_csv(CSV_HEAD.as_bytes(), Some(&m)).unwrap_err();
        assert!(matches!(err, IngestError::UnmappedRequiredField(ref f) if f == "ground_truth"));
        assert!(err.to_string().contains("unmapped required field"));
    }

    #[test]
    fn csv_bad_boolean_cites_row_and_column() {
        let text = format!("{CSV_HEAD}a,1,1,1,1,false\nb,1,1,1,1,yes\n");
        let err = read_csv(text.as_bytes(), Some(&csv_mapping())).unwrap_err();
        let p = &err.problems()[0];
        assert_eq!(p.line, 3);
        assert_eq!(p.column.as_deref(), Some("rollback"));
        assert!(err.to_string().contains("row 3, column 'rollback'"));
    }

    #[test]
    fn mapping_rejects_unknown_field() {
        assert!(ColumnMapping::from_json(r#"{"colour":"c"}"#).is_err());
    }
}
