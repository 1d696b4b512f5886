//! Decision-trace data model, validation, partitioning and blocking.
//!
//! A [`Trace`] can only be obtained through [`validate_trace`] (or the
//! crate-internal slicing helpers that preserve its invariants), so every
//! metric function may assume:
//!
//! - every label belongs to the declared alphabet,
//! - confidences lie in `[0, 1]`,
//! - `t_final >= t_ai_shown` whenever both are present,
//! - case ids are unique.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// A categorical decision label. Labels are opaque; metrics only test them
/// for equality, so any finite alphabet with at least two labels works.
pub type Label = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Risk {
    Low,
    Medium,
    High,
}

impl Risk {
    pub fn as_str(&self) -> &'static str {
        match self {
            Risk::Low => "low",
            Risk::Medium => "medium",
            Risk::High => "high",
        }
    }
}

impl FromStr for Risk {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "low" => Ok(Risk::Low),
            "medium" => Ok(Risk::Medium),
            "high" => Ok(Risk::High),
            other => Err(format!("unknown risk level '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    None,
    Escalate,
}

impl Policy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Policy::None => "none",
            Policy::Escalate => "escalate",
        }
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Policy::None),
            "escalate" => Ok(Policy::Escalate),
            other => Err(format!("unknown policy '{other}'")),
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// One decision instance: ground truth, the human's initial decision, the AI
/// prediction and the human's final decision, plus optional context.
///
/// Field names are the on-disk key names of the trace file format.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DecisionRecord {
    pub case_id: String,
    pub ground_truth: Label,
    pub human_initial: Label,
    pub ai_prediction: Label,
    pub human_final: Label,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    /// Epoch milliseconds at which the AI output was shown.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_ai_shown: Option<i64>,
    /// Epoch milliseconds of the confirm/override action.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub risk: Option<Risk>,
    #[serde(skip_serializing_if = "is_false")]
    pub rollback: bool,
    #[serde(skip_serializing_if = "is_false")]
    pub escalated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<Policy>,
    /// Whether the participant learned the AI's correctness on this case
    /// before moving on to the next one.
    #[serde(skip_serializing_if = "is_false")]
    pub feedback_observed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub participant_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_version: Option<String>,
    /// Keys found in the input that are not part of the record schema.
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl DecisionRecord {
    pub fn new(
        case_id: impl Into<String>,
        ground_truth: impl Into<Label>,
        human_initial: impl Into<Label>,
        ai_prediction: impl Into<Label>,
        human_final: impl Into<Label>,
    ) -> Self {
        Self {
            case_id: case_id.into(),
            ground_truth: ground_truth.into(),
            human_initial: human_initial.into(),
            ai_prediction: ai_prediction.into(),
            human_final: human_final.into(),
            ..Default::default()
        }
    }

    #[inline]
    pub fn human_initial_correct(&self) -> bool {
        self.human_initial == self.ground_truth
    }

    #[inline]
    pub fn ai_correct(&self) -> bool {
        self.ai_prediction == self.ground_truth
    }

    #[inline]
    pub fn final_correct(&self) -> bool {
        self.human_final == self.ground_truth
    }

    /// Final decision agrees with the AI prediction.
    #[inline]
    pub fn accepted_ai(&self) -> bool {
        self.human_final == self.ai_prediction
    }

    #[inline]
    pub fn changed(&self) -> bool {
        self.human_final != self.human_initial
    }

    pub fn latency_ms(&self) -> Option<i64> {
        Some(self.t_final? - self.t_ai_shown?)
    }

    pub fn key(&self, key: PartitionKey) -> Option<&str> {
        match key {
            PartitionKey::Participant => self.participant_id.as_deref(),
            PartitionKey::Session => self.session_id.as_deref(),
            PartitionKey::Block => self.block_id.as_deref(),
            PartitionKey::Task => self.task_id.as_deref(),
            PartitionKey::Condition => self.condition_id.as_deref(),
            PartitionKey::ModelVersion => self.model_version.as_deref(),
        }
    }
}

/// An ordered, validated collection of decision records.
///
/// Record order is presentation order: file order, unless every record
/// carries `t_ai_shown`, in which case records are ordered by that
/// timestamp with ties broken by `case_id`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    records: Vec<DecisionRecord>,
    alphabet: Vec<Label>,
    metadata: BTreeMap<String, Value>,
}

impl Trace {
    /// A trace with no records over the given alphabet.
    pub fn empty(alphabet: Vec<Label>) -> Result<Self, ValidationErrors> {
        let errors = check_alphabet(&alphabet);
        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }
        Ok(Self {
            records: Vec::new(),
            alphabet,
            metadata: BTreeMap::new(),
        })
    }

    pub fn with_metadata(mut self, metadata: BTreeMap<String, Value>) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn records(&self) -> &[DecisionRecord] {
        &self.records
    }

    pub fn alphabet(&self) -> &[Label] {
        &self.alphabet
    }

    pub fn metadata(&self) -> &BTreeMap<String, Value> {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn into_records(self) -> Vec<DecisionRecord> {
        self.records
    }

    /// Sub-trace over already-validated records of this trace.
    pub(crate) fn derive(&self, records: Vec<DecisionRecord>) -> Trace {
        Trace {
            records,
            alphabet: self.alphabet.clone(),
            metadata: self.metadata.clone(),
        }
    }

    /// Contiguous slice `[start, end)` as a trace. Bounds are clamped.
    pub fn slice(&self, start: usize, end: usize) -> Trace {
        let end = end.min(self.records.len());
        let start = start.min(end);
        self.derive(self.records[start..end].to_vec())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationReason {
    EmptyTrace,
    AlphabetTooSmall(usize),
    DuplicateAlphabetLabel(Label),
    UnknownLabel(Label),
    ConfidenceOutOfRange(f64),
    TimestampInversion { t_ai_shown: i64, t_final: i64 },
    DuplicateCaseId(String),
}

impl fmt::Display for ValidationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyTrace => f.write_str("empty trace"),
            Self::AlphabetTooSmall(n) => {
                write!(f, "alphabet must declare at least 2 labels, got {n}")
            }
            Self::DuplicateAlphabetLabel(l) => write!(f, "duplicate alphabet label '{l}'"),
            Self::UnknownLabel(l) => write!(f, "unknown label '{l}'"),
            Self::ConfidenceOutOfRange(c) => write!(f, "confidence out of range ({c})"),
            Self::TimestampInversion {
                t_ai_shown,
                t_final,
            } => {
                write!(
                    f,
                    "timestamp inversion (t_final {t_final} < t_ai_shown {t_ai_shown})"
                )
            }
            Self::DuplicateCaseId(id) => write!(f, "duplicate case_id '{id}'"),
        }
    }
}

/// One validation failure. `index` is the 0-based position of the offending
/// record in the input sequence; it is absent for trace-level failures.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    pub index: Option<usize>,
    pub field: &'static str,
    pub reason: ValidationReason,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "record {i}: {}: {}", self.field, self.reason),
            None => write!(f, "{}: {}", self.field, self.reason),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ValidationErrors(pub Vec<ValidationError>);

impl ValidationErrors {
    pub fn errors(&self) -> &[ValidationError] {
        &self.0
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation error(s)", self.0.len())?;
        for e in &self.0 {
            write!(f, "\n  {e}")?;
        }
        Ok(())
    }
}

fn check_alphabet(alphabet: &[Label]) -> Vec<ValidationError> {
    let mut errors = Vec::new();
    let mut seen = HashSet::new();
    for label in alphabet {
        if !seen.insert(label.as_str()) {
            errors.push(ValidationError {
                index: None,
                field: "alphabet",
                reason: ValidationReason::DuplicateAlphabetLabel(label.clone()),
            });
        }
    }
    if seen.len() < 2 {
        errors.push(ValidationError {
            index: None,
            field: "alphabet",
            reason: ValidationReason::AlphabetTooSmall(seen.len()),
        });
    }
    errors
}

/// Checks every record against the trace invariants. Validation is
/// all-or-nothing: any error rejects the whole trace and every error found is
/// reported.
pub fn validate_trace(
    records: Vec<DecisionRecord>,
    alphabet: Vec<Label>,
) -> Result<Trace, ValidationErrors> {
    let mut errors = check_alphabet(&alphabet);
    if records.is_empty() {
        errors.push(ValidationError {
            index: None,
            field: "records",
            reason: ValidationReason::EmptyTrace,
        });
    }

    let labels: HashSet<&str> = alphabet.iter().map(String::as_str).collect();
    let mut case_ids: HashSet<&str> = HashSet::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        for (field, label) in [
            ("ground_truth", &r.ground_truth),
            ("human_initial", &r.human_initial),
            ("ai_prediction", &r.ai_prediction),
            ("human_final", &r.human_final),
        ] {
            if !labels.contains(label.as_str()) {
                errors.push(ValidationError {
                    index: Some(i),
                    field,
                    reason: ValidationReason::UnknownLabel(label.clone()),
                });
            }
        }
        if let Some(c) = r.confidence {
            if !(0.0..=1.0).contains(&c) {
                errors.push(ValidationError {
                    index: Some(i),
                    field: "confidence",
                    reason: ValidationReason::ConfidenceOutOfRange(c),
                });
            }
        }
        if let (Some(shown), Some(fin)) = (r.t_ai_shown, r.t_final) {
            if fin < shown {
                errors.push(ValidationError {
                    index: Some(i),
                    field: "t_final",
                    reason: ValidationReason::TimestampInversion {
                        t_ai_shown: shown,
                        t_final: fin,
                    },
                });
            }
        }
        if !case_ids.insert(r.case_id.as_str()) {
            errors.push(ValidationError {
                index: Some(i),
                field: "case_id",
                reason: ValidationReason::DuplicateCaseId(r.case_id.clone()),
            });
        }
    }
    drop(case_ids);

    if !errors.is_empty() {
        return Err(ValidationErrors(errors));
    }

    let mut records = records;
    if records.iter().all(|r| r.t_ai_shown.is_some()) {
        records.sort_by(|a, b| {
            a.t_ai_shown
                .cmp(&b.t_ai_shown)
                .then_with(|| a.case_id.cmp(&b.case_id))
        });
    }

    Ok(Trace {
        records,
        alphabet,
        metadata: BTreeMap::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("unknown partition key '{0}' (expected one of participant_id, session_id, block_id, task_id, condition_id, model_version)")]
    UnknownPartitionKey(String),
    #[error("record {index} has no block_id; by-label blocking needs one on every record")]
    MissingBlockId { index: usize },
    #[error("block size must be at least 1")]
    ZeroBlockSize,
}

/// The partition-key fields of a [`DecisionRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartitionKey {
    Participant,
    Session,
    Block,
    Task,
    Condition,
    ModelVersion,
}

impl PartitionKey {
    pub const ALL: [PartitionKey; 6] = [
        PartitionKey::Participant,
        PartitionKey::Session,
        PartitionKey::Block,
        PartitionKey::Task,
        PartitionKey::Condition,
        PartitionKey::ModelVersion,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PartitionKey::Participant => "participant_id",
            PartitionKey::Session => "session_id",
            PartitionKey::Block => "block_id",
            PartitionKey::Task => "task_id",
            PartitionKey::Condition => "condition_id",
            PartitionKey::ModelVersion => "model_version",
        }
    }

    /// Parses a list of key names, rejecting anything that is not a
    /// partition-key field.
    pub fn parse_list<S: AsRef<str>>(names: &[S]) -> Result<Vec<PartitionKey>, TraceError> {
        names.iter().map(|n| n.as_ref().parse()).collect()
    }
}

impl FromStr for PartitionKey {
    type Err = TraceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PartitionKey::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| TraceError::UnknownPartitionKey(s.to_string()))
    }
}

impl fmt::Display for PartitionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Identifies one partition. Records lacking any of the requested keys are
/// collected in the single `Unkeyed` partition, which sorts last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartitionId {
    Keyed(Vec<String>),
    Unkeyed,
}

impl fmt::Display for PartitionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionId::Keyed(values) if values.is_empty() => f.write_str("all"),
            PartitionId::Keyed(values) => f.write_str(&values.join("/")),
            PartitionId::Unkeyed => f.write_str("unkeyed"),
        }
    }
}

/// Groups records by the values of `keys`, preserving record order inside
/// each group. With no keys the whole trace is one partition.
pub fn partition(trace: &Trace, keys: &[PartitionKey]) -> BTreeMap<PartitionId, Trace> {
    let mut groups: BTreeMap<PartitionId, Vec<DecisionRecord>> = BTreeMap::new();
    if keys.is_empty() {
        groups.insert(PartitionId::Keyed(Vec::new()), trace.records.clone());
    } else {
        for r in &trace.records {
            let values: Option<Vec<String>> =
                keys.iter().map(|k| r.key(*k).map(str::to_string)).collect();
            let id = values.map_or(PartitionId::Unkeyed, PartitionId::Keyed);
            groups.entry(id).or_default().push(r.clone());
        }
    }
    groups
        .into_iter()
        .map(|(id, records)| (id, trace.derive(records)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockScheme {
    /// Contiguous runs of equal `block_id`.
    ByLabel,
    /// Consecutive chunks of `n` records; the last may be short.
    FixedSize(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub index: usize,
    /// The shared `block_id` for by-label blocks.
    pub label: Option<String>,
    pub trace: Trace,
}

/// Splits a trace into contiguous, order-preserving blocks.
///
/// By-label blocking starts a new block whenever `block_id` changes, so a
/// label that reappears later in the trace opens a new block.
pub fn split_blocks(trace: &Trace, scheme: BlockScheme) -> Result<Vec<Block>, TraceError> {
    match scheme {
        BlockScheme::FixedSize(0) => Err(TraceError::ZeroBlockSize),
        BlockScheme::FixedSize(n) => Ok(trace
            .records
            .chunks(n)
            .enumerate()
            .map(|(index, chunk)| Block {
                index,
                label: None,
                trace: trace.derive(chunk.to_vec()),
            })
            .collect()),
        BlockScheme::ByLabel => {
            let mut blocks: Vec<Block> = Vec::new();
            let mut start = 0;
            for (i, r) in trace.records.iter().enumerate() {
                let id = r
                    .block_id
                    .as_deref()
                    .ok_or(TraceError::MissingBlockId { index: i })?;
                let prev = trace.records[start].block_id.as_deref();
                if i > start && prev != Some(id) {
                    blocks.push(Block {
                        index: blocks.len(),
                        label: prev.map(str::to_string),
                        trace: trace.slice(start, i),
                    });
                    start = i;
                }
            }
            if start < trace.records.len() {
                blocks.push(Block {
                    index: blocks.len(),
                    label: trace.records[start].block_id.clone(),
                    trace: trace.slice(start, trace.records.len()),
                });
            }
            Ok(blocks)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary() -> Vec<Label> {
        vec!["0".into(), "1".into()]
    }

    fn rec(id: &str) -> DecisionRecord {
        DecisionRecord::new(id, "1", "0", "1", "1")
    }

    fn six() -> Vec<DecisionRecord> {
        (1..=6).map(|i| rec(&format!("r{i}"))).collect()
    }

    #[test]
    fn well_formed_records_pass() {
        let t = validate_trace(six(), binary()).unwrap();
        assert_eq!(t.len(), 6);
    }

    #[test]
    fn confidence_out_of_range_is_reported_at_index() {
        let mut records = six();
        records[3].confidence = Some(1.2);
        let err = validate_trace(records, binary()).unwrap_err();
        assert_eq!(err.errors().len(), 1);
        assert_eq!(err.errors()[0].index, Some(3));
        assert!(err.to_string().contains("confidence out of range"));
    }

    #[test]
    fn nan_confidence_is_rejected() {
        let mut records = six();
        records[0].confidence = Some(f64::NAN);
        assert!(validate_trace(records, binary()).is_err());
    }

    #[test]
    fn duplicate_case_id_rejected() {
        let records = vec![rec("c1"), rec("c2"), rec("c1")];
        let err = validate_trace(records, binary()).unwrap_err();
        assert_eq!(err.errors()[0].index, Some(2));
        assert!(err.to_string().contains("duplicate case_id"));
    }

    #[test]
    fn unknown_label_and_inversion_and_empty() {
        let mut r = DecisionRecord::new("c1", "2", "0", "1", "1");
        r.t_ai_shown = Some(10);
        r.t_final = Some(5);
        let err = validate_trace(vec![r], binary()).unwrap_err();
        let reasons: Vec<_> = err.errors().iter().map(|e| e.reason.clone()).collect();
        assert!(reasons.contains(&ValidationReason::UnknownLabel("2".into())));
        assert!(reasons
            .iter()
            .any(|r| matches!(r, ValidationReason::TimestampInversion { .. })));

        let err = validate_trace(vec![], binary()).unwrap_err();
        assert_eq!(err.errors()[0].reason, ValidationReason::EmptyTrace);
    }

    #[test]
    fn alphabet_must_have_two_distinct_labels() {
        let err = validate_trace(
            vec![DecisionRecord::new("c", "a", "a", "a", "a")],
            vec!["a".into(), "a".into()],
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate alphabet label"));
        assert!(err.to_string().contains("at least 2"));
    }

    #[test]
    fn timestamps_override_file_order_with_case_id_ties() {
        let mut records = vec![rec("b"), rec("a"), rec("c")];
        records[0].t_ai_shown = Some(5);
        records[1].t_ai_shown = Some(5);
        records[2].t_ai_shown = Some(1);
        let t = validate_trace(records, binary()).unwrap();
        let ids: Vec<_> = t.records().iter().map(|r| r.case_id.as_str()).collect();
        assert_eq!(ids, ["c", "a", "b"]);
    }

    #[test]
    fn partial_timestamps_keep_file_order() {
        let mut records = vec![rec("b"), rec("a")];
        records[1].t_ai_shown = Some(0);
        let t = validate_trace(records, binary()).unwrap();
        assert_eq!(t.records()[0].case_id, "b");
    }

    #[test]
    fn validation_is_idempotent() {
        let mut records = six();
        for (i, r) in records.iter_mut().enumerate() {
            r.t_ai_shown = Some(100 - i as i64);
        }
        let t = validate_trace(records, binary()).unwrap();
        let again = validate_trace(t.records().to_vec(), t.alphabet().to_vec()).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn partition_by_participant() {
        let mut records = six();
        for (i, r) in records.iter_mut().enumerate() {
            r.participant_id = Some(if i < 4 { "p1" } else { "p2" }.into());
        }
        let t = validate_trace(records, binary()).unwrap();
        let parts = partition(&t, &[PartitionKey::Participant]);
        let sizes: Vec<_> = parts.values().map(Trace::len).collect();
        assert_eq!(sizes, [4, 2]);
    }

    #[test]
    fn partition_by_session_and_no_keys() {
        let mut records = six();
        for (i, r) in records.iter_mut().enumerate() {
            r.session_id = Some(format!("s{}", i % 2 + 1));
        }
        let t = validate_trace(records, binary()).unwrap();
        assert_eq!(partition(&t, &[PartitionKey::Session]).len(), 2);
        let whole = partition(&t, &[]);
        assert_eq!(whole.len(), 1);
        assert_eq!(whole.values().next().unwrap(), &t);
    }

    #[test]
    fn records_missing_a_key_go_unkeyed() {
        let mut records = six();
        records[0].participant_id = Some("p1".into());
        records[0].session_id = Some("s1".into());
        records[1].participant_id = Some("p1".into());
        let t = validate_trace(records, binary()).unwrap();
        let parts = partition(&t, &[PartitionKey::Participant, PartitionKey::Session]);
        assert_eq!(
            parts[&PartitionId::Keyed(vec!["p1".into(), "s1".into()])].len(),
            1
        );
        assert_eq!(parts[&PartitionId::Unkeyed].len(), 5);
    }

    #[test]
    fn unknown_key_name() {
        let err = PartitionKey::parse_list(&["participant_id", "colour"]).unwrap_err();
        assert_eq!(err, TraceError::UnknownPartitionKey("colour".into()));
    }

    #[test]
    fn fixed_size_blocks() {
        let records = (0..10).map(|i| rec(&format!("c{i}"))).collect();
        let t = validate_trace(records, binary()).unwrap();
        let sizes: Vec<_> = split_blocks(&t, BlockScheme::FixedSize(4))
            .unwrap()
            .iter()
            .map(|b| b.trace.len())
            .collect();
        assert_eq!(sizes, [4, 4, 2]);
        let t3 = t.slice(0, 3);
        assert_eq!(
            split_blocks(&t3, BlockScheme::FixedSize(1)).unwrap().len(),
            3
        );
        assert_eq!(
            split_blocks(&t, BlockScheme::FixedSize(0)),
            Err(TraceError::ZeroBlockSize)
        );
    }

    #[test]
    fn by_label_blocks() {
        let mut records: Vec<_> = (0..3).map(|i| rec(&format!("c{i}"))).collect();
        for (r, b) in records.iter_mut().zip(["b1", "b1", "b2"]) {
            r.block_id = Some(b.into());
        }
        let t = validate_trace(records.clone(), binary()).unwrap();
        let blocks = split_blocks(&t, BlockScheme::ByLabel).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(
            (blocks[0].label.as_deref(), blocks[0].trace.len()),
            (Some("b1"), 2)
        );
        assert_eq!(
            (blocks[1].label.as_deref(), blocks[1].trace.len()),
            (Some("b2"), 1)
        );

        records[1].block_id = None;
        let t = validate_trace(records, binary()).unwrap();
        assert_eq!(
            split_blocks(&t, BlockScheme::ByLabel),
            Err(TraceError::MissingBlockId { index: 1 })
        );
    }
}
