//! Reliance and interaction metrics: how the AI was used.
//!
//! "Accepting" the AI means the final decision equals the AI prediction
//! (`h1 = a`); no separate UI event is consulted. Rates conditioned on AI
//! correctness are taken over `C = {j : a_j = y_j}` and
//! `W = {j : a_j != y_j}`.

use crate::ratio::Ratio;
use crate::trace::{DecisionRecord, Trace};
use crate::InvalidParameter;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalReliance {
    pub accept_on_correct: Ratio,
    pub accept_on_wrong: Ratio,
    pub reject_on_correct: Ratio,
    pub reject_on_wrong: Ratio,
    /// `accept_on_correct - accept_on_wrong`; absent unless both `C` and `W`
    /// are non-empty.
    pub reliance_slope: Option<f64>,
}

impl ConditionalReliance {
    fn from_counts(accepted_c: u64, n_c: u64, accepted_w: u64, n_w: u64) -> Self {
        let accept_on_correct = Ratio::rate(accepted_c, n_c);
        let accept_on_wrong = Ratio::rate(accepted_w, n_w);
        let reliance_slope = match (accept_on_correct.value(), accept_on_wrong.value()) {
            (Some(c), Some(w)) => Some(c - w),
            _ => None,
        };
        Self {
            accept_on_correct,
            accept_on_wrong,
            reject_on_correct: Ratio::rate(n_c - accepted_c, n_c),
            reject_on_wrong: Ratio::rate(n_w - accepted_w, n_w),
            reliance_slope,
        }
    }

    /// Size of the correct-AI set `C`.
    pub fn n_correct(&self) -> u64 {
        self.accept_on_correct.denominator()
    }

    /// Size of the wrong-AI set `W`.
    pub fn n_wrong(&self) -> u64 {
        self.accept_on_wrong.denominator()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecisionChanges {
    /// `h1 != h0`.
    pub changed: Ratio,
    /// `h1 != h0`, `h0 != y`, `h1 = y`.
    pub changed_to_right: Ratio,
    /// `h1 != h0`, `h0 = y`, `h1 != y`.
    pub changed_to_wrong: Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Latency {
    pub mean_ms: Option<f64>,
    /// Records carrying both timestamps.
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelianceSummary {
    #[serde(flatten)]
    pub conditional: ConditionalReliance,
    #[serde(flatten)]
    pub changes: DecisionChanges,
    pub latency: Latency,
}

pub(crate) fn conditional_reliance_of(records: &[DecisionRecord]) -> ConditionalReliance {
    let (mut n_c, mut acc_c, mut n_w, mut acc_w) = (0u64, 0u64, 0u64, 0u64);
    for r in records {
        let accepted = r.accepted_ai() as u64;
        if r.ai_correct() {
            n_c += 1;
            acc_c += accepted;
        } else {
            n_w += 1;
            acc_w += accepted;
        }
    }
    ConditionalReliance::from_counts(acc_c, n_c, acc_w, n_w)
}

/// Accept/reject rates conditioned on AI correctness and the reliance slope.
pub fn conditional_reliance(trace: &Trace) -> ConditionalReliance {
    conditional_reliance_of(trace.records())
}

pub fn decision_changes(trace: &Trace) -> DecisionChanges {
    let n = trace.len() as u64;
    let (mut changed, mut to_right, mut to_wrong) = (0u64, 0u64, 0u64);
    for r in trace.records() {
        if r.changed() {
            changed += 1;
            let (before, after) = (r.human_initial_correct(), r.final_correct());
            to_right += (!before && after) as u64;
            to_wrong += (before && !after) as u64;
        }
    }
    DecisionChanges {
        changed: Ratio::rate(changed, n),
        changed_to_right: Ratio::rate(to_right, n),
        changed_to_wrong: Ratio::rate(to_wrong, n),
    }
}

/// Mean time from AI output to the confirm/override action over records
/// that carry both timestamps. Records without them are excluded, not
/// imputed.
pub fn intervention_latency(trace: &Trace) -> Latency {
    let (sum, count) = trace
        .records()
        .iter()
        .filter_map(DecisionRecord::latency_ms)
        .fold((0i128, 0u64), |(s, c), d| (s + d as i128, c + 1));
    Latency {
        mean_ms: (count > 0).then(|| sum as f64 / count as f64),
        count,
    }
}

pub fn reliance_summary(trace: &Trace) -> RelianceSummary {
    RelianceSummary {
        conditional: conditional_reliance(trace),
        changes: decision_changes(trace),
        latency: intervention_latency(trace),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymmetryParams {
    /// Length of each post-exposure window.
    pub window: usize,
    /// Minimum early effect on accept-on-wrong that counts as a reaction.
    pub epsilon: f64,
    /// Persistence at or above this is a global update.
    pub persistence_threshold: f64,
}

impl Default for AsymmetryParams {
    fn default() -> Self {
        Self {
            window: 10,
            epsilon: 0.05,
            persistence_threshold: 0.5,
        }
    }
}

impl AsymmetryParams {
    pub fn validate(&self) -> Result<(), InvalidParameter> {
        if self.window == 0 {
            return Err(InvalidParameter::new("window", "must be at least 1"));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(InvalidParameter::new("epsilon", "must be positive"));
        }
        if !self.persistence_threshold.is_finite() {
            return Err(InvalidParameter::new(
                "persistence_threshold",
                "must be finite",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateClass {
    NoExposure,
    InsufficientData,
    Local,
    Global,
}

impl UpdateClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            UpdateClass::NoExposure => "no_exposure",
            UpdateClass::InsufficientData => "insufficient_data",
            UpdateClass::Local => "local",
            UpdateClass::Global => "global",
        }
    }
}

/// Whether reliance on wrong AI advice changed after the first observed AI
/// failure, and whether that change persisted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymmetryReport {
    /// Index of the first record with a wrong AI prediction whose
    /// correctness the participant observed.
    pub exposure_index: Option<usize>,
    /// Records before the exposure.
    pub pre: Option<ConditionalReliance>,
    /// The `window` records after the exposure.
    pub post_early: Option<ConditionalReliance>,
    /// The `window` records after `post_early`.
    pub post_late: Option<ConditionalReliance>,
    /// Drop in accept-on-wrong from `pre` to `post_early`.
    pub early_effect: Option<f64>,
    /// Drop in accept-on-wrong from `pre` to `post_late`.
    pub late_effect: Option<f64>,
    /// `late_effect / early_effect`, present when the early effect exceeds
    /// epsilon in magnitude.
    pub persistence: Option<f64>,
    pub classification: UpdateClass,
}

/// Local-versus-global update analysis around the first observed AI failure.
///
/// Only meaningful on a single participant's trace in presentation order.
pub fn update_asymmetry(
    trace: &Trace,
    params: &AsymmetryParams,
) -> Result<AsymmetryReport, InvalidParameter> {
    params.validate()?;
    let records = trace.records();
    let Some(e) = records
        .iter()
        .position(|r| !r.ai_correct() && r.feedback_observed)
    else {
        return Ok(AsymmetryReport {
            exposure_index: None,
            pre: None,
            post_early: None,
            post_late: None,
            early_effect: None,
            late_effect: None,
            persistence: None,
            classification: UpdateClass::NoExposure,
        });
    };

    let w = params.window;
    let window = |start: usize| {
        let start = start.min(records.len());
        let end = (start + w).min(records.len());
        conditional_reliance_of(&records[start..end])
    };
    let pre = conditional_reliance_of(&records[..e]);
    let post_early = window(e + 1);
    let post_late = window(e + 1 + w);

    let aow = |c: &ConditionalReliance| c.accept_on_wrong.value();
    let (early_effect, late_effect) = match (aow(&pre), aow(&post_early), aow(&post_late)) {
        (Some(p), Some(a), Some(b)) => (Some(p - a), Some(p - b)),
        (Some(p), Some(a), None) => (Some(p - a), None),
        _ => (None, None),
    };
    let (persistence, classification) = match (early_effect, late_effect) {
        (Some(e1), Some(e2)) if e1.abs() > params.epsilon => {
            let p = e2 / e1;
            let class = if p >= params.persistence_threshold {
                UpdateClass::Global
            } else {
                UpdateClass::Local
            };
            (Some(p), class)
        }
        _ => (None, UpdateClass::InsufficientData),
    };

    Ok(AsymmetryReport {
        exposure_index: Some(e),
        pre: Some(pre),
        post_early: Some(post_early),
        post_late: Some(post_late),
        early_effect,
        late_effect,
        persistence,
        classification,
    })
}
