//! Learning and readiness metrics: what changed over time.

use crate::outcome::outcome_summary;
use crate::reliance::{conditional_reliance, conditional_reliance_of, reliance_summary};
use crate::safety::safety_summary;
use crate::trace::{split_blocks, BlockScheme, Trace, TraceError};
use crate::InvalidParameter;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationGap {
    /// Mean `|c_j - I[h1_j = y_j]|` over records with a confidence.
    pub value: Option<f64>,
    pub count: u64,
}

pub fn calibration_gap(trace: &Trace) -> CalibrationGap {
    let (sum, count) = trace
        .records()
        .iter()
        .filter_map(|r| {
            let correct = if r.final_correct() { 1.0 } else { 0.0 };
            r.confidence.map(|c| (c - correct).abs())
        })
        .fold((0.0f64, 0u64), |(s, n), d| (s + d, n + 1));
    CalibrationGap {
        value: (count > 0).then(|| sum / count as f64),
        count,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSlope {
    pub block: usize,
    pub label: Option<String>,
    pub records: usize,
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeTrajectory {
    pub slopes_by_block: Vec<BlockSlope>,
    /// Last defined block slope minus the first defined one.
    pub delta_slope: Option<f64>,
}

/// Reliance slope per block and its change from the first to the last block
/// where it is defined.
pub fn slope_trajectory(trace: &Trace, scheme: BlockScheme) -> Result<SlopeTrajectory, TraceError> {
    let slopes_by_block: Vec<BlockSlope> = split_blocks(trace, scheme)?
        .into_iter()
        .map(|b| BlockSlope {
            block: b.index,
            records: b.trace.len(),
            slope: conditional_reliance(&b.trace).reliance_slope,
            label: b.label,
        })
        .collect();
    let mut defined = slopes_by_block.iter().filter_map(|b| b.slope);
    let first = defined.next();
    let last = defined.next_back();
    let delta_slope = match (first, last) {
        (Some(f), Some(l)) => Some(l - f),
        _ => None,
    };
    Ok(SlopeTrajectory {
        slopes_by_block,
        delta_slope,
    })
}

/// Named scalar metric values for one slice of a trace, used to compare
/// sessions and tasks.
pub type MetricSnapshot = BTreeMap<String, Option<f64>>;

/// Every scalar metric of a trace, keyed by its report name.
pub fn metric_snapshot(trace: &Trace) -> MetricSnapshot {
    let o = outcome_summary(trace);
    let r = reliance_summary(trace);
    let s = safety_summary(trace);
    let mut m = MetricSnapshot::new();
    let mut put = |k: &str, v: Option<f64>| {
        m.insert(k.to_string(), v);
    };
    put("acc_h0", o.acc_h0.value());
    put("acc_ai", o.acc_ai.value());
    put("acc_team", o.acc_team.value());
    put("team_gain_vs_human", o.gain_vs_human.value());
    put("team_gain_vs_ai", o.gain_vs_ai.value());
    put("acc_oracle", o.acc_oracle.value());
    put("regret_best", o.regret_best.value());
    put("accept_on_correct", r.conditional.accept_on_correct.value());
    put("accept_on_wrong", r.conditional.accept_on_wrong.value());
    put("reject_on_correct", r.conditional.reject_on_correct.value());
    put("reject_on_wrong", r.conditional.reject_on_wrong.value());
    put("reliance_slope", r.conditional.reliance_slope);
    put("changed", r.changes.changed.value());
    put("changed_to_right", r.changes.changed_to_right.value());
    put("changed_to_wrong", r.changes.changed_to_wrong.value());
    put("intervention_latency", r.latency.mean_ms);
    put("ai_help", s.ai_help.value());
    put("ai_harm", s.ai_harm.value());
    put("missed_help", s.missed_help.value());
    put("correct_ignore", s.correct_ignore.value());
    put("near_miss_rate", s.near_miss.value());
    put("rollback_rate", s.rollback_rate.value());
    put("escalation_rate", s.escalation_rate.value());
    put("contradiction_rate", s.contradiction_rate.value());
    put("calibration_gap", calibration_gap(trace).value);
    m
}

/// Metrics compared across sessions when none are requested.
pub const DEFAULT_RETENTION_METRICS: [&str; 2] = ["calibration_gap", "reliance_slope"];

/// Metrics compared across tasks when none are requested.
pub const DEFAULT_TRANSFER_METRICS: [&str; 2] = ["acc_team", "reliance_slope"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetentionDiff {
    pub metric: String,
    pub from_session: String,
    pub to_session: String,
    /// `|m(k) - m(k+1)|`, absent when either side is absent.
    pub diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Retention {
    pub diffs: Vec<RetentionDiff>,
    pub diagnostic: Option<String>,
}

fn abs_diff(a: Option<&Option<f64>>, b: Option<&Option<f64>>) -> Option<f64> {
    match (a.copied().flatten(), b.copied().flatten()) {
        (Some(x), Some(y)) => Some((x - y).abs()),
        _ => None,
    }
}

/// Absolute change of each metric between adjacent sessions, in session-key
/// order.
pub fn retention<S: AsRef<str>>(
    sessions: &BTreeMap<String, MetricSnapshot>,
    metrics: &[S],
) -> Retention {
    if sessions.len() < 2 {
        return Retention {
            diffs: Vec::new(),
            diagnostic: Some(format!(
                "retention needs at least 2 sessions, found {}",
                sessions.len()
            )),
        };
    }
    let ordered: Vec<(&String, &MetricSnapshot)> = sessions.iter().collect();
    let mut diffs = Vec::new();
    for metric in metrics {
        let metric = metric.as_ref();
        for pair in ordered.windows(2) {
            let ((k0, m0), (k1, m1)) = (pair[0], pair[1]);
            diffs.push(RetentionDiff {
                metric: metric.to_string(),
                from_session: k0.clone(),
                to_session: k1.clone(),
                diff: abs_diff(m0.get(metric), m1.get(metric)),
            });
        }
    }
    Retention {
        diffs,
        diagnostic: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferDiff {
    pub metric: String,
    pub task_a: String,
    pub task_b: String,
    pub diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LearningError {
    #[error("unknown task '{0}'")]
    UnknownTask(String),
}

/// Absolute metric differences between tasks. Without explicit pairs every
/// unordered pair of tasks is compared, in task-key order.
pub fn transfer<S: AsRef<str>>(
    tasks: &BTreeMap<String, MetricSnapshot>,
    metrics: &[S],
    pairs: Option<&[(String, String)]>,
) -> Result<Vec<TransferDiff>, LearningError> {
    let pairs: Vec<(String, String)> = match pairs {
        Some(p) => {
            for name in p.iter().flat_map(|(a, b)| [a, b]) {
                if !tasks.contains_key(name) {
                    return Err(LearningError::UnknownTask(name.clone()));
                }
            }
            p.to_vec()
        }
        None => {
            let keys: Vec<&String> = tasks.keys().collect();
            let mut all = Vec::new();
            for (i, a) in keys.iter().enumerate() {
                for b in &keys[i + 1..] {
                    all.push(((*a).clone(), (*b).clone()));
                }
            }
            all
        }
    };
    let mut out = Vec::new();
    for metric in metrics {
        let metric = metric.as_ref();
        for (a, b) in &pairs {
            out.push(TransferDiff {
                metric: metric.to_string(),
                task_a: a.clone(),
                task_b: b.clone(),
                diff: abs_diff(tasks[a].get(metric), tasks[b].get(metric)),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationParams {
    pub window: usize,
    pub epsilon: f64,
    /// Consecutive stable windows required.
    pub stability: usize,
}

impl Default for CalibrationParams {
    fn default() -> Self {
        Self {
            window: 20,
            epsilon: 0.05,
            stability: 3,
        }
    }
}

impl CalibrationParams {
    pub fn validate(&self) -> Result<(), InvalidParameter> {
        if self.window == 0 {
            return Err(InvalidParameter::new("window", "must be at least 1"));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(InvalidParameter::new("epsilon", "must be positive"));
        }
        if self.stability == 0 {
            return Err(InvalidParameter::new("stability", "must be at least 1"));
        }
        Ok(())
    }
}

/// Reliance slope of every window `[j, j + window)`, `j = 0 ..= N - window`.
/// Empty when the trace is shorter than the window.
pub fn rolling_slopes(trace: &Trace, window: usize) -> Vec<Option<f64>> {
    let records = trace.records();
    if window == 0 || records.len() < window {
        return Vec::new();
    }
    // [correct-AI seen, correct-AI accepted, wrong-AI seen, wrong-AI accepted]
    let mut counts = [0i64; 4];
    let bump = |r: &crate::trace::DecisionRecord, delta: i64, counts: &mut [i64; 4]| {
        let base = if r.ai_correct() { 0 } else { 2 };
        counts[base] += delta;
        if r.accepted_ai() {
            counts[base + 1] += delta;
        }
    };
    let slope = |c: &[i64; 4]| {
        (c[0] > 0 && c[2] > 0).then(|| c[1] as f64 / c[0] as f64 - c[3] as f64 / c[2] as f64)
    };
    for r in &records[..window] {
        bump(r, 1, &mut counts);
    }
    let mut out = Vec::with_capacity(records.len() - window + 1);
    out.push(slope(&counts));
    for j in window..records.len() {
        bump(&records[j - window], -1, &mut counts);
        bump(&records[j], 1, &mut counts);
        out.push(slope(&counts));
    }
    debug_assert_eq!(
        out.last().copied().flatten(),
        conditional_reliance_of(&records[records.len() - window..]).reliance_slope
    );
    out
}

/// Start index of the earliest rolling window from which `stability`
/// consecutive windows all have a defined slope within `epsilon` of the final
/// window's slope.
pub fn time_to_calibration(
    trace: &Trace,
    params: &CalibrationParams,
) -> Result<Option<usize>, InvalidParameter> {
    params.validate()?;
    let slopes = rolling_slopes(trace, params.window);
    let Some(&Some(terminal)) = slopes.last() else {
        return Ok(None);
    };
    let stable = |s: &Option<f64>| s.is_some_and(|v| (v - terminal).abs() <= params.epsilon);
    let mut run = 0usize;
    for (j, s) in slopes.iter().enumerate() {
        if stable(s) {
            run += 1;
            if run == params.stability {
                return Ok(Some(j + 1 - params.stability));
            }
        } else {
            run = 0;
        }
    }
    Ok(None)
}
