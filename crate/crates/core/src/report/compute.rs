use crate::learning::{
    calibration_gap, metric_snapshot, retention, slope_trajectory, time_to_calibration, transfer,
    CalibrationGap, CalibrationParams, MetricSnapshot, Retention, SlopeTrajectory, TransferDiff,
    DEFAULT_RETENTION_METRICS, DEFAULT_TRANSFER_METRICS,
};
use crate::outcome::{outcome_summary, OutcomeSummary};
use crate::reliance::{
    reliance_summary, update_asymmetry, AsymmetryParams, AsymmetryReport, RelianceSummary,
};
use crate::safety::{safety_summary, SafetySummary};
use crate::trace::{partition, BlockScheme, PartitionId, PartitionKey, Trace, TraceError};
use crate::InvalidParameter;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Engine parameters. None of these values come from the metric
/// definitions; they are defaults of this implementation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportParams {
    pub asymmetry: AsymmetryParams,
    pub calibration: CalibrationParams,
    /// Fixed block size used when not every record carries a `block_id`.
    pub block_size: usize,
    pub retention_metrics: Vec<String>,
    pub transfer_metrics: Vec<String>,
}

impl Default for ReportParams {
    fn default() -> Self {
        ReportParams {
            asymmetry: AsymmetryParams::default(),
            calibration: CalibrationParams::default(),
            block_size: 20,
            retention_metrics: DEFAULT_RETENTION_METRICS.map(String::from).to_vec(),
            transfer_metrics: DEFAULT_TRANSFER_METRICS.map(String::from).to_vec(),
        }
    }
}

impl ReportParams {
    pub fn validate(&self) -> Result<(), InvalidParameter> {
        self.asymmetry.validate()?;
        self.calibration.validate()?;
        if self.block_size == 0 {
            return Err(InvalidParameter::new("block_size", "must be at least 1"));
        }
        let known =
            metric_snapshot(&Trace::empty(vec!["0".into(), "1".into()]).expect("static alphabet"));
        for (name, list) in [
            ("retention_metrics", &self.retention_metrics),
            ("transfer_metrics", &self.transfer_metrics),
        ] {
            if let Some(bad) = list.iter().find(|m| !known.contains_key(m.as_str())) {
                return Err(InvalidParameter::new(
                    name,
                    format!("unknown metric '{bad}'"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Parameter(#[from] InvalidParameter),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("metric identity violated in partition '{partition}': {violations:?}\n{dump}")]
    IdentityViolation {
        partition: String,
        violations: Vec<String>,
        dump: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub records: u64,
    /// Records where the AI was correct.
    pub ai_correct: u64,
    pub ai_wrong: u64,
    /// Records with both timestamps.
    pub timed: u64,
    pub with_confidence: u64,
    pub with_risk: u64,
    pub sessions: u64,
    pub blocks: u64,
    pub tasks: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearningSection {
    pub calibration_gap: CalibrationGap,
    /// `by_label` or `fixed_size`.
    pub blocking: String,
    pub slope_trajectory: SlopeTrajectory,
    pub retention: Retention,
    pub transfer: Vec<TransferDiff>,
    /// `None` when skipped or when no stable window was found; see
    /// `time_to_calibration_computed`.
    pub time_to_calibration: Option<usize>,
    pub time_to_calibration_computed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub partition: String,
    pub partition_keys: Vec<String>,
    pub coverage: Coverage,
    pub outcome: OutcomeSummary,
    pub reliance: RelianceSummary,
    /// `None` when the partition spans several participants.
    pub update_asymmetry: Option<AsymmetryReport>,
    pub safety: SafetySummary,
    pub learning: LearningSection,
    pub parameters: ReportParams,
    pub diagnostics: Vec<String>,
}

/// Computes one report per partition of `trace` under `keys`, in partition
/// order. Every report passes [`check_identities`].
pub fn compute_report(
    trace: &Trace,
    keys: &[PartitionKey],
    params: &ReportParams,
) -> Result<Vec<MetricReport>, ReportError> {
    params.validate()?;
    let key_names: Vec<String> = keys.iter().map(|k| k.name().to_string()).collect();
    if keys.is_empty() {
        return Ok(vec![compute_partition(
            &PartitionId::Keyed(Vec::new()),
            trace,
            &key_names,
            params,
        )?]);
    }
    let parts: Vec<(PartitionId, Trace)> = partition(trace, keys).into_iter().collect();
    parts
        .par_iter()
        .map(|(id, t)| compute_partition(id, t, &key_names, params))
        .collect()
}

fn distinct(trace: &Trace, key: PartitionKey) -> BTreeSet<Option<&str>> {
    trace.records().iter().map(|r| r.key(key)).collect()
}

fn snapshots_by(
    trace: &Trace,
    key: PartitionKey,
    what: &str,
    diagnostics: &mut Vec<String>,
) -> BTreeMap<String, MetricSnapshot> {
    let mut out = BTreeMap::new();
    if trace.records().iter().all(|r| r.key(key).is_none()) {
        return out;
    }
    for (id, t) in partition(trace, &[key]) {
        match id {
            PartitionId::Keyed(v) => {
                out.insert(v.join("/"), metric_snapshot(&t));
            }
            PartitionId::Unkeyed => diagnostics.push(format!(
                "{} record(s) without {} left out of {what}",
                t.len(),
                key.name()
            )),
        }
    }
    out
}

fn compute_partition(
    id: &PartitionId,
    trace: &Trace,
    key_names: &[String],
    params: &ReportParams,
) -> Result<MetricReport, ReportError> {
    let mut diagnostics = Vec::new();
    let outcome = outcome_summary(trace);
    let reliance = reliance_summary(trace);
    let safety = safety_summary(trace);
    if trace.is_empty() {
        diagnostics.push("partition has no records; every rate is undefined".to_string());
    }

    let participants = distinct(trace, PartitionKey::Participant);
    let single_participant = participants.len() <= 1;
    let (update_asymmetry, ttc, ttc_computed) = if single_participant {
        let a = update_asymmetry(trace, &params.asymmetry)?;
        let t = time_to_calibration(trace, &params.calibration)?;
        (Some(a), t, true)
    } else {
        diagnostics.push(format!(
            "update_asymmetry and time_to_calibration skipped: partition spans {} participants; group by participant_id",
            participants.len()
        ));
        (None, None, false)
    };

    let by_label = !trace.is_empty() && trace.records().iter().all(|r| r.block_id.is_some());
    let (scheme, blocking) = if by_label {
        (BlockScheme::ByLabel, "by_label")
    } else {
        (BlockScheme::FixedSize(params.block_size), "fixed_size")
    };
    let slope_trajectory = slope_trajectory(trace, scheme)?;

    let sessions = snapshots_by(trace, PartitionKey::Session, "retention", &mut diagnostics);
    let retention = retention(&sessions, &params.retention_metrics);
    let tasks = snapshots_by(trace, PartitionKey::Task, "transfer", &mut diagnostics);
    let transfer =
        transfer(&tasks, &params.transfer_metrics, None).expect("default pairs use known tasks");
    if tasks.len() < 2 {
        diagnostics.push("transfer needs at least two tasks".to_string());
    }

    let count = |f: &dyn Fn(&crate::DecisionRecord) -> bool| {
        trace.records().iter().filter(|r| f(r)).count() as u64
    };
    let ai_correct = count(&|r| r.ai_correct());
    let coverage = Coverage {
        records: trace.len() as u64,
        ai_correct,
        ai_wrong: trace.len() as u64 - ai_correct,
        timed: count(&|r| r.latency_ms().is_some()),
        with_confidence: count(&|r| r.confidence.is_some()),
        with_risk: count(&|r| r.risk.is_some()),
        sessions: distinct_present(trace, PartitionKey::Session),
        blocks: distinct_present(trace, PartitionKey::Block),
        tasks: distinct_present(trace, PartitionKey::Task),
    };
    if coverage.timed == 0 && !trace.is_empty() {
        diagnostics
            .push("no record has both timestamps; intervention latency undefined".to_string());
    }
    if coverage.with_confidence == 0 && !trace.is_empty() {
        diagnostics.push("no record has a confidence; calibration gap undefined".to_string());
    }

    let report = MetricReport {
        partition: id.to_string(),
        partition_keys: key_names.to_vec(),
        coverage,
        outcome,
        reliance,
        update_asymmetry,
        safety,
        learning: LearningSection {
            calibration_gap: calibration_gap(trace),
            blocking: blocking.to_string(),
            slope_trajectory,
            retention,
            transfer,
            time_to_calibration: ttc,
            time_to_calibration_computed: ttc_computed,
        },
        parameters: params.clone(),
        diagnostics,
    };
    if let Err(violations) = check_identities(&report.outcome, &report.reliance, &report.safety) {
        return Err(ReportError::IdentityViolation {
            partition: report.partition.clone(),
            violations,
            dump: format!("{:#?}", (&report.outcome, &report.reliance, &report.safety)),
        });
    }
    Ok(report)
}

fn distinct_present(trace: &Trace, key: PartitionKey) -> u64 {
    distinct(trace, key).into_iter().flatten().count() as u64
}

/// Cross-metric identities that hold on every valid trace. Returns the
/// violated identities.
pub fn check_identities(
    o: &OutcomeSummary,
    r: &RelianceSummary,
    s: &SafetySummary,
) -> Result<(), Vec<String>> {
    let mut bad = Vec::new();
    let n = o.acc_team.denominator();
    let c = &r.conditional;
    let mut check = |ok: bool, what: &str| {
        if !ok {
            bad.push(what.to_string());
        }
    };
    check(
        s.ai_help.numerator() as i64 - s.ai_harm.numerator() as i64
            == o.acc_team.numerator() as i64 - o.acc_h0.numerator() as i64,
        "ai_help - ai_harm = acc_team - acc_h0",
    );
    check(
        s.ai_help.numerator() == r.changes.changed_to_right.numerator(),
        "ai_help = changed_to_right",
    );
    check(
        s.ai_harm.numerator() == r.changes.changed_to_wrong.numerator(),
        "ai_harm = changed_to_wrong",
    );
    check(
        c.accept_on_correct.numerator() + c.reject_on_correct.numerator() == c.n_correct()
            && c.accept_on_wrong.numerator() + c.reject_on_wrong.numerator() == c.n_wrong(),
        "accept + reject = 1 on C and on W",
    );
    check(c.n_correct() + c.n_wrong() == n, "|C| + |W| = N");
    check(
        o.acc_oracle.numerator() >= o.acc_h0.numerator().max(o.acc_ai.numerator()),
        "acc_oracle >= max(acc_h0, acc_ai)",
    );
    check(
        o.regret_best.numerator()
            == o.acc_oracle.numerator() as i64 - o.acc_team.numerator() as i64,
        "regret_best = acc_oracle - acc_team",
    );
    check(
        c.reliance_slope.is_none_or(|v| (-1.0..=1.0).contains(&v)),
        "reliance_slope in [-1, 1]",
    );
    check(
        r.changes.changed_to_right.numerator() + r.changes.changed_to_wrong.numerator()
            <= r.changes.changed.numerator(),
        "changed_to_right + changed_to_wrong <= changed",
    );
    check(
        s.contradiction_rate.numerator() <= s.policy_escalate,
        "contradictions <= escalate-policy records",
    );
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}
