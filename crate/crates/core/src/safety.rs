//! Safety and harm metrics: what went wrong.

use crate::ratio::Ratio;
use crate::trace::{Policy, Risk, Trace};
use serde::Serialize;

/// All rates are over `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SafetySummary {
    /// `h0 != y` and `h1 = y`.
    pub ai_help: Ratio,
    /// `h0 = y` and `h1 != y`.
    pub ai_harm: Ratio,
    /// `h0 != y`, `a = y`, `h1 != a`.
    pub missed_help: Ratio,
    /// `h0 = y`, `a != y`, `h1 != a`.
    pub correct_ignore: Ratio,
    /// `a != y`, `h1 = y` on a high-risk record.
    pub near_miss: Ratio,
    pub rollback_rate: Ratio,
    /// Rollbacks on records whose final decision agrees with the AI. Kept
    /// for reference; the rollback rate counts every rollback flag.
    pub rollback_ai_agreeing: Ratio,
    pub escalation_rate: Ratio,
    /// `policy = escalate` without an escalation.
    pub contradiction_rate: Ratio,
    /// Records with `policy = escalate`.
    pub policy_escalate: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HelpHarm {
    pub ai_help: Ratio,
    pub ai_harm: Ratio,
    pub missed_help: Ratio,
    pub correct_ignore: Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Governance {
    pub rollback_rate: Ratio,
    pub rollback_ai_agreeing: Ratio,
    pub escalation_rate: Ratio,
    pub contradiction_rate: Ratio,
    pub policy_escalate: u64,
}

pub fn help_harm(trace: &Trace) -> HelpHarm {
    let n = trace.len() as u64;
    let (mut help, mut harm, mut missed, mut ignore) = (0u64, 0u64, 0u64, 0u64);
    for r in trace.records() {
        let (h0, ai, h1) = (r.human_initial_correct(), r.ai_correct(), r.final_correct());
        help += (!h0 && h1) as u64;
        harm += (h0 && !h1) as u64;
        missed += (!h0 && ai && !r.accepted_ai()) as u64;
        ignore += (h0 && !ai && !r.accepted_ai()) as u64;
    }
    HelpHarm {
        ai_help: Ratio::rate(help, n),
        ai_harm: Ratio::rate(harm, n),
        missed_help: Ratio::rate(missed, n),
        correct_ignore: Ratio::rate(ignore, n),
    }
}

/// High-risk records where a wrong AI prediction did not make it into the
/// final decision. Records without a risk label, or with medium risk, never
/// count.
pub fn near_miss_rate(trace: &Trace) -> Ratio {
    let hits = trace
        .records()
        .iter()
        .filter(|r| !r.ai_correct() && r.final_correct() && r.risk == Some(Risk::High))
        .count();
    Ratio::rate(hits as u64, trace.len() as u64)
}

pub fn governance_rates(trace: &Trace) -> Governance {
    let n = trace.len() as u64;
    let (mut rollback, mut rollback_agree, mut escalated, mut required, mut contradicted) =
        (0u64, 0u64, 0u64, 0u64, 0u64);
    for r in trace.records() {
        rollback += r.rollback as u64;
        rollback_agree += (r.rollback && r.accepted_ai()) as u64;
        escalated += r.escalated as u64;
        if r.policy == Some(Policy::Escalate) {
            required += 1;
            contradicted += !r.escalated as u64;
        }
    }
    Governance {
        rollback_rate: Ratio::rate(rollback, n),
        rollback_ai_agreeing: Ratio::rate(rollback_agree, n),
        escalation_rate: Ratio::rate(escalated, n),
        contradiction_rate: Ratio::rate(contradicted, n),
        policy_escalate: required,
    }
}

pub fn safety_summary(trace: &Trace) -> SafetySummary {
    let hh = help_harm(trace);
    let gov = governance_rates(trace);
    SafetySummary {
        ai_help: hh.ai_help,
        ai_harm: hh.ai_harm,
        missed_help: hh.missed_help,
        correct_ignore: hh.correct_ignore,
        near_miss: near_miss_rate(trace),
        rollback_rate: gov.rollback_rate,
        rollback_ai_agreeing: gov.rollback_ai_agreeing,
        escalation_rate: gov.escalation_rate,
        contradiction_rate: gov.contradiction_rate,
        policy_escalate: gov.policy_escalate,
    }
}
