//! Outcome metrics: what happened.

use crate::ratio::{Ratio, SignedRatio};
use crate::trace::Trace;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomeSummary {
    pub acc_h0: Ratio,
    pub acc_ai: Ratio,
    pub acc_team: Ratio,
    /// `acc_team - acc_h0`, exact over `N`.
    pub gain_vs_human: SignedRatio,
    /// `acc_team - acc_ai`, exact over `N`.
    pub gain_vs_ai: SignedRatio,
    /// Share of records where the initial human decision or the AI
    /// prediction was correct.
    pub acc_oracle: Ratio,
    /// `acc_oracle - acc_team`, exact over `N`.
    pub regret_best: SignedRatio,
}

/// Human, AI and team accuracy with the two team gains.
pub fn accuracies(trace: &Trace) -> (Ratio, Ratio, Ratio, SignedRatio, SignedRatio) {
    let n = trace.len() as u64;
    let (mut h0, mut ai, mut team) = (0u64, 0u64, 0u64);
    for r in trace.records() {
        h0 += r.human_initial_correct() as u64;
        ai += r.ai_correct() as u64;
        team += r.final_correct() as u64;
    }
    let (acc_h0, acc_ai, acc_team) = (Ratio::rate(h0, n), Ratio::rate(ai, n), Ratio::rate(team, n));
    (
        acc_h0,
        acc_ai,
        acc_team,
        SignedRatio::difference(acc_team, acc_h0),
        SignedRatio::difference(acc_team, acc_ai),
    )
}

/// Oracle-best accuracy and the regret against it.
///
/// Regret is the per-record mean of `Oracle_j - I[h1_j = y_j]`. It is only
/// guaranteed non-negative when the final decision is always one of the two
/// agents' answers; a final decision that is right while both agents were
/// wrong contributes `-1`.
pub fn oracle_and_regret(trace: &Trace) -> (Ratio, SignedRatio) {
    let n = trace.len() as u64;
    let (mut oracle, mut team) = (0u64, 0u64);
    for r in trace.records() {
        oracle += (r.human_initial_correct() || r.ai_correct()) as u64;
        team += r.final_correct() as u64;
    }
    let acc_oracle = Ratio::rate(oracle, n);
    (
        acc_oracle,
        SignedRatio::difference(acc_oracle, Ratio::rate(team, n)),
    )
}

pub fn outcome_summary(trace: &Trace) -> OutcomeSummary {
    let (acc_h0, acc_ai, acc_team, gain_vs_human, gain_vs_ai) = accuracies(trace);
    let (acc_oracle, regret_best) = oracle_and_regret(trace);
    OutcomeSummary {
        acc_h0,
        acc_ai,
        acc_team,
        gain_vs_human,
        gain_vs_ai,
        acc_oracle,
        regret_best,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{binary_trace, six_case};

    #[test]
    fn six_case_accuracies() {
        let s = outcome_summary(&six_case());
        assert_eq!(s.acc_h0, Ratio::new(3, 6));
        assert_eq!(s.acc_ai, Ratio::new(3, 6));
        assert_eq!(s.acc_team, Ratio::new(3, 6));
        assert_eq!(s.gain_vs_human.value(), Some(0.0));
        assert_eq!(s.gain_vs_ai.value(), Some(0.0));
    }

    #[test]
    fn six_case_oracle_and_regret() {
        let s = outcome_summary(&six_case());
        assert_eq!(s.acc_oracle, Ratio::new(5, 6));
        assert_eq!(s.regret_best, SignedRatio::new(2, 6));
    }

    #[test]
    fn all_correct() {
        let t = binary_trace(&[(1, 1, 1, 1); 5]);
        let s = outcome_summary(&t);
        for acc in [s.acc_h0, s.acc_ai, s.acc_team, s.acc_oracle] {
            assert_eq!(acc.value(), Some(1.0));
        }
        assert_eq!(s.gain_vs_human.value(), Some(0.0));
        assert_eq!(s.regret_best.value(), Some(0.0));
    }

    #[test]
    fn blindly_following_wrong_ai() {
        let t = binary_trace(&[(1, 1, 0, 0), (0, 0, 1, 1), (1, 1, 0, 0), (0, 0, 1, 1)]);
        let s = outcome_summary(&t);
        assert_eq!(s.acc_team.value(), Some(0.0));
        assert_eq!(s.gain_vs_human.value(), Some(-1.0));
    }

    #[test]
    fn vacuous_oracle() {
        let t = binary_trace(&[(1, 0, 0, 0), (0, 1, 1, 1)]);
        let s = outcome_summary(&t);
        assert_eq!(s.acc_oracle.value(), Some(0.0));
        assert_eq!(s.regret_best.value(), Some(0.0));
    }

    #[test]
    fn oracle_following_team_has_no_regret() {
        let t = binary_trace(&[(1, 0, 1, 1), (1, 1, 0, 1), (0, 1, 1, 1), (1, 1, 1, 1)]);
        assert_eq!(outcome_summary(&t).regret_best.numerator(), 0);
    }

    #[test]
    fn independent_recovery_makes_regret_negative() {
        // Both agents wrong, final decision right.
        let t = binary_trace(&[(1, 0, 0, 1)]);
        assert_eq!(outcome_summary(&t).regret_best, SignedRatio::new(-1, 1));
    }

    #[test]
    fn empty_trace_is_undefined() {
        let t = Trace::empty(vec!["0".into(), "1".into()]).unwrap();
        let s = outcome_summary(&t);
        assert_eq!(s.acc_team.value(), None);
        assert_eq!(s.regret_best.value(), None);
        assert_eq!(s.acc_oracle.denominator(), 0);
    }
}
