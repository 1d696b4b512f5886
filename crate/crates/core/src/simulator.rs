//! Parametric human-AI team simulator.
//!
//! Per case: the ground truth is uniform over `K` labels; the AI is right
//! with probability `p_ai` and otherwise picks one of the `K - 1` wrong labels
//! uniformly; the human's initial decision is drawn the same way with `p_h`,
//! independently of the AI; the human then adopts the AI prediction with
//! probability `alpha_c` when the AI is right and `alpha_w` when it is wrong,
//! and otherwise keeps the initial decision.
//!
//! Adoption is conditioned on the AI's latent correctness only to make the
//! conditional reliance rates directly controllable. Generation is a single
//! ChaCha stream, so a `(config, seed)` pair always yields the same trace.

use crate::trace::{validate_trace, DecisionRecord, Label, Policy, Risk, Trace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Epoch milliseconds of the first simulated case.
const T0_MS: i64 = 1_700_000_000_000;
/// Spacing between consecutive simulated cases.
const CASE_SPACING_MS: i64 = 60_000;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid simulator config: {0}")]
    InvalidConfig(String),
    #[error("no closed form under drift")]
    NoClosedFormUnderDrift,
}

/// Overrides applied to cases `start..end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftSegment {
    pub start: usize,
    pub end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_ai: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_w: Option<f64>,
}

/// Confidence drawn uniformly from `mean ± noise`, where the mean depends on
/// whether the final decision is correct, clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfidenceModel {
    pub m_correct: f64,
    pub m_wrong: f64,
    #[serde(default)]
    pub noise: f64,
}

/// Latency drawn uniformly from `mean_ms ± jitter_ms`, floored at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatencyModel {
    pub mean_ms: f64,
    #[serde(default)]
    pub jitter_ms: f64,
}

fn default_alphabet_size() -> usize {
    2
}

/// Simulator parameters. Optional event probabilities that are left out are
/// not generated at all (the field stays absent or `false`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n_cases: usize,
    #[serde(default = "default_alphabet_size")]
    pub alphabet_size: usize,
    pub p_ai: f64,
    pub p_h: f64,
    pub alpha_c: f64,
    pub alpha_w: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drift: Vec<DriftSegment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence_model: Option<ConfidenceModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_model: Option<LatencyModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub risk_high_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rollback_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub escalate_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy_escalate_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback_observed_prob: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl SimConfig {
    /// A stationary binary config with no optional fields.
    pub fn new(n_cases: usize, p_ai: f64, p_h: f64, alpha_c: f64, alpha_w: f64, seed: u64) -> Self {
        Self {
            n_cases,
            alphabet_size: 2,
            p_ai,
            p_h,
            alpha_c,
            alpha_w,
            drift: Vec::new(),
            confidence_model: None,
            latency_model: None,
            risk_high_prob: None,
            rollback_prob: None,
            escalate_prob: None,
            policy_escalate_prob: None,
            feedback_observed_prob: None,
            seed,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let config: SimConfig =
            serde_json::from_str(text).map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn alphabet(&self) -> Vec<Label> {
        (0..self.alphabet_size).map(|i| i.to_string()).collect()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        if self.n_cases == 0 {
            return bad("n_cases must be at least 1".into());
        }
        if self.alphabet_size < 2 {
            return bad("alphabet_size must be at least 2".into());
        }
        let mut probs: Vec<(&str, f64)> = vec![
            ("p_ai", self.p_ai),
            ("p_h", self.p_h),
            ("alpha_c", self.alpha_c),
            ("alpha_w", self.alpha_w),
        ];
        for (name, p) in [
            ("risk_high_prob", self.risk_high_prob),
            ("rollback_prob", self.rollback_prob),
            ("escalate_prob", self.escalate_prob),
            ("policy_escalate_prob", self.policy_escalate_prob),
            ("feedback_observed_prob", self.feedback_observed_prob),
        ] {
            if let Some(p) = p {
                probs.push((name, p));
            }
        }
        for seg in &self.drift {
            for (name, p) in [
                ("drift.p_ai", seg.p_ai),
                ("drift.p_h", seg.p_h),
                ("drift.alpha_c", seg.alpha_c),
                ("drift.alpha_w", seg.alpha_w),
            ] {
                if let Some(p) = p {
                    probs.push((name, p));
                }
            }
        }
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        let mut segments: Vec<&DriftSegment> = self.drift.iter().collect();
        segments.sort_by_key(|s| s.start);
        for s in &segments {
            if s.start >= s.end || s.end > self.n_cases {
                return bad(format!(
                    "drift range {}..{} must be non-empty and within 0..{}",
                    s.start, s.end, self.n_cases
                ));
            }
        }
        for pair in segments.windows(2) {
            if pair[1].start < pair[0].end {
                return bad(format!(
                    "drift ranges {}..{} and {}..{} overlap",
                    pair[0].start, pair[0].end, pair[1].start, pair[1].end
                ));
            }
        }
        if let Some(m) = &self.confidence_model {
            if !(m.m_correct.is_finite() && m.m_wrong.is_finite() && m.noise >= 0.0) {
                return bad("confidence_model needs finite means and noise >= 0".into());
            }
        }
        if let Some(m) = &self.latency_model {
            if !(m.mean_ms.is_finite() && m.jitter_ms >= 0.0) {
                return bad("latency_model needs a finite mean and jitter_ms >= 0".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct CaseParams {
    p_ai: f64,
    p_h: f64,
    alpha_c: f64,
    alpha_w: f64,
}

/// Draws a label index uniformly from the `k - 1` labels other than `truth`.
fn other_label<R: Rng>(rng: &mut R, truth: usize, k: usize) -> usize {
    let r = rng.gen_range(0..k - 1);
    if r >= truth {
        r + 1
    } else {
        r
    }
}

/// Generates a trace from `config`.
pub fn simulate_trace(config: &SimConfig) -> Result<Trace, SimError> {
    config.validate()?;
    let k = config.alphabet_size;
    let alphabet = config.alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let base = CaseParams {
        p_ai: config.p_ai,
        p_h: config.p_h,
        alpha_c: config.alpha_c,
        alpha_w: config.alpha_w,
    };
    let mut segments: Vec<&DriftSegment> = config.drift.iter().collect();
    segments.sort_by_key(|s| s.start);
    let mut seg_iter = segments.into_iter().peekable();
    let mut active: Option<&DriftSegment> = None;

    let mut records = Vec::with_capacity(config.n_cases);
    for j in 0..config.n_cases {
        if active.is_some_and(|s| j >= s.end) {
            active = None;
        }
        if seg_iter.peek().is_some_and(|s| s.start == j) {
            active = seg_iter.next();
        }
        let p = match active {
            Some(s) => CaseParams {
                p_ai: s.p_ai.unwrap_or(base.p_ai),
                p_h: s.p_h.unwrap_or(base.p_h),
                alpha_c: s.alpha_c.unwrap_or(base.alpha_c),
                alpha_w: s.alpha_w.unwrap_or(base.alpha_w),
            },
            None => base,
        };

        let y = rng.gen_range(0..k);
        let a = if rng.gen_bool(p.p_ai) {
            y
        } else {
            other_label(&mut rng, y, k)
        };
        let h0 = if rng.gen_bool(p.p_h) {
            y
        } else {
            other_label(&mut rng, y, k)
        };
        let adopt = rng.gen_bool(if a == y { p.alpha_c } else { p.alpha_w });
        let h1 = if adopt { a } else { h0 };

        let mut r = DecisionRecord::new(
            format!("c{j:07}"),
            alphabet[y].clone(),
            alphabet[h0].clone(),
            alphabet[a].clone(),
            alphabet[h1].clone(),
        );
        if let Some(m) = &config.confidence_model {
            let mean = if h1 == y { m.m_correct } else { m.m_wrong };
            let u: f64 = rng.gen();
            r.confidence = Some((mean + m.noise * (2.0 * u - 1.0)).clamp(0.0, 1.0));
        }
        if let Some(m) = &config.latency_model {
            let u: f64 = rng.gen();
            let latency = (m.mean_ms + m.jitter_ms * (2.0 * u - 1.0)).round().max(0.0) as i64;
            let shown = T0_MS + j as i64 * CASE_SPACING_MS;
            r.t_ai_shown = Some(shown);
            r.t_final = Some(shown + latency);
        }
        if let Some(p) = config.risk_high_prob {
            r.risk = Some(if rng.gen_bool(p) {
                Risk::High
            } else {
                Risk::Low
            });
        }
        if let Some(p) = config.rollback_prob {
            r.rollback = rng.gen_bool(p);
        }
        if let Some(p) = config.escalate_prob {
            r.escalated = rng.gen_bool(p);
        }
        if let Some(p) = config.policy_escalate_prob {
            r.policy = Some(if rng.gen_bool(p) {
                Policy::Escalate
            } else {
                Policy::None
            });
        }
        if let Some(p) = config.feedback_observed_prob {
            r.feedback_observed = rng.gen_bool(p);
        }
        records.push(r);
    }
    validate_trace(records, alphabet)
        .map_err(|e| SimError::InvalidConfig(format!("generated trace failed validation: {e}")))
}

/// Closed-form expected metric values of a stationary config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectedMetrics {
    pub acc_team: f64,
    pub accept_on_correct: f64,
    pub accept_on_wrong: f64,
    pub reliance_slope: f64,
    pub ai_help: f64,
    pub ai_harm: f64,
}

/// Expected values of the metrics under the generative model.
///
/// Measured acceptance includes cases where the human kept an initial
/// decision that happens to equal the AI prediction: always when both are
/// right, and with probability `1 / (K - 1)` when both are wrong.
pub fn expected_metrics(config: &SimConfig) -> Result<ExpectedMetrics, SimError> {
    config.validate()?;
    if !config.drift.is_empty() {
        return Err(SimError::NoClosedFormUnderDrift);
    }
    let SimConfig {
        p_ai,
        p_h,
        alpha_c,
        alpha_w,
        ..
    } = *config;
    let q = 1.0 / (config.alphabet_size as f64 - 1.0);
    let accept_on_correct = alpha_c + (1.0 - alpha_c) * p_h;
    let accept_on_wrong = alpha_w + (1.0 - alpha_w) * (1.0 - p_h) * q;
    Ok(ExpectedMetrics {
        acc_team: p_ai * (alpha_c + (1.0 - alpha_c) * p_h) + (1.0 - p_ai) * (1.0 - alpha_w) * p_h,
        accept_on_correct,
        accept_on_wrong,
        reliance_slope: accept_on_correct - accept_on_wrong,
        ai_help: (1.0 - p_h) * p_ai * alpha_c,
        ai_harm: p_h * (1.0 - p_ai) * alpha_w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::write_jsonl;
    use crate::outcome::outcome_summary;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn zero_cases_rejected() {
        let c = SimConfig::new(0, 0.5, 0.5, 0.5, 0.5, 1);
        assert!(matches!(
            simulate_trace(&c),
            Err(SimError::InvalidConfig(_))
        ));
    }

    #[test]
    fn bad_probabilities_and_overlapping_drift_rejected() {
        let c = SimConfig::new(10, 1.5, 0.5, 0.5, 0.5, 1);
        assert!(c.validate().is_err());
        let mut c = SimConfig::new(10, 0.5, 0.5, 0.5, 0.5, 1);
        c.drift = vec![
            DriftSegment {
                start: 0,
                end: 5,
                p_ai: None,
                p_h: None,
                alpha_c: None,
                alpha_w: Some(0.1),
            },
            DriftSegment {
                start: 4,
                end: 8,
                p_ai: None,
                p_h: None,
                alpha_c: None,
                alpha_w: Some(0.2),
            },
        ];
        assert!(c.validate().unwrap_err().to_string().contains("overlap"));
        c.drift.truncate(1);
        c.drift[0].end = 11;
        assert!(c.validate().is_err());
    }

    #[test]
    fn perfect_ai_always_adopted() {
        let c = SimConfig::new(200, 1.0, 0.3, 1.0, 0.5, 7);
        let t = simulate_trace(&c).unwrap();
        assert!(t
            .records()
            .iter()
            .all(|r| r.human_final == r.ai_prediction && r.ai_prediction == r.ground_truth));
        assert_eq!(outcome_summary(&t).acc_team.value(), Some(1.0));
    }

    #[test]
    fn same_seed_same_bytes() {
        let mut c = SimConfig::new(500, 0.7, 0.6, 0.8, 0.4, 42);
        c.alphabet_size = 3;
        c.confidence_model = Some(ConfidenceModel {
            m_correct: 0.8,
            m_wrong: 0.4,
            noise: 0.2,
        });
        c.latency_model = Some(LatencyModel {
            mean_ms: 3000.0,
            jitter_ms: 1000.0,
        });
        c.risk_high_prob = Some(0.2);
        let bytes = |c: &SimConfig| {
            let mut out = Vec::new();
            write_jsonl(&simulate_trace(c).unwrap(), &mut out).unwrap();
            out
        };
        assert_eq!(bytes(&c), bytes(&c));
        let mut other = c.clone();
        other.seed = 43;
        assert_ne!(bytes(&c), bytes(&other));
    }

    #[test]
    fn drift_overrides_apply_to_their_range() {
        let mut c = SimConfig::new(100, 0.5, 0.5, 0.5, 0.5, 3);
        c.drift = vec![DriftSegment {
            start: 40,
            end: 60,
            p_ai: Some(0.0),
            p_h: Some(1.0),
            alpha_c: None,
            alpha_w: Some(0.0),
        }];
        let t = simulate_trace(&c).unwrap();
        for r in &t.records()[40..60] {
            assert!(!r.ai_correct() && r.human_initial_correct() && r.final_correct());
        }
    }

    #[test]
    fn closed_forms_for_reference_config() {
        let e = expected_metrics(&SimConfig::new(1, 0.8, 0.6, 0.9, 0.3, 0)).unwrap();
        assert!(close(e.accept_on_correct, 0.96));
        assert!(close(e.accept_on_wrong, 0.58));
        assert!(close(e.acc_team, 0.852));
        assert!(close(e.reliance_slope, 0.38));
        assert!(close(e.ai_help, 0.4 * 0.8 * 0.9));
        assert!(close(e.ai_harm, 0.6 * 0.2 * 0.3));
    }

    #[test]
    fn closed_forms_degenerate_adoption() {
        let never = expected_metrics(&SimConfig::new(1, 0.7, 0.55, 0.0, 0.0, 0)).unwrap();
        assert!(close(never.acc_team, 0.55));
        assert_eq!((never.ai_help, never.ai_harm), (0.0, 0.0));
        let always = expected_metrics(&SimConfig::new(1, 0.7, 0.55, 1.0, 1.0, 0)).unwrap();
        assert!(close(always.acc_team, 0.7));
        assert_eq!(
            (always.accept_on_correct, always.accept_on_wrong),
            (1.0, 1.0)
        );
        assert_eq!(always.reliance_slope, 0.0);
    }

    #[test]
    fn no_closed_form_under_drift() {
        let mut c = SimConfig::new(10, 0.5, 0.5, 0.5, 0.5, 0);
        c.drift.push(DriftSegment {
            start: 0,
            end: 5,
            p_ai: None,
            p_h: None,
            alpha_c: None,
            alpha_w: Some(0.1),
        });
        assert_eq!(expected_metrics(&c), Err(SimError::NoClosedFormUnderDrift));
    }

    #[test]
    fn config_json_field_names() {
        let c = SimConfig::from_json(
            r#"{"n_cases":10,"alphabet_size":3,"p_ai":0.8,"p_h":0.6,"alpha_c":0.9,"alpha_w":0.3,
                "drift":[{"start":5,"end":10,"alpha_w":0.1}],
                "confidence_model":{"m_correct":0.8,"m_wrong":0.3,"noise":0.1},
                "latency_model":{"mean_ms":2000,"jitter_ms":500},
                "risk_high_prob":0.1,"rollback_prob":0.05,"escalate_prob":0.1,
                "policy_escalate_prob":0.2,"feedback_observed_prob":0.5,"seed":9}"#,
        )
        .unwrap();
        assert_eq!(c.alphabet_size, 3);
        assert_eq!(c.drift[0].alpha_w, Some(0.1));
        assert!(SimConfig::from_json(
            r#"{"n_cases":10,"p_ai":0.8,"p_h":0.6,"alpha_c":0.9,"alpha_w":0.3,"typo":1}"#
        )
        .is_err());
    }
}
