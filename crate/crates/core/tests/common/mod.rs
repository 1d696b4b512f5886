//! Shared generators for integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use readiness_core::trace::{validate_trace, DecisionRecord, Policy, Risk, Trace};
use serde_json::json;

pub fn alphabet(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("L{i}")).collect()
}

fn maybe<R: Rng, T>(rng: &mut R, f: impl FnOnce(&mut R) -> T) -> Option<T> {
    if rng.gen_bool(0.5) {
        Some(f(rng))
    } else {
        None
    }
}

/// A record with labels drawn uniformly from `labels` and every optional
/// field independently present or absent.
pub fn random_record<R: Rng>(
    rng: &mut R,
    labels: &[String],
    index: usize,
    extras: bool,
) -> DecisionRecord {
    let pick = |rng: &mut R| labels.choose(rng).unwrap().clone();
    let (y, h0, a, h1) = (pick(rng), pick(rng), pick(rng), pick(rng));
    let mut r = DecisionRecord::new(format!("case-{index}"), y, h0, a, h1);
    r.confidence = maybe(rng, |rng| match rng.gen_range(0..4) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.gen::<f64>(),
    });
    if rng.gen_bool(0.5) {
        let shown = rng.gen_range(1_600_000_000_000i64..1_800_000_000_000);
        r.t_ai_shown = Some(shown);
        r.t_final = maybe(rng, |rng| shown + rng.gen_range(0..120_000));
    }
    r.risk = maybe(rng, |rng| {
        *[Risk::Low, Risk::Medium, Risk::High].choose(rng).unwrap()
    });
    r.rollback = rng.gen_bool(0.2);
    r.escalated = rng.gen_bool(0.2);
    r.policy = maybe(rng, |rng| {
        if rng.gen_bool(0.5) {
            Policy::Escalate
        } else {
            Policy::None
        }
    });
    r.feedback_observed = rng.gen_bool(0.3);
    r.participant_id = maybe(rng, |rng| format!("p{}", rng.gen_range(0..3)));
    r.session_id = maybe(rng, |rng| format!("s{}", rng.gen_range(0..3)));
    r.block_id = maybe(rng, |rng| format!("b{}", rng.gen_range(0..4)));
    r.task_id = maybe(rng, |rng| format!("t{}", rng.gen_range(0..3)));
    r.condition_id = maybe(rng, |rng| format!("c{}", rng.gen_range(0..2)));
    r.model_version = maybe(rng, |rng| format!("m{}", rng.gen_range(0..2)));
    if extras && rng.gen_bool(0.3) {
        r.extra
            .insert("note".into(), json!(format!("n{}", rng.gen_range(0..100))));
        if rng.gen_bool(0.5) {
            r.extra
                .insert("score".into(), json!(rng.gen_range(-5i64..5)));
        }
    }
    r
}

/// A valid trace with `N` in `n` and `K` in `k`, optional fields randomized.
pub fn random_trace(
    seed: u64,
    n: std::ops::RangeInclusive<usize>,
    k: std::ops::RangeInclusive<usize>,
    extras: bool,
) -> Trace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(k);
    let n = rng.gen_range(n);
    let labels = alphabet(k);
    let records = (0..n)
        .map(|i| random_record(&mut rng, &labels, i, extras))
        .collect();
    validate_trace(records, labels).expect("generated trace is valid")
}

/// A binary trace from `(y, h0, a, h1)` tuples with no optional fields.
pub fn tuples_trace(tuples: &[(u8, u8, u8, u8)]) -> Trace {
    let records = tuples
        .iter()
        .enumerate()
        .map(|(i, &(y, h0, a, h1))| {
            DecisionRecord::new(
                format!("r{i}"),
                y.to_string(),
                h0.to_string(),
                a.to_string(),
                h1.to_string(),
            )
        })
        .collect();
    validate_trace(records, vec!["0".into(), "1".into()]).unwrap()
}
