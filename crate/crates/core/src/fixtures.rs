//! Small hand-checkable traces shared by unit tests, examples and the
//! acceptance suite.

use crate::trace::{validate_trace, DecisionRecord, Trace};

/// Builds a binary-alphabet trace from `(y, h0, a, h1)` tuples. Case ids are
/// `r1, r2, ...`.
pub fn binary_trace(tuples: &[(u8, u8, u8, u8)]) -> Trace {
    let records = tuples
        .iter()
        .enumerate()
        .map(|(i, &(y, h0, a, h1))| {
            DecisionRecord::new(
                format!("r{}", i + 1),
                y.to_string(),
                h0.to_string(),
                a.to_string(),
                h1.to_string(),
            )
        })
        .collect();
    validate_trace(records, vec!["0".into(), "1".into()]).expect("fixture is valid")
}

/// The six-record worked example as `(y, h0, a, h1)`.
pub const SIX_CASE: [(u8, u8, u8, u8); 6] = [
    (1, 1, 1, 1),
    (1, 0, 1, 1),
    (1, 1, 0, 0),
    (0, 1, 0, 1),
    (0, 0, 1, 0),
    (1, 0, 0, 0),
];

/// Confidences paired with [`SIX_CASE`].
pub const SIX_CASE_CONFIDENCE: [f64; 6] = [1.0, 1.0, 1.0, 0.0, 1.0, 0.0];

/// The six-record worked example, without optional fields.
pub fn six_case() -> Trace {
    binary_trace(&SIX_CASE)
}

/// The six-record worked example with confidences, and `r5` marked
/// high-risk while the others are low-risk.
pub fn six_case_annotated() -> Trace {
    use crate::trace::Risk;
    let mut records = six_case().into_records();
    for (i, (r, c)) in records.iter_mut().zip(SIX_CASE_CONFIDENCE).enumerate() {
        r.confidence = Some(c);
        r.risk = Some(if i == 4 { Risk::High } else { Risk::Low });
    }
    validate_trace(records, vec!["0".into(), "1".into()]).expect("fixture is valid")
}
