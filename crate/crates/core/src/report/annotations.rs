//! Static metric manifest: family, onboarding stage and design-action hint
//! for every reported metric.

use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Outcome,
    Reliance,
    Safety,
    Learning,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Outcome,
        Family::Reliance,
        Family::Safety,
        Family::Learning,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            Family::Outcome => "outcome",
            Family::Reliance => "reliance",
            Family::Safety => "safety",
            Family::Learning => "learning",
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            Family::Outcome => "Outcome",
            Family::Reliance => "Reliance & Interaction",
            Family::Safety => "Safety & Harm",
            Family::Learning => "Learning & Readiness",
        }
    }

    pub fn question(&self) -> &'static str {
        match self {
            Family::Outcome => "What happened?",
            Family::Reliance => "How was AI used?",
            Family::Safety => "What went wrong?",
            Family::Learning => "What changed over time?",
        }
    }
}

/// Onboarding lifecycle stage(s) a metric informs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UciStage {
    Understand,
    Control,
    Improve,
    UnderstandControl,
    ControlImprove,
    UnderstandImprove,
}

impl UciStage {
    pub fn as_str(&self) -> &'static str {
        match self {
            UciStage::Understand => "Understand",
            UciStage::Control => "Control",
            UciStage::Improve => "Improve",
            UciStage::UnderstandControl => "Understand + Control",
            UciStage::ControlImprove => "Control + Improve",
            UciStage::UnderstandImprove => "Understand + Improve",
        }
    }
}

impl fmt::Display for UciStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for UciStage {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricInfo {
    /// Stable key used in JSON output and metric snapshots.
    pub name: &'static str,
    /// Human-readable label.
    pub label: &'static str,
    pub family: Family,
    pub stage: UciStage,
    pub design_action: &'static str,
}

const fn m(
    name: &'static str,
    label: &'static str,
    family: Family,
    stage: UciStage,
    design_action: &'static str,
) -> MetricInfo {
    MetricInfo {
        name,
        label,
        family,
        stage,
        design_action,
    }
}

use Family::*;
use UciStage::*;

const DELEGATION: &str =
    "Rework deferral rules and send high-stakes items to a person for the final call.";
const CONDITIONAL: &str = "Show known failure cases, surface reliability signals, mark zones where advice should be ignored, and demand a second look before high-stakes adoption.";
const CHANGES: &str = "Build practice items around edge conditions and what-if variants; move explanations so they stop prompting bad switches.";
const HELP_HARM: &str = "Fence off slices where advice does damage, restrict deferral there, and queue model fixes for them.";
const GOVERNANCE_EVENTS: &str =
    "Review contested decisions and make reversal and appeal routes clear.";

/// Every reported metric, in report order.
pub const MANIFEST: [MetricInfo; 30] = [
    m("acc_h0", "Human accuracy", Outcome, Improve, "Baseline only; interpret through team gain."),
    m("acc_ai", "AI accuracy", Outcome, Improve, "Baseline only; separates model quality from collaboration quality."),
    m("acc_team", "Team accuracy", Outcome, Improve, DELEGATION),
    m("team_gain_vs_human", "TeamGain vs. human", Outcome, Improve, DELEGATION),
    m("team_gain_vs_ai", "TeamGain vs. AI", Outcome, Improve, DELEGATION),
    m("acc_oracle", "Oracle best accuracy", Outcome, Improve, "Benchmark ceiling; a wide gap to team accuracy points at the collaboration, not the model."),
    m("regret_best", "Regret_best", Outcome, Improve, "Build practice sets from cases where a correct input was available yet the final decision missed."),
    m("accept_on_correct", "Accept-on-correct", Reliance, UnderstandControl, CONDITIONAL),
    m("accept_on_wrong", "Accept-on-wrong", Reliance, UnderstandControl, CONDITIONAL),
    m("reject_on_correct", "Reject-on-correct", Reliance, UnderstandControl, CONDITIONAL),
    m("reject_on_wrong", "Reject-on-wrong", Reliance, UnderstandControl, CONDITIONAL),
    m("changed", "Changed", Reliance, UnderstandControl, CHANGES),
    m("changed_to_right", "ChangedToRight", Reliance, UnderstandControl, CHANGES),
    m("changed_to_wrong", "ChangedToWrong", Reliance, UnderstandControl, CHANGES),
    m("reliance_slope", "Reliance slope", Reliance, Understand, "If flat, practise telling good advice from bad and make uncertainty easier to read."),
    m("intervention_latency", "Intervention latency (ms)", Reliance, Control, "Lower the cost of checking, insert a deliberate pause on risky items, and make overriding or escalating quicker."),
    m("update_asymmetry", "Local vs. global update", Reliance, Understand, "If the reaction to a failure fades, show failure patterns so the lesson reaches beyond the single case."),
    m("ai_help", "AI-help", Safety, ControlImprove, HELP_HARM),
    m("ai_harm", "AI-harm", Safety, ControlImprove, HELP_HARM),
    m("missed_help", "Missed-help", Safety, Understand, "Teach when advice is worth taking, with worked examples and confidence signals."),
    m("correct_ignore", "Correct-ignore", Safety, ControlImprove, HELP_HARM),
    m("near_miss_rate", "Near-miss rate", Safety, Control, "Require a second reviewer when high-stakes inputs disagree; escalate by risk tier."),
    m("rollback_rate", "Rollback rate", Safety, ControlImprove, GOVERNANCE_EVENTS),
    m("escalation_rate", "Escalation rate", Safety, ControlImprove, GOVERNANCE_EVENTS),
    m("contradiction_rate", "Rule-behavior contradiction", Safety, ControlImprove, "Find where required steps are skipped, make them visible in the workflow, and revise policy or training."),
    m("calibration_gap", "Calibration gap", Learning, Understand, "Return feedback on over- and under-confidence, using known failure modes."),
    m("slope_over_time", "Reliance slope over time", Learning, UnderstandImprove, "If discrimination does not improve across blocks, lengthen practice before go-live."),
    m("retention", "Retention", Learning, Improve, "Schedule refreshers and rework material whose effect fades between sessions."),
    m("transfer", "Transfer", Learning, Improve, "Refresh onboarding when the task or model changes, with regression checks on reliance and harm."),
    m("time_to_calibration", "Time-to-calibration", Learning, UnderstandImprove, "Size onboarding per person: stop once reliance stabilises, extend it for slow learners."),
];

pub fn info(name: &str) -> Option<&'static MetricInfo> {
    MANIFEST.iter().find(|m| m.name == name)
}
