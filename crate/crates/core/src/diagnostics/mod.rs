//! Checks of observed statistics against a declared causal structure.

mod metrics;
mod report;
mod scenario;

pub use metrics::{
    classify, fit_convex_mixture, statistical_threshold, tv, tv_distance, two_sample_threshold,
    Classification, ConvexFitResult, EPS_EXACT,
};
pub use report::{
    emit_report, Check, ControlSetting, DeltaCd, DeltaCdEntry, DiagnosticReport, Mode, Rule,
    Verdict, MASS_FLOOR,
};
pub use scenario::{
    preset, CausalScenario, ControlRole, DeclaredStructure, Generator, InterventionPair,
    ScenarioFile, PRESET_NAMES,
};
