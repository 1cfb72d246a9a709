//! Bundled reference data.
//!
//! * the nine-feature streaming example (one customer, unit efforts,
//!   capacity three) and its six trade-off plans;
//! * the per-stakeholder Kano scores of case-study feature F15;
//! * case-study plan tables and stakeholder rankings used by the analysis
//!   routines.

use crate::model::ReleaseConfig;
use crate::planning::ArpInstance;

/// Motivating example dataset with precomputed values.
pub const MOTIVATING_JSON: &str = include_str!("../fixtures/motivating.json");
/// Same example expressed as one-point responses of a single stakeholder.
pub const MOTIVATING_ONEPOINT_JSON: &str = include_str!("../fixtures/motivating_onepoint.json");
/// Step-2 Kano scores and weights of the 24 stakeholders for feature F15.
pub const F15_KANO_JSON: &str = include_str!("../fixtures/f15_kano.json");
/// Optimized plans per capacity, manager plans, printed differences and core set.
pub const CASE_STUDY_JSON: &str = include_str!("../fixtures/case_study.json");
pub const RANKINGS_SATISFACTION_CSV: &str = include_str!("../fixtures/rankings_satisfaction.csv");
pub const RANKINGS_DISSATISFACTION_CSV: &str = include_str!("../fixtures/rankings_dissatisfaction.csv");

/// `(S, DS)` of features F1..F9.
pub const MOTIVATING_VALUES: [(f64, f64); 9] = [
    (9.0, 1.0),
    (9.0, 2.0),
    (9.0, 3.0),
    (8.0, 4.0),
    (7.0, 7.0),
    (4.0, 8.0),
    (3.0, 9.0),
    (2.0, 9.0),
    (1.0, 9.0),
];

/// The six trade-off plans P1..P6 as `(offered ids, TS, TDS)`.
pub const MOTIVATING_PLANS: [(&[usize], f64, f64); 6] = [
    (&[7, 8, 9], 6.0, 25.0),
    (&[5, 7, 8], 12.0, 27.0),
    (&[5, 6, 7], 14.0, 28.0),
    (&[3, 4, 5], 24.0, 38.0),
    (&[2, 3, 5], 25.0, 40.0),
    (&[1, 2, 3], 27.0, 46.0),
];

/// Motivating example as a K = 1 instance with capacity three.
pub fn motivating_instance() -> ArpInstance {
    ArpInstance::from_values(
        &MOTIVATING_VALUES,
        &[1.0; 9],
        ReleaseConfig::single(3.0).expect("valid single-release config"),
    )
    .expect("valid motivating instance")
}
