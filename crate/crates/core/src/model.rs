//! Core domain types: features, stakeholders, release configuration, plans
//! and Pareto results.
//!
//! Feature ids are 1-based throughout. A plan's assignment stores the release
//! index of each feature, `1..=K` for delivered features and `K + 1` for
//! postponed ones.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{ArpError, DiscountVector, Result};

/// Tolerance applied to every capacity comparison.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// Tolerance used when comparing objective values (dominance, ties).
pub const OBJECTIVE_TOLERANCE: f64 = 1e-9;

/// A candidate feature with its effort and aggregated value scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub id: usize,
    pub name: String,
    pub effort: f64,
    /// Satisfaction created by offering the feature, S(n).
    pub sat_value: f64,
    /// Dissatisfaction caused by not offering it, DS(n).
    pub dissat_value: f64,
}

impl Feature {
    pub fn new(id: usize, name: impl Into<String>, effort: f64, sat: f64, dissat: f64) -> Result<Self> {
        let feature = Feature {
            id,
            name: name.into(),
            effort,
            sat_value: sat,
            dissat_value: dissat,
        };
        feature.validate()?;
        Ok(feature)
    }

    pub fn validate(&self) -> Result<()> {
        if self.id == 0 {
            return Err(ArpError::InvalidValue("feature ids are 1-based".into()));
        }
        if !(self.effort.is_finite() && self.effort >= 0.0) {
            return Err(ArpError::InvalidValue(format!(
                "feature {} effort must be a non-negative number, got {}",
                self.id, self.effort
            )));
        }
        for (label, v) in [("satisfaction", self.sat_value), ("dissatisfaction", self.dissat_value)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ArpError::InvalidValue(format!(
                    "feature {} {label} value must be non-negative, got {v}",
                    self.id
                )));
            }
        }
        Ok(())
    }
}

/// A stakeholder and their importance weight on a 0..=9 scale.
///
/// Weight zero removes the stakeholder from every weighted aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stakeholder {
    pub id: u32,
    pub weight: u8,
}

impl Stakeholder {
    pub const MAX_WEIGHT: u8 = 9;

    pub fn new(id: u32, weight: u8) -> Result<Self> {
        if weight > Self::MAX_WEIGHT {
            return Err(ArpError::InvalidValue(format!(
                "stakeholder {id} weight must be in 0..=9, got {weight}"
            )));
        }
        Ok(Stakeholder { id, weight })
    }

    pub fn is_active(&self) -> bool {
        self.weight > 0
    }
}

/// Release horizon: K capacities plus the satisfaction (w) and
/// dissatisfaction (z) discount vectors of length K + 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawReleaseConfig")]
pub struct ReleaseConfig {
    capacities: Vec<f64>,
    sat_discounts: Vec<f64>,
    dissat_discounts: Vec<f64>,
}

#[derive(Deserialize)]
struct RawReleaseConfig {
    capacities: Vec<f64>,
    #[serde(default)]
    sat_discounts: Option<Vec<f64>>,
    #[serde(default)]
    dissat_discounts: Option<Vec<f64>>,
}

impl TryFrom<RawReleaseConfig> for ReleaseConfig {
    type Error = ArpError;

    fn try_from(raw: RawReleaseConfig) -> Result<Self> {
        ReleaseConfig::with_optional_discounts(raw.capacities, raw.sat_discounts, raw.dissat_discounts)
    }
}

impl ReleaseConfig {
    /// Builds and validates a config from explicit discount vectors.
    pub fn new(capacities: Vec<f64>, sat_discounts: Vec<f64>, dissat_discounts: Vec<f64>) -> Result<Self> {
        validate_config(ReleaseConfig {
            capacities,
            sat_discounts,
            dissat_discounts,
        })
    }

    /// Single next release with the forced discounts w = (1, 0), z = (0, 1).
    pub fn single(capacity: f64) -> Result<Self> {
        Self::new(vec![capacity], vec![1.0, 0.0], vec![0.0, 1.0])
    }

    /// Discounts may be omitted only for K = 1.
    pub fn with_optional_discounts(
        capacities: Vec<f64>,
        sat_discounts: Option<Vec<f64>>,
        dissat_discounts: Option<Vec<f64>>,
    ) -> Result<Self> {
        let k = capacities.len();
        let fill = |given: Option<Vec<f64>>, default: [f64; 2], which: &str| match given {
            Some(v) => Ok(v),
            None if k == 1 => Ok(default.to_vec()),
            None => Err(ArpError::LengthMismatch(format!(
                "{which} discounts must be given explicitly when K = {k} > 1"
            ))),
        };
        let w = fill(sat_discounts, [1.0, 0.0], "satisfaction")?;
        let z = fill(dissat_discounts, [0.0, 1.0], "dissatisfaction")?;
        Self::new(capacities, w, z)
    }

    /// Number of releases K.
    pub fn releases(&self) -> usize {
        self.capacities.len()
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    /// w(1..=K+1)
    pub fn sat_discounts(&self) -> &[f64] {
        &self.sat_discounts
    }

    /// z(1..=K+1)
    pub fn dissat_discounts(&self) -> &[f64] {
        &self.dissat_discounts
    }

    /// Capacity of release `k` (1-based).
    pub fn capacity(&self, k: usize) -> f64 {
        self.capacities[k - 1]
    }

    /// w(k), 1-based.
    pub fn w(&self, k: usize) -> f64 {
        self.sat_discounts[k - 1]
    }

    /// z(k), 1-based.
    pub fn z(&self, k: usize) -> f64 {
        self.dissat_discounts[k - 1]
    }

    /// Same discounts, new capacities. The count must match K.
    pub fn with_capacities(&self, capacities: Vec<f64>) -> Result<Self> {
        Self::new(capacities, self.sat_discounts.clone(), self.dissat_discounts.clone())
    }
}

/// Checks every boundary and strict-monotonicity condition on a config.
pub fn validate_config(config: ReleaseConfig) -> Result<ReleaseConfig> {
    let k = config.capacities.len();
    if k == 0 {
        return Err(ArpError::LengthMismatch("at least one release is required".into()));
    }
    for (vector, v) in [
        (DiscountVector::Satisfaction, &config.sat_discounts),
        (DiscountVector::Dissatisfaction, &config.dissat_discounts),
    ] {
        if v.len() != k + 1 {
            return Err(ArpError::LengthMismatch(format!(
                "{vector} need K + 1 = {} entries, got {}",
                k + 1,
                v.len()
            )));
        }
    }
    for (k_idx, &cap) in config.capacities.iter().enumerate() {
        if !(cap.is_finite() && cap >= 0.0) {
            return Err(ArpError::InvalidValue(format!(
                "capacity of release {} must be non-negative, got {cap}",
                k_idx + 1
            )));
        }
    }

    let w = &config.sat_discounts;
    let z = &config.dissat_discounts;
    if w.iter().chain(z.iter()).any(|x| !x.is_finite()) {
        return Err(ArpError::InvalidValue("discounts must be finite".into()));
    }
    let boundary = |vector, detail: String| Err(ArpError::BoundaryViolation { vector, detail });
    if w[0] != 1.0 {
        return boundary(DiscountVector::Satisfaction, format!("w(1) must be 1, got {}", w[0]));
    }
    if w[k] != 0.0 {
        return boundary(DiscountVector::Satisfaction, format!("w(K+1) must be 0, got {}", w[k]));
    }
    if z[0] != 0.0 {
        return boundary(DiscountVector::Dissatisfaction, format!("z(1) must be 0, got {}", z[0]));
    }
    if z[k] != 1.0 {
        return boundary(DiscountVector::Dissatisfaction, format!("z(K+1) must be 1, got {}", z[k]));
    }
    for i in 0..k {
        if w[i] <= w[i + 1] {
            return Err(ArpError::MonotonicityViolation {
                vector: DiscountVector::Satisfaction,
                index: i + 1,
            });
        }
        if z[i] >= z[i + 1] {
            return Err(ArpError::MonotonicityViolation {
                vector: DiscountVector::Dissatisfaction,
                index: i + 1,
            });
        }
    }
    Ok(config)
}

/// The two objective values of a plan: total satisfaction (maximized) and
/// total dissatisfaction (minimized).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    pub ts: f64,
    pub tds: f64,
}

impl Objectives {
    pub fn new(ts: f64, tds: f64) -> Self {
        Objectives { ts, tds }
    }

    /// Equal on both objectives within [`OBJECTIVE_TOLERANCE`].
    pub fn approx_eq(&self, other: &Objectives) -> bool {
        (self.ts - other.ts).abs() <= OBJECTIVE_TOLERANCE && (self.tds - other.tds).abs() <= OBJECTIVE_TOLERANCE
    }
}

/// A release plan with cached objective values and per-release effort.
///
/// Build one through [`Plan::evaluate`](crate::planning::ArpInstance::evaluate)
/// so the cached values always match the assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub(crate) assignment: Vec<usize>,
    pub(crate) releases: usize,
    pub(crate) total_satisfaction: f64,
    pub(crate) total_dissatisfaction: f64,
    pub(crate) effort_used: Vec<f64>,
}

impl Plan {
    /// Release index per feature (position `i` is feature id `i + 1`).
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Number of releases K the plan was built for.
    pub fn releases(&self) -> usize {
        self.releases
    }

    pub fn total_satisfaction(&self) -> f64 {
        self.total_satisfaction
    }

    pub fn total_dissatisfaction(&self) -> f64 {
        self.total_dissatisfaction
    }

    pub fn objectives(&self) -> Objectives {
        Objectives::new(self.total_satisfaction, self.total_dissatisfaction)
    }

    /// Effort consumed in each release 1..=K.
    pub fn effort_used(&self) -> &[f64] {
        &self.effort_used
    }

    pub fn total_effort(&self) -> f64 {
        self.effort_used.iter().sum()
    }

    /// Ids of the features delivered in one of the K releases.
    pub fn offered(&self) -> BTreeSet<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &x)| x <= self.releases)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Ids of the features assigned to release `k`.
    pub fn features_in_release(&self, k: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == k)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// A closed interval of swept alpha values over which a plan stayed optimal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityInterval {
    pub lo: f64,
    pub hi: f64,
    /// Grid indices of the interval endpoints (inclusive).
    pub first_index: usize,
    pub last_index: usize,
}

impl StabilityInterval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoEntry {
    pub plan: Plan,
    pub stability: Vec<StabilityInterval>,
}

/// The trade-off plans found by a sweep, in order of first appearance on
/// the alpha grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoResult {
    pub entries: Vec<ParetoEntry>,
    pub alpha_grid: Vec<f64>,
}

impl ParetoResult {
    pub fn plans(&self) -> Vec<Plan> {
        self.entries.iter().map(|e| e.plan.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
