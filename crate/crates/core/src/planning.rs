//! Objective functions, feasibility and dominance over release plans.

use serde::{Deserialize, Serialize};

use crate::error::{ArpError, Result};
use crate::model::{Feature, Objectives, Plan, ReleaseConfig, FEASIBILITY_TOLERANCE, OBJECTIVE_TOLERANCE};

/// Features with their values plus the release configuration.
///
/// Feature `i` of the list must carry id `i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArpInstance {
    features: Vec<Feature>,
    config: ReleaseConfig,
}

impl ArpInstance {
    pub fn new(features: Vec<Feature>, config: ReleaseConfig) -> Result<Self> {
        if features.is_empty() {
            return Err(ArpError::EmptyInstance);
        }
        for (i, f) in features.iter().enumerate() {
            f.validate()?;
            if f.id != i + 1 {
                return Err(ArpError::IndexOutOfRange(format!(
                    "feature at position {} has id {}, expected {}",
                    i + 1,
                    f.id,
                    i + 1
                )));
            }
        }
        Ok(ArpInstance { features, config })
    }

    /// Instance from `(S, DS)` pairs and efforts, naming features `F1..FN`.
    pub fn from_values(values: &[(f64, f64)], efforts: &[f64], config: ReleaseConfig) -> Result<Self> {
        if values.len() != efforts.len() {
            return Err(ArpError::LengthMismatch(format!(
                "{} value pairs but {} efforts",
                values.len(),
                efforts.len()
            )));
        }
        let features = values
            .iter()
            .zip(efforts)
            .enumerate()
            .map(|(i, (&(s, ds), &e))| Feature::new(i + 1, format!("F{}", i + 1), e, s, ds))
            .collect::<Result<Vec<_>>>()?;
        Self::new(features, config)
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn config(&self) -> &ReleaseConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn releases(&self) -> usize {
        self.config.releases()
    }

    /// Same features under a different release configuration.
    pub fn with_config(&self, config: ReleaseConfig) -> Self {
        ArpInstance {
            features: self.features.clone(),
            config,
        }
    }

    fn check_assignment(&self, assignment: &[usize]) -> Result<()> {
        if assignment.len() != self.features.len() {
            return Err(ArpError::IndexOutOfRange(format!(
                "assignment covers {} features, instance has {}",
                assignment.len(),
                self.features.len()
            )));
        }
        let postponed = self.releases() + 1;
        if let Some((i, &x)) = assignment.iter().enumerate().find(|(_, &x)| x == 0 || x > postponed) {
            return Err(ArpError::IndexOutOfRange(format!(
                "feature {} assigned to release {x}, valid range is 1..={postponed}",
                i + 1
            )));
        }
        Ok(())
    }

    /// Builds a plan, caching TS, TDS and per-release effort.
    pub fn evaluate(&self, assignment: Vec<usize>) -> Result<Plan> {
        self.check_assignment(&assignment)?;
        let k = self.releases();
        let mut effort_used = vec![0.0; k];
        for (f, &x) in self.features.iter().zip(&assignment) {
            if x <= k {
                effort_used[x - 1] += f.effort;
            }
        }
        Ok(Plan {
            total_satisfaction: satisfaction_sum(self, &assignment),
            total_dissatisfaction: dissatisfaction_sum(self, &assignment),
            assignment,
            releases: k,
            effort_used,
        })
    }

    /// Single-release plan offering exactly the given feature ids.
    pub fn plan_from_offered(&self, offered: &[usize]) -> Result<Plan> {
        let k = self.releases();
        let mut assignment = vec![k + 1; self.len()];
        for &id in offered {
            if id == 0 || id > self.len() {
                return Err(ArpError::IndexOutOfRange(format!("no feature with id {id}")));
            }
            assignment[id - 1] = 1;
        }
        self.evaluate(assignment)
    }

    /// The plan postponing every feature.
    pub fn empty_plan(&self) -> Plan {
        self.evaluate(vec![self.releases() + 1; self.len()])
            .expect("postponing everything is always a valid assignment")
    }

    /// Recomputes TS/TDS/effort and compares them with the plan's cache.
    pub fn verify(&self, plan: &Plan) -> Result<()> {
        let fresh = self.evaluate(plan.assignment.clone())?;
        let consistent = plan.releases == fresh.releases
            && (plan.total_satisfaction - fresh.total_satisfaction).abs() <= 1e-9
            && (plan.total_dissatisfaction - fresh.total_dissatisfaction).abs() <= 1e-9
            && plan.effort_used.len() == fresh.effort_used.len()
            && plan
                .effort_used
                .iter()
                .zip(&fresh.effort_used)
                .all(|(a, b)| (a - b).abs() <= 1e-9);
        if consistent {
            Ok(())
        } else {
            Err(ArpError::InstanceMismatch(
                "cached plan values disagree with the instance".into(),
            ))
        }
    }
}

fn satisfaction_sum(instance: &ArpInstance, assignment: &[usize]) -> f64 {
    let k = instance.releases();
    instance
        .features
        .iter()
        .zip(assignment)
        .filter(|(_, &x)| x <= k)
        .map(|(f, &x)| instance.config.w(x) * f.sat_value)
        .sum()
}

fn dissatisfaction_sum(instance: &ArpInstance, assignment: &[usize]) -> f64 {
    instance
        .features
        .iter()
        .zip(assignment)
        .map(|(f, &x)| instance.config.z(x) * f.dissat_value)
        .sum()
}

/// TS = sum over delivered features of w(x(n)) * S(n).
pub fn total_satisfaction(plan: &Plan, instance: &ArpInstance) -> Result<f64> {
    instance.check_assignment(&plan.assignment)?;
    Ok(satisfaction_sum(instance, &plan.assignment))
}

/// TDS = sum over all features of z(x(n)) * DS(n).
pub fn total_dissatisfaction(plan: &Plan, instance: &ArpInstance) -> Result<f64> {
    instance.check_assignment(&plan.assignment)?;
    Ok(dissatisfaction_sum(instance, &plan.assignment))
}

/// Every release's effort fits its capacity (within [`FEASIBILITY_TOLERANCE`]).
pub fn is_feasible(plan: &Plan, instance: &ArpInstance) -> bool {
    if instance.check_assignment(&plan.assignment).is_err() {
        return false;
    }
    let k = instance.releases();
    let mut used = vec![0.0; k];
    for (f, &x) in instance.features.iter().zip(&plan.assignment) {
        if x <= k {
            used[x - 1] += f.effort;
        }
    }
    used.iter()
        .enumerate()
        .all(|(i, &u)| u <= instance.config.capacities()[i] + FEASIBILITY_TOLERANCE)
}

/// `a` dominates `b`: no worse on both objectives and not equal.
///
/// Comparisons use [`OBJECTIVE_TOLERANCE`], so values closer than that
/// count as equal.
pub fn dominates(a: Objectives, b: Objectives) -> bool {
    a.ts >= b.ts - OBJECTIVE_TOLERANCE && a.tds <= b.tds + OBJECTIVE_TOLERANCE && !a.approx_eq(&b)
}

/// Keeps the plans not dominated by any other input plan. Plans with equal
/// objective values but different assignments are all kept; identical
/// assignments collapse to the first occurrence.
pub fn pareto_filter(plans: Vec<Plan>) -> Vec<Plan> {
    let mut unique: Vec<Plan> = Vec::with_capacity(plans.len());
    for p in plans {
        if !unique.iter().any(|u| u.assignment == p.assignment) {
            unique.push(p);
        }
    }
    let objectives: Vec<Objectives> = unique.iter().map(Plan::objectives).collect();
    unique
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !objectives.iter().any(|o| dominates(*o, objectives[*i])))
        .map(|(_, p)| p)
        .collect()
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(ArpError::AlphaOutOfRange(alpha))
    }
}

/// G(x, alpha) = alpha * TS + (alpha - 1) * TDS.
pub fn scalarized_objective(plan: &Plan, instance: &ArpInstance, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let ts = total_satisfaction(plan, instance)?;
    let tds = total_dissatisfaction(plan, instance)?;
    Ok(scalarize(Objectives::new(ts, tds), alpha))
}

pub(crate) fn scalarize(o: Objectives, alpha: f64) -> f64 {
    alpha * o.ts + (alpha - 1.0) * o.tds
}
