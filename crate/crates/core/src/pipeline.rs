//! End-to-end operations shared by the command line and the HTTP service.
//! Both front ends serialize these outputs with [`crate::dataio::to_json`],
//! so identical requests yield identical bytes.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::baselines::{classify_vs_reference, random_baseline, Classification, DominanceStats, HeuristicSpec, Label};
use crate::dataio::{Dataset, Valuation};
use crate::error::{ArpError, Result};
use crate::model::{ParetoResult, Plan, ReleaseConfig, StabilityInterval};
use crate::planning::ArpInstance;
use crate::solver::{solve_scalarized, SolveReport};
use crate::sweep::{sdo_sweep, SweepConfig, DEFAULT_STEP};
use crate::valuation::{FeatureKanoProfile, FeatureValues, KanoAttribute};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

pub const DEFAULT_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Discounts {
    #[serde(default)]
    pub sat: Option<Vec<f64>>,
    #[serde(default)]
    pub dissat: Option<Vec<f64>>,
}

/// Release overrides; unset parts fall back to the dataset's release block.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReleaseOverrides {
    #[serde(default)]
    pub capacities: Option<Vec<f64>>,
    #[serde(default)]
    pub discounts: Option<Discounts>,
}

impl ReleaseOverrides {
    /// Discount vectors from the dataset are reused only when its release
    /// count matches the requested capacities.
    pub fn resolve(&self, dataset: &Dataset) -> Result<ReleaseConfig> {
        let base = dataset.release();
        let capacities = match (&self.capacities, base) {
            (Some(c), _) => c.clone(),
            (None, Some(b)) => b.capacities().to_vec(),
            (None, None) => {
                return Err(ArpError::InvalidValue(
                    "no capacities given and the dataset has no release block".into(),
                ))
            }
        };
        let same_k = base.filter(|b| b.releases() == capacities.len());
        let given = self.discounts.clone().unwrap_or_default();
        let sat = given.sat.or_else(|| same_k.map(|b| b.sat_discounts().to_vec()));
        let dissat = given.dissat.or_else(|| same_k.map(|b| b.dissat_discounts().to_vec()));
        ReleaseConfig::with_optional_discounts(capacities, sat, dissat)
    }
}

/// A plan as presented to users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub plan_id: String,
    /// Offered feature ids.
    pub features: Vec<usize>,
    /// Release per feature (`K + 1` = postponed).
    pub assignment: Vec<usize>,
    pub ts: f64,
    pub tds: f64,
    /// Effort used per release.
    pub effort: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stability: Vec<StabilityInterval>,
}

impl PlanSummary {
    pub fn new(plan_id: impl Into<String>, plan: &Plan, stability: Vec<StabilityInterval>) -> Self {
        PlanSummary {
            plan_id: plan_id.into(),
            features: plan.offered().into_iter().collect(),
            assignment: plan.assignment().to_vec(),
            ts: plan.total_satisfaction(),
            tds: plan.total_dissatisfaction(),
            effort: plan.effort_used().to_vec(),
            stability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureView {
    pub id: usize,
    pub name: String,
    pub effort: f64,
    pub satisfaction: f64,
    pub dissatisfaction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kano: Option<FeatureKanoProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dominant_attribute: Option<KanoAttribute>,
}

/// Per-feature values and, for Kano data, attribute profiles.
pub fn feature_table(dataset: &Dataset) -> Result<Vec<FeatureView>> {
    let valuation = dataset.valuate()?;
    let profiles: BTreeMap<usize, FeatureKanoProfile> = valuation
        .kano_profiles
        .iter()
        .flatten()
        .map(|p| (p.feature_id, *p))
        .collect();
    let values: BTreeMap<usize, FeatureValues> = valuation.values.iter().map(|v| (v.feature_id, *v)).collect();
    Ok(dataset
        .features()
        .iter()
        .map(|f| {
            let v = values[&f.id];
            let kano = profiles.get(&f.id).copied();
            FeatureView {
                id: f.id,
                name: f.name.clone(),
                effort: f.effort,
                satisfaction: v.satisfaction,
                dissatisfaction: v.dissatisfaction,
                dominant_attribute: kano.map(|k| k.dominant_attribute()),
                kano,
            }
        })
        .collect())
}

pub fn valuate(dataset: &Dataset) -> Result<Valuation> {
    dataset.valuate()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveRequest {
    #[serde(flatten)]
    pub release: ReleaseOverrides,
    #[serde(default)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub config: ReleaseConfig,
    pub step: f64,
    pub values: Vec<FeatureValues>,
    pub plans: Vec<PlanSummary>,
    pub breakpoints: Vec<f64>,
    pub alpha_grid: Vec<f64>,
}

impl SolveOutput {
    pub fn plans(&self, instance: &ArpInstance) -> Result<Vec<Plan>> {
        self.plans.iter().map(|p| instance.evaluate(p.assignment.clone())).collect()
    }
}

/// Runs the alpha sweep and returns the trade-off plans.
pub fn solve(dataset: &Dataset, request: &SolveRequest, threads: Option<usize>) -> Result<(ArpInstance, ParetoResult, SolveOutput)> {
    let config = request.release.resolve(dataset)?;
    let values = dataset.valuate()?.values;
    let instance = dataset.instance_with(&values, config.clone())?;
    let step = request.step.unwrap_or(DEFAULT_STEP);
    let sweep = SweepConfig { step, threads };
    sweep.validate()?;
    let result = sdo_sweep(&instance, &sweep)?;
    let breakpoints = if result.len() >= 2 {
        crate::sweep::exact_breakpoints(&result).unwrap_or_default()
    } else {
        Vec::new()
    };
    let output = SolveOutput {
        config,
        step,
        values,
        plans: result
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| PlanSummary::new(format!("P{}", i + 1), &e.plan, e.stability.clone()))
            .collect(),
        breakpoints,
        alpha_grid: result.alpha_grid.clone(),
    };
    Ok((instance, result, output))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WhatIfRequest {
    #[serde(flatten)]
    pub release: ReleaseOverrides,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub stakeholder_weight_overrides: Option<BTreeMap<u32, u8>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIfOutput {
    pub alpha: f64,
    pub objective: f64,
    pub nodes_explored: u64,
    pub proven_optimal: bool,
    pub plan: PlanSummary,
    pub values: Vec<FeatureValues>,
}

/// One exact solve at a single alpha, optionally after re-weighting
/// stakeholders.
pub fn whatif(dataset: &Dataset, request: &WhatIfRequest) -> Result<WhatIfOutput> {
    let reweighted;
    let dataset = match &request.stakeholder_weight_overrides {
        Some(o) if !o.is_empty() => {
            reweighted = dataset.with_weight_overrides(o)?;
            &reweighted
        }
        _ => dataset,
    };
    let config = request.release.resolve(dataset)?;
    let values = dataset.valuate()?.values;
    let instance = dataset.instance_with(&values, config)?;
    let report = solve_scalarized(&instance, request.alpha.unwrap_or(DEFAULT_ALPHA))?;
    Ok(whatif_output(report, values))
}

fn whatif_output(report: SolveReport, values: Vec<FeatureValues>) -> WhatIfOutput {
    WhatIfOutput {
        alpha: report.alpha,
        objective: report.objective,
        nodes_explored: report.nodes_explored,
        proven_optimal: report.proven_optimal,
        plan: PlanSummary::new("P1", &report.plan, Vec::new()),
        values,
    }
}

/// Looks up H1..H8 by id (case-insensitive).
pub fn heuristic_by_id(id: &str) -> Result<HeuristicSpec> {
    HeuristicSpec::standard()
        .into_iter()
        .find(|h| h.id.eq_ignore_ascii_case(id.trim()))
        .ok_or_else(|| ArpError::InvalidValue(format!("unknown heuristic '{id}', expected H1..H8")))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BaselineRequest {
    #[serde(flatten)]
    pub release: ReleaseOverrides,
    /// Heuristic ids; all eight when absent.
    #[serde(default)]
    pub heuristics: Option<Vec<String>>,
    /// Random replications; none when absent or zero.
    #[serde(default)]
    pub random_reps: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Sweep step for the reference when no reference plans are supplied.
    #[serde(default)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicOutcome {
    pub id: String,
    pub plan: PlanSummary,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomOutcome {
    pub replications: usize,
    pub seed: u64,
    pub stats: DominanceStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineOutput {
    pub reference: Vec<PlanSummary>,
    pub heuristics: Vec<HeuristicOutcome>,
    pub classification: Classification,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomOutcome>,
}

/// Runs heuristics (and optionally random search) and classifies them
/// against `reference`, or against a fresh sweep when `reference` is `None`.
pub fn baselines(
    dataset: &Dataset,
    request: &BaselineRequest,
    reference: Option<&[PlanSummary]>,
    threads: Option<usize>,
) -> Result<BaselineOutput> {
    let config = request.release.resolve(dataset)?;
    let values = dataset.valuate()?.values;
    let instance = dataset.instance_with(&values, config)?;
    let reference: Vec<PlanSummary> = match reference {
        Some(r) => r.to_vec(),
        None => {
            let solve_request = SolveRequest {
                release: request.release.clone(),
                step: request.step,
            };
            solve(dataset, &solve_request, threads)?.2.plans
        }
    };
    let reference_plans: Vec<Plan> = reference
        .iter()
        .map(|p| instance.evaluate(p.assignment.clone()))
        .collect::<Result<_>>()
        .map_err(|e| ArpError::InstanceMismatch(format!("reference plans do not fit this configuration: {e}")))?;

    let specs: Vec<HeuristicSpec> = match &request.heuristics {
        Some(ids) => ids.iter().map(|id| heuristic_by_id(id)).collect::<Result<_>>()?,
        None => HeuristicSpec::standard(),
    };
    let plans: Vec<Plan> = specs.iter().map(|h| h.run(&instance)).collect::<Result<_>>()?;
    let classification = classify_vs_reference(&plans, &reference_plans)?;
    let heuristics = specs
        .iter()
        .zip(&plans)
        .zip(&classification.labels)
        .map(|((h, p), l)| HeuristicOutcome {
            id: h.id.clone(),
            plan: PlanSummary::new(h.id.clone(), p, Vec::new()),
            label: *l,
        })
        .collect();
    let random = match request.random_reps {
        Some(n) if n > 0 => {
            let seed = request.seed.unwrap_or(DEFAULT_SEED);
            let (_, stats) = random_baseline(&instance, n, seed, &reference_plans)?;
            Some(RandomOutcome {
                replications: n,
                seed,
                stats,
            })
        }
        _ => None,
    };
    Ok(BaselineOutput {
        reference,
        heuristics,
        classification,
        random,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{parse_dataset_json, to_json};
    use crate::fixtures;

    fn motivating() -> Dataset {
        parse_dataset_json(fixtures::MOTIVATING_JSON).unwrap()
    }

    #[test]
    fn solve_uses_embedded_release() {
        let (_, result, out) = solve(&motivating(), &SolveRequest::default(), None).unwrap();
        assert_eq!(result.len(), 6);
        assert_eq!(out.plans[5].features, vec![1, 2, 3]);
        assert_eq!(out.breakpoints.len(), 5);
        assert_eq!(out.alpha_grid.len(), 999);
    }

    #[test]
    fn overrides_resolve() {
        let ds = motivating();
        let o = ReleaseOverrides {
            capacities: Some(vec![2.0, 2.0]),
            discounts: None,
        };
        assert_eq!(o.resolve(&ds).unwrap_err().code(), "LENGTH_MISMATCH");
        let o = ReleaseOverrides {
            capacities: Some(vec![2.0, 2.0]),
            discounts: Some(Discounts {
                sat: Some(vec![1.0, 0.5, 0.0]),
                dissat: Some(vec![0.0, 0.5, 1.0]),
            }),
        };
        assert_eq!(o.resolve(&ds).unwrap().releases(), 2);
        let o = ReleaseOverrides {
            capacities: Some(vec![5.0]),
            discounts: None,
        };
        assert_eq!(o.resolve(&ds).unwrap().capacity(1), 5.0);
    }

    #[test]
    fn whatif_examples() {
        let ds = motivating();
        let req = WhatIfRequest {
            alpha: Some(0.9),
            ..Default::default()
        };
        assert_eq!(whatif(&ds, &req).unwrap().plan.features, vec![1, 2, 3]);
        let default_alpha = whatif(&ds, &WhatIfRequest::default()).unwrap();
        assert_eq!(default_alpha.alpha, 0.5);
        let req = WhatIfRequest {
            stakeholder_weight_overrides: Some(BTreeMap::from([(1, 3)])),
            ..Default::default()
        };
        assert!(whatif(&ds, &req).is_err());
        let op = parse_dataset_json(fixtures::MOTIVATING_ONEPOINT_JSON).unwrap();
        let out = whatif(&op, &req).unwrap();
        assert_eq!(out.plan, default_alpha.plan);
    }

    #[test]
    fn baselines_against_fresh_sweep() {
        let ds = motivating();
        let req = BaselineRequest {
            random_reps: Some(100),
            step: Some(0.01),
            ..Default::default()
        };
        let out = baselines(&ds, &req, None, None).unwrap();
        assert_eq!(out.heuristics.len(), 8);
        assert_eq!(out.heuristics[0].plan.features, vec![1, 2, 3]);
        assert_eq!(out.heuristics[0].label, Label::Identical);
        assert_eq!(out.random.as_ref().unwrap().stats.points.len(), 100);
        assert_eq!(to_json(&out), to_json(&baselines(&ds, &req, None, None).unwrap()));
        let one = BaselineRequest {
            heuristics: Some(vec!["h7".into()]),
            ..Default::default()
        };
        let out = baselines(&ds, &one, Some(&out.reference), None).unwrap();
        assert_eq!(out.heuristics[0].plan.features, vec![1, 2, 7]);
        assert_eq!(out.heuristics[0].label, Label::Dominated);
        assert!(heuristic_by_id("H9").is_err());
    }

    #[test]
    fn feature_table_for_kano_and_precomputed() {
        let rows = feature_table(&motivating()).unwrap();
        assert_eq!(rows.len(), 9);
        assert!(rows[0].kano.is_none());
        assert_eq!((rows[4].satisfaction, rows[4].dissatisfaction), (7.0, 7.0));
    }
}
