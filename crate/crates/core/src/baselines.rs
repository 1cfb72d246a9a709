//! Single-release comparison baselines: random selection, one- and
//! two-factor greedy heuristics, and classification of their plans against
//! a reference set of trade-off plans.
//!
//! All rankings are descending by factor value with ties broken by
//! ascending feature id. A feature fits when its effort is at most the
//! remaining capacity plus [`FEASIBILITY_TOLERANCE`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{ArpError, Result};
use crate::model::{Feature, Objectives, Plan, FEASIBILITY_TOLERANCE};
use crate::planning::{dominates, ArpInstance};

fn require_single_release(instance: &ArpInstance) -> Result<()> {
    match instance.releases() {
        1 => Ok(()),
        k => Err(ArpError::UnsupportedReleaseCount(k)),
    }
}

/// One random plan: repeatedly draws uniformly among the unselected
/// features that still fit, until none fits.
pub fn random_plan(instance: &ArpInstance, seed: u64) -> Result<Plan> {
    require_single_release(instance)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining = instance.config().capacity(1);
    let mut selected = vec![false; instance.len()];
    loop {
        let candidates: Vec<&Feature> = instance
            .features()
            .iter()
            .filter(|f| !selected[f.id - 1] && f.effort <= remaining + FEASIBILITY_TOLERANCE)
            .collect();
        if candidates.is_empty() {
            break;
        }
        let f = candidates[rng.random_range(0..candidates.len())];
        selected[f.id - 1] = true;
        remaining -= f.effort;
    }
    let ids: Vec<usize> = (1..=instance.len()).filter(|&id| selected[id - 1]).collect();
    instance.plan_from_offered(&ids)
}

/// Where a random plan stands relative to the closest dominating reference
/// plan. Percentages follow the manual-plan comparison convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomGap {
    pub random_index: usize,
    pub reference_index: usize,
    /// `(TS_ref - TS_rand) / TS_rand * 100`.
    pub satisfaction_pct: f64,
    /// `(TDS_rand - TDS_ref) / TDS_ref * 100`.
    pub dissatisfaction_pct: f64,
}

impl RandomGap {
    pub fn total_pct(&self) -> f64 {
        self.satisfaction_pct + self.dissatisfaction_pct
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceStats {
    pub points: Vec<Objectives>,
    /// Points strictly dominated by some reference plan.
    pub dominated: usize,
    /// Points matching some reference plan's objectives.
    pub equal: usize,
    /// Points that dominate at least one reference plan.
    pub dominating: usize,
    /// Among dominated points, the one whose strongest dominator beats it
    /// by the smallest combined margin.
    pub best_gap: Option<RandomGap>,
}

impl DominanceStats {
    pub fn dominated_fraction(&self) -> f64 {
        self.dominated as f64 / self.points.len() as f64
    }

    pub fn dominated_or_equal_fraction(&self) -> f64 {
        (self.dominated + self.equal) as f64 / self.points.len() as f64
    }
}

fn gap(random: Objectives, reference: Objectives) -> Option<(f64, f64)> {
    if random.ts == 0.0 || reference.tds == 0.0 {
        return None;
    }
    Some((
        (reference.ts - random.ts) / random.ts * 100.0,
        (random.tds - reference.tds) / reference.tds * 100.0,
    ))
}

/// Compares arbitrary objective points against reference plans.
pub fn dominance_stats(points: Vec<Objectives>, reference: &[Plan]) -> Result<DominanceStats> {
    if points.is_empty() {
        return Err(ArpError::InvalidValue("no points to compare".into()));
    }
    let refs: Vec<Objectives> = reference.iter().map(Plan::objectives).collect();
    let mut stats = DominanceStats {
        points: Vec::new(),
        dominated: 0,
        equal: 0,
        dominating: 0,
        best_gap: None,
    };
    for (i, &p) in points.iter().enumerate() {
        if refs.iter().any(|r| dominates(*r, p)) {
            stats.dominated += 1;
        } else if refs.iter().any(|r| r.approx_eq(&p)) {
            stats.equal += 1;
        }
        if refs.iter().any(|r| dominates(p, *r)) {
            stats.dominating += 1;
        }
        let strongest = refs
            .iter()
            .enumerate()
            .filter(|(_, r)| dominates(**r, p))
            .filter_map(|(j, r)| {
                gap(p, *r).map(|(s, d)| RandomGap {
                    random_index: i,
                    reference_index: j,
                    satisfaction_pct: s,
                    dissatisfaction_pct: d,
                })
            })
            .max_by(|a, b| a.total_pct().total_cmp(&b.total_pct()));
        if let Some(g) = strongest {
            if stats.best_gap.is_none_or(|b| g.total_pct() < b.total_pct()) {
                stats.best_gap = Some(g);
            }
        }
    }
    stats.points = points;
    Ok(stats)
}

/// Runs `replications` random plans with seeds `seed, seed + 1, ...` and
/// compares them against `reference`.
pub fn random_baseline(
    instance: &ArpInstance,
    replications: usize,
    seed: u64,
    reference: &[Plan],
) -> Result<(Vec<Plan>, DominanceStats)> {
    require_single_release(instance)?;
    if replications == 0 {
        return Err(ArpError::InvalidValue("replications must be at least 1".into()));
    }
    let plans: Vec<Plan> = (0..replications as u64)
        .into_par_iter()
        .map(|i| random_plan(instance, seed.wrapping_add(i)))
        .collect::<Result<_>>()?;
    let stats = dominance_stats(plans.iter().map(Plan::objectives).collect(), reference)?;
    Ok((plans, stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Factor {
    Sat,
    Dissat,
    SatPerEffort,
    DissatPerEffort,
    SatPlusDissat,
    SumPerEffort,
}

impl Factor {
    pub const ALL: [Factor; 6] = [
        Factor::Sat,
        Factor::Dissat,
        Factor::SatPerEffort,
        Factor::DissatPerEffort,
        Factor::SatPlusDissat,
        Factor::SumPerEffort,
    ];

    pub fn is_ratio(self) -> bool {
        matches!(self, Factor::SatPerEffort | Factor::DissatPerEffort | Factor::SumPerEffort)
    }

    pub fn value(self, f: &Feature) -> Result<f64> {
        if self.is_ratio() && f.effort == 0.0 {
            return Err(ArpError::ZeroEffortWithRatioFactor(f.id));
        }
        Ok(match self {
            Factor::Sat => f.sat_value,
            Factor::Dissat => f.dissat_value,
            Factor::SatPerEffort => f.sat_value / f.effort,
            Factor::DissatPerEffort => f.dissat_value / f.effort,
            Factor::SatPlusDissat => f.sat_value + f.dissat_value,
            Factor::SumPerEffort => (f.sat_value + f.dissat_value) / f.effort,
        })
    }
}

impl std::str::FromStr for Factor {
    type Err = ArpError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Ok(match norm.as_str() {
            "SAT" | "SATISFACTION" => Factor::Sat,
            "DISSAT" | "DISSATISFACTION" => Factor::Dissat,
            "SAT_PER_EFFORT" | "SATISFACTION_PER_EFFORT" => Factor::SatPerEffort,
            "DISSAT_PER_EFFORT" | "DISSATISFACTION_PER_EFFORT" => Factor::DissatPerEffort,
            "SAT_PLUS_DISSAT" | "SATISFACTION_PLUS_DISSATISFACTION" => Factor::SatPlusDissat,
            "SUM_PER_EFFORT" => Factor::SumPerEffort,
            _ => return Err(ArpError::InvalidValue(format!("unknown factor '{s}'"))),
        })
    }
}

/// Feature ids by decreasing factor value, ties by ascending id.
pub fn ranking(instance: &ArpInstance, factor: Factor) -> Result<Vec<usize>> {
    let mut keyed: Vec<(f64, usize)> = instance
        .features()
        .iter()
        .map(|f| factor.value(f).map(|v| (v, f.id)))
        .collect::<Result<_>>()?;
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(keyed.into_iter().map(|(_, id)| id).collect())
}

fn greedy_fill(instance: &ArpInstance, order: &[usize]) -> Result<Plan> {
    let mut remaining = instance.config().capacity(1);
    let mut chosen = Vec::new();
    for &id in order {
        let effort = instance.features()[id - 1].effort;
        if effort <= remaining + FEASIBILITY_TOLERANCE {
            chosen.push(id);
            remaining -= effort;
        }
    }
    chosen.sort_unstable();
    instance.plan_from_offered(&chosen)
}

pub fn greedy_one_factor(instance: &ArpInstance, factor: Factor) -> Result<Plan> {
    require_single_release(instance)?;
    greedy_fill(instance, &ranking(instance, factor)?)
}

/// Alternates `a[0], b[0], a[1], b[1], ...`, skipping ids already taken.
pub fn merge_alternating(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    let mut merged = Vec::with_capacity(a.len());
    for i in 0..a.len().max(b.len()) {
        for list in [a, b] {
            if let Some(&id) = list.get(i) {
                if seen.insert(id) {
                    merged.push(id);
                }
            }
        }
    }
    merged
}

pub fn greedy_two_factor(instance: &ArpInstance, factor_a: Factor, factor_b: Factor) -> Result<Plan> {
    require_single_release(instance)?;
    let merged = merge_alternating(&ranking(instance, factor_a)?, &ranking(instance, factor_b)?);
    greedy_fill(instance, &merged)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HeuristicAlgorithm {
    OneFactor,
    TwoFactor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicSpec {
    pub id: String,
    pub algorithm: HeuristicAlgorithm,
    pub factors: Vec<Factor>,
}

impl HeuristicSpec {
    pub fn new(id: impl Into<String>, algorithm: HeuristicAlgorithm, factors: Vec<Factor>) -> Result<Self> {
        let arity = match algorithm {
            HeuristicAlgorithm::OneFactor => 1,
            HeuristicAlgorithm::TwoFactor => 2,
        };
        if factors.len() != arity {
            return Err(ArpError::LengthMismatch(format!(
                "{algorithm:?} takes {arity} factor(s), got {}",
                factors.len()
            )));
        }
        Ok(HeuristicSpec {
            id: id.into(),
            algorithm,
            factors,
        })
    }

    /// The eight standard configurations H1..H8.
    pub fn standard() -> Vec<HeuristicSpec> {
        use Factor::*;
        use HeuristicAlgorithm::*;
        let rows: [(&str, HeuristicAlgorithm, &[Factor]); 8] = [
            ("H1", OneFactor, &[Sat]),
            ("H2", OneFactor, &[Dissat]),
            ("H3", OneFactor, &[SatPerEffort]),
            ("H4", OneFactor, &[DissatPerEffort]),
            ("H5", OneFactor, &[SatPlusDissat]),
            ("H6", OneFactor, &[SumPerEffort]),
            ("H7", TwoFactor, &[Sat, Dissat]),
            ("H8", TwoFactor, &[SatPerEffort, DissatPerEffort]),
        ];
        rows.into_iter()
            .map(|(id, alg, f)| HeuristicSpec::new(id, alg, f.to_vec()).expect("arity matches"))
            .collect()
    }

    pub fn run(&self, instance: &ArpInstance) -> Result<Plan> {
        match self.algorithm {
            HeuristicAlgorithm::OneFactor => greedy_one_factor(instance, self.factors[0]),
            HeuristicAlgorithm::TwoFactor => greedy_two_factor(instance, self.factors[0], self.factors[1]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    Identical,
    Dominated,
    NewPareto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub dominated: usize,
    pub identical: usize,
    pub new_pareto: usize,
    /// One label per input plan, in input order.
    pub labels: Vec<Label>,
}

/// Labels each plan IDENTICAL (assignment equals a reference plan's),
/// else DOMINATED (some reference plan dominates it), else NEW_PARETO.
pub fn classify_vs_reference(plans: &[Plan], reference: &[Plan]) -> Result<Classification> {
    let shape = |p: &Plan| (p.assignment().len(), p.releases());
    if let Some(first) = reference.first().or(plans.first()) {
        let want = shape(first);
        if let Some(bad) = plans.iter().chain(reference).find(|p| shape(p) != want) {
            return Err(ArpError::InstanceMismatch(format!(
                "expected {} features over {} release(s), found {} over {}",
                want.0,
                want.1,
                bad.assignment().len(),
                bad.releases()
            )));
        }
    }
    let mut c = Classification {
        dominated: 0,
        identical: 0,
        new_pareto: 0,
        labels: Vec::with_capacity(plans.len()),
    };
    for p in plans {
        let label = if reference.iter().any(|r| r.assignment() == p.assignment()) {
            c.identical += 1;
            Label::Identical
        } else if reference.iter().any(|r| dominates(r.objectives(), p.objectives())) {
            c.dominated += 1;
            Label::Dominated
        } else {
            c.new_pareto += 1;
            Label::NewPareto
        };
        c.labels.push(label);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::ReleaseConfig;
    use crate::planning::is_feasible;
    use crate::solver::{brute_force_pareto, solve_scalarized};
    use proptest::prelude::*;

    fn ids(p: &Plan) -> Vec<usize> {
        p.offered().into_iter().collect()
    }

    #[test]
    fn random_plan_edges() {
        let inst = fixtures::motivating_instance();
        let big = inst.with_config(ReleaseConfig::single(100.0).unwrap());
        assert_eq!(ids(&random_plan(&big, 1).unwrap()), (1..=9).collect::<Vec<_>>());
        let none = inst.with_config(ReleaseConfig::single(0.5).unwrap());
        assert!(random_plan(&none, 1).unwrap().offered().is_empty());
        assert_eq!(random_plan(&inst, 42).unwrap(), random_plan(&inst, 42).unwrap());
        assert_eq!(random_plan(&inst, 42).unwrap().offered().len(), 3);
    }

    #[test]
    fn random_plans_vary_with_seed() {
        let inst = fixtures::motivating_instance();
        let distinct: BTreeSet<Vec<usize>> = (0..50).map(|s| ids(&random_plan(&inst, s).unwrap())).collect();
        assert!(distinct.len() > 10);
    }

    #[test]
    fn multi_release_rejected() {
        let cfg = ReleaseConfig::new(vec![1.0, 1.0], vec![1.0, 0.5, 0.0], vec![0.0, 0.5, 1.0]).unwrap();
        let inst = fixtures::motivating_instance().with_config(cfg);
        assert_eq!(random_plan(&inst, 0).unwrap_err().code(), "UNSUPPORTED_RELEASE_COUNT");
        assert_eq!(greedy_one_factor(&inst, Factor::Sat).unwrap_err().code(), "UNSUPPORTED_RELEASE_COUNT");
    }

    #[test]
    fn random_baseline_against_front() {
        let inst = fixtures::motivating_instance();
        let front = brute_force_pareto(&inst).unwrap();
        let (plans, stats) = random_baseline(&inst, 200, 7, &front).unwrap();
        assert_eq!(plans.len(), 200);
        assert_eq!(stats.dominated + stats.equal, 200);
        assert_eq!(stats.dominating, 0);
        assert_eq!(plans[3], random_plan(&inst, 10).unwrap());

        let (_, one) = random_baseline(&inst, 1, 7, &front).unwrap();
        assert_eq!(one.points.len(), 1);

        let own = dominance_stats(front.iter().map(Plan::objectives).collect(), &front).unwrap();
        assert_eq!(own.dominated, 0);
        assert_eq!(own.dominated_fraction(), 0.0);
        assert_eq!(own.dominated_or_equal_fraction(), 1.0);
    }

    #[test]
    fn gap_uses_strongest_dominator_of_closest_point() {
        let inst = fixtures::motivating_instance();
        let reference = vec![inst.plan_from_offered(&[7, 8, 9]).unwrap()];
        // (6, 30) dominated by (6, 25): 0% + 20%.
        let stats = dominance_stats(vec![Objectives::new(6.0, 30.0), Objectives::new(3.0, 30.0)], &reference).unwrap();
        let g = stats.best_gap.unwrap();
        assert_eq!(g.random_index, 0);
        assert!((g.satisfaction_pct - 0.0).abs() < 1e-12);
        assert!((g.dissatisfaction_pct - 20.0).abs() < 1e-12);
    }

    #[test]
    fn greedy_examples() {
        let inst = fixtures::motivating_instance();
        assert_eq!(ids(&greedy_one_factor(&inst, Factor::Sat).unwrap()), vec![1, 2, 3]);
        assert_eq!(greedy_one_factor(&inst, Factor::Sat).unwrap().total_satisfaction(), 27.0);
        let d = greedy_one_factor(&inst, Factor::Dissat).unwrap();
        assert_eq!(ids(&d), vec![7, 8, 9]);
        assert_eq!(d.total_dissatisfaction(), 25.0);
        assert_eq!(
            greedy_one_factor(&inst, Factor::SatPerEffort).unwrap(),
            greedy_one_factor(&inst, Factor::Sat).unwrap()
        );
        let two = greedy_two_factor(&inst, Factor::Sat, Factor::Dissat).unwrap();
        assert_eq!(ids(&two), vec![1, 2, 7]);
        assert_eq!(two.objectives(), Objectives::new(21.0, 40.0));
        for f in Factor::ALL {
            assert_eq!(
                greedy_two_factor(&inst, f, f).unwrap(),
                greedy_one_factor(&inst, f).unwrap()
            );
        }
        let empty = inst.with_config(ReleaseConfig::single(0.0).unwrap());
        assert!(greedy_two_factor(&empty, Factor::Sat, Factor::Dissat).unwrap().offered().is_empty());
    }

    #[test]
    fn greedy_continues_past_misfits() {
        let inst = ArpInstance::from_values(
            &[(10.0, 0.0), (9.0, 0.0), (1.0, 0.0)],
            &[2.0, 5.0, 1.0],
            ReleaseConfig::single(3.0).unwrap(),
        )
        .unwrap();
        assert_eq!(ids(&greedy_one_factor(&inst, Factor::Sat).unwrap()), vec![1, 3]);
    }

    #[test]
    fn ratio_factor_needs_effort() {
        let inst =
            ArpInstance::from_values(&[(1.0, 1.0), (2.0, 2.0)], &[1.0, 0.0], ReleaseConfig::single(3.0).unwrap())
                .unwrap();
        let err = greedy_one_factor(&inst, Factor::SumPerEffort).unwrap_err();
        assert_eq!(err.code(), "ZERO_EFFORT_WITH_RATIO_FACTOR");
        assert!(greedy_one_factor(&inst, Factor::SatPlusDissat).is_ok());
    }

    #[test]
    fn merge_is_alternating() {
        assert_eq!(merge_alternating(&[1, 2, 3, 4], &[4, 3, 2, 1]), vec![1, 4, 2, 3]);
        assert_eq!(merge_alternating(&[1, 2], &[1, 2]), vec![1, 2]);
    }

    #[test]
    fn standard_table() {
        let specs = HeuristicSpec::standard();
        assert_eq!(specs.len(), 8);
        assert_eq!(specs[6].factors, vec![Factor::Sat, Factor::Dissat]);
        assert!(HeuristicSpec::new("X", HeuristicAlgorithm::TwoFactor, vec![Factor::Sat]).is_err());
        assert_eq!("sat_per_effort".parse::<Factor>().unwrap(), Factor::SatPerEffort);
        assert_eq!("satisfaction".parse::<Factor>().unwrap(), Factor::Sat);
        assert!("bogus".parse::<Factor>().is_err());
    }

    #[test]
    fn classification_examples() {
        let inst = fixtures::motivating_instance();
        let reference: Vec<Plan> = fixtures::MOTIVATING_PLANS
            .iter()
            .map(|(ids, _, _)| inst.plan_from_offered(ids).unwrap())
            .collect();
        let p1 = reference[0].clone();
        let worse = ArpInstance::from_values(&[(6.0, 0.0), (0.0, 30.0)], &[1.0, 1.0], ReleaseConfig::single(1.0).unwrap())
            .unwrap()
            .plan_from_offered(&[1])
            .unwrap();
        assert_eq!(worse.objectives(), Objectives::new(6.0, 30.0));
        let other_ref = vec![ArpInstance::from_values(&[(0.0, 25.0), (6.0, 0.0)], &[1.0, 1.0], ReleaseConfig::single(1.0).unwrap())
            .unwrap()
            .plan_from_offered(&[2])
            .unwrap()];
        assert_eq!(other_ref[0].objectives(), Objectives::new(6.0, 25.0));
        let c = classify_vs_reference(&[worse], &other_ref).unwrap();
        assert_eq!(c.labels, vec![Label::Dominated]);

        let c = classify_vs_reference(&[p1], &reference).unwrap();
        assert_eq!(c.labels, vec![Label::Identical]);

        let high = inst.plan_from_offered(&[1, 2, 3, 4]).unwrap();
        let c = classify_vs_reference(&[high], &reference).unwrap();
        assert_eq!(c.labels, vec![Label::NewPareto]);
        assert_eq!((c.dominated, c.identical, c.new_pareto), (0, 0, 1));

        let small = ArpInstance::from_values(&[(1.0, 1.0)], &[1.0], ReleaseConfig::single(1.0).unwrap())
            .unwrap()
            .empty_plan();
        assert_eq!(
            classify_vs_reference(&[small], &reference).unwrap_err().code(),
            "INSTANCE_MISMATCH"
        );
    }

    #[test]
    fn heuristics_on_motivating_instance() {
        let inst = fixtures::motivating_instance();
        let front = brute_force_pareto(&inst).unwrap();
        let plans: Vec<Plan> = HeuristicSpec::standard().iter().map(|h| h.run(&inst).unwrap()).collect();
        let c = classify_vs_reference(&plans, &front).unwrap();
        assert_eq!(c.new_pareto, 0);
        assert_eq!(c.labels.len(), 8);
    }

    fn single_release_instance() -> impl Strategy<Value = ArpInstance> {
        (1usize..=10).prop_flat_map(|n| {
            (
                proptest::collection::vec((0.0f64..10.0, 0.0f64..10.0), n),
                proptest::collection::vec(0.1f64..5.0, n),
                0.0f64..15.0,
            )
                .prop_map(|(v, e, c)| ArpInstance::from_values(&v, &e, ReleaseConfig::single(c).unwrap()).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn heuristics_feasible_and_never_beat_exact(inst in single_release_instance(), seed in any::<u64>(), alpha in 0.01f64..0.99) {
            let best = solve_scalarized(&inst, alpha).unwrap().objective;
            let mut plans: Vec<Plan> = HeuristicSpec::standard().iter().map(|h| h.run(&inst).unwrap()).collect();
            plans.push(random_plan(&inst, seed).unwrap());
            for p in &plans {
                prop_assert!(is_feasible(p, &inst));
                let g = alpha * p.total_satisfaction() + (alpha - 1.0) * p.total_dissatisfaction();
                prop_assert!(g <= best + 1e-9);
            }
            let front = brute_force_pareto(&inst).unwrap();
            let c = classify_vs_reference(&plans, &front).unwrap();
            prop_assert_eq!(c.dominated + c.identical + c.new_pareto, plans.len());
            prop_assert_eq!(c.new_pareto, 0);
        }

        #[test]
        fn random_plan_invariant_when_everything_fits(inst in single_release_instance(), a in any::<u64>(), b in any::<u64>()) {
            let total: f64 = inst.features().iter().map(|f| f.effort).sum();
            let roomy = inst.with_config(ReleaseConfig::single(total + 1.0).unwrap());
            prop_assert_eq!(random_plan(&roomy, a).unwrap(), random_plan(&roomy, b).unwrap());
        }
    }
}
