//! Plan analytics: structural differences, shared core features, manual
//! versus optimized plan quality, and agreement among stakeholder rankings.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{ArpError, Result};
use crate::model::{Objectives, Plan};

/// Anything that names a set of offered feature ids.
pub trait OfferedFeatures {
    fn offered_ids(&self) -> BTreeSet<usize>;
}

impl OfferedFeatures for Plan {
    fn offered_ids(&self) -> BTreeSet<usize> {
        self.offered()
    }
}

impl OfferedFeatures for BTreeSet<usize> {
    fn offered_ids(&self) -> BTreeSet<usize> {
        self.clone()
    }
}

impl OfferedFeatures for [usize] {
    fn offered_ids(&self) -> BTreeSet<usize> {
        self.iter().copied().collect()
    }
}

impl OfferedFeatures for Vec<usize> {
    fn offered_ids(&self) -> BTreeSet<usize> {
        self.as_slice().offered_ids()
    }
}

/// Features offered by exactly one of the two plans.
pub fn symmetric_difference<A, B>(a: &A, b: &B) -> BTreeSet<usize>
where
    A: OfferedFeatures + ?Sized,
    B: OfferedFeatures + ?Sized,
{
    a.offered_ids()
        .symmetric_difference(&b.offered_ids())
        .copied()
        .collect()
}

/// Features offered by every plan.
pub fn core_features<P: OfferedFeatures>(plans: &[P]) -> Result<BTreeSet<usize>> {
    let (first, rest) = plans
        .split_first()
        .ok_or_else(|| ArpError::InvalidValue("core features need at least one plan".into()))?;
    let mut core = first.offered_ids();
    for p in rest {
        let ids = p.offered_ids();
        core.retain(|id| ids.contains(id));
    }
    Ok(core)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManualComparison {
    /// `(mean TS_opt - mean TS_manual) / mean TS_manual * 100`.
    pub sat_improvement_pct: f64,
    /// `(mean TDS_manual - mean TDS_opt) / mean TDS_opt * 100`.
    pub dissat_improvement_pct: f64,
}

fn means(points: &[Objectives]) -> (f64, f64) {
    let n = points.len() as f64;
    (
        points.iter().map(|p| p.ts).sum::<f64>() / n,
        points.iter().map(|p| p.tds).sum::<f64>() / n,
    )
}

pub fn compare_manual(manual: &[Objectives], optimized: &[Objectives]) -> Result<ManualComparison> {
    if manual.is_empty() || optimized.is_empty() {
        return Err(ArpError::InvalidValue("both plan lists must be non-empty".into()));
    }
    let (man_ts, man_tds) = means(manual);
    let (opt_ts, opt_tds) = means(optimized);
    if man_ts == 0.0 {
        return Err(ArpError::DivisionByZero("mean manual satisfaction"));
    }
    if opt_tds == 0.0 {
        return Err(ArpError::DivisionByZero("mean optimized dissatisfaction"));
    }
    Ok(ManualComparison {
        sat_improvement_pct: (opt_ts - man_ts) / man_ts * 100.0,
        dissat_improvement_pct: (man_tds - opt_tds) / opt_tds * 100.0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rater {
    pub id: String,
    pub label: String,
}

/// Ranks given by each rater (rows) to each plan (columns).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankingTable {
    raters: Vec<Rater>,
    subjects: Vec<String>,
    ranks: Vec<Vec<u32>>,
}

impl RankingTable {
    /// Cells must lie in `1..=subjects.len()`; tied ranks are allowed.
    pub fn new(raters: Vec<Rater>, subjects: Vec<String>, ranks: Vec<Vec<u32>>) -> Result<Self> {
        if raters.len() != ranks.len() {
            return Err(ArpError::LengthMismatch(format!(
                "{} raters but {} rank rows",
                raters.len(),
                ranks.len()
            )));
        }
        let k = subjects.len() as u32;
        for (r, row) in ranks.iter().enumerate() {
            if row.len() != subjects.len() {
                return Err(ArpError::LengthMismatch(format!(
                    "rater {} ranks {} plans, expected {}",
                    raters[r].id,
                    row.len(),
                    subjects.len()
                )));
            }
            if let Some(bad) = row.iter().find(|&&x| x < 1 || x > k) {
                return Err(ArpError::InvalidValue(format!(
                    "rater {} gives rank {bad}, outside 1..={k}",
                    raters[r].id
                )));
            }
        }
        Ok(RankingTable { raters, subjects, ranks })
    }

    pub fn raters(&self) -> &[Rater] {
        &self.raters
    }

    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    pub fn ranks(&self) -> &[Vec<u32>] {
        &self.ranks
    }
}

/// Fleiss' kappa with plans as items and rank values as categories.
///
/// Returns 1.0 when expected agreement is 1 (every cell equal).
pub fn fleiss_kappa(table: &RankingTable) -> Result<f64> {
    let n = table.raters.len();
    let items = table.subjects.len();
    if n < 2 || items < 2 {
        return Err(ArpError::DegenerateTable);
    }
    let categories = items;
    // counts[i][j]: raters assigning rank j + 1 to plan i.
    let mut counts = vec![vec![0u64; categories]; items];
    for row in &table.ranks {
        for (i, &rank) in row.iter().enumerate() {
            counts[i][rank as usize - 1] += 1;
        }
    }
    let nf = n as f64;
    let p_bar = counts
        .iter()
        .map(|c| (c.iter().map(|&x| (x * x) as f64).sum::<f64>() - nf) / (nf * (nf - 1.0)))
        .sum::<f64>()
        / items as f64;
    let total = (items * n) as f64;
    let p_e: f64 = (0..categories)
        .map(|j| {
            let p = counts.iter().map(|c| c[j]).sum::<u64>() as f64 / total;
            p * p
        })
        .sum();
    if (1.0 - p_e).abs() < 1e-12 {
        return Ok(1.0);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::parse_rankings_csv;
    use crate::fixtures;
    use proptest::prelude::*;

    fn set(ids: &[usize]) -> BTreeSet<usize> {
        ids.iter().copied().collect()
    }

    fn table(rows: Vec<Vec<u32>>) -> RankingTable {
        let k = rows[0].len();
        let raters = (0..rows.len())
            .map(|i| Rater {
                id: i.to_string(),
                label: format!("R{i}"),
            })
            .collect();
        RankingTable::new(raters, (1..=k).map(|j| format!("P{j}")).collect(), rows).unwrap()
    }

    /// Kappa from ordered rater-pair agreement counts, independent of the
    /// category-count formulation.
    fn pairwise_kappa(rows: &[Vec<u32>]) -> f64 {
        let n = rows.len();
        let items = rows[0].len();
        let mut agree = 0.0;
        for i in 0..items {
            for a in 0..n {
                for b in 0..n {
                    if a != b && rows[a][i] == rows[b][i] {
                        agree += 1.0;
                    }
                }
            }
        }
        let p_obs = agree / (items * n * (n - 1)) as f64;
        let cells: Vec<u32> = rows.iter().flatten().copied().collect();
        let mut chance = 0.0;
        for &x in &cells {
            for &y in &cells {
                if x == y {
                    chance += 1.0;
                }
            }
        }
        let p_exp = chance / (cells.len() * cells.len()) as f64;
        (p_obs - p_exp) / (1.0 - p_exp)
    }

    #[test]
    fn symmetric_difference_examples() {
        let a = set(&[1, 2, 3, 23]);
        let b = set(&[1, 2, 3, 24]);
        assert_eq!(symmetric_difference(&a, &b), set(&[23, 24]));
        assert!(symmetric_difference(&a, &a).is_empty());
        let inst = fixtures::motivating_instance();
        let p = inst.plan_from_offered(&[1, 2, 3]).unwrap();
        let q = inst.plan_from_offered(&[2, 3, 5]).unwrap();
        assert_eq!(symmetric_difference(&p, &q), set(&[1, 5]));
        assert_eq!(symmetric_difference(&p, &vec![1usize, 2, 3]), BTreeSet::new());
    }

    #[test]
    fn core_feature_examples() {
        assert_eq!(core_features(&[set(&[1, 4])]).unwrap(), set(&[1, 4]));
        assert!(core_features(&[set(&[1]), set(&[2])]).unwrap().is_empty());
        assert_eq!(core_features(&[set(&[1, 2, 3]), set(&[2, 3, 4]), set(&[3, 2])]).unwrap(), set(&[2, 3]));
        assert!(core_features::<BTreeSet<usize>>(&[]).is_err());
    }

    #[test]
    fn compare_manual_examples() {
        let pts = [Objectives::new(2.0, 4.0), Objectives::new(4.0, 2.0)];
        let same = compare_manual(&pts, &pts).unwrap();
        assert_eq!((same.sat_improvement_pct, same.dissat_improvement_pct), (0.0, 0.0));
        let doubled: Vec<Objectives> = pts.iter().map(|p| Objectives::new(2.0 * p.ts, p.tds)).collect();
        assert_eq!(compare_manual(&pts, &doubled).unwrap().sat_improvement_pct, 100.0);
        let zero = [Objectives::new(0.0, 1.0)];
        assert_eq!(compare_manual(&zero, &pts).unwrap_err().code(), "DIVISION_BY_ZERO");
        assert_eq!(compare_manual(&pts, &[Objectives::new(1.0, 0.0)]).unwrap_err().code(), "DIVISION_BY_ZERO");
        assert!(compare_manual(&[], &pts).is_err());
    }

    #[test]
    fn ranking_table_validation() {
        let r = |i: &str| Rater {
            id: i.into(),
            label: i.into(),
        };
        let subjects = vec!["A".to_string(), "B".to_string()];
        assert!(RankingTable::new(vec![r("1")], subjects.clone(), vec![vec![1, 3]]).is_err());
        assert!(RankingTable::new(vec![r("1")], subjects.clone(), vec![vec![1]]).is_err());
        assert!(RankingTable::new(vec![r("1"), r("2")], subjects.clone(), vec![vec![1, 2]]).is_err());
        assert!(RankingTable::new(vec![r("1")], subjects, vec![vec![1, 1]]).is_ok());
    }

    #[test]
    fn kappa_edge_cases() {
        assert_eq!(fleiss_kappa(&table(vec![vec![1, 2, 3]; 5])).unwrap(), 1.0);
        assert_eq!(fleiss_kappa(&table(vec![vec![1, 1, 1]; 4])).unwrap(), 1.0);
        assert_eq!(fleiss_kappa(&table(vec![vec![1, 2]])).unwrap_err().code(), "DEGENERATE_TABLE");
        let single = RankingTable::new(
            vec![
                Rater {
                    id: "a".into(),
                    label: "a".into(),
                },
                Rater {
                    id: "b".into(),
                    label: "b".into(),
                },
            ],
            vec!["P".into()],
            vec![vec![1], vec![1]],
        )
        .unwrap();
        assert_eq!(fleiss_kappa(&single).unwrap_err().code(), "DEGENERATE_TABLE");
    }

    #[test]
    fn kappa_on_stakeholder_rankings() {
        let sat = parse_rankings_csv(fixtures::RANKINGS_SATISFACTION_CSV).unwrap();
        let dis = parse_rankings_csv(fixtures::RANKINGS_DISSATISFACTION_CSV).unwrap();
        let ks = fleiss_kappa(&sat).unwrap();
        let kd = fleiss_kappa(&dis).unwrap();
        assert!((ks - pairwise_kappa(sat.ranks())).abs() < 1e-12);
        assert!((kd - pairwise_kappa(dis.ranks())).abs() < 1e-12);
        assert!((ks - 0.0409).abs() <= 0.02, "{ks}");
        assert!((kd - 0.0649).abs() <= 0.02, "{kd}");
    }

    fn rank_rows() -> impl Strategy<Value = Vec<Vec<u32>>> {
        (2usize..6, 2usize..8).prop_flat_map(|(k, n)| proptest::collection::vec(proptest::collection::vec(1u32..=k as u32, k), n))
    }

    proptest! {
        #[test]
        fn kappa_matches_pairwise_oracle(rows in rank_rows()) {
            let t = table(rows.clone());
            let k = fleiss_kappa(&t).unwrap();
            let cells: BTreeSet<u32> = rows.iter().flatten().copied().collect();
            if cells.len() > 1 {
                prop_assert!((k - pairwise_kappa(&rows)).abs() < 1e-9);
            } else {
                prop_assert_eq!(k, 1.0);
            }
            prop_assert!(k <= 1.0 + 1e-12);
        }

        #[test]
        fn kappa_permutation_invariant(rows in rank_rows(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let base = fleiss_kappa(&table(rows.clone())).unwrap();
            let mut by_rater = rows.clone();
            by_rater.shuffle(&mut rng);
            let mut perm: Vec<usize> = (0..rows[0].len()).collect();
            perm.shuffle(&mut rng);
            let by_subject: Vec<Vec<u32>> = rows.iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect();
            prop_assert!((fleiss_kappa(&table(by_rater)).unwrap() - base).abs() < 1e-12);
            prop_assert!((fleiss_kappa(&table(by_subject)).unwrap() - base).abs() < 1e-12);
        }

        #[test]
        fn symmetric_difference_laws(a in proptest::collection::btree_set(1usize..30, 0..15), b in proptest::collection::btree_set(1usize..30, 0..15)) {
            let ab = symmetric_difference(&a, &b);
            prop_assert_eq!(&ab, &symmetric_difference(&b, &a));
            prop_assert_eq!(ab.is_empty(), a == b);
        }

        #[test]
        fn core_is_subset_of_every_plan(plans in proptest::collection::vec(proptest::collection::btree_set(1usize..20, 0..12), 1..6)) {
            let core = core_features(&plans).unwrap();
            for p in &plans {
                prop_assert!(core.is_subset(p));
            }
        }

        #[test]
        fn compare_manual_scale_covariant(
            man in proptest::collection::vec((0.1f64..10.0, 0.1f64..10.0), 1..6),
            opt in proptest::collection::vec((0.1f64..10.0, 0.1f64..10.0), 1..6),
            c in 0.01f64..100.0,
        ) {
            let to = |v: &[(f64, f64)], s: f64| v.iter().map(|&(t, d)| Objectives::new(t * s, d)).collect::<Vec<_>>();
            let a = compare_manual(&to(&man, 1.0), &to(&opt, 1.0)).unwrap();
            let b = compare_manual(&to(&man, c), &to(&opt, c)).unwrap();
            prop_assert!((a.sat_improvement_pct - b.sat_improvement_pct).abs() <= 1e-9 * (1.0 + a.sat_improvement_pct.abs()));
            prop_assert_eq!(a.dissat_improvement_pct, b.dissat_improvement_pct);
        }
    }
}
