//! Weighted-sum sweep over alpha: solve at each grid point, collapse equal
//! assignments, and record the grid runs over which each plan was optimal.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{ArpError, Result};
use crate::model::{ParetoEntry, ParetoResult, Plan, StabilityInterval};
use crate::planning::{pareto_filter, ArpInstance};
use crate::solver::solve_scalarized;

pub const DEFAULT_STEP: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    /// Grid spacing; `0 < step < 0.5`.
    pub step: f64,
    /// Worker cap; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            step: DEFAULT_STEP,
            threads: None,
        }
    }
}

impl SweepConfig {
    pub fn with_step(step: f64) -> Result<Self> {
        let cfg = SweepConfig { step, threads: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step < 0.5) {
            return Err(ArpError::InvalidValue(format!(
                "sweep step must lie in (0, 0.5), got {}",
                self.step
            )));
        }
        if self.threads == Some(0) {
            return Err(ArpError::InvalidValue("thread count must be positive".into()));
        }
        Ok(())
    }

    /// The grid `step, 2 step, ...` strictly inside (0, 1).
    ///
    /// When `1 / step` is (nearly) an integer m, points are computed as
    /// `i / m`, so grids whose denominators divide each other share
    /// bit-identical alpha values.
    pub fn grid(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let inv = 1.0 / self.step;
        let m = inv.round();
        if (inv - m).abs() <= 1e-9 * m {
            let m = m as u64;
            return Ok((1..m).map(|i| i as f64 / m as f64).collect());
        }
        Ok((1..)
            .map(|i| i as f64 * self.step)
            .take_while(|&a| a < 1.0)
            .collect())
    }
}

/// Solves every grid point and assembles the trade-off plans.
pub fn sdo_sweep(instance: &ArpInstance, sweep: &SweepConfig) -> Result<ParetoResult> {
    let grid = sweep.grid()?;
    let solve_all = || -> Result<Vec<Plan>> {
        grid.par_iter()
            .map(|&alpha| solve_scalarized(instance, alpha).map(|r| r.plan))
            .collect()
    };
    let solutions = match sweep.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ArpError::InvalidValue(format!("cannot start worker pool: {e}")))?
            .install(solve_all)?,
        None => solve_all()?,
    };

    let mut entries: Vec<ParetoEntry> = Vec::new();
    let mut index_of: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut previous: Option<usize> = None;
    for (i, plan) in solutions.into_iter().enumerate() {
        let e = *index_of.entry(plan.assignment().to_vec()).or_insert_with(|| {
            entries.push(ParetoEntry {
                plan,
                stability: Vec::new(),
            });
            entries.len() - 1
        });
        let alpha = grid[i];
        let stability = &mut entries[e].stability;
        match stability.last_mut() {
            Some(run) if previous == Some(e) => {
                run.hi = alpha;
                run.last_index = i;
            }
            _ => stability.push(StabilityInterval {
                lo: alpha,
                hi: alpha,
                first_index: i,
                last_index: i,
            }),
        }
        previous = Some(e);
    }

    let kept = pareto_filter(entries.iter().map(|e| e.plan.clone()).collect());
    entries.retain(|e| kept.iter().any(|p| p.assignment() == e.plan.assignment()));
    Ok(ParetoResult {
        entries,
        alpha_grid: grid,
    })
}

/// Alpha values at which consecutive plans (ordered by TS) tie on G.
pub fn exact_breakpoints(result: &ParetoResult) -> Result<Vec<f64>> {
    breakpoints_of(&result.plans())
}

/// [`exact_breakpoints`] for an arbitrary plan list.
pub fn breakpoints_of(plans: &[Plan]) -> Result<Vec<f64>> {
    if plans.len() < 2 {
        return Err(ArpError::InvalidValue("breakpoints need at least two plans".into()));
    }
    let mut sorted: Vec<&Plan> = plans.iter().collect();
    sorted.sort_by(|a, b| {
        a.total_satisfaction()
            .total_cmp(&b.total_satisfaction())
            .then(a.total_dissatisfaction().total_cmp(&b.total_dissatisfaction()))
    });
    sorted
        .windows(2)
        .map(|pair| {
            let (p, q) = (pair[0].objectives(), pair[1].objectives());
            let num = q.tds - p.tds;
            let den = (q.ts - p.ts) + num;
            if den == 0.0 {
                Err(ArpError::DegeneratePair)
            } else {
                Ok(num / den)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::Objectives;
    use crate::planning::{dominates, is_feasible};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn point_set(r: &ParetoResult) -> Vec<(f64, f64)> {
        r.entries
            .iter()
            .map(|e| (e.plan.total_satisfaction(), e.plan.total_dissatisfaction()))
            .collect()
    }

    #[test]
    fn grid_shapes() {
        let g = SweepConfig::default().grid().unwrap();
        assert_eq!(g.len(), 999);
        assert_eq!(g[0], 0.001);
        assert_eq!(g[998], 0.999);
        assert_eq!(SweepConfig::with_step(0.4).unwrap().grid().unwrap(), vec![0.4, 0.8]);
        assert_eq!(SweepConfig::with_step(0.3).unwrap().grid().unwrap().len(), 3);
        assert!(SweepConfig::with_step(0.5).is_err());
        assert!(SweepConfig::with_step(0.0).is_err());
        let coarse = SweepConfig::with_step(0.01).unwrap().grid().unwrap();
        let fine: BTreeSet<u64> = g.iter().map(|a| a.to_bits()).collect();
        assert!(coarse.iter().all(|a| fine.contains(&a.to_bits())));
    }

    #[test]
    fn motivating_sweep() {
        let inst = fixtures::motivating_instance();
        let r = sdo_sweep(&inst, &SweepConfig::default()).unwrap();
        let expected: Vec<(f64, f64)> = fixtures::MOTIVATING_PLANS.iter().rev().map(|p| (p.1, p.2)).collect();
        // First appearance on an increasing grid goes from low TS to high TS.
        let mut got = point_set(&r);
        got.reverse();
        assert_eq!(got, expected);
        for (entry, (ids, _, _)) in r.entries.iter().zip(fixtures::MOTIVATING_PLANS.iter()) {
            assert_eq!(entry.plan.offered().into_iter().collect::<Vec<_>>(), ids.to_vec());
        }
        let bps = exact_breakpoints(&r).unwrap();
        let want = [0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.75];
        for (b, w) in bps.iter().zip(want) {
            assert!((b - w).abs() < 1e-12);
        }
        // Each run ends within one step of a breakpoint.
        for (entry, bp) in r.entries.iter().zip(want) {
            let last = entry.stability.last().unwrap();
            assert!((last.hi - bp).abs() <= 0.001 + 1e-12, "{} vs {bp}", last.hi);
        }
    }

    #[test]
    fn coarse_sweep_is_bounded_by_grid() {
        let inst = fixtures::motivating_instance();
        let r = sdo_sweep(&inst, &SweepConfig::with_step(0.4).unwrap()).unwrap();
        assert!(r.len() <= 2);
        assert_eq!(r.alpha_grid, vec![0.4, 0.8]);
    }

    #[test]
    fn thread_cap_does_not_change_result() {
        let inst = fixtures::motivating_instance();
        let a = sdo_sweep(&inst, &SweepConfig::with_step(0.01).unwrap()).unwrap();
        let b = sdo_sweep(
            &inst,
            &SweepConfig {
                step: 0.01,
                threads: Some(1),
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn breakpoint_examples() {
        let inst = fixtures::motivating_instance();
        let p = |ids: &[usize]| inst.plan_from_offered(ids).unwrap();
        let b = breakpoints_of(&[p(&[7, 8, 9]), p(&[5, 7, 8])]).unwrap();
        assert_eq!(b, vec![0.25]);
        let b = breakpoints_of(&[p(&[5, 6, 7]), p(&[3, 4, 5])]).unwrap();
        assert_eq!(b, vec![0.5]);
        let err = breakpoints_of(&[p(&[3, 5, 7]), p(&[4, 5, 6])]).unwrap_err();
        assert_eq!(err.code(), "DEGENERATE_PAIR");
    }

    fn check_result(inst: &ArpInstance, r: &ParetoResult) -> std::result::Result<(), TestCaseError> {
        for e in &r.entries {
            prop_assert!(is_feasible(&e.plan, inst));
            for f in &r.entries {
                prop_assert!(!dominates(f.plan.objectives(), e.plan.objectives()));
            }
        }
        // Coverage and disjointness of the grid runs.
        let mut owner = vec![0usize; r.alpha_grid.len()];
        for e in &r.entries {
            for s in &e.stability {
                prop_assert!(s.first_index <= s.last_index);
                prop_assert_eq!(r.alpha_grid[s.first_index], s.lo);
                prop_assert_eq!(r.alpha_grid[s.last_index], s.hi);
                for slot in &mut owner[s.first_index..=s.last_index] {
                    *slot += 1;
                }
            }
        }
        prop_assert!(owner.iter().all(|&c| c == 1));
        // Staircase: sorted by first-interval midpoint, both objectives rise.
        let mut by_mid: Vec<&ParetoEntry> = r.entries.iter().collect();
        by_mid.sort_by(|a, b| a.stability[0].midpoint().total_cmp(&b.stability[0].midpoint()));
        for w in by_mid.windows(2) {
            let (a, b): (Objectives, Objectives) = (w[0].plan.objectives(), w[1].plan.objectives());
            prop_assert!(a.ts <= b.ts + 1e-9 && a.tds <= b.tds + 1e-9);
        }
        Ok(())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn sweep_invariants(inst in crate::testutil::random_instance()) {
            let r = sdo_sweep(&inst, &SweepConfig::with_step(0.01).unwrap()).unwrap();
            check_result(&inst, &r)?;
        }

        #[test]
        fn refinement_never_loses_a_plan(inst in crate::testutil::random_instance()) {
            let coarse = sdo_sweep(&inst, &SweepConfig::with_step(0.05).unwrap()).unwrap();
            let fine = sdo_sweep(&inst, &SweepConfig::with_step(0.005).unwrap()).unwrap();
            for e in &coarse.entries {
                prop_assert!(fine.entries.iter().any(|f| f.plan.assignment() == e.plan.assignment()));
            }
        }
    }
}
