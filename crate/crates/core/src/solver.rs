//! Exact maximization of the scalarized objective G(x, alpha) over feasible
//! plans, plus exhaustive oracles for small instances.
//!
//! G decomposes per feature: assigning feature n to release k contributes
//! `alpha * w(k) * S(n) + (1 - alpha) * (1 - z(k)) * DS(n)` on top of the
//! constant `-(1 - alpha) * sum DS`. Postponement contributes zero, and
//! release 1 always carries the largest contribution, so the search is a
//! multiple-knapsack problem with non-negative item values.
//!
//! The branch-and-bound visits features in descending order of their
//! release-1 contribution (ties by ascending id) and tries releases
//! `1, 2, ..., K + 1` in that order. The first optimal leaf reached in this
//! order is returned; later leaves replace it only when strictly better by
//! more than [`IMPROVEMENT_EPSILON`].

use serde::{Deserialize, Serialize};

use crate::error::{ArpError, Result};
use crate::model::{Plan, FEASIBILITY_TOLERANCE, OBJECTIVE_TOLERANCE};
use crate::planning::{check_alpha, dominates, scalarize, ArpInstance};

/// Minimum gain for a later leaf to displace the incumbent.
pub const IMPROVEMENT_EPSILON: f64 = 1e-12;

/// Upper bound on the number of assignments the oracles will enumerate.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub alpha: f64,
    pub plan: Plan,
    /// G(plan, alpha).
    pub objective: f64,
    pub nodes_explored: u64,
    /// Always true: the search runs to completion.
    pub proven_optimal: bool,
}

struct Search<'a> {
    efforts: &'a [f64],
    /// `gains[n][k - 1]` for releases `k = 1..=K`; postponement gains 0.
    gains: Vec<Vec<f64>>,
    order: Vec<usize>,
    /// Position of each feature in `order`.
    depth_of: Vec<usize>,
    /// Features by decreasing release-1 gain per unit effort.
    density_order: Vec<usize>,
    /// `capacity_free_bound[d]` = sum of release-1 gains over `order[d..]`.
    capacity_free_bound: Vec<f64>,
    remaining: Vec<f64>,
    current: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
    nodes: u64,
}

impl Search<'_> {
    /// Admissible bound on what the unassigned features `order[depth..]`
    /// can still add: the tighter of the capacity-free sum and a
    /// fractional knapsack over the pooled remaining capacity.
    fn bound(&self, depth: usize) -> f64 {
        let free = self.capacity_free_bound[depth];
        let mut pool: f64 = self.remaining.iter().sum::<f64>() + FEASIBILITY_TOLERANCE;
        let mut fractional = 0.0;
        for &n in &self.density_order {
            if self.depth_of[n] < depth {
                continue;
            }
            let (g, e) = (self.gains[n][0], self.efforts[n]);
            if e <= pool {
                fractional += g;
                pool -= e;
            } else {
                fractional += g * pool / e;
                break;
            }
        }
        free.min(fractional)
    }

    fn incumbent_value(&self) -> f64 {
        self.best.as_ref().map_or(f64::NEG_INFINITY, |(v, _)| *v)
    }

    fn dfs(&mut self, depth: usize, value: f64) {
        self.nodes += 1;
        if depth == self.order.len() {
            if value > self.incumbent_value() + IMPROVEMENT_EPSILON {
                self.best = Some((value, self.current.clone()));
            }
            return;
        }
        if self.best.is_some() && value + self.bound(depth) <= self.incumbent_value() + IMPROVEMENT_EPSILON {
            return;
        }
        let n = self.order[depth];
        let k_max = self.remaining.len();
        for k in 1..=k_max {
            if self.efforts[n] <= self.remaining[k - 1] + FEASIBILITY_TOLERANCE {
                self.remaining[k - 1] -= self.efforts[n];
                self.current[n] = k;
                let gain = self.gains[n][k - 1];
                self.dfs(depth + 1, value + gain);
                self.remaining[k - 1] += self.efforts[n];
            }
        }
        self.current[n] = k_max + 1;
        self.dfs(depth + 1, value);
    }
}

/// Returns a feasible plan maximizing G(x, alpha).
pub fn solve_scalarized(instance: &ArpInstance, alpha: f64) -> Result<SolveReport> {
    check_alpha(alpha)?;
    if instance.is_empty() {
        return Err(ArpError::EmptyInstance);
    }
    let config = instance.config();
    let k = config.releases();
    let features = instance.features();
    let efforts: Vec<f64> = features.iter().map(|f| f.effort).collect();
    let gains: Vec<Vec<f64>> = features
        .iter()
        .map(|f| {
            (1..=k)
                .map(|r| alpha * config.w(r) * f.sat_value + (1.0 - alpha) * (1.0 - config.z(r)) * f.dissat_value)
                .collect()
        })
        .collect();

    let mut order: Vec<usize> = (0..features.len()).collect();
    order.sort_by(|&a, &b| gains[b][0].total_cmp(&gains[a][0]).then(a.cmp(&b)));
    let mut depth_of = vec![0; order.len()];
    for (d, &n) in order.iter().enumerate() {
        depth_of[n] = d;
    }
    let mut density_order: Vec<usize> = (0..features.len()).collect();
    let density = |n: usize| {
        if efforts[n] > 0.0 {
            gains[n][0] / efforts[n]
        } else {
            f64::INFINITY
        }
    };
    density_order.sort_by(|&a, &b| density(b).total_cmp(&density(a)).then(a.cmp(&b)));
    let mut capacity_free_bound = vec![0.0; order.len() + 1];
    for d in (0..order.len()).rev() {
        capacity_free_bound[d] = capacity_free_bound[d + 1] + gains[order[d]][0];
    }

    let mut search = Search {
        efforts: &efforts,
        gains,
        order,
        depth_of,
        density_order,
        capacity_free_bound,
        remaining: config.capacities().to_vec(),
        current: vec![k + 1; features.len()],
        best: None,
        nodes: 0,
    };
    search.dfs(0, 0.0);
    let (_, assignment) = search.best.take().expect("postponing everything is always feasible");
    let plan = instance.evaluate(assignment)?;
    Ok(SolveReport {
        alpha,
        objective: scalarize(plan.objectives(), alpha),
        plan,
        nodes_explored: search.nodes,
        proven_optimal: true,
    })
}

fn check_enumeration_size(instance: &ArpInstance) -> Result<()> {
    let count = ((instance.releases() + 1) as f64).powi(instance.len() as i32);
    if count > ENUMERATION_LIMIT as f64 {
        return Err(ArpError::InstanceTooLarge(count, ENUMERATION_LIMIT));
    }
    Ok(())
}

/// Visits every capacity-feasible assignment in lexicographic order.
fn for_each_feasible(instance: &ArpInstance, mut visit: impl FnMut(&[usize])) {
    fn rec(
        idx: usize,
        efforts: &[f64],
        remaining: &mut [f64],
        assignment: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if idx == efforts.len() {
            visit(assignment);
            return;
        }
        let k = remaining.len();
        for r in 1..=k + 1 {
            if r <= k {
                if efforts[idx] > remaining[r - 1] + FEASIBILITY_TOLERANCE {
                    continue;
                }
                remaining[r - 1] -= efforts[idx];
            }
            assignment.push(r);
            rec(idx + 1, efforts, remaining, assignment, visit);
            assignment.pop();
            if r <= k {
                remaining[r - 1] += efforts[idx];
            }
        }
    }
    let efforts: Vec<f64> = instance.features().iter().map(|f| f.effort).collect();
    let mut remaining = instance.config().capacities().to_vec();
    let mut assignment = Vec::with_capacity(efforts.len());
    rec(0, &efforts, &mut remaining, &mut assignment, &mut visit);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarizedOptimum {
    pub objective: f64,
    /// Every feasible assignment within [`OBJECTIVE_TOLERANCE`] of the optimum.
    pub argmax: Vec<Vec<usize>>,
}

/// Exhaustive maximization of G(x, alpha). Limited to
/// `(K + 1)^N <= ENUMERATION_LIMIT`.
pub fn brute_force_scalarized(instance: &ArpInstance, alpha: f64) -> Result<ScalarizedOptimum> {
    check_alpha(alpha)?;
    check_enumeration_size(instance)?;
    let mut best = f64::NEG_INFINITY;
    let mut argmax: Vec<Vec<usize>> = Vec::new();
    for_each_feasible(instance, |assignment| {
        let plan = instance
            .evaluate(assignment.to_vec())
            .expect("enumerated assignments are in range");
        let g = scalarize(plan.objectives(), alpha);
        if g > best + OBJECTIVE_TOLERANCE {
            best = g;
            argmax.clear();
            argmax.push(assignment.to_vec());
        } else if (g - best).abs() <= OBJECTIVE_TOLERANCE {
            argmax.push(assignment.to_vec());
        }
    });
    Ok(ScalarizedOptimum { objective: best, argmax })
}

/// The complete Pareto front over all feasible assignments, sorted by
/// increasing TS. Value-tied plans with distinct assignments are all kept.
pub fn brute_force_pareto(instance: &ArpInstance) -> Result<Vec<Plan>> {
    check_enumeration_size(instance)?;
    let mut front: Vec<Plan> = Vec::new();
    for_each_feasible(instance, |assignment| {
        let plan = instance
            .evaluate(assignment.to_vec())
            .expect("enumerated assignments are in range");
        let o = plan.objectives();
        if front.iter().any(|q| dominates(q.objectives(), o)) {
            return;
        }
        front.retain(|q| !dominates(o, q.objectives()));
        front.push(plan);
    });
    front.sort_by(|a, b| {
        a.total_satisfaction()
            .total_cmp(&b.total_satisfaction())
            .then(a.total_dissatisfaction().total_cmp(&b.total_dissatisfaction()))
            .then(a.assignment().cmp(b.assignment()))
    });
    Ok(front)
}
