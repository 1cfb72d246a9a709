//! Feature valuation: turns stakeholder input into per-feature satisfaction
//! S(n) and dissatisfaction DS(n).
//!
//! Three elicitation routes are supported:
//!
//! * one-point estimates on a nine-point scale, averaged with stakeholder weights;
//! * AHP pairwise comparison matrices, one per stakeholder and perspective;
//! * the continuous Kano questionnaire, where each stakeholder spreads mass
//!   over the five answers of the functional and dysfunctional question.
//!
//! Every weighted average runs over stakeholders with weight > 0 only and is
//! normalized by the sum of their weights.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{ArpError, Result};
use crate::model::Stakeholder;

/// Three-point (PERT) effort estimate: `(optimistic + 4 * most_likely + pessimistic) / 6`.
pub fn pert_effort(optimistic: f64, most_likely: f64, pessimistic: f64) -> Result<f64> {
    let ordered = optimistic.is_finite()
        && pessimistic.is_finite()
        && 0.0 <= optimistic
        && optimistic <= most_likely
        && most_likely <= pessimistic;
    if !ordered {
        return Err(ArpError::OrderingViolation(optimistic, most_likely, pessimistic));
    }
    Ok((optimistic + 4.0 * most_likely + pessimistic) / 6.0)
}

/// Aggregated value scores of one feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureValues {
    pub feature_id: usize,
    pub satisfaction: f64,
    pub dissatisfaction: f64,
}

fn active_weights(stakeholders: &[Stakeholder]) -> Result<HashMap<u32, f64>> {
    let weights: HashMap<u32, f64> = stakeholders
        .iter()
        .filter(|s| s.is_active())
        .map(|s| (s.id, s.weight as f64))
        .collect();
    if weights.is_empty() {
        return Err(ArpError::AllWeightsZero);
    }
    Ok(weights)
}

/// Weighted mean over `(weight, value)` pairs. Callers guarantee a positive
/// weight sum.
pub(crate) fn weighted_mean(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let (num, den) = pairs
        .into_iter()
        .fold((0.0, 0.0), |(num, den), (w, v)| (num + w * v, den + w));
    num / den
}

// ---------------------------------------------------------------------------
// One-point estimates

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnePointResponse {
    pub feature_id: usize,
    pub stakeholder_id: u32,
    /// Satisfaction if offered, 1..=9.
    pub sat: u8,
    /// Dissatisfaction if not offered, 1..=9.
    pub dissat: u8,
}

/// Weighted averages of nine-point satisfaction and dissatisfaction scores.
pub fn one_point_values(
    feature_ids: &[usize],
    responses: &[OnePointResponse],
    stakeholders: &[Stakeholder],
) -> Result<Vec<FeatureValues>> {
    let weights = active_weights(stakeholders)?;
    let mut by_key: HashMap<(usize, u32), &OnePointResponse> = HashMap::new();
    for r in responses {
        for (label, v) in [("sat", r.sat), ("dissat", r.dissat)] {
            if !(1..=9).contains(&v) {
                return Err(ArpError::InvalidValue(format!(
                    "{label} score of feature {} by stakeholder {} must be in 1..=9, got {v}",
                    r.feature_id, r.stakeholder_id
                )));
            }
        }
        if by_key.insert((r.feature_id, r.stakeholder_id), r).is_some() {
            return Err(ArpError::InvalidValue(format!(
                "duplicate response for feature {} from stakeholder {}",
                r.feature_id, r.stakeholder_id
            )));
        }
    }

    let mut active: Vec<(u32, f64)> = weights.into_iter().collect();
    active.sort_by_key(|&(id, _)| id);
    feature_ids
        .iter()
        .map(|&fid| {
            let rows = active
                .iter()
                .map(|&(sid, w)| {
                    by_key
                        .get(&(fid, sid))
                        .map(|r| (w, r))
                        .ok_or(ArpError::MissingResponse {
                            feature: fid,
                            stakeholder: sid,
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FeatureValues {
                feature_id: fid,
                satisfaction: weighted_mean(rows.iter().map(|(w, r)| (*w, r.sat as f64))),
                dissatisfaction: weighted_mean(rows.iter().map(|(w, r)| (*w, r.dissat as f64))),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// AHP

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Perspective {
    Sat,
    Dissat,
}

const RECIPROCITY_TOLERANCE: f64 = 1e-9;
const POWER_ITERATION_TOLERANCE: f64 = 1e-10;
const POWER_ITERATION_MAX: usize = 1000;

/// Consistency ratios above this are reported as a warning.
pub const ACCEPTABLE_CONSISTENCY_RATIO: f64 = 0.1;

/// Saaty's random consistency index for n = 1..=15.
const RANDOM_INDEX: [f64; 15] = [
    0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49, 1.51, 1.48, 1.56, 1.57, 1.59,
];

/// A positive reciprocal pairwise comparison matrix over all features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAhpMatrix")]
pub struct AhpMatrix {
    stakeholder_id: u32,
    perspective: Perspective,
    entries: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawAhpMatrix {
    stakeholder_id: u32,
    perspective: Perspective,
    entries: Vec<Vec<f64>>,
}

impl TryFrom<RawAhpMatrix> for AhpMatrix {
    type Error = ArpError;

    fn try_from(raw: RawAhpMatrix) -> Result<Self> {
        AhpMatrix::new(raw.stakeholder_id, raw.perspective, raw.entries)
    }
}

impl AhpMatrix {
    pub fn new(stakeholder_id: u32, perspective: Perspective, entries: Vec<Vec<f64>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(ArpError::LengthMismatch("pairwise matrix is empty".into()));
        }
        if let Some(bad) = entries.iter().position(|row| row.len() != n) {
            return Err(ArpError::LengthMismatch(format!(
                "pairwise matrix row {} has {} entries, expected {n}",
                bad + 1,
                entries[bad].len()
            )));
        }
        for (r, row) in entries.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                let in_range = v.is_finite() && (1.0 / 9.0 - RECIPROCITY_TOLERANCE..=9.0 + RECIPROCITY_TOLERANCE).contains(&v);
                if !in_range {
                    return Err(ArpError::InvalidValue(format!(
                        "pairwise entry ({}, {}) = {v} outside [1/9, 9]",
                        r + 1,
                        c + 1
                    )));
                }
                let mirrored = if r == c { 1.0 } else { 1.0 / entries[c][r] };
                if (v - mirrored).abs() > RECIPROCITY_TOLERANCE {
                    return Err(ArpError::NonReciprocal { row: r + 1, col: c + 1 });
                }
            }
        }
        Ok(AhpMatrix {
            stakeholder_id,
            perspective,
            entries,
        })
    }

    pub fn stakeholder_id(&self) -> u32 {
        self.stakeholder_id
    }

    pub fn perspective(&self) -> Perspective {
        self.perspective
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AhpPriorities {
    /// Normalized principal eigenvector, sums to 1.
    pub priorities: Vec<f64>,
    pub lambda_max: f64,
    pub consistency_index: f64,
    pub consistency_ratio: f64,
    pub iterations: usize,
}

impl AhpPriorities {
    pub fn is_acceptably_consistent(&self) -> bool {
        self.consistency_ratio <= ACCEPTABLE_CONSISTENCY_RATIO
    }
}

/// Principal eigenvector by power iteration plus Saaty's consistency ratio.
pub fn ahp_priorities(matrix: &AhpMatrix) -> Result<AhpPriorities> {
    let m = &matrix.entries;
    let n = m.len();
    let mul = |v: &[f64]| -> Vec<f64> { m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect() };

    let mut v = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    loop {
        if iterations == POWER_ITERATION_MAX {
            return Err(ArpError::NoConvergence(POWER_ITERATION_MAX));
        }
        iterations += 1;
        let mv = mul(&v);
        let total: f64 = mv.iter().sum();
        let next: Vec<f64> = mv.iter().map(|x| x / total).collect();
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if delta < POWER_ITERATION_TOLERANCE {
            break;
        }
    }

    let mv = mul(&v);
    let lambda_max = mv.iter().zip(&v).map(|(a, b)| a / b).sum::<f64>() / n as f64;
    let (consistency_index, consistency_ratio) = if n <= 2 {
        (0.0, 0.0)
    } else {
        let ci = ((lambda_max - n as f64) / (n as f64 - 1.0)).max(0.0);
        let ri = RANDOM_INDEX[(n - 1).min(RANDOM_INDEX.len() - 1)];
        (ci, ci / ri)
    };
    Ok(AhpPriorities {
        priorities: v,
        lambda_max,
        consistency_index,
        consistency_ratio,
        iterations,
    })
}

/// A matrix whose consistency ratio exceeded [`ACCEPTABLE_CONSISTENCY_RATIO`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyWarning {
    pub stakeholder_id: u32,
    pub perspective: Perspective,
    pub consistency_ratio: f64,
}

/// Per-stakeholder AHP priorities averaged with stakeholder weights.
///
/// Matrix rows and columns follow the order of `feature_ids`.
pub fn ahp_values(
    feature_ids: &[usize],
    matrices: &[AhpMatrix],
    stakeholders: &[Stakeholder],
) -> Result<(Vec<FeatureValues>, Vec<ConsistencyWarning>)> {
    let weights = active_weights(stakeholders)?;
    let n = feature_ids.len();
    let mut lookup: HashMap<(u32, Perspective), &AhpMatrix> = HashMap::new();
    for m in matrices {
        if m.size() != n {
            return Err(ArpError::LengthMismatch(format!(
                "matrix of stakeholder {} is {}x{}, expected {n}x{n}",
                m.stakeholder_id,
                m.size(),
                m.size()
            )));
        }
        lookup.insert((m.stakeholder_id, m.perspective), m);
    }

    let mut active: Vec<(u32, f64)> = weights.into_iter().collect();
    active.sort_by_key(|&(id, _)| id);
    let mut warnings = Vec::new();
    let mut per_perspective = |perspective| -> Result<Vec<f64>> {
        let mut rows = Vec::with_capacity(active.len());
        for &(sid, w) in &active {
            let m = lookup.get(&(sid, perspective)).ok_or(ArpError::MissingResponse {
                feature: feature_ids.first().copied().unwrap_or(0),
                stakeholder: sid,
            })?;
            let p = ahp_priorities(m)?;
            if !p.is_acceptably_consistent() {
                warnings.push(ConsistencyWarning {
                    stakeholder_id: sid,
                    perspective,
                    consistency_ratio: p.consistency_ratio,
                });
            }
            rows.push((w, p.priorities));
        }
        Ok((0..n)
            .map(|i| weighted_mean(rows.iter().map(|(w, p)| (*w, p[i]))))
            .collect())
    };
    let sat = per_perspective(Perspective::Sat)?;
    let dissat = per_perspective(Perspective::Dissat)?;
    let values = feature_ids
        .iter()
        .enumerate()
        .map(|(i, &fid)| FeatureValues {
            feature_id: fid,
            satisfaction: sat[i],
            dissatisfaction: dissat[i],
        })
        .collect();
    Ok((values, warnings))
}

// ---------------------------------------------------------------------------
// Kano

/// The five answers of a Kano question, in questionnaire order (i)..(v).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KanoAnswer {
    Like,
    MustBe,
    Neutral,
    LiveWith,
    Dislike,
}

impl KanoAnswer {
    pub const ALL: [KanoAnswer; 5] = [
        KanoAnswer::Like,
        KanoAnswer::MustBe,
        KanoAnswer::Neutral,
        KanoAnswer::LiveWith,
        KanoAnswer::Dislike,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KanoAttribute {
    #[serde(rename = "A")]
    Attractive,
    #[serde(rename = "O")]
    OneDimensional,
    #[serde(rename = "M")]
    MustBe,
    #[serde(rename = "I")]
    Indifferent,
    #[serde(rename = "R")]
    Reverse,
    #[serde(rename = "Q")]
    Questionable,
}

impl KanoAttribute {
    pub fn letter(self) -> char {
        match self {
            KanoAttribute::Attractive => 'A',
            KanoAttribute::OneDimensional => 'O',
            KanoAttribute::MustBe => 'M',
            KanoAttribute::Indifferent => 'I',
            KanoAttribute::Reverse => 'R',
            KanoAttribute::Questionable => 'Q',
        }
    }
}

/// Kano evaluation table lookup (functional answer row, dysfunctional answer column).
pub fn classify_traditional(functional: KanoAnswer, dysfunctional: KanoAnswer) -> KanoAttribute {
    use KanoAnswer::{Dislike, Like};
    match (functional, dysfunctional) {
        (Like, Like) | (Dislike, Dislike) => KanoAttribute::Questionable,
        (Like, Dislike) => KanoAttribute::OneDimensional,
        (Like, _) => KanoAttribute::Attractive,
        (_, Like) | (Dislike, _) => KanoAttribute::Reverse,
        (_, Dislike) => KanoAttribute::MustBe,
        _ => KanoAttribute::Indifferent,
    }
}

/// Berger product coefficients `(sat, dissat)` from attribute counts.
/// R and Q counts are ignored.
pub fn product_coefficients(counts: &BTreeMap<KanoAttribute, u32>) -> Result<(f64, f64)> {
    let get = |a| *counts.get(&a).unwrap_or(&0) as f64;
    let (a, o, m, i) = (
        get(KanoAttribute::Attractive),
        get(KanoAttribute::OneDimensional),
        get(KanoAttribute::MustBe),
        get(KanoAttribute::Indifferent),
    );
    let relevant = a + o + m + i;
    if relevant == 0.0 {
        return Err(ArpError::DegenerateProduct);
    }
    Ok(((a + o) / relevant, (m + o) / relevant))
}

/// One stakeholder's continuous Kano answers for one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KanoResponse {
    pub feature_id: usize,
    pub stakeholder_id: u32,
    /// Mass on the five answers to "how do you feel if the feature is present".
    pub functional: [f64; 5],
    /// Mass on the five answers to "how do you feel if it is absent".
    pub dysfunctional: [f64; 5],
}

fn normalize_question(raw: &[f64; 5], which: &'static str) -> Result<[f64; 5]> {
    if raw.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(ArpError::InvalidValue(format!(
            "{which} allocations must be non-negative, got {raw:?}"
        )));
    }
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err(ArpError::ZeroAllocation(which));
    }
    Ok(raw.map(|x| x / total))
}

/// Scales both answer vectors to sum to one. Accepts percentages or fractions.
pub fn normalize_kano(raw: &KanoResponse) -> Result<KanoResponse> {
    Ok(KanoResponse {
        feature_id: raw.feature_id,
        stakeholder_id: raw.stakeholder_id,
        functional: normalize_question(&raw.functional, "functional")?,
        dysfunctional: normalize_question(&raw.dysfunctional, "dysfunctional")?,
    })
}

/// Attribute mass of one stakeholder's answers. The six fields partition the
/// 25 cells of the evaluation table, so they sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KanoScore {
    pub feature_id: usize,
    pub stakeholder_id: u32,
    pub a: f64,
    pub o: f64,
    pub m: f64,
    pub i: f64,
    pub r: f64,
    pub q: f64,
}

impl KanoScore {
    pub fn get(&self, attribute: KanoAttribute) -> f64 {
        match attribute {
            KanoAttribute::Attractive => self.a,
            KanoAttribute::OneDimensional => self.o,
            KanoAttribute::MustBe => self.m,
            KanoAttribute::Indifferent => self.i,
            KanoAttribute::Reverse => self.r,
            KanoAttribute::Questionable => self.q,
        }
    }

    fn slot(&mut self, attribute: KanoAttribute) -> &mut f64 {
        match attribute {
            KanoAttribute::Attractive => &mut self.a,
            KanoAttribute::OneDimensional => &mut self.o,
            KanoAttribute::MustBe => &mut self.m,
            KanoAttribute::Indifferent => &mut self.i,
            KanoAttribute::Reverse => &mut self.r,
            KanoAttribute::Questionable => &mut self.q,
        }
    }

    pub fn total(&self) -> f64 {
        self.a + self.o + self.m + self.i + self.r + self.q
    }
}

/// Sums `U_row * D_col` over the table cells of each attribute.
/// `response` must already be normalized.
pub fn kano_scores(response: &KanoResponse) -> KanoScore {
    let mut score = KanoScore {
        feature_id: response.feature_id,
        stakeholder_id: response.stakeholder_id,
        a: 0.0,
        o: 0.0,
        m: 0.0,
        i: 0.0,
        r: 0.0,
        q: 0.0,
    };
    for f in KanoAnswer::ALL {
        for d in KanoAnswer::ALL {
            *score.slot(classify_traditional(f, d)) += response.functional[f.index()] * response.dysfunctional[d.index()];
        }
    }
    score
}

/// Weighted Kano attribute profile of one feature and its S/DS values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureKanoProfile {
    pub feature_id: usize,
    pub f_a: f64,
    pub f_o: f64,
    pub f_m: f64,
    pub f_i: f64,
    pub s: f64,
    pub ds: f64,
}

impl FeatureKanoProfile {
    /// The attribute (among A, O, M, I) carrying the most weighted mass.
    /// Ties resolve in A, O, M, I order.
    pub fn dominant_attribute(&self) -> KanoAttribute {
        let candidates = [
            (KanoAttribute::Attractive, self.f_a),
            (KanoAttribute::OneDimensional, self.f_o),
            (KanoAttribute::MustBe, self.f_m),
            (KanoAttribute::Indifferent, self.f_i),
        ];
        candidates
            .iter()
            .fold(candidates[0], |best, &c| if c.1 > best.1 { c } else { best })
            .0
    }

    pub fn values(&self) -> FeatureValues {
        FeatureValues {
            feature_id: self.feature_id,
            satisfaction: self.s,
            dissatisfaction: self.ds,
        }
    }
}

/// Weighted average of per-stakeholder scores for one feature, then
/// S = (A + O) / (A + O + M + I) and DS = (M + O) / (A + O + M + I).
pub fn aggregate_kano(feature_id: usize, scores: &[KanoScore], stakeholders: &[Stakeholder]) -> Result<FeatureKanoProfile> {
    let weights = active_weights(stakeholders)?;
    let mut by_stakeholder: HashMap<u32, &KanoScore> = HashMap::new();
    for s in scores.iter().filter(|s| s.feature_id == feature_id) {
        by_stakeholder.insert(s.stakeholder_id, s);
    }
    let mut active: Vec<(u32, f64)> = weights.into_iter().collect();
    active.sort_by_key(|&(id, _)| id);
    let rows = active
        .iter()
        .map(|&(sid, w)| {
            by_stakeholder.get(&sid).map(|s| (w, *s)).ok_or(ArpError::MissingResponse {
                feature: feature_id,
                stakeholder: sid,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mean = |attr| weighted_mean(rows.iter().map(|(w, s)| (*w, s.get(attr))));
    let f_a = mean(KanoAttribute::Attractive);
    let f_o = mean(KanoAttribute::OneDimensional);
    let f_m = mean(KanoAttribute::MustBe);
    let f_i = mean(KanoAttribute::Indifferent);
    let relevant = f_a + f_o + f_m + f_i;
    if relevant <= 0.0 {
        return Err(ArpError::DegenerateFeature(feature_id));
    }
    Ok(FeatureKanoProfile {
        feature_id,
        f_a,
        f_o,
        f_m,
        f_i,
        s: (f_a + f_o) / relevant,
        ds: (f_m + f_o) / relevant,
    })
}

/// Full continuous Kano pipeline: normalize, score and aggregate per feature.
pub fn kano_values(
    feature_ids: &[usize],
    responses: &[KanoResponse],
    stakeholders: &[Stakeholder],
) -> Result<Vec<FeatureKanoProfile>> {
    let known: HashSet<u32> = stakeholders.iter().map(|s| s.id).collect();
    let mut scores = Vec::with_capacity(responses.len());
    for r in responses {
        if !known.contains(&r.stakeholder_id) {
            return Err(ArpError::InvalidValue(format!(
                "response for feature {} references unknown stakeholder {}",
                r.feature_id, r.stakeholder_id
            )));
        }
        scores.push(kano_scores(&normalize_kano(r)?));
    }
    feature_ids
        .iter()
        .map(|&fid| aggregate_kano(fid, &scores, stakeholders))
        .collect()
}
