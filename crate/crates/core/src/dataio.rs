//! Dataset ingestion and result export.
//!
//! JSON is the canonical dataset format:
//!
//! ```json
//! {
//!   "name": "optional",
//!   "features": [{"id": 1, "name": "Replay", "effort": 1.0},
//!                {"id": 2, "effort_estimate": {"optimistic": 1, "most_likely": 2, "pessimistic": 9}}],
//!   "stakeholders": [{"id": 1, "weight": 5}],
//!   "valuation": {"method": "one_point", "responses": [...]},
//!   "release": {"capacities": [3.0]}
//! }
//! ```
//!
//! `valuation.method` is one of `precomputed` (`values`), `one_point`
//! (`responses`), `ahp` (`matrices`) or `kano` (`responses`). A directory
//! holding `features.csv`, `stakeholders.csv` and one of `values.csv`,
//! `onepoint.csv` or `kano.csv` is accepted as a CSV bundle.
//!
//! Validation collects every problem before failing. CSV exports render
//! numbers with six significant digits; JSON exports round-trip exactly.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use crate::analysis::{Rater, RankingTable};
use crate::baselines::{Classification, Label};
use crate::error::{ArpError, Diagnostic, Result};
use crate::model::{Feature, Objectives, ParetoResult, Plan, ReleaseConfig, Stakeholder};
use crate::planning::ArpInstance;
use crate::valuation::{
    ahp_values, kano_values, normalize_kano, one_point_values, pert_effort, AhpMatrix, ConsistencyWarning,
    FeatureKanoProfile, FeatureValues, KanoResponse, OnePointResponse, Perspective,
};

// ---------------------------------------------------------------------------
// Dataset schema

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffortEstimate {
    pub optimistic: f64,
    pub most_likely: f64,
    pub pessimistic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effort: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effort_estimate: Option<EffortEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StakeholderSpec {
    pub id: u32,
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnePointSpec {
    pub feature_id: usize,
    pub stakeholder_id: u32,
    pub sat: i64,
    pub dissat: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AhpMatrixSpec {
    pub stakeholder_id: u32,
    pub perspective: Perspective,
    pub entries: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ValuationSpec {
    Precomputed { values: Vec<FeatureValues> },
    OnePoint { responses: Vec<OnePointSpec> },
    Ahp { matrices: Vec<AhpMatrixSpec> },
    Kano { responses: Vec<KanoResponse> },
}

impl ValuationSpec {
    pub fn method(&self) -> &'static str {
        match self {
            ValuationSpec::Precomputed { .. } => "precomputed",
            ValuationSpec::OnePoint { .. } => "one_point",
            ValuationSpec::Ahp { .. } => "ahp",
            ValuationSpec::Kano { .. } => "kano",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReleaseSpec {
    pub capacities: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sat_discounts: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dissat_discounts: Option<Vec<f64>>,
}

impl ReleaseSpec {
    pub fn to_config(&self) -> Result<ReleaseConfig> {
        ReleaseConfig::with_optional_discounts(
            self.capacities.clone(),
            self.sat_discounts.clone(),
            self.dissat_discounts.clone(),
        )
    }
}

/// Dataset as written on disk, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub features: Vec<FeatureSpec>,
    #[serde(default)]
    pub stakeholders: Vec<StakeholderSpec>,
    pub valuation: ValuationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub release: Option<ReleaseSpec>,
}

/// A feature with its effort resolved (PERT triples collapsed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFeature {
    pub id: usize,
    pub name: String,
    pub effort: f64,
}

/// A validated, immutable dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    spec: DatasetSpec,
    features: Vec<DatasetFeature>,
    stakeholders: Vec<Stakeholder>,
    release: Option<ReleaseConfig>,
}

impl Serialize for Dataset {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.spec.serialize(serializer)
    }
}

/// Values derived from a dataset's valuation block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Valuation {
    pub values: Vec<FeatureValues>,
    /// Present for Kano datasets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kano_profiles: Option<Vec<FeatureKanoProfile>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub consistency_warnings: Vec<ConsistencyWarning>,
}

impl Dataset {
    pub fn from_spec(spec: DatasetSpec) -> Result<Self> {
        let mut diags = Vec::new();
        let dataset = validate_spec(spec, &mut diags);
        if diags.is_empty() {
            Ok(dataset.expect("no diagnostics implies a dataset"))
        } else {
            Err(ArpError::Validation(diags))
        }
    }

    pub fn spec(&self) -> &DatasetSpec {
        &self.spec
    }

    pub fn name(&self) -> Option<&str> {
        self.spec.name.as_deref()
    }

    pub fn features(&self) -> &[DatasetFeature] {
        &self.features
    }

    pub fn feature_ids(&self) -> Vec<usize> {
        self.features.iter().map(|f| f.id).collect()
    }

    pub fn stakeholders(&self) -> &[Stakeholder] {
        &self.stakeholders
    }

    /// Embedded release configuration, if any.
    pub fn release(&self) -> Option<&ReleaseConfig> {
        self.release.as_ref()
    }

    pub fn method(&self) -> &'static str {
        self.spec.valuation.method()
    }

    pub fn is_precomputed(&self) -> bool {
        matches!(self.spec.valuation, ValuationSpec::Precomputed { .. })
    }

    /// Per-feature `(S, DS)` in feature-id order.
    pub fn valuate(&self) -> Result<Valuation> {
        let ids = self.feature_ids();
        match &self.spec.valuation {
            ValuationSpec::Precomputed { values } => {
                let mut values = values.clone();
                values.sort_by_key(|v| v.feature_id);
                Ok(Valuation {
                    values,
                    kano_profiles: None,
                    consistency_warnings: Vec::new(),
                })
            }
            ValuationSpec::OnePoint { responses } => {
                let responses: Vec<OnePointResponse> = responses
                    .iter()
                    .map(|r| OnePointResponse {
                        feature_id: r.feature_id,
                        stakeholder_id: r.stakeholder_id,
                        sat: r.sat as u8,
                        dissat: r.dissat as u8,
                    })
                    .collect();
                Ok(Valuation {
                    values: one_point_values(&ids, &responses, &self.stakeholders)?,
                    kano_profiles: None,
                    consistency_warnings: Vec::new(),
                })
            }
            ValuationSpec::Ahp { matrices } => {
                let matrices = matrices
                    .iter()
                    .map(|m| AhpMatrix::new(m.stakeholder_id, m.perspective, m.entries.clone()))
                    .collect::<Result<Vec<_>>>()?;
                let (values, consistency_warnings) = ahp_values(&ids, &matrices, &self.stakeholders)?;
                Ok(Valuation {
                    values,
                    kano_profiles: None,
                    consistency_warnings,
                })
            }
            ValuationSpec::Kano { responses } => {
                let profiles = kano_values(&ids, responses, &self.stakeholders)?;
                Ok(Valuation {
                    values: profiles.iter().map(FeatureKanoProfile::values).collect(),
                    kano_profiles: Some(profiles),
                    consistency_warnings: Vec::new(),
                })
            }
        }
    }

    /// Builds a planning instance from already computed values.
    pub fn instance_with(&self, values: &[FeatureValues], config: ReleaseConfig) -> Result<ArpInstance> {
        let by_id: HashMap<usize, &FeatureValues> = values.iter().map(|v| (v.feature_id, v)).collect();
        let features = self
            .features
            .iter()
            .map(|f| {
                let v = by_id
                    .get(&f.id)
                    .ok_or_else(|| ArpError::InvalidValue(format!("no values for feature {}", f.id)))?;
                Feature::new(f.id, f.name.clone(), f.effort, v.satisfaction, v.dissatisfaction)
            })
            .collect::<Result<Vec<_>>>()?;
        ArpInstance::new(features, config)
    }

    /// Valuates and builds an instance. `config` overrides the embedded
    /// release block.
    pub fn instance(&self, config: Option<ReleaseConfig>) -> Result<ArpInstance> {
        let config = config.or_else(|| self.release.clone()).ok_or_else(|| {
            ArpError::InvalidValue("no release configuration: dataset has none and no capacities were given".into())
        })?;
        self.instance_with(&self.valuate()?.values, config)
    }

    /// Copy with some stakeholder weights replaced. Not meaningful for
    /// precomputed values.
    pub fn with_weight_overrides(&self, overrides: &BTreeMap<u32, u8>) -> Result<Dataset> {
        if self.is_precomputed() {
            return Err(ArpError::InvalidValue(
                "precomputed values carry no stakeholder responses to re-weight".into(),
            ));
        }
        let known: HashSet<u32> = self.stakeholders.iter().map(|s| s.id).collect();
        if let Some(id) = overrides.keys().find(|id| !known.contains(id)) {
            return Err(ArpError::InvalidValue(format!("unknown stakeholder {id}")));
        }
        let mut spec = self.spec.clone();
        for s in &mut spec.stakeholders {
            if let Some(&w) = overrides.get(&s.id) {
                s.weight = w as i64;
            }
        }
        Dataset::from_spec(spec)
    }
}

fn diag(diags: &mut Vec<Diagnostic>, location: impl Into<String>, message: impl Into<String>) {
    diags.push(Diagnostic {
        location: location.into(),
        message: message.into(),
    });
}

fn validate_spec(spec: DatasetSpec, diags: &mut Vec<Diagnostic>) -> Option<Dataset> {
    if spec.features.is_empty() {
        diag(diags, "features", "at least one feature is required");
    }

    let mut seen_features: HashSet<usize> = HashSet::new();
    let mut features = Vec::with_capacity(spec.features.len());
    for (i, f) in spec.features.iter().enumerate() {
        let loc = format!("features[{i}]");
        if !seen_features.insert(f.id) {
            diag(diags, format!("{loc}.id"), format!("duplicate feature id {}", f.id));
        }
        let effort = match (f.effort, f.effort_estimate) {
            (Some(e), None) => {
                if e.is_finite() && e >= 0.0 {
                    Some(e)
                } else {
                    diag(diags, format!("{loc}.effort"), format!("effort must be finite and >= 0, got {e}"));
                    None
                }
            }
            (None, Some(t)) => match pert_effort(t.optimistic, t.most_likely, t.pessimistic) {
                Ok(e) => Some(e),
                Err(err) => {
                    diag(diags, format!("{loc}.effort_estimate"), err.to_string());
                    None
                }
            },
            (Some(_), Some(_)) => {
                diag(diags, loc.clone(), "give either effort or effort_estimate, not both");
                None
            }
            (None, None) => {
                diag(diags, loc.clone(), "missing effort or effort_estimate");
                None
            }
        };
        features.push(DatasetFeature {
            id: f.id,
            name: f.name.clone().unwrap_or_else(|| format!("F{}", f.id)),
            effort: effort.unwrap_or(0.0),
        });
    }
    let n = seen_features.len();
    let mut sorted_ids: Vec<usize> = seen_features.iter().copied().collect();
    sorted_ids.sort_unstable();
    if sorted_ids.iter().enumerate().any(|(i, &id)| id != i + 1) {
        diag(
            diags,
            "features",
            format!("feature ids must be exactly 1..={n}, got {sorted_ids:?}"),
        );
    }
    features.sort_by_key(|f| f.id);
    features.dedup_by_key(|f| f.id);

    let mut seen_stakeholders: HashSet<u32> = HashSet::new();
    let mut stakeholders = Vec::with_capacity(spec.stakeholders.len());
    for (i, s) in spec.stakeholders.iter().enumerate() {
        let loc = format!("stakeholders[{i}]");
        if !seen_stakeholders.insert(s.id) {
            diag(diags, format!("{loc}.id"), format!("duplicate stakeholder id {}", s.id));
        }
        match u8::try_from(s.weight).ok().and_then(|w| Stakeholder::new(s.id, w).ok()) {
            Some(st) => stakeholders.push(st),
            None => diag(
                diags,
                format!("{loc}.weight"),
                format!("weight must be an integer in 0..=9, got {}", s.weight),
            ),
        }
    }
    let mut active: Vec<u32> = stakeholders.iter().filter(|s| s.is_active()).map(|s| s.id).collect();
    active.sort_unstable();
    active.dedup();

    let needs_stakeholders = !matches!(spec.valuation, ValuationSpec::Precomputed { .. });
    if needs_stakeholders && !spec.stakeholders.is_empty() && active.is_empty() && stakeholders.len() == spec.stakeholders.len() {
        diag(diags, "stakeholders", "every stakeholder has weight zero");
    }
    if needs_stakeholders && spec.stakeholders.is_empty() {
        diag(diags, "stakeholders", "this valuation method needs at least one stakeholder");
    }

    let ids = &sorted_ids;
    let known_feature = |id: usize| seen_features.contains(&id);
    let known_stakeholder = |id: u32| seen_stakeholders.contains(&id);
    match &spec.valuation {
        ValuationSpec::Precomputed { values } => {
            let mut covered = HashSet::new();
            for (i, v) in values.iter().enumerate() {
                let loc = format!("valuation.values[{i}]");
                if !known_feature(v.feature_id) {
                    diag(diags, format!("{loc}.feature_id"), format!("unknown feature {}", v.feature_id));
                } else if !covered.insert(v.feature_id) {
                    diag(diags, format!("{loc}.feature_id"), format!("duplicate values for feature {}", v.feature_id));
                }
                for (field, x) in [("satisfaction", v.satisfaction), ("dissatisfaction", v.dissatisfaction)] {
                    if !(x.is_finite() && x >= 0.0) {
                        diag(diags, format!("{loc}.{field}"), format!("must be finite and >= 0, got {x}"));
                    }
                }
            }
            for id in ids.iter().filter(|id| !covered.contains(id)) {
                diag(diags, "valuation.values", format!("missing values for feature {id}"));
            }
        }
        ValuationSpec::OnePoint { responses } => {
            let mut covered = HashSet::new();
            for (i, r) in responses.iter().enumerate() {
                let loc = format!("valuation.responses[{i}]");
                check_response_ids(diags, &loc, r.feature_id, r.stakeholder_id, &known_feature, &known_stakeholder);
                if !covered.insert((r.feature_id, r.stakeholder_id)) {
                    diag(diags, loc.clone(), format!("duplicate response for feature {} from stakeholder {}", r.feature_id, r.stakeholder_id));
                }
                for (field, x) in [("sat", r.sat), ("dissat", r.dissat)] {
                    if !(1..=9).contains(&x) {
                        diag(diags, format!("{loc}.{field}"), format!("score must be in 1..=9, got {x}"));
                    }
                }
            }
            report_missing(diags, ids, &active, &covered);
        }
        ValuationSpec::Kano { responses } => {
            let mut covered = HashSet::new();
            for (i, r) in responses.iter().enumerate() {
                let loc = format!("valuation.responses[{i}]");
                check_response_ids(diags, &loc, r.feature_id, r.stakeholder_id, &known_feature, &known_stakeholder);
                if !covered.insert((r.feature_id, r.stakeholder_id)) {
                    diag(diags, loc.clone(), format!("duplicate response for feature {} from stakeholder {}", r.feature_id, r.stakeholder_id));
                }
                if let Err(e) = normalize_kano(r) {
                    diag(diags, loc, e.to_string());
                }
            }
            report_missing(diags, ids, &active, &covered);
        }
        ValuationSpec::Ahp { matrices } => {
            let mut covered = HashSet::new();
            for (i, m) in matrices.iter().enumerate() {
                let loc = format!("valuation.matrices[{i}]");
                if !known_stakeholder(m.stakeholder_id) {
                    diag(diags, format!("{loc}.stakeholder_id"), format!("unknown stakeholder {}", m.stakeholder_id));
                }
                if !covered.insert((m.stakeholder_id, m.perspective)) {
                    diag(diags, loc.clone(), format!("duplicate {:?} matrix for stakeholder {}", m.perspective, m.stakeholder_id));
                }
                if m.entries.len() != n {
                    diag(diags, format!("{loc}.entries"), format!("matrix has {} rows, expected {n}", m.entries.len()));
                } else if let Err(e) = AhpMatrix::new(m.stakeholder_id, m.perspective, m.entries.clone()) {
                    diag(diags, format!("{loc}.entries"), e.to_string());
                }
            }
            for &sid in &active {
                for p in [Perspective::Sat, Perspective::Dissat] {
                    if !covered.contains(&(sid, p)) {
                        diag(diags, "valuation.matrices", format!("missing {p:?} matrix for stakeholder {sid}"));
                    }
                }
            }
        }
    }

    let release = match &spec.release {
        None => None,
        Some(r) => match r.to_config() {
            Ok(c) => Some(c),
            Err(e) => {
                diag(diags, "release", e.to_string());
                None
            }
        },
    };

    if !diags.is_empty() {
        return None;
    }
    Some(Dataset {
        spec,
        features,
        stakeholders,
        release,
    })
}

fn check_response_ids(
    diags: &mut Vec<Diagnostic>,
    loc: &str,
    feature_id: usize,
    stakeholder_id: u32,
    known_feature: &dyn Fn(usize) -> bool,
    known_stakeholder: &dyn Fn(u32) -> bool,
) {
    if !known_feature(feature_id) {
        diag(diags, format!("{loc}.feature_id"), format!("unknown feature {feature_id}"));
    }
    if !known_stakeholder(stakeholder_id) {
        diag(diags, format!("{loc}.stakeholder_id"), format!("unknown stakeholder {stakeholder_id}"));
    }
}

fn report_missing(diags: &mut Vec<Diagnostic>, features: &[usize], active: &[u32], covered: &HashSet<(usize, u32)>) {
    for &fid in features {
        for &sid in active {
            if !covered.contains(&(fid, sid)) {
                diag(
                    diags,
                    "valuation.responses",
                    format!("missing response for feature {fid} from stakeholder {sid}"),
                );
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Loading

fn json_error(e: serde_json::Error) -> ArpError {
    ArpError::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    }
}

/// Deserializes any JSON document, mapping failures to `PARSE_ERROR`.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(json_error)
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("result types serialize");
    s.push('\n');
    s
}

pub fn parse_dataset_json(text: &str) -> Result<Dataset> {
    Dataset::from_spec(from_json(text)?)
}

pub fn dataset_from_value(value: serde_json::Value) -> Result<Dataset> {
    Dataset::from_spec(serde_json::from_value(value).map_err(json_error)?)
}

/// Loads a JSON file or a CSV bundle directory.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    if path.is_dir() {
        load_csv_bundle(path)
    } else {
        parse_dataset_json(&std::fs::read_to_string(path)?)
    }
}

fn csv_error(file: &str, e: csv::Error) -> ArpError {
    let location = match e.position() {
        Some(p) => format!("{file} line {}", p.line()),
        None => file.to_string(),
    };
    ArpError::Parse {
        location,
        message: e.to_string(),
    }
}

fn read_csv<T: DeserializeOwned>(file: &str, text: &str) -> Result<Vec<T>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| csv_error(file, e)))
        .collect()
}

#[derive(Deserialize)]
struct FeatureRow {
    id: usize,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    effort: Option<f64>,
    #[serde(default)]
    optimistic: Option<f64>,
    #[serde(default)]
    most_likely: Option<f64>,
    #[serde(default)]
    pessimistic: Option<f64>,
}

#[derive(Deserialize)]
struct KanoRow {
    feature_id: usize,
    stakeholder_id: u32,
    u_like: f64,
    u_must_be: f64,
    u_neutral: f64,
    u_live_with: f64,
    u_dislike: f64,
    d_like: f64,
    d_must_be: f64,
    d_neutral: f64,
    d_live_with: f64,
    d_dislike: f64,
}

/// Reads `features.csv`, `stakeholders.csv` and one of `values.csv`,
/// `onepoint.csv` or `kano.csv` from `dir`.
pub fn load_csv_bundle(dir: &Path) -> Result<Dataset> {
    let read = |name: &str| -> Result<Option<String>> {
        let p = dir.join(name);
        if p.exists() {
            Ok(Some(std::fs::read_to_string(p)?))
        } else {
            Ok(None)
        }
    };
    let features_text = read("features.csv")?.ok_or_else(|| ArpError::Parse {
        location: dir.display().to_string(),
        message: "bundle has no features.csv".into(),
    })?;
    let features = read_csv::<FeatureRow>("features.csv", &features_text)?
        .into_iter()
        .map(|r| {
            let estimate = match (r.optimistic, r.most_likely, r.pessimistic) {
                (Some(o), Some(m), Some(p)) => Some(EffortEstimate {
                    optimistic: o,
                    most_likely: m,
                    pessimistic: p,
                }),
                _ => None,
            };
            FeatureSpec {
                id: r.id,
                name: r.name.filter(|n| !n.is_empty()),
                effort: r.effort,
                effort_estimate: estimate,
            }
        })
        .collect();
    let stakeholders = match read("stakeholders.csv")? {
        Some(t) => read_csv::<StakeholderSpec>("stakeholders.csv", &t)?,
        None => Vec::new(),
    };
    let valuation = if let Some(t) = read("kano.csv")? {
        ValuationSpec::Kano {
            responses: read_csv::<KanoRow>("kano.csv", &t)?
                .into_iter()
                .map(|r| KanoResponse {
                    feature_id: r.feature_id,
                    stakeholder_id: r.stakeholder_id,
                    functional: [r.u_like, r.u_must_be, r.u_neutral, r.u_live_with, r.u_dislike],
                    dysfunctional: [r.d_like, r.d_must_be, r.d_neutral, r.d_live_with, r.d_dislike],
                })
                .collect(),
        }
    } else if let Some(t) = read("onepoint.csv")? {
        ValuationSpec::OnePoint {
            responses: read_csv("onepoint.csv", &t)?,
        }
    } else if let Some(t) = read("values.csv")? {
        ValuationSpec::Precomputed {
            values: read_csv("values.csv", &t)?,
        }
    } else {
        return Err(ArpError::Parse {
            location: dir.display().to_string(),
            message: "bundle needs one of kano.csv, onepoint.csv or values.csv".into(),
        });
    };
    Dataset::from_spec(DatasetSpec {
        name: dir.file_name().map(|n| n.to_string_lossy().into_owned()),
        features,
        stakeholders,
        valuation,
        release: None,
    })
}

/// Ranking table with header `rater,label,<plan>,<plan>,...`.
pub fn parse_rankings_csv(text: &str) -> Result<RankingTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| csv_error("rankings", e))?.clone();
    if header.len() < 3 || &header[0] != "rater" || &header[1] != "label" {
        return Err(ArpError::Parse {
            location: "rankings line 1".into(),
            message: "header must be rater,label followed by one column per plan".into(),
        });
    }
    let subjects: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
    let mut raters = Vec::new();
    let mut ranks = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error("rankings", e))?;
        let line = record.position().map_or(0, |p| p.line());
        raters.push(Rater {
            id: record[0].to_string(),
            label: record[1].to_string(),
        });
        let row = record
            .iter()
            .skip(2)
            .map(|c| {
                c.parse::<u32>().map_err(|e| ArpError::Parse {
                    location: format!("rankings line {line}"),
                    message: format!("rank '{c}': {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ranks.push(row);
    }
    RankingTable::new(raters, subjects, ranks)
}

// ---------------------------------------------------------------------------
// Number and plan formatting

/// Renders `x` with six significant digits, without trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = 5 - magnitude;
    let s = if decimals > 0 {
        format!("{:.*}", decimals as usize, x)
    } else {
        let scale = 10f64.powi(-decimals);
        format!("{:.0}", (x / scale).round() * scale)
    };
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// `F1 F3` for single-release plans, `F1:1 F3:2` otherwise.
pub fn format_features(plan: &Plan) -> String {
    let k = plan.releases();
    plan.assignment()
        .iter()
        .enumerate()
        .filter(|(_, &r)| r <= k)
        .map(|(i, &r)| if k == 1 { format!("F{}", i + 1) } else { format!("F{}:{r}", i + 1) })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses `F1 F3:2 4` into `(feature id, release)` pairs; release defaults to 1.
pub fn parse_features(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split_whitespace()
        .map(|tok| {
            let bad = || ArpError::Parse {
                location: "features".into(),
                message: format!("cannot read feature token '{tok}'"),
            };
            let body = tok.strip_prefix('F').or_else(|| tok.strip_prefix('f')).unwrap_or(tok);
            let (id, release) = match body.split_once(':') {
                Some((a, b)) => (a, b.parse::<usize>().map_err(|_| bad())?),
                None => (body, 1),
            };
            Ok((id.parse::<usize>().map_err(|_| bad())?, release))
        })
        .collect()
}

fn join_sig(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(fmt_sig).collect::<Vec<_>>().join(";")
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub const PARETO_CSV_HEADER: [&str; 7] = ["plan_id", "features", "TS", "TDS", "effort", "stability_lo", "stability_hi"];

/// One row per trade-off plan, ids `P1, P2, ...` in result order.
pub fn pareto_csv(result: &ParetoResult) -> String {
    csv_string(
        &PARETO_CSV_HEADER,
        result.entries.iter().enumerate().map(|(i, e)| {
            vec![
                format!("P{}", i + 1),
                format_features(&e.plan),
                fmt_sig(e.plan.total_satisfaction()),
                fmt_sig(e.plan.total_dissatisfaction()),
                join_sig(e.plan.effort_used().iter().copied()),
                join_sig(e.stability.iter().map(|s| s.lo)),
                join_sig(e.stability.iter().map(|s| s.hi)),
            ]
        }),
    )
}

/// Plan rows without stability columns filled, for single solves and baselines.
pub fn plans_csv(ids: &[String], plans: &[Plan]) -> String {
    csv_string(
        &PARETO_CSV_HEADER,
        ids.iter().zip(plans).map(|(id, p)| {
            vec![
                id.clone(),
                format_features(p),
                fmt_sig(p.total_satisfaction()),
                fmt_sig(p.total_dissatisfaction()),
                join_sig(p.effort_used().iter().copied()),
                String::new(),
                String::new(),
            ]
        }),
    )
}

/// A plan row read back from a CSV export or a hand-written plan list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRow {
    pub plan_id: String,
    pub features: Vec<(usize, usize)>,
    pub ts: Option<f64>,
    pub tds: Option<f64>,
    pub effort: Vec<f64>,
    pub stability: Vec<(f64, f64)>,
}

impl PlanRow {
    pub fn offered(&self) -> BTreeSet<usize> {
        self.features.iter().map(|&(id, _)| id).collect()
    }

    pub fn objectives(&self) -> Option<Objectives> {
        Some(Objectives::new(self.ts?, self.tds?))
    }
}

fn split_numbers(cell: &str, what: &str, line: u64) -> Result<Vec<f64>> {
    cell.split(';')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(|c| {
            c.parse::<f64>().map_err(|e| ArpError::Parse {
                location: format!("line {line} column {what}"),
                message: format!("'{c}': {e}"),
            })
        })
        .collect()
}

/// Reads plan CSVs. Requires a `plan_id` column plus `features` and/or
/// `TS`/`TDS`; `effort`, `stability_lo` and `stability_hi` are optional.
/// Column names are matched case-insensitively.
pub fn parse_plans_csv(text: &str) -> Result<Vec<PlanRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| csv_error("plans", e))?.clone();
    let col = |names: &[&str]| {
        header
            .iter()
            .position(|h| names.iter().any(|n| h.eq_ignore_ascii_case(n)))
    };
    let id_col = col(&["plan_id", "plan", "id"]);
    let feat_col = col(&["features"]);
    let ts_col = col(&["TS", "satisfaction"]);
    let tds_col = col(&["TDS", "dissatisfaction"]);
    let effort_col = col(&["effort"]);
    let lo_col = col(&["stability_lo"]);
    let hi_col = col(&["stability_hi"]);
    if feat_col.is_none() && (ts_col.is_none() || tds_col.is_none()) {
        return Err(ArpError::Parse {
            location: "plans line 1".into(),
            message: "need a features column or both TS and TDS columns".into(),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error("plans", e))?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |c: Option<usize>| c.and_then(|c| record.get(c)).unwrap_or("");
        let one = |c: Option<usize>, what: &str| -> Result<Option<f64>> {
            Ok(split_numbers(cell(c), what, line)?.first().copied())
        };
        let lo = split_numbers(cell(lo_col), "stability_lo", line)?;
        let hi = split_numbers(cell(hi_col), "stability_hi", line)?;
        if lo.len() != hi.len() {
            return Err(ArpError::Parse {
                location: format!("plans line {line}"),
                message: "stability_lo and stability_hi list different interval counts".into(),
            });
        }
        let features = parse_features(cell(feat_col)).map_err(|e| match e {
            ArpError::Parse { message, .. } => ArpError::Parse {
                location: format!("plans line {line}"),
                message,
            },
            other => other,
        })?;
        rows.push(PlanRow {
            plan_id: match id_col {
                Some(_) if !cell(id_col).is_empty() => cell(id_col).to_string(),
                _ => format!("P{}", i + 1),
            },
            features,
            ts: one(ts_col, "TS")?,
            tds: one(tds_col, "TDS")?,
            effort: split_numbers(cell(effort_col), "effort", line)?,
            stability: lo.into_iter().zip(hi).collect(),
        });
    }
    Ok(rows)
}

/// Re-renders rows in the plan CSV layout.
pub fn plan_rows_csv(rows: &[PlanRow]) -> String {
    csv_string(
        &PARETO_CSV_HEADER,
        rows.iter().map(|r| {
            let k = r.features.iter().map(|&(_, k)| k).max().unwrap_or(1).max(r.effort.len());
            let features = r
                .features
                .iter()
                .map(|&(id, rel)| if k <= 1 { format!("F{id}") } else { format!("F{id}:{rel}") })
                .collect::<Vec<_>>()
                .join(" ");
            vec![
                r.plan_id.clone(),
                features,
                r.ts.map(fmt_sig).unwrap_or_default(),
                r.tds.map(fmt_sig).unwrap_or_default(),
                join_sig(r.effort.iter().copied()),
                join_sig(r.stability.iter().map(|s| s.0)),
                join_sig(r.stability.iter().map(|s| s.1)),
            ]
        }),
    )
}

/// Plans with their classification labels.
pub fn labelled_plans_csv(ids: &[String], plans: &[Plan], labels: &[Label]) -> String {
    csv_string(
        &["plan_id", "features", "TS", "TDS", "effort", "label"],
        ids.iter().zip(plans).enumerate().map(|(i, (id, p))| {
            vec![
                id.clone(),
                format_features(p),
                fmt_sig(p.total_satisfaction()),
                fmt_sig(p.total_dissatisfaction()),
                join_sig(p.effort_used().iter().copied()),
                labels.get(i).map(label_name).unwrap_or_default().to_string(),
            ]
        }),
    )
}

pub fn label_name(label: &Label) -> &'static str {
    match label {
        Label::Identical => "IDENTICAL",
        Label::Dominated => "DOMINATED",
        Label::NewPareto => "NEW_PARETO",
    }
}

pub fn classification_csv(ids: &[String], c: &Classification) -> String {
    csv_string(
        &["plan_id", "label"],
        ids.iter()
            .zip(&c.labels)
            .map(|(id, l)| vec![id.clone(), label_name(l).to_string()]),
    )
}

pub fn values_csv(values: &[FeatureValues]) -> String {
    csv_string(
        &["feature_id", "satisfaction", "dissatisfaction"],
        values
            .iter()
            .map(|v| vec![v.feature_id.to_string(), fmt_sig(v.satisfaction), fmt_sig(v.dissatisfaction)]),
    )
}

pub fn profiles_csv(profiles: &[FeatureKanoProfile]) -> String {
    csv_string(
        &["feature_id", "satisfaction", "dissatisfaction", "f_a", "f_o", "f_m", "f_i", "dominant"],
        profiles.iter().map(|p| {
            vec![
                p.feature_id.to_string(),
                fmt_sig(p.s),
                fmt_sig(p.ds),
                fmt_sig(p.f_a),
                fmt_sig(p.f_o),
                fmt_sig(p.f_m),
                fmt_sig(p.f_i),
                p.dominant_attribute().letter().to_string(),
            ]
        }),
    )
}
