//! HTTP/JSON front end over `arp_core::pipeline`.
//!
//! Every body is rendered with [`arp_core::dataio::to_json`] from the same
//! pipeline outputs the command line prints, so the two agree byte for byte.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use arp_core::analysis::symmetric_difference;
use arp_core::dataio::{dataset_from_value, from_json, to_json};
use arp_core::pipeline::{self, BaselineRequest, PlanSummary, SolveRequest, WhatIfRequest};
use arp_core::{ArpError, Diagnostic};

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);

#[derive(Debug, Clone)]
pub struct ServiceOptions {
    /// Wall-clock limit per computing request.
    pub request_timeout: Duration,
    /// Computations allowed to run at once.
    pub max_concurrent: usize,
    /// Worker cap inside each sweep; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Uploaded datasets are also written here and reloaded at start-up.
    pub spool_dir: Option<PathBuf>,
    /// Allowed CORS origin; any origin when `None`.
    pub cors_origin: Option<String>,
}

impl Default for ServiceOptions {
    fn default() -> Self {
        ServiceOptions {
            request_timeout: DEFAULT_TIMEOUT,
            max_concurrent: std::thread::available_parallelism().map_or(2, |n| n.get()),
            threads: None,
            spool_dir: None,
            cors_origin: None,
        }
    }
}

/// Shared server state. Datasets are immutable once stored.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    options: ServiceOptions,
    datasets: RwLock<HashMap<String, Arc<arp_core::dataio::Dataset>>>,
    latest_solve: RwLock<HashMap<String, Arc<Vec<PlanSummary>>>>,
    next_id: AtomicU64,
    permits: Arc<Semaphore>,
}

impl AppState {
    pub fn new(options: ServiceOptions) -> Result<Self, ArpError> {
        let permits = Arc::new(Semaphore::new(options.max_concurrent.max(1)));
        let state = AppState {
            inner: Arc::new(Inner {
                options,
                datasets: RwLock::new(HashMap::new()),
                latest_solve: RwLock::new(HashMap::new()),
                next_id: AtomicU64::new(1),
                permits,
            }),
        };
        if let Some(dir) = state.inner.options.spool_dir.clone() {
            state.load_spool(&dir)?;
        }
        Ok(state)
    }

    fn load_spool(&self, dir: &Path) -> Result<(), ArpError> {
        std::fs::create_dir_all(dir)?;
        let mut max_seen = 0;
        let mut map = self.inner.datasets.write().expect("dataset store poisoned");
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            let Some(id) = path.file_stem().and_then(|s| s.to_str()).map(str::to_owned) else {
                continue;
            };
            let Some(n) = id.strip_prefix("ds-").and_then(|n| n.parse::<u64>().ok()) else {
                continue;
            };
            if path.extension().is_some_and(|e| e == "json") {
                let dataset = arp_core::dataio::load_dataset(&path)?;
                map.insert(id, Arc::new(dataset));
                max_seen = max_seen.max(n);
            }
        }
        self.inner.next_id.store(max_seen + 1, Ordering::SeqCst);
        Ok(())
    }

    /// Stores a dataset under a fresh id.
    pub fn insert(&self, dataset: arp_core::dataio::Dataset) -> Result<String, ArpError> {
        let id = format!("ds-{}", self.inner.next_id.fetch_add(1, Ordering::SeqCst));
        if let Some(dir) = &self.inner.options.spool_dir {
            std::fs::write(dir.join(format!("{id}.json")), to_json(&dataset))?;
        }
        self.inner
            .datasets
            .write()
            .expect("dataset store poisoned")
            .insert(id.clone(), Arc::new(dataset));
        Ok(id)
    }

    pub fn get(&self, id: &str) -> Option<Arc<arp_core::dataio::Dataset>> {
        self.inner.datasets.read().expect("dataset store poisoned").get(id).cloned()
    }

    fn latest(&self, id: &str) -> Option<Arc<Vec<PlanSummary>>> {
        self.inner.latest_solve.read().expect("solve store poisoned").get(id).cloned()
    }

    fn set_latest(&self, id: &str, plans: Vec<PlanSummary>) {
        self.inner
            .latest_solve
            .write()
            .expect("solve store poisoned")
            .insert(id.to_owned(), Arc::new(plans));
    }

    /// Runs `f` on the blocking pool under the concurrency and time limits.
    async fn compute<T, F>(&self, f: F) -> Result<T, ApiError>
    where
        T: Send + 'static,
        F: FnOnce() -> Result<T, ArpError> + Send + 'static,
    {
        let permit = self
            .inner
            .permits
            .clone()
            .acquire_owned()
            .await
            .map_err(|_| ApiError::unavailable("worker pool closed"))?;
        // The permit travels with the task so a timed-out solve still counts
        // against the pool until it actually finishes.
        let task = tokio::task::spawn_blocking(move || {
            let _permit = permit;
            f()
        });
        match tokio::time::timeout(self.inner.options.request_timeout, task).await {
            Ok(Ok(r)) => r.map_err(ApiError::from),
            Ok(Err(e)) => Err(ApiError::internal(format!("worker failed: {e}"))),
            Err(_) => Err(ApiError {
                status: StatusCode::GATEWAY_TIMEOUT,
                body: ErrorBody::new("TIMEOUT", "request exceeded the configured time limit"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Diagnostic>,
}

impl ErrorBody {
    fn new(code: &str, message: impl Into<String>) -> Self {
        ErrorBody {
            code: code.into(),
            message: message.into(),
            diagnostics: Vec::new(),
        }
    }
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    fn not_found(id: &str) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            body: ErrorBody::new("NOT_FOUND", format!("no dataset with id '{id}'")),
        }
    }

    fn unavailable(msg: &str) -> Self {
        ApiError {
            status: StatusCode::SERVICE_UNAVAILABLE,
            body: ErrorBody::new("UNAVAILABLE", msg),
        }
    }

    fn internal(msg: String) -> Self {
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            body: ErrorBody::new("INTERNAL", msg),
        }
    }
}

impl From<ArpError> for ApiError {
    fn from(e: ArpError) -> Self {
        let status = if e.is_runtime() {
            StatusCode::INTERNAL_SERVER_ERROR
        } else {
            StatusCode::UNPROCESSABLE_ENTITY
        };
        let mut body = ErrorBody::new(e.code(), e.to_string());
        if let ArpError::Validation(d) = e {
            body.diagnostics = d;
        }
        ApiError { status, body }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json_response(self.status, to_json(&self.body))
    }
}

fn json_response(status: StatusCode, body: String) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))],
        body,
    )
        .into_response()
}

fn ok_json<T: Serialize>(value: &T) -> Response {
    json_response(StatusCode::OK, to_json(value))
}

/// Empty bodies read as `{}` so every request field can be omitted.
fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let text = std::str::from_utf8(body).map_err(|e| ApiError {
        status: StatusCode::UNPROCESSABLE_ENTITY,
        body: ErrorBody::new("PARSE_ERROR", format!("body is not UTF-8: {e}")),
    })?;
    let text = if text.trim().is_empty() { "{}" } else { text };
    from_json(text).map_err(ApiError::from)
}

fn dataset(state: &AppState, id: &str) -> Result<Arc<arp_core::dataio::Dataset>, ApiError> {
    state.get(id).ok_or_else(|| ApiError::not_found(id))
}

#[derive(Serialize)]
struct Created {
    id: String,
}

async fn health() -> Response {
    json_response(StatusCode::OK, to_json(&serde_json::json!({ "status": "ok" })))
}

async fn upload(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let value: serde_json::Value = parse_body(&body)?;
    let ds = dataset_from_value(value)?;
    let id = state.insert(ds)?;
    Ok(json_response(StatusCode::CREATED, to_json(&Created { id })))
}

async fn features(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let ds = dataset(&state, &id)?;
    let rows = state.compute(move || pipeline::feature_table(&ds)).await?;
    Ok(ok_json(&rows))
}

async fn solve(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let ds = dataset(&state, &id)?;
    let request: SolveRequest = parse_body(&body)?;
    let threads = state.inner.options.threads;
    let out = state
        .compute(move || pipeline::solve(&ds, &request, threads).map(|(_, _, o)| o))
        .await?;
    state.set_latest(&id, out.plans.clone());
    Ok(ok_json(&out))
}

async fn whatif(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let ds = dataset(&state, &id)?;
    let request: WhatIfRequest = parse_body(&body)?;
    let reweights = request.stakeholder_weight_overrides.as_ref().is_some_and(|o| !o.is_empty());
    if reweights && ds.is_precomputed() {
        return Err(ApiError {
            status: StatusCode::CONFLICT,
            body: ErrorBody::new(
                "PRECOMPUTED_VALUES",
                "stakeholder weights cannot change a dataset that carries precomputed values",
            ),
        });
    }
    let out = state.compute(move || pipeline::whatif(&ds, &request)).await?;
    Ok(ok_json(&out))
}

async fn baselines(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let ds = dataset(&state, &id)?;
    let request: BaselineRequest = parse_body(&body)?;
    let latest = state.latest(&id);
    let threads = state.inner.options.threads;
    let out = state
        .compute(move || pipeline::baselines(&ds, &request, latest.as_deref().map(Vec::as_slice), threads))
        .await?;
    Ok(ok_json(&out))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiffRequest {
    a: Vec<usize>,
    b: Vec<usize>,
}

async fn diff(body: Bytes) -> Result<Response, ApiError> {
    let request: DiffRequest = parse_body(&body)?;
    Ok(ok_json(&symmetric_difference(&request.a, &request.b)))
}

pub fn router(state: AppState) -> Router {
    let cors = match &state.inner.options.cors_origin {
        Some(origin) => match HeaderValue::from_str(origin) {
            Ok(v) => CorsLayer::new().allow_origin(AllowOrigin::exact(v)),
            Err(_) => CorsLayer::new(),
        },
        None => CorsLayer::new().allow_origin(Any),
    }
    .allow_methods(Any)
    .allow_headers(Any);

    Router::new()
        .route("/api/health", get(health))
        .route("/api/datasets", post(upload))
        .route("/api/datasets/{id}/features", get(features))
        .route("/api/datasets/{id}/solve", post(solve))
        .route("/api/datasets/{id}/whatif", post(whatif))
        .route("/api/datasets/{id}/baselines", post(baselines))
        .route("/api/analyze/diff", post(diff))
        .layer(cors)
        .with_state(state)
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, options: ServiceOptions) -> Result<(), ArpError> {
    let app = router(AppState::new(options)?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app).await?;
    Ok(())
}
