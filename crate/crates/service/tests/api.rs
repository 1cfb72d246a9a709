use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use arp_core::dataio::{parse_dataset_json, to_json};
use arp_core::fixtures;
use arp_core::pipeline::{self, SolveRequest, WhatIfRequest};
use arp_service::{router, AppState, ServiceOptions};

fn app() -> axum::Router {
    router(AppState::new(ServiceOptions::default()).unwrap())
}

async fn call(app: &axum::Router, method: &str, uri: &str, body: &str) -> (StatusCode, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_owned()))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn upload(app: &axum::Router, text: &str) -> String {
    let (status, body) = call(app, "POST", "/api/datasets", text).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    let v: Value = serde_json::from_str(&body).unwrap();
    v["id"].as_str().unwrap().to_owned()
}

#[tokio::test]
async fn health_is_ok() {
    let (status, _) = call(&app(), "GET", "/api/health", "").await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn solve_motivating_returns_six_plans_matching_pipeline_bytes() {
    let app = app();
    let id = upload(&app, fixtures::MOTIVATING_JSON).await;
    let body = r#"{"capacities":[3],"step":0.001}"#;
    let (status, text) = call(&app, "POST", &format!("/api/datasets/{id}/solve"), body).await;
    assert_eq!(status, StatusCode::OK, "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    let pts: Vec<(f64, f64)> = v["plans"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["ts"].as_f64().unwrap(), p["tds"].as_f64().unwrap()))
        .collect();
    assert_eq!(pts.len(), 6);
    for want in [(6.0, 25.0), (12.0, 27.0), (14.0, 28.0), (24.0, 38.0), (25.0, 40.0), (27.0, 46.0)] {
        assert!(pts.contains(&want));
    }
    let ds = parse_dataset_json(fixtures::MOTIVATING_JSON).unwrap();
    let req: SolveRequest = serde_json::from_str(body).unwrap();
    let (_, _, direct) = pipeline::solve(&ds, &req, None).unwrap();
    assert_eq!(text, to_json(&direct));
}

#[tokio::test]
async fn whatif_high_alpha_picks_first_three() {
    let app = app();
    let id = upload(&app, fixtures::MOTIVATING_JSON).await;
    let (status, text) = call(&app, "POST", &format!("/api/datasets/{id}/whatif"), r#"{"alpha":0.9}"#).await;
    assert_eq!(status, StatusCode::OK, "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["plan"]["features"], serde_json::json!([1, 2, 3]));
    let direct = pipeline::whatif(
        &parse_dataset_json(fixtures::MOTIVATING_JSON).unwrap(),
        &WhatIfRequest {
            alpha: Some(0.9),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(text, to_json(&direct));
}

#[tokio::test]
async fn weight_overrides_conflict_on_precomputed_but_work_on_raw() {
    let app = app();
    let pre = upload(&app, fixtures::MOTIVATING_JSON).await;
    let body = r#"{"stakeholder_weight_overrides":{"1":5}}"#;
    let (status, text) = call(&app, "POST", &format!("/api/datasets/{pre}/whatif"), body).await;
    assert_eq!(status, StatusCode::CONFLICT, "{text}");
    let raw = upload(&app, fixtures::MOTIVATING_ONEPOINT_JSON).await;
    let (status, text) = call(&app, "POST", &format!("/api/datasets/{raw}/whatif"), body).await;
    assert_eq!(status, StatusCode::OK, "{text}");
}

#[tokio::test]
async fn unknown_id_is_404() {
    let app = app();
    for (m, path) in [
        ("POST", "/api/datasets/ds-999/solve"),
        ("POST", "/api/datasets/ds-999/whatif"),
        ("POST", "/api/datasets/ds-999/baselines"),
        ("GET", "/api/datasets/ds-999/features"),
    ] {
        let (status, _) = call(&app, m, path, "{}").await;
        assert_eq!(status, StatusCode::NOT_FOUND, "{m} {path}");
    }
}

#[tokio::test]
async fn invalid_dataset_lists_every_problem() {
    let bad = r#"{
        "features":[{"id":1,"effort":-1},{"id":1,"effort":1}],
        "valuation":{"method":"precomputed","values":[]}
    }"#;
    let (status, text) = call(&app(), "POST", "/api/datasets", bad).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["code"], "VALIDATION_ERROR");
    assert!(v["diagnostics"].as_array().unwrap().len() >= 2, "{text}");
}

#[tokio::test]
async fn malformed_bodies_are_422() {
    let app = app();
    let (status, _) = call(&app, "POST", "/api/datasets", "{not json").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let id = upload(&app, fixtures::MOTIVATING_JSON).await;
    let (status, text) = call(&app, "POST", &format!("/api/datasets/{id}/solve"), r#"{"step":0.7}"#).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{text}");
    let (status, _) = call(&app, "POST", &format!("/api/datasets/{id}/whatif"), r#"{"alpha":1.0}"#).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn baselines_classify_against_latest_solve() {
    let app = app();
    let id = upload(&app, fixtures::MOTIVATING_JSON).await;
    call(&app, "POST", &format!("/api/datasets/{id}/solve"), "{}").await;
    let body = r#"{"heuristics":["H1","H7"],"random_reps":50,"seed":7}"#;
    let (status, text) = call(&app, "POST", &format!("/api/datasets/{id}/baselines"), body).await;
    assert_eq!(status, StatusCode::OK, "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["reference"].as_array().unwrap().len(), 6);
    assert_eq!(v["heuristics"][0]["label"], "IDENTICAL");
    assert_eq!(v["heuristics"][1]["label"], "DOMINATED");
    assert_eq!(v["classification"]["new_pareto"], 0);
    let (_, again) = call(&app, "POST", &format!("/api/datasets/{id}/baselines"), body).await;
    assert_eq!(text, again);
}

const KANO_DATASET: &str = r#"{
    "features": [{"id": 1, "name": "Guide", "effort": 2}, {"id": 2, "effort": 1}],
    "stakeholders": [{"id": 1, "weight": 3}, {"id": 2, "weight": 1}],
    "valuation": {"method": "kano", "responses": [
        {"feature_id": 1, "stakeholder_id": 1, "functional": [100, 0, 0, 0, 0], "dysfunctional": [0, 0, 5, 11, 84]},
        {"feature_id": 1, "stakeholder_id": 2, "functional": [0, 0, 100, 0, 0], "dysfunctional": [0, 0, 0, 0, 100]},
        {"feature_id": 2, "stakeholder_id": 1, "functional": [100, 0, 0, 0, 0], "dysfunctional": [0, 0, 100, 0, 0]},
        {"feature_id": 2, "stakeholder_id": 2, "functional": [0, 0, 100, 0, 0], "dysfunctional": [0, 0, 100, 0, 0]}
    ]},
    "release": {"capacities": [2]}
}"#;

#[tokio::test]
async fn features_expose_kano_profiles() {
    let app = app();
    let id = upload(&app, KANO_DATASET).await;
    let (status, text) = call(&app, "GET", &format!("/api/datasets/{id}/features"), "").await;
    assert_eq!(status, StatusCode::OK, "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    let row = &v[0];
    assert!(row["kano"].is_object());
    assert!(row["dominant_attribute"].is_string());
    assert_eq!(row["name"], "Guide");
    assert!(row["satisfaction"].as_f64().unwrap() > 0.0);
}

#[tokio::test]
async fn concurrent_identical_requests_agree() {
    let app = app();
    let id = upload(&app, fixtures::MOTIVATING_JSON).await;
    let uri = format!("/api/datasets/{id}/solve");
    let tasks: Vec<_> = (0..8)
        .map(|_| {
            let app = app.clone();
            let uri = uri.clone();
            tokio::spawn(async move { call(&app, "POST", &uri, r#"{"step":0.01}"#).await })
        })
        .collect();
    let mut bodies = Vec::new();
    for t in tasks {
        bodies.push(t.await.unwrap().1);
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
}

#[tokio::test]
async fn reupload_gets_new_id_and_spool_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let opts = ServiceOptions {
        spool_dir: Some(dir.path().to_path_buf()),
        ..Default::default()
    };
    let app = router(AppState::new(opts.clone()).unwrap());
    let a = upload(&app, fixtures::MOTIVATING_JSON).await;
    let b = upload(&app, fixtures::MOTIVATING_JSON).await;
    assert_ne!(a, b);
    let restarted = router(AppState::new(opts).unwrap());
    let (status, _) = call(&restarted, "GET", &format!("/api/datasets/{b}/features"), "").await;
    assert_eq!(status, StatusCode::OK);
    let c = upload(&restarted, fixtures::MOTIVATING_JSON).await;
    assert!(c != a && c != b);
}

#[tokio::test]
async fn diff_endpoint() {
    let (status, text) = call(&app(), "POST", "/api/analyze/diff", r#"{"a":[1,2,3],"b":[2,3,4]}"#).await;
    assert_eq!(status, StatusCode::OK);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v, serde_json::json!([1, 4]));
}
