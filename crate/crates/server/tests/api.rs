// SPDX-License-Identifier: Apache-2.0

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use mention_lens_core::annotation::{Campaign, CampaignConfig, STATE_FILE};
use mention_lens_core::model::{MentionRecord, TagsetRegistry};
use mention_lens_server::{router, shared};

fn setup(dir: &std::path::Path) -> Router {
    let mentions = (0..3)
        .map(|i| MentionRecord {
            mention_id: format!("m{i}"),
            software_raw: "Stata".into(),
            context: Some("Analyses used Stata 14.".into()),
            pub_id: format!("p{i}"),
            pub_urls: vec!["https://doi.org/10.1/p".into()],
            ..Default::default()
        })
        .collect();
    let cfg = CampaignConfig::new("api", vec!["SD".into(), "OK".into()]);
    let c = Campaign::init(dir, cfg, mentions, TagsetRegistry::builtin()).unwrap();
    router(shared(c))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let res = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    let v = serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()));
    (status, v)
}

fn valid() -> Value {
    json!({"retrieval_quality": "Y", "mention_type": "NAM", "mention_quality": "SN", "confidence": 4})
}

#[tokio::test]
async fn submit_flips_pending_to_done() {
    let dir = tempfile::tempdir().unwrap();
    let app = setup(dir.path());
    let (s, v) = call(&app, Method::GET, "/api/mentions?annotator=SD", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v[0]["statuses"]["SD"]["status"], "PENDING");

    let (s, v) = call(&app, Method::PUT, "/api/mentions/m0/annotations/SD", Some(valid())).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], "DONE");
    assert_eq!(v["version"], 1);

    let (_, v) = call(&app, Method::GET, "/api/mentions/m0", None).await;
    assert_eq!(v["slots"][0]["status"], "DONE");
    assert_eq!(v["slots"][1]["status"], "PENDING");
    // Persisted before the response.
    let state = std::fs::read_to_string(dir.path().join(STATE_FILE)).unwrap();
    assert!(state.contains("m0,SD,DONE,1,"));
}

#[tokio::test]
async fn na_with_type_is_rejected_with_rule() {
    let dir = tempfile::tempdir().unwrap();
    let app = setup(dir.path());
    let body = json!({"retrieval_quality": "Y", "mention_type": "PUB", "mention_quality": "NA", "confidence": 3});
    let (s, v) = call(&app, Method::PUT, "/api/mentions/m1/annotations/OK", Some(body)).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"], "validation");
    assert_eq!(v["violations"][0]["field"], "mention_type");
    assert_eq!(v["violations"][0]["rule"], "na-excludes-layer");
    let (_, v) = call(&app, Method::GET, "/api/progress", None).await;
    assert_eq!(v["overall"]["done"], 0);
}

#[tokio::test]
async fn double_submit_second_wins() {
    let dir = tempfile::tempdir().unwrap();
    let app = setup(dir.path());
    let mut second = valid();
    second["mention_type"] = json!("PUB");
    let (a, b) = tokio::join!(
        call(&app, Method::PUT, "/api/mentions/m2/annotations/SD", Some(valid())),
        call(&app, Method::PUT, "/api/mentions/m2/annotations/SD", Some(second.clone())),
    );
    assert_eq!((a.0, b.0), (StatusCode::OK, StatusCode::OK));
    let mut versions = [a.1["version"].as_u64().unwrap(), b.1["version"].as_u64().unwrap()];
    versions.sort();
    assert_eq!(versions, [1, 2]);

    let (_, v) = call(&app, Method::PUT, "/api/mentions/m2/annotations/SD", Some(second)).await;
    assert_eq!(v["version"], 3);
    let (_, v) = call(&app, Method::GET, "/api/mentions/m2", None).await;
    assert_eq!(v["slots"][0]["version"], 3);
    assert_eq!(v["slots"][0]["record"]["mention_type"], "PUB");
}

#[tokio::test]
async fn warnings_are_separate_from_violations() {
    let dir = tempfile::tempdir().unwrap();
    let app = setup(dir.path());
    let body = json!({"retrieval_quality": "Y", "mention_type": "URL", "confidence": 1});
    let (s, v) = call(&app, Method::POST, "/api/mentions/m0/annotations/SD/check", Some(body.clone())).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["violations"], json!([]));
    let ids: Vec<&str> = v["warnings"].as_array().unwrap().iter().map(|w| w["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["url-type-without-url", "adjudicate"]);
    let (s, v) = call(&app, Method::PUT, "/api/mentions/m0/annotations/SD", Some(body)).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["warnings"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn skip_reset_and_thread() {
    let dir = tempfile::tempdir().unwrap();
    let app = setup(dir.path());
    let (s, v) = call(&app, Method::POST, "/api/mentions/m1/annotations/SD/skip", Some(json!({"note": "needs PDF"}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], "SKIPPED");
    let (_, v) = call(&app, Method::POST, "/api/mentions/m1/annotations/SD/reset", Some(json!({"note": "discussed"}))).await;
    assert_eq!((v["status"].as_str(), v["version"].as_u64()), (Some("PENDING"), Some(2)));
    let (_, v) = call(&app, Method::GET, "/api/mentions/m1", None).await;
    let notes: Vec<&str> = v["thread"].as_array().unwrap().iter().map(|e| e["record"]["notes"].as_str().unwrap()).collect();
    assert_eq!(notes, ["needs PDF", "discussed"]);
    let (_, v) = call(&app, Method::GET, "/api/progress", None).await;
    let o = &v["overall"];
    assert_eq!(o["pending"].as_u64().unwrap() + o["done"].as_u64().unwrap() + o["skipped"].as_u64().unwrap(), 6);
}

#[tokio::test]
async fn schema_and_reference_errors() {
    let dir = tempfile::tempdir().unwrap();
    let app = setup(dir.path());
    let (s, v) = call(&app, Method::PUT, "/api/mentions/m0/annotations/SD", Some(json!({"colour": "red"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "bad-request");
    let (s, v) = call(&app, Method::PUT, "/api/mentions/zz/annotations/SD", Some(valid())).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["violations"][0]["rule"], "unknown-reference");
    let (s, _) = call(&app, Method::GET, "/api/mentions/zz", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = call(&app, Method::GET, "/api/export/nobody", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = call(&app, Method::GET, "/api/nothing", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn legends_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let app = setup(dir.path());
    let (_, v) = call(&app, Method::GET, "/api/tagsets", None).await;
    let mt = v.as_array().unwrap().iter().find(|l| l["layer"] == "mention_type").unwrap();
    let orders: Vec<u64> = mt["codes"].as_array().unwrap().iter().map(|c| c["order"].as_u64().unwrap()).collect();
    assert_eq!(orders.len(), 7);
    assert!(mt["codes"][0]["definition"].as_str().is_some_and(|d| !d.is_empty()));

    call(&app, Method::PUT, "/api/mentions/m0/annotations/SD", Some(valid())).await;
    call(&app, Method::PUT, "/api/mentions/m0/annotations/OK", Some(valid())).await;
    let (s, v) = call(&app, Method::GET, "/api/export", None).await;
    assert_eq!(s, StatusCode::OK);
    let text = v.as_str().unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("m0,")).count(), 2);
    let (_, v) = call(&app, Method::GET, "/api/export/SD", None).await;
    assert_eq!(v.as_str().unwrap().lines().filter(|l| l.starts_with('m') && !l.starts_with("mention_id")).count(), 3);
    let (s, v) = call(&app, Method::GET, "/api/agreement?pooling=average", None).await;
    assert_eq!(s, StatusCode::OK);
    assert!(v.as_array().unwrap().iter().any(|e| e["layer"] == "all_layers"));
}
