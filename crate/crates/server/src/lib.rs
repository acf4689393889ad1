// SPDX-License-Identifier: Apache-2.0

//! Local HTTP API over one annotation campaign.
//!
//! All mutations go through a single write lock, which tokio grants in
//! request order; each is persisted before the response is sent. Reads run
//! concurrently and see the latest acknowledged state. Endpoints are
//! documented in `API.md` next to this crate's manifest.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::RwLock;

use mention_lens_core::annotation::{
    guideline_checks, layer, Advisory, AnnotationError, Campaign, LayerKind, LogEntry, Pooling,
    Progress, Receipt, Slot, Status,
};
use mention_lens_core::model::{AnnotationRecord, MentionRecord, TagCode, Violation};

pub type Shared = Arc<RwLock<Campaign>>;

/// Error body: `{"error": kind, "message": text, "violations": [...]}`.
#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
}

impl ApiError {
    fn new(status: StatusCode, error: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            error,
            message: message.into(),
            violations: Vec::new(),
        }
    }

    fn not_found(what: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "not-found", what)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<AnnotationError> for ApiError {
    fn from(e: AnnotationError) -> Self {
        match e {
            AnnotationError::Rejected(violations) => ApiError {
                status: StatusCode::UNPROCESSABLE_ENTITY,
                error: "validation",
                message: "record violates blocking rules".into(),
                violations,
            },
            AnnotationError::UnknownAnnotator(a) => ApiError::not_found(format!("unknown annotator {a:?}")),
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", other.to_string()),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad-request", e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad-request", e.body_text())
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// Annotation payload; ids come from the path.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationInput {
    #[serde(default)]
    pub retrieval_quality: Option<String>,
    #[serde(default)]
    pub mention_type: Option<String>,
    #[serde(default)]
    pub mention_quality: Option<String>,
    #[serde(default)]
    pub found_url: Option<String>,
    #[serde(default)]
    pub link_quality: Option<String>,
    #[serde(default)]
    pub license_spdx_or_name: Option<String>,
    #[serde(default)]
    pub license_category: Option<String>,
    #[serde(default)]
    pub is_preprint: Option<bool>,
    #[serde(default)]
    pub is_software_paper: Option<bool>,
    #[serde(default)]
    pub confidence: Option<u8>,
    #[serde(default)]
    pub notes: Option<String>,
}

fn nonempty(s: Option<String>) -> Option<String> {
    s.map(|v| v.trim().to_string()).filter(|v| !v.is_empty())
}

impl AnnotationInput {
    pub fn into_record(self, mention_id: &str, annotator_id: &str) -> AnnotationRecord {
        AnnotationRecord {
            mention_id: mention_id.to_string(),
            annotator_id: annotator_id.to_string(),
            retrieval_quality: nonempty(self.retrieval_quality).unwrap_or_default(),
            mention_type: nonempty(self.mention_type),
            mention_quality: nonempty(self.mention_quality),
            found_url: nonempty(self.found_url),
            link_quality: nonempty(self.link_quality),
            license_spdx_or_name: nonempty(self.license_spdx_or_name),
            license_category: nonempty(self.license_category),
            is_preprint: self.is_preprint,
            is_software_paper: self.is_software_paper,
            confidence: self.confidence.unwrap_or(0),
            notes: self.notes.filter(|n| !n.trim().is_empty()),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoteInput {
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Debug, Serialize)]
struct CampaignInfo<'a> {
    campaign_id: &'a str,
    layers: &'a [String],
    annotators: &'a [String],
    mentions: usize,
}

#[derive(Debug, Serialize)]
struct LayerLegend {
    layer: &'static str,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    tagset: Option<&'static str>,
    codes: Vec<TagCode>,
}

#[derive(Debug, Serialize)]
struct SlotView<'a> {
    annotator_id: &'a str,
    status: Status,
    version: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    record: Option<&'a AnnotationRecord>,
    warnings: Vec<Advisory>,
}

#[derive(Debug, Serialize)]
struct MentionSummary<'a> {
    mention_id: &'a str,
    software_raw: &'a str,
    pub_id: &'a str,
    statuses: BTreeMap<&'a str, StatusView>,
}

#[derive(Debug, Serialize)]
struct StatusView {
    status: Status,
    version: u64,
}

#[derive(Debug, Serialize)]
struct MentionDetail<'a> {
    mention: &'a MentionRecord,
    slots: Vec<SlotView<'a>>,
    legends: Vec<LayerLegend>,
    thread: Vec<LogEntry>,
}

#[derive(Debug, Serialize)]
struct CheckResult {
    violations: Vec<Violation>,
    warnings: Vec<Advisory>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ListQuery {
    annotator: Option<String>,
    status: Option<Status>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgreementQuery {
    #[serde(default)]
    pooling: Option<Pooling>,
}

fn legends(c: &Campaign) -> Vec<LayerLegend> {
    c.config()
        .layers
        .iter()
        .filter_map(|name| layer(name))
        .map(|l| match l.kind {
            LayerKind::Code(ts) => LayerLegend {
                layer: l.name,
                kind: "code",
                tagset: Some(ts),
                codes: c.registry().get(ts).map(|t| t.codes.clone()).unwrap_or_default(),
            },
            LayerKind::Flag => LayerLegend {
                layer: l.name,
                kind: "flag",
                tagset: None,
                codes: Vec::new(),
            },
            LayerKind::Text => LayerLegend {
                layer: l.name,
                kind: "text",
                tagset: None,
                codes: Vec::new(),
            },
        })
        .collect()
}

async fn index() -> Json<serde_json::Value> {
    Json(serde_json::json!({
        "service": "mention-lens annotation API",
        "endpoints": [
            "GET /api/campaign",
            "GET /api/tagsets",
            "GET /api/mentions",
            "GET /api/mentions/{mention_id}",
            "PUT /api/mentions/{mention_id}/annotations/{annotator_id}",
            "POST /api/mentions/{mention_id}/annotations/{annotator_id}/check",
            "POST /api/mentions/{mention_id}/annotations/{annotator_id}/skip",
            "POST /api/mentions/{mention_id}/annotations/{annotator_id}/reset",
            "GET /api/progress",
            "GET /api/agreement",
            "GET /api/export",
            "GET /api/export/{annotator_id}"
        ]
    }))
}

async fn campaign_info(State(s): State<Shared>) -> Response {
    let c = s.read().await;
    Json(CampaignInfo {
        campaign_id: &c.config().campaign_id,
        layers: &c.config().layers,
        annotators: &c.config().annotators,
        mentions: c.mentions().len(),
    })
    .into_response()
}

async fn tagsets(State(s): State<Shared>) -> Response {
    let c = s.read().await;
    Json(legends(&c)).into_response()
}

async fn list_mentions(State(s): State<Shared>, q: Result<Query<ListQuery>, QueryRejection>) -> Result<Response, ApiError> {
    let Query(q) = q?;
    let c = s.read().await;
    if let Some(a) = &q.annotator {
        if !c.is_annotator(a) {
            return Err(ApiError::not_found(format!("unknown annotator {a:?}")));
        }
    }
    let annotators = &c.config().annotators;
    let out: Vec<MentionSummary> = c
        .mentions()
        .iter()
        .filter_map(|m| {
            let slots = c.slots_of(&m.mention_id).expect("sampled mention");
            let statuses: BTreeMap<&str, StatusView> = annotators
                .iter()
                .zip(slots)
                .filter(|(a, _)| q.annotator.as_ref().map_or(true, |want| want == *a))
                .map(|(a, s)| {
                    (a.as_str(), StatusView {
                        status: s.status,
                        version: s.version,
                    })
                })
                .collect();
            if let Some(st) = q.status {
                if !statuses.values().any(|v| v.status == st) {
                    return None;
                }
            }
            Some(MentionSummary {
                mention_id: &m.mention_id,
                software_raw: &m.software_raw,
                pub_id: &m.pub_id,
                statuses,
            })
        })
        .collect();
    Ok(Json(out).into_response())
}

async fn mention_detail(State(s): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let c = s.read().await;
    let m = c.mention(&id).ok_or_else(|| ApiError::not_found(format!("unknown mention {id:?}")))?;
    let slots: &[Slot] = c.slots_of(&id).expect("sampled mention");
    let views = c
        .config()
        .annotators
        .iter()
        .zip(slots)
        .map(|(a, s)| SlotView {
            annotator_id: a,
            status: s.status,
            version: s.version,
            record: s.record.as_ref(),
            warnings: s.record.as_ref().map(|r| guideline_checks(r, m)).unwrap_or_default(),
        })
        .collect();
    let detail = MentionDetail {
        mention: m,
        slots: views,
        legends: legends(&c),
        thread: c.thread(&id).map_err(ApiError::from)?,
    };
    Ok(Json(detail).into_response())
}

async fn submit(
    State(s): State<Shared>,
    Path((mention_id, annotator_id)): Path<(String, String)>,
    body: Result<Json<AnnotationInput>, JsonRejection>,
) -> ApiResult<Receipt> {
    let Json(input) = body?;
    let rec = input.into_record(&mention_id, &annotator_id);
    let mut c = s.write().await;
    Ok(Json(c.submit(rec)?))
}

async fn check(
    State(s): State<Shared>,
    Path((mention_id, annotator_id)): Path<(String, String)>,
    body: Result<Json<AnnotationInput>, JsonRejection>,
) -> ApiResult<CheckResult> {
    let Json(input) = body?;
    let rec = input.into_record(&mention_id, &annotator_id);
    let c = s.read().await;
    let violations = c.check(&rec)?;
    let warnings = c.mention(&mention_id).map(|m| guideline_checks(&rec, m)).unwrap_or_default();
    Ok(Json(CheckResult { violations, warnings }))
}

async fn skip(
    State(s): State<Shared>,
    Path((mention_id, annotator_id)): Path<(String, String)>,
    body: Result<Json<NoteInput>, JsonRejection>,
) -> ApiResult<Receipt> {
    let Json(n) = body?;
    let mut c = s.write().await;
    Ok(Json(c.skip(&mention_id, &annotator_id, n.note)?))
}

async fn reset(
    State(s): State<Shared>,
    Path((mention_id, annotator_id)): Path<(String, String)>,
    body: Result<Json<NoteInput>, JsonRejection>,
) -> ApiResult<Receipt> {
    let Json(n) = body?;
    let mut c = s.write().await;
    Ok(Json(c.reset(&mention_id, &annotator_id, n.note)?))
}

async fn progress(State(s): State<Shared>) -> Json<Progress> {
    Json(s.read().await.progress())
}

async fn agreement(State(s): State<Shared>, q: Result<Query<AgreementQuery>, QueryRejection>) -> Result<Response, ApiError> {
    let Query(q) = q?;
    let c = s.read().await;
    Ok(Json(c.agreement(&[], q.pooling.unwrap_or_default())).into_response())
}

fn csv_response(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], bytes).into_response()
}

async fn export_all(State(s): State<Shared>) -> Result<Response, ApiError> {
    let c = s.read().await;
    Ok(csv_response(c.export_all(Vec::new())?))
}

async fn export_sheet(State(s): State<Shared>, Path(annotator): Path<String>) -> Result<Response, ApiError> {
    let c = s.read().await;
    Ok(csv_response(c.export_sheet(&annotator, Vec::new())?))
}

async fn fallback() -> ApiError {
    ApiError::not_found("no such endpoint")
}

/// The API router over a loaded campaign.
pub fn router(campaign: Shared) -> Router {
    Router::new()
        .route("/", get(index))
        .route("/api/campaign", get(campaign_info))
        .route("/api/tagsets", get(tagsets))
        .route("/api/mentions", get(list_mentions))
        .route("/api/mentions/{mention_id}", get(mention_detail))
        .route("/api/mentions/{mention_id}/annotations/{annotator_id}", put(submit))
        .route("/api/mentions/{mention_id}/annotations/{annotator_id}/check", post(check))
        .route("/api/mentions/{mention_id}/annotations/{annotator_id}/skip", post(skip))
        .route("/api/mentions/{mention_id}/annotations/{annotator_id}/reset", post(reset))
        .route("/api/progress", get(progress))
        .route("/api/agreement", get(agreement))
        .route("/api/export", get(export_all))
        .route("/api/export/{annotator_id}", get(export_sheet))
        .fallback(fallback)
        .with_state(campaign)
}

pub fn shared(campaign: Campaign) -> Shared {
    Arc::new(RwLock::new(campaign))
}

/// Binds and serves until ctrl-c. `on_bound` receives the actual address.
pub async fn serve_campaign_api(
    campaign: Campaign,
    addr: SocketAddr,
    on_bound: impl FnOnce(SocketAddr),
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    on_bound(listener.local_addr()?);
    axum::serve(listener, router(shared(campaign)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
