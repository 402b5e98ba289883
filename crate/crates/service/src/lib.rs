//! HTTP API over in-memory design sessions.
//!
//! Every JSON response carries a `stats` block (voxels, domains, brick
//! counts, nt, cost) and the `revision` it reflects. Mutations take an
//! optional `if_revision`; a mismatch is answered with 409. GET responses
//! carry an `ETag` of the form `"<id>-<revision>"` and honour
//! `If-None-Match`.
//!
//! | method | path | body |
//! |---|---|---|
//! | POST | `/api/projects` | `{width_helices, height_helices, depth_bp, seed?, constraints?, options?}` |
//! | POST | `/api/projects/import` | raw `.3dna` document |
//! | GET | `/api/projects/{id}` | |
//! | POST | `/api/projects/{id}/voxels` | `{voxels: [[x,y,k]...], present, if_revision?}` |
//! | POST | `/api/projects/{id}/remove-box` | `{lo: [x,y,k], hi: [x,y,k], if_revision?}` |
//! | PUT | `/api/projects/{id}/dimensions` | `{width_helices, height_helices, depth_bp, if_revision?}` |
//! | PUT | `/api/projects/{id}/generation` | `{seed, constraints?, if_revision?}` |
//! | PUT | `/api/projects/{id}/options` | `{boundary_merge, protector_policy, if_revision?}` |
//! | GET | `/api/projects/{id}/strands?offset&limit` | |
//! | GET | `/api/projects/{id}/analysis` | |
//! | GET | `/api/projects/{id}/cost?rate` | |
//! | GET | `/api/projects/{id}/export/{csv,tex,3dna,txt}` | |

mod error;
mod session;

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{FromRequest, Path, Query, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use dnabrick::cost::{estimate_cost, CostConfig};
use dnabrick::io::{export_csv, export_latex, export_project, export_report, import_project};
use dnabrick::seqgen::Strand;
use dnabrick::{CanvasSpec, ConstraintConfig, DesignSummary, PlanOptions, Project, VoxelCoord};

pub use error::ApiError;
pub use session::{Session, SessionStore};

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    /// When set, every request must send `Authorization: Bearer <token>`.
    pub bearer_token: Option<String>,
    pub cost: CostConfig,
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
    pub config: Arc<ServiceConfig>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState {
            store: Arc::new(SessionStore::default()),
            config: Arc::new(config),
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/projects", post(create_project))
        .route("/api/projects/import", post(import))
        .route("/api/projects/{id}", get(get_project))
        .route("/api/projects/{id}/voxels", post(set_voxels))
        .route("/api/projects/{id}/remove-box", post(remove_box))
        .route("/api/projects/{id}/dimensions", put(resize))
        .route("/api/projects/{id}/generation", put(set_generation))
        .route("/api/projects/{id}/options", put(set_options))
        .route("/api/projects/{id}/strands", get(strands))
        .route("/api/projects/{id}/analysis", get(analysis))
        .route("/api/projects/{id}/cost", get(cost))
        .route("/api/projects/{id}/export/{format}", get(export))
        .layer(middleware::from_fn_with_state(state.clone(), require_token))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(config))).await
}

async fn require_token(
    State(state): State<AppState>,
    req: Request,
    next: Next,
) -> Result<Response, ApiError> {
    if let Some(token) = &state.config.bearer_token {
        let ok = req
            .headers()
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .is_some_and(|t| t == token);
        if !ok {
            return Err(ApiError::Unauthorized);
        }
    }
    Ok(next.run(req).await)
}

/// JSON body extractor that reports every decoding failure as 400.
pub struct ApiJson<T>(pub T);

impl<S, T> FromRequest<S> for ApiJson<T>
where
    S: Send + Sync,
    T: DeserializeOwned,
{
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        let bytes = Bytes::from_request(req, state)
            .await
            .map_err(|e| ApiError::BadRequest(e.to_string()))?;
        serde_json::from_slice(&bytes)
            .map(ApiJson)
            .map_err(|e| ApiError::BadRequest(e.to_string()))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProjectView {
    pub id: String,
    pub revision: u64,
    pub canvas: CanvasSpec,
    pub removed_voxels: Vec<[u32; 3]>,
    pub seed: u64,
    pub constraints: ConstraintConfig,
    pub options: PlanOptions,
    pub stats: DesignSummary,
}

fn view(id: &str, session: &Session, cost: CostConfig) -> Result<ProjectView, ApiError> {
    let p = &session.project;
    Ok(ProjectView {
        id: id.to_string(),
        revision: session.revision,
        canvas: *p.spec(),
        removed_voxels: p.canvas.removed_voxels().map(|v| [v.x, v.y, v.k]).collect(),
        seed: p.generation.seed,
        constraints: p.generation.constraints,
        options: p.options,
        stats: p.summary(cost)?,
    })
}

fn etag(id: &str, revision: u64) -> HeaderValue {
    HeaderValue::from_str(&format!("\"{id}-{revision}\"")).expect("ascii etag")
}

fn not_modified(headers: &HeaderMap, tag: &HeaderValue) -> bool {
    headers
        .get(header::IF_NONE_MATCH)
        .is_some_and(|v| v.as_bytes() == tag.as_bytes())
}

/// Runs a read against a consistent snapshot and attaches the ETag.
fn cached_get<T, F>(
    state: &AppState,
    id: &str,
    headers: &HeaderMap,
    f: F,
) -> Result<Response, ApiError>
where
    T: Serialize,
    F: FnOnce(&Session) -> Result<T, ApiError>,
{
    let handle = state.store.get(id)?;
    let session = handle.read().expect("session lock");
    let tag = etag(id, session.revision);
    if not_modified(headers, &tag) {
        return Ok((StatusCode::NOT_MODIFIED, [(header::ETAG, tag)]).into_response());
    }
    let body = f(&session)?;
    Ok(([(header::ETAG, tag)], Json(body)).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateRequest {
    width_helices: u32,
    height_helices: u32,
    depth_bp: u32,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    constraints: ConstraintConfig,
    #[serde(default)]
    options: PlanOptions,
}

async fn create_project(
    State(state): State<AppState>,
    ApiJson(req): ApiJson<CreateRequest>,
) -> Result<Response, ApiError> {
    let spec = CanvasSpec::new(req.width_helices, req.height_helices, req.depth_bp)?;
    req.constraints.validate()?;
    let mut project = Project::new(spec)?;
    project.generation.seed = req.seed;
    project.generation.constraints = req.constraints;
    project.options = req.options;
    created(&state, project)
}

async fn import(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let imported = import_project(&body)?;
    created(&state, imported.project)
}

fn created(state: &AppState, project: Project) -> Result<Response, ApiError> {
    let session = Session {
        project,
        revision: 1,
    };
    let body = view("", &session, state.config.cost)?;
    let id = state.store.insert(session);
    let body = ProjectView { id, ..body };
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn get_project(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let cost = state.config.cost;
    cached_get(&state, &id, &headers, |s| view(&id, s, cost))
}

/// Applies `edit` to a copy of the project and commits it only if it
/// succeeds, bumping the revision.
fn mutate<F>(
    state: &AppState,
    id: &str,
    if_revision: Option<u64>,
    edit: F,
) -> Result<Response, ApiError>
where
    F: FnOnce(&mut Project) -> Result<(), ApiError>,
{
    let handle = state.store.get(id)?;
    let mut session = handle.write().expect("session lock");
    if let Some(expected) = if_revision {
        if expected != session.revision {
            return Err(ApiError::Conflict {
                expected,
                current: session.revision,
            });
        }
    }
    let mut next = session.project.clone();
    edit(&mut next)?;
    // the summary must be computable before the edit is accepted
    next.summary(state.config.cost)?;
    session.project = next;
    session.revision += 1;
    Ok(Json(view(id, &session, state.config.cost)?).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VoxelEdit {
    voxels: Vec<[u32; 3]>,
    #[serde(default)]
    present: bool,
    if_revision: Option<u64>,
}

async fn set_voxels(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiJson(req): ApiJson<VoxelEdit>,
) -> Result<Response, ApiError> {
    mutate(&state, &id, req.if_revision, |p| {
        for [x, y, k] in req.voxels {
            p.canvas.set_voxel(VoxelCoord::new(x, y, k), req.present)?;
        }
        Ok(())
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxEdit {
    lo: [u32; 3],
    hi: [u32; 3],
    if_revision: Option<u64>,
}

async fn remove_box(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiJson(req): ApiJson<BoxEdit>,
) -> Result<Response, ApiError> {
    let [lx, ly, lk] = req.lo;
    let [hx, hy, hk] = req.hi;
    mutate(&state, &id, req.if_revision, |p| {
        p.canvas
            .remove_box(VoxelCoord::new(lx, ly, lk), VoxelCoord::new(hx, hy, hk))?;
        Ok(())
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResizeEdit {
    width_helices: u32,
    height_helices: u32,
    depth_bp: u32,
    if_revision: Option<u64>,
}

async fn resize(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiJson(req): ApiJson<ResizeEdit>,
) -> Result<Response, ApiError> {
    mutate(&state, &id, req.if_revision, |p| {
        let spec = CanvasSpec::new(req.width_helices, req.height_helices, req.depth_bp)?;
        p.canvas = p.canvas.resize(spec)?;
        Ok(())
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenerationEdit {
    seed: u64,
    #[serde(default)]
    constraints: ConstraintConfig,
    if_revision: Option<u64>,
}

async fn set_generation(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiJson(req): ApiJson<GenerationEdit>,
) -> Result<Response, ApiError> {
    mutate(&state, &id, req.if_revision, |p| {
        p.generation.seed = req.seed;
        p.generation.constraints = req.constraints;
        p.assignment()?;
        Ok(())
    })
}

#[derive(Debug, Deserialize)]
struct OptionsEdit {
    #[serde(flatten)]
    options: PlanOptions,
    if_revision: Option<u64>,
}

async fn set_options(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiJson(req): ApiJson<OptionsEdit>,
) -> Result<Response, ApiError> {
    mutate(&state, &id, req.if_revision, |p| {
        p.options = req.options;
        Ok(())
    })
}

#[derive(Debug, Deserialize)]
struct Page {
    #[serde(default)]
    offset: usize,
    limit: Option<usize>,
}

const DEFAULT_PAGE: usize = 100;
const MAX_PAGE: usize = 1000;

#[derive(Debug, Serialize, Deserialize)]
pub struct StrandPage {
    pub revision: u64,
    pub total: usize,
    pub offset: usize,
    pub strands: Vec<Strand>,
    pub stats: DesignSummary,
}

async fn strands(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(page): Query<Page>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let limit = page.limit.unwrap_or(DEFAULT_PAGE).min(MAX_PAGE);
    let cost = state.config.cost;
    cached_get(&state, &id, &headers, |s| {
        let all = s.project.strands()?;
        Ok(StrandPage {
            revision: s.revision,
            total: all.len(),
            offset: page.offset,
            strands: all.into_iter().skip(page.offset).take(limit).collect(),
            stats: s.project.summary(cost)?,
        })
    })
}

async fn analysis(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let cost = state.config.cost;
    cached_get(&state, &id, &headers, |s| {
        Ok(json!({
            "revision": s.revision,
            "histogram": s.project.histogram()?,
            "stats": s.project.summary(cost)?,
        }))
    })
}

#[derive(Debug, Deserialize)]
struct CostQuery {
    rate: Option<f64>,
}

async fn cost(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<CostQuery>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let cfg = CostConfig {
        rate_usd_per_base: q.rate.unwrap_or(state.config.cost.rate_usd_per_base),
    };
    let handle = state.store.get(&id)?;
    let session = handle.read().expect("session lock");
    // rate is part of the response, so it is part of the cache key
    let tag = HeaderValue::from_str(&format!(
        "\"{id}-{}-{}\"",
        session.revision, cfg.rate_usd_per_base
    ))
    .map_err(|e| ApiError::Internal(e.to_string()))?;
    if not_modified(&headers, &tag) {
        return Ok((StatusCode::NOT_MODIFIED, [(header::ETAG, tag)]).into_response());
    }
    let summary = session.project.summary(state.config.cost)?;
    let report = estimate_cost(summary.total_nt as u64, cfg)?;
    let body = json!({
        "revision": session.revision,
        "cost": report,
        "display": report.to_string(),
        "stats": summary,
    });
    Ok(([(header::ETAG, tag)], Json(body)).into_response())
}

async fn export(
    State(state): State<AppState>,
    Path((id, format)): Path<(String, String)>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let (ext, mime) = match format.as_str() {
        "csv" => ("csv", "text/csv"),
        "tex" | "latex" => ("tex", "application/x-tex"),
        "3dna" => ("3dna", "application/json"),
        "txt" | "report" => ("txt", "text/plain; charset=utf-8"),
        other => {
            return Err(ApiError::NotFound(format!(
                "unknown export format {other:?}"
            )))
        }
    };
    let handle = state.store.get(&id)?;
    let session = handle.read().expect("session lock");
    let tag = etag(&format!("{id}-{ext}"), session.revision);
    if not_modified(&headers, &tag) {
        return Ok((StatusCode::NOT_MODIFIED, [(header::ETAG, tag)]).into_response());
    }
    let p = &session.project;
    let bytes = match ext {
        "csv" => export_csv(&p.strands()?),
        "tex" => export_latex(&p.strands()?),
        "3dna" => export_project(p, None),
        _ => export_report(&p.summary(state.config.cost)?, &p.strands()?),
    };
    let disposition = format!("attachment; filename=\"{id}.{ext}\"");
    Ok((
        [
            (header::CONTENT_TYPE, HeaderValue::from_static(mime)),
            (
                header::CONTENT_DISPOSITION,
                HeaderValue::from_str(&disposition)
                    .map_err(|e| ApiError::Internal(e.to_string()))?,
            ),
            (header::ETAG, tag),
            (
                header::HeaderName::from_static("x-revision"),
                HeaderValue::from(session.revision),
            ),
        ],
        bytes,
    )
        .into_response())
}
