//! Stateless HTTP facade: tile rendering, root queries and orbit probes.
//!
//! * `POST /render` takes a scene document and answers `image/png`.
//! * `GET /roots?kind=partial_sum|szego&n=N` answers the root report.
//! * `POST /orbit` takes `{"scene": ..., "z0": [re, im], "steps": N}`.
//!
//! Malformed bodies get 400, well-formed requests that break a constraint
//! get 422, both with a JSON `{"error", "message"}` body.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::json;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use crate::complexpoly::MAX_FAMILY_N;
use crate::render::{trace_orbit, Orbit, RenderError};
use crate::roots::{find_all_roots, verify_root_claims, FamilyKind, RootReport};
use crate::scene::{Scene, SceneError, SceneFile};

pub const DEFAULT_PORT: u16 = 8650;
/// Largest tile edge served.
pub const MAX_TILE_SIDE: u32 = 1024;
const DEFAULT_ORBIT_STEPS: usize = 100;
const MAX_ORBIT_STEPS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub workers: usize,
    /// Allowed CORS origins; `None` allows any origin.
    pub allowed_origins: Option<Vec<String>>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { workers: 1, allowed_origins: None }
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, kind: "invalid_request", message: message.into() }
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::UNPROCESSABLE_ENTITY, kind: "constraint_violation", message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::INTERNAL_SERVER_ERROR, kind: "internal", message: message.into() }
    }
}

impl From<SceneError> for ApiError {
    fn from(e: SceneError) -> Self {
        match e {
            SceneError::Parse(e) => ApiError::bad_request(e.to_string()),
            SceneError::Constraint(m) => ApiError::unprocessable(m),
        }
    }
}

impl From<RenderError> for ApiError {
    fn from(e: RenderError) -> Self {
        ApiError::internal(e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.kind, "message": self.message }))).into_response()
    }
}

#[derive(Debug, Clone)]
struct AppState {
    workers: usize,
}

pub fn router(config: &ServiceConfig) -> Router {
    let cors = match &config.allowed_origins {
        None => CorsLayer::new().allow_origin(Any),
        Some(list) => {
            let origins: Vec<HeaderValue> = list.iter().filter_map(|o| o.parse().ok()).collect();
            CorsLayer::new().allow_origin(AllowOrigin::list(origins))
        }
    }
    .allow_methods(Any)
    .allow_headers(Any);

    Router::new()
        .route("/render", post(render_tile))
        .route("/roots", get(roots))
        .route("/orbit", post(orbit))
        .layer(cors)
        .with_state(Arc::new(AppState { workers: config.workers.max(1) }))
}

/// Bind and serve until ctrl-c.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("expograph service listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(&config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn parse_scene(value: serde_json::Value) -> Result<Scene, ApiError> {
    let file: SceneFile = serde_json::from_value(value).map_err(|e| ApiError::bad_request(e.to_string()))?;
    Ok(file.validate()?)
}

fn parse_json(body: &Bytes) -> Result<serde_json::Value, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(e.to_string()))
}

async fn render_tile(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let scene = parse_scene(parse_json(&body)?)?;
    let v = scene.viewport;
    if v.cols > MAX_TILE_SIDE || v.rows > MAX_TILE_SIDE {
        return Err(ApiError::unprocessable(format!(
            "tile {}x{} exceeds the {MAX_TILE_SIDE}x{MAX_TILE_SIDE} cap",
            v.cols, v.rows
        )));
    }
    let workers = state.workers;
    let png = tokio::task::spawn_blocking(move || crate::render_png(&scene, workers))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(([(header::CONTENT_TYPE, "image/png")], png).into_response())
}

#[derive(Debug, Deserialize)]
struct RootsQuery {
    kind: Option<String>,
    n: Option<String>,
}

async fn roots(Query(q): Query<RootsQuery>) -> Result<Json<RootReport>, ApiError> {
    let kind: FamilyKind = q
        .kind
        .as_deref()
        .ok_or_else(|| ApiError::bad_request("missing query parameter kind"))?
        .parse()
        .map_err(ApiError::bad_request)?;
    let n: i64 =
        q.n.as_deref()
            .ok_or_else(|| ApiError::bad_request("missing query parameter n"))?
            .parse()
            .map_err(|_| ApiError::bad_request("n must be an integer"))?;
    if !(1..=MAX_FAMILY_N as i64).contains(&n) {
        return Err(ApiError::unprocessable(format!("n must be in [1, {MAX_FAMILY_N}], got {n}")));
    }
    let n = n as usize;
    let report = tokio::task::spawn_blocking(move || {
        find_all_roots(&kind.polynomial(n)).map(|rs| verify_root_claims(kind, n, &rs))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))?
    .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(Json(report))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrbitRequest {
    scene: serde_json::Value,
    z0: [f64; 2],
    #[serde(default)]
    steps: Option<i64>,
}

async fn orbit(body: Bytes) -> Result<Json<Orbit>, ApiError> {
    let req: OrbitRequest = serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let scene = parse_scene(req.scene)?;
    if !req.z0.iter().all(|v| v.is_finite()) {
        return Err(ApiError::unprocessable("z0 must be finite"));
    }
    let steps = req.steps.unwrap_or(DEFAULT_ORBIT_STEPS as i64);
    if !(1..=MAX_ORBIT_STEPS as i64).contains(&steps) {
        return Err(ApiError::unprocessable(format!("steps must be in [1, {MAX_ORBIT_STEPS}]")));
    }
    let z0 = Complex64::new(req.z0[0], req.z0[1]);
    let orbit = tokio::task::spawn_blocking(move || {
        let rs = find_all_roots(&scene.polynomial())?;
        Ok::<_, RenderError>(trace_orbit(&scene, &rs, z0, steps as usize))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(orbit))
}
