//! HTTP service used by the web front end.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::Mutex;

use blocktrace::srcmodel::{element_type_at, parse_file};
use blocktrace::tracker::{compare_blocks, BlockAt};
use blocktrace::{wire, Config, Error, GraphDocument};

use crate::repos::RepoPool;
use crate::session::{splice, Session, ValidationDecision, Verdict, VerdictKind};
use crate::{block_kind, error_kind, http_status, run_track, TrackRequest};

pub const SESSION_HEADER: &str = "x-session-id";

pub struct AppState {
    pub repos: RepoPool,
    pub config: Config,
    /// Where sessions are checkpointed; in memory only when unset.
    pub sessions_dir: Option<PathBuf>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

impl AppState {
    /// Restores sessions checkpointed in `sessions_dir`.
    pub fn new(repos: RepoPool, config: Config, sessions_dir: Option<PathBuf>) -> Self {
        let restored = sessions_dir.as_deref().map(Session::load_all).unwrap_or_default();
        if !restored.is_empty() {
            tracing::info!(count = restored.len(), "restored sessions");
        }
        AppState {
            repos,
            config,
            sessions_dir,
            sessions: RwLock::new(
                restored
                    .into_iter()
                    .map(|s| (s.id.clone(), Arc::new(Mutex::new(s))))
                    .collect(),
            ),
        }
    }

    fn session(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.sessions.read().expect("sessions lock").get(id).cloned()
    }

    fn checkpoint(&self, s: &Session) -> Result<(), ApiError> {
        if let Some(dir) = &self.sessions_dir {
            s.checkpoint(dir).map_err(|e| ApiError::from(Error::Io(e)))?;
        }
        Ok(())
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/element-type", get(element_type))
        .route("/api/track", post(track))
        .route("/api/session/{id}", get(get_session))
        .route("/api/session/{id}/decision", post(decide))
        .with_state(state)
}

pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, kind: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            kind,
            message: message.into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = StatusCode::from_u16(http_status(&e)).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        ApiError::new(status, error_kind(&e), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message, "kind": self.kind }))).into_response()
    }
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, Error> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map_err(ApiError::from)
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ElementTypeQuery {
    pub repo: String,
    #[serde(default)]
    pub commit: Option<String>,
    pub file_path: String,
    pub line: usize,
    #[serde(default)]
    pub selection: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ElementType {
    pub element_type: String,
}

async fn element_type(State(st): State<Arc<AppState>>, Query(q): Query<ElementTypeQuery>) -> Result<Json<ElementType>, ApiError> {
    let kind = blocking(move || {
        let repo = st.repos.get(&q.repo)?;
        let commit = repo.resolve(q.commit.as_deref().unwrap_or("HEAD"))?;
        let text = repo.read_file(&commit.id, &q.file_path)?.ok_or_else(|| Error::UnknownPath {
            path: q.file_path.clone(),
            commit: commit.id.clone(),
        })?;
        let types = parse_file(&q.file_path, &text)?;
        Ok(element_type_at(&types, q.line, q.selection.as_deref()).unwrap_or("invalid"))
    })
    .await?;
    Ok(Json(ElementType {
        element_type: kind.to_string(),
    }))
}

fn repo_spec(req: &TrackRequest) -> Result<String, Error> {
    match (&req.repo_path, &req.clone_url) {
        (Some(p), None) => Ok(p.clone()),
        (None, Some(u)) => Ok(u.clone()),
        _ => Err(Error::Invalid("give exactly one of repoPath and cloneUrl".into())),
    }
}

async fn track(State(st): State<Arc<AppState>>, Json(req): Json<TrackRequest>) -> Result<Response, ApiError> {
    let state = st.clone();
    let r = req.clone();
    let (root, body) = blocking(move || {
        let spec = repo_spec(&r)?;
        block_kind(&r.block_type)?;
        let repo = state.repos.get(&spec)?;
        let graph = run_track(&repo, &r, &state.config)?;
        Ok((repo.root().display().to_string(), wire::to_json(&graph)))
    })
    .await?;
    let doc = GraphDocument::from_json(&body).map_err(ApiError::from)?;
    let id = uuid::Uuid::new_v4().to_string();
    let session = Session::new(id.clone(), root, req, doc);
    st.checkpoint(&session)?;
    st.sessions
        .write()
        .expect("sessions lock")
        .insert(id.clone(), Arc::new(Mutex::new(session)));
    tracing::info!(session = %id, "tracked");
    let mut resp = (StatusCode::OK, body).into_response();
    let h = resp.headers_mut();
    h.insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    h.insert(SESSION_HEADER, HeaderValue::from_str(&id).expect("uuid is a valid header"));
    Ok(resp)
}

async fn get_session(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Session>, ApiError> {
    let s = st
        .session(&id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown-session", format!("no session `{id}`")))?;
    let s = s.lock().await.clone();
    Ok(Json(s))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct DecisionResponse {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resumed_from: Option<String>,
    pub state: crate::session::SessionState,
}

async fn decide(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(d): Json<ValidationDecision>,
) -> Result<Json<DecisionResponse>, ApiError> {
    let cell = st
        .session(&id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown-session", format!("no session `{id}`")))?;
    // held across the re-run so decisions on one session apply in order
    let mut s = cell.lock().await;
    let Some(at) = s.node_of(&d.commit_id) else {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "commit-not-in-graph",
            format!("commit {} is not part of session {id}", d.commit_id),
        ));
    };
    let (status, resumed_from, verdict) = match (d.verdict, &d.correction) {
        (VerdictKind::Confirm, _) => ("recorded", None, Verdict::Confirmed),
        (VerdictKind::Reject, None) => ("unresolved", None, Verdict::RejectedUnresolved),
        (VerdictKind::Reject, Some(fix)) => {
            let fix = fix.clone();
            let node = s.graph.nodes[at].clone();
            let repo_path = PathBuf::from(&s.repository);
            let state = st.clone();
            let (parent, older, changes) = blocking(move || {
                let repo = state.repos.get_local(&repo_path)?;
                let faulted = repo.resolve(&node.commit_id)?;
                let parent = faulted
                    .first_parent()
                    .ok_or_else(|| Error::Invalid(format!("commit {} has no parent", faulted.id)))?
                    .to_string();
                let req = TrackRequest {
                    repo_path: None,
                    clone_url: None,
                    commit: parent.clone(),
                    file_path: fix.file.clone(),
                    block_type: fix.block_type.clone(),
                    line: fix.line,
                };
                let graph = run_track(&repo, &req, &state.config)?;
                let older = BlockAt {
                    commit: parent.clone(),
                    file: fix.file.clone(),
                    kind: block_kind(&fix.block_type)?,
                    line: fix.line,
                };
                let newer = BlockAt {
                    commit: faulted.id.clone(),
                    file: node.file.clone(),
                    kind: block_kind(&node.block_type)?,
                    line: node.start_line,
                };
                let changes = compare_blocks(&repo, &older, &newer, &state.config)?;
                Ok((parent, GraphDocument::from(&graph), changes))
            })
            .await
            .map_err(|mut e| {
                // the correction is what failed to resolve, not the session
                if e.status == StatusCode::NOT_FOUND {
                    e.status = StatusCode::UNPROCESSABLE_ENTITY;
                }
                e
            })?;
            splice(&mut s.graph, at, &older, changes);
            ("resumed", Some(parent), Verdict::RejectedCorrected)
        }
    };
    s.record(d, verdict);
    st.checkpoint(&s)?;
    Ok(Json(DecisionResponse {
        status: status.to_string(),
        resumed_from,
        state: s.state,
    }))
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(state: Arc<AppState>, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state)).await
}
