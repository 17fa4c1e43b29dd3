//! HTTP API over a single in-memory session.
//!
//! Responses carry the session's input hash in the `x-input-hash` header
//! (and in JSON bodies). Results are cached by parameter set; switching the
//! dataset clears the cache.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Body;
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;

use pht_core::GeneratorConfig;

use crate::formats::{sha256_hex, to_json_bytes};
use crate::session::{
    cache_key, parse_analysis_query, parse_drift_query, parse_figure_query, parse_summary_query, summaries_bytes,
    DataSource, FieldError, ParamErrors, Session,
};

pub const INPUT_HASH_HEADER: &str = "x-input-hash";
const CACHE_LIMIT: usize = 256;

#[derive(Debug, Clone)]
struct Cached {
    content_type: &'static str,
    body: Arc<Vec<u8>>,
}

pub struct AppState {
    session: RwLock<Arc<Session>>,
    cache: Mutex<HashMap<String, Cached>>,
}

impl AppState {
    pub fn new(session: Session) -> Arc<Self> {
        Arc::new(Self {
            session: RwLock::new(Arc::new(session)),
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn session(&self) -> Arc<Session> {
        self.session.read().expect("session lock poisoned").clone()
    }

    /// Swaps in a new dataset and drops every cached result.
    pub fn replace(&self, session: Session) {
        let mut guard = self.session.write().expect("session lock poisoned");
        *guard = Arc::new(session);
        self.cache.lock().expect("cache lock poisoned").clear();
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.lock().expect("cache lock poisoned").len()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/schema", get(schema))
        .route("/summaries", get(summaries))
        .route("/drift", get(drift))
        .route("/analysis", get(analysis))
        .route("/figure.svg", get(figure))
        .route("/session/dataset", post(switch_dataset))
        .with_state(state)
}

fn error_response(status: StatusCode, error: &str, fields: &[FieldError], hash: Option<&str>) -> Response {
    let body = json!({ "error": error, "fields": fields, "input_hash": hash });
    let mut resp = (status, Json(body)).into_response();
    if let Some(h) = hash.and_then(|h| HeaderValue::from_str(h).ok()) {
        resp.headers_mut().insert(INPUT_HASH_HEADER, h);
    }
    resp
}

fn bad_request(e: ParamErrors, hash: &str) -> Response {
    error_response(StatusCode::BAD_REQUEST, "invalid parameters", &e.0, Some(hash))
}

fn ok_response(cached: Cached, hash: &str) -> Response {
    let etag = format!("\"{}\"", &sha256_hex(&[&cached.body])[..32]);
    let mut resp = Response::new(Body::from(cached.body.as_ref().clone()));
    let h = resp.headers_mut();
    h.insert(header::CONTENT_TYPE, HeaderValue::from_static(cached.content_type));
    h.insert(
        INPUT_HASH_HEADER,
        HeaderValue::from_str(hash).expect("hex is a valid header"),
    );
    h.insert(
        header::ETAG,
        HeaderValue::from_str(&etag).expect("hex is a valid header"),
    );
    resp
}

/// Serves a cached result or computes it off the async runtime.
async fn cached<F>(
    state: Arc<AppState>,
    endpoint: &str,
    raw: HashMap<String, String>,
    content_type: &'static str,
    compute: F,
) -> Response
where
    F: FnOnce(&Session, &HashMap<String, String>) -> Result<Vec<u8>, ParamErrors> + Send + 'static,
{
    let session = state.session();
    let key = cache_key(endpoint, &session.input_hash, &raw);
    if let Some(hit) = state.cache.lock().expect("cache lock poisoned").get(&key).cloned() {
        return ok_response(hit, &session.input_hash);
    }
    let worker = session.clone();
    let result = tokio::task::spawn_blocking(move || compute(&worker, &raw)).await;
    match result {
        Ok(Ok(body)) => {
            let entry = Cached {
                content_type,
                body: Arc::new(body),
            };
            // Results from a session that was replaced meanwhile are served but not kept.
            if Arc::ptr_eq(&session, &state.session()) {
                let mut cache = state.cache.lock().expect("cache lock poisoned");
                if cache.len() >= CACHE_LIMIT {
                    cache.clear();
                }
                cache.insert(key, entry.clone());
            }
            ok_response(entry, &session.input_hash)
        }
        Ok(Err(e)) => bad_request(e, &session.input_hash),
        Err(join) => error_response(
            StatusCode::INTERNAL_SERVER_ERROR,
            &format!("computation failed: {join}"),
            &[],
            Some(&session.input_hash),
        ),
    }
}

const JSON: &str = "application/json";

async fn schema(State(state): State<Arc<AppState>>) -> Response {
    let session = state.session();
    let body = to_json_bytes(&session.schema_doc());
    ok_response(
        Cached {
            content_type: JSON,
            body: Arc::new(body),
        },
        &session.input_hash,
    )
}

async fn summaries(State(state): State<Arc<AppState>>, Query(raw): Query<HashMap<String, String>>) -> Response {
    cached(state, "summaries", raw, JSON, |s, raw| {
        let p = parse_summary_query(raw)?;
        summaries_bytes(s, &p)
    })
    .await
}

async fn drift(State(state): State<Arc<AppState>>, Query(raw): Query<HashMap<String, String>>) -> Response {
    cached(state, "drift", raw, JSON, |s, raw| {
        let c = parse_drift_query(raw)?;
        s.drift(c).map(|d| to_json_bytes(&d))
    })
    .await
}

async fn analysis(State(state): State<Arc<AppState>>, Query(raw): Query<HashMap<String, String>>) -> Response {
    cached(state, "analysis", raw, JSON, |s, raw| {
        let c = parse_analysis_query(raw)?;
        s.analysis(&c).map(|d| to_json_bytes(&d))
    })
    .await
}

async fn figure(State(state): State<Arc<AppState>>, Query(raw): Query<HashMap<String, String>>) -> Response {
    cached(state, "figure", raw, "image/svg+xml", |s, raw| {
        let p = parse_figure_query(raw)?;
        s.figure(&p).map(String::into_bytes)
    })
    .await
}

/// Accepts a [`DataSource`] document, or the shorthand
/// `{"dataset": "sine1"}` with optional generator fields alongside.
async fn switch_dataset(State(state): State<Arc<AppState>>, body: axum::body::Bytes) -> Response {
    let current = state.session().input_hash.clone();
    let value: serde_json::Value = match serde_json::from_slice(&body) {
        Ok(v) => v,
        Err(e) => {
            return bad_request(ParamErrors::one("body", format!("invalid JSON: {e}")), &current);
        }
    };
    let source = match parse_source(&value) {
        Ok(s) => s,
        Err(resp) => return resp(&current),
    };
    let loaded = tokio::task::spawn_blocking(move || Session::load(source)).await;
    match loaded {
        Ok(Ok(session)) => {
            let doc = session.schema_doc();
            let hash = session.input_hash.clone();
            state.replace(session);
            ok_response(
                Cached {
                    content_type: JSON,
                    body: Arc::new(to_json_bytes(&doc)),
                },
                &hash,
            )
        }
        Ok(Err(crate::session::SessionError::Load(crate::io::LoadError::Io { path, .. }))) => error_response(
            StatusCode::NOT_FOUND,
            &format!("dataset not found: {path}"),
            &[],
            Some(&current),
        ),
        Ok(Err(e)) => bad_request(ParamErrors::one("dataset", e.to_string()), &current),
        Err(join) => error_response(
            StatusCode::INTERNAL_SERVER_ERROR,
            &format!("loading failed: {join}"),
            &[],
            Some(&current),
        ),
    }
}

type Deferred = Box<dyn FnOnce(&str) -> Response>;

fn parse_source(value: &serde_json::Value) -> Result<DataSource, Deferred> {
    let invalid = |field: &'static str, message: String| -> Deferred {
        Box::new(move |hash: &str| bad_request(ParamErrors::one(field, message), hash))
    };
    let is_known = |name: &str| matches!(name, "sine1" | "circles");
    if value.get("kind").is_none() {
        let Some(name) = value.get("dataset").and_then(|d| d.as_str()) else {
            return Err(invalid("dataset", "expected \"kind\" or \"dataset\"".into()));
        };
        if !is_known(name) {
            let name = name.to_string();
            return Err(Box::new(move |hash: &str| {
                error_response(
                    StatusCode::NOT_FOUND,
                    &format!("unknown dataset {name:?}"),
                    &[],
                    Some(hash),
                )
            }));
        }
        return serde_json::from_value::<GeneratorConfig>(value.clone())
            .map(|config| DataSource::Generator { config })
            .map_err(|e| invalid("dataset", e.to_string()));
    }
    if let Some(name) = value.pointer("/config/dataset").and_then(|d| d.as_str()) {
        if !is_known(name) {
            let name = name.to_string();
            return Err(Box::new(move |hash: &str| {
                error_response(
                    StatusCode::NOT_FOUND,
                    &format!("unknown dataset {name:?}"),
                    &[],
                    Some(hash),
                )
            }));
        }
    }
    serde_json::from_value::<DataSource>(value.clone()).map_err(|e| invalid("body", e.to_string()))
}
