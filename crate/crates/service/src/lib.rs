//! HTTP/JSON front end over [`bibrec_core::Engine`].
//!
//! | route                                   | body                         |
//! |-----------------------------------------|------------------------------|
//! | `GET /search?q=&rerank=&expand=&limit=` | search response              |
//! | `GET /recommend/{terms,journals,authors}?q=&k=` | recommendation list  |
//! | `POST /evaluate` (assessment CSV)       | metrics report               |
//! | `GET /health`                           | `ok`                         |
//!
//! Every handler is read-only; uploads to `/evaluate` are not kept.

use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use bibrec_core::api::{
    evaluate_csv, parse_positive, to_json_line, ApiError, Engine, EngineError, SearchRequest,
};
use bibrec_core::config::ServiceConfig;
use bibrec_core::eval::{Diagnostic, EvalError};
use bibrec_core::RecommendationKind;
use serde::Serialize;
use tower_http::cors::CorsLayer;

type Params = Query<HashMap<String, String>>;

fn json_response<T: Serialize>(status: StatusCode, body: &T) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, "application/json")],
        to_json_line(body),
    )
        .into_response()
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: String,
    #[serde(skip_serializing_if = "<[_]>::is_empty")]
    diagnostics: &'a [Diagnostic],
}

fn error_response(status: StatusCode, message: impl ToString, diagnostics: &[Diagnostic]) -> Response {
    json_response(
        status,
        &ErrorBody {
            error: message.to_string(),
            diagnostics,
        },
    )
}

fn api_error(e: ApiError) -> Response {
    match e {
        ApiError::BadRequest(msg) => error_response(StatusCode::BAD_REQUEST, msg, &[]),
        ApiError::Internal(msg) => {
            tracing::error!(%msg, "request failed");
            error_response(StatusCode::INTERNAL_SERVER_ERROR, msg, &[])
        }
    }
}

/// Runs CPU-bound engine work off the async runtime.
async fn blocking<T, F>(engine: &Arc<Engine>, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&Engine) -> Result<T, ApiError> + Send + 'static,
{
    let engine = Arc::clone(engine);
    tokio::task::spawn_blocking(move || f(&engine))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
}

async fn search(State(engine): State<Arc<Engine>>, Query(params): Params) -> Response {
    let param = |name: &str| params.get(name).map(String::as_str);
    let req = match SearchRequest::from_params(
        param("q"),
        param("rerank"),
        param("expand"),
        param("limit"),
    ) {
        Ok(req) => req,
        Err(e) => return api_error(e),
    };
    match blocking(&engine, move |e| e.search(&req)).await {
        Ok(body) => json_response(StatusCode::OK, &body),
        Err(e) => api_error(e),
    }
}

async fn recommend(
    State(engine): State<Arc<Engine>>,
    Path(kind): Path<String>,
    Query(params): Params,
) -> Response {
    let kind: RecommendationKind = match kind.parse() {
        Ok(kind) => kind,
        Err(e) => return error_response(StatusCode::NOT_FOUND, e, &[]),
    };
    let q = params.get("q").map(|s| s.trim().to_owned()).unwrap_or_default();
    if q.is_empty() {
        return api_error(ApiError::BadRequest("parameter q must not be empty".into()));
    }
    let k = match params.get("k").filter(|s| !s.trim().is_empty()) {
        None => None,
        Some(k) => match parse_positive("k", k) {
            Ok(k) => Some(k),
            Err(e) => return api_error(e),
        },
    };
    match blocking(&engine, move |e| e.recommend(kind, &q, k)).await {
        Ok(body) => json_response(StatusCode::OK, &body),
        Err(e) => api_error(e),
    }
}

async fn evaluate(body: Bytes) -> Response {
    match evaluate_csv(&body) {
        Ok(report) => json_response(StatusCode::OK, &report),
        Err(EvalError::Invalid(diagnostics)) => error_response(
            StatusCode::UNPROCESSABLE_ENTITY,
            "invalid assessments",
            &diagnostics,
        ),
        Err(e @ (EvalError::Empty | EvalError::UndefinedPrecision)) => {
            error_response(StatusCode::UNPROCESSABLE_ENTITY, e, &[])
        }
        Err(e @ EvalError::Io(_)) => error_response(StatusCode::INTERNAL_SERVER_ERROR, e, &[]),
    }
}

async fn health() -> &'static str {
    "ok"
}

/// Routes over a shared engine. `cors_origin` allows browser calls from
/// that origin (`*` for any).
pub fn router(engine: Arc<Engine>, cors_origin: Option<&str>) -> Router {
    let router = Router::new()
        .route("/search", get(search))
        .route("/recommend/{kind}", get(recommend))
        .route("/evaluate", post(evaluate))
        .route("/health", get(health))
        .with_state(engine);
    match cors_origin {
        None => router,
        Some(origin) => {
            let cors = CorsLayer::new().allow_methods([Method::GET, Method::POST]);
            let cors = if origin == "*" {
                cors.allow_origin(tower_http::cors::Any)
            } else {
                match HeaderValue::from_str(origin) {
                    Ok(value) => cors.allow_origin(value),
                    Err(_) => {
                        tracing::warn!(origin, "ignoring invalid CORS origin");
                        return router;
                    }
                }
            };
            router.layer(cors.allow_headers([header::CONTENT_TYPE]))
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Loads the corpus named in `config` and serves until ctrl-c.
pub async fn serve(config: ServiceConfig) -> Result<(), ServeError> {
    let engine = Arc::new(Engine::from_config(&config)?);
    tracing::info!(
        records = engine.index().doc_count(),
        corpus = %config.corpus_path.display(),
        "corpus loaded"
    );
    let listener = tokio::net::TcpListener::bind((config.host.as_str(), config.port)).await?;
    let addr = listener.local_addr()?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(engine, config.cors_origin.as_deref()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
