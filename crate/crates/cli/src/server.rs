//! HTTP advisory service: `POST /v1/recommend`.
//!
//! Requests are independent; the advisor is shared read-only between them.
//! Errors are JSON documents of the form `{"error": {"kind", "message"}}`.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use rdladder::Advisor;

use crate::wire::{advise, validate, AdvisoryRequest, ErrorBody, ErrorResponse};

pub const ROUTE: &str = "/v1/recommend";

fn error(status: StatusCode, body: ErrorBody) -> Response {
    (status, Json(ErrorResponse { error: body })).into_response()
}

async fn recommend(State(advisor): State<Arc<Advisor>>, body: Bytes) -> Response {
    let req: AdvisoryRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, ErrorBody::new("malformed_request", e.to_string())),
    };
    match validate(req) {
        Ok((set, modes, target)) => Json(advise(&advisor, &set, modes, target)).into_response(),
        Err(body) => error(StatusCode::UNPROCESSABLE_ENTITY, body),
    }
}

async fn method_not_allowed() -> Response {
    error(
        StatusCode::METHOD_NOT_ALLOWED,
        ErrorBody::new("method_not_allowed", format!("{ROUTE} only accepts POST")),
    )
}

async fn not_found() -> Response {
    error(StatusCode::NOT_FOUND, ErrorBody::new("not_found", format!("the only route is POST {ROUTE}")))
}

pub fn router(advisor: Arc<Advisor>) -> Router {
    Router::new()
        .route(ROUTE, post(recommend).fallback(method_not_allowed))
        .fallback(not_found)
        .with_state(advisor)
}

/// Binds `addr` and serves until ctrl-c. `on_bound` receives the actual
/// address, which differs from `addr` when binding port 0.
pub async fn serve(
    advisor: Advisor,
    addr: SocketAddr,
    on_bound: impl FnOnce(SocketAddr),
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    on_bound(listener.local_addr()?);
    axum::serve(listener, router(Arc::new(advisor)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
