//! axum wiring for the five endpoints.

use std::collections::HashMap;
use std::future::Future;
use std::io;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;

use crate::{handle_flood, handle_health, handle_load, handle_lodging, handle_route, Reply, ServiceState};

impl IntoResponse for Reply {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, [(header::CONTENT_TYPE, "application/json")], self.text()).into_response()
    }
}

type Shared = State<Arc<ServiceState>>;

async fn load(State(state): Shared, body: Bytes) -> Reply {
    // loading parses files and floods a DEM; keep it off the async workers
    tokio::task::spawn_blocking(move || handle_load(&state, &body))
        .await
        .unwrap_or_else(|e| Reply {
            status: 500,
            body: serde_json::json!({"error": e.to_string()}),
        })
}

async fn flood(State(state): Shared, Query(query): Query<HashMap<String, String>>) -> Reply {
    handle_flood(&state.snapshot(), query.get("level_ft").map(String::as_str))
}

async fn route(State(state): Shared, body: Bytes) -> Reply {
    handle_route(&state.snapshot(), &body)
}

async fn lodging(State(state): Shared, body: Bytes) -> Reply {
    handle_lodging(&state.snapshot(), &body)
}

async fn health(State(state): Shared) -> Reply {
    handle_health(&state.snapshot())
}

pub fn router(state: Arc<ServiceState>) -> Router {
    Router::new()
        .route("/load", post(load))
        .route("/flood", get(flood))
        .route("/route", post(route))
        .route("/lodging", post(lodging))
        .route("/health", get(health))
        .with_state(state)
}

/// Serves until `shutdown` resolves, then drains in-flight requests.
pub async fn serve(
    listener: TcpListener,
    state: Arc<ServiceState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}
