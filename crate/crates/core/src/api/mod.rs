//! The JSON HTTP API under `/api/v1`.

use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;
use tower_http::cors::{Any, CorsLayer};

use crate::search::{IndexError, IndexHandle};
use crate::store::Catalog;

mod auth;
mod error;
mod handlers;

pub use auth::{Caller, TokenError, TokenTable};
pub use error::ApiError;

/// Shared service state. Cloning is cheap.
#[derive(Clone)]
pub struct AppState {
    pub catalog: Arc<Catalog>,
    pub index: Arc<IndexHandle>,
    pub tokens: Arc<TokenTable>,
    snapshot: Arc<Mutex<Option<handlers::CachedSnapshot>>>,
}

impl AppState {
    /// Wraps an open catalog and indexes its current state.
    pub fn new(catalog: Catalog, tokens: TokenTable) -> Result<Self, IndexError> {
        let index = IndexHandle::from_view(&catalog.view())?;
        Ok(AppState {
            catalog: Arc::new(catalog),
            index: Arc::new(index),
            tokens: Arc::new(tokens),
            snapshot: Arc::new(Mutex::new(None)),
        })
    }
}

pub fn router(state: AppState) -> Router {
    use handlers::*;
    let cors = CorsLayer::new().allow_origin(Any).allow_methods(Any).allow_headers(Any).expose_headers(Any);
    Router::new()
        .route("/api/v1/search", get(search))
        .route(
            "/api/v1/collections/{id}",
            get(get_collection).patch(amend_collection).delete(delete_collection),
        )
        .route("/api/v1/collections/{id}/history", get(collection_history))
        .route("/api/v1/submissions", post(create_submission).get(list_submissions))
        .route("/api/v1/submissions/{id}", get(get_submission))
        .route("/api/v1/submissions/{id}/approve", post(approve_submission))
        .route("/api/v1/submissions/{id}/reject", post(reject_submission))
        .route("/api/v1/stats", get(stats))
        .route("/api/v1/snapshot/latest", get(latest_snapshot))
        .route("/api/v1/whoami", get(whoami))
        .fallback(no_route)
        .layer(cors)
        .with_state(state)
}

/// Serves until Ctrl-C. `on_ready` receives the bound address.
pub async fn serve(
    listener: TcpListener,
    state: AppState,
    on_ready: impl FnOnce(SocketAddr),
) -> std::io::Result<()> {
    on_ready(listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
