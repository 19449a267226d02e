//! HTTP server around [`Service`].

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::State;
use axum::http::{header, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::Router;
use tower_http::cors::CorsLayer;

use crate::service::Service;

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .fallback(dispatch)
        .with_state(service)
        .layer(CorsLayer::permissive())
}

async fn dispatch(State(service): State<Arc<Service>>, method: Method, uri: Uri) -> Response {
    let answer = tokio::task::spawn_blocking(move || {
        service.handle_request(method.as_str(), uri.path(), uri.query().unwrap_or(""))
    })
    .await;
    match answer {
        Ok(r) => (
            StatusCode::from_u16(r.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR),
            [(header::CONTENT_TYPE, r.content_type)],
            r.body,
        )
            .into_response(),
        Err(_) => StatusCode::INTERNAL_SERVER_ERROR.into_response(),
    }
}

/// Serves until Ctrl-C.
pub async fn serve(service: Arc<Service>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
