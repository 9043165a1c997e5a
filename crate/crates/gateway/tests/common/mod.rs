#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use dpm_gateway::SessionStore;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

pub struct Client {
    pub router: Router,
}

impl Client {
    pub fn new(store: Arc<SessionStore>) -> Self {
        Client { router: dpm_gateway::http::router(store) }
    }

    pub async fn call(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let builder = Request::builder().method(method).uri(uri);
        let request = match body {
            Some(b) => builder.header("content-type", "application/json").body(Body::from(b.to_string())),
            None => builder.body(Body::empty()),
        }
        .unwrap();
        let response = self.router.clone().oneshot(request).await.unwrap();
        let status = response.status();
        let bytes = response.into_body().collect().await.unwrap().to_bytes();
        let value = serde_json::from_slice(&bytes)
            .unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into_owned()));
        (status, value)
    }

    pub async fn get(&self, uri: &str) -> (StatusCode, Value) {
        self.call(Method::GET, uri, None).await
    }

    pub async fn post(&self, uri: &str, body: Value) -> (StatusCode, Value) {
        self.call(Method::POST, uri, Some(body)).await
    }

    /// Registers `text` and creates one instance; returns the instance id.
    pub async fn instance_of(&self, text: &str) -> String {
        let (status, model) = self.post("/models", json!({ "text": text })).await;
        assert_eq!(status, StatusCode::CREATED, "{model}");
        let (status, inst) = self.post("/instances", json!({ "model_id": model["id"] })).await;
        assert_eq!(status, StatusCode::CREATED, "{inst}");
        inst["id"].as_str().unwrap().to_string()
    }

    pub async fn start(&self, id: &str, scope: u64, activity: &str) -> (StatusCode, Value) {
        self.post(&format!("/instances/{id}/commands"), json!({ "kind": "start", "scope": scope, "activity": activity }))
            .await
    }

    pub async fn complete(&self, id: &str, activity_instance: u64) -> (StatusCode, Value) {
        self.post(
            &format!("/instances/{id}/commands"),
            json!({ "kind": "complete", "activity_instance": activity_instance }),
        )
        .await
    }

    /// Starts and completes an atomic activity.
    pub async fn run(&self, id: &str, scope: u64, activity: &str) {
        let (status, body) = self.start(id, scope, activity).await;
        assert_eq!(status, StatusCode::OK, "{body}");
        let ai = body["event"]["activity_instance"].as_u64().unwrap();
        let (status, body) = self.complete(id, ai).await;
        assert_eq!(status, StatusCode::OK, "{body}");
    }

    /// Sorted `(scope, activity)` pairs from the enabled endpoint.
    pub async fn enabled(&self, id: &str) -> Vec<(u64, String)> {
        let (status, body) = self.get(&format!("/instances/{id}/enabled")).await;
        assert_eq!(status, StatusCode::OK, "{body}");
        let mut out: Vec<(u64, String)> = body["enabled"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| (e["scope"].as_u64().unwrap(), e["activity"].as_str().unwrap().to_string()))
            .collect();
        out.sort();
        out
    }
}
