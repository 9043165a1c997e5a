//! Drives the HTTP API in-process: register a model, create an instance,
//! hit a blocked activity, then run it to termination.

use std::sync::Arc;

use axum::body::Body;
use axum::http::Request;
use dpm_core::fixtures;
use dpm_gateway::{http::router, SessionStore};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &axum::Router, method: &str, uri: &str, body: Value) -> Value {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value: Value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    println!("{method} {uri} -> {status}");
    value
}

#[tokio::main(flavor = "current_thread")]
async fn main() {
    let app = router(Arc::new(SessionStore::in_memory()));
    let model = call(&app, "POST", "/models", json!({ "text": fixtures::DECLARATIVE_BASICS })).await;
    let inst = call(&app, "POST", "/instances", json!({ "model_id": model["id"] })).await;
    let id = inst["id"].as_str().unwrap().to_string();
    let commands = format!("/instances/{id}/commands");

    let refused = call(&app, "POST", &commands, json!({ "kind": "start", "activity": "E" })).await;
    println!("  {}", refused["message"]);

    for activity in ["B", "A"] {
        let started = call(&app, "POST", &commands, json!({ "kind": "start", "activity": activity })).await;
        let ai = started["event"]["activity_instance"].clone();
        call(&app, "POST", &commands, json!({ "kind": "complete", "activity_instance": ai })).await;
    }
    let enabled = call(&app, "GET", &format!("/instances/{id}/enabled"), Value::Null).await;
    println!("  may terminate: {}", enabled["may_terminate"]);
    let done = call(&app, "POST", &format!("/instances/{id}/terminate"), Value::Null).await;
    println!("  terminated: {}", done["instance"]["terminated"]);
    let trace = call(&app, "GET", &format!("/instances/{id}/trace"), Value::Null).await;
    print!("{}", trace["text"].as_str().unwrap());
}
