use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use dnabrick::io::{export_csv, export_project};
use dnabrick::{CanvasSpec, Project, VoxelCoord};
use dnabrick_service::{router, AppState, ServiceConfig};

fn app() -> Router {
    router(AppState::new(ServiceConfig::default()))
}

async fn send(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, _, bytes) = send_raw(
        app,
        method,
        uri,
        body.map(|b| b.to_string().into_bytes()),
        &[],
    )
    .await;
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value)
}

async fn send_raw(
    app: &Router,
    method: &str,
    uri: &str,
    body: Option<Vec<u8>>,
    headers: &[(&str, &str)],
) -> (StatusCode, axum::http::HeaderMap, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    for (k, v) in headers {
        req = req.header(*k, *v);
    }
    let req = req
        .header(header::CONTENT_TYPE, "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let bytes = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    (status, headers, bytes)
}

async fn create(app: &Router, w: u32, h: u32, d: u32, seed: u64) -> Value {
    let (status, body) = send(
        app,
        "POST",
        "/api/projects",
        Some(json!({ "width_helices": w, "height_helices": h, "depth_bp": d, "seed": seed })),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body
}

#[tokio::test]
async fn create_reports_full_cube_stats() {
    let app = app();
    let body = create(&app, 8, 8, 64, 0).await;
    assert_eq!(body["stats"]["selected_voxels"], 512);
    assert_eq!(body["stats"]["total_nt"], 8192);
    assert_eq!(body["stats"]["strands"], 288);
    assert_eq!(body["stats"]["bricks"]["full"], 224);
    assert_eq!(body["revision"], 1);
}

#[tokio::test]
async fn toggle_updates_stats_and_revision() {
    let app = app();
    let p = create(&app, 8, 8, 64, 0).await;
    let id = p["id"].as_str().unwrap();
    let (status, body) = send(
        &app,
        "POST",
        &format!("/api/projects/{id}/voxels"),
        Some(json!({ "voxels": [[3, 3, 3]], "present": false, "if_revision": 1 })),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["revision"], 2);
    assert_eq!(body["stats"]["domains"], 1022);
    assert_eq!(body["stats"]["total_nt"], 8192 - 16);
    assert_eq!(body["removed_voxels"], json!([[3, 3, 3]]));

    // stale conditional write
    let (status, body) = send(
        &app,
        "POST",
        &format!("/api/projects/{id}/voxels"),
        Some(json!({ "voxels": [[0, 0, 0]], "if_revision": 1 })),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["revision"], 2);

    let (status, body) = send(
        &app,
        "POST",
        &format!("/api/projects/{id}/remove-box"),
        Some(json!({ "lo": [0, 0, 0], "hi": [7, 7, 3] })),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["stats"]["selected_voxels"], 256);
    assert_eq!(body["stats"]["total_nt"], 4096);
    assert_eq!(body["stats"]["cost"]["total_cents"], 1638);
}

#[tokio::test]
async fn error_statuses() {
    let app = app();
    let (status, _) = send(&app, "GET", "/api/projects/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, _, _) = send_raw(
        &app,
        "POST",
        "/api/projects",
        Some(b"{not json".to_vec()),
        &[],
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, body) = send(
        &app,
        "POST",
        "/api/projects",
        Some(json!({ "width_helices": 2, "height_helices": 2, "depth_bp": 24 })),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(body["error"].as_str().unwrap().contains("odd"));

    let p = create(&app, 2, 2, 16, 0).await;
    let id = p["id"].as_str().unwrap();
    // second coordinate is out of range: nothing may be applied
    let (status, _) = send(
        &app,
        "POST",
        &format!("/api/projects/{id}/voxels"),
        Some(json!({ "voxels": [[0, 0, 0], [5, 0, 0]] })),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (_, body) = send(&app, "GET", &format!("/api/projects/{id}"), None).await;
    assert_eq!(body["revision"], 1);
    assert_eq!(body["stats"]["selected_voxels"], 8);

    let (status, _) = send(
        &app,
        "PUT",
        &format!("/api/projects/{id}/generation"),
        Some(json!({ "seed": 1, "constraints": { "gc_min": 0.55, "gc_max": 0.6 } })),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let (status, _) = send(&app, "GET", &format!("/api/projects/{id}/export/pdf"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn export_matches_library_bytes() {
    let app = app();
    let p = create(&app, 4, 4, 32, 42).await;
    let id = p["id"].as_str().unwrap();
    send(
        &app,
        "POST",
        &format!("/api/projects/{id}/voxels"),
        Some(json!({ "voxels": [[1, 1, 1], [2, 3, 0]] })),
    )
    .await;

    let mut local = Project::new(CanvasSpec::new(4, 4, 32).unwrap()).unwrap();
    local.generation.seed = 42;
    local
        .canvas
        .set_voxel(VoxelCoord::new(1, 1, 1), false)
        .unwrap();
    local
        .canvas
        .set_voxel(VoxelCoord::new(2, 3, 0), false)
        .unwrap();

    let (status, headers, csv) = send_raw(
        &app,
        "GET",
        &format!("/api/projects/{id}/export/csv"),
        None,
        &[],
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(csv, export_csv(&local.strands().unwrap()));
    assert!(headers[header::CONTENT_DISPOSITION]
        .to_str()
        .unwrap()
        .contains(".csv"));
    assert_eq!(headers["x-revision"], "2");

    let (_, _, doc) = send_raw(
        &app,
        "GET",
        &format!("/api/projects/{id}/export/3dna"),
        None,
        &[],
    )
    .await;
    assert_eq!(doc, export_project(&local, None));

    // upload it again as a new session
    let (status, _, bytes) = send_raw(&app, "POST", "/api/projects/import", Some(doc), &[]).await;
    assert_eq!(status, StatusCode::CREATED);
    let imported: Value = serde_json::from_slice(&bytes).unwrap();
    assert_ne!(imported["id"], p["id"]);
    assert_eq!(imported["removed_voxels"], json!([[1, 1, 1], [2, 3, 0]]));
    assert_eq!(imported["seed"], 42);

    let (status, _, _) = send_raw(
        &app,
        "POST",
        "/api/projects/import",
        Some(b"{\"format\":".to_vec()),
        &[],
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn strands_analysis_and_cost() {
    let app = app();
    let p = create(&app, 6, 6, 48, 7).await;
    let id = p["id"].as_str().unwrap();

    let (status, page) = send(
        &app,
        "GET",
        &format!("/api/projects/{id}/strands?offset=120&limit=50"),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(page["total"], 126);
    assert_eq!(page["strands"].as_array().unwrap().len(), 6);

    let mut local = Project::new(CanvasSpec::new(6, 6, 48).unwrap()).unwrap();
    local.generation.seed = 7;
    let (_, analysis) = send(&app, "GET", &format!("/api/projects/{id}/analysis"), None).await;
    let expected = serde_json::to_value(local.histogram().unwrap()).unwrap();
    assert_eq!(analysis["histogram"], expected);
    assert_eq!(analysis["histogram"]["total_domains"], 432);

    let (_, cost) = send(
        &app,
        "GET",
        &format!("/api/projects/{id}/cost?rate=0.01"),
        None,
    )
    .await;
    assert_eq!(cost["display"], "34.56 USD");
    assert_eq!(cost["stats"]["total_nt"], 3456);
}

#[tokio::test]
async fn etag_and_not_modified() {
    let app = app();
    let p = create(&app, 2, 2, 16, 0).await;
    let id = p["id"].as_str().unwrap();
    let uri = format!("/api/projects/{id}");
    let (_, headers, _) = send_raw(&app, "GET", &uri, None, &[]).await;
    let tag = headers[header::ETAG].to_str().unwrap().to_string();
    let (status, _, _) = send_raw(&app, "GET", &uri, None, &[("if-none-match", &tag)]).await;
    assert_eq!(status, StatusCode::NOT_MODIFIED);

    send(
        &app,
        "POST",
        &format!("{uri}/voxels"),
        Some(json!({ "voxels": [[0, 0, 0]] })),
    )
    .await;
    let (status, _, _) = send_raw(&app, "GET", &uri, None, &[("if-none-match", &tag)]).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn options_and_resize() {
    let app = app();
    let p = create(&app, 4, 4, 32, 0).await;
    let id = p["id"].as_str().unwrap();
    let (status, body) = send(
        &app,
        "PUT",
        &format!("/api/projects/{id}/options"),
        Some(json!({ "boundary_merge": true, "protector_policy": "suppress_and_protect" })),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert!(body["stats"]["bricks"]["boundary"].as_u64().unwrap() > 0);
    assert_eq!(body["stats"]["total_nt"], 16 * 64);

    let (status, body) = send(
        &app,
        "PUT",
        &format!("/api/projects/{id}/dimensions"),
        Some(json!({ "width_helices": 2, "height_helices": 2, "depth_bp": 16 })),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["stats"]["selected_voxels"], 8);
    assert_eq!(body["revision"], 3);
}

#[tokio::test]
async fn bearer_token_required_when_configured() {
    let app = router(AppState::new(ServiceConfig {
        bearer_token: Some("s3cret".into()),
        ..Default::default()
    }));
    let body = json!({ "width_helices": 2, "height_helices": 2, "depth_bp": 16 }).to_string();
    let (status, _, _) = send_raw(
        &app,
        "POST",
        "/api/projects",
        Some(body.clone().into_bytes()),
        &[],
    )
    .await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    let (status, _, _) = send_raw(
        &app,
        "POST",
        "/api/projects",
        Some(body.into_bytes()),
        &[("authorization", "Bearer s3cret")],
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_toggles_serialize() {
    let app = app();
    let p = create(&app, 4, 4, 32, 0).await;
    let id = p["id"].as_str().unwrap().to_string();
    let mut tasks = Vec::new();
    for x in 0..4u32 {
        for y in 0..4u32 {
            let app = app.clone();
            let id = id.clone();
            tasks.push(tokio::spawn(async move {
                send(
                    &app,
                    "POST",
                    &format!("/api/projects/{id}/voxels"),
                    Some(json!({ "voxels": [[x, y, 0]] })),
                )
                .await
            }));
        }
    }
    let mut revisions = Vec::new();
    for t in tasks {
        let (status, body) = t.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        revisions.push(body["revision"].as_u64().unwrap());
    }
    revisions.sort();
    assert_eq!(revisions, (2..=17).collect::<Vec<_>>());
    let (_, body) = send(&app, "GET", &format!("/api/projects/{id}"), None).await;
    assert_eq!(body["stats"]["selected_voxels"], 64 - 16);
    assert_eq!(body["revision"], 17);
}
