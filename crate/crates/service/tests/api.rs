use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use fuzzydx_core::{EngineConfig, KnowledgeBase, Session};
use fuzzydx_service::{router, AppState, SessionStore};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

const CHEST: &str = include_str!("../../../fixtures/chest.kb.json");

fn app_with(store: SessionStore) -> (Router, AppState) {
    let kb = KnowledgeBase::from_json_str(CHEST).unwrap();
    let state = AppState::new(kb, EngineConfig::default(), store);
    (router(state.clone()), state)
}

fn app() -> Router {
    app_with(SessionStore::in_memory()).0
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let body = match body {
        Some(v) => Body::from(v.to_string()),
        None => Body::empty(),
    };
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body)
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or(Value::Null)
    };
    (status, value)
}

async fn create(app: &Router) -> String {
    let (status, body) = call(app, Method::POST, "/api/v1/sessions", None).await;
    assert_eq!(status, StatusCode::CREATED);
    body["session_id"].as_str().unwrap().to_string()
}

async fn answer(app: &Router, id: &str, prompt: &str, selection: Value) -> (StatusCode, Value) {
    call(
        app,
        Method::POST,
        &format!("/api/v1/sessions/{id}/answers"),
        Some(json!({ "prompt_id": prompt, "selection": selection })),
    )
    .await
}

async fn run_worked_example(app: &Router, id: &str) -> Value {
    let steps = [
        ("area", json!("chest")),
        (
            "symptoms",
            json!(["cough", "fever", "chest_pain", "wheezing", "short_breath"]),
        ),
        ("level:cough", json!("non-productive")),
        ("level:fever", json!("low")),
        ("level:chest_pain", json!("always")),
        ("level:wheezing", json!("while breathing in")),
        ("level:short_breath", json!("yes")),
        ("history:asthma_family_history", json!("yes")),
        ("history:asthma_allergy_history", json!(["yes"])),
    ];
    let mut last = Value::Null;
    for (prompt, selection) in steps {
        let (status, body) = answer(app, id, prompt, selection).await;
        assert_eq!(status, StatusCode::OK, "{prompt}: {body}");
        last = body;
    }
    last
}

#[tokio::test]
async fn lists_areas_in_kb_order() {
    let app = app();
    let (status, body) = call(&app, Method::GET, "/api/v1/areas", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        body,
        json!([{ "area_id": "chest", "display_name": "Chest" }])
    );
    let (status, _) = call(&app, Method::POST, "/api/v1/areas", None).await;
    assert_eq!(status, StatusCode::METHOD_NOT_ALLOWED);
}

#[tokio::test]
async fn lists_multiple_areas_in_order() {
    let mut doc: Value = serde_json::from_str(CHEST).unwrap();
    let areas = doc["areas"].as_array_mut().unwrap();
    let template = areas[0].clone();
    for id in ["throat", "abdomen"] {
        let mut a = template.clone();
        a["area_id"] = json!(id);
        a["display_name"] = json!(id.to_uppercase());
        areas.push(a);
    }
    let kb = KnowledgeBase::from_json_str(&doc.to_string()).unwrap();
    let app = router(AppState::new(
        kb,
        EngineConfig::default(),
        SessionStore::in_memory(),
    ));
    let (_, body) = call(&app, Method::GET, "/api/v1/areas", None).await;
    let ids: Vec<&str> = body
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["area_id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["chest", "throat", "abdomen"]);
}

#[tokio::test]
async fn create_session_envelope() {
    let app = app();
    let (status, body) = call(&app, Method::POST, "/api/v1/sessions", None).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["phase"], "AREA_SELECTION");
    assert_eq!(body["prompts"].as_array().unwrap().len(), 1);
    assert_eq!(body["prompts"][0]["kind"], "AREA");
    let other = create(&app).await;
    assert_ne!(body["session_id"].as_str().unwrap(), other);

    let (status, _) = call(&app, Method::POST, "/api/v1/sessions", Some(json!({}))).await;
    assert_eq!(status, StatusCode::CREATED);
    let request = Request::post("/api/v1/sessions")
        .body(Body::from("{not json"))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    assert_eq!(response.status(), StatusCode::BAD_REQUEST);
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let body: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(body["code"], "BAD_REQUEST");
}

#[tokio::test]
async fn submit_errors_map_to_codes() {
    let app = app();
    let id = create(&app).await;

    let (status, body) = answer(&app, "no-such-session", "area", json!("chest")).await;
    assert_eq!(
        (status, body["code"].clone()),
        (StatusCode::NOT_FOUND, json!("NOT_FOUND"))
    );

    let (status, body) = answer(&app, &id, "area", json!("abdomen")).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "INVALID_OPTION");

    let (status, body) = answer(&app, &id, "symptoms", json!(["cough"])).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "STALE_PROMPT");

    let (status, body) = call(
        &app,
        Method::POST,
        &format!("/api/v1/sessions/{id}/answers"),
        Some(json!({ "prompt": "area" })),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "BAD_REQUEST");

    let (status, body) = answer(&app, &id, "area", json!("chest")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["phase"], "SYMPTOM_SELECTION");
    assert_eq!(body["prompts"][0]["options"].as_array().unwrap().len(), 7);
}

#[tokio::test]
async fn worked_example_end_to_end() {
    let app = app();
    let id = create(&app).await;

    let (status, body) = answer(&app, &id, "area", json!("chest")).await;
    assert_eq!(status, StatusCode::OK);
    let (_, body2) = answer(
        &app,
        &id,
        "symptoms",
        json!(["cough", "fever", "chest_pain", "wheezing", "short_breath"]),
    )
    .await;
    assert_eq!(body["phase"], "SYMPTOM_SELECTION");
    assert_eq!(body2["phase"], "LEVEL_QUESTIONS");
    assert_eq!(body2["prompts"].as_array().unwrap().len(), 5);
    let (status, body) = call(
        &app,
        Method::GET,
        &format!("/api/v1/sessions/{id}/results"),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "NOT_COMPLETE");

    let sid = create(&app).await;
    let last = run_worked_example(&app, &sid).await;
    assert_eq!(last["phase"], "COMPLETE");
    assert_eq!(last["prompts"], json!([]));
    assert_eq!(
        last["results_url"],
        format!("/api/v1/sessions/{sid}/results")
    );

    let (status, doc) = call(
        &app,
        Method::GET,
        &format!("/api/v1/sessions/{sid}/results"),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let results = doc["results"].as_array().unwrap();
    let expected = [
        ("asthma", 81.419, 1),
        ("bronchitis", 48.648, 2),
        ("pneumonia", 15.625, 3),
    ];
    for (r, (disease, p, rank)) in results.iter().zip(expected) {
        assert_eq!(r["disease_id"], disease);
        assert!((r["final_probability"].as_f64().unwrap() - p).abs() <= 1e-3);
        assert_eq!(r["rank"], rank);
    }
    assert_eq!(results[0]["label"], "very likely");
    assert_eq!(results[0]["confidence"], 85.0);

    let (status, body) = answer(&app, &sid, "area", json!("chest")).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "SESSION_COMPLETE");

    let (status, body) = call(&app, Method::GET, &format!("/api/v1/sessions/{sid}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["phase"], "COMPLETE");
    let (status, _) = call(&app, Method::GET, "/api/v1/sessions/nope/results", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn results_do_not_depend_on_cache() {
    let (app, state) = app_with(SessionStore::in_memory());
    let id = create(&app).await;
    run_worked_example(&app, &id).await;
    let uri = format!("/api/v1/sessions/{id}/results");
    let (_, before) = call(&app, Method::GET, &uri, None).await;
    state
        .store
        .update(&id, |s| {
            let mut s = s.clone();
            s.results = None;
            Ok::<Session, ()>(s)
        })
        .unwrap();
    let (_, after) = call(&app, Method::GET, &uri, None).await;
    assert_eq!(before, after);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_submissions_are_linearized() {
    let app = app();
    for _ in 0..10 {
        let id = create(&app).await;
        answer(&app, &id, "area", json!("chest")).await;
        answer(
            &app,
            &id,
            "symptoms",
            json!(["cough", "fever", "chest_pain", "wheezing", "short_breath"]),
        )
        .await;
        // every level prompt submitted twice, all at once
        let levels = [
            ("level:cough", "non-productive"),
            ("level:fever", "low"),
            ("level:chest_pain", "always"),
            ("level:wheezing", "while breathing in"),
            ("level:short_breath", "yes"),
        ];
        let mut tasks = Vec::new();
        for _ in 0..2 {
            for (prompt, level) in levels {
                let app = app.clone();
                let id = id.clone();
                tasks.push(tokio::spawn(async move {
                    answer(&app, &id, prompt, json!(level)).await.0
                }));
            }
        }
        let mut ok = 0;
        for t in tasks {
            match t.await.unwrap() {
                StatusCode::OK => ok += 1,
                StatusCode::CONFLICT => {}
                other => panic!("unexpected status {other}"),
            }
        }
        assert_eq!(ok, 5, "each prompt accepted exactly once");
        let (_, body) = call(&app, Method::GET, &format!("/api/v1/sessions/{id}"), None).await;
        assert_eq!(body["phase"], "HISTORY_QUESTIONS");
        assert_eq!(
            body["answers"]["level_answers"].as_object().unwrap().len(),
            5
        );
    }
}

#[tokio::test]
async fn journal_replay_after_restart() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sessions.ndjson");
    let (id, before, all_before) = {
        let (app, state) = app_with(SessionStore::with_journal(&path).unwrap());
        let id = create(&app).await;
        run_worked_example(&app, &id).await;
        create(&app).await;
        let (_, doc) = call(
            &app,
            Method::GET,
            &format!("/api/v1/sessions/{id}/results"),
            None,
        )
        .await;
        state.store.flush().unwrap();
        let all: Vec<Session> = state
            .store
            .snapshot_all()
            .iter()
            .map(|s| (**s).clone())
            .collect();
        (id, doc, all)
    };
    let (app, state) = app_with(SessionStore::with_journal(&path).unwrap());
    let all_after: Vec<Session> = state
        .store
        .snapshot_all()
        .iter()
        .map(|s| (**s).clone())
        .collect();
    assert_eq!(all_before, all_after);
    let (status, after) = call(
        &app,
        Method::GET,
        &format!("/api/v1/sessions/{id}/results"),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(before, after);
}
