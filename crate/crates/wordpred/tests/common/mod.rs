//! A live service on an ephemeral port, for integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use reqwest::{Client, Method, StatusCode};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};
use tokio::sync::oneshot;
use tokio::task::JoinHandle;
use wordpred::api::{EventRequest, View};
use wordpred::files::CorpusSource;
use wordpred::service::{self, parse_event, AppState, ServiceConfig};
use wordpred_core::{Engine, Lexicon, Session, UserProfile};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn corpus(name: &str) -> Lexicon {
    CorpusSource::parse(fixture(name).to_str().unwrap()).unwrap().load().unwrap()
}

pub struct Server {
    pub base: String,
    pub client: Client,
    stop: Option<oneshot::Sender<()>>,
    task: JoinHandle<std::io::Result<()>>,
}

impl Server {
    pub async fn start(corpora: Vec<Lexicon>, config: ServiceConfig) -> Server {
        let listener = service::bind(0).await.unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let (tx, rx) = oneshot::channel::<()>();
        let app = AppState::new(corpora, config);
        let task = tokio::spawn(service::serve(app, listener, async {
            let _ = rx.await;
        }));
        Server { base, client: Client::new(), stop: Some(tx), task }
    }

    pub async fn shutdown(mut self) {
        if let Some(tx) = self.stop.take() {
            let _ = tx.send(());
        }
        (&mut self.task).await.unwrap().unwrap();
    }

    pub async fn call(&self, method: Method, path: &str, body: Option<Value>) -> (StatusCode, Value) {
        let mut req = self.client.request(method, format!("{}{path}", self.base));
        if let Some(body) = body {
            req = req.json(&body);
        }
        let resp = req.send().await.unwrap();
        let status = resp.status();
        let text = resp.text().await.unwrap();
        (status, serde_json::from_str(&text).unwrap_or(Value::String(text)))
    }

    pub async fn raw_post(&self, path: &str, body: &'static str) -> (StatusCode, Value) {
        let resp = self
            .client
            .post(format!("{}{path}", self.base))
            .header("content-type", "application/json")
            .body(body)
            .send()
            .await
            .unwrap();
        let status = resp.status();
        (status, resp.json().await.unwrap())
    }

    pub async fn create(&self, username: &str, tag: &str) -> String {
        let (status, v) = self
            .call(Method::POST, "/sessions", Some(serde_json::json!({"username": username, "corpus_tag": tag})))
            .await;
        assert_eq!(status, StatusCode::OK, "{v}");
        v["session_id"].as_str().unwrap().to_string()
    }

    pub async fn event(&self, id: &str, event: Value) -> (StatusCode, Value) {
        self.call(Method::POST, &format!("/sessions/{id}/events"), Some(event)).await
    }
}

pub fn words(page: &Value) -> Vec<String> {
    page["items"].as_array().unwrap().iter().map(|c| c["word"].as_str().unwrap().to_string()).collect()
}

pub fn key(c: char) -> Value {
    json!({"type": "key_char", "payload": {"char": c.to_string()}})
}

pub fn select(slot: usize) -> Value {
    json!({"type": "select", "payload": {"slot": slot}})
}

/// A random but valid-looking event stream over the essay alphabet.
pub fn stress_script(seed: u64, len: usize) -> Vec<Value> {
    let mut rng = StdRng::seed_from_u64(seed);
    let alphabet: Vec<char> = "aefhikmnorstwy".chars().collect();
    (0..len)
        .map(|_| match rng.random_range(0..10) {
            0..=4 => key(alphabet[rng.random_range(0..alphabet.len())]),
            5 | 6 => select(rng.random_range(0..6)),
            7 => json!({"type": "flip_page", "payload": {"direction": if rng.random_bool(0.7) { "next" } else { "prev" }}}),
            8 => json!({"type": "key_separator"}),
            _ => json!({"type": "backspace"}),
        })
        .collect()
}

/// What the service must answer for each event, computed in-process.
pub fn local_replay(corpus_name: &str, script: &[Value]) -> Vec<Result<View, String>> {
    let lexicon = std::sync::Arc::new(corpus(corpus_name));
    let profile = UserProfile::new("x", lexicon.tag().clone()).unwrap();
    let mut engine = Engine::new(lexicon, profile, Default::default());
    let mut session = Session::new(&engine);
    script
        .iter()
        .map(|v| {
            let req: EventRequest = serde_json::from_value(v.clone()).unwrap();
            let event = parse_event(&req).unwrap();
            match session.apply(&mut engine, event) {
                Ok(()) => Ok(View::from(session.state())),
                Err(e) => Err(format!("{e:?}")),
            }
        })
        .collect()
}

pub async fn drive(s: &Server, id: &str, script: &[Value]) -> Vec<Result<View, String>> {
    let mut out = Vec::with_capacity(script.len());
    for event in script {
        let (status, body) = s.event(id, event.clone()).await;
        out.push(if status == StatusCode::OK {
            Ok(serde_json::from_value(body).unwrap())
        } else {
            Err(body["error_code"].as_str().unwrap().to_string())
        });
        tokio::task::yield_now().await;
    }
    out
}

/// Same successes with the same views, and failures in the same places.
pub fn outcomes_match(got: &[Result<View, String>], want: &[Result<View, String>]) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("{} responses for {} events", got.len(), want.len()));
    }
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        match (g, w) {
            (Ok(g), Ok(w)) if g == w => {}
            (Err(_), Err(_)) => {}
            _ => return Err(format!("event {i}: service {g:?} vs local {w:?}")),
        }
    }
    Ok(())
}
