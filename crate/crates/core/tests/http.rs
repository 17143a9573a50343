use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::sync::mpsc;
use std::thread;

use serde_json::Value;
use toolplan::backends::{parse_completion, HttpBackend, HttpBackendConfig};
use toolplan::protocol::{estimate_tokens, AgentBackend, AgentRole, BackendError, SamplingParams};

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/http").join(name);
    std::fs::read_to_string(path).unwrap()
}

struct Captured {
    head: String,
    body: Value,
}

/// Serves one request with `status` and `body`, handing back what was sent.
fn serve_once(status: u16, body: String) -> (String, mpsc::Receiver<Captured>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut head = String::new();
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            if line == "\r\n" || line.is_empty() {
                break;
            }
            head.push_str(&line);
        }
        let len = head
            .lines()
            .find_map(|l| l.to_ascii_lowercase().strip_prefix("content-length:").map(|v| v.trim().parse::<usize>().unwrap()))
            .expect("request has a content length");
        let mut buf = vec![0; len];
        reader.read_exact(&mut buf).unwrap();
        let mut stream = stream;
        write!(
            stream,
            "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        )
        .unwrap();
        tx.send(Captured { head, body: serde_json::from_slice(&buf).unwrap() }).unwrap();
    });
    (url, rx)
}

fn backend(endpoint: String) -> HttpBackend {
    HttpBackend::new(HttpBackendConfig { endpoint, model: "test-model".into(), ..Default::default() })
}

#[test]
fn sends_one_message_and_reads_usage() {
    let (url, rx) = serve_once(200, fixture("completion_ok.json"));
    let c = backend(url).complete(AgentRole::Planner, "plan this", &AgentRole::Planner.default_sampling()).unwrap();
    assert!(c.text.starts_with("api_call(\"pay_bill\""));
    assert_eq!((c.usage.prompt_tokens, c.usage.completion_tokens, c.usage.calls), (321, 17, 1));
    let req = rx.recv().unwrap();
    assert!(req.head.starts_with("POST /v1/chat/completions"));
    assert_eq!(req.body["model"], "test-model");
    assert_eq!(req.body["messages"][0]["content"], "plan this");
    assert_eq!(req.body["temperature"], 0.1);
}

#[test]
fn missing_usage_falls_back_to_estimates() {
    let (url, _rx) = serve_once(200, fixture("completion_no_usage.json"));
    let prompt = "simulate a payment call";
    let c = backend(url).complete(AgentRole::Simulator, prompt, &AgentRole::Simulator.default_sampling()).unwrap();
    assert_eq!(c.usage.prompt_tokens, estimate_tokens(prompt));
    assert_eq!(c.usage.completion_tokens, estimate_tokens(&c.text));
}

#[test]
fn error_statuses_are_typed() {
    let (url, _rx) = serve_once(429, fixture("rate_limited.json"));
    let err = backend(url).complete(AgentRole::Critic, "x", &SamplingParams::new(0.0, 16)).unwrap_err();
    assert_eq!(err, BackendError::HttpStatus(429));
}

#[test]
fn role_overrides_and_output_cap_apply() {
    let (url, rx) = serve_once(200, fixture("completion_ok.json"));
    let b = HttpBackend::new(HttpBackendConfig {
        endpoint: url,
        critic: Some(SamplingParams::new(0.3, 999)),
        max_output: 64,
        ..Default::default()
    });
    b.complete(AgentRole::Critic, "x", &AgentRole::Critic.default_sampling()).unwrap();
    let req = rx.recv().unwrap();
    assert_eq!(req.body["temperature"], 0.3);
    assert_eq!(req.body["max_tokens"], 64);
}

#[test]
fn bearer_token_comes_from_the_environment() {
    let (url, rx) = serve_once(200, fixture("completion_ok.json"));
    std::env::set_var("TOOLPLAN_TEST_KEY", "secret-token");
    let b = HttpBackend::new(HttpBackendConfig {
        endpoint: url,
        api_key_env: Some("TOOLPLAN_TEST_KEY".into()),
        ..Default::default()
    });
    b.complete(AgentRole::Planner, "x", &AgentRole::Planner.default_sampling()).unwrap();
    let head = rx.recv().unwrap().head.to_ascii_lowercase();
    assert!(head.contains("authorization: bearer secret-token"));

    let missing = HttpBackend::new(HttpBackendConfig {
        api_key_env: Some("TOOLPLAN_TEST_KEY_UNSET".into()),
        ..Default::default()
    });
    let err = missing.complete(AgentRole::Planner, "x", &AgentRole::Planner.default_sampling()).unwrap_err();
    assert!(matches!(err, BackendError::Unavailable(_)));
}

#[test]
fn unreachable_endpoints_are_transport_errors() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let b = backend(format!("http://127.0.0.1:{port}/v1/chat/completions"));
    let err = b.complete(AgentRole::Planner, "x", &AgentRole::Planner.default_sampling()).unwrap_err();
    assert!(matches!(err, BackendError::Transport(_) | BackendError::Timeout), "{err:?}");
}

#[test]
fn malformed_bodies_are_rejected() {
    assert!(matches!(parse_completion("p", "not json"), Err(BackendError::MalformedResponse(_))));
    assert!(matches!(parse_completion("p", r#"{"choices": []}"#), Err(BackendError::MalformedResponse(_))));
}
