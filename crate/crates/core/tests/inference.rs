mod common;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use clt_core::http::HttpError;
use clt_core::inference::{
    request_key, DecodeParams, EchoGold, HttpGenerator, InferenceClient, InferenceError, MockGenerator,
    ResponseCache,
};
use clt_core::retry::RetryPolicy;
use proptest::prelude::*;

fn upper() -> MockGenerator {
    MockGenerator::new(|p| Ok(format!(" {}\nmore", p.to_uppercase())))
}

#[test]
fn second_call_hits_cache() {
    let dir = tempfile::tempdir().unwrap();
    let gen = Arc::new(upper());
    let probe = gen.probe.clone();
    let client = InferenceClient::new("m", gen).with_cache(ResponseCache::open(dir.path()).unwrap());
    let p = DecodeParams::default();
    let first = client.generate("abc", &p).unwrap();
    assert!(!first.from_cache);
    assert_eq!(first.parsed_answer, "ABC");
    let second = client.generate("abc", &p).unwrap();
    assert!(second.from_cache);
    assert_eq!(probe.calls(), 1);
    assert_eq!(
        serde_json::to_string(&clt_core::inference::GenerationRecord { from_cache: false, ..second }).unwrap(),
        serde_json::to_string(&first).unwrap()
    );
}

#[test]
fn cache_survives_new_client() {
    let dir = tempfile::tempdir().unwrap();
    let p = DecodeParams::default();
    let a = InferenceClient::new("m", Arc::new(upper())).with_cache(ResponseCache::open(dir.path()).unwrap());
    a.generate("x", &p).unwrap();
    let gen = Arc::new(upper());
    let probe = gen.probe.clone();
    let b = InferenceClient::new("m", gen).with_cache(ResponseCache::open(dir.path()).unwrap());
    assert!(b.generate("x", &p).unwrap().from_cache);
    assert_eq!(probe.calls(), 0);
    assert_eq!(b.network_calls(), 0);
}

#[test]
fn concurrency_is_bounded() {
    let gen = Arc::new(upper().with_delay(Duration::from_millis(3)));
    let probe = gen.probe.clone();
    let client = InferenceClient::new("m", gen);
    let reqs: Vec<_> = (0..100).map(|i| (format!("p{i}"), DecodeParams::default())).collect();
    let out = client.run_batch(&reqs, 8, false).unwrap();
    assert_eq!(out.len(), 100);
    assert!(probe.peak() <= 8, "peak {}", probe.peak());
    assert!(probe.peak() > 1);
    for (i, r) in out.iter().enumerate() {
        assert_eq!(r.as_ref().unwrap().parsed_answer, format!("P{i}"));
    }
}

#[test]
fn limit_one_equals_sequential() {
    let reqs: Vec<_> = (0..20).map(|i| (format!("q{i}"), DecodeParams::default())).collect();
    let gen = Arc::new(upper());
    let probe = gen.probe.clone();
    let client = InferenceClient::new("m", gen);
    let batch = client.run_batch(&reqs, 1, false).unwrap();
    assert_eq!(probe.peak(), 1);
    let seq = InferenceClient::new("m", Arc::new(upper()));
    for ((p, params), r) in reqs.iter().zip(batch) {
        let a = r.unwrap();
        let b = seq.generate(p, params).unwrap();
        assert_eq!((a.request_key, a.raw_output, a.parsed_answer), (b.request_key, b.raw_output, b.parsed_answer));
    }
}

#[test]
fn one_failure_is_isolated() {
    let gen = MockGenerator::new(|p| {
        if p == "p37" {
            Err(HttpError::Status { code: 400, body: "bad".into() })
        } else {
            Ok("ok".into())
        }
    });
    let client = InferenceClient::new("m", Arc::new(gen)).with_retry(RetryPolicy::no_delay(2));
    let reqs: Vec<_> = (0..100).map(|i| (format!("p{i}"), DecodeParams::default())).collect();
    let out = client.run_batch(&reqs, 8, false).unwrap();
    assert_eq!(out.iter().filter(|r| r.is_ok()).count(), 99);
    match &out[37] {
        Err(InferenceError::Request { attempts, .. }) => assert_eq!(*attempts, 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn fail_fast_skips_the_rest() {
    let gen = MockGenerator::new(|p| if p == "p0" { Err(HttpError::Transport("down".into())) } else { Ok("ok".into()) });
    let client = InferenceClient::new("m", Arc::new(gen)).with_retry(RetryPolicy::no_delay(1));
    let reqs: Vec<_> = (0..50).map(|i| (format!("p{i}"), DecodeParams::default())).collect();
    let out = client.run_batch(&reqs, 1, true).unwrap_err();
    // p0 fails first and everything after it is skipped
    assert!(matches!(out, InferenceError::AllFailed(50, _)), "{out}");
}

#[test]
fn all_failed_is_an_error() {
    let gen = MockGenerator::new(|_| Err(HttpError::Transport("down".into())));
    let client = InferenceClient::new("m", Arc::new(gen)).with_retry(RetryPolicy::no_delay(2));
    let reqs: Vec<_> = (0..5).map(|i| (format!("p{i}"), DecodeParams::default())).collect();
    assert!(matches!(client.run_batch(&reqs, 2, false), Err(InferenceError::AllFailed(5, _))));
    assert_eq!(client.network_calls(), 10);
}

#[test]
fn empty_output_is_not_an_error() {
    let client = InferenceClient::new("m", Arc::new(MockGenerator::new(|_| Ok(String::new()))));
    assert_eq!(client.generate("q", &DecodeParams::default()).unwrap().parsed_answer, "");
}

#[test]
fn echo_gold_answers_the_query_block() {
    let mut gen = EchoGold::new("\n\n");
    gen.insert("Question: who?\nAnswer:", "the Broncos");
    let client = InferenceClient::new("m", Arc::new(gen));
    let rec = client.generate("demo\nAnswer: x\n\nQuestion: who?\nAnswer:", &DecodeParams::default()).unwrap();
    assert_eq!(rec.parsed_answer, "the Broncos");
}

#[test]
fn http_generator_round_trip() {
    let seen = Arc::new(std::sync::Mutex::new(Vec::new()));
    let log = seen.clone();
    let server = common::serve(move |req| {
        log.lock().unwrap().push(req.clone());
        (200, r#"{"choices":[{"text":" Denver Broncos\nQuestion: next"}]}"#.to_string())
    });
    std::env::set_var("CLT_TEST_GEN_TOKEN", "sekrit");
    let gen = HttpGenerator::new(server.url(), Some("CLT_TEST_GEN_TOKEN".into()), Duration::from_secs(5)).unwrap();
    let client = InferenceClient::new("bloom-7b1", Arc::new(gen));
    let rec = client.generate("Question: who won?\nAnswer:", &DecodeParams::default()).unwrap();
    assert_eq!(rec.parsed_answer, "Denver Broncos");
    let reqs = seen.lock().unwrap();
    let req = &reqs[0];
    assert!(req.headers.to_ascii_lowercase().contains("authorization: bearer sekrit"));
    let body: serde_json::Value = serde_json::from_str(&req.body).unwrap();
    assert_eq!(body["model"], "bloom-7b1");
    assert_eq!(body["max_tokens"], 32);
    assert_eq!(body["temperature"], 0.0);
    assert_eq!(body["stop"][0], "\n");
}

#[test]
fn http_generator_retries_server_errors() {
    let hits = Arc::new(AtomicUsize::new(0));
    let h = hits.clone();
    let server = common::serve(move |_| {
        if h.fetch_add(1, Ordering::SeqCst) < 2 {
            (503, "busy".into())
        } else {
            (200, r#"{"text":"Paris"}"#.into())
        }
    });
    let gen = HttpGenerator::new(server.url(), None, Duration::from_secs(5)).unwrap();
    let client = InferenceClient::new("m", Arc::new(gen)).with_retry(RetryPolicy::no_delay(3));
    assert_eq!(client.generate("q", &DecodeParams::default()).unwrap().parsed_answer, "Paris");
    assert_eq!(hits.load(Ordering::SeqCst), 3);
}

#[test]
fn http_generator_gives_up_on_client_errors() {
    let server = common::serve(|_| (401, "nope".into()));
    let gen = HttpGenerator::new(server.url(), None, Duration::from_secs(5)).unwrap();
    let client = InferenceClient::new("m", Arc::new(gen)).with_retry(RetryPolicy::no_delay(3));
    match client.generate("q", &DecodeParams::default()) {
        Err(InferenceError::Request { attempts: 1, key, .. }) => {
            assert_eq!(key, request_key("m", "q", &DecodeParams::default()))
        }
        other => panic!("{other:?}"),
    }
}

proptest! {
    #[test]
    fn distinct_prompts_distinct_keys(a in ".{0,40}", b in ".{0,40}") {
        prop_assume!(a != b);
        let p = DecodeParams::default();
        prop_assert_ne!(request_key("m", &a, &p), request_key("m", &b, &p));
    }
}
