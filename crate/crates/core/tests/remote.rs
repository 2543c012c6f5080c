//! Remote scorer against a throwaway local HTTP server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use sociominer_core::traits::{trait_keys, AuthorCorpus, RemoteScorer, TraitError, TraitSource, TraitVector};

/// Serves `respond(request_body)` as `(status, body)` until the test ends.
fn serve<F>(respond: F) -> (String, Arc<AtomicUsize>)
where
    F: Fn(&str) -> (u16, String) + Send + Sync + 'static,
{
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/profile", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    let respond = Arc::new(respond);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let respond = respond.clone();
            let counter = counter.clone();
            thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut len = 0usize;
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).unwrap_or(0) == 0 {
                        return;
                    }
                    let line = line.trim_end();
                    if line.is_empty() {
                        break;
                    }
                    if let Some((k, v)) = line.split_once(':') {
                        if k.eq_ignore_ascii_case("content-length") {
                            len = v.trim().parse().unwrap();
                        }
                    }
                }
                let mut body = vec![0u8; len];
                reader.read_exact(&mut body).unwrap();
                counter.fetch_add(1, Ordering::SeqCst);
                let (status, payload) = respond(&String::from_utf8_lossy(&body));
                let reply = format!(
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
                    payload.len()
                );
                let _ = stream.write_all(reply.as_bytes());
            });
        }
    });
    (url, hits)
}

fn all_traits(value: f64, skip: Option<&str>) -> String {
    let fields: Vec<String> = trait_keys()
        .filter(|k| Some(*k) != skip)
        .map(|k| format!("\"{k}\":{value}"))
        .collect();
    format!("{{\"traits\":{{{}}}}}", fields.join(","))
}

fn corpus(id: &str) -> AuthorCorpus {
    AuthorCorpus { identity_id: id.into(), text: format!("text of {id}"), word_count: 4000, eligible: true }
}

fn scorer(url: &str) -> RemoteScorer {
    RemoteScorer::new(url, Duration::from_secs(5))
}

#[test]
fn uniform_response_gives_uniform_vector() {
    let (url, _) = serve(|_| (200, all_traits(0.5, None)));
    let v: TraitVector<f64> = scorer(&url).score(&corpus("a")).unwrap();
    assert_eq!(v.values, vec![0.5; 52]);
    assert_eq!(v.source, TraitSource::Remote);
    assert_eq!(v.identity_id, "a");
}

#[test]
fn server_error_is_reported_with_status() {
    let (url, _) = serve(|_| (500, "{}".into()));
    let err = scorer(&url).score::<f64>(&corpus("a")).unwrap_err();
    assert!(matches!(err, TraitError::ServiceError(500)), "{err:?}");
}

#[test]
fn missing_trait_is_a_schema_error() {
    let (url, _) = serve(|_| (200, all_traits(0.5, Some("gregariousness"))));
    let err = scorer(&url).score::<f64>(&corpus("a")).unwrap_err();
    match err {
        TraitError::SchemaError(msg) => assert!(msg.contains("gregariousness"), "{msg}"),
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn out_of_range_and_garbage_are_schema_errors() {
    let (url, _) = serve(|_| (200, all_traits(1.5, None)));
    assert!(matches!(scorer(&url).score::<f64>(&corpus("a")), Err(TraitError::SchemaError(_))));
    let (url, _) = serve(|_| (200, "not json".into()));
    assert!(matches!(scorer(&url).score::<f64>(&corpus("a")), Err(TraitError::SchemaError(_))));
}

#[test]
fn unreachable_endpoint_is_a_transport_error() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let err = scorer(&format!("http://127.0.0.1:{port}/")).score::<f64>(&corpus("a")).unwrap_err();
    assert!(matches!(err, TraitError::TransportError(_)), "{err:?}");
}

#[test]
fn ineligible_corpus_never_reaches_the_server() {
    let (url, hits) = serve(|_| (200, all_traits(0.5, None)));
    let mut c = corpus("a");
    c.eligible = false;
    c.word_count = 3499;
    let err = scorer(&url).score::<f64>(&c).unwrap_err();
    assert!(matches!(err, TraitError::IneligibleCorpus { word_count: 3499, .. }));
    assert_eq!(hits.load(Ordering::SeqCst), 0);
}

#[test]
fn score_many_keeps_input_order() {
    // the value echoes the request so results can be matched to inputs
    let (url, hits) = serve(|body| {
        let n: f64 = body.trim_end_matches("\"}").rsplit(' ').next().unwrap().parse().unwrap();
        (200, all_traits(n / 10.0, None))
    });
    let corpora: Vec<AuthorCorpus> = (0..8).map(|i| corpus(&i.to_string())).collect();
    let refs: Vec<&AuthorCorpus> = corpora.iter().collect();
    let results = scorer(&url).score_many::<f64>(&refs, 3);
    assert_eq!(hits.load(Ordering::SeqCst), 8);
    for (i, r) in results.into_iter().enumerate() {
        let v = r.unwrap();
        assert_eq!(v.identity_id, i.to_string());
        assert!((v.values[0] - i as f64 / 10.0).abs() < 1e-12);
    }
}
