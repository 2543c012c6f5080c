use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::Deserialize;

use super::{AuthorCorpus, TraitError, TraitSource, TraitVector, TAXONOMY};
use crate::Scalar;

/// Client for a trait-inference HTTP service.
///
/// Request: `POST {"text": "..."}`. Response: `{"traits": {"<key>": fraction, ...}}`
/// carrying all 52 canonical keys.
#[derive(Debug, Clone)]
pub struct RemoteScorer {
    agent: ureq::Agent,
    endpoint: String,
}

#[derive(Deserialize)]
struct Response {
    traits: BTreeMap<String, f64>,
}

impl RemoteScorer {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(timeout).build();
        Self { agent, endpoint: endpoint.into() }
    }

    pub fn score<T: Scalar>(&self, corpus: &AuthorCorpus) -> Result<TraitVector<T>, TraitError> {
        if !corpus.eligible {
            return Err(TraitError::IneligibleCorpus {
                identity_id: corpus.identity_id.clone(),
                word_count: corpus.word_count,
            });
        }
        let resp = match self
            .agent
            .post(&self.endpoint)
            .send_json(serde_json::json!({ "text": corpus.text }))
        {
            Ok(r) => r,
            Err(ureq::Error::Status(code, _)) => return Err(TraitError::ServiceError(code)),
            Err(ureq::Error::Transport(t)) => return Err(TraitError::TransportError(t.to_string())),
        };
        let body = resp
            .into_string()
            .map_err(|e| TraitError::TransportError(e.to_string()))?;
        let parsed: Response =
            serde_json::from_str(&body).map_err(|e| TraitError::SchemaError(e.to_string()))?;
        let values = TAXONOMY
            .iter()
            .map(|t| match parsed.traits.get(t.key) {
                None => Err(TraitError::SchemaError(format!("missing trait {:?}", t.key))),
                Some(x) if !(0.0..=1.0).contains(x) => {
                    Err(TraitError::SchemaError(format!("{} = {x} outside [0,1]", t.key)))
                }
                Some(&x) => Ok(T::from_f64_lossy(x)),
            })
            .collect::<Result<Vec<T>, _>>()?;
        Ok(TraitVector { identity_id: corpus.identity_id.clone(), values, source: TraitSource::Remote })
    }

    /// Scores several corpora with at most `concurrency` requests in flight.
    /// Results come back in input order.
    pub fn score_many<T: Scalar>(
        &self,
        corpora: &[&AuthorCorpus],
        concurrency: usize,
    ) -> Vec<Result<TraitVector<T>, TraitError>> {
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<Result<TraitVector<T>, TraitError>>>> =
            Mutex::new((0..corpora.len()).map(|_| None).collect());
        std::thread::scope(|s| {
            for _ in 0..concurrency.max(1).min(corpora.len().max(1)) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= corpora.len() {
                        break;
                    }
                    let r = self.score(corpora[i]);
                    slots.lock().unwrap()[i] = Some(r);
                });
            }
        });
        slots
            .into_inner()
            .unwrap()
            .into_iter()
            .map(|r| r.expect("every slot filled"))
            .collect()
    }
}

pub fn score_traits_remote<T: Scalar>(
    corpus: &AuthorCorpus,
    endpoint: &str,
    timeout: Duration,
) -> Result<TraitVector<T>, TraitError> {
    RemoteScorer::new(endpoint, timeout).score(corpus)
}
