//! Per-committer text corpora and 52-trait personality scoring.
//!
//! Two backends produce the same [`TraitVector`]: an offline lexicon scorer
//! bundled with the crate, and a client for any HTTP service speaking the
//! `{"text"}` -> `{"traits": {...}}` JSON contract.

mod corpus;
mod lexicon;
mod remote;
mod taxonomy;

use std::fmt;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Scalar;

pub use corpus::{build_author_corpus, word_count, AuthorCorpus, DEFAULT_MIN_WORDS};
pub use lexicon::{score_traits_lexicon, Calibration, Lexicon, BUNDLED_LEXICON};
pub use remote::{score_traits_remote, RemoteScorer};
pub use taxonomy::{trait_index, trait_keys, TraitDescriptor, TraitGroup, RADAR_DEFAULT, TAXONOMY, TRAIT_COUNT};

#[derive(Debug, Error)]
pub enum TraitError {
    #[error("corpus for {identity_id} ({word_count} words) is below the word gate")]
    IneligibleCorpus { identity_id: String, word_count: usize },
    #[error("unknown trait key {0:?}")]
    UnknownTrait(String),
    #[error("calibration sigma for {0} must be positive")]
    BadCalibration(String),
    #[error("transport error: {0}")]
    TransportError(String),
    #[error("service returned HTTP {0}")]
    ServiceError(u16),
    #[error("response schema error: {0}")]
    SchemaError(String),
    #[error("lexicon parse error: {0}")]
    Lexicon(#[from] serde_json::Error),
    #[error("traits.csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraitSource {
    Lexicon,
    Remote,
}

impl fmt::Display for TraitSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraitSource::Lexicon => "lexicon",
            TraitSource::Remote => "remote",
        })
    }
}

/// 52 percentile fractions in canonical taxonomy order.
#[derive(Debug, Clone, PartialEq)]
pub struct TraitVector<T> {
    pub identity_id: String,
    pub values: Vec<T>,
    pub source: TraitSource,
}

impl<T: Scalar> TraitVector<T> {
    pub fn value(&self, key: &str) -> Option<T> {
        trait_index(key).map(|i| self.values[i])
    }
}

/// Writes `traits.csv`: `identity_id` plus 52 columns, six decimals.
pub fn write_traits_csv<T: Scalar, W: Write>(vectors: &[TraitVector<T>], mut out: W) -> io::Result<()> {
    let header: Vec<&str> = std::iter::once("identity_id").chain(trait_keys()).collect();
    writeln!(out, "{}", header.join(","))?;
    for v in vectors {
        write!(out, "{}", crate::csv_field(&v.identity_id))?;
        for x in &v.values {
            write!(out, ",{:.6}", x.to_f64_lossy())?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Reads `traits.csv` back. The backend is not stored in the file and is
/// supplied by the caller.
pub fn read_traits_csv<T: Scalar, R: BufRead>(input: R, source: TraitSource) -> Result<Vec<TraitVector<T>>, TraitError> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    let expected: Vec<&str> = std::iter::once("identity_id").chain(trait_keys()).collect();
    if header.trim_end() != expected.join(",") {
        return Err(TraitError::Csv { line: 1, msg: "unexpected header".into() });
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let err = |msg: &str| TraitError::Csv { line: i + 2, msg: msg.into() };
        if fields.len() != TRAIT_COUNT + 1 {
            return Err(err("expected 53 columns"));
        }
        let values = fields[1..]
            .iter()
            .map(|f| {
                let x: f64 = f.trim().parse().map_err(|_| err("bad number"))?;
                if !(0.0..=1.0).contains(&x) {
                    return Err(err("value outside [0,1]"));
                }
                Ok(T::from_f64_lossy(x))
            })
            .collect::<Result<Vec<T>, _>>()?;
        out.push(TraitVector { identity_id: fields[0].to_string(), values, source });
    }
    Ok(out)
}

pub(crate) fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_53_columns_and_round_trips() {
        let v = TraitVector {
            identity_id: "id-1".to_string(),
            values: (0..TRAIT_COUNT).map(|i| i as f64 / 51.0).collect(),
            source: TraitSource::Lexicon,
        };
        let mut buf = Vec::new();
        write_traits_csv(&[v.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        for line in text.lines() {
            assert_eq!(line.split(',').count(), 53);
        }
        assert!(text.lines().nth(1).unwrap().starts_with("id-1,0.000000,0.019608,"));
        let back: Vec<TraitVector<f64>> = read_traits_csv(&buf[..], TraitSource::Lexicon).unwrap();
        for (a, b) in back[0].values.iter().zip(&v.values) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn csv_rejects_short_rows() {
        let header: Vec<&str> = std::iter::once("identity_id").chain(trait_keys()).collect();
        let text = format!("{}\nid,0.5\n", header.join(","));
        assert!(read_traits_csv::<f64, _>(text.as_bytes(), TraitSource::Remote).is_err());
    }
}
