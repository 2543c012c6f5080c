use std::collections::BTreeMap;

use serde::Deserialize;

use super::{logistic, trait_index, AuthorCorpus, TraitError, TraitSource, TraitVector, TAXONOMY, TRAIT_COUNT};
use crate::Scalar;

/// Word list shipped with the crate.
pub const BUNDLED_LEXICON: &str = include_str!("../../data/lexicon.json");

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct Calibration {
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Deserialize)]
struct LexiconFile {
    default_calibration: Calibration,
    #[serde(default)]
    calibration: BTreeMap<String, Calibration>,
    entries: BTreeMap<String, BTreeMap<String, f64>>,
}

/// Word -> weighted trait contributions, with per-trait calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<(usize, f64)>>,
    calibration: Vec<Calibration>,
}

impl Lexicon {
    pub fn from_json(text: &str) -> Result<Self, TraitError> {
        let file: LexiconFile = serde_json::from_str(text)?;
        let mut calibration = vec![file.default_calibration; TRAIT_COUNT];
        for (key, c) in file.calibration {
            let i = trait_index(&key).ok_or_else(|| TraitError::UnknownTrait(key.clone()))?;
            calibration[i] = c;
        }
        for (i, c) in calibration.iter().enumerate() {
            if c.sigma.is_nan() || c.sigma <= 0.0 {
                return Err(TraitError::BadCalibration(TAXONOMY[i].key.to_string()));
            }
        }
        let mut entries = BTreeMap::new();
        for (word, weights) in file.entries {
            let mut list = Vec::with_capacity(weights.len());
            for (key, w) in weights {
                let i = trait_index(&key).ok_or_else(|| TraitError::UnknownTrait(key.clone()))?;
                list.push((i, w));
            }
            entries.insert(word.to_lowercase(), list);
        }
        Ok(Self { entries, calibration })
    }

    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_LEXICON).expect("bundled lexicon is valid")
    }

    pub fn calibration(&self, trait_idx: usize) -> Calibration {
        self.calibration[trait_idx]
    }

    /// Multiplies every weight by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(w, l)| (w.clone(), l.iter().map(|&(i, x)| (i, x * c)).collect()))
            .collect();
        Self { entries, calibration: self.calibration.clone() }
    }

    /// Per-trait raw rates: summed weights of matched tokens over word count.
    pub fn raw_scores(&self, text: &str) -> [f64; TRAIT_COUNT] {
        let mut sums = [0.0; TRAIT_COUNT];
        let mut words = 0usize;
        for token in text.split_whitespace() {
            words += 1;
            let t = token.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
            if let Some(list) = self.entries.get(&t) {
                for &(i, w) in list {
                    sums[i] += w;
                }
            }
        }
        if words > 0 {
            for s in &mut sums {
                *s /= words as f64;
            }
        }
        sums
    }
}

/// Scores an eligible corpus: `logistic((rate - mu) / sigma)` per trait.
pub fn score_traits_lexicon<T: Scalar>(corpus: &AuthorCorpus, lexicon: &Lexicon) -> Result<TraitVector<T>, TraitError> {
    if !corpus.eligible {
        return Err(TraitError::IneligibleCorpus {
            identity_id: corpus.identity_id.clone(),
            word_count: corpus.word_count,
        });
    }
    let raw = lexicon.raw_scores(&corpus.text);
    let values = raw
        .iter()
        .zip(&lexicon.calibration)
        .map(|(r, c)| T::from_f64_lossy(logistic((r - c.mu) / c.sigma)))
        .collect();
    Ok(TraitVector { identity_id: corpus.identity_id.clone(), values, source: TraitSource::Lexicon })
}
