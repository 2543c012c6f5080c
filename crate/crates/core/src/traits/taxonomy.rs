//! The fixed 52-trait personality taxonomy.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TraitGroup {
    Dimension,
    Facet,
    Need,
    Value,
}

impl fmt::Display for TraitGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraitGroup::Dimension => "dimension",
            TraitGroup::Facet => "facet",
            TraitGroup::Need => "need",
            TraitGroup::Value => "value",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraitDescriptor {
    pub key: &'static str,
    pub display_name: &'static str,
    pub group: TraitGroup,
    /// Parent Big Five dimension key, for facets.
    pub parent: Option<&'static str>,
}

pub const TRAIT_COUNT: usize = 52;

const fn dim(key: &'static str, display_name: &'static str) -> TraitDescriptor {
    TraitDescriptor { key, display_name, group: TraitGroup::Dimension, parent: None }
}

const fn facet(parent: &'static str, key: &'static str, display_name: &'static str) -> TraitDescriptor {
    TraitDescriptor { key, display_name, group: TraitGroup::Facet, parent: Some(parent) }
}

const fn need(key: &'static str, display_name: &'static str) -> TraitDescriptor {
    TraitDescriptor { key, display_name, group: TraitGroup::Need, parent: None }
}

const fn value(key: &'static str, display_name: &'static str) -> TraitDescriptor {
    TraitDescriptor { key, display_name, group: TraitGroup::Value, parent: None }
}

/// Canonical order: 5 dimensions, 30 facets grouped by dimension, 12 needs,
/// 5 values. Every CSV and table in the crate uses this order.
pub static TAXONOMY: [TraitDescriptor; TRAIT_COUNT] = [
    dim("openness", "Openness"),
    dim("conscientiousness", "Conscientiousness"),
    dim("extraversion", "Extraversion"),
    dim("agreeableness", "Agreeableness"),
    dim("neuroticism", "Neuroticism"),
    facet("openness", "adventurousness", "Adventurousness"),
    facet("openness", "artistic_interests", "Artistic interests"),
    facet("openness", "emotionality", "Emotionality"),
    facet("openness", "imagination", "Imagination"),
    facet("openness", "intellect", "Intellect"),
    facet("openness", "liberalism", "Liberalism"),
    facet("conscientiousness", "achievement_striving", "Achievement striving"),
    facet("conscientiousness", "cautiousness", "Cautiousness"),
    facet("conscientiousness", "dutifulness", "Dutifulness"),
    facet("conscientiousness", "orderliness", "Orderliness"),
    facet("conscientiousness", "self_discipline", "Self-discipline"),
    facet("conscientiousness", "self_efficacy", "Self-efficacy"),
    facet("extraversion", "activity_level", "Activity level"),
    facet("extraversion", "assertiveness", "Assertiveness"),
    facet("extraversion", "cheerfulness", "Cheerfulness"),
    facet("extraversion", "excitement_seeking", "Excitement-seeking"),
    facet("extraversion", "friendliness", "Friendliness"),
    facet("extraversion", "gregariousness", "Gregariousness"),
    facet("agreeableness", "altruism", "Altruism"),
    facet("agreeableness", "cooperation", "Cooperation"),
    facet("agreeableness", "modesty", "Modesty"),
    facet("agreeableness", "morality", "Morality"),
    facet("agreeableness", "sympathy", "Sympathy"),
    facet("agreeableness", "trust", "Trust"),
    facet("neuroticism", "anger", "Anger"),
    facet("neuroticism", "anxiety", "Anxiety"),
    facet("neuroticism", "depression", "Depression"),
    facet("neuroticism", "immoderation", "Immoderation"),
    facet("neuroticism", "self_consciousness", "Self-consciousness"),
    facet("neuroticism", "vulnerability", "Vulnerability"),
    need("challenge", "Challenge"),
    need("closeness", "Closeness"),
    need("curiosity", "Curiosity"),
    need("excitement", "Excitement"),
    need("harmony", "Harmony"),
    need("ideal", "Ideal"),
    need("liberty", "Liberty"),
    need("love", "Love"),
    need("practicality", "Practicality"),
    need("self_expression", "Self-expression"),
    need("stability", "Stability"),
    need("structure", "Structure"),
    value("conservation", "Conservation"),
    value("openness_to_change", "Openness to change"),
    value("hedonism", "Hedonism"),
    value("self_enhancement", "Self-enhancement"),
    value("self_transcendence", "Self-transcendence"),
];

pub fn trait_index(key: &str) -> Option<usize> {
    TAXONOMY.iter().position(|t| t.key == key)
}

pub fn trait_keys() -> impl Iterator<Item = &'static str> {
    TAXONOMY.iter().map(|t| t.key)
}

/// Traits singled out in the published discussion of technical clusters;
/// default axes of the radar charts.
pub const RADAR_DEFAULT: [&str; 19] = [
    "cooperation",
    "sympathy",
    "conscientiousness",
    "achievement_striving",
    "cautiousness",
    "openness",
    "adventurousness",
    "imagination",
    "intellect",
    "liberalism",
    "conservation",
    "self_enhancement",
    "artistic_interests",
    "structure",
    "self_transcendence",
    "altruism",
    "cheerfulness",
    "gregariousness",
    "self_discipline",
];

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn group_sizes() {
        let count = |g| TAXONOMY.iter().filter(|t| t.group == g).count();
        assert_eq!(count(TraitGroup::Dimension), 5);
        assert_eq!(count(TraitGroup::Facet), 30);
        assert_eq!(count(TraitGroup::Need), 12);
        assert_eq!(count(TraitGroup::Value), 5);
        let keys: BTreeSet<_> = trait_keys().collect();
        assert_eq!(keys.len(), TRAIT_COUNT);
    }

    #[test]
    fn six_facets_per_dimension() {
        for d in TAXONOMY.iter().filter(|t| t.group == TraitGroup::Dimension) {
            let n = TAXONOMY.iter().filter(|t| t.parent == Some(d.key)).count();
            assert_eq!(n, 6, "{}", d.key);
        }
    }

    #[test]
    fn names_from_published_discussion_present() {
        let names = [
            "Extraversion", "Orderliness", "Trust", "Cautiousness", "Dutifulness",
            "Excitement-seeking", "Friendliness", "Neuroticism", "Cooperation", "Sympathy",
            "Conscientiousness", "Achievement striving", "Openness", "Adventurousness",
            "Imagination", "Intellect", "Liberalism", "Altruism", "Cheerfulness",
            "Gregariousness", "Self-discipline", "Artistic interests", "Structure",
            "Self-transcendence", "Conservation", "Self-enhancement",
        ];
        for n in names {
            assert!(TAXONOMY.iter().any(|t| t.display_name == n), "{n}");
        }
        for k in RADAR_DEFAULT {
            assert!(trait_index(k).is_some(), "{k}");
        }
    }
}
