use serde::{Deserialize, Serialize};

pub const DEFAULT_COMPONENT: &str = "unattributed";

/// Ordered path-prefix to component mapping. First matching prefix wins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentMap {
    pub prefixes: Vec<(String, String)>,
    #[serde(default = "default_component")]
    pub default_component: String,
}

fn default_component() -> String {
    DEFAULT_COMPONENT.to_string()
}

impl Default for ComponentMap {
    fn default() -> Self {
        Self {
            prefixes: Vec::new(),
            default_component: default_component(),
        }
    }
}

impl ComponentMap {
    pub fn new(prefixes: Vec<(String, String)>) -> Self {
        Self {
            prefixes: prefixes.into_iter().filter(|(p, _)| !p.is_empty()).collect(),
            default_component: default_component(),
        }
    }

    /// Component names in map order, de-duplicated, with the default last.
    pub fn components(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for (_, c) in &self.prefixes {
            if !out.contains(c) {
                out.push(c.clone());
            }
        }
        if !out.contains(&self.default_component) {
            out.push(self.default_component.clone());
        }
        out
    }
}

pub fn attribute_component<'a>(path: &str, map: &'a ComponentMap) -> &'a str {
    map.prefixes
        .iter()
        .find(|(prefix, _)| !prefix.is_empty() && path.starts_with(prefix.as_str()))
        .map(|(_, c)| c.as_str())
        .unwrap_or(&map.default_component)
}
