//! Tunable thresholds and text-scan patterns, loadable from TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stmtmap::{MapConfig, DEFAULT_SIZE_LIMIT};

/// Regular-expression templates used to pull extra files into the child
/// model. `{method}`, `{type}` and `{super}` are replaced by escaped names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeuristicPatterns {
    pub deprecated_method_link: String,
    pub deprecated_type_link: String,
    pub type_declaration: String,
    pub package_declaration: String,
    pub instantiation: String,
    pub extends_type: String,
    pub method_call: String,
}

impl Default for HeuristicPatterns {
    fn default() -> Self {
        HeuristicPatterns {
            deprecated_method_link: r"@deprecated[\s\S]{0,400}?\{@link\s+[\w.]*#{method}\s*\(".into(),
            deprecated_type_link: r"@deprecated[\s\S]{0,400}?\{@link\s+(?:[\w]+\.)*{type}\s*\}".into(),
            type_declaration: r"\b(?:class|interface|enum|record)\s+{type}\b".into(),
            package_declaration: r"(?m)^\s*package\s+([\w.]+)\s*;".into(),
            instantiation: r"\bnew\s+{type}\s*(?:<[^>]*>)?\s*\(".into(),
            extends_type: r"\bextends\s+{type}\b".into(),
            method_call: r"\.\s*{method}\s*\(".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Share of the smaller member set that must match for a class rename.
    pub class_rename_overlap: f64,
    /// Minimum matched-statement fraction for pairing methods by body.
    pub method_match_threshold: f64,
    /// Node-count guard for one body pair.
    pub size_limit: usize,
    /// Drop identical method pairs before cross-file matching.
    pub prune_identical_methods: bool,
    /// Mark nodes reached through extraction or splitting.
    pub emit_evolution_hooks: bool,
    pub heuristics: HeuristicPatterns,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            class_rename_overlap: 0.5,
            method_match_threshold: 0.5,
            size_limit: DEFAULT_SIZE_LIMIT,
            prune_identical_methods: true,
            emit_evolution_hooks: false,
            heuristics: HeuristicPatterns::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("class_rename_overlap", self.class_rename_overlap),
            ("method_match_threshold", self.method_match_threshold),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must be within [0, 1], got {v}")));
            }
        }
        if self.size_limit == 0 {
            return Err(Error::Config("size_limit must be positive".into()));
        }
        let h = &self.heuristics;
        for p in [
            &h.deprecated_method_link,
            &h.deprecated_type_link,
            &h.type_declaration,
            &h.package_declaration,
            &h.instantiation,
            &h.extends_type,
            &h.method_call,
        ] {
            let probe = p
                .replace("{method}", "m")
                .replace("{type}", "T")
                .replace("{super}", "S");
            regex::Regex::new(&probe).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Compiles one heuristic template with the given names substituted.
    pub fn heuristic(&self, template: &str, method: &str, ty: &str, sup: &str) -> Result<regex::Regex> {
        let p = template
            .replace("{method}", &regex::escape(method))
            .replace("{type}", &regex::escape(ty))
            .replace("{super}", &regex::escape(sup));
        regex::Regex::new(&p).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn map_config(&self) -> MapConfig {
        MapConfig {
            size_limit: self.size_limit,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn partial_toml_overrides() {
        let c = Config::from_toml("class_rename_overlap = 0.75\nprune_identical_methods = false\n").unwrap();
        assert_eq!(c.class_rename_overlap, 0.75);
        assert!(!c.prune_identical_methods);
        assert_eq!(c.size_limit, DEFAULT_SIZE_LIMIT);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Config::from_toml("class_rename_overlap = 2.0").is_err());
        assert!(Config::from_toml("unknown = 1").is_err());
        assert!(Config::from_toml("[heuristics]\ninstantiation = \"(\"").is_err());
    }
}
