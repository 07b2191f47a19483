//! Instance files and positional vector arguments.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::protocols::NamedState;
use crate::schmidt::{canonicalize, ProbVec};

/// A named group of states for multi-source or multi-target planning.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Collection {
    #[serde(default)]
    pub sources: Vec<String>,
    #[serde(default)]
    pub targets: Vec<String>,
}

/// `{"vectors": {name: [reals]}, "pairs": [[a, b]], "collections": [...]}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub vectors: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub collections: Vec<Collection>,
}

impl InstanceFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let file: InstanceFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("malformed instance file {}: {e}", path.display())))?;
        file.check_references()?;
        Ok(file)
    }

    fn check_references(&self) -> Result<(), CliError> {
        let names = self
            .pairs
            .iter()
            .flatten()
            .chain(self.collections.iter().flat_map(|c| c.sources.iter().chain(&c.targets)));
        for name in names {
            if !self.vectors.contains_key(name) {
                return Err(CliError::Usage(format!("instance file refers to unknown vector `{name}`")));
            }
        }
        Ok(())
    }

    pub fn state(&self, name: &str) -> Result<NamedState, CliError> {
        let raw = self
            .vectors
            .get(name)
            .ok_or_else(|| CliError::Usage(format!("no vector named `{name}`")))?;
        Ok(NamedState::new(name, canonicalize(raw)?))
    }

    pub fn pair(&self, index: usize) -> Result<(NamedState, NamedState), CliError> {
        let [a, b] = self
            .pairs
            .get(index)
            .ok_or_else(|| CliError::Usage(format!("instance file has no pair {index}")))?;
        Ok((self.state(a)?, self.state(b)?))
    }

    pub fn collection(&self, index: usize) -> Result<(Vec<NamedState>, Vec<NamedState>), CliError> {
        let c = self
            .collections
            .get(index)
            .ok_or_else(|| CliError::Usage(format!("instance file has no collection {index}")))?;
        let load = |names: &[String]| names.iter().map(|n| self.state(n)).collect::<Result<Vec<_>, _>>();
        Ok((load(&c.sources)?, load(&c.targets)?))
    }
}

/// Parse an inline JSON array without canonicalizing it.
pub fn parse_inline(arg: &str) -> Result<Vec<f64>, CliError> {
    serde_json::from_str(arg).map_err(|e| CliError::Usage(format!("malformed vector `{arg}`: {e}")))
}

/// Resolve a positional argument: an inline JSON array or a vector name.
pub fn resolve(arg: &str, default_name: &str, file: Option<&InstanceFile>) -> Result<NamedState, CliError> {
    if arg.trim_start().starts_with('[') {
        let raw = parse_inline(arg)?;
        return Ok(NamedState::new(default_name, canonicalize(&raw)?));
    }
    match file {
        Some(file) => file.state(arg),
        None => Err(CliError::Usage(format!(
            "`{arg}` is neither a JSON array nor a name (no --instances file given)"
        ))),
    }
}

pub fn resolve_vec(arg: &str, file: Option<&InstanceFile>) -> Result<ProbVec, CliError> {
    resolve(arg, "v", file).map(|s| s.spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> InstanceFile {
        serde_json::from_str(
            r#"{"vectors": {"psi": [0.5, 0.4, 0.1], "phi": [0.2, 0.6, 0.2]},
                "pairs": [["psi", "phi"]],
                "collections": [{"sources": ["psi"], "targets": ["phi", "psi"]}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn names_and_inline_vectors_resolve() {
        let file = sample();
        let phi = resolve("phi", "x", Some(&file)).unwrap();
        assert_eq!(phi.name, "phi");
        assert_eq!(phi.spectrum.as_slice(), &[0.6, 0.2, 0.2]);
        let inline = resolve("[0.1, 0.9]", "x", None).unwrap();
        assert_eq!(inline.name, "x");
        assert_eq!(inline.spectrum.as_slice(), &[0.9, 0.1]);
        assert_eq!(file.pair(0).unwrap().0.name, "psi");
        assert_eq!(file.collection(0).unwrap().1.len(), 2);
    }

    #[test]
    fn malformed_input_is_a_usage_error() {
        assert!(matches!(resolve("[0.5, oops]", "x", None), Err(CliError::Usage(_))));
        assert!(matches!(resolve("psi", "x", None), Err(CliError::Usage(_))));
        assert!(matches!(sample().pair(3), Err(CliError::Usage(_))));
        let bad = InstanceFile { pairs: vec![["a".into(), "b".into()]], ..Default::default() };
        assert!(matches!(bad.check_references(), Err(CliError::Usage(_))));
    }

    #[test]
    fn unnormalized_input_is_a_domain_error() {
        assert!(matches!(resolve("[0.5, 0.4]", "x", None), Err(CliError::Domain(_))));
    }
}
