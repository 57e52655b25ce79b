use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ClozeTask, ScoreError, ScorerBackend};

/// Scorer with fixed scores keyed by the space-joined left context.
///
/// Candidates not listed for a context get `default_score`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetScorer {
    #[serde(default = "default_name")]
    pub name: String,
    pub vocabulary: BTreeSet<String>,
    pub contexts: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default)]
    pub default_score: f64,
}

fn default_name() -> String {
    "preset".to_string()
}

impl PresetScorer {
    pub fn from_json(text: &str) -> Result<Self, ScoreError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let p: PresetScorer = serde_path_to_error::deserialize(de)
            .map_err(|e| ScoreError::Protocol(format!("preset file at {}: {}", e.path(), e.inner())))?;
        if !p.default_score.is_finite() {
            return Err(ScoreError::NonFinite("default_score".into()));
        }
        for scores in p.contexts.values() {
            if let Some((w, _)) = scores.iter().find(|(_, s)| !s.is_finite()) {
                return Err(ScoreError::NonFinite(w.clone()));
            }
        }
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self, ScoreError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScoreError::Protocol(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

impl ScorerBackend for PresetScorer {
    fn name(&self) -> &str {
        &self.name
    }

    fn contains(&self, word: &str) -> Result<bool, ScoreError> {
        Ok(self.vocabulary.contains(word))
    }

    fn score(&self, task: &ClozeTask, candidates: &[String]) -> Result<Vec<f64>, ScoreError> {
        let table = self.contexts.get(&task.left.join(" "));
        Ok(candidates.iter().map(|c| table.and_then(|t| t.get(c)).copied().unwrap_or(self.default_score)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_scores() {
        let p = PresetScorer::from_json(
            r#"{"vocabulary":["a","b"],"contexts":{"x y":{"a":0.1,"b":0.9}},"default_score":-5}"#,
        )
        .unwrap();
        let t = ClozeTask::new(vec!["x".into(), "y".into()], vec![]).unwrap();
        assert_eq!(p.score(&t, &["a".into(), "b".into()]).unwrap(), [0.1, 0.9]);
        let other = ClozeTask::new(vec![], vec![]).unwrap();
        assert_eq!(p.score(&other, &["a".into()]).unwrap(), [-5.0]);
        assert!(p.contains("a").unwrap() && !p.contains("c").unwrap());
    }

    #[test]
    fn error_names_path() {
        let e = PresetScorer::from_json(r#"{"vocabulary":["a"],"contexts":{"x":{"a":"high"}}}"#).unwrap_err();
        assert!(e.to_string().contains("contexts.x.a"), "{e}");
    }
}
