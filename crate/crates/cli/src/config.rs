//! TOML configuration for the extraction pipeline and scoring.
//!
//! ```toml
//! min_votes = 1
//! strict_coref = false
//! tie_break_order = ["who", "what", "what_happens", "what_happened",
//!                    "what_will_happen", "where", "when", "why"]
//! lexicon = "temporal_cues.txt"   # relative to this file
//!
//! [lf_weights]
//! lf_when = 1.5
//!
//! [orientation]
//! what = "keep"
//!
//! [soft_weights]
//! source = 1.0
//! target = 1.0
//! relation = 1.0
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use graphel_core::cues::TemporalLexicon;
use graphel_core::filter::OrientationRule;
use graphel_core::labeler::LfRegistry;
use graphel_core::{Labeler, LabelerConfig, Orienter, Pipeline, RelationLabel, Scorer, SoftWeights};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub lf_weights: BTreeMap<String, f64>,
    pub min_votes: Option<usize>,
    pub tie_break_order: Option<Vec<RelationLabel>>,
    pub strict_coref: bool,
    pub lexicon: Option<PathBuf>,
    pub orientation: BTreeMap<RelationLabel, OrientationRule>,
    pub soft_weights: Option<SoftWeights>,
}

impl AppConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: AppConfig = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if let Some(lex) = &cfg.lexicon {
            if lex.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.lexicon = Some(base.join(lex));
            }
        }
        cfg.labeler_config().validate().map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn load_optional(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(AppConfig::default()), AppConfig::load)
    }

    pub fn labeler_config(&self) -> LabelerConfig {
        let defaults = LabelerConfig::default();
        LabelerConfig {
            lf_weights: self.lf_weights.clone(),
            min_votes: self.min_votes.unwrap_or(defaults.min_votes),
            tie_break_order: self.tie_break_order.clone().unwrap_or(defaults.tie_break_order),
        }
    }

    pub fn lexicon(&self) -> Result<TemporalLexicon, CliError> {
        match &self.lexicon {
            Some(p) => TemporalLexicon::load(p).map_err(|e| CliError::io(p, e)),
            None => Ok(TemporalLexicon::default()),
        }
    }

    pub fn labeler(&self) -> Result<Labeler, CliError> {
        Ok(Labeler::new(
            LfRegistry::default(),
            self.lexicon()?,
            self.labeler_config(),
        ))
    }

    pub fn pipeline(&self) -> Result<Pipeline, CliError> {
        let orienter = Orienter::new(self.lexicon()?, self.orientation.clone());
        Ok(Pipeline::new(self.labeler()?, orienter, self.strict_coref))
    }

    pub fn scorer(&self) -> Scorer {
        Scorer::new(self.soft_weights.unwrap_or_default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("cues.txt"), "noon\n").unwrap();
        let path = dir.path().join("graphel.toml");
        std::fs::write(
            &path,
            r#"
min_votes = 2
strict_coref = true
lexicon = "cues.txt"
[lf_weights]
lf_when = 1.5
[orientation]
what = "keep"
"#,
        )
        .unwrap();
        let cfg = AppConfig::load(&path).unwrap();
        assert_eq!(cfg.labeler_config().min_votes, 2);
        assert_eq!(cfg.labeler_config().weight("lf_when"), 1.5);
        assert_eq!(cfg.orientation[&RelationLabel::What], OrientationRule::Keep);
        assert!(cfg.lexicon().unwrap().is_cue("noon"));
        assert!(cfg.pipeline().unwrap().strict_coref);
    }

    #[test]
    fn rejects_bad_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        for body in [
            "min_votes = 0",
            "tie_break_order = [\"who\"]",
            "colour = 1",
            "[lf_weights]\nlf_who = -1.0",
        ] {
            std::fs::write(&path, body).unwrap();
            assert!(matches!(AppConfig::load(&path), Err(CliError::Config { .. })), "{body}");
        }
    }
}
