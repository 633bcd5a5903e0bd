//! On-disk formats: completed rule sets (JSON) and genome lists.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::order::ReductionOrder;
use crate::perm::{PermError, Permutation};
use crate::presentation::{ModelFile, Presentation, PresentationError, RelationSpec};
use crate::rational::{parse_rational, to_json};
use crate::rewrite::{is_confluent, RewriteError, RewritingSystem, Rule, Status};

#[derive(Debug, Error)]
pub enum FileError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("invalid order: {0}")]
    Order(String),
    #[error("unknown status {0:?}")]
    Status(String),
    #[error("rule set claims confluence but {0} critical pairs do not resolve")]
    NotConfluent(usize),
    #[error("line {line}: {reason}")]
    Genome { line: usize, reason: String },
    #[error("line {line}: {source}")]
    GenomePerm { line: usize, source: PermError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderSpec {
    pub weights: Vec<Value>,
    /// Generator labels from least to greatest.
    pub precedence: Vec<String>,
}

/// A persisted rewriting system together with its model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSetFile {
    pub model: ModelFile,
    pub order: OrderSpec,
    pub status: String,
    pub rules: Vec<RelationSpec>,
}

impl RuleSetFile {
    pub fn from_system(pres: &Presentation, sys: &RewritingSystem) -> Self {
        let gens = sys.generators();
        let ord = sys.order();
        RuleSetFile {
            model: pres.to_model_file(),
            order: OrderSpec {
                weights: ord.weights().iter().map(to_json).collect(),
                precedence: ord
                    .precedence()
                    .into_iter()
                    .map(|g| gens.generator(g as u16).label.clone())
                    .collect(),
            },
            status: sys.status().to_string(),
            rules: sys
                .rules()
                .map(|(_, r)| RelationSpec {
                    lhs: gens.labels(&r.lhs),
                    rhs: gens.labels(&r.rhs),
                })
                .collect(),
        }
    }

    /// Rebuilds the system, checking `lhs > rhs` for every rule and, when
    /// `check_confluence` is set, re-verifying a confluent status.
    pub fn to_system(&self, check_confluence: bool) -> Result<(Presentation, RewritingSystem), FileError> {
        let pres = Presentation::from_model_file(&self.model)?;
        let gens = pres.generators().clone();
        let weights = self
            .order
            .weights
            .iter()
            .map(|v| parse_rational(v).ok_or_else(|| FileError::Order(format!("bad weight {v}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let precedence = self
            .order
            .precedence
            .iter()
            .map(|l| {
                gens.letter(l)
                    .map(usize::from)
                    .ok_or_else(|| FileError::Order(format!("unknown generator {l:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ord = ReductionOrder::new(weights, &precedence).map_err(|e| FileError::Order(e.to_string()))?;
        let status = match self.status.as_str() {
            "confluent" => Status::Confluent,
            "raw" => Status::Raw,
            other => return Err(FileError::Status(other.to_string())),
        };
        let rules = self
            .rules
            .iter()
            .map(|r| Ok(Rule::new(gens.word_from_labels(&r.lhs)?, gens.word_from_labels(&r.rhs)?)))
            .collect::<Result<Vec<_>, PresentationError>>()?;
        let sys = RewritingSystem::from_rules(gens, ord, rules, status)?;
        if check_confluence && status == Status::Confluent {
            let report = is_confluent(&sys);
            if !report.confluent {
                return Err(FileError::NotConfluent(report.unresolved.len()));
            }
        }
        Ok((pres, sys))
    }
}

/// Parses `label<TAB>permutation` lines; blank lines and `#` comments are
/// skipped. A line without a tab splits at its first whitespace.
pub fn parse_genomes(text: &str, n: usize) -> Result<Vec<(String, Permutation)>, FileError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (label, perm) = raw
            .split_once('\t')
            .or_else(|| trimmed.split_once(char::is_whitespace))
            .ok_or_else(|| FileError::Genome {
                line,
                reason: "expected label and permutation".into(),
            })?;
        let label = label.trim();
        if label.is_empty() {
            return Err(FileError::Genome {
                line,
                reason: "empty label".into(),
            });
        }
        if out.iter().any(|(l, _): &(String, Permutation)| l == label) {
            return Err(FileError::Genome {
                line,
                reason: format!("duplicate label {label:?}"),
            });
        }
        let p = Permutation::parse(perm.trim(), n).map_err(|source| FileError::GenomePerm { line, source })?;
        out.push((label.to_string(), p));
    }
    Ok(out)
}

pub fn write_genomes(genomes: &[(String, Permutation)]) -> String {
    genomes.iter().map(|(l, p)| format!("{l}\t{p}\n")).collect()
}
