//! Sector-group concordance: loads the group classification from a
//! user-editable TOML file and materializes core sector groups.
//!
//! The concordance lives in data, not code, so users can adapt it to
//! dataset-vintage label drift. A default file ships with the crate.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use mrioflow_core::text::{edit_distance, normalize_whitespace};
use mrioflow_core::{GroupMatches, MatchMode, RegionFilter, RegionSectorIndex, SectorGroup};

/// The shipped default concordance (also installed at
/// `data/concordance.toml`).
pub const DEFAULT_CONCORDANCE_TOML: &str = include_str!("../data/concordance.toml");

const SUGGESTION_MAX_DISTANCE: usize = 3;

/// Validated group configuration.
#[derive(Debug, Clone)]
pub struct ConcordanceConfig {
    groups: Vec<GroupConfig>,
}

#[derive(Debug, Clone)]
pub struct GroupConfig {
    pub name: String,
    pub sectors: Vec<String>,
    pub regions: RegionScope,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegionScope {
    All,
    Only(Vec<String>),
}

impl fmt::Display for RegionScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::All => f.write_str("all"),
            Self::Only(list) => f.write_str(&list.join(",")),
        }
    }
}

// --- file schema ---

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSchema {
    #[serde(default, rename = "group")]
    groups: Vec<GroupSchema>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSchema {
    name: String,
    sectors: Vec<String>,
    #[serde(default)]
    regions: RegionsSchema,
}

#[derive(Debug, Deserialize, Default)]
#[serde(untagged)]
enum RegionsSchema {
    #[default]
    Missing,
    Keyword(String),
    List(Vec<String>),
}

fn validate(schema: FileSchema) -> Result<ConcordanceConfig, ConcordanceError> {
    if schema.groups.is_empty() {
        return Err(ConcordanceError::Schema { detail: "no [[group]] entries".into() });
    }
    let mut seen = BTreeSet::new();
    let mut groups = Vec::with_capacity(schema.groups.len());
    for g in schema.groups {
        if g.name.trim().is_empty() {
            return Err(ConcordanceError::Schema { detail: "group with empty name".into() });
        }
        if !seen.insert(g.name.clone()) {
            return Err(ConcordanceError::DuplicateGroup { name: g.name });
        }
        if g.sectors.is_empty() {
            return Err(ConcordanceError::Schema {
                detail: format!("group {} has an empty sector list", g.name),
            });
        }
        if g.sectors.iter().any(|s| normalize_whitespace(s).is_empty()) {
            return Err(ConcordanceError::Schema {
                detail: format!("group {} contains an empty sector label", g.name),
            });
        }
        let regions = match g.regions {
            RegionsSchema::Missing => RegionScope::All,
            RegionsSchema::Keyword(word) if word == "all" => RegionScope::All,
            RegionsSchema::Keyword(word) => {
                return Err(ConcordanceError::Schema {
                    detail: format!(
                        "group {}: regions must be \"all\" or a list, got \"{word}\"",
                        g.name
                    ),
                });
            }
            RegionsSchema::List(list) if list.is_empty() => {
                return Err(ConcordanceError::Schema {
                    detail: format!("group {} has an empty region list", g.name),
                });
            }
            RegionsSchema::List(list) => RegionScope::Only(list),
        };
        groups.push(GroupConfig { name: g.name, sectors: g.sectors, regions });
    }
    Ok(ConcordanceConfig { groups })
}

/// Parse and validate a concordance file.
pub fn load_concordance(path: &Path) -> Result<ConcordanceConfig, ConcordanceError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConcordanceError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_concordance(&text)
}

/// Parse and validate concordance TOML text.
pub fn parse_concordance(text: &str) -> Result<ConcordanceConfig, ConcordanceError> {
    let schema: FileSchema =
        toml::from_str(text).map_err(|e| ConcordanceError::Schema { detail: e.to_string() })?;
    validate(schema)
}

/// The concordance shipped with the crate.
pub fn default_concordance() -> ConcordanceConfig {
    parse_concordance(DEFAULT_CONCORDANCE_TOML).expect("shipped concordance file is valid")
}

impl ConcordanceConfig {
    pub fn groups(&self) -> &[GroupConfig] {
        &self.groups
    }

    pub fn group_names(&self) -> Vec<&str> {
        self.groups.iter().map(|g| g.name.as_str()).collect()
    }

    /// Materialize one group by name.
    pub fn group(&self, name: &str) -> Option<SectorGroup> {
        let config = self.groups.iter().find(|g| g.name == name)?;
        let filter = match &config.regions {
            RegionScope::All => RegionFilter::All,
            RegionScope::Only(list) => RegionFilter::Only(list.iter().cloned().collect()),
        };
        let selectors = config
            .sectors
            .iter()
            .map(|label| {
                Ok(mrioflow_core::group::GroupSelector {
                    regions: filter.clone(),
                    sector: mrioflow_core::SectorLabel::new(label.as_str())
                        .map_err(mrioflow_core::group::GroupError::BadSelector)?,
                })
            })
            .collect::<Result<Vec<_>, mrioflow_core::group::GroupError>>()
            .ok()?;
        SectorGroup::new(config.name.clone(), selectors).ok()
    }

    /// Materialize every group.
    pub fn to_groups(&self) -> Vec<SectorGroup> {
        self.groups
            .iter()
            .filter_map(|g| self.group(&g.name))
            .collect()
    }

    /// Report-only coverage check of every label against an index.
    /// Nothing is mutated and nothing is auto-corrected; near misses
    /// (edit distance <= 3) are listed as suggestions for debugging
    /// label drift.
    pub fn validate_against(&self, index: &RegionSectorIndex) -> CoverageReport {
        let mut distinct_sectors: Vec<&str> = Vec::new();
        for (_, sector) in index.entries() {
            if !distinct_sectors.contains(&sector.normalized()) {
                distinct_sectors.push(sector.normalized());
            }
        }
        let mut rows = Vec::new();
        for group in &self.groups {
            let resolved: Option<GroupMatches> = self
                .group(&group.name)
                .and_then(|g| g.resolve(index, MatchMode::Lenient).ok());
            for (i, label) in group.sectors.iter().enumerate() {
                let matches = resolved
                    .as_ref()
                    .map(|m| m.selector_counts[i])
                    .unwrap_or(0);
                let normalized = normalize_whitespace(label);
                let mut suggestions: Vec<(usize, String)> = if matches == 0 {
                    distinct_sectors
                        .iter()
                        .filter_map(|candidate| {
                            let d = edit_distance(&normalized, candidate);
                            (d <= SUGGESTION_MAX_DISTANCE).then(|| (d, (*candidate).to_string()))
                        })
                        .collect()
                } else {
                    Vec::new()
                };
                suggestions.sort();
                rows.push(LabelCoverage {
                    group: group.name.clone(),
                    label: label.clone(),
                    matches,
                    suggestions: suggestions.into_iter().map(|(_, s)| s).collect(),
                });
            }
        }
        CoverageReport { rows }
    }
}

/// Per-label match counts against one index.
#[derive(Debug, Clone)]
pub struct CoverageReport {
    pub rows: Vec<LabelCoverage>,
}

#[derive(Debug, Clone)]
pub struct LabelCoverage {
    pub group: String,
    pub label: String,
    pub matches: usize,
    /// Near-miss index labels, report-only.
    pub suggestions: Vec<String>,
}

impl CoverageReport {
    pub fn unmatched(&self) -> impl Iterator<Item = &LabelCoverage> {
        self.rows.iter().filter(|r| r.matches == 0)
    }

    pub fn unmatched_count(&self) -> usize {
        self.unmatched().count()
    }

    pub fn fully_matched(&self) -> bool {
        self.unmatched_count() == 0
    }
}

#[derive(Debug, Error)]
pub enum ConcordanceError {
    #[error("concordance schema error: {detail}")]
    Schema { detail: String },
    #[error("duplicate group \"{name}\"")]
    DuplicateGroup { name: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}
