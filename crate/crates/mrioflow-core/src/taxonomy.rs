//! Case-study tagging vocabulary: a controlled set of value-chain
//! activities, digital services/hardware, and intended effects, with
//! alias resolution and nearest-match suggestions for unknown tags.
//!
//! The vocabulary itself ships as data with the companion crate; this
//! module only carries the structure and validation rules.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::text::{edit_distance, normalize_whitespace};

const SUGGESTION_MAX_DISTANCE: usize = 3;

/// The five tag dimensions a scenario is classified along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagDimension {
    Activity,
    SubActivity,
    Function,
    Service,
    Effect,
}

impl fmt::Display for TagDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Activity => "activity",
            Self::SubActivity => "sub-activity",
            Self::Function => "function",
            Self::Service => "service/hardware",
            Self::Effect => "intended effect",
        })
    }
}

/// Canonicalized tags of one scenario.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CaseTags {
    pub activities: Vec<String>,
    pub sub_activities: Vec<String>,
    pub functions: Vec<String>,
    pub services: Vec<String>,
    pub effects: Vec<String>,
}

/// Controlled vocabulary plus aliases mapping onto canonical terms.
///
/// Matching is case-insensitive and whitespace-normalized but otherwise
/// exact; unknown tags are errors carrying a nearest-match suggestion,
/// never silently corrected.
#[derive(Debug, Clone)]
pub struct Taxonomy {
    // per dimension: normalized term -> canonical form
    dimensions: [BTreeMap<String, String>; 5],
    // normalized alias -> canonical form (dimension found via lookup)
    aliases: BTreeMap<String, String>,
}

fn key(term: &str) -> String {
    normalize_whitespace(term).to_lowercase()
}

impl Taxonomy {
    pub fn new(
        activities: &[String],
        sub_activities: &[String],
        functions: &[String],
        services: &[String],
        effects: &[String],
        aliases: &BTreeMap<String, String>,
    ) -> Result<Self, TaxonomyError> {
        let lists = [activities, sub_activities, functions, services, effects];
        let mut dimensions: [BTreeMap<String, String>; 5] = Default::default();
        for (dim, list) in lists.iter().enumerate() {
            for term in list.iter() {
                if dimensions[dim].insert(key(term), term.clone()).is_some() {
                    return Err(TaxonomyError::DuplicateTerm { term: term.clone() });
                }
            }
        }
        let mut alias_map = BTreeMap::new();
        for (alias, canonical) in aliases {
            let target_known = dimensions.iter().any(|d| d.contains_key(&key(canonical)));
            if !target_known {
                return Err(TaxonomyError::UnknownAliasTarget {
                    alias: alias.clone(),
                    target: canonical.clone(),
                });
            }
            if alias_map.insert(key(alias), canonical.clone()).is_some() {
                return Err(TaxonomyError::DuplicateTerm { term: alias.clone() });
            }
        }
        Ok(Self { dimensions, aliases: alias_map })
    }

    fn dimension(&self, dim: TagDimension) -> &BTreeMap<String, String> {
        &self.dimensions[dim as usize]
    }

    pub fn terms(&self, dim: TagDimension) -> impl Iterator<Item = &str> {
        self.dimension(dim).values().map(String::as_str)
    }

    /// Resolve one tag to its canonical form within a dimension.
    pub fn canonicalize(&self, dim: TagDimension, tag: &str) -> Result<String, TaxonomyError> {
        let k = key(tag);
        if let Some(canonical) = self.dimension(dim).get(&k) {
            return Ok(canonical.clone());
        }
        if let Some(target) = self.aliases.get(&k) {
            if let Some(canonical) = self.dimension(dim).get(&key(target)) {
                return Ok(canonical.clone());
            }
        }
        Err(TaxonomyError::UnknownTag {
            dimension: dim,
            tag: tag.into(),
            suggestion: self.suggest(dim, &k),
        })
    }

    fn suggest(&self, dim: TagDimension, normalized: &str) -> Option<String> {
        let candidates = self.dimension(dim).iter().chain(
            self.aliases
                .iter()
                .filter(|(_, target)| self.dimension(dim).contains_key(&key(target))),
        );
        let mut best: Option<(usize, &String)> = None;
        for (k, canonical) in candidates {
            let d = edit_distance(normalized, k);
            if d <= SUGGESTION_MAX_DISTANCE && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, canonical));
            }
        }
        best.map(|(_, c)| c.clone())
    }

    /// Validate raw tags along every dimension, returning canonical
    /// forms.
    pub fn validate(&self, raw: &CaseTags) -> Result<CaseTags, TaxonomyError> {
        let canon = |dim: TagDimension, tags: &[String]| -> Result<Vec<String>, TaxonomyError> {
            tags.iter().map(|t| self.canonicalize(dim, t)).collect()
        };
        Ok(CaseTags {
            activities: canon(TagDimension::Activity, &raw.activities)?,
            sub_activities: canon(TagDimension::SubActivity, &raw.sub_activities)?,
            functions: canon(TagDimension::Function, &raw.functions)?,
            services: canon(TagDimension::Service, &raw.services)?,
            effects: canon(TagDimension::Effect, &raw.effects)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaxonomyError {
    UnknownTag { dimension: TagDimension, tag: String, suggestion: Option<String> },
    DuplicateTerm { term: String },
    UnknownAliasTarget { alias: String, target: String },
}

impl fmt::Display for TaxonomyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownTag { dimension, tag, suggestion } => {
                write!(f, "unknown {dimension} tag \"{tag}\"")?;
                if let Some(s) = suggestion {
                    write!(f, " (did you mean \"{s}\"?)")?;
                }
                Ok(())
            }
            Self::DuplicateTerm { term } => write!(f, "duplicate vocabulary term \"{term}\""),
            Self::UnknownAliasTarget { alias, target } => {
                write!(f, "alias \"{alias}\" points at unknown term \"{target}\"")
            }
        }
    }
}

impl core::error::Error for TaxonomyError {}
