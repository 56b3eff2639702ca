//! Sector groups: named sets of (region filter, sector label) selectors
//! resolved against a table index.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::index::{RegionSectorIndex, SectorLabel};

/// Which regions a selector applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegionFilter {
    All,
    Only(BTreeSet<String>),
}

impl RegionFilter {
    fn matches(&self, region: &str) -> bool {
        match self {
            Self::All => true,
            Self::Only(set) => set.contains(region),
        }
    }
}

impl fmt::Display for RegionFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::All => f.write_str("all regions"),
            Self::Only(set) => {
                let mut first = true;
                for r in set {
                    if !first {
                        f.write_str(",")?;
                    }
                    f.write_str(r)?;
                    first = false;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSelector {
    pub regions: RegionFilter,
    pub sector: SectorLabel,
}

/// Named set of selectors (e.g. the ICT, O&G, or R&N group).
///
/// Membership is resolved per table: sector labels can drift across
/// dataset vintages, so resolved positions are never reused against a
/// different index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorGroup {
    name: String,
    selectors: Vec<GroupSelector>,
}

/// Whether a selector that matches nothing is an error or a diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchMode {
    /// An unmatched selector signals a concordance/label mismatch.
    #[default]
    Strict,
    /// Unmatched selectors contribute nothing; counts stay visible.
    Lenient,
}

/// Result of resolving a group against an index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMatches {
    /// Matched positions, ascending, deduplicated.
    pub positions: Vec<usize>,
    /// Match count per selector, for diagnostics.
    pub selector_counts: Vec<usize>,
}

impl SectorGroup {
    pub fn new(name: impl Into<String>, selectors: Vec<GroupSelector>) -> Result<Self, GroupError> {
        let name = name.into();
        if selectors.is_empty() {
            return Err(GroupError::NoSelectors { group: name });
        }
        Ok(Self { name, selectors })
    }

    /// Convenience constructor: one all-regions selector per label.
    pub fn from_labels<I, S>(name: impl Into<String>, labels: I) -> Result<Self, GroupError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let selectors = labels
            .into_iter()
            .map(|l| {
                Ok(GroupSelector {
                    regions: RegionFilter::All,
                    sector: SectorLabel::new(l).map_err(GroupError::BadSelector)?,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(name, selectors)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn selectors(&self) -> &[GroupSelector] {
        &self.selectors
    }

    /// Every index position matched by any selector.
    ///
    /// Deterministic: the result depends only on the selector set and the
    /// index, not on selector order.
    pub fn resolve(
        &self,
        index: &RegionSectorIndex,
        mode: MatchMode,
    ) -> Result<GroupMatches, GroupError> {
        let mut positions: BTreeSet<usize> = BTreeSet::new();
        let mut selector_counts = Vec::with_capacity(self.selectors.len());
        for selector in &self.selectors {
            let mut count = 0usize;
            for (pos, (region, sector)) in index.entries().iter().enumerate() {
                if selector.sector == *sector && selector.regions.matches(region.as_str()) {
                    positions.insert(pos);
                    count += 1;
                }
            }
            if count == 0 && mode == MatchMode::Strict {
                return Err(GroupError::UnmatchedSelector {
                    group: self.name.clone(),
                    sector: selector.sector.as_str().into(),
                    regions: alloc::format!("{}", selector.regions),
                });
            }
            selector_counts.push(count);
        }
        Ok(GroupMatches {
            positions: positions.into_iter().collect(),
            selector_counts,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    NoSelectors { group: String },
    UnmatchedSelector { group: String, sector: String, regions: String },
    BadSelector(crate::index::IndexError),
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoSelectors { group } => write!(f, "group {group} has no selectors"),
            Self::UnmatchedSelector { group, sector, regions } => write!(
                f,
                "group {group}: selector ({regions}, {sector}) matched no index position"
            ),
            Self::BadSelector(e) => write!(f, "bad selector: {e}"),
        }
    }
}

impl core::error::Error for GroupError {}
