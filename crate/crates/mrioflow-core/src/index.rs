//! Region and sector identifiers and the row/column index of a
//! transaction table.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::text::normalize_whitespace;

/// Region identifier as used by the source dataset (e.g. `US`, `CN`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionCode(String);

impl RegionCode {
    pub fn new(code: impl Into<String>) -> Result<Self, IndexError> {
        let code = code.into();
        if code.trim().is_empty() {
            return Err(IndexError::EmptyRegionCode);
        }
        Ok(Self(code))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RegionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Sector name exactly as it appears in the source dataset header.
///
/// Comparison, ordering, and hashing all use the whitespace-normalized
/// form (trimmed, internal runs collapsed); the raw header text is kept
/// for display. Matching is otherwise case-sensitive: dataset vintages
/// distinguish sectors that case-folding would merge.
#[derive(Debug, Clone)]
pub struct SectorLabel {
    raw: String,
    normalized: String,
}

impl SectorLabel {
    pub fn new(raw: impl Into<String>) -> Result<Self, IndexError> {
        let raw = raw.into();
        let normalized = normalize_whitespace(&raw);
        if normalized.is_empty() {
            return Err(IndexError::EmptySectorLabel);
        }
        Ok(Self { raw, normalized })
    }

    /// The header text as read from the source file.
    pub fn as_str(&self) -> &str {
        &self.raw
    }

    /// The normalized form used for comparisons.
    pub fn normalized(&self) -> &str {
        &self.normalized
    }
}

impl PartialEq for SectorLabel {
    fn eq(&self, other: &Self) -> bool {
        self.normalized == other.normalized
    }
}

impl Eq for SectorLabel {}

impl PartialOrd for SectorLabel {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SectorLabel {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.normalized.cmp(&other.normalized)
    }
}

impl core::hash::Hash for SectorLabel {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.normalized.hash(state);
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

/// Ordered list of (region, sector) pairs shared by the rows and columns
/// of a transaction table, with constant-time pair-to-position lookup.
///
/// Positions are `0..len` with no gaps; the pair-to-position map is a
/// bijection onto the entries (duplicates are rejected at construction).
#[derive(Debug, Clone)]
pub struct RegionSectorIndex {
    entries: Vec<(RegionCode, SectorLabel)>,
    // region code -> normalized sector -> position
    positions: BTreeMap<String, BTreeMap<String, usize>>,
    // distinct regions in first-appearance order
    regions: Vec<RegionCode>,
}

impl RegionSectorIndex {
    pub fn new(entries: Vec<(RegionCode, SectorLabel)>) -> Result<Self, IndexError> {
        if entries.is_empty() {
            return Err(IndexError::EmptyIndex);
        }
        let mut positions: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
        let mut regions: Vec<RegionCode> = Vec::new();
        for (pos, (region, sector)) in entries.iter().enumerate() {
            let by_sector = positions.entry(region.as_str().into()).or_default();
            if by_sector.insert(sector.normalized().into(), pos).is_some() {
                return Err(IndexError::DuplicateEntry {
                    region: region.as_str().into(),
                    sector: sector.as_str().into(),
                });
            }
            if !regions.contains(region) {
                regions.push(region.clone());
            }
        }
        Ok(Self { entries, positions, regions })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(RegionCode, SectorLabel)] {
        &self.entries
    }

    /// Position of a (region, sector) pair; the sector is normalized
    /// before lookup.
    pub fn position(&self, region: &str, sector: &str) -> Option<usize> {
        self.positions
            .get(region)?
            .get(normalize_whitespace(sector).as_str())
            .copied()
    }

    pub fn region_at(&self, position: usize) -> &RegionCode {
        &self.entries[position].0
    }

    pub fn sector_at(&self, position: usize) -> &SectorLabel {
        &self.entries[position].1
    }

    /// Distinct regions in first-appearance order.
    pub fn regions(&self) -> &[RegionCode] {
        &self.regions
    }

    /// True when both indices list the same pairs in the same order.
    pub fn same_ordering(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexError {
    EmptyRegionCode,
    EmptySectorLabel,
    EmptyIndex,
    DuplicateEntry { region: String, sector: String },
}

impl fmt::Display for IndexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyRegionCode => write!(f, "region code is empty"),
            Self::EmptySectorLabel => write!(f, "sector label is empty"),
            Self::EmptyIndex => write!(f, "index has no entries"),
            Self::DuplicateEntry { region, sector } => {
                write!(f, "duplicate index entry ({region}, {sector})")
            }
        }
    }
}

impl core::error::Error for IndexError {}
