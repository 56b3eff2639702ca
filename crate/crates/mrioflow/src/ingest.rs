//! Streaming parsers for MRIO transaction tables, environmental
//! extension vectors, and auxiliary price series.
//!
//! Transaction files are parsed line by line straight into sparse
//! storage: peak memory is bounded by the index plus the nonzero
//! count, never by the dense matrix size.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use mrioflow_core::flows::{FlowError, PriceSeries};
use mrioflow_core::index::IndexError;
use mrioflow_core::table::TableError;
use mrioflow_core::{MatchMode, RegionCode, RegionSectorIndex, SectorLabel, SparseMatrix, TransactionTable};

/// How to read one transaction file.
///
/// Defaults mirror the industry-by-industry transaction layout of the
/// supported dataset family: tab-delimited, two header rows (regions,
/// then sectors), two label columns (region, then sector). Every knob
/// can be overridden so other vintages parse too.
#[derive(Debug, Clone)]
pub struct MrioFileSpec {
    pub path: PathBuf,
    /// Calendar year of the table. Taken from the file name pattern or
    /// an explicit flag, never inferred from content.
    pub year: i32,
    pub delimiter: char,
    pub header_rows: usize,
    pub label_cols: usize,
    pub unit: String,
    /// Accept `,` instead of `.` as the decimal separator. Without the
    /// flag comma-decimal cells are rejected, not guessed.
    pub decimal_comma: bool,
}

impl MrioFileSpec {
    pub fn new(path: impl Into<PathBuf>, year: i32) -> Self {
        Self {
            path: path.into(),
            year,
            delimiter: '\t',
            header_rows: 2,
            label_cols: 2,
            unit: "M€".into(),
            decimal_comma: false,
        }
    }
}

/// Region code used when a file carries no region header row/column.
const IMPLICIT_REGION: &str = "ALL";

/// Numeric cell in plain decimal notation. Scientific notation is
/// rejected rather than guessed; the decimal separator is `.` unless
/// the spec opts into comma decimals.
fn parse_cell(text: &str, decimal_comma: bool) -> Option<f64> {
    let sep = if decimal_comma { b',' } else { b'.' };
    let bytes = text.as_bytes();
    let digits = match bytes.first() {
        None => return None,
        Some(b'-') => &bytes[1..],
        _ => bytes,
    };
    let mut int_digits = 0usize;
    let mut frac_digits = 0usize;
    let mut seen_sep = false;
    for &b in digits {
        if b.is_ascii_digit() {
            if seen_sep {
                frac_digits += 1;
            } else {
                int_digits += 1;
            }
        } else if b == sep && !seen_sep {
            seen_sep = true;
        } else {
            return None;
        }
    }
    if int_digits == 0 || (seen_sep && frac_digits == 0) {
        return None;
    }
    if decimal_comma {
        text.replace(',', ".").parse().ok()
    } else {
        text.parse().ok()
    }
}

fn display_path(path: &Path) -> String {
    path.display().to_string()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io { path: display_path(path), source }
}

/// Parse one transaction table.
///
/// The header must declare identical row and column orderings: body
/// row labels are checked against the column header as they stream by.
pub fn parse_mrio(spec: &MrioFileSpec) -> Result<TransactionTable, IngestError> {
    let path = &spec.path;
    if spec.header_rows < 1 || spec.label_cols < 1 {
        return Err(IngestError::MalformedHeader {
            path: display_path(path),
            detail: "header_rows and label_cols must be at least 1".into(),
        });
    }
    let file = File::open(path).map_err(io_err(path))?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let mut header: Vec<Vec<String>> = Vec::with_capacity(spec.header_rows);
    for _ in 0..spec.header_rows {
        match lines.next() {
            Some((_, line)) => {
                let line = line.map_err(io_err(path))?;
                header.push(line.split(spec.delimiter).map(str::to_owned).collect());
            }
            None => return Err(IngestError::EmptyFile { path: display_path(path) }),
        }
    }

    let label_cols = spec.label_cols;
    let (region_row, sector_row): (Option<&[String]>, &[String]) = if spec.header_rows >= 2 {
        (Some(&header[0]), &header[1])
    } else {
        (None, &header[0])
    };
    if sector_row.len() <= label_cols {
        return Err(IngestError::MalformedHeader {
            path: display_path(path),
            detail: "header declares no data columns".into(),
        });
    }
    let n = sector_row.len() - label_cols;
    if let Some(regions) = region_row {
        if regions.len() != sector_row.len() {
            return Err(IngestError::MalformedHeader {
                path: display_path(path),
                detail: format!(
                    "region header has {} fields, sector header has {}",
                    regions.len(),
                    sector_row.len()
                ),
            });
        }
    }

    let mut entries = Vec::with_capacity(n);
    for c in 0..n {
        let region = match region_row {
            Some(regions) => regions[label_cols + c].trim(),
            None => IMPLICIT_REGION,
        };
        entries.push((
            RegionCode::new(region)?,
            SectorLabel::new(sector_row[label_cols + c].as_str())?,
        ));
    }
    let index = RegionSectorIndex::new(entries)?;

    let mut builder = SparseMatrix::builder(n);
    let mut body_rows = 0usize;
    for (line_no, line) in lines {
        let line = line.map_err(io_err(path))?;
        if line.is_empty() {
            continue;
        }
        if body_rows == n {
            return Err(IngestError::MalformedHeader {
                path: display_path(path),
                detail: format!("more than {n} data rows"),
            });
        }
        let row = body_rows;
        let mut fields = line.split(spec.delimiter);
        let (row_region, row_sector): (&str, &str) = if label_cols >= 2 {
            let region = fields.next().unwrap_or("");
            for _ in 0..label_cols.saturating_sub(2) {
                fields.next();
            }
            let sector = fields.next().unwrap_or("");
            (region.trim(), sector)
        } else {
            (IMPLICIT_REGION, fields.next().unwrap_or(""))
        };

        let (want_region, want_sector) = &index.entries()[row];
        let sector_matches = SectorLabel::new(row_sector)
            .map(|s| s == *want_sector)
            .unwrap_or(false);
        if row_region != want_region.as_str() || !sector_matches {
            return Err(IngestError::MalformedHeader {
                path: display_path(path),
                detail: format!(
                    "row {} is labeled ({}, {}) but the column header declares ({}, {})",
                    line_no + 1,
                    row_region,
                    row_sector.trim(),
                    want_region.as_str(),
                    want_sector.as_str(),
                ),
            });
        }

        let mut cells = Vec::with_capacity(n);
        let mut count = 0usize;
        for (col, text) in fields.enumerate() {
            if count == n {
                count += 1;
                break;
            }
            let value = parse_cell(text, spec.decimal_comma).ok_or_else(|| {
                IngestError::NonNumericCell {
                    path: display_path(path),
                    line: line_no + 1,
                    column: label_cols + col + 1,
                    content: text.into(),
                }
            })?;
            cells.push((col, value));
            count += 1;
        }
        if count != n {
            return Err(IngestError::MalformedHeader {
                path: display_path(path),
                detail: format!("row {} has {} cells, expected {}", line_no + 1, count, n),
            });
        }
        builder.push_row(cells)?;
        body_rows += 1;
    }
    if body_rows == 0 && n == 0 {
        return Err(IngestError::EmptyFile { path: display_path(path) });
    }
    let cells = builder.finish()?;
    Ok(TransactionTable::new(
        spec.year,
        index,
        cells,
        display_path(path),
        spec.unit.clone(),
    )?)
}

/// Write a table back out in the same layout `parse_mrio` reads
/// (dense body, shortest round-trip float formatting).
pub fn write_mrio(table: &TransactionTable, path: &Path, delimiter: char) -> Result<(), IngestError> {
    let mut out = std::io::BufWriter::new(File::create(path).map_err(io_err(path))?);
    let index = table.index();
    let n = index.len();
    let d = delimiter;

    // two padding cells over the label columns, as in the input layout
    let mut region_row = format!("region{d}sector");
    let mut sector_row = region_row.clone();
    for (region, sector) in index.entries() {
        region_row.push(d);
        region_row.push_str(region.as_str());
        sector_row.push(d);
        sector_row.push_str(sector.as_str());
    }
    writeln!(out, "{region_row}").map_err(io_err(path))?;
    writeln!(out, "{sector_row}").map_err(io_err(path))?;

    let mut line = String::new();
    for row in 0..n {
        line.clear();
        let (region, sector) = &index.entries()[row];
        line.push_str(region.as_str());
        line.push(d);
        line.push_str(sector.as_str());
        let mut dense = vec![0.0f64; n];
        for (col, v) in table.cells().row(row) {
            dense[col] = v;
        }
        for v in dense {
            line.push(d);
            // `{}` prints the shortest decimal that round-trips, and
            // never scientific notation, so re-parsing is bit-exact
            line.push_str(&format!("{v}"));
        }
        writeln!(out, "{line}").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))?;
    Ok(())
}

/// A dense per-position vector parsed from a `region,sector,value` CSV
/// (environmental intensities, final demand, total output).
#[derive(Debug, Clone)]
pub struct AlignedVector {
    /// One entry per index position; positions absent from the file
    /// hold zero.
    pub values: Vec<f64>,
    /// Positions the file never mentioned.
    pub missing_count: usize,
    /// Rows skipped in lenient mode because their (region, sector)
    /// pair is not in the index.
    pub skipped_rows: usize,
    /// Rows that overwrote an earlier value for the same position.
    pub duplicate_rows: usize,
}

/// Parse an extension-style CSV into a vector aligned to the index.
pub fn parse_extension(
    path: &Path,
    index: &RegionSectorIndex,
    mode: MatchMode,
) -> Result<AlignedVector, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| IngestError::BadCsv { path: display_path(path), detail: e.to_string() })?;
    {
        let headers = reader
            .headers()
            .map_err(|e| IngestError::BadCsv { path: display_path(path), detail: e.to_string() })?;
        let fields: Vec<String> = headers.iter().map(|h| h.trim().to_lowercase()).collect();
        if fields.len() < 3 || fields[0] != "region" || fields[1] != "sector" || fields[2] != "value" {
            return Err(IngestError::BadCsv {
                path: display_path(path),
                detail: format!("expected header region,sector,value, got {}", fields.join(",")),
            });
        }
    }

    let mut values = vec![0.0f64; index.len()];
    let mut seen = vec![false; index.len()];
    let mut skipped_rows = 0usize;
    let mut duplicate_rows = 0usize;
    for (i, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| IngestError::BadCsv { path: display_path(path), detail: e.to_string() })?;
        let line = i + 2; // header is line 1
        let region = record.get(0).unwrap_or("");
        let sector = record.get(1).unwrap_or("");
        let raw = record.get(2).unwrap_or("");
        let value: f64 = raw.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| {
            IngestError::NonNumericCell {
                path: display_path(path),
                line,
                column: 3,
                content: raw.into(),
            }
        })?;
        match index.position(region, sector) {
            Some(pos) => {
                if seen[pos] {
                    duplicate_rows += 1;
                }
                seen[pos] = true;
                values[pos] = value;
            }
            None if mode == MatchMode::Strict => {
                return Err(IngestError::UnknownRegionSector {
                    path: display_path(path),
                    line,
                    region: region.into(),
                    sector: sector.into(),
                });
            }
            None => skipped_rows += 1,
        }
    }
    let missing_count = seen.iter().filter(|&&s| !s).count();
    Ok(AlignedVector { values, missing_count, skipped_rows, duplicate_rows })
}

/// Parse a `year,price` CSV into a validated price series. The series
/// name is the file stem.
pub fn parse_price_series(path: &Path) -> Result<PriceSeries, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| IngestError::BadCsv { path: display_path(path), detail: e.to_string() })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "prices".into());
    let mut series = PriceSeries::new(name);
    for (i, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| IngestError::BadCsv { path: display_path(path), detail: e.to_string() })?;
        let line = i + 2;
        let year: i32 = record
            .get(0)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| IngestError::NonNumericCell {
                path: display_path(path),
                line,
                column: 1,
                content: record.get(0).unwrap_or("").into(),
            })?;
        let price: f64 = record
            .get(1)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| IngestError::NonNumericCell {
                path: display_path(path),
                line,
                column: 2,
                content: record.get(1).unwrap_or("").into(),
            })?;
        series.insert(year, price).map_err(|e| match e {
            FlowError::DuplicateYear { year } => IngestError::DuplicateYear { year },
            FlowError::NonPositivePrice { year, price } => IngestError::NonPositivePrice {
                path: display_path(path),
                year,
                price,
            },
            other => IngestError::BadCsv { path: display_path(path), detail: other.to_string() },
        })?;
    }
    Ok(series)
}

/// Extract the year from a file name using a `{year}` placeholder
/// pattern, e.g. `mrio_{year}.tsv`.
pub fn extract_year(name: &str, pattern: &str) -> Result<i32, IngestError> {
    let mismatch = || IngestError::YearPattern { name: name.into(), pattern: pattern.into() };
    let (prefix, suffix) = pattern.split_once("{year}").ok_or_else(mismatch)?;
    let rest = name.strip_prefix(prefix).ok_or_else(mismatch)?;
    let digits = rest.strip_suffix(suffix).ok_or_else(mismatch)?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(mismatch());
    }
    digits.parse().map_err(|_| mismatch())
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: malformed header/body: {detail}")]
    MalformedHeader { path: String, detail: String },
    #[error("{path}:{line}: non-numeric cell \"{content}\" in column {column}")]
    NonNumericCell { path: String, line: usize, column: usize, content: String },
    #[error("{path}: empty file")]
    EmptyFile { path: String },
    #[error("{path}:{line}: unknown (region, sector) pair ({region}, {sector})")]
    UnknownRegionSector { path: String, line: usize, region: String, sector: String },
    #[error("duplicate year {year}")]
    DuplicateYear { year: i32 },
    #[error("{path}: non-positive price {price} for year {year}")]
    NonPositivePrice { path: String, year: i32, price: f64 },
    #[error("file name \"{name}\" does not match pattern \"{pattern}\"")]
    YearPattern { name: String, pattern: String },
    #[error("{path}: {detail}")]
    BadCsv { path: String, detail: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Table(#[from] TableError),
}
