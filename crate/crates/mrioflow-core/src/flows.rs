//! Aggregate-flow analytics over transaction tables: group-to-group
//! flows, output shares, endogenous flows, multi-year series,
//! per-region contributor rankings, comparative ratios, and price
//! overlays.
//!
//! All operations are pure functions over immutable tables. Summation
//! is compensated and runs in canonical row-major entry order, so
//! aggregates are bit-stable regardless of how the table was assembled.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::group::{GroupError, MatchMode, SectorGroup};
use crate::index::{RegionCode, SectorLabel};
use crate::sum::CompensatedSum;
use crate::table::TransactionTable;

/// One aggregated group-to-group flow for one year, in the table unit
/// (millions of euros for the supported datasets).
#[derive(Debug, Clone, PartialEq)]
pub struct FlowValue {
    pub year: i32,
    pub from_group: String,
    pub to_group: String,
    pub value: f64,
}

/// Per-year shares attached to a flow series.
#[derive(Debug, Clone, PartialEq)]
pub struct ShareSeries {
    /// Share of the from-group's total output going to the to-group,
    /// one entry per series point.
    pub by_year: Vec<f64>,
    /// Unweighted mean of the annual shares (the headline figure).
    pub mean: f64,
    /// Aggregate share over the period: total flow divided by total
    /// from-group output. Weighting is otherwise unspecified, so both
    /// means are reported.
    pub flow_weighted_mean: f64,
}

/// Group-to-group flows over multiple years, ascending by year.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSeries {
    pub from_group: String,
    pub to_group: String,
    pub points: Vec<FlowValue>,
    pub shares: Option<ShareSeries>,
}

/// Flows into a destination group ranked by source region.
#[derive(Debug, Clone, PartialEq)]
pub struct ContributorRanking {
    pub year: i32,
    pub from_group: String,
    pub to_group: String,
    /// Descending by value; ties broken by region code ascending.
    pub rows: Vec<(RegionCode, f64)>,
}

/// Annual benchmark price series (e.g. Brent or WTI, currency units per
/// barrel).
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    name: String,
    points: BTreeMap<i32, f64>,
}

impl PriceSeries {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), points: BTreeMap::new() }
    }

    pub fn insert(&mut self, year: i32, price: f64) -> Result<(), FlowError> {
        if !(price.is_finite() && price > 0.0) {
            return Err(FlowError::NonPositivePrice { year, price });
        }
        if self.points.insert(year, price).is_some() {
            return Err(FlowError::DuplicateYear { year });
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        self.points.get(&year).copied()
    }

    /// (year, price) pairs ascending by year.
    pub fn points(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.points.iter().map(|(&y, &p)| (y, p))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// One row of a flow series joined with a price series. A year with no
/// price keeps `None`, never zero.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlayRow {
    pub year: i32,
    pub value: f64,
    pub share: Option<f64>,
    pub price: Option<f64>,
}

fn membership(positions: &[usize], dim: usize) -> Vec<bool> {
    let mut mask = vec![false; dim];
    for &p in positions {
        mask[p] = true;
    }
    mask
}

/// Sum of cells from the rows of `from` into the columns of `to`, plus
/// the total output of `from` (all destination columns). Single pass,
/// shared by the flow and share operations so both see identical
/// summation order.
fn masked_flow_and_output(
    table: &TransactionTable,
    from: &SectorGroup,
    to: &SectorGroup,
    mode: MatchMode,
) -> Result<(f64, f64), FlowError> {
    let from_matches = from.resolve(table.index(), mode)?;
    let to_matches = to.resolve(table.index(), mode)?;
    let mask = membership(&to_matches.positions, table.index().len());
    let mut flow = CompensatedSum::new();
    let mut output = CompensatedSum::new();
    for &row in &from_matches.positions {
        for (col, v) in table.cells().row(row) {
            if mask[col] {
                flow.add(v);
            }
            output.add(v);
        }
    }
    Ok((flow.value(), output.value()))
}

/// Total flow from one group to another in one table.
pub fn group_flow(
    table: &TransactionTable,
    from: &SectorGroup,
    to: &SectorGroup,
    mode: MatchMode,
) -> Result<FlowValue, FlowError> {
    let (value, _) = masked_flow_and_output(table, from, to, mode)?;
    Ok(FlowValue {
        year: table.year(),
        from_group: from.name().into(),
        to_group: to.name().into(),
        value,
    })
}

/// Share of the from-group's total output (all destination sectors,
/// including itself) that flows to the to-group.
pub fn group_share(
    table: &TransactionTable,
    from: &SectorGroup,
    to: &SectorGroup,
    mode: MatchMode,
) -> Result<f64, FlowError> {
    let (flow, output) = masked_flow_and_output(table, from, to, mode)?;
    if output == 0.0 {
        return Err(FlowError::ZeroDenominator {
            group: from.name().into(),
            year: table.year(),
        });
    }
    Ok(flow / output)
}

/// A group's purchases from itself.
pub fn endogenous_flow(
    table: &TransactionTable,
    group: &SectorGroup,
    mode: MatchMode,
) -> Result<FlowValue, FlowError> {
    group_flow(table, group, group, mode)
}

/// Per-year flows and shares over a set of tables with distinct years.
///
/// Reports both the unweighted mean of annual shares and the aggregate
/// (flow-weighted) share over the period.
pub fn flow_series(
    tables: &[&TransactionTable],
    from: &SectorGroup,
    to: &SectorGroup,
    mode: MatchMode,
) -> Result<FlowSeries, FlowError> {
    if tables.is_empty() {
        return Err(FlowError::EmptySeries);
    }
    let mut order: Vec<usize> = (0..tables.len()).collect();
    order.sort_by_key(|&i| tables[i].year());
    for w in order.windows(2) {
        if tables[w[0]].year() == tables[w[1]].year() {
            return Err(FlowError::DuplicateYear { year: tables[w[0]].year() });
        }
    }
    let mut points = Vec::with_capacity(tables.len());
    let mut by_year = Vec::with_capacity(tables.len());
    let mut share_mean = CompensatedSum::new();
    let mut flow_total = CompensatedSum::new();
    let mut output_total = CompensatedSum::new();
    for &i in &order {
        let table = tables[i];
        let (flow, output) = masked_flow_and_output(table, from, to, mode)?;
        if output == 0.0 {
            return Err(FlowError::ZeroDenominator {
                group: from.name().into(),
                year: table.year(),
            });
        }
        let share = flow / output;
        points.push(FlowValue {
            year: table.year(),
            from_group: from.name().into(),
            to_group: to.name().into(),
            value: flow,
        });
        by_year.push(share);
        share_mean.add(share);
        flow_total.add(flow);
        output_total.add(output);
    }
    let n = points.len() as f64;
    Ok(FlowSeries {
        from_group: from.name().into(),
        to_group: to.name().into(),
        points,
        shares: Some(ShareSeries {
            by_year,
            mean: share_mean.value() / n,
            flow_weighted_mean: flow_total.value() / output_total.value(),
        }),
    })
}

/// Flows into `to` grouped by the source region of `from`, descending.
///
/// `limit` truncates the ranking; `None` keeps every region with at
/// least one matched position.
pub fn top_contributors(
    table: &TransactionTable,
    from: &SectorGroup,
    to: &SectorGroup,
    limit: Option<usize>,
    mode: MatchMode,
) -> Result<ContributorRanking, FlowError> {
    let from_matches = from.resolve(table.index(), mode)?;
    let to_matches = to.resolve(table.index(), mode)?;
    let index = table.index();
    let mask = membership(&to_matches.positions, index.len());

    let regions = index.regions();
    let ordinal: BTreeMap<&str, usize> = regions
        .iter()
        .enumerate()
        .map(|(i, r)| (r.as_str(), i))
        .collect();
    let mut sums = vec![CompensatedSum::new(); regions.len()];
    let mut touched = vec![false; regions.len()];
    for &row in &from_matches.positions {
        let region_ord = ordinal[index.region_at(row).as_str()];
        touched[region_ord] = true;
        for (col, v) in table.cells().row(row) {
            if mask[col] {
                sums[region_ord].add(v);
            }
        }
    }
    let mut rows: Vec<(RegionCode, f64)> = regions
        .iter()
        .enumerate()
        .filter(|&(i, _)| touched[i])
        .map(|(i, r)| (r.clone(), sums[i].value()))
        .collect();
    rows.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| a.0.as_str().cmp(b.0.as_str()))
    });
    if let Some(limit) = limit {
        rows.truncate(limit);
    }
    Ok(ContributorRanking {
        year: table.year(),
        from_group: from.name().into(),
        to_group: to.name().into(),
        rows,
    })
}

/// Ratio of flows from one group to two destinations, e.g. how many
/// currency units go to one industry per unit going to another.
pub fn comparison_ratio(
    table: &TransactionTable,
    from: &SectorGroup,
    to_a: &SectorGroup,
    to_b: &SectorGroup,
    mode: MatchMode,
) -> Result<f64, FlowError> {
    let a = group_flow(table, from, to_a, mode)?.value;
    let b = group_flow(table, from, to_b, mode)?.value;
    if b == 0.0 {
        return Err(FlowError::ZeroDenominator {
            group: to_b.name().into(),
            year: table.year(),
        });
    }
    Ok(a / b)
}

/// Flow from each distinct sector label of `from` (summed over regions)
/// into the whole of `to`; the per-activity decomposition used by the
/// Sankey export.
pub fn activity_flows(
    table: &TransactionTable,
    from: &SectorGroup,
    to: &SectorGroup,
    mode: MatchMode,
) -> Result<Vec<(SectorLabel, f64)>, FlowError> {
    let from_matches = from.resolve(table.index(), mode)?;
    let to_matches = to.resolve(table.index(), mode)?;
    let index = table.index();
    let mask = membership(&to_matches.positions, index.len());

    let mut labels: Vec<SectorLabel> = Vec::new();
    let mut sums: Vec<CompensatedSum> = Vec::new();
    for &row in &from_matches.positions {
        let label = index.sector_at(row);
        let slot = match labels.iter().position(|l| l == label) {
            Some(i) => i,
            None => {
                labels.push(label.clone());
                sums.push(CompensatedSum::new());
                labels.len() - 1
            }
        };
        for (col, v) in table.cells().row(row) {
            if mask[col] {
                sums[slot].add(v);
            }
        }
    }
    Ok(labels
        .into_iter()
        .zip(sums.into_iter().map(|s| s.value()))
        .collect())
}

/// Left-join a flow series with a price series on year. Years without a
/// price keep `None`.
pub fn overlay_prices(series: &FlowSeries, prices: &PriceSeries) -> Vec<OverlayRow> {
    series
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| OverlayRow {
            year: p.year,
            value: p.value,
            share: series.shares.as_ref().map(|s| s.by_year[i]),
            price: prices.get(p.year),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlowError {
    Group(GroupError),
    ZeroDenominator { group: String, year: i32 },
    DuplicateYear { year: i32 },
    NonPositivePrice { year: i32, price: f64 },
    EmptySeries,
}

impl From<GroupError> for FlowError {
    fn from(e: GroupError) -> Self {
        Self::Group(e)
    }
}

impl fmt::Display for FlowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Group(e) => write!(f, "{e}"),
            Self::ZeroDenominator { group, year } => {
                write!(f, "zero denominator for group {group} in year {year}")
            }
            Self::DuplicateYear { year } => write!(f, "duplicate year {year}"),
            Self::NonPositivePrice { year, price } => {
                write!(f, "non-positive price {price} for year {year}")
            }
            Self::EmptySeries => write!(f, "no tables supplied"),
        }
    }
}

impl core::error::Error for FlowError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Self::Group(e) => Some(e),
            _ => None,
        }
    }
}
