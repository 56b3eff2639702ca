//! Output serialization: CSV tables, Sankey nodes/links JSON, and
//! static SVG line charts.
//!
//! Everything here is deterministic: stable element order, fixed
//! numeric precision in SVG, no timestamps or random identifiers, so
//! outputs can be golden-file tested byte for byte.

use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use mrioflow_core::flows::{ContributorRanking, FlowSeries, FlowValue, OverlayRow, PriceSeries};
use mrioflow_core::sum::CompensatedSum;
use mrioflow_core::RegionSectorIndex;

/// Write one CSV document: header plus rows, RFC-style quoting, UTF-8,
/// `.` decimal separator.
pub fn write_csv<W: io::Write>(
    writer: W,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// `{}` float formatting: shortest representation that round-trips to
/// the same bits, never scientific notation.
fn num(v: f64) -> String {
    format!("{v}")
}

pub fn flow_series_rows(series: &FlowSeries) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let header = vec!["year", "from", "to", "value", "share"];
    let rows = series
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let share = series
                .shares
                .as_ref()
                .map(|s| num(s.by_year[i]))
                .unwrap_or_default();
            vec![
                p.year.to_string(),
                p.from_group.clone(),
                p.to_group.clone(),
                num(p.value),
                share,
            ]
        })
        .collect();
    (header, rows)
}

pub fn ranking_rows(ranking: &ContributorRanking) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let header = vec!["rank", "region", "value"];
    let rows = ranking
        .rows
        .iter()
        .enumerate()
        .map(|(i, (region, value))| {
            vec![(i + 1).to_string(), region.as_str().to_string(), num(*value)]
        })
        .collect();
    (header, rows)
}

pub fn footprint_rows(
    index: &RegionSectorIndex,
    breakdown: &[f64],
) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let header = vec!["region", "sector", "kgCO2e"];
    let rows = index
        .entries()
        .iter()
        .zip(breakdown)
        .map(|((region, sector), v)| {
            vec![region.as_str().to_string(), sector.as_str().to_string(), num(*v)]
        })
        .collect();
    (header, rows)
}

pub fn overlay_rows(rows: &[OverlayRow]) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let header = vec!["year", "value", "share", "price"];
    let body = rows
        .iter()
        .map(|r| {
            vec![
                r.year.to_string(),
                num(r.value),
                r.share.map(num).unwrap_or_default(),
                r.price.map(num).unwrap_or_default(),
            ]
        })
        .collect();
    (header, body)
}

// --- Sankey ---

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SankeyNode {
    pub id: String,
    pub label: String,
    /// "source", "target", or "both" for a node appearing on both ends.
    pub side: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SankeyLink {
    pub source: String,
    pub target: String,
    pub value: f64,
}

/// Nodes/links document in the shape Sankey viewers consume directly.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SankeyDocument {
    pub nodes: Vec<SankeyNode>,
    pub links: Vec<SankeyLink>,
}

impl SankeyDocument {
    /// Sum of all link values.
    pub fn link_total(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for l in &self.links {
            acc.add(l.value);
        }
        acc.value()
    }
}

/// One node per distinct group/activity name, one link per flow.
pub fn to_sankey(flows: &[FlowValue]) -> Result<SankeyDocument, ReportError> {
    if flows.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    let mut nodes: Vec<SankeyNode> = Vec::new();
    let mut add_node = |name: &str, side: &str| {
        match nodes.iter_mut().find(|n| n.id == name) {
            Some(node) => {
                if node.side != side {
                    node.side = "both".into();
                }
            }
            None => nodes.push(SankeyNode {
                id: name.into(),
                label: name.into(),
                side: side.into(),
            }),
        }
    };
    for f in flows {
        add_node(&f.from_group, "source");
        add_node(&f.to_group, "target");
    }
    let links: Vec<SankeyLink> = flows
        .iter()
        .map(|f| SankeyLink {
            source: f.from_group.clone(),
            target: f.to_group.clone(),
            value: f.value,
        })
        .collect();
    let doc = SankeyDocument { nodes, links };
    for l in &doc.links {
        if !doc.nodes.iter().any(|n| n.id == l.source) || !doc.nodes.iter().any(|n| n.id == l.target)
        {
            return Err(ReportError::DanglingLink {
                from_node: l.source.clone(),
                to_node: l.target.clone(),
            });
        }
    }
    Ok(doc)
}

// --- SVG line chart ---

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 80.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const Y_TICKS: usize = 5;

/// Fixed two-decimal formatting keeps goldens stable.
fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

struct Scale {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        if self.hi == self.lo {
            return (self.px_lo + self.px_hi) / 2.0;
        }
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

/// Render a flow series as an SVG 1.1 line chart; a price overlay adds
/// a second polyline against a secondary right-hand axis.
pub fn render_line_chart(
    series: &FlowSeries,
    overlay: Option<&PriceSeries>,
    title: &str,
) -> Result<String, ReportError> {
    if series.points.len() < 2 {
        return Err(ReportError::TooFewPoints { got: series.points.len() });
    }
    let years: Vec<i32> = series.points.iter().map(|p| p.year).collect();
    let values: Vec<f64> = series.points.iter().map(|p| p.value).collect();
    let x = Scale {
        lo: years[0] as f64,
        hi: *years.last().unwrap() as f64,
        px_lo: MARGIN_LEFT,
        px_hi: WIDTH - MARGIN_RIGHT,
    };
    let v_min = values.iter().cloned().fold(f64::INFINITY, f64::min).min(0.0);
    let v_max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let y = Scale {
        lo: v_min,
        hi: if v_max == v_min { v_min + 1.0 } else { v_max },
        px_lo: HEIGHT - MARGIN_BOTTOM,
        px_hi: MARGIN_TOP,
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "  <title>{}</title>\n",
        xml_escape(title)
    ));

    // axes
    svg.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\" stroke-width=\"1\"/>\n",
        fmt2(MARGIN_LEFT),
        fmt2(HEIGHT - MARGIN_BOTTOM),
        fmt2(WIDTH - MARGIN_RIGHT),
        fmt2(HEIGHT - MARGIN_BOTTOM),
    ));
    svg.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\" stroke-width=\"1\"/>\n",
        fmt2(MARGIN_LEFT),
        fmt2(MARGIN_TOP),
        fmt2(MARGIN_LEFT),
        fmt2(HEIGHT - MARGIN_BOTTOM),
    ));

    // horizontal gridlines and left tick labels
    for t in 0..=Y_TICKS {
        let frac = t as f64 / Y_TICKS as f64;
        let value = y.lo + frac * (y.hi - y.lo);
        let py = y.map(value);
        if t > 0 {
            svg.push_str(&format!(
                "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n",
                fmt2(MARGIN_LEFT),
                fmt2(py),
                fmt2(WIDTH - MARGIN_RIGHT),
                fmt2(py),
            ));
        }
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\" fill=\"#333\">{}</text>\n",
            fmt2(MARGIN_LEFT - 6.0),
            fmt2(py + 4.0),
            fmt2(value),
        ));
    }

    // x tick labels: every year if few, else sampled
    let step = (years.len() / 8).max(1);
    for (i, &year) in years.iter().enumerate() {
        if i % step != 0 && i != years.len() - 1 {
            continue;
        }
        let px = x.map(year as f64);
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333\">{}</text>\n",
            fmt2(px),
            fmt2(HEIGHT - MARGIN_BOTTOM + 18.0),
            year,
        ));
    }

    // flow polyline
    let points: Vec<String> = series
        .points
        .iter()
        .map(|p| format!("{},{}", fmt2(x.map(p.year as f64)), fmt2(y.map(p.value))))
        .collect();
    svg.push_str(&format!(
        "  <polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"2\" points=\"{}\"/>\n",
        points.join(" ")
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"start\" fill=\"#1f6fb2\">{} → {}</text>\n",
        fmt2(MARGIN_LEFT),
        fmt2(MARGIN_TOP - 10.0),
        xml_escape(&series.from_group),
        xml_escape(&series.to_group),
    ));

    // secondary axis only when an overlay is present
    if let Some(prices) = overlay {
        let price_values: Vec<(i32, f64)> = prices.points().collect();
        let p_max = price_values
            .iter()
            .map(|&(_, p)| p)
            .fold(0.0f64, f64::max)
            .max(1.0);
        let py_scale = Scale {
            lo: 0.0,
            hi: p_max,
            px_lo: HEIGHT - MARGIN_BOTTOM,
            px_hi: MARGIN_TOP,
        };
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\" stroke-width=\"1\"/>\n",
            fmt2(WIDTH - MARGIN_RIGHT),
            fmt2(MARGIN_TOP),
            fmt2(WIDTH - MARGIN_RIGHT),
            fmt2(HEIGHT - MARGIN_BOTTOM),
        ));
        for t in 0..=Y_TICKS {
            let frac = t as f64 / Y_TICKS as f64;
            let value = frac * p_max;
            svg.push_str(&format!(
                "  <text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"start\" fill=\"#b25f1f\">{}</text>\n",
                fmt2(WIDTH - MARGIN_RIGHT + 6.0),
                fmt2(py_scale.map(value) + 4.0),
                fmt2(value),
            ));
        }
        // only years inside the chart's x range are drawable
        let overlay_points: Vec<String> = price_values
            .iter()
            .filter(|&&(year, _)| (x.lo..=x.hi).contains(&(year as f64)))
            .map(|&(year, p)| {
                format!("{},{}", fmt2(x.map(year as f64)), fmt2(py_scale.map(p)))
            })
            .collect();
        if !overlay_points.is_empty() {
            svg.push_str(&format!(
                "  <polyline fill=\"none\" stroke=\"#b25f1f\" stroke-width=\"2\" stroke-dasharray=\"5,3\" points=\"{}\"/>\n",
                overlay_points.join(" ")
            ));
        }
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\" fill=\"#b25f1f\">{}</text>\n",
            fmt2(WIDTH - MARGIN_RIGHT),
            fmt2(MARGIN_TOP - 10.0),
            xml_escape(prices.name()),
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no flows to serialize")]
    EmptyInput,
    #[error("link references missing node ({from_node} -> {to_node})")]
    DanglingLink { from_node: String, to_node: String },
    #[error("line chart needs at least 2 points, got {got}")]
    TooFewPoints { got: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[cfg(test)]
mod tests {
    use super::*;
    use mrioflow_core::flows::ShareSeries;

    fn flow(year: i32, from: &str, to: &str, value: f64) -> FlowValue {
        FlowValue { year, from_group: from.into(), to_group: to.into(), value }
    }

    fn series(n: usize) -> FlowSeries {
        let points: Vec<FlowValue> = (0..n)
            .map(|i| flow(2000 + i as i32, "ICT", "OG", 100.0 + 10.0 * i as f64))
            .collect();
        let by_year = vec![0.02; n];
        FlowSeries {
            from_group: "ICT".into(),
            to_group: "OG".into(),
            points,
            shares: Some(ShareSeries { by_year, mean: 0.02, flow_weighted_mean: 0.02 }),
        }
    }

    #[test]
    fn csv_writer_quotes_embedded_commas() {
        let mut buf = Vec::new();
        write_csv(
            &mut buf,
            &["region", "sector", "kgCO2e"],
            &[vec![
                "US".into(),
                "Electricity generation: nuclear, hydro, wind".into(),
                "1.5".into(),
            ]],
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"Electricity generation: nuclear, hydro, wind\""));
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn csv_of_three_flows_has_header_plus_three_lines() {
        let s = series(3);
        let (header, rows) = flow_series_rows(&s);
        let mut buf = Vec::new();
        write_csv(&mut buf, &header, &rows).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 4);
    }

    #[test]
    fn empty_rows_yield_header_only() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &["a", "b"], &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);
    }

    #[test]
    fn csv_floats_round_trip_bit_exactly() {
        let s = series(3);
        let (header, rows) = flow_series_rows(&s);
        let mut buf = Vec::new();
        write_csv(&mut buf, &header, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        for (record, point) in reader.records().zip(&s.points) {
            let record = record.unwrap();
            let value: f64 = record.get(3).unwrap().parse().unwrap();
            assert_eq!(value.to_bits(), point.value.to_bits());
        }
    }

    #[test]
    fn sankey_five_activities_to_one_group() {
        let flows: Vec<FlowValue> = (0..5)
            .map(|i| flow(2022, &format!("Activity {i}"), "OG", 10.0 + i as f64))
            .collect();
        let doc = to_sankey(&flows).unwrap();
        assert_eq!(doc.nodes.len(), 6);
        assert_eq!(doc.links.len(), 5);
        let input_total: f64 = flows.iter().map(|f| f.value).sum();
        assert_eq!(doc.link_total(), input_total);
    }

    #[test]
    fn sankey_single_flow_and_empty_input() {
        let doc = to_sankey(&[flow(2022, "ICT", "OG", 48.0)]).unwrap();
        assert_eq!(doc.nodes.len(), 2);
        assert_eq!(doc.links.len(), 1);
        assert_eq!(doc.nodes[0].side, "source");
        assert_eq!(doc.nodes[1].side, "target");
        assert!(matches!(to_sankey(&[]), Err(ReportError::EmptyInput)));
    }

    #[test]
    fn sankey_merges_names_on_both_sides() {
        let doc = to_sankey(&[flow(2022, "ICT", "ICT", 60.0)]).unwrap();
        assert_eq!(doc.nodes.len(), 1);
        assert_eq!(doc.nodes[0].side, "both");
    }

    #[test]
    fn chart_has_one_vertex_per_point() {
        let s = series(23);
        let svg = render_line_chart(&s, None, "flows").unwrap();
        let poly = svg
            .lines()
            .find(|l| l.contains("<polyline"))
            .expect("polyline present");
        let points_attr = poly.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(points_attr.split(' ').count(), 23);
        // deterministic output: a second render is byte-identical
        assert_eq!(svg, render_line_chart(&s, None, "flows").unwrap());
    }

    #[test]
    fn overlay_adds_second_polyline_and_axis() {
        let s = series(5);
        let mut p = PriceSeries::new("Brent");
        for (y, v) in [(2000, 28.5), (2002, 25.0), (2004, 38.0)] {
            p.insert(y, v).unwrap();
        }
        let svg = render_line_chart(&s, Some(&p), "flows with prices").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("Brent"));
        let plain = render_line_chart(&s, None, "flows").unwrap();
        assert_eq!(plain.matches("<polyline").count(), 1);
    }

    #[test]
    fn single_point_chart_rejected() {
        let s = series(1);
        assert!(matches!(
            render_line_chart(&s, None, "x"),
            Err(ReportError::TooFewPoints { got: 1 })
        ));
    }
}
