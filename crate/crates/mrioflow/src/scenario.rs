//! Case-study scenario files and reports.
//!
//! A scenario file names the case, classifies it against the tagging
//! vocabulary, and supplies inputs for exactly one estimator (ramp,
//! savings, or wedge). Reports print the full derivation trace so
//! every intermediate value can be audited line by line.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use serde_json::json;
use thiserror::Error;

use mrioflow_core::emissions::{
    CaseEstimator, CaseOutcome, CaseScenario, EmissionsError, MonetaryEmissionFactor,
    PhysicalEmissionFactor, RampOutcome, RampSchedule, ReferenceFootprint, SavingsOutcome,
    SavingsRange, WedgeOutcome,
};
use mrioflow_core::taxonomy::{CaseTags, Taxonomy, TaxonomyError};

/// The shipped tagging vocabulary (also installed at
/// `data/taxonomy.toml`).
pub const DEFAULT_TAXONOMY_TOML: &str = include_str!("../data/taxonomy.toml");

/// Scenario files shipped with the crate, runnable by name.
pub const BUILTIN_SCENARIOS: [(&str, &str); 3] = [
    ("xto_microsoft", include_str!("../data/scenarios/xto_microsoft.toml")),
    ("valero_aveva", include_str!("../data/scenarios/valero_aveva.toml")),
    ("woodmac_wedge", include_str!("../data/scenarios/woodmac_wedge.toml")),
];

pub fn builtin_scenario_text(name: &str) -> Option<&'static str> {
    BUILTIN_SCENARIOS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

// --- taxonomy catalog ---

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaxonomySchema {
    activities: Vec<String>,
    sub_activities: Vec<String>,
    functions: Vec<String>,
    services: Vec<String>,
    effects: Vec<String>,
    #[serde(default)]
    aliases: BTreeMap<String, String>,
}

pub fn parse_taxonomy(text: &str) -> Result<Taxonomy, ScenarioError> {
    let schema: TaxonomySchema =
        toml::from_str(text).map_err(|e| ScenarioError::Schema { detail: e.to_string() })?;
    Ok(Taxonomy::new(
        &schema.activities,
        &schema.sub_activities,
        &schema.functions,
        &schema.services,
        &schema.effects,
        &schema.aliases,
    )?)
}

pub fn load_taxonomy(path: &Path) -> Result<Taxonomy, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Io { path: path.display().to_string(), source: e })?;
    parse_taxonomy(&text)
}

pub fn default_taxonomy() -> Taxonomy {
    parse_taxonomy(DEFAULT_TAXONOMY_TOML).expect("shipped taxonomy file is valid")
}

// --- scenario file schema ---

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSchema {
    name: String,
    #[serde(default)]
    description: String,
    taxonomy: TagsSchema,
    ramp: Option<RampSchema>,
    savings: Option<SavingsSchema>,
    wedge: Option<WedgeSchema>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TagsSchema {
    #[serde(default)]
    activities: Vec<String>,
    #[serde(default)]
    sub_activities: Vec<String>,
    #[serde(default)]
    functions: Vec<String>,
    #[serde(default)]
    services: Vec<String>,
    #[serde(default)]
    effects: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorSchema {
    kg_co2_per_barrel: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RampSchema {
    start_year: i32,
    end_year: i32,
    #[serde(default)]
    origin_rate_bbl_per_day: f64,
    final_rate_bbl_per_day: f64,
    downtime_fraction: f64,
    emission_factor: FactorSchema,
    reference_footprint: Option<ReferenceSchema>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReferenceSchema {
    name: String,
    market_based_t: f64,
    location_based_t: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SavingsSchema {
    #[serde(default)]
    currency: String,
    factor: MonetaryFactorSchema,
    ranges: Vec<RangeSchema>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MonetaryFactorSchema {
    emissions_t: f64,
    profit: f64,
    year: i32,
    scopes: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RangeSchema {
    label: String,
    low_per_year: f64,
    high_per_year: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WedgeSchema {
    total_barrels_low: f64,
    total_barrels_high: f64,
    horizon_years: f64,
    emission_factor: FactorSchema,
}

/// Parse scenario TOML text, validating tags against the vocabulary.
pub fn parse_scenario(text: &str, taxonomy: &Taxonomy) -> Result<CaseScenario, ScenarioError> {
    let schema: ScenarioSchema =
        toml::from_str(text).map_err(|e| ScenarioError::Schema { detail: e.to_string() })?;
    if schema.name.trim().is_empty() {
        return Err(ScenarioError::Schema { detail: "scenario name is empty".into() });
    }
    let raw_tags = CaseTags {
        activities: schema.taxonomy.activities,
        sub_activities: schema.taxonomy.sub_activities,
        functions: schema.taxonomy.functions,
        services: schema.taxonomy.services,
        effects: schema.taxonomy.effects,
    };
    let tags = taxonomy.validate(&raw_tags)?;

    let mut estimators_present =
        usize::from(schema.ramp.is_some()) + usize::from(schema.savings.is_some());
    estimators_present += usize::from(schema.wedge.is_some());
    if estimators_present != 1 {
        return Err(ScenarioError::Schema {
            detail: format!(
                "a scenario needs exactly one of [ramp], [savings], [wedge]; found {estimators_present}"
            ),
        });
    }

    let estimator = if let Some(r) = schema.ramp {
        CaseEstimator::Ramp {
            schedule: RampSchedule::new(
                r.start_year,
                r.end_year,
                r.origin_rate_bbl_per_day,
                r.final_rate_bbl_per_day,
                r.downtime_fraction,
            )?,
            factor: PhysicalEmissionFactor::new(r.emission_factor.kg_co2_per_barrel)?,
            reference: r.reference_footprint.map(|f| ReferenceFootprint {
                name: f.name,
                market_based_t: f.market_based_t,
                location_based_t: f.location_based_t,
            }),
        }
    } else if let Some(s) = schema.savings {
        if s.ranges.is_empty() {
            return Err(ScenarioError::Schema {
                detail: "savings scenario has no ranges".into(),
            });
        }
        CaseEstimator::Savings {
            factor: MonetaryEmissionFactor::from_company_report(
                s.factor.emissions_t,
                s.factor.profit,
                s.factor.year,
                s.factor.scopes,
                s.currency,
            )?,
            ranges: s
                .ranges
                .into_iter()
                .map(|r| SavingsRange {
                    label: r.label,
                    low_per_year: r.low_per_year,
                    high_per_year: r.high_per_year,
                })
                .collect(),
        }
    } else {
        let w = schema.wedge.expect("estimator count checked above");
        CaseEstimator::Wedge {
            total_barrels_low: w.total_barrels_low,
            total_barrels_high: w.total_barrels_high,
            horizon_years: w.horizon_years,
            factor: PhysicalEmissionFactor::new(w.emission_factor.kg_co2_per_barrel)?,
        }
    };

    Ok(CaseScenario {
        name: schema.name,
        description: schema.description,
        tags,
        estimator,
    })
}

pub fn load_scenario(path: &Path, taxonomy: &Taxonomy) -> Result<CaseScenario, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Io { path: path.display().to_string(), source: e })?;
    parse_scenario(&text, taxonomy)
}

pub fn load_builtin(name: &str, taxonomy: &Taxonomy) -> Result<CaseScenario, ScenarioError> {
    let text = builtin_scenario_text(name).ok_or_else(|| ScenarioError::UnknownBuiltin {
        name: name.into(),
        known: BUILTIN_SCENARIOS.iter().map(|(n, _)| (*n).into()).collect(),
    })?;
    parse_scenario(text, taxonomy)
}

// --- display rounding ---
// All internal arithmetic stays full precision; these apply the
// printed precision used in reports.

/// Round half away from zero to a whole number, with thousands
/// separators.
pub fn fmt_int(v: f64) -> String {
    let rounded = if v >= 0.0 { (v + 0.5).floor() } else { (v - 0.5).ceil() };
    let negative = rounded < 0.0;
    let digits = format!("{}", rounded.abs() as u64);
    let mut grouped = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    if negative {
        format!("-{grouped}")
    } else {
        grouped
    }
}

/// One decimal place (percentages, GtCO2e per year).
pub fn fmt_1dp(v: f64) -> String {
    format!("{v:.1}")
}

/// Two significant digits (MtCO2 headlines).
pub fn fmt_sig2(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (1 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}

fn tag_line(tags: &[String]) -> String {
    if tags.is_empty() {
        "—".into()
    } else {
        tags.join("; ")
    }
}

/// Machine-readable case report.
pub fn case_report_json(scenario: &CaseScenario, outcome: &CaseOutcome) -> serde_json::Value {
    let tags = &scenario.tags;
    let classification = json!({
        "activities": tags.activities,
        "sub_activities": tags.sub_activities,
        "functions": tags.functions,
        "services": tags.services,
        "effects": tags.effects,
    });
    let result = match outcome {
        CaseOutcome::Ramp(r) => json!({
            "kind": "ramp",
            "effective_days_per_year": r.effective_days,
            "years": r.years.iter().map(|y| json!({
                "year": y.year,
                "rate_bbl_per_day": y.rate_bbl_per_day,
                "barrels": y.barrels,
                "emissions_t": y.emissions_t,
            })).collect::<Vec<_>>(),
            "total_barrels": r.total_barrels,
            "total_emissions_t": r.total_emissions_t,
            "final_year_emissions_t": r.final_year.emissions_t,
            "headline_mt_per_year": fmt_sig2(r.final_year.emissions_t / 1e6),
            "reference_shares": r.reference_shares.as_ref().map(|s| json!({
                "reference": s.reference.name,
                "market_based_t": s.reference.market_based_t,
                "location_based_t": s.reference.location_based_t,
                "market_based_pct": s.market_based_pct,
                "location_based_pct": s.location_based_pct,
                "market_based_pct_display": fmt_1dp(s.market_based_pct),
                "location_based_pct_display": fmt_1dp(s.location_based_pct),
            })),
        }),
        CaseOutcome::Savings(s) => json!({
            "kind": "savings",
            "factor_kg_per_thousand": s.kg_per_thousand,
            "factor_kg_per_thousand_display": fmt_int(s.kg_per_thousand),
            "factor_provenance": {
                "emissions_t": s.provenance.emissions_t,
                "profit": s.provenance.profit,
                "year": s.provenance.year,
                "scopes": s.provenance.scopes,
                "currency": s.provenance.currency,
            },
            "ranges": s.ranges.iter().map(|r| json!({
                "label": r.label,
                "savings_low_per_year": r.low_per_year,
                "savings_high_per_year": r.high_per_year,
                "emissions_low_kt": r.emissions_kt.low,
                "emissions_high_kt": r.emissions_kt.high,
                "emissions_display_kt": format!("{}–{}", fmt_int(r.emissions_kt.low), fmt_int(r.emissions_kt.high)),
            })).collect::<Vec<_>>(),
            "headline_mt_per_year": savings_headline(s),
        }),
        CaseOutcome::Wedge(w) => json!({
            "kind": "wedge",
            "horizon_years": w.horizon_years,
            "total_barrels": [w.total_barrels_low, w.total_barrels_high],
            "annual_barrels": [w.estimate.annual_barrels_low, w.estimate.annual_barrels_high],
            "annual_emissions_gt": [w.estimate.annual_emissions_gt_low, w.estimate.annual_emissions_gt_high],
            "annual_emissions_gt_display": format!(
                "{}–{}",
                fmt_1dp(w.estimate.annual_emissions_gt_low),
                fmt_1dp(w.estimate.annual_emissions_gt_high),
            ),
        }),
    };
    json!({
        "name": scenario.name,
        "description": scenario.description,
        "classification": classification,
        "result": result,
    })
}

fn savings_headline(s: &SavingsOutcome) -> String {
    let low = s
        .ranges
        .iter()
        .map(|r| r.emissions_kt.low)
        .fold(f64::INFINITY, f64::min);
    let high = s
        .ranges
        .iter()
        .map(|r| r.emissions_kt.high)
        .fold(f64::NEG_INFINITY, f64::max);
    format!("{}–{}", fmt_sig2(low / 1000.0), fmt_sig2(high / 1000.0))
}

/// Human-readable report with the full derivation trace.
pub fn render_case_text(scenario: &CaseScenario, outcome: &CaseOutcome) -> String {
    let mut out = String::new();
    let tags = &scenario.tags;
    out.push_str(&format!("case study: {}\n", scenario.name));
    if !scenario.description.is_empty() {
        out.push_str(&format!("  {}\n", scenario.description));
    }
    out.push_str("\nclassification\n");
    out.push_str(&format!("  activity:         {}\n", tag_line(&tags.activities)));
    out.push_str(&format!("  sub-activity:     {}\n", tag_line(&tags.sub_activities)));
    out.push_str(&format!("  function:         {}\n", tag_line(&tags.functions)));
    out.push_str(&format!("  service/hardware: {}\n", tag_line(&tags.services)));
    out.push_str(&format!("  intended effect:  {}\n", tag_line(&tags.effects)));

    match outcome {
        CaseOutcome::Ramp(r) => render_ramp(&mut out, scenario, r),
        CaseOutcome::Savings(s) => render_savings(&mut out, s),
        CaseOutcome::Wedge(w) => render_wedge(&mut out, w),
    }
    out
}

fn render_ramp(out: &mut String, scenario: &CaseScenario, r: &RampOutcome) {
    let CaseEstimator::Ramp { schedule, factor, .. } = &scenario.estimator else {
        unreachable!("ramp outcome from ramp estimator");
    };
    out.push_str("\nderivation (linear production ramp)\n");
    out.push_str(&format!(
        "  effective days/year = 365 × (1 − {}) = {}\n",
        schedule.downtime_fraction(),
        r.effective_days,
    ));
    out.push_str(&format!(
        "  daily rate ramps linearly from {} bbl/day in {} to {} bbl/day in {}\n",
        schedule.origin_rate(),
        schedule.start_year(),
        schedule.final_rate(),
        schedule.end_year(),
    ));
    out.push_str(&format!(
        "  emission factor = {} kgCO2 per barrel\n\n",
        factor.kg_per_barrel(),
    ));
    out.push_str("  year    rate bbl/day         barrels    emissions t\n");
    for y in &r.years {
        out.push_str(&format!(
            "  {:<6} {:>13} {:>15} {:>14}\n",
            y.year,
            fmt_int(y.rate_bbl_per_day),
            fmt_int(y.barrels),
            fmt_int(y.emissions_t),
        ));
    }
    out.push_str(&format!(
        "\n  total barrels {}..{}    = {}\n",
        schedule.start_year(),
        schedule.end_year(),
        fmt_int(r.total_barrels),
    ));
    out.push_str(&format!(
        "  total added emissions     = {} tCO2\n",
        fmt_int(r.total_emissions_t),
    ));
    out.push_str(&format!(
        "  final-year ({}) added   = {} tCO2  ({} MtCO2/yr)\n",
        r.final_year.year,
        fmt_int(r.final_year.emissions_t),
        fmt_sig2(r.final_year.emissions_t / 1e6),
    ));
    if let Some(shares) = &r.reference_shares {
        out.push_str("\nreference comparison\n");
        out.push_str(&format!("  reference: {}\n", shares.reference.name));
        out.push_str(&format!(
            "  vs market-based   {} t -> {}%\n",
            fmt_int(shares.reference.market_based_t),
            fmt_1dp(shares.market_based_pct),
        ));
        out.push_str(&format!(
            "  vs location-based {} t -> {}%\n",
            fmt_int(shares.reference.location_based_t),
            fmt_1dp(shares.location_based_pct),
        ));
    }
}

fn render_savings(out: &mut String, s: &SavingsOutcome) {
    let p = &s.provenance;
    out.push_str("\nderivation (monetary emission factor)\n");
    out.push_str(&format!(
        "  reported emissions = {} tCO2e ({}, {})\n",
        fmt_int(p.emissions_t),
        p.scopes,
        p.year,
    ));
    out.push_str(&format!(
        "  after-tax profit   = {} {}\n",
        fmt_int(p.profit),
        p.currency,
    ));
    out.push_str(&format!(
        "  factor = {} kg / ({} / 1000) = {} kgCO2e per thousand {}\n",
        fmt_int(p.emissions_t * 1000.0),
        fmt_int(p.profit),
        fmt_int(s.kg_per_thousand),
        p.currency,
    ));
    for r in &s.ranges {
        out.push_str(&format!("\n  {}\n", r.label));
        out.push_str(&format!(
            "    savings {}..{} {}/yr -> added emissions {}..{} ktCO2e/yr\n",
            fmt_int(r.low_per_year),
            fmt_int(r.high_per_year),
            p.currency,
            fmt_int(r.emissions_kt.low),
            fmt_int(r.emissions_kt.high),
        ));
    }
    out.push_str(&format!(
        "\n  headline: {} MtCO2e per year\n",
        savings_headline(s),
    ));
}

fn render_wedge(out: &mut String, w: &WedgeOutcome) {
    out.push_str("\nderivation (production wedge)\n");
    out.push_str(&format!(
        "  additional barrels by horizon = {} .. {}\n",
        fmt_int(w.total_barrels_low),
        fmt_int(w.total_barrels_high),
    ));
    out.push_str(&format!("  horizon = {} years\n", w.horizon_years));
    out.push_str(&format!(
        "  annual barrels = {} .. {} (billion bbl/yr: {} .. {})\n",
        fmt_int(w.estimate.annual_barrels_low),
        fmt_int(w.estimate.annual_barrels_high),
        fmt_int(w.estimate.annual_barrels_low / 1e9),
        fmt_int(w.estimate.annual_barrels_high / 1e9),
    ));
    out.push_str(&format!(
        "  annual added emissions = {} .. {} GtCO2e per year\n",
        fmt_1dp(w.estimate.annual_emissions_gt_low),
        fmt_1dp(w.estimate.annual_emissions_gt_high),
    ));
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario schema error: {detail}")]
    Schema { detail: String },
    #[error("unknown builtin scenario \"{name}\" (known: {})", known.join(", "))]
    UnknownBuiltin { name: String, known: Vec<String> },
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Emissions(#[from] EmissionsError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}
