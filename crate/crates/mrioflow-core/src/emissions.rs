//! Added-emissions estimators for digitalization case studies: linear
//! production ramps with downtime, physical and monetary emission
//! factors, footprint-share comparisons, and multi-decade production
//! wedges annualized to emission rates.
//!
//! All arithmetic is full precision; rounding happens only at display
//! time in the report layer.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::sum::CompensatedSum;
use crate::taxonomy::CaseTags;

/// Default physical factor: kilograms of CO2 per 42-gallon barrel of
/// conventional oil (EPA greenhouse-gas equivalence).
pub const DEFAULT_KG_CO2_PER_BARREL: f64 = 431.87;

/// Linear production build-up from an origin rate to a final rate
/// across a year range, with a downtime fraction reducing effective
/// producing days. Years are 365 days; effective days per year are
/// `365 * (1 - downtime_fraction)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RampSchedule {
    start_year: i32,
    end_year: i32,
    origin_rate: f64,
    final_rate: f64,
    downtime_fraction: f64,
}

impl RampSchedule {
    pub fn new(
        start_year: i32,
        end_year: i32,
        origin_rate: f64,
        final_rate: f64,
        downtime_fraction: f64,
    ) -> Result<Self, EmissionsError> {
        if end_year <= start_year {
            return Err(EmissionsError::InvalidSchedule {
                detail: "end year must be after start year".into(),
            });
        }
        if !(origin_rate.is_finite() && final_rate.is_finite() && origin_rate >= 0.0) {
            return Err(EmissionsError::InvalidSchedule {
                detail: "rates must be finite and non-negative".into(),
            });
        }
        if final_rate < origin_rate {
            return Err(EmissionsError::InvalidSchedule {
                detail: "final rate below origin rate".into(),
            });
        }
        if !(0.0..1.0).contains(&downtime_fraction) {
            return Err(EmissionsError::InvalidSchedule {
                detail: "downtime fraction must be in [0, 1)".into(),
            });
        }
        Ok(Self { start_year, end_year, origin_rate, final_rate, downtime_fraction })
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn end_year(&self) -> i32 {
        self.end_year
    }

    pub fn origin_rate(&self) -> f64 {
        self.origin_rate
    }

    pub fn final_rate(&self) -> f64 {
        self.final_rate
    }

    pub fn downtime_fraction(&self) -> f64 {
        self.downtime_fraction
    }

    pub fn effective_days(&self) -> f64 {
        365.0 * (1.0 - self.downtime_fraction)
    }

    /// Barrels per day in a given year: the rate interpolates linearly
    /// from the origin rate in the start year to the final rate in the
    /// end year, i.e. the ramp has `end - start` intervals. This is the
    /// anchoring under which an integer-valued schedule stays exact in
    /// floating point.
    pub fn daily_rate(&self, year: i32) -> Result<f64, EmissionsError> {
        if year < self.start_year || year > self.end_year {
            return Err(EmissionsError::YearOutOfRange {
                year,
                start: self.start_year,
                end: self.end_year,
            });
        }
        let elapsed = (year - self.start_year) as f64;
        let span = (self.end_year - self.start_year) as f64;
        Ok(self.origin_rate + (self.final_rate - self.origin_rate) * elapsed / span)
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.start_year..=self.end_year
    }
}

/// Barrels produced in one year of the ramp: daily rate times effective
/// days.
pub fn ramp_year_barrels(schedule: &RampSchedule, year: i32) -> Result<f64, EmissionsError> {
    Ok(schedule.daily_rate(year)? * schedule.effective_days())
}

/// Total barrels across the whole ramp; exactly the sum of the per-year
/// values.
pub fn ramp_total_barrels(schedule: &RampSchedule) -> f64 {
    let mut total = CompensatedSum::new();
    for year in schedule.years() {
        // in-range by construction
        total.add(ramp_year_barrels(schedule, year).unwrap_or(0.0));
    }
    total.value()
}

/// Physical emission factor in kgCO2 per barrel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalEmissionFactor {
    kg_per_barrel: f64,
}

impl PhysicalEmissionFactor {
    pub fn new(kg_per_barrel: f64) -> Result<Self, EmissionsError> {
        if !(kg_per_barrel.is_finite() && kg_per_barrel > 0.0) {
            return Err(EmissionsError::InvalidFactor {
                detail: "physical factor must be finite and positive".into(),
            });
        }
        Ok(Self { kg_per_barrel })
    }

    pub fn kg_per_barrel(&self) -> f64 {
        self.kg_per_barrel
    }
}

impl Default for PhysicalEmissionFactor {
    fn default() -> Self {
        Self { kg_per_barrel: DEFAULT_KG_CO2_PER_BARREL }
    }
}

/// Tonnes of CO2 from a barrel count, full precision.
pub fn barrels_to_emissions(barrels: f64, factor: &PhysicalEmissionFactor) -> f64 {
    barrels * factor.kg_per_barrel / 1000.0
}

/// Added emissions as a percentage of a reference footprint.
pub fn footprint_share(added_t: f64, reference_t: f64) -> Result<f64, EmissionsError> {
    if !(reference_t.is_finite() && reference_t > 0.0) {
        return Err(EmissionsError::ZeroDenominator);
    }
    Ok(100.0 * added_t / reference_t)
}

/// Where a monetary factor came from: the company disclosures it was
/// derived from, kept so reports can cite scope coverage.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorProvenance {
    pub emissions_t: f64,
    pub profit: f64,
    pub year: i32,
    pub scopes: String,
    pub currency: String,
}

/// Monetary emission factor: kgCO2e per thousand currency units,
/// derived from a company's reported emissions and after-tax profit.
/// No currency conversion is performed; the currency is recorded as-is.
#[derive(Debug, Clone, PartialEq)]
pub struct MonetaryEmissionFactor {
    kg_per_thousand: f64,
    provenance: FactorProvenance,
}

impl MonetaryEmissionFactor {
    pub fn from_company_report(
        emissions_t: f64,
        profit: f64,
        year: i32,
        scopes: impl Into<String>,
        currency: impl Into<String>,
    ) -> Result<Self, EmissionsError> {
        if !(profit.is_finite() && profit > 0.0) {
            return Err(EmissionsError::ZeroDenominator);
        }
        if !(emissions_t.is_finite() && emissions_t >= 0.0) {
            return Err(EmissionsError::InvalidFactor {
                detail: "emissions must be finite and non-negative".into(),
            });
        }
        Ok(Self {
            kg_per_thousand: emissions_t * 1000.0 / (profit / 1000.0),
            provenance: FactorProvenance {
                emissions_t,
                profit,
                year,
                scopes: scopes.into(),
                currency: currency.into(),
            },
        })
    }

    pub fn kg_per_thousand(&self) -> f64 {
        self.kg_per_thousand
    }

    pub fn provenance(&self) -> &FactorProvenance {
        &self.provenance
    }
}

/// Emissions range in ktCO2e per year.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionRangeKt {
    pub low: f64,
    pub high: f64,
}

/// Convert an annual savings range (currency units per year) into an
/// added-emissions range via a monetary factor.
pub fn savings_to_emissions(
    low_per_year: f64,
    high_per_year: f64,
    factor: &MonetaryEmissionFactor,
) -> Result<EmissionRangeKt, EmissionsError> {
    if !(low_per_year.is_finite() && high_per_year.is_finite())
        || low_per_year < 0.0
        || low_per_year > high_per_year
    {
        return Err(EmissionsError::InvalidRange { low: low_per_year, high: high_per_year });
    }
    let to_kt = |amount: f64| (amount / 1000.0) * factor.kg_per_thousand / 1e6;
    Ok(EmissionRangeKt { low: to_kt(low_per_year), high: to_kt(high_per_year) })
}

/// A multi-decade additional-production wedge annualized to barrels and
/// emissions per year.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeEstimate {
    pub annual_barrels_low: f64,
    pub annual_barrels_high: f64,
    pub annual_emissions_gt_low: f64,
    pub annual_emissions_gt_high: f64,
}

pub fn wedge_annualize(
    total_barrels_low: f64,
    total_barrels_high: f64,
    horizon_years: f64,
    factor: &PhysicalEmissionFactor,
) -> Result<WedgeEstimate, EmissionsError> {
    if !(total_barrels_low.is_finite() && total_barrels_high.is_finite())
        || total_barrels_low < 0.0
        || total_barrels_low > total_barrels_high
    {
        return Err(EmissionsError::InvalidRange {
            low: total_barrels_low,
            high: total_barrels_high,
        });
    }
    if !(horizon_years.is_finite() && horizon_years > 0.0) {
        return Err(EmissionsError::InvalidSchedule {
            detail: "horizon must be positive".into(),
        });
    }
    let low = total_barrels_low / horizon_years;
    let high = total_barrels_high / horizon_years;
    Ok(WedgeEstimate {
        annual_barrels_low: low,
        annual_barrels_high: high,
        annual_emissions_gt_low: low * factor.kg_per_barrel / 1e12,
        annual_emissions_gt_high: high * factor.kg_per_barrel / 1e12,
    })
}

/// Reference company footprint used to contextualize added emissions.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceFootprint {
    pub name: String,
    pub market_based_t: f64,
    pub location_based_t: f64,
}

/// An annual savings claim attributed to a digital deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct SavingsRange {
    pub label: String,
    pub low_per_year: f64,
    pub high_per_year: f64,
}

/// The estimator a scenario runs.
#[derive(Debug, Clone, PartialEq)]
pub enum CaseEstimator {
    Ramp {
        schedule: RampSchedule,
        factor: PhysicalEmissionFactor,
        reference: Option<ReferenceFootprint>,
    },
    Savings {
        factor: MonetaryEmissionFactor,
        ranges: Vec<SavingsRange>,
    },
    Wedge {
        total_barrels_low: f64,
        total_barrels_high: f64,
        horizon_years: f64,
        factor: PhysicalEmissionFactor,
    },
}

/// A tagged case study: taxonomy classification plus estimator inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseScenario {
    pub name: String,
    pub description: String,
    pub tags: CaseTags,
    pub estimator: CaseEstimator,
}

/// One ramp year with every intermediate needed for an auditable trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YearProduction {
    pub year: i32,
    pub rate_bbl_per_day: f64,
    pub barrels: f64,
    pub emissions_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceShares {
    pub reference: ReferenceFootprint,
    /// Final-year added emissions as % of the reference footprint.
    pub market_based_pct: f64,
    pub location_based_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RampOutcome {
    pub effective_days: f64,
    pub years: Vec<YearProduction>,
    pub total_barrels: f64,
    pub total_emissions_t: f64,
    pub final_year: YearProduction,
    pub reference_shares: Option<ReferenceShares>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeOutcome {
    pub label: String,
    pub low_per_year: f64,
    pub high_per_year: f64,
    pub emissions_kt: EmissionRangeKt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SavingsOutcome {
    pub kg_per_thousand: f64,
    pub provenance: FactorProvenance,
    pub ranges: Vec<RangeOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WedgeOutcome {
    pub horizon_years: f64,
    pub total_barrels_low: f64,
    pub total_barrels_high: f64,
    pub estimate: WedgeEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CaseOutcome {
    Ramp(RampOutcome),
    Savings(SavingsOutcome),
    Wedge(WedgeOutcome),
}

impl CaseScenario {
    /// Run the scenario's estimator, retaining every intermediate value.
    pub fn evaluate(&self) -> Result<CaseOutcome, EmissionsError> {
        match &self.estimator {
            CaseEstimator::Ramp { schedule, factor, reference } => {
                let mut years = Vec::new();
                let mut total_barrels = CompensatedSum::new();
                for year in schedule.years() {
                    let barrels = ramp_year_barrels(schedule, year)?;
                    total_barrels.add(barrels);
                    years.push(YearProduction {
                        year,
                        rate_bbl_per_day: schedule.daily_rate(year)?,
                        barrels,
                        emissions_t: barrels_to_emissions(barrels, factor),
                    });
                }
                let total_barrels = total_barrels.value();
                let final_year = *years.last().expect("ramp has at least two years");
                let reference_shares = reference
                    .as_ref()
                    .map(|r| {
                        Ok(ReferenceShares {
                            market_based_pct: footprint_share(
                                final_year.emissions_t,
                                r.market_based_t,
                            )?,
                            location_based_pct: footprint_share(
                                final_year.emissions_t,
                                r.location_based_t,
                            )?,
                            reference: r.clone(),
                        })
                    })
                    .transpose()?;
                Ok(CaseOutcome::Ramp(RampOutcome {
                    effective_days: schedule.effective_days(),
                    total_emissions_t: barrels_to_emissions(total_barrels, factor),
                    years,
                    total_barrels,
                    final_year,
                    reference_shares,
                }))
            }
            CaseEstimator::Savings { factor, ranges } => {
                let ranges = ranges
                    .iter()
                    .map(|r| {
                        Ok(RangeOutcome {
                            label: r.label.clone(),
                            low_per_year: r.low_per_year,
                            high_per_year: r.high_per_year,
                            emissions_kt: savings_to_emissions(
                                r.low_per_year,
                                r.high_per_year,
                                factor,
                            )?,
                        })
                    })
                    .collect::<Result<Vec<_>, EmissionsError>>()?;
                Ok(CaseOutcome::Savings(SavingsOutcome {
                    kg_per_thousand: factor.kg_per_thousand(),
                    provenance: factor.provenance().clone(),
                    ranges,
                }))
            }
            CaseEstimator::Wedge { total_barrels_low, total_barrels_high, horizon_years, factor } => {
                Ok(CaseOutcome::Wedge(WedgeOutcome {
                    horizon_years: *horizon_years,
                    total_barrels_low: *total_barrels_low,
                    total_barrels_high: *total_barrels_high,
                    estimate: wedge_annualize(
                        *total_barrels_low,
                        *total_barrels_high,
                        *horizon_years,
                        factor,
                    )?,
                }))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EmissionsError {
    InvalidSchedule { detail: String },
    YearOutOfRange { year: i32, start: i32, end: i32 },
    ZeroDenominator,
    InvalidRange { low: f64, high: f64 },
    InvalidFactor { detail: String },
}

impl fmt::Display for EmissionsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidSchedule { detail } => write!(f, "invalid ramp schedule: {detail}"),
            Self::YearOutOfRange { year, start, end } => {
                write!(f, "year {year} outside schedule {start}..{end}")
            }
            Self::ZeroDenominator => write!(f, "reference value must be positive"),
            Self::InvalidRange { low, high } => write!(f, "invalid range ({low}, {high})"),
            Self::InvalidFactor { detail } => write!(f, "invalid emission factor: {detail}"),
        }
    }
}

impl core::error::Error for EmissionsError {}
