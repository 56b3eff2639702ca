//! Command-line front end: ingest → concordance → flows / footprint /
//! case → report.
//!
//! Every command that writes outputs also writes a `run_manifest.json`;
//! identical inputs and parameters produce byte-identical output trees.
//! Failures exit with a per-class code: 10 parse, 11 concordance/tag
//! matching, 12 numeric, 13 I/O (clap itself uses 2 for usage errors).

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mrioflow_core::flows::{self, FlowError, FlowSeries, FlowValue};
use mrioflow_core::group::GroupError;
use mrioflow_core::leontief::{self, SolveOptions};
use mrioflow_core::{MatchMode, SectorGroup, TransactionTable};

use crate::concordance::{self, ConcordanceConfig, ConcordanceError};
use crate::ingest::{self, IngestError, MrioFileSpec};
use crate::manifest::RunManifest;
use crate::report::{self, ReportError};
use crate::scenario::{self, ScenarioError};

#[derive(Debug, Parser)]
#[command(
    name = "mrioflow",
    version,
    about = "Multi-regional input-output flow analysis, environmental extensions, and carbon case studies"
)]
pub struct Cli {
    /// Emit machine-readable JSON on stdout instead of human text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse every table in a dataset directory and report dimensions,
    /// nonzeros, and negative-cell counts per year.
    Ingest(IngestArgs),
    /// Group-to-group flow analytics: series, shares, rankings, ratios.
    Flows(FlowsArgs),
    /// Environmentally-extended footprint of a final demand.
    Footprint(FootprintArgs),
    /// Run a case-study scenario file and print its derivation trace.
    Case(CaseArgs),
    /// Export Sankey JSON or SVG charts.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct DatasetOpts {
    /// Dataset directory holding one transaction table per year.
    #[arg(long, env = "MRIOFLOW_DATASET")]
    pub dataset: PathBuf,
    /// File-name pattern with a {year} placeholder; also extracts the
    /// year (tables carry no year field of their own).
    #[arg(long, default_value = "mrio_{year}.tsv")]
    pub pattern: String,
    /// Years to load: "all", "2000:2022", or "2000,2011,2022".
    #[arg(long, default_value = "all")]
    pub years: String,
    /// Cell delimiter: "tab", "comma", "semicolon", or a literal char.
    #[arg(long, default_value = "tab")]
    pub delimiter: String,
    #[arg(long, default_value_t = 2)]
    pub header_rows: usize,
    #[arg(long, default_value_t = 2)]
    pub label_cols: usize,
    /// Unit tag recorded in table metadata (no conversion happens).
    #[arg(long, default_value = "M€")]
    pub unit: String,
    /// Accept comma decimal separators instead of points.
    #[arg(long)]
    pub decimal_comma: bool,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub data: DatasetOpts,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlowMode {
    Series,
    Share,
    Top,
    Ratio,
    Endogenous,
}

#[derive(Debug, Args)]
pub struct FlowsArgs {
    #[command(flatten)]
    pub data: DatasetOpts,
    /// Source group name from the concordance.
    #[arg(long)]
    pub from: String,
    /// Destination group name (not needed for endogenous mode).
    #[arg(long)]
    pub to: Option<String>,
    /// Second destination for ratio mode.
    #[arg(long)]
    pub to_b: Option<String>,
    #[arg(long, value_enum, default_value_t = FlowMode::Series)]
    pub mode: FlowMode,
    /// Year for single-year modes (share, top, ratio); defaults to the
    /// latest loaded year.
    #[arg(long)]
    pub year: Option<i32>,
    /// Ranking truncation for top mode.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Optional year,price CSV joined onto the series outputs.
    #[arg(long)]
    pub prices: Option<PathBuf>,
    /// Concordance file (defaults to the shipped classification).
    #[arg(long)]
    pub concordance: Option<PathBuf>,
    /// Keep going when a selector matches nothing.
    #[arg(long)]
    pub lenient: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FootprintArgs {
    #[command(flatten)]
    pub data: DatasetOpts,
    /// Year of the table to analyze; defaults to the latest loaded.
    #[arg(long)]
    pub year: Option<i32>,
    /// region,sector,value CSV of direct emission intensities
    /// (kgCO2e per unit of output).
    #[arg(long)]
    pub intensity: PathBuf,
    /// region,sector,value CSV of final demand.
    #[arg(long)]
    pub demand: PathBuf,
    /// region,sector,value CSV of total sectoral output. Without it,
    /// row sums of the transaction table are used and noted in the
    /// outputs (they omit final demand).
    #[arg(long)]
    pub total_output: Option<PathBuf>,
    #[arg(long)]
    pub lenient: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CaseArgs {
    /// Scenario file to run.
    pub scenario: Option<PathBuf>,
    /// Run a shipped scenario by name instead of a file.
    #[arg(long, conflicts_with = "scenario")]
    pub builtin: Option<String>,
    /// Tagging vocabulary (defaults to the shipped catalog).
    #[arg(long)]
    pub taxonomy: Option<PathBuf>,
    /// Also write the report (text + JSON) into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ExportKind {
    /// Nodes/links JSON of per-activity flows into a destination group.
    Sankey(SankeyArgs),
    /// SVG line chart of a flow series, optionally with price overlay.
    Chart(ChartArgs),
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(subcommand)]
    pub kind: ExportKind,
}

#[derive(Debug, Args)]
pub struct SankeyArgs {
    #[command(flatten)]
    pub data: DatasetOpts,
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    #[arg(long)]
    pub year: Option<i32>,
    /// One aggregate link instead of one link per source activity.
    #[arg(long)]
    pub flat: bool,
    #[arg(long)]
    pub concordance: Option<PathBuf>,
    #[arg(long)]
    pub lenient: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ChartArgs {
    #[command(flatten)]
    pub data: DatasetOpts,
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    #[arg(long)]
    pub prices: Option<PathBuf>,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long)]
    pub concordance: Option<PathBuf>,
    #[arg(long)]
    pub lenient: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

// --- error class -> exit code mapping ---

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Concordance(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Parse(_) => 10,
            Self::Concordance(_) => 11,
            Self::Numeric(_) => 12,
            Self::Io(_) => 13,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Parse(m) | Self::Concordance(m) | Self::Numeric(m)
            | Self::Io(m) => f.write_str(m),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io { .. } => Self::Io(e.to_string()),
            _ => Self::Parse(e.to_string()),
        }
    }
}

impl From<ConcordanceError> for CliError {
    fn from(e: ConcordanceError) -> Self {
        match e {
            ConcordanceError::Io { .. } => Self::Io(e.to_string()),
            _ => Self::Concordance(e.to_string()),
        }
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Group(GroupError::UnmatchedSelector { .. }) => {
                Self::Concordance(e.to_string())
            }
            FlowError::Group(_) => Self::Concordance(e.to_string()),
            _ => Self::Numeric(e.to_string()),
        }
    }
}

impl From<leontief::LeontiefError> for CliError {
    fn from(e: leontief::LeontiefError) -> Self {
        Self::Numeric(e.to_string())
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Io { .. } => Self::Io(e.to_string()),
            ScenarioError::Taxonomy(_) => Self::Concordance(e.to_string()),
            ScenarioError::Emissions(_) => Self::Numeric(e.to_string()),
            _ => Self::Parse(e.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Io(_) | ReportError::Csv(_) => Self::Io(e.to_string()),
            _ => Self::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

// --- shared helpers ---

#[derive(Debug, Clone)]
enum YearFilter {
    All,
    Range(i32, i32),
    List(BTreeSet<i32>),
}

impl YearFilter {
    fn parse(spec: &str) -> Result<Self, CliError> {
        let spec = spec.trim();
        if spec.is_empty() || spec == "all" {
            return Ok(Self::All);
        }
        if let Some((lo, hi)) = spec.split_once(':') {
            let lo: i32 = lo
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad year range \"{spec}\"")))?;
            let hi: i32 = hi
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad year range \"{spec}\"")))?;
            if hi < lo {
                return Err(CliError::Usage(format!("bad year range \"{spec}\"")));
            }
            return Ok(Self::Range(lo, hi));
        }
        let years = spec
            .split(',')
            .map(|y| y.trim().parse::<i32>())
            .collect::<Result<BTreeSet<i32>, _>>()
            .map_err(|_| CliError::Usage(format!("bad year list \"{spec}\"")))?;
        Ok(Self::List(years))
    }

    fn contains(&self, year: i32) -> bool {
        match self {
            Self::All => true,
            Self::Range(lo, hi) => (*lo..=*hi).contains(&year),
            Self::List(set) => set.contains(&year),
        }
    }
}

fn delimiter_char(spec: &str) -> Result<char, CliError> {
    match spec {
        "tab" | "\\t" => Ok('\t'),
        "comma" => Ok(','),
        "semicolon" => Ok(';'),
        other => other
            .chars()
            .next()
            .filter(|_| other.chars().count() == 1)
            .ok_or_else(|| CliError::Usage(format!("bad delimiter \"{other}\""))),
    }
}

/// Dataset files matching the pattern, ascending by extracted year.
fn discover_files(opts: &DatasetOpts) -> Result<Vec<(i32, PathBuf)>, CliError> {
    let filter = YearFilter::parse(&opts.years)?;
    let entries = fs::read_dir(&opts.dataset).map_err(|e| {
        CliError::Io(format!("{}: {e}", opts.dataset.display()))
    })?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| CliError::Io(e.to_string()))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Ok(year) = ingest::extract_year(name, &opts.pattern) {
            if filter.contains(year) {
                files.push((year, entry.path()));
            }
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!(
            "no files matching \"{}\" (years {}) under {}",
            opts.pattern,
            opts.years,
            opts.dataset.display()
        )));
    }
    Ok(files)
}

fn file_spec(opts: &DatasetOpts, path: &Path, year: i32) -> Result<MrioFileSpec, CliError> {
    let mut spec = MrioFileSpec::new(path, year);
    spec.delimiter = delimiter_char(&opts.delimiter)?;
    spec.header_rows = opts.header_rows;
    spec.label_cols = opts.label_cols;
    spec.unit = opts.unit.clone();
    spec.decimal_comma = opts.decimal_comma;
    Ok(spec)
}

/// Parse every discovered file, one worker per year. Each parse is an
/// independent job; results come back in discovery order, so outputs
/// stay deterministic.
fn parse_all(
    opts: &DatasetOpts,
    files: &[(i32, PathBuf)],
) -> Result<Vec<Result<TransactionTable, IngestError>>, CliError> {
    let specs = files
        .iter()
        .map(|(year, path)| file_spec(opts, path, *year))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .map(|spec| scope.spawn(move || ingest::parse_mrio(spec)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("parse worker does not panic"))
            .collect()
    }))
}

fn load_tables(opts: &DatasetOpts) -> Result<Vec<TransactionTable>, CliError> {
    let files = discover_files(opts)?;
    parse_all(opts, &files)?
        .into_iter()
        .map(|result| Ok(result?))
        .collect()
}

fn load_concordance_opt(path: Option<&Path>) -> Result<ConcordanceConfig, CliError> {
    match path {
        Some(p) => Ok(concordance::load_concordance(p)?),
        None => Ok(concordance::default_concordance()),
    }
}

fn group_by_name(config: &ConcordanceConfig, name: &str) -> Result<SectorGroup, CliError> {
    config.group(name).ok_or_else(|| {
        CliError::Concordance(format!(
            "unknown group \"{name}\"; known groups: {}",
            config.group_names().join(", ")
        ))
    })
}

fn mode_of(lenient: bool) -> MatchMode {
    if lenient {
        MatchMode::Lenient
    } else {
        MatchMode::Strict
    }
}

fn pick_table(
    tables: &[TransactionTable],
    year: Option<i32>,
) -> Result<&TransactionTable, CliError> {
    match year {
        Some(y) => tables.iter().find(|t| t.year() == y).ok_or_else(|| {
            let known: Vec<String> = tables.iter().map(|t| t.year().to_string()).collect();
            CliError::Usage(format!("year {y} not loaded (loaded: {})", known.join(", ")))
        }),
        None => tables
            .iter()
            .max_by_key(|t| t.year())
            .ok_or_else(|| CliError::Usage("no tables loaded".into())),
    }
}

fn ensure_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("json serializes");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn write_csv_file(
    path: &Path,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    let file = fs::File::create(path)?;
    report::write_csv(file, header, rows)?;
    Ok(())
}

/// `{}` float formatting (shortest round-trip).
fn num(v: f64) -> String {
    format!("{v}")
}

/// Group names may contain path-hostile characters; file names keep
/// only a safe subset.
fn file_token(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

// --- command implementations ---

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest(args) => cmd_ingest(args, cli.json),
        Command::Flows(args) => cmd_flows(args, cli.json),
        Command::Footprint(args) => cmd_footprint(args, cli.json),
        Command::Case(args) => cmd_case(args, cli.json),
        Command::Export(args) => match args.kind {
            ExportKind::Sankey(a) => cmd_export_sankey(a, cli.json),
            ExportKind::Chart(a) => cmd_export_chart(a, cli.json),
        },
    }
}

fn cmd_ingest(args: IngestArgs, json_mode: bool) -> Result<(), CliError> {
    let files = discover_files(&args.data)?;
    ensure_out(&args.out)?;

    let mut summaries = Vec::new();
    let mut failures = Vec::new();
    let results = parse_all(&args.data, &files)?;
    for ((year, path), result) in files.iter().zip(results) {
        match result {
            Ok(table) => {
                let index = table.index();
                let distinct_sectors = {
                    let mut set = BTreeSet::new();
                    for (_, s) in index.entries() {
                        set.insert(s.normalized().to_string());
                    }
                    set.len()
                };
                summaries.push(json!({
                    "year": year,
                    "file": path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
                    "positions": index.len(),
                    "regions": index.regions().len(),
                    "sectors": distinct_sectors,
                    "nonzeros": table.cells().nnz(),
                    "negative_cells": table.meta().negative_cells,
                    "total": table.cells().total(),
                    "unit": table.meta().unit,
                }));
            }
            Err(e) => failures.push(json!({
                "year": year,
                "file": path.display().to_string(),
                "error": e.to_string(),
            })),
        }
    }

    let doc = json!({ "tables": summaries, "failures": failures });
    write_json(&args.out.join("ingest_report.json"), &doc)?;
    RunManifest::new("ingest", &args.out)
        .dataset(Some(&args.data.dataset))
        .years(Some(args.data.years.clone()))
        .param("pattern", &args.data.pattern)
        .write(&args.out)?;

    if json_mode {
        println!("{doc}");
    } else {
        println!("year  positions  regions  sectors  nonzeros  negatives  total");
        for s in &summaries {
            println!(
                "{:<5} {:>9}  {:>7}  {:>7}  {:>8}  {:>9}  {}",
                s["year"].as_i64().unwrap_or_default(),
                s["positions"].as_u64().unwrap_or_default(),
                s["regions"].as_u64().unwrap_or_default(),
                s["sectors"].as_u64().unwrap_or_default(),
                s["nonzeros"].as_u64().unwrap_or_default(),
                s["negative_cells"].as_u64().unwrap_or_default(),
                s["total"].as_f64().unwrap_or_default(),
            );
        }
        for f in &failures {
            eprintln!("failed: {} ({})", f["file"], f["error"]);
        }
        println!("report: {}", args.out.join("ingest_report.json").display());
    }
    if !failures.is_empty() {
        return Err(CliError::Parse(format!(
            "{} of {} files failed to parse",
            failures.len(),
            files.len()
        )));
    }
    Ok(())
}

fn series_json(series: &FlowSeries) -> serde_json::Value {
    let shares = series.shares.as_ref();
    json!({
        "from": series.from_group,
        "to": series.to_group,
        "points": series.points.iter().enumerate().map(|(i, p)| json!({
            "year": p.year,
            "value": p.value,
            "share": shares.map(|s| s.by_year[i]),
        })).collect::<Vec<_>>(),
        "mean_share": shares.map(|s| s.mean),
        "flow_weighted_mean_share": shares.map(|s| s.flow_weighted_mean),
    })
}

fn cmd_flows(args: FlowsArgs, json_mode: bool) -> Result<(), CliError> {
    let config = load_concordance_opt(args.concordance.as_deref())?;
    let from = group_by_name(&config, &args.from)?;
    let mode = mode_of(args.lenient);
    let tables = load_tables(&args.data)?;
    let refs: Vec<&TransactionTable> = tables.iter().collect();
    ensure_out(&args.out)?;

    let need_to = !matches!(args.mode, FlowMode::Endogenous);
    let to = match (&args.to, need_to) {
        (Some(name), _) => Some(group_by_name(&config, name)?),
        (None, false) => None,
        (None, true) => return Err(CliError::Usage("--to is required for this mode".into())),
    };

    let manifest = RunManifest::new("flows", &args.out)
        .dataset(Some(&args.data.dataset))
        .years(Some(args.data.years.clone()))
        .concordance(args.concordance.as_deref())
        .param("from", &args.from)
        .param("to", args.to.clone().unwrap_or_default())
        .param("mode", format!("{:?}", args.mode).to_lowercase())
        .param("lenient", args.lenient.to_string());

    let doc = match args.mode {
        FlowMode::Series => {
            let to = to.expect("required above");
            let series = flows::flow_series(&refs, &from, &to, mode)?;
            let (header, rows) = report::flow_series_rows(&series);
            write_csv_file(&args.out.join("flows_series.csv"), &header, &rows)?;
            let mut doc = series_json(&series);
            if let Some(prices_path) = &args.prices {
                let prices = ingest::parse_price_series(prices_path)?;
                let joined = flows::overlay_prices(&series, &prices);
                let (header, rows) = report::overlay_rows(&joined);
                write_csv_file(&args.out.join("flows_series_prices.csv"), &header, &rows)?;
                doc["prices"] = json!(prices.name());
            }
            write_json(&args.out.join("flows_series.json"), &doc)?;
            if !json_mode {
                let shares = series.shares.as_ref().expect("series computes shares");
                println!("{} -> {} flows", series.from_group, series.to_group);
                println!("year          value  share");
                for (i, p) in series.points.iter().enumerate() {
                    println!("{:<5} {:>13}  {}", p.year, num(p.value), num(shares.by_year[i]));
                }
                println!("mean share (unweighted)    = {}", num(shares.mean));
                println!("mean share (flow-weighted) = {}", num(shares.flow_weighted_mean));
            }
            doc
        }
        FlowMode::Share => {
            let to = to.expect("required above");
            let table = pick_table(&tables, args.year)?;
            let share = flows::group_share(table, &from, &to, mode)?;
            let flow = flows::group_flow(table, &from, &to, mode)?;
            let doc = json!({
                "year": table.year(),
                "from": from.name(),
                "to": to.name(),
                "value": flow.value,
                "share": share,
            });
            write_json(&args.out.join("flows_share.json"), &doc)?;
            if !json_mode {
                println!(
                    "{} -> {} in {}: {} ({} of {} output)",
                    from.name(),
                    to.name(),
                    table.year(),
                    num(flow.value),
                    num(share),
                    from.name(),
                );
            }
            doc
        }
        FlowMode::Top => {
            let to = to.expect("required above");
            let table = pick_table(&tables, args.year)?;
            let ranking = flows::top_contributors(table, &from, &to, args.limit, mode)?;
            let (header, rows) = report::ranking_rows(&ranking);
            write_csv_file(&args.out.join("flows_top.csv"), &header, &rows)?;
            let doc = json!({
                "year": ranking.year,
                "from": ranking.from_group,
                "to": ranking.to_group,
                "rows": ranking.rows.iter().map(|(r, v)| json!({
                    "region": r.as_str(),
                    "value": v,
                })).collect::<Vec<_>>(),
            });
            write_json(&args.out.join("flows_top.json"), &doc)?;
            if !json_mode {
                println!(
                    "top {} contributors {} -> {} in {}",
                    ranking.rows.len(),
                    ranking.from_group,
                    ranking.to_group,
                    ranking.year,
                );
                for (i, (region, value)) in ranking.rows.iter().enumerate() {
                    println!("{:>3}. {:<4} {}", i + 1, region.as_str(), num(*value));
                }
            }
            doc
        }
        FlowMode::Ratio => {
            let to = to.expect("required above");
            let to_b_name = args
                .to_b
                .as_ref()
                .ok_or_else(|| CliError::Usage("--to-b is required for ratio mode".into()))?;
            let to_b = group_by_name(&config, to_b_name)?;
            let table = pick_table(&tables, args.year)?;
            let ratio = flows::comparison_ratio(table, &from, &to, &to_b, mode)?;
            let doc = json!({
                "year": table.year(),
                "from": from.name(),
                "to_a": to.name(),
                "to_b": to_b.name(),
                "ratio": ratio,
            });
            write_json(&args.out.join("flows_ratio.json"), &doc)?;
            if !json_mode {
                println!(
                    "in {}, per unit {} -> {}, {} -> {} carries {}",
                    table.year(),
                    from.name(),
                    to_b.name(),
                    from.name(),
                    to.name(),
                    num(ratio),
                );
            }
            doc
        }
        FlowMode::Endogenous => {
            let mut rows = Vec::new();
            let mut points = Vec::new();
            for table in &refs {
                let f = flows::endogenous_flow(table, &from, mode)?;
                rows.push(vec![
                    f.year.to_string(),
                    f.from_group.clone(),
                    f.to_group.clone(),
                    num(f.value),
                    String::new(),
                ]);
                points.push(json!({ "year": f.year, "value": f.value }));
            }
            write_csv_file(
                &args.out.join("flows_endogenous.csv"),
                &["year", "from", "to", "value", "share"],
                &rows,
            )?;
            let doc = json!({ "group": from.name(), "points": points });
            write_json(&args.out.join("flows_endogenous.json"), &doc)?;
            if !json_mode {
                println!("{} endogenous flows by year written", from.name());
            }
            doc
        }
    };

    manifest.write(&args.out)?;
    if json_mode {
        println!("{doc}");
    }
    Ok(())
}

fn cmd_footprint(args: FootprintArgs, json_mode: bool) -> Result<(), CliError> {
    let tables = load_tables(&args.data)?;
    let table = pick_table(&tables, args.year)?;
    let mode = mode_of(args.lenient);
    let index = table.index();

    let intensity = ingest::parse_extension(&args.intensity, index, mode)?;
    let demand = ingest::parse_extension(&args.demand, index, mode)?;
    let (total_output, output_source) = match &args.total_output {
        Some(path) => (ingest::parse_extension(path, index, mode)?.values, "file"),
        None => (table.cells().row_sums(), "row_sums"),
    };

    let coeffs = leontief::technical_coefficients(table, &total_output)?;
    let result = leontief::footprint(
        &intensity.values,
        &coeffs,
        &demand.values,
        &SolveOptions::default(),
    )?;

    ensure_out(&args.out)?;
    let (header, rows) = report::footprint_rows(index, &result.breakdown);
    write_csv_file(&args.out.join("footprint.csv"), &header, &rows)?;
    let doc = json!({
        "year": table.year(),
        "total_kg": result.total,
        "intensity_file": args.intensity.display().to_string(),
        "demand_file": args.demand.display().to_string(),
        "total_output_source": output_source,
        "intensity_missing_positions": intensity.missing_count,
        "demand_missing_positions": demand.missing_count,
        "zero_output_columns": coeffs.zero_output_columns().len(),
        "over_unit_columns": coeffs.over_unit_columns().len(),
    });
    write_json(&args.out.join("footprint_totals.json"), &doc)?;
    RunManifest::new("footprint", &args.out)
        .dataset(Some(&args.data.dataset))
        .years(Some(args.data.years.clone()))
        .param("year", table.year().to_string())
        .param("intensity", args.intensity.display().to_string())
        .param("demand", args.demand.display().to_string())
        .param("total_output", output_source)
        .write(&args.out)?;

    if json_mode {
        println!("{doc}");
    } else {
        println!("footprint of demand in {}: {} kgCO2e", table.year(), num(result.total));
        if output_source == "row_sums" {
            println!("note: total output taken from transaction row sums (no final demand)");
        }
        if !coeffs.over_unit_columns().is_empty() {
            eprintln!(
                "warning: {} columns have coefficient sums >= 1",
                coeffs.over_unit_columns().len(),
            );
        }
        println!("breakdown: {}", args.out.join("footprint.csv").display());
    }
    Ok(())
}

fn cmd_case(args: CaseArgs, json_mode: bool) -> Result<(), CliError> {
    let taxonomy = match &args.taxonomy {
        Some(path) => scenario::load_taxonomy(path)?,
        None => scenario::default_taxonomy(),
    };
    let case = match (&args.scenario, &args.builtin) {
        (Some(path), None) => scenario::load_scenario(path, &taxonomy)?,
        (None, Some(name)) => scenario::load_builtin(name, &taxonomy)?,
        (None, None) => {
            return Err(CliError::Usage(
                "give a scenario file or --builtin <name>".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let outcome = case
        .evaluate()
        .map_err(|e| CliError::Numeric(e.to_string()))?;

    let doc = scenario::case_report_json(&case, &outcome);
    let text = scenario::render_case_text(&case, &outcome);
    if let Some(out) = &args.out {
        ensure_out(out)?;
        write_json(&out.join(format!("case_{}.json", case.name)), &doc)?;
        fs::write(out.join(format!("case_{}.txt", case.name)), &text)?;
        RunManifest::new("case", out)
            .param("scenario", &case.name)
            .param(
                "source",
                args.scenario
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| "builtin".into()),
            )
            .write(out)?;
    }
    if json_mode {
        println!("{doc}");
    } else {
        print!("{text}");
    }
    Ok(())
}

fn cmd_export_sankey(args: SankeyArgs, json_mode: bool) -> Result<(), CliError> {
    let config = load_concordance_opt(args.concordance.as_deref())?;
    let from = group_by_name(&config, &args.from)?;
    let to = group_by_name(&config, &args.to)?;
    let mode = mode_of(args.lenient);
    let tables = load_tables(&args.data)?;
    let table = pick_table(&tables, args.year)?;

    let flows_list: Vec<FlowValue> = if args.flat {
        vec![flows::group_flow(table, &from, &to, mode)?]
    } else {
        flows::activity_flows(table, &from, &to, mode)?
            .into_iter()
            .map(|(label, value)| FlowValue {
                year: table.year(),
                from_group: label.as_str().to_string(),
                to_group: to.name().to_string(),
                value,
            })
            .collect()
    };
    let doc = report::to_sankey(&flows_list)?;

    ensure_out(&args.out)?;
    let path = args.out.join(format!("sankey_{}.json", table.year()));
    let value = serde_json::to_value(&doc).expect("sankey serializes");
    write_json(&path, &value)?;
    RunManifest::new("export-sankey", &args.out)
        .dataset(Some(&args.data.dataset))
        .concordance(args.concordance.as_deref())
        .param("from", &args.from)
        .param("to", &args.to)
        .param("year", table.year().to_string())
        .param("flat", args.flat.to_string())
        .write(&args.out)?;

    if json_mode {
        println!("{value}");
    } else {
        println!(
            "sankey with {} nodes, {} links (total {}): {}",
            doc.nodes.len(),
            doc.links.len(),
            num(doc.link_total()),
            path.display(),
        );
    }
    Ok(())
}

fn cmd_export_chart(args: ChartArgs, json_mode: bool) -> Result<(), CliError> {
    let config = load_concordance_opt(args.concordance.as_deref())?;
    let from = group_by_name(&config, &args.from)?;
    let to = group_by_name(&config, &args.to)?;
    let mode = mode_of(args.lenient);
    let tables = load_tables(&args.data)?;
    let refs: Vec<&TransactionTable> = tables.iter().collect();
    let series = flows::flow_series(&refs, &from, &to, mode)?;

    let prices = args
        .prices
        .as_deref()
        .map(ingest::parse_price_series)
        .transpose()?;
    let title = args
        .title
        .clone()
        .unwrap_or_else(|| format!("{} to {} flows", from.name(), to.name()));
    let svg = report::render_line_chart(&series, prices.as_ref(), &title)?;

    ensure_out(&args.out)?;
    let path = args
        .out
        .join(format!("chart_{}_{}.svg", file_token(&args.from), file_token(&args.to)));
    fs::write(&path, &svg)?;
    RunManifest::new("export-chart", &args.out)
        .dataset(Some(&args.data.dataset))
        .years(Some(args.data.years.clone()))
        .concordance(args.concordance.as_deref())
        .param("from", &args.from)
        .param("to", &args.to)
        .param("prices", args.prices.as_ref().map(|p| p.display().to_string()).unwrap_or_default())
        .param("title", &title)
        .write(&args.out)?;

    if json_mode {
        println!("{}", json!({ "chart": path.display().to_string() }));
    } else {
        println!("chart: {}", path.display());
    }
    Ok(())
}
