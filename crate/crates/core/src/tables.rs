//! Loading and validation of the coefficient table (`params.csv`) and the
//! base-rate table (`rates.csv`).
//!
//! Both files are plain CSV with `#` comment lines. Comment lines of the form
//! `# unit: <column>=<token>` declare units and are mandatory; any other
//! comment line is kept verbatim as provenance and written back on
//! serialization.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{EmissionVector, EnergyUnit, OpMode, RateTable, RateUnits, SourceType, Species, VehicleParams};

pub const PARAMS_FILE: &str = "params.csv";
pub const RATES_FILE: &str = "rates.csv";

const SHIPPED_PARAMS: &str = include_str!("../data/params.csv");
const SHIPPED_RATES: &str = include_str!("../data/rates.csv");

const PARAMS_COLUMNS: [&str; 6] = ["source_type", "A", "B", "C", "M", "f"];
const RATES_COLUMNS: [&str; 7] = ["source_type", "opmode", "energy", "CO", "HC", "NOx", "CO2"];

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("{file}: schema error: {message}")]
    Schema { file: String, message: String },
    #[error("{file}: unit error: {message}")]
    Unit { file: String, message: String },
    #[error("incomplete rate table, missing {}", format_missing(.missing))]
    Incomplete { missing: Vec<(SourceType, OpMode)> },
    #[error("invalid tables: {}", format_report(.0))]
    Invalid(Vec<Violation>),
}

fn format_missing(missing: &[(SourceType, OpMode)]) -> String {
    missing.iter().map(|(s, m)| format!("({s}, {m})")).collect::<Vec<_>>().join(", ")
}

fn format_report(report: &[Violation]) -> String {
    report.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// A single broken table invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    InvalidParam { source_type: SourceType, field: &'static str, value: f64 },
    DuplicateParams(SourceType),
    MissingParams(SourceType),
    InvalidRate { source_type: SourceType, opmode: OpMode, species: Species, value: f64 },
    DuplicateRate { source_type: SourceType, opmode: OpMode },
    MissingRate { source_type: SourceType, opmode: OpMode },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidParam { source_type, field, value } => {
                write!(f, "{source_type} {field}={value} violates its bound")
            }
            Violation::DuplicateParams(s) => write!(f, "duplicate params row for {s}"),
            Violation::MissingParams(s) => write!(f, "no params row for {s}"),
            Violation::InvalidRate { source_type, opmode, species, value } => {
                write!(f, "rate ({source_type}, {opmode}, {species}) = {value} is negative or non-finite")
            }
            Violation::DuplicateRate { source_type, opmode } => {
                write!(f, "duplicate rate row for ({source_type}, {opmode})")
            }
            Violation::MissingRate { source_type, opmode } => {
                write!(f, "missing rate row for ({source_type}, {opmode})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub source_type: SourceType,
    pub opmode: OpMode,
    pub rates: EmissionVector,
}

/// Table rows as read from disk, before any invariant is enforced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawTables {
    pub params: Vec<VehicleParams>,
    pub rates: Vec<RateRow>,
    pub units: RateUnits,
    pub params_provenance: Vec<String>,
    pub rates_provenance: Vec<String>,
}

/// Lists every violated table invariant, in a stable order. Empty means valid.
pub fn validate_table_set(raw: &RawTables) -> Vec<Violation> {
    let mut report = Vec::new();

    let mut seen = BTreeSet::new();
    for p in &raw.params {
        for (field, value) in p.violations() {
            report.push(Violation::InvalidParam { source_type: p.source_type, field, value });
        }
        if !seen.insert(p.source_type) {
            report.push(Violation::DuplicateParams(p.source_type));
        }
    }
    for s in SourceType::ALL {
        if !seen.contains(&s) {
            report.push(Violation::MissingParams(s));
        }
    }

    let mut seen = BTreeSet::new();
    for row in &raw.rates {
        for species in Species::ALL {
            let value = row.rates.get(species);
            if !(value >= 0.0 && value.is_finite()) {
                report.push(Violation::InvalidRate {
                    source_type: row.source_type,
                    opmode: row.opmode,
                    species,
                    value,
                });
            }
        }
        if !seen.insert((row.source_type, row.opmode)) {
            report.push(Violation::DuplicateRate { source_type: row.source_type, opmode: row.opmode });
        }
    }
    for s in SourceType::ALL {
        for m in OpMode::ALL {
            if !seen.contains(&(s, m)) {
                report.push(Violation::MissingRate { source_type: s, opmode: m });
            }
        }
    }
    report
}

/// Validated coefficients and base rates for every supported source type.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSet {
    params: BTreeMap<SourceType, VehicleParams>,
    rates: RateTable,
    params_provenance: Vec<String>,
    rates_provenance: Vec<String>,
}

impl TableSet {
    /// The tables compiled into the crate from `data/`.
    pub fn shipped() -> TableSet {
        parse_table_set(SHIPPED_PARAMS, SHIPPED_RATES).expect("shipped tables are valid")
    }

    pub fn from_raw(raw: RawTables) -> Result<TableSet, TableError> {
        let report = validate_table_set(&raw);
        let missing: Vec<_> = report
            .iter()
            .filter_map(|v| match v {
                Violation::MissingRate { source_type, opmode } => Some((*source_type, *opmode)),
                _ => None,
            })
            .collect();
        if !missing.is_empty() {
            return Err(TableError::Incomplete { missing });
        }
        if !report.is_empty() {
            return Err(TableError::Invalid(report));
        }
        Ok(TableSet {
            params: raw.params.iter().map(|p| (p.source_type, *p)).collect(),
            rates: RateTable::from_entries(raw.rates.iter().map(|r| ((r.source_type, r.opmode), r.rates)), raw.units),
            params_provenance: raw.params_provenance,
            rates_provenance: raw.rates_provenance,
        })
    }

    pub fn to_raw(&self) -> RawTables {
        RawTables {
            params: self.params.values().copied().collect(),
            rates: self
                .rates
                .iter()
                .map(|(&(source_type, opmode), &rates)| RateRow { source_type, opmode, rates })
                .collect(),
            units: self.rates.units(),
            params_provenance: self.params_provenance.clone(),
            rates_provenance: self.rates_provenance.clone(),
        }
    }

    pub fn params(&self, source_type: SourceType) -> &VehicleParams {
        &self.params[&source_type]
    }

    pub fn rates(&self) -> &RateTable {
        &self.rates
    }

    pub fn units(&self) -> RateUnits {
        self.rates.units()
    }

    /// Free-text header lines of both files, params first.
    pub fn provenance(&self) -> impl Iterator<Item = &str> {
        self.params_provenance.iter().chain(&self.rates_provenance).map(String::as_str)
    }

    /// Same structure with every base rate multiplied by `factor`.
    pub fn with_scaled_rates(&self, factor: f64) -> TableSet {
        TableSet { rates: self.rates.scaled(factor), ..self.clone() }
    }

    pub fn params_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.params_provenance {
            writeln!(out, "# {line}").unwrap();
        }
        out.push_str("# unit: speed=m/s\n# unit: M=metric_ton\n# unit: f=metric_ton\n");
        out.push_str(&PARAMS_COLUMNS.join(","));
        out.push('\n');
        for p in self.params.values() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                p.source_type, p.rolling, p.rotating, p.drag, p.mass, p.fixed_mass_factor
            )
            .unwrap();
        }
        out
    }

    pub fn rates_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.rates_provenance {
            writeln!(out, "# {line}").unwrap();
        }
        let energy = self.rates.units().energy.rate_token();
        writeln!(out, "# unit: energy={energy}").unwrap();
        for s in &Species::ALL[1..] {
            writeln!(out, "# unit: {s}=g/h").unwrap();
        }
        out.push_str(&RATES_COLUMNS.join(","));
        out.push('\n');
        for (&(s, m), r) in self.rates.iter() {
            writeln!(out, "{s},{m},{},{},{},{},{}", r.energy, r.co, r.hc, r.nox, r.co2).unwrap();
        }
        out
    }
}

/// Reads and validates both table files.
pub fn load_table_set(params_path: &Path, rates_path: &Path) -> Result<TableSet, TableError> {
    TableSet::from_raw(read_raw_tables(params_path, rates_path)?)
}

/// Loads `params.csv` and `rates.csv` from one directory.
pub fn load_table_dir(dir: &Path) -> Result<TableSet, TableError> {
    load_table_set(&dir.join(PARAMS_FILE), &dir.join(RATES_FILE))
}

pub fn read_raw_tables(params_path: &Path, rates_path: &Path) -> Result<RawTables, TableError> {
    let read = |path: &Path| {
        std::fs::read_to_string(path).map_err(|source| TableError::Io { path: path.to_path_buf(), source })
    };
    let params_text = read(params_path)?;
    let rates_text = read(rates_path)?;
    parse_raw_tables(&params_text, &params_path.display().to_string(), &rates_text, &rates_path.display().to_string())
}

/// Parses and validates table text already in memory.
pub fn parse_table_set(params_text: &str, rates_text: &str) -> Result<TableSet, TableError> {
    TableSet::from_raw(parse_raw_tables(params_text, PARAMS_FILE, rates_text, RATES_FILE)?)
}

pub fn parse_raw_tables(
    params_text: &str,
    params_name: &str,
    rates_text: &str,
    rates_name: &str,
) -> Result<RawTables, TableError> {
    let (params, params_provenance) = parse_params(params_text, params_name)?;
    let (rates, units, rates_provenance) = parse_rates(rates_text, rates_name)?;
    Ok(RawTables { params, rates, units, params_provenance, rates_provenance })
}

/// The closed set of unit tokens a table may declare.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum UnitToken {
    GramsPerHour,
    KiloJoulesPerHour,
    Mph,
    MetersPerSecond,
    MetricTon,
}

impl UnitToken {
    fn parse(token: &str) -> Option<UnitToken> {
        Some(match token {
            "g/h" => UnitToken::GramsPerHour,
            "kJ/h" => UnitToken::KiloJoulesPerHour,
            "mph" => UnitToken::Mph,
            "m/s" => UnitToken::MetersPerSecond,
            "metric_ton" => UnitToken::MetricTon,
            _ => return None,
        })
    }
}

/// Comment lines, unit declarations, header and data rows of one file.
struct CsvText<'a> {
    file: &'a str,
    provenance: Vec<String>,
    units: BTreeMap<String, (usize, UnitToken)>,
    header: Vec<&'a str>,
    rows: Vec<(usize, Vec<&'a str>)>,
}

impl<'a> CsvText<'a> {
    fn parse(text: &'a str, file: &'a str, columns: &[&str]) -> Result<Self, TableError> {
        let mut provenance = Vec::new();
        let mut units = BTreeMap::new();
        let mut header: Option<Vec<&str>> = None;
        let mut rows = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(decl) = comment.strip_prefix("unit:") {
                    let (col, token) = decl.split_once('=').ok_or_else(|| TableError::Unit {
                        file: file.to_string(),
                        message: format!("line {line_no}: malformed unit declaration {decl:?}"),
                    })?;
                    let token = token.trim();
                    let unit = UnitToken::parse(token).ok_or_else(|| TableError::Unit {
                        file: file.to_string(),
                        message: format!("line {line_no}: unknown unit token {token:?}"),
                    })?;
                    units.insert(col.trim().to_string(), (line_no, unit));
                } else {
                    provenance.push(comment.to_string());
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            match header {
                None => header = Some(fields),
                Some(_) => rows.push((line_no, fields)),
            }
        }
        let header = header
            .ok_or_else(|| TableError::Schema { file: file.to_string(), message: "missing header row".into() })?;
        let missing: Vec<_> = columns.iter().filter(|c| !header.contains(c)).collect();
        if !missing.is_empty() {
            return Err(TableError::Schema {
                file: file.to_string(),
                message: format!("missing column(s) {missing:?}"),
            });
        }
        if let Some(extra) = header.iter().find(|h| !columns.contains(h)) {
            return Err(TableError::Schema { file: file.to_string(), message: format!("unexpected column {extra:?}") });
        }
        let mut seen = BTreeSet::new();
        if let Some(dup) = header.iter().find(|h| !seen.insert(**h)) {
            return Err(TableError::Schema { file: file.to_string(), message: format!("duplicate column {dup:?}") });
        }
        for col in units.keys() {
            if !columns.contains(&col.as_str()) && col != "speed" {
                return Err(TableError::Schema {
                    file: file.to_string(),
                    message: format!("unit declared for unknown column {col:?}"),
                });
            }
        }
        if let Some((line, fields)) = rows.iter().find(|(_, f)| f.len() != header.len()) {
            return Err(TableError::Parse {
                file: file.to_string(),
                line: *line,
                message: format!("expected {} fields, found {}", header.len(), fields.len()),
            });
        }
        Ok(CsvText { file, provenance, units, header, rows })
    }

    fn column(&self, name: &str) -> usize {
        self.header.iter().position(|h| *h == name).expect("columns checked on parse")
    }

    fn require_unit(&self, column: &str, allowed: &[UnitToken]) -> Result<UnitToken, TableError> {
        match self.units.get(column) {
            None => Err(TableError::Unit {
                file: self.file.to_string(),
                message: format!("no unit declared for {column:?}"),
            }),
            Some((line, unit)) if !allowed.contains(unit) => Err(TableError::Unit {
                file: self.file.to_string(),
                message: format!("line {line}: unit {unit:?} not accepted for {column:?}"),
            }),
            Some((_, unit)) => Ok(*unit),
        }
    }

    fn number(&self, line: usize, field: &str, column: &str) -> Result<f64, TableError> {
        field.parse::<f64>().map_err(|_| TableError::Parse {
            file: self.file.to_string(),
            line,
            message: format!("column {column}: {field:?} is not a number"),
        })
    }

    fn source_type(&self, line: usize, field: &str) -> Result<SourceType, TableError> {
        match field {
            "LDV" => Ok(SourceType::LightDutyVehicle),
            "LDT" => Ok(SourceType::LightDutyTruck),
            _ => Err(TableError::Parse {
                file: self.file.to_string(),
                line,
                message: format!("unknown source type {field:?}"),
            }),
        }
    }
}

fn parse_params(text: &str, file: &str) -> Result<(Vec<VehicleParams>, Vec<String>), TableError> {
    let csv = CsvText::parse(text, file, &PARAMS_COLUMNS)?;
    csv.require_unit("speed", &[UnitToken::MetersPerSecond])?;
    csv.require_unit("M", &[UnitToken::MetricTon])?;
    csv.require_unit("f", &[UnitToken::MetricTon])?;
    let idx: Vec<usize> = PARAMS_COLUMNS.iter().map(|c| csv.column(c)).collect();
    let mut params = Vec::with_capacity(csv.rows.len());
    for (line, fields) in &csv.rows {
        let num = |k: usize| csv.number(*line, fields[idx[k]], PARAMS_COLUMNS[k]);
        params.push(VehicleParams {
            source_type: csv.source_type(*line, fields[idx[0]])?,
            rolling: num(1)?,
            rotating: num(2)?,
            drag: num(3)?,
            mass: num(4)?,
            fixed_mass_factor: num(5)?,
        });
    }
    Ok((params, csv.provenance))
}

fn parse_rates(text: &str, file: &str) -> Result<(Vec<RateRow>, RateUnits, Vec<String>), TableError> {
    let csv = CsvText::parse(text, file, &RATES_COLUMNS)?;
    let energy = match csv.require_unit("energy", &[UnitToken::KiloJoulesPerHour, UnitToken::GramsPerHour])? {
        UnitToken::GramsPerHour => EnergyUnit::FuelGrams,
        _ => EnergyUnit::KiloJoules,
    };
    for s in &Species::ALL[1..] {
        csv.require_unit(s.column(), &[UnitToken::GramsPerHour])?;
    }
    let st_idx = csv.column("source_type");
    let mode_idx = csv.column("opmode");
    let species_idx: Vec<usize> = Species::ALL.iter().map(|s| csv.column(s.column())).collect();
    let mut rows = Vec::with_capacity(csv.rows.len());
    for (line, fields) in &csv.rows {
        let source_type = csv.source_type(*line, fields[st_idx])?;
        let mode_field = fields[mode_idx];
        let opmode = mode_field.parse::<u8>().ok().and_then(OpMode::new).ok_or_else(|| TableError::Parse {
            file: csv.file.to_string(),
            line: *line,
            message: format!("invalid operating mode {mode_field:?}"),
        })?;
        let mut rates = EmissionVector::ZERO;
        for (species, &i) in Species::ALL.iter().zip(&species_idx) {
            rates.set(*species, csv.number(*line, fields[i], species.column())?);
        }
        rows.push(RateRow { source_type, opmode, rates });
    }
    Ok((rows, RateUnits { energy }, csv.provenance))
}
