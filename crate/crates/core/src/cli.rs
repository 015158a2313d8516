//! Command-line front end. Exit codes: 0 success, 1 input error (arguments,
//! cycle files, scenarios), 2 table error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::corridor::{compare_scenarios, ScenarioError, SignalScenario};
use crate::cycle_io::{parse_trace, resample_to_1hz, write_cycle_csv, TraceError};
use crate::model::{aggregate_cycle, CycleResult, EmissionFactors, ModelError, SourceType, Species, SpeedUnit};
use crate::tables::{
    load_table_dir, read_raw_tables, validate_table_set, TableError, TableSet, PARAMS_FILE, RATES_FILE,
};

/// Environment variable naming the default table directory.
pub const TABLES_ENV: &str = "MOVESTAR_TABLES";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_TABLES: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "movestar", version, about = "Fuel and emission estimates from 1 Hz speed traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct CycleArgs {
    /// Speed trace: `t,v` CSV or one speed per line
    #[arg(long)]
    cycle: PathBuf,
    /// Unit of the speeds in the trace
    #[arg(long, default_value = "m/s")]
    unit: SpeedUnit,
    /// Vehicle type: 1 = light-duty vehicle, 2 = light-duty truck
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..=2))]
    veh: i64,
    /// Directory holding params.csv and rates.csv (default: $MOVESTAR_TABLES, then the built-in tables)
    #[arg(long)]
    tables: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write <prefix>_ER.csv and <prefix>_EF.csv for a speed trace
    Run {
        #[command(flatten)]
        cycle: CycleArgs,
        /// Output prefix (default: the cycle path without extension)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print per-km emission factors to stdout
    Factors {
        #[command(flatten)]
        cycle: CycleArgs,
    },
    /// Check a table directory against the schemas and invariants
    ValidateTables {
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// Resample a sub-second `t,v` trace to 1 Hz
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "m/s")]
        unit: SpeedUnit,
    },
    /// Compare a stop-and-go approach with a glide through one signal
    Demo {
        /// Approach distance to the stop bar, m
        #[arg(long)]
        distance: f64,
        /// Cruise speed, m/s
        #[arg(long)]
        cruise: f64,
        /// Green time, s
        #[arg(long)]
        green: f64,
        /// Red time, s
        #[arg(long)]
        red: f64,
        /// Signal cycle position at t = 0, s
        #[arg(long)]
        offset: f64,
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..=2))]
        veh: i64,
        #[arg(long)]
        tables: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Tables(#[from] TableError),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Tables(_) => EXIT_TABLES,
        }
    }
}

impl From<TraceError> for CliError {
    fn from(e: TraceError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Run { cycle, out: prefix } => {
            let (tables, source_type, result) = evaluate(&cycle)?;
            let prefix = prefix.unwrap_or_else(|| cycle.cycle.with_extension(""));
            let er_path = suffixed(&prefix, "_ER.csv");
            let ef_path = suffixed(&prefix, "_EF.csv");
            write_file(&er_path, &er_csv(&result, &tables, source_type))?;
            write_file(&ef_path, &ef_csv(&result, &tables, source_type))?;
            emit(out, &format!("{}\n", summary_line(&result, source_type)))
        }
        Command::Factors { cycle } => {
            let (tables, source_type, result) = evaluate(&cycle)?;
            match result.factors {
                EmissionFactors::Undefined => emit(out, "EF: undefined (zero distance)\n"),
                EmissionFactors::PerKm(_) => emit(out, &ef_csv(&result, &tables, source_type)),
            }
        }
        Command::ValidateTables { tables } => {
            let dir = tables.or_else(env_tables).ok_or_else(|| {
                CliError::Input(format!("no table directory given (use --tables or set {TABLES_ENV})"))
            })?;
            let raw = read_raw_tables(&dir.join(PARAMS_FILE), &dir.join(RATES_FILE))?;
            let report = validate_table_set(&raw);
            if report.is_empty() {
                emit(out, &format!("ok: {} param rows, {} rate entries\n", raw.params.len(), raw.rates.len()))
            } else {
                let mut text = String::new();
                for v in &report {
                    writeln!(text, "violation: {v}").unwrap();
                }
                emit(out, &text)?;
                Err(TableSet::from_raw(raw).expect_err("non-empty report").into())
            }
        }
        Command::Convert { input, out: output, unit } => {
            let raw = parse_trace(&input, unit)?;
            let cycle = resample_to_1hz(&raw)?;
            write_file(&output, &write_cycle_csv(&cycle))?;
            emit(out, &format!("{} samples -> {} seconds\n", raw.samples.len(), cycle.len()))
        }
        Command::Demo { distance, cruise, green, red, offset, veh, tables } => {
            let tables = resolve_tables(tables)?;
            let sc = SignalScenario {
                approach_distance: distance,
                cruise_speed: cruise,
                green,
                red,
                offset,
                vehicle: vehicle(veh),
            };
            let report = compare_scenarios(&sc, &tables)?;
            emit(out, &report.to_csv())
        }
    }
}

fn env_tables() -> Option<PathBuf> {
    std::env::var_os(TABLES_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn resolve_tables(flag: Option<PathBuf>) -> Result<TableSet, CliError> {
    match flag.or_else(env_tables) {
        Some(dir) => Ok(load_table_dir(&dir)?),
        None => Ok(TableSet::shipped()),
    }
}

fn vehicle(veh: i64) -> SourceType {
    SourceType::from_veh_type(veh).expect("clap restricts --veh to 1..=2")
}

fn evaluate(args: &CycleArgs) -> Result<(TableSet, SourceType, CycleResult), CliError> {
    let tables = resolve_tables(args.tables.clone())?;
    let source_type = vehicle(args.veh);
    let raw = parse_trace(&args.cycle, args.unit)?;
    if raw.is_empty() {
        return Err(ModelError::EmptyCycle.into());
    }
    let cycle = resample_to_1hz(&raw)?;
    let result = aggregate_cycle(&cycle, tables.params(source_type), tables.rates())?;
    Ok((tables, source_type, result))
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::Input(format!("cannot write output: {e}")))
}

fn header_comments(out: &mut String, tables: &TableSet, source_type: SourceType) {
    writeln!(out, "# vehicle: {source_type}").unwrap();
    for line in tables.provenance() {
        writeln!(out, "# {line}").unwrap();
    }
}

/// Per-second rows then a `TOTAL` row. Fixed 9-decimal formatting.
pub fn er_csv(result: &CycleResult, tables: &TableSet, source_type: SourceType) -> String {
    let units = result.units;
    let mut out = String::new();
    header_comments(&mut out, tables, source_type);
    let unit_list: Vec<String> = Species::ALL.iter().map(|s| format!("{s}={}", units.amount(*s))).collect();
    writeln!(out, "# units: t=s, {} (amount per second; TOTAL is the cycle sum)", unit_list.join(", ")).unwrap();
    out.push_str("t,opmode,energy,CO,HC,NOx,CO2\n");
    for r in &result.per_second {
        let e = r.emissions;
        writeln!(out, "{},{},{:.9},{:.9},{:.9},{:.9},{:.9}", r.t, r.opmode, e.energy, e.co, e.hc, e.nox, e.co2)
            .unwrap();
    }
    let t = result.totals;
    writeln!(out, "TOTAL,,{:.9},{:.9},{:.9},{:.9},{:.9}", t.energy, t.co, t.hc, t.nox, t.co2).unwrap();
    out
}

/// One row per species plus `distance_km`. Values read `undefined` when the
/// cycle covered no distance.
pub fn ef_csv(result: &CycleResult, tables: &TableSet, source_type: SourceType) -> String {
    let units = result.units;
    let mut out = String::new();
    header_comments(&mut out, tables, source_type);
    if result.factors == EmissionFactors::Undefined {
        out.push_str("# EF: undefined (zero distance)\n");
    }
    out.push_str("species,value,unit_per_km\n");
    for s in Species::ALL {
        let value = match result.factors.per_km() {
            Some(f) => format!("{:.9}", f.get(s)),
            None => "undefined".to_string(),
        };
        writeln!(out, "{s},{value},{}/km", units.amount(s)).unwrap();
    }
    writeln!(out, "distance_km,{:.9},km", result.distance_km()).unwrap();
    out
}

fn summary_line(result: &CycleResult, source_type: SourceType) -> String {
    let units = result.units;
    let mut line = format!(
        "{source_type}: {} s, {:.3} km, energy {:.3} {}, CO {:.3} g, HC {:.3} g, NOx {:.3} g, CO2 {:.3} g",
        result.per_second.len(),
        result.distance_km(),
        result.totals.energy,
        units.energy.amount(),
        result.totals.co,
        result.totals.hc,
        result.totals.nox,
        result.totals.co2,
    );
    match result.factors.per_km() {
        Some(f) => write!(line, "; EF CO2 {:.3} g/km", f.co2).unwrap(),
        None => line.push_str("; EF: undefined (zero distance)"),
    }
    line
}
