use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use pvt_core::electrical::{curve_family, electrical_efficiency, mpp_sweep};
use pvt_core::engine::{
    format_significant, hourly_records, overall_efficiency, read_trace, rms_deviation,
    step_size_study, thermal_efficiency, write_records_csv,
};
use pvt_core::params::{load_collector_config, load_datasheet, load_weather_csv};
use pvt_core::thermal::derive_coefficients;
use pvt_core::{
    run_simulation, CircuitVariant, CollectorDesign, DatasheetSpec, ElectricalMode, Execution,
    LossModel, ReferenceParams, SimulationOptions, SimulationRecord, WeatherSeries,
};

/// PV/T collector simulator.
#[derive(Parser)]
#[command(name = "pvt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a transient simulation over a weather file.
    Simulate(SimulateArgs),
    /// Print the derived collector coefficients as JSON.
    Coeffs(CoeffsArgs),
    /// Print the reference diode constants extracted from a datasheet.
    Extract(ExtractArgs),
    /// Write a family of I-V curves as long-format CSV.
    IvCurve(IvCurveArgs),
    /// Maximum power points over a temperature/irradiance grid.
    Mpp(MppArgs),
    /// RMS percentage deviation between a simulated and a measured trace.
    Validate(ValidateArgs),
    /// Repeat a simulation at several step sizes.
    Study(StudyArgs),
}

#[derive(Args)]
struct LossFlags {
    /// Disable the radiative correction of the top loss.
    #[arg(long)]
    no_rad: bool,
    /// Disable the edge loss term.
    #[arg(long)]
    no_edge: bool,
}

#[derive(Args)]
struct RunInputs {
    #[arg(long)]
    design: PathBuf,
    #[arg(long)]
    datasheet: PathBuf,
    #[arg(long)]
    weather: PathBuf,
    #[command(flatten)]
    loss: LossFlags,
    /// Feed the MPP efficiency back into the next step's energy balance.
    #[arg(long)]
    couple: bool,
    /// Treat negative useful gain as the pump being off.
    #[arg(long)]
    clamp: bool,
    #[arg(long, default_value = "series_shunt")]
    variant: CircuitVariant,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    inputs: RunInputs,
    /// Time step, s.
    #[arg(long, default_value_t = 60.0, value_parser = positive)]
    step: f64,
    /// Result CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CoeffsArgs {
    #[arg(long)]
    design: PathBuf,
    /// Cell temperature for the radiative term, °C.
    #[arg(long, default_value_t = 45.0)]
    t_c: f64,
    /// Ambient temperature, °C.
    #[arg(long, default_value_t = 30.0)]
    t_a: f64,
    #[command(flatten)]
    loss: LossFlags,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    datasheet: PathBuf,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    datasheet: PathBuf,
    /// Cell temperatures, °C.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    temps: Vec<f64>,
    /// Irradiances, W/m².
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    irr: Vec<f64>,
    #[arg(long, default_value = "series_shunt")]
    variant: CircuitVariant,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct IvCurveArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Points per curve.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(2..))]
    points: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MppArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Module area for the efficiency column, m².
    #[arg(long, value_parser = positive)]
    area: Option<f64>,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Simulated trace CSV.
    #[arg(long)]
    sim: PathBuf,
    /// Measured trace CSV.
    #[arg(long)]
    exp: PathBuf,
    /// Column compared in both files.
    #[arg(long)]
    column: String,
    /// Largest time offset accepted when pairing samples, s.
    #[arg(long, default_value_t = 30.0, value_parser = non_negative)]
    max_gap: f64,
}

#[derive(Args)]
struct StudyArgs {
    #[command(flatten)]
    inputs: RunInputs,
    /// Step sizes, s.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1.., value_parser = positive)]
    steps: Vec<f64>,
    #[arg(long)]
    sequential: bool,
    /// Long-format CSV with one block per step size.
    #[arg(long)]
    out: PathBuf,
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be > 0, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn non_negative(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be >= 0, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("cannot open {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn design(path: &Path) -> Result<CollectorDesign> {
    load_collector_config(open(path)?).with_context(|| format!("{}", path.display()))
}

fn datasheet(path: &Path) -> Result<DatasheetSpec> {
    load_datasheet(open(path)?).with_context(|| format!("{}", path.display()))
}

fn weather(path: &Path) -> Result<WeatherSeries> {
    load_weather_csv(open(path)?).with_context(|| format!("{}", path.display()))
}

fn loss_model(flags: &LossFlags) -> LossModel {
    LossModel { radiative_correction: !flags.no_rad, edge_loss: !flags.no_edge }
}

fn options(inputs: &RunInputs, step: f64) -> SimulationOptions {
    SimulationOptions {
        step,
        radiative_correction: !inputs.loss.no_rad,
        edge_loss: !inputs.loss.no_edge,
        electrical: if inputs.couple { ElectricalMode::Feedback } else { ElectricalMode::PostProcess },
        clamp_negative_qu: inputs.clamp,
        variant: inputs.variant,
    }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn print_json(value: Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let d = design(&args.inputs.design)?;
    let ds = datasheet(&args.inputs.datasheet)?;
    let w = weather(&args.inputs.weather)?;
    let opts = options(&args.inputs, args.step);
    let records = run_simulation(&d, &ds, &w, &opts)?;

    let mut out = create(&args.out)?;
    write_records_csv(&records, &mut out)?;
    out.flush()?;

    let eta_th = thermal_efficiency(&records, &d).ok();
    let eta_e = final_hour_efficiency(&records);
    let eta_o = match (eta_th, eta_e) {
        (Some(th), Some(e)) => overall_efficiency(th, e).ok(),
        _ => None,
    };
    let last = records.last().expect("simulation returns at least one record");
    print_json(json!({
        "eta_th": eta_th,
        "eta_e": eta_e,
        "eta_o": eta_o,
        "final_T_w": last.t_w,
        "records": records.len(),
        "options": opts,
    }))
}

/// Electrical efficiency at the last whole hour with daylight.
fn final_hour_efficiency(records: &[SimulationRecord]) -> Option<f64> {
    hourly_records(records)
        .iter()
        .rev()
        .find_map(|r| r.electrical.and_then(|e| e.eta_e))
}

fn coeffs(args: CoeffsArgs) -> Result<()> {
    let d = design(&args.design)?;
    let c = derive_coefficients(&d, loss_model(&args.loss), args.t_c, args.t_a)?;
    print_json(json!(c))
}

fn extract(args: ExtractArgs) -> Result<()> {
    let ds = datasheet(&args.datasheet)?;
    print_json(json!(ReferenceParams::extract(&ds)?))
}

fn conditions(grid: &GridArgs) -> Vec<(f64, f64)> {
    grid.temps
        .iter()
        .flat_map(|&t| grid.irr.iter().map(move |&g| (t, g)))
        .collect()
}

fn num(x: f64) -> String {
    format_significant(x, 8)
}

fn iv_curve(args: IvCurveArgs) -> Result<()> {
    let ds = datasheet(&args.grid.datasheet)?;
    let reference = ReferenceParams::extract(&ds)?;
    let curves = curve_family(
        &ds,
        &reference,
        args.grid.variant,
        &conditions(&args.grid),
        args.points as usize,
        execution(args.grid.sequential),
    )?;
    let mut out = create(&args.out)?;
    writeln!(out, "T_c,G,V,I,P")?;
    for c in &curves {
        for p in &c.points {
            writeln!(out, "{},{},{},{},{}", num(c.t_c), num(c.g), num(p.v), num(p.i), num(p.p))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn mpp(args: MppArgs) -> Result<()> {
    let ds = datasheet(&args.grid.datasheet)?;
    let reference = ReferenceParams::extract(&ds)?;
    let conds = conditions(&args.grid);
    let points = mpp_sweep(&ds, &reference, args.grid.variant, &conds, execution(args.grid.sequential))?;
    let mut text = String::from("T_c,G,V_mp,I_mp,P_mp,eta_e\n");
    for (&(t_c, g), p) in conds.iter().zip(&points) {
        let eta = args
            .area
            .and_then(|a| electrical_efficiency(p, a, g).ok())
            .map(num)
            .unwrap_or_default();
        text += &format!("{},{},{},{},{},{}\n", num(t_c), num(g), num(p.v), num(p.i), num(p.p), eta);
    }
    match &args.out {
        Some(path) => {
            let mut out = create(path)?;
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<()> {
    let sim = read_trace(open(&args.sim)?, &args.column)
        .with_context(|| format!("{}", args.sim.display()))?;
    let exp = read_trace(open(&args.exp)?, &args.column)
        .with_context(|| format!("{}", args.exp.display()))?;
    let report = rms_deviation(&sim, &exp, args.max_gap)?;
    print_json(json!({
        "column": args.column,
        "rms_percent": report.rms_percent,
        "n": report.n,
        "pairs": report.pairs,
    }))
}

fn study(args: StudyArgs) -> Result<()> {
    let d = design(&args.inputs.design)?;
    let ds = datasheet(&args.inputs.datasheet)?;
    let w = weather(&args.inputs.weather)?;
    let opts = options(&args.inputs, args.steps[0]);
    let runs = step_size_study(&d, &ds, &w, &args.steps, &opts, execution(args.sequential))?;

    let mut out = create(&args.out)?;
    writeln!(out, "step,t,G,T_a,T_w,T_bs,T_c,Q_u")?;
    let mut summary = Vec::new();
    for (step, records) in &runs {
        for r in records {
            let row = [*step, r.t, r.g, r.t_a, r.t_w, r.t_bs, r.t_c, r.q_u].map(|v| format_significant(v, 6));
            writeln!(out, "{}", row.join(","))?;
        }
        let last = records.last().expect("simulation returns at least one record");
        summary.push(json!({
            "step": step,
            "records": records.len(),
            "final_T_w": last.t_w,
            "eta_th": thermal_efficiency(records, &d).ok(),
        }));
    }
    out.flush()?;
    print_json(Value::Array(summary))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Coeffs(a) => coeffs(a),
        Command::Extract(a) => extract(a),
        Command::IvCurve(a) => iv_curve(a),
        Command::Mpp(a) => mpp(a),
        Command::Validate(a) => validate(a),
        Command::Study(a) => study(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
