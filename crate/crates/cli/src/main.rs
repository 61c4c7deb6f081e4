mod args;
mod plot;

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::{BoundaryArgs, Cli, Command, ExactArgs, OutFormat, ScanArgs, SharedArgs, ValidateArgs, WitnessArgs};
use thermowitness::exactdiag::{concurrence, reduced_pair_state};
use thermowitness::io::{boundary_csv, boundary_json, region_csv, region_json, BoundaryEndpoints, Metadata};
use thermowitness::thermolimit::{
    boundary_trace, lowtemp_ferro_witness, region_scan, xx_witness, zero_field_critical_temperature,
    zero_temperature_critical_field, Axis, GridAxes, LowTempExponent, MagnetizationFormula, TraceConfig, XxOptions,
};
use thermowitness::validation::{run_suite, ValidationConfig};
use thermowitness::witness::{finite_witness, witness_value};
use thermowitness::{validate_spec, Error, WitnessReport};

const WORKERS_ENV: &str = "THERMOWITNESS_WORKERS";

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
    Validation,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Validation => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::QuadratureNonConvergence { .. }
            | Error::StepUnderflow(_)
            | Error::NotPositiveSemidefinite(_)
            | Error::Domain(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Numerical(msg) => eprintln!("numerical failure: {msg}"),
                Failure::Validation => eprintln!("validation suite failed"),
            }
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    configure_workers()?;
    let shared = cli.shared.merged().map_err(Failure::Usage)?;
    match cli.command {
        Command::Witness(a) => witness(&shared, &a),
        Command::Scan(a) => scan(&shared, &a),
        Command::Boundary(a) => boundary(&shared, &a),
        Command::Exact(a) => exact(&shared, &a),
        Command::Validate(a) => validate(&shared, &a),
    }
}

fn configure_workers() -> Outcome {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("{WORKERS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.to_string()))
}

fn emit(text: &str, path: Option<&Path>) -> Outcome {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON value serializes");
    s.push('\n');
    s
}

fn required(value: Option<f64>, flag: &str) -> Result<f64, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("{flag} is required")))
}

fn xx_options(as_printed: bool) -> XxOptions {
    XxOptions {
        magnetization: if as_printed { MagnetizationFormula::AsPrinted } else { MagnetizationFormula::default() },
        ..XxOptions::default()
    }
}

fn report_text(report: &WitnessReport, format: OutFormat) -> String {
    match format {
        OutFormat::Json => pretty(&json!(report)),
        OutFormat::Csv => {
            let src = serde_json::to_value(report.source).expect("source serializes");
            format!("W,threshold,entangled,source\n{},{},{},{}\n", report.value, report.threshold, report.entangled, src.as_str().unwrap_or(""))
        }
    }
}

fn witness(shared: &SharedArgs, a: &WitnessArgs) -> Outcome {
    let report = if a.measured {
        let u = required(a.u, "--u")?;
        let m = required(a.m, "--m")?;
        let n = shared.n.ok_or_else(|| Failure::Usage("--n is required with --measured".into()))?;
        witness_value(u, m, shared.field(), shared.coupling(), n)?
    } else if a.lowtemp {
        let kt = required(shared.kt, "--kt")?;
        let n = shared.n.ok_or_else(|| Failure::Usage("--n is required with --lowtemp".into()))?;
        lowtemp_ferro_witness(n, kt, shared.field(), shared.coupling(), LowTempExponent::default())?
    } else if shared.n.is_none() {
        if !matches!(shared.model, Some(args::ModelArg::Xx)) {
            return Err(Failure::Usage("the thermodynamic limit (no --n) is available for --model xx only".into()));
        }
        let kt = required(shared.kt, "--kt")?;
        xx_witness(kt, shared.field(), shared.coupling(), &XxOptions::default())?
    } else {
        let kt = required(shared.kt, "--kt")?;
        let spec = validate_spec(shared.model_spec().map_err(Failure::Usage)?)?;
        finite_witness(&spec, kt)?.0
    };
    emit(&report_text(&report, shared.out_format()), None)
}

fn scan(shared: &SharedArgs, a: &ScanArgs) -> Outcome {
    let axes = GridAxes {
        kt_over_j: Axis { min: a.kt_min, max: a.kt_max, count: a.kt_count },
        b_over_j: Axis { min: a.b_min, max: a.b_max, count: a.b_count },
        coupling: shared.coupling(),
    };
    if a.kt_count == 0 || a.b_count == 0 {
        return Err(Failure::Usage("grid counts must be positive".into()));
    }
    let opts = xx_options(a.printed_magnetization);
    let grid = region_scan(&axes, &opts)?;
    let text = match shared.out_format() {
        OutFormat::Csv => region_csv(&grid),
        OutFormat::Json => pretty(&region_json(&grid, &Metadata::now(opts.quad, opts.magnetization))),
    };
    emit(&text, a.output.as_deref())?;
    if let Some(path) = &shared.svg {
        let outline = plot::region_outline(&axes, &opts)?;
        emit(&plot::render_svg(&axes, &outline), Some(path))?;
    }
    Ok(())
}

fn boundary(shared: &SharedArgs, a: &BoundaryArgs) -> Outcome {
    let b_values = if a.b_values.is_empty() {
        if a.b_count == 0 {
            return Err(Failure::Usage("--b-count must be positive".into()));
        }
        Axis { min: a.b_min, max: a.b_max, count: a.b_count }.values()
    } else {
        a.b_values.clone()
    };
    let config = TraceConfig {
        kt_min: a.kt_min,
        kt_max: a.kt_max,
        tolerance: shared.tol.unwrap_or(TraceConfig::default().tolerance),
        ..TraceConfig::default()
    };
    if !(config.tolerance > 0.0) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let j = shared.coupling();
    let opts = xx_options(a.printed_magnetization);
    let curve = boundary_trace(&b_values, j, &config, &opts)?;
    let zero_field_kt = match curve.points.iter().find(|p| p.b_over_j == 0.0) {
        Some(p) => p.critical_kt(),
        None => zero_field_critical_temperature(j, &config, &opts)?,
    };
    let endpoints = BoundaryEndpoints { zero_field_kt, zero_temperature_field: zero_temperature_critical_field(1.0) };
    let text = match shared.out_format() {
        OutFormat::Csv => boundary_csv(&curve, &endpoints),
        OutFormat::Json => {
            let mut meta = Metadata::now(opts.quad, opts.magnetization);
            meta.bisection_tolerance = Some(config.tolerance);
            pretty(&boundary_json(&curve, &endpoints, &meta))
        }
    };
    emit(&text, a.output.as_deref())
}

fn exact(shared: &SharedArgs, a: &ExactArgs) -> Outcome {
    let kt = required(shared.kt, "--kt")?;
    let spec = validate_spec(shared.model_spec().map_err(Failure::Usage)?)?;
    let obs = thermowitness::exactdiag::thermal_observables(&spec, kt)?;
    let n = spec.finite_sites()?;
    let witness = if spec.witness_eligible() { Some(finite_witness(&spec, kt)?.0) } else { None };
    let pair = match a.pair {
        None => None,
        Some(i) => {
            let bonds = spec.bonds()?;
            let &(s, t) = bonds
                .get(i)
                .ok_or_else(|| Failure::Usage(format!("--pair {i} is out of range for {} bonds", bonds.len())))?;
            Some(((s, t), concurrence(&reduced_pair_state(&spec, kt, (s, t))?)))
        }
    };
    let text = match shared.out_format() {
        OutFormat::Json => pretty(&json!({
            "model": spec.spec(),
            "observables": obs,
            "witness": witness,
            "pair": pair.map(|(sites, c)| json!({ "sites": sites, "concurrence": c })),
        })),
        OutFormat::Csv => {
            let mut s = String::from("N,kT,U,M,lnZ,W,concurrence\n");
            let w = witness.map_or(String::new(), |r| r.value.to_string());
            let c = pair.map_or(String::new(), |(_, c)| c.to_string());
            let _ = writeln!(s, "{n},{kt},{},{},{},{w},{c}", obs.energy, obs.magnetization, obs.log_partition);
            s
        }
    };
    emit(&text, None)
}

fn validate(shared: &SharedArgs, a: &ValidateArgs) -> Outcome {
    let config = ValidationConfig {
        options: xx_options(a.printed_magnetization),
        identity_tolerance: shared.tol,
        seed: shared.seed.unwrap_or(ValidationConfig::default().seed),
        sweep_samples: a.samples,
    };
    let report = run_suite(&config);
    let text = match shared.out_format() {
        OutFormat::Json => pretty(&json!(report)),
        OutFormat::Csv => {
            let mut s = String::new();
            for c in &report.checks {
                let status = match (c.passed, c.tolerance_induced) {
                    (true, _) => "PASS",
                    (false, true) => "FAIL (tolerance-induced)",
                    (false, false) => "FAIL",
                };
                let _ = writeln!(s, "{status} {} measured={:e} tol={:e}", c.name, c.measured, c.tolerance);
                if let Some(note) = &c.note {
                    let _ = writeln!(s, "  note: {note}");
                }
            }
            for note in &report.notes {
                let _ = writeln!(s, "note: {note}");
            }
            s
        }
    };
    emit(&text, None)?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}
