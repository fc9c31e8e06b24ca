//! Subcommand dispatch, with stdout and stderr injected so the whole
//! command line can be driven in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use weakconc::concentration::{self, WeakValueSource};
use weakconc::hilbert::AncillaSpec;

use crate::args::{Cli, Command, Format, OutputArgs, SchemeArgs};
use crate::record::{ResultRecord, WeakValueReport};
use crate::scenario::ScenarioFile;
use crate::{exit, sweep, verify, ScenarioError};

fn write_out(path: &Path, text: &str) -> Result<(), ScenarioError> {
    std::fs::write(path, text)
        .map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), ScenarioError> {
    out.write_all(text.as_bytes()).map_err(|e| ScenarioError::Io { path: "<stdout>".into(), message: e.to_string() })
}

fn load(file: &Path, output: &OutputArgs) -> Result<ScenarioFile, ScenarioError> {
    let mut scenario = ScenarioFile::load(file)?;
    if let Some(n) = output.n_max {
        scenario.numerics.n_max = Some(n);
    }
    if output.analytic_weak_value {
        scenario.numerics.weak_value = WeakValueSource::Analytic;
    }
    Ok(scenario)
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn simulate(file: &Path, output: &OutputArgs, out: &mut dyn Write) -> Result<(), ScenarioError> {
    let scenario = load(file, output)?;
    let config = scenario.to_config()?;
    let result = concentration::run(&config)?;
    let record = ResultRecord::new(&scenario, &config, &result)?;
    let render = |f: Format| match f {
        Format::Csv => record.to_csv(),
        Format::Json => record.to_json(),
    };
    match output.format {
        Some(f) => emit(out, &with_newline(render(f)))?,
        None => emit(out, &record.render_table())?,
    }
    if let Some(path) = &output.out {
        write_out(path, &render(output.format.unwrap_or(Format::Json)))?;
    }
    // the record is still emitted so the exact output can be inspected
    if result.predicted_output.is_none() {
        let w = result.weak_value_used;
        let growth = config.lambda * config.lambda * (2.0 * config.kappa_t * w.im).exp();
        return Err(ScenarioError::Physical(weakconc::Error::UnphysicalOutput { growth }));
    }
    Ok(())
}

fn run_sweep(
    file: &Path,
    output: &OutputArgs,
    threads: Option<usize>,
    out: &mut dyn Write,
) -> Result<(), ScenarioError> {
    let scenario = load(file, output)?;
    let table = sweep::run_sweep(&scenario, threads)?;
    let text = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match &output.out {
        Some(path) => write_out(path, &text),
        None => emit(out, &with_newline(text)),
    }
}

fn weakvalue(
    alpha: f64,
    n_max: Option<usize>,
    format: Option<Format>,
    scheme: &SchemeArgs,
    out: &mut dyn Write,
) -> Result<(), ScenarioError> {
    let post = match *scheme {
        SchemeArgs::Coherent { magnitude, phase } => AncillaSpec::Coherent { magnitude, phase },
        SchemeArgs::Squeezed { r, phi } => AncillaSpec::SqueezedVacuum { r, phi },
        SchemeArgs::Quadrature { x, phi, convention } => {
            AncillaSpec::QuadratureEigenstate { x, phi, phase: convention.into() }
        }
    };
    let report = WeakValueReport::compute(alpha, n_max, &post)?;
    let text = match format {
        Some(Format::Json) => with_newline(report.to_json()),
        Some(Format::Csv) => report.to_csv(),
        None => report.render_table(),
    };
    emit(out, &text)
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
                return exit::VALIDATION;
            }
            // --help and --version
            let _ = out.write_all(rendered.as_bytes());
            return exit::OK;
        }
    };
    let outcome = match &cli.command {
        Command::Simulate { file, output } => simulate(file, output, out),
        Command::Sweep { file, output, threads } => run_sweep(file, output, *threads, out),
        Command::Weakvalue { alpha, n_max, format, scheme } => weakvalue(*alpha, *n_max, *format, scheme, out),
        Command::Verify => {
            let report = verify::run_all();
            let _ = out.write_all(report.render().as_bytes());
            return if report.all_passed() { exit::OK } else { exit::VERIFY_FAILED };
        }
    };
    match outcome {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
