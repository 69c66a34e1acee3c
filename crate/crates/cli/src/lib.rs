//! `smartgraph analyze`: parse, graph, detect and report.
//!
//! Exit codes: 0 clean, 1 findings per `--fail-on`, 2 input or
//! configuration error.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use smartgraph_core::{
    all_detectors, analyze_unit, exit_code, export_unit_dot, parse_detector_list, parse_source, render_text,
    serialize_json, serialize_json_array, AnalysisOptions, AuditReport, DiagnosticSeverity, FailOn, KeywordConfig,
    SourceUnit,
};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "smartgraph", version, about = "Static analysis of business-logic flaws in Solidity contracts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one or more Solidity files.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Json => "json",
            Format::Dot => "dot",
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Solidity source files.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Output file, or a directory when several inputs are given.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated detector ids (`D2` or `D2_missing_exit_validation`).
    /// An empty list disables all detectors.
    #[arg(long)]
    pub detectors: Option<String>,
    /// Keyword configuration file (`key = a, b` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Earlier version of the contracts, enables the legacy-signature detector.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    /// Statements allowed between a price update and a transfer.
    #[arg(long)]
    pub max_distance: Option<usize>,
    #[arg(long, default_value_t = FailOn::None)]
    pub fail_on: FailOn,
    /// Record the generation time in JSON reports.
    #[arg(long)]
    pub timestamps: bool,
    #[arg(long)]
    pub no_color: bool,
}

/// An error that ends the run with exit code 2.
struct Fatal(String);

fn read_source(path: &Path) -> Result<String, Fatal> {
    fs::read_to_string(path).map_err(|e| Fatal(format!("cannot read {}: {e}", path.display())))
}

fn load_config(args: &AnalyzeArgs) -> Result<KeywordConfig, Fatal> {
    let mut cfg = KeywordConfig::default();
    if let Some(path) = &args.config {
        let text = read_source(path)?;
        cfg.apply_config_str(&text).map_err(|e| Fatal(format!("{}: {e}", path.display())))?;
    }
    if let Some(d) = args.max_distance {
        cfg.max_distance = d;
    }
    cfg.validate().map_err(|e| Fatal(e.to_string()))?;
    Ok(cfg)
}

fn options(args: &AnalyzeArgs) -> Result<AnalysisOptions, Fatal> {
    let detectors = match &args.detectors {
        Some(list) => parse_detector_list(list).map_err(|e| Fatal(e.to_string()))?,
        None => all_detectors(),
    };
    let generated_at = args.timestamps.then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    Ok(AnalysisOptions { config: load_config(args)?, detectors, generated_at })
}

fn has_errors(unit: &SourceUnit) -> bool {
    unit.diagnostics.iter().any(|d| d.severity == DiagnosticSeverity::Error)
}

fn render(reports: &[AuditReport], format: Format, color: bool) -> String {
    match format {
        Format::Json if reports.len() == 1 => serialize_json(&reports[0]),
        Format::Json => serialize_json_array(reports),
        Format::Dot => reports.iter().map(|r| export_unit_dot(&r.graphs)).collect::<Vec<_>>().join("\n"),
        Format::Text if reports.len() == 1 => render_text(&reports[0], color),
        Format::Text => reports
            .iter()
            .map(|r| format!("== {} ==\n{}", r.source_path, render_text(r, color)))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

/// One output file per report inside `dir`, named after the input stem.
fn write_dir(dir: &Path, reports: &[AuditReport], format: Format) -> Result<Vec<PathBuf>, Fatal> {
    fs::create_dir_all(dir).map_err(|e| Fatal(format!("cannot create {}: {e}", dir.display())))?;
    let mut taken = BTreeSet::new();
    let mut written = Vec::new();
    for r in reports {
        let stem = Path::new(&r.source_path).file_stem().map_or("report".into(), |s| s.to_string_lossy().into_owned());
        let mut name = format!("{stem}.{}", format.extension());
        let mut n = 2;
        while !taken.insert(name.clone()) {
            name = format!("{stem}_{n}.{}", format.extension());
            n += 1;
        }
        let path = dir.join(name);
        write_file(&path, &render(std::slice::from_ref(r), format, false))?;
        written.push(path);
    }
    Ok(written)
}

fn write_file(path: &Path, text: &str) -> Result<(), Fatal> {
    fs::write(path, text).map_err(|e| Fatal(format!("cannot write {}: {e}", path.display())))
}

fn analyze(args: &AnalyzeArgs, color: bool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Fatal> {
    let opts = options(args)?;
    let baseline = match &args.baseline {
        Some(path) => Some(parse_source(&read_source(path)?, &path.display().to_string())),
        None => None,
    };
    let sources =
        args.paths.iter().map(|p| Ok((p.display().to_string(), read_source(p)?))).collect::<Result<Vec<_>, Fatal>>()?;

    let units: Vec<SourceUnit> = sources.par_iter().map(|(path, src)| parse_source(src, path)).collect();
    let reports = units
        .par_iter()
        .map(|unit| analyze_unit(unit, baseline.as_ref(), &opts))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Fatal(e.to_string()))?;

    let mut code = EXIT_CLEAN;
    for unit in baseline.iter().chain(&units) {
        for d in &unit.diagnostics {
            let level = match d.severity {
                DiagnosticSeverity::Error => "error",
                DiagnosticSeverity::Warning => "warning",
            };
            let _ = writeln!(stderr, "{}:{}: {level}: {}", unit.path, d.line, d.message);
        }
        if has_errors(unit) {
            code = EXIT_ERROR;
        }
    }

    match &args.out {
        Some(dir) if reports.len() > 1 => {
            for path in write_dir(dir, &reports, args.format)? {
                let _ = writeln!(stderr, "wrote {}", path.display());
            }
        }
        Some(path) => {
            write_file(path, &render(&reports, args.format, false))?;
            let _ = writeln!(stderr, "wrote {}", path.display());
        }
        None => {
            let _ = stdout.write_all(render(&reports, args.format, color).as_bytes());
        }
    }

    if code == EXIT_CLEAN {
        code = reports.iter().map(|r| exit_code(r, args.fail_on)).max().unwrap_or(EXIT_CLEAN);
    }
    Ok(code)
}

/// Color only on a capable terminal, and never with `--no-color` or a
/// non-empty `NO_COLOR`.
pub fn use_color(color_ok: bool, no_color_flag: bool, no_color_env: Option<&std::ffi::OsStr>) -> bool {
    color_ok && !no_color_flag && no_color_env.is_none_or(|v| v.is_empty())
}

/// Runs the CLI on `args` (program name first). `color_ok` says whether the
/// terminal accepts ANSI colors; `--no-color` and `NO_COLOR` override it.
pub fn run<I, T>(args: I, color_ok: bool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_ERROR
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_CLEAN
            };
        }
    };
    match cli.command {
        Command::Analyze(args) => {
            let color = use_color(color_ok, args.no_color, std::env::var_os("NO_COLOR").as_deref());
            analyze(&args, color, stdout, stderr).unwrap_or_else(|Fatal(msg)| {
                let _ = writeln!(stderr, "error: {msg}");
                EXIT_ERROR
            })
        }
    }
}
