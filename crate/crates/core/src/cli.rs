//! Command-line front end.
//!
//! Exit codes: 0 nothing gated, 1 gated findings, 2 parse errors, 3 usage or
//! I/O error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classify::{convention_lint, ontology};
use crate::closure::compute_closure;
use crate::detect::{collapse_symmetric, detect_all, Finding, PatternClass, Severity};
use crate::rdf::Graph;
use crate::report::{report_prefixes, to_json, to_rdf, to_text, Report, SourceDiagnostic};
use crate::syntax::{parse_into, serialize, Format, PrefixTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "skosval", version, about = "Validate SKOS cross-vocabulary mappings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse, close, detect and report.
    Validate(ValidateArgs),
    /// Write the pattern-class ontology as Turtle.
    EmitOntology {
        path: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Input files; `-` reads standard input.
    #[arg(required = true)]
    inputs: Vec<String>,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    format: InputFormat,
    #[arg(long, value_enum, default_value_t = ReportKind::Text)]
    report: ReportKind,
    /// Repeat for more detail (max 2).
    #[arg(short = 'v', action = clap::ArgAction::Count)]
    verbose: u8,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=2))]
    verbosity: Option<u8>,
    /// Comma-separated class names or `patternN`; default all.
    #[arg(long, value_delimiter = ',')]
    patterns: Vec<String>,
    #[arg(long, value_enum, default_value_t = FailOn::Errors)]
    fail_on: FailOn,
    #[arg(long)]
    collapse_symmetric: bool,
    #[arg(long)]
    convention_lint: bool,
    /// Write the closure (Turtle, or N-Triples for `.nt`).
    #[arg(long)]
    dump_closure: Option<PathBuf>,
    /// Include the class ontology in a Turtle report.
    #[arg(long)]
    emit_ontology: bool,
    /// Base IRI for resolving relative IRIs.
    #[arg(long)]
    base: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Auto,
    Turtle,
    Ntriples,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    Json,
    Turtle,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FailOn {
    Errors,
    Warnings,
    Any,
    Never,
}

impl FailOn {
    pub fn gates(self, severity: Severity) -> bool {
        match self {
            FailOn::Errors => severity == Severity::Error,
            FailOn::Warnings => severity >= Severity::Warning,
            FailOn::Any => true,
            FailOn::Never => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub inputs: Vec<String>,
    pub format: InputFormat,
    pub report: ReportKind,
    pub verbosity: u8,
    pub patterns: BTreeSet<PatternClass>,
    pub fail_on: FailOn,
    pub collapse_symmetric: bool,
    pub convention_lint: bool,
    pub dump_closure: Option<PathBuf>,
    pub emit_ontology: bool,
    pub base: Option<String>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(inputs: Vec<String>) -> Self {
        RunConfig {
            inputs,
            format: InputFormat::Auto,
            report: ReportKind::Text,
            verbosity: 0,
            patterns: PatternClass::all(),
            fail_on: FailOn::Errors,
            collapse_symmetric: false,
            convention_lint: false,
            dump_closure: None,
            emit_ontology: false,
            base: None,
            output: None,
        }
    }
}

/// Parse errors win over findings; otherwise any finding the policy gates.
pub fn exit_code(has_parse_errors: bool, findings: &[Finding], fail_on: FailOn) -> i32 {
    if has_parse_errors {
        EXIT_PARSE
    } else if findings.iter().any(|f| fail_on.gates(f.severity)) {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    }
}

fn select_patterns(names: &[String]) -> Result<BTreeSet<PatternClass>, String> {
    if names.is_empty() {
        return Ok(PatternClass::all());
    }
    let mut out = BTreeSet::new();
    for n in names {
        out.extend(PatternClass::parse_selection(n).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

/// Entry point taking raw arguments (including the program name).
pub fn main_with_args<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match cli.command {
        Command::EmitOntology { path } => emit_ontology(&path, err),
        Command::Validate(a) => {
            let patterns = match select_patterns(&a.patterns) {
                Ok(p) => p,
                Err(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                    return EXIT_USAGE;
                }
            };
            let config = RunConfig {
                inputs: a.inputs,
                format: a.format,
                report: a.report,
                verbosity: a.verbosity.unwrap_or(0).max(a.verbose).min(2),
                patterns,
                fail_on: a.fail_on,
                collapse_symmetric: a.collapse_symmetric,
                convention_lint: a.convention_lint,
                dump_closure: a.dump_closure,
                emit_ontology: a.emit_ontology,
                base: a.base,
                output: a.output,
            };
            run(&config, stdin, out, err)
        }
    }
}

pub fn emit_ontology(path: &std::path::Path, err: &mut dyn Write) -> i32 {
    let text = serialize(&ontology(), Format::Turtle, &PrefixTable::standard());
    match fs::write(path, text) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            EXIT_USAGE
        }
    }
}

fn read_input(name: &str, stdin: &mut dyn Read) -> std::io::Result<Vec<u8>> {
    if name == "-" {
        let mut buf = Vec::new();
        stdin.read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        fs::read(name)
    }
}

pub fn run(config: &RunConfig, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if config.inputs.is_empty() {
        let _ = writeln!(err, "error: no inputs");
        return EXIT_USAGE;
    }

    let mut graph = Graph::new();
    let mut all_bytes = Vec::new();
    let mut diagnostics = Vec::new();
    for name in &config.inputs {
        let bytes = match read_input(name, stdin) {
            Ok(b) => b,
            Err(e) => {
                let _ = writeln!(err, "error: cannot read {name}: {e}");
                return EXIT_USAGE;
            }
        };
        let text = match std::str::from_utf8(&bytes) {
            Ok(t) => t,
            Err(e) => {
                let _ = writeln!(err, "error: {name} is not UTF-8: {e}");
                return EXIT_USAGE;
            }
        };
        let format = match config.format {
            InputFormat::Turtle => Format::Turtle,
            InputFormat::Ntriples => Format::NTriples,
            InputFormat::Auto => Format::from_path(name),
        };
        let parsed = parse_into(&mut graph, text, format, config.base.as_deref());
        diagnostics.extend(
            parsed.diagnostics.into_iter().map(|d| SourceDiagnostic { source: name.clone(), diagnostic: d }),
        );
        all_bytes.extend_from_slice(&bytes);
    }

    let closure = compute_closure(&graph);
    if let Some(path) = &config.dump_closure {
        let text = serialize(closure.graph(), Format::from_path(&path.to_string_lossy()), &PrefixTable::standard());
        if let Err(e) = fs::write(path, text) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }

    let mut findings = detect_all(&closure, &config.patterns);
    if config.collapse_symmetric {
        findings = collapse_symmetric(findings);
    }
    if config.convention_lint {
        findings.extend(convention_lint(&graph));
    }

    let report = Report::new(&all_bytes, findings, diagnostics);
    let rendered = match config.report {
        ReportKind::Json => to_json(&report),
        ReportKind::Text => to_text(&report, config.verbosity),
        ReportKind::Turtle => {
            let mut g = to_rdf(&report);
            if config.emit_ontology {
                g.extend(&ontology());
            }
            serialize(&g, Format::Turtle, &report_prefixes())
        }
    };
    if config.emit_ontology && config.report != ReportKind::Turtle {
        let _ = writeln!(err, "note: --emit-ontology only applies to --report turtle");
    }

    let written = match &config.output {
        Some(path) => fs::write(path, &rendered),
        None => out.write_all(rendered.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write report: {e}");
        return EXIT_USAGE;
    }

    exit_code(report.has_parse_errors(), &report.findings, config.fail_on)
}
