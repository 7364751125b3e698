//! The `sqc` command-line driver.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::ir::{AlgoChoice, PauliHamiltonian, TargetChoice};
use crate::parser::{parse, ParseError, ProgramFile};
use crate::pipeline::{compile, CompileOptions, Compiled, Settings};
use crate::semantics::{to_matrix, Dense};
use crate::synth::{to_qasm, Artifact};
use crate::typecheck::admit_simulation;
use crate::verify::verify_compiled;
use crate::Error;

/// Process exit status for success.
pub const EXIT_OK: i32 = 0;
/// Process exit status for invalid input or usage.
pub const EXIT_USER: i32 = 1;
/// Process exit status when verification ran and failed.
pub const EXIT_VERIFY: i32 = 2;
/// Process exit status for a broken internal invariant.
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "sqc", version, about = "Compile second-quantized Hamiltonians to circuits and pulse schedules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a program and write its artifact.
    Compile(Box<CompileArgs>),
    /// Parse and typecheck a program without compiling it.
    Check {
        /// Program file.
        file: PathBuf,
    },
}

/// Intermediate form printed by `--emit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    /// †-canonical form of the Hamiltonian.
    Canonical,
    /// Qubit expression after the particle transformation.
    QubitHam,
    /// Pauli terms as JSON.
    Pauli,
    /// Trotter plan as JSON.
    Plan,
    /// Dense matrix of the Hamiltonian as JSON.
    Matrix,
}

/// Serialization of a digital artifact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Qasm,
    Json,
}

#[derive(clap::Args, Debug)]
struct CompileArgs {
    /// Program file.
    file: PathBuf,
    /// Back end.
    #[arg(long)]
    target: Option<TargetChoice>,
    /// Product formula.
    #[arg(long = "algo")]
    algorithm: Option<AlgoChoice>,
    /// Trotter repetitions.
    #[arg(long)]
    m: Option<usize>,
    /// QDrift sample count.
    #[arg(long = "N")]
    samples: Option<usize>,
    /// Error budget; picks the smallest sufficient repetition count.
    #[arg(long)]
    epsilon: Option<f64>,
    /// QDrift sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Evolution time.
    #[arg(long)]
    time: Option<f64>,
    /// Reduce to two-local terms with perturbative gadgets, optionally at a
    /// given coupling.
    #[arg(long, num_args = 0..=1, value_name = "LAMBDA")]
    gadget: Option<Option<f64>>,
    /// Drop the identity and single-Z terms.
    #[arg(long)]
    drop_trivial: bool,
    /// Term grouping, as comma-separated string prefixes.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<String>>,
    /// Print an intermediate form instead of the artifact.
    #[arg(long, value_enum)]
    emit: Vec<Emit>,
    /// Check the artifact against the exact evolution.
    #[arg(long)]
    verify: bool,
    /// Settings file in TOML or JSON; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Artifact path; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Serialization of digital artifacts.
    #[arg(long, value_enum, default_value = "qasm")]
    format: Format,
    /// Write the verification report as JSON to this path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Include per-stage timings in the printed report.
    #[arg(long)]
    timings: bool,
}

impl CompileArgs {
    fn settings(&self) -> Settings {
        let (gadget, lambda) = match self.gadget {
            None => (None, None),
            Some(l) => (Some(true), l),
        };
        Settings {
            time: self.time,
            algorithm: self.algorithm,
            m: self.m,
            samples: self.samples,
            epsilon: self.epsilon,
            seed: self.seed,
            target: self.target,
            order: self.order.clone(),
            gadget,
            lambda,
            drop_trivial: self.drop_trivial.then_some(true),
        }
    }
}

/// Run the driver on `argv` (including the program name), writing to the
/// process streams. Returns the exit status.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    run_with(argv, &mut out, &mut err)
}

/// [`run`] with explicit output streams.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USER } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Check { file } => check(file, out),
        Command::Compile(args) => compile_cmd(args, out, err),
    };
    match result {
        Ok(code) => code,
        Err((file, e)) => {
            let _ = writeln!(err, "{}", describe(&file, &e));
            if e.is_internal() {
                EXIT_INTERNAL
            } else {
                EXIT_USER
            }
        }
    }
}

type Failure = (PathBuf, Error);

fn describe(file: &Path, e: &Error) -> String {
    match e {
        Error::Parse { source, text } => {
            let mut s = format!("{}:{}: parse: {}", file.display(), source.pos, source.kind);
            if let Some(line) = text.lines().nth(source.pos.line.saturating_sub(1)) {
                s.push_str(&format!("\n  | {line}\n  | {}^", " ".repeat(source.pos.col.saturating_sub(1))));
            }
            s
        }
        other => format!("{}: {other}", file.display()),
    }
}

fn load(file: &Path) -> Result<ProgramFile<f64>, Failure> {
    let fail = |e: Error| (file.to_path_buf(), e);
    let text = std::fs::read_to_string(file).map_err(|e| fail(Error::Io(file.display().to_string(), e.to_string())))?;
    parse::<f64>(&text).map_err(|source: ParseError| fail(Error::Parse { source, text }))
}

fn load_config(path: &Path) -> Result<Settings, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(path.display().to_string(), e.to_string()))?;
    let parsed = if path.extension().is_some_and(|x| x == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn check(file: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let program = load(file)?;
    admit_simulation(&program.hamiltonian, &program.shape).map_err(|e| (file.to_path_buf(), Error::Pipeline(e.into())))?;
    let shape: Vec<String> = program.shape.iter().map(|s| s.to_string()).collect();
    let _ = writeln!(out, "ok: Hermitian over [{}]", shape.join(", "));
    Ok(EXIT_OK)
}

fn compile_cmd(args: &CompileArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let fail = |e: Error| (args.file.clone(), e);
    let program = load(&args.file)?;
    let config = match &args.config {
        Some(p) => load_config(p).map_err(fail)?,
        None => Settings::default(),
    };
    let opts = CompileOptions::resolve(&program, &config, &args.settings());
    let compiled = compile(&program, &opts).map_err(|e| fail(e.into()))?;

    if args.emit.is_empty() {
        let text = artifact_text(&compiled.artifact, args.format);
        write_or_print(args.output.as_deref(), &text, out).map_err(fail)?;
    } else {
        for e in &args.emit {
            let text = emit(*e, &program, &compiled).map_err(fail)?;
            let _ = out.write_all(text.as_bytes());
        }
        if let Some(path) = &args.output {
            let text = artifact_text(&compiled.artifact, args.format);
            write_or_print(Some(path), &text, out).map_err(fail)?;
        }
    }

    if !args.verify {
        return Ok(EXIT_OK);
    }
    let report = verify_compiled(&compiled).map_err(|e| fail(e.into()))?;
    let _ = err.write_all(report.table(args.timings).as_bytes());
    if let Some(path) = &args.report {
        write_or_print(Some(path), &json(&report), out).map_err(fail)?;
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_VERIFY })
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(p.display().to_string(), e.to_string())),
        None => {
            let _ = out.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

/// Text of an artifact: QASM or a JSON gate list for circuits, JSON for
/// pulse schedules.
pub fn artifact_text(a: &Artifact<f64>, format: impl Into<ArtifactFormat>) -> String {
    match (a, format.into()) {
        (Artifact::Digital(c), ArtifactFormat::Qasm) => to_qasm(c),
        (Artifact::Digital(c), ArtifactFormat::Json) => json(c),
        (Artifact::Analog(s), _) => json(s),
    }
}

/// Serialization of a digital artifact, as a library-facing type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArtifactFormat {
    Qasm,
    Json,
}

impl From<Format> for ArtifactFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Qasm => ArtifactFormat::Qasm,
            Format::Json => ArtifactFormat::Json,
        }
    }
}

#[derive(Serialize)]
struct GadgetDump<'a> {
    terms: &'a [crate::ir::PauliTerm<f64>],
    width: usize,
    ancilla_map: &'a [Vec<usize>],
    lambda: f64,
    lambda_max: Option<f64>,
}

#[derive(Serialize)]
struct MatrixDump {
    dim: usize,
    /// Row-major `[re, im]` pairs.
    data: Vec<[f64; 2]>,
}

fn matrix_dump(m: &Dense<f64>) -> MatrixDump {
    let data = (0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |c| (r, c))).map(|(r, c)| [m[(r, c)].re, m[(r, c)].im]).collect();
    MatrixDump { dim: m.nrows(), data }
}

fn pauli_dump(h: &PauliHamiltonian<f64>) -> String {
    json(&h.terms)
}

fn emit(kind: Emit, program: &ProgramFile<f64>, c: &Compiled) -> Result<String, Error> {
    Ok(match kind {
        Emit::Canonical => format!("{}\n", c.canonical),
        Emit::QubitHam => format!("{}\n", c.qubit),
        Emit::Pauli => match &c.gadget {
            Some(g) => json(&GadgetDump {
                terms: &g.hamiltonian.terms,
                width: g.hamiltonian.width,
                ancilla_map: &g.ancilla_map,
                lambda: g.lambda,
                lambda_max: g.lambda_max,
            }),
            None => pauli_dump(&c.kept),
        },
        Emit::Plan => json(&c.plan),
        Emit::Matrix => json(&matrix_dump(&to_matrix(&program.hamiltonian, &program.shape).map_err(Error::Semantics)?)),
    })
}
