//! `telegate`: build, run and certify nonlocal controlled-unitary protocols.
//!
//! Exit codes: 0 success or pass, 1 verification failure or lint
//! violations, 2 usage, parse or runtime errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use telegate::builder::{build_program, build_specification, mutate, Mutation, NonlocalCU};
use telegate::executor::{channel_choi, run_branches};
use telegate::gatelang::parse_gate;
use telegate::protocol::{
    parse_program, resource_census, validate_locality, Phase, Program, ProgramSource,
};
use telegate::qsim::{self, State, Unitary};
use telegate::verifier::{verify_program, EquivalenceReport, VerifyOptions};
use telegate::Complex;

const MAX_QUBITS_ENV: &str = "TELEGATE_MAX_QUBITS";

#[derive(Parser)]
#[command(
    name = "telegate",
    version,
    about = "Nonlocal controlled-unitary protocol verifier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the protocol against its specification on every branch and as a channel.
    Verify {
        #[command(flatten)]
        source: Source,
        /// Largest accepted per-branch infidelity.
        #[arg(long, default_value_t = 1e-10)]
        tol_branch: f64,
        /// Largest accepted Choi-matrix Frobenius distance.
        #[arg(long, default_value_t = 1e-9)]
        tol_choi: f64,
        /// Probe inputs (raised to the basis size if smaller).
        #[arg(long, default_value_t = 16)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Break the program on purpose before verifying.
        #[arg(long, value_enum)]
        mutate: Option<MutationArg>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Enumerate the measurement branches for one computational-basis input.
    Trace {
        #[command(flatten)]
        source: Source,
        /// Input basis label, one bit per external wire (e.g. `10`).
        #[arg(long)]
        input: String,
        #[arg(long, value_enum)]
        mutate: Option<MutationArg>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Dump the normalized Choi matrix of the program (CSV of `re,im` pairs or JSON).
    Choi {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum)]
        mutate: Option<MutationArg>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Count Bell pairs and classical bits sent each way.
    Resources {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Check a program file for locality and wire-discipline violations.
    Lint {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Print the builder's program for a gate in program-file syntax.
    Export {
        #[arg(long)]
        gate: String,
    },
}

#[derive(Args)]
struct Source {
    /// Gate expression for C; the protocol is built for controlled-C.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    gate: Option<String>,
    /// Program file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Unitary the program file should implement on its external wires
    /// (overrides a `# spec:` line in the file).
    #[arg(long, requires = "file")]
    spec: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum MutationArg {
    DropBell,
    DropXCorrection,
    DropZCorrection,
    #[value(name = "drop-cgate")]
    DropCgate,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::DropBell => Mutation::DropBell,
            MutationArg::DropXCorrection => Mutation::DropXCorrection,
            MutationArg::DropZCorrection => Mutation::DropZCorrection,
            MutationArg::DropCgate => Mutation::DropControlledGate,
        }
    }
}

/// A user-facing error; always exit code 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<ExitCode, Failure>;

/// A program plus, when known, the unitary it should implement.
struct Loaded {
    program: Program,
    target: Option<Unitary>,
}

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|info| {
        eprintln!("telegate: internal error: {info}");
    }));
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(code)) => code,
        Ok(Err(Failure(msg))) => {
            eprintln!("telegate: error: {msg}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(2),
    }
}

fn run(cli: Cli) -> Outcome {
    if let Ok(raw) = std::env::var(MAX_QUBITS_ENV) {
        let n: usize = raw.trim().parse().map_err(|_| {
            Failure(format!(
                "{MAX_QUBITS_ENV} must be a positive integer, got `{raw}`"
            ))
        })?;
        if n == 0 {
            return Err(Failure(format!(
                "{MAX_QUBITS_ENV} must be a positive integer"
            )));
        }
        qsim::set_max_qubits(n);
    }

    match cli.command {
        Command::Verify {
            source,
            tol_branch,
            tol_choi,
            probes,
            seed,
            mutate,
            format,
        } => {
            let loaded = load(&source, mutate)?;
            let target = loaded.target.ok_or_else(|| {
                Failure("verify needs --gate, or --file together with --spec".into())
            })?;
            let opts = VerifyOptions {
                tol_branch,
                tol_choi,
                probes,
                seed,
            };
            let report = verify_program(&loaded.program, &target, &opts)?;
            match format {
                Format::Json => println!("{}", report.to_json()),
                Format::Human => print!("{}", human_report(&loaded.program, &report)),
            }
            Ok(ExitCode::from(if report.passed() { 0 } else { 1 }))
        }
        Command::Trace {
            source,
            input,
            mutate,
            format,
        } => {
            let loaded = load(&source, mutate)?;
            trace(&loaded, &input, format)
        }
        Command::Choi {
            source,
            mutate,
            format,
        } => {
            let loaded = load(&source, mutate)?;
            let choi = channel_choi(&loaded.program)?;
            let dim = choi.dim();
            match format {
                Format::Human => {
                    let mut out = String::new();
                    for r in 0..dim {
                        let row: Vec<String> = (0..dim)
                            .map(|c| {
                                let z = choi.entry(r, c);
                                format!("{:e},{:e}", z.re, z.im)
                            })
                            .collect();
                        let _ = writeln!(out, "{}", row.join(","));
                    }
                    print!("{out}");
                }
                Format::Json => {
                    let rows: Vec<Vec<[f64; 2]>> = (0..dim)
                        .map(|r| (0..dim).map(|c| pair(choi.entry(r, c))).collect())
                        .collect();
                    let doc = json!({ "n_qubits": choi.n_qubits(), "dim": dim, "entries": rows });
                    println!("{}", serde_json::to_string_pretty(&doc)?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Resources { source, format } => {
            let census = resource_census(&load(&source, None)?.program);
            match format {
                Format::Json => println!("{}", serde_json::to_string(&census)?),
                Format::Human => {
                    println!("ebits:            {}", census.ebits);
                    println!("bits Alice→Bob:   {}", census.bits_alice_to_bob);
                    println!("bits Bob→Alice:   {}", census.bits_bob_to_alice);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Lint { path, format } => lint(&path, format),
        Command::Export { gate } => {
            let spec = spec_from_gate(&gate)?;
            print!("{}", build_program(&spec).to_text());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn spec_from_gate(text: &str) -> Result<NonlocalCU, Failure> {
    let c: Unitary =
        parse_gate(text).map_err(|e| Failure(format!("gate expression `{text}`: {e}")))?;
    Ok(NonlocalCU::new(c, Some(text.trim()))?)
}

fn read_source(path: &Path) -> Result<ProgramSource, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?;
    parse_program(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

/// Violations rendered with source line numbers.
fn violation_lines(
    src: &ProgramSource,
    violations: &[telegate::protocol::Violation],
) -> Vec<(Option<usize>, String)> {
    violations
        .iter()
        .map(|v| {
            let line = v.index.and_then(|i| src.lines.get(i).copied());
            let mut msg = v.kind.to_string();
            if let Some(w) = v.wire {
                let _ = write!(msg, " [{w}]");
            }
            (line, msg)
        })
        .collect()
}

fn load(source: &Source, mutation: Option<MutationArg>) -> Result<Loaded, Failure> {
    let mut loaded = match (&source.gate, &source.file) {
        (Some(gate), _) => {
            let spec = spec_from_gate(gate)?;
            Loaded {
                program: build_program(&spec),
                target: Some(build_specification(&spec)?),
            }
        }
        (None, Some(path)) => {
            let src = read_source(path)?;
            if let Err(violations) = validate_locality(&src.program) {
                let mut msg = format!("{} fails the locality check:", path.display());
                for (line, text) in violation_lines(&src, &violations) {
                    match line {
                        Some(l) => write!(msg, "\n  line {l}: {text}"),
                        None => write!(msg, "\n  extern: {text}"),
                    }
                    .expect("write to string");
                }
                return Err(Failure(msg));
            }
            let target = match &source.spec {
                Some(expr) => Some(parse_spec(expr)?),
                None => spec_for_file(path)?,
            };
            Loaded {
                program: src.program,
                target,
            }
        }
        (None, None) => return Err(Failure("one of --gate or --file is required".into())),
    };
    if let Some(m) = mutation {
        let m = Mutation::from(m);
        loaded.program = mutate(&loaded.program, m)
            .ok_or_else(|| Failure(format!("mutation {} has nothing to act on", m.name())))?;
    }
    Ok(loaded)
}

/// A program file may name its target with a `# spec: EXPR` comment line.
fn spec_for_file(path: &Path) -> Result<Option<Unitary>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?;
    for line in text.lines() {
        if let Some(expr) = line
            .trim()
            .strip_prefix('#')
            .and_then(|l| l.trim().strip_prefix("spec:"))
        {
            return parse_spec(expr).map(Some);
        }
    }
    Ok(None)
}

fn parse_spec(expr: &str) -> Result<Unitary, Failure> {
    parse_gate(expr).map_err(|e| Failure(format!("spec `{}`: {e}", expr.trim())))
}

fn pair(z: Complex<f64>) -> [f64; 2] {
    [z.re, z.im]
}

fn trace(loaded: &Loaded, label: &str, format: Format) -> Outcome {
    let n = loaded.program.n_external();
    if label.len() != n || !label.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Failure(format!(
            "input label `{label}` must be {n} characters of 0 and 1, one per external wire"
        )));
    }
    let index = usize::from_str_radix(label, 2)
        .map_err(|_| Failure(format!("bad input label `{label}`")))?;
    let input = State::basis(n, index)?;
    let expected = match &loaded.target {
        Some(u) => Some(input.apply_unitary(&(0..n).collect::<Vec<_>>(), u)?),
        None => None,
    };
    let outcomes = run_branches(&loaded.program, &input)?;
    let mut rows = Vec::with_capacity(outcomes.len());
    for o in &outcomes {
        let fidelity = match &expected {
            Some(e) => Some(o.final_state.fidelity(e)?),
            None => None,
        };
        rows.push((o, fidelity));
    }

    match format {
        Format::Json => {
            let branches: Vec<_> = rows
                .iter()
                .map(|(o, f)| {
                    json!({
                        "transcript": o.transcript.iter()
                            .map(|(b, v)| json!({ "wire": b.to_string(), "bit": u8::from(*v) }))
                            .collect::<Vec<_>>(),
                        "probability": o.probability,
                        "fidelity": f,
                        "amplitudes": o.final_state.amplitudes().iter().map(|z| pair(*z)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let doc = json!({ "input": label, "branches": branches });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Format::Human => {
            let header = outcomes
                .first()
                .map(|o| {
                    o.transcript
                        .iter()
                        .map(|(b, _)| b.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .unwrap_or_default();
            println!("input |{label}⟩, {} branch(es)", rows.len());
            println!(
                "{header:<8} {:>12} {:>10}  final state",
                "probability", "fidelity"
            );
            for (o, f) in &rows {
                let bits: Vec<String> = o
                    .transcript
                    .iter()
                    .map(|(_, v)| u8::from(*v).to_string())
                    .collect();
                let fid = f.map_or_else(|| "-".to_string(), |f| format!("{f:.6}"));
                println!(
                    "{:<8} {:>12.6} {:>10}  {}",
                    bits.join("  "),
                    o.probability,
                    fid,
                    ket(&o.final_state)
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Nonzero amplitudes as `a|00⟩ + b|11⟩`.
fn ket(s: &State) -> String {
    let n = s.n_qubits();
    let terms: Vec<String> = s
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 1e-12)
        .map(|(i, z)| {
            let coeff = if z.im.abs() <= 1e-12 {
                format!("{:.4}", z.re)
            } else if z.re.abs() <= 1e-12 {
                format!("{:.4}i", z.im)
            } else {
                format!("({:.4}{:+.4}i)", z.re, z.im)
            };
            format!("{coeff}|{i:0n$b}⟩")
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn phase_header(phase: Phase) -> &'static str {
    match phase {
        Phase::Distribution => "① distribution",
        Phase::Interaction => "② interaction",
        Phase::Return => "③ return",
        Phase::Unphased => "· unphased",
    }
}

fn human_report(p: &Program, r: &EquivalenceReport) -> String {
    let mut out = String::new();
    let w = &mut out;
    let wires: Vec<String> = p
        .external()
        .iter()
        .map(|e| format!("{}@{}", e.wire, e.party.short()))
        .collect();
    let _ = writeln!(w, "external wires: {}", wires.join(" "));
    let mut current = None;
    for (phase, ins) in p.iter() {
        if current != Some(phase) {
            let _ = writeln!(w, "{}", phase_header(phase));
            current = Some(phase);
        }
        let _ = writeln!(w, "    {ins}");
    }
    let _ = writeln!(
        w,
        "resources: {} ebit, {} bit Alice→Bob, {} bit Bob→Alice",
        r.census.ebits, r.census.bits_alice_to_bob, r.census.bits_bob_to_alice
    );
    let _ = writeln!(w, "branches over {} probe(s), seed {}:", r.probes, r.seed);
    let header = r
        .branches
        .first()
        .map(|b| {
            b.transcript
                .iter()
                .map(|t| t.wire.as_str())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .unwrap_or_default();
    let _ = writeln!(
        w,
        "    {header:<8} {:>12} {:>15}",
        "probability", "max infidelity"
    );
    for b in &r.branches {
        let bits: Vec<String> = b.transcript.iter().map(|t| t.bit.to_string()).collect();
        let _ = writeln!(
            w,
            "    {:<8} {:>12.6} {:>15.3e}",
            bits.join("  "),
            b.probability,
            b.max_infidelity
        );
    }
    let _ = writeln!(
        w,
        "max infidelity: {:.3e} (tolerance {:e})",
        r.max_infidelity, r.tolerances.branch
    );
    let _ = writeln!(
        w,
        "choi distance:  {:.3e} (tolerance {:e})",
        r.choi_distance, r.tolerances.choi
    );
    let _ = writeln!(w, "verdict: {}", if r.passed() { "PASS" } else { "FAIL" });
    out
}

fn lint(path: &Path, format: Format) -> Outcome {
    let src = read_source(path)?;
    let violations = validate_locality(&src.program).err().unwrap_or_default();
    let found = violation_lines(&src, &violations);
    match format {
        Format::Json => {
            let items: Vec<_> = found
                .iter()
                .map(|(line, msg)| json!({ "line": line, "message": msg }))
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({ "violations": items }))?
            );
        }
        Format::Human => {
            for (line, msg) in &found {
                match line {
                    Some(l) => println!("{}:{l}: {msg}", path.display()),
                    None => println!("{}: extern: {msg}", path.display()),
                }
            }
            if found.is_empty() {
                println!(
                    "{}: ok ({} instructions)",
                    path.display(),
                    src.program.len()
                );
            } else {
                println!("{} violation(s)", found.len());
            }
        }
    }
    Ok(ExitCode::from(if found.is_empty() { 0 } else { 1 }))
}
