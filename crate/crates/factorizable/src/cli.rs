//! Command-line front end with JSON input/output, seeded instance
//! generation, and verification reports.
//!
//! Every command writes a JSON document to standard output (and to `--out`
//! when given). Exit codes: `0` on success, `1` when a validation command
//! fails (`units validate`, `channel verify`), `2` on malformed input or
//! usage errors. All randomness flows from an explicit `--seed` flag.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{
    block_structure, commutant, generated_algebra, FiniteTracialAlgebra, StarSubalgebra,
};
use crate::channel::{
    apply_choi, channel_distance, channel_from_ancilla, verify_channel, Channel,
};
use crate::error::Error;
use crate::json::{JsonChannel, JsonMatrix, JsonTrace, JsonUnits};
use crate::matrix::{seeded_rng, ComplexMatrix, TolerancePolicy};
use crate::trace::{
    convex_combine, correlation_matrix, decompose_trace, phi, random_trace, same_phi_fiber,
};
use crate::units::{
    intertwiner_checked, random_unital_embedding, standard_units, units_from_unitaries,
    validate_units, MatrixUnitSystem,
};

#[derive(Parser)]
#[command(
    name = "factorizable",
    about = "Choi-matrix calculus for factorizable channels and finite-dimensional traces",
    version
)]
struct Cli {
    /// Override all comparison tolerances with a single value.
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Matrix-unit systems: construction, validation, intertwiners.
    #[command(subcommand)]
    Units(UnitsCmd),
    /// Choi matrices: assembly, application, verification, ancilla channels.
    #[command(subcommand)]
    Channel(ChannelCmd),
    /// Finite-dimensional traces and the trace-to-channel map.
    #[command(subcommand)]
    Trace(TraceCmd),
    /// Generated *-algebras, commutants and block structure.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
}

#[derive(Subcommand)]
enum UnitsCmd {
    /// Standard matrix units of M_n.
    Standard {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Haar-random unital embedding M_n -> M_d (requires n | d).
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an order-n system in M_n (x) M_d from unitaries u_2..u_n.
    FromUnitaries {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the matrix-unit relations; exits 1 on failure.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Unitary conjugating one unital system onto another.
    Intertwine {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ChannelCmd {
    /// Assemble a Choi matrix from the images of the matrix units.
    Choi {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a channel, given by its Choi matrix, to a matrix.
    Apply {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check CP / unital / trace-preserving; exits 1 unless all three hold.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Channel realized by a unitary over a block-weighted ancilla.
    FromAncilla {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalized Hilbert-Schmidt distance of two Choi matrices.
    Distance {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum TraceCmd {
    /// Random trace: Haar embeddings per block for both copies.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',')]
        blocks: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The channel of a trace (Choi matrix n·[τ(f_kl* g_ij)]).
    Phi {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The correlation matrix [τ(f_kl* g_ij)] in the Choi index layout.
    Correlate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a trace into weighted extremal components.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convex combination of traces (direct sum with scaled weights).
    Combine {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Whether two traces induce the same channel.
    Fiber {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// The *-algebra generated by a list of matrices.
    Span {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The commutant of the generated *-algebra.
    Commutant {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wedderburn block structure of the generated *-algebra.
    Blocks {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

// input document shapes

#[derive(Deserialize)]
struct UnitariesDoc {
    n: usize,
    unitaries: Vec<JsonMatrix>,
}

#[derive(Deserialize)]
struct UnitsPairDoc {
    f: JsonUnits,
    fp: JsonUnits,
}

#[derive(Deserialize)]
struct ImagesDoc {
    n: usize,
    images: Vec<Vec<JsonMatrix>>,
}

#[derive(Deserialize)]
struct ApplyDoc {
    channel: JsonChannel,
    x: JsonMatrix,
}

#[derive(Deserialize)]
struct AncillaBlocksDoc {
    blocks: Vec<usize>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct FromAncillaDoc {
    n: usize,
    ancilla: AncillaBlocksDoc,
    u: JsonMatrix,
}

#[derive(Deserialize)]
struct ChannelPairDoc {
    a: JsonChannel,
    b: JsonChannel,
}

#[derive(Deserialize)]
struct TraceListDoc {
    traces: Vec<JsonTrace>,
}

#[derive(Deserialize)]
struct TracePairDoc {
    a: JsonTrace,
    b: JsonTrace,
}

fn default_unital() -> bool {
    true
}

#[derive(Deserialize)]
struct GeneratorsDoc {
    generators: Vec<JsonMatrix>,
    #[serde(default = "default_unital")]
    unital: bool,
    ambient_dim: Option<usize>,
}

// report documents

#[derive(Serialize)]
pub struct Tolerances {
    pub eps_eq: f64,
    pub eps_psd: f64,
    pub eps_rank: f64,
}

impl Tolerances {
    fn of(pol: &TolerancePolicy) -> Self {
        Self { eps_eq: pol.eps_eq, eps_psd: pol.eps_psd, eps_rank: pol.eps_rank }
    }
}

/// One named residual check inside a report.
#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Deterministic verification report: key order is fixed, numbers serialize
/// with exact round-trip formatting, so identical inputs and seeds produce
/// byte-identical documents.
#[derive(Serialize)]
pub struct Report {
    pub pass: bool,
    pub checks: Vec<Check>,
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
}

/// Assemble a report document; the report passes iff every check does.
pub fn report(checks: Vec<Check>, pol: &TolerancePolicy, seed: Option<u64>) -> Report {
    Report { pass: checks.iter().all(|c| c.pass), checks, tolerances: Tolerances::of(pol), seed }
}

enum CliFailure {
    Input(String),
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        CliFailure::Input(e.to_string())
    }
}

struct Exec {
    doc: Value,
    exit: i32,
    out: Option<PathBuf>,
}

impl Exec {
    fn ok(doc: Value, out: Option<PathBuf>) -> Self {
        Self { doc, exit: 0, out }
    }

    fn verdict(doc: Value, pass: bool) -> Self {
        Self { doc, exit: if pass { 0 } else { 1 }, out: None }
    }
}

fn read_doc<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliFailure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliFailure::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliFailure::Input(format!("cannot parse {}: {e}", path.display())))
}

fn policy(eps: Option<f64>) -> Result<TolerancePolicy, CliFailure> {
    match eps {
        None => Ok(TolerancePolicy::default()),
        Some(e) => TolerancePolicy::uniform(e).map_err(CliFailure::from),
    }
}

fn units_value(sys: &MatrixUnitSystem) -> Value {
    serde_json::to_value(JsonUnits::from_system(sys)).expect("units serialize")
}

fn channel_value(ch: &Channel) -> Value {
    serde_json::to_value(JsonChannel::from_channel(ch)).expect("channel serialize")
}

fn algebra_value(alg: &StarSubalgebra) -> Value {
    json!({
        "ambient_dim": alg.ambient_dim(),
        "dimension": alg.dim(),
        "contains_unit": alg.contains_unit(),
        "basis": alg.basis().iter().map(JsonMatrix::from_matrix).collect::<Vec<_>>(),
    })
}

fn generators_input(doc: &GeneratorsDoc) -> Result<(usize, Vec<ComplexMatrix>), CliFailure> {
    let gens: Vec<ComplexMatrix> = doc
        .generators
        .iter()
        .map(|m| m.to_matrix())
        .collect::<Result<_, Error>>()?;
    let dim = match (gens.first(), doc.ambient_dim) {
        (Some(g), Some(d)) if g.dim() != d => {
            return Err(CliFailure::Input(format!(
                "ambient_dim {d} does not match generator dimension {}",
                g.dim()
            )))
        }
        (Some(g), _) => g.dim(),
        (None, Some(d)) => d,
        (None, None) => {
            return Err(CliFailure::Input(
                "empty generator list needs an explicit ambient_dim".into(),
            ))
        }
    };
    Ok((dim, gens))
}

fn execute(cmd: Command, pol: &TolerancePolicy) -> Result<Exec, CliFailure> {
    match cmd {
        Command::Units(c) => execute_units(c, pol),
        Command::Channel(c) => execute_channel(c, pol),
        Command::Trace(c) => execute_trace(c, pol),
        Command::Algebra(c) => execute_algebra(c, pol),
    }
}

fn execute_units(cmd: UnitsCmd, pol: &TolerancePolicy) -> Result<Exec, CliFailure> {
    match cmd {
        UnitsCmd::Standard { n, out } => {
            if n == 0 {
                return Err(CliFailure::Input("order must be at least 1".into()));
            }
            Ok(Exec::ok(units_value(&standard_units(n)), out))
        }
        UnitsCmd::Random { n, d, seed, out } => {
            let sys = random_unital_embedding(n, d, &mut seeded_rng(seed))?;
            Ok(Exec::ok(units_value(&sys), out))
        }
        UnitsCmd::FromUnitaries { input, out } => {
            let doc: UnitariesDoc = read_doc(&input)?;
            let unitaries: Vec<ComplexMatrix> = doc
                .unitaries
                .iter()
                .map(|m| m.to_matrix())
                .collect::<Result<_, Error>>()?;
            let sys = units_from_unitaries(doc.n, &unitaries, pol)?;
            Ok(Exec::ok(units_value(&sys), out))
        }
        UnitsCmd::Validate { input } => {
            let doc: JsonUnits = read_doc(&input)?;
            let sys = doc.to_system()?;
            let r = validate_units(&sys, pol);
            let rep = report(
                vec![Check {
                    name: "matrix-unit relations".into(),
                    pass: r.pass,
                    residual: r.max_residual,
                    tolerance: pol.eps_eq,
                    detail: Some(r.worst_relation),
                }],
                pol,
                None,
            );
            let pass = rep.pass;
            Ok(Exec::verdict(serde_json::to_value(rep).expect("report serialize"), pass))
        }
        UnitsCmd::Intertwine { input, out } => {
            let doc: UnitsPairDoc = read_doc(&input)?;
            let f = doc.f.to_system()?;
            let fp = doc.fp.to_system()?;
            let (u, max_residual) = intertwiner_checked(&f, &fp)?;
            Ok(Exec::ok(
                json!({
                    "u": JsonMatrix::from_matrix(&u),
                    "max_residual": max_residual,
                }),
                out,
            ))
        }
    }
}

fn execute_channel(cmd: ChannelCmd, pol: &TolerancePolicy) -> Result<Exec, CliFailure> {
    match cmd {
        ChannelCmd::Choi { input, out } => {
            let doc: ImagesDoc = read_doc(&input)?;
            if doc.images.len() != doc.n || doc.images.iter().any(|row| row.len() != doc.n) {
                return Err(CliFailure::Input(format!(
                    "expected an {0}×{0} array of images",
                    doc.n
                )));
            }
            let mut images = Vec::with_capacity(doc.n * doc.n);
            for row in &doc.images {
                for m in row {
                    images.push(m.to_matrix()?);
                }
            }
            let ch = Channel::from_images(doc.n, &images)?;
            Ok(Exec::ok(channel_value(&ch), out))
        }
        ChannelCmd::Apply { input, out } => {
            let doc: ApplyDoc = read_doc(&input)?;
            let ch = doc.channel.to_channel()?;
            let x = doc.x.to_matrix()?;
            let result = apply_choi(&ch, &x)?;
            Ok(Exec::ok(json!({ "result": JsonMatrix::from_matrix(&result) }), out))
        }
        ChannelCmd::Verify { input } => {
            let doc: JsonChannel = read_doc(&input)?;
            let ch = doc.to_channel()?;
            let r = verify_channel(&ch, pol)?;
            let pass = r.is_quantum_channel();
            let doc = json!({
                "cp": r.cp,
                "unital": r.unital,
                "tp": r.trace_preserving,
                "pass": pass,
                "min_eigenvalue": r.min_eigenvalue,
                "unital_residual": r.unital_residual,
                "tp_residual": r.tp_residual,
                "tolerances": Tolerances::of(pol),
            });
            Ok(Exec::verdict(doc, pass))
        }
        ChannelCmd::FromAncilla { input, out } => {
            let doc: FromAncillaDoc = read_doc(&input)?;
            let ancilla = FiniteTracialAlgebra::new(doc.ancilla.blocks, doc.ancilla.weights)?;
            let u = doc.u.to_matrix()?;
            let ch = channel_from_ancilla(&u, doc.n, &ancilla, pol)?;
            Ok(Exec::ok(channel_value(&ch), out))
        }
        ChannelCmd::Distance { input } => {
            let doc: ChannelPairDoc = read_doc(&input)?;
            let a = doc.a.to_channel()?;
            let b = doc.b.to_channel()?;
            let d = channel_distance(&a, &b)?;
            Ok(Exec::ok(json!({ "n": a.n(), "distance": d }), None))
        }
    }
}

fn execute_trace(cmd: TraceCmd, pol: &TolerancePolicy) -> Result<Exec, CliFailure> {
    match cmd {
        TraceCmd::Gen { n, blocks, weights, seed, out } => {
            let tr = random_trace(n, &blocks, &weights, pol, &mut seeded_rng(seed))?;
            Ok(Exec::ok(serde_json::to_value(JsonTrace::from_trace(&tr)?).expect("trace"), out))
        }
        TraceCmd::Phi { input, out } => {
            let doc: JsonTrace = read_doc(&input)?;
            let tr = doc.to_trace(pol)?;
            Ok(Exec::ok(channel_value(&phi(&tr)?), out))
        }
        TraceCmd::Correlate { input, out } => {
            let doc: JsonTrace = read_doc(&input)?;
            let tr = doc.to_trace(pol)?;
            let k = correlation_matrix(&tr)?;
            Ok(Exec::ok(
                json!({ "n": tr.n(), "correlations": JsonMatrix::from_matrix(k.as_matrix()) }),
                out,
            ))
        }
        TraceCmd::Decompose { input, seed, out } => {
            let doc: JsonTrace = read_doc(&input)?;
            let tr = doc.to_trace(pol)?;
            let parts = decompose_trace(&tr, pol, &mut seeded_rng(seed))?;
            let components = parts
                .iter()
                .map(|(w, t)| Ok(json!({ "weight": w, "trace": JsonTrace::from_trace(t)? })))
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(Exec::ok(json!({ "components": components }), out))
        }
        TraceCmd::Combine { input, weights, out } => {
            let doc: TraceListDoc = read_doc(&input)?;
            let traces = doc
                .traces
                .iter()
                .map(|t| t.to_trace(pol))
                .collect::<Result<Vec<_>, Error>>()?;
            let combined = convex_combine(&traces, &weights, pol)?;
            Ok(Exec::ok(
                serde_json::to_value(JsonTrace::from_trace(&combined)?).expect("trace"),
                out,
            ))
        }
        TraceCmd::Fiber { input } => {
            let doc: TracePairDoc = read_doc(&input)?;
            let a = doc.a.to_trace(pol)?;
            let b = doc.b.to_trace(pol)?;
            let same = same_phi_fiber(&a, &b, pol)?;
            let diff = correlation_matrix(&a)?.max_abs_diff(&correlation_matrix(&b)?);
            Ok(Exec::ok(json!({ "same_fiber": same, "max_difference": diff }), None))
        }
    }
}

fn execute_algebra(cmd: AlgebraCmd, pol: &TolerancePolicy) -> Result<Exec, CliFailure> {
    match cmd {
        AlgebraCmd::Span { input, out } => {
            let doc: GeneratorsDoc = read_doc(&input)?;
            let (dim, gens) = generators_input(&doc)?;
            let alg = generated_algebra(dim, &gens, doc.unital, pol)?;
            Ok(Exec::ok(algebra_value(&alg), out))
        }
        AlgebraCmd::Commutant { input, out } => {
            let doc: GeneratorsDoc = read_doc(&input)?;
            let (dim, gens) = generators_input(&doc)?;
            let alg = generated_algebra(dim, &gens, doc.unital, pol)?;
            let comm = commutant(&alg, pol)?;
            Ok(Exec::ok(algebra_value(&comm), out))
        }
        AlgebraCmd::Blocks { input, seed, out } => {
            let doc: GeneratorsDoc = read_doc(&input)?;
            let (dim, gens) = generators_input(&doc)?;
            let alg = generated_algebra(dim, &gens, true, pol)?;
            let bs = block_structure(&alg, pol, &mut seeded_rng(seed))?;
            Ok(Exec::ok(
                json!({
                    "blocks": bs.blocks,
                    "central_projections":
                        bs.central_projections.iter().map(JsonMatrix::from_matrix).collect::<Vec<_>>(),
                }),
                out,
            ))
        }
    }
}

fn emit(doc: &Value, out: Option<&Path>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(doc).expect("documents serialize");
    println!("{text}");
    if let Some(path) = out {
        std::fs::write(path, format!("{text}\n"))?;
    }
    Ok(())
}

/// Parse arguments, run the command, print the result document, and return
/// the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let pol = match policy(cli.eps) {
        Ok(p) => p,
        Err(CliFailure::Input(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    match execute(cli.cmd, &pol) {
        Ok(exec) => {
            if let Err(e) = emit(&exec.doc, exec.out.as_deref()) {
                eprintln!("error: cannot write output: {e}");
                return 2;
            }
            exec.exit
        }
        Err(CliFailure::Input(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
