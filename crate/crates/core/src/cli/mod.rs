//! Batch front-end behind the `eo` binary.
//!
//! Every command builds a serializable report; text output is a formatting layer
//! over the same report. Errors carry a stable kind name and an exit code:
//! 2 for unreadable input, 3 for domain violations, 4 for internal failures.

mod search;

pub use search::{cmd_search, Predicate, SearchHit, SearchReport, SearchSpec, SearchStats, NORMAL_FORM_G4};

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::curves::{hasse_witt_hyperelliptic, hw_partition, CurveError, HyperellipticCurve};
use crate::dieudonne::{
    final_type, module_delta, module_from_triple, validate_module, DieudonneModule, HasseWittTriple, ModuleError,
};
use crate::eo_comb::{
    delta_from_nu, delta_mu_table, diagram_stats, enumerate_final_types, mu_candidates, mu_from_nu, CombError,
    FinalType, HWPartition, YoungDiagram,
};
use crate::field::FieldError;
use crate::semilinear::MatrixError;
use crate::stable::{stable_invariants, InvariantReport, MuLevel, StableCurveGraph, StableError};

/// Largest genus accepted by [`cmd_table`].
pub const MAX_TABLE_GENUS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorClass {
    Parse,
    Domain,
    Internal,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Parse => 2,
            ErrorClass::Domain => 3,
            ErrorClass::Internal => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliError {
    pub kind: String,
    pub class: ErrorClass,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    fn new(class: ErrorClass, kind: &str, message: String) -> Self {
        CliError { kind: kind.to_string(), class, message, violations: Vec::new() }
    }

    pub fn parse(kind: &str, message: String) -> Self {
        Self::new(ErrorClass::Parse, kind, message)
    }

    pub fn domain(kind: &str, message: String) -> Self {
        Self::new(ErrorClass::Domain, kind, message)
    }

    pub fn internal(message: String) -> Self {
        Self::new(ErrorClass::Internal, "InternalError", message)
    }

    fn with_violations(mut self, vs: Vec<String>) -> Self {
        self.violations = vs;
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.class.exit_code()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "error": self.kind,
            "class": self.class,
            "exit_code": self.exit_code(),
            "message": self.message,
            "violations": self.violations,
        })
    }
}

fn field_kind(e: &FieldError) -> &'static str {
    match e {
        FieldError::NonPrime(_) => "NonPrime",
        FieldError::DegreeZero => "DegreeZero",
        FieldError::FieldTooLarge { .. } => "FieldTooLarge",
        FieldError::DivisionByZero => "DivisionByZero",
        FieldError::FieldMismatch { .. } => "FieldMismatch",
        FieldError::InvalidElement { .. } => "InvalidElement",
        FieldError::NotASubfield { .. } => "NotASubfield",
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        let class = match e {
            FieldError::InvalidElement { .. } => ErrorClass::Parse,
            FieldError::DivisionByZero | FieldError::FieldMismatch { .. } => ErrorClass::Internal,
            _ => ErrorClass::Domain,
        };
        Self::new(class, field_kind(&e), e.to_string())
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::Field(f) => f.into(),
            MatrixError::NotSquare { .. } => Self::domain("NotSquare", e.to_string()),
            MatrixError::DimensionMismatch(_) => Self::parse("DimensionMismatch", e.to_string()),
            MatrixError::DegenerateForm | MatrixError::Singular => Self::domain("Degenerate", e.to_string()),
        }
    }
}

impl From<CombError> for CliError {
    fn from(e: CombError) -> Self {
        let kind = match e {
            CombError::InvalidFinalType { .. } => "InvalidFinalType",
            CombError::InvalidDiagram(_) => "InvalidDiagram",
            CombError::InvalidPartition(_) => "InvalidPartition",
            CombError::PartExceedsG { .. } => "PartExceedsG",
            CombError::DeltaExceedsG { .. } => "DeltaExceedsG",
            CombError::GTooLarge { .. } => "GTooLarge",
        };
        Self::domain(kind, e.to_string())
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::Field(f) => f.into(),
            CurveError::Matrix(m) => m.into(),
            CurveError::Format(_) => Self::parse("Format", e.to_string()),
            CurveError::EvenCharacteristic => Self::domain("EvenCharacteristic", e.to_string()),
            CurveError::NotSquarefree => Self::domain("NotSquarefree", e.to_string()),
            CurveError::DegreeOutOfRange(_) => Self::domain("DegreeOutOfRange", e.to_string()),
            CurveError::NotPrimeField => Self::domain("NotPrimeField", e.to_string()),
            CurveError::GenusNotOne(_) => Self::domain("GenusNotOne", e.to_string()),
        }
    }
}

impl From<ModuleError> for CliError {
    fn from(e: ModuleError) -> Self {
        let msg = e.to_string();
        match e {
            ModuleError::Field(f) => f.into(),
            ModuleError::Matrix(m) => m.into(),
            ModuleError::Format(_) => Self::parse("Format", msg),
            ModuleError::InvalidModule(vs) => {
                Self::domain("InvalidModule", msg).with_violations(vs.iter().map(|v| v.to_string()).collect())
            }
            ModuleError::InvalidTriple(_) => Self::domain("InvalidTriple", msg),
            ModuleError::EmptySum => Self::domain("EmptySum", msg),
            ModuleError::ConstructionAxiomFailure(vs) => Self::new(ErrorClass::Internal, "ConstructionAxiomFailure", msg)
                .with_violations(vs.iter().map(|v| v.to_string()).collect()),
            ModuleError::NotAChain => Self::new(ErrorClass::Internal, "NotAChain", msg),
            ModuleError::GradedPieceNotZeroOrBijective { .. } => {
                Self::new(ErrorClass::Internal, "GradedPieceNotZeroOrBijective", msg)
            }
            ModuleError::RefinementNotFound => Self::new(ErrorClass::Internal, "RefinementNotFound", msg),
            ModuleError::InternalInconsistency(_) => Self::new(ErrorClass::Internal, "InternalInconsistency", msg),
        }
    }
}

impl From<StableError> for CliError {
    fn from(e: StableError) -> Self {
        let msg = e.to_string();
        match e {
            StableError::InvalidGraph(vs) => {
                Self::domain("InvalidGraph", msg).with_violations(vs.iter().map(|v| v.to_string()).collect())
            }
            StableError::MissingPayload(_) => Self::domain("MissingPayload", msg),
            StableError::Format(_) => Self::parse("Format", msg),
            StableError::Curve { source, .. } => CliError { message: msg, ..source.into() },
            StableError::Module { source, .. } => CliError { message: msg, ..source.into() },
            StableError::Comb(c) => c.into(),
            StableError::Field(f) => f.into(),
        }
    }
}

/// Reads and parses a JSON file.
pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse("Io", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse("Json", format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveReport {
    pub p: u32,
    pub k: u32,
    pub genus: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hasse_witt: Option<Value>,
    pub rho: Vec<u32>,
    pub delta: HWPartition,
    pub p_rank: u32,
    pub a_number: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<YoungDiagram>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_candidates: Option<Vec<YoungDiagram>>,
}

/// Hasse-Witt invariants of a curve; `μ` is exact only when `δ` determines it.
pub fn cmd_curve(input: &Value, emit_matrix: bool) -> Result<CurveReport, CliError> {
    let curve = HyperellipticCurve::from_json(input)?;
    let h = hasse_witt_hyperelliptic(&curve);
    let r = hw_partition(&h)?;
    let g = curve.genus();
    let cands = mu_candidates(&r.delta, g)?;
    let (mu, mu_candidates) = if cands.len() == 1 {
        (cands.into_iter().next(), None)
    } else {
        (None, Some(cands.into_iter().collect()))
    };
    Ok(CurveReport {
        p: curve.field().characteristic(),
        k: curve.field().degree(),
        genus: g,
        hasse_witt: emit_matrix.then(|| h.to_json()),
        rho: r.rho,
        delta: r.delta,
        p_rank: r.p_rank,
        a_number: r.a_number,
        mu,
        mu_candidates,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleReport {
    pub p: u32,
    pub k: u32,
    pub g: usize,
    /// `"module"` or `"triple"`.
    pub input: &'static str,
    pub valid: bool,
    pub nu: FinalType,
    pub mu: YoungDiagram,
    pub delta: HWPartition,
    pub p_rank: u32,
    pub a_number: u32,
}

/// Accepts module JSON (`F`, `V`, `b`) or triple JSON (`Phi`, optional `kernel_basis`, `Psi`).
pub fn cmd_module(input: &Value) -> Result<ModuleReport, CliError> {
    let (d, kind) = if input.get("Phi").is_some() {
        let t = HasseWittTriple::from_json(input)?;
        (module_from_triple(&t)?, "triple")
    } else {
        (DieudonneModule::from_json(input)?, "module")
    };
    let violations = validate_module(&d);
    if !violations.is_empty() {
        return Err(ModuleError::InvalidModule(violations).into());
    }
    let nu = final_type(&d)?;
    let delta = module_delta(&d)?;
    let (nu_delta, _) = delta_from_nu(&nu);
    if nu_delta != delta {
        return Err(CliError::internal(format!("δ from V-ranks {delta} differs from δ(ν) {nu_delta}")));
    }
    Ok(ModuleReport {
        p: d.field().characteristic(),
        k: d.field().degree(),
        g: d.g(),
        input: kind,
        valid: true,
        mu: mu_from_nu(&nu),
        nu,
        p_rank: delta.p_rank(),
        a_number: delta.a_number(),
        delta,
    })
}

pub fn cmd_stable(input: &Value) -> Result<InvariantReport, CliError> {
    let graph = StableCurveGraph::from_json(input)?;
    Ok(stable_invariants(&graph)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerateEntry {
    pub nu: FinalType,
    pub mu: YoungDiagram,
    pub delta: HWPartition,
    pub p_rank: u32,
    pub a_number: u32,
    pub codim: u32,
}

/// All final types of genus `g` in lexicographic order, optionally those with Hasse-Witt partition `delta`.
pub fn cmd_enumerate(g: u32, delta: Option<&[u32]>) -> Result<Vec<EnumerateEntry>, CliError> {
    let filter = delta.map(|d| HWPartition::new(d.to_vec(), g)).transpose()?;
    let mut out = Vec::new();
    for nu in enumerate_final_types(g)? {
        let (d, _) = delta_from_nu(&nu);
        if filter.as_ref().is_some_and(|f| *f != d) {
            continue;
        }
        let mu = mu_from_nu(&nu);
        let stats = diagram_stats(&mu, g)?;
        out.push(EnumerateEntry {
            nu,
            mu,
            delta: d,
            p_rank: stats.p_rank,
            a_number: stats.a_number,
            codim: stats.codim,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub delta: HWPartition,
    pub mu: Vec<YoungDiagram>,
}

/// p-rank-0 rows `δ ↦ {μ}` of genus `g` in lexicographic order of `δ`.
pub fn cmd_table(g: u32) -> Result<Vec<TableRow>, CliError> {
    if g > MAX_TABLE_GENUS {
        return Err(CombError::GTooLarge { g, max: MAX_TABLE_GENUS }.into());
    }
    Ok(delta_mu_table(g)?
        .into_iter()
        .map(|(delta, mus)| TableRow { delta, mu: mus.into_iter().collect() })
        .collect())
}

fn list(items: &[impl ToString]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// `a`, `a or b`, `a, b, or c`.
fn alternatives(mus: &[YoungDiagram]) -> String {
    let s: Vec<String> = mus.iter().map(|m| m.to_string()).collect();
    match s.as_slice() {
        [] => String::new(),
        [one] => one.clone(),
        [a, b] => format!("{a} or {b}"),
        [init @ .., last] => format!("{}, or {last}", init.join(", ")),
    }
}

pub fn format_table(rows: &[TableRow]) -> String {
    let width = rows.iter().map(|r| r.delta.to_string().chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for r in rows {
        let d = r.delta.to_string();
        let pad = width - d.chars().count();
        writeln!(out, "δ = {d}{}  μ = {}", " ".repeat(pad), alternatives(&r.mu)).expect("string");
    }
    out
}

fn mu_line(mu: &Option<YoungDiagram>, cands: &Option<Vec<YoungDiagram>>) -> String {
    match (mu, cands) {
        (Some(m), _) => m.to_string(),
        (None, Some(c)) => format!("one of {}", alternatives(c)),
        (None, None) => "unknown".into(),
    }
}

pub fn format_curve(r: &CurveReport) -> String {
    let mut out = String::new();
    let field = if r.k == 1 { format!("F_{}", r.p) } else { format!("F_{}^{}", r.p, r.k) };
    writeln!(out, "genus     {} over {field}", r.genus).expect("string");
    if let Some(Value::Array(rows)) = &r.hasse_witt {
        writeln!(out, "H").expect("string");
        for row in rows {
            writeln!(out, "  {row}").expect("string");
        }
    }
    writeln!(out, "rho       {}", list(&r.rho)).expect("string");
    writeln!(out, "delta     {}", r.delta).expect("string");
    writeln!(out, "p-rank    {}", r.p_rank).expect("string");
    writeln!(out, "a-number  {}", r.a_number).expect("string");
    writeln!(out, "mu        {}", mu_line(&r.mu, &r.mu_candidates)).expect("string");
    out
}

pub fn format_module(r: &ModuleReport) -> String {
    format!(
        "valid {} of genus {}\nnu        {}\nmu        {}\ndelta     {}\np-rank    {}\na-number  {}\n",
        r.input, r.g, r.nu, r.mu, r.delta, r.p_rank, r.a_number
    )
}

pub fn format_stable(r: &InvariantReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "genus     {} ({} vertices, {} edges, {} loops)",
        r.genus, r.vertices, r.edges, r.loops
    )
    .expect("string");
    writeln!(out, "rho       {}", list(&r.rho)).expect("string");
    writeln!(out, "delta     {}", r.delta).expect("string");
    writeln!(out, "p-rank    {}", r.p_rank).expect("string");
    writeln!(out, "a-number  {}", r.a_number).expect("string");
    let level = match r.mu_level {
        MuLevel::Module => "from modules",
        MuLevel::Reconstructed => "reconstructed",
        MuLevel::Candidates => "candidates",
    };
    writeln!(out, "mu        {} ({level})", mu_line(&r.mu, &r.mu_candidates)).expect("string");
    for c in &r.components {
        writeln!(
            out,
            "  {}: genus {}, {}, delta {}, mu {}",
            c.id,
            c.genus,
            c.source,
            c.delta,
            alternatives(&c.mu_candidates)
        )
        .expect("string");
    }
    out
}

pub fn format_enumerate(entries: &[EnumerateEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        writeln!(
            out,
            "ν = {}  μ = {}  δ = {}  p-rank {}  a-number {}  codim {}",
            e.nu, e.mu, e.delta, e.p_rank, e.a_number, e.codim
        )
        .expect("string");
    }
    out
}

pub fn format_search(r: &SearchReport) -> String {
    let mut out = String::new();
    writeln!(out, "family    {} over p = {}, k = {}", r.family, r.p, r.k).expect("string");
    writeln!(
        out,
        "checked   {} of {} tuples ({} singular, {} evaluated)",
        r.stats.candidates, r.total_candidates, r.stats.singular, r.stats.evaluated
    )
    .expect("string");
    for (delta, n) in &r.stats.delta_counts {
        writeln!(out, "  δ = {delta}: {n}").expect("string");
    }
    writeln!(out, "hits      {}", r.hit_count).expect("string");
    for h in &r.hits {
        writeln!(out, "  a = {}  δ = {:?}", Value::from(h.a.clone()), h.delta).expect("string");
    }
    out
}

/// Comma-separated positive parts; an empty string or `0` is the empty partition.
pub fn parse_parts(s: &str) -> Result<Vec<u32>, String> {
    let s = s.trim();
    if s.is_empty() || s == "0" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|e| format!("invalid part \"{t}\": {e}")))
        .collect()
}

fn parts_arg(s: &str) -> Result<Vec<u32>, CliError> {
    parse_parts(s).map_err(|m| CliError::parse("InvalidArgument", m))
}

#[derive(Debug, Parser)]
#[command(name = "eo", about = "Ekedahl-Oort invariants of curves, Dieudonné modules and stable curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hasse-Witt invariants of a hyperelliptic curve file.
    Curve {
        file: PathBuf,
        #[arg(long)]
        emit_matrix: bool,
        #[arg(long)]
        json: bool,
    },
    /// Validate a Dieudonné module or Hasse-Witt triple file and report its type.
    Module {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Invariants of a stable curve given by its dual graph.
    Stable {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// List all final types of genus G.
    Enumerate {
        #[arg(long)]
        g: u32,
        /// Comma-separated parts, e.g. `2,1`.
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Correspondence between Hasse-Witt partitions and Young diagrams at p-rank 0.
    Table {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive search over the genus-4 normal form.
    Search {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value = NORMAL_FORM_G4)]
        family: String,
        /// Comma-separated parts, e.g. `2,1`.
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        rank_h: Option<u32>,
        #[arg(long)]
        vanish_at: Option<u32>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        max_prefixes: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

fn render<T: Serialize>(report: &T, json: bool, text: impl FnOnce(&T) -> String) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(report).expect("serializable");
        s.push('\n');
        s
    } else {
        text(report)
    }
}

/// Executes a parsed command and returns its stdout text.
pub fn execute(command: Command) -> Result<String, CliError> {
    match command {
        Command::Curve { file, emit_matrix, json } => {
            let r = cmd_curve(&read_json(&file)?, emit_matrix)?;
            Ok(render(&r, json, format_curve))
        }
        Command::Module { file, json } => Ok(render(&cmd_module(&read_json(&file)?)?, json, format_module)),
        Command::Stable { file, json } => Ok(render(&cmd_stable(&read_json(&file)?)?, json, format_stable)),
        Command::Enumerate { g, delta, json } => {
            let delta = delta.as_deref().map(parts_arg).transpose()?;
            let r = cmd_enumerate(g, delta.as_deref())?;
            Ok(render(&r, json, |r| format_enumerate(r)))
        }
        Command::Table { g, json } => Ok(render(&cmd_table(g)?, json, |r| format_table(r))),
        Command::Search { p, k, family, delta, rank_h, vanish_at, threads, checkpoint, max_prefixes, json } => {
            let delta = delta.as_deref().map(parts_arg).transpose()?;
            let spec = SearchSpec {
                p,
                k,
                family,
                predicate: Predicate { delta, rank_h, vanishes_at: vanish_at },
                threads,
                checkpoint,
                max_prefixes,
            };
            Ok(render(&cmd_search(&spec)?, json, format_search))
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
/// Reports go to `out`; usage errors and error JSON go to `err`.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { ErrorClass::Parse.exit_code() } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "{}", e.to_json());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(p: u32, f: &[i64]) -> Value {
        json!({"p": p, "k": 1, "model": "hyperelliptic", "f": f})
    }

    #[test]
    fn curve_examples() {
        let r = cmd_curve(&curve(3, &[0, 1, 0, 0, 0, 0, 0, 0, 0, 1]), false).unwrap();
        assert_eq!(r.delta.parts(), &[2, 2]);
        assert_eq!((r.p_rank, r.a_number), (0, 2));
        assert_eq!(r.mu.unwrap().parts(), &[4, 3]);
        let r = cmd_curve(&curve(3, &[0, 2, 0, 1]), true).unwrap();
        assert_eq!(r.delta.parts(), &[1]);
        assert_eq!(r.p_rank, 0);
        assert_eq!(r.mu.unwrap().parts(), &[1]);
        assert_eq!(r.hasse_witt, Some(json!([[0]])));
        let e = cmd_curve(&curve(3, &[0, 0, 1, 1]), false).unwrap_err();
        assert_eq!((e.kind.as_str(), e.exit_code()), ("NotSquarefree", 3));
        let e = cmd_curve(&json!({"p": 3, "f": "x"}), false).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn module_examples() {
        let ord = crate::dieudonne::ordinary_module(&crate::field::make_field(5, 1).unwrap(), 2);
        let r = cmd_module(&ord.to_json()).unwrap();
        assert_eq!(r.nu.values(), &[1, 2]);
        assert!(r.mu.is_empty());
        let zero = vec![vec![0; 4]; 4];
        let bad = json!({"p": 5, "k": 1, "g": 2, "F": zero, "V": zero,
            "b": [[0, 0, 0, 1], [0, 0, 1, 0], [0, 4, 0, 0], [4, 0, 0, 0]]});
        let e = cmd_module(&bad).unwrap_err();
        assert_eq!((e.kind.as_str(), e.exit_code()), ("InvalidModule", 3));
        assert!(!e.violations.is_empty());
        let t = cmd_module(&json!({"p": 3, "k": 1, "g": 1, "Phi": [[0]]})).unwrap();
        assert_eq!((t.input, t.mu.parts()), ("triple", &[1][..]));
    }

    #[test]
    fn table_and_enumerate() {
        let rows = cmd_table(2).unwrap();
        assert_eq!(format_table(&rows), "δ = 11  μ = [2]\nδ = 2   μ = [2, 1]\n");
        let rows = cmd_table(4).unwrap();
        let row = rows.iter().find(|r| r.delta.parts() == [3, 1]).unwrap();
        assert_eq!(alternatives(&row.mu), "[4, 2, 1], [4, 3, 1], or [4, 3, 2]");
        assert_eq!(cmd_table(11).unwrap_err().kind, "GTooLarge");
        let e = cmd_enumerate(1, None).unwrap();
        let nus: Vec<&[u32]> = e.iter().map(|x| x.nu.values()).collect();
        assert_eq!(nus, vec![&[0][..], &[1][..]]);
        assert_eq!(cmd_enumerate(3, Some(&[2, 1])).unwrap().len(), 2);
        assert_eq!(cmd_enumerate(21, None).unwrap_err().kind, "GTooLarge");
    }

    #[test]
    fn parts_parsing() {
        assert_eq!(parse_parts("2,2"), Ok(vec![2, 2]));
        assert_eq!(parse_parts(""), Ok(vec![]));
        assert!(parse_parts("2,x").is_err());
    }

    #[test]
    fn run_exit_codes() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["eo", "table", "--g", "1"], &mut out, &mut err), 0);
        assert_eq!(String::from_utf8(out).unwrap(), "δ = 1  μ = [1]\n");
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["eo", "table"], &mut out, &mut err), 2);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["eo", "curve", "/nonexistent/file.json"], &mut out, &mut err), 2);
        let e: Value = serde_json::from_slice(&err).unwrap();
        assert_eq!(e["error"], "Io");
    }
}
