//! Stable curves given by dual graphs.
//!
//! Vertices are the normalized components (genus plus an optional payload), edges
//! are nodes. With `n` vertices and `m` edges the graph has `l = m − n + 1` loops,
//! the toric rank of the generalized Jacobian. The normalization `C̃` is the
//! disjoint union of the components; the invariants obey
//!
//! * `g(C) = Σ g_i + l`,
//! * `ρ_j(C) = ρ_j(C̃) + l` for `j ≥ 1`, hence `δ(C) = δ(C̃)` and `f(C) = f(C̃) + l`,
//! * `δ_j(C̃) = Σ_i δ_j^{(i)}`,
//! * the module of `C` is `D_{l,ord} ⊕ ⨁ D_i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::curves::{hasse_witt_hyperelliptic, hw_partition, CurveError, HyperellipticCurve};
use crate::dieudonne::{
    direct_sum, final_type, module_delta, ordinary_module, standard_module, DieudonneModule, ModuleError,
};
use crate::eo_comb::{mu_candidates, mu_from_nu, nu_from_mu, truncate_ranks, CombError, HWPartition, YoungDiagram};
use crate::field::{make_field, FieldError, FiniteField};

/// Largest number of component type combinations tried when resolving `μ(C)`.
const MAX_COMBINATIONS: usize = 4096;

/// Data attached to a positive-genus vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Curve(HyperellipticCurve),
    Module(DieudonneModule),
    Delta(HWPartition),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Curve(_) => "hyperelliptic",
            Payload::Module(_) => "module",
            Payload::Delta(_) => "delta",
        }
    }

    fn genus(&self) -> u32 {
        match self {
            Payload::Curve(c) => c.genus(),
            Payload::Module(d) => d.g() as u32,
            Payload::Delta(d) => d.ambient_g(),
        }
    }

    fn field(&self) -> Option<&FiniteField> {
        match self {
            Payload::Curve(c) => Some(c.field()),
            Payload::Module(d) => Some(d.field()),
            Payload::Delta(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub genus: u32,
    pub payload: Option<Payload>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableCurveGraph {
    pub field: FiniteField,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum GraphViolation {
    NoVertices,
    DuplicateId { id: String },
    UnknownVertex { id: String },
    Disconnected,
    Unstable { id: String, incidence: usize },
    PayloadGenus { id: String, vertex_genus: u32, payload_genus: u32 },
    PayloadOnGenusZero { id: String },
    FieldMismatch { id: String },
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphViolation::NoVertices => write!(f, "graph has no vertices"),
            GraphViolation::DuplicateId { id } => write!(f, "duplicate vertex id {id}"),
            GraphViolation::UnknownVertex { id } => write!(f, "edge references unknown vertex {id}"),
            GraphViolation::Disconnected => write!(f, "graph is not connected"),
            GraphViolation::Unstable { id, incidence } => {
                write!(f, "genus-0 vertex {id} has incidence {incidence} < 3")
            }
            GraphViolation::PayloadGenus { id, vertex_genus, payload_genus } => write!(
                f,
                "vertex {id} has genus {vertex_genus} but its payload has genus {payload_genus}"
            ),
            GraphViolation::PayloadOnGenusZero { id } => write!(f, "genus-0 vertex {id} carries a payload"),
            GraphViolation::FieldMismatch { id } => write!(f, "payload of vertex {id} is over another field"),
        }
    }
}

fn join(vs: &[GraphViolation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StableError {
    #[error("invalid stable graph: {}", join(.0))]
    InvalidGraph(Vec<GraphViolation>),
    #[error("vertex {0} has positive genus but no payload")]
    MissingPayload(String),
    #[error("malformed stable curve description: {0}")]
    Format(String),
    #[error("vertex {id}: {source}")]
    Curve { id: String, source: CurveError },
    #[error("vertex {id}: {source}")]
    Module { id: String, source: ModuleError },
    #[error(transparent)]
    Comb(#[from] CombError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `n`, `m`, `l = m − n + 1` and `g = Σ g_i + l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphCounts {
    pub vertices: usize,
    pub edges: usize,
    pub loops: usize,
    pub genus: u32,
}

/// Success carries the counts; failure lists every violation.
pub fn validate_stable_graph(gr: &StableCurveGraph) -> Result<GraphCounts, Vec<GraphViolation>> {
    let mut out = Vec::new();
    if gr.vertices.is_empty() {
        return Err(vec![GraphViolation::NoVertices]);
    }
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, v) in gr.vertices.iter().enumerate() {
        if index.insert(&v.id, i).is_some() {
            out.push(GraphViolation::DuplicateId { id: v.id.clone() });
        }
    }
    let mut incidence = vec![0usize; gr.vertices.len()];
    let mut parent: Vec<usize> = (0..gr.vertices.len()).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in &gr.edges {
        let ia = index.get(a.as_str()).copied();
        let ib = index.get(b.as_str()).copied();
        for (id, ix) in [(a, ia), (b, ib)] {
            if ix.is_none() {
                out.push(GraphViolation::UnknownVertex { id: id.clone() });
            }
        }
        if let (Some(ia), Some(ib)) = (ia, ib) {
            incidence[ia] += 1;
            incidence[ib] += 1;
            let (ra, rb) = (root(&mut parent, ia), root(&mut parent, ib));
            parent[ra] = rb;
        }
    }
    let r0 = root(&mut parent, 0);
    if (1..gr.vertices.len()).any(|i| root(&mut parent, i) != r0) {
        out.push(GraphViolation::Disconnected);
    }
    for (v, &inc) in gr.vertices.iter().zip(&incidence) {
        if v.genus == 0 && inc < 3 {
            out.push(GraphViolation::Unstable { id: v.id.clone(), incidence: inc });
        }
        match &v.payload {
            Some(_) if v.genus == 0 => out.push(GraphViolation::PayloadOnGenusZero { id: v.id.clone() }),
            Some(p) => {
                if p.genus() != v.genus {
                    out.push(GraphViolation::PayloadGenus {
                        id: v.id.clone(),
                        vertex_genus: v.genus,
                        payload_genus: p.genus(),
                    });
                }
                if p.field().is_some_and(|k| *k != gr.field) {
                    out.push(GraphViolation::FieldMismatch { id: v.id.clone() });
                }
            }
            None => {}
        }
    }
    if !out.is_empty() {
        return Err(out);
    }
    let loops = gr.edges.len() + 1 - gr.vertices.len();
    Ok(GraphCounts {
        vertices: gr.vertices.len(),
        edges: gr.edges.len(),
        loops,
        genus: gr.vertices.iter().map(|v| v.genus).sum::<u32>() + loops as u32,
    })
}

/// Components of the normalization with the loop count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalization {
    pub components: Vec<Vertex>,
    pub loops: usize,
    pub genus: u32,
}

pub fn normalize(gr: &StableCurveGraph) -> Result<Normalization, StableError> {
    let counts = validate_stable_graph(gr).map_err(StableError::InvalidGraph)?;
    Ok(Normalization {
        components: gr.vertices.clone(),
        loops: counts.loops,
        genus: counts.genus,
    })
}

/// How `μ(C)` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MuLevel {
    /// Every positive-genus component carries a module.
    Module,
    /// Components without modules have EO types pinned down by their δ, or all
    /// admissible combinations agree.
    Reconstructed,
    /// Only a candidate set is known.
    Candidates,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub id: String,
    pub genus: u32,
    /// Payload kind, or `"none"` for genus 0.
    pub source: &'static str,
    pub delta: HWPartition,
    pub p_rank: u32,
    pub a_number: u32,
    /// Possible `μ` of the component; a singleton for module payloads.
    pub mu_candidates: Vec<YoungDiagram>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub genus: u32,
    pub vertices: usize,
    pub edges: usize,
    pub loops: usize,
    pub rho: Vec<u32>,
    pub delta: HWPartition,
    pub p_rank: u32,
    pub a_number: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<YoungDiagram>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_candidates: Option<Vec<YoungDiagram>>,
    pub mu_level: MuLevel,
    pub components: Vec<ComponentReport>,
}

struct Component<'a> {
    vertex: &'a Vertex,
    rho: Vec<u32>,
    delta: HWPartition,
    module: Option<&'a DieudonneModule>,
    candidates: BTreeSet<YoungDiagram>,
}

impl Component<'_> {
    /// `ρ_j`, constant after the recorded sequence ends.
    fn rank(&self, j: usize) -> u32 {
        *self.rho.get(j).unwrap_or_else(|| self.rho.last().expect("nonempty"))
    }
}

fn analyze(v: &Vertex) -> Result<Option<Component<'_>>, StableError> {
    if v.genus == 0 {
        return Ok(None);
    }
    let payload = v.payload.as_ref().ok_or_else(|| StableError::MissingPayload(v.id.clone()))?;
    let g = v.genus;
    let module_err = |source| StableError::Module { id: v.id.clone(), source };
    let (rho, delta, module, candidates) = match payload {
        Payload::Curve(c) => {
            let r = hw_partition(&hasse_witt_hyperelliptic(c))
                .map_err(|source| StableError::Curve { id: v.id.clone(), source })?;
            let cands = mu_candidates(&r.delta, g)?;
            (r.rho, r.delta, None, cands)
        }
        Payload::Module(d) => {
            let delta = module_delta(d).map_err(module_err)?;
            let mu = mu_from_nu(&final_type(d).map_err(module_err)?);
            (delta.ranks(), delta, Some(d), BTreeSet::from([mu]))
        }
        Payload::Delta(delta) => {
            let cands = mu_candidates(delta, g)?;
            (delta.ranks(), delta.clone(), None, cands)
        }
    };
    Ok(Some(Component { vertex: v, rho, delta, module, candidates }))
}

/// Curve-level `δ`, `ρ`, p-rank, a-number and `μ` (exact or as a candidate set).
pub fn stable_invariants(gr: &StableCurveGraph) -> Result<InvariantReport, StableError> {
    let norm = normalize(gr)?;
    let l = norm.loops as u32;
    let g = norm.genus;
    let mut comps = Vec::new();
    for v in &norm.components {
        if let Some(c) = analyze(v)? {
            comps.push(c);
        }
    }

    let delta_tilde = comps
        .iter()
        .fold(HWPartition::new(Vec::new(), 0).expect("empty"), |acc, c| acc.componentwise_sum(&c.delta));
    let rho = truncate_ranks(g, |j| comps.iter().map(|c| c.rank(j)).sum::<u32>() + l);
    let delta = HWPartition::from_ranks(&rho).expect("sums of rank sequences are non-increasing");
    debug_assert_eq!(delta.parts(), delta_tilde.parts());
    let p_rank = *rho.last().expect("nonempty");
    let a_number = delta.a_number();

    let (mu, mu_cands, level) = resolve_mu(&gr.field, l, g, &delta, &comps)?;

    let components = norm
        .components
        .iter()
        .map(|v| match comps.iter().find(|c| c.vertex.id == v.id) {
            Some(c) => ComponentReport {
                id: v.id.clone(),
                genus: v.genus,
                source: v.payload.as_ref().map_or("none", Payload::kind),
                delta: c.delta.clone(),
                p_rank: c.delta.p_rank(),
                a_number: c.delta.a_number(),
                mu_candidates: c.candidates.iter().cloned().collect(),
            },
            None => ComponentReport {
                id: v.id.clone(),
                genus: 0,
                source: "none",
                delta: HWPartition::new(Vec::new(), 0).expect("empty"),
                p_rank: 0,
                a_number: 0,
                mu_candidates: vec![YoungDiagram::empty()],
            },
        })
        .collect();

    Ok(InvariantReport {
        genus: g,
        vertices: gr.vertices.len(),
        edges: gr.edges.len(),
        loops: norm.loops,
        rho,
        delta,
        p_rank,
        a_number,
        mu,
        mu_candidates: mu_cands,
        mu_level: level,
        components,
    })
}

type MuResolution = (Option<YoungDiagram>, Option<Vec<YoungDiagram>>, MuLevel);

fn resolve_mu(
    field: &FiniteField,
    l: u32,
    g: u32,
    delta: &HWPartition,
    comps: &[Component<'_>],
) -> Result<MuResolution, StableError> {
    if g == 0 {
        return Ok((Some(YoungDiagram::empty()), None, MuLevel::Reconstructed));
    }
    let combinations: usize = comps.iter().map(|c| c.candidates.len()).product();
    if combinations > MAX_COMBINATIONS {
        let set = mu_candidates(delta, g)?;
        return Ok((None, Some(set.into_iter().collect()), MuLevel::Candidates));
    }
    let options: Vec<Vec<DieudonneModule>> = comps
        .iter()
        .map(|c| match c.module {
            Some(d) => Ok(vec![d.clone()]),
            None => c
                .candidates
                .iter()
                .map(|mu| {
                    let nu = nu_from_mu(mu, c.vertex.genus)?;
                    standard_module(field, &nu).map_err(|source| StableError::Module { id: c.vertex.id.clone(), source })
                })
                .collect(),
        })
        .collect::<Result<_, StableError>>()?;
    let mut found = BTreeSet::new();
    let mut choice = vec![0usize; options.len()];
    loop {
        let mut parts = Vec::with_capacity(options.len() + 1);
        if l > 0 {
            parts.push(ordinary_module(field, l as usize));
        }
        parts.extend(choice.iter().zip(&options).map(|(&i, o)| o[i].clone()));
        let total = direct_sum(&parts).map_err(|source| StableError::Module { id: "C".into(), source })?;
        let nu = final_type(&total).map_err(|source| StableError::Module { id: "C".into(), source })?;
        found.insert(mu_from_nu(&nu));
        // odometer over component choices
        let mut i = 0;
        while i < choice.len() {
            choice[i] += 1;
            if choice[i] < options[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == choice.len() {
            break;
        }
    }
    let all_modules = comps.iter().all(|c| c.module.is_some());
    if found.len() == 1 {
        let mu = found.into_iter().next().expect("one element");
        let level = if all_modules { MuLevel::Module } else { MuLevel::Reconstructed };
        Ok((Some(mu), None, level))
    } else {
        Ok((None, Some(found.into_iter().collect()), MuLevel::Candidates))
    }
}

fn vertex_id(v: &Value) -> Result<String, StableError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_u64() || n.is_i64() => Ok(n.to_string()),
        _ => Err(StableError::Format(format!("vertex id must be a string or integer, got {v}"))),
    }
}

impl StableCurveGraph {
    /// `{ "p", "k", "vertices": [{ "id", "genus", "payload"? }], "edges": [[id, id], ...] }`.
    ///
    /// Payloads are objects tagged by `"kind"`: `"hyperelliptic"` with `"f"`, `"module"`
    /// with `"F"`, `"V"`, `"b"`, or `"delta"` with `"delta"`. They inherit `p` and `k`.
    pub fn from_json(v: &Value) -> Result<Self, StableError> {
        let obj = v.as_object().ok_or_else(|| StableError::Format("expected a JSON object".into()))?;
        let int = |o: &Map<String, Value>, key: &str| -> Result<u32, StableError> {
            o.get(key)
                .and_then(Value::as_u64)
                .and_then(|x| u32::try_from(x).ok())
                .ok_or_else(|| StableError::Format(format!("missing or invalid \"{key}\"")))
        };
        let p = int(obj, "p")?;
        let k = if obj.contains_key("k") { int(obj, "k")? } else { 1 };
        let field = make_field(p, k)?;
        let verts = obj
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or_else(|| StableError::Format("missing \"vertices\" array".into()))?;
        let mut vertices = Vec::with_capacity(verts.len());
        for vj in verts {
            let vo = vj.as_object().ok_or_else(|| StableError::Format("vertex must be an object".into()))?;
            let id = vertex_id(vo.get("id").ok_or_else(|| StableError::Format("vertex without \"id\"".into()))?)?;
            let genus = int(vo, "genus")?;
            let payload = match vo.get("payload") {
                None | Some(Value::Null) => None,
                Some(pj) => Some(parse_payload(pj, p, k, genus, &id)?),
            };
            vertices.push(Vertex { id, genus, payload });
        }
        let edges = match obj.get("edges") {
            None => Vec::new(),
            Some(e) => e
                .as_array()
                .ok_or_else(|| StableError::Format("\"edges\" must be an array".into()))?
                .iter()
                .map(|pair| match pair.as_array().map(Vec::as_slice) {
                    Some([a, b]) => Ok((vertex_id(a)?, vertex_id(b)?)),
                    _ => Err(StableError::Format("each edge must be a pair of vertex ids".into())),
                })
                .collect::<Result<_, _>>()?,
        };
        Ok(StableCurveGraph { field, vertices, edges })
    }
}

fn parse_payload(pj: &Value, p: u32, k: u32, genus: u32, id: &str) -> Result<Payload, StableError> {
    let mut po = pj
        .as_object()
        .cloned()
        .ok_or_else(|| StableError::Format(format!("payload of vertex {id} must be an object")))?;
    po.entry("p").or_insert(p.into());
    po.entry("k").or_insert(k.into());
    let kind = po.get("kind").and_then(Value::as_str).unwrap_or("").to_string();
    match kind.as_str() {
        "hyperelliptic" => {
            po.insert("model".into(), "hyperelliptic".into());
            HyperellipticCurve::from_json(&Value::Object(po))
                .map(Payload::Curve)
                .map_err(|source| StableError::Curve { id: id.into(), source })
        }
        "module" => {
            po.entry("g").or_insert(genus.into());
            DieudonneModule::from_json(&Value::Object(po))
                .map(Payload::Module)
                .map_err(|source| StableError::Module { id: id.into(), source })
        }
        "delta" => {
            let parts: Vec<u32> = po
                .get("delta")
                .and_then(Value::as_array)
                .and_then(|a| a.iter().map(|x| x.as_u64().and_then(|x| u32::try_from(x).ok())).collect())
                .ok_or_else(|| StableError::Format(format!("delta payload of vertex {id} needs an integer array")))?;
            Ok(Payload::Delta(HWPartition::new(parts, genus)?))
        }
        other => Err(StableError::Format(format!("unknown payload kind \"{other}\" on vertex {id}"))),
    }
}
