//! Exhaustive search over the genus-4 normal form `y² = x⁹ + a₈x⁸ + ⋯ + a₂x² + x`.
//!
//! Tuples `(a₂, …, a₈)` are visited in lexicographic order of element codes with
//! `a₂` most significant. Work is split by the prefix `(a₂, a₃)`; a checkpoint
//! records how many prefixes are complete, so every resumed or multi-threaded run
//! merges to the same result.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CliError;
use crate::curves::{hasse_witt_hyperelliptic, hw_partition, HyperellipticCurve};
use crate::eo_comb::{truncate_ranks, HWPartition};
use crate::field::{make_field, Elem, FiniteField};

pub const NORMAL_FORM_G4: &str = "hyperelliptic-normal-g4";
const G: usize = 4;
const FREE: usize = 7;
const CHECKPOINT_VERSION: u32 = 1;

/// Conjunction of conditions on the rank sequence `ρ` of a curve's Hasse-Witt matrix.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_h: Option<u32>,
    /// `H · H^σ ⋯ H^{σ^{m−1}} = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vanishes_at: Option<u32>,
}

impl Predicate {
    pub fn is_empty(&self) -> bool {
        self.delta.is_none() && self.rank_h.is_none() && self.vanishes_at.is_none()
    }

    /// `rho` as returned by [`truncate_ranks`]; constant past its end.
    pub fn matches(&self, rho: &[u32]) -> bool {
        let at = |j: usize| *rho.get(j).unwrap_or_else(|| rho.last().expect("nonempty"));
        if let Some(r) = self.rank_h {
            if at(1) != r {
                return false;
            }
        }
        if let Some(m) = self.vanishes_at {
            if at(m as usize) != 0 {
                return false;
            }
        }
        if let Some(d) = &self.delta {
            let parts: Vec<u32> = rho.windows(2).map(|w| w[0] - w[1]).filter(|&x| x > 0).collect();
            if &parts != d {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpec {
    pub p: u32,
    pub k: u32,
    pub family: String,
    pub predicate: Predicate,
    /// Worker count; `None` uses the rayon default.
    pub threads: Option<usize>,
    pub checkpoint: Option<PathBuf>,
    /// Stop after this many prefixes in this run and write the checkpoint.
    pub max_prefixes: Option<u64>,
}

impl SearchSpec {
    pub fn new(p: u32, k: u32, predicate: Predicate) -> Self {
        SearchSpec {
            p,
            k,
            family: NORMAL_FORM_G4.to_string(),
            predicate,
            threads: None,
            checkpoint: None,
            max_prefixes: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    /// `[a₂, …, a₈]` in the element wire format.
    pub a: Vec<Value>,
    /// Full coefficient list, constant term first.
    pub f: Vec<Value>,
    pub rho: Vec<u32>,
    pub delta: Vec<u32>,
    pub p_rank: u32,
    pub a_number: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub candidates: u64,
    pub singular: u64,
    pub evaluated: u64,
    /// Nonsingular curves per `δ`, keyed by its display form.
    pub delta_counts: BTreeMap<String, u64>,
}

impl SearchStats {
    fn absorb(&mut self, other: SearchStats) {
        self.candidates += other.candidates;
        self.singular += other.singular;
        self.evaluated += other.evaluated;
        for (key, n) in other.delta_counts {
            *self.delta_counts.entry(key).or_default() += n;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub family: String,
    pub p: u32,
    pub k: u32,
    pub predicate: Predicate,
    pub total_candidates: u64,
    pub stats: SearchStats,
    pub hit_count: usize,
    pub hits: Vec<SearchHit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    family: String,
    p: u32,
    k: u32,
    predicate: Predicate,
    total_prefixes: u64,
    completed_prefixes: u64,
    last_completed_prefix: Option<Vec<Value>>,
    stats: SearchStats,
    hits: Vec<SearchHit>,
}

/// Coefficient loop, Hasse-Witt matrix and rank sequence on fixed-size arrays.
struct Kernel<'a> {
    k: &'a FiniteField,
    p: usize,
    half: u32,
}

type M4 = [[Elem; G]; G];

impl Kernel<'_> {
    fn squarefree(&self, f: &[Elem; 10]) -> bool {
        let k = self.k;
        let top = |a: &[Elem; 10], upto: usize| (0..=upto).rev().find(|&i| !a[i].is_zero());
        let mut a = *f;
        let mut da = 9;
        let mut b = [Elem::ZERO; 10];
        for i in 1..10 {
            b[i - 1] = k.mul(k.from_int(i as i64), f[i]);
        }
        let Some(mut db) = top(&b, 8) else {
            return false;
        };
        // deg a ≥ deg b; squarefree iff the last nonzero remainder is constant
        loop {
            if db == 0 {
                return true;
            }
            let inv = k.inv(b[db]).expect("leading coefficient");
            let mut d = Some(da);
            while let Some(dd) = d.filter(|&dd| dd >= db) {
                let c = k.mul(a[dd], inv);
                let s = dd - db;
                for i in 0..=db {
                    a[s + i] = k.sub(a[s + i], k.mul(c, b[i]));
                }
                d = if dd == 0 { None } else { top(&a, dd - 1) };
            }
            let Some(r) = d else {
                return false;
            };
            std::mem::swap(&mut a, &mut b);
            da = db;
            db = r;
        }
    }

    /// `H_{ij} = c_{p(j+1)−(i+1)}` for `f^((p−1)/2) = Σ c_t x^t`, truncated at degree `4p − 1`.
    fn hasse_witt(&self, f: &[Elem; 10], pow: &mut Vec<Elem>, tmp: &mut Vec<Elem>) -> M4 {
        let k = self.k;
        let len = G * self.p;
        pow.clear();
        pow.resize(len, Elem::ZERO);
        pow[0] = Elem::ONE;
        for _ in 0..self.half {
            tmp.clear();
            tmp.resize(len, Elem::ZERO);
            for (i, &x) in pow.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, &y) in f.iter().enumerate().take(len - i) {
                    if !y.is_zero() {
                        tmp[i + j] = k.add(tmp[i + j], k.mul(x, y));
                    }
                }
            }
            std::mem::swap(pow, tmp);
        }
        let mut h = [[Elem::ZERO; G]; G];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (self.p * (j + 1)).checked_sub(i + 1).map_or(Elem::ZERO, |t| pow[t]);
            }
        }
        h
    }

    fn twist(&self, m: &M4, e: i64) -> M4 {
        m.map(|row| row.map(|x| self.k.frobenius(x, e)))
    }

    fn mul(&self, a: &M4, b: &M4) -> M4 {
        let k = self.k;
        let mut out = [[Elem::ZERO; G]; G];
        for i in 0..G {
            for l in 0..G {
                if a[i][l].is_zero() {
                    continue;
                }
                for j in 0..G {
                    out[i][j] = k.add(out[i][j], k.mul(a[i][l], b[l][j]));
                }
            }
        }
        out
    }

    fn rank(&self, m: &M4) -> u32 {
        let k = self.k;
        let mut m = *m;
        let mut r = 0;
        for c in 0..G {
            let Some(pr) = (r..G).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(pr, r);
            let inv = k.inv(m[r][c]).expect("pivot");
            for i in r + 1..G {
                let factor = k.mul(m[i][c], inv);
                if factor.is_zero() {
                    continue;
                }
                for j in c..G {
                    m[i][j] = k.sub(m[i][j], k.mul(factor, m[r][j]));
                }
            }
            r += 1;
        }
        r as u32
    }

    fn rho(&self, h: &M4) -> Vec<u32> {
        let twists: Vec<M4> = (0..self.k.degree() as i64).map(|e| self.twist(h, e)).collect();
        let mut acc = [[Elem::ZERO; G]; G];
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] = Elem::ONE;
        }
        truncate_ranks(G as u32, |j| {
            acc = self.mul(&acc, &twists[(j - 1) % twists.len()]);
            self.rank(&acc)
        })
    }
}

fn normal_form(a: &[Elem; FREE]) -> [Elem; 10] {
    let mut f = [Elem::ZERO; 10];
    f[1] = Elem::ONE;
    f[2..9].copy_from_slice(a);
    f[9] = Elem::ONE;
    f
}

fn delta_of(rho: &[u32]) -> Vec<u32> {
    rho.windows(2).map(|w| w[0] - w[1]).filter(|&x| x > 0).collect()
}

fn delta_key(delta: &[u32]) -> String {
    HWPartition::new(delta.to_vec(), G as u32).expect("valid partition").to_string()
}

/// One `(a₂, a₃)` prefix: all `q⁵` completions in order.
fn run_prefix(k: &FiniteField, pred: &Predicate, prefix: u64) -> Result<(SearchStats, Vec<SearchHit>), CliError> {
    let q = k.order() as u64;
    let kernel = Kernel {
        k,
        p: k.characteristic() as usize,
        half: (k.characteristic() - 1) / 2,
    };
    let mut a = [Elem::ZERO; FREE];
    a[0] = k.elem((prefix / q) as u32).expect("code");
    a[1] = k.elem((prefix % q) as u32).expect("code");
    let mut stats = SearchStats::default();
    let mut by_rho: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    let mut hits = Vec::new();
    let (mut pow, mut tmp) = (Vec::new(), Vec::new());
    let inner = q.pow(FREE as u32 - 2);
    for t in 0..inner {
        let mut rest = t;
        for slot in (2..FREE).rev() {
            a[slot] = k.elem((rest % q) as u32).expect("code");
            rest /= q;
        }
        stats.candidates += 1;
        let f = normal_form(&a);
        if !kernel.squarefree(&f) {
            stats.singular += 1;
            continue;
        }
        stats.evaluated += 1;
        let h = kernel.hasse_witt(&f, &mut pow, &mut tmp);
        let rho = kernel.rho(&h);
        let matched = pred.matches(&rho);
        if matched {
            hits.push(confirm_hit(k, &f, &a, &rho)?);
        }
        *by_rho.entry(rho).or_default() += 1;
    }
    for (rho, n) in by_rho {
        *stats.delta_counts.entry(delta_key(&delta_of(&rho))).or_default() += n;
    }
    Ok((stats, hits))
}

/// Recomputes a hit through the general curve pipeline.
fn confirm_hit(k: &FiniteField, f: &[Elem; 10], a: &[Elem; FREE], rho: &[u32]) -> Result<SearchHit, CliError> {
    let curve = HyperellipticCurve::new(k, f.to_vec())
        .map_err(|e| CliError::internal(format!("search kernel accepted a singular model: {e}")))?;
    let report = hw_partition(&hasse_witt_hyperelliptic(&curve)).map_err(|e| CliError::internal(e.to_string()))?;
    if report.rho != rho {
        return Err(CliError::internal(format!(
            "search kernel rank sequence {rho:?} disagrees with {:?}",
            report.rho
        )));
    }
    Ok(SearchHit {
        a: a.iter().map(|&x| k.to_json(x)).collect(),
        f: f.iter().map(|&x| k.to_json(x)).collect(),
        rho: report.rho,
        delta: report.delta.parts().to_vec(),
        p_rank: report.p_rank,
        a_number: report.a_number,
    })
}

fn validate(spec: &SearchSpec) -> Result<FiniteField, CliError> {
    if spec.family != NORMAL_FORM_G4 {
        return Err(CliError::domain("UnsupportedFamily", format!("unsupported search family \"{}\"", spec.family)));
    }
    if spec.predicate.is_empty() {
        return Err(CliError::domain("EmptyPredicate", "search predicate is empty".to_string()));
    }
    if let Some(d) = &spec.predicate.delta {
        HWPartition::new(d.clone(), G as u32).map_err(CliError::from)?;
    }
    if spec.p == 2 {
        return Err(CliError::domain("EvenCharacteristic", "the normal form needs odd characteristic".to_string()));
    }
    if spec.threads == Some(0) {
        return Err(CliError::domain("InvalidThreads", "thread count must be positive".to_string()));
    }
    make_field(spec.p, spec.k).map_err(CliError::from)
}

fn load_checkpoint(path: &Path, spec: &SearchSpec, total_prefixes: u64) -> Result<Option<Checkpoint>, CliError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(CliError::parse("Io", format!("cannot read checkpoint {}: {e}", path.display()))),
    };
    let cp: Checkpoint = serde_json::from_str(&text)
        .map_err(|e| CliError::parse("Json", format!("malformed checkpoint {}: {e}", path.display())))?;
    if cp.version != CHECKPOINT_VERSION
        || cp.family != spec.family
        || (cp.p, cp.k) != (spec.p, spec.k)
        || cp.predicate != spec.predicate
        || cp.total_prefixes != total_prefixes
        || cp.completed_prefixes > total_prefixes
    {
        return Err(CliError::domain(
            "CheckpointMismatch",
            format!("checkpoint {} belongs to a different search", path.display()),
        ));
    }
    Ok(Some(cp))
}

fn write_checkpoint(path: &Path, cp: &Checkpoint) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    let text = serde_json::to_string_pretty(cp).expect("serializable");
    fs::write(&tmp, text)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|e| CliError::internal(format!("cannot write checkpoint {}: {e}", path.display())))
}

/// Runs (or resumes) the search. With `max_prefixes` reached before the end the
/// checkpoint is written and `InterruptedCheckpointWritten` is returned.
pub fn cmd_search(spec: &SearchSpec) -> Result<SearchReport, CliError> {
    let k = validate(spec)?;
    let q = k.order() as u64;
    let total_prefixes = q * q;
    let mut cp = match &spec.checkpoint {
        Some(path) => load_checkpoint(path, spec, total_prefixes)?,
        None => None,
    }
    .unwrap_or_else(|| Checkpoint {
        version: CHECKPOINT_VERSION,
        family: spec.family.clone(),
        p: spec.p,
        k: spec.k,
        predicate: spec.predicate.clone(),
        total_prefixes,
        completed_prefixes: 0,
        last_completed_prefix: None,
        stats: SearchStats::default(),
        hits: Vec::new(),
    });

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = spec.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::internal(e.to_string()))?;
    let batch = pool.current_num_threads().max(1) as u64;
    let mut budget = spec.max_prefixes.unwrap_or(u64::MAX);

    while cp.completed_prefixes < total_prefixes {
        if budget == 0 {
            let path = spec.checkpoint.as_ref().ok_or_else(|| {
                CliError::domain("MissingCheckpoint", "max_prefixes requires a checkpoint file".to_string())
            })?;
            write_checkpoint(path, &cp)?;
            return Err(CliError::domain(
                "InterruptedCheckpointWritten",
                format!(
                    "stopped after {} of {} prefixes; checkpoint written to {}",
                    cp.completed_prefixes,
                    total_prefixes,
                    path.display()
                ),
            ));
        }
        let start = cp.completed_prefixes;
        let end = (start + batch.min(budget)).min(total_prefixes);
        let results: Vec<_> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|t| run_prefix(&k, &spec.predicate, t))
                .collect::<Result<Vec<_>, _>>()
        })?;
        for (stats, hits) in results {
            cp.stats.absorb(stats);
            cp.hits.extend(hits);
        }
        cp.completed_prefixes = end;
        let last = end - 1;
        cp.last_completed_prefix = Some(vec![
            k.to_json(k.elem((last / q) as u32).expect("code")),
            k.to_json(k.elem((last % q) as u32).expect("code")),
        ]);
        budget -= end - start;
        if let Some(path) = &spec.checkpoint {
            write_checkpoint(path, &cp)?;
        }
    }

    Ok(SearchReport {
        family: cp.family,
        p: cp.p,
        k: cp.k,
        predicate: cp.predicate,
        total_candidates: q.pow(FREE as u32),
        hit_count: cp.hits.len(),
        hits: cp.hits,
        stats: cp.stats,
    })
}
