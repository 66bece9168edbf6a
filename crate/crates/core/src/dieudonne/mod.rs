//! Mod-p Dieudonné modules `(M, F, V, b)` and Hasse-Witt triples `(Q, Φ, Ψ)`.
//!
//! Conventions, fixed throughout:
//!
//! * vectors are columns; `F(x) = F_mat · σ(x)` and `V(x) = V_mat · σ⁻¹(x)`;
//! * `b(x, y) = xᵀ B y` for the Gram matrix `B`;
//! * the axiom `b(F x, y) = b(x, V y)^p` reads `F_matᵀ B = twist(B V_mat, 1)`.
//!
//! The bijection between modules and triples is only canonical up to isomorphism.
//! [`module_from_triple`] picks a complement of `ker Φ`; different complements give
//! isomorphic modules, so only ν, μ and δ are stable under that choice.

pub mod corpus;

use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::eo_comb::{truncate_ranks, FinalType, HWPartition};
use crate::field::{make_field, Elem, FieldError, FiniteField};
use crate::semilinear::{
    orthogonal_complement, sigma_power_product, subspace_image, subspace_preimage, twist, Matrix, MatrixError,
    Subspace,
};

/// A violated module axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Shape(String),
    KernelDimension { operator: &'static str, dim: usize, g: usize },
    KerFNotImV,
    KerVNotImF,
    NotAlternating,
    Degenerate,
    Adjunction,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(s) => write!(f, "shape: {s}"),
            Violation::KernelDimension { operator, dim, g } => {
                write!(f, "dim ker {operator} = {dim}, expected g = {g}")
            }
            Violation::KerFNotImV => write!(f, "ker F ≠ im V"),
            Violation::KerVNotImF => write!(f, "ker V ≠ im F"),
            Violation::NotAlternating => write!(f, "b is not alternating"),
            Violation::Degenerate => write!(f, "b is degenerate"),
            Violation::Adjunction => write!(f, "b(F x, y) ≠ b(x, V y)^p"),
        }
    }
}

fn join(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("invalid Dieudonné module: {}", join(.0))]
    InvalidModule(Vec<Violation>),
    #[error("invalid Hasse-Witt triple: {0}")]
    InvalidTriple(String),
    #[error("constructed module violates the axioms: {}", join(.0))]
    ConstructionAxiomFailure(Vec<Violation>),
    #[error("subspaces generated by V and ⊥ do not form a chain")]
    NotAChain,
    #[error("V is neither zero nor bijective on the graded piece of dims {lower}..{upper}")]
    GradedPieceNotZeroOrBijective { lower: usize, upper: usize },
    #[error("no final filtration found over extensions of the base field up to the search limit")]
    RefinementNotFound,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("direct sum of an empty list")]
    EmptySum,
    #[error("malformed module description: {0}")]
    Format(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `(M, F, V, b)` with `M = k^{2g}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DieudonneModule {
    field: FiniteField,
    g: usize,
    f: Matrix,
    v: Matrix,
    b: Matrix,
}

impl DieudonneModule {
    /// Checks shapes only; see [`validate_module`] for the axioms.
    pub fn new(f: Matrix, v: Matrix, b: Matrix) -> Result<Self, ModuleError> {
        let n = f.rows();
        let field = f.field().clone();
        for (name, m) in [("F", &f), ("V", &v), ("b", &b)] {
            field.check_same(m.field())?;
            if m.rows() != n || m.cols() != n {
                return Err(ModuleError::InvalidModule(vec![Violation::Shape(format!(
                    "{name} is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                ))]));
            }
        }
        if n == 0 || !n.is_multiple_of(2) {
            return Err(ModuleError::InvalidModule(vec![Violation::Shape(format!(
                "rank {n} is not a positive even number"
            ))]));
        }
        Ok(DieudonneModule { field, g: n / 2, f, v, b })
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn rank(&self) -> usize {
        2 * self.g
    }

    pub fn f_mat(&self) -> &Matrix {
        &self.f
    }

    pub fn v_mat(&self) -> &Matrix {
        &self.v
    }

    pub fn gram(&self) -> &Matrix {
        &self.b
    }

    pub fn ker_f(&self) -> Subspace {
        self.f.kernel().twist(-1)
    }

    pub fn im_f(&self) -> Subspace {
        self.f.column_space()
    }

    pub fn ker_v(&self) -> Subspace {
        self.v.kernel().twist(1)
    }

    pub fn im_v(&self) -> Subspace {
        self.v.column_space()
    }

    pub fn apply_f(&self, x: &[Elem]) -> Result<Vec<Elem>, ModuleError> {
        Ok(self.f.apply(x, 1)?)
    }

    pub fn apply_v(&self, x: &[Elem]) -> Result<Vec<Elem>, ModuleError> {
        Ok(self.v.apply(x, -1)?)
    }

    /// `b(x, y)`.
    pub fn pairing(&self, x: &[Elem], y: &[Elem]) -> Elem {
        let k = &self.field;
        let mut acc = k.zero();
        for (i, &xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                acc = k.add(acc, k.mul(xi, k.mul(self.b[(i, j)], yj)));
            }
        }
        acc
    }

    pub fn image_under_v(&self, n: &Subspace) -> Result<Subspace, ModuleError> {
        Ok(subspace_image(&self.v, -1, n)?)
    }

    pub fn preimage_under_f(&self, n: &Subspace) -> Result<Subspace, ModuleError> {
        Ok(subspace_preimage(&self.f, 1, n)?)
    }

    pub fn perp(&self, n: &Subspace) -> Result<Subspace, ModuleError> {
        Ok(orthogonal_complement(n, &self.b)?)
    }

    /// The same module over a field containing `self.field()`.
    pub fn extend_scalars(&self, big: &FiniteField) -> Result<DieudonneModule, ModuleError> {
        let table = self.field.embedding(big)?;
        DieudonneModule::new(self.f.embed(big, &table), self.v.embed(big, &table), self.b.embed(big, &table))
    }

    /// The module in coordinates `x = P x′`:
    /// `F′ = P⁻¹ F twist(P, 1)`, `V′ = P⁻¹ V twist(P, −1)`, `B′ = Pᵀ B P`.
    pub fn base_change(&self, p: &Matrix) -> Result<DieudonneModule, ModuleError> {
        let pinv = p.inverse()?;
        let f = pinv.mul(&self.f)?.mul(&twist(p, 1))?;
        let v = pinv.mul(&self.v)?.mul(&twist(p, -1))?;
        let b = p.transpose().mul(&self.b)?.mul(p)?;
        DieudonneModule::new(f, v, b)
    }

    /// `{ "p", "k", "g", "F", "V", "b" }`.
    pub fn to_json(&self) -> Value {
        json!({
            "p": self.field.characteristic(),
            "k": self.field.degree(),
            "g": self.g,
            "F": self.f.to_json(),
            "V": self.v.to_json(),
            "b": self.b.to_json(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, ModuleError> {
        let (field, g) = field_and_g(v)?;
        let n = 2 * g;
        let mat = |key: &str| -> Result<Matrix, ModuleError> {
            let m = v.get(key).ok_or_else(|| ModuleError::Format(format!("missing \"{key}\"")))?;
            Ok(Matrix::from_json(&field, m, Some((n, n)))?)
        };
        DieudonneModule::new(mat("F")?, mat("V")?, mat("b")?)
    }
}

fn field_and_g(v: &Value) -> Result<(FiniteField, usize), ModuleError> {
    let int = |key: &str| -> Result<Option<u32>, ModuleError> {
        match v.get(key) {
            None => Ok(None),
            Some(x) => x
                .as_u64()
                .and_then(|x| u32::try_from(x).ok())
                .map(Some)
                .ok_or_else(|| ModuleError::Format(format!("invalid \"{key}\""))),
        }
    };
    if !v.is_object() {
        return Err(ModuleError::Format("expected a JSON object".into()));
    }
    let p = int("p")?.ok_or_else(|| ModuleError::Format("missing \"p\"".into()))?;
    let k = int("k")?.unwrap_or(1);
    let g = int("g")?.ok_or_else(|| ModuleError::Format("missing \"g\"".into()))?;
    if g == 0 {
        return Err(ModuleError::Format("g must be positive".into()));
    }
    Ok((make_field(p, k)?, g as usize))
}

/// Every violated axiom, in a fixed order; empty iff `d` is a Dieudonné module.
pub fn validate_module(d: &DieudonneModule) -> Vec<Violation> {
    let mut out = Vec::new();
    let g = d.g;
    let ker_f = d.ker_f();
    let ker_v = d.ker_v();
    if ker_f.dim() != g {
        out.push(Violation::KernelDimension { operator: "F", dim: ker_f.dim(), g });
    }
    if ker_v.dim() != g {
        out.push(Violation::KernelDimension { operator: "V", dim: ker_v.dim(), g });
    }
    if ker_f != d.im_v() {
        out.push(Violation::KerFNotImV);
    }
    if ker_v != d.im_f() {
        out.push(Violation::KerVNotImF);
    }
    let k = &d.field;
    let n = d.rank();
    let alternating = (0..n).all(|i| {
        d.b[(i, i)].is_zero() && (0..n).all(|j| k.add(d.b[(i, j)], d.b[(j, i)]).is_zero())
    });
    if !alternating {
        out.push(Violation::NotAlternating);
    }
    if d.b.rank() != n {
        out.push(Violation::Degenerate);
    }
    let lhs = d.f.transpose().mul(&d.b).expect("square");
    let rhs = twist(&d.b.mul(&d.v).expect("square"), 1);
    if lhs != rhs {
        out.push(Violation::Adjunction);
    }
    out
}

fn require_valid(d: &DieudonneModule) -> Result<(), ModuleError> {
    let v = validate_module(d);
    if v.is_empty() {
        Ok(())
    } else {
        Err(ModuleError::InvalidModule(v))
    }
}

fn rank_two_block(field: &FiniteField, f: &[&[i64]], v: &[&[i64]]) -> DieudonneModule {
    DieudonneModule::new(
        Matrix::from_ints(field, f),
        Matrix::from_ints(field, v),
        Matrix::from_ints(field, &[&[0, 1], &[-1, 0]]),
    )
    .expect("2x2 blocks")
}

/// `l` copies of the block with basis `(e, f)`, `F e = e`, `V f = f`, `F f = V e = 0`, `b(e, f) = 1`.
///
/// # Panics
/// If `l == 0`.
pub fn ordinary_module(field: &FiniteField, l: usize) -> DieudonneModule {
    assert!(l > 0, "ordinary_module needs l ≥ 1");
    let block = rank_two_block(field, &[&[1, 0], &[0, 0]], &[&[0, 0], &[0, 1]]);
    direct_sum(&vec![block; l]).expect("same field")
}

/// The superspecial rank-2 block: `F e = f`, `V e = −f`, `F f = V f = 0`, `b(e, f) = 1`.
pub fn supersingular_block(field: &FiniteField) -> DieudonneModule {
    rank_two_block(field, &[&[0, 0], &[1, 0]], &[&[0, 0], &[-1, 0]])
}

/// Block-diagonal `F`, `V` and `b`, in the order given.
pub fn direct_sum(ds: &[DieudonneModule]) -> Result<DieudonneModule, ModuleError> {
    let first = ds.first().ok_or(ModuleError::EmptySum)?;
    let field = first.field.clone();
    for d in ds {
        field.check_same(&d.field)?;
    }
    if ds.len() == 1 {
        return Ok(first.clone());
    }
    let diag = |pick: fn(&DieudonneModule) -> &Matrix| -> Result<Matrix, ModuleError> {
        let blocks: Vec<&Matrix> = ds.iter().map(pick).collect();
        Ok(Matrix::block_diagonal(&field, &blocks)?)
    };
    DieudonneModule::new(diag(|d| &d.f)?, diag(|d| &d.v)?, diag(|d| &d.b)?)
}

/// The module with final type `ν` whose final filtration is the standard flag.
///
/// Basis `e_1, ..., e_2g`; `V e_i = e_{ν(i)}` when `ν(i) > ν(i−1)` and `V e_i = 0` otherwise;
/// `b(e_i, e_{2g+1−i}) = 1` for `i ≤ g`; `F` is determined by the adjunction. Then
/// `V(N_i) = N_{ν(i)}` and `N_i^⊥ = N_{2g−i}` for `N_i = ⟨e_1, ..., e_i⟩`.
pub fn standard_module(field: &FiniteField, nu: &FinalType) -> Result<DieudonneModule, ModuleError> {
    let g = nu.g() as usize;
    let n = 2 * g;
    let ext = nu.extended();
    let v = Matrix::from_fn(field, n, n, |r, c| {
        let i = c + 1;
        if ext[i] > ext[i - 1] && r + 1 == ext[i] as usize {
            field.one()
        } else {
            field.zero()
        }
    });
    let b = Matrix::from_fn(field, n, n, |r, c| match (r + c + 1 == n, r < g) {
        (true, true) => field.one(),
        (true, false) => field.from_int(-1),
        _ => field.zero(),
    });
    // Fᵀ B = twist(B V, 1)
    let f = twist(&b.mul(&v)?, 1).mul(&b.inverse()?)?.transpose();
    let module = DieudonneModule::new(f, v, b)?;
    let violations = validate_module(&module);
    if !violations.is_empty() {
        return Err(ModuleError::ConstructionAxiomFailure(violations));
    }
    Ok(module)
}

/// Inserts `s` into a chain sorted by dimension; `Ok(false)` if already present.
fn insert_into_chain(chain: &mut Vec<Subspace>, s: Subspace) -> Result<bool, ModuleError> {
    let pos = chain.partition_point(|c| c.dim() < s.dim());
    if let Some(c) = chain.get(pos) {
        if c.dim() == s.dim() {
            return if *c == s { Ok(false) } else { Err(ModuleError::NotAChain) };
        }
        if !s.is_subspace_of(c) {
            return Err(ModuleError::NotAChain);
        }
    }
    if pos > 0 && !chain[pos - 1].is_subspace_of(&s) {
        return Err(ModuleError::NotAChain);
    }
    chain.insert(pos, s);
    Ok(true)
}

/// Closes a chain under `N ↦ V(N)` and `N ↦ N^⊥`, failing as soon as it stops being a chain.
fn close_chain(d: &DieudonneModule, mut chain: Vec<Subspace>, mut work: Vec<Subspace>) -> Result<Vec<Subspace>, ModuleError> {
    while let Some(n) = work.pop() {
        for image in [d.image_under_v(&n)?, d.perp(&n)?] {
            if insert_into_chain(&mut chain, image.clone())? {
                work.push(image);
            }
        }
    }
    Ok(chain)
}

/// Smallest set containing `0` and `M` closed under `V` and `⊥`, sorted by dimension.
pub fn canonical_filtration(d: &DieudonneModule) -> Result<Vec<Subspace>, ModuleError> {
    require_valid(d)?;
    let zero = Subspace::zero(&d.field, d.rank());
    let full = Subspace::full(&d.field, d.rank());
    let chain = vec![zero.clone(), full.clone()];
    let chain = close_chain(d, chain, vec![zero, full])?;
    let vm = d.im_v();
    let mid = chain.iter().position(|c| *c == vm);
    match mid {
        Some(r) if 2 * r + 1 == chain.len() => Ok(chain),
        _ => Err(ModuleError::InternalInconsistency(
            "V(M) is not the middle member of the canonical filtration".into(),
        )),
    }
}

/// `ν(i) = dim V(N_i)` on `0..=2g`, interpolated across the canonical filtration.
fn interpolate(d: &DieudonneModule, chain: &[Subspace]) -> Result<Vec<u32>, ModuleError> {
    let n = d.rank();
    let mut nu = vec![0u32; n + 1];
    let vdims: Vec<usize> = chain
        .iter()
        .map(|c| d.image_under_v(c).map(|s| s.dim()))
        .collect::<Result<_, _>>()?;
    for w in 0..chain.len() - 1 {
        let (a, b) = (chain[w].dim(), chain[w + 1].dim());
        let (va, vb) = (vdims[w], vdims[w + 1]);
        let slope = match vb - va {
            0 => 0,
            x if x == b - a => 1,
            _ => return Err(ModuleError::GradedPieceNotZeroOrBijective { lower: a, upper: b }),
        };
        for (i, slot) in nu.iter_mut().enumerate().take(b + 1).skip(a) {
            *slot = (va + slope * (i - a)) as u32;
        }
    }
    Ok(nu)
}

fn final_type_from_extended(d: &DieudonneModule, extended: &[u32]) -> Result<FinalType, ModuleError> {
    let g = d.g;
    let nu = FinalType::new(extended[1..=g].to_vec())
        .map_err(|e| ModuleError::InternalInconsistency(e.to_string()))?;
    if nu.extended() != extended {
        return Err(ModuleError::InternalInconsistency(format!(
            "dim V(N_i) = {extended:?} violates ν(2g − i) = ν(i) − i + g"
        )));
    }
    Ok(nu)
}

/// Final type from interpolation along the canonical filtration.
pub fn final_type(d: &DieudonneModule) -> Result<FinalType, ModuleError> {
    let chain = canonical_filtration(d)?;
    let extended = interpolate(d, &chain)?;
    final_type_from_extended(d, &extended)
}

/// Upper bound on candidate lines tried per refinement step.
const REFINE_BUDGET: usize = 1 << 16;

/// Largest field order over which [`final_flag_refine`] searches.
const REFINE_FIELD_LIMIT: u64 = 1 << 16;

/// A final filtration of the local-local part, possibly after extending scalars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalFlag {
    /// Degree of the field of `module` over the field of the input module.
    pub extension_degree: u32,
    /// Dimension `f` of the multiplicative part split off before refining.
    pub p_rank: u32,
    /// Local-local part; `None` when the input module is ordinary.
    pub module: Option<DieudonneModule>,
    /// `N_0 ⊂ ... ⊂ N_{2h}` in `module` with `dim N_i = i`, stable under `V` and `⊥`.
    pub flag: Vec<Subspace>,
}

impl FinalFlag {
    /// `ν(i) = dim V(N_i)` on the local-local part, shifted by the p-rank.
    pub fn final_type(&self) -> Result<FinalType, ModuleError> {
        match &self.module {
            None => Ok(FinalType::ordinary(self.p_rank)),
            Some(m) => Ok(final_type_from_flag(m, &self.flag)?.shift(self.p_rank)),
        }
    }
}

/// Rational splitting `M ≅ M_ll ⊕ (V^{2g}M ⊕ F^{2g}M)`.
///
/// The multiplicative part `V^{2g}M` and the étale part `F^{2g}M` have dimension `f`;
/// the local-local part `ker V^{2g} ∩ ker F^{2g}` is orthogonal to both and is returned
/// as a module of genus `g − f` (or `None` when `f = g`).
pub fn split_ordinary_part(d: &DieudonneModule) -> Result<(u32, Option<DieudonneModule>), ModuleError> {
    require_valid(d)?;
    let n = d.rank();
    let k = &d.field;
    let (mut mult, mut et) = (Subspace::full(k, n), Subspace::full(k, n));
    let (mut ker_v, mut ker_f) = (Subspace::zero(k, n), Subspace::zero(k, n));
    for _ in 0..n {
        mult = subspace_image(&d.v, -1, &mult)?;
        et = subspace_image(&d.f, 1, &et)?;
        ker_v = subspace_preimage(&d.v, -1, &ker_v)?;
        ker_f = subspace_preimage(&d.f, 1, &ker_f)?;
    }
    let ll = ker_v.intersection(&ker_f)?;
    let f = mult.dim();
    if et.dim() != f || ll.dim() + 2 * f != n {
        return Err(ModuleError::InternalInconsistency(format!(
            "ordinary splitting has dimensions {f} + {} + {} in rank {n}",
            et.dim(),
            ll.dim()
        )));
    }
    if f == 0 {
        return Ok((0, Some(d.clone())));
    }
    if ll.dim() == 0 {
        return Ok((f as u32, None));
    }
    let basis = ll.basis().vstack(mult.basis())?.vstack(et.basis())?.transpose();
    let split = d.base_change(&basis)?;
    let h = ll.dim();
    for m in [&split.f, &split.v, &split.b] {
        if !m.block(0, h, h, n - h).is_zero() || !m.block(h, 0, n - h, h).is_zero() {
            return Err(ModuleError::InternalInconsistency("local-local part is not a direct summand".into()));
        }
    }
    let local = DieudonneModule::new(split.f.block(0, 0, h, h), split.v.block(0, 0, h, h), split.b.block(0, 0, h, h))?;
    require_valid(&local).map_err(|e| ModuleError::InternalInconsistency(format!("local-local part: {e}")))?;
    Ok((f as u32, Some(local)))
}

/// An explicit final filtration of the local-local part.
///
/// The ordinary part is split off first: its final flags are flags of V-stable lines
/// in a space where `V` is bijective, and such lines are in general only defined over
/// large extensions. On the local-local part a depth-first search runs: at the lowest
/// gap of the current chain, try `lower + ⟨v⟩` for `v` running over the quotient
/// (echelon directions first), close under `V` and `⊥`, and backtrack whenever the
/// closure is not a chain. A final filtration still need not be rational (for two
/// supersingular blocks over `F_3` it needs `√−1`), so the search moves to `F_{q^m}`
/// for `m = 2, 3, ...` when it fails.
pub fn final_flag_refine(d: &DieudonneModule) -> Result<FinalFlag, ModuleError> {
    let (p_rank, local) = split_ordinary_part(d)?;
    let Some(local) = local else {
        return Ok(FinalFlag { extension_degree: 1, p_rank, module: None, flag: Vec::new() });
    };
    let (p, k) = (d.field.characteristic(), d.field.degree());
    let mut m = 1u32;
    while (p as u64).pow(k * m) <= REFINE_FIELD_LIMIT {
        let module = if m == 1 {
            local.clone()
        } else {
            local.extend_scalars(&make_field(p, k * m)?)?
        };
        let chain = canonical_filtration(&module)?;
        if let Some(flag) = refine(&module, chain)? {
            return Ok(FinalFlag { extension_degree: m, p_rank, module: Some(module), flag });
        }
        m += 1;
    }
    Err(ModuleError::RefinementNotFound)
}

fn refine(d: &DieudonneModule, chain: Vec<Subspace>) -> Result<Option<Vec<Subspace>>, ModuleError> {
    let Some(gap) = (0..chain.len() - 1).find(|&w| chain[w + 1].dim() - chain[w].dim() > 1) else {
        return Ok(Some(chain));
    };
    let lower = &chain[gap];
    let directions = lower.complement_in(&chain[gap + 1]);
    for v in QuotientPoints::new(&d.field, &directions).take(REFINE_BUDGET) {
        let candidate = lower.sum(&Subspace::span(&d.field, d.rank(), &[v])?)?;
        let mut next = chain.clone();
        if insert_into_chain(&mut next, candidate.clone()).is_err() {
            continue;
        }
        match close_chain(d, next, vec![candidate]) {
            Ok(closed) => {
                if let Some(flag) = refine(d, closed)? {
                    return Ok(Some(flag));
                }
            }
            Err(ModuleError::NotAChain) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Normalized combinations `Σ c_i u_i` (first nonzero coefficient 1): the single
/// directions `u_i` first, then the rest in lexicographic order of coefficient codes.
struct QuotientPoints<'a> {
    field: &'a FiniteField,
    dirs: &'a [Vec<Elem>],
    unit: usize,
    coeffs: Option<Vec<u32>>,
}

impl<'a> QuotientPoints<'a> {
    fn new(field: &'a FiniteField, dirs: &'a [Vec<Elem>]) -> Self {
        QuotientPoints { field, dirs, unit: 0, coeffs: Some(vec![0; dirs.len()]) }
    }

    fn combine(&self, c: &[u32]) -> Vec<Elem> {
        let k = self.field;
        let n = self.dirs[0].len();
        let mut out = vec![k.zero(); n];
        for (ci, dir) in c.iter().zip(self.dirs) {
            let ci = k.elem(*ci).expect("valid code");
            for (o, &x) in out.iter_mut().zip(dir) {
                *o = k.add(*o, k.mul(ci, x));
            }
        }
        out
    }

    fn advance(&mut self) -> Option<Vec<u32>> {
        let q = self.field.order();
        let c = self.coeffs.as_mut()?;
        // odometer, most significant position first
        let mut i = c.len();
        loop {
            if i == 0 {
                self.coeffs = None;
                return None;
            }
            i -= 1;
            c[i] += 1;
            if c[i] < q {
                break;
            }
            c[i] = 0;
        }
        Some(c.clone())
    }
}

impl Iterator for QuotientPoints<'_> {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        if self.dirs.is_empty() {
            return None;
        }
        if self.unit < self.dirs.len() {
            self.unit += 1;
            return Some(self.dirs[self.unit - 1].clone());
        }
        loop {
            let c = self.advance()?;
            let first = c.iter().position(|&x| x != 0)?;
            let weight = c.iter().filter(|&&x| x != 0).count();
            if c[first] == 1 && weight > 1 {
                return Some(self.combine(&c));
            }
        }
    }
}

/// `ν(i) = dim V(N_i)` read off a full flag.
pub fn final_type_from_flag(d: &DieudonneModule, flag: &[Subspace]) -> Result<FinalType, ModuleError> {
    if flag.len() != d.rank() + 1 || flag.iter().enumerate().any(|(i, s)| s.dim() != i) {
        return Err(ModuleError::InternalInconsistency("not a full flag".into()));
    }
    let extended: Vec<u32> = flag
        .iter()
        .map(|s| d.image_under_v(s).map(|x| x.dim() as u32))
        .collect::<Result<_, _>>()?;
    final_type_from_extended(d, &extended)
}

/// `(Q, Φ, Ψ)` in coordinates.
///
/// `Φ(q) = phi · σ(q)` on `Q = k^g`; `ker Φ` has the rows of `kernel_basis` as a basis;
/// row `i` of `psi` is `Ψ(kernel_basis_i)` as a functional, `λ(q) = Σ λ_j q_j`. `Ψ` is
/// σ-linear: `Ψ(Σ c_i w_i) = Σ σ(c_i) psi_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HasseWittTriple {
    field: FiniteField,
    phi: Matrix,
    kernel_basis: Matrix,
    psi: Matrix,
}

impl HasseWittTriple {
    pub fn new(phi: Matrix, kernel_basis: Matrix, psi: Matrix) -> Result<Self, ModuleError> {
        let field = phi.field().clone();
        let t = HasseWittTriple { field, phi, kernel_basis, psi };
        t.check()?;
        Ok(t)
    }

    /// Ψ sends the RREF basis of `ker Φ` to the RREF basis of `im(Φ)^⊥`, in order.
    pub fn with_canonical_psi(phi: Matrix) -> Result<Self, ModuleError> {
        if !phi.is_square() {
            return Err(ModuleError::InvalidTriple("Φ is not square".into()));
        }
        let kernel = subspace_preimage(&phi, 1, &Subspace::zero(phi.field(), phi.rows()))?;
        let annihilator = phi.transpose().kernel();
        Self::new(phi, kernel.basis().clone(), annihilator.basis().clone())
    }

    fn check(&self) -> Result<(), ModuleError> {
        let bad = |s: String| Err(ModuleError::InvalidTriple(s));
        let g = self.phi.rows();
        if !self.phi.is_square() || g == 0 {
            return bad("Φ must be a nonempty square matrix".into());
        }
        let d = g - self.phi.rank();
        for (name, m) in [("kernel basis", &self.kernel_basis), ("Ψ", &self.psi)] {
            self.field.check_same(m.field())?;
            if m.rows() != d || m.cols() != g {
                return bad(format!("{name} is {}x{}, expected {d}x{g}", m.rows(), m.cols()));
            }
            if m.rank() != d {
                return bad(format!("{name} rows are linearly dependent"));
            }
        }
        let kernel = subspace_preimage(&self.phi, 1, &Subspace::zero(&self.field, g))?;
        if Subspace::from_matrix(&self.kernel_basis) != kernel {
            return bad("kernel basis does not span ker Φ".into());
        }
        if !self.psi.mul(&self.phi)?.is_zero() {
            return bad("Ψ has values outside the annihilator of im Φ".into());
        }
        Ok(())
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn g(&self) -> usize {
        self.phi.rows()
    }

    pub fn phi(&self) -> &Matrix {
        &self.phi
    }

    pub fn kernel_basis(&self) -> &Matrix {
        &self.kernel_basis
    }

    pub fn psi(&self) -> &Matrix {
        &self.psi
    }

    /// `{ "p", "k", "g", "Phi", "kernel_basis", "Psi" }`.
    pub fn to_json(&self) -> Value {
        json!({
            "p": self.field.characteristic(),
            "k": self.field.degree(),
            "g": self.g(),
            "Phi": self.phi.to_json(),
            "kernel_basis": self.kernel_basis.to_json(),
            "Psi": self.psi.to_json(),
        })
    }

    /// Parses [`to_json`](Self::to_json) output; without `kernel_basis` and `Psi` the canonical Ψ is used.
    pub fn from_json(v: &Value) -> Result<Self, ModuleError> {
        let (field, g) = field_and_g(v)?;
        let phi_json = v.get("Phi").ok_or_else(|| ModuleError::Format("missing \"Phi\"".into()))?;
        let phi = Matrix::from_json(&field, phi_json, Some((g, g)))?;
        match (v.get("kernel_basis"), v.get("Psi")) {
            (None, None) => Self::with_canonical_psi(phi),
            (Some(kb), Some(psi)) => {
                let d = g - phi.rank();
                let kb = Matrix::from_json(&field, kb, Some((d, g)))?;
                let psi = Matrix::from_json(&field, psi, Some((d, g)))?;
                Self::new(phi, kb, psi)
            }
            _ => Err(ModuleError::Format("\"kernel_basis\" and \"Psi\" must be given together".into())),
        }
    }
}

/// `Q = M / ker F` with basis the standard vectors at the non-pivot columns of ker F.
struct Quotient {
    ker_f: Subspace,
    lift: Vec<usize>,
}

impl Quotient {
    fn new(d: &DieudonneModule) -> Self {
        let ker_f = d.ker_f();
        let lift = (0..d.rank()).filter(|c| !ker_f.pivots().contains(c)).collect();
        Quotient { ker_f, lift }
    }

    fn project(&self, x: &[Elem]) -> Vec<Elem> {
        let r = self.ker_f.reduce(x);
        self.lift.iter().map(|&c| r[c]).collect()
    }

    fn lift_vec(&self, field: &FiniteField, q: &[Elem], n: usize) -> Vec<Elem> {
        let mut out = vec![field.zero(); n];
        for (&c, &x) in self.lift.iter().zip(q) {
            out[c] = x;
        }
        out
    }
}

/// `Q = M/ker F`, `Φ` induced by `F`, `Ψ(x) = b(−, F x̃)` on `ker Φ`.
pub fn triple_from_module(d: &DieudonneModule) -> Result<HasseWittTriple, ModuleError> {
    require_valid(d)?;
    let k = &d.field;
    let n = d.rank();
    let g = d.g;
    let quot = Quotient::new(d);
    if quot.lift.len() != g {
        return Err(ModuleError::InvalidModule(vec![Violation::KernelDimension {
            operator: "F",
            dim: n - quot.lift.len(),
            g,
        }]));
    }
    let phi_cols: Vec<Vec<Elem>> = quot
        .lift
        .iter()
        .map(|&c| quot.project(&d.f.column(c)))
        .collect();
    let phi = Matrix::from_rows(k, g, &phi_cols)?.transpose();
    let kernel = subspace_preimage(&phi, 1, &Subspace::zero(k, g))?;
    let mut psi_rows = Vec::with_capacity(kernel.dim());
    for w in kernel.basis_vectors() {
        let fx = d.apply_f(&quot.lift_vec(k, &w, n))?;
        // F x̃ lies in ker F = im V, so the functional is independent of the coset representative
        if !quot.project(&fx).iter().all(|c| c.is_zero()) {
            return Err(ModuleError::InternalInconsistency("F x̃ ∉ ker F for x ∈ ker Φ".into()));
        }
        let row: Vec<Elem> = quot
            .lift
            .iter()
            .map(|&c| {
                let mut e = vec![k.zero(); n];
                e[c] = k.one();
                d.pairing(&e, &fx)
            })
            .collect();
        for basis_vec in quot.ker_f.basis_vectors() {
            if !d.pairing(&basis_vec, &fx).is_zero() {
                return Err(ModuleError::InternalInconsistency("Ψ(x) does not vanish on ker F".into()));
            }
        }
        psi_rows.push(row);
    }
    let psi = Matrix::from_rows(k, g, &psi_rows)?;
    HasseWittTriple::new(phi, kernel.basis().clone(), psi)
}

/// `M = Q ⊕ Q^∨`, `b((q, λ), (q′, λ′)) = λ′(q) − λ(q′)`, `F(q, λ) = (Φ q, Ψ(π_L q))`, and `V`
/// from the adjunction. `π_L` projects onto `L = ker Φ` along the span of the standard
/// vectors at the non-pivot columns of `L`.
pub fn module_from_triple(t: &HasseWittTriple) -> Result<DieudonneModule, ModuleError> {
    let l = Subspace::from_matrix(&t.kernel_basis);
    let g = t.g();
    let complement: Vec<Vec<Elem>> = (0..g)
        .filter(|c| !l.pivots().contains(c))
        .map(|c| {
            let mut e = vec![t.field.zero(); g];
            e[c] = t.field.one();
            e
        })
        .collect();
    module_from_triple_with_complement(t, &complement)
}

/// [`module_from_triple`] with an explicit complement `U` of `ker Φ` in `Q`.
pub fn module_from_triple_with_complement(
    t: &HasseWittTriple,
    complement: &[Vec<Elem>],
) -> Result<DieudonneModule, ModuleError> {
    t.check()?;
    let k = &t.field;
    let g = t.g();
    let d = t.kernel_basis.rows();
    let u = Matrix::from_rows(k, g, complement)?;
    if u.rows() != g - d {
        return Err(ModuleError::InvalidTriple(format!("complement has {} vectors, expected {}", u.rows(), g - d)));
    }
    // columns: kernel basis, then complement; coordinates of q are P⁻¹ q
    let basis = t.kernel_basis.vstack(&u)?.transpose();
    let coords = basis
        .inverse()
        .map_err(|_| ModuleError::InvalidTriple("complement is not complementary to ker Φ".into()))?;
    let p_top = coords.block(0, 0, d, g);
    let lower_left = t.psi.transpose().mul(&twist(&p_top, 1))?;
    let zero = Matrix::zeros(k, g, g);
    let f = t.phi.hstack(&zero)?.vstack(&lower_left.hstack(&zero)?)?;
    let ident = Matrix::identity(k, g);
    let b = zero.hstack(&ident)?.vstack(&ident.neg().hstack(&zero)?)?;
    let v = b.inverse()?.mul(&twist(&f.transpose().mul(&b)?, -1))?;
    let module = DieudonneModule::new(f, v, b)?;
    let violations = validate_module(&module);
    if !violations.is_empty() {
        return Err(ModuleError::ConstructionAxiomFailure(violations));
    }
    Ok(module)
}

/// `δ` computed as `dim V^j(V(M))` and as `rank Φ^(j)`; the two must agree.
pub fn module_delta(d: &DieudonneModule) -> Result<HWPartition, ModuleError> {
    let t = triple_from_module(d)?;
    let g = d.g as u32;
    let mut n = d.im_v();
    let mut err = None;
    let rho_v = truncate_ranks(g, |_| {
        match d.image_under_v(&n) {
            Ok(next) => n = next,
            Err(e) => err = Some(e),
        }
        n.dim() as u32
    });
    if let Some(e) = err {
        return Err(e);
    }
    let mut rho_phi = vec![g];
    for j in 1..rho_v.len() {
        rho_phi.push(sigma_power_product(&t.phi, j)?.rank() as u32);
    }
    if rho_v != rho_phi {
        return Err(ModuleError::InternalInconsistency(format!(
            "rank sequences disagree: V-images {rho_v:?}, Φ-powers {rho_phi:?}"
        )));
    }
    HWPartition::from_ranks(&rho_v).map_err(|e| ModuleError::InternalInconsistency(e.to_string()))
}

#[cfg(test)]
mod tests;
