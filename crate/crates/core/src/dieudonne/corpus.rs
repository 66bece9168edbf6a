//! Random Dieudonné modules that satisfy the axioms by construction.
//!
//! Modules come from two sources: direct sums of the rank-2 ordinary and
//! supersingular blocks, and [`module_from_triple`] applied to random triples.
//! Either is then moved to a random basis by a symplectic σ-twisted base change.

use rand::Rng;

use super::{direct_sum, module_from_triple, ordinary_module, supersingular_block, DieudonneModule, HasseWittTriple};
use crate::eo_comb::HWPartition;
use crate::field::FiniteField;
use crate::semilinear::{subspace_preimage, Matrix, Subspace};

/// `(p, k)` pairs covered by the randomized property tests.
pub const CORPUS_FIELDS: [(u32, u32); 4] = [(3, 1), (3, 2), (5, 1), (5, 2)];

/// Product of random transvections `x ↦ x + c · b(v, x) · v`; preserves `b`.
pub fn random_symplectic<R: Rng + ?Sized>(gram: &Matrix, rng: &mut R) -> Matrix {
    let k = gram.field().clone();
    let n = gram.rows();
    let mut acc = Matrix::identity(&k, n);
    for _ in 0..3 * n {
        let v = Matrix::random(&k, n, 1, rng);
        let c = k.elem(rng.gen_range(0..k.order())).expect("in range");
        let vb = v.transpose().mul(gram).expect("shapes");
        let rank_one = v.mul(&vb).expect("shapes").map(|x| k.mul(c, x));
        let t = Matrix::identity(&k, n).add(&rank_one).expect("shapes");
        acc = acc.mul(&t).expect("shapes");
    }
    acc
}

/// `d` in a random symplectic basis.
pub fn conjugate<R: Rng + ?Sized>(d: &DieudonneModule, rng: &mut R) -> DieudonneModule {
    let p = random_symplectic(d.gram(), rng);
    d.base_change(&p).expect("symplectic matrices are invertible")
}

/// Direct sum of `g` blocks, each ordinary or supersingular with equal probability.
pub fn random_block_sum<R: Rng + ?Sized>(field: &FiniteField, g: usize, rng: &mut R) -> DieudonneModule {
    let blocks: Vec<DieudonneModule> = (0..g)
        .map(|_| {
            if rng.gen_bool(0.5) {
                ordinary_module(field, 1)
            } else {
                supersingular_block(field)
            }
        })
        .collect();
    direct_sum(&blocks).expect("same field")
}

/// `Φ = X Y` with `X` of size `g × r`, `r` uniform in `0..=g`, and Ψ a random bijection.
pub fn random_triple<R: Rng + ?Sized>(field: &FiniteField, g: usize, rng: &mut R) -> HasseWittTriple {
    let r = rng.gen_range(0..=g);
    let phi = if r == 0 {
        Matrix::zeros(field, g, g)
    } else {
        Matrix::random(field, g, r, rng)
            .mul(&Matrix::random(field, r, g, rng))
            .expect("shapes")
    };
    let kernel = subspace_preimage(&phi, 1, &Subspace::zero(field, g)).expect("shapes");
    let annihilator = phi.transpose().kernel();
    let d = kernel.dim();
    let mix = Matrix::random_invertible(field, d, rng);
    let psi = mix.mul(annihilator.basis()).expect("shapes");
    HasseWittTriple::new(phi, kernel.basis().clone(), psi).expect("valid by construction")
}

/// A random valid module of genus `g` in a random symplectic basis.
pub fn random_module<R: Rng + ?Sized>(field: &FiniteField, g: usize, rng: &mut R) -> DieudonneModule {
    let base = if rng.gen_bool(0.5) {
        random_block_sum(field, g, rng)
    } else {
        module_from_triple(&random_triple(field, g, rng)).expect("valid triple")
    };
    conjugate(&base, rng)
}

/// A module with Hasse-Witt partition `δ`: `Φ` is the identity on a block of size
/// `g − Σδ` plus nilpotent Jordan blocks whose sizes form the conjugate partition of `δ`.
pub fn representative_module(field: &FiniteField, delta: &HWPartition) -> DieudonneModule {
    let g = delta.ambient_g() as usize;
    let f = g - delta.sum() as usize;
    let parts = delta.parts();
    let max = parts.first().copied().unwrap_or(0);
    // δ_j = #{blocks of size ≥ j}
    let block_sizes: Vec<usize> = (1..=max)
        .map(|i| parts.iter().filter(|&&p| p >= i).count())
        .collect();
    let mut blocks = vec![Matrix::identity(field, f)];
    for &s in &block_sizes {
        blocks.push(Matrix::from_fn(field, s, s, |i, j| if i + 1 == j { field.one() } else { field.zero() }));
    }
    let refs: Vec<&Matrix> = blocks.iter().filter(|b| b.rows() > 0).collect();
    let phi = Matrix::block_diagonal(field, &refs).expect("same field");
    module_from_triple(&HasseWittTriple::with_canonical_psi(phi).expect("square")).expect("valid triple")
}
