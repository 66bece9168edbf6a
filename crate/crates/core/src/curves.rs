//! Hyperelliptic curves `y² = f(x)` in odd characteristic and their Hasse-Witt data.
//!
//! ```
//! use ekedahl_oort::curves::{hasse_witt_hyperelliptic, hw_partition, HyperellipticCurve};
//! use ekedahl_oort::field::make_field;
//!
//! let f3 = make_field(3, 1).unwrap();
//! let mut f = vec![f3.zero(); 10];
//! f[1] = f3.one();
//! f[9] = f3.one();
//! let curve = HyperellipticCurve::new(&f3, f).unwrap();
//! let h = hasse_witt_hyperelliptic(&curve);
//! let report = hw_partition(&h).unwrap();
//! assert_eq!(report.rho, vec![4, 2, 0]);
//! assert_eq!(report.delta.parts(), &[2, 2]);
//! ```

use serde_json::{json, Value};
use thiserror::Error;

use crate::eo_comb::truncate_ranks;
pub use crate::eo_comb::HWPartition;
use crate::field::{make_field, Elem, FieldError, FiniteField};
use crate::semilinear::{twist, Matrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("hyperelliptic models need odd characteristic")]
    EvenCharacteristic,
    #[error("f is not squarefree")]
    NotSquarefree,
    #[error("deg f = {0} does not define a curve of positive genus")]
    DegreeOutOfRange(usize),
    #[error("point counting is only implemented over prime fields")]
    NotPrimeField,
    #[error("point counting is only implemented in genus 1, got genus {0}")]
    GenusNotOne(u32),
    #[error("malformed curve description: {0}")]
    Format(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Polynomials are coefficient vectors, constant term first, without trailing zeros.
pub mod poly {
    use crate::field::{Elem, FiniteField};

    pub fn trim(mut a: Vec<Elem>) -> Vec<Elem> {
        while a.last().is_some_and(|c| c.is_zero()) {
            a.pop();
        }
        a
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(a: &[Elem]) -> Option<usize> {
        a.iter().rposition(|c| !c.is_zero())
    }

    pub fn mul(k: &FiniteField, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![k.zero(); a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(x, y));
            }
        }
        trim(out)
    }

    pub fn pow(k: &FiniteField, a: &[Elem], mut e: u32) -> Vec<Elem> {
        let mut result = vec![k.one()];
        let mut base = trim(a.to_vec());
        while e > 0 {
            if e & 1 == 1 {
                result = mul(k, &result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = mul(k, &base, &base);
            }
        }
        result
    }

    pub fn derivative(k: &FiniteField, a: &[Elem]) -> Vec<Elem> {
        let out = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| k.mul(k.from_int(i as i64), c))
            .collect();
        trim(out)
    }

    /// Remainder of `a` modulo a nonzero `b`.
    pub fn rem(k: &FiniteField, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let db = degree(b).expect("division by the zero polynomial");
        let lead_inv = k.inv(b[db]).expect("nonzero leading coefficient");
        let mut r = trim(a.to_vec());
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let c = k.mul(r[dr], lead_inv);
            for i in 0..=db {
                r[dr - db + i] = k.sub(r[dr - db + i], k.mul(c, b[i]));
            }
            r = trim(r);
        }
        r
    }

    /// Monic gcd; zero when both inputs are zero.
    pub fn gcd(k: &FiniteField, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !y.is_empty() {
            let r = rem(k, &x, &y);
            x = y;
            y = r;
        }
        if let Some(d) = degree(&x) {
            let inv = k.inv(x[d]).expect("nonzero");
            for c in x.iter_mut() {
                *c = k.mul(*c, inv);
            }
        }
        x
    }

    pub fn eval(k: &FiniteField, a: &[Elem], x: Elem) -> Elem {
        a.iter().rev().fold(k.zero(), |acc, &c| k.add(k.mul(acc, x), c))
    }
}

/// `y² = f(x)` with `f` squarefree of degree `2g+1` or `2g+2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperellipticCurve {
    field: FiniteField,
    f: Vec<Elem>,
    genus: u32,
}

impl HyperellipticCurve {
    pub fn new(field: &FiniteField, f_coeffs: Vec<Elem>) -> Result<Self, CurveError> {
        if field.characteristic() == 2 {
            return Err(CurveError::EvenCharacteristic);
        }
        let f = poly::trim(f_coeffs);
        let deg = poly::degree(&f).unwrap_or(0);
        if deg < 3 {
            return Err(CurveError::DegreeOutOfRange(deg));
        }
        let df = poly::derivative(field, &f);
        if df.is_empty() || poly::degree(&poly::gcd(field, &f, &df)) != Some(0) {
            return Err(CurveError::NotSquarefree);
        }
        let genus = (deg as u32).div_ceil(2) - 1;
        Ok(HyperellipticCurve {
            field: field.clone(),
            f,
            genus,
        })
    }

    /// Builds `f` from integer coefficients, constant term first.
    pub fn from_ints(field: &FiniteField, f_coeffs: &[i64]) -> Result<Self, CurveError> {
        Self::new(field, f_coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn f(&self) -> &[Elem] {
        &self.f
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn degree(&self) -> usize {
        self.f.len() - 1
    }

    /// `{ "p", "k", "model": "hyperelliptic", "f": [...] }`.
    pub fn from_json(v: &Value) -> Result<Self, CurveError> {
        let obj = v
            .as_object()
            .ok_or_else(|| CurveError::Format("expected a JSON object".into()))?;
        let int = |key: &str| -> Result<u32, CurveError> {
            obj.get(key)
                .and_then(Value::as_u64)
                .and_then(|x| u32::try_from(x).ok())
                .ok_or_else(|| CurveError::Format(format!("missing or invalid \"{key}\"")))
        };
        let p = int("p")?;
        let k = match obj.get("k") {
            None => 1,
            Some(_) => int("k")?,
        };
        match obj.get("model").and_then(Value::as_str) {
            Some("hyperelliptic") | None => {}
            Some(other) => return Err(CurveError::Format(format!("unsupported model \"{other}\""))),
        }
        let field = make_field(p, k)?;
        let coeffs = obj
            .get("f")
            .and_then(Value::as_array)
            .ok_or_else(|| CurveError::Format("missing or invalid \"f\"".into()))?;
        let f = coeffs
            .iter()
            .map(|c| field.from_json(c))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(&field, f)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.field.characteristic(),
            "k": self.field.degree(),
            "model": "hyperelliptic",
            "f": self.f.iter().map(|&c| self.field.to_json(c)).collect::<Vec<_>>(),
        })
    }
}

/// `H_{ij} = c_{pj−i}` (1-indexed) where `f^((p−1)/2) = Σ c_t x^t`.
pub fn hasse_witt_hyperelliptic(c: &HyperellipticCurve) -> Matrix {
    let k = &c.field;
    let p = k.characteristic() as usize;
    let h = poly::pow(k, &c.f, (k.characteristic() - 1) / 2);
    let g = c.genus as usize;
    Matrix::from_fn(k, g, g, |i, j| {
        (p * (j + 1))
            .checked_sub(i + 1)
            .and_then(|t| h.get(t).copied())
            .unwrap_or(Elem::ZERO)
    })
}

/// `M = (twist(H, −1))ᵗ`.
pub fn cartier_manin(h: &Matrix) -> Result<Matrix, CurveError> {
    require_square(h)?;
    Ok(twist(h, -1).transpose())
}

/// Inverse of [`cartier_manin`]: `H = (twist(M, 1))ᵗ`.
pub fn hasse_witt_from_cartier_manin(m: &Matrix) -> Result<Matrix, CurveError> {
    require_square(m)?;
    Ok(twist(m, 1).transpose())
}

fn require_square(m: &Matrix) -> Result<(), CurveError> {
    if !m.is_square() {
        return Err(MatrixError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        }
        .into());
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HWReport {
    pub rho: Vec<u32>,
    pub delta: HWPartition,
    pub p_rank: u32,
    pub a_number: u32,
}

/// `ρ_i = rank(H · twist(H, 1) ⋯ twist(H, i−1))` and the derived `δ`, p-rank and a-number.
pub fn hw_partition(h: &Matrix) -> Result<HWReport, CurveError> {
    require_square(h)?;
    let g = h.rows() as u32;
    let mut acc = Matrix::identity(h.field(), h.rows());
    let mut err = None;
    let rho = truncate_ranks(g, |j| {
        match acc.mul(&twist(h, j as i64 - 1)) {
            Ok(next) => acc = next,
            Err(e) => err = Some(e),
        }
        acc.rank() as u32
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    let delta = HWPartition::from_ranks(&rho).expect("ranks of iterated products are non-increasing");
    let p_rank = *rho.last().expect("nonempty");
    let a_number = delta.a_number();
    debug_assert_eq!(p_rank, delta.p_rank());
    Ok(HWReport {
        rho,
        delta,
        p_rank,
        a_number,
    })
}

/// `#{(x, y) ∈ F_p² : y² = f(x)}` for genus-one curves over prime fields.
pub fn affine_point_count(c: &HyperellipticCurve) -> Result<u64, CurveError> {
    check_point_count(c)?;
    let k = &c.field;
    let p = k.characteristic() as u64;
    let squares = square_counts(k);
    Ok((0..p)
        .map(|x| squares[poly::eval(k, &c.f, k.from_int(x as i64)).code() as usize])
        .sum())
}

/// Affine count plus the points of the smooth model above `x = ∞`.
pub fn projective_point_count(c: &HyperellipticCurve) -> Result<u64, CurveError> {
    let affine = affine_point_count(c)?;
    let at_infinity = if c.degree() % 2 == 1 {
        1
    } else {
        square_counts(&c.field)[c.f[c.degree()].code() as usize]
    };
    Ok(affine + at_infinity)
}

fn check_point_count(c: &HyperellipticCurve) -> Result<(), CurveError> {
    if c.field.degree() != 1 {
        return Err(CurveError::NotPrimeField);
    }
    if c.genus != 1 {
        return Err(CurveError::GenusNotOne(c.genus));
    }
    Ok(())
}

/// `squares[a] = #{y : y² = a}`.
fn square_counts(k: &FiniteField) -> Vec<u64> {
    let mut counts = vec![0u64; k.order() as usize];
    for y in k.elements() {
        counts[k.mul(y, y).code() as usize] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semilinear::sigma_power_product;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f3() -> FiniteField {
        make_field(3, 1).unwrap()
    }

    fn normal_form(k: &FiniteField, a: &[Elem; 7]) -> Vec<Elem> {
        let mut f = vec![k.zero(); 10];
        f[1] = k.one();
        f[2..9].copy_from_slice(a);
        f[9] = k.one();
        f
    }

    #[test]
    fn validation() {
        let k = f3();
        assert_eq!(HyperellipticCurve::from_ints(&k, &[0, 1, 1]), Err(CurveError::DegreeOutOfRange(2)));
        assert_eq!(HyperellipticCurve::from_ints(&k, &[1, 0, 0, 1]), Err(CurveError::NotSquarefree));
        assert_eq!(HyperellipticCurve::from_ints(&k, &[0, 0, 1, 1]), Err(CurveError::NotSquarefree));
        let k2 = make_field(2, 1).unwrap();
        assert_eq!(HyperellipticCurve::from_ints(&k2, &[0, 1, 0, 1]), Err(CurveError::EvenCharacteristic));
        let c = HyperellipticCurve::from_ints(&k, &[0, 2, 0, 1, 0]).unwrap();
        assert_eq!(c.genus(), 1);
        assert_eq!(c.degree(), 3);
        let c = HyperellipticCurve::from_ints(&make_field(5, 1).unwrap(), &[1, 1, 0, 0, 0, 1]).unwrap();
        assert_eq!(c.genus(), 2);
    }

    #[test]
    fn polynomial_helpers() {
        let k = make_field(5, 1).unwrap();
        let a: Vec<Elem> = [1, 1].iter().map(|&c| k.from_int(c)).collect();
        let sq = poly::pow(&k, &a, 2);
        assert_eq!(sq.iter().map(|c| c.code()).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert_eq!(poly::gcd(&k, &sq, &poly::derivative(&k, &sq)), a);
        assert_eq!(poly::eval(&k, &sq, k.from_int(4)).code(), 0);
        assert!(poly::rem(&k, &sq, &a).is_empty());
    }

    #[test]
    fn genus_one_legendre_example() {
        let k = f3();
        let c = HyperellipticCurve::from_ints(&k, &[0, 2, 0, 1]).unwrap();
        let h = hasse_witt_hyperelliptic(&c);
        assert_eq!(h, Matrix::from_ints(&k, &[&[0]]));
        assert_eq!(affine_point_count(&c).unwrap(), 3);
        assert_eq!(projective_point_count(&c).unwrap() % 3, 1);
    }

    #[test]
    fn example_curve_pattern_at_zero() {
        let k = f3();
        let c = HyperellipticCurve::new(&k, normal_form(&k, &[k.zero(); 7])).unwrap();
        let h = hasse_witt_hyperelliptic(&c);
        let nonzero: Vec<(usize, usize)> = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|&(i, j)| !h[(i, j)].is_zero())
            .collect();
        assert_eq!(nonzero, vec![(1, 0), (2, 3)]);
        let r = hw_partition(&h).unwrap();
        assert_eq!(r.rho, vec![4, 2, 0]);
        assert_eq!(r.delta.parts(), &[2, 2]);
        assert_eq!((r.p_rank, r.a_number), (0, 2));
    }

    #[test]
    fn example_curve_pattern_random_f9() {
        let k = make_field(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut tested = 0;
        while tested < 20 {
            let a: [Elem; 7] = std::array::from_fn(|_| k.elem(rng.gen_range(0..9)).unwrap());
            let Ok(c) = HyperellipticCurve::new(&k, normal_form(&k, &a)) else {
                continue;
            };
            let z = k.zero();
            let o = k.one();
            let [a2, a3, a4, a5, a6, a7, a8] = a;
            let expected = Matrix::from_rows(
                &k,
                4,
                &[
                    vec![a2, a5, a8, z],
                    vec![o, a4, a7, z],
                    vec![z, a3, a6, o],
                    vec![z, a2, a5, a8],
                ],
            )
            .unwrap();
            assert_eq!(hasse_witt_hyperelliptic(&c), expected);
            tested += 1;
        }
    }

    #[test]
    fn hw_partition_extremes() {
        let k = f3();
        let r = hw_partition(&Matrix::identity(&k, 4)).unwrap();
        assert_eq!(r.rho, vec![4, 4]);
        assert!(r.delta.parts().is_empty());
        assert_eq!((r.p_rank, r.a_number), (4, 0));
        let r = hw_partition(&Matrix::zeros(&k, 4, 4)).unwrap();
        assert_eq!(r.rho, vec![4, 0]);
        assert_eq!(r.delta.parts(), &[4]);
        assert_eq!((r.p_rank, r.a_number), (0, 4));
        assert!(hw_partition(&Matrix::zeros(&k, 2, 3)).is_err());
    }

    #[test]
    fn cartier_manin_relations() {
        let k = f3();
        let h = Matrix::from_ints(&k, &[&[1, 2], &[0, 1]]);
        assert_eq!(cartier_manin(&h).unwrap(), h.transpose());
        let z = Matrix::zeros(&k, 3, 3);
        assert_eq!(cartier_manin(&z).unwrap(), z);
        assert!(cartier_manin(&Matrix::zeros(&k, 1, 2)).is_err());

        let k9 = make_field(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let h = Matrix::random(&k9, 3, 3, &mut rng);
            let m = cartier_manin(&h).unwrap();
            assert_eq!(hasse_witt_from_cartier_manin(&m).unwrap(), h);
            for i in 1..=3 {
                assert_eq!(
                    sigma_power_product(&m, i).unwrap().rank(),
                    sigma_power_product(&h, i).unwrap().rank()
                );
            }
        }
    }

    /// Every squarefree cubic or quartic: the supersingularity verdicts of `H` and of
    /// the point count agree.
    #[test]
    fn genus_one_point_count_sweep() {
        for p in [3u32, 5, 7] {
            let k = make_field(p, 1).unwrap();
            for deg in [3usize, 4] {
                let total = (p as usize).pow(deg as u32) * (p as usize - 1);
                for idx in 0..total {
                    let mut rest = idx;
                    let mut f = Vec::with_capacity(deg + 1);
                    for _ in 0..deg {
                        f.push(k.from_int((rest % p as usize) as i64));
                        rest /= p as usize;
                    }
                    f.push(k.from_int(rest as i64 + 1));
                    let Ok(c) = HyperellipticCurve::new(&k, f) else {
                        continue;
                    };
                    let r = hw_partition(&hasse_witt_hyperelliptic(&c)).unwrap();
                    assert!(r.p_rank <= 1);
                    let n = projective_point_count(&c).unwrap();
                    assert_eq!(r.p_rank == 0, n % p as u64 == 1, "p = {p}, f = {:?}", c.f());
                    if deg == 3 {
                        assert_eq!(affine_point_count(&c).unwrap() + 1, n);
                    }
                }
            }
        }
    }

    #[test]
    fn point_count_errors() {
        let c = HyperellipticCurve::from_ints(&make_field(3, 2).unwrap(), &[0, 1, 0, 1]).unwrap();
        assert_eq!(affine_point_count(&c), Err(CurveError::NotPrimeField));
        let c = HyperellipticCurve::from_ints(&make_field(5, 1).unwrap(), &[1, 1, 0, 0, 0, 1]).unwrap();
        assert_eq!(affine_point_count(&c), Err(CurveError::GenusNotOne(2)));
    }

    #[test]
    fn json_round_trip() {
        let v = json!({"p": 3, "k": 2, "model": "hyperelliptic", "f": [[0, 0], [1, 0], [0, 1], [1, 0]]});
        let c = HyperellipticCurve::from_json(&v).unwrap();
        assert_eq!(c.to_json(), v);
        assert!(HyperellipticCurve::from_json(&json!({"p": 3, "model": "plane", "f": [0, 1, 0, 1]})).is_err());
        assert!(HyperellipticCurve::from_json(&json!({"p": 4, "f": [0, 1, 0, 1]})).is_err());
    }
}
