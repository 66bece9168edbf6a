//! Exact arithmetic in `F_{p^k}`.
//!
//! Elements are stored in the polynomial basis `F_p[x]/(m(x))` and encoded as
//! the integer `c_0 + c_1 p + ... + c_{k-1} p^{k-1}` (constant term first). For
//! small fields the ring operations and the Frobenius powers are served from
//! precomputed tables; larger fields fall back to polynomial arithmetic and
//! log/antilog tables.
//!
//! The modulus is the lexicographically smallest monic irreducible polynomial
//! of degree `k` (coefficients compared constant term first), so field
//! construction is deterministic across runs and platforms.

use std::fmt;
use std::sync::Arc;

use serde_json::Value;
use thiserror::Error;

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

const FULL_TABLE_LIMIT: u32 = 256;
const FROBENIUS_TABLE_LIMIT: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u32),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("field of size {p}^{k} exceeds the supported maximum {MAX_FIELD_SIZE}")]
    FieldTooLarge { p: u32, k: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({left} vs {right})")]
    FieldMismatch { left: String, right: String },
    #[error("invalid element encoding for {field}: {reason}")]
    InvalidElement { field: String, reason: String },
    #[error("{small} is not a subfield of {big}")]
    NotASubfield { small: String, big: String },
}

/// Raw element code of a [`FiniteField`]. Only meaningful together with its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Elem(pub(crate) u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    /// Integer code `Σ c_i p^i`.
    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct FieldData {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    primitive: Elem,
    add_table: Option<Vec<u32>>,
    mul_table: Option<Vec<u32>>,
    neg_table: Vec<u32>,
    // exp[i] = g^i for i in 0..q-1, log[x] for x != 0
    exp: Vec<u32>,
    log: Vec<u32>,
    // frobenius[e][x] = x^(p^e), e in 0..k
    frobenius: Option<Vec<Vec<u32>>>,
}

/// The finite field `F_{p^k}`. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct FiniteField(Arc<FieldData>);

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.k == other.0.k)
    }
}

impl Eq for FiniteField {}

impl std::hash::Hash for FiniteField {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.k.hash(state);
    }
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)?;
        if self.0.k > 1 {
            write!(f, " (modulus {:?})", self.0.modulus)?;
        }
        Ok(())
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{}", self.0.p, self.0.k)
        }
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---- dense polynomials over F_p (coefficient vectors, constant term first) ----

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = (r[top] as u64 * lead_inv as u64 % p as u64) as u32;
        let shift = top - dm;
        for (i, &mi) in m.iter().enumerate() {
            let sub = (c as u64 * mi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

fn digits_of(mut code: u32, p: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = code % p;
            code /= p;
            d
        })
        .collect()
}

fn code_of(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0u32, |acc, &d| acc * p + d)
}

/// True when the monic polynomial `m` (degree `k`) has no monic factor of degree `1..=k/2`.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let k = m.len() - 1;
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut div = digits_of(idx as u32, p, d as u32);
            div.push(1);
            if poly_rem(m, &div, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Builds `F_{p^k}` with the lexicographically smallest monic irreducible modulus.
pub fn make_field(p: u32, k: u32) -> Result<FiniteField, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NonPrime(p));
    }
    if k == 0 {
        return Err(FieldError::DegreeZero);
    }
    let q = (p as u64).checked_pow(k).filter(|&q| q <= MAX_FIELD_SIZE);
    let q = match q {
        Some(q) => q as u32,
        None => return Err(FieldError::FieldTooLarge { p, k }),
    };
    let modulus = if k == 1 {
        vec![0, 1]
    } else {
        find_modulus(p, k)
    };
    Ok(FiniteField(Arc::new(build_tables(p, k, q, modulus))))
}

fn find_modulus(p: u32, k: u32) -> Vec<u32> {
    let count = p.pow(k);
    for idx in 0..count {
        // c_0 is the most significant digit of the lexicographic index
        let mut coeffs: Vec<u32> = digits_of(idx, p, k).into_iter().rev().collect();
        coeffs.push(1);
        if coeffs[0] != 0 && is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn slow_mul(a: u32, b: u32, p: u32, k: u32, modulus: &[u32]) -> u32 {
    if k == 1 {
        return (a as u64 * b as u64 % p as u64) as u32;
    }
    let da = digits_of(a, p, k);
    let db = digits_of(b, p, k);
    let mut prod = vec![0u32; 2 * k as usize - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    let mut r = poly_rem(&prod, modulus, p);
    r.resize(k as usize, 0);
    code_of(&r, p)
}

fn slow_add(a: u32, b: u32, p: u32, k: u32) -> u32 {
    if k == 1 {
        return (a + b) % p;
    }
    let mut out = 0u32;
    let mut place = 1u32;
    let (mut a, mut b) = (a, b);
    for _ in 0..k {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place = place.wrapping_mul(p);
    }
    out
}

fn slow_neg(a: u32, p: u32, k: u32) -> u32 {
    let d: Vec<u32> = digits_of(a, p, k).into_iter().map(|x| (p - x) % p).collect();
    code_of(&d, p)
}

fn build_tables(p: u32, k: u32, q: u32, modulus: Vec<u32>) -> FieldData {
    let neg_table: Vec<u32> = (0..q).map(|a| slow_neg(a, p, k)).collect();

    // multiplicative group is cyclic of order q - 1; pick the smallest generator
    let order = q - 1;
    let factors = prime_factors(order.max(1));
    let pow_slow = |mut base: u32, mut e: u32| {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = slow_mul(acc, base, p, k, &modulus);
            }
            base = slow_mul(base, base, p, k, &modulus);
            e >>= 1;
        }
        acc
    };
    let primitive = if q == 2 {
        1
    } else {
        (2..q)
            .find(|&g| factors.iter().all(|&r| pow_slow(g, order / r) != 1))
            .expect("a primitive element exists")
    };
    let mut exp = Vec::with_capacity(order as usize);
    let mut log = vec![0u32; q as usize];
    let mut cur = 1u32;
    for i in 0..order {
        exp.push(cur);
        log[cur as usize] = i;
        cur = slow_mul(cur, primitive, p, k, &modulus);
    }

    let (add_table, mul_table) = if q <= FULL_TABLE_LIMIT {
        let n = q as usize;
        let mut add = vec![0u32; n * n];
        let mut mul = vec![0u32; n * n];
        for a in 0..q {
            for b in 0..q {
                add[a as usize * n + b as usize] = slow_add(a, b, p, k);
                mul[a as usize * n + b as usize] = if a == 0 || b == 0 {
                    0
                } else {
                    exp[((log[a as usize] as u64 + log[b as usize] as u64) % order as u64) as usize]
                };
            }
        }
        (Some(add), Some(mul))
    } else {
        (None, None)
    };

    let frobenius = if q <= FROBENIUS_TABLE_LIMIT {
        let mut tabs = Vec::with_capacity(k as usize);
        let mut cur: Vec<u32> = (0..q).collect();
        for _ in 0..k {
            tabs.push(cur.clone());
            cur = cur.iter().map(|&x| pow_slow(x, p)).collect();
        }
        Some(tabs)
    } else {
        None
    };

    FieldData {
        p,
        k,
        q,
        modulus,
        primitive: Elem(primitive),
        add_table,
        mul_table,
        neg_table,
        exp,
        log,
        frobenius,
    }
}

impl FiniteField {
    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.k
    }

    /// Number of elements `p^k`.
    pub fn order(&self) -> u32 {
        self.0.q
    }

    /// Modulus coefficients, constant term first, monic of degree `k`.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// The generator used for the log tables (smallest code of multiplicative order `q - 1`).
    pub fn primitive_element(&self) -> Elem {
        self.0.primitive
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// The polynomial variable `x` (equals `1·x`); for `k = 1` the modulus is `x`, so this is zero.
    pub fn generator(&self) -> Elem {
        if self.0.k == 1 {
            Elem::ZERO
        } else {
            Elem(self.0.p)
        }
    }

    /// Images of all elements (indexed by code) under a field embedding into `big`.
    ///
    /// The generator is sent to the root of its modulus in `big` with the smallest code.
    pub fn embedding(&self, big: &FiniteField) -> Result<Vec<Elem>, FieldError> {
        if self.0.p != big.0.p || !big.0.k.is_multiple_of(self.0.k) {
            return Err(FieldError::NotASubfield {
                small: self.to_string(),
                big: big.to_string(),
            });
        }
        let modulus = self.modulus();
        let root = big
            .elements()
            .find(|&r| {
                modulus
                    .iter()
                    .rev()
                    .fold(Elem::ZERO, |acc, &c| big.add(big.mul(acc, r), big.from_int(c as i64)))
                    .is_zero()
            })
            .expect("every extension of degree divisible by k contains a root");
        Ok(self
            .elements()
            .map(|x| {
                self.coeffs(x)
                    .iter()
                    .rev()
                    .fold(Elem::ZERO, |acc, &c| big.add(big.mul(acc, root), big.from_int(c as i64)))
            })
            .collect())
    }

    /// Element with the given code, if in range.
    pub fn elem(&self, code: u32) -> Option<Elem> {
        (code < self.0.q).then_some(Elem(code))
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem, FieldError> {
        if coeffs.len() != self.0.k as usize || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(FieldError::InvalidElement {
                field: self.to_string(),
                reason: format!("expected {} residues in [0, {})", self.0.k, self.0.p),
            });
        }
        Ok(Elem(code_of(coeffs, self.0.p)))
    }

    pub fn coeffs(&self, x: Elem) -> Vec<u32> {
        digits_of(x.0, self.0.p, self.0.k)
    }

    /// All `q` elements in ascending code order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.0.q).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let d = &*self.0;
        if let Some(t) = &d.add_table {
            return Elem(t[a.0 as usize * d.q as usize + b.0 as usize]);
        }
        Elem(slow_add(a.0, b.0, d.p, d.k))
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.0.neg_table[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let d = &*self.0;
        if let Some(t) = &d.mul_table {
            return Elem(t[a.0 as usize * d.q as usize + b.0 as usize]);
        }
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let order = d.q as u64 - 1;
        Elem(d.exp[((d.log[a.0 as usize] as u64 + d.log[b.0 as usize] as u64) % order) as usize])
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.is_zero() {
            return None;
        }
        let d = &*self.0;
        let order = d.q - 1;
        let l = d.log[a.0 as usize];
        Some(Elem(d.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        let inv = self.inv(b).ok_or(FieldError::DivisionByZero)?;
        Ok(self.mul(a, inv))
    }

    /// `a^e`; negative exponents invert first. `0^0 = 1`.
    pub fn pow(&self, a: Elem, e: i64) -> Result<Elem, FieldError> {
        if e == 0 {
            return Ok(Elem::ONE);
        }
        if a.is_zero() {
            return if e > 0 {
                Ok(Elem::ZERO)
            } else {
                Err(FieldError::DivisionByZero)
            };
        }
        let order = self.0.q as i64 - 1;
        let l = self.0.log[a.0 as usize] as i64;
        let idx = (l * e.rem_euclid(order)).rem_euclid(order);
        Ok(Elem(self.0.exp[idx as usize]))
    }

    /// `σ^e(x) = x^(p^(e mod k))`; negative `e` gives powers of `σ^{-1}`.
    #[inline]
    pub fn frobenius(&self, x: Elem, e: i64) -> Elem {
        let d = &*self.0;
        let shift = e.rem_euclid(d.k as i64) as usize;
        if shift == 0 {
            return x;
        }
        if let Some(t) = &d.frobenius {
            return Elem(t[shift][x.0 as usize]);
        }
        let mut y = x;
        for _ in 0..shift {
            y = self.pow(y, d.p as i64).expect("positive exponent");
        }
        y
    }

    /// Element wire format: an integer for `k = 1`, a length-`k` coefficient array otherwise.
    pub fn to_json(&self, x: Elem) -> Value {
        if self.0.k == 1 {
            Value::from(x.0)
        } else {
            Value::from(self.coeffs(x))
        }
    }

    pub fn from_json(&self, v: &Value) -> Result<Elem, FieldError> {
        let bad = |reason: &str| FieldError::InvalidElement {
            field: self.to_string(),
            reason: reason.to_string(),
        };
        let residue = |v: &Value| -> Result<u32, FieldError> {
            v.as_u64()
                .filter(|&c| c < self.0.p as u64)
                .map(|c| c as u32)
                .ok_or_else(|| bad(&format!("expected an integer in [0, {})", self.0.p)))
        };
        match v {
            Value::Number(_) if self.0.k == 1 => Ok(Elem(residue(v)?)),
            Value::Array(items) if self.0.k > 1 => {
                if items.len() != self.0.k as usize {
                    return Err(bad(&format!("expected an array of length {}", self.0.k)));
                }
                let coeffs = items.iter().map(residue).collect::<Result<Vec<_>, _>>()?;
                self.from_coeffs(&coeffs)
            }
            _ if self.0.k == 1 => Err(bad("expected an integer")),
            _ => Err(bad("expected a coefficient array")),
        }
    }

    pub fn element(&self, x: Elem) -> FieldElement {
        FieldElement {
            field: self.clone(),
            elem: x,
        }
    }

    pub(crate) fn check_same(&self, other: &FiniteField) -> Result<(), FieldError> {
        if self == other {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

/// An element paired with its field; operations check that both operands agree.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: FiniteField,
    elem: Elem,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            write!(f, "{}", self.elem.0)
        } else {
            write!(f, "{:?}", self.field.coeffs(self.elem))
        }
    }
}

/// Binary operation selector for [`field_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn elem(&self) -> Elem {
        self.elem
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.elem)
    }

    pub fn is_zero(&self) -> bool {
        self.elem.is_zero()
    }

    fn wrap(&self, elem: Elem) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            elem,
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        field_arith(self, other, ArithOp::Add)
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        field_arith(self, other, ArithOp::Sub)
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        field_arith(self, other, ArithOp::Mul)
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        field_arith(self, other, ArithOp::Div)
    }

    pub fn neg(&self) -> FieldElement {
        self.wrap(self.field.neg(self.elem))
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        let e = self.field.inv(self.elem).ok_or(FieldError::DivisionByZero)?;
        Ok(self.wrap(e))
    }

    pub fn pow(&self, e: i64) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.field.pow(self.elem, e)?))
    }

    pub fn frobenius(&self, e: i64) -> FieldElement {
        self.wrap(self.field.frobenius(self.elem, e))
    }
}

pub fn field_arith(
    a: &FieldElement,
    b: &FieldElement,
    op: ArithOp,
) -> Result<FieldElement, FieldError> {
    a.field.check_same(&b.field)?;
    let f = &a.field;
    let r = match op {
        ArithOp::Add => f.add(a.elem, b.elem),
        ArithOp::Sub => f.sub(a.elem, b.elem),
        ArithOp::Mul => f.mul(a.elem, b.elem),
        ArithOp::Div => f.div(a.elem, b.elem)?,
    };
    Ok(a.wrap(r))
}
