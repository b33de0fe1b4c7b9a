//! Small explicit finite fields.
//!
//! A [`Field`] is either `F_p[w]/(f(w))` for a monic irreducible `f` over the
//! prime field, or a tower `F[W]/(g(W))` over another [`Field`]. Elements are
//! stored as a packed integer: the base-`|base|` digits of the value are the
//! polynomial-basis coordinates. Because the base field uses the same packing,
//! the value's base-`p` digits are the flattened `F_p` coordinates, so
//! addition is digit-wise mod `p` at every level of a tower.
//!
//! Multiplication, inversion and powering go through exp/log tables that are
//! built eagerly at construction, which is why fields are capped at
//! [`FIELD_SIZE_CAP`] elements.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Largest field (in elements) that may be constructed.
pub const FIELD_SIZE_CAP: u64 = 1 << 20;
/// Largest base field accepted by [`Field::extend_quadratic`].
pub const QUADRATIC_BASE_CAP: u64 = 1 << 10;

/// Moduli used when the caller asks for the default, keyed by `(p, m)`.
/// Coefficients are listed constant term first.
const DEFAULT_MODULI: &[(u32, usize, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
];

/// Modulus selection for [`Field::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Modulus {
    Default,
    /// Coefficients over `F_p`, constant term first, monic.
    Explicit(Vec<u32>),
}

/// Handle to an immutable finite field. Cloning is cheap.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

struct FieldInner {
    p: u32,
    degree: usize,
    base: Option<Field>,
    modulus: Vec<u32>,
    size: u32,
    base_size: u32,
    p_digits: u32,
    generator_name: String,
    generator: u32,
    indeterminate_primitive: bool,
    exp: Vec<u32>,
    log: Vec<u32>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, e)` when `n = p^e` for a prime `p` and `e >= 1`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let mut e = 0;
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
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

/// Arithmetic of the coefficient ring of a modulus: either `F_p` or a [`Field`].
#[derive(Clone, Copy)]
enum BaseRing<'a> {
    Prime(u32),
    Field(&'a Field),
}

impl BaseRing<'_> {
    fn size(&self) -> u32 {
        match self {
            BaseRing::Prime(p) => *p,
            BaseRing::Field(f) => f.size(),
        }
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        match self {
            BaseRing::Prime(p) => (a + b) % p,
            BaseRing::Field(f) => f.add_raw(a, b),
        }
    }
    fn sub(&self, a: u32, b: u32) -> u32 {
        match self {
            BaseRing::Prime(p) => (a + p - b) % p,
            BaseRing::Field(f) => f.sub_raw(a, b),
        }
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        match self {
            BaseRing::Prime(p) => ((a as u64 * b as u64) % *p as u64) as u32,
            BaseRing::Field(f) => f.mul_raw(a, b),
        }
    }
    fn inv(&self, a: u32) -> u32 {
        match self {
            BaseRing::Prime(p) => {
                // a^(p-2)
                let (mut r, mut b, mut e) = (1u64, a as u64, *p as u64 - 2);
                while e > 0 {
                    if e & 1 == 1 {
                        r = r * b % *p as u64;
                    }
                    b = b * b % *p as u64;
                    e >>= 1;
                }
                r as u32
            }
            BaseRing::Field(f) => f.inv_raw(a),
        }
    }
}

/// Remainder of `a` modulo the monic-or-not nonzero `b`, dense ascending coefficients.
fn poly_rem(ring: BaseRing, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = ring.inv(b[db]);
    while r.len() > db {
        let top = *r.last().unwrap();
        if top != 0 {
            let c = ring.mul(top, lead_inv);
            let shift = r.len() - 1 - db;
            for (k, &bk) in b.iter().enumerate() {
                r[shift + k] = ring.sub(r[shift + k], ring.mul(c, bk));
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(ring: BaseRing, modulus: &[u32]) -> bool {
    let deg = modulus.len() - 1;
    let q = ring.size() as u64;
    for d in 1..=deg / 2 {
        let count = q.pow(d as u32);
        for code in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                divisor.push((c % q) as u32);
                c /= q;
            }
            divisor.push(1);
            if poly_rem(ring, modulus, &divisor).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// Builds `F_{p^m}` over the prime field.
    ///
    /// `Modulus::Default` picks the conventional modulus for the six small
    /// fields used in the worked examples, and otherwise the lexicographically
    /// least monic irreducible (compared from the highest coefficient down).
    pub fn new(p: u64, m: usize, modulus: Modulus) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("degree must be positive".into()));
        }
        let size = (p as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
        if size > FIELD_SIZE_CAP as u128 {
            return Err(Error::SizeCap { size, cap: FIELD_SIZE_CAP });
        }
        let p = p as u32;
        let ring = BaseRing::Prime(p);
        let modulus = match modulus {
            Modulus::Explicit(c) => {
                if c.len() != m + 1 {
                    return Err(Error::BadModulus(format!(
                        "expected {} coefficients for degree {m}, got {}",
                        m + 1,
                        c.len()
                    )));
                }
                if c[m] != 1 {
                    return Err(Error::BadModulus("modulus must be monic".into()));
                }
                if let Some(bad) = c.iter().find(|&&x| x >= p) {
                    return Err(Error::BadModulus(format!("coefficient {bad} not reduced mod {p}")));
                }
                if !is_irreducible(ring, &c) {
                    return Err(Error::ReducibleModulus);
                }
                c
            }
            Modulus::Default => match DEFAULT_MODULI.iter().find(|(dp, dm, _)| *dp == p && *dm == m) {
                Some((_, _, c)) => c.to_vec(),
                None => least_irreducible(ring, m),
            },
        };
        Ok(Field(Arc::new(FieldInner::build(p, None, modulus, "w"))))
    }

    /// Degree-2 tower over `base`, using the least monic irreducible
    /// `T^2 + c1 T + c0`, ordered by the generator-power index of `(c1, c0)`
    /// with zero first.
    pub fn extend_quadratic(base: &Field) -> Result<Field> {
        if base.size() as u64 > QUADRATIC_BASE_CAP {
            return Err(Error::SizeCap {
                size: (base.size() as u128).pow(2),
                cap: FIELD_SIZE_CAP,
            });
        }
        let ring = BaseRing::Field(base);
        // Index 0 is the zero element, index k+1 is g^k.
        let by_order = |k: u32| if k == 0 { 0 } else { base.exp_raw(k - 1) };
        for k1 in 0..base.size() {
            for k0 in 1..base.size() {
                let modulus = vec![by_order(k0), by_order(k1), 1];
                if is_irreducible(ring, &modulus) {
                    return Ok(Field(Arc::new(FieldInner::build(
                        base.p(),
                        Some(base.clone()),
                        modulus,
                        "W",
                    ))));
                }
            }
        }
        Err(Error::Internal("no irreducible quadratic found".into()))
    }

    /// Tower extension with an explicit monic modulus over `base`
    /// (coefficients given as base elements, constant term first).
    pub fn extend_with(base: &Field, modulus: &[FieldElement], name: &str) -> Result<Field> {
        if modulus.iter().any(|c| c.field() != base) {
            return Err(Error::FieldMismatch);
        }
        if modulus.len() < 2 || !modulus.last().unwrap().is_one() {
            return Err(Error::BadModulus("modulus must be monic of degree >= 1".into()));
        }
        let size = (base.size() as u128).pow(modulus.len() as u32 - 1);
        if size > FIELD_SIZE_CAP as u128 {
            return Err(Error::SizeCap { size, cap: FIELD_SIZE_CAP });
        }
        let raw: Vec<u32> = modulus.iter().map(|c| c.value).collect();
        if !is_irreducible(BaseRing::Field(base), &raw) {
            return Err(Error::ReducibleModulus);
        }
        Ok(Field(Arc::new(FieldInner::build(base.p(), Some(base.clone()), raw, name))))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    /// Number of elements.
    pub fn size(&self) -> u32 {
        self.0.size
    }

    /// Degree over the immediate base (the prime field when there is none).
    pub fn degree(&self) -> usize {
        self.0.degree
    }

    /// Degree over the prime field.
    pub fn absolute_degree(&self) -> u32 {
        self.0.p_digits
    }

    pub fn base(&self) -> Option<&Field> {
        self.0.base.as_ref()
    }

    pub fn base_size(&self) -> u32 {
        self.0.base_size
    }

    /// Modulus coefficients, constant term first, as packed base values.
    pub fn modulus_values(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn generator_name(&self) -> &str {
        &self.0.generator_name
    }

    /// The stored multiplicative generator.
    pub fn generator(&self) -> FieldElement {
        self.element_unchecked(self.0.generator)
    }

    /// Whether the class of the indeterminate generates the multiplicative group.
    pub fn indeterminate_is_primitive(&self) -> bool {
        self.0.indeterminate_primitive
    }

    /// The class of the indeterminate (`w` or `W`).
    pub fn indeterminate(&self) -> FieldElement {
        if self.0.degree == 1 {
            // F_p[T]/(T + c0): T is -c0.
            let c0 = self.0.modulus[0];
            let v = (self.0.p - c0) % self.0.p;
            return self.element_unchecked(v);
        }
        self.element_unchecked(self.0.base_size)
    }

    pub fn zero(&self) -> FieldElement {
        self.element_unchecked(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element_unchecked(1)
    }

    /// Element with packed value `v`.
    pub fn element(&self, v: u32) -> Result<FieldElement> {
        if v >= self.size() {
            return Err(Error::InvalidArgument(format!("value {v} out of range for field of size {}", self.size())));
        }
        Ok(self.element_unchecked(v))
    }

    pub(crate) fn element_unchecked(&self, v: u32) -> FieldElement {
        debug_assert!(v < self.size());
        FieldElement { field: self.clone(), value: v }
    }

    /// Image of the integer `n` under `Z -> F`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        let v = n.rem_euclid(self.0.p as i64) as u32;
        self.element_unchecked(v)
    }

    /// `g^k` for the stored generator `g`; `k` may be negative.
    pub fn gen_pow(&self, k: i64) -> FieldElement {
        let order = self.size() as i64 - 1;
        self.element_unchecked(self.0.exp[k.rem_euclid(order) as usize])
    }

    /// Coordinates over the immediate base (packed base values), length = degree.
    pub fn coords(&self, x: &FieldElement) -> Vec<u32> {
        let mut v = x.value;
        (0..self.0.degree)
            .map(|_| {
                let c = v % self.0.base_size;
                v /= self.0.base_size;
                c
            })
            .collect()
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<FieldElement> {
        if coords.len() != self.0.degree || coords.iter().any(|&c| c >= self.0.base_size) {
            return Err(Error::InvalidArgument("coordinates not reduced".into()));
        }
        let v = coords.iter().rev().fold(0u32, |acc, &c| acc * self.0.base_size + c);
        Ok(self.element_unchecked(v))
    }

    /// Every element, in packed-value order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.size()).map(move |v| self.element_unchecked(v))
    }

    /// Lifts an element of this field or of its immediate base into this field.
    pub fn embed(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.field() == self {
            return Ok(x.clone());
        }
        match self.base() {
            // Coordinate-wise embedding: the base value is the constant coordinate.
            Some(b) if b == x.field() => Ok(self.element_unchecked(x.value)),
            _ => Err(Error::FieldMismatch),
        }
    }

    /// The base-field element equal to `x`, when all higher coordinates vanish.
    pub fn restrict_to_base(&self, x: &FieldElement) -> Option<FieldElement> {
        let base = self.base()?;
        (x.field() == self && x.value < self.0.base_size).then(|| base.element_unchecked(x.value))
    }

    /// Whether `x` (of this field) lies in the immediate base.
    pub fn in_base(&self, x: &FieldElement) -> bool {
        x.value < self.0.base_size
    }

    // ---- raw arithmetic on packed values ----

    pub(crate) fn add_raw(&self, a: u32, b: u32) -> u32 {
        let p = self.0.p;
        if p == 2 {
            return a ^ b;
        }
        let (mut a, mut b, mut out, mut place) = (a, b, 0u32, 1u32);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub(crate) fn neg_raw(&self, a: u32) -> u32 {
        let p = self.0.p;
        if p == 2 {
            return a;
        }
        let (mut a, mut out, mut place) = (a, 0u32, 1u32);
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out
    }

    pub(crate) fn sub_raw(&self, a: u32, b: u32) -> u32 {
        self.add_raw(a, self.neg_raw(b))
    }

    pub(crate) fn mul_raw(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let order = self.0.size - 1;
        let k = (self.0.log[a as usize] as u64 + self.0.log[b as usize] as u64) % order as u64;
        self.0.exp[k as usize]
    }

    pub(crate) fn inv_raw(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        let order = self.0.size - 1;
        self.0.exp[((order - self.0.log[a as usize]) % order) as usize]
    }

    pub(crate) fn pow_raw(&self, a: u32, k: i128) -> u32 {
        if a == 0 {
            return if k == 0 { 1 } else { 0 };
        }
        let order = (self.0.size - 1) as i128;
        let e = (self.0.log[a as usize] as i128 * k.rem_euclid(order)).rem_euclid(order);
        self.0.exp[e as usize]
    }

    pub(crate) fn exp_raw(&self, k: u32) -> u32 {
        self.0.exp[(k % (self.0.size - 1)) as usize]
    }

    pub(crate) fn log_raw(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.0.log[a as usize])
    }
}

fn least_irreducible(ring: BaseRing, m: usize) -> Vec<u32> {
    let q = ring.size() as u64;
    for code in 0..q.pow(m as u32) {
        let mut c = code;
        let mut modulus: Vec<u32> = (0..m)
            .map(|_| {
                let d = (c % q) as u32;
                c /= q;
                d
            })
            .collect();
        modulus.push(1);
        if is_irreducible(ring, &modulus) {
            return modulus;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldInner {
    fn build(p: u32, base: Option<Field>, modulus: Vec<u32>, name: &str) -> FieldInner {
        let degree = modulus.len() - 1;
        let (base_size, base_digits) = match &base {
            None => (p, 1),
            Some(b) => (b.size(), b.absolute_degree()),
        };
        let size = base_size.pow(degree as u32);
        let mut inner = FieldInner {
            p,
            degree,
            base,
            modulus,
            size,
            base_size,
            p_digits: base_digits * degree as u32,
            generator_name: name.to_string(),
            generator: 1,
            indeterminate_primitive: false,
            exp: Vec::new(),
            log: Vec::new(),
        };
        inner.build_tables();
        inner
    }

    fn ring(&self) -> BaseRing<'_> {
        match &self.base {
            None => BaseRing::Prime(self.p),
            Some(b) => BaseRing::Field(b),
        }
    }

    fn unpack(&self, mut v: u32) -> Vec<u32> {
        (0..self.degree)
            .map(|_| {
                let c = v % self.base_size;
                v /= self.base_size;
                c
            })
            .collect()
    }

    fn pack(&self, c: &[u32]) -> u32 {
        c.iter().rev().fold(0, |acc, &x| acc * self.base_size + x)
    }

    /// Product in the quotient ring by schoolbook multiplication; used only
    /// before the tables exist.
    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let ring = self.ring();
        let (ca, cb) = (self.unpack(a), self.unpack(b));
        let mut prod = vec![0u32; 2 * self.degree - 1];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = ring.add(prod[i + j], ring.mul(x, y));
            }
        }
        let mut r = poly_rem(ring, &prod, &self.modulus);
        r.resize(self.degree, 0);
        self.pack(&r)
    }

    fn slow_pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut r, mut b) = (1u32, a);
        while e > 0 {
            if e & 1 == 1 {
                r = self.slow_mul(r, b);
            }
            b = self.slow_mul(b, b);
            e >>= 1;
        }
        r
    }

    fn is_primitive(&self, g: u32) -> bool {
        if g == 0 {
            return false;
        }
        let order = self.size as u64 - 1;
        if self.slow_pow(g, order) != 1 {
            return false;
        }
        prime_factors(order).into_iter().all(|r| self.slow_pow(g, order / r) != 1)
    }

    fn build_tables(&mut self) {
        let indeterminate = if self.degree == 1 {
            (self.p - self.modulus[0]) % self.p
        } else {
            self.base_size
        };
        self.indeterminate_primitive = self.is_primitive(indeterminate);
        self.generator = if self.indeterminate_primitive {
            indeterminate
        } else {
            (1..self.size).find(|&g| self.is_primitive(g)).expect("finite fields have primitive elements")
        };
        let order = (self.size - 1) as usize;
        let mut exp = Vec::with_capacity(order);
        let mut log = vec![0u32; self.size as usize];
        let mut cur = 1u32;
        for k in 0..order {
            exp.push(cur);
            log[cur as usize] = k as u32;
            cur = self.slow_mul(cur, self.generator);
        }
        debug_assert_eq!(cur, 1);
        self.exp = exp;
        self.log = log;
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus && self.0.base == other.0.base)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.size())
    }
}

impl fmt::Display for Field {
    /// `F_16 = F_2[w]/(w^4 + w + 1)`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base_name = match self.base() {
            None => format!("F_{}", self.p()),
            Some(b) => format!("F_{}", b.size()),
        };
        let name = self.generator_name();
        let mut terms = Vec::new();
        for (k, &c) in self.0.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = match self.base() {
                None => c.to_string(),
                Some(b) => b.element_unchecked(c).to_string(),
            };
            let mono = match k {
                0 => String::new(),
                1 => name.to_string(),
                _ => format!("{name}^{k}"),
            };
            terms.push(match (coef.as_str(), mono.is_empty()) {
                (_, true) => coef,
                ("1", false) => mono,
                (_, false) => format!("{coef}*{mono}"),
            });
        }
        write!(f, "F_{} = {base_name}[{name}]/({})", self.size(), terms.join(" + "))
    }
}

/// Element of a [`Field`].
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    value: u32,
}

/// The four binary operations accepted by [`FieldElement::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Packed coordinate value.
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_one(&self) -> bool {
        self.value == 1
    }

    pub fn coords(&self) -> Vec<u32> {
        self.field.coords(self)
    }

    /// Checked binary arithmetic.
    pub fn apply(&self, op: BinaryOp, rhs: &FieldElement) -> Result<FieldElement> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch);
        }
        let f = &self.field;
        let v = match op {
            BinaryOp::Add => f.add_raw(self.value, rhs.value),
            BinaryOp::Sub => f.sub_raw(self.value, rhs.value),
            BinaryOp::Mul => f.mul_raw(self.value, rhs.value),
            BinaryOp::Div => {
                if rhs.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                f.mul_raw(self.value, f.inv_raw(rhs.value))
            }
        };
        Ok(f.element_unchecked(v))
    }

    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.field.element_unchecked(self.field.inv_raw(self.value)))
    }

    /// `self^k`; negative exponents require a nonzero base.
    pub fn pow(&self, k: i64) -> Result<FieldElement> {
        if k < 0 && self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.field.element_unchecked(self.field.pow_raw(self.value, k as i128)))
    }

    /// `self^(p^e)` by repeated `p`-th powering.
    pub fn frobenius(&self, e: u32) -> FieldElement {
        let p = self.field.p() as i128;
        let mut v = self.value;
        for _ in 0..e {
            v = self.field.pow_raw(v, p);
        }
        self.field.element_unchecked(v)
    }

    /// Exponent `k` with `g^k = self` for the stored generator; `None` for zero.
    pub fn discrete_log(&self) -> Option<u32> {
        self.field.log_raw(self.value)
    }

    /// Coordinate rendering `c0+c1*w+...` over the immediate base.
    pub fn to_coord_string(&self) -> String {
        let name = self.field.generator_name();
        let coords = self.coords();
        let mut terms = Vec::new();
        for (k, &c) in coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let coef = match self.field.base() {
                None => c.to_string(),
                Some(b) => {
                    let s = b.element_unchecked(c).to_string();
                    if k > 0 && s.contains('^') {
                        format!("({s})")
                    } else {
                        s
                    }
                }
            };
            terms.push(match k {
                0 => coef,
                _ => {
                    let mono = if k == 1 { name.to_string() } else { format!("{name}^{k}") };
                    if coef == "1" {
                        mono
                    } else {
                        format!("{coef}*{mono}")
                    }
                }
            });
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }

    /// Flattened `F_p` coordinates, lowest first.
    pub fn prime_coords(&self) -> Vec<u32> {
        let p = self.field.p();
        let mut v = self.value;
        (0..self.field.absolute_degree())
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    /// `{"log": k}`, or `{"log": null, "coords": [...]}` for zero.
    pub fn to_json(&self) -> Value {
        match self.discrete_log() {
            Some(k) => json!({ "log": k }),
            None => json!({ "log": null, "coords": self.prime_coords() }),
        }
    }

    pub fn from_json(field: &Field, v: &Value) -> Result<FieldElement> {
        let log = v.get("log").ok_or_else(|| Error::Parse("missing \"log\"".into()))?;
        if let Some(k) = log.as_u64() {
            return Ok(field.gen_pow(k as i64));
        }
        let coords = v
            .get("coords")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("zero element needs \"coords\"".into()))?;
        let p = field.p();
        let mut value = 0u32;
        for c in coords.iter().rev() {
            let d = c.as_u64().filter(|&d| d < p as u64).ok_or_else(|| Error::Parse("bad coordinate".into()))?;
            value = value * p + d as u32;
        }
        field.element(value)
    }

    /// Parses `0`, `1`, an integer, `w`, `w^k` or `w^{k}` (using the field's generator name).
    pub fn parse(field: &Field, s: &str) -> Result<FieldElement> {
        let s = s.trim();
        if let Ok(n) = s.parse::<i64>() {
            return Ok(field.from_int(n));
        }
        let name = field.generator_name();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, s),
        };
        let rest = body
            .strip_prefix(name)
            .ok_or_else(|| Error::Parse(format!("cannot parse element {s:?}")))?;
        let k: i64 = if rest.is_empty() {
            1
        } else {
            let e = rest
                .strip_prefix('^')
                .ok_or_else(|| Error::Parse(format!("cannot parse element {s:?}")))?;
            let e = e.trim_start_matches('{').trim_end_matches('}');
            e.parse().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?
        };
        let x = field.gen_pow(k);
        Ok(if neg { -x } else { x })
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &FieldElement) -> bool {
        self.value == other.value && self.field == other.field
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.size().hash(state);
        self.value.hash(state);
    }
}

impl fmt::Display for FieldElement {
    /// `0`, `1`, `w` or `w^k` in powers of the stored generator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.field.generator_name();
        match self.discrete_log() {
            None => write!(f, "0"),
            Some(0) => write!(f, "1"),
            Some(1) => write!(f, "{name}"),
            Some(k) => write!(f, "{name}^{k}"),
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {:?}", self.field)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.apply($op, rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
        impl $trait<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, BinaryOp::Add);
binop!(Sub, sub, BinaryOp::Sub);
binop!(Mul, mul, BinaryOp::Mul);
binop!(Div, div, BinaryOp::Div);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.field.element_unchecked(self.field.neg_raw(self.value))
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// Trace and norm of `x` from a quadratic tower down to `target`.
pub fn trace_norm(x: &FieldElement, target: &Field) -> Result<(FieldElement, FieldElement)> {
    let ext = x.field();
    if ext.base() != Some(target) || ext.degree() != 2 {
        return Err(Error::NotQuadraticTower);
    }
    let xq = x.pow(target.size() as i64)?;
    let trace = x + &xq;
    let norm = x * &xq;
    let down = |y: &FieldElement| {
        ext.restrict_to_base(y)
            .ok_or_else(|| Error::Internal(format!("{} does not lie in the base field", y.to_coord_string())))
    };
    Ok((down(&trace)?, down(&norm)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, m: usize) -> Field {
        Field::new(p, m, Modulus::Default).unwrap()
    }

    #[test]
    fn default_f16_relation() {
        let k = f(2, 4);
        let w = k.indeterminate();
        assert_eq!(w.pow(4).unwrap(), &w + &k.one());
        assert!(k.indeterminate_is_primitive());
    }

    #[test]
    fn prime_field_degree_one() {
        let k = f(2, 1);
        assert_eq!(k.size(), 2);
        assert_eq!(k.generator(), k.one());
        let k7 = f(7, 1);
        assert_eq!(k7.generator().discrete_log(), Some(1));
        assert_eq!(k7.generator().pow(6).unwrap(), k7.one());
        assert_eq!(k7.generator().pow(3).unwrap(), k7.from_int(-1));
    }

    #[test]
    fn f9_explicit_modulus() {
        let k = Field::new(3, 2, Modulus::Explicit(vec![2, 2, 1])).unwrap();
        let w = k.indeterminate();
        assert_eq!(w.pow(2).unwrap(), &w + &k.one());
        assert_eq!(w.pow(8).unwrap(), k.one());
    }

    #[test]
    fn default_generators_are_the_indeterminate() {
        for &(p, m, _) in DEFAULT_MODULI {
            let k = f(p as u64, m);
            assert!(k.indeterminate_is_primitive(), "p={p} m={m}");
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::new(4, 1, Modulus::Default).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(Field::new(2, 21, Modulus::Default), Err(Error::SizeCap { .. })));
        assert_eq!(
            Field::new(2, 2, Modulus::Explicit(vec![1, 0, 1])).unwrap_err(),
            Error::ReducibleModulus
        );
        assert!(matches!(Field::new(2, 2, Modulus::Explicit(vec![1, 1, 0])), Err(Error::BadModulus(_))));
        let big = f(2, 11);
        assert!(matches!(Field::extend_quadratic(&big), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn least_irreducible_defaults() {
        // x^2 + 1 is irreducible mod 7 and has the smallest encoding.
        assert_eq!(f(7, 2).modulus_values(), &[1, 0, 1]);
        // Over F_2, degree 6: x^6 + x + 1 is the least irreducible.
        assert_eq!(f(2, 6).modulus_values(), &[1, 1, 0, 0, 0, 0, 1]);
    }

    #[test]
    fn f32_power_in_coordinates() {
        let k = f(2, 5);
        let w = k.indeterminate();
        let mut acc = k.one();
        for _ in 0..19 {
            acc = &acc * &w;
        }
        assert_eq!(acc.coords(), vec![0, 1, 1, 0, 0]);
        assert_eq!(acc.to_coord_string(), "w+w^2");
    }

    #[test]
    fn quadratic_over_f2_is_f4() {
        let f2 = f(2, 1);
        let f4 = Field::extend_quadratic(&f2).unwrap();
        assert_eq!(f4.modulus_values(), &[1, 1, 1]);
        assert_eq!(f4.generator_name(), "W");
    }

    #[test]
    fn f81_embedding_is_a_ring_homomorphism() {
        let f9 = f(3, 2);
        let f81 = Field::extend_quadratic(&f9).unwrap();
        for a in f9.elements() {
            for b in f9.elements() {
                let ea = f81.embed(&a).unwrap();
                let eb = f81.embed(&b).unwrap();
                assert_eq!(f81.embed(&(&a * &b)).unwrap(), &ea * &eb);
                assert_eq!(f81.embed(&(&a + &b)).unwrap(), &ea + &eb);
            }
        }
        let w = f81.embed(&f9.indeterminate()).unwrap();
        let two = f81.from_int(2);
        assert!((&(&w * &w) + &(&two * &w) + &two).is_zero());
    }

    #[test]
    fn f16_tower_generator_order() {
        let f16 = Field::extend_quadratic(&f(2, 2)).unwrap();
        let g = f16.generator();
        let mut order = 1;
        let mut cur = g.clone();
        while !cur.is_one() {
            cur = &cur * &g;
            order += 1;
        }
        assert_eq!(order, 15);
    }

    #[test]
    fn arithmetic_edge_cases() {
        let k = f(2, 4);
        let x = k.gen_pow(3);
        assert_eq!(x.apply(BinaryOp::Div, &k.zero()).unwrap_err(), Error::DivisionByZero);
        assert_eq!(k.zero().pow(-1).unwrap_err(), Error::DivisionByZero);
        assert_eq!(x.pow(-1).unwrap(), x.inverse().unwrap());
        assert_eq!(k.zero().pow(0).unwrap(), k.one());
        let other = f(2, 3);
        assert_eq!(x.apply(BinaryOp::Add, &other.one()).unwrap_err(), Error::FieldMismatch);
    }

    #[test]
    fn frobenius_examples() {
        let f4 = f(2, 2);
        let w = f4.indeterminate();
        assert_eq!(w.frobenius(1), &w + &f4.one());
        assert_eq!(w.frobenius(0), w);
        let f16 = f(2, 4);
        assert!(f16.elements().all(|x| x.frobenius(4) == x));
    }

    #[test]
    fn trace_norm_examples() {
        let f2 = f(2, 1);
        let f4 = Field::extend_quadratic(&f2).unwrap();
        let (t, n) = trace_norm(&f4.zero(), &f2).unwrap();
        assert!(t.is_zero() && n.is_zero());
        let (t, _) = trace_norm(&f4.indeterminate(), &f2).unwrap();
        assert!(t.is_one());
        assert_eq!(trace_norm(&f2.one(), &f2).unwrap_err(), Error::NotQuadraticTower);

        let f9 = f(3, 2);
        let f81 = Field::extend_quadratic(&f9).unwrap();
        for a in f81.elements().filter(|a| !a.is_zero()) {
            if a.pow(9).unwrap() == -&a {
                let (_, n) = trace_norm(&a, &f9).unwrap();
                let expect = f81.restrict_to_base(&-(&a * &a)).unwrap();
                assert_eq!(n, expect);
            }
        }
    }

    #[test]
    fn discrete_log_examples() {
        let f32 = f(2, 5);
        let w = f32.indeterminate();
        assert_eq!(f32.one().discrete_log(), Some(0));
        assert_eq!((&w * &w + &w).discrete_log(), Some(19));
        assert_eq!(f32.zero().discrete_log(), None);
        let f16 = f(2, 4);
        let w = f16.indeterminate();
        assert_eq!((&w * &w + &w + f16.one()).discrete_log(), Some(10));
    }

    #[test]
    fn rendering_and_parsing() {
        let k = f(2, 4);
        assert_eq!(k.to_string(), "F_16 = F_2[w]/(w^4 + w + 1)");
        assert_eq!(k.gen_pow(10).to_string(), "w^10");
        assert_eq!(k.gen_pow(1).to_string(), "w");
        assert_eq!(FieldElement::parse(&k, "w^{10}").unwrap(), k.gen_pow(10));
        assert_eq!(FieldElement::parse(&k, "w").unwrap(), k.gen_pow(1));
        assert_eq!(FieldElement::parse(&k, "0").unwrap(), k.zero());
        let f27 = f(3, 3);
        assert_eq!(FieldElement::parse(&f27, "2").unwrap(), -f27.one());
        assert!(FieldElement::parse(&k, "v^2").is_err());
        for x in k.elements() {
            assert_eq!(FieldElement::from_json(&k, &x.to_json()).unwrap(), x);
        }
        assert_eq!(k.zero().to_json(), json!({"log": null, "coords": [0, 0, 0, 0]}));
    }
}
