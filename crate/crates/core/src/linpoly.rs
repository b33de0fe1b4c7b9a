//! Linearized (additive) polynomials `sum c_i T^(b^i)` and the symbolic product.
//!
//! A [`LinearizedPoly`] always carries its base `b` (a power of the
//! characteristic). Reinterpreting a `q`-polynomial as a `p`-polynomial goes
//! through [`LinearizedPoly::rebase`]; nothing converts implicitly.
//!
//! The zero polynomial has an empty coefficient list and no symbolic degree.

use std::collections::HashSet;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement};
use crate::linalg;

#[derive(Clone, PartialEq, Eq)]
pub struct LinearizedPoly {
    field: Field,
    base: u64,
    base_exp: u32,
    coeffs: Vec<FieldElement>,
}

/// Exponent `e` with `b = p^e`, if `b` is a positive power of `p`.
fn power_of(p: u32, b: u64) -> Option<u32> {
    let (p, mut b, mut e) = (p as u64, b, 0);
    while b > 1 && b % p == 0 {
        b /= p;
        e += 1;
    }
    (b == 1 && e > 0).then_some(e)
}

/// The two fields must coincide, or one must be the immediate base of the other.
fn common_field(a: &Field, b: &Field) -> Result<Field> {
    if a == b || b.base() == Some(a) {
        Ok(b.clone())
    } else if a.base() == Some(b) {
        Ok(a.clone())
    } else {
        Err(Error::FieldMismatch)
    }
}

impl LinearizedPoly {
    /// `sum coeffs[i] T^(base^i)`; trailing zero coefficients are dropped.
    pub fn new(field: &Field, base: u64, mut coeffs: Vec<FieldElement>) -> Result<LinearizedPoly> {
        let base_exp = power_of(field.p(), base)
            .ok_or_else(|| Error::InvalidArgument(format!("base {base} is not a power of {}", field.p())))?;
        if coeffs.iter().any(|c| c.field() != field) {
            return Err(Error::FieldMismatch);
        }
        while coeffs.last().is_some_and(FieldElement::is_zero) {
            coeffs.pop();
        }
        Ok(LinearizedPoly { field: field.clone(), base, base_exp, coeffs })
    }

    pub fn zero(field: &Field, base: u64) -> Result<LinearizedPoly> {
        Self::new(field, base, Vec::new())
    }

    /// `T^(base^k)`.
    pub fn monomial(field: &Field, base: u64, k: usize) -> Result<LinearizedPoly> {
        let mut c = vec![field.zero(); k];
        c.push(field.one());
        Self::new(field, base, c)
    }

    /// `T^(base^d) + T`, e.g. `T^q + T` with `base = p`, `d = n`.
    pub fn trace_like(field: &Field, base: u64, d: usize) -> Result<LinearizedPoly> {
        let mut c = vec![field.zero(); d + 1];
        c[0] = field.one();
        c[d] = &c[d] + &field.one();
        Self::new(field, base, c)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// Coefficients `c_0, ..., c_d` (lowest symbolic degree first).
    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn symbolic_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `base^d`.
    pub fn ordinary_degree(&self) -> Option<u64> {
        self.symbolic_degree().map(|d| self.base.pow(d as u32))
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(FieldElement::is_one)
    }

    pub fn is_separable(&self) -> bool {
        self.coeffs.first().is_some_and(|c| !c.is_zero())
    }

    /// Same polynomial viewed as a `new_base`-polynomial; `new_base` must be a
    /// power of the characteristic and every exponent must be a power of it.
    pub fn rebase(&self, new_base: u64) -> Result<LinearizedPoly> {
        let new_exp = power_of(self.field.p(), new_base)
            .ok_or_else(|| Error::InvalidArgument(format!("base {new_base} is not a power of {}", self.field.p())))?;
        let mut out = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.base_exp * i as u32;
            if !e.is_multiple_of(new_exp) {
                return Err(Error::InvalidArgument(format!(
                    "exponent p^{e} is not a power of {new_base}"
                )));
            }
            let k = (e / new_exp) as usize;
            if out.len() <= k {
                out.resize(k + 1, self.field.zero());
            }
            out[k] = c.clone();
        }
        Self::new(&self.field, new_base, out)
    }

    /// Coefficients mapped into `field`, which must be this field or an
    /// extension having it as immediate base.
    pub fn embed_into(&self, field: &Field) -> Result<LinearizedPoly> {
        let coeffs = self.coeffs.iter().map(|c| field.embed(c)).collect::<Result<Vec<_>>>()?;
        Self::new(field, self.base, coeffs)
    }

    /// The same polynomial over the immediate base field, if every coefficient lies there.
    pub fn restrict_to_base(&self) -> Option<LinearizedPoly> {
        let base = self.field.base()?;
        let coeffs = self.coeffs.iter().map(|c| self.field.restrict_to_base(c)).collect::<Option<Vec<_>>>()?;
        Self::new(base, self.base, coeffs).ok()
    }

    /// Whether every coefficient lies in the immediate base field.
    pub fn coefficients_in_base(&self) -> bool {
        self.field.base().is_some() && self.coeffs.iter().all(|c| self.field.in_base(c))
    }

    /// `sum c_i x^(b^i)`; `x` may live in this field or in an extension of it.
    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement> {
        let target = common_field(&self.field, x.field())?;
        let x = target.embed(x)?;
        let mut acc = target.zero();
        let mut power = x.clone();
        for c in &self.coeffs {
            if !c.is_zero() {
                acc = &acc + &(&target.embed(c)? * &power);
            }
            power = power.frobenius(self.base_exp);
        }
        Ok(acc)
    }

    /// Symbolic product `self ⋆ rhs = self(rhs(T))`.
    pub fn compose(&self, rhs: &LinearizedPoly) -> Result<LinearizedPoly> {
        if self.base != rhs.base {
            return Err(Error::BaseMismatch(self.base, rhs.base));
        }
        let field = common_field(&self.field, &rhs.field)?;
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(&field, self.base);
        }
        let outer = self.embed_into(&field)?;
        let inner = rhs.embed_into(&field)?;
        let mut out = vec![field.zero(); outer.coeffs.len() + inner.coeffs.len() - 1];
        for (i, m) in outer.coeffs.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            for (k, q) in inner.coeffs.iter().enumerate() {
                let term = m * &q.frobenius(self.base_exp * i as u32);
                out[i + k] = &out[i + k] + &term;
            }
        }
        Self::new(&field, self.base, out)
    }

    pub fn add(&self, rhs: &LinearizedPoly) -> Result<LinearizedPoly> {
        if self.base != rhs.base {
            return Err(Error::BaseMismatch(self.base, rhs.base));
        }
        let field = common_field(&self.field, &rhs.field)?;
        let (a, b) = (self.embed_into(&field)?, rhs.embed_into(&field)?);
        let n = a.coeffs.len().max(b.coeffs.len());
        let out = (0..n).map(|i| &a.coeff(i) + &b.coeff(i)).collect();
        Self::new(&field, self.base, out)
    }

    pub fn scale(&self, c: &FieldElement) -> Result<LinearizedPoly> {
        let field = common_field(&self.field, c.field())?;
        let c = field.embed(c)?;
        let out = self.embed_into(&field)?.coeffs.iter().map(|x| x * &c).collect();
        Self::new(&field, self.base, out)
    }

    pub fn neg(&self) -> LinearizedPoly {
        let out = self.coeffs.iter().map(|c| -c).collect();
        Self::new(&self.field, self.base, out).expect("same field and base")
    }

    /// Right division in the symbolic sense: returns `(m, r)` with
    /// `self = m ⋆ divisor + r` and `r` of smaller symbolic degree than `divisor`.
    pub fn symbolic_right_divide(&self, divisor: &LinearizedPoly) -> Result<(LinearizedPoly, LinearizedPoly)> {
        if self.base != divisor.base {
            return Err(Error::BaseMismatch(self.base, divisor.base));
        }
        let e = divisor.symbolic_degree().ok_or(Error::DivisionByZero)?;
        let field = common_field(&self.field, &divisor.field)?;
        let divisor = divisor.embed_into(&field)?;
        let mut rem = self.embed_into(&field)?;
        let mut quot = vec![field.zero(); rem.coeffs.len().saturating_sub(e)];
        let lead = divisor.coeffs[e].clone();
        while let Some(d) = rem.symbolic_degree().filter(|&d| d >= e) {
            let shift = d - e;
            // c * lead^(b^shift) must cancel the leading coefficient.
            let c = (&rem.coeffs[d] / &lead.frobenius(self.base_exp * shift as u32)).clone();
            quot[shift] = &quot[shift] + &c;
            let term = Self::monomial(&field, self.base, shift)?.scale(&c)?.compose(&divisor)?;
            rem = rem.add(&term.neg())?;
        }
        Ok((Self::new(&field, self.base, quot)?, rem))
    }

    /// Dense expansion on the support `{b^i}`.
    pub fn to_ordinary(&self) -> OrdinaryPoly {
        let Some(deg) = self.ordinary_degree() else {
            return OrdinaryPoly::zero(&self.field);
        };
        let mut dense = vec![0u32; deg as usize + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            dense[self.base.pow(i as u32) as usize] = c.value();
        }
        OrdinaryPoly::from_raw(&self.field, dense)
    }

    /// Rendering with a custom variable name, highest power first.
    pub fn render_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let exp = self.base.pow(i as u32);
            let mono = if exp == 1 { var.to_string() } else { format!("{var}^{exp}") };
            terms.push(if c.is_one() { mono } else { format!("{c}*{mono}") });
        }
        terms.join(" + ")
    }

    /// `{"base": b, "coeffs": [c_0, ..., c_d]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "base": self.base,
            "coeffs": self.coeffs.iter().map(FieldElement::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(field: &Field, v: &Value) -> Result<LinearizedPoly> {
        let base = v.get("base").and_then(Value::as_u64).ok_or_else(|| Error::Parse("missing base".into()))?;
        let coeffs = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing coeffs".into()))?
            .iter()
            .map(|c| FieldElement::from_json(field, c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(field, base, coeffs)
    }

    /// Parses sums of terms such as `T^4+w^{10}T^2+w^{10} T`, `T^9+2T^3+T` or
    /// `T^8 + w^26*T^4`. Every exponent must be a power of `base`.
    pub fn parse(field: &Field, base: u64, s: &str) -> Result<LinearizedPoly> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "0" {
            return Self::zero(field, base);
        }
        let mut coeffs: Vec<FieldElement> = Vec::new();
        for term in compact.split('+') {
            let t = term
                .rfind('T')
                .ok_or_else(|| Error::Parse(format!("term {term:?} has no T")))?;
            let coef_str = term[..t].trim_end_matches('*');
            let coef = if coef_str.is_empty() { field.one() } else { FieldElement::parse(field, coef_str)? };
            let exp_str = &term[t + 1..];
            let exp: u64 = if exp_str.is_empty() {
                1
            } else {
                exp_str
                    .strip_prefix('^')
                    .map(|e| e.trim_start_matches('{').trim_end_matches('}'))
                    .and_then(|e| e.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad exponent in {term:?}")))?
            };
            let mut k = 0usize;
            let mut b = 1u64;
            while b < exp {
                b *= base;
                k += 1;
            }
            if b != exp {
                return Err(Error::Parse(format!("exponent {exp} is not a power of {base}")));
            }
            if coeffs.len() <= k {
                coeffs.resize(k + 1, field.zero());
            }
            coeffs[k] = &coeffs[k] + &coef;
        }
        Self::new(field, base, coeffs)
    }
}

impl fmt::Display for LinearizedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_in("T"))
    }
}

impl fmt::Debug for LinearizedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (base {}, over {:?})", self, self.base, self.field)
    }
}

/// Dense univariate polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct OrdinaryPoly {
    field: Field,
    coeffs: Vec<u32>,
}

impl OrdinaryPoly {
    pub fn zero(field: &Field) -> OrdinaryPoly {
        OrdinaryPoly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn new(field: &Field, coeffs: &[FieldElement]) -> Result<OrdinaryPoly> {
        if coeffs.iter().any(|c| c.field() != field) {
            return Err(Error::FieldMismatch);
        }
        Ok(Self::from_raw(field, coeffs.iter().map(FieldElement::value).collect()))
    }

    fn from_raw(field: &Field, mut coeffs: Vec<u32>) -> OrdinaryPoly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        OrdinaryPoly { field: field.clone(), coeffs }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> Vec<FieldElement> {
        self.coeffs.iter().map(|&v| self.field.element_unchecked(v)).collect()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check(&self, rhs: &OrdinaryPoly) -> Result<()> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, rhs: &OrdinaryPoly) -> Result<OrdinaryPoly> {
        self.check(rhs)?;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |v: &[u32], i: usize| v.get(i).copied().unwrap_or(0);
        let out = (0..n).map(|i| self.field.add_raw(get(&self.coeffs, i), get(&rhs.coeffs, i))).collect();
        Ok(Self::from_raw(&self.field, out))
    }

    pub fn mul(&self, rhs: &OrdinaryPoly) -> Result<OrdinaryPoly> {
        self.check(rhs)?;
        if self.is_zero() || rhs.is_zero() {
            return Ok(Self::zero(&self.field));
        }
        let f = &self.field;
        let mut out = vec![0u32; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = f.add_raw(out[i + j], f.mul_raw(a, b));
            }
        }
        Ok(Self::from_raw(f, out))
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, divisor: &OrdinaryPoly) -> Result<(OrdinaryPoly, OrdinaryPoly)> {
        self.check(divisor)?;
        let db = divisor.degree().ok_or(Error::DivisionByZero)?;
        let f = &self.field;
        let lead_inv = f.inv_raw(divisor.coeffs[db]);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u32; rem.len().saturating_sub(db)];
        while rem.len() > db {
            let top = *rem.last().unwrap();
            if top != 0 {
                let c = f.mul_raw(top, lead_inv);
                let shift = rem.len() - 1 - db;
                quot[shift] = c;
                for (k, &b) in divisor.coeffs.iter().enumerate() {
                    rem[shift + k] = f.sub_raw(rem[shift + k], f.mul_raw(c, b));
                }
            }
            rem.pop();
        }
        Ok((Self::from_raw(f, quot), Self::from_raw(f, rem)))
    }

    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement> {
        let target = common_field(&self.field, x.field())?;
        let x = target.embed(x)?;
        let mut acc = target.zero();
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * &x) + &target.embed(&self.field.element_unchecked(c))?;
        }
        Ok(acc)
    }

    /// Ordinary substitution `self(inner(T))`, by Horner's rule.
    pub fn compose(&self, inner: &OrdinaryPoly) -> Result<OrdinaryPoly> {
        self.check(inner)?;
        let mut acc = Self::zero(&self.field);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(inner)?.add(&Self::from_raw(&self.field, vec![c]))?;
        }
        Ok(acc)
    }
}

impl fmt::Display for OrdinaryPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms = Vec::new();
        for (k, &v) in self.coeffs.iter().enumerate().rev() {
            if v == 0 {
                continue;
            }
            let c = self.field.element_unchecked(v);
            let mono = match k {
                0 => String::new(),
                1 => "T".to_string(),
                _ => format!("T^{k}"),
            };
            terms.push(match (c.is_one(), mono.is_empty()) {
                (_, true) => c.to_string(),
                (true, false) => mono,
                (false, false) => format!("{c}*{mono}"),
            });
        }
        f.write_str(&terms.join(" + "))
    }
}

impl fmt::Debug for OrdinaryPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} over {:?}", self.field)
    }
}

/// True iff `q` divides `r` in `F[T]`.
pub fn ordinary_divides(q: &OrdinaryPoly, r: &OrdinaryPoly) -> Result<bool> {
    Ok(r.div_rem(q)?.1.is_zero())
}

/// Elements `x` of `field` with `x^order = x`, i.e. the subfield of that order.
pub fn subfield_elements(field: &Field, order: u64) -> Result<Vec<FieldElement>> {
    let e = power_of(field.p(), order)
        .ok_or_else(|| Error::InvalidArgument(format!("{order} is not a power of {}", field.p())))?;
    if !field.absolute_degree().is_multiple_of(e) {
        return Err(Error::InvalidArgument(format!("no subfield of order {order} in {:?}", field)));
    }
    Ok(field.elements().filter(|x| x.frobenius(e) == *x).collect())
}

/// All `F_order`-linear combinations of `gens`, sorted by packed value.
pub fn span(gens: &[FieldElement], order: u64) -> Result<Vec<FieldElement>> {
    let field = match gens.first() {
        Some(g) => g.field().clone(),
        None => return Err(Error::InvalidArgument("span of an empty family needs a field".into())),
    };
    if gens.iter().any(|g| g.field() != &field) {
        return Err(Error::FieldMismatch);
    }
    let scalars = subfield_elements(&field, order)?;
    let mut set: HashSet<u32> = HashSet::from([0]);
    for g in gens {
        let mut next = HashSet::with_capacity(set.len() * scalars.len());
        for &v in &set {
            for s in &scalars {
                next.insert(field.add_raw(v, field.mul_raw(s.value(), g.value())));
            }
        }
        set = next;
    }
    let mut values: Vec<u32> = set.into_iter().collect();
    values.sort_unstable();
    Ok(values.into_iter().map(|v| field.element_unchecked(v)).collect())
}

/// `prod_{a in H} (T - a)` for an `F_order`-subspace `H`, returned as an `order`-polynomial.
///
/// The product is expanded densely and then checked to be supported on
/// `{order^i}`.
pub fn subspace_poly(h: &[FieldElement], order: u64) -> Result<LinearizedPoly> {
    let field = h
        .first()
        .map(|x| x.field().clone())
        .ok_or_else(|| Error::NotSubspace("empty set".into()))?;
    if h.iter().any(|x| x.field() != &field) {
        return Err(Error::FieldMismatch);
    }
    let set: HashSet<u32> = h.iter().map(FieldElement::value).collect();
    if !set.contains(&0) {
        return Err(Error::NotSubspace("0 is missing".into()));
    }
    for &a in &set {
        for &b in &set {
            if !set.contains(&field.add_raw(a, b)) {
                return Err(Error::NotSubspace("not closed under addition".into()));
            }
        }
    }
    let scalars = subfield_elements(&field, order)?;
    for &a in &set {
        for s in &scalars {
            if !set.contains(&field.mul_raw(s.value(), a)) {
                return Err(Error::NotSubspace(format!("not closed under scaling by F_{order}")));
            }
        }
    }
    let mut dense = vec![1u32];
    let mut roots: Vec<u32> = set.iter().copied().collect();
    roots.sort_unstable();
    for a in roots {
        let neg_a = field.neg_raw(a);
        let mut next = vec![0u32; dense.len() + 1];
        for (k, &c) in dense.iter().enumerate() {
            next[k + 1] = field.add_raw(next[k + 1], c);
            next[k] = field.add_raw(next[k], field.mul_raw(c, neg_a));
        }
        dense = next;
    }
    let mut coeffs = Vec::new();
    let mut pos = 1u64;
    for (k, &c) in dense.iter().enumerate() {
        if k as u64 == pos {
            coeffs.push(field.element_unchecked(c));
            pos *= order;
        } else if c != 0 {
            return Err(Error::Internal(format!("subspace polynomial has a nonzero coefficient at T^{k}")));
        }
    }
    if pos != order * (dense.len() as u64 - 1) {
        return Err(Error::NotSubspace(format!("size {} is not a power of {order}", set.len())));
    }
    LinearizedPoly::new(&field, order, coeffs)
}

/// Moore determinant `det[(w_j)^(b^(i-1))]` of a nonempty family.
pub fn moore_det(elems: &[FieldElement], b: u64) -> Result<FieldElement> {
    let first = elems.first().ok_or_else(|| Error::InvalidArgument("Moore determinant of an empty family".into()))?;
    let field = first.field();
    if elems.iter().any(|x| x.field() != field) {
        return Err(Error::FieldMismatch);
    }
    let e = power_of(field.p(), b)
        .ok_or_else(|| Error::InvalidArgument(format!("{b} is not a power of {}", field.p())))?;
    let mut rows = Vec::with_capacity(elems.len());
    let mut row: Vec<FieldElement> = elems.to_vec();
    for _ in 0..elems.len() {
        let next = row.iter().map(|x| x.frobenius(e)).collect();
        rows.push(std::mem::replace(&mut row, next));
    }
    Ok(linalg::determinant(rows))
}

/// Splits a monic separable `A` with root basis `basis` as `A = M ⋆ A_i`, where
/// `A_i` is the subspace polynomial of `span(basis[..i])`.
///
/// `M` is found by solving the Moore system obtained by requiring
/// `M(A_i(w_j)) = 0` for the remaining basis elements. Returns `(A_i, M)`,
/// both over the field of `basis` (which may extend the field of `A`).
pub fn symbolic_cofactor(
    a: &LinearizedPoly,
    basis: &[FieldElement],
    i: usize,
) -> Result<(LinearizedPoly, LinearizedPoly)> {
    let d = a
        .symbolic_degree()
        .ok_or_else(|| Error::InvalidArgument("cannot split the zero polynomial".into()))?;
    if !a.is_monic() || !a.is_separable() {
        return Err(Error::InvalidArgument("polynomial must be monic and separable".into()));
    }
    if basis.len() != d {
        return Err(Error::InvalidArgument(format!("expected {d} basis elements, got {}", basis.len())));
    }
    if i == 0 || i >= d {
        return Err(Error::InvalidArgument(format!("split index must satisfy 1 <= i < {d}, got {i}")));
    }
    let b = a.base();
    if moore_det(basis, b)?.is_zero() {
        return Err(Error::DependentBasis);
    }
    for w in basis {
        if !a.eval(w)?.is_zero() {
            return Err(Error::InvalidArgument(format!("{w} is not a root")));
        }
    }
    let field = basis[0].field().clone();
    let a_big = a.embed_into(&field)?;
    let a_i = subspace_poly(&span(&basis[..i], b)?, b)?;

    let k = d - i;
    let e = power_of(field.p(), b).expect("validated base");
    let sigmas = basis[i..].iter().map(|w| a_i.eval(w)).collect::<Result<Vec<_>>>()?;
    // sigma^(b^t) for t = 0..=k
    let powers: Vec<Vec<FieldElement>> = sigmas
        .iter()
        .map(|s| {
            let mut row = Vec::with_capacity(k + 1);
            let mut cur = s.clone();
            for _ in 0..=k {
                let next = cur.frobenius(e);
                row.push(std::mem::replace(&mut cur, next));
            }
            row
        })
        .collect();
    let matrix = powers.iter().map(|row| row[..k].to_vec()).collect();
    let rhs = powers.iter().map(|row| -&row[k]).collect();
    let mut m_coeffs = linalg::solve(matrix, rhs).ok_or(Error::DependentBasis)?;
    m_coeffs.push(field.one());
    let m = LinearizedPoly::new(&field, b, m_coeffs)?;

    if m.compose(&a_i)? != a_big {
        return Err(Error::Internal("M ⋆ A_i does not reproduce A".into()));
    }
    if !m.is_monic() || !m.is_separable() || m.symbolic_degree() != Some(k) {
        return Err(Error::Internal("cofactor is not monic separable of the expected degree".into()));
    }
    if &m.coeff(0) * &a_i.coeff(0) != a_big.coeff(0) {
        return Err(Error::Internal("product of constant terms differs from the T-coefficient".into()));
    }
    Ok((a_i, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Modulus;

    fn f(p: u64, m: usize) -> Field {
        Field::new(p, m, Modulus::Default).unwrap()
    }

    fn lp(field: &Field, base: u64, s: &str) -> LinearizedPoly {
        LinearizedPoly::parse(field, base, s).unwrap()
    }

    #[test]
    fn trace_polynomial_vanishes_on_fq() {
        for m in 1..=5 {
            let k = f(2, m);
            let l = LinearizedPoly::trace_like(&k, 2, m).unwrap();
            assert!(k.elements().all(|x| l.eval(&x).unwrap().is_zero()));
        }
    }

    #[test]
    fn identity_evaluation() {
        let k = f(3, 2);
        let t = LinearizedPoly::monomial(&k, 3, 0).unwrap();
        assert!(k.elements().all(|x| t.eval(&x).unwrap() == x));
    }

    #[test]
    fn f9_root_of_quadratic_factor() {
        let f9 = f(3, 2);
        let f81 = Field::extend_quadratic(&f9).unwrap();
        let w = f9.indeterminate();
        let l = LinearizedPoly::trace_like(&f9, 3, 2).unwrap();
        let mut found = 0;
        for a in f81.elements() {
            let (tr, nm) = crate::ff::trace_norm(&a, &f9).unwrap();
            if tr.is_zero() && nm == w {
                found += 1;
                assert!(l.eval(&a).unwrap().is_zero());
                // a is a root of T^2 + w
                assert!((&(&a * &a) + &f81.embed(&w).unwrap()).is_zero());
            }
        }
        assert_eq!(found, 2);
    }

    #[test]
    fn compose_examples() {
        for n in 2..=5 {
            let k = f(2, n);
            let m = LinearizedPoly::new(&k, 2, vec![k.one(); n]).unwrap();
            let q = lp(&k, 2, "T^2+T");
            let target = LinearizedPoly::trace_like(&k, 2, n).unwrap();
            assert_eq!(m.compose(&q).unwrap(), target);
            assert_eq!(q.compose(&m).unwrap(), target);
        }
        let k = f(2, 4);
        let t = LinearizedPoly::monomial(&k, 2, 0).unwrap();
        let l = lp(&k, 2, "T^4+w^3*T^2+w^7*T");
        assert_eq!(t.compose(&l).unwrap(), l);

        let m2 = lp(&k, 2, "T^4+w^{10}T^2+w^{10} T");
        let w = k.indeterminate();
        let p2 = subspace_poly(&span(&[k.one(), w], 2).unwrap(), 2).unwrap();
        assert_eq!(m2.compose(&p2).unwrap(), LinearizedPoly::trace_like(&k, 2, 4).unwrap());
    }

    #[test]
    fn compose_base_mismatch() {
        let k = f(2, 4);
        let a = LinearizedPoly::monomial(&k, 2, 1).unwrap();
        let b = LinearizedPoly::monomial(&k, 4, 1).unwrap();
        assert_eq!(a.compose(&b).unwrap_err(), Error::BaseMismatch(2, 4));
    }

    #[test]
    fn ordinary_expansion_and_division() {
        let f2 = f(2, 1);
        let q = lp(&f2, 2, "T^2+T");
        let oq = q.to_ordinary();
        assert_eq!(oq.coeffs(), vec![f2.zero(), f2.one(), f2.one()]);
        let r = lp(&f2, 2, "T^4+T").to_ordinary();
        assert!(ordinary_divides(&oq, &r).unwrap());

        let f4 = f(2, 2);
        // T(T+w) divides T^4+T since w is in F_4, but w is not a root of T^8+T.
        let q = lp(&f4, 2, "T^2+w*T").to_ordinary();
        let r = lp(&f4, 2, "T^4+T").to_ordinary();
        assert!(ordinary_divides(&q, &r).unwrap());
        let r = lp(&f4, 2, "T^8+T").to_ordinary();
        assert!(!ordinary_divides(&q, &r).unwrap());
        assert_eq!(ordinary_divides(&OrdinaryPoly::zero(&f4), &r).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn subspace_poly_examples() {
        let k = f(2, 4);
        assert_eq!(subspace_poly(&[k.zero()], 2).unwrap(), lp(&k, 2, "T"));
        assert_eq!(subspace_poly(&[k.zero(), k.one()], 2).unwrap(), lp(&k, 2, "T^2+T"));
        let w = k.indeterminate();
        let h = span(&[k.one(), w], 2).unwrap();
        assert_eq!(subspace_poly(&h, 2).unwrap(), lp(&k, 2, "T^4+w^10*T^2+w^5*T"));
        // closure failure
        let bad = [k.zero(), k.one(), k.indeterminate()];
        assert!(matches!(subspace_poly(&bad, 2), Err(Error::NotSubspace(_))));
        // F_2-subspace that is not an F_4-subspace
        assert!(matches!(subspace_poly(&[k.zero(), k.one()], 4), Err(Error::NotSubspace(_))));
    }

    #[test]
    fn subspace_poly_vanishes_exactly_on_h() {
        let k = f(3, 3);
        let h = span(&[k.gen_pow(2), k.gen_pow(7)], 3).unwrap();
        let l = subspace_poly(&h, 3).unwrap();
        for x in k.elements() {
            assert_eq!(l.eval(&x).unwrap().is_zero(), h.contains(&x));
        }
    }

    #[test]
    fn moore_examples() {
        let k = f(2, 2);
        let x = k.gen_pow(2);
        assert_eq!(moore_det(std::slice::from_ref(&x), 2).unwrap(), x);
        assert!(moore_det(&[k.one(), k.one()], 2).unwrap().is_zero());
        assert!(moore_det(&[k.one(), k.indeterminate()], 2).unwrap().is_one());
    }

    #[test]
    fn cofactor_examples() {
        let k = f(2, 4);
        let w = k.indeterminate();
        let basis: Vec<_> = (0..4).map(|e| w.pow(e).unwrap()).collect();
        let a = LinearizedPoly::trace_like(&k, 2, 4).unwrap();
        let (_, m2) = symbolic_cofactor(&a, &basis, 2).unwrap();
        assert_eq!(m2, lp(&k, 2, "T^4+w^{10}T^2+w^{10}T"));

        let f4 = f(2, 2);
        let a = LinearizedPoly::trace_like(&f4, 2, 2).unwrap();
        let (a1, m1) = symbolic_cofactor(&a, &[f4.one(), f4.indeterminate()], 1).unwrap();
        assert_eq!(a1, lp(&f4, 2, "T^2+T"));
        assert_eq!(m1, lp(&f4, 2, "T^2+T"));

        let k = f(2, 5);
        let w = k.indeterminate();
        let basis: Vec<_> = (0..5).map(|e| w.pow(e).unwrap()).collect();
        let a = LinearizedPoly::trace_like(&k, 2, 5).unwrap();
        let (_, m2) = symbolic_cofactor(&a, &basis, 2).unwrap();
        assert_eq!(m2.to_string(), "T^8 + w^26*T^4 + w^16*T^2 + w^12*T");
    }

    #[test]
    fn cofactor_errors() {
        let k = f(2, 2);
        let a = LinearizedPoly::trace_like(&k, 2, 2).unwrap();
        assert_eq!(symbolic_cofactor(&a, &[k.one(), k.one()], 1).unwrap_err(), Error::DependentBasis);
        assert!(matches!(
            symbolic_cofactor(&a, &[k.one(), k.indeterminate()], 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            symbolic_cofactor(&a, &[k.one(), k.indeterminate()], 2),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn symbolic_division_recovers_factor() {
        let k = f(2, 4);
        let a = LinearizedPoly::trace_like(&k, 2, 4).unwrap();
        let q = lp(&k, 2, "T^4+w^10*T^2+w^5*T");
        let (m, r) = a.symbolic_right_divide(&q).unwrap();
        assert!(r.is_zero());
        assert_eq!(m.compose(&q).unwrap(), a);
    }

    #[test]
    fn rebase_and_json() {
        let k = f(2, 4);
        let l = lp(&k, 4, "T^16+w^3*T^4+T");
        let as_p = l.rebase(2).unwrap();
        assert_eq!(as_p.to_string(), "T^16 + w^3*T^4 + T");
        assert_eq!(as_p.symbolic_degree(), Some(4));
        assert_eq!(as_p.rebase(4).unwrap(), l);
        assert!(lp(&k, 2, "T^2+T").rebase(4).is_err());
        assert_eq!(LinearizedPoly::from_json(&k, &l.to_json()).unwrap(), l);
    }

    #[test]
    fn parse_example_notation() {
        let f27 = f(3, 3);
        let l = lp(&f27, 3, "T^9+2T^3+T");
        assert_eq!(l.coeff(1), -f27.one());
        assert!(LinearizedPoly::parse(&f27, 3, "T^4").is_err());
    }
}
