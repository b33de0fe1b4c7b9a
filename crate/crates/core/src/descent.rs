//! Descent of `T^q + T` from `F_{q^2}` to `F_q`.
//!
//! The roots of `T^q + T` form an `n`-dimensional `F_p`-space `𝒫` inside
//! `F_{q^2}`. A basis `(w_1, ..., w_n)` gives the flag `H_1 ⊂ ... ⊂ H_n = 𝒫`,
//! and each level splits `T^q + T = M_i ⋆ P_i` with `P_i` the subspace
//! polynomial of `H_i`. Both factors have coefficients in `F_q` even though
//! their roots live in `F_{q^2}`; that is what makes the intermediate
//! Artin-Schreier steps definable over the smaller field.
//!
//! `F_{q^2}` is always a degree-2 tower over `F_q`, so "lies in `F_q`" is a
//! check on the second coordinate.

use std::collections::HashSet;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ff::{trace_norm, Field, FieldElement, Modulus};
use crate::linpoly::{moore_det, span, symbolic_cofactor, LinearizedPoly, OrdinaryPoly};

/// Builds `F_q = F_{p^n}` (with the given modulus) and its quadratic tower `F_{q^2}`.
pub fn quadratic_tower(p: u64, n: usize, modulus: Modulus) -> Result<Field> {
    let base = Field::new(p, n, modulus)?;
    Field::extend_quadratic(&base)
}

fn base_of(ambient: &Field) -> Result<&Field> {
    match ambient.base() {
        Some(b) if ambient.degree() == 2 => Ok(b),
        _ => Err(Error::NotQuadraticTower),
    }
}

/// `q`, the order of the base of the quadratic tower.
fn order_q(ambient: &Field) -> Result<u64> {
    Ok(base_of(ambient)?.size() as u64)
}

/// All `α` in `F_{q^2}` with `α^q + α = 0`, sorted by packed value.
pub fn trace_zero_kernel(ambient: &Field) -> Result<Vec<FieldElement>> {
    let n = base_of(ambient)?.absolute_degree();
    Ok(ambient.elements().filter(|a| (&a.frobenius(n) + a).is_zero()).collect())
}

/// True iff `a^q ∈ H` for all `a ∈ H`.
pub fn verify_galois_stability(h: &[FieldElement], q: u64) -> bool {
    let set: HashSet<&FieldElement> = h.iter().collect();
    h.iter().all(|a| a.pow(q as i64).map(|aq| set.contains(&aq)).unwrap_or(false))
}

/// An `F_p`-basis of `𝒫 = ker(T^q + T)` with its spans `H_1 ⊂ ... ⊂ H_n`.
#[derive(Clone, Debug)]
pub struct SubspaceChain {
    ambient: Field,
    basis: Vec<FieldElement>,
    spans: Vec<Vec<FieldElement>>,
}

impl SubspaceChain {
    /// Validates a basis: each element is a root of `T^q + T`, the family is
    /// `F_p`-independent, and every span is Galois-stable.
    pub fn new(ambient: &Field, basis: Vec<FieldElement>) -> Result<SubspaceChain> {
        let base = base_of(ambient)?;
        let n = base.absolute_degree() as usize;
        let p = ambient.p() as u64;
        let q = base.size() as u64;
        if basis.len() != n {
            return Err(Error::InvalidArgument(format!("a basis of the kernel has {n} elements, got {}", basis.len())));
        }
        for w in &basis {
            if w.field() != ambient {
                return Err(Error::FieldMismatch);
            }
            if !(&w.frobenius(n as u32) + w).is_zero() {
                return Err(Error::InvalidArgument(format!("{w} is not a root of T^q + T")));
            }
        }
        if moore_det(&basis, p)?.is_zero() {
            return Err(Error::DependentBasis);
        }
        let spans = (1..=n).map(|i| span(&basis[..i], p)).collect::<Result<Vec<_>>>()?;
        for (i, h) in spans.iter().enumerate() {
            if h.len() as u64 != p.pow(i as u32 + 1) {
                return Err(Error::Internal(format!("H_{} has {} elements", i + 1, h.len())));
            }
            if !verify_galois_stability(h, q) {
                return Err(Error::Internal(format!("H_{} is not Galois-stable", i + 1)));
            }
        }
        Ok(SubspaceChain { ambient: ambient.clone(), basis, spans })
    }

    pub fn ambient(&self) -> &Field {
        &self.ambient
    }

    /// `F_q`.
    pub fn base_field(&self) -> &Field {
        self.ambient.base().expect("validated quadratic tower")
    }

    pub fn p(&self) -> u32 {
        self.ambient.p()
    }

    pub fn n(&self) -> usize {
        self.basis.len()
    }

    pub fn q(&self) -> u64 {
        self.base_field().size() as u64
    }

    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    /// `H_i` for `1 <= i <= n`.
    pub fn span(&self, i: usize) -> &[FieldElement] {
        &self.spans[i - 1]
    }
}

/// Deterministic basis: `(1, w, ..., w^(n-1))` for `p = 2`, and
/// `α_0 (1, w, ..., w^(n-1))` with `α_0 = W^((q+1)/2)` for odd `p`, where `w`
/// and `W` are the stored generators of `F_q` and `F_{q^2}`.
pub fn canonical_chain(ambient: &Field) -> Result<SubspaceChain> {
    let base = base_of(ambient)?;
    let n = base.absolute_degree() as i64;
    let q = base.size() as i64;
    let w = ambient.embed(&base.generator())?;
    let alpha0 = if ambient.p() == 2 { ambient.one() } else { ambient.generator().pow((q + 1) / 2)? };
    let basis = (0..n).map(|k| Ok(&alpha0 * &w.pow(k)?)).collect::<Result<Vec<_>>>()?;
    SubspaceChain::new(ambient, basis)
}

/// Kernel element of norm `a` with the smaller discrete log (the other root is its negative).
fn root_with_norm(kernel: &[FieldElement], base: &Field, a: &FieldElement) -> Result<FieldElement> {
    kernel
        .iter()
        .filter(|x| !x.is_zero())
        .filter(|x| trace_norm(x, base).map(|(_, n)| &n == a).unwrap_or(false))
        .min_by_key(|x| x.discrete_log())
        .cloned()
        .ok_or_else(|| Error::InvalidArgument(format!("{a} is not the norm of a root of T^q + T")))
}

/// Odd-`p` chain whose first basis elements are roots of `T^2 + a_j` for the
/// listed `a_j` in `F_q`; the remaining slots are filled from the canonical basis.
pub fn chain_from_norms(ambient: &Field, norms: &[FieldElement]) -> Result<SubspaceChain> {
    let base = base_of(ambient)?;
    if ambient.p() == 2 {
        return Err(Error::InvalidArgument("norm overrides apply to odd characteristic only".into()));
    }
    let n = base.absolute_degree() as usize;
    if norms.len() > n {
        return Err(Error::InvalidArgument(format!("at most {n} norms may be given")));
    }
    let kernel = trace_zero_kernel(ambient)?;
    let p = ambient.p() as u64;
    let independent = |fam: &[FieldElement]| moore_det(fam, p).map(|d| !d.is_zero());
    let mut basis: Vec<FieldElement> = Vec::with_capacity(n);
    for a in norms {
        if a.field() != base {
            return Err(Error::FieldMismatch);
        }
        let w = root_with_norm(&kernel, base, a)?;
        basis.push(w);
        if !independent(&basis)? {
            return Err(Error::DependentBasis);
        }
    }
    for candidate in canonical_chain(ambient)?.basis {
        if basis.len() == n {
            break;
        }
        basis.push(candidate);
        if !independent(&basis)? {
            basis.pop();
        }
    }
    SubspaceChain::new(ambient, basis)
}

/// One level of the descent: `T^q + T = M_i ⋆ P_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentRow {
    pub i: usize,
    /// Subspace polynomial of `H_i`, over `F_q`.
    pub p: LinearizedPoly,
    /// Cofactor, over `F_q`.
    pub m: LinearizedPoly,
}

#[derive(Clone, Debug)]
pub struct DescentTable {
    chain: SubspaceChain,
    rows: Vec<DescentRow>,
    /// `(j, W_j)` for `j = 2..=n`.
    recursion: Vec<(usize, FieldElement)>,
}

impl DescentTable {
    pub fn chain(&self) -> &SubspaceChain {
        &self.chain
    }

    pub fn q(&self) -> u64 {
        self.chain.q()
    }

    pub fn n(&self) -> usize {
        self.chain.n()
    }

    pub fn rows(&self) -> &[DescentRow] {
        &self.rows
    }

    pub fn recursion(&self) -> &[(usize, FieldElement)] {
        &self.recursion
    }

    /// `P_i` for `1 <= i <= n`, with `P_n = T^q + T`.
    pub fn p_poly(&self, i: usize) -> LinearizedPoly {
        if i == self.n() {
            full_poly(self.chain.base_field(), self.n())
        } else {
            self.rows[i - 1].p.clone()
        }
    }

    /// `M_i` for `1 <= i < n`; `M_0 = T^q + T` and `M_n = T`.
    pub fn m_poly(&self, i: usize) -> LinearizedPoly {
        let base = self.chain.base_field();
        let p = self.chain.p() as u64;
        match i {
            0 => full_poly(base, self.n()),
            i if i == self.n() => LinearizedPoly::monomial(base, p, 0).expect("valid base"),
            i => self.rows[i - 1].m.clone(),
        }
    }

    /// `W_j` for `2 <= j <= n`.
    pub fn w(&self, j: usize) -> &FieldElement {
        &self.recursion[j - 2].1
    }

    /// Constant `W_1` of `P_1 = T^p - W_1 T`, i.e. `w_1^(p-1)`.
    pub fn first_step_constant(&self) -> FieldElement {
        -self.p_poly(1).coeff(0)
    }

    pub fn to_json(&self) -> Value {
        let base = self.chain.base_field();
        json!({
            "q": self.q(),
            "modulus": base.modulus_values(),
            "basis": self.chain.basis().iter().map(FieldElement::to_json).collect::<Vec<_>>(),
            "rows": self.rows.iter().map(|r| json!({
                "i": r.i,
                "P": r.p.to_json(),
                "M": r.m.to_json(),
            })).collect::<Vec<_>>(),
            "recursion": self.recursion.iter().map(|(j, w)| json!({ "j": j, "W": w.to_json() })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for DescentTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = self.chain.base_field();
        writeln!(f, "q = {}: {}", self.q(), base)?;
        writeln!(f, "ambient: {}", self.chain.ambient())?;
        let basis: Vec<String> = self.chain.basis().iter().map(|w| match self.chain.ambient().restrict_to_base(w) {
            Some(x) => x.to_string(),
            None => w.to_string(),
        }).collect();
        writeln!(f, "basis: ({})", basis.join(", "))?;
        if self.rows.is_empty() {
            writeln!(f, "no intermediate steps (n = 1)")?;
        }
        for (row, label) in self.rows.iter().zip('a'..) {
            writeln!(f, "({label}) P_{i} = {}, M_{i} = {}", row.p, row.m, i = row.i)?;
        }
        for (j, w) in &self.recursion {
            writeln!(f, "W_{j} = {w}")?;
        }
        Ok(())
    }
}

fn full_poly(base: &Field, n: usize) -> LinearizedPoly {
    LinearizedPoly::trace_like(base, base.p() as u64, n).expect("valid base")
}

fn down(poly: &LinearizedPoly, what: &str) -> Result<LinearizedPoly> {
    poly.restrict_to_base()
        .ok_or_else(|| Error::Internal(format!("{what} = {poly} has coefficients outside F_q")))
}

/// Computes `(P_i, M_i)` for every level and the recursion constants
/// `W_j = P_{j-1}(w_j)^(p-1)`, checking every stated identity on the way.
pub fn descent_table(chain: &SubspaceChain) -> Result<DescentTable> {
    let ambient = chain.ambient();
    let n = chain.n();
    let p = chain.p() as u64;
    let a = LinearizedPoly::trace_like(ambient, p, n)?;
    let mut rows = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let (p_i, m_i) = symbolic_cofactor(&a, chain.basis(), i)?;
        if p_i.ordinary_degree() != Some(p.pow(i as u32)) || m_i.ordinary_degree() != Some(p.pow((n - i) as u32)) {
            return Err(Error::Internal(format!("unexpected degrees at level {i}")));
        }
        rows.push(DescentRow { i, p: down(&p_i, &format!("P_{i}"))?, m: down(&m_i, &format!("M_{i}"))? });
    }

    let mut p_polys: Vec<LinearizedPoly> = rows.iter().map(|r| r.p.embed_into(ambient)).collect::<Result<_>>()?;
    p_polys.push(a.clone());
    let frob = LinearizedPoly::monomial(ambient, p, 1)?;
    let mut recursion = Vec::with_capacity(n.saturating_sub(1));
    for j in 2..=n {
        let prev = &p_polys[j - 2];
        let w_j = prev.eval(&chain.basis()[j - 1])?.pow(p as i64 - 1)?;
        if w_j.is_zero() {
            return Err(Error::Internal(format!("W_{j} vanishes")));
        }
        let stepped = frob.compose(prev)?.add(&prev.scale(&w_j)?.neg())?;
        if stepped != p_polys[j - 1] {
            return Err(Error::Internal(format!("P_{j} != P_{}^p - W_{j} P_{}", j - 1, j - 1)));
        }
        let w_j = ambient
            .restrict_to_base(&w_j)
            .ok_or_else(|| Error::Internal(format!("W_{j} is not in F_q")))?;
        recursion.push((j, w_j));
    }
    Ok(DescentTable { chain: chain.clone(), rows, recursion })
}

/// `T^q + T = T · prod (T^2 + a)` over `F_q` for odd `p`, `a` ranging over the
/// norms of the nonzero kernel elements. Factors are returned with `T` first,
/// then by increasing discrete log of `a`.
pub fn odd_p_factorization(ambient: &Field) -> Result<Vec<OrdinaryPoly>> {
    let constants = quadratic_constants(ambient)?;
    let base = base_of(ambient)?;
    let mut factors = vec![OrdinaryPoly::new(base, &[base.zero(), base.one()])?];
    for a in &constants {
        factors.push(OrdinaryPoly::new(base, &[a.clone(), base.zero(), base.one()])?);
    }
    let product = factors.iter().try_fold(OrdinaryPoly::new(base, &[base.one()])?, |acc, f| acc.mul(f))?;
    let target = full_poly(base, base.absolute_degree() as usize).to_ordinary();
    if product != target {
        return Err(Error::Internal("factor product differs from T^q + T".into()));
    }
    Ok(factors)
}

/// The `(q-1)/2` constants `a` of the quadratic factors `T^2 + a`, by increasing discrete log.
pub fn quadratic_constants(ambient: &Field) -> Result<Vec<FieldElement>> {
    let base = base_of(ambient)?;
    if ambient.p() == 2 {
        return Err(Error::InvalidArgument("the quadratic factorization needs odd characteristic".into()));
    }
    let mut norms: Vec<FieldElement> = Vec::new();
    for a in trace_zero_kernel(ambient)?.iter().filter(|a| !a.is_zero()) {
        let (_, n) = trace_norm(a, base)?;
        if !norms.contains(&n) {
            norms.push(n);
        }
    }
    norms.sort_by_key(|a| a.discrete_log());
    let q = order_q(ambient)?;
    if norms.len() as u64 != (q - 1) / 2 {
        return Err(Error::Internal(format!("expected {} distinct norms, found {}", (q - 1) / 2, norms.len())));
    }
    Ok(norms)
}
