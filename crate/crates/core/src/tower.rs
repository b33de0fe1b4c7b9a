//! Equations of the Garcia-Stichtenoth tower over `F_q` and of its
//! completion by the intermediate degree-`p` steps, plus brute-force
//! statistics for the first-stage curves `M_{n-i}(t) = x^(q+1)`.
//!
//! Equations are symbolic records. No function-field arithmetic is done here.

use std::fmt;

use serde_json::{json, Value};

use crate::descent::DescentTable;
use crate::error::{Error, Result};
use crate::ff::Field;
use crate::linpoly::LinearizedPoly;

/// Deepest tower level that may be generated.
pub const MAX_DEPTH: usize = 16;

fn x_var(i: usize) -> String {
    format!("x_{i}")
}

fn z_var(i: usize) -> String {
    format!("z_{i}")
}

fn t_var(i: usize, s: usize) -> String {
    format!("t_{{{i},{s}}}")
}

/// One defining relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `F_q(x_1)`.
    RationalBase { var: String },
    /// `A(var) = rhs^exp` with `A = T^q + T`.
    ArtinSchreier { var: String, poly: LinearizedPoly, rhs: String, exp: u64 },
    /// `M_{n-s}(var) = rhs^exp`, where `var = P_{n-s}(z_{i+1})`.
    Intermediate {
        var: String,
        index: usize,
        poly: LinearizedPoly,
        rhs: String,
        exp: u64,
        generator: LinearizedPoly,
        generator_var: String,
    },
    /// `var = num / den`.
    Link { var: String, num: String, den: String },
    /// One degree-`p` step `L(var) = prev`, with `prev` an expression.
    Step { var: String, poly: LinearizedPoly, prev: String },
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::RationalBase { var } => write!(f, "rational function field in {var}"),
            Relation::ArtinSchreier { var, poly, rhs, exp } => {
                write!(f, "{} = {rhs}^{exp}", poly.render_in(var))
            }
            Relation::Intermediate { var, poly, rhs, exp, .. } => {
                write!(f, "{} = {rhs}^{exp}", poly.render_in(var))
            }
            Relation::Link { var, num, den } => write!(f, "{var} = {num}/{den}"),
            Relation::Step { var, poly, prev } => write!(f, "{} = {prev}", poly.render_in(var)),
        }
    }
}

/// A new generator and the relation adjoining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerEquation {
    /// `(i, s)`: the equation defines `G_{i,s}`.
    pub level: (usize, usize),
    pub new_var: String,
    pub relation: Relation,
    /// Degree-`p` link to the previous step, for the completed tower.
    pub step: Option<Relation>,
    pub degree_over_prev: u64,
    /// `[G_{i,s} : G_{i,0}]` for intermediate steps.
    pub degree_over_level: Option<u64>,
}

impl TowerEquation {
    pub fn to_json(&self) -> Value {
        json!({
            "level": [self.level.0, self.level.1],
            "new_var": self.new_var,
            "relation": self.relation.to_string(),
            "step": self.step.as_ref().map(ToString::to_string),
            "degree_over_prev": self.degree_over_prev,
        })
    }
}

impl fmt::Display for TowerEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, s) = self.level;
        write!(f, "G_{{{i},{s}}} [{}] {}: {}", self.degree_over_prev, self.new_var, self.relation)?;
        if let Some(step) = &self.step {
            write!(f, "   (step: {step})")?;
        }
        Ok(())
    }
}

fn check_depth(depth: usize) -> Result<()> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::InvalidArgument(format!("depth must be in 1..={MAX_DEPTH}, got {depth}")));
    }
    Ok(())
}

fn base_entry() -> TowerEquation {
    TowerEquation {
        level: (1, 0),
        new_var: x_var(1),
        relation: Relation::RationalBase { var: x_var(1) },
        step: None,
        degree_over_prev: 1,
        degree_over_level: None,
    }
}

fn link_entry(i: usize) -> TowerEquation {
    TowerEquation {
        level: (i, 0),
        new_var: x_var(i),
        relation: Relation::Link { var: x_var(i), num: z_var(i), den: x_var(i - 1) },
        step: None,
        degree_over_prev: 1,
        degree_over_level: None,
    }
}

fn as_relation(base: &Field, i: usize) -> Result<Relation> {
    let q = base.size() as u64;
    Ok(Relation::ArtinSchreier {
        var: z_var(i + 1),
        poly: LinearizedPoly::trace_like(base, base.p() as u64, base.absolute_degree() as usize)?,
        rhs: x_var(i),
        exp: q + 1,
    })
}

/// `z_{i+1}^q + z_{i+1} = x_i^(q+1)` and `x_i = z_i / x_{i-1}` up to `F_depth`.
pub fn gs_tower(base: &Field, depth: usize) -> Result<Vec<TowerEquation>> {
    check_depth(depth)?;
    let q = base.size() as u64;
    let mut out = vec![base_entry()];
    for i in 1..depth {
        if i >= 2 {
            out.push(link_entry(i));
        }
        out.push(TowerEquation {
            level: (i + 1, 0),
            new_var: z_var(i + 1),
            relation: as_relation(base, i)?,
            step: None,
            degree_over_prev: q,
            degree_over_level: None,
        });
    }
    Ok(out)
}

/// The reduced completed tower: between `G_{i,0}` and `G_{i+1,0}` the steps
/// `t_{i,s} = P_{n-s}(z_{i+1})` with `M_{n-s}(t_{i,s}) = x_i^(q+1)`, each of
/// degree `p` over the previous one.
pub fn completed_tower(table: &DescentTable, depth: usize) -> Result<Vec<TowerEquation>> {
    check_depth(depth)?;
    let base = table.chain().base_field().clone();
    let p = base.p() as u64;
    let q = table.q();
    let n = table.n();
    let mut out = vec![base_entry()];
    for i in 1..depth {
        if i >= 2 {
            out.push(link_entry(i));
        }
        let x_pow = format!("{}^{}", x_var(i), q + 1);
        for s in 1..n {
            let var = t_var(i, s);
            let step_poly = if s == 1 {
                table.m_poly(n - 1)
            } else {
                // T^p - W_{n-s+1} T
                let w = table.w(n - s + 1);
                LinearizedPoly::new(&base, p, vec![-w, base.one()])?
            };
            let prev = if s == 1 { x_pow.clone() } else { t_var(i, s - 1) };
            out.push(TowerEquation {
                level: (i, s),
                new_var: var.clone(),
                relation: Relation::Intermediate {
                    var: var.clone(),
                    index: n - s,
                    poly: table.m_poly(n - s),
                    rhs: x_var(i),
                    exp: q + 1,
                    generator: table.p_poly(n - s),
                    generator_var: z_var(i + 1),
                },
                step: Some(Relation::Step { var, poly: step_poly, prev }),
                degree_over_prev: p,
                degree_over_level: Some(p.pow(s as u32)),
            });
        }
        let step = (n > 1).then(|| Relation::Step {
            var: z_var(i + 1),
            poly: table.p_poly(1),
            prev: t_var(i, n - 1),
        });
        out.push(TowerEquation {
            level: (i + 1, 0),
            new_var: z_var(i + 1),
            relation: as_relation(&base, i)?,
            step,
            degree_over_prev: if n > 1 { p } else { q },
            degree_over_level: None,
        });
    }
    Ok(out)
}

/// `q (p^i - 1) / 2`, the genus of `G_{1,i}` for `1 <= i <= n`.
pub fn first_stage_genus(q: u64, i: usize) -> Result<u64> {
    let (p, n) = crate::ff::prime_power(q)
        .ok_or_else(|| Error::InvalidArgument(format!("{q} is not a prime power")))?;
    if i == 0 || i > n as usize {
        return Err(Error::InvalidArgument(format!("stage index must be in 1..={n}, got {i}")));
    }
    Ok(q * (p.pow(i as u32) - 1) / 2)
}

/// Field over which points are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountField {
    Fq,
    Fq2,
}

/// The additive polynomial of the first-stage curve `G_{1,i}`: `M_{n-i}`, or
/// `T^q + T` for `i = n` (the Hermitian curve itself).
pub fn first_stage_poly(table: &DescentTable, i: usize) -> Result<LinearizedPoly> {
    let n = table.n();
    if i == 0 || i > n {
        return Err(Error::InvalidArgument(format!("stage index must be in 1..={n}, got {i}")));
    }
    Ok(table.m_poly(n - i))
}

/// Rational places of `M_{n-i}(t) = x^(q+1)` over `F_q` or `F_{q^2}`.
///
/// Every affine solution `(x, t)` is a rational place (the model is smooth
/// since `M_{n-i}` is separable), plus the single place at infinity, which is
/// fully ramified. The `x`-range is split across `workers` threads; the total
/// does not depend on the split.
pub fn count_places_first_stage(table: &DescentTable, i: usize, over: CountField, workers: usize) -> Result<u64> {
    let poly = first_stage_poly(table, i)?;
    let field = match over {
        CountField::Fq => table.chain().base_field().clone(),
        CountField::Fq2 => table.chain().ambient().clone(),
    };
    let poly = poly.embed_into(&field)?;
    let q = table.q() as i64;
    // fibre sizes of t -> M(t)
    let mut fibre = vec![0u64; field.size() as usize];
    for t in field.elements() {
        fibre[poly.eval(&t)?.value() as usize] += 1;
    }
    let size = field.size();
    let workers = workers.clamp(1, size as usize) as u32;
    let chunk = size.div_ceil(workers);
    let affine: u64 = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|k| {
                let (field, fibre) = (&field, &fibre);
                scope.spawn(move || {
                    let lo = k * chunk;
                    let hi = ((k + 1) * chunk).min(size);
                    (lo..hi)
                        .map(|v| {
                            let x = field.element_unchecked(v);
                            let rhs = x.pow(q + 1).expect("nonnegative exponent");
                            fibre[rhs.value() as usize]
                        })
                        .sum::<u64>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("counting thread panicked")).sum()
    });
    Ok(affine + 1)
}

/// Genus, place counts and maximality of `G_{1,i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveStats {
    pub q: u64,
    pub i: usize,
    pub genus: u64,
    pub n1_over_fq: u64,
    pub n_over_fq2: u64,
    pub maximal: bool,
}

impl CurveStats {
    /// `q^2 + 1 + 2 g q`.
    pub fn weil_bound(&self) -> u64 {
        self.q * self.q + 1 + 2 * self.genus * self.q
    }

    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "i": self.i,
            "genus": self.genus,
            "n1_over_fq": self.n1_over_fq,
            "n_over_fq2": self.n_over_fq2,
            "weil_bound_fq2": self.weil_bound(),
            "maximal": self.maximal,
        })
    }
}

impl fmt::Display for CurveStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "q = {}, stage i = {}", self.q, self.i)?;
        writeln!(f, "genus = {}", self.genus)?;
        writeln!(f, "N(F_{}) = {}", self.q, self.n1_over_fq)?;
        writeln!(f, "N(F_{}) = {} (bound {})", self.q * self.q, self.n_over_fq2, self.weil_bound())?;
        writeln!(f, "maximal = {}", self.maximal)
    }
}

/// Counts both fields and compares with the Weil bound over `F_{q^2}`.
pub fn check_maximality(table: &DescentTable, i: usize, workers: usize) -> Result<CurveStats> {
    let q = table.q();
    if q.pow(3) > crate::ff::FIELD_SIZE_CAP {
        return Err(Error::InvalidArgument(format!("q = {q} is too large for exhaustive counting")));
    }
    let genus = first_stage_genus(q, i)?;
    let n1 = count_places_first_stage(table, i, CountField::Fq, workers)?;
    let n2 = count_places_first_stage(table, i, CountField::Fq2, workers)?;
    let stats = CurveStats { q, i, genus, n1_over_fq: n1, n_over_fq2: n2, maximal: false };
    let maximal = n2 == stats.weil_bound();
    Ok(CurveStats { maximal, ..stats })
}

/// Multi-line text rendering of a tower.
pub fn render_tower(eqs: &[TowerEquation]) -> String {
    eqs.iter().map(|e| format!("{e}\n")).collect()
}
