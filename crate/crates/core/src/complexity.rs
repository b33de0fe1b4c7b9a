//! Bilinear complexity bounds for multiplication in `F_{q^n}` over `F_q`.
//!
//! All decisions are exact. The genus-size condition
//! `2g + 1 <= q^((n-1)/2) (q^(1/2) - 1)` involves square roots; it is decided
//! in integers as follows. With `A = 2g + 1` and `Q = q^(n-1)`, both sides
//! are nonnegative, so the condition is `A^2 <= Q (q + 1 - 2 sqrt(q))`, i.e.
//! `D >= 2 Q sqrt(q)` with `D = Q (q + 1) - A^2`. That fails when `D < 0`,
//! and otherwise is equivalent to `D^2 >= 4 Q^2 q`. No case split on whether
//! `q` is a square is needed, and equality is detected exactly.

use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ff::{is_prime, prime_power};

pub type Rational = Ratio<i128>;

/// Parameters of a curve used to multiply in `F_{q^n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveInput {
    pub q: u64,
    pub n: u64,
    pub g: u64,
    pub n1: u64,
    pub n2: u64,
    /// Existence of a non-special divisor of degree `g - 1`; not computable
    /// here, so it is taken as given (true by default when `q >= 4`).
    pub nonspecial_assumed: bool,
}

impl CurveInput {
    pub fn new(q: u64, n: u64, g: u64, n1: u64, n2: u64) -> Result<CurveInput> {
        if prime_power(q).is_none() {
            return Err(Error::InvalidArgument(format!("q = {q} is not a prime power")));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!("extension degree must exceed 1, got {n}")));
        }
        Ok(CurveInput { q, n, g, n1, n2, nonspecial_assumed: q >= 4 })
    }

    pub fn with_nonspecial(mut self, assumed: bool) -> CurveInput {
        self.nonspecial_assumed = assumed;
        self
    }
}

/// The three hypotheses of the `3n + 3g` bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    NonSpecialDivisor,
    GenusSize,
    PlaceCount,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::NonSpecialDivisor => "non-special divisor of degree g-1",
            Condition::GenusSize => "2g+1 <= q^((n-1)/2)(q^(1/2)-1)",
            Condition::PlaceCount => "N1 + 2 N2 > 2n + 2g - 2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conditions {
    pub nonspecial: bool,
    pub genus_size: bool,
    pub place_count: bool,
}

impl Conditions {
    pub fn all(&self) -> bool {
        self.nonspecial && self.genus_size && self.place_count
    }

    pub fn failing(&self) -> Vec<Condition> {
        let mut out = Vec::new();
        if !self.nonspecial {
            out.push(Condition::NonSpecialDivisor);
        }
        if !self.genus_size {
            out.push(Condition::GenusSize);
        }
        if !self.place_count {
            out.push(Condition::PlaceCount);
        }
        out
    }
}

/// `2g + 1 <= q^((n-1)/2) (sqrt(q) - 1)`, decided in integers (see module docs).
pub fn genus_condition(q: u64, n: u64, g: u64) -> bool {
    let a = BigUint::from(2 * g as u128 + 1);
    let big_q = BigUint::from(q).pow(n as u32 - 1);
    let lhs = &big_q * BigUint::from(q + 1);
    let a2 = &a * &a;
    if lhs < a2 {
        return false;
    }
    let d = lhs - a2;
    &d * &d >= BigUint::from(4u32) * &big_q * &big_q * BigUint::from(q)
}

pub fn chud_conditions(input: &CurveInput) -> Conditions {
    let lhs = input.n1 as i128 + 2 * input.n2 as i128;
    let rhs = 2 * input.n as i128 + 2 * input.g as i128 - 2;
    Conditions {
        nonspecial: input.nonspecial_assumed,
        genus_size: genus_condition(input.q, input.n, input.g),
        place_count: lhs > rhs,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MuBound {
    Bound(u64),
    NotApplicable(Vec<Condition>),
}

impl fmt::Display for MuBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuBound::Bound(b) => write!(f, "{b}"),
            MuBound::NotApplicable(failing) => {
                let names: Vec<String> = failing.iter().map(ToString::to_string).collect();
                write!(f, "not applicable (fails: {})", names.join("; "))
            }
        }
    }
}

/// `3n + 3g` when all three conditions hold.
pub fn mu_bound(input: &CurveInput) -> MuBound {
    let c = chud_conditions(input);
    if c.all() {
        MuBound::Bound(3 * input.n + 3 * input.g)
    } else {
        MuBound::NotApplicable(c.failing())
    }
}

/// `3 (1 + p/(q-3))` and the resulting bound on `mu_q(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformBound {
    pub coefficient: Rational,
    pub bound: Rational,
}

pub fn uniform_bound(q: u64, n: u64) -> Result<UniformBound> {
    let (p, _) = prime_power(q).ok_or_else(|| Error::InvalidArgument(format!("q = {q} is not a prime power")))?;
    if q < 4 {
        return Err(Error::InvalidArgument(format!("the uniform bound needs q >= 4, got {q}")));
    }
    let coefficient = Rational::from_integer(3) * (Rational::one() + Rational::new(p as i128, q as i128 - 3));
    Ok(UniformBound { coefficient, bound: coefficient * Rational::from_integer(n as i128) })
}

/// For prime `p >= 5`: `(3(1 + p/(p-3)), 3(1 + 4/(p-3)))`; the second is always smaller.
pub fn compare_prime_case(p: u64) -> Result<(Rational, Rational)> {
    if p < 5 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!("p must be a prime >= 5, got {p}")));
    }
    let three = Rational::from_integer(3);
    let d = p as i128 - 3;
    let ours = three * (Rational::one() + Rational::new(p as i128, d));
    let cited = three * (Rational::one() + Rational::new(4, d));
    if cited >= ours {
        return Err(Error::Internal(format!("cited coefficient {cited} is not below {ours}")));
    }
    Ok((ours, cited))
}

/// Decimal rendering with six places, rounded half away from zero.
pub fn to_decimal(r: &Rational) -> String {
    let scaled = r * Rational::from_integer(1_000_000);
    let rounded = scaled.round().to_integer();
    let sign = if rounded < 0 { "-" } else { "" };
    let abs = rounded.unsigned_abs();
    format!("{sign}{}.{:06}", abs / 1_000_000, abs % 1_000_000)
}

pub fn rational_json(r: &Rational) -> Value {
    json!({ "num": r.numer().to_i64(), "den": r.denom().to_i64(), "decimal": to_decimal(r) })
}

fn render_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Everything known for one `(q, n)`, optionally with a concrete curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub q: u64,
    pub n: u64,
    pub conditions: Option<Conditions>,
    pub bound: Option<MuBound>,
    pub uniform: Option<UniformBound>,
    pub comparison: Option<(Rational, Rational)>,
}

impl BoundReport {
    pub fn new(q: u64, n: u64, curve: Option<&CurveInput>) -> Result<BoundReport> {
        let (p, _) = prime_power(q).ok_or_else(|| Error::InvalidArgument(format!("q = {q} is not a prime power")))?;
        Ok(BoundReport {
            q,
            n,
            conditions: curve.map(chud_conditions),
            bound: curve.map(mu_bound),
            uniform: if q >= 4 { Some(uniform_bound(q, n)?) } else { None },
            comparison: if q == p && p >= 5 { Some(compare_prime_case(p)?) } else { None },
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "n": self.n,
            "conditions": self.conditions.map(|c| json!({
                "nonspecial": c.nonspecial,
                "genus_size": c.genus_size,
                "place_count": c.place_count,
            })),
            "bound": self.bound.as_ref().map(|b| match b {
                MuBound::Bound(v) => json!(v),
                MuBound::NotApplicable(_) => json!("not applicable"),
            }),
            "uniform_bound": self.uniform.map(|u| rational_json(&u.bound)),
            "asymptotic": self.uniform.map(|u| rational_json(&u.coefficient)),
            "comparison": self.comparison.map(|(ours, cited)| json!({
                "uniform_coefficient": rational_json(&ours),
                "prime_field_coefficient": rational_json(&cited),
            })),
        })
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "q = {}, n = {}", self.q, self.n)?;
        if let Some(c) = &self.conditions {
            writeln!(f, "condition non-special divisor = {}", c.nonspecial)?;
            writeln!(f, "condition genus size = {}", c.genus_size)?;
            writeln!(f, "condition place count = {}", c.place_count)?;
        }
        if let Some(b) = &self.bound {
            writeln!(f, "mu bound = {b}")?;
        }
        match &self.uniform {
            Some(u) => {
                writeln!(f, "uniform bound = {} ({})", render_rational(&u.bound), to_decimal(&u.bound))?;
                writeln!(f, "asymptotic coefficient = {} ({})", render_rational(&u.coefficient), to_decimal(&u.coefficient))?;
            }
            None => writeln!(f, "uniform bound = not applicable (q < 4)")?,
        }
        if let Some((ours, cited)) = &self.comparison {
            writeln!(
                f,
                "prime field comparison: {} vs {} ({} is smaller)",
                render_rational(ours),
                render_rational(cited),
                render_rational(cited)
            )?;
        }
        Ok(())
    }
}
