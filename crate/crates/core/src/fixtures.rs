//! Embedded golden tables for the worked examples, and a checker that
//! recomputes them from scratch.
//!
//! Polynomials are stored in the notation of the worked examples and parsed
//! with [`LinearizedPoly::parse`]; comparisons are exact.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::descent::{canonical_chain, chain_from_norms, descent_table, quadratic_constants, quadratic_tower, DescentTable};
use crate::error::{Error, Result};
use crate::ff::{trace_norm, FieldElement, Modulus};
use crate::linpoly::LinearizedPoly;

const RAW: [(&str, &str); 6] = [
    ("q4", include_str!("../fixtures/q4.json")),
    ("q8", include_str!("../fixtures/q8.json")),
    ("q16", include_str!("../fixtures/q16.json")),
    ("q32", include_str!("../fixtures/q32.json")),
    ("q9", include_str!("../fixtures/q9.json")),
    ("q27", include_str!("../fixtures/q27.json")),
];

#[derive(Clone, Debug, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub comment: String,
    pub p: u64,
    pub n: usize,
    /// Generator exponents of the norms selecting the chain (odd `p`).
    pub norms: Option<Vec<i64>>,
    #[serde(rename = "P")]
    pub p_polys: BTreeMap<usize, String>,
    #[serde(rename = "M")]
    pub m_polys: BTreeMap<usize, String>,
    pub recursion: Option<BTreeMap<usize, String>>,
    /// Norms of the nonzero elements of `H_i`.
    pub h_norms: Option<BTreeMap<usize, Vec<String>>>,
    /// Discrete logs of the constants `a` in `T^q + T = T prod (T^2 + a)`.
    pub quadratic_constants: Option<Vec<u32>>,
}

/// All embedded fixtures, in a fixed order.
pub fn all() -> Vec<Fixture> {
    RAW.iter()
        .map(|(name, text)| serde_json::from_str(text).unwrap_or_else(|e| panic!("fixture {name}: {e}")))
        .collect()
}

pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub ok: bool,
    /// Expected vs. computed, when they differ.
    pub detail: String,
}

impl Check {
    fn compare(label: String, expected: &str, got: &str, ok: bool) -> Check {
        let detail = if ok { String::new() } else { format!("expected {expected}, got {got}") };
        Check { label, ok, detail }
    }
}

impl Fixture {
    /// Rebuilds the descent table this fixture describes.
    pub fn table(&self) -> Result<DescentTable> {
        let ambient = quadratic_tower(self.p, self.n, Modulus::Default)?;
        let chain = match &self.norms {
            Some(exps) => {
                let base = ambient.base().ok_or(Error::NotQuadraticTower)?;
                let norms: Vec<FieldElement> = exps.iter().map(|&k| base.gen_pow(k)).collect();
                chain_from_norms(&ambient, &norms)?
            }
            None => canonical_chain(&ambient)?,
        };
        descent_table(&chain)
    }

    /// Recomputes everything and compares it with the stored values.
    pub fn check(&self) -> Result<Vec<Check>> {
        let table = self.table()?;
        let base = table.chain().base_field().clone();
        let p = self.p;
        let mut out = Vec::new();
        for (kind, polys) in [("P", &self.p_polys), ("M", &self.m_polys)] {
            for (&i, text) in polys {
                let expected = LinearizedPoly::parse(&base, p, text)?;
                let got = if kind == "P" { table.p_poly(i) } else { table.m_poly(i) };
                out.push(Check::compare(format!("{} {kind}_{i}", self.name), &expected.to_string(), &got.to_string(), expected == got));
            }
        }
        if let Some(rec) = &self.recursion {
            for (&j, text) in rec {
                let expected = FieldElement::parse(&base, text)?;
                let got = table.w(j);
                out.push(Check::compare(format!("{} W_{j}", self.name), &expected.to_string(), &got.to_string(), &expected == got));
            }
        }
        if let Some(h) = &self.h_norms {
            for (&i, texts) in h {
                let mut expected = texts.iter().map(|t| FieldElement::parse(&base, t)).collect::<Result<Vec<_>>>()?;
                expected.sort_by_key(|x| x.discrete_log());
                let mut got: Vec<FieldElement> = Vec::new();
                for a in table.chain().span(i).iter().filter(|a| !a.is_zero()) {
                    let (_, nm) = trace_norm(a, &base)?;
                    if !got.contains(&nm) {
                        got.push(nm);
                    }
                }
                got.sort_by_key(|x| x.discrete_log());
                out.push(Check::compare(format!("{} norms of H_{i}", self.name), &fmt_list(&expected), &fmt_list(&got), expected == got));
            }
        }
        if let Some(logs) = &self.quadratic_constants {
            let got: Vec<u32> = quadratic_constants(table.chain().ambient())?
                .iter()
                .map(|a| a.discrete_log().unwrap_or(u32::MAX))
                .collect();
            out.push(Check::compare(format!("{} quadratic factors", self.name), &format!("{logs:?}"), &format!("{got:?}"), &got == logs));
        }
        Ok(out)
    }
}

fn fmt_list(xs: &[FieldElement]) -> String {
    let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        let names: Vec<String> = all().into_iter().map(|f| f.name).collect();
        assert_eq!(names, ["q4", "q8", "q16", "q32", "q9", "q27"]);
    }

    #[test]
    fn every_fixture_matches() {
        for f in all() {
            for c in f.check().unwrap() {
                assert!(c.ok, "{}: {}", c.label, c.detail);
            }
        }
    }
}
