//! Seeded randomized checks run by `towerdescent verify`, next to the
//! embedded fixtures. Each check yields a [`Check`] rather than panicking so
//! the CLI can report every failure.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::descent::{canonical_chain, descent_table, quadratic_tower, trace_zero_kernel, DescentTable, SubspaceChain};
use crate::error::Result;
use crate::ff::{Field, FieldElement, Modulus};
use crate::fixtures::{self, Check};
use crate::linpoly::{moore_det, LinearizedPoly};

/// `(p, n)` for the orders `q` the descent suites sweep.
pub const DESCENT_ORDERS: [(u64, usize); 7] = [(2, 2), (2, 3), (3, 2), (2, 4), (5, 2), (3, 3), (2, 5)];

fn check(label: impl Into<String>, ok: bool, detail: impl FnOnce() -> String) -> Check {
    Check { label: label.into(), ok, detail: if ok { String::new() } else { detail() } }
}

/// A uniformly shuffled `F_p`-basis of `ker(T^q + T)`.
pub fn random_chain(ambient: &Field, rng: &mut impl Rng) -> Result<SubspaceChain> {
    let n = ambient.base().map(|b| b.absolute_degree() as usize).unwrap_or(0);
    let p = ambient.p() as u64;
    let mut kernel = trace_zero_kernel(ambient)?;
    kernel.retain(|a| !a.is_zero());
    loop {
        let mut basis: Vec<FieldElement> = Vec::with_capacity(n);
        kernel.shuffle(rng);
        for a in &kernel {
            basis.push(a.clone());
            if moore_det(&basis, p)?.is_zero() {
                basis.pop();
            }
            if basis.len() == n {
                return SubspaceChain::new(ambient, basis);
            }
        }
    }
}

/// `M_i ⋆ P_i = T^q + T`, `P_i` vanishes exactly on `H_i`, `W_j ≠ 0`, and the
/// completed-tower step identity `M_{n-s} = M_{n-1} ⋆ S_2 ⋆ ... ⋆ S_s`.
pub fn descent_checks(table: &DescentTable) -> Result<Vec<Check>> {
    let base = table.chain().base_field();
    let ambient = table.chain().ambient();
    let p = base.p() as u64;
    let n = table.n();
    let q = table.q();
    let tag = format!("q={q} basis={}", fmt_basis(table.chain().basis()));
    let mut out = Vec::new();
    let full = table.m_poly(0);
    for i in 1..n {
        let (m, pp) = (table.m_poly(i), table.p_poly(i));
        let prod = m.compose(&pp)?;
        out.push(check(format!("{tag}: M_{i} * P_{i} = T^q + T"), prod == full, || format!("got {prod}")));

        let pa = pp.embed_into(ambient)?;
        let h = table.chain().span(i);
        let mut roots = 0usize;
        let mut all_in_h = true;
        for x in ambient.elements() {
            if pa.eval(&x)?.is_zero() {
                roots += 1;
                all_in_h &= h.contains(&x);
            }
        }
        let ok = all_in_h && roots == h.len();
        out.push(check(format!("{tag}: roots of P_{i} = H_{i}"), ok, || format!("{roots} roots for |H| = {}", h.len())));
    }
    for (j, w) in table.recursion() {
        out.push(check(format!("{tag}: W_{j} != 0"), !w.is_zero(), String::new));
    }
    // step identity
    let mut acc = table.m_poly(n - 1);
    for s in 2..n {
        let w = table.w(n - s + 1);
        let step = LinearizedPoly::new(base, p, vec![-w, base.one()])?;
        acc = acc.compose(&step)?;
        let expected = table.m_poly(n - s);
        out.push(check(format!("{tag}: M_{} = M_{} * S_2..S_{s}", n - s, n - 1), acc == expected, || format!("got {acc}, want {expected}")));
    }
    Ok(out)
}

fn fmt_basis(b: &[FieldElement]) -> String {
    let parts: Vec<String> = b.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// Symbolic composition agrees with ordinary composition.
pub fn composition_checks(rng: &mut impl Rng, rounds: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &(p, n) in &DESCENT_ORDERS {
        let k = Field::new(p, n, Modulus::Default)?;
        for r in 0..rounds {
            let a = random_poly(&k, p, rng, 3)?;
            let b = random_poly(&k, p, rng, 3)?;
            let sym = a.compose(&b)?.to_ordinary();
            let ord = a.to_ordinary().compose(&b.to_ordinary())?;
            out.push(check(format!("F_{} composition #{r}", k.size()), sym == ord, || format!("({a}) * ({b})")));
        }
    }
    Ok(out)
}

fn random_poly(k: &Field, b: u64, rng: &mut impl Rng, max_deg: usize) -> Result<LinearizedPoly> {
    let len = rng.gen_range(1..=max_deg + 1);
    let coeffs = (0..len).map(|_| k.element(rng.gen_range(0..k.size())).expect("in range")).collect();
    LinearizedPoly::new(k, b, coeffs)
}

/// Field axioms on random triples.
pub fn field_checks(rng: &mut impl Rng, rounds: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &(p, n) in &DESCENT_ORDERS {
        let k = Field::new(p, n, Modulus::Default)?;
        let k2 = Field::extend_quadratic(&k)?;
        for f in [&k, &k2] {
            let mut ok = true;
            for _ in 0..rounds {
                let pick = |rng: &mut _| f.element(Rng::gen_range(rng, 0..f.size())).expect("in range");
                let (a, b, c) = (pick(rng), pick(rng), pick(rng));
                ok &= &(&a + &b) * &c == &(&a * &c) + &(&b * &c);
                ok &= &(&a * &b) * &c == &a * &(&b * &c);
                ok &= &(&a + &b) - &b == a;
                ok &= a.is_zero() || (&a * &a.inverse()?).is_one();
                ok &= a.frobenius(1) == a.pow(p as i64)?;
            }
            out.push(check(format!("field axioms in F_{}", f.size()), ok, || "identity violated".into()));
        }
    }
    Ok(out)
}

/// Fixtures, then descent invariants on canonical and random chains, then
/// composition and field checks.
pub fn run_all(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for f in fixtures::all() {
        out.extend(f.check()?);
    }
    for &(p, n) in &DESCENT_ORDERS {
        let ambient = quadratic_tower(p, n, Modulus::Default)?;
        out.extend(descent_checks(&descent_table(&canonical_chain(&ambient)?)?)?);
        for _ in 0..2 {
            let chain = random_chain(&ambient, &mut rng)?;
            out.extend(descent_checks(&descent_table(&chain)?)?);
        }
    }
    out.extend(composition_checks(&mut rng, 8)?);
    out.extend(field_checks(&mut rng, 64)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_chain_is_a_basis() {
        let amb = quadratic_tower(3, 2, Modulus::Default).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let c = random_chain(&amb, &mut rng).unwrap();
            assert_eq!(c.span(2).len(), 9);
        }
    }

    #[test]
    fn all_checks_pass() {
        let checks = run_all(1).unwrap();
        let bad: Vec<_> = checks.iter().filter(|c| !c.ok).collect();
        assert!(bad.is_empty(), "{bad:?}");
    }
}
