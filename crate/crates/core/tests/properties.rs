use std::collections::HashSet;

use num_rational::Ratio;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use towerdescent::complexity::{compare_prime_case, genus_condition, mu_bound, uniform_bound, CurveInput, MuBound};
use towerdescent::descent::{canonical_chain, descent_table, quadratic_tower, DescentTable};
use towerdescent::ff::{is_prime, trace_norm, Field, FieldElement, Modulus};
use towerdescent::linpoly::{span, subspace_poly, LinearizedPoly};
use towerdescent::selfcheck::{descent_checks, random_chain, DESCENT_ORDERS};
use towerdescent::tower::{check_maximality, completed_tower};

fn field(p: u64, n: usize) -> Field {
    Field::new(p, n, Modulus::Default).unwrap()
}

const SMALL: [(u64, usize); 8] = [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3), (2, 4), (5, 2), (7, 2)];

#[test]
fn field_axioms_exhaustive_small() {
    for (p, n) in SMALL {
        let k = field(p, n);
        if k.size() > 64 {
            continue;
        }
        let els: Vec<FieldElement> = k.elements().collect();
        for a in &els {
            assert_eq!(a + &k.zero(), *a);
            assert_eq!(a * &k.one(), *a);
            assert!((a + &(-a)).is_zero());
            if !a.is_zero() {
                assert!((a * &a.inverse().unwrap()).is_one());
            }
            for b in &els {
                assert_eq!(a + b, b + a);
                assert_eq!(a * b, b * a);
                if k.size() <= 16 {
                    for c in &els {
                        assert_eq!(&(a + b) + c, a + &(b + c));
                        assert_eq!(&(a * b) * c, a * &(b * c));
                        assert_eq!(a * &(b + c), &(a * b) + &(a * c));
                    }
                }
            }
        }
    }
}

#[test]
fn discrete_log_is_a_bijection() {
    for (p, n) in SMALL.into_iter().chain([(2, 10), (3, 6)]) {
        let k = field(p, n);
        let mut seen = HashSet::new();
        for x in k.elements().filter(|x| !x.is_zero()) {
            let l = x.discrete_log().unwrap();
            assert!(l < k.size() - 1);
            assert!(seen.insert(l));
            assert_eq!(k.gen_pow(l as i64), x);
        }
        assert_eq!(seen.len() as u32, k.size() - 1);
        assert_eq!(k.zero().discrete_log(), None);
    }
}

fn ambient_strategy() -> impl Strategy<Value = Field> {
    prop::sample::select(DESCENT_ORDERS.to_vec()).prop_map(|(p, n)| quadratic_tower(p, n, Modulus::Default).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn frobenius_is_a_field_automorphism(k in ambient_strategy(), a in any::<u32>(), b in any::<u32>(), e in 0u32..8) {
        let x = k.element(a % k.size()).unwrap();
        let y = k.element(b % k.size()).unwrap();
        prop_assert_eq!((&x + &y).frobenius(e), &x.frobenius(e) + &y.frobenius(e));
        prop_assert_eq!((&x * &y).frobenius(e), &x.frobenius(e) * &y.frobenius(e));
    }

    #[test]
    fn trace_and_norm_land_in_base(k in ambient_strategy(), a in any::<u32>()) {
        let x = k.element(a % k.size()).unwrap();
        let base = k.base().unwrap();
        let (t, nm) = trace_norm(&x, base).unwrap();
        prop_assert_eq!(t.field(), base);
        prop_assert_eq!(nm.field(), base);
        prop_assert_eq!(nm.is_zero(), x.is_zero());
    }

    #[test]
    fn symbolic_composition_matches_ordinary(
        idx in 0usize..DESCENT_ORDERS.len(),
        a in prop::collection::vec(any::<u32>(), 1..4),
        b in prop::collection::vec(any::<u32>(), 1..4),
    ) {
        let (p, n) = DESCENT_ORDERS[idx];
        let k = field(p, n);
        let mk = |v: &[u32]| LinearizedPoly::new(&k, p, v.iter().map(|x| k.element(x % k.size()).unwrap()).collect()).unwrap();
        let (f, g) = (mk(&a), mk(&b));
        prop_assert_eq!(f.compose(&g).unwrap().to_ordinary(), f.to_ordinary().compose(&g.to_ordinary()).unwrap());
    }

    #[test]
    fn subspace_poly_vanishes_exactly_on_span(gens in prop::collection::vec(1u32..64, 1..4)) {
        let k = field(2, 6);
        let g: Vec<FieldElement> = gens.iter().map(|&v| k.element(v).unwrap()).collect();
        let h = span(&g, 2).unwrap();
        let poly = subspace_poly(&h, 2).unwrap();
        prop_assert_eq!(poly.ordinary_degree(), Some(h.len() as u64));
        let roots: Vec<FieldElement> = k.elements().filter(|x| poly.eval(x).unwrap().is_zero()).collect();
        prop_assert_eq!(roots, h);
    }

    #[test]
    fn descent_invariants_on_random_chains(idx in 0usize..DESCENT_ORDERS.len(), seed in any::<u64>()) {
        let (p, n) = DESCENT_ORDERS[idx];
        let ambient = quadratic_tower(p, n, Modulus::Default).unwrap();
        let chain = random_chain(&ambient, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let table = descent_table(&chain).unwrap();
        for c in descent_checks(&table).unwrap() {
            prop_assert!(c.ok, "{}: {}", c.label, c.detail);
        }
    }

    #[test]
    fn genus_condition_is_monotone_in_g(q in prop::sample::select(vec![4u64, 5, 7, 8, 9, 16, 25, 49, 64, 81, 121]), n in 2u64..30, g in 0u64..10_000) {
        if genus_condition(q, n, g + 1) {
            prop_assert!(genus_condition(q, n, g));
        }
    }

    #[test]
    fn bound_grows_by_three_per_genus_step(q in prop::sample::select(vec![4u64, 8, 9, 16]), n in 2u64..20, g in 0u64..6) {
        // enough places that only the genus condition can fail
        let big = 10 * (n + g + 2);
        let (a, b) = (
            mu_bound(&CurveInput::new(q, n, g, big, big).unwrap()),
            mu_bound(&CurveInput::new(q, n, g + 1, big, big).unwrap()),
        );
        if let (MuBound::Bound(x), MuBound::Bound(y)) = (a, b) {
            prop_assert_eq!(y, x + 3);
        }
    }
}

#[test]
fn composition_is_not_commutative() {
    let k = field(2, 2);
    let w = k.generator();
    let frob = LinearizedPoly::monomial(&k, 2, 1).unwrap();
    let scale = LinearizedPoly::new(&k, 2, vec![w.clone()]).unwrap();
    // T^2 ⋆ wT = w^2 T^2, but wT ⋆ T^2 = w T^2
    assert_ne!(frob.compose(&scale).unwrap(), scale.compose(&frob).unwrap());
}

#[test]
fn perturbed_cofactor_breaks_the_identity() {
    for &(p, n) in &DESCENT_ORDERS {
        let ambient = quadratic_tower(p, n, Modulus::Default).unwrap();
        let table = descent_table(&canonical_chain(&ambient).unwrap()).unwrap();
        let full = table.m_poly(0);
        let base = table.chain().base_field();
        for i in 1..n {
            let m = table.m_poly(i);
            for k in 0..m.coeffs().len() {
                for delta in base.elements().filter(|d| !d.is_zero()).take(3) {
                    let mut c = m.coeffs().to_vec();
                    c[k] = &c[k] + &delta;
                    let bumped = LinearizedPoly::new(base, p, c).unwrap();
                    assert_ne!(bumped.compose(&table.p_poly(i)).unwrap(), full);
                }
            }
        }
    }
}

fn tables() -> Vec<DescentTable> {
    DESCENT_ORDERS
        .iter()
        .map(|&(p, n)| descent_table(&canonical_chain(&quadratic_tower(p, n, Modulus::Default).unwrap()).unwrap()).unwrap())
        .collect()
}

#[test]
fn tower_step_degrees_multiply_to_q() {
    for t in tables() {
        let eqs = completed_tower(&t, 3).unwrap();
        for level in 1..3 {
            let product: u64 = eqs
                .iter()
                .filter(|e| (e.level.0 == level && e.level.1 >= 1) || e.level == (level + 1, 0))
                .map(|e| e.degree_over_prev)
                .product();
            assert_eq!(product, t.q());
        }
    }
}

#[test]
fn counts_respect_the_weil_bound() {
    for t in tables().into_iter().filter(|t| t.q() <= 27) {
        for i in 1..=t.n() {
            let s = check_maximality(&t, i, 3).unwrap();
            assert!(s.n_over_fq2 <= s.weil_bound(), "q={} i={i}", t.q());
        }
    }
}

#[test]
fn uniform_coefficient_tends_to_six_and_cited_is_smaller() {
    let mut prev = None;
    for p in (5..10_000u64).filter(|&p| is_prime(p)) {
        let (ours, cited) = compare_prime_case(p).unwrap();
        assert!(cited < ours);
        assert!(ours > Ratio::from_integer(6));
        if let Some(prev) = prev {
            assert!(ours < prev, "coefficient must decrease in p");
        }
        prev = Some(ours);
    }
    let near = compare_prime_case(9973).unwrap().0 - Ratio::from_integer(6);
    assert!(near < Ratio::new(1, 100));
    for n in 2..50 {
        assert_eq!(uniform_bound(4, n).unwrap().bound, Ratio::from_integer(9 * n as i128));
    }
}
