use num_complex::Complex64;
use proptest::prelude::*;
use superstar_core::sampling::Sampler;
use superstar_core::starprod::DeformationContext;
use superstar_core::supertorus::{all_normal_forms, torus_vs_udf, Letter, Phase, SupertorusElement, TorusDims};

const D: TorusDims = TorusDims { m: 1, p: 1, q: 1 };

fn words(alphabet: &[Letter], max_len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in alphabet {
                let mut v: Vec<Letter> = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn rewriting_is_confluent_on_short_words() {
    let alphabet = [Letter::U(1, 1), Letter::V(1, 1), Letter::Gamma(1), Letter::Xi(1)];
    let all = words(&alphabet, 4);
    assert_eq!(all.len(), 1 + 4 + 16 + 64 + 256);
    for w in &all {
        let forms = all_normal_forms(D, w);
        assert_eq!(forms.len(), 1, "{w:?} has normal forms {forms:?}");
    }
}

#[test]
fn rewriting_is_confluent_with_inverses() {
    let alphabet = [Letter::U(1, 1), Letter::V(1, 1), Letter::U(1, -1), Letter::V(1, -1), Letter::Gamma(1)];
    for w in words(&alphabet, 4) {
        assert_eq!(all_normal_forms(D, &w).len(), 1, "{w:?}");
    }
}

fn random_element(s: &mut Sampler, dims: TorusDims) -> SupertorusElement {
    let mut letters = Vec::new();
    for j in 1..=dims.m {
        letters.extend([Letter::U(j, 1), Letter::V(j, 1), Letter::U(j, -1), Letter::V(j, -1)]);
    }
    letters.extend((1..=dims.p).map(Letter::Gamma));
    letters.extend((1..=dims.q).map(Letter::Xi));
    let mut out = SupertorusElement::zero(dims);
    for _ in 0..1 + s.index(3) {
        let w: Vec<Letter> = (0..s.index(5)).map(|_| letters[s.index(letters.len())]).collect();
        let c = Complex64::new(s.index(5) as f64 - 2.0, s.index(3) as f64 - 1.0);
        let phase = Phase::monomial(c, s.index(3) as i64 - 1, s.index(2) as u32);
        out = out.add(&SupertorusElement::from_word(dims, phase, &w).unwrap());
    }
    out
}

fn homogeneous(s: &mut Sampler, dims: TorusDims) -> SupertorusElement {
    loop {
        let e = random_element(s, dims);
        if e.parity().is_some() {
            return e;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dagger_is_a_superinvolution(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let dims = TorusDims { m: 1 + s.index(2), p: s.index(3), q: s.index(2) };
        let (a, b) = (homogeneous(&mut s, dims), homogeneous(&mut s, dims));
        prop_assert_eq!(a.dagger().dagger(), a.clone());
        let sign = if a.parity() == Some(1) && b.parity() == Some(1) { -1.0 } else { 1.0 };
        let rhs = b.dagger().mul(&a.dagger()).scale(Complex64::new(sign, 0.0));
        prop_assert_eq!(a.mul(&b).dagger(), rhs);
    }

    #[test]
    fn torus_product_is_associative(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let dims = TorusDims { m: 1 + s.index(2), p: s.index(2), q: s.index(2) };
        let (a, b, c) = (random_element(&mut s, dims), random_element(&mut s, dims), random_element(&mut s, dims));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }
}

#[test]
fn udf_matches_torus_relations() {
    for (m, p, q) in [(1, 0, 0), (1, 1, 0), (1, 0, 1), (1, 1, 1), (2, 2, 0), (1, 2, 1)] {
        for theta in [0.05, 0.13, 0.3] {
            let ctx = DeformationContext::new(theta, m, p + q, (p, q)).unwrap();
            let report = torus_vs_udf(&ctx, 1e-10).unwrap();
            assert!(report.consistent, "{m} {p} {q} {theta}: {report:?}");
            assert!((report.theta_scale - 2.0 * std::f64::consts::PI).abs() < 1e-9);
            if p + q > 0 {
                assert!((report.odd_scale - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn no_xi_generators_without_negative_signature() {
    let ctx = DeformationContext::new(0.2, 1, 2, (2, 0)).unwrap();
    let report = torus_vs_udf(&ctx, 1e-10).unwrap();
    assert!(report.relations.iter().all(|(name, _)| !name.contains('X')));
}
