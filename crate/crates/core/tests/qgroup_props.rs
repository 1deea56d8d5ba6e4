use num_complex::Complex64;
use proptest::prelude::*;
use superstar_core::exppoly::ExpPoly;
use superstar_core::qgroup::{
    antipode, coproduct, counit_on_leg, gaussian_leg, pentagon_check, qg_star, sample_cases, sample_leg, sample_t_triples,
    superunitarity_defect, tensor, w_apply, QGroupElement, QuantumGroup,
};
use superstar_core::sampling::Sampler;
use superstar_core::superfun::Superfunction;

fn group(s: &mut Sampler) -> QuantumGroup {
    let n = s.index(3);
    let p = s.index(n + 1);
    QuantumGroup::new(1, n, (p, n - p)).unwrap()
}

#[test]
fn pentagon_on_plane_wave_suite() {
    let mut s = Sampler::new(2024);
    for n in 0..3 {
        let g = QuantumGroup::new(1, n, (n, 0)).unwrap();
        let cases = sample_cases(&g, &mut s, 3);
        let triples = sample_t_triples(&mut s, 5);
        let report = pentagon_check(&g, &cases, &triples, 1e-8).unwrap();
        assert!(report.passed, "n = {n}: {}", report.max_deviation);
    }
}

#[test]
fn pentagon_with_mixed_signature_and_two_planes() {
    let mut s = Sampler::new(7);
    let g = QuantumGroup::new(2, 2, (1, 1)).unwrap();
    let cases = sample_cases(&g, &mut s, 2);
    let triples = sample_t_triples(&mut s, 5);
    let report = pentagon_check(&g, &cases, &triples, 1e-8).unwrap();
    assert!(report.passed, "{}", report.max_deviation);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn deferred_star_is_associative(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let g = group(&mut s);
        let (a, b, c) = (sample_leg(&g, &mut s), sample_leg(&g, &mut s), sample_leg(&g, &mut s));
        let t = s.uniform(0.2, 1.5) * if s.index(2) == 0 { 1.0 } else { -1.0 };
        let ctx = g.context(t).unwrap();
        let ab = qg_star(&g, &a, &b).at(&[t]).unwrap();
        let bc = qg_star(&g, &b, &c).at(&[t]).unwrap();
        let left = ctx.star(&ab, &c.at(t).unwrap()).unwrap();
        let right = ctx.star(&a.at(t).unwrap(), &bc).unwrap();
        prop_assert!(left.deviation(&right) < 1e-10);
    }

    #[test]
    fn counit_laws(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let g = group(&mut s);
        let f = sample_leg(&g, &mut s);
        let delta = coproduct(&g, &f);
        let t = s.uniform(-1.0, 1.0);
        for leg in 0..2 {
            prop_assert!(counit_on_leg(&g, &delta, leg).at(&[t]).unwrap().deviation(&f.at(t).unwrap()) == 0.0);
        }
    }

    #[test]
    fn coproduct_is_coassociative(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let g = group(&mut s);
        let f = sample_leg(&g, &mut s);
        let ts = [s.uniform(-1.0, 1.0), s.uniform(-1.0, 1.0), s.uniform(-1.0, 1.0)];
        // (Δ⊗id)Δf and (id⊗Δ)Δf both equal f(g₁g₂g₃)
        let delta = coproduct(&g, &f);
        let left = coproduct_on_first(&g, &delta, ts);
        let right = coproduct_on_second(&g, &delta, ts);
        prop_assert!(left.deviation(&right) < 1e-12);
    }

    #[test]
    fn antipode_is_involutive(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let g = group(&mut s);
        let f = sample_leg(&g, &mut s);
        let t = s.uniform(-1.0, 1.0);
        let sf = antipode(&g, &f);
        let as_element = |t: f64| sf.at(&[t]).unwrap();
        // S applied to the evaluated S f: f(((g⁻¹)⁻¹)) = f(g)
        let twice = antipode(&g, &QGroupElement::separable(ExpPoly::constant(1, Complex64::new(1.0, 0.0)), as_element(-t)).unwrap());
        prop_assert!(twice.at(&[t]).unwrap().deviation(&f.at(t).unwrap()) < 1e-12);
    }

    #[test]
    fn w_is_linear_in_each_leg(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let g = group(&mut s);
        let (a, b, c) = (sample_leg(&g, &mut s), sample_leg(&g, &mut s), sample_leg(&g, &mut s));
        let ts = [0.6, -0.9];
        let w = |x: &QGroupElement, y: &QGroupElement| w_apply(&g, &tensor(&g, &[x.clone(), y.clone()]), 0, 1).unwrap().at(&ts).unwrap();
        let sum = w(&a.add(&b).unwrap(), &c);
        prop_assert!(sum.deviation(&w(&a, &c).add(&w(&b, &c)).unwrap()) < 1e-12);
        let sum = w(&c, &a.add(&b).unwrap());
        prop_assert!(sum.deviation(&w(&c, &a).add(&w(&c, &b)).unwrap()) < 1e-12);
    }
}

fn coproduct_on_first(g: &QuantumGroup, delta: &superstar_core::qgroup::LegFunction, ts: [f64; 3]) -> Superfunction {
    // Δf(g₁g₂, g₃) with g₁g₂ expanded
    let f12 = delta.at(&[ts[0] + ts[1], ts[2]]).unwrap();
    expand_leg(g, &f12, 0, ts[0])
}

fn coproduct_on_second(g: &QuantumGroup, delta: &superstar_core::qgroup::LegFunction, ts: [f64; 3]) -> Superfunction {
    let f23 = delta.at(&[ts[0], ts[1] + ts[2]]).unwrap();
    expand_leg(g, &f23, 1, ts[1])
}

/// Replaces leg `leg` of a two-leg function by the product of two legs at
/// split time `t_first`.
fn expand_leg(g: &QuantumGroup, f: &Superfunction, leg: usize, t_first: f64) -> Superfunction {
    use nalgebra::DMatrix;
    use superstar_core::grassmann::AuxNumber;
    let (m2, n) = (2 * g.m(), g.n());
    let pi = g.pi(t_first);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    // old legs (a, b) → new legs (1, 2, 3)
    let l = DMatrix::from_fn(2 * m2, 3 * m2, |r, col| {
        let (old_leg, a) = (r / m2, r % m2);
        let targets: Vec<(usize, Complex64)> = match (leg, old_leg) {
            (0, 0) => vec![(a, one), (m2 + a, Complex64::new(pi[(a, a)], 0.0))],
            (0, 1) => vec![(2 * m2 + a, one)],
            (1, 0) => vec![(a, one)],
            _ => vec![(m2 + a, one), (2 * m2 + a, Complex64::new(pi[(a, a)], 0.0))],
        };
        targets.iter().find(|(c, _)| *c == col).map_or(zero, |(_, v)| *v)
    });
    let even = f.body().try_map_coeffs(|h| h.linear_substitute(&l, &vec![zero; 2 * m2])).unwrap();
    let nn = n as u32;
    let body = even.substitute(|gbit| {
        let (old_leg, a) = (gbit / nn.max(1), gbit % nn.max(1));
        if gbit >= 2 * nn {
            return None;
        }
        let gen = |new_leg: u32| AuxNumber::generator(new_leg * nn + a);
        Some(match (leg, old_leg) {
            (0, 0) => gen(0).add(&gen(1)),
            (0, _) => gen(2),
            (1, 0) => gen(0),
            _ => gen(1).add(&gen(2)),
        })
    });
    Superfunction::from_body(3 * m2, 3 * n, body).unwrap()
}

#[test]
fn w_preserves_the_pairing_on_gaussian_legs() {
    let mut s = Sampler::new(99);
    for n in 0..2 {
        let g = QuantumGroup::new(1, n, (n, 0)).unwrap();
        for _ in 0..4 {
            let f = tensor(&g, &[gaussian_leg(&g, &mut s), gaussian_leg(&g, &mut s)]);
            let h = tensor(&g, &[gaussian_leg(&g, &mut s), gaussian_leg(&g, &mut s)]);
            let (before, after) = superunitarity_defect(&g, &f, &h, [0.7, 0.45]).unwrap();
            assert!((before - after).norm() < 1e-9 * (1.0 + before.norm()), "{before} vs {after}");
        }
    }
}
