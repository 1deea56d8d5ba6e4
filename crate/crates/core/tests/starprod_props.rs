use num_complex::Complex64;
use proptest::prelude::*;
use superstar_core::grassmann::AuxOddRing;
use superstar_core::sampling::{FunctionClass, Sampler};
use superstar_core::starprod::DeformationContext;
use superstar_core::superfun::Superfunction;

fn context(s: &mut Sampler) -> DeformationContext {
    let m = 1 + s.index(2);
    let n = s.index(4);
    let p = s.index(n + 1);
    let theta = s.uniform(0.3, 1.5);
    DeformationContext::new(theta, m, n, (p, n - p)).unwrap()
}

fn sample(s: &mut Sampler, ctx: &DeformationContext, classes: &[FunctionClass], parity: Option<u8>) -> Superfunction {
    s.superfunction(2 * ctx.m(), ctx.n(), classes, parity)
}

fn graded(f: &Superfunction, g: &Superfunction) -> f64 {
    if f.parity() == Some(1) && g.parity() == Some(1) {
        -1.0
    } else {
        1.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn associativity(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let ctx = context(&mut s);
        let f = sample(&mut s, &ctx, &FunctionClass::ALL, None);
        let g = sample(&mut s, &ctx, &FunctionClass::ALL, None);
        let h = sample(&mut s, &ctx, &FunctionClass::ALL, None);
        let left = ctx.star(&ctx.star(&f, &g).unwrap(), &h).unwrap();
        let right = ctx.star(&f, &ctx.star(&g, &h).unwrap()).unwrap();
        prop_assert!(left.deviation(&right) < 1e-10, "deviation {}", left.deviation(&right));
    }

    #[test]
    fn oracle_agreement(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let ctx = context(&mut s);
        let f = sample(&mut s, &ctx, &FunctionClass::ORACLE, None);
        let g = sample(&mut s, &ctx, &FunctionClass::ORACLE, None);
        let engine = ctx.star(&f, &g).unwrap();
        let oracle = ctx.star_oracle(&f, &g).unwrap();
        prop_assert!(engine.deviation(&oracle) < 1e-12, "deviation {}", engine.deviation(&oracle));
    }

    #[test]
    fn superinvolution(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let ctx = context(&mut s);
        let pf = s.index(2) as u8;
        let pg = s.index(2) as u8;
        let f = sample(&mut s, &ctx, &FunctionClass::ALL, Some(pf));
        let g = sample(&mut s, &ctx, &FunctionClass::ALL, Some(pg));
        let lhs = ctx.star(&f, &g).unwrap().sconj();
        let rhs = ctx.star(&g.sconj(), &f.sconj()).unwrap().scale(Complex64::new(graded(&f, &g), 0.0));
        prop_assert!(lhs.deviation(&rhs) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn traciality(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let ctx = context(&mut s);
        let f = sample(&mut s, &ctx, &[FunctionClass::Gaussian], None);
        let g = sample(&mut s, &ctx, &FunctionClass::ALL, None);
        let lhs = ctx.star(&f, &g).unwrap().sintegrate().unwrap();
        let rhs = f.smul(&g).unwrap().sintegrate().unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()), "{lhs} vs {rhs}");
    }

    #[test]
    fn translation_invariance(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let ctx = context(&mut s);
        let ring = AuxOddRing::new(2).unwrap();
        let f = sample(&mut s, &ctx, &FunctionClass::ALL, None);
        let g = sample(&mut s, &ctx, &FunctionClass::ALL, None);
        let a = s.real_vec(2 * ctx.m(), 1.0);
        let eta: Vec<_> = (0..ctx.n()).map(|_| s.odd_aux(&ring)).collect();
        let tau = |h: &Superfunction| h.translate_even_real(&a).unwrap().grassmann_translate(&eta).unwrap();
        let lhs = ctx.star(&tau(&f), &tau(&g)).unwrap();
        let rhs = tau(&ctx.star(&f, &g).unwrap());
        prop_assert!(lhs.deviation(&rhs) < 1e-10, "deviation {}", lhs.deviation(&rhs));
    }
}

#[test]
fn odd_sector_is_clifford() {
    let ctx = DeformationContext::new(0.75, 0, 3, (2, 1)).unwrap();
    let lambda = ctx.clifford_lambda();
    for a in 1..=3 {
        for b in 1..=3 {
            let xa = Superfunction::odd_coordinate(0, 3, a).unwrap();
            let xb = Superfunction::odd_coordinate(0, 3, b).unwrap();
            let anti = ctx.star(&xa, &xb).unwrap().add(&ctx.star(&xb, &xa).unwrap()).unwrap();
            let expected = if a == b { lambda[a - 1] * 2.0 } else { Complex64::new(0.0, 0.0) };
            assert!(anti.approx_eq(&Superfunction::constant(0, 3, expected), 1e-13), "{a} {b}");
        }
    }
    assert!((lambda[0] + lambda[2]).norm() < 1e-15, "signature flips the square");
}

#[test]
fn coordinate_brackets_match_oracle_forms() {
    let theta = 0.8;
    let ctx = DeformationContext::new(theta, 1, 1, (1, 0)).unwrap();
    let mut s = Sampler::new(7);
    let f = s.superfunction(2, 1, &FunctionClass::ALL, Some(0));
    for mu in 0..2 {
        let x = Superfunction::even_coordinate(2, 1, mu);
        let anti = ctx.star_anticomm(&x, &f).unwrap();
        assert!(anti.approx_eq(&x.smul(&f).unwrap().scale(Complex64::new(2.0, 0.0)), 1e-12));
        // (ω∂)_μ f with ω the symplectic block
        let omega = ctx.omega();
        let mut expected = Superfunction::zero(2, 1);
        for nu in 0..2 {
            let d = f.derive_even(nu).unwrap().scale(Complex64::new(omega[(mu, nu)], 0.0));
            expected = expected.add(&d).unwrap();
        }
        let expected = expected.scale(Complex64::new(0.0, ctx.sigma() * theta));
        assert!(ctx.star_comm(&x, &f).unwrap().approx_eq(&expected, 1e-12));
    }
}
