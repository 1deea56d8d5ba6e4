use num_complex::Complex64;
use proptest::prelude::*;
use superstar_core::exppoly::ExpPoly;
use superstar_core::sampling::{FunctionClass, Sampler};

/// Trapezoid rule on [-L, L]^d; spectrally accurate for the decaying analytic
/// integrands used here.
fn quadrature(f: &ExpPoly) -> Complex64 {
    let (l, h) = (12.0, 0.04);
    let steps = (2.0 * l / h) as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| -l + k as f64 * h).collect();
    match f.dim() {
        1 => grid.iter().map(|&x| f.evaluate(&[x])).sum::<Complex64>() * h,
        2 => {
            let mut s = Complex64::new(0.0, 0.0);
            for &x in &grid {
                for &y in &grid {
                    s += f.evaluate(&[x, y]);
                }
            }
            s * h * h
        }
        d => panic!("quadrature oracle only for d ≤ 2, got {d}"),
    }
}

#[test]
fn random_integrals_match_quadrature() {
    let mut s = Sampler::new(2024);
    for case in 0..25 {
        let d = 1 + case % 2;
        let f = s.exppoly(d, FunctionClass::Gaussian);
        let exact = f.integrate().unwrap();
        let quad = quadrature(&f);
        assert!((exact - quad).norm() <= 1e-9, "case {case}: {exact} vs {quad}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn translation_invariance(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let d = 1 + s.index(3);
        let f = s.exppoly(d, FunctionClass::Gaussian);
        let a = s.real_vec(d, 2.0);
        let before = f.integrate().unwrap();
        let after = f.translate_real(&a).unwrap().integrate().unwrap();
        prop_assert!((before - after).norm() <= 1e-12 * (1.0 + before.norm()));
    }

    #[test]
    fn total_derivatives_integrate_to_zero(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let d = 1 + s.index(3);
        let f = s.exppoly(d, FunctionClass::Gaussian);
        let mu = s.index(d);
        let v = f.derive(mu).unwrap().integrate().unwrap();
        prop_assert!(v.norm() <= 1e-12 * (1.0 + f.max_abs_on_grid()));
    }

    #[test]
    fn product_commutative_and_associative(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let d = 1 + s.index(3);
        let classes = FunctionClass::ALL;
        let cf = classes[s.index(4)];
        let f = s.exppoly(d, cf);
        let cg = classes[s.index(4)];
        let g = s.exppoly(d, cg);
        let ch = classes[s.index(4)];
        let h = s.exppoly(d, ch);
        prop_assert!(f.mul(&g).approx_eq(&g.mul(&f), 1e-14));
        prop_assert!(f.mul(&g).mul(&h).approx_eq(&f.mul(&g.mul(&h)), 1e-13));
    }
}
