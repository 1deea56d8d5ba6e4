use num_complex::Complex64;
use proptest::prelude::*;
use superstar_core::sampling::{FunctionClass, Sampler};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn smul_associative(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (d, n) = (1 + s.index(2), s.index(4));
        let f = s.superfunction(d, n, &FunctionClass::ALL, None);
        let g = s.superfunction(d, n, &FunctionClass::ALL, None);
        let h = s.superfunction(d, n, &FunctionClass::ALL, None);
        let left = f.smul(&g).unwrap().smul(&h).unwrap();
        let right = f.smul(&g.smul(&h).unwrap()).unwrap();
        prop_assert!(left.deviation(&right) <= 1e-10);
    }

    #[test]
    fn integral_is_graded_symmetric(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (d, n) = (1 + s.index(2), s.index(4));
        let pf = s.index(2) as u8;
        let pg = s.index(2) as u8;
        let f = s.superfunction(d, n, &[FunctionClass::Gaussian], Some(pf));
        let g = s.superfunction(d, n, &FunctionClass::ALL, Some(pg));
        let sign = if f.parity() == Some(1) && g.parity() == Some(1) { -1.0 } else { 1.0 };
        let lhs = f.smul(&g).unwrap().sintegrate().unwrap();
        let rhs = g.smul(&f).unwrap().sintegrate().unwrap() * sign;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn conjugation_reverses_graded_products(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (d, n) = (1 + s.index(2), s.index(4));
        let pf = s.index(2) as u8;
        let pg = s.index(2) as u8;
        let f = s.superfunction(d, n, &FunctionClass::ALL, Some(pf));
        let g = s.superfunction(d, n, &FunctionClass::ALL, Some(pg));
        let sign = if f.parity() == Some(1) && g.parity() == Some(1) { -1.0 } else { 1.0 };
        let lhs = f.smul(&g).unwrap().sconj();
        let rhs = g.sconj().smul(&f.sconj()).unwrap().scale(Complex64::new(sign, 0.0));
        prop_assert!(lhs.deviation(&rhs) <= 1e-14);
    }
}
