//! Seeded random inputs for invariant checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exppoly::ExpPoly;
use crate::grassmann::{AuxNumber, AuxOddRing, IndexSet};
use crate::poly::Poly;
use crate::superfun::Superfunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionClass {
    Constant,
    Polynomial,
    PlaneWave,
    Gaussian,
}

impl FunctionClass {
    pub const ALL: [FunctionClass; 4] = [Self::Constant, Self::Polynomial, Self::PlaneWave, Self::Gaussian];
    /// Classes on which the series oracle terminates or sums in closed form.
    pub const ORACLE: [FunctionClass; 3] = [Self::Constant, Self::Polynomial, Self::PlaneWave];
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.gen_range(0..upper)
    }

    pub fn complex(&mut self, scale: f64) -> Complex64 {
        Complex64::new(self.uniform(-scale, scale), self.uniform(-scale, scale))
    }

    pub fn real_vec(&mut self, d: usize, scale: f64) -> Vec<f64> {
        (0..d).map(|_| self.uniform(-scale, scale)).collect()
    }

    /// Random polynomial of total degree ≤ `deg`.
    pub fn poly(&mut self, d: usize, deg: u16) -> Poly {
        let mut p = Poly::constant(d, self.complex(1.0));
        for _ in 0..2 {
            let mut alpha = vec![0u16; d];
            let mut budget = self.rng.gen_range(1..=deg.max(1));
            while budget > 0 && d > 0 {
                alpha[self.index(d)] += 1;
                budget -= 1;
            }
            p.add_term(alpha, self.complex(1.0));
        }
        p
    }

    pub fn exppoly(&mut self, d: usize, class: FunctionClass) -> ExpPoly {
        let zeros = vec![Complex64::new(0.0, 0.0); d];
        match class {
            FunctionClass::Constant => ExpPoly::constant(d, self.complex(1.0)),
            FunctionClass::Polynomial => {
                ExpPoly::from_parts(&DMatrix::zeros(d, d), &zeros, self.poly(d, 2)).expect("consistent dimensions")
            }
            FunctionClass::PlaneWave => {
                let k: Vec<Complex64> = (0..d).map(|_| Complex64::new(0.0, self.uniform(-1.0, 1.0))).collect();
                ExpPoly::from_parts(&DMatrix::zeros(d, d), &k, self.poly(d, 1)).expect("consistent dimensions")
            }
            FunctionClass::Gaussian => {
                let mut a = DMatrix::from_fn(d, d, |_, _| Complex64::new(0.0, 0.0));
                for i in 0..d {
                    a[(i, i)] = Complex64::new(-self.uniform(0.4, 1.2), self.uniform(-0.3, 0.3));
                    for j in 0..i {
                        let v = Complex64::new(self.uniform(-0.1, 0.1), 0.0);
                        a[(i, j)] = v;
                        a[(j, i)] = v;
                    }
                }
                let b: Vec<Complex64> = (0..d).map(|_| self.complex(0.5)).collect();
                ExpPoly::from_parts(&a, &b, self.poly(d, 1)).expect("consistent dimensions")
            }
        }
    }

    /// One or two components `f_I ξ^I`; `parity` restricts `|I| mod 2`.
    pub fn superfunction(&mut self, d: usize, n: usize, classes: &[FunctionClass], parity: Option<u8>) -> Superfunction {
        let mut out = Superfunction::zero(d, n);
        let count = 1 + self.index(2);
        for _ in 0..count {
            let set = self.index_set(n, parity);
            let class = classes[self.index(classes.len())];
            let f = self.exppoly(d, class);
            out = out.add(&Superfunction::component(set, f)).expect("same dimensions");
        }
        out
    }

    pub fn index_set(&mut self, n: usize, parity: Option<u8>) -> IndexSet {
        loop {
            let bits = self.rng.gen_range(0..(1u64 << n));
            let set = IndexSet::from_bits(n, bits).expect("bits below n");
            if parity.is_none_or(|p| set.len() % 2 == p as usize) {
                return set;
            }
            if n == 0 {
                return set;
            }
        }
    }

    pub fn odd_aux(&mut self, ring: &AuxOddRing) -> AuxNumber {
        let coeffs: Vec<Complex64> = (0..ring.generators).map(|_| self.complex(1.0)).collect();
        ring.odd(&coeffs)
    }
}
