//! Sparse multivariate polynomials with complex coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64;

pub type Exponent = Vec<u16>;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, Complex64>,
}

/// Affine form `Σ_j coeffs[j] X_j + constant` used for substitutions.
#[derive(Clone, Debug)]
pub struct Affine {
    pub coeffs: Vec<Complex64>,
    pub constant: Complex64,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn monomial(nvars: usize, exps: Exponent, c: Complex64) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        p.add_term(exps, c);
        p
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, Complex64::new(1.0, 0.0))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, exps: Exponent, c: Complex64) {
        if c.re == 0.0 && c.im == 0.0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                let v = o.get();
                if v.re == 0.0 && v.im == 0.0 {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Complex64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().map(|&k| k as usize).sum()).max().unwrap_or(0)
    }

    pub fn add_assign(&mut self, other: &Poly) {
        debug_assert_eq!(self.nvars, other.nvars);
        for (e, c) in &other.terms {
            self.add_term(e.clone(), *c);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn conj(&self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c.conj())).collect() }
    }

    pub fn derive(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * f64::from(e[i]));
        }
        out
    }

    pub fn evaluate(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(x).fold(*c, |acc, (&k, xi)| acc * xi.powu(k as u32)))
            .sum()
    }

    /// Substitute `x_i ↦ forms[i]`, producing a polynomial in `new_nvars`.
    pub fn substitute(&self, forms: &[Affine], new_nvars: usize) -> Poly {
        assert_eq!(forms.len(), self.nvars);
        let form_polys: Vec<Poly> = forms
            .iter()
            .map(|f| {
                let mut p = Poly::constant(new_nvars, f.constant);
                for (j, c) in f.coeffs.iter().enumerate() {
                    if c.re != 0.0 || c.im != 0.0 {
                        p.add_assign(&Poly::variable(new_nvars, j).scale(*c));
                    }
                }
                p
            })
            .collect();
        let mut powers: Vec<Vec<Poly>> = form_polys.iter().map(|p| vec![Poly::constant(new_nvars, Complex64::new(1.0, 0.0)), p.clone()]).collect();
        let mut out = Poly::zero(new_nvars);
        for (e, c) in &self.terms {
            let mut acc = Poly::constant(new_nvars, *c);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&form_polys[i]);
                    powers[i].push(next);
                }
                acc = acc.mul(&powers[i][k as usize]);
            }
            out.add_assign(&acc);
        }
        out
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}
