//! Superfunctions `Σ_I f_I(x) ξ^I` on `ℝ^{m|n}`, optionally carrying
//! auxiliary odd parameters in their coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exppoly::{ExpPoly, ExpPolyJson};
use crate::grassmann::{ambient_part, aux_part, AuxNumber, Grassmann, IndexSet, Mono, AMBIENT_LIMIT, AUX_BASE, AUX_LIMIT};

#[derive(Clone, Debug, PartialEq)]
pub struct Superfunction {
    m: usize,
    n: usize,
    body: Grassmann<ExpPoly>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperTermJson {
    #[serde(rename = "I")]
    pub i: Vec<usize>,
    pub f: ExpPolyJson,
    pub aux: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperfunctionJson {
    pub m: usize,
    pub n: usize,
    pub terms: Vec<SuperTermJson>,
}

fn bits_to_list(bits: u64, offset: u32) -> Vec<usize> {
    (0..64).filter(|b| bits >> b & 1 == 1).map(|b| (b - offset) as usize + 1).collect()
}

impl Superfunction {
    pub fn zero(m: usize, n: usize) -> Self {
        assert!(n <= AMBIENT_LIMIT as usize, "at most {AMBIENT_LIMIT} odd coordinates");
        Self { m, n, body: Grassmann::zero() }
    }

    /// Build from raw monomial keys; ambient bits must lie below `n`.
    pub fn from_body(m: usize, n: usize, body: Grassmann<ExpPoly>) -> Result<Self> {
        let allowed = (1u64 << n) - 1;
        for (mono, f) in body.terms() {
            if mono & !allowed & !aux_part(mono) != 0 {
                return Err(Error::Dimension(format!("monomial {mono:#x} outside ℝ^{{{m}|{n}}}")));
            }
            if f.dim() != m {
                return Err(Error::Dimension(format!("coefficient of dimension {} on ℝ^{m}", f.dim())));
            }
        }
        Ok(Self { m, n, body })
    }

    /// `f · ξ^I`.
    pub fn component(set: IndexSet, f: ExpPoly) -> Self {
        let n = set.dim();
        let m = f.dim();
        let mut out = Self::zero(m, n);
        out.body.add_term(set.bits(), f);
        out
    }

    pub fn even(n: usize, f: ExpPoly) -> Self {
        Self::component(IndexSet::empty(n), f)
    }

    pub fn constant(m: usize, n: usize, c: Complex64) -> Self {
        Self::even(n, ExpPoly::constant(m, c))
    }

    pub fn one(m: usize, n: usize) -> Self {
        Self::constant(m, n, Complex64::new(1.0, 0.0))
    }

    /// The even coordinate `x_{i}` (0-based axis).
    pub fn even_coordinate(m: usize, n: usize, axis: usize) -> Self {
        Self::even(n, ExpPoly::coordinate(m, axis))
    }

    /// The odd coordinate `ξ^i` (1-based as in `IndexSet`).
    pub fn odd_coordinate(m: usize, n: usize, i: usize) -> Result<Self> {
        let set = IndexSet::new(n, &[i])?;
        Ok(Self::component(set, ExpPoly::constant(m, Complex64::new(1.0, 0.0))))
    }

    /// Multiply by a numeric Grassmann element (ambient or auxiliary) on the left.
    pub fn left_mul_numeric(&self, a: &AuxNumber) -> Self {
        Self { m: self.m, n: self.n, body: self.body.left_mul_numeric(a) }
    }

    pub fn right_mul_numeric(&self, a: &AuxNumber) -> Self {
        Self { m: self.m, n: self.n, body: self.body.right_mul_numeric(a) }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn body(&self) -> &Grassmann<ExpPoly> {
        &self.body
    }

    pub fn into_body(self) -> Grassmann<ExpPoly> {
        self.body
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    /// Total parity, auxiliary generators included; `None` when mixed.
    pub fn parity(&self) -> Option<u8> {
        self.body.parity()
    }

    pub fn has_aux(&self) -> bool {
        self.body.terms().any(|(m, _)| aux_part(m) != 0)
    }

    /// Coefficient of `ξ^I` with no auxiliary factor.
    pub fn coefficient(&self, set: IndexSet) -> Option<&ExpPoly> {
        self.body.get(set.bits())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.m != other.m || self.n != other.n {
            return Err(Error::Dimension(format!(
                "ℝ^{{{}|{}}} vs ℝ^{{{}|{}}}",
                self.m, self.n, other.m, other.n
            )));
        }
        Ok(())
    }

    fn with_body(&self, body: Grassmann<ExpPoly>) -> Self {
        Self { m: self.m, n: self.n, body }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_body(self.body.add(&other.body)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_body(self.body.sub(&other.body)))
    }

    pub fn neg(&self) -> Self {
        self.with_body(self.body.neg())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.with_body(self.body.scale(s))
    }

    /// Pointwise graded-commutative product.
    pub fn smul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_body(self.body.mul(&other.body)))
    }

    /// Coefficient-wise complex conjugation.
    pub fn sconj(&self) -> Self {
        self.with_body(self.body.conj())
    }

    /// `∫ dx dξ f`, for superfunctions without auxiliary parameters.
    pub fn sintegrate(&self) -> Result<Complex64> {
        if self.has_aux() {
            return Err(Error::Class("auxiliary parameters present; use sintegrate_aux".into()));
        }
        match self.body.top_coefficient(self.n) {
            Some(f) => f.integrate(),
            None => Ok(Complex64::new(0.0, 0.0)),
        }
    }

    /// `∫ dx dξ f` with values in the auxiliary ring. The odd measure sits
    /// to the left of the auxiliary generators.
    pub fn sintegrate_aux(&self) -> Result<AuxNumber> {
        let measure: Vec<u32> = (0..self.n as u32).collect();
        let reduced = self.body.berezin(&measure);
        let mut out = AuxNumber::zero();
        for (mono, f) in reduced.terms() {
            if ambient_part(mono) != 0 {
                continue;
            }
            out.add_term(mono, f.integrate()?);
        }
        Ok(out)
    }

    /// Apply a map to every coefficient function.
    pub fn map_even(&self, m_new: usize, f: impl Fn(&ExpPoly) -> Result<ExpPoly>) -> Result<Self> {
        Ok(Self { m: m_new, n: self.n, body: self.body.try_map_coeffs(f)? })
    }

    /// `f(x + a, ξ)` for a complex even shift.
    pub fn translate_even(&self, shift: &[Complex64]) -> Result<Self> {
        if shift.len() != self.m {
            return Err(Error::Dimension(format!("shift of length {} on ℝ^{}", shift.len(), self.m)));
        }
        self.map_even(self.m, |f| f.translate(shift))
    }

    pub fn translate_even_real(&self, shift: &[f64]) -> Result<Self> {
        let s: Vec<Complex64> = shift.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.translate_even(&s)
    }

    /// `f(x, ξ + η)` for odd auxiliary shifts, one per odd coordinate.
    pub fn grassmann_translate(&self, eta: &[AuxNumber]) -> Result<Self> {
        if eta.len() != self.n {
            return Err(Error::Dimension(format!("{} odd shifts for n = {}", eta.len(), self.n)));
        }
        for (k, e) in eta.iter().enumerate() {
            if !(e.is_zero() || e.parity() == Some(1)) {
                return Err(Error::Parity(format!("shift of ξ^{} is not odd", k + 1)));
            }
        }
        let n = self.n as u32;
        let body = self.body.substitute(|g| {
            (g < n).then(|| AuxNumber::generator(g).add(&eta[g as usize]))
        });
        Ok(self.with_body(body))
    }

    /// `∂/∂x_axis`.
    pub fn derive_even(&self, axis: usize) -> Result<Self> {
        self.map_even(self.m, |f| f.derive(axis))
    }

    /// Left derivative `∂/∂ξ^i`, 1-based.
    pub fn derive_odd(&self, i: usize) -> Result<Self> {
        if i == 0 || i > self.n {
            return Err(Error::Dimension(format!("odd index {i} outside 1..{}", self.n)));
        }
        Ok(self.with_body(self.body.left_derivative(i as u32 - 1)))
    }

    /// Value at an even point, as a numeric Grassmann element.
    pub fn evaluate(&self, x: &[f64]) -> AuxNumber {
        let mut out = AuxNumber::zero();
        for (mono, f) in self.body.terms() {
            out.add_term(mono, f.evaluate(x));
        }
        out
    }

    /// Largest relative coefficient deviation on the deterministic sample grid.
    pub fn deviation(&self, other: &Self) -> f64 {
        if self.m != other.m || self.n != other.n {
            return f64::INFINITY;
        }
        let zero = ExpPoly::zero(self.m);
        let keys = self.body.support_keys().chain(other.body.support_keys());
        let mut worst: f64 = 0.0;
        for k in keys {
            let a = self.body.get(k).unwrap_or(&zero);
            let b = other.body.get(k).unwrap_or(&zero);
            worst = worst.max(a.relative_deviation(b));
        }
        worst
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.deviation(other) <= tol
    }

    pub fn to_json(&self) -> SuperfunctionJson {
        let terms = self
            .body
            .terms()
            .map(|(mono, f)| SuperTermJson {
                i: bits_to_list(ambient_part(mono), 0),
                f: f.to_json(),
                aux: bits_to_list(aux_part(mono), AUX_BASE),
            })
            .collect();
        SuperfunctionJson { m: self.m, n: self.n, terms }
    }

    pub fn from_json(json: &SuperfunctionJson) -> Result<Self> {
        let mut out = Self::zero(json.m, json.n);
        for t in &json.terms {
            let set = IndexSet::new(json.n, &t.i)?;
            let mut aux: Mono = 0;
            for &k in &t.aux {
                if k == 0 || k > AUX_LIMIT as usize {
                    return Err(Error::Dimension(format!("auxiliary generator {k} out of range")));
                }
                aux |= 1 << (AUX_BASE + k as u32 - 1);
            }
            let f = ExpPoly::from_json(&t.f)?;
            if f.dim() != json.m {
                return Err(Error::Dimension(format!("coefficient of dimension {} on ℝ^{}", f.dim(), json.m)));
            }
            // listed order: ξ^I then aux, which is already the bit order
            out.body.add_term(set.bits() | aux, f);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::AuxOddRing;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn xi(m: usize, n: usize, i: usize) -> Superfunction {
        Superfunction::odd_coordinate(m, n, i).unwrap()
    }

    #[test]
    fn smul_examples() {
        let f = Superfunction::even(2, ExpPoly::gaussian(c(1.0), &[1.0]));
        let g = Superfunction::even(2, ExpPoly::coordinate(1, 0));
        let a = f.smul(&xi(1, 2, 1)).unwrap();
        let b = g.smul(&xi(1, 2, 2)).unwrap();
        let ab = a.smul(&b).unwrap();
        let expected = Superfunction::component(IndexSet::full(2), ExpPoly::gaussian(c(1.0), &[1.0]).mul(&ExpPoly::coordinate(1, 0)));
        assert!(ab.approx_eq(&expected, 1e-15));
        assert!(a.smul(&a).unwrap().is_zero());
        let ba = b.smul(&a).unwrap();
        assert!(ab.approx_eq(&ba.neg(), 1e-15));
    }

    #[test]
    fn sintegrate_examples() {
        let f = Superfunction::component(IndexSet::full(2), ExpPoly::gaussian(c(1.0), &[1.0]));
        assert!((f.sintegrate().unwrap() - c(std::f64::consts::PI.sqrt())).norm() < 1e-14);
        let g = Superfunction::component(IndexSet::new(2, &[1]).unwrap(), ExpPoly::gaussian(c(1.0), &[1.0]));
        assert_eq!(g.sintegrate().unwrap(), c(0.0));
        let h = Superfunction::constant(0, 1, c(2.0)).add(&xi(0, 1, 1).scale(c(5.0))).unwrap();
        assert_eq!(h.sintegrate().unwrap(), c(5.0));
    }

    #[test]
    fn sconj_examples() {
        let f = xi(0, 1, 1).scale(Complex64::i());
        assert!(f.sconj().approx_eq(&xi(0, 1, 1).scale(-Complex64::i()), 0.0));
        let g = Superfunction::even(1, ExpPoly::plane_wave(Complex64::new(1.0, 2.0), &[0.3]));
        assert!(g.sconj().sconj().approx_eq(&g, 0.0));
    }

    #[test]
    fn grassmann_translate_examples() {
        let ring = AuxOddRing::new(1).unwrap();
        let eta = ring.generator(0);
        let f = xi(0, 1, 1);
        let shifted = f.grassmann_translate(std::slice::from_ref(&eta)).unwrap();
        let expected = f.add(&Superfunction::constant(0, 1, c(1.0)).left_mul_numeric(&eta)).unwrap();
        assert!(shifted.approx_eq(&expected, 0.0));
        let g = Superfunction::constant(0, 1, c(2.0)).add(&f.scale(c(3.0))).unwrap();
        let back = g.grassmann_translate(std::slice::from_ref(&eta)).unwrap().grassmann_translate(&[eta.neg()]).unwrap();
        assert!(back.approx_eq(&g, 0.0));
    }

    #[test]
    fn grassmann_translate_rejects_even_shift() {
        let f = xi(0, 1, 1);
        let err = f.grassmann_translate(&[AuxNumber::constant(c(1.0))]).unwrap_err();
        assert!(matches!(err, Error::Parity(_)));
    }

    #[test]
    fn berezin_integral_is_shift_invariant_on_r02() {
        let ring = AuxOddRing::new(2).unwrap();
        let eta = [ring.odd(&[c(1.0), c(-2.0)]), ring.odd(&[c(0.5), c(3.0)])];
        for bits in 0..4u64 {
            let set = IndexSet::from_bits(2, bits).unwrap();
            let f = Superfunction::component(set, ExpPoly::constant(0, c(1.0)));
            let before = f.sintegrate_aux().unwrap();
            let after = f.grassmann_translate(&eta).unwrap().sintegrate_aux().unwrap();
            assert!(before.max_abs_diff(&after) < 1e-15, "I = {set:?}");
        }
    }

    #[test]
    fn json_round_trip_with_aux() {
        let ring = AuxOddRing::new(2).unwrap();
        let f = xi(1, 2, 2).left_mul_numeric(&ring.generator(1)).add(&Superfunction::even(2, ExpPoly::gaussian(c(2.0), &[1.0]))).unwrap();
        let text = serde_json::to_string(&f.to_json()).unwrap();
        let back = Superfunction::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert!(back.approx_eq(&f, 0.0));
    }
}
