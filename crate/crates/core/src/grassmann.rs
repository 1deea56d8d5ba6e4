//! Exterior-algebra index calculus.
//!
//! Every Grassmann generator lives at a fixed bit position of a `u64`
//! monomial key. The global ordering of generators is the bit order, so a
//! single reordering sign covers ambient generators, scratch integration
//! variables and auxiliary odd parameters alike:
//!
//! * bits `0..16`: ambient odd coordinates `ξ¹..ξⁿ` (index `i` at bit `i-1`);
//! * bits `16..32`: scratch generators used transiently by integrations;
//! * bits `32..64`: auxiliary odd parameters (functor-of-points evaluation).
//!
//! Mixing ambient and auxiliary generators in one monomial key gives the
//! Koszul sign of total parity for free.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mono = u64;

pub const AMBIENT_LIMIT: u32 = 16;
pub const SCRATCH_BASE: u32 = 16;
pub const AUX_BASE: u32 = 32;
pub const AUX_LIMIT: u32 = 32;

const AMBIENT_MASK: u64 = (1 << AMBIENT_LIMIT) - 1;
const AUX_MASK: u64 = !((1u64 << AUX_BASE) - 1);

/// Sign of concatenating the generator lists of `a` and `b`, each in
/// increasing order, and sorting the result. Zero when they overlap.
#[inline]
pub fn reorder_sign(a: Mono, b: Mono) -> i8 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> j).count_ones();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[inline]
pub fn mono_parity(m: Mono) -> u8 {
    (m.count_ones() % 2) as u8
}

#[inline]
pub fn ambient_part(m: Mono) -> Mono {
    m & AMBIENT_MASK
}

#[inline]
pub fn aux_part(m: Mono) -> Mono {
    m & AUX_MASK
}

/// Canonically ordered subset of `{1..n}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet {
    bits: u64,
    n: u8,
}

impl IndexSet {
    pub fn new(n: usize, elements: &[usize]) -> Result<Self> {
        if n > AMBIENT_LIMIT as usize {
            return Err(Error::Dimension(format!("odd dimension {n} exceeds {AMBIENT_LIMIT}")));
        }
        let mut bits = 0u64;
        for &e in elements {
            if e == 0 || e > n {
                return Err(Error::Dimension(format!("index {e} outside 1..={n}")));
            }
            bits |= 1 << (e - 1);
        }
        Ok(Self { bits, n: n as u8 })
    }

    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        if n > AMBIENT_LIMIT as usize || bits >> n != 0 {
            return Err(Error::Dimension(format!("bits {bits:#b} outside ambient dimension {n}")));
        }
        Ok(Self { bits, n: n as u8 })
    }

    pub fn empty(n: usize) -> Self {
        Self { bits: 0, n: n as u8 }
    }

    pub fn full(n: usize) -> Self {
        Self { bits: (1u64 << n) - 1, n: n as u8 }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= 1 && i <= self.dim() && self.bits >> (i - 1) & 1 == 1
    }

    /// Elements in increasing order, 1-based.
    pub fn elements(&self) -> Vec<usize> {
        (0..self.n as usize).filter(|i| self.bits >> i & 1 == 1).map(|i| i + 1).collect()
    }

    pub fn complement(&self) -> Self {
        Self { bits: !self.bits & ((1u64 << self.n) - 1), n: self.n }
    }

    /// All `2^n` subsets in bit order.
    pub fn all(n: usize) -> impl Iterator<Item = IndexSet> {
        (0..1u64 << n).map(move |bits| IndexSet { bits, n: n as u8 })
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.elements())
    }
}

/// The sign function `ε(I, J)`.
pub fn eps(i: IndexSet, j: IndexSet) -> Result<i8> {
    if i.n != j.n {
        return Err(Error::Dimension(format!("ε over ambient {} and {}", i.n, j.n)));
    }
    Ok(reorder_sign(i.bits, j.bits))
}

/// Ring of coefficients sitting in front of Grassmann monomials. All
/// coefficient rings here are even and commutative.
pub trait Coefficient: Clone + fmt::Debug {
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, s: Complex64) -> Self;
    fn conj(&self) -> Self;
}

impl Coefficient for Complex64 {
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, s: Complex64) -> Self {
        self * s
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
}

/// Finite sum `Σ c_M θ^M` over generator monomials, in normal form: no
/// stored zero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Grassmann<C> {
    terms: BTreeMap<Mono, C>,
}

pub type GrassmannElement<C> = Grassmann<C>;

/// Numbers valued in the auxiliary odd parameter ring (complex coefficients).
pub type AuxNumber = Grassmann<Complex64>;

impl<C: Coefficient> Default for Grassmann<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient> Grassmann<C> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn monomial(mono: Mono, c: C) -> Self {
        let mut g = Self::zero();
        g.add_term(mono, c);
        g
    }

    pub fn scalar(c: C) -> Self {
        Self::monomial(0, c)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Mono, C)>) -> Self {
        let mut g = Self::zero();
        for (m, c) in terms {
            g.add_term(m, c);
        }
        g
    }

    pub fn add_term(&mut self, mono: Mono, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(existing) => {
                existing.add_assign(&c);
                if existing.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mono, &C)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn support_keys(&self) -> impl Iterator<Item = Mono> + '_ {
        self.terms.keys().copied()
    }

    pub fn get(&self, mono: Mono) -> Option<&C> {
        self.terms.get(&mono)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Union of all generators that occur.
    pub fn support(&self) -> Mono {
        self.terms.keys().fold(0, |acc, m| acc | m)
    }

    /// `Some(parity)` when every monomial shares one parity, `None` when mixed.
    /// The zero element is reported as even.
    pub fn parity(&self) -> Option<u8> {
        let mut parities = self.terms.keys().map(|&m| mono_parity(m));
        match parities.next() {
            None => Some(0),
            Some(p) => parities.all(|q| q == p).then_some(p),
        }
    }

    /// Split into (even, odd) components.
    pub fn split_parity(&self) -> (Self, Self) {
        let mut even = Self::zero();
        let mut odd = Self::zero();
        for (&m, c) in &self.terms {
            if mono_parity(m) == 0 {
                even.terms.insert(m, c.clone());
            } else {
                odd.terms.insert(m, c.clone());
            }
        }
        (even, odd)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(&m, c)| (m, c.scale(s))))
    }

    /// Graded product: `θ^M θ^N = ±θ^{M∪N}` with the reordering sign.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&m1, c1) in &self.terms {
            for (&m2, c2) in &other.terms {
                let s = reorder_sign(m1, m2);
                if s == 0 {
                    continue;
                }
                let c = c1.mul(c2);
                out.add_term(m1 | m2, if s < 0 { c.scale(Complex64::new(-1.0, 0.0)) } else { c });
            }
        }
        out
    }

    /// Product with a numeric Grassmann element placed on the left.
    pub fn left_mul_numeric(&self, left: &AuxNumber) -> Self {
        let mut out = Self::zero();
        for (&m1, c1) in &left.terms {
            for (&m2, c2) in &self.terms {
                let s = reorder_sign(m1, m2);
                if s != 0 {
                    out.add_term(m1 | m2, c2.scale(c1 * f64::from(s)));
                }
            }
        }
        out
    }

    /// Product with a numeric Grassmann element placed on the right.
    pub fn right_mul_numeric(&self, right: &AuxNumber) -> Self {
        let mut out = Self::zero();
        for (&m1, c1) in &self.terms {
            for (&m2, c2) in &right.terms {
                let s = reorder_sign(m1, m2);
                if s != 0 {
                    out.add_term(m1 | m2, c1.scale(c2 * f64::from(s)));
                }
            }
        }
        out
    }

    /// Coefficient-wise complex conjugation; generators are real.
    pub fn conj(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&m, c)| (m, c.conj())))
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Grassmann<D> {
        Grassmann::from_terms(self.terms.iter().map(|(&m, c)| (m, f(c))))
    }

    pub fn try_map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> Result<D>) -> Result<Grassmann<D>> {
        let mut out = Grassmann::zero();
        for (&m, c) in &self.terms {
            out.add_term(m, f(c)?);
        }
        Ok(out)
    }

    /// Coefficient of the top ambient monomial `ξ^{1..n}` among aux-free terms.
    pub fn top_coefficient(&self, n: usize) -> Option<&C> {
        self.terms.get(&((1u64 << n) - 1))
    }

    /// Berezin integral over the listed generators: the coefficient obtained
    /// after writing each monomial as `θ_{g1} θ_{g2} ⋯ θ_{gk} · rest`.
    /// Monomials missing any listed generator integrate to zero.
    pub fn berezin(&self, measure: &[u32]) -> Self {
        let mask: Mono = measure.iter().fold(0, |acc, g| acc | 1 << g);
        let mut out = Self::zero();
        for (&m, c) in &self.terms {
            if m & mask != mask {
                continue;
            }
            let rest = m & !mask;
            // sign of θ^mask(sorted)·rest relative to m
            let mut sign = reorder_sign(mask, rest);
            // sign of the listed order relative to the sorted order
            sign *= permutation_sign(measure);
            out.add_term(rest, if sign < 0 { c.scale(Complex64::new(-1.0, 0.0)) } else { c.clone() });
        }
        out
    }

    /// Left derivative `∂/∂θ_g`: move `θ_g` to the front, then drop it.
    pub fn left_derivative(&self, g: u32) -> Self {
        let bit = 1u64 << g;
        let mut out = Self::zero();
        for (&m, c) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let below = (m & (bit - 1)).count_ones();
            let c = if below % 2 == 1 { c.scale(Complex64::new(-1.0, 0.0)) } else { c.clone() };
            out.add_term(m & !bit, c);
        }
        out
    }

    /// Algebra homomorphism fixing coefficients and sending generator `g`
    /// to `image(g)`; generators mapped to `None` are left in place.
    pub fn substitute(&self, image: impl Fn(u32) -> Option<AuxNumber>) -> Self {
        let mut cache: BTreeMap<u32, AuxNumber> = BTreeMap::new();
        let mut out = Self::zero();
        for (&m, c) in &self.terms {
            let mut acc = AuxNumber::scalar(Complex64::new(1.0, 0.0));
            let mut rest = m;
            while rest != 0 {
                let g = rest.trailing_zeros();
                rest &= rest - 1;
                let img = cache
                    .entry(g)
                    .or_insert_with(|| image(g).unwrap_or_else(|| AuxNumber::monomial(1 << g, Complex64::new(1.0, 0.0))));
                acc = acc.mul(img);
                if acc.is_zero() {
                    break;
                }
            }
            for (m2, s) in acc.terms() {
                out.add_term(m2, c.scale(*s));
            }
        }
        out
    }

    /// Hodge-type complement on the ambient part: `ξ^I ↦ ε(I, ∁I) ξ^{∁I}`;
    /// auxiliary generators ride along on the right.
    pub fn hodge(&self, n: usize) -> Self {
        let full = (1u64 << n) - 1;
        let mut out = Self::zero();
        for (&m, c) in &self.terms {
            let amb = m & full;
            let comp = !amb & full;
            let s = reorder_sign(amb, comp);
            let new = comp | (m & !full);
            // aux part stays to the right of the ambient block
            out.add_term(new, if s < 0 { c.scale(Complex64::new(-1.0, 0.0)) } else { c.clone() });
        }
        out
    }
}

/// Sign of the permutation sorting `list` into increasing order.
fn permutation_sign(list: &[u32]) -> i8 {
    let mut inversions = 0;
    for i in 0..list.len() {
        for j in i + 1..list.len() {
            if list[i] > list[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

impl AuxNumber {
    pub fn one() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::scalar(c)
    }

    pub fn generator(bit: u32) -> Self {
        Self::monomial(1 << bit, Complex64::new(1.0, 0.0))
    }

    pub fn body(&self) -> Complex64 {
        self.get(0).copied().unwrap_or_default()
    }

    /// Exponential of an even element: `e^{body} Σ_k soul^k / k!`, finite
    /// because the soul is nilpotent.
    pub fn exp(&self) -> Result<Self> {
        if self.parity() != Some(0) {
            return Err(Error::Parity("exponential of a non-even Grassmann element".into()));
        }
        let body = self.body();
        let mut soul = self.clone();
        soul.terms.remove(&0);
        let mut out = Self::one();
        let mut power = Self::one();
        let mut k = 1.0;
        loop {
            power = power.mul(&soul).scale(Complex64::new(1.0 / k, 0.0));
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
            k += 1.0;
        }
        Ok(out.scale(body.exp()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let diff = self.sub(other);
        diff.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    /// True when every generator involved is auxiliary.
    pub fn is_pure_aux(&self) -> bool {
        self.support() & !AUX_MASK == 0
    }
}

/// The auxiliary odd parameter ring with `generators` generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuxOddRing {
    pub generators: usize,
}

impl AuxOddRing {
    pub fn new(generators: usize) -> Result<Self> {
        if generators > AUX_LIMIT as usize {
            return Err(Error::Dimension(format!("at most {AUX_LIMIT} auxiliary generators")));
        }
        Ok(Self { generators })
    }

    pub fn generator(&self, k: usize) -> AuxNumber {
        assert!(k < self.generators, "auxiliary generator {k} out of range");
        AuxNumber::generator(AUX_BASE + k as u32)
    }

    /// Odd element `Σ_k c_k η_k` of pure auxiliary degree one.
    pub fn odd(&self, coefficients: &[Complex64]) -> AuxNumber {
        AuxNumber::from_terms(
            coefficients
                .iter()
                .enumerate()
                .take(self.generators)
                .map(|(k, c)| (1u64 << (AUX_BASE + k as u32), *c)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn set(n: usize, e: &[usize]) -> IndexSet {
        IndexSet::new(n, e).unwrap()
    }

    #[test]
    fn eps_examples() {
        assert_eq!(eps(set(3, &[1]), set(3, &[2])).unwrap(), 1);
        assert_eq!(eps(set(3, &[2]), set(3, &[1])).unwrap(), -1);
        assert_eq!(eps(set(3, &[1]), set(3, &[1])).unwrap(), 0);
        assert_eq!(eps(set(3, &[1, 3]), set(3, &[2])).unwrap(), -1);
        assert!(matches!(eps(set(2, &[1]), set(3, &[2])), Err(Error::Dimension(_))));
    }

    #[test]
    fn eps_matches_transposition_count() {
        // independent check: bubble sort the concatenated list
        for n in 0..=5 {
            for i in IndexSet::all(n) {
                for j in IndexSet::all(n) {
                    let e = eps(i, j).unwrap();
                    if i.bits() & j.bits() != 0 {
                        assert_eq!(e, 0);
                        continue;
                    }
                    let mut list: Vec<usize> = i.elements().into_iter().chain(j.elements()).collect();
                    let mut swaps = 0;
                    for a in 0..list.len() {
                        for b in 0..list.len() - 1 - a {
                            if list[b] > list[b + 1] {
                                list.swap(b, b + 1);
                                swaps += 1;
                            }
                        }
                    }
                    assert_eq!(e, if swaps % 2 == 0 { 1 } else { -1 });
                }
            }
        }
    }

    #[test]
    fn wedge_examples() {
        let x1 = Grassmann::monomial(0b01, c(1.0));
        let x2 = Grassmann::monomial(0b10, c(1.0));
        assert_eq!(x1.mul(&x2).get(0b11), Some(&c(1.0)));
        assert_eq!(x2.mul(&x1).get(0b11), Some(&c(-1.0)));
        let a = Grassmann::monomial(0b01, c(2.0));
        let b = Grassmann::monomial(0b01, c(3.0));
        assert!(a.mul(&b).is_zero());
    }

    #[test]
    fn top_coefficient_examples() {
        let a = Grassmann::monomial(0b11, c(5.0));
        assert_eq!(a.top_coefficient(2), Some(&c(5.0)));
        let b = Grassmann::monomial(0b01, c(3.0));
        assert_eq!(b.top_coefficient(2), None);
        let sum = a.add(&b).add(&Grassmann::monomial(0b11, c(1.0)));
        assert_eq!(sum.top_coefficient(2), Some(&c(6.0)));
    }

    #[test]
    fn hodge_examples() {
        // n = 1: a + bξ ↦ b + aξ
        let f = Grassmann::from_terms([(0, c(2.0)), (1, c(7.0))]);
        let h = f.hodge(1);
        assert_eq!(h.get(0), Some(&c(7.0)));
        assert_eq!(h.get(1), Some(&c(2.0)));
        // n = 2: ξ¹ ↦ ξ²
        let g = Grassmann::monomial(0b01, c(1.0)).hodge(2);
        assert_eq!(g.get(0b10), Some(&c(1.0)));
        // n = 1: hodge∘hodge(ξ) = ξ
        let x = Grassmann::monomial(1, c(1.0));
        assert_eq!(x.hodge(1).hodge(1).get(1), Some(&c(1.0)));
    }

    #[test]
    fn hodge_square_sign_law() {
        for n in 0..=5usize {
            for i in IndexSet::all(n) {
                let x = Grassmann::monomial(i.bits(), c(1.0));
                let twice = x.hodge(n).hodge(n);
                let expected = if ((n + 1) * i.len()) % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(twice.get(i.bits()), Some(&c(expected)), "n={n} I={i:?}");
            }
        }
    }

    #[test]
    fn berezin_orientation() {
        // ∫dθ₁dθ₂ θ₁θ₂ = 1 and ∫dθ₂dθ₁ θ₁θ₂ = -1
        let f = Grassmann::monomial(0b11, c(1.0));
        assert_eq!(f.berezin(&[0, 1]).get(0), Some(&c(1.0)));
        assert_eq!(f.berezin(&[1, 0]).get(0), Some(&c(-1.0)));
        // rest stays to the right
        let g = Grassmann::monomial(0b111, c(1.0));
        assert_eq!(g.berezin(&[1]).get(0b101), Some(&c(-1.0)));
    }

    #[test]
    fn left_derivative_signs() {
        let f = Grassmann::monomial(0b11, c(1.0));
        assert_eq!(f.left_derivative(0).get(0b10), Some(&c(1.0)));
        assert_eq!(f.left_derivative(1).get(0b01), Some(&c(-1.0)));
    }

    #[test]
    fn substitution_is_homomorphism() {
        let eta = AuxNumber::generator(AUX_BASE);
        // ξ ↦ ξ + η on ξ¹ξ²
        let f = Grassmann::monomial(0b11, c(1.0));
        let shifted = f.substitute(|g| (g == 0).then(|| AuxNumber::generator(0).add(&eta)));
        // (ξ¹+η)ξ² = ξ¹ξ² + ηξ² = ξ¹ξ² - ξ²η
        assert_eq!(shifted.get(0b11), Some(&c(1.0)));
        assert_eq!(shifted.get(0b10 | 1 << AUX_BASE), Some(&c(-1.0)));
    }

    #[test]
    fn exp_of_nilpotent() {
        let a = AuxNumber::generator(AUX_BASE).mul(&AuxNumber::generator(AUX_BASE + 1));
        let e = a.exp().unwrap();
        assert_eq!(e.get(0), Some(&c(1.0)));
        assert_eq!(e.len(), 2);
        assert!(AuxNumber::generator(AUX_BASE).exp().is_err());
    }

    #[test]
    fn aux_odd_square_vanishes() {
        let ring = AuxOddRing::new(3).unwrap();
        let x = ring.odd(&[c(1.0), c(2.0), c(-0.5)]);
        assert!(x.mul(&x).is_zero());
        assert_eq!(x.parity(), Some(1));
    }
}
