//! Hilbert-superspace structures on superfunctions and finite graded bases.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::grassmann::{ambient_part, AuxNumber, Grassmann, IndexSet, Mono, SCRATCH_BASE};
use crate::superfun::Superfunction;

type CMat = DMatrix<Complex64>;

/// `⟨f, g⟩ = ∫ dx dξ f̄ g`.
pub fn inner_l2(f: &Superfunction, g: &Superfunction) -> Result<Complex64> {
    f.sconj().smul(g)?.sintegrate()
}

/// `⟨f, g⟩` with values in the auxiliary ring.
pub fn inner_l2_aux(f: &Superfunction, g: &Superfunction) -> Result<AuxNumber> {
    f.sconj().smul(g)?.sintegrate_aux()
}

/// Fundamental symmetry `J(Σ f_I ξ^I) = Σ ε(I, ∁I) f_I ξ^{∁I}`.
pub fn hodge(f: &Superfunction) -> Superfunction {
    Superfunction::from_body(f.m(), f.n(), f.body().hodge(f.n())).expect("hodge preserves the ambient range")
}

/// `(f, g)_J = ⟨f, J g⟩`.
pub fn scalar_j(f: &Superfunction, g: &Superfunction) -> Result<Complex64> {
    inner_l2(f, &hodge(g))
}

/// Gram matrix `G_ij = ⟨b_i, b_j⟩` of a finite family.
pub fn l2_gram(basis: &[Superfunction]) -> Result<CMat> {
    let k = basis.len();
    let mut g = CMat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = inner_l2(&basis[i], &basis[j])?;
        }
    }
    Ok(g)
}

/// Element of `L²(ℝ^{m|r}) ⊗ Hol(ℂ^{0|s})`: odd coordinates `ξ¹..ξʳ` then
/// `ζ¹..ζˢ` of a superfunction on `ℝ^{m|r+s}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockSuperfunction {
    r: usize,
    s: usize,
    body: Superfunction,
}

/// Scratch bit holding `ζ̄_k` during inner-product evaluation.
fn zeta_bar_bit(k: usize) -> u32 {
    SCRATCH_BASE + k as u32
}

impl FockSuperfunction {
    pub fn new(r: usize, s: usize, body: Superfunction) -> Result<Self> {
        if body.n() != r + s {
            return Err(Error::Dimension(format!("body has {} odd coordinates, expected {r} + {s}", body.n())));
        }
        if s > 8 {
            return Err(Error::Dimension("at most 8 holomorphic odd coordinates".into()));
        }
        Ok(Self { r, s, body })
    }

    pub fn zero(m: usize, r: usize, s: usize) -> Self {
        Self { r, s, body: Superfunction::zero(m, r + s) }
    }

    /// `f(q) ξ^I ζ^J`.
    pub fn component(r: usize, s: usize, xi: &[usize], zeta: &[usize], f: ExpPoly) -> Result<Self> {
        let mut idx: Vec<usize> = xi.to_vec();
        idx.extend(zeta.iter().map(|j| j + r));
        let set = IndexSet::new(r + s, &idx)?;
        Self::new(r, s, Superfunction::component(set, f))
    }

    pub fn m(&self) -> usize {
        self.body.m()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn body(&self) -> &Superfunction {
        &self.body
    }

    pub fn with_body(&self, body: Superfunction) -> Result<Self> {
        Self::new(self.r, self.s, body)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.with_body(self.body.add(&other.body)?)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { r: self.r, s: self.s, body: self.body.scale(c) }
    }

    pub fn parity(&self) -> Option<u8> {
        self.body.parity()
    }

    /// `φ̄` with `ζ` replaced by `ζ̄`, as a raw Grassmann element.
    fn conjugate_antiholomorphic(&self) -> Grassmann<ExpPoly> {
        let r = self.r as u32;
        let s = self.s as u32;
        self.body.sconj().body().substitute(|g| {
            (g >= r && g < r + s).then(|| AuxNumber::generator(zeta_bar_bit((g - r) as usize)))
        })
    }
}

/// Berezin measure order `dξ¹…dξʳ dζ̄¹dζ¹ … dζ̄ˢdζˢ`.
pub fn fock_measure(r: usize, s: usize) -> Vec<u32> {
    let mut measure: Vec<u32> = (0..r as u32).collect();
    for k in 0..s {
        measure.push(zeta_bar_bit(k));
        measure.push((r + k) as u32);
    }
    measure
}

/// `⟨φ, ψ⟩ = (2i)^s ∫ dq dξ dζ dζ̄ φ̄ ψ e^{(i/θ) ζ·ζ̄}`, auxiliary-ring valued.
pub fn inner_fock_aux(theta: f64, phi: &FockSuperfunction, psi: &FockSuperfunction) -> Result<AuxNumber> {
    if phi.r != psi.r || phi.s != psi.s || phi.m() != psi.m() {
        return Err(Error::Dimension("Fock vectors of different shapes".into()));
    }
    let (r, s) = (phi.r, phi.s);
    let mut weight = AuxNumber::one();
    for k in 0..s {
        let pair: Mono = 1 << (r + k) | 1 << zeta_bar_bit(k);
        // ζ_k ζ̄_k is stored in increasing bit order, ζ (ambient) first
        let term = AuxNumber::monomial(pair, Complex64::new(0.0, 1.0 / theta));
        weight = weight.mul(&AuxNumber::one().add(&term));
    }
    let integrand = phi.conjugate_antiholomorphic().mul(psi.body.body()).right_mul_numeric(&weight);
    let reduced = integrand.berezin(&fock_measure(r, s));
    let pref = Complex64::new(0.0, 2.0).powu(s as u32);
    let mut out = AuxNumber::zero();
    for (mono, f) in reduced.terms() {
        if ambient_part(mono) != 0 {
            continue;
        }
        out.add_term(mono, f.integrate()? * pref);
    }
    Ok(out)
}

pub fn inner_fock(theta: f64, phi: &FockSuperfunction, psi: &FockSuperfunction) -> Result<Complex64> {
    let v = inner_fock_aux(theta, phi, psi)?;
    if !v.terms().all(|(m, _)| m == 0) {
        return Err(Error::Class("inner product carries auxiliary parameters".into()));
    }
    Ok(v.body())
}

/// Fundamental symmetry on the Fock model: Hodge map on `ξ`, `(−i)^{|J|}` on
/// `ζ^J`, and the sign that orders `ξ^I ζ̄^J ξ^{∁I} ζ^J` into measure order.
pub fn fock_j(phi: &FockSuperfunction) -> FockSuperfunction {
    let (r, s) = (phi.r, phi.s);
    let xi_mask: Mono = (1 << r) - 1;
    let mut body: Grassmann<ExpPoly> = Grassmann::zero();
    for (mono, f) in phi.body.body().terms() {
        let xi = mono & xi_mask;
        let comp = !xi & xi_mask;
        let sign = crate::grassmann::reorder_sign(xi, comp);
        let k = ((mono >> r) & ((1 << s) - 1)).count_ones();
        // reordering ξ^I ζ̄^J ξ^{∁I} ζ^J into ξ^{top} Π ζ̄_j ζ_j
        let reorder = k * comp.count_ones() + k * k.saturating_sub(1) / 2;
        let sign = f64::from(sign) * if reorder % 2 == 1 { -1.0 } else { 1.0 };
        let phase = Complex64::new(0.0, -1.0).powu(k) * sign;
        // ξ^{∁I} ζ^J η^A: swapping ξ^I for ξ^{∁I} keeps the block order
        body.add_term((mono & !xi_mask) | comp, f.scale(phase));
    }
    FockSuperfunction { r, s, body: Superfunction::from_body(phi.m(), r + s, body).expect("same range") }
}

/// Matrix on a finite graded basis with declared parities.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedOperator {
    matrix: CMat,
    parities: Vec<u8>,
    degree: u8,
}

impl GradedOperator {
    pub fn new(matrix: CMat, parities: Vec<u8>, degree: u8) -> Result<Self> {
        let k = parities.len();
        if matrix.nrows() != k || matrix.ncols() != k {
            return Err(Error::Dimension(format!("{}x{} matrix on a basis of {k}", matrix.nrows(), matrix.ncols())));
        }
        if degree > 1 || parities.iter().any(|&p| p > 1) {
            return Err(Error::Parity("degrees and parities must be 0 or 1".into()));
        }
        for i in 0..k {
            for j in 0..k {
                if matrix[(i, j)].norm() != 0.0 && parities[i] != (parities[j] + degree) % 2 {
                    return Err(Error::Parity(format!("entry ({i},{j}) breaks degree {degree}")));
                }
            }
        }
        Ok(Self { matrix, parities, degree })
    }

    pub fn identity(parities: Vec<u8>) -> Self {
        let k = parities.len();
        Self { matrix: CMat::identity(k, k), parities, degree: 0 }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn parities(&self) -> &[u8] {
        &self.parities
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.parities != other.parities {
            return Err(Error::Dimension("operators on different graded bases".into()));
        }
        Self::new(&self.matrix * &other.matrix, self.parities.clone(), (self.degree + other.degree) % 2)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { matrix: &self.matrix * c, parities: self.parities.clone(), degree: self.degree }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Checks `conj(G_ij) = (−1)^{p_i p_j} G_ji`.
pub fn is_superhermitian(gram: &CMat, parities: &[u8], tol: f64) -> bool {
    let k = parities.len();
    (0..k).all(|i| {
        (0..k).all(|j| {
            let sign = if parities[i] & parities[j] == 1 { -1.0 } else { 1.0 };
            (gram[(i, j)].conj() - gram[(j, i)] * sign).norm() <= tol
        })
    })
}

/// The operator `T†` with `⟨T† x, y⟩ = (−1)^{|T||x|} ⟨x, T y⟩` for the
/// sesquilinear form `⟨x, y⟩ = xᴴ G y`.
pub fn superadjoint(t: &GradedOperator, gram: &CMat) -> Result<GradedOperator> {
    let k = t.parities.len();
    if gram.nrows() != k || gram.ncols() != k {
        return Err(Error::Dimension("gram matrix does not match the basis".into()));
    }
    let gh = gram.adjoint();
    let gh_inv = gh.clone().try_inverse().ok_or_else(|| Error::Singular("gram matrix is not invertible".into()))?;
    let d = CMat::from_fn(k, k, |i, j| {
        if i != j {
            Complex64::new(0.0, 0.0)
        } else if t.degree & t.parities[i] == 1 {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        }
    });
    let matrix = gh_inv * t.matrix.adjoint() * gh * d;
    // clear rounding residue outside the allowed pattern
    let cleaned = CMat::from_fn(k, k, |i, j| {
        if t.parities[i] == (t.parities[j] + t.degree) % 2 {
            matrix[(i, j)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    GradedOperator::new(cleaned, t.parities.clone(), t.degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r01(a: Complex64, b: Complex64) -> Superfunction {
        Superfunction::constant(0, 1, a).add(&Superfunction::odd_coordinate(0, 1, 1).unwrap().scale(b)).unwrap()
    }

    #[test]
    fn l2_on_r01() {
        let (a, b, cc, d) = (c(1.0, 2.0), c(-0.5, 1.0), c(3.0, -1.0), c(0.25, 0.5));
        let v = inner_l2(&r01(a, b), &r01(cc, d)).unwrap();
        assert!((v - (a.conj() * d + b.conj() * cc)).norm() < 1e-15);
        let n = scalar_j(&r01(a, b), &r01(a, b)).unwrap();
        assert!((n - c(a.norm_sqr() + b.norm_sqr(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fock_constants_for_one_mode() {
        let theta = 0.7;
        let one = |x: Complex64| FockSuperfunction::component(0, 1, &[], &[], ExpPoly::constant(0, x)).unwrap();
        let zeta = |x: Complex64| FockSuperfunction::component(0, 1, &[], &[1], ExpPoly::constant(0, x)).unwrap();
        let (a, al, cc, ga) = (c(1.0, 1.0), c(0.5, -2.0), c(-1.0, 0.5), c(2.0, 0.3));
        let phi = one(a).add(&zeta(al)).unwrap();
        let psi = one(cc).add(&zeta(ga)).unwrap();
        let v = inner_fock(theta, &phi, &psi).unwrap();
        let expected = a.conj() * cc * (2.0 / theta) + al.conj() * ga * c(0.0, 2.0);
        assert!((v - expected).norm() < 1e-14, "{v} vs {expected}");
    }

    #[test]
    fn fock_without_holomorphic_sector_is_l2() {
        let f = Superfunction::component(IndexSet::full(1), ExpPoly::gaussian(c(1.0, 0.0), &[1.0]));
        let g = Superfunction::even(1, ExpPoly::gaussian(c(0.0, 1.0), &[0.5]));
        let phi = FockSuperfunction::new(1, 0, f.clone()).unwrap();
        let psi = FockSuperfunction::new(1, 0, g.clone()).unwrap();
        let v = inner_fock(1.3, &phi, &psi).unwrap();
        assert!((v - inner_l2(&f, &g).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn orthonormal_superadjoint_is_conjugate_transpose() {
        let parities = vec![0, 0, 1, 1];
        let m = CMat::from_fn(4, 4, |i, j| if parities[i] == parities[j] { c(i as f64 + 1.0, j as f64 - 0.5) } else { c(0.0, 0.0) });
        let t = GradedOperator::new(m.clone(), parities.clone(), 0).unwrap();
        let adj = superadjoint(&t, &CMat::identity(4, 4)).unwrap();
        assert!((adj.matrix() - m.adjoint()).iter().all(|z| z.norm() < 1e-14));
        let id = GradedOperator::identity(parities);
        assert!(superadjoint(&id, &CMat::identity(4, 4)).unwrap().max_abs_diff(&id) < 1e-15);
    }

    #[test]
    fn degree_violation_rejected() {
        let m = CMat::from_fn(2, 2, |_, _| c(1.0, 0.0));
        assert!(matches!(GradedOperator::new(m, vec![0, 1], 0), Err(Error::Parity(_))));
    }
}
