//! The Heisenberg supergroup and its representation on the Fock model.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::grassmann::AuxNumber;
use crate::hilbert::FockSuperfunction;
use crate::superfun::Superfunction;
use crate::udf::ActionSpec;

/// Dimensions and deformation parameter of `H_θ = L²(ℝ^{m|r}) ⊗ Hol(ℂ^{0|s})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeisenbergGroup {
    pub theta: f64,
    pub m: usize,
    pub r: usize,
    pub s: usize,
}

/// `g = (q, p, ξ, η, ζ, ζ̄, t)`; odd entries and `t` live in the auxiliary ring.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub xi: Vec<AuxNumber>,
    pub eta: Vec<AuxNumber>,
    pub zeta: Vec<AuxNumber>,
    pub zeta_bar: Vec<AuxNumber>,
    pub t: AuxNumber,
}

fn dot(a: &[AuxNumber], b: &[AuxNumber]) -> AuxNumber {
    a.iter().zip(b).fold(AuxNumber::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

fn real_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl GroupElement {
    pub fn identity(group: &HeisenbergGroup) -> Self {
        Self {
            q: vec![0.0; group.m],
            p: vec![0.0; group.m],
            xi: vec![AuxNumber::zero(); group.r],
            eta: vec![AuxNumber::zero(); group.r],
            zeta: vec![AuxNumber::zero(); group.s],
            zeta_bar: vec![AuxNumber::zero(); group.s],
            t: AuxNumber::zero(),
        }
    }

    /// Central element `(0, …, 0, t)`.
    pub fn central(group: &HeisenbergGroup, t: f64) -> Self {
        Self { t: AuxNumber::constant(c(t)), ..Self::identity(group) }
    }

    pub fn validate(&self, group: &HeisenbergGroup) -> Result<()> {
        let shapes = [
            (self.q.len(), group.m),
            (self.p.len(), group.m),
            (self.xi.len(), group.r),
            (self.eta.len(), group.r),
            (self.zeta.len(), group.s),
            (self.zeta_bar.len(), group.s),
        ];
        if shapes.iter().any(|(a, b)| a != b) {
            return Err(Error::Dimension("group element does not match the group dimensions".into()));
        }
        let odd = self.xi.iter().chain(&self.eta).chain(&self.zeta).chain(&self.zeta_bar);
        for x in odd {
            if !(x.is_zero() || x.parity() == Some(1)) || !x.is_pure_aux() {
                return Err(Error::Parity("odd group coordinates must be odd auxiliary numbers".into()));
            }
        }
        if !(self.t.is_zero() || self.t.parity() == Some(0)) || !self.t.is_pure_aux() {
            return Err(Error::Parity("central coordinate must be even".into()));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&AuxNumber, &AuxNumber) -> AuxNumber) -> [Vec<AuxNumber>; 4] {
        let z = |a: &[AuxNumber], b: &[AuxNumber]| a.iter().zip(b).map(|(x, y)| f(x, y)).collect();
        [z(&self.xi, &other.xi), z(&self.eta, &other.eta), z(&self.zeta, &other.zeta), z(&self.zeta_bar, &other.zeta_bar)]
    }
}

/// `ω(a, a′) = q·p′ − q′·p + ξ·η′ − ξ′·η + ½(ζ·ζ̄′ − ζ′·ζ̄)`.
pub fn omega(a: &GroupElement, b: &GroupElement) -> AuxNumber {
    let even = AuxNumber::constant(c(real_dot(&a.q, &b.p) - real_dot(&b.q, &a.p)));
    let odd = dot(&a.xi, &b.eta).sub(&dot(&b.xi, &a.eta));
    let holo = dot(&a.zeta, &b.zeta_bar).sub(&dot(&b.zeta, &a.zeta_bar)).scale(c(0.5));
    even.add(&odd).add(&holo)
}

/// `(a, t)(a′, t′) = (a + a′, t + t′ + ½ω(a, a′))`.
pub fn group_mul(group: &HeisenbergGroup, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    g.validate(group)?;
    h.validate(group)?;
    let [xi, eta, zeta, zeta_bar] = g.zip_with(h, |x, y| x.add(y));
    Ok(GroupElement {
        q: g.q.iter().zip(&h.q).map(|(x, y)| x + y).collect(),
        p: g.p.iter().zip(&h.p).map(|(x, y)| x + y).collect(),
        xi,
        eta,
        zeta,
        zeta_bar,
        t: g.t.add(&h.t).add(&omega(g, h).scale(c(0.5))),
    })
}

pub fn inverse(g: &GroupElement) -> GroupElement {
    let neg = |v: &[AuxNumber]| v.iter().map(AuxNumber::neg).collect();
    GroupElement {
        q: g.q.iter().map(|x| -x).collect(),
        p: g.p.iter().map(|x| -x).collect(),
        xi: neg(&g.xi),
        eta: neg(&g.eta),
        zeta: neg(&g.zeta),
        zeta_bar: neg(&g.zeta_bar),
        t: g.t.neg(),
    }
}

/// `U(g)φ(q₀, ξ₀, ζ₀) = e^{(2i/θ)(t + (½q − q₀)p + (½ξ − ξ₀)η + ½(½ζ − ζ₀)ζ̄)} φ(q₀ − q, ξ₀ − ξ, ζ₀ − ζ)`.
pub fn represent(group: &HeisenbergGroup, g: &GroupElement, phi: &FockSuperfunction) -> Result<FockSuperfunction> {
    g.validate(group)?;
    if phi.m() != group.m || phi.r() != group.r || phi.s() != group.s {
        return Err(Error::Dimension("Fock vector does not match the group".into()));
    }
    let (r, s) = (group.r, group.s);
    let mut shifts: Vec<AuxNumber> = g.xi.iter().map(AuxNumber::neg).collect();
    shifts.extend(g.zeta.iter().map(AuxNumber::neg));
    let minus_q: Vec<f64> = g.q.iter().map(|x| -x).collect();
    let moved = phi.body().translate_even_real(&minus_q)?.grassmann_translate(&shifts)?;

    let ambient = |k: usize| AuxNumber::generator(k as u32);
    let mut phase = g.t.add(&AuxNumber::constant(c(0.5 * real_dot(&g.q, &g.p))));
    phase = phase.add(&dot(&g.xi, &g.eta).scale(c(0.5)));
    phase = phase.add(&dot(&g.zeta, &g.zeta_bar).scale(c(0.25)));
    for k in 0..r {
        phase = phase.sub(&ambient(k).mul(&g.eta[k]));
    }
    for k in 0..s {
        phase = phase.sub(&ambient(r + k).mul(&g.zeta_bar[k]).scale(c(0.5)));
    }
    let factor = phase.scale(Complex64::new(0.0, 2.0 / group.theta)).exp()?;
    let k: Vec<f64> = g.p.iter().map(|x| -2.0 * x / group.theta).collect();
    let wave = ExpPoly::plane_wave(c(1.0), &k);
    let body = moved.left_mul_numeric(&factor).map_even(group.m, |f| Ok(f.mul(&wave)))?;
    phi.with_body(body)
}

/// `z ↦ ρ_z(a)` for one of the shipped translation actions.
pub fn smooth_vector_map(a: &Superfunction, spec: &ActionSpec) -> Result<Superfunction> {
    spec.smooth_vector(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::AuxOddRing;
    use crate::hilbert::inner_fock_aux;

    fn group() -> HeisenbergGroup {
        HeisenbergGroup { theta: 0.8, m: 1, r: 1, s: 1 }
    }

    fn element(ring: &AuxOddRing, base: usize, q: f64, p: f64) -> GroupElement {
        GroupElement {
            q: vec![q],
            p: vec![p],
            xi: vec![ring.generator(base)],
            eta: vec![ring.generator(base + 1)],
            zeta: vec![ring.generator(base + 2)],
            zeta_bar: vec![ring.generator(base + 3)],
            t: AuxNumber::constant(c(0.3)),
        }
    }

    #[test]
    fn central_elements_compose_additively() {
        let g = group();
        let a = GroupElement::central(&g, 0.4);
        let b = GroupElement::central(&g, -1.1);
        let ab = group_mul(&g, &a, &b).unwrap();
        assert!(ab.t.max_abs_diff(&AuxNumber::constant(c(-0.7))) < 1e-15);
    }

    #[test]
    fn commutator_is_central_omega() {
        let g = group();
        let ring = AuxOddRing::new(8).unwrap();
        let a = element(&ring, 0, 0.3, -0.4);
        let b = element(&ring, 4, 1.2, 0.5);
        let ab = group_mul(&g, &a, &b).unwrap();
        let comm = group_mul(&g, &group_mul(&g, &ab, &inverse(&a)).unwrap(), &inverse(&b)).unwrap();
        assert!(comm.q.iter().chain(&comm.p).all(|x| x.abs() < 1e-15));
        assert!(comm.xi.iter().chain(&comm.eta).all(AuxNumber::is_zero));
        assert!(comm.t.max_abs_diff(&omega(&a, &b)) < 1e-14);
    }

    #[test]
    fn center_acts_by_phase() {
        let g = group();
        let phi = FockSuperfunction::component(1, 1, &[1], &[], ExpPoly::gaussian(c(1.0), &[1.0])).unwrap();
        let out = represent(&g, &GroupElement::central(&g, 0.25), &phi).unwrap();
        let phase = Complex64::new(0.0, 2.0 * 0.25 / g.theta).exp();
        assert!(out.body().approx_eq(&phi.body().scale(phase), 1e-14));
    }

    #[test]
    fn superunitary_on_a_sample() {
        let g = HeisenbergGroup { theta: 0.9, m: 1, r: 1, s: 1 };
        let ring = AuxOddRing::new(4).unwrap();
        let elem = GroupElement {
            q: vec![0.4],
            p: vec![-0.7],
            xi: vec![ring.generator(0)],
            eta: vec![ring.generator(1)],
            zeta: vec![ring.odd(&[c(0.0), c(0.0), Complex64::new(0.5, 0.5), c(0.0)])],
            zeta_bar: vec![ring.odd(&[c(0.0), c(0.0), Complex64::new(0.5, -0.5), c(0.0)])],
            t: AuxNumber::constant(c(0.2)),
        };
        let phi = FockSuperfunction::component(1, 1, &[], &[1], ExpPoly::gaussian(c(1.0), &[1.0])).unwrap()
            .add(&FockSuperfunction::component(1, 1, &[1], &[], ExpPoly::gaussian(Complex64::new(0.0, 1.0), &[0.5])).unwrap())
            .unwrap();
        let before = inner_fock_aux(g.theta, &phi, &phi).unwrap();
        let u = represent(&g, &elem, &phi).unwrap();
        let after = inner_fock_aux(g.theta, &u, &u).unwrap();
        assert!(before.max_abs_diff(&after) < 1e-10, "{before:?} vs {after:?}");
    }
}
