//! Deformation of algebras carrying a translation action of `ℝ^{2m|n}`:
//! `a ★ b = (ρ^a ★ ρ^b)(0)` with `ρ^a(z) = ρ_z(a)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::grassmann::{AuxNumber, AuxOddRing};
use crate::sampling::{FunctionClass, Sampler};
use crate::starprod::{scratch_bit, DeformationContext};
use crate::superfun::Superfunction;

type CMat = DMatrix<Complex64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionAlgebra {
    /// Bounded smooth superfunctions: Gaussian-type and pure plane-wave terms.
    B1,
    /// Trigonometric superpolynomials on the torus `ℝ^{2m}/ℤ^{2m}`.
    Trig,
}

/// A translation action together with the algebra it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionSpec {
    algebra: ActionAlgebra,
    m: usize,
    n: usize,
    subisometric_c: f64,
}

/// Relative slack for sup norms estimated on a finite grid.
pub const SUP_GRID_TOL: f64 = 1e-2;

/// Outcome of the sampled axiom checks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AxiomReport {
    pub homomorphism: f64,
    pub automorphism: f64,
    pub continuity: bool,
    pub subisometry_ratio: f64,
}

impl ActionSpec {
    /// Builds the action and checks the axioms on seeded samples.
    pub fn new(algebra: ActionAlgebra, m: usize, n: usize) -> Result<Self> {
        if n > 8 {
            return Err(Error::Dimension("at most 8 odd coordinates".into()));
        }
        let spec = Self { algebra, m, n, subisometric_c: 1.0 };
        let report = spec.verify_axioms(&mut Sampler::new(0x5eed))?;
        if report.homomorphism > 1e-10 || report.automorphism > 1e-10 || !report.continuity {
            return Err(Error::UnsupportedAction(format!("axiom check failed: {report:?}")));
        }
        if report.subisometry_ratio > spec.subisometric_c * (1.0 + SUP_GRID_TOL) {
            return Err(Error::UnsupportedAction(format!("not subisometric: ratio {}", report.subisometry_ratio)));
        }
        Ok(spec)
    }

    pub fn translation(m: usize, n: usize) -> Result<Self> {
        Self::new(ActionAlgebra::B1, m, n)
    }

    pub fn trig(m: usize, n: usize) -> Result<Self> {
        Self::new(ActionAlgebra::Trig, m, n)
    }

    pub fn algebra(&self) -> ActionAlgebra {
        self.algebra
    }

    pub fn subisometric_constant(&self) -> f64 {
        self.subisometric_c
    }

    /// Rejects elements outside the algebra's term class.
    pub fn check_member(&self, a: &Superfunction) -> Result<()> {
        let d = 2 * self.m;
        if a.m() != d || a.n() != self.n {
            return Err(Error::Dimension(format!("element of ℝ^{{{}|{}}} for an action on ℝ^{{{d}|{}}}", a.m(), a.n(), self.n)));
        }
        for (_, f) in a.body().terms() {
            for t in f.terms() {
                let a_zero = t.a().iter().all(|z| z.norm() == 0.0);
                let wave = a_zero && t.b().iter().all(|z| z.re == 0.0) && t.poly().degree() == 0;
                let ok = match self.algebra {
                    ActionAlgebra::Trig => {
                        wave && t.b().iter().all(|z| {
                            let k = z.im / (2.0 * PI);
                            (k - k.round()).abs() < 1e-9
                        })
                    }
                    ActionAlgebra::B1 => wave || (!a_zero && negative_definite(&t.a_matrix(), d)),
                };
                if !ok {
                    return Err(Error::Class(format!("term outside the {:?} algebra", self.algebra)));
                }
            }
        }
        Ok(())
    }

    /// `ρ_z(a)(x, ξ) = a(x + z, ξ + ζ)` for a numeric even shift and odd
    /// auxiliary shifts.
    pub fn act(&self, z_even: &[f64], z_odd: &[AuxNumber], a: &Superfunction) -> Result<Superfunction> {
        a.translate_even_real(z_even)?.grassmann_translate(z_odd)
    }

    /// `ρ^a` as a superfunction on `ℝ^{4m|2n}`: variables `(x, z)`, odd
    /// coordinates `(ξ, ζ)`.
    pub fn smooth_vector(&self, a: &Superfunction) -> Result<Superfunction> {
        self.check_member(a)?;
        let d = 2 * self.m;
        let l = CMat::from_fn(d, 2 * d, |r, c| if c == r || c == d + r { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
        let zero = vec![Complex64::new(0.0, 0.0); d];
        let even = a.body().try_map_coeffs(|f| f.linear_substitute(&l, &zero))?;
        let n = self.n as u32;
        let body = even.substitute(|g| (g < n).then(|| AuxNumber::generator(g).add(&AuxNumber::generator(g + n))));
        Superfunction::from_body(2 * d, 2 * self.n, body)
    }

    pub fn verify_axioms(&self, s: &mut Sampler) -> Result<AxiomReport> {
        let d = 2 * self.m;
        let ring = AuxOddRing::new(4)?;
        let mut report = AxiomReport { continuity: true, ..AxiomReport::default() };
        for _ in 0..6 {
            let a = self.sample(s);
            let b = self.sample(s);
            let (z1, z2) = (s.real_vec(d, 0.5), s.real_vec(d, 0.5));
            let o1: Vec<AuxNumber> = (0..self.n).map(|_| s.odd_aux(&ring)).collect();
            let o2: Vec<AuxNumber> = (0..self.n).map(|_| s.odd_aux(&ring)).collect();
            let zs: Vec<f64> = z1.iter().zip(&z2).map(|(x, y)| x + y).collect();
            let os: Vec<AuxNumber> = o1.iter().zip(&o2).map(|(x, y)| x.add(y)).collect();
            let composed = self.act(&z1, &o1, &self.act(&z2, &o2, &a)?)?;
            report.homomorphism = report.homomorphism.max(composed.deviation(&self.act(&zs, &os, &a)?));
            let lhs = self.act(&z1, &o1, &a.smul(&b)?)?;
            let rhs = self.act(&z1, &o1, &a)?.smul(&self.act(&z1, &o1, &b)?)?;
            report.automorphism = report.automorphism.max(lhs.deviation(&rhs));
            report.continuity &= self.smooth_vector(&a).is_ok();
            let numeric: Vec<AuxNumber> = vec![AuxNumber::zero(); self.n];
            let ratio = sup_norm(&self.act(&z1, &numeric, &a)?) / sup_norm(&a);
            report.subisometry_ratio = report.subisometry_ratio.max(ratio);
        }
        Ok(report)
    }

    /// Random member of the algebra.
    pub fn sample(&self, s: &mut Sampler) -> Superfunction {
        let d = 2 * self.m;
        let mut out = Superfunction::zero(d, self.n);
        for _ in 0..1 + s.index(2) {
            let set = s.index_set(self.n, None);
            let f = match self.algebra {
                ActionAlgebra::Trig => {
                    let k: Vec<f64> = (0..d).map(|_| 2.0 * PI * (s.index(5) as f64 - 2.0)).collect();
                    ExpPoly::plane_wave(s.complex(1.0), &k)
                }
                ActionAlgebra::B1 => {
                    if s.index(2) == 0 {
                        s.exppoly(d, FunctionClass::Gaussian)
                    } else {
                        let k = s.real_vec(d, 1.0);
                        ExpPoly::plane_wave(s.complex(1.0), &k)
                    }
                }
            };
            out = out.add(&Superfunction::component(set, f)).expect("same dimensions");
        }
        out
    }
}

fn negative_definite(a: &CMat, d: usize) -> bool {
    let re = DMatrix::from_fn(d, d, |i, j| a[(i, j)].re);
    SymmetricEigen::new(-re).eigenvalues.iter().all(|&l| l > 0.0)
}

/// `Σ_I sup |f_I|`, estimated on a uniform grid over `[-3, 3]^d`.
pub fn sup_norm(f: &Superfunction) -> f64 {
    let d = f.m();
    let per_axis: usize = match d {
        0 => 1,
        1 => 241,
        2 => 81,
        3 => 21,
        _ => 9,
    };
    let step = if per_axis > 1 { 6.0 / (per_axis - 1) as f64 } else { 0.0 };
    let total = per_axis.pow(d as u32);
    let mut norm = 0.0;
    for (_, g) in f.body().terms() {
        let mut best: f64 = 0.0;
        for idx in 0..total {
            let mut rest = idx;
            let x: Vec<f64> = (0..d)
                .map(|_| {
                    let k = rest % per_axis;
                    rest /= per_axis;
                    -3.0 + k as f64 * step
                })
                .collect();
            best = best.max(g.evaluate(&x).norm());
        }
        norm += best;
    }
    norm
}

/// `a ★ b = (ρ^a ★ ρ^b)(0)`: star in the group variables, evaluated at the
/// identity.
pub fn udf_product(ctx: &DeformationContext, spec: &ActionSpec, a: &Superfunction, b: &Superfunction) -> Result<Superfunction> {
    if ctx.m() != spec.m || ctx.n() != spec.n {
        return Err(Error::Dimension("action and context dimensions differ".into()));
    }
    let d = 2 * spec.m;
    let n = spec.n as u32;
    let lift = |f: &Superfunction, slot: usize| -> Result<_> {
        let rho = spec.smooth_vector(f)?;
        // (x, z) ↦ (x, y_slot) inside the (x, y₁, y₂) layout
        let l = CMat::from_fn(2 * d, 3 * d, |r, c| {
            let target = if r < d { r } else { d * (1 + slot) + (r - d) };
            if c == target {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let zero = vec![Complex64::new(0.0, 0.0); 2 * d];
        let even = rho.body().try_map_coeffs(|g| g.linear_substitute(&l, &zero))?;
        Ok(even.substitute(|g| (g >= n && g < 2 * n).then(|| AuxNumber::generator(scratch_bit(slot, (g - n) as usize)))))
    };
    let integrand = lift(a, 0)?.mul(&lift(b, 1)?);
    Superfunction::from_body(d, spec.n, ctx.contract(&integrand, d)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn translation_udf_recovers_star() {
        let ctx = DeformationContext::new(0.7, 1, 1, (1, 0)).unwrap();
        let spec = ActionSpec::translation(1, 1).unwrap();
        let mut s = Sampler::new(3);
        for _ in 0..5 {
            let a = spec.sample(&mut s);
            let b = spec.sample(&mut s);
            let u = udf_product(&ctx, &spec, &a, &b).unwrap();
            assert!(u.approx_eq(&ctx.star(&a, &b).unwrap(), 1e-12));
        }
    }

    #[test]
    fn smooth_vector_of_plane_wave() {
        let spec = ActionSpec::translation(1, 0).unwrap();
        let a = Superfunction::even(0, ExpPoly::plane_wave(c(1.0), &[0.5, -1.0]));
        let rho = spec.smooth_vector(&a).unwrap();
        let expected = Superfunction::even(0, ExpPoly::plane_wave(c(1.0), &[0.5, -1.0, 0.5, -1.0]));
        assert!(rho.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn smooth_vector_of_odd_coordinate() {
        let spec = ActionSpec::trig(1, 1).unwrap();
        let a = Superfunction::odd_coordinate(2, 1, 1).unwrap();
        let rho = spec.smooth_vector(&a).unwrap();
        let expected = Superfunction::odd_coordinate(4, 2, 1).unwrap().add(&Superfunction::odd_coordinate(4, 2, 2).unwrap()).unwrap();
        assert!(rho.approx_eq(&expected, 0.0));
    }

    #[test]
    fn trig_class_rejects_gaussians() {
        let spec = ActionSpec::trig(1, 0).unwrap();
        let a = Superfunction::even(0, ExpPoly::gaussian(c(1.0), &[1.0, 1.0]));
        assert!(matches!(spec.smooth_vector(&a), Err(Error::Class(_))));
    }

    #[test]
    fn unit_is_neutral() {
        let ctx = DeformationContext::new(0.4, 1, 0, (0, 0)).unwrap();
        let spec = ActionSpec::trig(1, 0).unwrap();
        let a = Superfunction::even(0, ExpPoly::plane_wave(c(2.0), &[2.0 * PI, -4.0 * PI]));
        let u = udf_product(&ctx, &spec, &a, &ctx.one()).unwrap();
        assert!(u.approx_eq(&a, 1e-12));
    }
}
