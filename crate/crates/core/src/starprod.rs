//! The Moyal–Clifford star product on `ℝ^{2m|n}`.
//!
//! The engine evaluates the oscillatory kernel integral exactly: the two
//! factors are lifted to `f(z + z₁)`, `g(z + z₂)`, the odd kernel is expanded
//! and Berezin-integrated over the scratch generators, and the even kernel
//! is integrated by the Gaussian/Fresnel closed form. An independent series
//! evaluation serves as oracle on polynomial and plane-wave inputs.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::grassmann::{ambient_part, aux_part, mono_parity, reorder_sign, AuxNumber, Grassmann, Mono, SCRATCH_BASE};
use crate::ledger::Ledger;
use crate::poly::{Affine, Poly};
use crate::superfun::Superfunction;

type CMat = DMatrix<Complex64>;

/// Bit of the scratch generator for slot `slot` (0 or 1) and odd index `a`.
pub fn scratch_bit(slot: usize, a: usize) -> u32 {
    SCRATCH_BASE + 8 * slot as u32 + a as u32
}

pub const MAX_ODD: usize = 8;

/// Raw kernel data; no unit normalisation.
#[derive(Clone, Debug)]
pub struct Kernel {
    theta: f64,
    m: usize,
    signs: Vec<f64>,
}

impl Kernel {
    pub fn new(theta: f64, m: usize, signs: Vec<f64>) -> Result<Self> {
        if theta == 0.0 || !theta.is_finite() {
            return Err(Error::Invalid(format!("deformation parameter must be finite and nonzero, got {theta}")));
        }
        if signs.len() > MAX_ODD {
            return Err(Error::Dimension(format!("at most {MAX_ODD} odd coordinates, got {}", signs.len())));
        }
        Ok(Self { theta, m, signs })
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    /// Standard symplectic block `[[0, 1], [-1, 0]]` on `ℝ^{2m}`.
    pub fn omega_even(&self) -> DMatrix<f64> {
        let m = self.m;
        DMatrix::from_fn(2 * m, 2 * m, |i, j| {
            if j == i + m && i < m {
                1.0
            } else if i == j + m && j < m {
                -1.0
            } else {
                0.0
            }
        })
    }

    /// Contract an integrand already lifted to variables `(x, y₁, y₂)` with
    /// `xdim` outer variables and scratch odd slots. Returns a function of
    /// `x` with the kernel prefactor applied.
    pub fn contract(&self, integrand: &Grassmann<ExpPoly>, xdim: usize) -> Result<Grassmann<ExpPoly>> {
        let m2 = 2 * self.m;
        let d = xdim + 2 * m2;
        let i = Complex64::i();

        let mut odd_kernel = AuxNumber::one();
        for (a, s) in self.signs.iter().enumerate() {
            let pair = AuxNumber::monomial(1 << scratch_bit(0, a) | 1 << scratch_bit(1, a), -2.0 * i * *s / self.theta);
            odd_kernel = odd_kernel.mul(&AuxNumber::one().add(&pair));
        }
        let measure: Vec<u32> = (0..self.n()).map(|a| scratch_bit(0, a)).chain((0..self.n()).map(|a| scratch_bit(1, a))).collect();
        let reduced = integrand.right_mul_numeric(&odd_kernel).berezin(&measure);

        let omega = self.omega_even();
        let mut a = CMat::zeros(d, d);
        for r in 0..m2 {
            for c in 0..m2 {
                let v = -i * omega[(r, c)] / self.theta;
                a[(xdim + r, xdim + m2 + c)] = v;
                a[(xdim + m2 + c, xdim + r)] = v;
            }
        }
        let even_kernel = ExpPoly::exponential(Complex64::new(1.0, 0.0), &a, &vec![Complex64::new(0.0, 0.0); d])?;
        let ys: Vec<usize> = (xdim..d).collect();
        let pref = Complex64::new(self.theta.powi(self.n() as i32 - m2 as i32) / PI.powi(m2 as i32), 0.0);
        reduced.try_map_coeffs(|f| Ok(f.mul(&even_kernel).integrate_vars(&ys)?.scale(pref)))
    }

    /// `f(x + y_slot, ξ + θ_slot)` in variables `(x, y₁, y₂)`.
    pub fn lift(&self, f: &Superfunction, slot: usize) -> Result<Grassmann<ExpPoly>> {
        let m2 = 2 * self.m;
        let l = CMat::from_fn(m2, 3 * m2, |r, c| {
            if c == r || c == m2 * (1 + slot) + r {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let zero = vec![Complex64::new(0.0, 0.0); m2];
        let even = f.body().try_map_coeffs(|c| c.linear_substitute(&l, &zero))?;
        let n = self.n() as u32;
        Ok(even.substitute(|g| {
            (g < n).then(|| AuxNumber::generator(g).add(&AuxNumber::generator(scratch_bit(slot, g as usize))))
        }))
    }

    /// Unnormalised kernel product.
    pub fn star_raw(&self, f: &Superfunction, g: &Superfunction) -> Result<Superfunction> {
        let m2 = 2 * self.m;
        for h in [f, g] {
            if h.m() != m2 || h.n() != self.n() {
                return Err(Error::Dimension(format!(
                    "superfunction on ℝ^{{{}|{}}} in a context for ℝ^{{{}|{}}}",
                    h.m(),
                    h.n(),
                    m2,
                    self.n()
                )));
            }
        }
        let product = self.lift(f, 0)?.mul(&self.lift(g, 1)?);
        Superfunction::from_body(m2, self.n(), self.contract(&product, m2)?)
    }
}

#[derive(Clone, Debug)]
pub struct DeformationContext {
    kernel: Kernel,
    p: usize,
    q: usize,
    kappa: Complex64,
    sigma: f64,
    c_plus: Complex64,
    ledger: Ledger,
}

impl DeformationContext {
    /// Context on `ℝ^{2m|n}` with odd signature `(p, q)`, `p + q = n`, `θ > 0`.
    pub fn new(theta: f64, m: usize, n: usize, signature: (usize, usize)) -> Result<Self> {
        if theta <= 0.0 || !theta.is_finite() {
            return Err(Error::Invalid(format!("theta must be positive, got {theta}")));
        }
        Self::with_signed_theta(theta, m, n, signature)
    }

    /// As `new` but accepting any nonzero real `θ`.
    pub fn with_signed_theta(theta: f64, m: usize, n: usize, signature: (usize, usize)) -> Result<Self> {
        let (p, q) = signature;
        if p + q != n {
            return Err(Error::Dimension(format!("signature ({p},{q}) does not add up to n = {n}")));
        }
        let signs: Vec<f64> = (0..n).map(|a| if a < p { 1.0 } else { -1.0 }).collect();
        let kernel = Kernel::new(theta, m, signs)?;

        let one = Superfunction::one(2 * m, n);
        let kappa = kernel.star_raw(&one, &one)?.evaluate(&vec![0.0; 2 * m]).body();
        if kappa.norm() == 0.0 {
            return Err(Error::Singular("kernel annihilates the unit".into()));
        }

        let sigma = derive_sigma(theta)?;
        let c_plus = derive_c_plus(theta)?;

        let mut ledger = Ledger::new();
        ledger.record_complex("unit_norm", kappa, "raw value of 1★1 from the kernel prefactor; products are divided by it");
        ledger.record("sigma", json!(sigma), "x₁★x₂ − x₂★x₁ = σ·iθ");
        ledger.record_complex("c_plus", c_plus, "ξ★ξ for an odd coordinate of positive signature");
        ledger.record(
            "plane_wave_phase",
            json!("exp(-σ·i·θ·ω(k,k′)/2)"),
            "e^{ik·x} ★ e^{ik′·x} = phase · e^{i(k+k′)·x}",
        );
        ledger.record(
            "odd_berezin_order",
            json!("dθ₁¹…dθ₁ⁿ dθ₂¹…dθ₂ⁿ, measure acting from the left"),
            "odd kernel integration order",
        );
        ledger.record("odd_derivative", json!("left"), "∂/∂ξ acts from the left");
        ledger.record(
            "sqrt_det_branch",
            json!("continuation along (1-s)·I + s·M"),
            "branch of the Gaussian/Fresnel prefactor",
        );
        ledger.record("theta", json!(theta), "deformation parameter");
        ledger.record("signature", json!([p, q]), "odd signature");

        Ok(Self { kernel, p, q, kappa, sigma, c_plus, ledger })
    }

    pub fn theta(&self) -> f64 {
        self.kernel.theta
    }

    /// Half the even dimension.
    pub fn m(&self) -> usize {
        self.kernel.m
    }

    pub fn n(&self) -> usize {
        self.kernel.n()
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn signs(&self) -> &[f64] {
        &self.kernel.signs
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn kappa(&self) -> Complex64 {
        self.kappa
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn c_plus(&self) -> Complex64 {
        self.c_plus
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    /// Full `(2m+n)×(2m+n)` matrix: symplectic even block, diagonal odd block.
    pub fn omega(&self) -> DMatrix<f64> {
        let m2 = 2 * self.m();
        let even = self.kernel.omega_even();
        DMatrix::from_fn(m2 + self.n(), m2 + self.n(), |i, j| {
            if i < m2 && j < m2 {
                even[(i, j)]
            } else if i == j {
                self.kernel.signs[i - m2]
            } else {
                0.0
            }
        })
    }

    pub fn one(&self) -> Superfunction {
        Superfunction::one(2 * self.m(), self.n())
    }

    /// Normalised star product.
    pub fn star(&self, f: &Superfunction, g: &Superfunction) -> Result<Superfunction> {
        Ok(self.kernel.star_raw(f, g)?.scale(1.0 / self.kappa))
    }

    /// Normalised contraction of a lifted integrand (see `Kernel::contract`).
    pub fn contract(&self, integrand: &Grassmann<ExpPoly>, xdim: usize) -> Result<Grassmann<ExpPoly>> {
        Ok(self.kernel.contract(integrand, xdim)?.scale(1.0 / self.kappa))
    }

    /// Odd Clifford constants `ξ^a ★ ξ^a`.
    pub fn clifford_lambda(&self) -> Vec<Complex64> {
        self.kernel.signs.iter().map(|s| -self.sigma * Complex64::i() * self.theta() * s / 2.0).collect()
    }

    /// Series evaluation for polynomial or exponential-linear even parts.
    pub fn star_oracle(&self, f: &Superfunction, g: &Superfunction) -> Result<Superfunction> {
        let m2 = 2 * self.m();
        for h in [f, g] {
            if h.m() != m2 || h.n() != self.n() {
                return Err(Error::Dimension("oracle inputs do not match the context".into()));
            }
        }
        let lambda = self.clifford_lambda();
        let c = Complex64::new(0.0, self.sigma * self.theta() / 2.0);
        let omega = self.kernel.omega_even();
        let mut out: Grassmann<ExpPoly> = Grassmann::zero();
        for (kf, cf) in f.body().terms() {
            for (kg, cg) in g.body().terms() {
                let (amb_f, aux_f) = (ambient_part(kf), aux_part(kf));
                let (amb_g, aux_g) = (ambient_part(kg), aux_part(kg));
                let aux_sign = reorder_sign(aux_f, aux_g);
                if aux_sign == 0 {
                    continue;
                }
                let (blade, factor) = clifford_product(amb_f, amb_g, &lambda);
                if factor.norm() == 0.0 {
                    continue;
                }
                let pass = if mono_parity(aux_f) == 1 && mono_parity(amb_g) == 1 { -1.0 } else { 1.0 };
                let even = even_series(cf, cg, &omega, c)?;
                out.add_term(blade | aux_f | aux_g, even.scale(factor * pass * f64::from(aux_sign)));
            }
        }
        Superfunction::from_body(m2, self.n(), out)
    }

    /// `f★g − (−1)^{|f||g|} g★f`.
    pub fn star_comm(&self, f: &Superfunction, g: &Superfunction) -> Result<Superfunction> {
        let s = graded_sign(f, g)?;
        self.star(f, g)?.sub(&self.star(g, f)?.scale(Complex64::new(s, 0.0)))
    }

    /// `f★g + (−1)^{|f||g|} g★f`.
    pub fn star_anticomm(&self, f: &Superfunction, g: &Superfunction) -> Result<Superfunction> {
        let s = graded_sign(f, g)?;
        self.star(f, g)?.add(&self.star(g, f)?.scale(Complex64::new(s, 0.0)))
    }
}

fn graded_sign(f: &Superfunction, g: &Superfunction) -> Result<f64> {
    let pf = f.parity();
    let pg = g.parity();
    if f.is_zero() || g.is_zero() || pf == Some(0) || pg == Some(0) {
        return Ok(1.0);
    }
    match (pf, pg) {
        (Some(1), Some(1)) => Ok(-1.0),
        _ => Err(Error::Parity("graded bracket needs homogeneous arguments".into())),
    }
}

fn derive_sigma(theta: f64) -> Result<f64> {
    let probe = Kernel::new(theta, 1, Vec::new())?;
    let one = Superfunction::one(2, 0);
    let kappa = probe.star_raw(&one, &one)?.evaluate(&[0.0, 0.0]).body();
    let x1 = Superfunction::even_coordinate(2, 0, 0);
    let x2 = Superfunction::even_coordinate(2, 0, 1);
    let comm = probe.star_raw(&x1, &x2)?.sub(&probe.star_raw(&x2, &x1)?)?;
    let value = comm.evaluate(&[0.3, -0.7]).body() / kappa / theta;
    let sigma = value.im.round();
    if (value - Complex64::new(0.0, sigma)).norm() > 1e-9 || sigma.abs() != 1.0 {
        return Err(Error::Singular(format!("coordinate commutator is not ±iθ: {value}")));
    }
    Ok(sigma)
}

fn derive_c_plus(theta: f64) -> Result<Complex64> {
    let probe = Kernel::new(theta, 0, vec![1.0])?;
    let one = Superfunction::one(0, 1);
    let kappa = probe.star_raw(&one, &one)?.evaluate(&[]).body();
    let xi = Superfunction::odd_coordinate(0, 1, 1)?;
    Ok(probe.star_raw(&xi, &xi)?.evaluate(&[]).body() / kappa)
}

/// Product of Clifford blades over an orthogonal basis with `e_a² = λ_a`.
pub fn clifford_product(a: Mono, b: Mono, lambda: &[Complex64]) -> (Mono, Complex64) {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        swaps += (a >> j >> 1).count_ones();
    }
    let mut factor = Complex64::new(if swaps.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0);
    let mut common = a & b;
    while common != 0 {
        let j = common.trailing_zeros();
        common &= common - 1;
        factor *= lambda[j as usize];
    }
    (a ^ b, factor)
}

/// `Σ_r cʳ/r! Ω^{μν}… (∂…f)(∂…g)` for `A = 0` terms, summed in closed form.
fn even_series(f: &ExpPoly, g: &ExpPoly, omega: &DMatrix<f64>, c: Complex64) -> Result<ExpPoly> {
    let d = f.dim();
    let zero = Complex64::new(0.0, 0.0);
    let mut out = ExpPoly::zero(d);
    let to_pair = |offset: usize| -> Vec<Affine> {
        (0..d)
            .map(|i| {
                let mut coeffs = vec![zero; 2 * d];
                coeffs[offset + i] = Complex64::new(1.0, 0.0);
                Affine { coeffs, constant: zero }
            })
            .collect()
    };
    let diagonal: Vec<Affine> = (0..2 * d)
        .map(|i| {
            let mut coeffs = vec![zero; d];
            coeffs[i % d.max(1)] = Complex64::new(1.0, 0.0);
            Affine { coeffs, constant: zero }
        })
        .collect();
    for s in f.terms() {
        for t in g.terms() {
            if s.a().iter().chain(t.a()).any(|z| z.norm() != 0.0) {
                return Err(Error::Class("series oracle needs polynomial times exponential-linear inputs".into()));
            }
            let (b, b2) = (s.b(), t.b());
            let pair = s.poly().substitute(&to_pair(0), 2 * d).mul(&t.poly().substitute(&to_pair(d), 2 * d));
            let mut acc = pair.clone();
            let mut term = pair;
            let mut r = 1.0;
            loop {
                let mut next = Poly::zero(2 * d);
                for mu in 0..d {
                    for nu in 0..d {
                        let w = omega[(mu, nu)];
                        if w == 0.0 {
                            continue;
                        }
                        let dn = term.derive(d + nu);
                        next.add_assign(&dn.derive(mu).scale(Complex64::new(w, 0.0)));
                        next.add_assign(&dn.scale(b[mu] * w));
                        next.add_assign(&term.derive(mu).scale(b2[nu] * w));
                    }
                }
                if next.is_zero() {
                    break;
                }
                term = next.scale(c / r);
                acc.add_assign(&term);
                r += 1.0;
            }
            let mut phase = zero;
            for mu in 0..d {
                for nu in 0..d {
                    phase += omega[(mu, nu)] * b[mu] * b2[nu];
                }
            }
            let poly = acc.substitute(&diagonal, d).scale((c * phase).exp());
            let bsum: Vec<Complex64> = b.iter().zip(b2).map(|(x, y)| x + y).collect();
            out.add_assign(&ExpPoly::from_parts(&CMat::zeros(d, d), &bsum, poly)?);
        }
    }
    Ok(out)
}
