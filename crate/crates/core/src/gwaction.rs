//! Scalar field actions on the deformed `ℝ^{2|1}`: graded inner derivations,
//! the superfield action and the harmonic-oscillator `φ⁴` action it is
//! compared against.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::grassmann::IndexSet;
use crate::starprod::DeformationContext;
use crate::superfun::Superfunction;

/// Imaginary residue tolerated in a real action value.
pub const REALITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GWParams {
    pub theta: f64,
    pub mass: f64,
    /// Quartic coupling of the superfield action.
    pub coupling: f64,
    pub b: f64,
}

impl GWParams {
    pub fn new(theta: f64, mass: f64, coupling: f64, b: f64) -> Result<Self> {
        if theta.is_nan() || theta <= 0.0 || mass.is_nan() || mass < 0.0 {
            return Err(Error::Invalid(format!("need theta > 0 and mass >= 0, got {theta}, {mass}")));
        }
        Ok(Self { theta, mass, coupling, b })
    }

    /// `Ω² = b⁴θ²/16`.
    pub fn omega_sq(&self) -> f64 {
        self.b.powi(4) * self.theta * self.theta / 16.0
    }

    /// `λ = Λ(1 + b⁴θ²/16)`.
    pub fn lambda(&self) -> f64 {
        self.coupling * (1.0 + self.omega_sq())
    }

    /// Star product on `ℝ^{2|1}` with `ξ★ξ` of positive sign.
    pub fn context(&self) -> Result<DeformationContext> {
        DeformationContext::new(self.theta, 1, 1, (1, 0))
    }

    /// Star product on the body `ℝ²`.
    pub fn body_context(&self) -> Result<DeformationContext> {
        DeformationContext::new(self.theta, 1, 0, (0, 0))
    }
}

/// `Φ = φ₀ + φ₁ξ` on `ℝ^{2|1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superfield {
    pub phi0: ExpPoly,
    pub phi1: ExpPoly,
}

impl Superfield {
    pub fn new(phi0: ExpPoly, phi1: ExpPoly) -> Result<Self> {
        if phi0.dim() != 2 || phi1.dim() != 2 {
            return Err(Error::Dimension("superfield components live on ℝ²".into()));
        }
        Ok(Self { phi0, phi1 })
    }

    /// `φ₁ = bφ₀`.
    pub fn identified(phi0: ExpPoly, b: f64) -> Result<Self> {
        let phi1 = phi0.scale(Complex64::new(b, 0.0));
        Self::new(phi0, phi1)
    }

    pub fn to_superfunction(&self) -> Superfunction {
        let xi = IndexSet::new(1, &[1]).expect("one odd coordinate");
        Superfunction::component(IndexSet::empty(1), self.phi0.clone())
            .add(&Superfunction::component(xi, self.phi1.clone()))
            .expect("same dimensions")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Derivation {
    /// `[α(i/2)x_μ, −]`
    Even(usize),
    /// `[α(i/2)x_μξ, −]`
    Odd(usize),
}

impl Derivation {
    pub const ALL: [Derivation; 4] = [Derivation::Even(1), Derivation::Even(2), Derivation::Odd(1), Derivation::Odd(2)];

    pub fn generator(self, alpha: f64) -> Result<Superfunction> {
        self.generator_on(alpha, 1)
    }

    /// Generator on `ℝ^{2|n}`; odd kinds need `n = 1`.
    pub fn generator_on(self, alpha: f64, n: usize) -> Result<Superfunction> {
        let (mu, odd) = match self {
            Derivation::Even(mu) => (mu, false),
            Derivation::Odd(mu) => (mu, true),
        };
        if !(1..=2).contains(&mu) {
            return Err(Error::Dimension(format!("direction {mu} outside 1..=2")));
        }
        let x = ExpPoly::coordinate(2, mu - 1).scale(Complex64::new(0.0, alpha / 2.0));
        let set = if odd { IndexSet::new(n, &[1])? } else { IndexSet::empty(n) };
        Ok(Superfunction::component(set, x))
    }
}

/// `α` with `|[α(i/2)x₁, x₂]_★| = 1`, so that the even derivations act as
/// unit-normalised partial derivatives.
pub fn calibrate_alpha(ctx: &DeformationContext) -> Result<f64> {
    let probe = Derivation::Even(1).generator(1.0)?;
    let x2 = Superfunction::even(1, ExpPoly::coordinate(2, 1));
    let value = ctx.star_comm(&probe, &x2)?.evaluate(&[0.3, -0.2]).body();
    if value.norm() == 0.0 {
        return Err(Error::Singular("coordinate commutator vanishes".into()));
    }
    Ok(1.0 / value.norm())
}

fn parity_parts(f: &Superfunction) -> Result<[Superfunction; 2]> {
    let mut parts = [Superfunction::zero(f.m(), f.n()), Superfunction::zero(f.m(), f.n())];
    for (mono, g) in f.body().terms() {
        let part = Superfunction::from_body(f.m(), f.n(), crate::grassmann::Grassmann::monomial(mono, g.clone()))?;
        let p = (mono.count_ones() % 2) as usize;
        parts[p] = parts[p].add(&part)?;
    }
    Ok(parts)
}

/// Graded commutator of the derivation's generator with `Φ`, extended
/// linearly over the parity components of `Φ`.
pub fn graded_derivation(ctx: &DeformationContext, kind: Derivation, alpha: f64, phi: &Superfunction) -> Result<Superfunction> {
    let g = kind.generator(alpha)?;
    let mut out = Superfunction::zero(phi.m(), phi.n());
    for part in parity_parts(phi)? {
        if !part.is_zero() {
            out = out.add(&ctx.star_comm(&g, &part)?)?;
        }
    }
    Ok(out)
}

fn star4(ctx: &DeformationContext, f: &Superfunction) -> Result<Superfunction> {
    let f2 = ctx.star(f, f)?;
    ctx.star(&ctx.star(&f2, f)?, f)
}

/// Term-by-term value of the superfield action.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperActionTerms {
    pub kinetic: Complex64,
    pub mass: Complex64,
    pub quartic: Complex64,
}

impl SuperActionTerms {
    pub fn total(&self) -> Complex64 {
        self.kinetic + self.mass + self.quartic
    }
}

/// `tr(½ Σ_𝔡 𝔡(Φ)†★𝔡(Φ) + M²/2 Φ★Φ + Λ Φ★Φ★Φ★Φ)` with `tr` the
/// Berezin–Lebesgue integral.
pub fn action_super_terms(ctx: &DeformationContext, phi: &Superfield, params: &GWParams, alpha: f64) -> Result<SuperActionTerms> {
    let f = phi.to_superfunction();
    let mut kinetic = Complex64::new(0.0, 0.0);
    for kind in Derivation::ALL {
        let d = graded_derivation(ctx, kind, alpha, &f)?;
        kinetic += 0.5 * ctx.star(&d.sconj(), &d)?.sintegrate()?;
    }
    let mass = 0.5 * params.mass * params.mass * ctx.star(&f, &f)?.sintegrate()?;
    let quartic = params.coupling * star4(ctx, &f)?.sintegrate()?;
    Ok(SuperActionTerms { kinetic, mass, quartic })
}

/// Real value of the superfield action; errors if the imaginary residue
/// exceeds [`REALITY_TOL`] relative to the magnitude.
pub fn action_super(ctx: &DeformationContext, phi: &Superfield, params: &GWParams, alpha: f64) -> Result<f64> {
    real_part(action_super_terms(ctx, phi, params, alpha)?.total())
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > REALITY_TOL * (1.0 + z.norm()) {
        return Err(Error::Class(format!("action has imaginary part {}", z.im)));
    }
    Ok(z.re)
}

/// `∫ ½(∂φ)² + (2Ω²/θ²)x²φ² + M²/2 φ² + λ φ★φ★φ★φ`.
pub fn action_gw_complex(phi0: &ExpPoly, params: &GWParams) -> Result<Complex64> {
    let ctx = params.body_context()?;
    let mut value = Complex64::new(0.0, 0.0);
    for axis in 0..2 {
        let d = phi0.derive(axis)?;
        value += 0.5 * d.mul(&d).integrate()?;
    }
    let x_sq = ExpPoly::coordinate(2, 0).mul(&ExpPoly::coordinate(2, 0)).add(&ExpPoly::coordinate(2, 1).mul(&ExpPoly::coordinate(2, 1)));
    let phi_sq = phi0.mul(phi0);
    value += 2.0 * params.omega_sq() / (params.theta * params.theta) * x_sq.mul(&phi_sq).integrate()?;
    value += 0.5 * params.mass * params.mass * phi_sq.integrate()?;
    let f = Superfunction::even(0, phi0.clone());
    value += params.lambda() * star4(&ctx, &f)?.sintegrate()?;
    Ok(value)
}

pub fn action_gw(phi0: &ExpPoly, params: &GWParams) -> Result<f64> {
    real_part(action_gw_complex(phi0, params)?)
}

/// The same action written with `½|[α(i/2)x_μ, φ]|²` and
/// `(Ω²/2)|{α(i/2)x_μ, φ}|²` in place of the derivative and harmonic terms.
pub fn action_gw_commutator_form(phi0: &ExpPoly, params: &GWParams, alpha: f64) -> Result<Complex64> {
    let ctx = &params.body_context()?;
    let f = Superfunction::even(0, phi0.clone());
    let mut value = Complex64::new(0.0, 0.0);
    for mu in 1..=2 {
        let g = Derivation::Even(mu).generator_on(alpha, 0)?;
        let comm = ctx.star_comm(&g, &f)?;
        let anti = ctx.star_anticomm(&g, &f)?;
        value += 0.5 * ctx.star(&comm.sconj(), &comm)?.sintegrate()?;
        value += 0.5 * params.omega_sq() * ctx.star(&anti.sconj(), &anti)?.sintegrate()?;
    }
    value += 0.5 * params.mass * params.mass * f.smul(&f)?.sintegrate()?;
    value += params.lambda() * star4(ctx, &f)?.sintegrate()?;
    Ok(value)
}

/// Real Gaussian-type test fields on `ℝ²`.
pub fn default_fields() -> Vec<ExpPoly> {
    let one = Complex64::new(1.0, 0.0);
    let diag = |a: f64, b: f64| DMatrix::from_row_slice(2, 2, &[Complex64::new(-a, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-b, 0.0)]);
    let zero = [Complex64::new(0.0, 0.0); 2];
    vec![
        ExpPoly::exponential(one, &diag(0.5, 0.5), &zero).expect("2x2"),
        ExpPoly::exponential(Complex64::new(0.8, 0.0), &diag(0.5, 1.0), &zero).expect("2x2"),
        ExpPoly::exponential(one, &diag(0.7, 0.4), &[Complex64::new(0.3, 0.0), Complex64::new(-0.2, 0.0)]).expect("2x2"),
    ]
}

/// `(b, θ, Λ, M)` points.
pub fn default_grid() -> Vec<GWParams> {
    let mut out = Vec::new();
    for b in [0.5, 1.0, 2.0] {
        for theta in [0.5, 2.0] {
            for coupling in [0.3, 1.0] {
                out.push(GWParams::new(theta, 1.0, coupling, b).expect("valid grid point"));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct GwPoint {
    pub params: GWParams,
    pub field: usize,
    pub alpha: f64,
    pub action_super: Complex64,
    pub action_gw: Complex64,
    pub commutator_form: Complex64,
    pub relative_deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GwReport {
    pub points: Vec<GwPoint>,
    pub max_deviation: f64,
    /// Largest relative deviation of the commutator form from the direct form.
    pub commutator_form_deviation: f64,
    /// Whether `action_gw / action_super` is the same constant at every point,
    /// i.e. whether any fixed trace normalisation could close the gap.
    pub calibration_independent: bool,
    pub max_imaginary_residue: f64,
    pub passed: bool,
}

impl GwReport {
    pub fn to_json(&self) -> Value {
        let points: Vec<Value> = self
            .points
            .iter()
            .map(|p| {
                json!({
                    "b": p.params.b,
                    "theta": p.params.theta,
                    "Lambda": p.params.coupling,
                    "M": p.params.mass,
                    "Omega_sq": p.params.omega_sq(),
                    "lambda": p.params.lambda(),
                    "field": p.field,
                    "alpha": p.alpha,
                    "action_super": [p.action_super.re, p.action_super.im],
                    "action_gw": [p.action_gw.re, p.action_gw.im],
                    "relative_deviation": p.relative_deviation,
                })
            })
            .collect();
        json!({
            "points": points,
            "max_deviation": self.max_deviation,
            "commutator_form_deviation": self.commutator_form_deviation,
            "calibration_independent": self.calibration_independent,
            "max_imaginary_residue": self.max_imaginary_residue,
            "passed": self.passed,
        })
    }
}

/// Compares the superfield action under `φ₁ = bφ₀` with the harmonic action
/// at `Ω² = b⁴θ²/16`, `λ = Λ(1 + b⁴θ²/16)` on every grid point and field.
pub fn verify_gw(grid: &[GWParams], fields: &[ExpPoly], tol: f64) -> Result<GwReport> {
    let mut points = Vec::new();
    for params in grid {
        let ctx = params.context()?;
        let alpha = calibrate_alpha(&ctx)?;
        for (idx, phi0) in fields.iter().enumerate() {
            let field = Superfield::identified(phi0.clone(), params.b)?;
            let s = action_super_terms(&ctx, &field, params, alpha)?.total();
            let g = action_gw_complex(phi0, params)?;
            let cf = action_gw_commutator_form(phi0, params, alpha)?;
            points.push(GwPoint {
                params: *params,
                field: idx,
                alpha,
                action_super: s,
                action_gw: g,
                commutator_form: cf,
                relative_deviation: (s - g).norm() / g.norm().max(f64::MIN_POSITIVE),
            });
        }
    }
    let max_deviation = points.iter().map(|p| p.relative_deviation).fold(0.0, f64::max);
    let commutator_form_deviation =
        points.iter().map(|p| (p.commutator_form - p.action_gw).norm() / p.action_gw.norm().max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
    let max_imaginary_residue = points.iter().map(|p| p.action_super.im.abs().max(p.action_gw.im.abs())).fold(0.0, f64::max);
    let ratios: Vec<Complex64> = points.iter().map(|p| p.action_gw / p.action_super).collect();
    let calibration_independent = ratios.iter().all(|r| r.is_finite() && (r - ratios[0]).norm() <= tol * ratios[0].norm());
    let distinct: BTreeSet<u64> = points.iter().map(|p| p.params.b.to_bits()).collect();
    let passed = max_deviation <= tol && calibration_independent && max_imaginary_residue <= REALITY_TOL && !distinct.is_empty();
    Ok(GwReport { points, max_deviation, commutator_form_deviation, calibration_independent, max_imaginary_residue, passed })
}
