//! Functions on `G′ = ℝ ⋉_π ℝ^{2m|n}` with the `t`-dependent star product,
//! the Hopf maps of `G′` and the operator `W(f₁ ⊗ f₂) = Δ(f₁) ★ (1 ⊗ f₂)`.
//!
//! Products leave any closed class in `t`, so multi-leg functions are
//! deferred: they are closures evaluated at a tuple of `t` values.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::grassmann::{AuxNumber, Grassmann, IndexSet};
use crate::hilbert::inner_l2;
use crate::sampling::Sampler;
use crate::starprod::{scratch_bit, DeformationContext};
use crate::superfun::Superfunction;

type CMat = DMatrix<Complex64>;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `G′` together with the dilation `π_t = diag(e^{r_i t})` on the even
/// coordinates. Odd coordinates are left fixed.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumGroup {
    m: usize,
    n: usize,
    signature: (usize, usize),
    rates: Vec<f64>,
}

impl QuantumGroup {
    /// Default dilation `(q, p) ↦ (e^t q, e^{−t} p)`, which preserves `ω`.
    pub fn new(m: usize, n: usize, signature: (usize, usize)) -> Result<Self> {
        let rates = (0..2 * m).map(|i| if i < m { 1.0 } else { -1.0 }).collect();
        Self::with_rates(m, n, signature, rates)
    }

    pub fn with_rates(m: usize, n: usize, signature: (usize, usize), rates: Vec<f64>) -> Result<Self> {
        if rates.len() != 2 * m {
            return Err(Error::Dimension(format!("{} dilation rates for {} even coordinates", rates.len(), 2 * m)));
        }
        if signature.0 + signature.1 != n {
            return Err(Error::Dimension(format!("signature {signature:?} does not add up to n = {n}")));
        }
        if 3 * n > 16 {
            return Err(Error::Dimension("three legs need at most 16 odd coordinates".into()));
        }
        Ok(Self { m, n, signature, rates })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pi(&self, t: f64) -> DMatrix<f64> {
        DMatrix::from_fn(2 * self.m, 2 * self.m, |i, j| if i == j { (self.rates[i] * t).exp() } else { 0.0 })
    }

    /// `(t, z)(t′, z′) = (t + t′, z + π_t z′)`.
    pub fn group_mul(&self, a: (f64, &[f64]), b: (f64, &[f64])) -> (f64, Vec<f64>) {
        let pi = self.pi(a.0);
        let z = (0..2 * self.m).map(|i| a.1[i] + pi[(i, i)] * b.1[i]).collect();
        (a.0 + b.0, z)
    }

    pub fn group_inverse(&self, a: (f64, &[f64])) -> (f64, Vec<f64>) {
        let pi = self.pi(-a.0);
        (-a.0, (0..2 * self.m).map(|i| -pi[(i, i)] * a.1[i]).collect())
    }

    /// Star product at parameter `t`; negative `t` is allowed.
    pub fn context(&self, t: f64) -> Result<DeformationContext> {
        if t == 0.0 {
            return Err(Error::Singular("the deformed product is singular at t = 0".into()));
        }
        DeformationContext::with_signed_theta(t, self.m, self.n, self.signature)
    }
}

/// Finite sum `Σ u_k(t) f_k(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QGroupElement {
    terms: Vec<(ExpPoly, Superfunction)>,
    m: usize,
    n: usize,
}

impl QGroupElement {
    pub fn new(m: usize, n: usize) -> Self {
        Self { terms: Vec::new(), m, n }
    }

    pub fn one(m: usize, n: usize) -> Self {
        Self::separable(ExpPoly::constant(1, c(1.0)), Superfunction::one(2 * m, n)).expect("unit is well formed")
    }

    pub fn separable(u: ExpPoly, f: Superfunction) -> Result<Self> {
        if u.dim() != 1 || !f.m().is_multiple_of(2) {
            return Err(Error::Dimension("profile must depend on t only and f on an even number of coordinates".into()));
        }
        let (m, n) = (f.m() / 2, f.n());
        Ok(Self { terms: vec![(u, f)], m, n })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(Error::Dimension("elements on different groups".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self { terms, ..self.clone() })
    }

    pub fn terms(&self) -> &[(ExpPoly, Superfunction)] {
        &self.terms
    }

    pub fn at(&self, t: f64) -> Result<Superfunction> {
        let mut out = Superfunction::zero(2 * self.m, self.n);
        for (u, f) in &self.terms {
            out = out.add(&f.scale(u.evaluate(&[t])))?;
        }
        Ok(out)
    }

    /// `ε(f) = f(0, 0)`, the scalar component at the identity.
    pub fn counit(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|(u, f)| u.evaluate(&[0.0]) * f.evaluate(&vec![0.0; 2 * self.m]).body())
            .sum()
    }
}

/// A function on `k` copies of `G′`, evaluated lazily at `t`-tuples. Leg
type LegEval = Arc<dyn Fn(&[f64]) -> Result<Superfunction> + Send + Sync>;

/// `ℓ` owns even variables `ℓ·2m..(ℓ+1)·2m` and odd variables `ℓ·n..(ℓ+1)·n`.
#[derive(Clone)]
pub struct LegFunction {
    legs: usize,
    eval: LegEval,
}

impl std::fmt::Debug for LegFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LegFunction({} legs)", self.legs)
    }
}

impl LegFunction {
    pub fn new(legs: usize, eval: impl Fn(&[f64]) -> Result<Superfunction> + Send + Sync + 'static) -> Self {
        Self { legs, eval: Arc::new(eval) }
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn at(&self, ts: &[f64]) -> Result<Superfunction> {
        if ts.len() != self.legs {
            return Err(Error::Dimension(format!("{} t-values for {} legs", ts.len(), self.legs)));
        }
        (self.eval)(ts)
    }
}

/// Moves a one-leg superfunction into leg `leg` of `legs`.
fn embed(group: &QuantumGroup, f: &Superfunction, leg: usize, legs: usize) -> Result<Superfunction> {
    let (m2, n) = (2 * group.m, group.n);
    let l = CMat::from_fn(m2, legs * m2, |r, col| c(if col == leg * m2 + r { 1.0 } else { 0.0 }));
    let zero = vec![c(0.0); m2];
    let even = f.body().try_map_coeffs(|g| g.linear_substitute(&l, &zero))?;
    let shift = (leg * n) as u32;
    let body = even.substitute(|g| (g < n as u32).then(|| AuxNumber::generator(g + shift)));
    Superfunction::from_body(legs * m2, legs * n, body)
}

/// `f₁ ⊗ ⋯ ⊗ f_k`.
pub fn tensor(group: &QuantumGroup, legs: &[QGroupElement]) -> LegFunction {
    let group = group.clone();
    let parts = legs.to_vec();
    let k = parts.len();
    LegFunction::new(k, move |ts| {
        let mut out = Superfunction::one(k * 2 * group.m, k * group.n);
        for (leg, (f, &t)) in parts.iter().zip(ts).enumerate() {
            out = out.smul(&embed(&group, &f.at(t)?, leg, k)?)?;
        }
        Ok(out)
    })
}

/// `(f₁ ★ f₂)(t, ·) = f₁(t, ·) ★_t f₂(t, ·)`.
pub fn qg_star(group: &QuantumGroup, f1: &QGroupElement, f2: &QGroupElement) -> LegFunction {
    let (group, f1, f2) = (group.clone(), f1.clone(), f2.clone());
    LegFunction::new(1, move |ts| group.context(ts[0])?.star(&f1.at(ts[0])?, &f2.at(ts[0])?))
}

/// Even substitution matrix for `z_i ↦ z_i + π(z_j + y₁)`, `z_j ↦ z_j + y₂`
/// on a `legs`-leg function, with the two integration slots appended.
fn w_substitution(group: &QuantumGroup, legs: usize, i: usize, j: usize, t_i: f64) -> CMat {
    let m2 = 2 * group.m;
    let x = legs * m2;
    let pi = group.pi(t_i);
    let mut l = CMat::zeros(x, x + 2 * m2);
    for r in 0..x {
        l[(r, r)] = c(1.0);
    }
    for a in 0..m2 {
        l[(i * m2 + a, j * m2 + a)] = c(pi[(a, a)]);
        l[(i * m2 + a, x + a)] = c(pi[(a, a)]);
        l[(j * m2 + a, x + m2 + a)] = c(1.0);
    }
    l
}

/// `W_{ij}`: `W` acting on legs `i` (first) and `j` (second) of `F`.
pub fn w_apply(group: &QuantumGroup, f: &LegFunction, i: usize, j: usize) -> Result<LegFunction> {
    let legs = f.legs();
    if i == j || i >= legs || j >= legs {
        return Err(Error::Dimension(format!("legs ({i}, {j}) of a {legs}-leg function")));
    }
    let (group, inner) = (group.clone(), f.clone());
    Ok(LegFunction::new(legs, move |ts| {
        let mut shifted = ts.to_vec();
        shifted[i] = ts[i] + ts[j];
        let value = inner.at(&shifted)?;
        let (m2, n) = (2 * group.m, group.n);
        let l = w_substitution(&group, legs, i, j, ts[i]);
        let zero = vec![c(0.0); legs * m2];
        let even = value.body().try_map_coeffs(|g| g.linear_substitute(&l, &zero))?;
        let (base_i, base_j) = ((i * n) as u32, (j * n) as u32);
        let integrand: Grassmann<ExpPoly> = even.substitute(|g| {
            if g >= base_i && g < base_i + n as u32 {
                let a = (g - base_i) as usize;
                Some(AuxNumber::generator(g).add(&AuxNumber::generator(base_j + a as u32)).add(&AuxNumber::generator(scratch_bit(0, a))))
            } else if g >= base_j && g < base_j + n as u32 {
                let a = (g - base_j) as usize;
                Some(AuxNumber::generator(g).add(&AuxNumber::generator(scratch_bit(1, a))))
            } else {
                None
            }
        });
        let body = group.context(ts[j])?.contract(&integrand, legs * m2)?;
        Superfunction::from_body(legs * m2, legs * n, body)
    }))
}

/// `Δf(g₁, g₂) = f(g₁g₂)`.
pub fn coproduct(group: &QuantumGroup, f: &QGroupElement) -> LegFunction {
    let (group, f) = (group.clone(), f.clone());
    LegFunction::new(2, move |ts| {
        let (m2, n) = (2 * group.m, group.n);
        let value = f.at(ts[0] + ts[1])?;
        let pi = group.pi(ts[0]);
        let l = CMat::from_fn(m2, 2 * m2, |r, col| {
            if col == r {
                c(1.0)
            } else if col == m2 + r {
                c(pi[(r, r)])
            } else {
                c(0.0)
            }
        });
        let even = value.body().try_map_coeffs(|g| g.linear_substitute(&l, &vec![c(0.0); m2]))?;
        let body = even.substitute(|g| (g < n as u32).then(|| AuxNumber::generator(g).add(&AuxNumber::generator(g + n as u32))));
        Superfunction::from_body(2 * m2, 2 * n, body)
    })
}

/// `(Sf)(g) = f(g⁻¹)` with `(t, z)⁻¹ = (−t, −π_{−t} z)`.
pub fn antipode(group: &QuantumGroup, f: &QGroupElement) -> LegFunction {
    let (group, f) = (group.clone(), f.clone());
    LegFunction::new(1, move |ts| {
        let (m2, n) = (2 * group.m, group.n);
        let value = f.at(-ts[0])?;
        let pi = group.pi(-ts[0]);
        let l = CMat::from_fn(m2, m2, |r, col| c(if r == col { -pi[(r, r)] } else { 0.0 }));
        let even = value.body().try_map_coeffs(|g| g.linear_substitute(&l, &vec![c(0.0); m2]))?;
        let body = even.substitute(|g| (g < n as u32).then(|| AuxNumber::generator(g).neg()));
        Superfunction::from_body(m2, n, body)
    })
}

/// Applies `ε` on one leg of a two-leg function.
pub fn counit_on_leg(group: &QuantumGroup, f: &LegFunction, leg: usize) -> LegFunction {
    let (group, f) = (group.clone(), f.clone());
    LegFunction::new(1, move |ts| {
        let (m2, n) = (2 * group.m, group.n);
        let full = if leg == 0 { vec![0.0, ts[0]] } else { vec![ts[0], 0.0] };
        let value = f.at(&full)?;
        let keep = 1 - leg;
        let l = CMat::from_fn(2 * m2, m2, |r, col| c(if r == keep * m2 + col { 1.0 } else { 0.0 }));
        let even = value.body().try_map_coeffs(|g| g.linear_substitute(&l, &vec![c(0.0); 2 * m2]))?;
        let (drop, keep_base) = ((leg * n) as u32, (keep * n) as u32);
        let body = even.substitute(|g| {
            if g >= drop && g < drop + n as u32 {
                Some(AuxNumber::zero())
            } else if g >= keep_base && g < keep_base + n as u32 {
                Some(AuxNumber::generator(g - keep_base))
            } else {
                None
            }
        });
        Superfunction::from_body(m2, n, body)
    })
}

/// One pentagon sample: three legs.
#[derive(Clone, Debug)]
pub struct PentagonCase {
    pub legs: [QGroupElement; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct PentagonReport {
    pub cases: usize,
    pub t_triples: Vec<[f64; 3]>,
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub passed: bool,
}

impl PentagonReport {
    pub fn to_json(&self) -> Value {
        json!({
            "cases": self.cases,
            "t_triples": self.t_triples,
            "max_deviation": self.max_deviation,
            "passed": self.passed,
        })
    }
}

/// Random leg: `t`-profile times a plane wave with a random odd monomial.
pub fn sample_leg(group: &QuantumGroup, s: &mut Sampler) -> QGroupElement {
    let m2 = 2 * group.m;
    let mut out = QGroupElement::new(group.m, group.n);
    for _ in 0..1 + s.index(2) {
        let profile = ExpPoly::gaussian(s.complex(1.0), &[s.uniform(0.1, 0.5)]);
        let k = s.real_vec(m2, 1.0);
        let f = Superfunction::component(s.index_set(group.n, None), ExpPoly::plane_wave(s.complex(1.0), &k));
        out = out.add(&QGroupElement::separable(profile, f).expect("well formed")).expect("same group");
    }
    out
}

pub fn sample_cases(group: &QuantumGroup, s: &mut Sampler, count: usize) -> Vec<PentagonCase> {
    (0..count).map(|_| PentagonCase { legs: [sample_leg(group, s), sample_leg(group, s), sample_leg(group, s)] }).collect()
}

/// `t`-triples whose partial sums stay away from the singular point.
pub fn sample_t_triples(s: &mut Sampler, count: usize) -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    while out.len() < count {
        let t: [f64; 3] = std::array::from_fn(|_| {
            let mag = s.uniform(0.2, 1.2);
            if s.index(2) == 0 { mag } else { -mag }
        });
        let sums = [t[0] + t[1], t[1] + t[2], t[0] + t[2], t[0] + t[1] + t[2]];
        if sums.iter().all(|x| x.abs() > 0.1) {
            out.push(t);
        }
    }
    out
}

/// `W₁₂W₁₃W₂₃ F = W₂₃W₁₂ F` on every case and `t`-triple.
pub fn pentagon_check(group: &QuantumGroup, cases: &[PentagonCase], triples: &[[f64; 3]], tol: f64) -> Result<PentagonReport> {
    let mut deviations = Vec::new();
    for case in cases {
        let f = tensor(group, &case.legs);
        let lhs = w_apply(group, &w_apply(group, &w_apply(group, &f, 1, 2)?, 0, 2)?, 0, 1)?;
        let rhs = w_apply(group, &w_apply(group, &f, 0, 1)?, 1, 2)?;
        for ts in triples {
            deviations.push(lhs.at(ts)?.deviation(&rhs.at(ts)?));
        }
    }
    let max_deviation = deviations.iter().cloned().fold(0.0, f64::max);
    Ok(PentagonReport { cases: cases.len(), t_triples: triples.to_vec(), passed: max_deviation <= tol, max_deviation, deviations })
}

/// `⟨WF, WG⟩` at `(t₁, t₂)` against `⟨F, G⟩` at `(t₁ + t₂, t₂)`; the
/// `t`-measure is invariant under that shift.
pub fn superunitarity_defect(group: &QuantumGroup, f: &LegFunction, g: &LegFunction, ts: [f64; 2]) -> Result<(Complex64, Complex64)> {
    let (wf, wg) = (w_apply(group, f, 0, 1)?, w_apply(group, g, 0, 1)?);
    let after = inner_l2(&wf.at(&ts)?, &wg.at(&ts)?)?;
    let shifted = [ts[0] + ts[1], ts[1]];
    let before = inner_l2(&f.at(&shifted)?, &g.at(&shifted)?)?;
    Ok((before, after))
}

/// Gaussian leg used for integrable pairings.
pub fn gaussian_leg(group: &QuantumGroup, s: &mut Sampler) -> QGroupElement {
    let m2 = 2 * group.m;
    let widths: Vec<f64> = (0..m2).map(|_| s.uniform(0.5, 1.5)).collect();
    let set: IndexSet = s.index_set(group.n, None);
    let f = Superfunction::component(set, ExpPoly::gaussian(s.complex(1.0), &widths));
    QGroupElement::separable(ExpPoly::constant(1, c(1.0)), f).expect("well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group() -> QuantumGroup {
        QuantumGroup::new(1, 1, (1, 0)).unwrap()
    }

    #[test]
    fn group_law_inverse() {
        let g = group();
        let a = (0.7, vec![0.3, -1.2]);
        let inv = g.group_inverse((a.0, &a.1));
        let id = g.group_mul((a.0, &a.1), (inv.0, &inv.1));
        assert!(id.0.abs() < 1e-15 && id.1.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn unit_squares_to_unit() {
        let g = group();
        let one = QGroupElement::one(1, 1);
        let prod = qg_star(&g, &one, &one);
        for t in [0.3, -0.8, 1.7] {
            assert!(prod.at(&[t]).unwrap().deviation(&Superfunction::one(2, 1)) < 1e-13);
        }
        assert!(matches!(prod.at(&[0.0]), Err(Error::Singular(_))));
    }

    #[test]
    fn w_fixes_unit_first_leg() {
        let g = group();
        let mut s = Sampler::new(4);
        let f2 = sample_leg(&g, &mut s);
        let f = tensor(&g, &[QGroupElement::one(1, 1), f2.clone()]);
        let w = w_apply(&g, &f, 0, 1).unwrap();
        for ts in [[0.4, 0.9], [-0.5, 0.7]] {
            assert!(w.at(&ts).unwrap().deviation(&f.at(&ts).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn counit_of_unit() {
        assert_eq!(QGroupElement::one(1, 2).counit(), c(1.0));
    }

    #[test]
    fn constant_legs_satisfy_pentagon() {
        let g = group();
        let leg = QGroupElement::separable(ExpPoly::constant(1, c(2.0)), Superfunction::one(2, 1)).unwrap();
        let cases = vec![PentagonCase { legs: [leg.clone(), leg.clone(), leg] }];
        let report = pentagon_check(&g, &cases, &[[0.5, 0.7, -0.3]], 0.0).unwrap();
        assert!(report.passed, "{report:?}");
    }
}
