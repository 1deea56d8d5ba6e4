//! Finite sums of `c · x^α · exp(xᵀAx + b·x)` on `ℝ^d`.
//!
//! The class is closed under products, affine substitutions, derivatives and
//! partial Gaussian/Fresnel integration, which is all the star-product kernel
//! needs. Terms sharing the exponent `(A, b)` are stored together with a
//! polynomial prefactor.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::Coefficient;
use crate::poly::{Affine, Exponent, Poly};

type CMat = DMatrix<Complex64>;

const KEY_TOL: f64 = 1e-13;

fn cz() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn c1() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Exponent data plus polynomial prefactor: `poly(x) · exp(xᵀAx + b·x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpTerm {
    /// Symmetric `d×d` matrix, row-major.
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    poly: Poly,
}

impl ExpTerm {
    pub fn a_matrix(&self) -> CMat {
        let d = self.b.len();
        CMat::from_row_slice(d, d, &self.a)
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    fn key_close(&self, a: &[Complex64], b: &[Complex64]) -> bool {
        self.a.iter().zip(a).chain(self.b.iter().zip(b)).all(|(x, y)| (x - y).norm() <= KEY_TOL * (1.0 + x.norm()))
    }

    fn is_pure_polynomial(&self) -> bool {
        self.a.iter().chain(&self.b).all(|z| z.norm() == 0.0)
    }

    /// `A = 0` and `b` purely imaginary.
    fn is_plane_wave(&self) -> bool {
        self.a.iter().all(|z| z.norm() == 0.0) && self.b.iter().all(|z| z.re == 0.0)
    }
}

/// Single-monomial view of a term, the unit of the JSON schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub c: [f64; 2],
    pub alpha: Vec<u16>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<[f64; 2]>>,
    pub b: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpPolyJson {
    pub d: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpPolyFunction {
    d: usize,
    terms: Vec<ExpTerm>,
}

pub type ExpPoly = ExpPolyFunction;

impl ExpPolyFunction {
    pub fn zero(d: usize) -> Self {
        Self { d, terms: Vec::new() }
    }

    pub fn constant(d: usize, c: Complex64) -> Self {
        let mut f = Self::zero(d);
        f.push(vec![cz(); d * d], vec![cz(); d], Poly::constant(d, c));
        f
    }

    pub fn monomial(d: usize, c: Complex64, alpha: &[u16]) -> Self {
        let mut f = Self::zero(d);
        f.push(vec![cz(); d * d], vec![cz(); d], Poly::monomial(d, alpha.to_vec(), c));
        f
    }

    pub fn coordinate(d: usize, i: usize) -> Self {
        let mut alpha = vec![0; d];
        alpha[i] = 1;
        Self::monomial(d, c1(), &alpha)
    }

    /// `c · exp(xᵀAx + b·x)`; `a` is symmetrised.
    pub fn exponential(c: Complex64, a: &CMat, b: &[Complex64]) -> Result<Self> {
        let d = b.len();
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::Dimension(format!("A is {}x{} for d = {d}", a.nrows(), a.ncols())));
        }
        let sym = (a + a.transpose()) * Complex64::new(0.5, 0.0);
        let mut f = Self::zero(d);
        f.push(row_major(&sym), b.to_vec(), Poly::constant(d, c));
        Ok(f)
    }

    /// `poly(x) · exp(xᵀAx + b·x)`; `a` is symmetrised.
    pub fn from_parts(a: &CMat, b: &[Complex64], poly: Poly) -> Result<Self> {
        let d = b.len();
        if a.nrows() != d || a.ncols() != d || poly.nvars() != d {
            return Err(Error::Dimension(format!("exponent data does not match d = {d}")));
        }
        let sym = (a + a.transpose()) * Complex64::new(0.5, 0.0);
        let mut f = Self::zero(d);
        f.push(row_major(&sym), b.to_vec(), poly);
        Ok(f)
    }

    /// `c · exp(-Σ w_i x_i²)` for real widths.
    pub fn gaussian(c: Complex64, widths: &[f64]) -> Self {
        let d = widths.len();
        let a = CMat::from_fn(d, d, |i, j| if i == j { Complex64::new(-widths[i], 0.0) } else { cz() });
        Self::exponential(c, &a, &vec![cz(); d]).expect("square by construction")
    }

    /// `c · exp(i k·x)`.
    pub fn plane_wave(c: Complex64, k: &[f64]) -> Self {
        let d = k.len();
        let b: Vec<Complex64> = k.iter().map(|&ki| Complex64::new(0.0, ki)).collect();
        Self::exponential(c, &CMat::zeros(d, d), &b).expect("square by construction")
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, a: Vec<Complex64>, b: Vec<Complex64>, poly: Poly) {
        if poly.is_zero() {
            return;
        }
        if let Some(pos) = self.terms.iter().position(|t| t.key_close(&a, &b)) {
            self.terms[pos].poly.add_assign(&poly);
            if self.terms[pos].poly.is_zero() {
                self.terms.remove(pos);
            }
        } else {
            self.terms.push(ExpTerm { a, b, poly });
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.d, other.d);
        for t in &other.terms {
            self.push(t.a.clone(), t.b.clone(), t.poly.clone());
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.d);
        if s.norm() == 0.0 {
            return out;
        }
        for t in &self.terms {
            out.push(t.a.clone(), t.b.clone(), t.poly.scale(s));
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Exact pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.d, other.d);
        let mut out = Self::zero(self.d);
        for s in &self.terms {
            for t in &other.terms {
                let a = s.a.iter().zip(&t.a).map(|(x, y)| x + y).collect();
                let b = s.b.iter().zip(&t.b).map(|(x, y)| x + y).collect();
                out.push(a, b, s.poly.mul(&t.poly));
            }
        }
        out
    }

    /// Pointwise conjugate for real arguments.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.d);
        for t in &self.terms {
            out.push(t.a.iter().map(|z| z.conj()).collect(), t.b.iter().map(|z| z.conj()).collect(), t.poly.conj());
        }
        out
    }

    /// `f(L X + c)` as a function of `X ∈ ℝ^{d'}`; `l` is `d × d'`.
    pub fn linear_substitute(&self, l: &CMat, c: &[Complex64]) -> Result<Self> {
        if l.nrows() != self.d || c.len() != self.d {
            return Err(Error::Dimension(format!("substitution of shape {}x{} into d = {}", l.nrows(), l.ncols(), self.d)));
        }
        let new_d = l.ncols();
        let cv = DVector::from_column_slice(c);
        let forms: Vec<Affine> = (0..self.d)
            .map(|i| Affine { coeffs: (0..new_d).map(|j| l[(i, j)]).collect(), constant: c[i] })
            .collect();
        let mut out = Self::zero(new_d);
        for t in &self.terms {
            let a = t.a_matrix();
            let b = DVector::from_column_slice(&t.b);
            let a_new = l.transpose() * &a * l;
            let b_new = l.transpose() * (&b + &a * &cv * Complex64::new(2.0, 0.0));
            let konst = (cv.transpose() * &a * &cv)[(0, 0)] + (b.transpose() * &cv)[(0, 0)];
            let poly = t.poly.substitute(&forms, new_d).scale(konst.exp());
            out.push(row_major(&a_new), b_new.iter().copied().collect(), poly);
        }
        Ok(out)
    }

    /// Substitution `x ↦ x + shift`.
    pub fn translate(&self, shift: &[Complex64]) -> Result<Self> {
        self.linear_substitute(&CMat::identity(self.d, self.d), shift)
    }

    pub fn translate_real(&self, shift: &[f64]) -> Result<Self> {
        let s: Vec<Complex64> = shift.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.translate(&s)
    }

    /// Exact partial derivative `∂/∂x_mu`.
    pub fn derive(&self, mu: usize) -> Result<Self> {
        if mu >= self.d {
            return Err(Error::Dimension(format!("axis {mu} outside d = {}", self.d)));
        }
        let mut out = Self::zero(self.d);
        for t in &self.terms {
            // ∂(P e^Q) = (∂P + P ∂Q) e^Q, ∂Q = 2(Ax)_mu + b_mu
            let mut grad = Poly::constant(self.d, t.b[mu]);
            for j in 0..self.d {
                let coef = t.a[mu * self.d + j] * 2.0;
                if coef.norm() != 0.0 {
                    grad.add_assign(&Poly::variable(self.d, j).scale(coef));
                }
            }
            let poly = t.poly.derive(mu).add(&t.poly.mul(&grad));
            out.push(t.a.clone(), t.b.clone(), poly);
        }
        Ok(out)
    }

    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.evaluate_complex(&xc)
    }

    pub fn evaluate_complex(&self, x: &[Complex64]) -> Complex64 {
        assert_eq!(x.len(), self.d, "evaluation point has wrong dimension");
        let mut total = cz();
        for t in &self.terms {
            let mut q = cz();
            for i in 0..self.d {
                q += t.b[i] * x[i];
                for j in 0..self.d {
                    q += x[i] * t.a[i * self.d + j] * x[j];
                }
            }
            total += t.poly.evaluate(x) * q.exp();
        }
        total
    }

    /// Integrate out the listed variables; the result is a function of the
    /// remaining variables in their original order.
    pub fn integrate_vars(&self, vars: &[usize]) -> Result<Self> {
        let mut is_y = vec![false; self.d];
        for &v in vars {
            if v >= self.d || is_y[v] {
                return Err(Error::Dimension(format!("bad integration variable {v}")));
            }
            is_y[v] = true;
        }
        let ys: Vec<usize> = vars.to_vec();
        let ws: Vec<usize> = (0..self.d).filter(|&i| !is_y[i]).collect();
        let mut out = Self::zero(ws.len());
        for t in &self.terms {
            let (a, b, poly) = integrate_term(t, &ys, &ws)?;
            out.push(a, b, poly);
        }
        Ok(out)
    }

    /// Full integral over `ℝ^d`.
    pub fn integrate(&self) -> Result<Complex64> {
        let all: Vec<usize> = (0..self.d).collect();
        let r = self.integrate_vars(&all)?;
        Ok(r.terms.iter().map(|t| t.poly.evaluate(&[])).sum())
    }

    /// True when every term has `Re(A)` negative definite.
    pub fn is_integrable(&self) -> bool {
        self.terms.iter().all(|t| {
            let re = DMatrix::from_fn(self.d, self.d, |i, j| t.a[i * self.d + j].re);
            self.d == 0 || SymmetricEigen::new(-re).eigenvalues.iter().all(|&l| l > 0.0)
        })
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(ExpTerm::is_pure_polynomial)
    }

    /// Polynomials times plane waves only.
    pub fn is_plane_wave_class(&self) -> bool {
        self.terms.iter().all(ExpTerm::is_plane_wave)
    }

    /// Flattened single-monomial terms `(c, α, A, b)`.
    pub fn term_list(&self) -> Vec<(Complex64, Exponent, CMat, Vec<Complex64>)> {
        let mut out = Vec::new();
        for t in &self.terms {
            for (e, c) in t.poly.terms() {
                out.push((*c, e.clone(), t.a_matrix(), t.b.clone()));
            }
        }
        out
    }

    pub fn to_json(&self) -> ExpPolyJson {
        let terms = self
            .term_list()
            .into_iter()
            .map(|(c, alpha, a, b)| TermJson {
                c: [c.re, c.im],
                alpha,
                a: (0..self.d).map(|i| (0..self.d).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect()).collect(),
                b: b.iter().map(|z| [z.re, z.im]).collect(),
            })
            .collect();
        ExpPolyJson { d: self.d, terms }
    }

    pub fn from_json(json: &ExpPolyJson) -> Result<Self> {
        let d = json.d;
        let mut out = Self::zero(d);
        for t in &json.terms {
            if t.alpha.len() != d || t.b.len() != d || t.a.len() != d || t.a.iter().any(|r| r.len() != d) {
                return Err(Error::Dimension(format!("term does not match d = {d}")));
            }
            let a = CMat::from_fn(d, d, |i, j| Complex64::new(t.a[i][j][0], t.a[i][j][1]));
            let b: Vec<Complex64> = t.b.iter().map(|z| Complex64::new(z[0], z[1])).collect();
            let sym = (&a + a.transpose()) * Complex64::new(0.5, 0.0);
            out.push(row_major(&sym), b, Poly::monomial(d, t.alpha.clone(), Complex64::new(t.c[0], t.c[1])));
        }
        Ok(out)
    }

    /// Deterministic 64-point sample grid in `[-1.25, 1.25]^d`.
    pub fn sample_grid(d: usize) -> Vec<Vec<f64>> {
        (0..64)
            .map(|k| (0..d).map(|i| 2.5 * radical_inverse(k + 1, PRIMES[i % PRIMES.len()]) - 1.25 + 0.01 * (i / PRIMES.len()) as f64).collect())
            .collect()
    }

    /// `max |f − g|` over the sample grid, relative to `max(1, max |f|, max |g|)`.
    pub fn relative_deviation(&self, other: &Self) -> f64 {
        assert_eq!(self.d, other.d);
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for x in Self::sample_grid(self.d) {
            let (u, v) = (self.evaluate(&x), other.evaluate(&x));
            diff = diff.max((u - v).norm());
            scale = scale.max(u.norm()).max(v.norm());
        }
        diff / scale
    }

    /// Structural equality when the exponent keys match, otherwise the
    /// pointwise comparison on the sample grid.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.d != other.d {
            return false;
        }
        self.relative_deviation(other) <= tol
    }

    pub fn max_abs_on_grid(&self) -> f64 {
        Self::sample_grid(self.d).iter().map(|x| self.evaluate(x).norm()).fold(0.0, f64::max)
    }
}

impl Coefficient for ExpPolyFunction {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign(&mut self, other: &Self) {
        ExpPolyFunction::add_assign(self, other);
    }
    fn mul(&self, other: &Self) -> Self {
        ExpPolyFunction::mul(self, other)
    }
    fn scale(&self, s: Complex64) -> Self {
        ExpPolyFunction::scale(self, s)
    }
    fn conj(&self) -> Self {
        ExpPolyFunction::conj(self)
    }
}

const PRIMES: [usize; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut k: usize, base: usize) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut r = 0.0;
    while k > 0 {
        r += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    r
}

fn row_major(m: &CMat) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            v.push(m[(i, j)]);
        }
    }
    v
}

/// Checks that `∫ exp(-yᵀMy + yᵀl)` exists for every real value of the
/// remaining variables, possibly as an oscillatory (Fresnel) integral. The
/// columns of `lin` span the possible linear coefficients `l`. Damped
/// directions are eliminated first and the Schur complement is checked again.
fn check_convergence(m: &CMat, lin: &CMat) -> std::result::Result<(), String> {
    let k = m.nrows();
    if k == 0 {
        return Ok(());
    }
    let re = DMatrix::from_fn(k, k, |i, j| m[(i, j)].re);
    let scale = 1.0 + m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = 1e-10 * scale;
    let eig = SymmetricEigen::new(re);
    if let Some(l) = eig.eigenvalues.iter().find(|&&l| l < -tol) {
        return Err(format!("quadratic form grows along an eigen-direction (eigenvalue {:.3e})", -l));
    }
    let (damped, null): (Vec<usize>, Vec<usize>) = (0..k).partition(|&i| eig.eigenvalues[i] > tol);
    if null.is_empty() {
        return Ok(());
    }
    let basis = |cols: &[usize]| CMat::from_fn(k, cols.len(), |i, j| Complex64::new(eig.eigenvectors[(i, cols[j])], 0.0));
    let qn = basis(&null);
    let m_nn = qn.transpose() * m * &qn;
    let l_n = qn.transpose() * lin;
    if damped.is_empty() {
        let im = DMatrix::from_fn(null.len(), null.len(), |i, j| m_nn[(i, j)].im);
        let min_im = SymmetricEigen::new(im).eigenvalues.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
        if min_im <= tol {
            return Err("degenerate direction: neither damped nor oscillating".into());
        }
        let lin_scale = 1.0 + lin.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if l_n.iter().any(|z| z.re.abs() > 1e-10 * lin_scale) {
            return Err("real linear growth along an oscillatory direction".into());
        }
        return Ok(());
    }
    let qd = basis(&damped);
    let m_dd = qd.transpose() * m * &qd;
    let m_nd = qn.transpose() * m * &qd;
    let inv = m_dd.try_inverse().ok_or("singular damped block")?;
    let schur = &m_nn - &m_nd * &inv * m_nd.transpose();
    let l_red = &l_n - &m_nd * &inv * (qd.transpose() * lin);
    check_convergence(&schur, &l_red)
}

/// `sqrt(det M)` on the branch continuous along `(1-s)·I + s·M`, `s ∈ [0,1]`.
/// `Re M ≥ 0` keeps the path away from singular matrices, so this is the
/// `ε → 0⁺` limit of the regularised Gaussian prefactor.
pub fn sqrt_det_continued(m: &CMat) -> Result<Complex64> {
    let k = m.nrows();
    let id = CMat::identity(k, k);
    let det_at = |s: f64| -> Complex64 { (&id * Complex64::new(1.0 - s, 0.0) + m * Complex64::new(s, 0.0)).lu().determinant() };
    let mut s: f64 = 0.0;
    let mut root = c1();
    let mut det_prev = c1();
    let mut h: f64 = 1.0 / 16.0;
    let mut guard = 0;
    while s < 1.0 {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::Singular("determinant continuation did not converge".into()));
        }
        let s_next = (s + h).min(1.0);
        let d_next = det_at(s_next);
        if d_next.norm() == 0.0 {
            return Err(Error::Singular("singular matrix on the continuation path".into()));
        }
        let ratio = d_next / det_prev;
        if ratio.arg().abs() > 0.5 || ratio.norm() > 4.0 || ratio.norm() < 0.25 {
            h /= 2.0;
            if h < 1e-12 {
                return Err(Error::Singular("determinant continuation step underflow".into()));
            }
            continue;
        }
        root *= ratio.sqrt();
        det_prev = d_next;
        s = s_next;
        h = (h * 1.5).min(0.25);
    }
    Ok(root)
}

fn integrate_term(t: &ExpTerm, ys: &[usize], ws: &[usize]) -> Result<(Vec<Complex64>, Vec<Complex64>, Poly)> {
    let d = t.b.len();
    let k = ys.len();
    let w = ws.len();
    let a = t.a_matrix();
    let m = CMat::from_fn(k, k, |i, j| -a[(ys[i], ys[j])]);
    let a_yw = CMat::from_fn(k, w, |i, j| a[(ys[i], ws[j])]);
    let a_ww = CMat::from_fn(w, w, |i, j| a[(ws[i], ws[j])]);
    let b_y = DVector::from_fn(k, |i, _| t.b[ys[i]]);
    let b_w = DVector::from_fn(w, |i, _| t.b[ws[i]]);

    if k == 0 {
        return Ok((row_major(&a_ww), b_w.iter().copied().collect(), t.poly.clone()));
    }
    let lin = CMat::from_fn(k, w + 1, |i, j| if j == 0 { b_y[i] } else { a_yw[(i, j - 1)] * 2.0 });
    check_convergence(&m, &lin).map_err(|why| {
        Error::Divergence(format!("term with A = {:?}, b = {:?}: {why}", t.a, t.b))
    })?;
    let minv = m.clone().try_inverse().ok_or_else(|| Error::Divergence("singular quadratic form".into()))?;

    let r = &minv * &a_yw;
    let r0 = &minv * &b_y * Complex64::new(0.5, 0.0);
    let a_new = &a_ww + a_yw.transpose() * &minv * &a_yw;
    let b_new = &b_w + a_yw.transpose() * &minv * &b_y;
    let konst = (b_y.transpose() * &minv * &b_y)[(0, 0)] * Complex64::new(0.25, 0.0);
    let pref = Complex64::new(PI.powf(k as f64 / 2.0), 0.0) / sqrt_det_continued(&m)? * konst.exp();

    // substitute y = u + R w + r0 into the polynomial; variables (u, w)
    let nv = k + w;
    let mut forms = vec![Affine { coeffs: vec![cz(); nv], constant: cz() }; d];
    for (a_idx, &yi) in ys.iter().enumerate() {
        let f = &mut forms[yi];
        f.coeffs[a_idx] = c1();
        for j in 0..w {
            f.coeffs[k + j] = r[(a_idx, j)];
        }
        f.constant = r0[a_idx];
    }
    for (j, &wi) in ws.iter().enumerate() {
        forms[wi].coeffs[k + j] = c1();
    }
    let expanded = t.poly.substitute(&forms, nv);

    let sigma = &minv * Complex64::new(0.5, 0.0);
    let mut wick = Wick { sigma, memo: HashMap::new() };
    let mut poly = Poly::zero(w);
    for (e, c) in expanded.terms() {
        let gamma = &e[..k];
        let moment = wick.moment(gamma.to_vec());
        if moment.norm() == 0.0 {
            continue;
        }
        poly.add_term(e[k..].to_vec(), c * moment * pref);
    }
    Ok((row_major(&a_new), b_new.iter().copied().collect(), poly))
}

/// Gaussian moments `E[u^γ]` for covariance `sigma` by Wick recursion.
struct Wick {
    sigma: CMat,
    memo: HashMap<Exponent, Complex64>,
}

impl Wick {
    fn moment(&mut self, gamma: Exponent) -> Complex64 {
        let total: usize = gamma.iter().map(|&g| g as usize).sum();
        if total == 0 {
            return c1();
        }
        if total % 2 == 1 {
            return cz();
        }
        if let Some(v) = self.memo.get(&gamma) {
            return *v;
        }
        let i = gamma.iter().position(|&g| g > 0).unwrap();
        let mut rest = gamma.clone();
        rest[i] -= 1;
        let mut acc = cz();
        for j in 0..rest.len() {
            if rest[j] == 0 {
                continue;
            }
            let mut next = rest.clone();
            next[j] -= 1;
            acc += self.sigma[(i, j)] * f64::from(rest[j]) * self.moment(next);
        }
        self.memo.insert(gamma, acc);
        acc
    }
}
