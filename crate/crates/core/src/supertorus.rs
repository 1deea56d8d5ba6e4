//! The noncommutative supertorus: words in `U_j^{±1}, V_j^{±1}, Γ_k, Ξ_ℓ`,
//! rewritten to the normal order `U^a V^b Γ^S Ξ^T` with exact phases.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::grassmann::IndexSet;
use crate::starprod::DeformationContext;
use crate::superfun::Superfunction;
use crate::udf::{udf_product, ActionSpec};

/// Generator counts: `m` pairs `(U_j, V_j)`, `p` generators `Γ_k`, `q` generators `Ξ_ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusDims {
    pub m: usize,
    pub p: usize,
    pub q: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    U(usize, i64),
    V(usize, i64),
    Gamma(usize),
    Xi(usize),
}

impl Letter {
    fn key(self) -> (u8, usize) {
        match self {
            Letter::U(j, _) => (0, j),
            Letter::V(j, _) => (1, j),
            Letter::Gamma(k) => (2, k),
            Letter::Xi(l) => (3, l),
        }
    }

    pub fn is_odd(self) -> bool {
        matches!(self, Letter::Gamma(_) | Letter::Xi(_))
    }

    fn dagger(self) -> Self {
        match self {
            Letter::U(j, e) => Letter::U(j, -e),
            Letter::V(j, e) => Letter::V(j, -e),
            odd => odd,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, idx, e) = match *self {
            Letter::U(j, e) => ("U", j, e),
            Letter::V(j, e) => ("V", j, e),
            Letter::Gamma(k) => ("G", k, 1),
            Letter::Xi(l) => ("X", l, 1),
        };
        if e == 1 {
            write!(f, "{name}{idx}")
        } else {
            write!(f, "{name}{idx}^{e}")
        }
    }
}

/// `c · e^{2πiθ·k} · θ^j`, stored as `(k, j) ↦ c`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Phase {
    parts: BTreeMap<(i64, u32), Complex64>,
}

impl Phase {
    pub fn one() -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), 0, 0)
    }

    pub fn monomial(c: Complex64, k: i64, j: u32) -> Self {
        let mut parts = BTreeMap::new();
        if c != Complex64::new(0.0, 0.0) {
            parts.insert((k, j), c);
        }
        Self { parts }
    }

    pub fn parts(&self) -> impl Iterator<Item = ((i64, u32), Complex64)> + '_ {
        self.parts.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut parts = self.parts.clone();
        for (&key, &c) in &other.parts {
            let slot = parts.entry(key).or_insert(Complex64::new(0.0, 0.0));
            *slot += c;
            if *slot == Complex64::new(0.0, 0.0) {
                parts.remove(&key);
            }
        }
        Self { parts }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (&(k1, j1), &c1) in &self.parts {
            for (&(k2, j2), &c2) in &other.parts {
                out = out.add(&Self::monomial(c1 * c2, k1 + k2, j1 + j2));
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { parts: self.parts.iter().map(|(&k, &v)| (k, v * c)).filter(|(_, v)| *v != Complex64::new(0.0, 0.0)).collect() }
    }

    /// Complex conjugate for real `θ`.
    pub fn conj(&self) -> Self {
        Self { parts: self.parts.iter().map(|(&(k, j), &c)| ((-k, j), c.conj())).collect() }
    }

    pub fn evaluate(&self, theta: f64) -> Complex64 {
        self.parts
            .iter()
            .map(|(&(k, j), &c)| c * Complex64::new(0.0, 2.0 * PI * theta * k as f64).exp() * theta.powi(j as i32))
            .sum()
    }

    /// Symbolic rendering, e.g. `exp(-2*pi*i*0.5)` for `k = -1` at `θ = 0.5`.
    pub fn render(&self, theta: f64) -> String {
        if self.parts.is_empty() {
            return "0".into();
        }
        let rendered: Vec<String> = self
            .parts
            .iter()
            .map(|(&(k, j), &c)| {
                let mut factors = Vec::new();
                if c != Complex64::new(1.0, 0.0) || (k == 0 && j == 0) {
                    factors.push(render_complex(c));
                }
                if k != 0 {
                    factors.push(format!("exp({}*pi*i*{theta})", 2 * k));
                }
                if j > 0 {
                    factors.push(if j == 1 { format!("{theta}") } else { format!("{theta}^{j}") });
                }
                factors.join("*")
            })
            .collect();
        rendered.join(" + ")
    }
}

fn render_complex(c: Complex64) -> String {
    match (c.re, c.im) {
        (re, 0.0) => format!("{re}"),
        (0.0, im) => format!("{im}i"),
        (re, im) => format!("({re}{im:+}i)"),
    }
}

/// Normal-ordered word `U^a V^b Γ^S Ξ^T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalWord {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub s: IndexSetBits,
    pub t: IndexSetBits,
}

/// Odd generator set as a bit mask, 0-based.
pub type IndexSetBits = u32;

impl NormalWord {
    pub fn identity(dims: TorusDims) -> Self {
        Self { a: vec![0; dims.m], b: vec![0; dims.m], s: 0, t: 0 }
    }

    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        out.extend(self.a.iter().enumerate().filter(|(_, &e)| e != 0).map(|(j, &e)| Letter::U(j + 1, e)));
        out.extend(self.b.iter().enumerate().filter(|(_, &e)| e != 0).map(|(j, &e)| Letter::V(j + 1, e)));
        out.extend((0..32).filter(|k| self.s >> k & 1 == 1).map(|k| Letter::Gamma(k + 1)));
        out.extend((0..32).filter(|l| self.t >> l & 1 == 1).map(|l| Letter::Xi(l + 1)));
        out
    }

    pub fn parity(&self) -> u8 {
        ((self.s.count_ones() + self.t.count_ones()) % 2) as u8
    }
}

impl fmt::Display for NormalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = self.letters();
        if letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = letters.iter().map(Letter::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Every single-step rewrite of the word at one adjacent position.
pub fn rewrite_steps(word: &[Letter]) -> Vec<(Phase, Vec<Letter>)> {
    let mut out = Vec::new();
    for i in 0..word.len().saturating_sub(1) {
        if let Some((phase, replacement)) = rewrite_pair(word[i], word[i + 1]) {
            let mut next = word[..i].to_vec();
            next.extend(replacement);
            next.extend_from_slice(&word[i + 2..]);
            out.push((phase, next));
        }
    }
    // a zero exponent is a redex on its own
    for (i, l) in word.iter().enumerate() {
        if matches!(l, Letter::U(_, 0) | Letter::V(_, 0)) {
            let mut next = word.to_vec();
            next.remove(i);
            out.push((Phase::one(), next));
        }
    }
    out
}

fn rewrite_pair(x: Letter, y: Letter) -> Option<(Phase, Vec<Letter>)> {
    let one = Complex64::new(1.0, 0.0);
    match (x, y) {
        (Letter::U(i, e), Letter::U(j, f)) if i == j => Some((Phase::one(), vec![Letter::U(i, e + f)])),
        (Letter::V(i, e), Letter::V(j, f)) if i == j => Some((Phase::one(), vec![Letter::V(i, e + f)])),
        (Letter::Gamma(k), Letter::Gamma(l)) if k == l => Some((Phase::monomial(Complex64::new(0.0, 1.0), 0, 1), vec![])),
        (Letter::Xi(k), Letter::Xi(l)) if k == l => Some((Phase::monomial(Complex64::new(0.0, -1.0), 0, 1), vec![])),
        // V^e U^f = e^{−2πiθ·ef} U^f V^e
        (Letter::V(i, e), Letter::U(j, f)) if i == j => Some((Phase::monomial(one, -e * f, 0), vec![y, x])),
        _ if x.key() > y.key() => {
            let sign = if x.is_odd() && y.is_odd() { -1.0 } else { 1.0 };
            Some((Phase::monomial(Complex64::new(sign, 0.0), 0, 0), vec![y, x]))
        }
        _ => None,
    }
}

fn to_normal_word(dims: TorusDims, word: &[Letter]) -> NormalWord {
    let mut nw = NormalWord::identity(dims);
    for &l in word {
        match l {
            Letter::U(j, e) => nw.a[j - 1] += e,
            Letter::V(j, e) => nw.b[j - 1] += e,
            Letter::Gamma(k) => nw.s |= 1 << (k - 1),
            Letter::Xi(l) => nw.t |= 1 << (l - 1),
        }
    }
    nw
}

/// Rewrites with the leftmost redex until none is left.
pub fn normalize_word(dims: TorusDims, word: &[Letter]) -> (Phase, NormalWord) {
    let mut phase = Phase::one();
    let mut current = word.to_vec();
    while let Some((p, next)) = rewrite_steps(&current).into_iter().next() {
        phase = phase.mul(&p);
        current = next;
    }
    (phase, to_normal_word(dims, &current))
}

type PhaseKey = Vec<(i64, u32, u64, u64)>;

/// All normal forms reachable by any rewrite order. A confluent system
/// yields exactly one.
pub fn all_normal_forms(dims: TorusDims, word: &[Letter]) -> Vec<(Phase, NormalWord)> {
    let mut seen: BTreeSet<(PhaseKey, NormalWord)> = BTreeSet::new();
    let mut out = Vec::new();
    let mut stack = vec![(Phase::one(), word.to_vec())];
    while let Some((phase, w)) = stack.pop() {
        let steps = rewrite_steps(&w);
        if steps.is_empty() {
            let nw = to_normal_word(dims, &w);
            let key: Vec<_> = phase.parts().map(|((k, j), c)| (k, j, (c.re + 0.0).to_bits(), (c.im + 0.0).to_bits())).collect();
            if seen.insert((key, nw.clone())) {
                out.push((phase, nw));
            }
            continue;
        }
        for (p, next) in steps {
            stack.push((phase.mul(&p), next));
        }
    }
    out
}

/// Finite sum of normal-ordered words with exact phase coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SupertorusElement {
    dims: TorusDims,
    terms: BTreeMap<NormalWord, Phase>,
}

impl SupertorusElement {
    pub fn zero(dims: TorusDims) -> Self {
        Self { dims, terms: BTreeMap::new() }
    }

    pub fn one(dims: TorusDims) -> Self {
        Self::from_word(dims, Phase::one(), &[]).expect("empty word is valid")
    }

    pub fn dims(&self) -> TorusDims {
        self.dims
    }

    /// Normal form of `phase · word`.
    pub fn from_word(dims: TorusDims, phase: Phase, word: &[Letter]) -> Result<Self> {
        for &l in word {
            let (bound, idx, name) = match l {
                Letter::U(j, _) => (dims.m, j, "U"),
                Letter::V(j, _) => (dims.m, j, "V"),
                Letter::Gamma(k) => (dims.p, k, "G"),
                Letter::Xi(k) => (dims.q, k, "X"),
            };
            if idx == 0 || idx > bound {
                return Err(Error::Dimension(format!("{name}{idx} outside the generator range 1..={bound}")));
            }
        }
        let (p, nw) = normalize_word(dims, word);
        let mut out = Self::zero(dims);
        out.add_term(nw, phase.mul(&p));
        Ok(out)
    }

    pub fn generator(dims: TorusDims, letter: Letter) -> Result<Self> {
        Self::from_word(dims, Phase::one(), &[letter])
    }

    fn add_term(&mut self, nw: NormalWord, phase: Phase) {
        let sum = self.terms.get(&nw).map_or(phase.clone(), |p| p.add(&phase));
        if sum.is_zero() {
            self.terms.remove(&nw);
        } else {
            self.terms.insert(nw, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NormalWord, &Phase)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (nw, p) in &other.terms {
            out.add_term(nw.clone(), p.clone());
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.dims);
        for (nw, p) in &self.terms {
            out.add_term(nw.clone(), p.scale(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dims);
        for (w1, p1) in &self.terms {
            for (w2, p2) in &other.terms {
                let mut word = w1.letters();
                word.extend(w2.letters());
                let (p, nw) = normalize_word(self.dims, &word);
                out.add_term(nw, p1.mul(p2).mul(&p));
            }
        }
        out
    }

    /// `(c·l₁⋯l_k)† = (−1)^{o(o−1)/2} c̄ · l_k†⋯l₁†` with `o` odd letters.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zero(self.dims);
        for (nw, p) in &self.terms {
            let letters = nw.letters();
            let o = letters.iter().filter(|l| l.is_odd()).count();
            let sign = if (o * o.saturating_sub(1) / 2) % 2 == 1 { -1.0 } else { 1.0 };
            let reversed: Vec<Letter> = letters.iter().rev().map(|l| l.dagger()).collect();
            let (q, w) = normalize_word(self.dims, &reversed);
            out.add_term(w, p.conj().mul(&q).scale(Complex64::new(sign, 0.0)));
        }
        out
    }

    /// `Some(parity)` for homogeneous elements.
    pub fn parity(&self) -> Option<u8> {
        let parities: BTreeSet<u8> = self.terms.keys().map(NormalWord::parity).collect();
        match parities.len() {
            0 => Some(0),
            1 => parities.into_iter().next(),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_json(&self, theta: f64) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(nw, p)| {
                let value = p.evaluate(theta);
                json!({ "word": nw.to_string(), "phase": p.render(theta), "value": [value.re, value.im] })
            })
            .collect();
        json!({ "terms": terms })
    }
}

impl fmt::Display for SupertorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(nw, p)| format!("[{p:?}] {nw}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Parses `"2.5*V1 U1^-1 G1 + 0.5i*X1"`. Errors carry the 1-based column.
pub fn parse_torus(dims: TorusDims, src: &str) -> Result<SupertorusElement> {
    let mut out = SupertorusElement::zero(dims);
    let mut sign = 1.0;
    for (text, start, next_sign) in split_terms(src) {
        if text.trim().is_empty() {
            return Err(Error::Invalid(format!("column {}: expected a term", start + text.len())));
        }
        let (coeff, word) = parse_term(text, start)?;
        let term = SupertorusElement::from_word(dims, Phase::monomial(coeff * sign, 0, 0), &word)
            .map_err(|e| Error::Invalid(format!("column {start}: {e}")))?;
        out = out.add(&term);
        sign = next_sign;
    }
    Ok(out)
}

/// Splits at top-level `+`/`-` that are not part of an exponent or number.
fn split_terms(src: &str) -> Vec<(&str, usize, f64)> {
    let mut out = Vec::new();
    let mut start = 0;
    let bytes = src.as_bytes();
    for (i, &ch) in bytes.iter().enumerate() {
        if (ch == b'+' || ch == b'-') && i > start {
            let prev = src[start..i].trim_end();
            let glued = prev.ends_with('^') || prev.ends_with('e') && prev.chars().rev().nth(1).is_some_and(|c| c.is_ascii_digit());
            if !glued && !prev.is_empty() && !prev.ends_with('*') {
                out.push((&src[start..i], start + 1, if ch == b'-' { -1.0 } else { 1.0 }));
                start = i + 1;
            }
        }
    }
    out.push((&src[start..], start + 1, 1.0));
    out
}

fn parse_term(text: &str, col: usize) -> Result<(Complex64, Vec<Letter>)> {
    let err = |offset: usize, msg: &str| Error::Invalid(format!("column {}: {msg}", col + offset));
    let (coeff, rest, rest_offset) = match text.find('*') {
        Some(pos) => {
            let raw = text[..pos].trim();
            let value = parse_coefficient(raw).ok_or_else(|| err(0, &format!("bad coefficient '{raw}'")))?;
            (value, &text[pos + 1..], pos + 1)
        }
        None => (Complex64::new(1.0, 0.0), text, 0),
    };
    let mut word = Vec::new();
    let mut offset = rest_offset;
    for token in rest.split_whitespace() {
        let at = text[offset..].find(token).map_or(offset, |p| p + offset);
        offset = at + token.len();
        if token == "1" {
            continue;
        }
        word.push(parse_letter(token).ok_or_else(|| err(at, &format!("unknown generator '{token}'")))?);
    }
    if rest.trim().is_empty() && text.contains('*') {
        return Err(err(text.len(), "expected a word after '*'"));
    }
    Ok((coeff, word))
}

fn parse_coefficient(raw: &str) -> Option<Complex64> {
    let raw = raw.trim().trim_start_matches('(').trim_end_matches(')');
    if let Some(im) = raw.strip_suffix('i') {
        let v = match im.trim() {
            "" | "+" => 1.0,
            "-" => -1.0,
            s => s.parse().ok()?,
        };
        return Some(Complex64::new(0.0, v));
    }
    raw.parse().ok().map(|v| Complex64::new(v, 0.0))
}

fn parse_letter(token: &str) -> Option<Letter> {
    let (head, exp) = match token.split_once('^') {
        Some((h, e)) => (h, e.parse::<i64>().ok()?),
        None => (token, 1),
    };
    let mut chars = head.chars();
    let kind = chars.next()?;
    let idx: usize = chars.as_str().parse().ok()?;
    match kind {
        'U' => Some(Letter::U(idx, exp)),
        'V' => Some(Letter::V(idx, exp)),
        'G' if exp == 1 => Some(Letter::Gamma(idx)),
        'X' if exp == 1 => Some(Letter::Xi(idx)),
        _ => None,
    }
}

/// Outcome of comparing torus relations with the deformed trigonometric algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusUdfReport {
    /// `θ_torus / θ_star`.
    pub theta_scale: f64,
    /// Factor `λ` in `Γ_k ↦ λ ξ_k`, `Ξ_ℓ ↦ λ ξ_{p+ℓ}`.
    pub odd_scale: f64,
    pub max_deviation: f64,
    pub relations: Vec<(String, f64)>,
    pub consistent: bool,
}

impl TorusUdfReport {
    pub fn to_json(&self) -> Value {
        let relations: BTreeMap<&str, f64> = self.relations.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        json!({
            "theta_scale": self.theta_scale,
            "odd_scale": self.odd_scale,
            "max_deviation": self.max_deviation,
            "relations": relations,
            "consistent": self.consistent,
        })
    }
}

/// Image of `U^a V^b Γ^S Ξ^T` in the trigonometric algebra on `ℝ^{2m|p+q}`:
/// `e^{iπθ a·b} e^{2πi(a·x + b·y)} λ^{|S|+|T|} ξ^{S ∪ (p+T)}`.
pub fn realize(dims: TorusDims, nw: &NormalWord, theta_torus: f64, odd_scale: f64) -> Result<Superfunction> {
    let n = dims.p + dims.q;
    let k: Vec<f64> = nw.a.iter().chain(&nw.b).map(|&e| 2.0 * PI * e as f64).collect();
    let ab: i64 = nw.a.iter().zip(&nw.b).map(|(x, y)| x * y).sum();
    let mut elements: Vec<usize> = (0..dims.p).filter(|k| nw.s >> k & 1 == 1).map(|k| k + 1).collect();
    elements.extend((0..dims.q).filter(|l| nw.t >> l & 1 == 1).map(|l| dims.p + l + 1));
    let c = Complex64::new(0.0, PI * theta_torus * ab as f64).exp() * odd_scale.powi(elements.len() as i32);
    let set = IndexSet::new(n, &elements)?;
    Ok(Superfunction::component(set, ExpPoly::plane_wave(c, &k)))
}

pub fn realize_element(e: &SupertorusElement, theta_torus: f64, odd_scale: f64) -> Result<Superfunction> {
    let dims = e.dims();
    let mut out = Superfunction::zero(2 * dims.m, dims.p + dims.q);
    for (nw, phase) in e.terms() {
        out = out.add(&realize(dims, nw, theta_torus, odd_scale)?.scale(phase.evaluate(theta_torus)))?;
    }
    Ok(out)
}

/// `θ_torus / θ_star` from the `U₁V₁`/`V₁U₁` commutation phase, read at a
/// small probe parameter so the phase does not wrap.
fn probe_theta_scale(ctx: &DeformationContext, dims: TorusDims) -> Result<f64> {
    const PROBE: f64 = 1e-3;
    let probe = DeformationContext::new(PROBE, dims.m, dims.p + dims.q, ctx.signature())?;
    let spec = ActionSpec::trig(dims.m, dims.p + dims.q)?;
    let origin = vec![0.0; 2 * dims.m];
    let u = realize(dims, &to_normal_word(dims, &[Letter::U(1, 1)]), 0.0, 1.0)?;
    let v = realize(dims, &to_normal_word(dims, &[Letter::V(1, 1)]), 0.0, 1.0)?;
    let uv = udf_product(&probe, &spec, &u, &v)?.evaluate(&origin).body();
    let vu = udf_product(&probe, &spec, &v, &u)?.evaluate(&origin).body();
    Ok((uv / vu).arg() / (2.0 * PI * PROBE))
}

/// Derives the rescaling from the `U₁V₁` phase and the square of the first
/// odd generator, then checks every generator-pair product under it.
pub fn torus_vs_udf(ctx: &DeformationContext, tol: f64) -> Result<TorusUdfReport> {
    let (p, q) = ctx.signature();
    let dims = TorusDims { m: ctx.m(), p, q };
    let spec = ActionSpec::trig(dims.m, dims.p + dims.q)?;
    let theta = ctx.theta();
    let origin = vec![0.0; 2 * dims.m];

    let theta_scale = if dims.m > 0 { probe_theta_scale(ctx, dims)? } else { f64::NAN };
    let theta_t = if theta_scale.is_finite() { theta_scale * theta } else { theta };
    let mut odd_scale = f64::NAN;
    if dims.p + dims.q > 0 {
        let xi = realize(dims, &first_odd(dims), 0.0, 1.0)?;
        let sq = udf_product(ctx, &spec, &xi, &xi)?.evaluate(&origin).body();
        let sign = if dims.p > 0 { 1.0 } else { -1.0 };
        // λ² · (ξ ★ ξ) = ±iθ_torus
        odd_scale = (Complex64::new(0.0, sign * theta_t) / sq).sqrt().re;
    }
    let lambda = if odd_scale.is_finite() { odd_scale } else { 1.0 };

    let mut generators = Vec::new();
    for j in 1..=dims.m {
        generators.extend([Letter::U(j, 1), Letter::V(j, 1), Letter::U(j, -1), Letter::V(j, -1)]);
    }
    generators.extend((1..=dims.p).map(Letter::Gamma));
    generators.extend((1..=dims.q).map(Letter::Xi));

    let mut relations = Vec::new();
    let mut max_deviation: f64 = 0.0;
    for &x in &generators {
        for &y in &generators {
            let torus = SupertorusElement::from_word(dims, Phase::one(), &[x, y])?;
            let expected = realize_element(&torus, theta_t, lambda)?;
            let a = realize_element(&SupertorusElement::generator(dims, x)?, theta_t, lambda)?;
            let b = realize_element(&SupertorusElement::generator(dims, y)?, theta_t, lambda)?;
            let dev = udf_product(ctx, &spec, &a, &b)?.deviation(&expected);
            max_deviation = max_deviation.max(dev);
            relations.push((format!("{x} {y}"), dev));
        }
    }
    Ok(TorusUdfReport { theta_scale, odd_scale, max_deviation, consistent: max_deviation <= tol, relations })
}

fn first_odd(dims: TorusDims) -> NormalWord {
    let letter = if dims.p > 0 { Letter::Gamma(1) } else { Letter::Xi(1) };
    to_normal_word(dims, &[letter])
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: TorusDims = TorusDims { m: 1, p: 1, q: 1 };

    fn word(src: &str) -> Vec<Letter> {
        src.split_whitespace().map(|t| parse_letter(t).unwrap()).collect()
    }

    #[test]
    fn vu_swaps_with_inverse_phase() {
        let (p, nw) = normalize_word(D, &word("V1 U1"));
        assert_eq!(nw.to_string(), "U1 V1");
        assert_eq!(p, Phase::monomial(Complex64::new(1.0, 0.0), -1, 0));
        assert_eq!(p.render(0.5), "exp(-2*pi*i*0.5)");
    }

    #[test]
    fn odd_squares() {
        let (p, nw) = normalize_word(D, &word("G1 G1"));
        assert_eq!(nw, NormalWord::identity(D));
        assert_eq!(p, Phase::monomial(Complex64::new(0.0, 1.0), 0, 1));
        let (p, _) = normalize_word(D, &word("X1 X1"));
        assert_eq!(p, Phase::monomial(Complex64::new(0.0, -1.0), 0, 1));
    }

    #[test]
    fn odd_generators_anticommute() {
        let (p, nw) = normalize_word(D, &word("X1 G1"));
        assert_eq!(nw.to_string(), "G1 X1");
        assert_eq!(p, Phase::monomial(Complex64::new(-1.0, 0.0), 0, 0));
    }

    #[test]
    fn mixed_word() {
        let (p, nw) = normalize_word(D, &word("V1 G1 U1 G1"));
        assert_eq!(nw.to_string(), "U1 V1");
        assert_eq!(p, Phase::monomial(Complex64::new(0.0, 1.0), -1, 1));
    }

    #[test]
    fn unitary_generators() {
        let u = SupertorusElement::generator(D, Letter::U(1, 1)).unwrap();
        assert_eq!(u.mul(&u.dagger()), SupertorusElement::one(D));
        let v = SupertorusElement::generator(D, Letter::V(1, 1)).unwrap();
        assert_eq!(v.dagger().mul(&v), SupertorusElement::one(D));
    }

    #[test]
    fn dagger_of_odd_pair() {
        let gx = SupertorusElement::from_word(D, Phase::one(), &word("G1 X1")).unwrap();
        assert_eq!(gx.dagger(), gx);
    }

    #[test]
    fn parser_reads_coefficients_and_sums() {
        let e = parse_torus(D, "2.5*V1 U1 - 0.5i*G1 G1 + U1^-1").unwrap();
        let terms: Vec<String> = e.terms().map(|(w, _)| w.to_string()).collect();
        assert_eq!(terms.len(), 3);
        assert!(terms.contains(&"U1^-1".to_string()));
        assert!(parse_torus(D, "U1 Q3").unwrap_err().to_string().contains("column 4"));
        assert!(parse_torus(D, "G2").is_err());
        assert!(parse_torus(D, "U1 +").is_err());
    }
}
