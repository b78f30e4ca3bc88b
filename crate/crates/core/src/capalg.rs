//! The quotient algebra `A = C⟨f, θ, Δ⟩` presented by
//!
//! ```text
//! [θ, f] = d·f      [θ, Δ] = −d·Δ      Δf = B(θ)      fΔ = B(θ − d)
//! ```
//!
//! where `d = deg f` and `B(θ) = c·b(θ/d)` comes from the b-function.
//!
//! Elements are kept in the normal form
//! `Σ_{a≥1} f^a p_a(θ) + p₀(θ) + Σ_{b≥1} q_b(θ) Δ^b`: powers of `f` to the
//! left of their θ-polynomial, powers of `Δ` to the right. Two independent
//! routes reach that form: [`AElement::mul`] multiplies normal forms with
//! closed formulas, and [`reduce_word`] rewrites words letter by letter. The
//! confluence checks compare them.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bsat;
use crate::catalog::CaseInstance;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::upoly::{self, Symbol, UniPoly};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct APresentation {
    d: u32,
    #[serde(rename = "B", with = "upoly::wire_theta")]
    big_b: UniPoly,
}

impl APresentation {
    /// Requires `deg B = d`, a positive leading coefficient and `B(−d) = 0`.
    pub fn new(d: u32, big_b: UniPoly) -> Result<Self> {
        let big_b = big_b.with_symbol(Symbol::Theta);
        if d == 0 {
            return Err(Error::InvalidPresentation("d must be positive".into()));
        }
        if big_b.degree() != Some(d as usize) {
            return Err(Error::InvalidPresentation(format!(
                "deg B = {:?}, expected {d}",
                big_b.degree()
            )));
        }
        if !big_b.leading().is_positive() {
            return Err(Error::InvalidPresentation(
                "leading coefficient of B must be positive".into(),
            ));
        }
        if !big_b.eval(&-Rational::from(d)).is_zero() {
            return Err(Error::InvalidPresentation("B(-d) must vanish".into()));
        }
        Ok(APresentation { d, big_b })
    }

    /// `B(θ) = c·b(θ/d)` for a monic b-function in `s`.
    pub fn from_b_function(d: u32, c: &Rational, b_monic: &UniPoly) -> Result<Self> {
        let big_b = b_monic
            .compose_linear(&Rational::new(1, d), &Rational::zero())
            .scale(c);
        Self::new(d, big_b)
    }

    /// Presentation of a catalog instance, with `B` taken from the computed b-function.
    pub fn for_instance(inst: &CaseInstance) -> Result<Self> {
        let (b, c) = bsat::compute_b(inst)?;
        Self::from_b_function(inst.d, &c, &b)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// The right-hand side of `Δf = B(θ)`.
    pub fn big_b(&self) -> &UniPoly {
        &self.big_b
    }

    /// `c·b(s)` recovered from `B`: `B(d·s)` as a polynomial in `s`.
    pub fn scaled_b(&self) -> UniPoly {
        self.big_b
            .compose_linear(&Rational::from(self.d), &Rational::zero())
            .with_symbol(Symbol::S)
    }

    /// `p(θ + k·d)`.
    fn shift(&self, p: &UniPoly, k: i64) -> UniPoly {
        if k == 0 {
            p.clone()
        } else {
            p.shift(&Rational::from(k * self.d as i64))
        }
    }
}

/// `f^a p(θ) Δ^b`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Triple {
    a: u32,
    p: UniPoly,
    b: u32,
}

impl Triple {
    fn poly(p: UniPoly) -> Self {
        Triple { a: 0, p, b: 0 }
    }
}

/// Rewrites `f^a p Δ^b` with `a, b ≥ 1` via `f p(θ) Δ = p(θ−d)·B(θ−d)`.
fn normalize(pres: &APresentation, mut t: Triple) -> Triple {
    while t.a > 0 && t.b > 0 {
        let shifted = pres.shift(&t.p, -1);
        t.p = &shifted * &pres.shift(&pres.big_b, -1);
        t.a -= 1;
        t.b -= 1;
    }
    t
}

/// `(f^a r Δ^b) · q(θ) = f^a r(θ)·q(θ + b·d) Δ^b`.
fn times_poly(pres: &APresentation, t: Triple, q: &UniPoly) -> Triple {
    let q = pres.shift(q, t.b as i64);
    Triple {
        a: t.a,
        p: &t.p * &q,
        b: t.b,
    }
}

/// `Δ^k f^m = Δ^{k−1} f^{m−1} · B(θ + (m−1)d)`.
fn delta_pow_times_f_pow(pres: &APresentation, k: u32, m: u32) -> Triple {
    if k == 0 || m == 0 {
        return Triple {
            a: m,
            p: UniPoly::one(Symbol::Theta),
            b: k,
        };
    }
    let inner = delta_pow_times_f_pow(pres, k - 1, m - 1);
    times_poly(pres, inner, &pres.shift(&pres.big_b, (m - 1) as i64))
}

/// `f^a p Δ^b · f^a' p' Δ^b'` in normal form.
fn mul_triples(pres: &APresentation, x: &Triple, y: &Triple) -> Triple {
    let mid = delta_pow_times_f_pow(pres, x.b, y.a);
    // f^a p · f^{a''} r Δ^{b''} · p' Δ^{b'}
    let left = pres.shift(&x.p, mid.a as i64);
    let right = pres.shift(&y.p, mid.b as i64);
    normalize(
        pres,
        Triple {
            a: x.a + mid.a,
            p: &(&left * &mid.p) * &right,
            b: mid.b + y.b,
        },
    )
}

/// An element of `A` in normal form.
#[derive(Clone, PartialEq, Eq)]
pub struct AElement {
    pres: Arc<APresentation>,
    pos: BTreeMap<u32, UniPoly>,
    mid: UniPoly,
    neg: BTreeMap<u32, UniPoly>,
}

impl AElement {
    pub fn zero(pres: &Arc<APresentation>) -> Self {
        AElement {
            pres: pres.clone(),
            pos: BTreeMap::new(),
            mid: UniPoly::zero(Symbol::Theta),
            neg: BTreeMap::new(),
        }
    }

    pub fn one(pres: &Arc<APresentation>) -> Self {
        Self::scalar(pres, Rational::one())
    }

    pub fn scalar(pres: &Arc<APresentation>, c: Rational) -> Self {
        Self::theta_poly(pres, UniPoly::constant(Symbol::Theta, c))
    }

    pub fn theta_poly(pres: &Arc<APresentation>, p: UniPoly) -> Self {
        Self::monomial(pres, 0, p, 0)
    }

    pub fn f(pres: &Arc<APresentation>) -> Self {
        Self::monomial(pres, 1, UniPoly::one(Symbol::Theta), 0)
    }

    pub fn theta(pres: &Arc<APresentation>) -> Self {
        Self::theta_poly(pres, UniPoly::var(Symbol::Theta))
    }

    pub fn delta(pres: &Arc<APresentation>) -> Self {
        Self::monomial(pres, 0, UniPoly::one(Symbol::Theta), 1)
    }

    /// `f^a p(θ) Δ^b`, normalized.
    pub fn monomial(pres: &Arc<APresentation>, a: u32, p: UniPoly, b: u32) -> Self {
        let mut out = Self::zero(pres);
        out.add_triple(normalize(pres, Triple { a, p: p.with_symbol(Symbol::Theta), b }));
        out
    }

    fn add_triple(&mut self, t: Triple) {
        debug_assert!(t.a == 0 || t.b == 0);
        if t.p.is_zero() {
            return;
        }
        let slot = if t.a > 0 {
            Some((&mut self.pos, t.a))
        } else if t.b > 0 {
            Some((&mut self.neg, t.b))
        } else {
            None
        };
        match slot {
            Some((map, k)) => {
                let sum = match map.get(&k) {
                    Some(existing) => existing + &t.p,
                    None => t.p,
                };
                if sum.is_zero() {
                    map.remove(&k);
                } else {
                    map.insert(k, sum);
                }
            }
            None => self.mid = &self.mid + &t.p,
        }
    }

    fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        let pos = self.pos.iter().map(|(&a, p)| Triple { a, p: p.clone(), b: 0 });
        let mid = (!self.mid.is_zero()).then(|| Triple::poly(self.mid.clone()));
        let neg = self.neg.iter().map(|(&b, q)| Triple { a: 0, p: q.clone(), b });
        pos.chain(mid).chain(neg)
    }

    pub fn presentation(&self) -> &Arc<APresentation> {
        &self.pres
    }

    pub fn is_zero(&self) -> bool {
        self.pos.is_empty() && self.mid.is_zero() && self.neg.is_empty()
    }

    /// `p_a(θ)` for `a ≥ 1`.
    pub fn f_part(&self, a: u32) -> Option<&UniPoly> {
        self.pos.get(&a)
    }

    /// `p₀(θ)`.
    pub fn theta_part(&self) -> &UniPoly {
        &self.mid
    }

    /// `q_b(θ)` for `b ≥ 1`.
    pub fn delta_part(&self, b: u32) -> Option<&UniPoly> {
        self.neg.get(&b)
    }

    /// `(a, p, b)` for each stored component `f^a p(θ) Δ^b`, highest degree first.
    pub fn components(&self) -> Vec<(u32, UniPoly, u32)> {
        let mut out: Vec<(u32, UniPoly, u32)> =
            self.triples().map(|t| (t.a, t.p, t.b)).collect();
        out.sort_by_key(|(a, _, b)| std::cmp::Reverse(*a as i64 - *b as i64));
        out
    }

    fn check(&self, other: &AElement) -> Result<()> {
        if Arc::ptr_eq(&self.pres, &other.pres) || self.pres == other.pres {
            Ok(())
        } else {
            Err(Error::PresentationMismatch)
        }
    }

    /// Componentwise sum (`a_add`).
    pub fn add(&self, other: &AElement) -> Result<AElement> {
        self.check(other)?;
        let mut out = self.clone();
        for t in other.triples() {
            out.add_triple(t);
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Rational) -> AElement {
        let mut out = AElement::zero(&self.pres);
        for mut t in self.triples() {
            t.p = t.p.scale(k);
            out.add_triple(t);
        }
        out
    }

    pub fn neg(&self) -> AElement {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &AElement) -> Result<AElement> {
        self.add(&other.neg())
    }

    /// Normal form of the product (`a_mul`).
    pub fn mul(&self, other: &AElement) -> Result<AElement> {
        self.check(other)?;
        let mut out = AElement::zero(&self.pres);
        for x in self.triples() {
            for y in other.triples() {
                out.add_triple(mul_triples(&self.pres, &x, &y));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> AElement {
        (0..exp).fold(AElement::one(&self.pres), |acc, _| {
            acc.mul(self).expect("same presentation")
        })
    }

    /// Decomposition by θ-degree: `f^a p_a` sits in degree `a·d`, `p₀` in 0
    /// and `q_b Δ^b` in `−b·d`.
    pub fn graded_components(&self) -> BTreeMap<i64, AElement> {
        let d = self.pres.d as i64;
        let mut out = BTreeMap::new();
        for t in self.triples() {
            let degree = (t.a as i64 - t.b as i64) * d;
            let mut piece = AElement::zero(&self.pres);
            piece.add_triple(t);
            out.insert(degree, piece);
        }
        out
    }

    /// The θ-degree if the element is homogeneous and nonzero.
    pub fn degree(&self) -> Option<i64> {
        let comps = self.graded_components();
        match comps.len() {
            1 => comps.keys().next().copied(),
            _ => None,
        }
    }
}

impl fmt::Display for AElement {
    /// Uses the expression grammar of the command line: `f`, `theta`,
    /// `delta`, rationals, `+ - * ^`.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(Rational, String)> = Vec::new();
        for (a, p, b) in self.components() {
            for (k, c) in p.coeffs().iter().enumerate().rev() {
                if c.is_zero() {
                    continue;
                }
                let mut factors = Vec::new();
                if a > 0 {
                    factors.push(power("f", a));
                }
                if k > 0 {
                    factors.push(power("theta", k as u32));
                }
                if b > 0 {
                    factors.push(power("delta", b));
                }
                terms.push((c.clone(), factors.join("*")));
            }
        }
        if terms.is_empty() {
            return out.write_str("0");
        }
        for (i, (c, body)) in terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            match (i, sign) {
                (0, "-") => out.write_str("-")?,
                (0, _) => {}
                _ => write!(out, " {sign} ")?,
            }
            let abs = c.abs();
            if body.is_empty() {
                write!(out, "{abs}")?;
            } else if abs.is_one() {
                out.write_str(body)?;
            } else {
                write!(out, "{abs}*{body}")?;
            }
        }
        Ok(())
    }
}

fn power(name: &str, e: u32) -> String {
    if e == 1 {
        name.to_string()
    } else {
        format!("{name}^{e}")
    }
}

impl fmt::Debug for AElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A generator or scalar in a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    F,
    Theta,
    Delta,
    Scalar(Rational),
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::F => f.write_str("f"),
            Letter::Theta => f.write_str("theta"),
            Letter::Delta => f.write_str("delta"),
            Letter::Scalar(c) => write!(f, "{c}"),
        }
    }
}

pub fn word_to_string(word: &[Letter]) -> String {
    if word.is_empty() {
        return "1".into();
    }
    word.iter()
        .map(|l| match l {
            Letter::Scalar(c) if c.is_negative() => format!("({c})"),
            _ => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Order in which redexes are contracted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
    Random(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Sym {
    F,
    D,
    P(UniPoly),
}

/// One rewrite step at `i`, if a rule applies there.
///
/// ```text
/// P F   → F P(θ+d)        D P → P(θ+d) D
/// D F   → B(θ)            F D → B(θ−d)
/// P P'  → PP'             F P D → P(θ−d)·B(θ−d)
/// ```
fn rewrite_at(pres: &APresentation, syms: &[Sym], i: usize) -> Option<(usize, Vec<Sym>)> {
    let pair = (syms.get(i), syms.get(i + 1));
    let out = match pair {
        (Some(Sym::P(p)), Some(Sym::F)) => (2, vec![Sym::F, Sym::P(pres.shift(p, 1))]),
        (Some(Sym::D), Some(Sym::P(p))) => (2, vec![Sym::P(pres.shift(p, 1)), Sym::D]),
        (Some(Sym::D), Some(Sym::F)) => (2, vec![Sym::P(pres.big_b.clone())]),
        (Some(Sym::F), Some(Sym::D)) => (2, vec![Sym::P(pres.shift(&pres.big_b, -1))]),
        (Some(Sym::P(p)), Some(Sym::P(q))) => (2, vec![Sym::P(p * q)]),
        (Some(Sym::F), Some(Sym::P(p))) if matches!(syms.get(i + 2), Some(Sym::D)) => {
            let rhs = &pres.shift(p, -1) * &pres.shift(&pres.big_b, -1);
            (3, vec![Sym::P(rhs)])
        }
        _ => return None,
    };
    Some(out)
}

/// Rewrites a word to normal form with the given strategy; also returns the
/// number of rewrite steps taken.
pub fn reduce_word(
    pres: &Arc<APresentation>,
    word: &[Letter],
    strategy: Strategy,
) -> (AElement, usize) {
    let mut syms: Vec<Sym> = word
        .iter()
        .map(|l| match l {
            Letter::F => Sym::F,
            Letter::Delta => Sym::D,
            Letter::Theta => Sym::P(UniPoly::var(Symbol::Theta)),
            Letter::Scalar(c) => Sym::P(UniPoly::constant(Symbol::Theta, c.clone())),
        })
        .collect();
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut steps = 0;
    loop {
        if syms.iter().any(|s| matches!(s, Sym::P(p) if p.is_zero())) {
            return (AElement::zero(pres), steps);
        }
        let redexes: Vec<usize> = (0..syms.len())
            .filter(|&i| rewrite_at(pres, &syms, i).is_some())
            .collect();
        let Some(&first) = redexes.first() else { break };
        let at = match strategy {
            Strategy::Leftmost => first,
            Strategy::Rightmost => *redexes.last().unwrap(),
            Strategy::Random(_) => redexes[rng.as_mut().unwrap().gen_range(0..redexes.len())],
        };
        let (width, replacement) = rewrite_at(pres, &syms, at).unwrap();
        syms.splice(at..at + width, replacement);
        steps += 1;
    }
    // Irreducible words have the shape F^a [P] D^b with a = 0 or b = 0.
    let a = syms.iter().take_while(|s| **s == Sym::F).count() as u32;
    let b = syms.iter().rev().take_while(|s| **s == Sym::D).count() as u32;
    let p = match syms.iter().find_map(|s| match s {
        Sym::P(p) => Some(p.clone()),
        _ => None,
    }) {
        Some(p) => p,
        None => UniPoly::one(Symbol::Theta),
    };
    debug_assert!(a == 0 || b == 0, "irreducible word with both f and delta");
    (AElement::monomial(pres, a, p, b), steps)
}

/// Normal form of a word (`from_word`), leftmost-first rewriting.
pub fn from_word(pres: &Arc<APresentation>, word: &[Letter]) -> AElement {
    reduce_word(pres, word, Strategy::Leftmost).0
}

/// Normal form of a word computed by multiplying its letters with [`AElement::mul`].
pub fn product_of_letters(pres: &Arc<APresentation>, word: &[Letter]) -> AElement {
    word.iter().fold(AElement::one(pres), |acc, l| {
        let x = match l {
            Letter::F => AElement::f(pres),
            Letter::Theta => AElement::theta(pres),
            Letter::Delta => AElement::delta(pres),
            Letter::Scalar(c) => AElement::scalar(pres, c.clone()),
        };
        acc.mul(&x).expect("same presentation")
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub word: String,
    pub check: &'static str,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfluenceReport {
    pub words_checked: usize,
    pub comparisons: usize,
    pub discrepancies: Vec<Discrepancy>,
}

impl ConfluenceReport {
    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty()
    }

    fn compare(&mut self, word: &[Letter], check: &'static str, left: &AElement, right: &AElement) {
        self.comparisons += 1;
        if left != right {
            self.discrepancies.push(Discrepancy {
                word: word_to_string(word),
                check,
                left: left.to_string(),
                right: right.to_string(),
            });
        }
    }

    /// Every reduction route for one word must agree.
    fn check_word(&mut self, pres: &Arc<APresentation>, word: &[Letter], seed: u64) {
        self.words_checked += 1;
        let left = reduce_word(pres, word, Strategy::Leftmost).0;
        let right = reduce_word(pres, word, Strategy::Rightmost).0;
        let random = reduce_word(pres, word, Strategy::Random(seed)).0;
        let product = product_of_letters(pres, word);
        self.compare(word, "leftmost vs rightmost", &left, &right);
        self.compare(word, "leftmost vs random", &left, &random);
        self.compare(word, "rewriting vs product", &left, &product);
    }
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<Letter> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| match rng.gen_range(0..7) {
            0 | 1 => Letter::F,
            2 | 3 => Letter::Theta,
            4 | 5 => Letter::Delta,
            _ => Letter::Scalar(Rational::new(rng.gen_range(-5i64..=5), rng.gen_range(1i64..=4))),
        })
        .collect()
}

/// Random words `u, v, w`: checks associativity of [`AElement::mul`] on their
/// normal forms and agreement of all reduction routes on `uvw`.
pub fn confluence_fuzz(pres: &Arc<APresentation>, trials: usize, seed: u64) -> ConfluenceReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ConfluenceReport::default();
    for _ in 0..trials {
        let u = random_word(&mut rng, 5);
        let v = random_word(&mut rng, 5);
        let w = random_word(&mut rng, 5);
        let (nu, nv, nw) = (from_word(pres, &u), from_word(pres, &v), from_word(pres, &w));
        let right_assoc = nu.mul(&nv.mul(&nw).unwrap()).unwrap();
        let left_assoc = nu.mul(&nv).unwrap().mul(&nw).unwrap();
        let uvw: Vec<Letter> = u.iter().chain(&v).chain(&w).cloned().collect();
        report.compare(&uvw, "associativity", &left_assoc, &right_assoc);
        let whole = from_word(pres, &uvw);
        report.compare(&uvw, "word vs product of parts", &whole, &left_assoc);
        report.check_word(pres, &uvw, rng.gen());
    }
    report
}

/// Every word over `{f, θ, Δ}` of length at most `max_len`.
pub fn exhaustive_words(pres: &Arc<APresentation>, max_len: usize, seed: u64) -> ConfluenceReport {
    let alphabet = [Letter::F, Letter::Theta, Letter::Delta];
    let mut report = ConfluenceReport::default();
    let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
    for len in 0..=max_len {
        for (i, word) in frontier.iter().enumerate() {
            report.check_word(pres, word, seed ^ ((len as u64) << 32) ^ i as u64);
        }
        if len < max_len {
            frontier = frontier
                .iter()
                .flat_map(|w| {
                    alphabet.iter().map(move |l| {
                        let mut w = w.clone();
                        w.push(l.clone());
                        w
                    })
                })
                .collect();
        }
    }
    report
}
