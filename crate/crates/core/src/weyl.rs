//! Polynomial-coefficient differential operators and their action on `C[V]`
//! and on the twisted module `C[V][1/f]·f^s`.
//!
//! Everything else in the crate is checked against this module: it performs
//! the actual differentiation.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{Monomial, MultiPoly};
use crate::rational::Rational;
use crate::upoly::{Symbol, UniPoly};

/// `Σ c · x^α ∂^β`, normally ordered (positions left of derivatives).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeylOp {
    arity: usize,
    terms: BTreeMap<(Monomial, Monomial), Rational>,
}

/// A left polynomial and the `(derivative index, coefficient)` pairs it multiplies.
type Group = (MultiPoly, Vec<(usize, Rational)>);

impl WeylOp {
    pub fn zero(arity: usize) -> Self {
        WeylOp {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(arity: usize) -> Self {
        Self::scalar(arity, Rational::one())
    }

    pub fn scalar(arity: usize, c: Rational) -> Self {
        Self::from_terms(arity, [((Monomial::one(arity), Monomial::one(arity)), c)])
    }

    fn from_terms(
        arity: usize,
        terms: impl IntoIterator<Item = ((Monomial, Monomial), Rational)>,
    ) -> Self {
        let mut map: BTreeMap<(Monomial, Monomial), Rational> = BTreeMap::new();
        for (k, c) in terms {
            *map.entry(k).or_default() += &c;
        }
        map.retain(|_, c| !c.is_zero());
        WeylOp { arity, terms: map }
    }

    /// Multiplication by a polynomial.
    pub fn multiplication(p: &MultiPoly) -> Self {
        let n = p.arity();
        Self::from_terms(
            n,
            p.terms()
                .map(|(m, c)| ((m.clone(), Monomial::one(n)), c.clone())),
        )
    }

    /// The constant-coefficient operator `p(∂)`.
    pub fn from_symbol(p: &MultiPoly) -> Self {
        let n = p.arity();
        Self::from_terms(
            n,
            p.terms()
                .map(|(m, c)| ((Monomial::one(n), m.clone()), c.clone())),
        )
    }

    pub fn partial(arity: usize, index: usize) -> Self {
        Self::from_terms(
            arity,
            [((Monomial::one(arity), Monomial::var(arity, index)), Rational::one())],
        )
    }

    /// The Euler field `θ = Σ xᵢ∂ᵢ`.
    pub fn euler(arity: usize) -> Self {
        Self::from_terms(
            arity,
            (0..arity).map(|i| {
                (
                    (Monomial::var(arity, i), Monomial::var(arity, i)),
                    Rational::one(),
                )
            }),
        )
    }

    pub fn arity(&self) -> usize {
        self.arity
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Monomial, &Rational)> + '_ {
        self.terms.iter().map(|((x, d), c)| (x, d, c))
    }

    /// Whether every coefficient is a constant.
    pub fn has_constant_coefficients(&self) -> bool {
        self.terms.keys().all(|(x, _)| x.is_one())
    }

    /// `Some(k)` when every term has derivative order `k` and no positions.
    pub fn pure_derivative_order(&self) -> Option<u32> {
        if !self.has_constant_coefficients() {
            return None;
        }
        let mut orders = self.terms.keys().map(|(_, d)| d.degree());
        let first = orders.next()?;
        orders.all(|o| o == first).then_some(first)
    }

    fn check_arity(&self, other: usize) -> Result<()> {
        if self.arity != other {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: other,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &WeylOp) -> Result<WeylOp> {
        self.check_arity(other.arity)?;
        Ok(Self::from_terms(
            self.arity,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(k, c)| (k.clone(), c.clone())),
        ))
    }

    pub fn scale(&self, k: &Rational) -> WeylOp {
        Self::from_terms(
            self.arity,
            self.terms.iter().map(|(key, c)| (key.clone(), c * k)),
        )
    }

    pub fn try_sub(&self, other: &WeylOp) -> Result<WeylOp> {
        self.try_add(&other.scale(&-Rational::one()))
    }

    /// Normally ordered product (`weyl_mul`), via
    /// `∂^β x^γ = Σ_κ C(β,κ) γ!/(γ-κ)! x^{γ-κ} ∂^{β-κ}`.
    pub fn try_mul(&self, other: &WeylOp) -> Result<WeylOp> {
        self.check_arity(other.arity)?;
        let n = self.arity;
        let mut out: Vec<((Monomial, Monomial), Rational)> = Vec::new();
        for ((a, b), c1) in &self.terms {
            for ((g, d), c2) in &other.terms {
                let bound: Vec<u32> = b
                    .exponents()
                    .iter()
                    .zip(g.exponents())
                    .map(|(x, y)| *x.min(y))
                    .collect();
                let mut kappa = vec![0u32; n];
                loop {
                    let mut coef = c1 * c2;
                    let mut xs = a.mul(g);
                    let mut ds = b.mul(d);
                    for i in 0..n {
                        let k = kappa[i];
                        if k > 0 {
                            let bi = b.exponents()[i];
                            let gi = g.exponents()[i];
                            coef = coef
                                * Rational::from_integer(binomial(bi, k))
                                * Rational::from_integer(falling(gi, k));
                            xs.exponents_mut()[i] -= k;
                            ds.exponents_mut()[i] -= k;
                        }
                    }
                    out.push(((xs, ds), coef));
                    // advance the multi-index κ ≤ bound
                    let mut i = 0;
                    while i < n {
                        if kappa[i] < bound[i] {
                            kappa[i] += 1;
                            break;
                        }
                        kappa[i] = 0;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                }
            }
        }
        Ok(Self::from_terms(n, out))
    }

    pub fn commutator(&self, other: &WeylOp) -> Result<WeylOp> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    pub fn pow(&self, exp: u32) -> WeylOp {
        (0..exp).fold(WeylOp::identity(self.arity), |acc, _| &acc * self)
    }

    /// Groups terms as `Σ_L L · (Σ κ_β ∂^β)` where each `L` is a polynomial
    /// normalized to leading coefficient one.
    fn grouped(&self) -> (Vec<Monomial>, Vec<Group>) {
        let n = self.arity;
        let mut by_beta: BTreeMap<Monomial, Vec<(Monomial, Rational)>> = BTreeMap::new();
        for ((x, d), c) in &self.terms {
            by_beta
                .entry(d.clone())
                .or_default()
                .push((x.clone(), c.clone()));
        }
        let betas: Vec<Monomial> = by_beta.keys().cloned().collect();
        let mut groups: BTreeMap<MultiPoly, Vec<(usize, Rational)>> = BTreeMap::new();
        for (idx, (_, coeff_terms)) in by_beta.into_iter().enumerate() {
            let left = MultiPoly::from_terms(n, coeff_terms);
            let lead = left.leading_term().expect("stored terms are nonzero").1.clone();
            groups
                .entry(left.scale(&lead.recip()))
                .or_default()
                .push((idx, lead));
        }
        (betas, groups.into_iter().collect())
    }

    /// Applies the operator to a polynomial (`weyl_apply`).
    pub fn apply(&self, p: &MultiPoly) -> Result<MultiPoly> {
        self.check_arity(p.arity())?;
        let n = self.arity;
        let (betas, groups) = self.grouped();
        let mut weight_of: Vec<Option<(usize, Rational)>> = vec![None; betas.len()];
        for (g, (_, members)) in groups.iter().enumerate() {
            for (idx, k) in members {
                weight_of[*idx] = Some((g, k.clone()));
            }
        }
        let mut acc: Vec<MultiPoly> = vec![MultiPoly::zero(n); groups.len()];
        for_each_derivative(
            p,
            &betas,
            &mut |q, i| Ok(q.partial(i)),
            &mut |idx, q| {
                let (g, k) = weight_of[idx].as_ref().unwrap();
                acc[*g].add_scaled_assign(q, k);
                Ok(())
            },
        )?;
        let mut out = MultiPoly::zero(n);
        for ((left, _), inner) in groups.iter().zip(acc) {
            out.add_scaled_assign(&(left * &inner), &Rational::one());
        }
        Ok(out)
    }

    /// Renders with variable names; `∂` for a variable `v` prints as `dv`.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for ((x, d), c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            if !c.is_one() || (x.is_one() && d.is_one()) {
                factors.push(format!("{c}"));
            }
            for (m, prefix) in [(x, ""), (d, "d")] {
                for (e, name) in m.exponents().iter().zip(names) {
                    match e {
                        0 => {}
                        1 => factors.push(format!("{prefix}{name}")),
                        _ => factors.push(format!("{prefix}{name}^{e}")),
                    }
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

fn binomial(n: u32, k: u32) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

fn falling(n: u32, k: u32) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64)
}

/// Visits `∂^β base` for every `β` in `betas`, sharing common prefixes of the
/// derivative sequences so each intermediate derivative is computed once and
/// only one root-to-leaf path is alive at a time.
fn for_each_derivative<T>(
    base: &T,
    betas: &[Monomial],
    step: &mut impl FnMut(&T, usize) -> Result<T>,
    visit: &mut impl FnMut(usize, &T) -> Result<()>,
) -> Result<()> {
    let mut items: Vec<(Vec<usize>, usize)> = betas
        .iter()
        .enumerate()
        .map(|(idx, beta)| {
            let seq = beta
                .exponents()
                .iter()
                .enumerate()
                .flat_map(|(var, &e)| std::iter::repeat_n(var, e as usize))
                .collect();
            (seq, idx)
        })
        .collect();
    items.sort();
    walk(base, &items, 0, step, visit)
}

fn walk<T>(
    cur: &T,
    items: &[(Vec<usize>, usize)],
    depth: usize,
    step: &mut impl FnMut(&T, usize) -> Result<T>,
    visit: &mut impl FnMut(usize, &T) -> Result<()>,
) -> Result<()> {
    let mut i = 0;
    while i < items.len() && items[i].0.len() == depth {
        visit(items[i].1, cur)?;
        i += 1;
    }
    while i < items.len() {
        let var = items[i].0[depth];
        let end = i + items[i..].iter().take_while(|it| it.0[depth] == var).count();
        let next = step(cur, var)?;
        walk(&next, &items[i..end], depth + 1, step, visit)?;
        i = end;
    }
    Ok(())
}

impl fmt::Debug for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.arity).map(|i| format!("x{i}")).collect();
        f.write_str(&self.display_with(&names))
    }
}

impl std::ops::Add for &WeylOp {
    type Output = WeylOp;
    fn add(self, rhs: &WeylOp) -> WeylOp {
        self.try_add(rhs).expect("arity mismatch in operator sum")
    }
}

impl std::ops::Sub for &WeylOp {
    type Output = WeylOp;
    fn sub(self, rhs: &WeylOp) -> WeylOp {
        self.try_sub(rhs).expect("arity mismatch in operator difference")
    }
}

impl std::ops::Mul for &WeylOp {
    type Output = WeylOp;
    fn mul(self, rhs: &WeylOp) -> WeylOp {
        self.try_mul(rhs).expect("arity mismatch in operator product")
    }
}

/// `q(x, s) · f^{s-m}`; `f` itself lives in the [`Twist`] context.
///
/// The numerator has one more variable than `f`: the last one is `s`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TwistedElement {
    pub numer: MultiPoly,
    pub level: u32,
}

/// The twisted module `C[V][1/f]·f^s` for a fixed nonzero `f`.
#[derive(Clone, Debug)]
pub struct Twist {
    arity: usize,
    f: MultiPoly,
    /// `f` with the `s` variable appended.
    f_ext: MultiPoly,
    df_ext: Vec<MultiPoly>,
    s: MultiPoly,
}

impl Twist {
    pub fn new(f: &MultiPoly) -> Result<Twist> {
        if f.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = f.arity();
        let f_ext = f.extend_arity(1);
        let df_ext = (0..n).map(|i| f_ext.partial(i)).collect();
        Ok(Twist {
            arity: n,
            f: f.clone(),
            f_ext,
            df_ext,
            s: MultiPoly::var(n + 1, n),
        })
    }

    pub fn f(&self) -> &MultiPoly {
        &self.f
    }

    /// Number of case variables (the numerator carries one more, `s`).
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn zero(&self) -> TwistedElement {
        TwistedElement {
            numer: MultiPoly::zero(self.arity + 1),
            level: 0,
        }
    }

    /// `f^{s+k}` for any integer `k`.
    pub fn f_power(&self, k: i64) -> TwistedElement {
        if k >= 0 {
            TwistedElement {
                numer: self.f_ext.pow(k as u32),
                level: 0,
            }
        } else {
            TwistedElement {
                numer: MultiPoly::one(self.arity + 1),
                level: (-k) as u32,
            }
        }
    }

    /// `p(x, s) · f^{s}` for a polynomial in the case variables and `s`.
    pub fn element(&self, numer: MultiPoly, level: u32) -> Result<TwistedElement> {
        if numer.arity() != self.arity + 1 {
            return Err(Error::ArityMismatch {
                left: self.arity + 1,
                right: numer.arity(),
            });
        }
        Ok(self.canonical(&TwistedElement { numer, level }))
    }

    /// Divides `f` out of the numerator while possible (`twisted_canonical`).
    pub fn canonical(&self, e: &TwistedElement) -> TwistedElement {
        if e.numer.is_zero() {
            return self.zero();
        }
        let mut numer = e.numer.clone();
        let mut level = e.level;
        while level > 0 {
            match numer.div_exact(&self.f_ext) {
                Ok(q) => {
                    numer = q;
                    level -= 1;
                }
                Err(_) => break,
            }
        }
        TwistedElement { numer, level }
    }

    fn raise_to(&self, e: &TwistedElement, level: u32) -> MultiPoly {
        debug_assert!(level >= e.level);
        &e.numer * &self.f_ext.pow(level - e.level)
    }

    pub fn add(&self, a: &TwistedElement, b: &TwistedElement) -> TwistedElement {
        self.add_scaled(a, b, &Rational::one())
    }

    /// `a + k·b`, canonical.
    pub fn add_scaled(&self, a: &TwistedElement, b: &TwistedElement, k: &Rational) -> TwistedElement {
        if b.numer.is_zero() || k.is_zero() {
            return self.canonical(a);
        }
        if a.numer.is_zero() {
            return self.canonical(&TwistedElement {
                numer: b.numer.scale(k),
                level: b.level,
            });
        }
        let level = a.level.max(b.level);
        let mut numer = self.raise_to(a, level);
        numer.add_scaled_assign(&self.raise_to(b, level), k);
        self.canonical(&TwistedElement { numer, level })
    }

    pub fn scale(&self, e: &TwistedElement, k: &Rational) -> TwistedElement {
        self.canonical(&TwistedElement {
            numer: e.numer.scale(k),
            level: e.level,
        })
    }

    /// Multiplication by a polynomial in the case variables.
    pub fn mul_poly(&self, p: &MultiPoly, e: &TwistedElement) -> Result<TwistedElement> {
        if p.arity() != self.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: p.arity(),
            });
        }
        Ok(self.canonical(&TwistedElement {
            numer: &p.extend_arity(1) * &e.numer,
            level: e.level,
        }))
    }

    /// `∂ᵢ(q f^{s-m}) = (∂ᵢq·f + (s-m)·q·∂ᵢf) f^{s-m-1}`, canonical.
    pub fn partial(&self, e: &TwistedElement, i: usize) -> TwistedElement {
        if e.numer.is_zero() {
            return self.zero();
        }
        let shifted_s = &self.s - &MultiPoly::constant(self.arity + 1, Rational::from(e.level));
        let mut numer = &e.numer.partial(i) * &self.f_ext;
        numer.add_scaled_assign(&(&(&shifted_s * &e.numer) * &self.df_ext[i]), &Rational::one());
        self.canonical(&TwistedElement {
            numer,
            level: e.level + 1,
        })
    }

    /// Applies an operator to a twisted element (`twisted_apply`).
    pub fn apply(&self, op: &WeylOp, e: &TwistedElement) -> Result<TwistedElement> {
        op.check_arity(self.arity)?;
        if e.numer.arity() != self.arity + 1 {
            return Err(Error::ArityMismatch {
                left: self.arity + 1,
                right: e.numer.arity(),
            });
        }
        let (betas, groups) = op.grouped();
        let mut weight_of: Vec<Option<(usize, Rational)>> = vec![None; betas.len()];
        for (g, (_, members)) in groups.iter().enumerate() {
            for (idx, k) in members {
                weight_of[*idx] = Some((g, k.clone()));
            }
        }
        let mut acc: Vec<TwistedElement> = vec![self.zero(); groups.len()];
        for_each_derivative(
            e,
            &betas,
            &mut |q, i| Ok(self.partial(q, i)),
            &mut |idx, q| {
                let (g, k) = weight_of[idx].as_ref().unwrap();
                acc[*g] = self.add_scaled(&acc[*g], q, k);
                Ok(())
            },
        )?;
        let mut out = self.zero();
        for ((left, _), inner) in groups.iter().zip(acc) {
            let term = self.mul_poly(left, &inner)?;
            out = self.add(&out, &term);
        }
        Ok(out)
    }

    /// Writes `e` as `g(s)·f^{s+j}`, returning `(g, j)`.
    pub fn as_scaled_power(&self, e: &TwistedElement) -> Result<(UniPoly, i64)> {
        let e = self.canonical(e);
        if e.numer.is_zero() {
            return Ok((UniPoly::zero(Symbol::S), 0));
        }
        let mut numer = e.numer;
        let mut offset = -(e.level as i64);
        if e.level == 0 {
            while (0..self.arity).any(|i| numer.involves(i)) {
                numer = numer.div_exact(&self.f_ext).map_err(|_| {
                    Error::NotProportional(format!(
                        "numerator depends on the case variables: {numer}"
                    ))
                })?;
                offset += 1;
            }
        }
        let g = s_polynomial(&numer, self.arity).ok_or_else(|| {
            Error::NotProportional(format!("numerator depends on the case variables: {numer}"))
        })?;
        Ok((g, offset))
    }

    /// Substitutes a nonnegative integer for `s` and multiplies out, when the
    /// result is a polynomial.
    pub fn specialize(&self, e: &TwistedElement, s: u32) -> Option<MultiPoly> {
        let numer = e
            .numer
            .substitute(self.arity, &Rational::from(s))
            .truncate_arity(self.arity)?;
        if s >= e.level {
            Some(&numer * &self.f.pow(s - e.level))
        } else {
            let mut q = numer;
            for _ in 0..(e.level - s) {
                q = q.div_exact(&self.f).ok()?;
            }
            Some(q)
        }
    }
}

/// Reads a polynomial involving only the trailing `s` variable as a [`UniPoly`].
fn s_polynomial(p: &MultiPoly, case_arity: usize) -> Option<UniPoly> {
    let mut coeffs: Vec<Rational> = Vec::new();
    for (m, c) in p.terms() {
        if m.exponents()[..case_arity].iter().any(|&e| e > 0) {
            return None;
        }
        let k = m.exponents()[case_arity] as usize;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Rational::zero());
        }
        coeffs[k] = c.clone();
    }
    Some(UniPoly::from_coeffs(Symbol::S, coeffs))
}

/// Free-function form of [`Twist::apply`].
pub fn twisted_apply(op: &WeylOp, e: &TwistedElement, f: &MultiPoly) -> Result<TwistedElement> {
    Twist::new(f)?.apply(op, e)
}

/// Free-function form of [`Twist::canonical`].
pub fn twisted_canonical(e: &TwistedElement, f: &MultiPoly) -> Result<TwistedElement> {
    Ok(Twist::new(f)?.canonical(e))
}
