//! Sparse multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn var(arity: usize, index: usize) -> Self {
        let mut e = vec![0; arity];
        e[index] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming [`Self::divides`].
    fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    pub(crate) fn exponents_mut(&mut self) -> &mut Vec<u32> {
        &mut self.0
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A polynomial in a fixed number of variables.
///
/// Terms are kept in a `BTreeMap` keyed by graded-lex monomials, so two equal
/// polynomials are structurally equal and iterate identically. Zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiPoly {
    arity: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(arity: usize) -> Self {
        MultiPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, Rational::one())
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        Self::monomial(arity, Monomial::one(arity), c)
    }

    pub fn var(arity: usize, index: usize) -> Self {
        assert!(index < arity, "variable {index} out of range for arity {arity}");
        Self::monomial(arity, Monomial::var(arity, index), Rational::one())
    }

    pub fn monomial(arity: usize, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.arity(), arity);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { arity, terms }
    }

    /// Builds a polynomial from possibly repeated monomials, combining like terms.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(m.arity(), arity);
            *acc.entry(m).or_default() += &c;
        }
        Self::from_accumulator(arity, acc)
    }

    fn from_accumulator(arity: usize, acc: HashMap<Monomial, Rational>) -> Self {
        MultiPoly {
            arity,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
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

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.last_key_value()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.leading_term().map(|(m, _)| m.degree())
    }

    /// `Some(d)` when every term has degree `d`; zero counts as homogeneous of degree 0.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        match degrees.next() {
            None => Some(0),
            Some(d) => degrees.all(|e| e == d).then_some(d),
        }
    }

    /// Constant term value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Whether variable `index` occurs in any term.
    pub fn involves(&self, index: usize) -> bool {
        self.terms.keys().any(|m| m.0[index] > 0)
    }

    fn check_arity(&self, other: &MultiPoly) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_arity(other)?;
        let mut out = self.clone();
        out.add_scaled_assign(other, &Rational::one());
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_arity(other)?;
        let mut out = self.clone();
        out.add_scaled_assign(other, &-Rational::one());
        Ok(out)
    }

    /// `self += k * other`.
    pub fn add_scaled_assign(&mut self, other: &MultiPoly, k: &Rational) {
        assert_eq!(self.arity, other.arity, "arity mismatch in polynomial sum");
        if k.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            let delta = c * k;
            match self.terms.get_mut(m) {
                Some(existing) => {
                    *existing += &delta;
                    if existing.is_zero() {
                        self.terms.remove(m);
                    }
                }
                None => {
                    self.terms.insert(m.clone(), delta);
                }
            }
        }
    }

    pub fn scale(&self, k: &Rational) -> MultiPoly {
        if k.is_zero() {
            return MultiPoly::zero(self.arity);
        }
        MultiPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    /// Exact product (`poly_mul`).
    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_arity(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(MultiPoly::zero(self.arity));
        }
        let mut acc: HashMap<Monomial, Rational> =
            HashMap::with_capacity(self.len().saturating_mul(other.len()).min(1 << 20));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1 * c2;
                acc.entry(m1.mul(m2))
                    .and_modify(|e| *e += &c)
                    .or_insert(c);
            }
        }
        Ok(Self::from_accumulator(self.arity, acc))
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.arity);
        }
        MultiPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.mul(m), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.arity);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Exact quotient `self / divisor` (`poly_div_exact`).
    ///
    /// Fails with [`Error::Indivisible`] as soon as a leading term of the
    /// running remainder is not divisible by the divisor's leading monomial:
    /// a single polynomial is a Gröbner basis of the ideal it generates, so
    /// that term can never cancel.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Result<MultiPoly> {
        self.check_arity(divisor)?;
        let (lead_m, lead_c) = divisor.leading_term().ok_or(Error::DivisionByZero)?;
        let mut rem = self.terms.clone();
        let mut quot: Vec<(Monomial, Rational)> = Vec::new();
        while let Some((m, c)) = rem.last_key_value() {
            if !lead_m.divides(m) {
                return Err(Error::Indivisible);
            }
            let t = lead_m.quotient_of(m);
            let k = c / lead_c;
            for (dm, dc) in &divisor.terms {
                let key = t.mul(dm);
                let delta = dc * &k;
                match rem.get_mut(&key) {
                    Some(existing) => {
                        *existing -= &delta;
                        if existing.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, -delta);
                    }
                }
            }
            quot.push((t, k));
        }
        Ok(MultiPoly {
            arity: self.arity,
            terms: quot.into_iter().collect(),
        })
    }

    /// Partial derivative with respect to variable `index`.
    pub fn partial(&self, index: usize) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[index] > 0)
            .map(|(m, c)| {
                let e = m.0[index];
                let mut m = m.clone();
                m.0[index] -= 1;
                (m, c * &Rational::from(e))
            })
            .collect();
        MultiPoly {
            arity: self.arity,
            terms,
        }
    }

    /// Substitutes the value `v` for variable `index`; the arity is unchanged.
    pub fn substitute(&self, index: usize, v: &Rational) -> MultiPoly {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in &self.terms {
            let e = m.0[index];
            let mut m = m.clone();
            m.0[index] = 0;
            let c = c * &v.pow(e);
            *acc.entry(m).or_default() += &c;
        }
        Self::from_accumulator(self.arity, acc)
    }

    /// Evaluates at a point.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.arity);
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(point)
                    .fold(c.clone(), |acc, (&e, x)| acc * x.pow(e))
            })
            .sum()
    }

    /// Appends `extra` unused variables after the existing ones.
    pub fn extend_arity(&self, extra: usize) -> MultiPoly {
        MultiPoly {
            arity: self.arity + extra,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.resize(self.arity + extra, 0);
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// Drops the trailing variables beyond `arity`; they must not occur.
    pub fn truncate_arity(&self, arity: usize) -> Option<MultiPoly> {
        if self.terms.keys().any(|m| m.0[arity..].iter().any(|&e| e > 0)) {
            return None;
        }
        Some(MultiPoly {
            arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial(m.0[..arity].to_vec()), c.clone()))
                .collect(),
        })
    }

    /// Renders with the given variable names, highest terms first.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for (e, name) in m.0.iter().zip(names) {
                match e {
                    0 => {}
                    1 => factors.push(name.clone()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.arity).map(|i| format!("x{i}")).collect();
        f.write_str(&self.display_with(&names))
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_add(rhs).expect("arity mismatch in polynomial sum")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_sub(rhs).expect("arity mismatch in polynomial difference")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_mul(rhs).expect("arity mismatch in polynomial product")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(2, i)
    }

    fn det2() -> MultiPoly {
        let v = |i| MultiPoly::var(4, i);
        &(&v(0) * &v(3)) - &(&v(1) * &v(2))
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&x(0) + &x(1)) * &(&x(0) - &x(1));
        let expected = &(&x(0) * &x(0)) - &(&x(1) * &x(1));
        assert_eq!(p, expected);
        let f = &(&x(0) * &x(0)) + &(&x(1) * &x(1));
        assert_eq!(&f * &MultiPoly::one(2), f);
    }

    #[test]
    fn det_squared_matches_permutation_expansion() {
        // det(x)^2 = sum over pairs of permutations of sgn * products; at n = 2
        // this is a^2 d^2 - 2abcd + b^2 c^2 written out term by term.
        let mut brute = Vec::new();
        let perms: [([usize; 2], i64); 2] = [([0, 1], 1), ([1, 0], -1)];
        for (p, sp) in perms {
            for (q, sq) in perms {
                let mut e = vec![0u32; 4];
                for row in 0..2 {
                    e[row * 2 + p[row]] += 1;
                    e[row * 2 + q[row]] += 1;
                }
                brute.push((Monomial::new(e), Rational::from(sp * sq)));
            }
        }
        let brute = MultiPoly::from_terms(4, brute);
        assert_eq!(&det2() * &det2(), brute);
        assert_eq!(brute.len(), 3);
    }

    #[test]
    fn exact_division() {
        let f = det2();
        assert_eq!(f.pow(2).div_exact(&f).unwrap(), f);
        assert_eq!(f.pow(3).div_exact(&f).unwrap(), f.pow(2));
        let g = &(&x(0) * &x(0)) + &(&x(1) * &x(1));
        let h = &g + &MultiPoly::one(2);
        assert_eq!(h.div_exact(&g), Err(Error::Indivisible));
        assert_eq!(g.div_exact(&MultiPoly::zero(2)), Err(Error::DivisionByZero));
    }

    #[test]
    fn arity_checked() {
        let err = x(0).try_mul(&MultiPoly::var(3, 0)).unwrap_err();
        assert_eq!(err, Error::ArityMismatch { left: 2, right: 3 });
    }

    #[test]
    fn partial_and_substitute() {
        let f = &(&x(0) * &x(0)) + &(&x(0) * &x(1));
        assert_eq!(f.partial(0), &x(0).scale(&Rational::from(2)) + &x(1));
        let g = f.substitute(1, &Rational::from(3));
        assert_eq!(g, &(&x(0) * &x(0)) + &x(0).scale(&Rational::from(3)));
        assert_eq!(
            f.eval(&[Rational::from(2), Rational::from(5)]),
            Rational::from(14)
        );
    }

    #[test]
    fn homogeneity() {
        assert_eq!(det2().homogeneous_degree(), Some(2));
        assert_eq!((&x(0) + &MultiPoly::one(2)).homogeneous_degree(), None);
    }
}
