//! Dense univariate polynomials in `s` (b-functions) or `θ` (the algebra side).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symbol {
    S,
    Theta,
}

impl Symbol {
    pub fn name(self) -> &'static str {
        match self {
            Symbol::S => "s",
            Symbol::Theta => "theta",
        }
    }
}

/// Coefficients are stored low to high with the top one nonzero; the zero
/// polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UniPoly {
    symbol: Symbol,
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn zero(symbol: Symbol) -> Self {
        UniPoly {
            symbol,
            coeffs: Vec::new(),
        }
    }

    pub fn one(symbol: Symbol) -> Self {
        Self::constant(symbol, Rational::one())
    }

    pub fn constant(symbol: Symbol, c: Rational) -> Self {
        Self::from_coeffs(symbol, vec![c])
    }

    /// The polynomial `t`.
    pub fn var(symbol: Symbol) -> Self {
        Self::from_coeffs(symbol, vec![Rational::zero(), Rational::one()])
    }

    /// `t + a`.
    pub fn linear(symbol: Symbol, a: Rational) -> Self {
        Self::from_coeffs(symbol, vec![a, Rational::one()])
    }

    pub fn from_coeffs(symbol: Symbol, mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        UniPoly { symbol, coeffs }
    }

    /// Monic `Π (t + offset)`.
    pub fn from_factor_offsets(symbol: Symbol, offsets: &[Rational]) -> Self {
        offsets.iter().fold(Self::one(symbol), |acc, a| {
            &acc * &Self::linear(symbol, a.clone())
        })
    }

    /// Monic `Π (t - root)`.
    pub fn from_roots(symbol: Symbol, roots: &[Rational]) -> Self {
        let offsets: Vec<Rational> = roots.iter().map(|r| -r).collect();
        Self::from_factor_offsets(symbol, &offsets)
    }

    pub fn symbol(&self) -> Symbol {
        self.symbol
    }

    pub fn with_symbol(mut self, symbol: Symbol) -> Self {
        self.symbol = symbol;
        self
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(Rational::is_one)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::from_coeffs(self.symbol, self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Divides by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            Some(l) => self.scale(&l.recip()),
            None => self.clone(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(self.symbol), |acc, _| &acc * self)
    }

    /// `t ↦ p(a·t + b)`.
    pub fn compose_linear(&self, a: &Rational, b: &Rational) -> Self {
        let inner = Self::from_coeffs(self.symbol, vec![b.clone(), a.clone()]);
        self.coeffs.iter().rev().fold(Self::zero(self.symbol), |acc, c| {
            &(&acc * &inner) + &Self::constant(self.symbol, c.clone())
        })
    }

    /// `t ↦ p(t + σ)` (`upoly_shift`).
    pub fn shift(&self, sigma: &Rational) -> Self {
        self.compose_linear(&Rational::one(), sigma)
    }

    /// Divides by `t - r`, returning quotient and remainder `p(r)`.
    pub fn div_linear(&self, r: &Rational) -> (Self, Rational) {
        if self.coeffs.is_empty() {
            return (self.clone(), Rational::zero());
        }
        let mut quot = vec![Rational::zero(); self.coeffs.len() - 1];
        let mut carry = Rational::zero();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            carry = carry * r + c;
            if i > 0 {
                quot[i - 1] = carry.clone();
            }
        }
        (Self::from_coeffs(self.symbol, quot), carry)
    }

    /// Rational roots with multiplicity, in decreasing order.
    ///
    /// Candidates come from the rational-root theorem applied to the
    /// denominator-cleared integer polynomial; each accepted root is confirmed
    /// by exact evaluation and deflated out before looking for repeats.
    /// Irreducible factors of degree ≥ 2 contribute nothing.
    pub fn rational_roots(&self) -> Vec<Rational> {
        assert!(!self.is_zero(), "rational_roots of the zero polynomial");
        let mut roots = Vec::new();
        let mut p = self.monic();
        while p.coeffs.len() > 1 && p.coeffs[0].is_zero() {
            roots.push(Rational::zero());
            p = p.div_linear(&Rational::zero()).0;
        }
        if p.coeffs.len() > 1 {
            let ints = integer_coefficients(&p.coeffs);
            let lead = ints.last().unwrap().abs();
            let trail = ints[0].abs();
            let mut candidates: Vec<Rational> = Vec::new();
            for num in divisors(&trail) {
                for den in divisors(&lead) {
                    let r = Rational::new(num.clone(), den.clone());
                    candidates.push(r.clone());
                    candidates.push(-r);
                }
            }
            candidates.sort();
            candidates.dedup();
            for r in candidates {
                loop {
                    if p.degree().unwrap_or(0) == 0 {
                        break;
                    }
                    let (q, rem) = p.div_linear(&r);
                    if !rem.is_zero() {
                        break;
                    }
                    roots.push(r.clone());
                    p = q;
                }
            }
        }
        roots.sort_by(|a, b| b.cmp(a));
        roots
    }

    /// Renders as a product of linear factors when all roots are rational,
    /// e.g. `(s+1)^2(s+3/2)`; falls back to the expanded form.
    pub fn display_factored(&self) -> String {
        if self.degree().unwrap_or(0) == 0 {
            return self.to_string();
        }
        let roots = self.rational_roots();
        if roots.len() != self.degree().unwrap() {
            return self.to_string();
        }
        let mut out = String::new();
        let lead = self.leading();
        if !lead.is_one() {
            out.push_str(&lead.to_string());
        }
        let mut i = 0;
        while i < roots.len() {
            let r = &roots[i];
            let mult = roots[i..].iter().take_while(|x| *x == r).count();
            let name = self.symbol.name();
            let factor = if r.is_zero() {
                name.to_string()
            } else if r.is_negative() {
                format!("({name}+{})", -r)
            } else {
                format!("({name}-{r})")
            };
            if r.is_zero() && !out.is_empty() {
                out.push('*');
            }
            out.push_str(&factor);
            if mult > 1 {
                out.push_str(&format!("^{mult}"));
            }
            i += mult;
        }
        out
    }
}

fn integer_coefficients(coeffs: &[Rational]) -> Vec<BigInt> {
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    coeffs
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect()
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= *n {
        if (n % &i).is_zero() {
            let j = n / &i;
            if j != i {
                large.push(j);
            }
            small.push(i.clone());
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let name = self.symbol.name();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let abs = c.abs();
            let power = match i {
                0 => String::new(),
                1 => name.to_string(),
                _ => format!("{name}^{i}"),
            };
            match (abs.is_one(), power.is_empty()) {
                (_, true) => write!(f, "{abs}")?,
                (true, false) => f.write_str(&power)?,
                (false, false) => write!(f, "{abs}*{power}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs(
            self.symbol,
            (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect(),
        )
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs(
            self.symbol,
            (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect(),
        )
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero(self.symbol);
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        UniPoly::from_coeffs(self.symbol, out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        self.scale(&-Rational::one())
    }
}

/// Serde helpers writing a polynomial as its coefficient array, low to high,
/// each coefficient a `"p/q"` string.
macro_rules! wire_module {
    ($name:ident, $symbol:expr) => {
        pub mod $name {
            use serde::{Deserialize, Deserializer, Serialize, Serializer};

            use super::UniPoly;
            use crate::rational::Rational;

            pub fn serialize<S: Serializer>(p: &UniPoly, s: S) -> Result<S::Ok, S::Error> {
                p.coeffs().serialize(s)
            }

            pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<UniPoly, D::Error> {
                let coeffs = Vec::<Rational>::deserialize(d)?;
                Ok(UniPoly::from_coeffs($symbol, coeffs))
            }
        }
    };
}

wire_module!(wire_s, super::Symbol::S);
wire_module!(wire_theta, super::Symbol::Theta);

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn s_poly(coeffs: &[i64]) -> UniPoly {
        UniPoly::from_coeffs(Symbol::S, coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    #[test]
    fn shift_binomial() {
        let t2 = s_poly(&[0, 0, 1]);
        assert_eq!(t2.shift(&Rational::one()), s_poly(&[1, 2, 1]));
        assert_eq!(t2.shift(&Rational::zero()), t2);
    }

    #[test]
    fn shifted_b_vanishes_at_root() {
        // (t/2 + 1)(t/2 + 2) shifted by -2, evaluated at 0, equals the value at -2.
        let b = UniPoly::from_factor_offsets(Symbol::Theta, &[r(1, 1), r(2, 1)])
            .compose_linear(&r(1, 2), &Rational::zero());
        let shifted = b.shift(&r(-2, 1));
        assert_eq!(shifted.eval(&Rational::zero()), Rational::zero());
        assert_eq!(b.eval(&r(-2, 1)), Rational::zero());
    }

    #[test]
    fn roots_of_products() {
        let p = UniPoly::from_factor_offsets(Symbol::S, &[r(1, 1), r(2, 1)]);
        assert_eq!(p.rational_roots(), vec![r(-1, 1), r(-2, 1)]);

        let b2 = UniPoly::from_factor_offsets(Symbol::S, &[r(1, 1), r(3, 2)]);
        assert_eq!(b2.rational_roots(), vec![r(-1, 1), r(-3, 2)]);

        // (s^2 + 1)(s + 1)
        let p = &s_poly(&[1, 0, 1]) * &s_poly(&[1, 1]);
        assert_eq!(p.rational_roots(), vec![r(-1, 1)]);
    }

    #[test]
    fn roots_with_multiplicity_and_zero() {
        let p = &s_poly(&[1, 1]).pow(3) * &s_poly(&[0, 1]);
        assert_eq!(
            p.rational_roots(),
            vec![Rational::zero(), r(-1, 1), r(-1, 1), r(-1, 1)]
        );
        let scaled = UniPoly::from_factor_offsets(Symbol::S, &[r(7, 2), r(1, 1)]).scale(&r(4, 1));
        assert_eq!(scaled.rational_roots(), vec![r(-1, 1), r(-7, 2)]);
    }

    #[test]
    fn factored_display() {
        let p = UniPoly::from_factor_offsets(Symbol::S, &[r(1, 1), r(1, 1), r(3, 2)]);
        assert_eq!(p.display_factored(), "(s+1)^2(s+3/2)");
        assert_eq!(s_poly(&[2, 3, 1]).to_string(), "s^2 + 3*s + 2");
    }
}
