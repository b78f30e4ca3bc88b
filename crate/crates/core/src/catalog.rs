//! The eight irreducible representations of Capelli type with a
//! one-dimensional quotient, as constructors for `f`, `Δ = f*(∂)` and `θ`.
//!
//! Each row carries the b-function exactly as it is printed in the standard
//! table. Two rows are known to be inconsistent with their own `deg f`
//! column; those carry a corrected rule as well and are flagged `disputed`.
//! The differentiation oracle in [`crate::bsat`] decides which one holds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::rational::Rational;
use crate::upoly::{Symbol, UniPoly};
use crate::weyl::{Twist, WeylOp};

/// Metadata for one table row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub case_id: u32,
    pub name: String,
    pub size_rule: String,
    pub min_size: u32,
    pub deg_f_rule: String,
    pub b_factor_rule: String,
    pub b_factor_rule_corrected: Option<String>,
    /// Generic isotropy subgroup of `G`.
    pub isotropy_generic: String,
    /// Generic isotropy subgroup of the derived group `G'`.
    pub isotropy_derived: String,
    pub disputed: bool,
}

#[allow(clippy::too_many_arguments)]
fn spec(
    case_id: u32,
    name: &str,
    size_rule: &str,
    min_size: u32,
    deg_f_rule: &str,
    b_factor_rule: &str,
    corrected: Option<&str>,
    isotropy_generic: &str,
    isotropy_derived: &str,
) -> CaseSpec {
    CaseSpec {
        case_id,
        name: name.to_string(),
        size_rule: size_rule.to_string(),
        min_size,
        deg_f_rule: deg_f_rule.to_string(),
        b_factor_rule: b_factor_rule.to_string(),
        b_factor_rule_corrected: corrected.map(str::to_string),
        isotropy_generic: isotropy_generic.to_string(),
        isotropy_derived: isotropy_derived.to_string(),
        disputed: corrected.is_some(),
    }
}

/// All eight rows, in table order.
pub fn list_cases() -> Vec<CaseSpec> {
    vec![
        spec(1, "(SO(n) x C*, C^n)", "n >= 2", 2, "2", "(s+1)(s+n/2)", None,
            "SO(1) x SO(n-1)", "SO(1) x SO(n-1)"),
        spec(2, "(GL(n), S^2 C^n)", "n >= 2", 2, "n", "prod_{i=1..n} (s+(i+1)/2)", None,
            "O(n)", "SO(n)"),
        spec(3, "(GL(n), L^2 C^n), n even", "n even, n >= 4", 4, "n/2",
            "prod_{i=1..n} (s+2i-1)", Some("prod_{i=1..n/2} (s+2i-1)"),
            "Sp(n/2)", "Sp(n/2)"),
        spec(4, "(GL(n) x SL(n), M_n(C))", "n >= 2", 2, "n", "prod_{i=1..n} (s+i)", None,
            "Sp(1) x Sp(n-1)", "Sp(1) x Sp(n-1)"),
        spec(5, "(Sp(n) x GL(2), (C^{2n})^2)", "n >= 2", 2, "2", "(s+1)(s+2n)", None,
            "SL(n)", "SL(n)"),
        spec(6, "(SO(7) x C*, spin = C^8)", "fixed: 8", 8, "2", "(s+2)(s+4)",
            Some("(s+1)(s+4)"), "SO(1) x SO(6)", "SO(1) x SO(6)"),
        spec(7, "(G2 x C*, C^7)", "fixed: 7", 7, "2", "(s+1)(s+7/2)", None, "", ""),
        spec(8, "(GL(4) x Sp(2), M_4(C))", "fixed: 4", 4, "4", "(s+1)(s+2)(s+3)(s+4)", None,
            "", ""),
    ]
}

pub fn case_spec(case_id: u32) -> Result<CaseSpec> {
    list_cases()
        .into_iter()
        .find(|c| c.case_id == case_id)
        .ok_or(Error::UnknownCase(case_id))
}

fn check_size(case_id: u32, size: u32) -> Result<()> {
    let (ok, rule) = match case_id {
        1 | 2 | 4 | 5 => (size >= 2, "n >= 2"),
        3 => (size >= 4 && size % 2 == 0, "n even, n >= 4"),
        6 => (size == 8, "fixed: 8"),
        7 => (size == 7, "fixed: 7"),
        8 => (size == 4, "fixed: 4"),
        _ => return Err(Error::UnknownCase(case_id)),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidSize {
            case_id,
            size,
            rule,
        })
    }
}

pub fn min_size(case_id: u32) -> Result<u32> {
    Ok(case_spec(case_id)?.min_size)
}

pub fn deg_f(case_id: u32, size: u32) -> Result<u32> {
    check_size(case_id, size)?;
    Ok(match case_id {
        2 | 4 => size,
        3 => size / 2,
        8 => 4,
        _ => 2,
    })
}

fn int(n: u32) -> Rational {
    Rational::from(n)
}

/// Offsets `a` of the factors `(s+a)` exactly as printed.
pub fn printed_offsets(case_id: u32, size: u32) -> Result<Vec<Rational>> {
    check_size(case_id, size)?;
    let n = size;
    Ok(match case_id {
        1 => vec![int(1), Rational::new(n, 2)],
        2 => (1..=n).map(|i| Rational::new(i + 1, 2)).collect(),
        3 => (1..=n).map(|i| int(2 * i - 1)).collect(),
        4 => (1..=n).map(int).collect(),
        5 => vec![int(1), int(2 * n)],
        6 => vec![int(2), int(4)],
        7 => vec![int(1), Rational::new(7, 2)],
        8 => (1..=4).map(int).collect(),
        _ => unreachable!(),
    })
}

/// Offsets of the corrected rule for disputed rows.
pub fn corrected_offsets(case_id: u32, size: u32) -> Result<Option<Vec<Rational>>> {
    check_size(case_id, size)?;
    Ok(match case_id {
        3 => Some((1..=size / 2).map(|i| int(2 * i - 1)).collect()),
        6 => Some(vec![int(1), int(4)]),
        _ => None,
    })
}

/// One row instantiated at a concrete size.
#[derive(Clone, Debug)]
pub struct CaseInstance {
    pub case_id: u32,
    pub size: u32,
    pub var_names: Vec<String>,
    pub f: MultiPoly,
    pub delta: WeylOp,
    pub theta: WeylOp,
    pub d: u32,
    /// Monic b-function as printed in the table.
    pub expected_b: UniPoly,
    /// Monic corrected b-function, for disputed rows only.
    pub corrected_b: Option<UniPoly>,
}

impl CaseInstance {
    pub fn arity(&self) -> usize {
        self.var_names.len()
    }

    pub fn twist(&self) -> Twist {
        Twist::new(&self.f).expect("catalog polynomials are nonzero")
    }

    pub fn f_op(&self) -> WeylOp {
        WeylOp::multiplication(&self.f)
    }

    /// Checks the structural invariants of an instance.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.f.homogeneous_degree() != Some(self.d) {
            return Err(format!("f is not homogeneous of degree {}", self.d));
        }
        if self.delta.pure_derivative_order() != Some(self.d) {
            return Err(format!(
                "delta is not a constant-coefficient operator of order {}",
                self.d
            ));
        }
        if self.theta != WeylOp::euler(self.arity()) {
            return Err("theta is not the Euler field".into());
        }
        Ok(())
    }
}

pub fn instantiate(case_id: u32, size: u32) -> Result<CaseInstance> {
    check_size(case_id, size)?;
    let (var_names, f, symbol) = match case_id {
        1 | 6 | 7 => quadric(size as usize),
        2 => symmetric_determinant(size as usize),
        3 => pfaffian(size as usize),
        4 | 8 => determinant(size as usize),
        5 => symplectic_pairing(size as usize),
        _ => unreachable!(),
    };
    let arity = var_names.len();
    let expected_b = UniPoly::from_factor_offsets(Symbol::S, &printed_offsets(case_id, size)?);
    let corrected_b = corrected_offsets(case_id, size)?
        .map(|o| UniPoly::from_factor_offsets(Symbol::S, &o));
    Ok(CaseInstance {
        case_id,
        size,
        var_names,
        d: deg_f(case_id, size)?,
        f,
        delta: WeylOp::from_symbol(&symbol),
        theta: WeylOp::euler(arity),
        expected_b,
        corrected_b,
    })
}

fn pair_name(i: usize, j: usize, n: usize) -> String {
    if n < 10 {
        format!("x{i}{j}")
    } else {
        format!("x{i}_{j}")
    }
}

/// `Σ xᵢ²`, with `Δ = Σ ∂ᵢ²`.
fn quadric(n: usize) -> (Vec<String>, MultiPoly, MultiPoly) {
    let names = (1..=n).map(|i| format!("x{i}")).collect();
    let f = (0..n).fold(MultiPoly::zero(n), |acc, i| {
        &acc + &MultiPoly::var(n, i).pow(2)
    });
    (names, f.clone(), f)
}

/// Sum over permutations of `sgn(σ) Π entry(i, σ(i))`.
fn permutation_determinant(n: usize, arity: usize, entry: &dyn Fn(usize, usize) -> MultiPoly) -> MultiPoly {
    let mut total = MultiPoly::zero(arity);
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let sign = permutation_sign(p);
        let term = (0..n).fold(MultiPoly::one(arity), |acc, i| &acc * &entry(i, p[i]));
        total.add_scaled_assign(&term, &Rational::from(sign));
    });
    total
}

fn permute(perm: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

fn permutation_sign(p: &[usize]) -> i64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Generic `n×n` determinant with `Δ = det(∂)`.
fn determinant(n: usize) -> (Vec<String>, MultiPoly, MultiPoly) {
    let arity = n * n;
    let mut names = Vec::with_capacity(arity);
    for i in 1..=n {
        for j in 1..=n {
            names.push(pair_name(i, j, n));
        }
    }
    let f = permutation_determinant(n, arity, &|i, j| MultiPoly::var(arity, i * n + j));
    (names, f.clone(), f)
}

/// Determinant of a symmetric matrix with entries `x_ij`, `i ≤ j`.
///
/// The dual operator uses `∂*_ii = ∂_ii` and `∂*_ij = ½∂_ij` off the diagonal.
fn symmetric_determinant(n: usize) -> (Vec<String>, MultiPoly, MultiPoly) {
    let mut index = vec![vec![0usize; n]; n];
    let mut names = Vec::new();
    for i in 0..n {
        for j in i..n {
            index[i][j] = names.len();
            index[j][i] = names.len();
            names.push(pair_name(i + 1, j + 1, n));
        }
    }
    let arity = names.len();
    let f = permutation_determinant(n, arity, &|i, j| MultiPoly::var(arity, index[i][j]));
    let half = Rational::new(1, 2);
    let symbol = permutation_determinant(n, arity, &|i, j| {
        let v = MultiPoly::var(arity, index[i][j]);
        if i == j {
            v
        } else {
            v.scale(&half)
        }
    });
    (names, f, symbol)
}

/// Pfaffian of the skew matrix with entries `x_ij`, `i < j`; `Δ = Pf(∂)`.
fn pfaffian(n: usize) -> (Vec<String>, MultiPoly, MultiPoly) {
    let mut index = vec![vec![0usize; n]; n];
    let mut names = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            index[i][j] = names.len();
            names.push(pair_name(i + 1, j + 1, n));
        }
    }
    let arity = names.len();
    let rows: Vec<usize> = (0..n).collect();
    let f = pfaffian_expand(&rows, arity, &index);
    (names, f.clone(), f)
}

/// `Pf(A) = Σ_{j≥2} (-1)^j a_{1j} Pf(A with rows/cols 1, j removed)` (1-based).
fn pfaffian_expand(rows: &[usize], arity: usize, index: &[Vec<usize>]) -> MultiPoly {
    if rows.is_empty() {
        return MultiPoly::one(arity);
    }
    let first = rows[0];
    let mut total = MultiPoly::zero(arity);
    for (pos, &j) in rows.iter().enumerate().skip(1) {
        let rest: Vec<usize> = rows
            .iter()
            .copied()
            .filter(|&r| r != first && r != j)
            .collect();
        let sign = if pos % 2 == 1 { 1 } else { -1 };
        let term = &MultiPoly::var(arity, index[first][j]) * &pfaffian_expand(&rest, arity, index);
        total.add_scaled_assign(&term, &Rational::from(sign));
    }
    total
}

/// `Σ_{i=1..n} (xᵢ y_{n+i} − x_{n+i} yᵢ)` on `(C^{2n})²`.
fn symplectic_pairing(n: usize) -> (Vec<String>, MultiPoly, MultiPoly) {
    let arity = 4 * n;
    let mut names: Vec<String> = (1..=2 * n).map(|i| format!("x{i}")).collect();
    names.extend((1..=2 * n).map(|i| format!("y{i}")));
    let x = |i: usize| MultiPoly::var(arity, i - 1);
    let y = |i: usize| MultiPoly::var(arity, 2 * n + i - 1);
    let mut f = MultiPoly::zero(arity);
    for i in 1..=n {
        f = &f + &(&x(i) * &y(n + i));
        f = &f - &(&x(n + i) * &y(i));
    }
    (names, f.clone(), f)
}
