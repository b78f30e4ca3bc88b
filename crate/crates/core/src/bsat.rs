//! Bernstein–Sato polynomials computed by differentiation, certified against
//! the catalog table.
//!
//! `Δ f^{s+1}` is evaluated in the twisted module; for every catalog row the
//! result is `c·b(s)·f^s` with `b` monic. The constant `c` depends on the
//! normalization of `Δ` and is reported separately.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{self, CaseInstance};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::upoly::{self, UniPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Match,
    /// Disagrees with the printed row but agrees with the corrected rule.
    MismatchDisputedRow,
    Mismatch,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Match => "match",
            Verdict::MismatchDisputedRow => "mismatch-disputed-row",
            Verdict::Mismatch => "mismatch",
        }
    }

    pub fn is_hard_failure(self) -> bool {
        self == Verdict::Mismatch
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BCertificate {
    pub case_id: u32,
    pub size: u32,
    #[serde(with = "upoly::wire_s")]
    pub b_monic: UniPoly,
    pub c: Rational,
    #[serde(with = "upoly::wire_s")]
    pub b_expected: UniPoly,
    pub roots: Vec<Rational>,
    pub verdict: Verdict,
}

/// Computes `(b, c)` with `Δ f^{s+1} = c·b(s)·f^s` and `b` monic.
pub fn compute_b(inst: &CaseInstance) -> Result<(UniPoly, Rational)> {
    let tw = inst.twist();
    let image = tw.apply(&inst.delta, &tw.f_power(1))?;
    if image.level != 0 {
        return Err(Error::NotProportional(format!(
            "Δ f^(s+1) keeps a pole of order {} along f",
            image.level
        )));
    }
    let (scaled, offset) = tw.as_scaled_power(&image)?;
    if offset != 0 || scaled.is_zero() {
        return Err(Error::NotProportional(format!(
            "Δ f^(s+1) = ({scaled})·f^(s+{offset})"
        )));
    }
    let c = scaled.leading();
    if !c.is_positive() {
        return Err(Error::NonPositiveConstant(c));
    }
    Ok((scaled.monic(), c))
}

/// Computes and certifies one instance.
pub fn certify(inst: &CaseInstance) -> Result<BCertificate> {
    let (b, c) = compute_b(inst)?;
    let roots = b.rational_roots();
    let degree = b.degree().unwrap_or(0);
    if roots.len() != degree {
        return Err(Error::IncompleteRoots {
            degree,
            found: roots.len(),
        });
    }
    if !roots.contains(&-Rational::one()) {
        return Err(Error::MissingTrivialRoot);
    }
    let verdict = if b == inst.expected_b {
        Verdict::Match
    } else if inst.corrected_b.as_ref() == Some(&b) {
        Verdict::MismatchDisputedRow
    } else {
        Verdict::Mismatch
    };
    Ok(BCertificate {
        case_id: inst.case_id,
        size: inst.size,
        b_monic: b,
        c,
        b_expected: inst.expected_b.clone(),
        roots,
        verdict,
    })
}

pub fn verify_table(case_id: u32, size: u32) -> Result<BCertificate> {
    certify(&catalog::instantiate(case_id, size)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SizeSet {
    /// Every row at its smallest legal size.
    Min,
    /// The minimal sizes plus the next size of each parametrized row that
    /// stays cheap to differentiate.
    Default,
}

impl SizeSet {
    pub fn cases(self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = catalog::list_cases()
            .iter()
            .map(|c| (c.case_id, c.min_size))
            .collect();
        if self == SizeSet::Default {
            out.extend([(1, 3), (2, 3), (3, 6), (4, 3), (5, 3)]);
            out.sort();
        }
        out
    }
}

/// Certifies every `(case, size)` pair, in parallel; results keep input order.
pub fn verify_all(cases: &[(u32, u32)]) -> Vec<((u32, u32), Result<BCertificate>)> {
    cases
        .par_iter()
        .map(|&(case_id, size)| ((case_id, size), verify_table(case_id, size)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Omega0Verdict {
    Pass { m_max: u32 },
    Fail { m: u32 },
}

impl Omega0Verdict {
    pub fn passed(self) -> bool {
        matches!(self, Omega0Verdict::Pass { .. })
    }
}

pub const DEFAULT_OMEGA0_M_MAX: u32 = 6;

/// Checks `(fΔ)(f^m) = c·b(m-1)·f^m` for `m = 0..=m_max`, i.e. that
/// `Ω₀ = fΔ − b(θ/d − 1)` annihilates `C[f]` up to degree `m_max`.
pub fn verify_omega0(inst: &CaseInstance, m_max: u32) -> Result<Omega0Verdict> {
    let (b, c) = compute_b(inst)?;
    verify_omega0_with(inst, &b, &c, m_max)
}

/// [`verify_omega0`] with a precomputed b-function.
pub fn verify_omega0_with(
    inst: &CaseInstance,
    b: &UniPoly,
    c: &Rational,
    m_max: u32,
) -> Result<Omega0Verdict> {
    let e0 = inst.f_op().try_mul(&inst.delta)?;
    let mut power = crate::poly::MultiPoly::one(inst.arity());
    for m in 0..=m_max {
        let lhs = e0.apply(&power)?;
        let eigenvalue = c * &b.eval(&(Rational::from(m) - Rational::one()));
        if lhs != power.scale(&eigenvalue) {
            return Ok(Omega0Verdict::Fail { m });
        }
        if m < m_max {
            power = &power * &inst.f;
        }
    }
    Ok(Omega0Verdict::Pass { m_max })
}
