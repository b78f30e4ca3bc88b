//! Finite-type graded `A`-modules as weight-space data.
//!
//! A module stores, for each weight `α`, the dimension of `T_α`, the raising
//! map `F_α: T_α → T_{α+d}` (action of `f`), the lowering map
//! `D_α: T_α → T_{α−d}` (action of `Δ`) and the nilpotent part `N_α` of `θ`
//! (so `θ` acts as `α + N_α`). Infinite modules are stored on a finite window
//! of weights; basis vectors whose `f`- or `Δ`-image leaves the window are
//! flagged open, and relation checks skip those columns.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::capalg::{AElement, APresentation, Letter};
use crate::catalog::CaseInstance;
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::rational::Rational;
use crate::upoly::UniPoly;
use crate::weyl::TwistedElement;

/// Inclusive range `min..=max` of ladder indices `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub min: i64,
    pub max: i64,
}

impl Window {
    pub fn new(min: i64, max: i64) -> Result<Self> {
        if min > max {
            return Err(Error::InvalidWindow { min, max });
        }
        Ok(Window { min, max })
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.min..=self.max
    }

    pub fn len(&self) -> usize {
        (self.max - self.min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Parses `"a:b"`.
impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("window must look like a:b, got {s:?}"))?;
        let a: i64 = a.trim().parse().map_err(|_| format!("bad window start {a:?}"))?;
        let b: i64 = b.trim().parse().map_err(|_| format!("bad window end {b:?}"))?;
        Window::new(a, b).map_err(|e| e.to_string())
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.min, self.max)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSpace {
    pub dim: usize,
    /// `F_α`; `None` is the zero map.
    pub raise: Option<QMatrix>,
    /// `D_α`; `None` is the zero map.
    pub lower: Option<QMatrix>,
    pub nilpotent: QMatrix,
    pub top_open: Vec<bool>,
    pub bottom_open: Vec<bool>,
}

impl WeightSpace {
    pub fn new(dim: usize) -> Self {
        WeightSpace {
            dim,
            raise: None,
            lower: None,
            nilpotent: QMatrix::zeros(dim, dim),
            top_open: vec![false; dim],
            bottom_open: vec![false; dim],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Stored maps have the wrong shape or point at an absent weight.
    Shape,
    NotNilpotent,
    /// `D_{α+d} F_α = B(α + N_α)`.
    DeltaF,
    /// `F_{α−d} D_α = B(α − d + N_α)`.
    FDelta,
    /// `F_α N_α = N_{α+d} F_α`.
    RaiseIntertwine,
    /// `D_α N_α = N_{α−d} D_α`.
    LowerIntertwine,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ModuleWire", into = "ModuleWire")]
pub struct GradedModule {
    pres: Arc<APresentation>,
    spaces: BTreeMap<Rational, WeightSpace>,
}

#[derive(Serialize, Deserialize)]
struct WeightWire {
    weight: Rational,
    #[serde(flatten)]
    space: WeightSpace,
}

#[derive(Serialize, Deserialize)]
struct ModuleWire {
    presentation: APresentation,
    weights: Vec<WeightWire>,
}

impl From<GradedModule> for ModuleWire {
    fn from(m: GradedModule) -> Self {
        ModuleWire {
            presentation: (*m.pres).clone(),
            weights: m
                .spaces
                .into_iter()
                .map(|(weight, space)| WeightWire { weight, space })
                .collect(),
        }
    }
}

impl TryFrom<ModuleWire> for GradedModule {
    type Error = Error;

    fn try_from(w: ModuleWire) -> Result<Self> {
        let pres = APresentation::new(w.presentation.d(), w.presentation.big_b().clone())?;
        let mut spaces = BTreeMap::new();
        for WeightWire { weight, space } in w.weights {
            if spaces.insert(weight.clone(), space).is_some() {
                return Err(Error::DimensionMismatch(format!("weight {weight} listed twice")));
            }
        }
        Ok(GradedModule {
            pres: Arc::new(pres),
            spaces,
        })
    }
}

impl GradedModule {
    pub fn zero(pres: &Arc<APresentation>) -> Self {
        GradedModule {
            pres: pres.clone(),
            spaces: BTreeMap::new(),
        }
    }

    pub fn from_spaces(pres: &Arc<APresentation>, spaces: BTreeMap<Rational, WeightSpace>) -> Self {
        GradedModule {
            pres: pres.clone(),
            spaces,
        }
    }

    pub fn presentation(&self) -> &Arc<APresentation> {
        &self.pres
    }

    pub fn weights(&self) -> impl Iterator<Item = &Rational> + '_ {
        self.spaces.keys()
    }

    pub fn spaces(&self) -> impl Iterator<Item = (&Rational, &WeightSpace)> + '_ {
        self.spaces.iter()
    }

    pub fn space(&self, weight: &Rational) -> Option<&WeightSpace> {
        self.spaces.get(weight)
    }

    pub fn space_mut(&mut self, weight: &Rational) -> Option<&mut WeightSpace> {
        self.spaces.get_mut(weight)
    }

    pub fn dim(&self, weight: &Rational) -> usize {
        self.spaces.get(weight).map_or(0, |s| s.dim)
    }

    fn step(&self) -> Rational {
        Rational::from(self.pres.d())
    }

    fn map_or_zero(map: &Option<QMatrix>, rows: usize, cols: usize) -> QMatrix {
        map.clone().unwrap_or_else(|| QMatrix::zeros(rows, cols))
    }

    /// All relation violations, sorted; empty iff the module is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = BTreeSet::new();
        let step = self.step();
        let big_b = self.pres.big_b();
        for (alpha, w) in &self.spaces {
            let mut flag = |kind| {
                out.insert(Violation {
                    kind,
                    weight: alpha.clone(),
                });
            };
            let up = alpha + &step;
            let down = alpha - &step;
            let up_dim = self.dim(&up);
            let down_dim = self.dim(&down);
            let shape_ok = w.nilpotent.rows() == w.dim
                && w.nilpotent.cols() == w.dim
                && w.top_open.len() == w.dim
                && w.bottom_open.len() == w.dim
                && w.raise.as_ref().is_none_or(|m| m.rows() == up_dim && m.cols() == w.dim)
                && w.lower.as_ref().is_none_or(|m| m.rows() == down_dim && m.cols() == w.dim);
            if !shape_ok {
                flag(ViolationKind::Shape);
                continue;
            }
            if !w.nilpotent.pow(w.dim as u32).is_zero() {
                flag(ViolationKind::NotNilpotent);
            }
            let raise = Self::map_or_zero(&w.raise, up_dim, w.dim);
            let lower = Self::map_or_zero(&w.lower, down_dim, w.dim);

            // Δf on T_α
            let lower_above = self
                .spaces
                .get(&up)
                .map(|u| Self::map_or_zero(&u.lower, w.dim, u.dim))
                .unwrap_or_else(|| QMatrix::zeros(w.dim, 0));
            if let Ok(lhs) = lower_above.mul(&raise) {
                let rhs = w.nilpotent.eval_poly_shifted(big_b, alpha);
                if (0..w.dim).any(|j| !w.top_open[j] && lhs.column(j) != rhs.column(j)) {
                    flag(ViolationKind::DeltaF);
                }
            } else {
                flag(ViolationKind::Shape);
            }

            // fΔ on T_α
            let raise_below = self
                .spaces
                .get(&down)
                .map(|u| Self::map_or_zero(&u.raise, w.dim, u.dim))
                .unwrap_or_else(|| QMatrix::zeros(w.dim, 0));
            if let Ok(lhs) = raise_below.mul(&lower) {
                let rhs = w.nilpotent.eval_poly_shifted(big_b, &down);
                if (0..w.dim).any(|j| !w.bottom_open[j] && lhs.column(j) != rhs.column(j)) {
                    flag(ViolationKind::FDelta);
                }
            } else {
                flag(ViolationKind::Shape);
            }

            if let (Some(f), Some(u)) = (&w.raise, self.spaces.get(&up)) {
                if f.mul(&w.nilpotent).ok() != u.nilpotent.mul(f).ok() {
                    flag(ViolationKind::RaiseIntertwine);
                }
            }
            if let (Some(dm), Some(l)) = (&w.lower, self.spaces.get(&down)) {
                if dm.mul(&w.nilpotent).ok() != l.nilpotent.mul(dm).ok() {
                    flag(ViolationKind::LowerIntertwine);
                }
            }
        }
        out.into_iter().collect()
    }

    fn raise_vec(&self, weight: &Rational, v: &[Rational]) -> Result<(Rational, Vec<Rational>)> {
        self.move_vec(weight, v, true)
    }

    fn lower_vec(&self, weight: &Rational, v: &[Rational]) -> Result<(Rational, Vec<Rational>)> {
        self.move_vec(weight, v, false)
    }

    fn move_vec(&self, weight: &Rational, v: &[Rational], up: bool) -> Result<(Rational, Vec<Rational>)> {
        let target = if up { weight + &self.step() } else { weight - &self.step() };
        let Some(w) = self.spaces.get(weight) else {
            return Ok((target, Vec::new()));
        };
        let (map, open) = if up {
            (&w.raise, &w.top_open)
        } else {
            (&w.lower, &w.bottom_open)
        };
        if v.iter().zip(open).any(|(x, &o)| o && !x.is_zero()) {
            return Err(Error::LeavesWindow(weight.clone()));
        }
        let out = match map {
            Some(m) => m.apply(v)?,
            None => vec![Rational::zero(); self.dim(&target)],
        };
        Ok((target, out))
    }

    /// Action of an algebra element on `v ∈ T_α`, returned per target weight.
    ///
    /// Fails with [`Error::LeavesWindow`] if the action needs a map that
    /// leaves the stored window.
    pub fn act(
        &self,
        x: &AElement,
        weight: &Rational,
        v: &[Rational],
    ) -> Result<BTreeMap<Rational, Vec<Rational>>> {
        if x.presentation().as_ref() != self.pres.as_ref() {
            return Err(Error::PresentationMismatch);
        }
        if v.len() != self.dim(weight) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} at weight {weight} of dimension {}",
                v.len(),
                self.dim(weight)
            )));
        }
        let mut out: BTreeMap<Rational, Vec<Rational>> = BTreeMap::new();
        for (a, p, b) in x.components() {
            let mut cur_w = weight.clone();
            let mut cur = v.to_vec();
            for _ in 0..b {
                (cur_w, cur) = self.lower_vec(&cur_w, &cur)?;
            }
            cur = self.theta_poly_apply(&p, &cur_w, &cur)?;
            for _ in 0..a {
                (cur_w, cur) = self.raise_vec(&cur_w, &cur)?;
            }
            match out.get_mut(&cur_w) {
                Some(acc) => {
                    for (x, y) in acc.iter_mut().zip(&cur) {
                        *x += y;
                    }
                }
                None => {
                    out.insert(cur_w, cur);
                }
            }
        }
        out.retain(|_, v| !v.is_empty());
        Ok(out)
    }

    fn theta_poly_apply(&self, p: &UniPoly, weight: &Rational, v: &[Rational]) -> Result<Vec<Rational>> {
        match self.spaces.get(weight) {
            Some(w) => w.nilpotent.eval_poly_shifted(p, weight).apply(v),
            None => Ok(Vec::new()),
        }
    }

    /// For one-dimensional chains with nonzero raising maps: the lowering
    /// scalars after rescaling the basis so that every raising map is 1.
    /// Keyed by the source weight of the lowering edge.
    pub fn gauge_normalized_lowering(&self) -> Option<BTreeMap<Rational, Rational>> {
        let step = self.step();
        let mut out = BTreeMap::new();
        for (alpha, w) in &self.spaces {
            if w.dim != 1 || !w.nilpotent.is_zero() {
                return None;
            }
            let up = alpha + &step;
            if let Some(u) = self.spaces.get(&up) {
                if u.dim != 1 {
                    return None;
                }
                let f = w.raise.as_ref().map(|m| m.get(0, 0).clone()).unwrap_or_default();
                if f.is_zero() {
                    return None;
                }
                let dn = u.lower.as_ref().map(|m| m.get(0, 0).clone()).unwrap_or_default();
                out.insert(up, f * dn);
            }
        }
        Some(out)
    }

    /// Blockwise direct sum.
    pub fn direct_sum(&self, other: &GradedModule) -> Result<GradedModule> {
        if self.pres != other.pres {
            return Err(Error::PresentationMismatch);
        }
        let step = self.step();
        let weights: BTreeSet<&Rational> = self.spaces.keys().chain(other.spaces.keys()).collect();
        let empty = WeightSpace::new(0);
        let mut spaces = BTreeMap::new();
        for alpha in weights {
            let a = self.spaces.get(alpha).unwrap_or(&empty);
            let b = other.spaces.get(alpha).unwrap_or(&empty);
            let up = alpha + &step;
            let down = alpha - &step;
            let block = |ma: &Option<QMatrix>, mb: &Option<QMatrix>, target: &Rational| {
                if ma.is_none() && mb.is_none() {
                    return None;
                }
                let za = Self::map_or_zero(ma, self.dim(target), a.dim);
                let zb = Self::map_or_zero(mb, other.dim(target), b.dim);
                Some(za.block_diag(&zb))
            };
            spaces.insert(
                alpha.clone(),
                WeightSpace {
                    dim: a.dim + b.dim,
                    raise: block(&a.raise, &b.raise, &up),
                    lower: block(&a.lower, &b.lower, &down),
                    nilpotent: a.nilpotent.block_diag(&b.nilpotent),
                    top_open: a.top_open.iter().chain(&b.top_open).copied().collect(),
                    bottom_open: a.bottom_open.iter().chain(&b.bottom_open).copied().collect(),
                },
            );
        }
        Ok(GradedModule {
            pres: self.pres.clone(),
            spaces,
        })
    }
}

/// Weight `d(k + λ)` of the basis vector `f^{k+λ}`.
pub fn ladder_weight(pres: &APresentation, lambda: &Rational, k: i64) -> Rational {
    Rational::from(pres.d()) * (Rational::from(k) + lambda)
}

fn one_dim_chain(
    pres: &Arc<APresentation>,
    lambda: &Rational,
    window: Window,
    raise: impl Fn(i64) -> Rational,
    lower: impl Fn(i64) -> Rational,
) -> GradedModule {
    let mut spaces = BTreeMap::new();
    for k in window.indices() {
        let mut w = WeightSpace::new(1);
        if k < window.max {
            w.raise = Some(QMatrix::scalar(raise(k)));
        } else {
            w.top_open = vec![true];
        }
        if k > window.min {
            w.lower = Some(QMatrix::scalar(lower(k)));
        } else {
            w.bottom_open = vec![true];
        }
        spaces.insert(ladder_weight(pres, lambda, k), w);
    }
    GradedModule::from_spaces(pres, spaces)
}

/// The ladder `⊕_k C·f^{k+λ}` on a window, built from the presentation alone:
/// `f` raises with scalar 1 and `Δ·v_k = B(d(k+λ−1))·v_{k−1} = c·b(k+λ−1)·v_{k−1}`.
pub fn build_ladder(pres: &Arc<APresentation>, lambda: &Rational, window: Window) -> GradedModule {
    let big_b = pres.big_b();
    one_dim_chain(
        pres,
        lambda,
        window,
        |_| Rational::one(),
        |k| big_b.eval(&ladder_weight(pres, lambda, k - 1)),
    )
}

/// Indices `k` in the window where the lowering edge out of `v_k` vanishes,
/// i.e. `c·b(k+λ−1) = 0`.
pub fn break_points(pres: &APresentation, lambda: &Rational, window: Window) -> BTreeSet<i64> {
    window
        .indices()
        .filter(|&k| pres.big_b().eval(&ladder_weight(pres, lambda, k - 1)).is_zero())
        .collect()
}

/// Invariant sections `f^{k+λ}` of `C[V][1/f]·f^λ`, with `θ`, `f` and `Δ`
/// computed by differentiating in the twisted module.
pub fn psi_of_ladder(inst: &CaseInstance, lambda: &Rational, window: Window) -> Result<GradedModule> {
    let pres = Arc::new(APresentation::for_instance(inst)?);
    psi_of_ladder_with(inst, &pres, lambda, window)
}

/// [`psi_of_ladder`] with a known presentation.
pub fn psi_of_ladder_with(
    inst: &CaseInstance,
    pres: &Arc<APresentation>,
    lambda: &Rational,
    window: Window,
) -> Result<GradedModule> {
    if pres.d() != inst.d {
        return Err(Error::PresentationMismatch);
    }
    let tw = inst.twist();
    let generic = tw.f_power(0);
    let expect = |e: &TwistedElement, offset: i64, what: &str| -> Result<UniPoly> {
        let (g, j) = tw.as_scaled_power(e)?;
        if j != offset && !g.is_zero() {
            return Err(Error::NotProportional(format!(
                "{what} maps f^s to a multiple of f^(s+{j}), expected f^(s+{offset})"
            )));
        }
        Ok(g)
    };
    let theta_eigen = expect(&tw.apply(&inst.theta, &generic)?, 0, "theta")?;
    let raise = expect(&tw.mul_poly(&inst.f, &generic)?, 1, "f")?;
    let lower = expect(&tw.apply(&inst.delta, &generic)?, -1, "delta")?;

    let at = |k: i64| Rational::from(k) + lambda;
    for k in window.indices() {
        let weight = theta_eigen.eval(&at(k));
        if weight != ladder_weight(pres, lambda, k) {
            return Err(Error::NotProportional(format!(
                "theta acts on f^({}) by {weight}",
                at(k)
            )));
        }
    }
    Ok(one_dim_chain(
        pres,
        lambda,
        window,
        |k| raise.eval(&at(k)),
        |k| lower.eval(&at(k)),
    ))
}

/// Acts with a word in `f`, `θ`, `Δ` on the generic `f^s` by twisted
/// differentiation, letters applied right to left. Returns `(g, j)` with
/// `word·f^s = g(s)·f^{s+j}`.
pub fn weyl_word_action(inst: &CaseInstance, word: &[Letter]) -> Result<(UniPoly, i64)> {
    let tw = inst.twist();
    let mut e = tw.f_power(0);
    for letter in word.iter().rev() {
        e = match letter {
            Letter::F => tw.mul_poly(&inst.f, &e)?,
            Letter::Theta => tw.apply(&inst.theta, &e)?,
            Letter::Delta => tw.apply(&inst.delta, &e)?,
            Letter::Scalar(c) => tw.scale(&e, c),
        };
    }
    tw.as_scaled_power(&e)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub passed: bool,
    /// Gauge-normalized lowering scalars from differentiation.
    pub psi_edges: Option<BTreeMap<Rational, Rational>>,
    /// Gauge-normalized lowering scalars from the presentation.
    pub ladder_edges: Option<BTreeMap<Rational, Rational>>,
    pub psi_violations: Vec<Violation>,
}

/// Compares the module obtained by differentiation with the ladder built
/// from the algebra presentation, after gauge normalization.
pub fn equivalence_witness(inst: &CaseInstance, lambda: &Rational, window: Window) -> Result<EquivalenceWitness> {
    let pres = Arc::new(APresentation::for_instance(inst)?);
    equivalence_witness_with(inst, &pres, lambda, window)
}

pub fn equivalence_witness_with(
    inst: &CaseInstance,
    pres: &Arc<APresentation>,
    lambda: &Rational,
    window: Window,
) -> Result<EquivalenceWitness> {
    let psi = psi_of_ladder_with(inst, pres, lambda, window)?;
    let ladder = build_ladder(pres, lambda, window);
    let psi_edges = psi.gauge_normalized_lowering();
    let ladder_edges = ladder.gauge_normalized_lowering();
    let psi_violations = psi.validate();
    let same_weights = psi.weights().eq(ladder.weights());
    Ok(EquivalenceWitness {
        passed: same_weights
            && psi_edges.is_some()
            && psi_edges == ladder_edges
            && psi_violations.is_empty(),
        psi_edges,
        ladder_edges,
        psi_violations,
    })
}
