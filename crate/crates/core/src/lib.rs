//! Exact computations for prehomogeneous vector spaces of commutative
//! parabolic type: `b`-functions of the fundamental relative invariant, the
//! three-generator algebra `A = C⟨f, θ, Δ⟩` they present, and finite-type
//! graded modules over it.

pub mod bsat;
pub mod capalg;
pub mod catalog;
pub mod error;
pub mod gradmod;
pub mod matrix;
pub mod poly;
pub mod rational;
pub mod upoly;
pub mod weyl;

pub use bsat::{certify, compute_b, BCertificate, Omega0Verdict, SizeSet, Verdict};
pub use capalg::{AElement, APresentation, Letter, Strategy};
pub use catalog::{instantiate, list_cases, CaseInstance, CaseSpec};
pub use error::{Error, Result};
pub use gradmod::{EquivalenceWitness, GradedModule, Violation, ViolationKind, WeightSpace, Window};
pub use matrix::QMatrix;
pub use poly::{Monomial, MultiPoly};
pub use rational::Rational;
pub use upoly::{Symbol, UniPoly};
pub use weyl::{Twist, TwistedElement, WeylOp};
