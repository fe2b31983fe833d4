//! Exact-arithmetic construction and verification of finite-rank
//! nonassociative algebras carrying multiplicative forms of degree `d`.
//!
//! The crate builds the classical example families (split étale algebras,
//! quadratic étale and Cayley-Dickson doublings, Zorn vector matrices, cubic
//! Tits constructions, matrix algebras with determinant norms, and the
//! global-section algebras over projective space) and mechanically checks the
//! identities they are supposed to satisfy: composition `N(xy) = N(x)N(y)`,
//! its linearizations, alternativity, the degree equation, trace-tower and
//! idempotent relations, nondegeneracy, radicals and radical filtrations, and
//! factorization over ideal decompositions.
//!
//! Everything is exact: scalars live in a small tower of rings (rationals,
//! prime fields, polynomial and Laurent rings, quadratic extensions, and
//! multivariate polynomial rings for generic-element checks), and linear
//! algebra is fraction-free.

pub mod algebra;
pub mod construct;
pub mod engine;
pub mod fileio;
pub mod form;
pub mod linalg;
pub mod mpoly;
pub mod registry;
pub mod report;
pub mod scalar;

pub use algebra::{Algebra, AlgebraError, Element, Ideal};
pub use construct::{BuildError, FormedAlgebra, Provenance};
pub use form::{DegreeForm, SymmetricTensor};
pub use linalg::ExactMatrix;
pub use report::{Method, Outcome, VerificationReport};
pub use scalar::{RingDescriptor, Scalar, ScalarError};
