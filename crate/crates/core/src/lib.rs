//! Crossed products of finite-dimensional C*-algebras by endomorphisms.
//!
//! A finite-dimensional C*-algebra is a direct sum of full complex matrix
//! blocks. Given such an algebra `A`, a *-endomorphism `δ` of it, and a
//! closed two-sided ideal `J` orthogonal to the kernel of `δ`, there is a
//! crossed product C*-algebra generated by a copy of `A` and a partial
//! isometry `u` subject to the covariance relation `u a u* = δ(a)`. The
//! construction genuinely depends on the choice of `J`, not just on the
//! dynamical pair `(A, δ)`.
//!
//! This crate makes every ingredient of that construction computable at
//! desk scale:
//!
//! * [`algebra`] — block algebras, their elements, ideals, operator norms
//!   and quotient distances;
//! * [`endo`] — *-endomorphisms in multiplicity normal form, kernels,
//!   orthogonal ideals, and the extension of a system to one whose kernel
//!   is unital;
//! * [`matcalc`] — the *-algebra of finitely supported matrices over `A`
//!   with the convolution product `⋆`, its ℤ-grading by diagonals, Fourier
//!   coefficients, and the gauge action;
//! * [`norms`] — exact norms of graded components, the ideal-dependent
//!   seminorm whose enveloping C*-algebra is the crossed product, and an
//!   iterated-power estimator for the C*-norm of arbitrary elements;
//! * [`rep`] — covariant representations: validation, association ideals,
//!   strictness, evaluation of matrix elements as operators, and a
//!   constructive path-space representation for commutative systems;
//! * [`io`] — JSON schemas for systems, elements, ideals, representations
//!   and norm reports.
//!
//! All approximate comparisons route through a single [`Tol`] knob carried
//! by the dynamical system. Values are immutable after construction and
//! all operations are pure, so everything can be shared across threads;
//! with the default `parallel` feature the expensive inner loops run on
//! rayon, and with `--no-default-features` the same entry points fall back
//! to sequential code paths with identical results.

pub mod algebra;
pub mod endo;
mod exec;
pub mod io;
pub mod matcalc;
pub mod norms;
pub mod rep;

mod error;
mod tol;

pub use error::Error;
pub use tol::Tol;

/// Complex scalar used throughout.
pub type Complex = num_complex::Complex64;

/// Dense complex matrix used for blocks, unitaries and operators.
pub type CMat = nalgebra::DMatrix<Complex>;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
