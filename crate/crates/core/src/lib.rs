//! Exact symbolic engine for finite free associative conformal algebras.
//!
//! Everything is represented by structure polynomials with exact rational
//! coefficients: an algebra on a free `C[∂]`-module of rank `n` is the table
//! `P_k^{ij}(λ, ∂)` with `e_i λ e_j = Σ_k P_k^{ij}(λ, ∂) e_k`. Identities are
//! checked as polynomial identities and every failure comes back as a
//! [`Counterexample`] carrying the residual polynomial.

pub mod algebra;
pub mod bialgebra;
pub mod bimodule;
pub mod dendriform;
pub mod error;
pub mod fixtures;
pub mod module;
pub mod poly;
pub mod verdict;
pub mod ybe;

pub use algebra::ConformalAlgebra;
pub use bialgebra::{AsiMode, BilinearForm, Coproduct, Double};
pub use dendriform::DendriformAlgebra;
pub use bimodule::{semidirect, Bimodule, MatchedPair};
pub use error::{Error, Result};
pub use module::{BilinearTable, ConformalLinearMap, Element, FreeModule, ModuleMap, TensorElement};
pub use poly::{Poly, Rational, Var};
pub use verdict::{Counterexample, Verdict};
