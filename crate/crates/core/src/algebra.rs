//! Conformal algebras given by structure tables.

use std::fmt;

use crate::error::Result;
use crate::module::{assignment, ensure_same, BilinearTable, Element, FreeModule};
use crate::poly::{Poly, Rational, Var};
use crate::verdict::Verdict;

/// A conformal algebra on a free module: `e_i λ e_j = Σ_k P_k^{ij}(λ, ∂) e_k`.
///
/// Associativity is a checked property ([`ConformalAlgebra::check_associativity`]),
/// not a construction invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalAlgebra {
    table: BilinearTable,
}

impl ConformalAlgebra {
    pub fn new(table: BilinearTable) -> Result<Self> {
        ensure_same("algebra table, right factor", table.left(), table.right())?;
        ensure_same("algebra table, output", table.left(), table.out())?;
        Ok(ConformalAlgebra { table })
    }

    /// `P_k^{ij} = f(i, j, k)`; entries must lie in `{L, D}`.
    pub fn from_fn(module: &FreeModule, f: impl FnMut(usize, usize, usize) -> Poly) -> Result<Self> {
        Ok(ConformalAlgebra {
            table: BilinearTable::from_fn(module, module, module, f)?,
        })
    }

    /// The algebra with all products zero.
    pub fn null(module: &FreeModule) -> Self {
        ConformalAlgebra {
            table: BilinearTable::zero(module, module, module),
        }
    }

    /// `Cur(A)` of a finite-dimensional algebra with constants `c_k^{ij}`.
    pub fn current(module: &FreeModule, mut constants: impl FnMut(usize, usize, usize) -> Rational) -> Self {
        ConformalAlgebra::from_fn(module, |i, j, k| Poly::constant(constants(i, j, k)))
            .expect("constant tables are always valid")
    }

    pub fn module(&self) -> &FreeModule {
        self.table.left()
    }

    pub fn rank(&self) -> usize {
        self.module().rank()
    }

    pub fn table(&self) -> &BilinearTable {
        &self.table
    }

    pub fn entry(&self, i: usize, j: usize, k: usize) -> &Poly {
        self.table.get(i, j, k)
    }

    pub fn basis(&self, i: usize) -> Element {
        Element::basis(self.module(), i)
    }

    /// `a_π b`, extended by sesquilinearity.
    pub fn product(&self, a: &Element, b: &Element, pi: &Poly) -> Result<Element> {
        self.table.evaluate(a, b, pi)
    }

    /// Table of the right multiplication `R(e_i)_λ e_p = e_p {}_{−λ−∂} e_i`:
    /// `R_q^{ip}(L, D) = P_q^{pi}(−L−D, D)`.
    pub fn right_table(&self) -> BilinearTable {
        let m = self.module();
        let flip = assignment([(Var::L, -Poly::var(Var::L) - Poly::var(Var::D))]);
        BilinearTable::from_fn(m, m, m, |i, p, q| self.entry(p, i, q).substitute(&flip))
            .expect("substitution stays within {L, D}")
    }

    /// `a ∘_λ b = b_{−λ−∂} a`: `P'^{ij}(L, D) = P^{ji}(−L−D, D)`.
    pub fn opposite(&self) -> ConformalAlgebra {
        ConformalAlgebra {
            table: self.right_table(),
        }
    }

    /// Same structure constants over another module of equal rank.
    pub fn relabel(&self, module: &FreeModule) -> ConformalAlgebra {
        ConformalAlgebra {
            table: self.table.relabel(module, module, module),
        }
    }

    /// `(e_i λ e_l)_{λ+μ} e_r = e_i λ (e_l μ e_r)` on every basis triple, as
    /// polynomial identities in `(λ, μ, ∂)`. Basis triples suffice by
    /// sesquilinearity.
    #[allow(clippy::needless_range_loop)]
    pub fn check_associativity(&self) -> Verdict {
        let (l, m) = (Poly::var(Var::L), Poly::var(Var::M));
        let lm = &l + &m;
        let n = self.rank();
        let mut v = Verdict::new();
        let first: Vec<Vec<Element>> = (0..n)
            .map(|i| (0..n).map(|j| self.table.entry(i, j)).collect())
            .collect();
        for i in 0..n {
            for j in 0..n {
                for r in 0..n {
                    let lhs = self.product(&first[i][j], &self.basis(r), &lm);
                    let inner = self.table.entry(j, r).substitute(&assignment([(Var::L, m.clone())]));
                    let rhs = self.product(&self.basis(i), &inner, &l);
                    let residual = lhs.and_then(|lhs| lhs.sub(&rhs?)).expect("same module");
                    v.record_element("assoc", &self.labels(&[i, j, r]), &residual);
                }
            }
        }
        v
    }

    pub(crate) fn labels(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.module().label(i).to_owned()).collect()
    }
}

impl fmt::Display for ConformalAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.rank();
        let mut any = false;
        for i in 0..n {
            for j in 0..n {
                let e = self.table.entry(i, j);
                if !e.is_zero() {
                    any = true;
                    writeln!(f, "{} _L {} = {e}", self.module().label(i), self.module().label(j))?;
                }
            }
        }
        if !any {
            writeln!(f, "(all products zero)")?;
        }
        Ok(())
    }
}
