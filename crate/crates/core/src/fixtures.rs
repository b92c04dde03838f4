//! Small algebras that serve as worked examples and test fixtures.

use crate::algebra::ConformalAlgebra;
use crate::bialgebra::{BilinearForm, Coproduct};
use crate::dendriform::DendriformAlgebra;
use crate::error::{Error, Result};
use crate::module::{FreeModule, TensorElement};
use crate::poly::{Poly, Rational, Var};

fn ab() -> FreeModule {
    FreeModule::new(["a", "b"]).expect("valid labels")
}

fn one() -> FreeModule {
    FreeModule::new(["a"]).expect("valid labels")
}

fn pp(s: &str) -> Poly {
    Poly::parse(s).expect("fixture expressions parse")
}

fn two_tensor(m: &FreeModule, terms: &[(usize, usize, &str)]) -> TensorElement {
    TensorElement::from_terms(
        vec![m.clone(), m.clone()],
        terms.iter().map(|&(i, j, c)| (vec![i, j], pp(c))),
    )
    .expect("indices in range")
}

/// Rank 2 on `{a, b}`: `a_λa = (∂² + λ∂ + λ²) b`, all other products zero.
pub fn hb2() -> ConformalAlgebra {
    ConformalAlgebra::from_fn(&ab(), |i, j, k| {
        if (i, j, k) == (0, 0, 1) {
            pp("D^2 + L*D + L^2")
        } else {
            Poly::zero()
        }
    })
    .expect("valid table")
}

/// `⟨a, b⟩_λ = ⟨b, a⟩_λ = 1`, other pairings zero: a Frobenius form for [`hb2`].
pub fn hb2_form() -> BilinearForm {
    BilinearForm::new(&ab(), vec![vec![pp("0"), pp("1")], vec![pp("1"), pp("0")]]).expect("valid form")
}

/// `⟨a, b⟩_λ = λ`, `⟨b, a⟩_λ = −λ`: symmetric but neither invariant nor
/// nondegenerate.
pub fn hb2_perturbed_form() -> BilinearForm {
    BilinearForm::new(&ab(), vec![vec![pp("0"), pp("L")], vec![pp("-L"), pp("0")]]).expect("valid form")
}

/// `r = a ⊗ b − b ⊗ a` in `hb2 ⊗ hb2`.
pub fn hb2_r() -> TensorElement {
    two_tensor(&ab(), &[(0, 1, "1"), (1, 0, "-1")])
}

/// The coboundary coproduct of [`hb2_r`]:
/// `Δ(a) = −2(x1² + x1x2 + x2²) b ⊗ b`, `Δ(b) = 0`.
pub fn hb2_coboundary() -> Coproduct {
    let m = ab();
    Coproduct::new(
        &m,
        vec![two_tensor(&m, &[(1, 1, "-2*(x1^2 + x1*x2 + x2^2)")]), two_tensor(&m, &[])],
    )
    .expect("valid coproduct")
}

/// Rank 2 on `{a, b}` with `a_λa = p(λ+∂) b`, together with the coproduct
/// `Δ(a) = a ⊗ b`, `Δ(b) = b ⊗ b`. An ASI bialgebra exactly when `p` is odd.
pub fn podd(p: &Poly) -> Result<(ConformalAlgebra, Coproduct)> {
    if let Some(var) = p.variables().iter().find(|&v| v != Var::L) {
        return Err(Error::ForeignVariable {
            context: "odd-polynomial fixture parameter",
            var,
        });
    }
    let shifted = p.substitute_var(Var::L, &(Poly::var(Var::L) + Poly::var(Var::D)));
    let m = ab();
    let a = ConformalAlgebra::from_fn(&m, |i, j, k| {
        if (i, j, k) == (0, 0, 1) {
            shifted.clone()
        } else {
            Poly::zero()
        }
    })?;
    let delta = Coproduct::new(&m, vec![two_tensor(&m, &[(0, 1, "1")]), two_tensor(&m, &[(1, 1, "1")])])?;
    Ok((a, delta))
}

/// Rank 1: `a_λa = k a`.
pub fn rank1(k: Rational) -> ConformalAlgebra {
    ConformalAlgebra::current(&one(), |_, _, _| k.clone())
}

/// Rank `n` on `{e1, …, en}` with all products zero.
pub fn null(n: usize) -> ConformalAlgebra {
    let m = FreeModule::new((1..=n).map(|i| format!("e{i}"))).expect("valid labels");
    ConformalAlgebra::null(&m)
}

/// Rank 1 dendriform: `a ≻_λ a = a`, `a ≺_λ a = 0`.
pub fn dend_succ() -> DendriformAlgebra {
    DendriformAlgebra::from_fns(&one(), |_, _, _| Poly::zero(), |_, _, _| Poly::one()).expect("valid tables")
}

/// Rank 1 dendriform: `a ≺_λ a = a`, `a ≻_λ a = 0`.
pub fn dend_prec() -> DendriformAlgebra {
    DendriformAlgebra::from_fns(&one(), |_, _, _| Poly::one(), |_, _, _| Poly::zero()).expect("valid tables")
}

/// `Cur(Q[x]/(x²))` on `{u, v}` with `u = 1`, `v = x`.
pub fn cur_dual2() -> ConformalAlgebra {
    let m = FreeModule::new(["u", "v"]).expect("valid labels");
    ConformalAlgebra::current(&m, |i, j, k| {
        let deg = i + j;
        Rational::from_integer((deg < 2 && k == deg).into())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn podd_shifts_the_parameter() {
        let (a, d) = podd(&pp("L^2")).unwrap();
        assert_eq!(a.entry(0, 0, 1), &pp("(L + D)^2"));
        assert!(d.check_coassociativity().passed());
        assert!(podd(&pp("D")).is_err());
    }

    #[test]
    fn fixtures_are_associative() {
        for a in [hb2(), rank1(Rational::from_integer(3.into())), null(3), cur_dual2()] {
            assert!(a.check_associativity().passed(), "{a}");
        }
        assert_eq!(null(2).module().labels(), ["e1", "e2"]);
        assert!(dend_succ().check().passed() && dend_prec().check().passed());
    }
}
