//! Dendriform conformal algebras and their link to O-operators.

use std::fmt;

use crate::algebra::ConformalAlgebra;
use crate::bimodule::{semidirect, Bimodule};
use crate::error::{Error, Result};
use crate::module::{assignment, ensure_same, BilinearTable, Element, FreeModule, ModuleMap, TensorElement};
use crate::poly::{Poly, Var};
use crate::verdict::Verdict;
use crate::ybe::{check_o_operator, Solution};

/// Two products `≺`, `≻` on a free module, both given by structure tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DendriformAlgebra {
    prec: BilinearTable,
    succ: BilinearTable,
}

impl DendriformAlgebra {
    pub fn new(prec: BilinearTable, succ: BilinearTable) -> Result<Self> {
        let m = prec.left();
        for (ctx, t) in [("≺ table", &prec), ("≻ table", &succ)] {
            ensure_same(ctx, m, t.left())?;
            ensure_same(ctx, m, t.right())?;
            ensure_same(ctx, m, t.out())?;
        }
        Ok(DendriformAlgebra { prec, succ })
    }

    pub fn from_fns(
        module: &FreeModule,
        prec: impl FnMut(usize, usize, usize) -> Poly,
        succ: impl FnMut(usize, usize, usize) -> Poly,
    ) -> Result<Self> {
        Ok(DendriformAlgebra {
            prec: BilinearTable::from_fn(module, module, module, prec)?,
            succ: BilinearTable::from_fn(module, module, module, succ)?,
        })
    }

    pub fn zero(module: &FreeModule) -> Self {
        let z = BilinearTable::zero(module, module, module);
        DendriformAlgebra { prec: z.clone(), succ: z }
    }

    pub fn module(&self) -> &FreeModule {
        self.prec.left()
    }

    pub fn rank(&self) -> usize {
        self.module().rank()
    }

    pub fn prec(&self) -> &BilinearTable {
        &self.prec
    }

    pub fn succ(&self) -> &BilinearTable {
        &self.succ
    }

    fn star(&self) -> BilinearTable {
        let m = self.module();
        BilinearTable::from_fn(m, m, m, |i, j, k| self.prec.get(i, j, k) + self.succ.get(i, j, k))
            .expect("sums stay within {L, D}")
    }

    /// The three splitting axioms on basis triples, as identities in
    /// `(λ, μ, ∂)`:
    ///
    /// * `dend1`: `(a≺_λb)≺_{λ+μ}c = a≺_λ(b∗_μc)`
    /// * `dend2`: `(a≻_λb)≺_{λ+μ}c = a≻_λ(b≺_μc)`
    /// * `dend3`: `a≻_λ(b≻_μc) = (a∗_λb)≻_{λ+μ}c`
    pub fn check(&self) -> Verdict {
        let (l, m) = (Poly::var(Var::L), Poly::var(Var::M));
        let lm = &l + &m;
        let at_m = assignment([(Var::L, m.clone())]);
        let star = self.star();
        let (p, s) = (&self.prec, &self.succ);
        let n = self.rank();
        let e = |i| Element::basis(self.module(), i);
        let mut v = Verdict::new();
        for i in 0..n {
            for j in 0..n {
                for r in 0..n {
                    let idx: Vec<String> = [i, j, r].iter().map(|&t| self.module().label(t).to_owned()).collect();
                    let lhs = p.evaluate(&p.entry(i, j), &e(r), &lm).unwrap();
                    let rhs = p.evaluate(&e(i), &star.entry(j, r).substitute(&at_m), &l).unwrap();
                    v.record_element("dend1", &idx, &lhs.sub(&rhs).unwrap());

                    let lhs = p.evaluate(&s.entry(i, j), &e(r), &lm).unwrap();
                    let rhs = s.evaluate(&e(i), &p.entry(j, r).substitute(&at_m), &l).unwrap();
                    v.record_element("dend2", &idx, &lhs.sub(&rhs).unwrap());

                    let lhs = s.evaluate(&e(i), &s.entry(j, r).substitute(&at_m), &l).unwrap();
                    let rhs = s.evaluate(&star.entry(i, j), &e(r), &lm).unwrap();
                    v.record_element("dend3", &idx, &lhs.sub(&rhs).unwrap());
                }
            }
        }
        v
    }

    fn ensure_dendriform(&self) -> Result<()> {
        let v = self.check();
        if v.passed() {
            Ok(())
        } else {
            Err(Error::refused("dendriform", v))
        }
    }

    /// `a ∗_λ b = a ≺_λ b + a ≻_λ b`.
    pub fn associated_associative(&self) -> Result<ConformalAlgebra> {
        self.ensure_dendriform()?;
        ConformalAlgebra::new(self.star())
    }

    /// `(A, L_≻, R_≺)` over the associated algebra, with
    /// `R_≺(a)_λ b = b ≺_{−λ−∂} a`.
    pub fn bimodule(&self) -> Result<Bimodule> {
        let a = self.associated_associative()?;
        let right = ConformalAlgebra::new(self.prec.clone())?.right_table();
        Bimodule::new(&a, self.succ.clone(), right)
    }

    /// The ambient algebra `A ⋉ A^{*c}` over the dual of [`Self::bimodule`]
    /// and `r = Σ_i (e_i ⊗ e_i^* − e_i^* ⊗ e_i)`, a solution of the
    /// conformal Yang-Baxter equation.
    pub fn canonical_solution(&self) -> Result<Solution> {
        let algebra = semidirect(&self.bimodule()?.dual())?;
        let n = self.rank();
        let sum = algebra.module().clone();
        let terms = (0..n).flat_map(|i| [(vec![i, i + n], Poly::one()), (vec![i + n, i], -Poly::one())]);
        let r = TensorElement::from_terms(vec![sum.clone(), sum], terms)?;
        Ok(Solution { algebra, r })
    }
}

impl fmt::Display for DendriformAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.module();
        let mut any = false;
        for (sym, t) in [("<", &self.prec), (">", &self.succ)] {
            for i in 0..m.rank() {
                for j in 0..m.rank() {
                    let e = t.entry(i, j);
                    if !e.is_zero() {
                        any = true;
                        writeln!(f, "{} {sym}_L {} = {e}", m.label(i), m.label(j))?;
                    }
                }
            }
        }
        if !any {
            writeln!(f, "(all products zero)")?;
        }
        Ok(())
    }
}

/// The dendriform structure `u ≻_λ v = l(T(u))_λ v`, `u ≺_λ v =
/// r(T(v))_{−λ−∂} u` on `M` induced by an O-operator `T: M → A`.
///
/// With `transport`, `T` must have a unit determinant and the structure is
/// moved to `A`: `a ≻_λ b = T(l(a)_λ T^{-1}b)`, `a ≺_λ b = T(r(b)_{−λ−∂} T^{-1}a)`.
/// Refuses unless `T` is an O-operator.
pub fn dendriform_from_o_operator(bm: &Bimodule, t0: &ModuleMap, transport: bool) -> Result<DendriformAlgebra> {
    let v = check_o_operator(t0, bm)?;
    if !v.passed() {
        return Err(Error::refused("O-operator", v));
    }
    let l = Poly::var(Var::L);
    let flip = -&l - Poly::var(Var::D);
    if transport {
        let inv = t0.inverse()?;
        let a = bm.algebra().module();
        let e = |i| Element::basis(a, i);
        let succ = table_from(a, |i, j| t0.apply(&bm.act_left(&e(i), &inv.image(j), &l)?))?;
        let prec = table_from(a, |i, j| t0.apply(&bm.act_right(&e(j), &inv.image(i), &flip)?))?;
        return DendriformAlgebra::new(prec, succ);
    }
    let m = bm.module();
    let e = |i| Element::basis(m, i);
    let succ = table_from(m, |i, j| bm.act_left(&t0.image(i), &e(j), &l))?;
    let prec = table_from(m, |i, j| bm.act_right(&t0.image(j), &e(i), &flip))?;
    DendriformAlgebra::new(prec, succ)
}

fn table_from(m: &FreeModule, mut f: impl FnMut(usize, usize) -> Result<Element>) -> Result<BilinearTable> {
    let n = m.rank();
    let mut t = BilinearTable::zero(m, m, m);
    for i in 0..n {
        for j in 0..n {
            let out = f(i, j)?;
            for k in 0..n {
                t.set(i, j, k, out.coeff(k).clone())?;
            }
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::ConformalLinearMap;
    use crate::ybe::{classify_r, r_bullet_r, solution_from_o_operator};

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    fn one() -> FreeModule {
        FreeModule::new(["a"]).unwrap()
    }

    fn rank1(prec: &str, succ: &str) -> DendriformAlgebra {
        DendriformAlgebra::from_fns(&one(), |_, _, _| p(prec), |_, _, _| p(succ)).unwrap()
    }

    #[test]
    fn axioms() {
        assert!(rank1("0", "1").check().passed());
        assert!(rank1("1", "0").check().passed());
        assert!(DendriformAlgebra::zero(&one()).check().passed());
        // (a≺a)≺a = a but a≺(a∗a) = 2a
        let v = rank1("1", "1").check();
        assert!(v.fails("dend1") && v.fails("dend3"));
        assert_eq!(v.only("dend1").first().unwrap().residual, p("-1"));
        assert!(v.only("dend2").passed());
    }

    #[test]
    fn succ_only_gives_left_bimodule() {
        let d = rank1("0", "1");
        let a = d.associated_associative().unwrap();
        assert_eq!(a.entry(0, 0, 0), &p("1"));
        let bm = d.bimodule().unwrap();
        assert!(bm.check().passed());
        assert!(bm.right().is_zero());
        let id = ModuleMap::identity(&one());
        assert!(check_o_operator(&id, &bm).unwrap().passed());
        assert_eq!(dendriform_from_o_operator(&bm, &id, false).unwrap(), d);
        assert_eq!(dendriform_from_o_operator(&bm, &id, true).unwrap(), d);
        let z = dendriform_from_o_operator(&bm, &ModuleMap::zero(&one(), &one()), false).unwrap();
        assert_eq!(z, DendriformAlgebra::zero(&one()));
    }

    #[test]
    fn refusals() {
        let bad = rank1("1", "1");
        assert!(matches!(bad.associated_associative(), Err(Error::Refused { .. })));
        assert!(matches!(bad.canonical_solution(), Err(Error::Refused { .. })));
        let d = rank1("0", "1");
        let regular = Bimodule::regular(&d.associated_associative().unwrap());
        let id = ModuleMap::identity(&one());
        assert!(matches!(dendriform_from_o_operator(&regular, &id, false), Err(Error::Refused { .. })));
    }

    #[test]
    fn canonical_solution_of_succ() {
        let d = rank1("0", "1");
        let s = d.canonical_solution().unwrap();
        let a = &s.algebra;
        assert_eq!(a.module().labels(), ["a", "a*"]);
        assert_eq!(a.entry(0, 0, 0), &p("1"));
        assert!(a.entry(0, 1, 1).is_zero() && a.entry(0, 1, 0).is_zero());
        assert_eq!(a.entry(1, 0, 1), &p("1"));
        assert!(a.entry(1, 1, 0).is_zero() && a.entry(1, 1, 1).is_zero());
        assert!(r_bullet_r(a, &s.r).unwrap().is_zero());
        assert!(classify_r(a, &s.r).unwrap().all_pass());
        let id = ConformalLinearMap::new(&one(), &one(), vec![vec![p("1")]]).unwrap();
        assert_eq!(solution_from_o_operator(&d.bimodule().unwrap(), &id).unwrap(), s);
    }

    #[test]
    fn canonical_solution_of_prec() {
        let s = rank1("1", "0").canonical_solution().unwrap();
        assert_eq!(s.algebra.entry(0, 1, 1), &p("1"));
        assert!(s.algebra.entry(1, 0, 1).is_zero());
        assert!(classify_r(&s.algebra, &s.r).unwrap().all_pass());
    }
}
