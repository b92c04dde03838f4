//! Coalgebras, duality between products and coproducts, Frobenius forms,
//! antisymmetric infinitesimal (ASI) bialgebras and the double construction.

use std::fmt;

use crate::algebra::ConformalAlgebra;
use crate::bimodule::MatchedPair;
use crate::error::{Error, Result};
use crate::module::{assignment, ensure_same, Element, FreeModule, ModuleMap, TensorElement};
use crate::poly::{determinant, Poly, Var};
use crate::verdict::{Counterexample, Verdict};
use crate::ybe;

fn x(i: usize) -> Poly {
    Poly::var(Var::slot(i))
}

/// A coproduct on a free module: `Δ(e_k) = Σ Q_k^{ij}(x1, x2) e_i ⊗ e_j`,
/// extended by `Δ(f(∂)e_k) = f(x1 + x2) Δ(e_k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coproduct {
    module: FreeModule,
    images: Vec<TensorElement>,
}

impl Coproduct {
    /// `images[k] = Δ(e_k)`, each a two-leg tensor over `M ⊗ M` with
    /// coefficients in `x1, x2` only.
    pub fn new(module: &FreeModule, images: Vec<TensorElement>) -> Result<Self> {
        if images.len() != module.rank() {
            return Err(Error::Shape {
                context: "coproduct",
                detail: format!("{} images for rank {}", images.len(), module.rank()),
            });
        }
        for t in &images {
            if t.legs() != [module.clone(), module.clone()] {
                return Err(Error::Shape {
                    context: "coproduct",
                    detail: "every image must lie in M ⊗ M".into(),
                });
            }
            for (_, c) in t.terms() {
                if let Some(var) = c.variables().iter().find(|v| v.slot_index().is_none()) {
                    return Err(Error::ForeignVariable {
                        context: "coproduct coefficient",
                        var,
                    });
                }
            }
        }
        Ok(Coproduct {
            module: module.clone(),
            images,
        })
    }

    pub fn zero(module: &FreeModule) -> Self {
        Coproduct {
            module: module.clone(),
            images: vec![TensorElement::zero(vec![module.clone(), module.clone()]); module.rank()],
        }
    }

    pub fn module(&self) -> &FreeModule {
        &self.module
    }

    /// `Δ(e_k)`.
    pub fn image(&self, k: usize) -> &TensorElement {
        &self.images[k]
    }

    pub fn images(&self) -> &[TensorElement] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(TensorElement::is_zero)
    }

    pub fn neg(&self) -> Coproduct {
        Coproduct {
            module: self.module.clone(),
            images: self.images.iter().map(TensorElement::neg).collect(),
        }
    }

    /// `Δ(Σ f_k(∂) e_k) = Σ f_k(x1 + x2) Δ(e_k)`; free parameters pass through.
    pub fn apply(&self, e: &Element) -> Result<TensorElement> {
        ensure_same("coproduct argument", &self.module, e.module())?;
        TensorElement::from_element(e).expand_leg(1, &self.images)
    }

    /// Same coproduct over another module of equal rank.
    pub fn relabel(&self, module: &FreeModule) -> Coproduct {
        Coproduct {
            module: module.clone(),
            images: self
                .images
                .iter()
                .map(|t| t.relabel_leg(1, module).relabel_leg(2, module))
                .collect(),
        }
    }

    /// `(I ⊗ Δ)Δ(e_k) = (Δ ⊗ I)Δ(e_k)` for every basis element.
    pub fn check_coassociativity(&self) -> Verdict {
        let mut v = Verdict::new();
        for (k, d) in self.images.iter().enumerate() {
            let lhs = d.expand_leg(2, &self.images).expect("shape validated");
            let rhs = d.expand_leg(1, &self.images).expect("shape validated");
            v.record_tensor("coassoc", &[self.module.label(k).to_owned()], &lhs.sub(&rhs).expect("same legs"));
        }
        v
    }

    /// The dual algebra on `M^{*c}`: `R_k^{pq}(λ, ∂) = Q_k^{pq}(λ, −λ−∂)`.
    pub fn dual_algebra(&self) -> ConformalAlgebra {
        let md = self.module.dual();
        let a = assignment([
            (Var::slot(1), Poly::var(Var::L)),
            (Var::slot(2), -Poly::var(Var::L) - Poly::var(Var::D)),
        ]);
        ConformalAlgebra::from_fn(&md, |p, q, k| self.images[k].coefficient(&[p, q]).substitute(&a))
            .expect("coefficients in x1, x2 map into {L, D}")
    }
}

impl fmt::Display for Coproduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.images.iter().enumerate() {
            writeln!(f, "Δ({}) = {t}", self.module.label(k))?;
        }
        Ok(())
    }
}

/// `Δ` on `A^{*c}` dual to the product of `A`:
/// `Δ(e_k^*) = Σ P_k^{ij}(x1, −x1−x2) e_i^* ⊗ e_j^*`.
pub fn coproduct_from_algebra(a: &ConformalAlgebra) -> Coproduct {
    let md = a.module().dual();
    let sub = assignment([(Var::L, x(1)), (Var::D, -x(1) - x(2))]);
    let n = a.rank();
    let images = (0..n)
        .map(|k| {
            let terms = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| (vec![i, j], a.entry(i, j, k).substitute(&sub)));
            TensorElement::from_terms(vec![md.clone(), md.clone()], terms).expect("indices in range")
        })
        .collect();
    Coproduct { module: md, images }
}

/// The algebra on `M^{*c}` dual to `Δ` (see [`Coproduct::dual_algebra`]).
pub fn algebra_from_coproduct(delta: &Coproduct) -> ConformalAlgebra {
    delta.dual_algebra()
}

/// A conformal bilinear form `⟨e_i, e_j⟩_λ = B_ij(λ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    module: FreeModule,
    table: Vec<Vec<Poly>>,
}

impl BilinearForm {
    pub fn new(module: &FreeModule, table: Vec<Vec<Poly>>) -> Result<Self> {
        let n = module.rank();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::Shape {
                context: "bilinear form",
                detail: format!("expected a {n}×{n} table"),
            });
        }
        for p in table.iter().flatten() {
            if let Some(var) = p.variables().iter().find(|&v| v != Var::L) {
                return Err(Error::ForeignVariable {
                    context: "bilinear form entry",
                    var,
                });
            }
        }
        Ok(BilinearForm {
            module: module.clone(),
            table,
        })
    }

    pub fn zero(module: &FreeModule) -> Self {
        let n = module.rank();
        BilinearForm {
            module: module.clone(),
            table: vec![vec![Poly::zero(); n]; n],
        }
    }

    pub fn module(&self) -> &FreeModule {
        &self.module
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.table[i][j]
    }

    pub fn table(&self) -> &[Vec<Poly>] {
        &self.table
    }

    /// `φ: A → A^{*c}`, `φ(e_i) = Σ_j B_ij(−∂) e_j^*`.
    pub fn to_dual_map(&self) -> ModuleMap {
        let a = assignment([(Var::L, -Poly::var(Var::D))]);
        let m = self
            .table
            .iter()
            .map(|row| row.iter().map(|p| p.substitute(&a)).collect())
            .collect();
        ModuleMap::new(&self.module, &self.module.dual(), m).expect("entries in D")
    }
}

/// Symmetry, invariance and nondegeneracy of a form (ids `symmetry`,
/// `invariance`, `nondegeneracy`):
///
/// * `B_ij(λ) = B_ji(−λ)`;
/// * `Σ_s P_s^{ij}(λ, −μ) B_sk(μ) = Σ_s P_s^{jk}(μ−λ, λ) B_is(λ)`;
/// * `det(B_ij(−∂))` is a nonzero constant.
pub fn check_frobenius(a: &ConformalAlgebra, form: &BilinearForm) -> Result<Verdict> {
    ensure_same("Frobenius form", a.module(), form.module())?;
    let n = a.rank();
    let (l, m) = (Poly::var(Var::L), Poly::var(Var::M));
    let neg_l = assignment([(Var::L, -&l)]);
    let at_m = assignment([(Var::L, m.clone())]);
    let lhs_at = assignment([(Var::L, l.clone()), (Var::D, -&m)]);
    let rhs_at = assignment([(Var::L, &m - &l), (Var::D, l.clone())]);
    let lab = |i: usize| a.module().label(i).to_owned();
    let mut v = Verdict::new();
    for i in 0..n {
        for j in 0..n {
            let res = form.entry(i, j) - &form.entry(j, i).substitute(&neg_l);
            v.record_poly("symmetry", vec![lab(i), lab(j)], res);
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs: Poly = (0..n)
                    .map(|s| a.entry(i, j, s).substitute(&lhs_at) * form.entry(s, k).substitute(&at_m))
                    .sum();
                let rhs: Poly = (0..n)
                    .map(|s| a.entry(j, k, s).substitute(&rhs_at) * form.entry(i, s))
                    .sum();
                v.record_poly("invariance", vec![lab(i), lab(j), lab(k)], lhs - rhs);
            }
        }
    }
    let det = determinant(form.to_dual_map().matrix());
    if det.is_zero() || !det.is_constant() {
        v.counterexamples.push(Counterexample {
            identity: "nondegeneracy".into(),
            indices: Vec::new(),
            component: Vec::new(),
            residual: det,
        });
    }
    Ok(v)
}

/// Which characterisation of ASI bialgebras [`check_asi`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsiMode {
    /// `thq1`/`thq2`: compatibility of `Δ` with the product on `A ⊗ A`.
    Full,
    /// `es7`/`es8`: the induced pair `(A, A^{*c}, R_A^*, L_A^*, R^*, L^*)`.
    Reduced,
}

/// Checks that `(A, Δ)` is an ASI bialgebra. Refuses unless `A` is
/// associative and `Δ` coassociative.
pub fn check_asi(a: &ConformalAlgebra, delta: &Coproduct, mode: AsiMode) -> Result<Verdict> {
    ensure_same("ASI bialgebra", a.module(), delta.module())?;
    let pre = a.check_associativity();
    if !pre.passed() {
        return Err(Error::refused("associativity", pre));
    }
    let pre = delta.check_coassociativity();
    if !pre.passed() {
        return Err(Error::refused("coassociativity", pre));
    }
    Ok(match mode {
        AsiMode::Full => asi_full(a, delta),
        AsiMode::Reduced => asi_reduced(a, delta),
    })
}

/// * `thq1`: `Δ(a_λb) = (I⊗L(a)_λ)Δ(b) + (R(b)_{−λ−∂^{⊗2}}⊗I)Δ(a)`
/// * `thq2`: `(L(b)_{−λ−∂^{⊗2}}⊗I − I⊗R(b)_{−λ−∂^{⊗2}})Δ(a)
///   + τ((L(a)_λ⊗I − I⊗R(a)_λ)Δ(b)) = 0`
fn asi_full(a: &ConformalAlgebra, delta: &Coproduct) -> Verdict {
    let n = a.rank();
    let (left, right) = (a.table(), a.right_table());
    let l = Poly::var(Var::L);
    let pi = -&l - x(1) - x(2);
    let mut v = Verdict::new();
    for i in 0..n {
        for j in 0..n {
            let (ei, ej) = (a.basis(i), a.basis(j));
            let (di, dj) = (delta.image(i), delta.image(j));
            let idx = a.labels(&[i, j]);

            let lhs = delta.apply(&a.table().entry(i, j)).unwrap();
            let rhs = dj
                .act_on_leg(2, left, &ei, &l)
                .unwrap()
                .add(&di.act_on_leg(1, &right, &ej, &pi).unwrap())
                .unwrap();
            v.record_tensor("thq1", &idx, &lhs.sub(&rhs).unwrap());

            let first = di
                .act_on_leg(1, left, &ej, &pi)
                .unwrap()
                .sub(&di.act_on_leg(2, &right, &ej, &pi).unwrap())
                .unwrap();
            let second = dj
                .act_on_leg(1, left, &ei, &l)
                .unwrap()
                .sub(&dj.act_on_leg(2, &right, &ei, &l).unwrap())
                .unwrap()
                .swap_legs(1, 2)
                .unwrap();
            v.record_tensor("thq2", &idx, &first.add(&second).unwrap());
        }
    }
    v
}

/// The induced matched pair of `(A, Δ)`: `B` is the dual algebra of `Δ`.
pub fn induced_matched_pair(a: &ConformalAlgebra, delta: &Coproduct) -> Result<MatchedPair> {
    ensure_same("induced matched pair", a.module(), delta.module())?;
    MatchedPair::induced(a, &delta.dual_algebra())
}

fn asi_reduced(a: &ConformalAlgebra, delta: &Coproduct) -> Verdict {
    let mp = induced_matched_pair(a, delta).expect("modules checked");
    let mut v = Verdict::new();
    for mut c in mp.check_identities(&["es1", "es5"]).counterexamples {
        c.identity = if c.identity == "es1" { "es7" } else { "es8" }.into();
        v.counterexamples.push(c);
    }
    v
}

/// `A ⊕ A^{*c}` with its algebra, pairing form, r-matrix and coboundary
/// coproduct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Double {
    pub algebra: ConformalAlgebra,
    pub form: BilinearForm,
    /// `r = Σ e_i ⊗ e_i^*`.
    pub r: TensorElement,
    pub coproduct: Coproduct,
    /// `i_1: A → A ⊕ A^{*c}`.
    pub inclusion_a: ModuleMap,
    /// `i_2: A^{*c} → A ⊕ A^{*c}`.
    pub inclusion_dual: ModuleMap,
}

/// The double construction of an ASI bialgebra `(A, Δ)`: the bowtie of the
/// induced matched pair, the form `⟨a+f, b+g⟩_λ = f_λ(b) + g_{−λ}(a)`, and
/// the coboundary coproduct of `r = Σ e_i ⊗ e_i^*`. Refuses unless
/// [`check_asi`] passes.
pub fn build_double(a: &ConformalAlgebra, delta: &Coproduct) -> Result<Double> {
    let v = check_asi(a, delta, AsiMode::Full)?;
    if !v.passed() {
        return Err(Error::refused("ASI bialgebra", v));
    }
    let mp = induced_matched_pair(a, delta)?;
    let algebra = mp.bowtie_unchecked();
    let n = a.rank();
    let sum = algebra.module().clone();
    let form_table = (0..2 * n)
        .map(|i| {
            (0..2 * n)
                .map(|j| if i + n == j || j + n == i { Poly::one() } else { Poly::zero() })
                .collect()
        })
        .collect();
    let form = BilinearForm::new(&sum, form_table)?;
    let r = TensorElement::from_terms(
        vec![sum.clone(), sum.clone()],
        (0..n).map(|i| (vec![i, i + n], Poly::one())),
    )?;
    let coproduct = ybe::coboundary_coproduct(&algebra, &r)?;
    let embed = |offset: usize, src: &FreeModule| {
        let m = (0..n)
            .map(|i| (0..2 * n).map(|j| if j == i + offset { Poly::one() } else { Poly::zero() }).collect())
            .collect();
        ModuleMap::new(src, &sum, m).expect("constant matrix")
    };
    Ok(Double {
        inclusion_a: embed(0, a.module()),
        inclusion_dual: embed(n, &a.module().dual()),
        algebra,
        form,
        r,
        coproduct,
    })
}

/// `φ(a_λ b) = φ(a)_λ φ(b)` on basis pairs (`hom-product`) and, when
/// coproducts are given, `(φ⊗φ)Δ_src = Δ_dst ∘ φ` (`hom-coproduct`).
pub fn check_homomorphism(
    phi: &ModuleMap,
    src: &ConformalAlgebra,
    dst: &ConformalAlgebra,
    coproducts: Option<(&Coproduct, &Coproduct)>,
) -> Result<Verdict> {
    ensure_same("homomorphism source", src.module(), phi.source())?;
    ensure_same("homomorphism target", dst.module(), phi.target())?;
    let l = Poly::var(Var::L);
    let n = src.rank();
    let mut v = Verdict::new();
    for i in 0..n {
        for j in 0..n {
            let lhs = phi.apply(&src.table().entry(i, j))?;
            let rhs = dst.product(&phi.image(i), &phi.image(j), &l)?;
            v.record_element("hom-product", &src.labels(&[i, j]), &lhs.sub(&rhs)?);
        }
    }
    if let Some((ds, dd)) = coproducts {
        ensure_same("homomorphism source coproduct", src.module(), ds.module())?;
        ensure_same("homomorphism target coproduct", dst.module(), dd.module())?;
        for i in 0..n {
            let lhs = phi.apply_on_leg(&phi.apply_on_leg(ds.image(i), 1)?, 2)?;
            let rhs = dd.apply(&phi.image(i))?;
            v.record_tensor("hom-coproduct", &src.labels(&[i]), &lhs.sub(&rhs)?);
        }
    }
    Ok(v)
}

/// The dual bialgebra `(A^{*c}, dual product of Δ, dual coproduct of A)`.
pub fn dual_bialgebra(a: &ConformalAlgebra, delta: &Coproduct) -> (ConformalAlgebra, Coproduct) {
    (delta.dual_algebra(), coproduct_from_algebra(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    fn ab() -> FreeModule {
        FreeModule::new(["a", "b"]).unwrap()
    }

    fn hb2() -> ConformalAlgebra {
        ConformalAlgebra::from_fn(&ab(), |i, j, k| {
            if (i, j, k) == (0, 0, 1) {
                p("D^2 + L*D + L^2")
            } else {
                Poly::zero()
            }
        })
        .unwrap()
    }

    fn two(m: &FreeModule, terms: &[(usize, usize, &str)]) -> TensorElement {
        TensorElement::from_terms(
            vec![m.clone(), m.clone()],
            terms.iter().map(|&(i, j, c)| (vec![i, j], p(c))),
        )
        .unwrap()
    }

    #[test]
    fn coassociativity_examples() {
        let m = ab();
        let good = Coproduct::new(&m, vec![two(&m, &[(0, 1, "1")]), two(&m, &[(1, 1, "1")])]).unwrap();
        assert!(good.check_coassociativity().passed());
        let bad = Coproduct::new(&m, vec![two(&m, &[(1, 1, "1")]), two(&m, &[(0, 1, "1")])]).unwrap();
        let v = bad.check_coassociativity();
        assert!(v.fails("coassoc"));
        let comps: Vec<_> = v.counterexamples.iter().map(|c| c.component.join("")).collect();
        // Δa = b⊗b: bab − abb; Δb = a⊗b: aab − bbb
        assert_eq!(comps, ["abb", "bab", "aab", "bbb"]);
        assert!(Coproduct::zero(&m).check_coassociativity().passed());
    }

    #[test]
    fn hb2_dual_coproduct() {
        let d = coproduct_from_algebra(&hb2());
        assert!(d.image(0).is_zero());
        assert_eq!(d.image(1).coefficient(&[0, 0]), p("x1^2 + x1*x2 + x2^2"));
        assert_eq!(d.module().labels(), ["a*", "b*"]);
        let back = algebra_from_coproduct(&d);
        assert_eq!(back.relabel(&ab()), hb2());
    }

    #[test]
    fn frobenius_examples() {
        let m = ab();
        let form = BilinearForm::new(&m, vec![vec![p("0"), p("1")], vec![p("1"), p("0")]]).unwrap();
        assert!(check_frobenius(&hb2(), &form).unwrap().passed());

        let skew = BilinearForm::new(&m, vec![vec![p("0"), p("L")], vec![p("-L"), p("0")]]).unwrap();
        let v = check_frobenius(&hb2(), &skew).unwrap();
        assert!(!v.fails("symmetry"));
        let inv = v.only("invariance");
        assert_eq!(inv.counterexamples.len(), 1);
        assert_eq!(inv.first().unwrap().residual, p("(M^2 - L*M + L^2)*(-M) - (L^2 - M*L + M^2)*L"));
        assert_eq!(v.only("nondegeneracy").first().unwrap().residual, p("D^2"));

        let v = check_frobenius(&hb2(), &BilinearForm::zero(&m)).unwrap();
        assert!(!v.fails("symmetry") && !v.fails("invariance") && v.fails("nondegeneracy"));
    }

    #[test]
    fn asi_refuses_non_coassociative_input() {
        let m = ab();
        let bad = Coproduct::new(&m, vec![two(&m, &[(1, 1, "1")]), two(&m, &[(0, 1, "1")])]).unwrap();
        let err = check_asi(&hb2(), &bad, AsiMode::Full).unwrap_err();
        assert!(err.refusal_verdict().unwrap().fails("coassoc"));
    }

    #[test]
    fn coproduct_rejects_lambda() {
        let m = ab();
        let err = Coproduct::new(&m, vec![two(&m, &[(0, 1, "L")]), two(&m, &[])]);
        assert!(err.is_err());
    }
}
