//! r-matrices: coboundary coproducts, `r•r`, the associative conformal
//! Yang-Baxter equation, the correspondence with conformal linear maps,
//! O-operators and Rota-Baxter operators.

use crate::algebra::ConformalAlgebra;
use crate::bialgebra::{check_frobenius, BilinearForm, Coproduct};
use crate::bimodule::{semidirect, Bimodule};
use crate::error::{Error, Result};
use crate::module::{assignment, ensure_same, BilinearTable, ConformalLinearMap, Element, FreeModule, ModuleMap, TensorElement};
use crate::poly::{hyperplane_residual, Poly, Var};
use crate::verdict::{Counterexample, Verdict};

fn x(i: usize) -> Poly {
    Poly::var(Var::slot(i))
}

/// Builds an r-matrix in `A ⊗ A` from `(i, j, c_ij(x1, x2))` terms.
pub fn r_matrix(a: &ConformalAlgebra, terms: impl IntoIterator<Item = (usize, usize, Poly)>) -> Result<TensorElement> {
    let m = a.module().clone();
    let r = TensorElement::from_terms(vec![m.clone(), m], terms.into_iter().map(|(i, j, c)| (vec![i, j], c)))?;
    check_slots_only("r-matrix coefficient", &r)?;
    Ok(r)
}

fn check_slots_only(context: &'static str, t: &TensorElement) -> Result<()> {
    for (_, c) in t.terms() {
        if let Some(var) = c.variables().iter().find(|v| v.slot_index().is_none()) {
            return Err(Error::ForeignVariable { context, var });
        }
    }
    Ok(())
}

fn ensure_over(a: &ConformalAlgebra, r: &TensorElement) -> Result<()> {
    if r.order() != 2 {
        return Err(Error::Shape {
            context: "r-matrix",
            detail: format!("expected 2 legs, found {}", r.order()),
        });
    }
    ensure_same("r-matrix, first leg", a.module(), &r.legs()[0])?;
    ensure_same("r-matrix, second leg", a.module(), &r.legs()[1])
}

/// `(I ⊗ L(a)_λ − R(a)_λ ⊗ I) t` at `λ = π`.
fn coboundary_operator(a: &ConformalAlgebra, right: &BilinearTable, k: usize, t: &TensorElement, pi: &Poly) -> TensorElement {
    let e = a.basis(k);
    t.act_on_leg(2, a.table(), &e, pi)
        .unwrap()
        .sub(&t.act_on_leg(1, right, &e, pi).unwrap())
        .unwrap()
}

/// `(L(b)_π ⊗ I − I ⊗ R(b)_π) t`.
fn outer_operator(a: &ConformalAlgebra, right: &BilinearTable, k: usize, t: &TensorElement, pi: &Poly) -> TensorElement {
    let e = a.basis(k);
    t.act_on_leg(1, a.table(), &e, pi)
        .unwrap()
        .sub(&t.act_on_leg(2, right, &e, pi).unwrap())
        .unwrap()
}

/// `Δ(a) = (I ⊗ L(a)_λ − R(a)_λ ⊗ I) r` at `λ = −(x1 + x2)`.
pub fn coboundary_coproduct(a: &ConformalAlgebra, r: &TensorElement) -> Result<Coproduct> {
    ensure_over(a, r)?;
    let right = a.right_table();
    let pi = -x(1) - x(2);
    let images = (0..a.rank())
        .map(|k| coboundary_operator(a, &right, k, r, &pi))
        .collect();
    Coproduct::new(a.module(), images)
}

/// `r•r = Σ r_i⊗r_j⊗l_i{}_μ l_j|_{μ=x1} − r_i⊗r_j{}_μ l_i⊗l_j|_{μ=−x1−x2}
/// + r_i{}_μ r_j⊗l_i⊗l_j|_{μ=x2}`, the products landing in slots 3, 2, 1.
pub fn r_bullet_r(a: &ConformalAlgebra, r: &TensorElement) -> Result<TensorElement> {
    ensure_over(a, r)?;
    let rr = r.tensor(r);
    let t = a.table();
    let term1 = rr.leg_product(2, 4, 3, t, &x(1))?;
    let term2 = rr.leg_product(3, 2, 2, t, &(-x(1) - x(2)))?;
    let term3 = rr.leg_product(1, 3, 1, t, &x(2))?;
    term1.sub(&term2)?.add(&term3)
}

/// The four sub-verdicts of [`classify_r`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RClassification {
    /// `τr = −r`.
    pub antisymmetric: Verdict,
    /// `(I⊗I⊗L(a)_{−∂^{⊗3}} − R(a)_{−∂^{⊗3}}⊗I⊗I)(r•r) = 0`.
    pub qw1: Verdict,
    /// `r•r ≡ 0 mod (x1 + x2 + x3)`.
    pub cybe: Verdict,
    /// The two-operator identity applied to `r + τr`.
    pub thq3: Verdict,
}

impl RClassification {
    pub fn all_pass(&self) -> bool {
        self.combined().passed()
    }

    pub fn combined(&self) -> Verdict {
        let mut v = self.antisymmetric.clone();
        v.extend(self.qw1.clone());
        v.extend(self.cybe.clone());
        v.extend(self.thq3.clone());
        v
    }
}

/// Computes all four sub-verdicts, even when early ones fail.
pub fn classify_r(a: &ConformalAlgebra, r: &TensorElement) -> Result<RClassification> {
    ensure_over(a, r)?;
    let n = a.rank();
    let right = a.right_table();
    let tau_r = r.swap_legs(1, 2)?;
    let mut out = RClassification::default();

    out.antisymmetric
        .record_tensor("antisymmetry", &[], &r.add(&tau_r)?);

    let rr = r_bullet_r(a, r)?;
    let pi3 = -Poly::slot_sum(1, 3);
    for k in 0..n {
        let e = a.basis(k);
        let res = rr
            .act_on_leg(3, a.table(), &e, &pi3)?
            .sub(&rr.act_on_leg(1, &right, &e, &pi3)?)?;
        out.qw1.record_tensor("qw1", &a.labels(&[k]), &res);
    }

    let xs = [Var::slot(1), Var::slot(2), Var::slot(3)];
    for (idx, c) in rr.terms() {
        let res = hyperplane_residual(c, &xs)?;
        if !res.is_zero() {
            out.cybe.counterexamples.push(Counterexample {
                identity: "cybe".into(),
                indices: Vec::new(),
                component: rr.index_labels(idx),
                residual: res,
            });
        }
    }

    let sym = r.add(&tau_r)?;
    let inner_pi = -x(1) - x(2);
    let outer_pi = -Poly::var(Var::L) - x(1) - x(2);
    for i in 0..n {
        let inner = coboundary_operator(a, &right, i, &sym, &inner_pi);
        for j in 0..n {
            let res = outer_operator(a, &right, j, &inner, &outer_pi);
            out.thq3.record_tensor("thq3", &a.labels(&[i, j]), &res);
        }
    }
    Ok(out)
}

/// `T^r: X^{*c} → Y` for `r ∈ X ⊗ Y`:
/// `T^r_λ(e_p^*) = Σ_j c_pj(−λ−∂, ∂) f_j`.
pub fn map_from_r(r: &TensorElement) -> Result<ConformalLinearMap> {
    if r.order() != 2 {
        return Err(Error::Shape {
            context: "map from r",
            detail: format!("expected 2 legs, found {}", r.order()),
        });
    }
    check_slots_only("r-matrix coefficient", r)?;
    let (mx, my) = (&r.legs()[0], &r.legs()[1]);
    let sub = assignment([
        (Var::slot(1), -Poly::var(Var::L) - Poly::var(Var::D)),
        (Var::slot(2), Poly::var(Var::D)),
    ]);
    let matrix = (0..mx.rank())
        .map(|p| (0..my.rank()).map(|j| r.coefficient(&[p, j]).substitute(&sub)).collect())
        .collect();
    ConformalLinearMap::new(&mx.dual(), my, matrix)
}

/// Inverse of [`map_from_r`]: for `T: S → Y` with `T_λ(s_p) = Σ g_pj(λ,∂) f_j`,
/// the tensor `Σ g_pj(−x1−x2, x2) s_p^* ⊗ f_j ∈ S^{*c} ⊗ Y`.
pub fn r_from_map(t: &ConformalLinearMap) -> TensorElement {
    let sub = assignment([(Var::L, -x(1) - x(2)), (Var::D, x(2))]);
    let (s, y) = (t.source(), t.target());
    let terms = (0..s.rank())
        .flat_map(|p| (0..y.rank()).map(move |j| (p, j)))
        .map(|(p, j)| (vec![p, j], t.entry(p, j).substitute(&sub)));
    TensorElement::from_terms(vec![s.dual(), y.clone()], terms).expect("indices in range")
}

/// `r_T = Σ g_ij(−x1−x2, x1) e_j ⊗ v_i^* ∈ A ⊗ M^{*c}` for `T: M → A`,
/// which is `τ` applied to [`r_from_map`].
pub fn r_t(t: &ConformalLinearMap) -> TensorElement {
    r_from_map(t).swap_legs(1, 2).expect("two legs")
}

/// `T(u)_λ T(v) = T(l(T(u))_λ v) + T(r(T(v))_{−λ−∂} u)` on basis pairs of
/// `M` (id `o-operator`). Refuses unless the bimodule identities hold.
pub fn check_o_operator(t0: &ModuleMap, bm: &Bimodule) -> Result<Verdict> {
    let a = bm.algebra();
    ensure_same("O-operator source", bm.module(), t0.source())?;
    ensure_same("O-operator target", a.module(), t0.target())?;
    let pre = bm.check();
    if !pre.passed() {
        return Err(Error::refused("bimodule", pre));
    }
    let l = Poly::var(Var::L);
    let neg_l = -&l - Poly::var(Var::D);
    let m = bm.module();
    let mut v = Verdict::new();
    for i in 0..m.rank() {
        for j in 0..m.rank() {
            let (tu, tv) = (t0.image(i), t0.image(j));
            let (u, w) = (Element::basis(m, i), Element::basis(m, j));
            let lhs = a.product(&tu, &tv, &l)?;
            let rhs = t0
                .apply(&bm.act_left(&tu, &w, &l)?)?
                .add(&t0.apply(&bm.act_right(&tv, &u, &neg_l)?)?)?;
            v.record_element(
                "o-operator",
                &[m.label(i).to_owned(), m.label(j).to_owned()],
                &lhs.sub(&rhs)?,
            );
        }
    }
    Ok(v)
}

/// Rota-Baxter operators of weight zero: O-operators for the regular bimodule.
pub fn check_rota_baxter(p: &ModuleMap, a: &ConformalAlgebra) -> Result<Verdict> {
    check_o_operator(p, &Bimodule::regular(a))
}

/// An ambient algebra together with an r-matrix in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub algebra: ConformalAlgebra,
    pub r: TensorElement,
}

/// From an O-operator `T: M → A` for `(M, l, r)`: the semidirect product
/// `A ⋉ M^{*c}` over the dual bimodule and `r = r_T − τ r_T`. Refuses unless
/// `T_0` passes [`check_o_operator`].
pub fn solution_from_o_operator(bm: &Bimodule, t: &ConformalLinearMap) -> Result<Solution> {
    let v = check_o_operator(&t.at_zero(), bm)?;
    if !v.passed() {
        return Err(Error::refused("O-operator", v));
    }
    let algebra = semidirect(&bm.dual())?;
    let n = bm.algebra().rank();
    let sum = algebra.module().clone();
    let rt = r_t(t);
    let embedded = TensorElement::from_terms(
        vec![sum.clone(), sum],
        rt.terms().map(|(idx, c)| (vec![idx[0], idx[1] + n], c.clone())),
    )?;
    let r = embedded.sub(&embedded.swap_legs(1, 2)?)?;
    Ok(Solution { algebra, r })
}

/// `P^r_0 = T^r_0 ∘ φ` with `φ(e_i) = Σ_j B_ij(−∂) e_j^*`, and its
/// Rota-Baxter verdict. Refuses unless the form is Frobenius.
pub fn p_from_r(a: &ConformalAlgebra, form: &BilinearForm, r: &TensorElement) -> Result<(ModuleMap, Verdict)> {
    ensure_over(a, r)?;
    let pre = check_frobenius(a, form)?;
    if !pre.passed() {
        return Err(Error::refused("Frobenius form", pre));
    }
    let t0 = map_from_r(r)?.at_zero();
    let p0 = form.to_dual_map().then(&t0)?;
    let v = check_rota_baxter(&p0, a)?;
    Ok((p0, v))
}

/// The same coefficients with both legs moved to `module` (of equal rank).
pub fn relabel_r(r: &TensorElement, module: &FreeModule) -> TensorElement {
    r.relabel_leg(1, module).relabel_leg(2, module)
}
