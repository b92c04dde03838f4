//! Bimodules, conformal duals of bimodules, matched pairs and the
//! algebras built from them.

use crate::algebra::ConformalAlgebra;
use crate::error::{Error, Result};
use crate::module::{assignment, ensure_same, BilinearTable, Element, FreeModule};
use crate::poly::{Poly, Var};
use crate::verdict::Verdict;

/// A bimodule `(M, l, r)` of an algebra `A`. Both tables store the action
/// operators directly: `l(e_i)_λ v_p = Σ_q l_q^{ip}(λ, ∂) v_q`, likewise for
/// `r`. The right action `v ↼_λ a` is `r(a)_{−λ−∂} v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bimodule {
    algebra: ConformalAlgebra,
    left: BilinearTable,
    right: BilinearTable,
}

impl Bimodule {
    pub fn new(algebra: &ConformalAlgebra, left: BilinearTable, right: BilinearTable) -> Result<Self> {
        let m = left.right().clone();
        for t in [&left, &right] {
            ensure_same("bimodule action labels", algebra.module(), t.left())?;
            ensure_same("bimodule acted-on module", &m, t.right())?;
            ensure_same("bimodule action output", &m, t.out())?;
        }
        Ok(Bimodule {
            algebra: algebra.clone(),
            left,
            right,
        })
    }

    /// Both actions zero.
    pub fn zero(algebra: &ConformalAlgebra, module: &FreeModule) -> Self {
        let t = BilinearTable::zero(algebra.module(), module, module);
        Bimodule {
            algebra: algebra.clone(),
            left: t.clone(),
            right: t,
        }
    }

    /// `(A, L_A, R_A)`: `L_A(a)_λ b = a_λ b`, `R_A(a)_λ b = b_{−λ−∂} a`.
    pub fn regular(algebra: &ConformalAlgebra) -> Self {
        Bimodule {
            algebra: algebra.clone(),
            left: algebra.table().clone(),
            right: algebra.right_table(),
        }
    }

    pub fn algebra(&self) -> &ConformalAlgebra {
        &self.algebra
    }

    pub fn module(&self) -> &FreeModule {
        self.left.right()
    }

    pub fn left(&self) -> &BilinearTable {
        &self.left
    }

    pub fn right(&self) -> &BilinearTable {
        &self.right
    }

    /// `l(a)_π v`.
    pub fn act_left(&self, a: &Element, v: &Element, pi: &Poly) -> Result<Element> {
        self.left.evaluate(a, v, pi)
    }

    /// `r(a)_π v`.
    pub fn act_right(&self, a: &Element, v: &Element, pi: &Poly) -> Result<Element> {
        self.right.evaluate(a, v, pi)
    }

    /// The dual bimodule `(M^{*c}, r^*, l^*)`:
    /// new left `_q^{ip}(L, D) = r_p^{iq}(L, −L−D)`, new right likewise from `l`.
    pub fn dual(&self) -> Bimodule {
        let a = self.algebra.module();
        let m = self.module();
        let md = m.dual();
        let flip = assignment([(Var::D, -Poly::var(Var::L) - Poly::var(Var::D))]);
        let dualize = |t: &BilinearTable| {
            BilinearTable::from_fn(a, &md, &md, |i, p, q| t.get(i, q, p).substitute(&flip))
                .expect("substitution stays within {L, D}")
        };
        Bimodule {
            algebra: self.algebra.clone(),
            left: dualize(&self.right),
            right: dualize(&self.left),
        }
    }

    /// The three bimodule identities on basis elements, as polynomial
    /// identities in `(λ, μ, ∂)`:
    ///
    /// * `bimod-left`: `l(a_λb)_{λ+μ} v = l(a)_λ(l(b)_μ v)`
    /// * `bimod-right`: `r(b)_{−λ−μ−∂}(r(a)_{−λ−∂} v) = r(a_μ b)_{−λ−∂} v`
    /// * `bimod-mixed`: `l(a)_λ(r(b)_{−μ−∂} v) = r(b)_{−λ−μ−∂}(l(a)_λ v)`
    pub fn check(&self) -> Verdict {
        let (l, m, d) = (Poly::var(Var::L), Poly::var(Var::M), Poly::var(Var::D));
        let lm = &l + &m;
        let neg_l = -&l - &d;
        let neg_m = -&m - &d;
        let neg_lm = -&lm - &d;
        let n = self.algebra.rank();
        let k = self.module().rank();
        let at_m = assignment([(Var::L, m.clone())]);
        let mut v = Verdict::new();
        for i in 0..n {
            for j in 0..n {
                let ai = self.algebra.basis(i);
                let bj = self.algebra.basis(j);
                let ab = self.algebra.table().entry(i, j);
                let ab_m = ab.substitute(&at_m);
                for p in 0..k {
                    let vp = Element::basis(self.module(), p);
                    let idx = vec![
                        self.algebra.module().label(i).to_owned(),
                        self.algebra.module().label(j).to_owned(),
                        self.module().label(p).to_owned(),
                    ];
                    let run = || -> Result<[Element; 3]> {
                        let left = self
                            .act_left(&ab, &vp, &lm)?
                            .sub(&self.act_left(&ai, &self.act_left(&bj, &vp, &m)?, &l)?)?;
                        let right = self
                            .act_right(&bj, &self.act_right(&ai, &vp, &neg_l)?, &neg_lm)?
                            .sub(&self.act_right(&ab_m, &vp, &neg_l)?)?;
                        let mixed = self
                            .act_left(&ai, &self.act_right(&bj, &vp, &neg_m)?, &l)?
                            .sub(&self.act_right(&bj, &self.act_left(&ai, &vp, &l)?, &neg_lm)?)?;
                        Ok([left, right, mixed])
                    };
                    let [left, right, mixed] = run().expect("tables validated at construction");
                    v.record_element("bimod-left", &idx, &left);
                    v.record_element("bimod-right", &idx, &right);
                    v.record_element("bimod-mixed", &idx, &mixed);
                }
            }
        }
        v
    }
}

/// A matched pair `(A, B, l_A, r_A, l_B, r_B)`: `(B, l_A, r_A)` is a bimodule
/// of `A` and `(A, l_B, r_B)` one of `B`, subject to six compatibilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchedPair {
    /// `(B, l_A, r_A)` over `A`.
    on_b: Bimodule,
    /// `(A, l_B, r_B)` over `B`.
    on_a: Bimodule,
}

impl MatchedPair {
    pub fn new(on_b: Bimodule, on_a: Bimodule) -> Result<Self> {
        ensure_same("matched pair, A", on_b.algebra().module(), on_a.module())?;
        ensure_same("matched pair, B", on_a.algebra().module(), on_b.module())?;
        Ok(MatchedPair { on_b, on_a })
    }

    /// Builds the pair from the two algebras and the four action tables.
    pub fn from_tables(
        a: &ConformalAlgebra,
        b: &ConformalAlgebra,
        l_a: BilinearTable,
        r_a: BilinearTable,
        l_b: BilinearTable,
        r_b: BilinearTable,
    ) -> Result<Self> {
        MatchedPair::new(Bimodule::new(a, l_a, r_a)?, Bimodule::new(b, l_b, r_b)?)
    }

    /// `(A, A^{*c}, R_A^*, L_A^*, R_B^*, L_B^*)` for an algebra `B` on `A^{*c}`,
    /// identifying `(A^{*c})^{*c}` with `A`.
    pub fn induced(a: &ConformalAlgebra, b: &ConformalAlgebra) -> Result<Self> {
        ensure_same("induced matched pair", &a.module().dual(), b.module())?;
        let on_b = Bimodule::regular(a).dual();
        let dual_b = Bimodule::regular(b).dual();
        let m = a.module();
        let on_a = Bimodule {
            algebra: b.clone(),
            left: dual_b.left.relabel(b.module(), m, m),
            right: dual_b.right.relabel(b.module(), m, m),
        };
        MatchedPair::new(on_b, on_a)
    }

    pub fn a(&self) -> &ConformalAlgebra {
        self.on_b.algebra()
    }

    pub fn b(&self) -> &ConformalAlgebra {
        self.on_a.algebra()
    }

    /// `(B, l_A, r_A)`.
    pub fn a_on_b(&self) -> &Bimodule {
        &self.on_b
    }

    /// `(A, l_B, r_B)`.
    pub fn b_on_a(&self) -> &Bimodule {
        &self.on_a
    }

    /// Both bimodule checks (ids prefixed `A:` and `B:`), then `es1`–`es6`.
    pub fn check(&self) -> Verdict {
        let mut v = self.on_b.check().prefixed("A:");
        v.extend(self.on_a.check().prefixed("B:"));
        v.extend(self.check_identities(&["es1", "es2", "es3", "es4", "es5", "es6"]));
        v
    }

    /// Checks the named compatibilities among `es1`–`es6` only.
    pub fn check_identities(&self, which: &[&str]) -> Verdict {
        let (l, m, d) = (Poly::var(Var::L), Poly::var(Var::M), Poly::var(Var::D));
        let lm = &l + &m;
        let neg_l = -&l - &d;
        let neg_m = -&m - &d;
        let neg_lm = -&lm - &d;
        let (ta, tb) = (self.a().table(), self.b().table());
        let (l_a, r_a) = (&self.on_b.left, &self.on_b.right);
        let (l_b, r_b) = (&self.on_a.left, &self.on_a.right);
        let (ma, mb) = (self.a().module(), self.b().module());
        let mut v = Verdict::new();

        let ea = |i| Element::basis(ma, i);
        let eb = |i| Element::basis(mb, i);
        let lab = |m: &FreeModule, i: usize| m.label(i).to_owned();
        let wants = |id: &str| which.contains(&id);

        for i in 0..ma.rank() {
            for p in 0..mb.rank() {
                for q in 0..mb.rank() {
                    let (a, x, y) = (ea(i), eb(p), eb(q));
                    if wants("es1") {
                        let lhs = l_a.evaluate(&a, &tb.evaluate(&x, &y, &m).unwrap(), &l).unwrap();
                        let rhs = tb
                            .evaluate(&l_a.evaluate(&a, &x, &l).unwrap(), &y, &lm)
                            .unwrap()
                            .add(&l_a.evaluate(&r_b.evaluate(&x, &a, &neg_l).unwrap(), &y, &lm).unwrap())
                            .unwrap();
                        v.record_element("es1", &[lab(ma, i), lab(mb, p), lab(mb, q)], &lhs.sub(&rhs).unwrap());
                    }
                    if wants("es4") {
                        let lhs = r_a
                            .evaluate(&l_b.evaluate(&y, &a, &m).unwrap(), &x, &neg_l)
                            .unwrap()
                            .add(&tb.evaluate(&x, &r_a.evaluate(&a, &y, &neg_m).unwrap(), &l).unwrap())
                            .unwrap();
                        let rhs = r_a.evaluate(&a, &tb.evaluate(&x, &y, &l).unwrap(), &neg_lm).unwrap();
                        v.record_element("es4", &[lab(mb, p), lab(mb, q), lab(ma, i)], &lhs.sub(&rhs).unwrap());
                    }
                    if wants("es5") {
                        let lhs = r_a
                            .evaluate(&r_b.evaluate(&y, &a, &neg_m).unwrap(), &x, &neg_l)
                            .unwrap()
                            .add(&tb.evaluate(&x, &l_a.evaluate(&a, &y, &m).unwrap(), &l).unwrap())
                            .unwrap();
                        let rhs = l_a
                            .evaluate(&l_b.evaluate(&x, &a, &l).unwrap(), &y, &lm)
                            .unwrap()
                            .add(&tb.evaluate(&r_a.evaluate(&a, &x, &neg_l).unwrap(), &y, &lm).unwrap())
                            .unwrap();
                        v.record_element("es5", &[lab(mb, p), lab(ma, i), lab(mb, q)], &lhs.sub(&rhs).unwrap());
                    }
                }
            }
        }
        for i in 0..ma.rank() {
            for j in 0..ma.rank() {
                for p in 0..mb.rank() {
                    let (a, b, x) = (ea(i), ea(j), eb(p));
                    if wants("es2") {
                        let lhs = r_b.evaluate(&x, &ta.evaluate(&a, &b, &l).unwrap(), &neg_lm).unwrap();
                        let rhs = ta
                            .evaluate(&a, &r_b.evaluate(&x, &b, &neg_m).unwrap(), &l)
                            .unwrap()
                            .add(&r_b.evaluate(&l_a.evaluate(&b, &x, &m).unwrap(), &a, &neg_l).unwrap())
                            .unwrap();
                        v.record_element("es2", &[lab(ma, i), lab(ma, j), lab(mb, p)], &lhs.sub(&rhs).unwrap());
                    }
                    if wants("es3") {
                        let lhs = l_b.evaluate(&x, &ta.evaluate(&a, &b, &m).unwrap(), &l).unwrap();
                        let rhs = ta
                            .evaluate(&l_b.evaluate(&x, &a, &l).unwrap(), &b, &lm)
                            .unwrap()
                            .add(&l_b.evaluate(&r_a.evaluate(&a, &x, &neg_l).unwrap(), &b, &lm).unwrap())
                            .unwrap();
                        v.record_element("es3", &[lab(mb, p), lab(ma, i), lab(ma, j)], &lhs.sub(&rhs).unwrap());
                    }
                    if wants("es6") {
                        let lhs = ta
                            .evaluate(&a, &l_b.evaluate(&x, &b, &m).unwrap(), &l)
                            .unwrap()
                            .add(&r_b.evaluate(&r_a.evaluate(&b, &x, &neg_m).unwrap(), &a, &neg_l).unwrap())
                            .unwrap();
                        let rhs = ta
                            .evaluate(&r_b.evaluate(&x, &a, &neg_l).unwrap(), &b, &lm)
                            .unwrap()
                            .add(&l_b.evaluate(&l_a.evaluate(&a, &x, &l).unwrap(), &b, &lm).unwrap())
                            .unwrap();
                        v.record_element("es6", &[lab(ma, i), lab(mb, p), lab(ma, j)], &lhs.sub(&rhs).unwrap());
                    }
                }
            }
        }
        v
    }

    /// `A ⋈ B` on `A ⊕ B` without checking the matched-pair identities.
    pub fn bowtie_unchecked(&self) -> ConformalAlgebra {
        let (ma, mb) = (self.a().module(), self.b().module());
        let (na, nb) = (ma.rank(), mb.rank());
        let sum = ma.direct_sum(mb);
        let l = Poly::var(Var::L);
        let neg_l = -&l - Poly::var(Var::D);
        let (l_a, r_a) = (&self.on_b.left, &self.on_b.right);
        let (l_b, r_b) = (&self.on_a.left, &self.on_a.right);
        let mut out = ConformalAlgebra::null(&sum);
        let mut table = out.table().clone();
        let mut put = |i: usize, j: usize, offset: usize, e: Element| {
            for (k, c) in e.coeffs().iter().enumerate() {
                let cur = table.get(i, j, k + offset).clone();
                table.set(i, j, k + offset, cur + c.clone()).expect("products stay in {L, D}");
            }
        };
        for i in 0..na + nb {
            for j in 0..na + nb {
                let (left_a, right_a) = (i < na, j < na);
                match (left_a, right_a) {
                    (true, true) => put(i, j, 0, self.a().table().entry(i, j)),
                    (false, false) => put(i, j, na, self.b().table().entry(i - na, j - na)),
                    (false, true) => {
                        let (x, b) = (Element::basis(mb, i - na), Element::basis(ma, j));
                        put(i, j, 0, l_b.evaluate(&x, &b, &l).unwrap());
                        put(i, j, na, r_a.evaluate(&b, &x, &neg_l).unwrap());
                    }
                    (true, false) => {
                        let (a, y) = (Element::basis(ma, i), Element::basis(mb, j - na));
                        put(i, j, 0, r_b.evaluate(&y, &a, &neg_l).unwrap());
                        put(i, j, na, l_a.evaluate(&a, &y, &l).unwrap());
                    }
                }
            }
        }
        out = ConformalAlgebra::new(table).expect("square table");
        out
    }

    /// `A ⋈ B`; refuses unless [`MatchedPair::check`] passes.
    pub fn bowtie(&self) -> Result<ConformalAlgebra> {
        let v = self.check();
        if !v.passed() {
            return Err(Error::refused("matched pair", v));
        }
        Ok(self.bowtie_unchecked())
    }
}

/// `A ⋉ M`: `a_λ v = l(a)_λ v`, `v_λ a = r(a)_{−λ−∂} v`, products inside `M`
/// zero. Refuses unless the bimodule identities hold.
pub fn semidirect(bm: &Bimodule) -> Result<ConformalAlgebra> {
    let v = bm.check();
    if !v.passed() {
        return Err(Error::refused("bimodule", v));
    }
    Ok(trivial_pair(bm).bowtie_unchecked())
}

/// The matched pair `(A, M)` with the null algebra on `M` and trivial
/// `M`-actions on `A`; its bowtie is the semidirect product.
pub fn trivial_pair(bm: &Bimodule) -> MatchedPair {
    let b = ConformalAlgebra::null(bm.module());
    MatchedPair {
        on_b: bm.clone(),
        on_a: Bimodule::zero(&b, bm.algebra().module()),
    }
}
