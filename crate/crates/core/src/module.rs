//! Free `C[∂]`-modules, their elements and tensor powers, conformal linear
//! maps, and the λ-calculus engine that rewrites coefficients when a
//! λ-product or an action consumes tensor legs.
//!
//! Conventions used everywhere below:
//!
//! * an [`Element`] `Σ f_i(∂) e_i` stores `f_i` as a polynomial in `D`;
//! * a [`TensorElement`] stores one coefficient per multi-index, a
//!   polynomial in the slot variables `x1..xk` (`x_s` is ∂ on leg `s`);
//! * leg numbers in the public API are 1-based.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{self, Assignment, Poly, Var};

/// A finitely generated free `C[∂]`-module, identified by its basis labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeModule {
    labels: Arc<[String]>,
}

impl FreeModule {
    /// Labels must be distinct, non-empty, and free of commas and
    /// whitespace (they are used as keys in `"a,b"` table entries).
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        for (n, l) in labels.iter().enumerate() {
            if l.is_empty() || l.contains(',') || l.chars().any(char::is_whitespace) {
                return Err(Error::InvalidBasis(format!("bad label {l:?}")));
            }
            if labels[..n].contains(l) {
                return Err(Error::InvalidBasis(format!("duplicate label {l:?}")));
            }
        }
        Ok(FreeModule { labels: labels.into() })
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// The conformal dual `M^{*c}` with the dual basis `e_i^*`: labels
    /// gain a trailing `*`, or lose one if already starred.
    pub fn dual(&self) -> FreeModule {
        let labels: Vec<String> = self
            .labels
            .iter()
            .map(|l| match l.strip_suffix('*') {
                Some(base) if !base.is_empty() => base.to_owned(),
                _ => format!("{l}*"),
            })
            .collect();
        FreeModule::new(labels).unwrap_or_else(|_| {
            // Stripping can collide (`a` and `a**`); fall back to always starring.
            FreeModule {
                labels: self.labels.iter().map(|l| format!("{l}*")).collect(),
            }
        })
    }

    /// `self ⊕ other`; clashing labels of `other` are primed until unique.
    pub fn direct_sum(&self, other: &FreeModule) -> FreeModule {
        let mut labels: Vec<String> = self.labels.to_vec();
        for l in other.labels.iter() {
            let mut l = l.clone();
            while labels.contains(&l) {
                l.push('\'');
            }
            labels.push(l);
        }
        FreeModule { labels: labels.into() }
    }

    pub(crate) fn describe(&self) -> String {
        self.labels.join(", ")
    }
}

pub(crate) fn ensure_same(context: &'static str, expected: &FreeModule, found: &FreeModule) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ModuleMismatch {
            context,
            expected: expected.describe(),
            found: found.describe(),
        })
    }
}

fn ensure_vars(context: &'static str, p: &Poly, allowed: impl Fn(Var) -> bool) -> Result<()> {
    match p.variables().iter().find(|&v| !allowed(v)) {
        Some(var) => Err(Error::ForeignVariable { context, var }),
        None => Ok(()),
    }
}

/// An element `Σ f_i(∂) e_i`; coefficients are polynomials in `D` and
/// possibly free parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    module: FreeModule,
    coeffs: Vec<Poly>,
}

impl Element {
    pub fn zero(module: &FreeModule) -> Self {
        Element {
            module: module.clone(),
            coeffs: vec![Poly::zero(); module.rank()],
        }
    }

    pub fn basis(module: &FreeModule, i: usize) -> Self {
        let mut e = Element::zero(module);
        e.coeffs[i] = Poly::one();
        e
    }

    pub fn new(module: &FreeModule, coeffs: Vec<Poly>) -> Result<Self> {
        if coeffs.len() != module.rank() {
            return Err(Error::Shape {
                context: "element",
                detail: format!("{} coefficients for rank {}", coeffs.len(), module.rank()),
            });
        }
        for c in &coeffs {
            ensure_vars("element coefficient", c, |v| v == Var::D || v.is_param())?;
        }
        Ok(Element {
            module: module.clone(),
            coeffs,
        })
    }

    pub fn module(&self) -> &FreeModule {
        &self.module
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Poly {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    /// `∂·self`.
    pub fn derive(&self) -> Element {
        self.mul_poly(&Poly::var(Var::D))
    }

    /// Multiplies every coefficient by `p` (a polynomial in `D` acts as `p(∂)`).
    pub fn mul_poly(&self, p: &Poly) -> Element {
        Element {
            module: self.module.clone(),
            coeffs: self.coeffs.iter().map(|c| c * p).collect(),
        }
    }

    pub fn substitute(&self, a: &Assignment) -> Element {
        Element {
            module: self.module.clone(),
            coeffs: self.coeffs.iter().map(|c| c.substitute(a)).collect(),
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        ensure_same("element sum", &self.module, &other.module)?;
        Ok(Element {
            module: self.module.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        Element {
            module: self.module.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})*{}", self.module.label(i))?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// A bilinear λ-multiplication `left × right → out`, stored as
/// `(e_i)_λ f_j = Σ_k T_k^{ij}(λ, ∂) g_k`. Serves as the structure table of
/// an algebra and as the action table of a bimodule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearTable {
    left: FreeModule,
    right: FreeModule,
    out: FreeModule,
    /// `entries[i * right.rank() + j][k]`.
    entries: Vec<Vec<Poly>>,
}

impl BilinearTable {
    pub fn zero(left: &FreeModule, right: &FreeModule, out: &FreeModule) -> Self {
        BilinearTable {
            left: left.clone(),
            right: right.clone(),
            out: out.clone(),
            entries: vec![vec![Poly::zero(); out.rank()]; left.rank() * right.rank()],
        }
    }

    /// Builds a table from `f(i, j, k)`; entries must lie in `{L, D}`.
    pub fn from_fn(
        left: &FreeModule,
        right: &FreeModule,
        out: &FreeModule,
        mut f: impl FnMut(usize, usize, usize) -> Poly,
    ) -> Result<Self> {
        let mut t = BilinearTable::zero(left, right, out);
        for i in 0..left.rank() {
            for j in 0..right.rank() {
                for k in 0..out.rank() {
                    t.set(i, j, k, f(i, j, k))?;
                }
            }
        }
        Ok(t)
    }

    pub fn left(&self) -> &FreeModule {
        &self.left
    }

    pub fn right(&self) -> &FreeModule {
        &self.right
    }

    pub fn out(&self) -> &FreeModule {
        &self.out
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Poly {
        &self.entries[i * self.right.rank() + j][k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, p: Poly) -> Result<()> {
        ensure_vars("structure polynomial", &p, |v| v == Var::L || v == Var::D)?;
        let r = self.right.rank();
        self.entries[i * r + j][k] = p;
        Ok(())
    }

    /// `(e_i)_λ f_j` as an element of the output module.
    pub fn entry(&self, i: usize, j: usize) -> Element {
        Element {
            module: self.out.clone(),
            coeffs: self.entries[i * self.right.rank() + j].clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Poly::is_zero)
    }

    /// Applies `(L, D) ↦ (fl, fd)` to every entry.
    pub fn map_entries(&self, fl: &Poly, fd: &Poly) -> BilinearTable {
        let a = assignment([(Var::L, fl.clone()), (Var::D, fd.clone())]);
        BilinearTable {
            left: self.left.clone(),
            right: self.right.clone(),
            out: self.out.clone(),
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|p| p.substitute(&a)).collect())
                .collect(),
        }
    }

    /// Same entries over different (equal-rank) modules.
    pub(crate) fn relabel(&self, left: &FreeModule, right: &FreeModule, out: &FreeModule) -> BilinearTable {
        debug_assert_eq!(
            (left.rank(), right.rank(), out.rank()),
            (self.left.rank(), self.right.rank(), self.out.rank())
        );
        BilinearTable {
            left: left.clone(),
            right: right.clone(),
            out: out.clone(),
            entries: self.entries.clone(),
        }
    }

    /// `a_π b` for `a = Σ f_i(∂)e_i`, `b = Σ g_j(∂)f_j`:
    /// `Σ f_i(−π) g_j(π + ∂) T_k^{ij}(π, ∂) g_k`.
    ///
    /// `π` may mention `D`, which then stands for ∂ of the *result* — this is
    /// how parameters such as `−λ−∂` are written.
    pub fn evaluate(&self, a: &Element, b: &Element, pi: &Poly) -> Result<Element> {
        ensure_same("λ-product, left factor", &self.left, &a.module)?;
        ensure_same("λ-product, right factor", &self.right, &b.module)?;
        let label = assignment([(Var::D, -pi)]);
        let shift = assignment([(Var::D, pi + &Poly::var(Var::D))]);
        let at = assignment([(Var::L, pi.clone())]);
        let fs: Vec<Poly> = a.coeffs.iter().map(|c| c.substitute(&label)).collect();
        let gs: Vec<Poly> = b.coeffs.iter().map(|c| c.substitute(&shift)).collect();
        let mut out = vec![Poly::zero(); self.out.rank()];
        for (i, f) in fs.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (j, g) in gs.iter().enumerate() {
                if g.is_zero() {
                    continue;
                }
                let fg = f * g;
                for (k, slot) in out.iter_mut().enumerate() {
                    let t = self.get(i, j, k);
                    if !t.is_zero() {
                        *slot += &fg * &t.substitute(&at);
                    }
                }
            }
        }
        Ok(Element {
            module: self.out.clone(),
            coeffs: out,
        })
    }
}

pub(crate) fn assignment<const N: usize>(pairs: [(Var, Poly); N]) -> Assignment {
    pairs.into_iter().collect()
}

/// An element of `M_1 ⊗ … ⊗ M_k`: one coefficient per multi-index, a
/// polynomial in the slot variables `x1..xk` and free parameters. `∂` acts on
/// the whole tensor as multiplication by `x1 + … + xk`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement {
    legs: Vec<FreeModule>,
    terms: BTreeMap<Vec<usize>, Poly>,
}

impl TensorElement {
    pub fn zero(legs: Vec<FreeModule>) -> Self {
        TensorElement {
            legs,
            terms: BTreeMap::new(),
        }
    }

    /// The empty tensor product: a scalar.
    pub fn scalar(c: Poly) -> Self {
        let mut t = TensorElement::zero(Vec::new());
        t.add_term(Vec::new(), c);
        t
    }

    /// `c · e_{i1} ⊗ … ⊗ e_{ik}` with 0-based basis indices.
    pub fn monomial(legs: Vec<FreeModule>, index: Vec<usize>, c: Poly) -> Result<Self> {
        let mut t = TensorElement::zero(legs);
        t.check_index(&index)?;
        ensure_vars("tensor coefficient", &c, |v| t.allows(v))?;
        t.add_term(index, c);
        Ok(t)
    }

    /// Builds a tensor from `(multi-index, coefficient)` pairs, summing repeats.
    pub fn from_terms(legs: Vec<FreeModule>, terms: impl IntoIterator<Item = (Vec<usize>, Poly)>) -> Result<Self> {
        let mut t = TensorElement::zero(legs);
        for (idx, c) in terms {
            t.check_index(&idx)?;
            ensure_vars("tensor coefficient", &c, |v| t.allows(v))?;
            t.add_term(idx, c);
        }
        Ok(t)
    }

    /// The one-leg tensor of an element (`D ↦ x1`).
    pub fn from_element(e: &Element) -> Self {
        let a = assignment([(Var::D, Poly::var(Var::slot(1)))]);
        let mut t = TensorElement::zero(vec![e.module.clone()]);
        for (i, c) in e.coeffs.iter().enumerate() {
            t.add_term(vec![i], c.substitute(&a));
        }
        t
    }

    /// `a_1 ⊗ … ⊗ a_k` (∂ in factor `s` becomes `x_s`).
    pub fn pure(factors: &[Element]) -> Self {
        factors
            .iter()
            .map(TensorElement::from_element)
            .fold(TensorElement::scalar(Poly::one()), |acc, t| acc.tensor(&t))
    }

    /// Reads a one-leg tensor back as an element (`x1 ↦ D`).
    pub fn to_element(&self) -> Result<Element> {
        if self.legs.len() != 1 {
            return Err(Error::Shape {
                context: "tensor to element",
                detail: format!("tensor has {} legs", self.legs.len()),
            });
        }
        let a = assignment([(Var::slot(1), Poly::var(Var::D))]);
        let mut e = Element::zero(&self.legs[0]);
        for (idx, c) in &self.terms {
            e.coeffs[idx[0]] += c.substitute(&a);
        }
        Ok(e)
    }

    /// Reads a leg-free tensor as a scalar.
    pub fn to_scalar(&self) -> Option<Poly> {
        self.legs.is_empty().then(|| self.coefficient(&[]))
    }

    fn allows(&self, v: Var) -> bool {
        v.is_param() || v.slot_index().is_some_and(|s| s <= self.legs.len())
    }

    fn check_index(&self, idx: &[usize]) -> Result<()> {
        if idx.len() != self.legs.len() {
            return Err(Error::Shape {
                context: "tensor multi-index",
                detail: format!("{} indices for {} legs", idx.len(), self.legs.len()),
            });
        }
        for (leg, &i) in self.legs.iter().zip(idx) {
            if i >= leg.rank() {
                return Err(Error::IndexOutOfRange {
                    context: "tensor multi-index",
                    index: i + 1,
                    len: leg.rank(),
                });
            }
        }
        Ok(())
    }

    fn add_term(&mut self, idx: Vec<usize>, c: Poly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn legs(&self) -> &[FreeModule] {
        &self.legs
    }

    /// Number of tensor factors.
    pub fn order(&self) -> usize {
        self.legs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero terms in lexicographic multi-index order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, idx: &[usize]) -> Poly {
        self.terms.get(idx).cloned().unwrap_or_default()
    }

    /// Basis labels of a multi-index.
    pub fn index_labels(&self, idx: &[usize]) -> Vec<String> {
        self.legs
            .iter()
            .zip(idx)
            .map(|(m, &i)| m.label(i).to_owned())
            .collect()
    }

    /// Coefficient of the basis tensor named by labels.
    pub fn coefficient_by_labels(&self, labels: &[&str]) -> Option<Poly> {
        if labels.len() != self.legs.len() {
            return None;
        }
        let idx: Option<Vec<usize>> = self
            .legs
            .iter()
            .zip(labels)
            .map(|(m, l)| m.index_of(l))
            .collect();
        Some(self.coefficient(&idx?))
    }

    fn leg_slot(&self, context: &'static str, leg: usize) -> Result<usize> {
        if leg == 0 || leg > self.legs.len() {
            return Err(Error::IndexOutOfRange {
                context,
                index: leg,
                len: self.legs.len(),
            });
        }
        Ok(leg - 1)
    }

    fn map_coefficients(&self, f: impl Fn(&Poly) -> Poly) -> TensorElement {
        let mut out = TensorElement::zero(self.legs.clone());
        for (idx, c) in &self.terms {
            out.add_term(idx.clone(), f(c));
        }
        out
    }

    pub fn add(&self, other: &TensorElement) -> Result<TensorElement> {
        if self.legs != other.legs {
            return Err(Error::ModuleMismatch {
                context: "tensor sum",
                expected: describe_legs(&self.legs),
                found: describe_legs(&other.legs),
            });
        }
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(idx.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TensorElement) -> Result<TensorElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TensorElement {
        self.map_coefficients(|c| -c)
    }

    /// Multiplies every coefficient by `p`.
    pub fn mul_poly(&self, p: &Poly) -> TensorElement {
        self.map_coefficients(|c| c * p)
    }

    /// `∂·self`, i.e. multiplication by `x1 + … + xk`.
    pub fn derive(&self) -> TensorElement {
        self.mul_poly(&Poly::slot_sum(1, self.legs.len()))
    }

    /// `self ⊗ other`; the slots of `other` are shifted past those of `self`.
    pub fn tensor(&self, other: &TensorElement) -> TensorElement {
        let k = self.legs.len();
        let shift: Assignment = (1..=other.legs.len())
            .map(|s| (Var::slot(s), Poly::var(Var::slot(s + k))))
            .collect();
        let mut legs = self.legs.clone();
        legs.extend(other.legs.iter().cloned());
        let mut out = TensorElement::zero(legs);
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                let mut idx = ia.clone();
                idx.extend_from_slice(ib);
                out.add_term(idx, ca * &cb.substitute(&shift));
            }
        }
        out
    }

    /// Coefficient-wise simultaneous substitution.
    pub fn substitute(&self, a: &Assignment) -> TensorElement {
        self.map_coefficients(|c| c.substitute(a))
    }

    /// Eliminates a free parameter: `π ↦ image`.
    pub fn substitute_param(&self, pi: Var, image: &Poly) -> Result<TensorElement> {
        if !pi.is_param() {
            return Err(Error::NotAParameter(pi));
        }
        ensure_vars("parameter image", image, |v| self.allows(v))?;
        Ok(self.substitute(&assignment([(pi, image.clone())])))
    }

    /// The flip `τ` on legs `s`, `u`: exchanges the indices and the slot
    /// variables `x_s ↔ x_u`.
    pub fn swap_legs(&self, s: usize, u: usize) -> Result<TensorElement> {
        let s0 = self.leg_slot("swap_legs", s)?;
        let u0 = self.leg_slot("swap_legs", u)?;
        let a = assignment([
            (Var::slot(s), Poly::var(Var::slot(u))),
            (Var::slot(u), Poly::var(Var::slot(s))),
        ]);
        let mut legs = self.legs.clone();
        legs.swap(s0, u0);
        let mut out = TensorElement::zero(legs);
        for (idx, c) in &self.terms {
            let mut idx = idx.clone();
            idx.swap(s0, u0);
            out.add_term(idx, c.substitute(&a));
        }
        Ok(out)
    }

    /// Multiplies leg `s` (left factor) into leg `u` (right factor) with the
    /// λ-product `table` at parameter `π`, placing the product at position
    /// `pos` of the resulting `(k−1)`-leg tensor:
    ///
    /// `x_s ↦ −π`, `x_u ↦ π + x_pos`, times `T_k^{ij}(π, x_pos)`; the other legs
    /// keep their relative order. `π` is written in the *result's* slot
    /// numbering.
    pub fn leg_product(&self, s: usize, u: usize, pos: usize, table: &BilinearTable, pi: &Poly) -> Result<TensorElement> {
        let s0 = self.leg_slot("leg_product", s)?;
        let u0 = self.leg_slot("leg_product", u)?;
        if s0 == u0 {
            return Err(Error::Shape {
                context: "leg_product",
                detail: format!("cannot multiply leg {s} with itself"),
            });
        }
        ensure_same("leg_product, left leg", table.left(), &self.legs[s0])?;
        ensure_same("leg_product, right leg", table.right(), &self.legs[u0])?;
        let k = self.legs.len();
        if pos == 0 || pos > k - 1 {
            return Err(Error::IndexOutOfRange {
                context: "leg_product result position",
                index: pos,
                len: k - 1,
            });
        }
        // Old legs other than s, u in order, then the product leg inserted at pos.
        let mut survivors: Vec<usize> = (0..k).filter(|&w| w != s0 && w != u0).collect();
        let mut legs: Vec<FreeModule> = survivors.iter().map(|&w| self.legs[w].clone()).collect();
        legs.insert(pos - 1, table.out().clone());
        survivors.insert(pos - 1, usize::MAX);
        let x_pos = Poly::var(Var::slot(pos));

        let mut rename = Assignment::new();
        for (new, &old) in survivors.iter().enumerate() {
            if old != usize::MAX {
                rename.insert(Var::slot(old + 1), Poly::var(Var::slot(new + 1)));
            }
        }
        rename.insert(Var::slot(s), -pi);
        rename.insert(Var::slot(u), pi + &x_pos);
        let at = assignment([(Var::L, pi.clone()), (Var::D, x_pos)]);

        let mut out = TensorElement::zero(legs);
        let mut cache: BTreeMap<(usize, usize, usize), Poly> = BTreeMap::new();
        for (idx, c) in &self.terms {
            let (i, j) = (idx[s0], idx[u0]);
            let moved = c.substitute(&rename);
            for kk in 0..table.out().rank() {
                let t = table.get(i, j, kk);
                if t.is_zero() {
                    continue;
                }
                let t = cache
                    .entry((i, j, kk))
                    .or_insert_with(|| t.substitute(&at));
                let mut new_idx: Vec<usize> = survivors
                    .iter()
                    .map(|&w| if w == usize::MAX { kk } else { idx[w] })
                    .collect();
                new_idx.shrink_to_fit();
                out.add_term(new_idx, &moved * &*t);
            }
        }
        Ok(out)
    }

    /// Lets the operator `ρ(label)_π` act on leg `leg`, where `ρ` is given by
    /// `table` (`table.left()` holds the labels, `table.right()` the leg's
    /// module, `table.out()` the new leg module):
    ///
    /// `x_leg ↦ π + x_leg`, label coefficients `f(∂) ↦ f(−π)`, times
    /// `T(π, x_leg)`. `π` may mention slot variables; they refer to the
    /// tensor after the action.
    ///
    /// Left multiplication uses an algebra's table; right multiplication
    /// `R(a)_π b = b_{−π−∂}a` uses [`crate::algebra::ConformalAlgebra::right_table`];
    /// bimodule actions use the bimodule's tables.
    pub fn act_on_leg(&self, leg: usize, table: &BilinearTable, label: &Element, pi: &Poly) -> Result<TensorElement> {
        let l0 = self.leg_slot("act_on_leg", leg)?;
        ensure_same("act_on_leg, operator label", table.left(), &label.module)?;
        ensure_same("act_on_leg, acted-on leg", table.right(), &self.legs[l0])?;
        let x = Poly::var(Var::slot(leg));
        let shift = assignment([(Var::slot(leg), pi + &x)]);
        let at = assignment([(Var::L, pi.clone()), (Var::D, x)]);
        let neg = assignment([(Var::D, -pi)]);
        let fs: Vec<Poly> = label.coeffs.iter().map(|f| f.substitute(&neg)).collect();

        let mut legs = self.legs.clone();
        legs[l0] = table.out().clone();
        let mut out = TensorElement::zero(legs);
        let mut cache: BTreeMap<(usize, usize, usize), Poly> = BTreeMap::new();
        for (idx, c) in &self.terms {
            let j = idx[l0];
            let moved = c.substitute(&shift);
            for (i, f) in fs.iter().enumerate() {
                if f.is_zero() {
                    continue;
                }
                let fc = f * &moved;
                for kk in 0..table.out().rank() {
                    let t = table.get(i, j, kk);
                    if t.is_zero() {
                        continue;
                    }
                    let t = cache.entry((i, j, kk)).or_insert_with(|| t.substitute(&at));
                    let mut new_idx = idx.clone();
                    new_idx[l0] = kk;
                    out.add_term(new_idx, &fc * &*t);
                }
            }
        }
        Ok(out)
    }

    /// Contracts leg `leg` against the functional `φ_π`, `φ ∈ M^{*c}` given in
    /// the dual basis: `(e_j^*)_π (g(∂) e_i) = δ_ij g(π)`, with `φ`'s own
    /// coefficients read as `f(−π)`. The leg is removed and later legs
    /// renumbered; `π` is written in the result's numbering.
    pub fn pair_leg(&self, leg: usize, functional: &Element, pi: &Poly) -> Result<TensorElement> {
        let l0 = self.leg_slot("pair_leg", leg)?;
        ensure_same("pair_leg, functional", &self.legs[l0].dual(), &functional.module)?;
        let k = self.legs.len();
        let mut a = Assignment::new();
        for old in l0 + 1..k {
            a.insert(Var::slot(old + 1), Poly::var(Var::slot(old)));
        }
        a.insert(Var::slot(leg), pi.clone());
        let neg = assignment([(Var::D, -pi)]);
        let fs: Vec<Poly> = functional.coeffs.iter().map(|f| f.substitute(&neg)).collect();
        let mut legs = self.legs.clone();
        legs.remove(l0);
        let mut out = TensorElement::zero(legs);
        for (idx, c) in &self.terms {
            let f = &fs[idx[l0]];
            if f.is_zero() {
                continue;
            }
            let mut new_idx = idx.clone();
            new_idx.remove(l0);
            out.add_term(new_idx, f * &c.substitute(&a));
        }
        Ok(out)
    }

    /// Replaces leg `leg` by the image of each basis vector: `images[i]` is
    /// the tensor that `e_i` maps to (any number of legs, all images over the
    /// same legs). A coefficient `g(x_leg)` becomes `g(x_leg + … )` summed
    /// over the new legs, as `C[∂]`-linearity requires.
    ///
    /// With one-leg images this applies a module map on a leg; with two-leg
    /// images it applies a coproduct.
    pub fn expand_leg(&self, leg: usize, images: &[TensorElement]) -> Result<TensorElement> {
        let l0 = self.leg_slot("expand_leg", leg)?;
        if images.len() != self.legs[l0].rank() {
            return Err(Error::Shape {
                context: "expand_leg",
                detail: format!("{} images for a leg of rank {}", images.len(), self.legs[l0].rank()),
            });
        }
        let new_legs: Vec<FreeModule> = match images.first() {
            Some(t) => t.legs.clone(),
            None => Vec::new(),
        };
        if images.iter().any(|t| t.legs != new_legs) {
            return Err(Error::Shape {
                context: "expand_leg",
                detail: "images live in different tensor spaces".into(),
            });
        }
        let k = self.legs.len();
        let m = new_legs.len();
        // Slots: legs before l0 keep theirs, image legs take l0+1..l0+m, later legs shift by m-1.
        let mut outer = Assignment::new();
        outer.insert(Var::slot(leg), Poly::slot_sum(leg, leg + m - 1));
        for old in l0 + 1..k {
            outer.insert(Var::slot(old + 1), Poly::var(Var::slot(old + m)));
        }
        let inner: Assignment = (1..=m)
            .map(|s| (Var::slot(s), Poly::var(Var::slot(s + l0))))
            .collect();
        let shifted: Vec<TensorElement> = images.iter().map(|t| t.substitute(&inner)).collect();

        let mut legs = self.legs[..l0].to_vec();
        legs.extend(new_legs.iter().cloned());
        legs.extend(self.legs[l0 + 1..].iter().cloned());
        let mut out = TensorElement::zero(legs);
        for (idx, c) in &self.terms {
            let moved = c.substitute(&outer);
            for (jdx, d) in &shifted[idx[l0]].terms {
                let mut new_idx = idx[..l0].to_vec();
                new_idx.extend_from_slice(jdx);
                new_idx.extend_from_slice(&idx[l0 + 1..]);
                out.add_term(new_idx, &moved * d);
            }
        }
        Ok(out)
    }

    /// Re-homes leg `leg` onto another module of the same rank.
    pub(crate) fn relabel_leg(&self, leg: usize, module: &FreeModule) -> TensorElement {
        let mut out = self.clone();
        debug_assert_eq!(out.legs[leg - 1].rank(), module.rank());
        out.legs[leg - 1] = module.clone();
        out
    }
}

fn describe_legs(legs: &[FreeModule]) -> String {
    legs.iter()
        .map(|m| format!("({})", m.describe()))
        .collect::<Vec<_>>()
        .join("⊗")
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (idx, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            if !idx.is_empty() {
                write!(f, "*{}", self.index_labels(idx).join("⊗"))?;
            }
        }
        Ok(())
    }
}

/// An element of `Chom(U, V)`: `T_λ(u_i) = Σ_j g_ij(λ, ∂) v_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalLinearMap {
    source: FreeModule,
    target: FreeModule,
    matrix: Vec<Vec<Poly>>,
}

impl ConformalLinearMap {
    pub fn zero(source: &FreeModule, target: &FreeModule) -> Self {
        ConformalLinearMap {
            source: source.clone(),
            target: target.clone(),
            matrix: vec![vec![Poly::zero(); target.rank()]; source.rank()],
        }
    }

    pub fn new(source: &FreeModule, target: &FreeModule, matrix: Vec<Vec<Poly>>) -> Result<Self> {
        check_shape("conformal linear map", source, target, &matrix)?;
        for p in matrix.iter().flatten() {
            ensure_vars("conformal linear map entry", p, |v| v == Var::L || v == Var::D)?;
        }
        Ok(ConformalLinearMap {
            source: source.clone(),
            target: target.clone(),
            matrix,
        })
    }

    pub fn source(&self) -> &FreeModule {
        &self.source
    }

    pub fn target(&self) -> &FreeModule {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<Poly>] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.matrix[i][j]
    }

    /// `T_π(Σ f_i(∂) u_i) = Σ f_i(−π) g_ij(π, ∂) v_j`.
    pub fn apply(&self, u: &Element, pi: &Poly) -> Result<Element> {
        ensure_same("conformal linear map argument", &self.source, &u.module)?;
        let neg = assignment([(Var::D, -pi)]);
        let at = assignment([(Var::L, pi.clone())]);
        let mut out = Element::zero(&self.target);
        for (i, f) in u.coeffs.iter().enumerate() {
            let f = f.substitute(&neg);
            if f.is_zero() {
                continue;
            }
            for (j, g) in self.matrix[i].iter().enumerate() {
                out.coeffs[j] += &f * &g.substitute(&at);
            }
        }
        Ok(out)
    }

    /// `T_0 = T_λ|_{λ=0}`, a `C[∂]`-module map.
    pub fn at_zero(&self) -> ModuleMap {
        let zero = assignment([(Var::L, Poly::zero())]);
        ModuleMap {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self
                .matrix
                .iter()
                .map(|row| row.iter().map(|p| p.substitute(&zero)).collect())
                .collect(),
        }
    }
}

/// A `C[∂]`-module homomorphism `φ(u_i) = Σ_j m_ij(∂) v_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    source: FreeModule,
    target: FreeModule,
    matrix: Vec<Vec<Poly>>,
}

fn check_shape(context: &'static str, source: &FreeModule, target: &FreeModule, m: &[Vec<Poly>]) -> Result<()> {
    if m.len() != source.rank() || m.iter().any(|row| row.len() != target.rank()) {
        return Err(Error::Shape {
            context,
            detail: format!("expected a {}×{} matrix", source.rank(), target.rank()),
        });
    }
    Ok(())
}

impl ModuleMap {
    pub fn new(source: &FreeModule, target: &FreeModule, matrix: Vec<Vec<Poly>>) -> Result<Self> {
        check_shape("module map", source, target, &matrix)?;
        for p in matrix.iter().flatten() {
            ensure_vars("module map entry", p, |v| v == Var::D)?;
        }
        Ok(ModuleMap {
            source: source.clone(),
            target: target.clone(),
            matrix,
        })
    }

    pub fn zero(source: &FreeModule, target: &FreeModule) -> Self {
        ModuleMap {
            source: source.clone(),
            target: target.clone(),
            matrix: vec![vec![Poly::zero(); target.rank()]; source.rank()],
        }
    }

    pub fn identity(module: &FreeModule) -> Self {
        ModuleMap::scalar(module, Poly::one())
    }

    /// `p(∂)·id`.
    pub fn scalar(module: &FreeModule, p: Poly) -> Self {
        let n = module.rank();
        ModuleMap {
            source: module.clone(),
            target: module.clone(),
            matrix: (0..n)
                .map(|i| (0..n).map(|j| if i == j { p.clone() } else { Poly::zero() }).collect())
                .collect(),
        }
    }

    pub fn source(&self) -> &FreeModule {
        &self.source
    }

    pub fn target(&self) -> &FreeModule {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<Poly>] {
        &self.matrix
    }

    pub fn apply(&self, u: &Element) -> Result<Element> {
        ensure_same("module map argument", &self.source, &u.module)?;
        let mut out = Element::zero(&self.target);
        for (i, f) in u.coeffs.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (j, g) in self.matrix[i].iter().enumerate() {
                out.coeffs[j] += f * g;
            }
        }
        Ok(out)
    }

    /// Image of the basis vector `u_i`.
    pub fn image(&self, i: usize) -> Element {
        Element {
            module: self.target.clone(),
            coeffs: self.matrix[i].clone(),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModuleMap) -> Result<ModuleMap> {
        ensure_same("module map composition", &self.target, &other.source)?;
        let matrix = (0..self.source.rank())
            .map(|i| {
                (0..other.target.rank())
                    .map(|j| {
                        (0..self.target.rank())
                            .map(|k| &self.matrix[i][k] * &other.matrix[k][j])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Ok(ModuleMap {
            source: self.source.clone(),
            target: other.target.clone(),
            matrix,
        })
    }

    /// Determinant of a square matrix.
    pub fn determinant(&self) -> Result<Poly> {
        if self.source.rank() != self.target.rank() {
            return Err(Error::Shape {
                context: "determinant",
                detail: format!("{}×{} matrix is not square", self.source.rank(), self.target.rank()),
            });
        }
        Ok(poly::determinant(&self.matrix))
    }

    /// Inverse over `Q[∂]`: exists iff the determinant is a nonzero constant.
    pub fn inverse(&self) -> Result<ModuleMap> {
        let det = self.determinant()?;
        let c = match det.constant_value() {
            Some(c) if !det.is_zero() => c,
            _ => {
                return Err(Error::NotInvertible(format!(
                    "determinant {det} is not a nonzero constant"
                )))
            }
        };
        let inv = num_traits::Inv::inv(c);
        let matrix = poly::adjugate(&self.matrix)
            .into_iter()
            .map(|row| row.into_iter().map(|p| p.scale(&inv)).collect())
            .collect();
        Ok(ModuleMap {
            source: self.target.clone(),
            target: self.source.clone(),
            matrix,
        })
    }

    /// The same map as a one-leg-image list for [`TensorElement::expand_leg`].
    pub fn leg_images(&self) -> Vec<TensorElement> {
        (0..self.source.rank())
            .map(|i| TensorElement::from_element(&self.image(i)))
            .collect()
    }

    /// Applies `φ` to leg `leg` of a tensor.
    pub fn apply_on_leg(&self, t: &TensorElement, leg: usize) -> Result<TensorElement> {
        let l0 = t.leg_slot("module map on leg", leg)?;
        ensure_same("module map on leg", &self.source, &t.legs[l0])?;
        t.expand_leg(leg, &self.leg_images())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    fn hb2() -> (FreeModule, BilinearTable) {
        let m = FreeModule::new(["a", "b"]).unwrap();
        let t = BilinearTable::from_fn(&m, &m, &m, |i, j, k| {
            if (i, j, k) == (0, 0, 1) {
                p("D^2 + L*D + L^2")
            } else {
                Poly::zero()
            }
        })
        .unwrap();
        (m, t)
    }

    #[test]
    fn leg_product_on_hb2() {
        let (m, t) = hb2();
        let aa = TensorElement::monomial(vec![m.clone(), m.clone()], vec![0, 0], Poly::one()).unwrap();
        let out = aa.leg_product(1, 2, 1, &t, &p("M")).unwrap();
        assert_eq!(out.coefficient(&[1]), p("x1^2 + M*x1 + M^2"));
        assert_eq!(out.terms().count(), 1);

        let da = aa.mul_poly(&p("x1"));
        let out = da.leg_product(1, 2, 1, &t, &p("M")).unwrap();
        assert_eq!(out.coefficient(&[1]), p("-M*(x1^2 + M*x1 + M^2)"));
    }

    #[test]
    fn left_action_and_parameter_elimination() {
        let (m, t) = hb2();
        let aa = TensorElement::monomial(vec![m.clone(), m.clone()], vec![0, 0], Poly::one()).unwrap();
        let out = aa.act_on_leg(2, &t, &Element::basis(&m, 0), &p("L")).unwrap();
        assert_eq!(out.coefficient(&[0, 1]), p("x2^2 + L*x2 + L^2"));
        let out = out.substitute_param(Var::L, &p("-(x1 + x2)")).unwrap();
        assert_eq!(out.coefficient(&[0, 1]), p("x1^2 + x1*x2 + x2^2"));
        assert_eq!(out.substitute_param(Var::M, &p("M")).unwrap(), out);
        assert!(matches!(out.substitute_param(Var::D, &p("0")), Err(Error::NotAParameter(Var::D))));
    }

    #[test]
    fn dual_pairing_gives_a_scalar() {
        let (m, _) = hb2();
        let b = TensorElement::from_element(&Element::basis(&m, 1));
        let out = b.pair_leg(1, &Element::basis(&m.dual(), 1), &p("M")).unwrap();
        assert_eq!(out.to_scalar(), Some(Poly::one()));
        let out = b.pair_leg(1, &Element::basis(&m.dual(), 0), &p("M")).unwrap();
        assert_eq!(out.to_scalar(), Some(Poly::zero()));
    }

    #[test]
    fn swap_relabels_slots() {
        let (m, _) = hb2();
        let t = TensorElement::monomial(vec![m.clone(), m.clone()], vec![0, 1], p("x1")).unwrap();
        let s = t.swap_legs(1, 2).unwrap();
        assert_eq!(s.coefficient(&[1, 0]), p("x2"));
        assert_eq!(s.swap_legs(1, 2).unwrap(), t);
    }

    #[test]
    fn evaluate_follows_sesquilinearity() {
        let (m, t) = hb2();
        let a = Element::basis(&m, 0);
        let out = t.evaluate(&a.derive(), &a, &p("L")).unwrap();
        assert_eq!(out.coeff(1), &p("-L*(D^2 + L*D + L^2)"));
        let out = t.evaluate(&a, &a.derive(), &p("L")).unwrap();
        assert_eq!(out.coeff(1), &p("(L + D)*(D^2 + L*D + L^2)"));
    }

    #[test]
    fn expand_leg_applies_module_maps() {
        let (m, _) = hb2();
        let swap = ModuleMap::new(&m, &m, vec![vec![p("0"), p("1")], vec![p("D"), p("0")]]).unwrap();
        let t = TensorElement::monomial(vec![m.clone(), m.clone()], vec![1, 0], p("x2")).unwrap();
        let out = swap.apply_on_leg(&t, 1).unwrap();
        assert_eq!(out.coefficient(&[0, 0]), p("x1*x2"));
        let inv = ModuleMap::new(&m, &m, vec![vec![p("1"), p("D")], vec![p("0"), p("1")]]).unwrap();
        let back = inv.then(&inv.inverse().unwrap()).unwrap();
        assert_eq!(back, ModuleMap::identity(&m));
        assert!(swap.inverse().is_err());
    }

    #[test]
    fn labels_are_validated() {
        assert!(FreeModule::new(["a", "a"]).is_err());
        assert!(FreeModule::new(["a,b"]).is_err());
        assert!(FreeModule::new(Vec::<String>::new()).is_ok());
        let m = FreeModule::new(["a", "b*"]).unwrap();
        assert_eq!(m.dual().labels(), ["a*", "b"]);
        assert_eq!(m.direct_sum(&m).labels(), ["a", "b*", "a'", "b*'"]);
    }
}
