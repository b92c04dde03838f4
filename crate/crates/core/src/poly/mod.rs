//! Exact sparse multivariate polynomials over the rationals.
//!
//! Every coefficient object in the crate is a [`Poly`]: structure
//! polynomials `P(L, D)`, tensor coefficients in slot variables `x1..xk`,
//! bilinear forms in `L`. Variables come from one global, totally ordered
//! alphabet ([`Var`]); terms are kept in graded-lex order so that equality
//! is structural and printing is deterministic.

mod matrix;
mod parse;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use matrix::{adjugate, determinant, is_unit};
pub use parse::ParseError;

/// Exact rational scalar.
pub type Rational = BigRational;

/// Builds a rational from an integer numerator and denominator.
///
/// Panics if `den == 0`.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A polynomial variable.
///
/// The derived order is the declared variable order used for graded-lex
/// comparison: the λ-parameters `L, M, N, L1, L2, …` first, then `D`
/// (∂ on a single module), then the tensor slot variables `x1, x2, …`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// λ-parameter number `i` of the pool `L, M, N, L1, L2, …`.
    Param(u16),
    /// ∂ acting on an element of one module.
    D,
    /// ∂ acting on tensor leg `i` (1-based).
    Slot(u16),
}

impl Var {
    pub const L: Var = Var::Param(0);
    pub const M: Var = Var::Param(1);
    pub const N: Var = Var::Param(2);

    /// Slot variable `x_i`, 1-based.
    pub fn slot(i: usize) -> Var {
        assert!(i >= 1, "slot variables are 1-based");
        Var::Slot(u16::try_from(i).expect("slot index overflow"))
    }

    /// Parameter number `i` of the fresh-parameter pool.
    pub fn param(i: usize) -> Var {
        Var::Param(u16::try_from(i).expect("parameter index overflow"))
    }

    pub fn slot_index(self) -> Option<usize> {
        match self {
            Var::Slot(i) => Some(i as usize),
            _ => None,
        }
    }

    pub fn is_param(self) -> bool {
        matches!(self, Var::Param(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Var::Param(0) => f.write_str("L"),
            Var::Param(1) => f.write_str("M"),
            Var::Param(2) => f.write_str("N"),
            Var::Param(k) => write!(f, "L{}", k - 2),
            Var::D => f.write_str("D"),
            Var::Slot(i) => write!(f, "x{i}"),
        }
    }
}

/// An explicit, ordered set of declared variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarSet(BTreeSet<Var>);

impl VarSet {
    pub fn new(vars: impl IntoIterator<Item = Var>) -> Self {
        VarSet(vars.into_iter().collect())
    }

    /// `{x1, …, xk}`.
    pub fn slots(k: usize) -> Self {
        VarSet((1..=k).map(Var::slot).collect())
    }

    pub fn contains(&self, v: Var) -> bool {
        self.0.contains(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.union(&other.0).copied().collect())
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, v) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable {var} is not in the declared variable set {declared}")]
    UnknownVariable { var: Var, declared: VarSet },
    #[error("hyperplane variable list is empty")]
    EmptyVariableList,
}

/// A monomial: sorted `(variable, exponent)` pairs with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_exponents(exps: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (v, e) in exps {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .binary_search_by(|&(w, _)| w.cmp(&v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order over the declared variable order.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                },
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (None, None) => return Ordering::Equal,
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Simultaneous substitution `variable ↦ polynomial`.
pub type Assignment = BTreeMap<Var, Poly>;

/// Sparse polynomial with exact rational coefficients. No zero coefficient
/// is ever stored, so `==` is equality of polynomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn int(c: i64) -> Self {
        Poly::constant(Rational::from_integer(BigInt::from(c)))
    }

    pub fn var(v: Var) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::var(v), Rational::one());
        p
    }

    pub fn term(coeff: Rational, mono: Monomial) -> Self {
        let mut p = Poly::zero();
        p.add_term(mono, coeff);
        p
    }

    /// `x_start + … + x_end` (inclusive, 1-based).
    pub fn slot_sum(start: usize, end: usize) -> Self {
        (start..=end).map(|i| Poly::var(Var::slot(i))).sum()
    }

    /// Parses an expression of the shared grammar (see [`parse`]).
    pub fn parse(src: &str) -> Result<Poly, ParseError> {
        parse::parse(src)
    }

    fn add_term(&mut self, mono: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial (`0` for the zero polynomial).
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// The variables that actually occur, in declared order.
    pub fn variables(&self) -> VarSet {
        VarSet(
            self.terms
                .keys()
                .flat_map(|m| m.0.iter().map(|&(v, _)| v))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Simultaneous substitution; variables without an image are kept.
    pub fn substitute(&self, assignment: &Assignment) -> Poly {
        if assignment.is_empty() || self.is_zero() {
            return self.clone();
        }
        let mut powers: HashMap<(Var, u32), Poly> = HashMap::new();
        let mut out = Poly::zero();
        for (mono, c) in &self.terms {
            let mut kept = Vec::new();
            let mut value = Poly::constant(c.clone());
            for &(v, e) in &mono.0 {
                match assignment.get(&v) {
                    Some(image) => {
                        let p = powers
                            .entry((v, e))
                            .or_insert_with(|| image.pow(e));
                        value = &value * &*p;
                    }
                    None => kept.push((v, e)),
                }
            }
            if !kept.is_empty() {
                value = value.mul_monomial(&Monomial(kept));
            }
            out += value;
        }
        out
    }

    /// Substitutes a single variable.
    pub fn substitute_var(&self, v: Var, image: &Poly) -> Poly {
        let mut a = Assignment::new();
        a.insert(v, image.clone());
        self.substitute(&a)
    }

    fn mul_monomial(&self, mono: &Monomial) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul(mono), c.clone()))
                .collect(),
        }
    }

    /// Splits into homogeneous components keyed by total degree.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_default()
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Coefficients as a polynomial in `v`: index `e` holds the coefficient
    /// of `v^e`.
    pub fn coefficients_in(&self, v: Var) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            let rest = Monomial(m.0.iter().copied().filter(|&(w, _)| w != v).collect());
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }
}

/// Simultaneous substitution validated against a declared variable set.
///
/// Every key of `assignment` must belong to `domain`, and so must every
/// variable of `p`.
pub fn substitute(p: &Poly, domain: &VarSet, assignment: &Assignment) -> Result<Poly, PolyError> {
    for v in assignment.keys().copied().chain(p.variables().iter()) {
        if !domain.contains(v) {
            return Err(PolyError::UnknownVariable {
                var: v,
                declared: domain.clone(),
            });
        }
    }
    Ok(p.substitute(assignment))
}

/// The polynomial left after eliminating the last of `vars` on the
/// hyperplane `vars[0] + … + vars[k-1] = 0`.
pub fn hyperplane_residual(p: &Poly, vars: &[Var]) -> Result<Poly, PolyError> {
    let (&last, rest) = vars.split_last().ok_or(PolyError::EmptyVariableList)?;
    let image = -rest.iter().map(|&v| Poly::var(v)).sum::<Poly>();
    Ok(p.substitute_var(last, &image))
}

/// Whether `p` is divisible by the linear form `vars[0] + … + vars[k-1]`.
pub fn vanishes_on_hyperplane(p: &Poly, vars: &[Var]) -> Result<bool, PolyError> {
    Ok(hyperplane_residual(p, vars)?.is_zero())
}

impl From<i64> for Poly {
    fn from(c: i64) -> Self {
        Poly::int(c)
    }
}

impl From<Var> for Poly {
    fn from(v: Var) -> Self {
        Poly::var(v)
    }
}

impl From<Rational> for Poly {
    fn from(c: Rational) -> Self {
        Poly::constant(c)
    }
}

impl std::str::FromStr for Poly {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Poly::parse(s)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;

    fn add(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;

    fn add(mut self, rhs: Poly) -> Poly {
        self += rhs;
        self
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        if self.terms.len() < rhs.terms.len() {
            let lhs = std::mem::replace(self, rhs);
            *self += &lhs;
            return;
        }
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl SubAssign for Poly {
    fn sub_assign(&mut self, rhs: Poly) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;

    fn sub(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;

    fn sub(mut self, rhs: Poly) -> Poly {
        self -= rhs;
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;

    fn neg(mut self) -> Poly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;

    fn mul(self, rhs: &'a Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;

    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Add<&Poly> for Poly {
    type Output = Poly;

    fn add(mut self, rhs: &Poly) -> Poly {
        self += rhs;
        self
    }
}

impl Sub<&Poly> for Poly {
    type Output = Poly;

    fn sub(mut self, rhs: &Poly) -> Poly {
        self -= rhs;
        self
    }
}

impl Mul<&Poly> for Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        &self * rhs
    }
}

impl std::iter::Sum for Poly {
    fn sum<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        iter.fold(Poly::zero(), |acc, p| acc + p)
    }
}

impl std::iter::Product for Poly {
    fn product<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        iter.fold(Poly::one(), |acc, p| acc * p)
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    /// Fully expanded, descending graded-lex, in the input grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (mono, c)) in self.terms().enumerate() {
            let negative = c.is_negative();
            match (n, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let mut first = true;
            if !abs.is_one() || mono.is_one() {
                write_rational(f, &abs)?;
                first = false;
            }
            for &(v, e) in mono.factors() {
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                if e == 1 {
                    write!(f, "{v}")?;
                } else {
                    write!(f, "{v}^{e}")?;
                }
            }
        }
        Ok(())
    }
}
