//! Pass/fail results that carry certificates of failure.

use std::fmt;

use crate::module::{Element, TensorElement};
use crate::poly::Poly;

/// One failed instance of an identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// Short identity id, e.g. `assoc`, `es5`, `thq2`, `cybe`.
    pub identity: String,
    /// Basis labels of the inputs the identity was instantiated at.
    pub indices: Vec<String>,
    /// Basis labels of the output component carrying the residual.
    pub component: Vec<String>,
    /// `lhs - rhs` on that component, fully expanded.
    pub residual: Poly,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at ({})", self.identity, self.indices.join(", "))?;
        if !self.component.is_empty() {
            write!(f, " on {}", self.component.join("⊗"))?;
        }
        write!(f, ": {}", self.residual)
    }
}

/// `pass` iff there are no counterexamples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Verdict {
    pub counterexamples: Vec<Counterexample>,
}

impl Verdict {
    pub fn new() -> Self {
        Verdict::default()
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    /// Whether any counterexample was recorded under `identity`.
    pub fn fails(&self, identity: &str) -> bool {
        self.counterexamples.iter().any(|c| c.identity == identity)
    }

    /// The sub-verdict of one identity.
    pub fn only(&self, identity: &str) -> Verdict {
        Verdict {
            counterexamples: self
                .counterexamples
                .iter()
                .filter(|c| c.identity == identity)
                .cloned()
                .collect(),
        }
    }

    pub fn first(&self) -> Option<&Counterexample> {
        self.counterexamples.first()
    }

    pub fn extend(&mut self, other: Verdict) {
        self.counterexamples.extend(other.counterexamples);
    }

    /// Prefixes every identity id, used when nesting sub-checks.
    pub fn prefixed(mut self, prefix: &str) -> Verdict {
        for c in &mut self.counterexamples {
            c.identity = format!("{prefix}{}", c.identity);
        }
        self
    }

    pub(crate) fn record_poly(&mut self, identity: &str, indices: Vec<String>, residual: Poly) {
        if !residual.is_zero() {
            self.counterexamples.push(Counterexample {
                identity: identity.to_owned(),
                indices,
                component: Vec::new(),
                residual,
            });
        }
    }

    /// Records every nonzero component of an element-valued residual.
    pub(crate) fn record_element(&mut self, identity: &str, indices: &[String], residual: &Element) {
        for (k, c) in residual.coeffs().iter().enumerate() {
            if !c.is_zero() {
                self.counterexamples.push(Counterexample {
                    identity: identity.to_owned(),
                    indices: indices.to_vec(),
                    component: vec![residual.module().label(k).to_owned()],
                    residual: c.clone(),
                });
            }
        }
    }

    /// Records every nonzero component of a tensor-valued residual.
    pub(crate) fn record_tensor(&mut self, identity: &str, indices: &[String], residual: &TensorElement) {
        for (idx, c) in residual.terms() {
            self.counterexamples.push(Counterexample {
                identity: identity.to_owned(),
                indices: indices.to_vec(),
                component: residual.index_labels(idx),
                residual: c.clone(),
            });
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return f.write_str("pass");
        }
        let n = self.counterexamples.len();
        writeln!(f, "fail ({n} counterexample{})", if n == 1 { "" } else { "s" })?;
        for c in &self.counterexamples {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}
