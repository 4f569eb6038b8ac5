//! Elements of the quantum cohomology ring in the Schubert basis: finitely
//! supported maps from permutations to q-polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::perm::Permutation;
use crate::qpoly::{QMonomial, QPolynomial};

/// A Z[q_1,…,q_{n−1}]-linear combination of Schubert classes σ_w.
///
/// Canonical form: no zero coefficient polynomials stored. Ring elements
/// produced by the product engine are additionally Laurent-free, nonnegative,
/// and homogeneous in the length grading (ℓ(w) + 2·deg q constant over the
/// support); those checks live on this type but are enforced by the engine.
#[derive(Clone, PartialEq, Eq)]
pub struct QHClass {
    n: usize,
    support: BTreeMap<Permutation, QPolynomial>,
}

impl QHClass {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            n,
            support: BTreeMap::new(),
        }
    }

    /// The basis class σ_w.
    pub fn basis(w: &Permutation) -> Self {
        let mut c = Self::zero(w.n());
        c.support.insert(w.clone(), QPolynomial::one(w.n()));
        c
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Permutation, &QPolynomial)> {
        self.support.iter()
    }

    /// Coefficient polynomial of σ_w (zero if absent).
    pub fn coefficient(&self, w: &Permutation) -> QPolynomial {
        self.support
            .get(w)
            .cloned()
            .unwrap_or_else(|| QPolynomial::zero(self.n))
    }

    pub fn add_term(&mut self, w: Permutation, poly: &QPolynomial) {
        if poly.is_zero() {
            return;
        }
        debug_assert_eq!(w.n(), self.n);
        debug_assert_eq!(poly.rank(), self.n);
        match self.support.entry(w) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign(poly);
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(poly.clone());
            }
        }
    }

    /// Adds `c·m·σ_w` for a single monomial weight.
    pub fn add_monomial_term(&mut self, w: Permutation, m: QMonomial, c: &BigInt) {
        self.add_term(w, &QPolynomial::from_monomial(m, c.clone()));
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.n, other.n);
        for (w, p) in &other.support {
            self.add_term(w.clone(), p);
        }
    }

    pub fn sub_assign(&mut self, other: &Self) {
        assert_eq!(self.n, other.n);
        for (w, p) in &other.support {
            self.add_term(w.clone(), &p.scale_int(&BigInt::from(-1)));
        }
    }

    pub fn scale_mono(&self, m: &QMonomial) -> Self {
        Self {
            n: self.n,
            support: self
                .support
                .iter()
                .map(|(w, p)| (w.clone(), p.scale_mono(m)))
                .collect(),
        }
    }

    pub fn scale_poly(&self, q: &QPolynomial) -> Self {
        let mut out = Self::zero(self.n);
        if q.is_zero() {
            return out;
        }
        for (w, p) in &self.support {
            out.add_term(w.clone(), &p.mul(q));
        }
        out
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            support: self
                .support
                .iter()
                .map(|(w, p)| (w.clone(), p.scale_int(c)))
                .collect(),
        }
    }

    /// `self ← (p·self − c·other) / div`, the fused fraction-free row
    /// operation; every coefficient division must be exact.
    pub fn elim_combine(
        &mut self,
        p: &BigInt,
        c: &BigInt,
        other: &Self,
        div: &BigInt,
    ) -> Result<(), String> {
        assert_eq!(self.n, other.n);
        let mut combined = self.scale_int(p);
        combined.sub_assign(&other.scale_int(c));
        *self = combined.div_exact_int(div)?;
        Ok(())
    }

    pub fn div_exact_int(&self, d: &BigInt) -> Result<Self, String> {
        if d.is_one() {
            return Ok(self.clone());
        }
        let mut support = BTreeMap::new();
        for (w, p) in &self.support {
            support.insert(w.clone(), p.div_exact_int(d)?);
        }
        Ok(Self { n: self.n, support })
    }

    pub fn is_laurent_free(&self) -> bool {
        self.support.values().all(QPolynomial::is_laurent_free)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.support.values().all(QPolynomial::is_nonnegative)
    }

    /// True iff ℓ(w) + 2·deg m equals `total` for every supported term.
    pub fn is_length_homogeneous(&self, total: i64) -> bool {
        self.support.iter().all(|(w, p)| {
            p.terms()
                .all(|(m, _)| w.length() as i64 + m.length_degree() == total)
        })
    }

    /// Terms sorted for display: descending length, then one-line order.
    pub fn display_order(&self) -> Vec<(&Permutation, &QPolynomial)> {
        let mut terms: Vec<_> = self.support.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            b.length()
                .cmp(&a.length())
                .then_with(|| a.values().cmp(b.values()))
        });
        terms
    }
}

impl fmt::Display for QHClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, p) in self.display_order() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if p == &QPolynomial::one(self.n) {
                write!(f, "s[{w}]")?;
            } else if p.num_terms() == 1 {
                write!(f, "{p}*s[{w}]")?;
            } else {
                write!(f, "({p})*s[{w}]")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QHClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QHClass({self})")
    }
}
