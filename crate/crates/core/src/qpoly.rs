//! Exact arithmetic in the quantum parameters q_1, …, q_{n−1}.
//!
//! Monomials are Laurent (negative exponents are allowed: the interval
//! monomial q_{ij} with i > j is the inverse of q_{ji}). Ring elements,
//! meaning structure polynomials and Schubert-basis coefficients, must stay
//! Laurent-free. Coefficients are arbitrary-precision integers.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::perm::Permutation;

/// A Laurent monomial in q_1, …, q_{n−1}: slot i holds the exponent of
/// q_{i+1}. Ordering is lexicographic on the exponent vector, which is also
/// the canonical serialization order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QMonomial {
    exps: Vec<i32>,
}

impl QMonomial {
    /// The empty monomial 1 at rank n.
    pub fn one(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            exps: vec![0; n - 1],
        }
    }

    pub fn from_exps(exps: Vec<i32>) -> Self {
        Self { exps }
    }

    /// The interval monomial q_{ij}: q_i q_{i+1} ⋯ q_{j−1} for i < j,
    /// 1 for i = j, and q_{ji}^{−1} for i > j.
    pub fn q_interval(n: usize, i: usize, j: usize) -> Self {
        assert!(
            1 <= i && i <= n && 1 <= j && j <= n,
            "interval indices must lie in 1..={n}, got ({i},{j})"
        );
        let mut exps = vec![0; n - 1];
        if i < j {
            for s in i..j {
                exps[s - 1] = 1;
            }
        } else if i > j {
            for s in j..i {
                exps[s - 1] = -1;
            }
        }
        Self { exps }
    }

    /// Ambient rank n (one more than the number of q variables).
    pub fn rank(&self) -> usize {
        self.exps.len() + 1
    }

    pub fn exps(&self) -> &[i32] {
        &self.exps
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.exps.len(), other.exps.len());
        Self {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn inv(&self) -> Self {
        Self {
            exps: self.exps.iter().map(|e| -e).collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn is_laurent_free(&self) -> bool {
        self.exps.iter().all(|&e| e >= 0)
    }

    /// Degree with each q_i counting 1 (the grading of the structure
    /// polynomials).
    pub fn polynomial_degree(&self) -> i64 {
        self.exps.iter().map(|&e| e as i64).sum()
    }

    /// Degree with each q_i counting 2 (the ring grading matching ℓ).
    pub fn length_degree(&self) -> i64 {
        2 * self.polynomial_degree()
    }
}

impl fmt::Display for QMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (slot, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "q{}", slot + 1)?;
            } else {
                write!(f, "q{}^{}", slot + 1, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QMonomial({self})")
    }
}

/// The composite shift monomial Q_{w,a} in the printed index convention:
/// the product of q_{1i} over positions i with w(i) ≥ n−a+1 for a > 0, the
/// product of q_{1j}^{−1} over positions j with w(j) ≤ −a for a < 0, and 1
/// for a = 0.
pub fn big_q(w: &Permutation, a: i64) -> QMonomial {
    big_q_with(w, a, |n, pos| QMonomial::q_interval(n, 1, pos))
}

/// Q_{w,a} with a caller-supplied per-position monomial; used by the
/// calibrated (transposed, q_{in}-style) variant.
pub fn big_q_with(
    w: &Permutation,
    a: i64,
    position_monomial: impl Fn(usize, usize) -> QMonomial,
) -> QMonomial {
    let n = w.n();
    assert!(a.unsigned_abs() as usize <= n, "|a| must be at most n");
    let mut acc = QMonomial::one(n);
    if a > 0 {
        let threshold = n as i64 - a + 1;
        for i in 1..=n {
            if w.apply(i) as i64 >= threshold {
                acc = acc.mul(&position_monomial(n, i));
            }
        }
    } else if a < 0 {
        for j in 1..=n {
            if w.apply(j) as i64 <= -a {
                acc = acc.mul(&position_monomial(n, j).inv());
            }
        }
    }
    acc
}

/// A finitely supported integer-coefficient polynomial (possibly Laurent)
/// in q_1, …, q_{n−1}. Canonical form: no zero coefficients stored.
#[derive(Clone, PartialEq, Eq)]
pub struct QPolynomial {
    n: usize,
    terms: BTreeMap<QMonomial, BigInt>,
}

impl QPolynomial {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, BigInt::one())
    }

    pub fn constant(n: usize, c: BigInt) -> Self {
        let mut p = Self::zero(n);
        if !c.is_zero() {
            p.terms.insert(QMonomial::one(n), c);
        }
        p
    }

    pub fn from_monomial(m: QMonomial, c: BigInt) -> Self {
        let mut p = Self::zero(m.rank());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&QMonomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: QMonomial, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.rank(), self.n);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.n, other.n);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn sub_assign(&mut self, other: &Self) {
        assert_eq!(self.n, other.n);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), &(-c));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }

    pub fn scale_mono(&self, m: &QMonomial) -> Self {
        assert_eq!(m.rank(), self.n);
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(mm, c)| (mm.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// `self ← (p·self − c·other) / div` with every division exact; the
    /// fused row operation of fraction-free elimination.
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

    /// Divides every coefficient by `d`, failing if any division is inexact.
    pub fn div_exact_int(&self, d: &BigInt) -> Result<Self, String> {
        assert!(!d.is_zero(), "division by zero");
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let q = c / d;
            if &q * d != *c {
                return Err(format!("{c} is not divisible by {d}"));
            }
            terms.insert(m.clone(), q);
        }
        Ok(Self { n: self.n, terms })
    }

    pub fn is_laurent_free(&self) -> bool {
        self.terms.keys().all(QMonomial::is_laurent_free)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// The coefficient of q^0. Rejects Laurent input: a negative exponent
    /// reaching here signals a convention bug upstream.
    pub fn constant_term(&self) -> Result<BigInt, Error> {
        if !self.is_laurent_free() {
            return Err(Error::NotLaurentFree);
        }
        Ok(self.coefficient(&vec![0; self.n - 1]))
    }

    /// The integer on the monomial q^d (0 if absent).
    pub fn coefficient(&self, d: &[i32]) -> BigInt {
        assert_eq!(d.len(), self.n - 1, "exponent vector has wrong length");
        self.terms
            .get(&QMonomial::from_exps(d.to_vec()))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    /// True iff every stored monomial has the given polynomial degree
    /// (vacuously true for zero).
    pub fn is_homogeneous(&self, degree: i64) -> bool {
        self.terms.keys().all(|m| m.polynomial_degree() == degree)
    }

    /// JSON form: a list of `{"exps": […], "coeff": "<decimal>"}` in
    /// lexicographic exponent order.
    pub fn to_json_terms(&self) -> Vec<PolyTermJson> {
        self.terms
            .iter()
            .map(|(m, c)| PolyTermJson {
                exps: m.exps().to_vec(),
                coeff: c.to_string(),
            })
            .collect()
    }

    /// Rebuilds a polynomial from its JSON form at the given rank.
    pub fn from_json_terms(n: usize, terms: &[PolyTermJson]) -> Result<Self, Error> {
        let mut p = Self::zero(n);
        for t in terms {
            if t.exps.len() != n - 1 {
                return Err(Error::CacheFormat(format!(
                    "exponent vector of length {} at rank {n}",
                    t.exps.len()
                )));
            }
            let c: BigInt = t
                .coeff
                .parse()
                .map_err(|_| Error::CacheFormat(format!("bad coefficient {:?}", t.coeff)))?;
            if c.is_zero() {
                return Err(Error::CacheFormat("explicit zero coefficient".into()));
            }
            p.add_term(QMonomial::from_exps(t.exps.clone()), &c);
        }
        Ok(p)
    }
}

/// One serialized polynomial term.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyTermJson {
    pub exps: Vec<i32>,
    pub coeff: String,
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else if (-c).is_one() {
                write!(f, "-{m}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QPolynomial({self})")
    }
}
