//! Independent classical Schubert-calculus oracle.
//!
//! Schubert polynomials are built by divided differences descending from the
//! staircase monomial; intersection numbers c_{u,v,w} are read off as the
//! top staircase coefficient of a normal form in the coinvariant algebra.
//! This module shares no multiplication code with the quantum engine;
//! that independence is what makes the q -> 0 cross-check meaningful.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::perm::Permutation;

/// An integer-coefficient polynomial in x_1, …, x_n, exponent vectors of
/// fixed length n. Canonical form: no zero coefficients stored.
#[derive(Clone, PartialEq, Eq)]
pub struct XPolynomial {
    n: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl XPolynomial {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; n], &BigInt::one());
        p
    }

    /// The variable x_i (1-based).
    pub fn x(n: usize, i: usize) -> Self {
        assert!(1 <= i && i <= n);
        let mut exps = vec![0; n];
        exps[i - 1] = 1;
        let mut p = Self::zero(n);
        p.add_term(exps, &BigInt::one());
        p
    }

    pub fn monomial(n: usize, exps: Vec<u32>, c: BigInt) -> Self {
        assert_eq!(exps.len(), n);
        let mut p = Self::zero(n);
        p.add_term(exps, &c);
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(exps.len(), self.n);
        match self.terms.entry(exps) {
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
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), &(-c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, &(ca * cb));
            }
        }
        out
    }

    /// The action of s_i on variables: swaps x_i and x_{i+1}.
    pub fn swap_vars(&self, i: usize) -> Self {
        assert!(1 <= i && i < self.n);
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            let mut exps = e.clone();
            exps.swap(i - 1, i);
            out.add_term(exps, c);
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }
}

impl std::fmt::Debug for XPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let vars: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0)
                    .map(|(i, &p)| {
                        if p == 1 {
                            format!("x{}", i + 1)
                        } else {
                            format!("x{}^{p}", i + 1)
                        }
                    })
                    .collect();
                if vars.is_empty() {
                    format!("{c}")
                } else if c.is_one() {
                    vars.join("*")
                } else {
                    format!("{c}*{}", vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

/// The divided difference ∂_i f = (f − s_i f)/(x_i − x_{i+1}).
///
/// Computed term by term: a monomial with x_i-exponent p and
/// x_{i+1}-exponent q contributes the geometric sum
/// ± Σ_t x_i^t x_{i+1}^{p+q−1−t}, which makes the division exact by
/// construction.
pub fn divided_difference(i: usize, f: &XPolynomial) -> XPolynomial {
    let n = f.n();
    assert!(1 <= i && i < n, "divided difference index out of range");
    let mut out = XPolynomial::zero(n);
    for (exps, c) in f.terms() {
        let p = exps[i - 1];
        let q = exps[i];
        if p == q {
            continue;
        }
        let (lo, hi, coeff) = if p > q { (q, p, c.clone()) } else { (p, q, -c) };
        for t in lo..hi {
            let mut e = exps.clone();
            e[i - 1] = t;
            e[i] = hi + lo - 1 - t;
            out.add_term(e, &coeff);
        }
    }
    out
}

/// The complete homogeneous symmetric polynomial h_m(x_1, …, x_i), embedded
/// at ambient rank n.
fn complete_homogeneous(n: usize, i: usize, m: u32) -> XPolynomial {
    let mut out = XPolynomial::zero(n);
    let mut exps = vec![0u32; n];
    fn rec(out: &mut XPolynomial, exps: &mut Vec<u32>, var: usize, left: u32, i: usize) {
        if var == i - 1 {
            exps[var] = left;
            out.add_term(exps.clone(), &BigInt::one());
            exps[var] = 0;
            return;
        }
        for take in 0..=left {
            exps[var] = take;
            rec(out, exps, var + 1, left - take, i);
        }
        exps[var] = 0;
    }
    rec(&mut out, &mut exps, 0, m, i);
    out
}

/// The elementary symmetric polynomial e_k(x_1, …, x_n).
pub fn elementary_symmetric(n: usize, k: usize) -> XPolynomial {
    assert!(k <= n);
    let mut out = XPolynomial::zero(n);
    let mut choice = Vec::new();
    fn rec(out: &mut XPolynomial, choice: &mut Vec<usize>, start: usize, k: usize, n: usize) {
        if choice.len() == k {
            let mut exps = vec![0u32; n];
            for &i in choice.iter() {
                exps[i] = 1;
            }
            out.add_term(exps, &BigInt::one());
            return;
        }
        for i in start..n {
            choice.push(i);
            rec(out, choice, i + 1, k, n);
            choice.pop();
        }
    }
    rec(&mut out, &mut choice, 0, k, n);
    out
}

/// Reduces modulo the ideal of symmetric polynomials using the rewrite
/// family with leading terms x_i^{n−i+1}: any such power is replaced via
/// h_{n−i+1}(x_1, …, x_i) ≡ 0, largest offending i first. The output is
/// supported on staircase exponents (a_i ≤ n−i) and the map is idempotent.
pub fn normal_form(f: &XPolynomial) -> XPolynomial {
    let n = f.n();
    let mut work = f.clone();
    loop {
        // pick the lexicographically largest offending monomial
        let offender = work.terms().rev().find_map(|(exps, c)| {
            largest_offending_var(n, exps).map(|i| (exps.clone(), c.clone(), i))
        });
        let Some((exps, coeff, i)) = offender else {
            return work;
        };
        let bound = (n - i + 1) as u32;
        work.add_term(exps.clone(), &(-&coeff));
        // x_i^bound = -(h_bound(x_1..x_i) - x_i^bound), shifted by the rest
        let mut rest = exps;
        rest[i - 1] -= bound;
        let h = complete_homogeneous(n, i, bound);
        for (he, hc) in h.terms() {
            if he[i - 1] == bound {
                continue; // the leading term being replaced
            }
            let combined: Vec<u32> = rest.iter().zip(he).map(|(a, b)| a + b).collect();
            debug_assert!(
                combined[i - 1] < rest[i - 1] + bound,
                "rewrite failed to lower the x_{i} exponent"
            );
            work.add_term(combined, &(-&coeff * hc));
        }
    }
}

fn largest_offending_var(n: usize, exps: &[u32]) -> Option<usize> {
    (1..=n).rev().find(|&i| exps[i - 1] >= (n - i + 1) as u32)
}

/// Memoized Schubert polynomials for a fixed rank, with intersection-number
/// evaluation. Reads are concurrent; inserts serialize on a write lock.
pub struct ClassicalOracle {
    n: usize,
    cache: RwLock<HashMap<Permutation, Arc<XPolynomial>>>,
}

impl ClassicalOracle {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            n,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The Schubert polynomial of w, built as ∂_i S_{w s_i} along ascents,
    /// starting from S_{w0} = x_1^{n−1} x_2^{n−2} ⋯ x_{n−1}.
    pub fn schubert(&self, w: &Permutation) -> Arc<XPolynomial> {
        assert_eq!(w.n(), self.n);
        if let Some(hit) = self.cache.read().unwrap().get(w) {
            return Arc::clone(hit);
        }
        let result = if w == &Permutation::longest(self.n) {
            let exps: Vec<u32> = (0..self.n).map(|i| (self.n - 1 - i) as u32).collect();
            Arc::new(XPolynomial::monomial(self.n, exps, BigInt::one()))
        } else {
            // first ascent: w(i) < w(i+1); then ℓ(w s_i) = ℓ(w) + 1
            let i = (1..self.n)
                .find(|&i| w.apply(i) < w.apply(i + 1))
                .expect("only the longest permutation has no ascent");
            let parent = self.schubert(&w.right_multiply_transposition(i, i + 1));
            Arc::new(divided_difference(i, &parent))
        };
        let mut cache = self.cache.write().unwrap();
        Arc::clone(cache.entry(w.clone()).or_insert(result))
    }

    /// The Schubert number c_{u,v,w}: the coefficient of the staircase
    /// monomial x^δ in the normal form of S_u·S_v·S_w. Zero unless the
    /// lengths sum to n(n−1)/2.
    pub fn c(&self, u: &Permutation, v: &Permutation, w: &Permutation) -> BigInt {
        assert_eq!(u.n(), self.n);
        assert_eq!(v.n(), self.n);
        assert_eq!(w.n(), self.n);
        let top = self.n * (self.n - 1) / 2;
        if u.length() + v.length() + w.length() != top {
            return BigInt::zero();
        }
        // interleave normal forms so intermediates stay on the staircase
        let uv = normal_form(&self.schubert(u).mul(&self.schubert(v)));
        let uvw = normal_form(&uv.mul(&self.schubert(w)));
        let delta: Vec<u32> = (0..self.n).map(|i| (self.n - 1 - i) as u32).collect();
        uvw.coefficient(&delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn divided_difference_examples() {
        let n = 3;
        let x1 = XPolynomial::x(n, 1);
        let x2 = XPolynomial::x(n, 2);
        let x1_sq = x1.mul(&x1);
        assert_eq!(divided_difference(1, &x1_sq), x1.add(&x2));
        assert_eq!(divided_difference(2, &x1_sq.mul(&x2)), x1_sq);
        // symmetric input is annihilated
        let sym = x1.mul(&x2).add(&x1.add(&x2));
        assert!(divided_difference(1, &sym).is_zero());
    }

    #[test]
    fn divided_difference_satisfies_defining_identity() {
        // (x_i − x_{i+1})·∂_i f = f − s_i f on assorted inputs
        let n = 4;
        let x = |i| XPolynomial::x(n, i);
        let samples = vec![
            x(1).mul(&x(1)).mul(&x(2)),
            x(2).mul(&x(3)).add(&x(1).mul(&x(4))),
            complete_homogeneous(n, 3, 3),
            elementary_symmetric(n, 2).mul(&x(1)),
        ];
        for f in samples {
            for i in 1..n {
                let lhs = x(i).sub(&x(i + 1)).mul(&divided_difference(i, &f));
                let rhs = f.sub(&f.swap_vars(i));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn schubert_examples() {
        let oracle = ClassicalOracle::new(3);
        let x1 = XPolynomial::x(3, 1);
        let x2 = XPolynomial::x(3, 2);
        assert_eq!(*oracle.schubert(&p("321")), x1.mul(&x1).mul(&x2));
        assert_eq!(*oracle.schubert(&p("213")), x1);
        assert_eq!(*oracle.schubert(&p("132")), x1.add(&x2));
        assert_eq!(*oracle.schubert(&p("123")), XPolynomial::one(3));
    }

    #[test]
    fn schubert_path_independence() {
        // every ascent choice yields the same polynomial
        for n in 2..=5 {
            let oracle = ClassicalOracle::new(n);
            for w in Permutation::all(n) {
                let reference = oracle.schubert(&w);
                for i in 1..n {
                    if w.apply(i) < w.apply(i + 1) {
                        let parent = oracle.schubert(&w.right_multiply_transposition(i, i + 1));
                        assert_eq!(
                            divided_difference(i, &parent),
                            *reference,
                            "paths through ascent {i} disagree at {w}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn normal_form_examples() {
        let x1 = XPolynomial::x(3, 1);
        let x2 = XPolynomial::x(3, 2);
        let sum_sq = x1.add(&x2).mul(&x1.add(&x2));
        assert_eq!(normal_form(&sum_sq), x1.mul(&x2));
        assert!(normal_form(&elementary_symmetric(3, 1)).is_zero());
        let oracle = ClassicalOracle::new(3);
        for w in Permutation::all(3) {
            let s = oracle.schubert(&w);
            assert_eq!(normal_form(&s), *s);
        }
    }

    #[test]
    fn normal_form_is_idempotent_and_staircase() {
        let n = 4;
        let f = complete_homogeneous(n, 4, 5).mul(&elementary_symmetric(n, 2));
        let nf = normal_form(&f);
        for (exps, _) in nf.terms() {
            for i in 1..=n {
                assert!(exps[i - 1] <= (n - i) as u32);
            }
        }
        assert_eq!(normal_form(&nf), nf);
    }

    #[test]
    fn classical_c_examples() {
        let oracle = ClassicalOracle::new(3);
        assert_eq!(oracle.c(&p("132"), &p("132"), &p("213")), BigInt::from(1));
        // length sum away from n(n-1)/2 vanishes
        assert_eq!(oracle.c(&p("132"), &p("132"), &p("132")), BigInt::from(0));
        // duality pairing
        let w0 = Permutation::longest(3);
        for w in Permutation::all(3) {
            assert_eq!(
                oracle.c(&Permutation::identity(3), &w, &w0.compose(&w)),
                BigInt::from(1)
            );
        }
    }

    #[test]
    fn classical_c_is_symmetric_and_nonnegative() {
        for n in 2..=4 {
            let oracle = ClassicalOracle::new(n);
            let perms = Permutation::all(n);
            let top = n * (n - 1) / 2;
            for u in &perms {
                for v in &perms {
                    for w in &perms {
                        if u.length() + v.length() + w.length() != top {
                            continue;
                        }
                        let c = oracle.c(u, v, w);
                        assert!(!c.is_negative(), "negative c at ({u},{v},{w})");
                        assert_eq!(c, oracle.c(v, u, w));
                        assert_eq!(c, oracle.c(w, v, u));
                        assert_eq!(c, oracle.c(u, w, v));
                    }
                }
            }
        }
    }
}
