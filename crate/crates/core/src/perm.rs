//! Permutations of {1, …, n} in one-line notation, together with the two
//! length-change predicates that drive the quantum Monk operators.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A permutation of {1, …, n} in one-line notation.
///
/// Positions and values are 1-based throughout. Values are immutable and
/// compared structurally. Composition is functional: `(u ∘ v)(i) = u(v(i))`,
/// so composing the long cycle on the left shifts values, not positions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    values: Vec<u8>,
}

impl Permutation {
    /// Builds a permutation from one-line notation, validating bijectivity.
    pub fn from_one_line(values: Vec<u8>) -> Result<Self, Error> {
        let n = values.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty one-line notation".into()));
        }
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v as usize > n {
                return Err(Error::InvalidArgument(format!(
                    "value {v} out of range 1..={n}"
                )));
            }
            if seen[v as usize] {
                return Err(Error::InvalidArgument(format!("duplicate value {v}")));
            }
            seen[v as usize] = true;
        }
        Ok(Self { values })
    }

    /// The identity permutation (1, 2, …, n).
    pub fn identity(n: usize) -> Self {
        assert!((1..=255).contains(&n), "rank must be in 1..=255, got {n}");
        Self {
            values: (1..=n as u8).collect(),
        }
    }

    /// The longest permutation w0 = (n, n−1, …, 1), of length n(n−1)/2.
    pub fn longest(n: usize) -> Self {
        assert!((1..=255).contains(&n), "rank must be in 1..=255, got {n}");
        Self {
            values: (1..=n as u8).rev().collect(),
        }
    }

    /// The long cycle o with o(i) = i+1 for i < n and o(n) = 1,
    /// one-line (2, 3, …, n, 1).
    pub fn cycle(n: usize) -> Self {
        assert!((1..=255).contains(&n), "rank must be in 1..=255, got {n}");
        let mut values: Vec<u8> = (2..=n as u8).collect();
        values.push(1);
        Self { values }
    }

    /// The transposition s_ab exchanging a and b.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        assert!(
            1 <= a && a < b && b <= n,
            "transposition needs 1 <= a < b <= n, got a={a}, b={b}, n={n}"
        );
        let mut p = Self::identity(n);
        p.values.swap(a - 1, b - 1);
        p
    }

    /// The adjacent transposition s_k = s_{k,k+1}.
    pub fn adjacent_transposition(n: usize, k: usize) -> Self {
        Self::transposition(n, k, k + 1)
    }

    /// Ambient rank n.
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// One-line notation as a slice.
    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Image of the 1-based position `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.values[i - 1] as usize
    }

    /// Functional composition: `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(
            self.n(),
            other.n(),
            "cannot compose permutations of different ranks"
        );
        let values = other
            .values
            .iter()
            .map(|&v| self.values[v as usize - 1])
            .collect();
        Self { values }
    }

    pub fn inverse(&self) -> Self {
        let mut values = vec![0u8; self.n()];
        for (i, &v) in self.values.iter().enumerate() {
            values[v as usize - 1] = (i + 1) as u8;
        }
        Self { values }
    }

    /// `self` composed with itself `k` times; negative `k` uses the inverse.
    pub fn pow(&self, k: i64) -> Self {
        if k < 0 {
            return self.inverse().pow(-k);
        }
        let mut acc = Self::identity(self.n());
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        acc
    }

    /// Number of inversions: pairs i < j with w(i) > w(j).
    pub fn length(&self) -> usize {
        let v = &self.values;
        let mut count = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// `self · s_ab`: the one-line notation with positions a and b swapped.
    pub fn right_multiply_transposition(&self, a: usize, b: usize) -> Self {
        assert!(
            1 <= a && a < b && b <= self.n(),
            "positions must satisfy 1 <= a < b <= n"
        );
        let mut values = self.values.clone();
        values.swap(a - 1, b - 1);
        Self { values }
    }

    /// Positions k with w(k) > w(k+1).
    pub fn descents(&self) -> Vec<usize> {
        (1..self.n())
            .filter(|&k| self.values[k - 1] > self.values[k])
            .collect()
    }

    /// Lehmer code: c_i = #{j > i : w(j) < w(i)}. Its sum is the length.
    pub fn code(&self) -> Vec<usize> {
        let v = &self.values;
        (0..v.len())
            .map(|i| (i + 1..v.len()).filter(|&j| v[j] < v[i]).count())
            .collect()
    }

    /// True iff ℓ(w s_ab) = ℓ(w) + 1, decided by the interval criterion:
    /// for every a ≤ k ≤ b, either w(k) ≥ w(b) ≥ w(a) or w(b) ≥ w(a) ≥ w(k).
    pub fn is_cover_up(&self, a: usize, b: usize) -> bool {
        debug_assert!(1 <= a && a < b && b <= self.n());
        let wa = self.values[a - 1];
        let wb = self.values[b - 1];
        let ok = (a..=b).all(|k| {
            let wk = self.values[k - 1];
            (wk >= wb && wb >= wa) || (wb >= wa && wa >= wk)
        });
        debug_assert_eq!(
            ok,
            self.right_multiply_transposition(a, b).length() == self.length() + 1,
            "cover criterion disagrees with inversion count for {self} at ({a},{b})"
        );
        ok
    }

    /// True iff ℓ(w s_ab) = ℓ(w) − 2(b−a) + 1, decided by the interval
    /// criterion: w(a) ≥ w(k) ≥ w(b) for every a ≤ k ≤ b.
    pub fn is_deep_drop(&self, a: usize, b: usize) -> bool {
        debug_assert!(1 <= a && a < b && b <= self.n());
        let wa = self.values[a - 1];
        let wb = self.values[b - 1];
        let ok = (a..=b).all(|k| {
            let wk = self.values[k - 1];
            wa >= wk && wk >= wb
        });
        debug_assert_eq!(
            ok,
            self.right_multiply_transposition(a, b).length() as i64
                == self.length() as i64 - 2 * (b as i64 - a as i64) + 1,
            "drop criterion disagrees with inversion count for {self} at ({a},{b})"
        );
        ok
    }

    /// All of S_n in lexicographic order on one-line notation.
    pub fn all(n: usize) -> Vec<Permutation> {
        assert!(
            (1..=10).contains(&n),
            "refusing to enumerate S_n for n > 10"
        );
        let mut out = Vec::new();
        let mut v: Vec<u8> = (1..=n as u8).collect();
        loop {
            out.push(Permutation { values: v.clone() });
            if !next_permutation(&mut v) {
                break;
            }
        }
        out
    }
}

/// Advances `v` to its lexicographic successor; false once it wraps around.
fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl fmt::Display for Permutation {
    /// Compact digits up to rank 9, comma-separated from rank 10 on.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 9 {
            for &v in &self.values {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let joined = self
                .values
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",");
            write!(f, "{joined}")
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s.is_empty() {
            return Err(Error::Parse {
                pos: 0,
                msg: "empty permutation".into(),
            });
        }
        let mut values = Vec::new();
        if s.contains(',') {
            let mut pos = 0;
            for part in s.split(',') {
                let v: u64 = part.trim().parse().map_err(|_| Error::Parse {
                    pos,
                    msg: format!("expected an integer, found {part:?}"),
                })?;
                if v == 0 || v > 255 {
                    return Err(Error::Parse {
                        pos,
                        msg: format!("value {v} out of range 1..=255"),
                    });
                }
                values.push(v as u8);
                pos += part.len() + 1;
            }
        } else {
            for (pos, ch) in s.char_indices() {
                match ch.to_digit(10) {
                    Some(d) if d >= 1 => values.push(d as u8),
                    _ => {
                        return Err(Error::Parse {
                            pos,
                            msg: format!("expected a digit 1-9, found {ch:?}"),
                        })
                    }
                }
            }
        }
        Permutation::from_one_line(values).map_err(|e| Error::Parse {
            pos: 0,
            msg: e.to_string(),
        })
    }
}
