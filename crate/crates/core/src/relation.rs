//! Binary relations and sets over a fixed universe of events `0..n`.
//!
//! Both are dense bit matrices: candidate executions of litmus tests have a
//! few dozen events, so every operation is a handful of word operations per
//! row.

use std::fmt;

const BITS: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(BITS).max(1)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EventSet {
    n: usize,
    bits: Vec<u64>,
}

impl EventSet {
    pub fn empty(n: usize) -> Self {
        EventSet {
            n,
            bits: vec![0; words_for(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for e in 0..n {
            s.insert(e);
        }
        s
    }

    pub fn of(n: usize, elems: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for e in elems {
            s.insert(e);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, e: usize) {
        assert!(e < self.n, "event {e} outside universe of {}", self.n);
        self.bits[e / BITS] |= 1 << (e % BITS);
    }

    pub fn contains(&self, e: usize) -> bool {
        e < self.n && self.bits[e / BITS] & (1 << (e % BITS)) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        iter_bits(&self.bits)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.n, other.n, "universe mismatch");
        EventSet {
            n: self.n,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        Self::full(self.n).difference(self)
    }
}

impl fmt::Debug for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * BITS + b)
            }
        })
    })
}

/// A binary relation stored as one bit row per source event.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        let words = words_for(n);
        Relation {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for e in 0..n {
            r.insert(e, e);
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(n);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    /// `[S]`: the identity restricted to `s`.
    pub fn lift(s: &EventSet) -> Self {
        let mut r = Self::empty(s.n);
        for e in s.iter() {
            r.insert(e, e);
        }
        r
    }

    /// `S1 * S2`
    pub fn cartesian(a: &EventSet, b: &EventSet) -> Self {
        assert_eq!(a.n, b.n, "universe mismatch");
        let mut r = Self::empty(a.n);
        for e in a.iter() {
            r.row_mut(e).copy_from_slice(&b.bits);
        }
        r
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    fn row(&self, a: usize) -> &[u64] {
        &self.rows[a * self.words..(a + 1) * self.words]
    }

    fn row_mut(&mut self, a: usize) -> &mut [u64] {
        &mut self.rows[a * self.words..(a + 1) * self.words]
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        assert!(a < self.n && b < self.n, "pair ({a},{b}) outside universe");
        self.rows[a * self.words + b / BITS] |= 1 << (b % BITS);
    }

    pub fn remove(&mut self, a: usize, b: usize) {
        if a < self.n && b < self.n {
            self.rows[a * self.words + b / BITS] &= !(1 << (b % BITS));
        }
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.rows[a * self.words + b / BITS] & (1 << (b % BITS)) != 0
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&w| w == 0)
    }

    /// Successors of `a`.
    pub fn image(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(a))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| self.image(a).map(move |b| (a, b)))
    }

    pub fn domain(&self) -> EventSet {
        EventSet::of(
            self.n,
            (0..self.n).filter(|&a| self.row(a).iter().any(|&w| w != 0)),
        )
    }

    pub fn range(&self) -> EventSet {
        let mut s = EventSet::empty(self.n);
        for a in 0..self.n {
            for (acc, &w) in s.bits.iter_mut().zip(self.row(a)) {
                *acc |= w;
            }
        }
        s
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.n, other.n, "universe mismatch");
        Relation {
            n: self.n,
            words: self.words,
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        let full = Self::cartesian(&EventSet::full(self.n), &EventSet::full(self.n));
        full.difference(self)
    }

    pub fn inverse(&self) -> Self {
        let mut r = Self::empty(self.n);
        for (a, b) in self.pairs() {
            r.insert(b, a);
        }
        r
    }

    /// Relational composition `self ; other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "universe mismatch");
        let mut r = Self::empty(self.n);
        for a in 0..self.n {
            for b in self.image(a) {
                let (dst, src) = (a * r.words, b * other.words);
                for k in 0..r.words {
                    r.rows[dst + k] |= other.rows[src + k];
                }
            }
        }
        r
    }

    /// Least transitive relation containing `self`.
    pub fn transitive_closure(&self) -> Self {
        let mut r = self.clone();
        let w = r.words;
        for k in 0..r.n {
            let (kw, kb) = (k / BITS, 1u64 << (k % BITS));
            for i in 0..r.n {
                if r.rows[i * w + kw] & kb != 0 {
                    for j in 0..w {
                        let v = r.rows[k * w + j];
                        r.rows[i * w + j] |= v;
                    }
                }
            }
        }
        r
    }

    pub fn reflexive_transitive_closure(&self) -> Self {
        self.transitive_closure().union(&Self::identity(self.n))
    }

    pub fn is_irreflexive(&self) -> bool {
        (0..self.n).all(|e| !self.contains(e, e))
    }

    /// No cycle, including self-loops. Uses Kahn's algorithm.
    pub fn is_acyclic(&self) -> bool {
        let mut indegree = vec![0usize; self.n];
        for (_, b) in self.pairs() {
            indegree[b] += 1;
        }
        let mut ready: Vec<usize> = (0..self.n).filter(|&e| indegree[e] == 0).collect();
        let mut seen = 0;
        while let Some(a) = ready.pop() {
            seen += 1;
            for b in self.image(a) {
                indegree[b] -= 1;
                if indegree[b] == 0 {
                    ready.push(b);
                }
            }
        }
        seen == self.n
    }

    /// `self` restricted to pairs whose source lies in `s`.
    pub fn restrict_domain(&self, s: &EventSet) -> Self {
        let mut r = self.clone();
        for a in 0..self.n {
            if !s.contains(a) {
                r.row_mut(a).fill(0);
            }
        }
        r
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}
