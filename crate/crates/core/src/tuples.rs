//! Extensional subsets of `A^n`.
//!
//! A tuple `(t_1, ..., t_n)` is encoded as the base-`k` integer with `t_1`
//! as the most significant digit, so numeric order on codes is
//! lexicographic order on tuples. Small spaces use a dense bitset; larger
//! ones fall back to a hash set of codes.

use std::collections::HashSet;
use std::fmt;
use std::io::{self, Write};

use crate::algebra::{increment, Element};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// Size of `A^n`, or `None` if it does not fit the 64-bit encoding.
pub fn space_size(k: usize, n: usize) -> Option<u64> {
    (k as u64).checked_pow(n.try_into().ok()?)
}

/// Encoding between tuples and their base-`k` codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Codec {
    k: usize,
    n: usize,
}

impl Codec {
    pub fn new(k: usize, n: usize) -> Self {
        Codec { k, n }
    }

    #[inline]
    pub fn encode(&self, tuple: &[Element]) -> u64 {
        debug_assert_eq!(tuple.len(), self.n);
        tuple.iter().fold(0u64, |acc, &d| acc * self.k as u64 + d as u64)
    }

    pub fn decode_into(&self, mut code: u64, out: &mut [Element]) {
        let k = self.k as u64;
        for d in out.iter_mut().rev() {
            *d = (code % k) as Element;
            code /= k;
        }
    }

    pub fn decode(&self, code: u64) -> Vec<Element> {
        let mut out = vec![0; self.n];
        self.decode_into(code, &mut out);
        out
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Dense(Vec<u64>),
    Sparse(HashSet<u64>),
}

/// A subset of `A^n`.
#[derive(Debug, Clone)]
pub struct TupleSet {
    k: usize,
    n: usize,
    space: u64,
    len: u64,
    repr: Repr,
}

impl TupleSet {
    /// An empty subset of `A^n` using the default dense threshold.
    pub fn empty(k: usize, n: usize) -> Result<Self> {
        Self::empty_with_threshold(k, n, Limits::DEFAULT_DENSE_THRESHOLD)
    }

    pub fn empty_with_threshold(k: usize, n: usize, dense_threshold: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidAlgebra("universe size must be at least 1".into()));
        }
        let space = space_size(k, n).ok_or_else(|| Error::budget(format!("{k}^{n} tuples do not fit a 64-bit code"), u64::MAX))?;
        let repr = if space <= dense_threshold {
            Repr::Dense(vec![0; space.div_ceil(64) as usize])
        } else {
            Repr::Sparse(HashSet::new())
        };
        Ok(TupleSet {
            k,
            n,
            space,
            len: 0,
            repr,
        })
    }

    /// All tuples of `A^n` satisfying `pred`, visited in lexicographic order.
    pub fn from_predicate(
        k: usize,
        n: usize,
        limits: &Limits,
        mut pred: impl FnMut(&[Element]) -> bool,
    ) -> Result<Self> {
        let mut set = Self::empty_with_threshold(k, n, limits.dense_threshold)?;
        if set.space > limits.enumeration {
            return Err(Error::budget(
                format!("enumerating {k}^{n} tuples"),
                limits.enumeration,
            ));
        }
        let mut digits = vec![0 as Element; n];
        for code in 0..set.space {
            if pred(&digits) {
                set.insert(code);
            }
            increment(&mut digits, k);
        }
        Ok(set)
    }

    /// The whole of `A^n`.
    pub fn full(k: usize, n: usize, limits: &Limits) -> Result<Self> {
        Self::from_predicate(k, n, limits, |_| true)
    }

    pub fn from_tuples<'a>(k: usize, n: usize, tuples: impl IntoIterator<Item = &'a [Element]>) -> Result<Self> {
        let mut set = Self::empty(k, n)?;
        for t in tuples {
            set.insert_tuple(t)?;
        }
        Ok(set)
    }

    pub fn universe(&self) -> usize {
        self.k
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    /// `k^n`.
    pub fn space(&self) -> u64 {
        self.space
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len == self.space
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    pub fn codec(&self) -> Codec {
        Codec::new(self.k, self.n)
    }

    /// Inserts an encoded tuple; returns true if it was not present.
    #[inline]
    pub fn insert(&mut self, code: u64) -> bool {
        debug_assert!(code < self.space);
        let fresh = match &mut self.repr {
            Repr::Dense(words) => {
                let (w, b) = ((code / 64) as usize, code % 64);
                let fresh = words[w] & (1 << b) == 0;
                words[w] |= 1 << b;
                fresh
            }
            Repr::Sparse(set) => set.insert(code),
        };
        self.len += fresh as u64;
        fresh
    }

    pub fn insert_tuple(&mut self, tuple: &[Element]) -> Result<bool> {
        self.check_tuple(tuple)?;
        let code = self.codec().encode(tuple);
        Ok(self.insert(code))
    }

    #[inline]
    pub fn contains(&self, code: u64) -> bool {
        match &self.repr {
            Repr::Dense(words) => {
                code < self.space && words[(code / 64) as usize] & (1 << (code % 64)) != 0
            }
            Repr::Sparse(set) => set.contains(&code),
        }
    }

    /// Membership of a tuple; tuples of the wrong length or with
    /// out-of-range entries are never members.
    pub fn contains_tuple(&self, tuple: &[Element]) -> bool {
        self.check_tuple(tuple).is_ok() && self.contains(self.codec().encode(tuple))
    }

    fn check_tuple(&self, tuple: &[Element]) -> Result<()> {
        if tuple.len() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                found: tuple.len(),
            });
        }
        if let Some(&bad) = tuple.iter().find(|&&d| d as usize >= self.k) {
            return Err(Error::ElementOutOfRange {
                value: bad as usize,
                k: self.k,
            });
        }
        Ok(())
    }

    /// Member codes in increasing (lexicographic) order.
    pub fn codes(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Dense(words) => {
                let mut out = Vec::with_capacity(self.len as usize);
                for (w, &word) in words.iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        let b = bits.trailing_zeros() as u64;
                        out.push(w as u64 * 64 + b);
                        bits &= bits - 1;
                    }
                }
                out
            }
            Repr::Sparse(set) => {
                let mut out: Vec<u64> = set.iter().copied().collect();
                out.sort_unstable();
                out
            }
        }
    }

    /// Member tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<Element>> + '_ {
        let codec = self.codec();
        self.codes().into_iter().map(move |c| codec.decode(c))
    }

    pub fn is_subset(&self, other: &TupleSet) -> bool {
        self.k == other.k
            && self.n == other.n
            && self.len <= other.len
            && self.codes().into_iter().all(|c| other.contains(c))
    }

    /// A copy using the dense or sparse representation as requested.
    pub fn with_representation(&self, dense: bool) -> TupleSet {
        let threshold = if dense { u64::MAX } else { 0 };
        let mut out = TupleSet::empty_with_threshold(self.k, self.n, threshold)
            .expect("same dimensions as an existing set");
        for c in self.codes() {
            out.insert(c);
        }
        out
    }

    /// Writes one tuple per line in lexicographic order, coordinates
    /// separated by single spaces.
    pub fn write_export(&self, out: &mut dyn Write) -> io::Result<()> {
        for t in self.tuples() {
            writeln!(out, "{}", join(&t))?;
        }
        Ok(())
    }

    pub fn export(&self) -> String {
        let mut buf = Vec::new();
        self.write_export(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("export is ASCII")
    }
}

impl PartialEq for TupleSet {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.n == other.n
            && self.len == other.len
            && self.codes().into_iter().all(|c| other.contains(c))
    }
}

impl Eq for TupleSet {}

impl fmt::Display for TupleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.export())
    }
}

pub(crate) fn join(t: &[Element]) -> String {
    t.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
}
