//! Generated subpowers `<X>` as a worklist fixed point.
//!
//! Members are kept in discovery order. When member `p` is processed, every
//! operation is applied to every argument list drawn from members `0..=p`
//! that uses `p` at least once; each combination is therefore evaluated
//! exactly once, at the moment its largest member is processed. New tuples
//! are appended and processed later.

use crate::algebra::{Algebra, Element, OperationTable};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::tuples::{Codec, TupleSet};

/// A subpower under construction. Seeds can be added at any time; after
/// [`Subpower::saturate`] the member set is closed under the algebra.
#[derive(Debug, Clone)]
pub struct Subpower<'a> {
    algebra: &'a Algebra,
    n: usize,
    set: TupleSet,
    rows: Vec<Element>,
    processed: usize,
    steps: u64,
    limits: Limits,
}

impl<'a> Subpower<'a> {
    pub fn new(algebra: &'a Algebra, n: usize, limits: &Limits) -> Result<Self> {
        let set = TupleSet::empty_with_threshold(algebra.universe(), n, limits.dense_threshold)?;
        Ok(Subpower {
            algebra,
            n,
            set,
            rows: Vec::new(),
            processed: 0,
            steps: 0,
            limits: *limits,
        })
    }

    pub fn from_seeds(algebra: &'a Algebra, seeds: &TupleSet, limits: &Limits) -> Result<Self> {
        if seeds.universe() != algebra.universe() {
            return Err(Error::UniverseMismatch {
                expected: algebra.universe(),
                found: seeds.universe(),
            });
        }
        let mut sub = Subpower::new(algebra, seeds.arity(), limits)?;
        for code in seeds.codes() {
            sub.add(code);
        }
        Ok(sub)
    }

    /// Adds an encoded tuple as a seed. The set is not closed again until
    /// the next [`saturate`](Self::saturate).
    pub fn add(&mut self, code: u64) -> bool {
        if !self.set.insert(code) {
            return false;
        }
        let start = self.rows.len();
        self.rows.resize(start + self.n, 0);
        self.set.codec().decode_into(code, &mut self.rows[start..]);
        true
    }

    pub fn contains(&self, code: u64) -> bool {
        self.set.contains(code)
    }

    pub fn len(&self) -> u64 {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.set.is_full()
    }

    /// Combination applications performed so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn set(&self) -> &TupleSet {
        &self.set
    }

    pub fn into_set(self) -> TupleSet {
        self.set
    }

    /// Runs the worklist until every member has been processed.
    pub fn saturate(&mut self) -> Result<()> {
        let algebra = self.algebra;
        let n = self.n;
        let max_arity = algebra.max_arity();
        let mut prefix = vec![0usize; max_arity.max(1) * n];
        let mut scratch = vec![0 as Element; n];
        while self.processed < self.member_count() {
            if self.set.is_full() {
                self.processed = self.member_count();
                break;
            }
            let p = self.processed;
            for op in algebra.operations() {
                let s = op.arity();
                for q in 0..s {
                    // Arguments before position q range over 0..p, which is empty for p = 0.
                    if q > 0 && p == 0 {
                        continue;
                    }
                    if self.descend(op, q, p, 0, &mut prefix, &mut scratch)? {
                        self.processed = self.member_count();
                        return Ok(());
                    }
                }
            }
            self.processed += 1;
        }
        Ok(())
    }

    fn member_count(&self) -> usize {
        self.rows.len() / self.n.max(1)
    }

    // Enumerates argument lists with member p at position q, members < p
    // before it and members <= p after it. Returns true once the set is full.
    fn descend(
        &mut self,
        op: &OperationTable,
        q: usize,
        p: usize,
        level: usize,
        prefix: &mut [usize],
        scratch: &mut [Element],
    ) -> Result<bool> {
        let n = self.n;
        let k = self.algebra.universe();
        let s = op.arity();
        let (lo, hi) = match level.cmp(&q) {
            std::cmp::Ordering::Less => (0, p),
            std::cmp::Ordering::Equal => (p, p + 1),
            std::cmp::Ordering::Greater => (0, p + 1),
        };
        let table = op.table();
        for i in lo..hi {
            let row = i * n;
            if level + 1 < s {
                for c in 0..n {
                    prefix[(level + 1) * n + c] = prefix[level * n + c] * k + self.rows[row + c] as usize;
                }
                if self.descend(op, q, p, level + 1, prefix, scratch)? {
                    return Ok(true);
                }
            } else {
                self.steps += 1;
                if self.steps > self.limits.closure_steps {
                    return Err(Error::budget(
                        format!("closure over {k}^{n} tuples"),
                        self.limits.closure_steps,
                    ));
                }
                let mut code = 0u64;
                for c in 0..n {
                    let idx = if s == 1 { 0 } else { prefix[level * n + c] * k };
                    let v = table[idx + self.rows[row + c] as usize];
                    scratch[c] = v;
                    code = code * k as u64 + v as u64;
                }
                if self.set.insert(code) {
                    self.rows.extend_from_slice(scratch);
                    if self.set.is_full() {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }
}

/// `<seeds>` under `algebra` with default limits.
pub fn closure(algebra: &Algebra, seeds: &TupleSet) -> Result<TupleSet> {
    closure_with(algebra, seeds, &Limits::default())
}

pub fn closure_with(algebra: &Algebra, seeds: &TupleSet, limits: &Limits) -> Result<TupleSet> {
    let mut sub = Subpower::from_seeds(algebra, seeds, limits)?;
    sub.saturate()?;
    Ok(sub.into_set())
}

pub fn is_full(ts: &TupleSet) -> bool {
    ts.is_full()
}

/// `D_{A,m}`: tuples of length `2m` with at least one equal pair
/// `(a_{2i-1}, a_{2i})`.
pub fn d_tuples(k: usize, m: usize, limits: &Limits) -> Result<TupleSet> {
    if m == 0 {
        return Err(Error::precondition("D_{A,m} needs m >= 1"));
    }
    TupleSet::from_predicate(k, 2 * m, limits, |t| t.chunks(2).any(|p| p[0] == p[1]))
}

/// Applies `op` coordinatewise to `op.arity()` tuples of equal length.
pub fn apply_pointwise(op: &OperationTable, tuples: &[&[Element]]) -> Result<Vec<Element>> {
    if tuples.len() != op.arity() {
        return Err(Error::ArityMismatch {
            expected: op.arity(),
            found: tuples.len(),
        });
    }
    let n = tuples.first().map_or(0, |t| t.len());
    if let Some(bad) = tuples.iter().find(|t| t.len() != n) {
        return Err(Error::ArityMismatch {
            expected: n,
            found: bad.len(),
        });
    }
    let mut args = vec![0 as Element; op.arity()];
    (0..n)
        .map(|i| {
            for (a, t) in args.iter_mut().zip(tuples) {
                *a = t[i];
            }
            op.evaluate(&args)
        })
        .collect()
}

/// Encodes a tuple for a given `(k, n)`; convenience for callers seeding a
/// [`Subpower`] directly.
pub fn encode(k: usize, tuple: &[Element]) -> u64 {
    Codec::new(k, tuple.len()).encode(tuple)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn set(k: usize, n: usize, tuples: &[&[Element]]) -> TupleSet {
        TupleSet::from_tuples(k, n, tuples.iter().copied()).unwrap()
    }

    #[test]
    fn projections_leave_seeds_unchanged() {
        let alg = Algebra::projections_only(2);
        let seeds = set(2, 3, &[&[0, 1, 0], &[1, 1, 0]]);
        assert_eq!(closure(&alg, &seeds).unwrap(), seeds);
    }

    #[test]
    fn xor3_reaches_missing_corner() {
        let seeds = set(2, 2, &[&[0, 0], &[0, 1], &[1, 0]]);
        let c = closure(&corpus::xor3(), &seeds).unwrap();
        assert_eq!(c.len(), 4);
        assert!(is_full(&c));
    }

    #[test]
    fn singleton_under_idempotent_algebra() {
        let seeds = set(2, 3, &[&[1, 0, 1]]);
        for alg in [corpus::min(), corpus::majority(), corpus::xor3()] {
            let c = closure(&alg, &seeds).unwrap();
            assert!(c.contains_tuple(&[1, 0, 1]));
            assert_eq!(c.len(), 1);
        }
    }

    #[test]
    fn unary_operation_closure() {
        let neg = OperationTable::from_fn("neg", 2, 1, |a| 1 - a[0]);
        let alg = Algebra::new(2, vec![neg]).unwrap();
        let c = closure(&alg, &set(2, 2, &[&[0, 1]])).unwrap();
        assert_eq!(c.export(), "0 1\n1 0\n");
    }

    #[test]
    fn empty_seeds_and_universe_mismatch() {
        let alg = corpus::min();
        let empty = TupleSet::empty(2, 3).unwrap();
        assert!(closure(&alg, &empty).unwrap().is_empty());
        let wrong = TupleSet::empty(3, 2).unwrap();
        assert_eq!(
            closure(&alg, &wrong),
            Err(Error::UniverseMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn step_budget_aborts() {
        let limits = Limits {
            closure_steps: 5,
            ..Limits::default()
        };
        let d = d_tuples(2, 2, &limits).unwrap();
        // A full seed set needs no work at all.
        let full = TupleSet::full(3, 2, &limits).unwrap();
        assert!(closure_with(&corpus::egp_f(), &full, &limits).unwrap().is_full());
        assert!(matches!(
            closure_with(&corpus::min(), &d, &limits),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn d_tuples_sizes() {
        let l = Limits::default();
        let d = d_tuples(2, 1, &l).unwrap();
        assert_eq!(d.export(), "0 0\n1 1\n");
        assert!(!is_full(&d));
        assert_eq!(d_tuples(2, 2, &l).unwrap().len(), 12);
        assert_eq!(d_tuples(3, 2, &l).unwrap().len(), 45);
        assert!(d_tuples(2, 0, &l).is_err());
    }

    #[test]
    fn d_tuples_count_formula() {
        let l = Limits::default();
        for k in 1..=4usize {
            for m in 1..=3usize {
                let expected = (k as u64).pow(2 * m as u32) - ((k * k - k) as u64).pow(m as u32);
                assert_eq!(d_tuples(k, m, &l).unwrap().len(), expected, "k={k} m={m}");
            }
        }
    }

    #[test]
    fn pointwise_application() {
        let xor3 = corpus::xor3();
        let op = &xor3.operations()[0];
        assert_eq!(apply_pointwise(op, &[&[0, 0], &[0, 1], &[1, 0]]).unwrap(), vec![1, 1]);
        let min = corpus::min();
        let op = &min.operations()[0];
        assert_eq!(apply_pointwise(op, &[&[0, 1], &[1, 1]]).unwrap(), vec![0, 1]);
        assert_eq!(apply_pointwise(op, &[&[1, 0, 1], &[1, 0, 1]]).unwrap(), vec![1, 0, 1]);
        assert!(matches!(
            apply_pointwise(op, &[&[0, 1]]),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            apply_pointwise(op, &[&[0, 1], &[1]]),
            Err(Error::ArityMismatch { .. })
        ));
    }
}
