//! Constructive objects behind the dichotomy: nice relations, the σ
//! relation of arity `2n+k`, the relations σ_n for a subset pair,
//! counterexample matrices for non-projective operations, the counting
//! lower bound, and a bounded search for blockers.
//!
//! Ties are always broken towards the least tuple or element encoding, so
//! every witness is reproducible bit for bit.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};

use crate::algebra::{increment, Algebra, Element, OperationTable};
use crate::closure::closure_with;
use crate::criteria::{count_switches, fmt_set, is_ab_projective, switch_tuples, SubsetPair};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::tuples::{join, space_size, TupleSet};

/// A relation of arity `m` obtained from a stored relation by identifying
/// variables: `(c_1, ..., c_m)` is a member iff the tuple whose coordinate
/// `p` is `c[positions[p]]` belongs to `base`.
///
/// `excluded` is a certified non-member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceRelation {
    m: usize,
    positions: Vec<usize>,
    base: TupleSet,
    excluded: Vec<Element>,
}

impl NiceRelation {
    /// Wraps a relation of arity `m` directly, with identity positions.
    pub fn from_relation(relation: TupleSet, excluded: Vec<Element>) -> Result<Self> {
        let m = relation.arity();
        NiceRelation::with_positions(relation, (0..m).collect(), m, excluded)
    }

    /// Collapses `base` into blocks: variable `i` fills `block_lengths[i]`
    /// consecutive coordinates.
    pub fn from_blocks(base: TupleSet, block_lengths: &[usize], excluded: Vec<Element>) -> Result<Self> {
        let positions: Vec<usize> = block_lengths
            .iter()
            .enumerate()
            .flat_map(|(i, &len)| std::iter::repeat_n(i, len))
            .collect();
        NiceRelation::with_positions(base, positions, block_lengths.len(), excluded)
    }

    fn with_positions(base: TupleSet, positions: Vec<usize>, m: usize, excluded: Vec<Element>) -> Result<Self> {
        if positions.len() != base.arity() || positions.iter().any(|&p| p >= m) {
            return Err(Error::precondition("variable identification does not match the base arity"));
        }
        if excluded.len() != m {
            return Err(Error::ArityMismatch {
                expected: m,
                found: excluded.len(),
            });
        }
        let rel = NiceRelation {
            m,
            positions,
            base,
            excluded,
        };
        if rel.contains(&rel.excluded) {
            return Err(Error::precondition("the excluded tuple belongs to the relation"));
        }
        Ok(rel)
    }

    pub fn arity(&self) -> usize {
        self.m
    }

    pub fn universe(&self) -> usize {
        self.base.universe()
    }

    pub fn excluded(&self) -> &[Element] {
        &self.excluded
    }

    pub fn base(&self) -> &TupleSet {
        &self.base
    }

    /// How many base coordinates each variable occupies.
    pub fn block_lengths(&self) -> Vec<usize> {
        let mut lens = vec![0; self.m];
        for &p in &self.positions {
            lens[p] += 1;
        }
        lens
    }

    pub fn contains(&self, c: &[Element]) -> bool {
        if c.len() != self.m {
            return false;
        }
        let expanded: Vec<Element> = self.positions.iter().map(|&p| c[p]).collect();
        self.base.contains_tuple(&expanded)
    }

    /// The relation as an explicit subset of `A^m`.
    pub fn materialize(&self, limits: &Limits) -> Result<TupleSet> {
        TupleSet::from_predicate(self.universe(), self.m, limits, |c| self.contains(c))
    }

    /// Whether `D_{A,m/2}` is contained in the relation (`m` even).
    pub fn contains_d(&self, limits: &Limits) -> Result<bool> {
        if !self.m.is_multiple_of(2) {
            return Ok(false);
        }
        let mut ok = true;
        TupleSet::from_predicate(self.universe(), self.m, limits, |c| {
            if ok && c.chunks(2).any(|p| p[0] == p[1]) && !self.contains(c) {
                ok = false;
            }
            false
        })?;
        Ok(ok)
    }
}

impl fmt::Display for NiceRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lens: Vec<String> = self.block_lengths().iter().map(|l| l.to_string()).collect();
        writeln!(f, "kind: nice")?;
        writeln!(f, "arity: {}", self.m)?;
        writeln!(f, "base_arity: {}", self.base.arity())?;
        writeln!(f, "block_lengths: {}", lens.join(" "))?;
        writeln!(f, "excluded: {}", join(&self.excluded))
    }
}

/// The nice relation extracted from a failure of `r`-switchability at `n`.
///
/// `σ = <tuples of A^n with at most r switches>`; the non-member of σ with
/// fewest switches (least such tuple on ties) is split into its constant
/// blocks, and σ restricted to block-constant tuples is the result.
pub fn nice_relation_from_nonswitchability(
    algebra: &Algebra,
    r: usize,
    n: usize,
    limits: &Limits,
) -> Result<NiceRelation> {
    let k = algebra.universe();
    let sigma = closure_with(algebra, &switch_tuples(k, n, r, limits)?, limits)?;
    if sigma.is_full() {
        return Err(Error::precondition(format!(
            "the algebra is {r}-switchable at n = {n}"
        )));
    }
    let mut best: Option<(usize, Vec<Element>)> = None;
    let mut digits = vec![0 as Element; n];
    for code in 0..sigma.space() {
        if !sigma.contains(code) {
            let s = count_switches(&digits);
            if best.as_ref().is_none_or(|(b, _)| s < *b) {
                best = Some((s, digits.clone()));
            }
        }
        increment(&mut digits, k);
    }
    let (switches, tuple) = best.expect("σ is not full");

    let mut values = Vec::new();
    let mut lengths: Vec<usize> = Vec::new();
    for &v in &tuple {
        if values.last() == Some(&v) {
            *lengths.last_mut().expect("nonempty") += 1;
        } else {
            values.push(v);
            lengths.push(1);
        }
    }
    let m = switches + 1;
    debug_assert_eq!(values.len(), m);
    if m < r + 2 {
        return Err(Error::precondition(format!(
            "minimal excluded tuple has arity {m} after collapsing, below r + 2 = {}",
            r + 2
        )));
    }
    NiceRelation::from_blocks(sigma, &lengths, values)
}

/// Checks both defining clauses of niceness by enumerating `A^m`: the
/// relation is not full, and every tuple with two equal neighbours belongs
/// to it. Also rejects a relation whose recorded excluded tuple is a member.
pub fn verify_nice(rel: &NiceRelation, limits: &Limits) -> Result<bool> {
    if rel.contains(rel.excluded()) {
        return Ok(false);
    }
    let mut missing = false;
    let mut clause_ok = true;
    TupleSet::from_predicate(rel.universe(), rel.arity(), limits, |c| {
        if clause_ok {
            let member = rel.contains(c);
            missing |= !member;
            if !member && c.windows(2).any(|w| w[0] == w[1]) {
                clause_ok = false;
            }
        }
        false
    })?;
    Ok(missing && clause_ok)
}

/// Makes the arity even by identifying two odd-position variables that
/// carry the same value in the excluded tuple (least first position, then
/// least second).
///
/// The result excludes the shortened tuple and contains `D_{A,m'/2}`.
/// Niceness in the adjacent-pair sense is not preserved in general: the
/// variables on either side of the dropped one become neighbours.
pub fn evenize_nice(rel: &NiceRelation) -> Result<NiceRelation> {
    let m = rel.arity();
    if m.is_multiple_of(2) {
        return Ok(rel.clone());
    }
    let a = rel.excluded();
    // Zero-based odd positions (1-based 1, 3, 5, ...) are the even indices.
    let repeat = (0..m).step_by(2).find_map(|p| {
        (p + 2..m)
            .step_by(2)
            .find(|&q| a[q] == a[p])
            .map(|q| (p, q))
    });
    let Some((p, q)) = repeat else {
        return Err(Error::precondition(format!(
            "arity {m} is odd and no value repeats among odd positions of the excluded tuple"
        )));
    };
    let positions: Vec<usize> = rel
        .positions
        .iter()
        .map(|&v| match v.cmp(&q) {
            std::cmp::Ordering::Less => v,
            std::cmp::Ordering::Equal => p,
            std::cmp::Ordering::Greater => v - 1,
        })
        .collect();
    let mut excluded = a.to_vec();
    excluded.remove(q);
    NiceRelation::with_positions(rel.base.clone(), positions, m - 1, excluded)
}

/// The relation σ of arity `2n+k`, with variables `x_1..x_n, y_1..y_n,
/// z_0..z_{k-1}`, built from a nice relation of large arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaWitness {
    pub n: usize,
    pub k: usize,
    pub relation: TupleSet,
    /// `(a, ..., a, b, ..., b, 0, 1, ..., k-1)`.
    pub excluded: Vec<Element>,
    pub pair_used: (Element, Element),
    pub multiplicity: usize,
}

impl SigmaWitness {
    pub fn arity(&self) -> usize {
        2 * self.n + self.k
    }
}

impl fmt::Display for SigmaWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind: sigma")?;
        writeln!(f, "arity: {}", self.arity())?;
        writeln!(f, "pair: {} {}", self.pair_used.0, self.pair_used.1)?;
        writeln!(f, "multiplicity: {}", self.multiplicity)?;
        writeln!(f, "excluded: {}", join(&self.excluded))?;
        writeln!(f, "members: {}", self.relation.len())
    }
}

/// Builds σ from a nice relation `rel` of arity `m > 2k²n²`.
///
/// The excluded tuple is split into consecutive pairs (a trailing element
/// is dropped for odd `m`) and the most frequent pair `(a, b)` is taken,
/// least on ties. Its `l >= n²` occurrences become `(x_j, y_j)` slots of
/// an intermediate relation; every other coordinate `i` becomes
/// `z_{a_i}`. The first `n²` slots then receive `(x_i, y_j)` in
/// lexicographic `(i, j)` order and any further slots `(x_1, y_1)`.
pub fn lemma2_sigma(rel: &NiceRelation, n: usize, limits: &Limits) -> Result<SigmaWitness> {
    let k = rel.universe();
    let m = rel.arity();
    if n == 0 {
        return Err(Error::precondition("σ needs n >= 1"));
    }
    let bound = 2 * k * k * n * n;
    if m <= bound {
        return Err(Error::precondition(format!(
            "relation arity {m} must exceed 2k²n² = {bound}"
        )));
    }
    if !verify_nice(rel, limits)? {
        return Err(Error::precondition("relation is not nice"));
    }
    let a = rel.excluded();
    let starts: Vec<usize> = (0..m.saturating_sub(1)).step_by(2).collect();
    let mut counts = vec![0usize; k * k];
    for &i in &starts {
        counts[a[i] as usize * k + a[i + 1] as usize] += 1;
    }
    // max_by_key keeps the last maximum; scan in reverse to prefer the least pair.
    let (best, &l) = counts
        .iter()
        .enumerate()
        .rev()
        .max_by_key(|&(_, c)| c)
        .expect("k >= 1");
    let (pa, pb) = ((best / k) as Element, (best % k) as Element);
    if l < n * n {
        return Err(Error::precondition(format!(
            "most popular pair occurs {l} times, fewer than n² = {}",
            n * n
        )));
    }

    // Variable layout of σ: x_i -> i, y_j -> n + j, z_c -> 2n + c.
    let mut map = vec![usize::MAX; m];
    let mut slot = 0;
    for &i in &starts {
        if a[i] == pa && a[i + 1] == pb {
            let (xi, yj) = if slot < n * n { (slot / n, slot % n) } else { (0, 0) };
            map[i] = xi;
            map[i + 1] = n + yj;
            slot += 1;
        }
    }
    for (i, v) in map.iter_mut().enumerate() {
        if *v == usize::MAX {
            *v = 2 * n + a[i] as usize;
        }
    }

    let arity = 2 * n + k;
    let mut scratch = vec![0 as Element; m];
    let relation = TupleSet::from_predicate(k, arity, limits, |u| {
        for (t, &v) in scratch.iter_mut().zip(&map) {
            *t = u[v];
        }
        rel.contains(&scratch)
    })?;
    let mut excluded = vec![pa; n];
    excluded.extend(std::iter::repeat_n(pb, n));
    excluded.extend(0..k as Element);
    if relation.contains_tuple(&excluded) {
        return Err(Error::precondition("constructed σ contains its excluded tuple"));
    }
    Ok(SigmaWitness {
        n,
        k,
        relation,
        excluded,
        pair_used: (pa, pb),
        multiplicity: l,
    })
}

/// Exhaustively checks the two properties σ must have: the excluded tuple
/// is outside, and every tuple with some `c_i = d_j` is inside.
pub fn verify_sigma(w: &SigmaWitness) -> bool {
    if w.relation.contains_tuple(&w.excluded) || w.relation.arity() != w.arity() {
        return false;
    }
    let n = w.n;
    w.relation.space() <= Limits::DEFAULT_ENUMERATION && {
        let mut digits = vec![0 as Element; w.arity()];
        let mut ok = true;
        for code in 0..w.relation.space() {
            let (c, d) = (&digits[..n], &digits[n..2 * n]);
            if c.iter().any(|x| d.contains(x)) && !w.relation.contains(code) {
                ok = false;
                break;
            }
            increment(&mut digits, w.k);
        }
        ok
    }
}

/// `σ_n` for a pair: tuples of length `2n` in which some pair
/// `(x_{2i-1}, x_{2i})` lies in `(α×α) ∪ (β×β)`.
pub fn sigma_n_relation(pair: &SubsetPair, n: usize, limits: &Limits) -> Result<TupleSet> {
    if n == 0 {
        return Err(Error::precondition("σ_n needs n >= 1"));
    }
    TupleSet::from_predicate(pair.universe(), 2 * n, limits, |t| {
        t.chunks(2).any(|p| pair.rho(p[0], p[1]))
    })
}

/// Brute-force check that `op` maps every choice of `arity` members of
/// `rel`, applied coordinatewise, back into `rel`.
pub fn preserves_relation(op: &OperationTable, rel: &TupleSet, limits: &Limits) -> Result<bool> {
    if op.universe() != rel.universe() {
        return Err(Error::UniverseMismatch {
            expected: op.universe(),
            found: rel.universe(),
        });
    }
    let s = op.arity();
    let members: Vec<Vec<Element>> = rel.tuples().collect();
    if members.is_empty() {
        return Ok(true);
    }
    let choices = (members.len() as u64).checked_pow(s as u32);
    if choices.is_none_or(|c| c > limits.closure_steps) {
        return Err(Error::budget(
            format!("{}^{s} member combinations", members.len()),
            limits.closure_steps,
        ));
    }
    let n = rel.arity();
    let mut idx = vec![0usize; s];
    let mut args = vec![0 as Element; s];
    let mut image = vec![0 as Element; n];
    loop {
        for (c, out) in image.iter_mut().enumerate() {
            for (a, &i) in args.iter_mut().zip(&idx) {
                *a = members[i][c];
            }
            *out = op.eval(&args);
        }
        if !rel.contains_tuple(&image) {
            return Ok(false);
        }
        // Next index combination.
        let mut level = s;
        loop {
            if level == 0 {
                return Ok(true);
            }
            level -= 1;
            idx[level] += 1;
            if idx[level] < members.len() {
                break;
            }
            idx[level] = 0;
        }
    }
}

/// The `2s × s` matrix showing that a non-αβ-projective idempotent
/// operation of arity `s` fails to preserve `σ_s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleMatrix {
    pub op: String,
    pub pair: SubsetPair,
    /// Rows `2j` and `2j+1` are the violating argument tuple for coordinate
    /// `j` and the constant row `c_j`.
    pub rows: Vec<Vec<Element>>,
    /// The operation applied to each row.
    pub image: Vec<Element>,
}

impl CounterexampleMatrix {
    pub fn arity(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    /// Column `q` read top to bottom; these are the arguments, members of σ_s.
    pub fn columns(&self) -> Vec<Vec<Element>> {
        (0..self.arity())
            .map(|q| self.rows.iter().map(|r| r[q]).collect())
            .collect()
    }
}

impl fmt::Display for CounterexampleMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind: counterexample")?;
        writeln!(f, "op: {}", self.op)?;
        writeln!(f, "alpha: {}", fmt_set(&self.pair.alpha()))?;
        writeln!(f, "beta: {}", fmt_set(&self.pair.beta()))?;
        writeln!(f, "matrix:")?;
        for row in &self.rows {
            writeln!(f, "{}", join(row))?;
        }
        writeln!(f, "image: {}", join(&self.image))
    }
}

pub fn projectivity_counterexample(op: &OperationTable, pair: &SubsetPair) -> Result<CounterexampleMatrix> {
    if let Some(j) = is_ab_projective(op, pair) {
        return Err(Error::precondition(format!(
            "operation `{}` is αβ-projective at coordinate {} for {pair}",
            op.name(),
            j + 1
        )));
    }
    if let Some((element, value)) = op.idempotence_failure() {
        return Err(Error::NotIdempotent {
            op: op.name().to_string(),
            element,
            value,
        });
    }
    let k = op.universe();
    let s = op.arity();
    let [alpha, beta] = pair.sides();
    let mut rows = Vec::with_capacity(2 * s);
    for j in 0..s {
        let mut args = vec![0 as Element; s];
        let mut found = None;
        for &value in op.table() {
            let (a, v) = (1u32 << args[j], 1u32 << value);
            if let Some(side) = [alpha, beta].into_iter().find(|&side| side & a != 0 && side & v == 0) {
                found = Some((args.clone(), side));
                break;
            }
            increment(&mut args, k);
        }
        let (violating, side) = found.expect("not projective at any coordinate");
        let other = if side == alpha { beta } else { alpha };
        let c = (side & !other).trailing_zeros() as Element;
        rows.push(violating);
        rows.push(vec![c; s]);
    }
    let image = rows.iter().map(|r| op.eval(r)).collect();
    Ok(CounterexampleMatrix {
        op: op.name().to_string(),
        pair: *pair,
        rows,
        image,
    })
}

/// `(2n)! / ((n!)²·2^k) = C(2n, n) / 2^k`, the lower bound on generating
/// sets of `A^{2n+k}` from the permutation count.
pub fn egp_lower_bound(n: u32, k: u32) -> BigRational {
    let mut binom = BigInt::one();
    for i in 0..n {
        binom = binom * BigInt::from(2 * n - i) / BigInt::from(i + 1);
    }
    BigRational::new(binom, BigInt::from(2).pow(k))
}

/// `2^e` as an exact rational; `e` may be negative.
pub fn power_of_two(e: i64) -> BigRational {
    let p = BigInt::from(2).pow(e.unsigned_abs());
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// A bounded candidate for a blocker set containing `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockerCandidate {
    pub elements: Vec<Element>,
    /// Largest power checked.
    pub n_max: usize,
}

impl fmt::Display for BlockerCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind: blocker (candidate)")?;
        writeln!(f, "checked: n=1..{}", self.n_max)?;
        writeln!(f, "C: {}", fmt_set(&self.elements))
    }
}

/// Grows `C ⊇ B` greedily, keeping `<A^n ∖ (A∖C)^n> ≠ A^n` for every
/// `n <= n_max`. Returns `None` if `B` itself fails that test. The answer
/// is only a candidate: no finite `n_max` establishes the condition for
/// every `n`.
pub fn find_blocker_bounded(
    algebra: &Algebra,
    b: &[Element],
    n_max: usize,
    limits: &Limits,
) -> Result<Option<BlockerCandidate>> {
    if let Some((op, element, value)) = algebra.idempotence_failure() {
        return Err(Error::NotIdempotent {
            op: op.name().to_string(),
            element,
            value,
        });
    }
    let k = algebra.universe();
    if let Some(&bad) = b.iter().find(|&&e| e as usize >= k) {
        return Err(Error::ElementOutOfRange { value: bad as usize, k });
    }
    let mut member = vec![false; k];
    for &e in b {
        member[e as usize] = true;
    }
    let size = member.iter().filter(|&&x| x).count();
    if size == 0 || size == k {
        return Err(Error::precondition("B must be a nonempty proper subset of A"));
    }
    if n_max == 0 {
        return Err(Error::precondition("n_max must be at least 1"));
    }
    let blocks = |set: &[bool]| -> Result<bool> {
        for n in 1..=n_max {
            let seeds = TupleSet::from_predicate(k, n, limits, |t| t.iter().any(|&x| set[x as usize]))?;
            if closure_with(algebra, &seeds, limits)?.is_full() {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if space_size(k, n_max).is_none_or(|s| s > limits.enumeration) {
        return Err(Error::budget(format!("enumerating {k}^{n_max} tuples"), limits.enumeration));
    }
    if !blocks(&member)? {
        return Ok(None);
    }
    for e in 0..k {
        if !member[e] {
            member[e] = true;
            if !blocks(&member)? {
                member[e] = false;
            }
        }
    }
    Ok(Some(BlockerCandidate {
        elements: (0..k as Element).filter(|&e| member[e as usize]).collect(),
        n_max,
    }))
}
