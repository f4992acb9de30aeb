//! Deciders for the PGP/EGP dichotomy.
//!
//! For idempotent algebras the question is settled exactly: the algebra has
//! EGP iff some pair of proper subsets `α ∪ β = A` makes every basic
//! operation αβ-projective. Relation preservation is closed under
//! composition, so checking basic operations is enough for the whole clone.
//! For arbitrary algebras only bounded evidence is available: fullness of
//! `<D_{A,m}>` or of the subpower generated by tuples with few switches
//! certifies PGP, while non-fullness at the tested bounds proves nothing.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{increment, Algebra, Element, OperationTable};
use crate::closure::{closure_with, d_tuples, Subpower};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::tuples::{space_size, TupleSet};

/// Largest universe for which subset pairs are enumerated.
pub const MAX_PAIR_UNIVERSE: usize = 16;

/// Two proper subsets `α, β ⊊ A` with `α ∪ β = A`, stored as bitmasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetPair {
    alpha: u32,
    beta: u32,
    k: usize,
}

impl SubsetPair {
    pub fn new(k: usize, alpha: u32, beta: u32) -> Result<Self> {
        if k == 0 || k > MAX_PAIR_UNIVERSE {
            return Err(Error::precondition(format!(
                "subset pairs need 1 <= k <= {MAX_PAIR_UNIVERSE}, got k = {k}"
            )));
        }
        let full = full_mask(k);
        if (alpha | beta) & !full != 0 {
            return Err(Error::precondition("subset mentions elements outside the universe"));
        }
        if alpha == full || beta == full {
            return Err(Error::precondition("α and β must be proper subsets"));
        }
        if alpha | beta != full {
            return Err(Error::precondition("α ∪ β must cover the universe"));
        }
        Ok(SubsetPair { alpha, beta, k })
    }

    pub fn from_elements(k: usize, alpha: &[Element], beta: &[Element]) -> Result<Self> {
        let mask = |xs: &[Element]| -> Result<u32> {
            xs.iter().try_fold(0u32, |m, &x| {
                if (x as usize) < k && (x as usize) < 32 {
                    Ok(m | 1 << x)
                } else {
                    Err(Error::ElementOutOfRange { value: x as usize, k })
                }
            })
        };
        SubsetPair::new(k, mask(alpha)?, mask(beta)?)
    }

    /// All unordered pairs `{α, β}` over a `k`-element universe, each listed
    /// once with `mask(α) <= mask(β)`, in increasing `(mask(α), mask(β))`.
    pub fn enumerate(k: usize) -> Result<Vec<SubsetPair>> {
        if k == 0 || k > MAX_PAIR_UNIVERSE {
            return Err(Error::budget(
                format!("enumerating subset pairs over {k} elements"),
                MAX_PAIR_UNIVERSE as u64,
            ));
        }
        let full = full_mask(k);
        let mut out = Vec::new();
        for alpha in 1..full {
            let rest = full & !alpha;
            // β = rest ∪ (some subset of α), proper.
            let mut sub = alpha;
            loop {
                let beta = rest | sub;
                if beta != full && alpha <= beta {
                    out.push(SubsetPair { alpha, beta, k });
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & alpha;
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn universe(&self) -> usize {
        self.k
    }

    pub fn alpha_mask(&self) -> u32 {
        self.alpha
    }

    pub fn beta_mask(&self) -> u32 {
        self.beta
    }

    pub fn alpha(&self) -> Vec<Element> {
        elements(self.alpha)
    }

    pub fn beta(&self) -> Vec<Element> {
        elements(self.beta)
    }

    /// The two sides as masks, `α` first.
    pub fn sides(&self) -> [u32; 2] {
        [self.alpha, self.beta]
    }

    /// `(x, y) ∈ (α×α) ∪ (β×β)`.
    #[inline]
    pub fn rho(&self, x: Element, y: Element) -> bool {
        let both = (1u32 << x) | (1u32 << y);
        self.alpha & both == both || self.beta & both == both
    }

    /// The pair with every element renamed by `perm`.
    pub fn relabel(&self, perm: &[Element]) -> SubsetPair {
        let map = |m: u32| elements(m).iter().fold(0u32, |acc, &e| acc | 1 << perm[e as usize]);
        let (a, b) = (map(self.alpha), map(self.beta));
        let (alpha, beta) = if a <= b { (a, b) } else { (b, a) };
        SubsetPair { alpha, beta, k: self.k }
    }
}

impl fmt::Display for SubsetPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha={} beta={}", fmt_set(&self.alpha()), fmt_set(&self.beta()))
    }
}

pub(crate) fn fmt_set(xs: &[Element]) -> String {
    let inner: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", inner.join(", "))
}

fn full_mask(k: usize) -> u32 {
    if k >= 32 {
        u32::MAX
    } else {
        (1u32 << k) - 1
    }
}

fn elements(mask: u32) -> Vec<Element> {
    (0..32u8).filter(|&e| mask & (1 << e) != 0).collect()
}

/// Positions `i` with `t[i] != t[i+1]`.
pub fn count_switches(t: &[Element]) -> usize {
    t.windows(2).filter(|w| w[0] != w[1]).count()
}

/// All tuples of `A^n` with at most `r` switches.
pub fn switch_tuples(k: usize, n: usize, r: usize, limits: &Limits) -> Result<TupleSet> {
    if n == 0 {
        return Err(Error::precondition("switch tuples need n >= 1"));
    }
    TupleSet::from_predicate(k, n, limits, |t| count_switches(t) <= r)
}

/// `Σ_{i=0}^{min(r, n-1)} C(n-1, i)·k·(k-1)^i`, the number of tuples of
/// `A^n` with at most `r` switches.
pub fn count_switch_tuples(k: usize, n: usize, r: usize) -> BigUint {
    if n == 0 {
        return BigUint::zero();
    }
    let mut total = BigUint::zero();
    let mut binom = BigUint::one();
    let mut power = BigUint::from(k);
    for i in 0..=r.min(n - 1) {
        if i > 0 {
            binom = binom * BigUint::from(n - i) / BigUint::from(i);
            power *= BigUint::from(k.saturating_sub(1));
        }
        total += &binom * &power;
    }
    total
}

/// Whether `A^n` is generated by its tuples with at most `r` switches.
pub fn is_r_switchable_at(algebra: &Algebra, r: usize, n: usize, limits: &Limits) -> Result<bool> {
    let seeds = switch_tuples(algebra.universe(), n, r, limits)?;
    Ok(closure_with(algebra, &seeds, limits)?.is_full())
}

/// Whether `<D_{A,m}> = A^{2m}`. True is evidence for PGP; false is only
/// consistent with EGP.
pub fn check_d_generation(algebra: &Algebra, m: usize, limits: &Limits) -> Result<bool> {
    let d = d_tuples(algebra.universe(), m, limits)?;
    Ok(closure_with(algebra, &d, limits)?.is_full())
}

/// The least zero-based coordinate `j` witnessing that `op` is
/// αβ-projective, i.e. `a_j ∈ S ⇒ op(a) ∈ S` for both `S = α` and `S = β`.
pub fn is_ab_projective(op: &OperationTable, pair: &SubsetPair) -> Option<usize> {
    (0..op.arity()).find(|&j| projective_at(op, pair, j))
}

fn projective_at(op: &OperationTable, pair: &SubsetPair, j: usize) -> bool {
    let k = op.universe();
    let mut args = vec![0 as Element; op.arity()];
    for &value in op.table() {
        let (a, v) = (1u32 << args[j], 1u32 << value);
        for s in pair.sides() {
            if s & a != 0 && s & v == 0 {
                return false;
            }
        }
        increment(&mut args, k);
    }
    true
}

/// Bounded evidence attached to a PGP verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PgpEvidence {
    /// `A^n` is generated by tuples with at most `r` switches for every
    /// tested `n` in `n_min..=n_max`.
    Switchable { r: usize, n_min: usize, n_max: usize },
    /// `<D_{A,m}> = A^{2m}`.
    DGeneration { m: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Egp { witness: SubsetPair },
    Pgp { evidence: Option<PgpEvidence> },
}

/// A PGP/EGP verdict together with what backs it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgpDecision {
    pub verdict: Verdict,
    /// For EGP verdicts, `(operation name, zero-based projective coordinate)`.
    pub coordinates: Vec<(String, usize)>,
}

impl EgpDecision {
    pub fn is_egp(&self) -> bool {
        matches!(self.verdict, Verdict::Egp { .. })
    }

    pub fn witness(&self) -> Option<&SubsetPair> {
        match &self.verdict {
            Verdict::Egp { witness } => Some(witness),
            Verdict::Pgp { .. } => None,
        }
    }

    /// Re-checks the record against the algebra: an EGP witness must make
    /// every operation αβ-projective, a d-generation record must be full and
    /// a switchability record must hold at every listed `n`.
    pub fn verify(&self, algebra: &Algebra, limits: &Limits) -> Result<bool> {
        match &self.verdict {
            Verdict::Egp { witness } => Ok(algebra
                .operations()
                .iter()
                .all(|op| is_ab_projective(op, witness).is_some())),
            Verdict::Pgp { evidence: None } => Ok(true),
            Verdict::Pgp {
                evidence: Some(PgpEvidence::DGeneration { m }),
            } => check_d_generation(algebra, *m, limits),
            Verdict::Pgp {
                evidence: Some(PgpEvidence::Switchable { r, n_min, n_max }),
            } => {
                for n in *n_min..=*n_max {
                    if !is_r_switchable_at(algebra, *r, n, limits)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Attaches the least `m` in `ms` with `<D_{A,m}>` full, if any, to a
    /// PGP verdict. EGP verdicts are returned unchanged.
    pub fn with_d_generation_evidence(
        mut self,
        algebra: &Algebra,
        ms: impl IntoIterator<Item = usize>,
        limits: &Limits,
    ) -> Result<Self> {
        if let Verdict::Pgp { evidence } = &mut self.verdict {
            for m in ms {
                if check_d_generation(algebra, m, limits)? {
                    *evidence = Some(PgpEvidence::DGeneration { m });
                    break;
                }
            }
        }
        Ok(self)
    }
}

impl fmt::Display for EgpDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            Verdict::Egp { witness } => {
                writeln!(f, "verdict: EGP")?;
                writeln!(f, "alpha: {}", fmt_set(&witness.alpha()))?;
                writeln!(f, "beta: {}", fmt_set(&witness.beta()))?;
                for (name, j) in &self.coordinates {
                    writeln!(f, "projective: {name} at coordinate {}", j + 1)?;
                }
            }
            Verdict::Pgp { evidence } => {
                writeln!(f, "verdict: PGP")?;
                match evidence {
                    None => writeln!(f, "evidence: none")?,
                    Some(PgpEvidence::DGeneration { m }) => writeln!(f, "evidence: d-generation m={m}")?,
                    Some(PgpEvidence::Switchable { r, n_min, n_max }) => {
                        writeln!(f, "evidence: switchable r={r} n={n_min}..{n_max}")?
                    }
                }
            }
        }
        Ok(())
    }
}

/// Decides PGP vs EGP for an idempotent algebra.
///
/// Candidates are checked in parallel; the reported witness is the least
/// pair in [`SubsetPair::enumerate`] order regardless of scheduling.
pub fn decide_egp_idempotent(algebra: &Algebra) -> Result<EgpDecision> {
    if let Some((op, element, value)) = algebra.idempotence_failure() {
        return Err(Error::NotIdempotent {
            op: op.name().to_string(),
            element,
            value,
        });
    }
    let pairs = SubsetPair::enumerate(algebra.universe())?;
    let found = pairs.par_iter().find_first(|pair| {
        algebra
            .operations()
            .iter()
            .all(|op| is_ab_projective(op, pair).is_some())
    });
    Ok(match found {
        Some(pair) => EgpDecision {
            verdict: Verdict::Egp { witness: *pair },
            coordinates: algebra
                .operations()
                .iter()
                .map(|op| {
                    let j = is_ab_projective(op, pair).expect("checked above");
                    (op.name().to_string(), j)
                })
                .collect(),
        },
        None => EgpDecision {
            verdict: Verdict::Pgp { evidence: None },
            coordinates: Vec::new(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GrowthMode {
    Exact,
    Greedy,
}

impl GrowthMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            GrowthMode::Exact => "exact",
            GrowthMode::Greedy => "greedy",
        }
    }
}

impl fmt::Display for GrowthMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GrowthMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(GrowthMode::Exact),
            "greedy" => Ok(GrowthMode::Greedy),
            other => Err(format!("unknown mode `{other}` (expected exact or greedy)")),
        }
    }
}

/// A generating set of `A^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingSet {
    pub n: usize,
    pub mode: GrowthMode,
    /// Encoded tuples, increasing.
    pub codes: Vec<u64>,
}

impl GeneratingSet {
    pub fn size(&self) -> usize {
        self.codes.len()
    }
}

/// A generating set of `A^n`: minimum-size in exact mode, the greedy
/// lexicographic scan's result in greedy mode.
pub fn min_generating_size(
    algebra: &Algebra,
    n: usize,
    mode: GrowthMode,
    limits: &Limits,
) -> Result<GeneratingSet> {
    if n == 0 {
        return Err(Error::precondition("generating sets need n >= 1"));
    }
    let codes = match mode {
        GrowthMode::Greedy => greedy_generators(algebra, n, limits)?,
        GrowthMode::Exact => exact_generators(algebra, n, limits)?,
    };
    Ok(GeneratingSet { n, mode, codes })
}

fn greedy_generators(algebra: &Algebra, n: usize, limits: &Limits) -> Result<Vec<u64>> {
    let space = checked_space(algebra.universe(), n)?;
    if space > limits.enumeration {
        return Err(Error::budget(format!("scanning {}^{n} tuples", algebra.universe()), limits.enumeration));
    }
    let mut sub = Subpower::new(algebra, n, limits)?;
    let mut chosen = Vec::new();
    for code in 0..space {
        if sub.is_full() {
            break;
        }
        if !sub.contains(code) {
            sub.add(code);
            sub.saturate()?;
            chosen.push(code);
        }
    }
    Ok(chosen)
}

fn checked_space(k: usize, n: usize) -> Result<u64> {
    space_size(k, n).ok_or_else(|| Error::budget(format!("{k}^{n} tuples"), u64::MAX))
}

/// Exact search.
///
/// Every minimum generating set contains the essential tuples (those `t`
/// with `t ∉ <A^n ∖ {t}>`), so they are forced first. Remaining seeds are
/// chosen by iterative deepening on their number, in increasing code
/// order, each outside the closure of those already chosen: in a minimum
/// set no member lies in the closure of the others.
fn exact_generators(algebra: &Algebra, n: usize, limits: &Limits) -> Result<Vec<u64>> {
    let k = algebra.universe();
    let space = checked_space(k, n)?;
    if space > limits.exact {
        return Err(Error::budget(format!("exact search over {k}^{n} tuples"), limits.exact));
    }
    let mut search = ExactSearch {
        algebra,
        limits,
        space,
        spent: 0,
    };
    let essential = search.essential_tuples(n)?;
    let mut base = Subpower::new(algebra, n, limits)?;
    for &c in &essential {
        base.add(c);
    }
    search.saturate(&mut base)?;
    let mut extra = Vec::new();
    for depth in 0..=space as usize {
        if search.dfs(&base, 0, depth, &mut extra)? {
            let mut codes = essential;
            codes.extend(extra);
            codes.sort_unstable();
            return Ok(codes);
        }
    }
    unreachable!("A^n generates itself")
}

struct ExactSearch<'a> {
    algebra: &'a Algebra,
    limits: &'a Limits,
    space: u64,
    spent: u64,
}

impl<'a> ExactSearch<'a> {
    fn saturate(&mut self, sub: &mut Subpower<'a>) -> Result<()> {
        let before = sub.steps();
        sub.saturate()?;
        self.spent += sub.steps() - before;
        if self.spent > self.limits.closure_steps {
            return Err(Error::budget("exact generating-set search", self.limits.closure_steps));
        }
        Ok(())
    }

    fn essential_tuples(&mut self, n: usize) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        for t in 0..self.space {
            let mut sub = Subpower::new(self.algebra, n, self.limits)?;
            for c in (0..self.space).filter(|&c| c != t) {
                sub.add(c);
            }
            self.saturate(&mut sub)?;
            if !sub.contains(t) {
                out.push(t);
            }
        }
        Ok(out)
    }

    fn dfs(&mut self, state: &Subpower<'a>, start: u64, remaining: usize, chosen: &mut Vec<u64>) -> Result<bool> {
        if state.is_full() {
            return Ok(true);
        }
        if remaining == 0 {
            return Ok(false);
        }
        for code in start..self.space {
            if self.space - code < remaining as u64 {
                break;
            }
            if state.contains(code) {
                continue;
            }
            let mut next = state.clone();
            next.add(code);
            self.saturate(&mut next)?;
            chosen.push(code);
            if self.dfs(&next, code + 1, remaining - 1, chosen)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthRow {
    pub n: usize,
    pub size: usize,
    pub mode: GrowthMode,
}

/// Generating-set sizes for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GrowthProfile {
    pub rows: Vec<GrowthRow>,
    /// Rows that could not be computed within budget.
    pub notes: Vec<String>,
}

impl GrowthProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,size,mode\n");
        for row in &self.rows {
            out.push_str(&format!("{},{},{}\n", row.n, row.size, row.mode));
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.size).collect()
    }
}

/// Rows are computed in parallel and reported in order of `n`. Exact mode
/// falls back to greedy once `k^n` exceeds the exact budget; rows that blow
/// any budget are omitted and noted.
pub fn growth_profile(algebra: &Algebra, n_max: usize, mode: GrowthMode, limits: &Limits) -> Result<GrowthProfile> {
    let results: Vec<(usize, Result<GeneratingSet>)> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let exact_fits = space_size(algebra.universe(), n).is_some_and(|s| s <= limits.exact);
            let row_mode = if mode == GrowthMode::Exact && exact_fits {
                GrowthMode::Exact
            } else {
                GrowthMode::Greedy
            };
            (n, min_generating_size(algebra, n, row_mode, limits))
        })
        .collect();
    let mut profile = GrowthProfile::default();
    for (n, result) in results {
        match result {
            Ok(set) => profile.rows.push(GrowthRow {
                n,
                size: set.size(),
                mode: set.mode,
            }),
            Err(e @ Error::BudgetExceeded { .. }) => profile.notes.push(format!("n={n} omitted: {e}")),
            Err(e) => return Err(e),
        }
    }
    Ok(profile)
}
