//! Small named algebras used throughout the tests, the acceptance suite and
//! the bundled example files.

use crate::algebra::{Algebra, OperationTable};

pub fn projections(k: usize) -> Algebra {
    Algebra::projections_only(k)
}

/// The minority operation `a ⊕ b ⊕ c` on `{0, 1}`.
pub fn xor3() -> Algebra {
    single(2, OperationTable::from_fn("xor3", 2, 3, |a| a[0] ^ a[1] ^ a[2]))
}

pub fn min() -> Algebra {
    single(2, OperationTable::from_fn("min", 2, 2, |a| a[0].min(a[1])))
}

pub fn max() -> Algebra {
    single(2, OperationTable::from_fn("max", 2, 2, |a| a[0].max(a[1])))
}

/// Ternary majority on `{0, 1}`.
pub fn majority() -> Algebra {
    single(
        2,
        OperationTable::from_fn("majority", 2, 3, |a| u8::from(a[0] + a[1] + a[2] >= 2)),
    )
}

/// A binary idempotent operation on `{0, 1, 2}` that is αβ-projective in its
/// first coordinate for `α = {0, 1}`, `β = {1, 2}`.
pub fn egp_f() -> Algebra {
    let table = vec![0, 1, 1, 1, 1, 1, 2, 1, 2];
    single(3, OperationTable::new("f", 3, 2, table).expect("valid table"))
}

/// The binary constant-0 operation on `{0, 1}`; not idempotent.
pub fn constant_zero() -> Algebra {
    single(2, OperationTable::from_fn("zero", 2, 2, |_| 0))
}

/// The curated corpus, with file stems matching `corpus/*.json`.
pub fn named() -> Vec<(&'static str, Algebra)> {
    vec![
        ("projections2", projections(2)),
        ("xor3", xor3()),
        ("min", min()),
        ("majority", majority()),
        ("egp_f", egp_f()),
    ]
}

fn single(k: usize, op: OperationTable) -> Algebra {
    Algebra::new(k, vec![op]).expect("valid algebra")
}
