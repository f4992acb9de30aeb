//! Finite algebras given by operation tables over `A = {0, ..., k-1}`.
//!
//! Tables are stored row-major with the first argument as the most
//! significant base-`k` digit, so `f(a_1, ..., a_s)` lives at index
//! `a_1·k^(s-1) + ... + a_s`.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::limits::Limits;

/// An element of the universe `{0, ..., k-1}`.
pub type Element = u8;

/// Largest supported universe; elements are stored as bytes.
pub const MAX_UNIVERSE: usize = 255;

/// Largest supported table, in entries.
const MAX_TABLE_LEN: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OperationTable {
    name: String,
    arity: usize,
    k: usize,
    table: Vec<Element>,
}

impl OperationTable {
    pub fn new(name: impl Into<String>, k: usize, arity: usize, table: Vec<Element>) -> Result<Self> {
        let name = name.into();
        check_universe(k)?;
        if arity == 0 {
            return Err(Error::InvalidAlgebra(format!(
                "operation `{name}` has arity 0; arity must be at least 1"
            )));
        }
        let expected = table_len(k, arity).ok_or_else(|| {
            Error::InvalidAlgebra(format!("operation `{name}`: table of {k}^{arity} entries is too large"))
        })?;
        if table.len() != expected {
            return Err(Error::Dimension {
                op: name,
                expected,
                found: table.len(),
            });
        }
        if let Some((position, &value)) = table.iter().enumerate().find(|(_, &v)| v as usize >= k) {
            return Err(Error::Range {
                op: name,
                position,
                value: value as i64,
                k,
            });
        }
        Ok(OperationTable { name, arity, k, table })
    }

    /// Builds a table by evaluating `f` on every argument tuple in table order.
    ///
    /// Panics if `f` returns a value outside the universe.
    pub fn from_fn(
        name: impl Into<String>,
        k: usize,
        arity: usize,
        mut f: impl FnMut(&[Element]) -> Element,
    ) -> Self {
        let len = table_len(k, arity).expect("table size overflow");
        let mut args = vec![0 as Element; arity];
        let mut table = Vec::with_capacity(len);
        for _ in 0..len {
            table.push(f(&args));
            increment(&mut args, k);
        }
        OperationTable::new(name, k, arity, table).expect("from_fn produced an invalid table")
    }

    /// The `j`-th (zero-based) projection of the given arity.
    pub fn projection(k: usize, arity: usize, j: usize) -> Self {
        assert!(j < arity);
        Self::from_fn(format!("p{}_{}", arity, j + 1), k, arity, |args| args[j])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn universe(&self) -> usize {
        self.k
    }

    pub fn table(&self) -> &[Element] {
        &self.table
    }

    /// Applies the operation, checking argument count and range.
    pub fn evaluate(&self, args: &[Element]) -> Result<Element> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: args.len(),
            });
        }
        if let Some(&bad) = args.iter().find(|&&a| a as usize >= self.k) {
            return Err(Error::ElementOutOfRange {
                value: bad as usize,
                k: self.k,
            });
        }
        Ok(self.table[self.index_of(args)])
    }

    /// Applies the operation without validating `args`.
    #[inline]
    pub fn eval(&self, args: &[Element]) -> Element {
        self.table[self.index_of(args)]
    }

    #[inline]
    fn index_of(&self, args: &[Element]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.k + a as usize)
    }

    /// The first diagonal point where `f(a, ..., a) != a`, as `(a, f(a, ..., a))`.
    pub fn idempotence_failure(&self) -> Option<(Element, Element)> {
        let diag = vec![0 as Element; self.arity];
        (0..self.k as Element).find_map(|a| {
            let mut args = diag.clone();
            args.fill(a);
            let v = self.eval(&args);
            (v != a).then_some((a, v))
        })
    }

    pub fn is_idempotent(&self) -> bool {
        self.idempotence_failure().is_none()
    }
}

/// A finite algebra: a universe size and a list of basic operations.
///
/// An empty operation list is allowed and stands for the clone of
/// projections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    k: usize,
    operations: Vec<OperationTable>,
}

impl Algebra {
    pub fn new(k: usize, operations: Vec<OperationTable>) -> Result<Self> {
        check_universe(k)?;
        let mut names = HashSet::new();
        for op in &operations {
            if op.k != k {
                return Err(Error::InvalidAlgebra(format!(
                    "operation `{}` is over a universe of size {}, algebra has size {k}",
                    op.name, op.k
                )));
            }
            if !names.insert(op.name.as_str()) {
                return Err(Error::InvalidAlgebra(format!("duplicate operation name `{}`", op.name)));
            }
        }
        Ok(Algebra { k, operations })
    }

    /// The algebra with no basic operations.
    pub fn projections_only(k: usize) -> Self {
        Algebra::new(k, Vec::new()).expect("valid universe")
    }

    pub fn universe(&self) -> usize {
        self.k
    }

    pub fn operations(&self) -> &[OperationTable] {
        &self.operations
    }

    pub fn operation(&self, name: &str) -> Option<&OperationTable> {
        self.operations.iter().find(|op| op.name == name)
    }

    pub fn max_arity(&self) -> usize {
        self.operations.iter().map(|op| op.arity).max().unwrap_or(0)
    }

    pub fn is_idempotent(&self) -> bool {
        self.idempotence_failure().is_none()
    }

    /// The first operation (in list order) failing idempotence, with the
    /// offending diagonal point.
    pub fn idempotence_failure(&self) -> Option<(&OperationTable, Element, Element)> {
        self.operations
            .iter()
            .find_map(|op| op.idempotence_failure().map(|(a, v)| (op, a, v)))
    }

    /// Renders the algebra in the same document format [`parse_algebra`] reads.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{{");
        let _ = writeln!(out, "  \"size\": {},", self.k);
        if self.operations.is_empty() {
            let _ = writeln!(out, "  \"operations\": []");
        } else {
            let _ = writeln!(out, "  \"operations\": [");
            for (i, op) in self.operations.iter().enumerate() {
                let table: Vec<String> = op.table.iter().map(|v| v.to_string()).collect();
                let name = serde_json::to_string(&op.name).expect("string serializes");
                let sep = if i + 1 == self.operations.len() { "" } else { "," };
                let _ = writeln!(
                    out,
                    "    {{\"name\": {name}, \"arity\": {}, \"table\": [{}]}}{sep}",
                    op.arity,
                    table.join(", ")
                );
            }
            let _ = writeln!(out, "  ]");
        }
        let _ = writeln!(out, "}}");
        out
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraDoc {
    size: i64,
    operations: Vec<OperationDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OperationDoc {
    name: String,
    arity: i64,
    table: Vec<i64>,
}

/// Parses an algebra document with the default arity cap.
pub fn parse_algebra(text: &str) -> Result<Algebra> {
    parse_algebra_with(text, &Limits::default())
}

pub fn parse_algebra_with(text: &str, limits: &Limits) -> Result<Algebra> {
    let doc: AlgebraDoc = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    if doc.size < 1 || doc.size as usize > MAX_UNIVERSE {
        return Err(Error::InvalidAlgebra(format!(
            "size {} outside supported range 1..={MAX_UNIVERSE}",
            doc.size
        )));
    }
    let k = doc.size as usize;
    let mut operations = Vec::with_capacity(doc.operations.len());
    for op in doc.operations {
        if op.name.is_empty() {
            return Err(Error::InvalidAlgebra("operation with empty name".into()));
        }
        if op.arity < 1 {
            return Err(Error::InvalidAlgebra(format!(
                "operation `{}` has arity {}; arity must be at least 1",
                op.name, op.arity
            )));
        }
        if op.arity as usize > limits.max_arity {
            return Err(Error::InvalidAlgebra(format!(
                "operation `{}` has arity {}, above the limit {}",
                op.name, op.arity, limits.max_arity
            )));
        }
        let arity = op.arity as usize;
        let expected = table_len(k, arity).unwrap_or(usize::MAX);
        if op.table.len() != expected {
            return Err(Error::Dimension {
                op: op.name,
                expected,
                found: op.table.len(),
            });
        }
        if let Some((position, &value)) = op
            .table
            .iter()
            .enumerate()
            .find(|(_, &v)| v < 0 || v as usize >= k)
        {
            return Err(Error::Range {
                op: op.name,
                position,
                value,
                k,
            });
        }
        let table = op.table.iter().map(|&v| v as Element).collect();
        operations.push(OperationTable::new(op.name, k, arity, table)?);
    }
    Algebra::new(k, operations)
}

// serde_json appends " at line L column C"; we report those separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn check_universe(k: usize) -> Result<()> {
    if k == 0 || k > MAX_UNIVERSE {
        return Err(Error::InvalidAlgebra(format!(
            "universe size {k} outside supported range 1..={MAX_UNIVERSE}"
        )));
    }
    Ok(())
}

fn table_len(k: usize, arity: usize) -> Option<usize> {
    let len = k.checked_pow(arity.try_into().ok()?)?;
    (len <= MAX_TABLE_LEN).then_some(len)
}

/// Advances `digits` to the next tuple in lexicographic order, wrapping to
/// all zeros after the last one. Returns false on wrap-around.
pub(crate) fn increment(digits: &mut [Element], k: usize) -> bool {
    for d in digits.iter_mut().rev() {
        if (*d as usize) + 1 < k {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor3() -> OperationTable {
        OperationTable::from_fn("xor3", 2, 3, |a| a[0] ^ a[1] ^ a[2])
    }

    #[test]
    fn parses_xor3_document() {
        let text = r#"{"size": 2, "operations": [
            {"name": "xor3", "arity": 3, "table": [0,1,1,0,1,0,0,1]}]}"#;
        let alg = parse_algebra(text).unwrap();
        assert_eq!(alg.universe(), 2);
        assert_eq!(alg.operations().len(), 1);
        assert_eq!(alg.operations()[0], xor3());
    }

    #[test]
    fn short_table_is_dimension_error() {
        let text = r#"{"size": 2, "operations": [{"name": "f", "arity": 2, "table": [0,1,1]}]}"#;
        assert_eq!(
            parse_algebra(text),
            Err(Error::Dimension {
                op: "f".into(),
                expected: 4,
                found: 3
            })
        );
    }

    #[test]
    fn entry_equal_to_k_is_range_error() {
        let text = r#"{"size": 2, "operations": [{"name": "f", "arity": 1, "table": [0,2]}]}"#;
        assert!(matches!(
            parse_algebra(text),
            Err(Error::Range { position: 1, value: 2, k: 2, .. })
        ));
        let text = r#"{"size": 2, "operations": [{"name": "f", "arity": 1, "table": [-1,0]}]}"#;
        assert!(matches!(parse_algebra(text), Err(Error::Range { value: -1, .. })));
    }

    #[test]
    fn syntax_error_reports_position() {
        let text = "{\"size\": 2,\n \"operations\": [oops]}";
        match parse_algebra(text) {
            Err(Error::Syntax { line, column, .. }) => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(parse_algebra(r#"{"size": 2}"#), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse_algebra(r#"{"size": 2, "operations": [], "extra": 1}"#),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn rejects_duplicates_and_oversized_arity() {
        let text = r#"{"size": 1, "operations": [
            {"name": "f", "arity": 1, "table": [0]},
            {"name": "f", "arity": 1, "table": [0]}]}"#;
        assert!(matches!(parse_algebra(text), Err(Error::InvalidAlgebra(_))));

        let text = r#"{"size": 1, "operations": [{"name": "f", "arity": 5, "table": [0]}]}"#;
        assert!(matches!(parse_algebra(text), Err(Error::InvalidAlgebra(_))));
        let wide = Limits {
            max_arity: 5,
            ..Limits::default()
        };
        assert!(parse_algebra_with(text, &wide).is_ok());

        let text = r#"{"size": 0, "operations": []}"#;
        assert!(matches!(parse_algebra(text), Err(Error::InvalidAlgebra(_))));
    }

    #[test]
    fn evaluate_follows_row_major_layout() {
        let min = OperationTable::from_fn("min", 2, 2, |a| a[0].min(a[1]));
        assert_eq!(min.evaluate(&[1, 0]), Ok(0));
        assert_eq!(xor3().evaluate(&[1, 1, 0]), Ok(0));

        let first = OperationTable::from_fn("first", 3, 2, |a| a[0]);
        assert_eq!(first.table(), &[0, 0, 0, 1, 1, 1, 2, 2, 2]);
    }

    #[test]
    fn evaluate_checks_arguments() {
        let min = OperationTable::from_fn("min", 2, 2, |a| a[0].min(a[1]));
        assert_eq!(
            min.evaluate(&[1]),
            Err(Error::ArityMismatch { expected: 2, found: 1 })
        );
        assert_eq!(
            min.evaluate(&[1, 2]),
            Err(Error::ElementOutOfRange { value: 2, k: 2 })
        );
    }

    #[test]
    fn idempotence() {
        assert!(Algebra::projections_only(2).is_idempotent());
        let min = OperationTable::from_fn("min", 2, 2, |a| a[0].min(a[1]));
        assert!(Algebra::new(2, vec![min.clone()]).unwrap().is_idempotent());
        for a in 0..2 {
            assert_eq!(min.evaluate(&[a, a]), Ok(a));
        }
        let zero = OperationTable::from_fn("zero", 2, 2, |_| 0);
        let alg = Algebra::new(2, vec![min, zero]).unwrap();
        assert!(!alg.is_idempotent());
        let (op, a, v) = alg.idempotence_failure().unwrap();
        assert_eq!((op.name(), a, v), ("zero", 1, 0));
    }

    #[test]
    fn document_round_trip() {
        let alg = Algebra::new(
            2,
            vec![
                xor3(),
                OperationTable::from_fn("we\"ird", 2, 1, |a| 1 - a[0]),
            ],
        )
        .unwrap();
        assert_eq!(parse_algebra(&alg.to_document()).unwrap(), alg);
        let empty = Algebra::projections_only(3);
        assert_eq!(parse_algebra(&empty.to_document()).unwrap(), empty);
    }
}
