/// Resource limits shared by the closure engine, the enumerators and the
/// exact generating-set search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of coordinatewise operation applications per closure.
    pub closure_steps: u64,
    /// Tuple spaces up to this many tuples use a dense bitset.
    pub dense_threshold: u64,
    /// Maximum number of tuples any single enumeration may visit.
    pub enumeration: u64,
    /// Exact generating-set search runs only when `k^n` is at most this.
    pub exact: u64,
    /// Largest operation arity accepted by the parser.
    pub max_arity: usize,
}

impl Limits {
    pub const DEFAULT_CLOSURE_STEPS: u64 = 1_000_000_000;
    pub const DEFAULT_DENSE_THRESHOLD: u64 = 1 << 26;
    pub const DEFAULT_ENUMERATION: u64 = 1 << 28;
    pub const DEFAULT_EXACT: u64 = 256;
    pub const DEFAULT_MAX_ARITY: usize = 4;
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            closure_steps: Self::DEFAULT_CLOSURE_STEPS,
            dense_threshold: Self::DEFAULT_DENSE_THRESHOLD,
            enumeration: Self::DEFAULT_ENUMERATION,
            exact: Self::DEFAULT_EXACT,
            max_arity: Self::DEFAULT_MAX_ARITY,
        }
    }
}
