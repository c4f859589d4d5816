use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("rank {0} outside the supported range 1..=16")]
    BadRank(usize),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("invalid packed permutation code {0:#x}")]
    BadCode(u64),
    #[error("cannot parse permutation from {0:?}")]
    Parse(String),
}

#[derive(Debug, Error)]
pub enum KlError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("coefficient overflow computing P_{{{x},{w}}}")]
    Overflow { x: String, w: String },
    #[error("memory budget of {budget} bytes exceeded ({used} bytes in use)")]
    BudgetExceeded { budget: usize, used: usize },
    #[error("negative coefficient computing P_{{{x},{w}}}: recursion is inconsistent")]
    Inconsistent { x: String, w: String },
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic {0:?}, expected \"KLC1\"")]
    BadMagic([u8; 4]),
    #[error("unsupported cache format version {0}")]
    Version(u32),
    #[error("cache file truncated")]
    Truncated,
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("corrupt entry: {0}")]
    Corrupt(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SegmentError {
    #[error("invalid segment [{0},{1}]: begin exceeds end")]
    Empty(i64, i64),
    #[error("cannot parse multisegment from {0:?}")]
    Parse(String),
    #[error("supports differ")]
    SupportMismatch,
    #[error("inconsistent support: {0}")]
    InconsistentSupport(String),
    #[error("invalid two-to-one word {0:?}")]
    BadWord(String),
}

#[derive(Debug, Error)]
pub enum DecompositionError {
    #[error(transparent)]
    Kl(#[from] KlError),
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error(
        "support class has {size} basis elements, above the bound {bound}; pass --force to proceed"
    )]
    BudgetExceeded { size: usize, bound: usize },
    #[error("internal consistency violation: {0}")]
    Consistency(String),
    /// Some segment ends at `b` and another begins at `b + 1`, so standard
    /// modules have constituents with fewer segments outside the class.
    #[error("support has an end {0} directly followed by a begin; such products are not handled")]
    Juxtaposed(i64),
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("arithmetic overflow in exact elimination")]
    Overflow,
    #[error("rank profile is not realised by any multisegment: {0}")]
    NotRealizable(String),
    #[error("internal consistency violation: {0}")]
    Consistency(String),
}
