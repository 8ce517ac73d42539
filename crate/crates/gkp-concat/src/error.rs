use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode index {index} is outside 1..={n}")]
    ModeIndex { index: usize, n: usize },
    #[error("two-mode gate uses mode {0} as both control and target")]
    RepeatedMode(usize),
    #[error("squeeze parameter must be positive and finite, got {0}")]
    SqueezeParameter(f64),
    #[error("logical mode count {k} is out of range for {n} modes (need 1 <= k < n)")]
    LogicalCount { k: usize, n: usize },
    #[error("matrix is rank deficient: rank {rank} for {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
    #[error("Gram matrix condition number {0:.3e} exceeds 1e6")]
    IllConditioned(f64),
    #[error("circuit line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("period must be positive and finite, got {0}")]
    Period(f64),
    #[error("invalid code specification: {0}")]
    InvalidSpec(String),
    #[error("invalid qudit parameters d={d}, r={r}: need d % r == 0 and r*r % d == 0")]
    QuditParams { d: i64, r: i64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("sample {index} of stream seed {seed} failed to decode: {source}")]
    Decode {
        seed: u64,
        index: u64,
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
