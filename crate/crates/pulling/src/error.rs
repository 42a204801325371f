use synccount_counters::BuildError;

#[derive(Debug, thiserror::Error)]
pub enum PullError {
    #[error("slack gamma must be positive, got {0}")]
    Gamma(f64),
    #[error("error exponent k must be at least 1, got {0}")]
    Exponent(u32),
    #[error("system size eta must be at least 2, got {0}")]
    SystemSize(usize),
    #[error("{samples} samples per vote is below the minimum {minimum}")]
    TooFewSamples { samples: u32, minimum: u32 },
    #[error("f = {f} is not below n/(3+gamma) for n = {n}, gamma = {gamma}")]
    Resilience { n: usize, f: usize, gamma: f64 },
    #[error("frozen topology requires an oblivious adversary")]
    AdaptiveAgainstFrozen,
    #[error("schedule length must be positive")]
    Schedule,
    #[error(transparent)]
    Build(#[from] BuildError),
}
