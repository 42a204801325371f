use synccount_counters::BuildError;

#[derive(Debug, thiserror::Error)]
pub enum SilenceError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("the wrapped counter must have a boost root (f >= 1)")]
    NotBoost,
    #[error("period {c} is not a multiple of the window {kappa}")]
    Period { c: u32, kappa: u32 },
    #[error("window {kappa} does not exceed the wrapped bound {bound}; pass allow_short_kappa to override")]
    ShortWindow { kappa: u32, bound: u64 },
}
