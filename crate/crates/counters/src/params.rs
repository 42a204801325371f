use serde::{Deserialize, Serialize};
use synccount_core::ConfigError;

/// Parameters of one two-block boost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoostParams {
    pub n: usize,
    pub f: usize,
    pub c: u32,
    pub n0: usize,
    pub n1: usize,
    pub f0: usize,
    pub f1: usize,
    /// Clock period of the phase-king schedule.
    pub tau: u32,
    pub c0: u32,
    pub c1: u32,
}

pub fn check_resilience(n: usize, f: usize) -> Result<(), ConfigError> {
    if n == 0 {
        return Err(ConfigError::EmptySystem(n));
    }
    if 3 * f >= n {
        return Err(ConfigError::Resilience { n, f, why: "need f < n/3" });
    }
    Ok(())
}

impl BoostParams {
    pub fn new(n: usize, f: usize, c: u32) -> Result<Self, ConfigError> {
        check_resilience(n, f)?;
        if f == 0 {
            return Err(ConfigError::param("f", "boosting needs f >= 1"));
        }
        if c < 2 {
            return Err(ConfigError::param("c", format!("period must be at least 2, got {c}")));
        }
        let tau = 3 * (f as u32 + 2);
        Ok(BoostParams {
            n,
            f,
            c,
            n0: n / 2,
            n1: n.div_ceil(2),
            f0: (f - 1) / 2,
            f1: f / 2,
            tau,
            c0: 2 * tau,
            c1: 6 * tau,
        })
    }

    /// Reset value of the cooldown counters.
    pub fn cooldown_max(&self) -> u32 {
        2 * self.c1
    }

    pub fn block_size(&self, i: usize) -> usize {
        [self.n0, self.n1][i]
    }

    pub fn block_resilience(&self, i: usize) -> usize {
        [self.f0, self.f1][i]
    }

    pub fn block_period(&self, i: usize) -> u32 {
        [self.c0, self.c1][i]
    }

    pub fn block_offset(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.n0
        }
    }

    pub fn block_of(&self, v: usize) -> usize {
        usize::from(v >= self.n0)
    }

    /// Block `i` counts `3^i * tau` clock values per leader-pointer value.
    pub fn pointer_span(&self, i: usize) -> u32 {
        if i == 0 {
            self.tau
        } else {
            3 * self.tau
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn four_nodes_one_fault() {
        let p = BoostParams::new(4, 1, 3).unwrap();
        assert_eq!((p.n0, p.n1, p.f0, p.f1), (2, 2, 0, 0));
        assert_eq!((p.tau, p.c0, p.c1), (9, 18, 54));
        assert_eq!(p.cooldown_max(), 108);
    }

    #[test]
    fn sixteen_nodes_five_faults() {
        let p = BoostParams::new(16, 5, 128).unwrap();
        assert_eq!((p.tau, p.c0, p.c1), (21, 42, 126));
        assert_eq!((p.f0, p.f1), (2, 2));
        assert_eq!((p.n0, p.n1), (8, 8));
    }

    #[test]
    fn rejects_infeasible() {
        assert!(BoostParams::new(4, 2, 8).is_err());
        assert!(BoostParams::new(3, 1, 8).is_err());
        assert!(BoostParams::new(4, 0, 8).is_err());
        assert!(BoostParams::new(4, 1, 1).is_err());
    }

    proptest! {
        #[test]
        fn split_invariants(f in 1usize..60, extra in 1usize..40, c in 2u32..5000) {
            let n = 3 * f + extra;
            let p = BoostParams::new(n, f, c).unwrap();
            prop_assert_eq!(p.f0 + p.f1 + 1, f);
            prop_assert_eq!(p.n0 + p.n1, n);
            prop_assert_eq!(p.c1, 3 * p.c0);
            prop_assert!(3 * p.f0 < p.n0);
            prop_assert!(3 * p.f1 < p.n1);
            prop_assert!(f + 2 <= n);
        }
    }
}
