use serde::{Deserialize, Serialize};

/// Horizon-bounded stabilisation verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stabilisation {
    /// Outputs agree and advance by one mod `c` from this round to the horizon.
    At(u64),
    NotWithinHorizon,
}

impl Stabilisation {
    pub fn round(self) -> Option<u64> {
        match self {
            Stabilisation::At(t) => Some(t),
            Stabilisation::NotWithinHorizon => None,
        }
    }
}

fn common(row: &[Option<u32>]) -> Option<u32> {
    let mut vals = row.iter().flatten();
    let first = *vals.next()?;
    vals.all(|&v| v == first).then_some(first)
}

/// Minimal `T` such that from row `T` on, every correct output agrees and
/// advances by one mod `c` per row. Rows are indexed by round; `None`
/// entries are faulty nodes.
///
/// A verdict only covers the observed rows; a later divergence cannot be
/// excluded by observation.
pub fn detect_stabilization(rows: &[&[Option<u32>]], c: u32) -> Stabilisation {
    let Some(mut prev) = rows.last().and_then(|r| common(r)) else {
        return Stabilisation::NotWithinHorizon;
    };
    let mut t = rows.len() - 1;
    while t > 0 {
        match common(rows[t - 1]) {
            Some(v) if (v + 1) % c == prev => {
                prev = v;
                t -= 1;
            }
            _ => break,
        }
    }
    Stabilisation::At(t as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(cols: &[&[u32]], faulty: usize) -> Vec<Vec<Option<u32>>> {
        let len = cols[0].len();
        (0..len)
            .map(|r| {
                let mut row: Vec<Option<u32>> = cols.iter().map(|c| Some(c[r])).collect();
                row.insert(faulty, None);
                row
            })
            .collect()
    }

    #[test]
    fn four_node_example_stabilises_at_five() {
        let n1 = [2, 2, 0, 2, 0, 0, 1, 2, 0, 1, 2];
        let n2 = [0, 2, 0, 1, 0, 0, 1, 2, 0, 1, 2];
        let n4 = [0, 0, 2, 0, 2, 0, 1, 2, 0, 1, 2];
        let r = rows(&[&n1, &n2, &n4], 2);
        let refs: Vec<&[Option<u32>]> = r.iter().map(|x| x.as_slice()).collect();
        assert_eq!(detect_stabilization(&refs, 3), Stabilisation::At(5));
    }

    #[test]
    fn counting_from_the_start() {
        let r: Vec<Vec<Option<u32>>> = (0..10).map(|i| vec![Some(i % 4), Some(i % 4)]).collect();
        let refs: Vec<&[Option<u32>]> = r.iter().map(|x| x.as_slice()).collect();
        assert_eq!(detect_stabilization(&refs, 4), Stabilisation::At(0));
    }

    #[test]
    fn final_disagreement_is_not_stable() {
        let mut r: Vec<Vec<Option<u32>>> = (0..10).map(|i| vec![Some(i % 4), Some(i % 4)]).collect();
        r[9][1] = Some(0);
        let refs: Vec<&[Option<u32>]> = r.iter().map(|x| x.as_slice()).collect();
        assert_eq!(detect_stabilization(&refs, 4), Stabilisation::NotWithinHorizon);
    }

    #[test]
    fn skipped_value_restarts_the_suffix() {
        let vals = [0, 1, 2, 0, 2, 0, 1, 2];
        let r: Vec<Vec<Option<u32>>> = vals.iter().map(|&v| vec![Some(v)]).collect();
        let refs: Vec<&[Option<u32>]> = r.iter().map(|x| x.as_slice()).collect();
        assert_eq!(detect_stabilization(&refs, 3), Stabilisation::At(4));
    }
}
