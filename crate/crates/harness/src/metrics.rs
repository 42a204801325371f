//! Per-run metrics, computed from a trace only.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use synccount_core::Trace;
use synccount_silencing::checks::{measure_post_stabilisation_bits, silenced_since};

/// Version of the metrics CSV layout; bump on any column change.
pub const METRICS_SCHEMA: u32 = 1;

/// Stabilisation round, written as `none` when the run never stabilised.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stabilised(pub Option<u64>);

impl Serialize for Stabilised {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Some(t) => s.serialize_str(&t.to_string()),
            None => s.serialize_str("none"),
        }
    }
}

impl<'de> Deserialize<'de> for Stabilised {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "none" => Ok(Stabilised(None)),
            t => t.parse().map(|t| Stabilised(Some(t))).map_err(serde::de::Error::custom),
        }
    }
}

/// Facts about the construction that a trace alone does not carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunContext {
    pub bound: u64,
    pub state_bits: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kappa: Option<u32>,
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub schema: u32,
    pub protocol: String,
    pub adversary: String,
    pub seed: u64,
    pub n: usize,
    pub f: usize,
    pub c: u32,
    pub horizon: u64,
    pub stabilisation: Stabilised,
    pub bound: u64,
    pub within_bound: bool,
    pub state_bits: u32,
    /// Sums and maxima over correct nodes and rounds 1..=horizon.
    pub total_bits: u64,
    pub max_bits_per_round: u64,
    pub total_pulls: u64,
    pub max_pulls_per_round: u64,
    /// Silenced runs: aligned windows from the all-happy round + kappa.
    pub windows: Option<u64>,
    pub max_window_bits: Option<u64>,
}

impl RunMetrics {
    pub fn from_trace(trace: &Trace, ctx: &RunContext) -> Self {
        let stab = trace.stabilisation().round();
        let cells = |pick: fn(&synccount_core::RoundRecord) -> &Vec<Option<u64>>| {
            trace.rounds.iter().flat_map(move |r| pick(r).iter().flatten().copied())
        };
        // a silenced run is stable once every correct node is happy and counting
        let window = ctx
            .kappa
            .and_then(|k| Some((k, silenced_since(trace)?)))
            .map(|(k, t)| measure_post_stabilisation_bits(trace, k, t + u64::from(k)));
        RunMetrics {
            schema: METRICS_SCHEMA,
            protocol: trace.protocol.clone(),
            adversary: trace.adversary.clone(),
            seed: trace.seed,
            n: trace.n,
            f: trace.f,
            c: trace.c,
            horizon: trace.horizon(),
            stabilisation: Stabilised(stab),
            bound: ctx.bound,
            within_bound: stab.is_some_and(|t| t <= ctx.bound),
            state_bits: ctx.state_bits,
            total_bits: cells(|r| &r.bits).sum(),
            max_bits_per_round: cells(|r| &r.bits).max().unwrap_or(0),
            total_pulls: cells(|r| &r.pulls).sum(),
            max_pulls_per_round: cells(|r| &r.pulls).max().unwrap_or(0),
            windows: window.map(|w| w.windows),
            max_window_bits: window.map(|w| w.max_bits),
        }
    }
}

pub fn write_csv(path: &std::path::Path, rows: &[RunMetrics]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &std::path::Path) -> Result<Vec<RunMetrics>, csv::Error> {
    csv::Reader::from_path(path)?.deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stabilisation_column_round_trips() {
        for s in [Stabilised(None), Stabilised(Some(17))] {
            let text = serde_json::to_string(&s).unwrap();
            assert_eq!(serde_json::from_str::<Stabilised>(&text).unwrap(), s);
        }
        assert_eq!(serde_json::to_string(&Stabilised(None)).unwrap(), "\"none\"");
    }
}
