//! JSON-lines trace files: one header record, then one record per round.

use crate::config::ExperimentConfig;
use crate::metrics::{RunContext, RunMetrics};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use synccount_core::{NodeId, Probe, RoundRecord, Trace};

/// Version of the trace record layout.
pub const TRACE_SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub schema: u32,
    pub protocol: String,
    pub adversary: String,
    pub n: usize,
    pub f: usize,
    pub c: u32,
    pub seed: u64,
    pub faulty: Vec<usize>,
    pub horizon: u64,
    pub context: RunContext,
    pub config: ExperimentConfig,
}

/// Per-round record; vectors are indexed by node, faulty nodes are `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub round: u64,
    pub outputs: Vec<Option<u32>>,
    pub happy: Vec<Option<bool>>,
    pub raw_counter: Vec<Option<u32>>,
    pub bits: Vec<Option<u64>>,
    pub pulls: Vec<Option<u64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
enum Line {
    Header(Box<Header>),
    Round(Round),
}

impl Round {
    fn of(rec: &RoundRecord) -> Self {
        let probe = |pick: fn(&Probe) -> Option<u32>| rec.probes.iter().map(|p| p.as_ref().and_then(pick)).collect();
        Round {
            round: rec.round,
            outputs: rec.outputs.clone(),
            happy: rec.probes.iter().map(|p| p.and_then(|p| p.happy)).collect(),
            raw_counter: probe(|p| p.raw_counter),
            bits: rec.bits.clone(),
            pulls: rec.pulls.clone(),
        }
    }

    fn record(self) -> RoundRecord {
        let probes = self
            .outputs
            .iter()
            .zip(self.happy.iter().zip(&self.raw_counter))
            .map(|(out, (&happy, &raw_counter))| out.map(|_| Probe { happy, raw_counter, ..Probe::default() }))
            .collect();
        RoundRecord { round: self.round, outputs: self.outputs, bits: self.bits, pulls: self.pulls, probes, states: None }
    }
}

pub fn write_trace(out: impl Write, trace: &Trace, context: RunContext, config: &ExperimentConfig) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(out);
    let header = Header {
        schema: TRACE_SCHEMA,
        protocol: trace.protocol.clone(),
        adversary: trace.adversary.clone(),
        n: trace.n,
        f: trace.f,
        c: trace.c,
        seed: trace.seed,
        faulty: trace.faulty.iter().map(|v| v.index()).collect(),
        horizon: trace.horizon(),
        context,
        config: config.clone(),
    };
    serde_json::to_writer(&mut out, &Line::Header(Box::new(header)))?;
    out.write_all(b"\n")?;
    for rec in std::iter::once(&trace.initial).chain(&trace.rounds) {
        serde_json::to_writer(&mut out, &Line::Round(Round::of(rec)))?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("{0}")]
    Layout(String),
}

/// Read a trace file back. Only the recorded columns are restored; states and
/// other probe fields are absent.
pub fn read_trace(input: impl BufRead) -> Result<(Header, Trace), ReadError> {
    let mut header = None;
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        match serde_json::from_str(&line).map_err(|source| ReadError::Json { line: i + 1, source })? {
            Line::Header(h) if i == 0 => header = Some(*h),
            Line::Round(r) if i > 0 => records.push(r.record()),
            _ => return Err(ReadError::Layout(format!("line {}: unexpected record", i + 1))),
        }
    }
    let header = header.ok_or_else(|| ReadError::Layout("empty trace".into()))?;
    if header.schema != TRACE_SCHEMA {
        return Err(ReadError::Layout(format!("trace schema {} is not {TRACE_SCHEMA}", header.schema)));
    }
    let mut records = records.into_iter();
    let initial = records.next().ok_or_else(|| ReadError::Layout("no round 0".into()))?;
    let trace = Trace {
        protocol: header.protocol.clone(),
        adversary: header.adversary.clone(),
        n: header.n,
        f: header.f,
        c: header.c,
        seed: header.seed,
        faulty: header.faulty.iter().copied().map(NodeId).collect(),
        initial,
        rounds: records.collect(),
    };
    Ok((header, trace))
}

/// Recompute a run's metrics from its trace file alone.
pub fn rederive(path: &std::path::Path) -> Result<RunMetrics, ReadError> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let (header, trace) = read_trace(file)?;
    Ok(RunMetrics::from_trace(&trace, &header.context))
}
