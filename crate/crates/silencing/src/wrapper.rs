use crate::error::SilenceError;
use crate::shim::{observe, shim_fields, shim_len, Heard};
use crate::wire::{Code, Parsed};
use rand::{Rng, RngCore};
use std::ops::Range;
use synccount_core::{BitString, Field, NodeId, Probe, Protocol, Schema, StepCtx, Tally};
use synccount_counters::tree::hdr;
use synccount_counters::{
    build_recursive, inc, phase_king_update, Broadcast, Counter, Env, Instruction, KingState, Thresholds, Tree,
};

const T: usize = 0;
const H: usize = 1;
const SHIMS: usize = 2;

/// Wrapper options.
#[derive(Clone, Copy, Debug, Default)]
pub struct SilenceOptions {
    /// Accept `kappa <= T(A)`. Convergence within `O(kappa)` is then not guaranteed.
    pub allow_short_kappa: bool,
}

/// A boost counter wrapped so that, once stable, nodes only announce their
/// counter in a compressed code.
///
/// Node state: `[cooldown, happy, shim for every other sender.., wrapped state..]`.
#[derive(Clone, Debug)]
pub struct Silenced {
    inner: Counter,
    code: Code,
    cooldown: u32,
    shim_len: usize,
    schemas: Vec<Schema>,
}

impl Silenced {
    pub fn new(tree: Tree, kappa: u32, opts: SilenceOptions) -> Result<Self, SilenceError> {
        if !matches!(tree, Tree::Boost { .. }) {
            return Err(SilenceError::NotBoost);
        }
        let c = tree.c();
        if kappa < 2 || !c.is_multiple_of(kappa) {
            return Err(SilenceError::Period { c, kappa });
        }
        let bound = tree.time_bound();
        if u64::from(kappa) <= bound && !opts.allow_short_kappa {
            return Err(SilenceError::ShortWindow { kappa, bound });
        }
        let cooldown = u32::try_from(bound).map_err(|_| SilenceError::ShortWindow { kappa, bound })?;
        let inner = Counter::new(tree);
        let code = Code::new(c, kappa);
        let n = inner.n();
        let schemas = (0..n)
            .map(|v| {
                let mut fields = vec![Field::cooldown("silence.t", cooldown), Field::flag("silence.h")];
                for _ in 1..n {
                    fields.extend(shim_fields(&code));
                }
                Schema::new(fields).concat(inner.schema(NodeId(v)))
            })
            .collect();
        Ok(Silenced { inner, code, cooldown, shim_len: shim_len(&code), schemas })
    }

    pub fn inner(&self) -> &Counter {
        &self.inner
    }

    pub fn code(&self) -> Code {
        self.code
    }

    pub fn kappa(&self) -> u32 {
        self.code.kappa
    }

    /// Cooldown length, the wrapped counter's stabilisation bound.
    pub fn cooldown(&self) -> u32 {
        self.cooldown
    }

    fn inner_offset(&self) -> usize {
        SHIMS + (self.inner.n() - 1) * self.shim_len
    }

    fn shim_range(&self, v: usize, u: usize) -> Range<usize> {
        let slot = if u < v { u } else { u - 1 };
        let start = SHIMS + slot * self.shim_len;
        start..start + self.shim_len
    }

    pub fn wrapped<'s>(&self, state: &'s [u32]) -> &'s [u32] {
        &state[self.inner_offset()..]
    }

    pub fn is_happy(&self, state: &[u32]) -> bool {
        state[H] == 1
    }

    /// Rounds until counters agree, given `kappa > T(A)`: the no-happiness and
    /// lone-happiness cases each cost a cooldown, plus decoder lock-in.
    pub fn convergence_bound(&self) -> u64 {
        use synccount_counters::constants::DECODER_LOCK_WINDOWS;
        2 * u64::from(self.cooldown) + 5 + DECODER_LOCK_WINDOWS * u64::from(self.code.kappa)
    }

    /// Rounds until every correct node is happy and counting.
    pub fn silence_bound(&self) -> u64 {
        self.convergence_bound() + u64::from(self.cooldown) + u64::from(self.code.kappa) + 1
    }

    fn parse(&self, sender: usize, msg: &BitString) -> Parsed {
        self.code.parse(self.inner.schema(NodeId(sender)), msg)
    }
}

impl Protocol for Silenced {
    type Msg = BitString;

    fn name(&self) -> String {
        format!("silenced(n={}, f={}, c={}, kappa={})", self.n(), self.f(), self.c(), self.code.kappa)
    }

    fn n(&self) -> usize {
        self.inner.n()
    }

    fn f(&self) -> usize {
        self.inner.f()
    }

    fn c(&self) -> u32 {
        self.inner.c()
    }

    fn schema(&self, v: NodeId) -> &Schema {
        &self.schemas[v.index()]
    }

    fn message(&self, v: NodeId, state: &[u32]) -> BitString {
        let inner = self.wrapped(state);
        let a = inner[hdr::A];
        if self.is_happy(state) && a < self.c() {
            self.code.encode_happy(a)
        } else {
            self.code.encode_unhappy(self.inner.schema(v), inner)
        }
    }

    fn message_bits(&self, _sender: NodeId, msg: &BitString) -> u64 {
        msg.len() as u64
    }

    fn max_message_bits(&self) -> u64 {
        let widest = (0..self.n()).map(|v| self.inner.schema(NodeId(v)).width()).max().unwrap_or(0);
        (2 + u64::from(widest)).max(self.code.window_bits())
    }

    fn check_message(&self, _sender: NodeId, msg: &BitString) -> Result<(), String> {
        let limit = self.max_message_bits();
        if msg.len() as u64 > limit {
            return Err(format!("{} bits exceed {limit}", msg.len()));
        }
        Ok(())
    }

    fn garbage(&self, sender: NodeId, rng: &mut dyn RngCore) -> BitString {
        match rng.random_range(0..3) {
            0 => {
                let state = self.inner.schema(sender).random_state(rng);
                self.code.encode_unhappy(self.inner.schema(sender), &state)
            }
            1 => self.code.encode_happy(rng.random_range(0..self.c())),
            _ => {
                let len = rng.random_range(0..=self.max_message_bits());
                let mut out = BitString::new();
                (0..len).for_each(|_| out.push_bit(rng.random()));
                out
            }
        }
    }

    fn transition(&self, v: NodeId, state: &[u32], inbox: &[Option<&BitString>], ctx: &mut StepCtx) -> Vec<u32> {
        let (n, f, c) = (self.n(), self.f(), self.c());
        let v = v.index();
        let off = self.inner_offset();
        let inner = &state[off..];
        let (t, happy) = (state[T], state[H] == 1);
        let a_prev = inner[hdr::A];

        let mut out = state[..off].to_vec();
        let heard: Vec<Heard> = (0..n)
            .map(|u| {
                if u == v {
                    return if happy && a_prev < c { Heard::Happy(a_prev) } else { Heard::Unhappy(inner.to_vec()) };
                }
                let parsed = inbox[u].map(|m| self.parse(u, m));
                observe(&self.code, &mut out[self.shim_range(v, u)], parsed)
            })
            .collect();

        // Rule 4: a value claimed by enough happy senders wins outright.
        let mut claims = Tally::new();
        heard.iter().filter_map(Heard::happy_value).for_each(|a| claims.add(a, 1));
        let next = match claims.first_reaching((n - 2 * f) as u32) {
            Some(x) => KingState { a: inc(x, c), b: true },
            None => {
                let clock = self.inner.tree().leader_view(v, inner).map_or(0, |l| l.clock);
                let (instr, king) = Instruction::at(clock);
                let mut values = Tally::new();
                heard.iter().filter_map(Heard::value).for_each(|a| values.add(a, 1));
                let own = KingState { a: a_prev, b: inner[hdr::B] == 1 };
                phase_king_update(instr, own, &values, heard[king].value(), Thresholds::broadcast(n, f), c)
            }
        };

        // Rule 1
        let support = heard.iter().filter(|m| m.value() == Some(a_prev)).count();
        let t_next = if a_prev >= c || support < n - f || next.a != inc(a_prev, c) {
            self.cooldown
        } else {
            t.saturating_sub(1)
        };

        // Rule 2
        let happy_support = claims.count(a_prev) as usize;
        let happy_next = if (happy && happy_support < n - f) || t_next > 0 {
            false
        } else if t == 0 && a_prev < c && a_prev.is_multiple_of(self.code.kappa) {
            true
        } else {
            happy
        };
        out[T] = t_next;
        out[H] = u32::from(happy_next);

        // Rule 3
        if happy_next {
            out.extend_from_slice(inner);
        } else {
            let wrapped: Vec<Option<&[u32]>> = heard
                .iter()
                .map(|m| match m {
                    Heard::Unhappy(s) => Some(s.as_slice()),
                    _ => None,
                })
                .collect();
            let all = vec![1; n];
            let mut env = Env { pull: &Broadcast, ctx, base: 0 };
            self.inner.tree().step_lower(v, inner, &wrapped, &all, &mut env, &mut out);
        }
        out[off + hdr::A] = next.a;
        out[off + hdr::B] = u32::from(next.b);
        out
    }

    fn output(&self, v: NodeId, state: &[u32]) -> u32 {
        self.inner.output(v, self.wrapped(state))
    }

    fn probe(&self, v: NodeId, state: &[u32]) -> Probe {
        Probe {
            happy: Some(self.is_happy(state)),
            cooldown: Some(state[T]),
            ..self.inner.probe(v, self.wrapped(state))
        }
    }

    fn top_blocks(&self) -> Option<[Range<usize>; 2]> {
        self.inner.top_blocks()
    }
}

/// Silenced recursive counter for `n` nodes, `f` faults and period `c`.
pub fn build_silenced(n: usize, f: usize, c: u32, kappa: u32, opts: SilenceOptions) -> Result<Silenced, SilenceError> {
    Silenced::new(build_recursive(n, f, c)?, kappa, opts)
}
