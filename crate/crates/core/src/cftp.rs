//! Monotone coupling from the past between `0̂` and `1̂`, with the doubling
//! schedule `τ, 2τ, 4τ, …`.
//!
//! The tuple at time `t < 0` is always `G(seed, t)`, whatever the current
//! horizon, so every restart replays the randomness of the previous one on
//! its last `τ/2` steps.

use crate::error::{PathError, Result};
use crate::flip::{step_in_place, FlipInstruction};
use crate::path::{d1, partial_le, FamilySpec, LatticePath};
use crate::rng::TupleStream;
use crate::weights::WeightTable;

pub const DEFAULT_CAP: u64 = 1 << 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CftpResult {
    pub path: LatticePath,
    /// Horizon at which `0̂` and `1̂` met at time 0.
    pub tau_final: u64,
    /// Total tuples replayed over all restarts (each drives both paths).
    pub tuples_consumed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Randomness {
    /// Tuples recomputed from `(seed, t)` on demand.
    #[default]
    Counter,
    /// Tuples materialized once into a buffer and replayed from it.
    StoredBuffer,
}

#[derive(Clone, Debug)]
pub struct Cftp<'a> {
    spec: &'a FamilySpec,
    table: &'a WeightTable,
    tau0: u64,
    cap: u64,
    randomness: Randomness,
    check_sandwich: bool,
}

impl<'a> Cftp<'a> {
    pub fn new(spec: &'a FamilySpec, table: &'a WeightTable) -> Self {
        Self {
            spec,
            table,
            tau0: 1,
            cap: DEFAULT_CAP,
            randomness: Randomness::Counter,
            check_sandwich: false,
        }
    }

    pub fn tau0(mut self, tau0: u64) -> Self {
        self.tau0 = tau0.max(1);
        self
    }

    pub fn cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn randomness(mut self, randomness: Randomness) -> Self {
        self.randomness = randomness;
        self
    }

    /// Verify `lower ⪯ upper` after every step (linear cost per step).
    pub fn check_sandwich(mut self, on: bool) -> Self {
        self.check_sandwich = on;
        self
    }

    pub fn sample(&self, seed: u64) -> Result<CftpResult> {
        let stream = TupleStream::new(seed);
        let (bottom, top) = self.spec.extremal_paths();
        let mut buffer: Vec<FlipInstruction> = Vec::new();
        let mut tau = self.tau0;
        let mut consumed = 0u64;
        loop {
            if tau > self.cap {
                return Err(PathError::NotCoalesced { cap: self.cap });
            }
            if self.randomness == Randomness::StoredBuffer {
                // buffer[k] holds the tuple of time -(k+1)
                for k in buffer.len() as u64..tau {
                    buffer.push(stream.tuple(-(k as i64) - 1, self.table));
                }
            }
            let mut lower = bottom.clone();
            let mut upper = top.clone();
            for t in -(tau as i64)..0 {
                let f = match self.randomness {
                    Randomness::Counter => stream.tuple(t, self.table),
                    Randomness::StoredBuffer => buffer[(-t - 1) as usize],
                };
                step_in_place(&mut lower, &f, self.spec);
                step_in_place(&mut upper, &f, self.spec);
                if self.check_sandwich && !partial_le(&lower, &upper) {
                    return Err(PathError::InvariantViolation(format!(
                        "sandwich broken at t={t}: {lower} not below {upper}"
                    )));
                }
            }
            consumed += tau;
            if lower == upper {
                return Ok(CftpResult {
                    path: lower,
                    tau_final: tau,
                    tuples_consumed: consumed,
                });
            }
            tau = tau.saturating_mul(2);
        }
    }
}

/// One exact sample with the default counter-based randomness.
pub fn cftp_sample(spec: &FamilySpec, table: &WeightTable, seed: u64, tau0: u64, cap: u64) -> Result<CftpResult> {
    Cftp::new(spec, table).tau0(tau0).cap(cap).sample(seed)
}

/// `d1(0̂, 1̂)`: the length of the longest chain between the extremal paths.
pub fn longest_chain_bound(spec: &FamilySpec) -> u64 {
    let (lo, hi) = spec.extremal_paths();
    d1(&lo, &hi).expect("extremal paths share parameters")
}
