//! Forward simulation of the peak/valley chain, the grand coupling and
//! trajectory averages.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PathError, Result};
use crate::flip::{affected_range, step_in_place, FlipInstruction};
use crate::path::{FamilySpec, LatticePath, Step};
use crate::rng::TupleStream;
use crate::weights::WeightTable;

/// Starting state of a forward run.
#[derive(Clone, Debug, Default)]
pub enum Init {
    /// The maximal path `1̂` (the all-up word except for excursions).
    #[default]
    Top,
    Explicit(LatticePath),
}

fn initial_path(spec: &FamilySpec, init: Init) -> Result<LatticePath> {
    match init {
        Init::Top => Ok(spec.max_path()),
        Init::Explicit(p) => {
            if spec.is_member(&p) {
                Ok(p)
            } else {
                Err(PathError::NotMember)
            }
        }
    }
}

/// Runs the chain for `steps` steps with tuples `G(seed, t)`, `t = 1..=steps`,
/// calling `visit(t, path)` after each step.
pub fn run_with(
    spec: &FamilySpec,
    table: &WeightTable,
    steps: u64,
    seed: u64,
    init: Init,
    mut visit: impl FnMut(u64, &LatticePath),
) -> Result<LatticePath> {
    let mut path = initial_path(spec, init)?;
    let stream = TupleStream::new(seed);
    for t in 1..=steps {
        let f = stream.tuple(t as i64, table);
        step_in_place(&mut path, &f, spec);
        visit(t, &path);
    }
    Ok(path)
}

/// `S(T)` of the forward chain.
pub fn mcmc_run(spec: &FamilySpec, table: &WeightTable, steps: u64, seed: u64, init: Init) -> Result<LatticePath> {
    run_with(spec, table, steps, seed, init, |_, _| {})
}

/// Applies the same tuple to every path.
pub fn grand_coupling_step(paths: &[LatticePath], f: &FlipInstruction, spec: &FamilySpec) -> Vec<LatticePath> {
    paths
        .iter()
        .map(|p| {
            let mut q = p.clone();
            step_in_place(&mut q, f, spec);
            q
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    FinalHeight,
    MaxHeight,
    Area,
    PeakCount,
}

impl Functional {
    pub const ALL: [Functional; 4] = [
        Functional::FinalHeight,
        Functional::MaxHeight,
        Functional::Area,
        Functional::PeakCount,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Functional::FinalHeight => "final_height",
            Functional::MaxHeight => "max_height",
            Functional::Area => "area",
            Functional::PeakCount => "peak_count",
        }
    }

    pub fn evaluate(&self, path: &LatticePath) -> f64 {
        match self {
            Functional::FinalHeight => path.final_height() as f64,
            Functional::MaxHeight => path.max_height() as f64,
            Functional::Area => path.heights().iter().map(|&h| h as f64).sum(),
            Functional::PeakCount => path
                .word()
                .windows(2)
                .filter(|w| w[0] == Step::Up && w[1] == Step::Down)
                .count() as f64,
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Functional {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self> {
        Functional::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| PathError::InvalidParams(format!("unknown functional {s:?}")))
    }
}

/// Running sum for the time average `(1/T) Σ f(S(t))`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EstimatorAccumulator {
    steps: u64,
    sum: f64,
}

impl EstimatorAccumulator {
    pub fn push(&mut self, value: f64) {
        self.steps += 1;
        self.sum += value;
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn estimate(&self) -> Option<f64> {
        (self.steps > 0).then(|| self.sum / self.steps as f64)
    }
}

/// Time average of `functional` along one trajectory from `1̂`, streaming.
pub fn estimate_functional(
    spec: &FamilySpec,
    table: &WeightTable,
    steps: u64,
    seed: u64,
    functional: Functional,
) -> Result<f64> {
    if steps == 0 {
        return Err(PathError::InvalidParams("estimator needs at least one step".into()));
    }
    let mut acc = EstimatorAccumulator::default();
    run_with(spec, table, steps, seed, Init::Top, |_, p| acc.push(functional.evaluate(p)))?;
    Ok(acc.estimate().expect("steps > 0"))
}

/// Two paths driven by one tuple stream, tracking `Σ |S_i - T_i|`
/// incrementally so equality is a constant-time test.
#[derive(Clone, Debug)]
pub struct CoupledPair {
    pub lower: LatticePath,
    pub upper: LatticePath,
    l1: i64,
}

impl CoupledPair {
    pub fn new(lower: LatticePath, upper: LatticePath) -> Self {
        let l1 = lower
            .heights()
            .iter()
            .zip(upper.heights())
            .map(|(x, y)| (x - y).abs())
            .sum();
        Self { lower, upper, l1 }
    }

    pub fn coalesced(&self) -> bool {
        self.l1 == 0
    }

    /// `Σ |S_i - T_i|`, i.e. `(a+b) · d1`.
    pub fn l1(&self) -> i64 {
        self.l1
    }

    fn window_l1(&self, start: usize, end: usize) -> i64 {
        self.lower.heights()[start - 1..end]
            .iter()
            .zip(&self.upper.heights()[start - 1..end])
            .map(|(x, y)| (x - y).abs())
            .sum()
    }

    #[inline]
    pub fn step(&mut self, f: &FlipInstruction, spec: &FamilySpec) {
        let (start, end) = affected_range(f, spec);
        let before = self.window_l1(start, end);
        let moved_lower = step_in_place(&mut self.lower, f, spec);
        let moved_upper = step_in_place(&mut self.upper, f, spec);
        if moved_lower || moved_upper {
            self.l1 += self.window_l1(start, end) - before;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingOutcome {
    Coalesced(u64),
    NotCoalesced(u64),
}

impl CouplingOutcome {
    pub fn steps(&self) -> Option<u64> {
        match *self {
            CouplingOutcome::Coalesced(t) => Some(t),
            CouplingOutcome::NotCoalesced(_) => None,
        }
    }
}

/// First time the forward grand coupling started at `(0̂, 1̂)` coalesces.
pub fn coupling_time(spec: &FamilySpec, table: &WeightTable, seed: u64, cap: u64) -> CouplingOutcome {
    let (lo, hi) = spec.extremal_paths();
    let mut pair = CoupledPair::new(lo, hi);
    if pair.coalesced() {
        return CouplingOutcome::Coalesced(0);
    }
    let stream = TupleStream::new(seed);
    for t in 1..=cap {
        pair.step(&stream.tuple(t as i64, table), spec);
        if pair.coalesced() {
            return CouplingOutcome::Coalesced(t);
        }
    }
    CouplingOutcome::NotCoalesced(cap)
}
