//! The peak/valley flip operator and the constrained (rejecting) chain step.

use crate::error::{PathError, Result};
use crate::path::{FamilySpec, LatticePath, Step};

/// Flip direction ε: raise a valley or lower a peak.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

/// The virtual step δ appended after position `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tail {
    Plus,
    Minus,
}

/// One random tuple `(i, ε, δ)` of the chain, with `1 <= i <= n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FlipInstruction {
    index: usize,
    direction: Direction,
    tail: Tail,
}

impl FlipInstruction {
    pub fn new(index: usize, direction: Direction, tail: Tail, n: usize) -> Result<Self> {
        if !(1..=n).contains(&index) {
            return Err(PathError::InvalidParams(format!("flip index {index} outside 1..={n}")));
        }
        Ok(Self {
            index,
            direction,
            tail,
        })
    }

    pub(crate) fn new_unchecked(index: usize, direction: Direction, tail: Tail) -> Self {
        Self {
            index,
            direction,
            tail,
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// All `4n` tuples, in index-major order.
    pub fn all(n: usize) -> impl Iterator<Item = FlipInstruction> {
        (1..=n).flat_map(|i| {
            [Direction::Up, Direction::Down]
                .into_iter()
                .flat_map(move |d| [Tail::Plus, Tail::Minus].into_iter().map(move |t| Self::new_unchecked(i, d, t)))
        })
    }
}

/// The change a flip would make, before any membership test.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Proposal {
    Identity,
    /// Exchange steps `i`, `i+1`.
    Swap(usize),
    /// Replace step `n`.
    Last(Step),
    /// Overwrite the culminating suffix starting at `start`.
    Suffix { start: usize, leading: Step },
}

fn propose(path: &LatticePath, f: &FlipInstruction, spec: &FamilySpec) -> Proposal {
    let n = path.len();
    let i = f.index;
    if i < n {
        let pattern = match f.direction {
            Direction::Up => (Step::Down, Step::Up),
            Direction::Down => (Step::Up, Step::Down),
        };
        if (path.step(i), path.step(i + 1)) == pattern {
            Proposal::Swap(i)
        } else {
            Proposal::Identity
        }
    } else if spec.is_culminating() {
        let k = spec.params().culminating_suffix_len();
        let start = n + 1 - k;
        let leading = match f.direction {
            Direction::Up => Step::Up,
            Direction::Down => Step::Down,
        };
        let unchanged = path.step(start) == leading && (start + 1..=n).all(|j| path.step(j) == Step::Up);
        if unchanged {
            Proposal::Identity
        } else {
            Proposal::Suffix { start, leading }
        }
    } else {
        match (f.direction, f.tail, path.step(n)) {
            (Direction::Up, Tail::Plus, Step::Down) => Proposal::Last(Step::Up),
            (Direction::Down, Tail::Minus, Step::Up) => Proposal::Last(Step::Down),
            _ => Proposal::Identity,
        }
    }
}

fn suffix_steps(len: usize, leading: Step) -> Vec<Step> {
    let mut steps = vec![Step::Up; len];
    steps[0] = leading;
    steps
}

fn apply(path: &mut LatticePath, proposal: &Proposal) {
    match *proposal {
        Proposal::Identity => {}
        Proposal::Swap(i) => path.swap_pair(i),
        Proposal::Last(step) => path.set_last(step),
        Proposal::Suffix { start, leading } => {
            let steps = suffix_steps(path.len() + 1 - start, leading);
            path.set_steps(start, &steps);
        }
    }
}

fn accepted(path: &LatticePath, proposal: &Proposal, spec: &FamilySpec) -> bool {
    let p = spec.params();
    match *proposal {
        Proposal::Identity => true,
        Proposal::Swap(i) => {
            let new_height = path.height(i - 1) + p.step_value(path.step(i + 1));
            spec.is_member_after_flip(path, i, new_height)
        }
        Proposal::Last(step) => {
            let n = path.len();
            spec.is_member_after_flip(path, n, path.height(n - 1) + p.step_value(step))
        }
        Proposal::Suffix { start, leading } => {
            let steps = suffix_steps(path.len() + 1 - start, leading);
            let suffix: Vec<i64> = steps
                .iter()
                .scan(path.height(start - 1), |h, &s| {
                    *h += p.step_value(s);
                    Some(*h)
                })
                .collect();
            spec.is_member_after_suffix(path, start, &suffix)
        }
    }
}

/// `φ(S, i, ε, δ)` without any membership requirement on the result.
pub fn flip_raw(path: &LatticePath, f: &FlipInstruction, spec: &FamilySpec) -> LatticePath {
    let mut out = path.clone();
    apply(&mut out, &propose(path, f, spec));
    out
}

/// Restores the path mutated by [`flip_raw_in_place`].
#[derive(Clone, Debug)]
pub struct FlipUndo {
    start: usize,
    steps: Vec<Step>,
}

impl FlipUndo {
    pub fn undo(self, path: &mut LatticePath) {
        path.set_steps(self.start, &self.steps);
    }
}

/// In-place `φ`. Returns `None` when the flip is the identity.
pub fn flip_raw_in_place(path: &mut LatticePath, f: &FlipInstruction, spec: &FamilySpec) -> Option<FlipUndo> {
    let proposal = propose(path, f, spec);
    let (start, end) = match proposal {
        Proposal::Identity => return None,
        Proposal::Swap(i) => (i, i + 1),
        Proposal::Last(_) => (path.len(), path.len()),
        Proposal::Suffix { start, .. } => (start, path.len()),
    };
    let undo = FlipUndo {
        start,
        steps: path.word()[start - 1..end].to_vec(),
    };
    apply(path, &proposal);
    Some(undo)
}

/// One step of the chain, in place: applies `φ` if the result stays in the
/// family. Returns whether the path changed.
pub fn step_in_place(path: &mut LatticePath, f: &FlipInstruction, spec: &FamilySpec) -> bool {
    let proposal = propose(path, f, spec);
    if proposal == Proposal::Identity || !accepted(path, &proposal, spec) {
        return false;
    }
    apply(path, &proposal);
    true
}

/// One step of the chain: `φ(S, f)` if that is a member, else `S`.
pub fn chain_step(path: &LatticePath, f: &FlipInstruction, spec: &FamilySpec) -> LatticePath {
    let mut out = path.clone();
    step_in_place(&mut out, f, spec);
    out
}

/// Positions `start..=end` whose heights the tuple `f` may change.
pub(crate) fn affected_range(f: &FlipInstruction, spec: &FamilySpec) -> (usize, usize) {
    let n = spec.n();
    if f.index < n {
        (f.index, f.index)
    } else if spec.is_culminating() {
        (n + 1 - spec.params().culminating_suffix_len(), n)
    } else {
        (n, n)
    }
}
