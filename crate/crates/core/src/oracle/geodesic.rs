use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{PathError, Result};
use crate::flip::{chain_step, Direction, FlipInstruction, Tail};
use crate::path::{d1, FamilySpec, LatticePath, Step};

use super::FamilyEnumeration;

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicReport {
    pub pass: bool,
    /// Every member reachable from every other through unit moves.
    pub connected: bool,
    pub max_graph_distance: Option<u64>,
    pub max_d1: u64,
    /// First pair (enumeration indices) whose graph distance differs from
    /// `d1`, with the graph distance (`None` if unreachable) and `d1`.
    pub counterexample: Option<(usize, usize, Option<u64>, u64)>,
}

/// Compares breadth-first distance in the graph of unit chain moves (pairs
/// with positive transition probability at `d1 = 1`) against `d1`, for every
/// pair of members.
pub fn geodesic_check(spec: &FamilySpec, enumeration: &FamilyEnumeration) -> GeodesicReport {
    let m = enumeration.len();
    let adjacency: Vec<Vec<usize>> = enumeration
        .members()
        .iter()
        .map(|p| {
            let mut out: Vec<usize> = FlipInstruction::all(spec.n())
                .map(|f| chain_step(p, &f, spec))
                .filter(|q| d1(p, q).expect("same parameters") == 1)
                .map(|q| enumeration.index_of(&q).expect("chain stays in the family"))
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect();

    let mut connected = true;
    let mut max_graph = 0u64;
    let mut max_d1 = 0u64;
    let mut counterexample = None;
    let mut dist = vec![u64::MAX; m];
    let mut queue = VecDeque::new();
    for src in 0..m {
        dist.iter_mut().for_each(|d| *d = u64::MAX);
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if dist[v] == u64::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (dst, &g) in dist.iter().enumerate() {
            let metric = d1(&enumeration.members()[src], &enumeration.members()[dst]).expect("same parameters");
            max_d1 = max_d1.max(metric);
            if g == u64::MAX {
                connected = false;
            } else {
                max_graph = max_graph.max(g);
            }
            if g != metric && counterexample.is_none() {
                counterexample = Some((src, dst, (g != u64::MAX).then_some(g), metric));
            }
        }
    }
    GeodesicReport {
        pass: counterexample.is_none(),
        connected,
        max_graph_distance: connected.then_some(max_graph),
        max_d1,
        counterexample,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Endpoint {
    First,
    Second,
}

/// One move of the constructive distance-reduction argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicMove {
    /// The new path that replaces `replaced`.
    pub path: LatticePath,
    pub replaced: Endpoint,
}

/// Moves one of `s`, `t` one chain step towards the other.
///
/// With `i0` the first position where they differ and "upper" the path that
/// is higher there: lower the leftmost peak of the upper path at some
/// `j >= i0` (for non-culminating families a final up step counts as a peak
/// at `n`). If the upper path has no such peak, its steps from `i0` on are
/// all up; raise the lower path instead, by the end move if it changes
/// anything, else at its rightmost down step.
pub fn geodesic_step(s: &LatticePath, t: &LatticePath, spec: &FamilySpec) -> Result<GeodesicMove> {
    if !spec.is_member(s) || !spec.is_member(t) {
        return Err(PathError::NotMember);
    }
    let n = spec.n();
    let i0 = (1..=n)
        .find(|&i| s.height(i) != t.height(i))
        .ok_or_else(|| PathError::InvalidParams("geodesic step needs distinct paths".into()))?;
    let (upper, lower, upper_end, lower_end) = if t.height(i0) > s.height(i0) {
        (t, s, Endpoint::Second, Endpoint::First)
    } else {
        (s, t, Endpoint::First, Endpoint::Second)
    };

    let peak = (i0..n).find(|&j| upper.step(j) == Step::Up && upper.step(j + 1) == Step::Down);
    let lowering = match peak {
        Some(j) => Some(FlipInstruction::new_unchecked(j, Direction::Down, Tail::Plus)),
        None if !spec.is_culminating() && upper.step(n) == Step::Up => {
            Some(FlipInstruction::new_unchecked(n, Direction::Down, Tail::Minus))
        }
        None => None,
    };
    if let Some(f) = lowering {
        return checked_move(upper, &f, spec, upper_end);
    }

    let end_up = FlipInstruction::new_unchecked(n, Direction::Up, Tail::Plus);
    let raised = chain_step(lower, &end_up, spec);
    if &raised != lower {
        return Ok(GeodesicMove {
            path: raised,
            replaced: lower_end,
        });
    }
    let j = (1..n)
        .rev()
        .find(|&j| lower.step(j) == Step::Down)
        .ok_or_else(|| PathError::InvariantViolation(format!("no down step to raise in {lower}")))?;
    checked_move(lower, &FlipInstruction::new_unchecked(j, Direction::Up, Tail::Plus), spec, lower_end)
}

fn checked_move(path: &LatticePath, f: &FlipInstruction, spec: &FamilySpec, replaced: Endpoint) -> Result<GeodesicMove> {
    let next = chain_step(path, f, spec);
    if &next == path {
        return Err(PathError::InvariantViolation(format!(
            "distance-reducing move at {} rejected for {path}",
            f.index()
        )));
    }
    Ok(GeodesicMove { path: next, replaced })
}
