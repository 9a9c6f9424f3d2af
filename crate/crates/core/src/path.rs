//! Lattice paths with steps `+a` / `-b`, the four constrained families, the
//! `d1` transport distance and the coordinatewise partial order.
//!
//! Positions are 1-based throughout the public API: `height(i)` is `S_i` for
//! `1 <= i <= n`, with `S_0 = 0` implicit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{PathError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Step {
    Down = 0,
    Up = 1,
}

impl Step {
    pub fn as_char(self) -> char {
        match self {
            Step::Up => 'U',
            Step::Down => 'D',
        }
    }

    pub fn from_char(c: char) -> Option<Step> {
        match c {
            'U' => Some(Step::Up),
            'D' => Some(Step::Down),
            _ => None,
        }
    }
}

/// Path length and step sizes. An up step adds `a`, a down step adds `-b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StepParams {
    n: usize,
    a: i64,
    b: i64,
}

impl StepParams {
    pub fn new(n: usize, a: i64, b: i64) -> Result<Self> {
        if n == 0 {
            return Err(PathError::InvalidParams("n must be at least 1".into()));
        }
        if a < 1 || b < 1 {
            return Err(PathError::InvalidParams(format!(
                "step sizes must be positive, got a={a}, b={b}"
            )));
        }
        let span = (n as i128) * (a.max(b) as i128 + a.min(b) as i128);
        if span > i64::MAX as i128 {
            return Err(PathError::InvalidParams(format!(
                "n*(a+b) = {span} does not fit in 64-bit heights"
            )));
        }
        Ok(Self { n, a, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// `a + b`, the height change produced by exchanging a peak and a valley.
    pub fn quantum(&self) -> i64 {
        self.a + self.b
    }

    pub fn step_value(&self, step: Step) -> i64 {
        match step {
            Step::Up => self.a,
            Step::Down => -self.b,
        }
    }

    /// Number of steps rewritten by the culminating end move: `ceil(b/a) + 1`.
    pub fn culminating_suffix_len(&self) -> usize {
        ((self.b + self.a - 1) / self.a) as usize + 1
    }

    /// Up-step count of a path with `i` steps ending at `height`, if `height`
    /// lies on the lattice reachable in `i` steps.
    pub fn ups_at(&self, i: usize, height: i64) -> Option<usize> {
        let num = height + i as i64 * self.b;
        if num < 0 || num % self.quantum() != 0 {
            return None;
        }
        let k = (num / self.quantum()) as usize;
        (k <= i).then_some(k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyConstraint {
    /// `S_i >= 0` for every `i`.
    Meander,
    /// `S_i >= h` for `r <= i <= s`; nothing outside the window.
    Wall { h: i64, r: usize, s: usize },
    /// `S_i >= 0` for every `i` and `S_n = 0`.
    Excursion,
    /// `0 <= S_i <= S_n` for every `i`.
    Culminating,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Meander,
    Wall,
    Excursion,
    Culminating,
}

impl FamilyConstraint {
    pub fn kind(&self) -> FamilyKind {
        match self {
            FamilyConstraint::Meander => FamilyKind::Meander,
            FamilyConstraint::Wall { .. } => FamilyKind::Wall,
            FamilyConstraint::Excursion => FamilyKind::Excursion,
            FamilyConstraint::Culminating => FamilyKind::Culminating,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyKind::Meander => "meander",
            FamilyKind::Wall => "wall",
            FamilyKind::Excursion => "excursion",
            FamilyKind::Culminating => "culminating",
        };
        f.write_str(s)
    }
}

/// Backward-feasibility data: whether a prefix state can still be completed
/// into a member of the family.
#[derive(Clone, Debug)]
enum Completion {
    /// Lower-bound families. `low[i]` is the least height at position `i`
    /// (0..=n) from which some completion exists. Excursions also carry the
    /// total up/down step budget.
    Lower {
        low: Vec<i64>,
        budget: Option<(usize, usize)>,
    },
    /// From height `h >= 0` at position `i` the largest reachable final height
    /// is `h + (n - i) a` (all up steps), so completion given running maximum
    /// `M` is feasible iff that value is at least `M`.
    Culminating,
}

/// A family of paths: step parameters plus a constraint, validated non-empty.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    params: StepParams,
    constraint: FamilyConstraint,
    completion: Completion,
}

impl FamilySpec {
    pub fn new(params: StepParams, constraint: FamilyConstraint) -> Result<Self> {
        let n = params.n;
        let completion = match constraint {
            FamilyConstraint::Meander => Completion::Lower {
                low: backward_lows(&params, |_| Some(0)),
                budget: None,
            },
            FamilyConstraint::Wall { h, r, s } => {
                if r < 1 || s > n {
                    return Err(PathError::InvalidParams(format!(
                        "wall window [{r},{s}] must lie within 1..={n}"
                    )));
                }
                if r <= s && h > r as i64 * params.a {
                    return Err(PathError::EmptyFamily(format!(
                        "wall height {h} exceeds r*a = {}",
                        r as i64 * params.a
                    )));
                }
                Completion::Lower {
                    low: backward_lows(&params, |i| (r <= i && i <= s).then_some(h)),
                    budget: None,
                }
            }
            FamilyConstraint::Excursion => {
                if (n as i64 * params.b) % params.quantum() != 0 {
                    return Err(PathError::EmptyFamily(
                        "n·b not divisible by a+b".to_string(),
                    ));
                }
                let ups = (n as i64 * params.b / params.quantum()) as usize;
                Completion::Lower {
                    low: backward_lows(&params, |_| Some(0)),
                    budget: Some((ups, n - ups)),
                }
            }
            FamilyConstraint::Culminating => {
                let k = params.culminating_suffix_len();
                if n <= k {
                    return Err(PathError::InvalidParams(format!(
                        "culminating paths need n > ceil(b/a)+1 = {k}, got n = {n}"
                    )));
                }
                Completion::Culminating
            }
        };
        let spec = Self {
            params,
            constraint,
            completion,
        };
        if !spec.completion_feasible(0, 0, 0) {
            return Err(PathError::EmptyFamily(format!(
                "no path of length {n} satisfies the constraint"
            )));
        }
        Ok(spec)
    }

    pub fn params(&self) -> &StepParams {
        &self.params
    }

    pub fn constraint(&self) -> &FamilyConstraint {
        &self.constraint
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn is_culminating(&self) -> bool {
        matches!(self.constraint, FamilyConstraint::Culminating)
    }

    /// Whether a prefix of `i` steps ending at `height`, with running maximum
    /// `running_max` over `S_1..S_i`, extends to a member. The prefix itself
    /// must already satisfy the constraint at positions `1..=i`.
    pub fn completion_feasible(&self, i: usize, height: i64, running_max: i64) -> bool {
        match &self.completion {
            Completion::Lower { low, budget } => {
                if height < low[i] {
                    return false;
                }
                match budget {
                    None => true,
                    Some((ups, downs)) => match self.params.ups_at(i, height) {
                        Some(k) => k <= *ups && i - k <= *downs,
                        None => false,
                    },
                }
            }
            Completion::Culminating => {
                height >= 0 && height + (self.params.n - i) as i64 * self.params.a >= running_max
            }
        }
    }

    /// Full membership test, `O(n)`.
    pub fn is_member(&self, path: &LatticePath) -> bool {
        if path.params != self.params {
            return false;
        }
        let hs = &path.heights;
        match self.constraint {
            FamilyConstraint::Meander => hs.iter().all(|&h| h >= 0),
            FamilyConstraint::Wall { h, r, s } => (r..=s).all(|i| hs[i - 1] >= h),
            FamilyConstraint::Excursion => hs.iter().all(|&h| h >= 0) && hs[hs.len() - 1] == 0,
            FamilyConstraint::Culminating => {
                let last = hs[hs.len() - 1];
                hs.iter().all(|&h| 0 <= h && h <= last)
            }
        }
    }

    /// Membership of `path` with only `S_i` replaced by `new_height`,
    /// assuming `path` itself is a member. Constant time except for the
    /// culminating case `i = n`, which scans the prefix maximum.
    pub fn is_member_after_flip(&self, path: &LatticePath, i: usize, new_height: i64) -> bool {
        let n = self.params.n;
        debug_assert!((1..=n).contains(&i));
        match self.constraint {
            FamilyConstraint::Meander => new_height >= 0,
            FamilyConstraint::Wall { h, r, s } => !(r <= i && i <= s) || new_height >= h,
            FamilyConstraint::Excursion => {
                if i == n {
                    new_height == 0
                } else {
                    new_height >= 0
                }
            }
            FamilyConstraint::Culminating => {
                if i < n {
                    0 <= new_height && new_height <= path.heights[n - 1]
                } else {
                    new_height >= 0 && path.heights[..n - 1].iter().all(|&h| h <= new_height)
                }
            }
        }
    }

    /// Membership of `path` with heights `start..=n` replaced by `suffix`
    /// (the culminating end move). Linear time.
    pub fn is_member_after_suffix(&self, path: &LatticePath, start: usize, suffix: &[i64]) -> bool {
        let n = self.params.n;
        debug_assert_eq!(start + suffix.len(), n + 1);
        let prefix = &path.heights[..start - 1];
        match self.constraint {
            FamilyConstraint::Culminating => {
                let last = suffix[suffix.len() - 1];
                prefix.iter().chain(suffix).all(|&h| 0 <= h && h <= last)
            }
            _ => {
                let mut probe = path.clone();
                probe.heights[start - 1..].copy_from_slice(suffix);
                self.is_member(&probe)
            }
        }
    }

    /// The coordinatewise minimum and maximum members, built greedily from
    /// the completion table.
    pub fn extremal_paths(&self) -> (LatticePath, LatticePath) {
        (self.greedy(Step::Down), self.greedy(Step::Up))
    }

    pub fn min_path(&self) -> LatticePath {
        self.greedy(Step::Down)
    }

    pub fn max_path(&self) -> LatticePath {
        self.greedy(Step::Up)
    }

    fn greedy(&self, preferred: Step) -> LatticePath {
        let other = match preferred {
            Step::Up => Step::Down,
            Step::Down => Step::Up,
        };
        let n = self.params.n;
        let mut word = Vec::with_capacity(n);
        let mut height = 0i64;
        let mut running_max = 0i64;
        for i in 1..=n {
            let mut chosen = other;
            let candidate = height + self.params.step_value(preferred);
            if self.prefix_ok(i, candidate) && self.completion_feasible(i, candidate, running_max.max(candidate)) {
                chosen = preferred;
            }
            height += self.params.step_value(chosen);
            running_max = running_max.max(height);
            word.push(chosen);
        }
        let path = LatticePath::from_word(self.params, word).expect("length is n");
        debug_assert!(self.is_member(&path));
        path
    }

    /// Pointwise constraint at position `i` alone (culminating upper bound
    /// excluded; it is covered by the completion test).
    fn prefix_ok(&self, i: usize, height: i64) -> bool {
        match self.constraint {
            FamilyConstraint::Meander | FamilyConstraint::Excursion | FamilyConstraint::Culminating => {
                height >= 0
            }
            FamilyConstraint::Wall { h, r, s } => !(r <= i && i <= s) || height >= h,
        }
    }
}

/// Least completion-feasible height at each position `0..=n` for a family
/// whose only constraints are pointwise lower bounds.
fn backward_lows(params: &StepParams, bound: impl Fn(usize) -> Option<i64>) -> Vec<i64> {
    let n = params.n;
    let mut low = vec![i64::MIN; n + 1];
    let mut next = i64::MIN;
    for i in (0..=n).rev() {
        let own = if i == 0 { None } else { bound(i) };
        let carried = if i == n { i64::MIN } else { next.saturating_sub(params.a) };
        low[i] = own.map_or(carried, |b| b.max(carried));
        next = low[i];
    }
    low
}

/// Prefix sums of `word` with `Up = +a`, `Down = -b`.
pub fn heights(word: &[Step], params: &StepParams) -> Result<Vec<i64>> {
    if word.len() != params.n {
        return Err(PathError::LengthMismatch {
            expected: params.n,
            got: word.len(),
        });
    }
    Ok(word
        .iter()
        .scan(0i64, |acc, &s| {
            *acc += params.step_value(s);
            Some(*acc)
        })
        .collect())
}

/// A word over `{Up, Down}` together with its cached height profile.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePath {
    params: StepParams,
    word: Vec<Step>,
    heights: Vec<i64>,
}

impl LatticePath {
    pub fn from_word(params: StepParams, word: Vec<Step>) -> Result<Self> {
        let heights = heights(&word, &params)?;
        Ok(Self {
            params,
            word,
            heights,
        })
    }

    /// Rebuilds the word from a height profile; every increment must be `a`
    /// or `-b`.
    pub fn from_heights(params: StepParams, heights: Vec<i64>) -> Result<Self> {
        if heights.len() != params.n {
            return Err(PathError::LengthMismatch {
                expected: params.n,
                got: heights.len(),
            });
        }
        let mut prev = 0;
        let mut word = Vec::with_capacity(params.n);
        for (i, &h) in heights.iter().enumerate() {
            let step = match h - prev {
                d if d == params.a => Step::Up,
                d if d == -params.b => Step::Down,
                d => {
                    return Err(PathError::Parse(format!(
                        "increment {d} at position {} is neither +{} nor -{}",
                        i + 1,
                        params.a,
                        params.b
                    )))
                }
            };
            word.push(step);
            prev = h;
        }
        Ok(Self {
            params,
            word,
            heights,
        })
    }

    pub fn parse(params: StepParams, word: &str) -> Result<Self> {
        let steps = word
            .chars()
            .map(|c| Step::from_char(c).ok_or_else(|| PathError::Parse(format!("invalid step letter {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_word(params, steps)
    }

    pub fn all_up(params: StepParams) -> Self {
        Self::from_word(params, vec![Step::Up; params.n]).expect("length is n")
    }

    pub fn params(&self) -> &StepParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn word(&self) -> &[Step] {
        &self.word
    }

    pub fn heights(&self) -> &[i64] {
        &self.heights
    }

    /// `S_i` for `0 <= i <= n`.
    pub fn height(&self, i: usize) -> i64 {
        if i == 0 {
            0
        } else {
            self.heights[i - 1]
        }
    }

    /// `s_i` for `1 <= i <= n`.
    pub fn step(&self, i: usize) -> Step {
        self.word[i - 1]
    }

    pub fn final_height(&self) -> i64 {
        self.heights[self.heights.len() - 1]
    }

    pub fn max_height(&self) -> i64 {
        self.heights.iter().copied().max().unwrap_or(0)
    }

    pub fn word_string(&self) -> String {
        self.word.iter().map(|s| s.as_char()).collect()
    }

    /// Full consistency check of the height cache.
    pub fn check_invariants(&self) -> bool {
        heights(&self.word, &self.params).is_ok_and(|hs| hs == self.heights)
    }

    /// Exchanges steps `i` and `i+1` (a peak/valley swap), moving `S_i` by
    /// `±(a+b)`.
    pub(crate) fn swap_pair(&mut self, i: usize) {
        let (x, y) = (self.word[i - 1], self.word[i]);
        debug_assert_ne!(x, y);
        self.word[i - 1] = y;
        self.word[i] = x;
        let prev = if i == 1 { 0 } else { self.heights[i - 2] };
        self.heights[i - 1] = prev + self.params.step_value(y);
        debug_assert_eq!(self.heights[i - 1] + self.params.step_value(x), self.heights[i]);
    }

    /// Replaces the last step.
    pub(crate) fn set_last(&mut self, step: Step) {
        let n = self.word.len();
        self.word[n - 1] = step;
        self.heights[n - 1] = self.height(n - 1) + self.params.step_value(step);
    }

    /// Overwrites steps `start..start + steps.len()` and recomputes their
    /// heights. The replaced block must either reach position `n` or keep its
    /// step sum, so later heights stay valid.
    pub(crate) fn set_steps(&mut self, start: usize, steps: &[Step]) {
        let end = start - 1 + steps.len();
        let mut h = self.height(start - 1);
        for (offset, &s) in steps.iter().enumerate() {
            h += self.params.step_value(s);
            self.word[start - 1 + offset] = s;
            self.heights[start - 1 + offset] = h;
        }
        debug_assert!(end == self.word.len() || h + self.params.step_value(self.word[end]) == self.heights[end]);
    }
}

impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word_string())
    }
}

/// `(1/(a+b)) Σ |S_i - T_i|`.
pub fn d1(s: &LatticePath, t: &LatticePath) -> Result<u64> {
    if s.params != t.params {
        return Err(PathError::ParamsMismatch);
    }
    let sum: i128 = s
        .heights
        .iter()
        .zip(&t.heights)
        .map(|(&x, &y)| (x as i128 - y as i128).abs())
        .sum();
    let q = s.params.quantum() as i128;
    if sum % q != 0 {
        return Err(PathError::Indivisible {
            sum: sum as i64,
            modulus: q as i64,
        });
    }
    Ok((sum / q) as u64)
}

/// `S ⪯ T` iff `S_i <= T_i` for every `i`.
pub fn partial_le(s: &LatticePath, t: &LatticePath) -> bool {
    debug_assert_eq!(s.params, t.params);
    s.heights.iter().zip(&t.heights).all(|(x, y)| x <= y)
}

pub fn pointwise_min(s: &LatticePath, t: &LatticePath) -> LatticePath {
    combine(s, t, i64::min)
}

pub fn pointwise_max(s: &LatticePath, t: &LatticePath) -> LatticePath {
    combine(s, t, i64::max)
}

// Same-position heights differ by multiples of a+b, so two paths can only
// cross where they touch and the combined profile keeps valid increments.
fn combine(s: &LatticePath, t: &LatticePath, pick: fn(i64, i64) -> i64) -> LatticePath {
    assert_eq!(s.params, t.params, "paths must share step parameters");
    let hs = s.heights.iter().zip(&t.heights).map(|(&x, &y)| pick(x, y)).collect();
    LatticePath::from_heights(s.params, hs).expect("pointwise extremum of lattice paths is a path")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallRecord {
    pub h: i64,
    pub r: usize,
    pub s: usize,
}

/// JSON form of a path. Heights are never stored; they are recomputed on load.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRecord {
    pub n: usize,
    pub a: i64,
    pub b: i64,
    pub family: FamilyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall: Option<WallRecord>,
    pub word: String,
}

impl PathRecord {
    pub fn new(spec: &FamilySpec, path: &LatticePath) -> Self {
        let p = spec.params();
        let wall = match *spec.constraint() {
            FamilyConstraint::Wall { h, r, s } => Some(WallRecord { h, r, s }),
            _ => None,
        };
        Self {
            n: p.n(),
            a: p.a(),
            b: p.b(),
            family: spec.constraint().kind(),
            wall,
            word: path.word_string(),
        }
    }

    pub fn spec(&self) -> Result<FamilySpec> {
        let params = StepParams::new(self.n, self.a, self.b)?;
        let constraint = match (self.family, self.wall) {
            (FamilyKind::Meander, _) => FamilyConstraint::Meander,
            (FamilyKind::Excursion, _) => FamilyConstraint::Excursion,
            (FamilyKind::Culminating, _) => FamilyConstraint::Culminating,
            (FamilyKind::Wall, Some(w)) => FamilyConstraint::Wall { h: w.h, r: w.r, s: w.s },
            (FamilyKind::Wall, None) => {
                return Err(PathError::Parse("wall family requires a \"wall\" object".into()))
            }
        };
        FamilySpec::new(params, constraint)
    }

    /// Rebuilds the family and the path; the path must be a member.
    pub fn load(&self) -> Result<(FamilySpec, LatticePath)> {
        let spec = self.spec()?;
        let path = LatticePath::parse(*spec.params(), &self.word)?;
        if !spec.is_member(&path) {
            return Err(PathError::NotMember);
        }
        Ok((spec, path))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| PathError::Parse(e.to_string()))
    }
}
