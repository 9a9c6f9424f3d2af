//! Brute-force ground truth for small instances: enumeration, exact
//! transition matrices, contraction scans, geodesic and sandwich checks.

mod curvature;
mod geodesic;
mod matrix;
mod sandwich;

use std::collections::HashMap;

pub use curvature::{coupled_expected_distance, curvature_scan, CurvatureReport, PairContraction};
pub use geodesic::{geodesic_check, geodesic_step, Endpoint, GeodesicMove, GeodesicReport};
pub use matrix::{build_transition_matrix, TransitionMatrix, MATRIX_LIMIT};
pub use sandwich::{sandwich_closure_check, SandwichReport};

use crate::error::{PathError, Result};
use crate::path::{FamilyConstraint, FamilySpec, LatticePath, Step};

/// Largest family the enumerator will materialize.
pub const ENUMERATION_LIMIT: f64 = 1e7;

/// Largest `n` for which the unpruned `2^n` filter is attempted.
pub const UNPRUNED_MAX_N: usize = 24;

/// All members of a family in lexicographic order (`Down < Up`).
#[derive(Clone, Debug)]
pub struct FamilyEnumeration {
    members: Vec<LatticePath>,
    index: HashMap<Vec<Step>, usize>,
}

impl FamilyEnumeration {
    fn from_members(members: Vec<LatticePath>) -> Self {
        let index = members.iter().enumerate().map(|(k, p)| (p.word().to_vec(), k)).collect();
        Self { members, index }
    }

    pub fn members(&self) -> &[LatticePath] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn index_of(&self, path: &LatticePath) -> Option<usize> {
        self.index.get(path.word()).copied()
    }
}

/// Member count for lower-bound families (exact) or an upper bound by the
/// meander count (culminating), by dynamic programming over `(i, ups)`.
pub fn estimated_count(spec: &FamilySpec) -> f64 {
    let n = spec.n();
    let p = *spec.params();
    let counting = match spec.constraint() {
        FamilyConstraint::Culminating => {
            FamilySpec::new(p, FamilyConstraint::Meander).expect("meanders are never empty")
        }
        _ => spec.clone(),
    };
    let height = |i: usize, k: usize| k as i64 * p.a() - (i - k) as i64 * p.b();
    let mut ways = vec![1.0f64];
    for i in 1..=n {
        let mut next = vec![0.0f64; i + 1];
        for (k, &w) in ways.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for k2 in [k, k + 1] {
                let h = height(i, k2);
                if counting.completion_feasible(i, h, h) {
                    next[k2] += w;
                }
            }
        }
        ways = next;
    }
    ways.iter().sum()
}

/// Depth-first generation pruned by the completion table.
pub fn enumerate_family(spec: &FamilySpec) -> Result<FamilyEnumeration> {
    let estimate = estimated_count(spec);
    if estimate > ENUMERATION_LIMIT {
        return Err(PathError::SizeGuard {
            what: "family size",
            count: estimate,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut members = Vec::new();
    let mut word = Vec::with_capacity(spec.n());
    descend(spec, &mut word, 0, 0, &mut members);
    Ok(FamilyEnumeration::from_members(members))
}

fn descend(spec: &FamilySpec, word: &mut Vec<Step>, height: i64, running_max: i64, out: &mut Vec<LatticePath>) {
    let i = word.len();
    if i == spec.n() {
        let path = LatticePath::from_word(*spec.params(), word.clone()).expect("length is n");
        debug_assert!(spec.is_member(&path));
        out.push(path);
        return;
    }
    for step in [Step::Down, Step::Up] {
        let h = height + spec.params().step_value(step);
        let m = running_max.max(h);
        if spec.completion_feasible(i + 1, h, m) {
            word.push(step);
            descend(spec, word, h, m, out);
            word.pop();
        }
    }
}

/// Filters all `2^n` words through the full membership test, same order as
/// [`enumerate_family`].
pub fn enumerate_unpruned(spec: &FamilySpec) -> Result<Vec<LatticePath>> {
    let n = spec.n();
    if n > UNPRUNED_MAX_N {
        return Err(PathError::SizeGuard {
            what: "word count 2^n",
            count: 2f64.powi(n as i32),
            limit: 2f64.powi(UNPRUNED_MAX_N as i32),
        });
    }
    Ok(all_words(spec)
        .filter(|p| spec.is_member(p))
        .collect())
}

/// Every word of length `n`, lexicographic with `Down < Up`.
pub(crate) fn all_words(spec: &FamilySpec) -> impl Iterator<Item = LatticePath> + '_ {
    let n = spec.n();
    (0u64..1 << n).map(move |mask| {
        let word = (0..n)
            .map(|j| if mask >> (n - 1 - j) & 1 == 1 { Step::Up } else { Step::Down })
            .collect();
        LatticePath::from_word(*spec.params(), word).expect("length is n")
    })
}

/// `(1/2) Σ |freq(x) - 1/m|` over members `x`.
pub fn empirical_tv(samples: &[LatticePath], enumeration: &FamilyEnumeration) -> Result<f64> {
    let m = enumeration.len();
    let mut counts = vec![0u64; m];
    for s in samples {
        let k = enumeration.index_of(s).ok_or(PathError::NotMember)?;
        counts[k] += 1;
    }
    Ok(tv_from_counts(&counts))
}

/// Total variation between the empirical law of `counts` and uniform.
pub fn tv_from_counts(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let m = counts.len() as f64;
    0.5 * counts
        .iter()
        .map(|&c| (c as f64 / total as f64 - 1.0 / m).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::StepParams;

    fn spec(n: usize, a: i64, b: i64, c: FamilyConstraint) -> FamilySpec {
        FamilySpec::new(StepParams::new(n, a, b).unwrap(), c).unwrap()
    }

    fn words(e: &FamilyEnumeration) -> Vec<String> {
        e.members().iter().map(|p| p.word_string()).collect()
    }

    #[test]
    fn enumeration_examples() {
        let e = enumerate_family(&spec(6, 1, 1, FamilyConstraint::Excursion)).unwrap();
        assert_eq!(e.len(), 5);
        assert_eq!(words(&enumerate_family(&spec(3, 1, 1, FamilyConstraint::Meander)).unwrap()), ["UDU", "UUD", "UUU"]);
        let e = enumerate_family(&spec(6, 1, 2, FamilyConstraint::Excursion)).unwrap();
        assert_eq!(words(&e), ["UUDUUD", "UUUDUD", "UUUUDD"]);
        assert_eq!(words(&enumerate_family(&spec(3, 1, 1, FamilyConstraint::Culminating)).unwrap()), ["UDU", "UUU"]);
        assert_eq!(enumerate_family(&spec(8, 1, 1, FamilyConstraint::Excursion)).unwrap().len(), 14);
    }

    #[test]
    fn estimated_count_is_exact_for_lower_bound_families() {
        for c in [
            FamilyConstraint::Meander,
            FamilyConstraint::Excursion,
            FamilyConstraint::Wall { h: 2, r: 4, s: 7 },
        ] {
            let s = spec(12, 1, 1, c);
            assert_eq!(estimated_count(&s), enumerate_family(&s).unwrap().len() as f64);
        }
        let c = spec(12, 1, 1, FamilyConstraint::Culminating);
        assert!(estimated_count(&c) >= enumerate_family(&c).unwrap().len() as f64);
    }

    #[test]
    fn size_guard() {
        let s = spec(60, 1, 1, FamilyConstraint::Meander);
        assert!(matches!(enumerate_family(&s), Err(PathError::SizeGuard { .. })));
        assert!(matches!(enumerate_unpruned(&s), Err(PathError::SizeGuard { .. })));
    }

    #[test]
    fn empirical_tv_trivial_cases() {
        let e = enumerate_family(&spec(8, 1, 1, FamilyConstraint::Excursion)).unwrap();
        assert_eq!(empirical_tv(e.members(), &e).unwrap(), 0.0);
        let same = vec![e.members()[3].clone(); 40];
        assert!((empirical_tv(&same, &e).unwrap() - (1.0 - 1.0 / 14.0)).abs() < 1e-15);
        let outsider = LatticePath::all_up(StepParams::new(8, 1, 1).unwrap());
        assert_eq!(empirical_tv(&[outsider], &e), Err(PathError::NotMember));
    }
}
