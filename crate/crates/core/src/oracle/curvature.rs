use serde::Serialize;

use crate::flip::{chain_step, FlipInstruction};
use crate::path::{d1, FamilySpec, LatticePath};
use crate::weights::WeightTable;

use super::FamilyEnumeration;

/// Exact `E[d1(S', T')]` after one step of the shared-tuple coupling.
pub fn coupled_expected_distance(s: &LatticePath, t: &LatticePath, spec: &FamilySpec, table: &WeightTable) -> f64 {
    FlipInstruction::all(spec.n())
        .map(|f| {
            let d = d1(&chain_step(s, &f, spec), &chain_step(t, &f, spec)).expect("same parameters");
            table.prob(f.index()) / 4.0 * d as f64
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairContraction {
    /// Enumeration index of the lower path.
    pub lower: usize,
    /// Enumeration index of the upper path.
    pub upper: usize,
    /// The single position where the pair differs.
    pub position: usize,
    pub expected_distance: f64,
    /// `1 - E[d1']`.
    pub contraction: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureReport {
    pub pairs: Vec<PairContraction>,
    pub min_contraction: f64,
    /// Pairs within `1e-12` of the minimum.
    pub witnesses: Vec<PairContraction>,
}

impl CurvatureReport {
    /// Pairs whose expected distance equals `value` within `tol`.
    pub fn pairs_at(&self, value: f64, tol: f64) -> impl Iterator<Item = &PairContraction> {
        self.pairs.iter().filter(move |p| (p.expected_distance - value).abs() <= tol)
    }
}

/// Evaluates the coupled one-step distance on every pair at `d1 = 1`.
pub fn curvature_scan(spec: &FamilySpec, table: &WeightTable, enumeration: &FamilyEnumeration) -> CurvatureReport {
    let q = spec.params().quantum();
    let mut pairs = Vec::new();
    for (lower, path) in enumeration.members().iter().enumerate() {
        for i in 1..=spec.n() {
            let mut hs = path.heights().to_vec();
            hs[i - 1] += q;
            let Ok(raised) = LatticePath::from_heights(*spec.params(), hs) else {
                continue;
            };
            let Some(upper) = enumeration.index_of(&raised) else {
                continue;
            };
            let expected = coupled_expected_distance(path, &raised, spec, table);
            pairs.push(PairContraction {
                lower,
                upper,
                position: i,
                expected_distance: expected,
                contraction: 1.0 - expected,
            });
        }
    }
    let min_contraction = pairs.iter().map(|p| p.contraction).fold(f64::INFINITY, f64::min);
    let witnesses = pairs
        .iter()
        .filter(|p| p.contraction <= min_contraction + 1e-12)
        .cloned()
        .collect();
    CurvatureReport {
        pairs,
        min_contraction,
        witnesses,
    }
}
