use crate::error::{PathError, Result};
use crate::flip::{chain_step, FlipInstruction};
use crate::path::FamilySpec;
use crate::weights::WeightTable;

use super::FamilyEnumeration;

/// Largest family for dense matrix work.
pub const MATRIX_LIMIT: usize = 20_000;

/// Exact transition matrix over an enumerated family, built tuple by tuple:
/// `P[R][S] = Σ probs_i / 4` over the `(i, ε, δ)` with `chain_step(R) = S`.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    size: usize,
    dense: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
}

pub fn build_transition_matrix(
    spec: &FamilySpec,
    table: &WeightTable,
    enumeration: &FamilyEnumeration,
) -> Result<TransitionMatrix> {
    let m = enumeration.len();
    if m > MATRIX_LIMIT {
        return Err(PathError::SizeGuard {
            what: "matrix dimension",
            count: m as f64,
            limit: MATRIX_LIMIT as f64,
        });
    }
    let mut dense = vec![0.0; m * m];
    for (r, path) in enumeration.members().iter().enumerate() {
        for f in FlipInstruction::all(spec.n()) {
            let next = chain_step(path, &f, spec);
            let s = enumeration.index_of(&next).ok_or_else(|| {
                PathError::InvariantViolation(format!("chain left the family: {path} -> {next}"))
            })?;
            dense[r * m + s] += table.prob(f.index()) / 4.0;
        }
    }
    let rows = (0..m)
        .map(|r| {
            (0..m)
                .filter_map(|s| {
                    let v = dense[r * m + s];
                    (v != 0.0).then_some((s, v))
                })
                .collect()
        })
        .collect();
    Ok(TransitionMatrix { size: m, dense, rows })
}

impl TransitionMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, r: usize, s: usize) -> f64 {
        self.dense[r * self.size + s]
    }

    pub fn row(&self, r: usize) -> &[(usize, f64)] {
        &self.rows[r]
    }

    pub fn max_row_sum_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| (row.iter().map(|&(_, v)| v).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_asymmetry(&self) -> f64 {
        let m = self.size;
        let mut worst = 0.0f64;
        for r in 0..m {
            for s in r + 1..m {
                worst = worst.max((self.get(r, s) - self.get(s, r)).abs());
            }
        }
        worst
    }

    pub fn min_entry(&self) -> f64 {
        self.dense.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max |(u P)_s - u_s|` for the uniform row vector `u`.
    pub fn stationarity_error(&self) -> f64 {
        let m = self.size;
        let u = vec![1.0 / m as f64; m];
        self.left_multiply(&u)
            .iter()
            .map(|v| (v - 1.0 / m as f64).abs())
            .fold(0.0, f64::max)
    }

    /// `v P` for a row vector `v`.
    pub fn left_multiply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        for (r, row) in self.rows.iter().enumerate() {
            let w = v[r];
            if w == 0.0 {
                continue;
            }
            for &(s, p) in row {
                out[s] += w * p;
            }
        }
        out
    }

    /// `TV(δ_start P^t, uniform)` for `t = 0..=t_max`.
    pub fn exact_tv_decay(&self, start: usize, t_max: usize) -> Vec<f64> {
        let m = self.size;
        let mut v = vec![0.0; m];
        v[start] = 1.0;
        let mut out = Vec::with_capacity(t_max + 1);
        out.push(tv_to_uniform(&v));
        for _ in 0..t_max {
            v = self.left_multiply(&v);
            out.push(tv_to_uniform(&v));
        }
        out
    }

    /// `max_v TV(δ_v P^t, uniform)` for `t = 0..=t_max`.
    pub fn worst_tv_decay(&self, t_max: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(t_max + 1);
        self.iterate_all_starts(|t, worst| {
            out.push(worst);
            t < t_max
        });
        out
    }

    /// Smallest `t` with `max_v TV(δ_v P^t, uniform) <= 1/e`.
    pub fn exact_tmix(&self, t_cap: u64) -> Result<u64> {
        let threshold = (-1.0f64).exp();
        let mut found = None;
        self.iterate_all_starts(|t, worst| {
            if worst <= threshold {
                found = Some(t as u64);
                false
            } else {
                (t as u64) < t_cap
            }
        });
        found.ok_or(PathError::NotCoalesced { cap: t_cap })
    }

    /// Evolves every point mass together; `visit(t, worst_tv)` returns
    /// whether to continue.
    fn iterate_all_starts(&self, mut visit: impl FnMut(usize, f64) -> bool) {
        let m = self.size;
        // dist[v * m + s]: mass at s after t steps from v
        let mut dist = vec![0.0; m * m];
        for v in 0..m {
            dist[v * m + v] = 1.0;
        }
        let mut next = vec![0.0; m * m];
        let mut t = 0usize;
        loop {
            let worst = (0..m)
                .map(|v| tv_to_uniform(&dist[v * m..(v + 1) * m]))
                .fold(0.0, f64::max);
            if !visit(t, worst) {
                return;
            }
            next.iter_mut().for_each(|x| *x = 0.0);
            for v in 0..m {
                let src = &dist[v * m..(v + 1) * m];
                let dst = &mut next[v * m..(v + 1) * m];
                for (r, row) in self.rows.iter().enumerate() {
                    let w = src[r];
                    if w == 0.0 {
                        continue;
                    }
                    for &(s, p) in row {
                        dst[s] += w * p;
                    }
                }
            }
            std::mem::swap(&mut dist, &mut next);
            t += 1;
        }
    }
}

pub(crate) fn tv_to_uniform(v: &[f64]) -> f64 {
    let u = 1.0 / v.len() as f64;
    0.5 * v.iter().map(|x| (x - u).abs()).sum::<f64>()
}
