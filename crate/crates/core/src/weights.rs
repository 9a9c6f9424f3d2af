//! Site-selection distribution over positions `1..=n`.
//!
//! Quadratic mode uses the concave profile `raw_i = i(2n-i) κ0 + α` with
//! `κ0 = 3 / (2n²(n+1))` and `α = 1/(4n³)`, renormalized by its sum `Z`.
//! The profile satisfies `raw_i - raw_{i-1}/2 - raw_{i+1}/2 = κ0` at every
//! interior position, which after normalization reads `κ0 / Z`.

use serde::{Deserialize, Serialize};

use crate::error::{PathError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    Quadratic,
    Uniform,
}

#[derive(Clone, Debug)]
pub struct WeightTable {
    n: usize,
    mode: WeightMode,
    kappa0: f64,
    alpha: f64,
    raw: Vec<f64>,
    z: f64,
    probs: Vec<f64>,
    cdf: Vec<f64>,
    alias: AliasTable,
}

impl WeightTable {
    pub fn new(n: usize, mode: WeightMode) -> Self {
        assert!(n >= 1, "weight table needs n >= 1");
        let nf = n as f64;
        let kappa0 = 3.0 / (2.0 * nf * nf * (nf + 1.0));
        let alpha = 1.0 / (4.0 * nf * nf * nf);
        let raw: Vec<f64> = match mode {
            // Exact numerator over the common denominator 4n³(n+1).
            WeightMode::Quadratic => {
                let denom = 4.0 * nf * nf * nf * (nf + 1.0);
                (1..=n)
                    .map(|i| {
                        let (i, n) = (i as u128, n as u128);
                        let num = 6 * n * i * (2 * n - i) + (n + 1);
                        num as f64 / denom
                    })
                    .collect()
            }
            WeightMode::Uniform => vec![1.0 / nf; n],
        };
        let z = match mode {
            // Σ raw_i = (4n² - n + 1) / (4n²)
            WeightMode::Quadratic => (4.0 * nf * nf - nf + 1.0) / (4.0 * nf * nf),
            WeightMode::Uniform => raw.iter().sum(),
        };
        let probs: Vec<f64> = raw.iter().map(|r| r / z).collect();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        cdf[n - 1] = 1.0;
        let alias = AliasTable::new(&probs);
        Self {
            n,
            mode,
            kappa0,
            alpha,
            raw,
            z,
            probs,
            cdf,
            alias,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Unnormalized weights, position `i` at index `i - 1`.
    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Normalized probability of position `i` (1-based).
    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i - 1]
    }

    pub fn cdf(&self) -> &[f64] {
        &self.cdf
    }

    /// CDF inversion: smallest `i` with `cdf_i > u`, for `u` in `[0, 1)`.
    pub fn sample_index(&self, u: f64) -> usize {
        let k = self.cdf.partition_point(|&c| c <= u);
        k.min(self.n - 1) + 1
    }

    /// Constant-time draw from two independent uniform 64-bit words.
    #[inline]
    pub fn sample_index_alias(&self, column_word: u64, threshold_word: u64) -> usize {
        self.alias.sample(column_word, threshold_word) + 1
    }

    /// Guaranteed one-step contraction of the coupled chain for neighbour
    /// pairs in the lower-bound families, from the normalized weights.
    ///
    /// Interior and `n - 1` pairs contract by `p_i - p_{i-1}/2 - p_{i+1}/2`
    /// (with `p_0 := α/Z`); a pair differing at `n` contracts by
    /// `(p_n - p_{n-1})/2`, which is the binding term: `κ0 / (2Z)`.
    pub fn effective_kappa(&self) -> Result<f64> {
        if self.mode == WeightMode::Uniform {
            return Err(PathError::UniformWeights);
        }
        let n = self.n;
        if n == 1 {
            // The lone end pair coalesces on two of the four (ε, δ) choices.
            return Ok(self.probs[0] / 2.0);
        }
        let p = |i: usize| -> f64 {
            match i {
                0 => self.alpha / self.z,
                i if i > n => 0.0,
                i => self.probs[i - 1],
            }
        };
        let interior = (1..n)
            .map(|i| p(i) - p(i - 1) / 2.0 - p(i + 1) / 2.0)
            .fold(f64::INFINITY, f64::min);
        let end = (p(n) - p(n - 1)) / 2.0;
        Ok(interior.min(end))
    }
}

/// Walker/Vose alias table. Thresholds are stored as 32-bit fixed point and
/// packed with the alias index so a draw touches one slot.
#[derive(Clone, Debug)]
struct AliasTable {
    slots: Vec<u64>,
}

impl AliasTable {
    fn new(probs: &[f64]) -> Self {
        let n = probs.len();
        let mut scaled: Vec<f64> = probs.iter().map(|p| p * n as f64).collect();
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let mut accept = vec![1.0f64; n];
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| scaled[i] < 1.0);
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            accept[s] = scaled[s];
            alias[s] = l as u32;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in small.into_iter().chain(large) {
            accept[i] = 1.0;
        }
        let slots = accept
            .iter()
            .zip(&alias)
            .map(|(&q, &a)| {
                let threshold = if q >= 1.0 { u32::MAX as u64 + 1 } else { (q * 4294967296.0) as u64 };
                // threshold needs 33 bits only when q == 1
                (threshold << 31) | a as u64
            })
            .collect();
        Self { slots }
    }

    #[inline]
    fn sample(&self, column_word: u64, threshold_word: u64) -> usize {
        let n = self.slots.len() as u128;
        let column = ((column_word as u128 * n) >> 64) as usize;
        let slot = self.slots[column];
        let threshold = slot >> 31;
        let draw = threshold_word >> 32;
        if draw < threshold {
            column
        } else {
            (slot & 0x7FFF_FFFF) as usize
        }
    }
}
