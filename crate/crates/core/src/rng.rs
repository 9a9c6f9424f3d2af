//! Counter-based random tuples: the tuple used at time `t` is a pure function
//! of `(seed, t)`, so forward runs, coupling-from-the-past and replays all
//! see the same randomness without storing it.
//!
//! Each `(seed, t)` is hashed with the SplitMix64 finalizer into two 64-bit
//! words. The first selects the column of the alias table, the second
//! supplies the alias threshold (high 32 bits) and the two fair bits ε, δ
//! (bits 0 and 1).

use crate::flip::{Direction, FlipInstruction, Tail};
use crate::weights::WeightTable;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TupleStream {
    key: u64,
}

impl TupleStream {
    pub fn new(seed: u64) -> Self {
        Self {
            key: mix64(seed ^ 0x6A09_E667_F3BC_C908),
        }
    }

    /// The two raw words for time `t` (negative times are used by CFTP).
    #[inline]
    pub fn words(&self, t: i64) -> (u64, u64) {
        let base = mix64(self.key.wrapping_add((t as u64).wrapping_mul(GOLDEN)));
        (mix64(base ^ 0xA076_1D64_78BD_642F), mix64(base ^ 0xE703_7ED1_A0B4_28DB))
    }

    /// The flip instruction `G(seed, t)`.
    #[inline]
    pub fn tuple(&self, t: i64, table: &WeightTable) -> FlipInstruction {
        let (w0, w1) = self.words(t);
        let index = table.sample_index_alias(w0, w1);
        let direction = if w1 & 1 == 0 { Direction::Up } else { Direction::Down };
        let tail = if w1 & 2 == 0 { Tail::Plus } else { Tail::Minus };
        FlipInstruction::new_unchecked(index, direction, tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightMode;

    #[test]
    fn tuples_are_pure_functions_of_seed_and_time() {
        let table = WeightTable::new(20, WeightMode::Quadratic);
        let a = TupleStream::new(42);
        let b = TupleStream::new(42);
        for t in -50..50 {
            assert_eq!(a.tuple(t, &table), b.tuple(t, &table));
        }
        let c = TupleStream::new(43);
        assert!((-50..50).any(|t| a.words(t) != c.words(t)));
    }

    #[test]
    fn fair_bits_and_index_frequencies() {
        let table = WeightTable::new(5, WeightMode::Quadratic);
        let s = TupleStream::new(7);
        let draws = 400_000;
        let mut up = 0u64;
        let mut plus = 0u64;
        let mut both = 0u64;
        let mut counts = [0u64; 5];
        for t in 0..draws {
            let f = s.tuple(t, &table);
            let u = f.direction() == Direction::Up;
            let p = f.tail() == Tail::Plus;
            up += u as u64;
            plus += p as u64;
            both += (u && p) as u64;
            counts[f.index() - 1] += 1;
        }
        let n = draws as f64;
        let sd_half = (0.25 / n).sqrt();
        assert!((up as f64 / n - 0.5).abs() < 5.0 * sd_half);
        assert!((plus as f64 / n - 0.5).abs() < 5.0 * sd_half);
        assert!((both as f64 / n - 0.25).abs() < 5.0 * (0.1875 / n).sqrt());
        for (i, &c) in counts.iter().enumerate() {
            let p = table.probs()[i];
            let sd = (p * (1.0 - p) / n).sqrt();
            assert!((c as f64 / n - p).abs() < 5.0 * sd, "index {}", i + 1);
        }
    }
}
