//! Compensated summation with a deterministic parallel reduction.
//!
//! Every aggregate in this crate is produced either by a serial Kahan sum or
//! by splitting the input into fixed-size chunks, summing each chunk with
//! Kahan compensation, and then combining the per-chunk partials in chunk
//! order. Chunk boundaries depend only on the input length, never on the
//! number of worker threads, so results are bit-identical run to run.

use rayon::prelude::*;

use crate::scalar::Real;

/// Chunk length for parallel reductions. Fixed so that the reduction tree is
/// independent of the thread count.
pub const CHUNK: usize = 4096;

/// Kahan compensated accumulator.
#[derive(Clone, Copy, Debug)]
pub struct KahanSum<R: Real> {
    sum: R,
    compensation: R,
}

impl<R: Real> Default for KahanSum<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> KahanSum<R> {
    pub fn new() -> Self {
        KahanSum { sum: R::zero(), compensation: R::zero() }
    }

    #[inline]
    pub fn add(&mut self, value: R) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> R {
        self.sum
    }

    pub fn sum_iter<I: IntoIterator<Item = R>>(items: I) -> R {
        let mut acc = Self::new();
        for v in items {
            acc.add(v);
        }
        acc.value()
    }
}

/// Deterministic parallel sum of `f(i)` for `i in 0..n`.
///
/// Partials are produced per fixed chunk and folded serially in chunk order.
pub fn par_sum_indexed<R, F>(n: usize, f: F) -> R
where
    R: Real,
    F: Fn(usize) -> R + Sync,
{
    let chunks: Vec<(usize, usize)> = (0..n)
        .step_by(CHUNK)
        .map(|start| (start, (start + CHUNK).min(n)))
        .collect();
    let partials: Vec<R> = chunks
        .par_iter()
        .map(|&(a, b)| {
            let mut acc = KahanSum::new();
            for i in a..b {
                acc.add(f(i));
            }
            acc.value()
        })
        .collect();
    KahanSum::sum_iter(partials)
}
