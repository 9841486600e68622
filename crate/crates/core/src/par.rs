//! Execution policy and deterministic chunked reductions.
//!
//! Work is cut into fixed-size chunks whose boundaries never depend on the
//! thread count. Chunk results are combined by a pairwise tree in chunk order,
//! so floating-point sums are bit-identical between sequential and parallel runs.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExecPolicy {
    Sequential,
    #[default]
    Parallel,
}

impl ExecPolicy {
    /// True when the parallel path is both requested and compiled in.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecPolicy::Parallel
    }
}

pub const DEFAULT_CHUNK: u64 = 1 << 14;

fn chunk_ranges(n: u64, chunk: u64) -> Vec<Range<u64>> {
    let chunk = chunk.max(1);
    let mut out = Vec::with_capacity((n / chunk + 1) as usize);
    let mut lo = 0;
    while lo < n {
        let hi = (lo + chunk).min(n);
        out.push(lo..hi);
        lo = hi;
    }
    out
}

/// Combine in a balanced binary tree, left to right.
pub fn tree_reduce<T, R>(mut items: Vec<T>, identity: T, reduce: R) -> T
where
    R: Fn(T, T) -> T,
{
    if items.is_empty() {
        return identity;
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(reduce(a, b)),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop().unwrap()
}

/// Map each chunk of `0..n` and reduce the chunk results.
pub fn map_reduce<T, M, R>(policy: ExecPolicy, n: u64, chunk: u64, identity: T, map: M, reduce: R) -> T
where
    T: Send + Clone,
    M: Fn(Range<u64>) -> T + Sync + Send,
    R: Fn(T, T) -> T,
{
    let parts = map_chunks(policy, n, chunk, map);
    tree_reduce(parts, identity, reduce)
}

/// Per-chunk results in chunk order.
pub fn map_chunks<T, M>(policy: ExecPolicy, n: u64, chunk: u64, map: M) -> Vec<T>
where
    T: Send,
    M: Fn(Range<u64>) -> T + Sync + Send,
{
    let ranges = chunk_ranges(n, chunk);
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        use rayon::prelude::*;
        return ranges.into_par_iter().map(map).collect();
    }
    let _ = policy;
    ranges.into_iter().map(map).collect()
}

/// Map over a slice, preserving order.
pub fn map_items<I, T, M>(policy: ExecPolicy, items: &[I], map: M) -> Vec<T>
where
    I: Sync,
    T: Send,
    M: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(map).collect();
    }
    let _ = policy;
    items.iter().map(map).collect()
}

/// RNG for one chunk of a seeded Monte Carlo run.
pub fn chunk_rng(seed: u64, chunk_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk_index);
    rng
}

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(mut self, other: KahanSum) -> KahanSum {
        self.add(other.sum);
        self.add(other.comp);
        self
    }

    pub fn value(self) -> f64 {
        self.sum + self.comp
    }
}

/// Run `f` on a pool with `threads` workers (0 = rayon default).
#[cfg(feature = "parallel")]
pub fn with_threads<T: Send, F: FnOnce() -> T + Send>(threads: usize, f: F) -> T {
    if threads == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<T: Send, F: FnOnce() -> T + Send>(_threads: usize, f: F) -> T {
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range() {
        let r = chunk_ranges(10, 3);
        assert_eq!(r, vec![0..3, 3..6, 6..9, 9..10]);
        assert!(chunk_ranges(0, 3).is_empty());
    }

    #[test]
    fn sequential_and_parallel_sums_agree_bitwise() {
        let f = |r: Range<u64>| {
            let mut s = KahanSum::default();
            for i in r {
                s.add(1.0 / (1.0 + i as f64).powf(1.3));
            }
            s
        };
        let a = map_reduce(ExecPolicy::Sequential, 100_000, 1000, KahanSum::default(), f, KahanSum::merge);
        let b = map_reduce(ExecPolicy::Parallel, 100_000, 1000, KahanSum::default(), f, KahanSum::merge);
        assert_eq!(a.value().to_bits(), b.value().to_bits());
    }

    #[test]
    fn kahan_beats_naive() {
        let mut s = KahanSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn tree_reduce_empty_is_identity() {
        assert_eq!(tree_reduce(Vec::<u64>::new(), 7, |a, b| a + b), 7);
        assert_eq!(tree_reduce(vec![1u64, 2, 3, 4, 5], 0, |a, b| a + b), 15);
    }
}
