//! Seeded random streams.
//!
//! Every sampling routine takes a `u64` seed. Work is cut into fixed-size
//! chunks; chunk `c` draws from ChaCha8 keyed by the seed with stream id `c`.
//! Results therefore do not depend on how chunks are scheduled, and
//! reductions always run in chunk order.

use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Samples per chunk.
pub const CHUNK: usize = 4096;

pub fn stream(seed: u64, id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Uniform in `[0, 1)` with 53 random bits.
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `[0, n)` by rejection.
pub fn below<R: RngCore + ?Sized>(rng: &mut R, n: u64) -> u64 {
    assert!(n > 0);
    let zone = u64::MAX - u64::MAX % n;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % n;
        }
    }
}

/// Run `work(rng, count)` over `samples` split into chunks, returning the
/// per-chunk results in chunk order.
pub fn chunked<T, F>(samples: usize, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng, usize) -> T + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let run = |c: usize| {
        let mut rng = stream(seed, c as u64);
        let count = CHUNK.min(samples - c * CHUNK);
        work(&mut rng, count)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).map(run).collect()
    }
}

/// `items.map(f)` in item order, in parallel when enabled.
pub(crate) fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
