//! Seeded random instances for tests, benchmarks and demos.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{q, qi, zero, Q};
use crate::valuation::{Topology, Valuation};

pub type InstanceRng = ChaCha8Rng;

pub fn rng(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `max_pieces` segments with breakpoints on the grid `1/grid` and
/// integer weights in `[min_weight, 9]`; at least one weight is positive.
pub fn valuation<R: Rng>(rng: &mut R, topology: Topology, max_pieces: usize, grid: u32, min_weight: u32) -> Valuation {
    let d = rng.gen_range(1..=max_pieces.min(grid as usize));
    let mut cuts: Vec<usize> = sample(rng, grid as usize - 1, d - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let mut bps = vec![zero()];
    bps.extend(cuts.iter().map(|&c| q(c as i64, grid as i64)));
    bps.push(qi(1));
    let mut dens: Vec<Q> = (0..d).map(|_| qi(rng.gen_range(min_weight..=9) as i64)).collect();
    if dens.iter().all(|x| x == &zero()) {
        let j = rng.gen_range(0..d);
        dens[j] = qi(1);
    }
    Valuation::normalized(topology, bps, dens).expect("positive total")
}

/// A separation `a/b` with `b <= 60` and `parts * s < 1`.
pub fn separation<R: Rng>(rng: &mut R, parts: usize) -> Q {
    loop {
        let b = rng.gen_range(2..=60i64);
        let a = rng.gen_range(1..b);
        let s = q(a, b);
        if &s * qi(parts as i64) < qi(1) {
            return s;
        }
    }
}

/// Exactly `s`-separated cake partition into `n` pieces with random
/// lengths on the grid `1/grid` of the free length.
pub fn exact_partition_lengths<R: Rng>(rng: &mut R, n: usize, s: &Q, grid: u32) -> Vec<Q> {
    let free = qi(1) - s * qi(n as i64 - 1);
    let mut cuts: Vec<u32> = (0..n - 1).map(|_| rng.gen_range(0..=grid)).collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut out = Vec::with_capacity(n);
    for c in cuts.into_iter().chain([grid]) {
        out.push(&free * q((c - prev) as i64, grid as i64));
        prev = c;
    }
    out
}
