//! Benchmark-only crate; see `benches/pipeline.rs`. Shared profile builders
//! live here so the bench targets stay small.

use dp_condorcet::ballots::{LinearOrder, Profile};

/// `k` forward ballots against `k-1` single-rotation ballots, the family with
/// a margin-1 Condorcet winner and a margin-`2k-1` runner-up.
pub fn narrow_majority(m: usize, k: usize) -> Profile {
    let forward = LinearOrder::new((0..m).collect()).unwrap();
    let rotated = LinearOrder::new((1..m).chain([0]).collect()).unwrap();
    let mut votes = vec![forward; k];
    votes.extend(vec![rotated; k - 1]);
    Profile::new(votes).unwrap()
}

/// `n` rotations of the identity ranking; a dense tangle of margins for
/// larger `m`.
pub fn rotations(m: usize, n: usize) -> Profile {
    let votes = (0..n)
        .map(|i| LinearOrder::new((0..m).map(|j| (i + j) % m).collect()).unwrap())
        .collect();
    Profile::new(votes).unwrap()
}
