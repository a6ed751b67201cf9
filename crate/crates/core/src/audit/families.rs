//! Hand-built profile families that stress the privacy and axiom analyses:
//! near-tied Condorcet winners, neighbor pairs that move every margin at
//! once, and a concrete profitable misreport. Tests and audits use these as
//! targeted cases where exhaustive enumeration is out of reach.

use crate::ballots::{LinearOrder, Profile};

fn forward(m: usize) -> LinearOrder {
    LinearOrder::new((0..m).collect()).unwrap()
}

fn backward(m: usize) -> LinearOrder {
    forward(m).reversed()
}

/// `k` voters ranking `a1 > a2 > ... > am` against `k-1` voters ranking
/// `a2 > ... > am > a1`. The first alternative is the Condorcet winner with
/// every margin exactly 1, while the second crushes everything below it by
/// `2k-1`; with margin-sensitive noise the runner-up out-wins the Condorcet
/// winner.
pub fn near_tied_condorcet_profile(m: usize, k: usize) -> Profile {
    assert!(m >= 2 && k >= 1);
    let rotated = LinearOrder::new((1..m).chain([0]).collect()).unwrap();
    let mut votes = vec![forward(m); k];
    votes.extend(vec![rotated; k - 1]);
    Profile::new(votes).unwrap()
}

/// A neighboring pair over `m = 2k` alternatives and `n = 2k` voters whose
/// margins among the first `m-1` alternatives move from all-tied to all-2
/// when the last voter swaps a full reversal for the forward order. The
/// probability that the last alternative wins moves by (almost) the whole
/// per-margin sensitivity on every edge at once, which is what pins the
/// privacy lower bound for the margin-CDF mechanisms as `k` grows.
///
/// The profiles differ in voter `n - 1`.
pub fn tied_block_pair(k: usize) -> (Profile, Profile) {
    assert!(k >= 1);
    let m = 2 * k;
    // a_{m-1} > a_{m-2} > ... > a_1 > a_m
    let middle = LinearOrder::new((0..m - 1).rev().chain([m - 1]).collect()).unwrap();

    let mut votes = vec![forward(m); k];
    votes.extend(vec![middle.clone(); k - 1]);
    votes.push(backward(m));
    let p = Profile::new(votes).unwrap();

    let q = p.replace_vote(p.n() - 1, forward(m)).unwrap();
    (p, q)
}

/// A neighboring pair over `m = 2k+1` alternatives and `n = 2k+1` voters
/// where one swapped ballot flips the sign of every margin: `k+1` forward
/// voters against `k` reversed ones, with forward voter `k` defecting to the
/// reversal. Under randomized response the last alternative's win probability
/// moves by exactly `e^((m-1)*lambda)`.
///
/// The profiles differ in voter `k`.
pub fn sign_flip_pair(k: usize) -> (Profile, Profile) {
    assert!(k >= 1);
    let m = 2 * k + 1;
    let mut votes = vec![forward(m); k + 1];
    votes.extend(vec![backward(m); k]);
    let p = Profile::new(votes).unwrap();

    let q = p.replace_vote(k, backward(m)).unwrap();
    (p, q)
}

/// A 3-voter, 5-alternative instance where one voter's misreport raises the
/// combined win probability of their top two alternatives under randomized
/// response: voter 2 trades `a1 > a2 > ... > a5` for `a2 > ... > a5 > a1`,
/// sacrificing their favourite to inflate their second choice. Returns
/// `(profile, voter, misreport)`.
pub fn misreport_gain_instance() -> (Profile, usize, LinearOrder) {
    let votes = vec![
        LinearOrder::new(vec![2, 3, 4, 0, 1]).unwrap(), // a3 > a4 > a5 > a1 > a2
        LinearOrder::new(vec![1, 2, 3, 4, 0]).unwrap(), // a2 > a3 > a4 > a5 > a1
        LinearOrder::new(vec![0, 1, 2, 3, 4]).unwrap(), // a1 > a2 > a3 > a4 > a5
    ];
    let misreport = LinearOrder::new(vec![1, 2, 3, 4, 0]).unwrap();
    (Profile::new(votes).unwrap(), 2, misreport)
}

/// An 8-voter, 5-alternative relative of [`misreport_gain_instance`] whose
/// gains show up under the margin-sensitive mechanisms: one lone supporter of
/// `a1` against seven `a2` voters, who benefits from demoting `a1` below
/// `a2`. Returns `(profile, voter, misreport)`.
pub fn misreport_gain_instance_wide() -> (Profile, usize, LinearOrder) {
    let mut votes = vec![LinearOrder::new(vec![0, 1, 2, 3, 4]).unwrap()];
    votes.extend(vec![LinearOrder::new(vec![1, 2, 3, 4, 0]).unwrap(); 7]);
    let misreport = LinearOrder::new(vec![1, 0, 2, 3, 4]).unwrap();
    (Profile::new(votes).unwrap(), 0, misreport)
}
