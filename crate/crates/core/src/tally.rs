//! Deterministic aggregation of a profile: pairwise tally, majority margins,
//! unweighted majority graph, Condorcet winner.
//!
//! Matrices are dense `m x m` integer arrays; `m` stays small in every use of
//! this crate so sparsity would buy nothing.

use crate::ballots::Profile;

/// `s[a][b]` counts the voters ranking `a` above `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairwiseTally {
    m: usize,
    n: usize,
    s: Vec<u64>,
}

impl PairwiseTally {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> u64 {
        self.s[a * self.m + b]
    }

    /// Row-major copy, one row per alternative.
    pub fn rows(&self) -> Vec<Vec<u64>> {
        (0..self.m)
            .map(|a| (0..self.m).map(|b| self.get(a, b)).collect())
            .collect()
    }
}

/// Majority margins `w[a][b] = s[a][b] - s[b][a]`; antisymmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MajorityMargins {
    m: usize,
    n: usize,
    w: Vec<i64>,
}

impl MajorityMargins {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> i64 {
        self.w[a * self.m + b]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.m)
            .map(|a| (0..self.m).map(|b| self.get(a, b)).collect())
            .collect()
    }

    /// Shorthand for `margins(&pairwise_tally(profile))`.
    pub fn of(profile: &Profile) -> Self {
        margins(&pairwise_tally(profile))
    }
}

/// Unweighted majority graph: the entrywise sign of the margins. A sampled
/// noisy graph uses the same representation with no zero off-diagonal
/// entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Umg {
    m: usize,
    u: Vec<i8>,
}

impl Umg {
    pub(crate) fn from_entries(m: usize, u: Vec<i8>) -> Self {
        debug_assert_eq!(u.len(), m * m);
        Self { m, u }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, a: usize, b: usize) -> i8 {
        self.u[a * self.m + b]
    }

    pub fn rows(&self) -> Vec<Vec<i8>> {
        (0..self.m)
            .map(|a| (0..self.m).map(|b| self.get(a, b)).collect())
            .collect()
    }
}

/// Counts, for every ordered pair, the voters preferring the first to the
/// second.
pub fn pairwise_tally(profile: &Profile) -> PairwiseTally {
    let m = profile.m();
    let mut s = vec![0u64; m * m];
    for vote in profile.votes() {
        let ranking = vote.ranking();
        for i in 0..m {
            for j in i + 1..m {
                s[ranking[i] * m + ranking[j]] += 1;
            }
        }
    }
    PairwiseTally {
        m,
        n: profile.n(),
        s,
    }
}

pub fn margins(tally: &PairwiseTally) -> MajorityMargins {
    let m = tally.m();
    let mut w = vec![0i64; m * m];
    for a in 0..m {
        for b in 0..m {
            w[a * m + b] = tally.get(a, b) as i64 - tally.get(b, a) as i64;
        }
    }
    MajorityMargins {
        m,
        n: tally.n(),
        w,
    }
}

pub fn umg(margins: &MajorityMargins) -> Umg {
    let m = margins.m();
    let u = margins.w.iter().map(|&w| w.signum() as i8).collect();
    Umg { m, u }
}

/// The unique alternative beating every other one, if any. Uniqueness is
/// structural: the graph is antisymmetric, so two rows cannot both be all
/// positive.
pub fn condorcet_winner(umg: &Umg) -> Option<usize> {
    let m = umg.m();
    (0..m).find(|&a| (0..m).all(|b| b == a || umg.get(a, b) == 1))
}
