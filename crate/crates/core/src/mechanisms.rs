//! The three edge-noise models and the rejection-sampling voting procedure.
//!
//! Each mechanism perturbs pairwise comparisons independently per unordered
//! pair. For a margin `w` of `a` over `b`, the probability that the noisy
//! graph says `a` beats `b` is
//!
//! * `lap` — add `Laplace(1/lambda)` noise to the margin and take the sign,
//!   so the win probability is the Laplace CDF at `w`:
//!   `1 - exp(-lambda*w)/2` for `w >= 0`, `exp(lambda*w)/2` for `w < 0`;
//! * `exp` — an exponential-mechanism edge draw,
//!   `1 / (1 + exp(-lambda*w/2))`;
//! * `rr` — randomized response on the margin sign: keep the sign with
//!   probability `e^lambda/(1+e^lambda)`, flip it otherwise, and output a
//!   fair coin on a tied margin.
//!
//! All three give exactly `1/2` on a zero margin. Probabilities are exposed
//! in both linear and log form; the log form is authoritative for products
//! (margins in the hundreds underflow linear arithmetic).
//!
//! Samplers draw each unordered pair once in fixed row-major order over
//! `i < j`, so runs with an equal seed are bit-reproducible. Concurrent
//! sampling requires independent random sources; nothing here shares mutable
//! state.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ballots::Profile;
use crate::tally::{condorcet_winner, MajorityMargins, Umg};

/// Default rejection budget. Failure at this depth means the per-draw
/// Condorcet-winner probability is below ~1e-5 even after geometric decay.
pub const DEFAULT_MAX_ITERS: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    Lap,
    Exp,
    Rr,
}

impl Mechanism {
    pub const ALL: [Mechanism; 3] = [Mechanism::Lap, Mechanism::Exp, Mechanism::Rr];

    pub fn as_str(self) -> &'static str {
        match self {
            Mechanism::Lap => "lap",
            Mechanism::Exp => "exp",
            Mechanism::Rr => "rr",
        }
    }
}

impl std::fmt::Display for Mechanism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mechanism {
    type Err = MechanismError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lap" => Ok(Mechanism::Lap),
            "exp" => Ok(Mechanism::Exp),
            "rr" => Ok(Mechanism::Rr),
            _ => Err(MechanismError::UnknownMechanism { name: s.to_string() }),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MechanismError {
    #[error("noise level must be positive and finite, got {lambda}")]
    InvalidLambda { lambda: f64 },
    #[error("unknown mechanism {name:?}, expected lap, exp or rr")]
    UnknownMechanism { name: String },
}

/// A mechanism tag plus its noise level `lambda > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseSpec {
    mechanism: Mechanism,
    lambda: f64,
}

impl NoiseSpec {
    pub fn new(mechanism: Mechanism, lambda: f64) -> Result<Self, MechanismError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(MechanismError::InvalidLambda { lambda });
        }
        Ok(Self { mechanism, lambda })
    }

    pub fn mechanism(&self) -> Mechanism {
        self.mechanism
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// `ln(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// `P[noisy edge says a beats b | margin of a over b is w]`, in (0, 1).
///
/// Exactly `1/2` at `w = 0` for every mechanism. Prefer
/// [`edge_win_log_prob`] when the value feeds a product.
pub fn edge_win_prob(spec: NoiseSpec, w: i64) -> f64 {
    if w == 0 {
        return 0.5;
    }
    let lambda = spec.lambda;
    let wf = w as f64;
    match spec.mechanism {
        Mechanism::Lap => {
            if w > 0 {
                1.0 - 0.5 * (-lambda * wf).exp()
            } else {
                0.5 * (lambda * wf).exp()
            }
        }
        Mechanism::Exp => 1.0 / (1.0 + (-lambda * wf / 2.0).exp()),
        Mechanism::Rr => {
            if w > 0 {
                1.0 / (1.0 + (-lambda).exp())
            } else {
                1.0 / (1.0 + lambda.exp())
            }
        }
    }
}

/// `ln` of [`edge_win_prob`], computed directly so that margins in the
/// hundreds stay finite and distinguishable from 0 and 1.
pub fn edge_win_log_prob(spec: NoiseSpec, w: i64) -> f64 {
    if w == 0 {
        return -std::f64::consts::LN_2;
    }
    let lambda = spec.lambda;
    let wf = w as f64;
    match spec.mechanism {
        Mechanism::Lap => {
            if w > 0 {
                (-0.5 * (-lambda * wf).exp()).ln_1p()
            } else {
                lambda * wf - std::f64::consts::LN_2
            }
        }
        Mechanism::Exp => -softplus(-lambda * wf / 2.0),
        Mechanism::Rr => {
            if w > 0 {
                -softplus(-lambda)
            } else {
                -softplus(lambda)
            }
        }
    }
}

/// Per-edge win probabilities for a whole margin matrix. Off-diagonal
/// complements sum to 1 by construction; the diagonal is unused.
#[derive(Clone, Debug)]
pub struct EdgeProb {
    m: usize,
    p: Vec<f64>,
    log_p: Vec<f64>,
}

impl EdgeProb {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Linear win probability for the ordered pair `(a, b)`.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.m + b]
    }

    /// `ln` of the win probability; authoritative for products.
    pub fn log(&self, a: usize, b: usize) -> f64 {
        self.log_p[a * self.m + b]
    }
}

pub fn edge_probs(spec: NoiseSpec, margins: &MajorityMargins) -> EdgeProb {
    let m = margins.m();
    let mut p = vec![f64::NAN; m * m];
    let mut log_p = vec![f64::NAN; m * m];
    for a in 0..m {
        for b in 0..m {
            if a != b {
                let w = margins.get(a, b);
                p[a * m + b] = edge_win_prob(spec, w);
                log_p[a * m + b] = edge_win_log_prob(spec, w);
            }
        }
    }
    EdgeProb { m, p, log_p }
}

/// Draws one noisy unweighted majority graph. Each unordered pair is sampled
/// independently exactly once (row-major over `i < j`) and the opposite
/// direction is set to the negation, so entries are in `{-1, 1}` and the
/// graph claims at most one Condorcet winner.
pub fn sample_noisy_umg<R: Rng + ?Sized>(
    spec: NoiseSpec,
    margins: &MajorityMargins,
    rng: &mut R,
) -> Umg {
    let ep = edge_probs(spec, margins);
    sample_noisy_umg_from_probs(&ep, rng)
}

/// As [`sample_noisy_umg`], for callers that hoist the edge probabilities out
/// of a sampling loop.
pub fn sample_noisy_umg_from_probs<R: Rng + ?Sized>(ep: &EdgeProb, rng: &mut R) -> Umg {
    let m = ep.m();
    let mut u = vec![0i8; m * m];
    for i in 0..m {
        for j in i + 1..m {
            let edge = if rng.random::<f64>() < ep.get(i, j) { 1 } else { -1 };
            u[i * m + j] = edge;
            u[j * m + i] = -edge;
        }
    }
    Umg::from_entries(m, u)
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("no noisy majority graph had a Condorcet winner within {max_iters} draws")]
pub struct RejectionBudgetExhausted {
    pub max_iters: u64,
}

/// Runs the voting procedure literally: redraw the noisy graph until it has a
/// Condorcet winner, then return that winner and the number of draws used.
/// The winner is distributed exactly as the closed-form
/// [`crate::distribution::winner_distribution`]; the draw count is geometric
/// with mean [`crate::distribution::cw_existence_prob`]⁻¹.
pub fn rejection_sample_winner<R: Rng + ?Sized>(
    spec: NoiseSpec,
    profile: &Profile,
    rng: &mut R,
    max_iters: u64,
) -> Result<(usize, u64), RejectionBudgetExhausted> {
    assert!(max_iters >= 1, "need at least one draw");
    let margins = MajorityMargins::of(profile);
    let ep = edge_probs(spec, &margins);
    for iter in 1..=max_iters {
        let graph = sample_noisy_umg_from_probs(&ep, rng);
        if let Some(winner) = condorcet_winner(&graph) {
            return Ok((winner, iter));
        }
    }
    Err(RejectionBudgetExhausted { max_iters })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballots::{LinearOrder, Profile};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(mechanism: Mechanism, lambda: f64) -> NoiseSpec {
        NoiseSpec::new(mechanism, lambda).unwrap()
    }

    #[test]
    fn noise_spec_rejects_bad_lambda() {
        for lambda in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(NoiseSpec::new(Mechanism::Lap, lambda).is_err());
        }
        assert!(NoiseSpec::new(Mechanism::Rr, 1e-9).is_ok());
    }

    #[test]
    fn mechanism_round_trips_through_strings() {
        for mech in Mechanism::ALL {
            assert_eq!(mech.as_str().parse::<Mechanism>().unwrap(), mech);
        }
        assert!("gauss".parse::<Mechanism>().is_err());
    }

    #[test]
    fn win_prob_examples() {
        let tol = 1e-12;
        // Laplace CDF at w=1, lambda=0.5
        let g = edge_win_prob(spec(Mechanism::Lap, 0.5), 1);
        assert!((g - (1.0 - 0.5 * (-0.5f64).exp())).abs() < tol);
        assert!((g - 0.696734670143683).abs() < 1e-12);

        // exponential mechanism at w=1, lambda=0.5
        let g = edge_win_prob(spec(Mechanism::Exp, 0.5), 1);
        assert!((g - 1.0 / (1.0 + (-0.25f64).exp())).abs() < tol);
        assert!((g - 0.562176500885798).abs() < 1e-12);

        // randomized response keeps the sign w.p. e^l/(1+e^l)
        let g = edge_win_prob(spec(Mechanism::Rr, 1.0), 7);
        assert!((g - 1f64.exp() / (1.0 + 1f64.exp())).abs() < tol);
        let g = edge_win_prob(spec(Mechanism::Rr, 1.0), -7);
        assert!((g - 1.0 / (1.0 + 1f64.exp())).abs() < tol);
    }

    #[test]
    fn zero_margin_is_exactly_half() {
        for mech in Mechanism::ALL {
            for lambda in [0.25, 0.5, 1.0, 2.0] {
                assert_eq!(edge_win_prob(spec(mech, lambda), 0), 0.5);
                assert_eq!(
                    edge_win_log_prob(spec(mech, lambda), 0),
                    -std::f64::consts::LN_2
                );
            }
        }
    }

    #[test]
    fn log_prob_matches_linear_prob() {
        for mech in Mechanism::ALL {
            for lambda in [0.25, 1.0, 2.0] {
                for w in -40..=40 {
                    let s = spec(mech, lambda);
                    let lin = edge_win_prob(s, w);
                    let log = edge_win_log_prob(s, w);
                    assert!(
                        (log.exp() - lin).abs() < 1e-14,
                        "{mech} lambda={lambda} w={w}"
                    );
                }
            }
        }
    }

    #[test]
    fn complements_sum_to_one() {
        for mech in Mechanism::ALL {
            for lambda in [0.25, 0.5, 1.0, 2.0] {
                for w in -200..=200i64 {
                    let s = spec(mech, lambda);
                    let sum = edge_win_prob(s, w) + edge_win_prob(s, -w);
                    assert!((sum - 1.0).abs() <= 1e-12, "{mech} lambda={lambda} w={w}");
                }
            }
        }
    }

    #[test]
    fn win_prob_is_monotone_in_margin() {
        for mech in Mechanism::ALL {
            for lambda in [0.25, 1.0, 2.0] {
                let s = spec(mech, lambda);
                let mut prev = edge_win_prob(s, -200);
                for w in -199..=200i64 {
                    let cur = edge_win_prob(s, w);
                    assert!(cur >= prev, "{mech} lambda={lambda} w={w}");
                    prev = cur;
                }
            }
        }
    }

    #[test]
    fn replacement_sensitivity_is_at_most_two_lambda_in_log_space() {
        // one vote swap moves a margin by at most 2
        for mech in [Mechanism::Lap, Mechanism::Exp] {
            for lambda in [0.25, 0.5, 1.0, 2.0] {
                let s = spec(mech, lambda);
                for w in -200..=198i64 {
                    let jump = edge_win_log_prob(s, w + 2) - edge_win_log_prob(s, w);
                    assert!(
                        jump <= 2.0 * lambda + 1e-9,
                        "{mech} lambda={lambda} w={w} jump={jump}"
                    );
                }
            }
        }
    }

    fn tied_margins_m3() -> MajorityMargins {
        let p = Profile::new(vec![
            LinearOrder::new(vec![0, 1, 2]).unwrap(),
            LinearOrder::new(vec![2, 1, 0]).unwrap(),
        ])
        .unwrap();
        MajorityMargins::of(&p)
    }

    #[test]
    fn sampled_graph_is_antisymmetric_and_never_zero() {
        let margins = tied_margins_m3();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for mech in Mechanism::ALL {
            for _ in 0..200 {
                let u = sample_noisy_umg(spec(mech, 1.0), &margins, &mut rng);
                for a in 0..3 {
                    for b in 0..3 {
                        if a == b {
                            assert_eq!(u.get(a, b), 0);
                        } else {
                            assert_ne!(u.get(a, b), 0);
                            assert_eq!(u.get(a, b), -u.get(b, a));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn equal_seeds_give_equal_graphs() {
        let margins = tied_margins_m3();
        let s = spec(Mechanism::Lap, 0.7);
        let a = sample_noisy_umg(s, &margins, &mut ChaCha8Rng::seed_from_u64(42));
        let b = sample_noisy_umg(s, &margins, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
    }

    #[test]
    fn empirical_edge_frequency_matches_win_prob() {
        // one ballot a>b: margin +1; RR keeps it w.p. e^l/(1+e^l)
        let p = Profile::new(vec![LinearOrder::new(vec![0, 1]).unwrap()]).unwrap();
        let margins = MajorityMargins::of(&p);
        let s = spec(Mechanism::Rr, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000;
        let mut wins = 0u64;
        for _ in 0..draws {
            if sample_noisy_umg(s, &margins, &mut rng).get(0, 1) == 1 {
                wins += 1;
            }
        }
        let p_hat = wins as f64 / draws as f64;
        let p_true = edge_win_prob(s, 1);
        let sigma = (p_true * (1.0 - p_true) / draws as f64).sqrt();
        assert!((p_hat - p_true).abs() < 3.0 * sigma, "{p_hat} vs {p_true}");
    }

    #[test]
    fn empirical_edge_frequencies_match_on_unanimous_m3() {
        // three identical ballots of three voters: all margins equal n, so
        // scale down to margin 1 via a single ballot instead
        let p = Profile::new(vec![LinearOrder::new(vec![0, 1, 2]).unwrap()]).unwrap();
        let margins = MajorityMargins::of(&p);
        let s = spec(Mechanism::Exp, 1.0);
        let p_true = edge_win_prob(s, 1); // 1/(1+e^{-1/2})
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let draws = 100_000;
        let mut wins = [0u64; 3];
        for _ in 0..draws {
            let u = sample_noisy_umg(s, &margins, &mut rng);
            for (k, (a, b)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
                if u.get(a, b) == 1 {
                    wins[k] += 1;
                }
            }
        }
        let sigma = (p_true * (1.0 - p_true) / draws as f64).sqrt();
        for w in wins {
            let p_hat = w as f64 / draws as f64;
            assert!((p_hat - p_true).abs() < 3.0 * sigma, "{p_hat} vs {p_true}");
        }
    }

    #[test]
    fn two_alternatives_accept_on_the_first_draw() {
        let p = Profile::new(vec![LinearOrder::new(vec![0, 1]).unwrap()]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for mech in Mechanism::ALL {
            for _ in 0..100 {
                let (_, iters) =
                    rejection_sample_winner(spec(mech, 1.0), &p, &mut rng, 10).unwrap();
                assert_eq!(iters, 1);
            }
        }
    }

    #[test]
    fn rejection_budget_can_be_exhausted() {
        // a 3-cycle with near-deterministic randomized response keeps the
        // cycle almost surely, so a tiny budget runs out
        let p = Profile::new(vec![
            LinearOrder::new(vec![0, 1, 2]).unwrap(),
            LinearOrder::new(vec![1, 2, 0]).unwrap(),
            LinearOrder::new(vec![2, 0, 1]).unwrap(),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let err = rejection_sample_winner(spec(Mechanism::Rr, 20.0), &p, &mut rng, 5);
        assert_eq!(err, Err(RejectionBudgetExhausted { max_iters: 5 }));
    }
}
