//! Empirical ground truth: exhaustive exact-privacy measurement over
//! neighboring profiles, and checkers for the probabilistic voting axioms.
//!
//! Every checker walks a declared search space — usually the full ballot
//! space `L(A)^n` for small `m` and `n` — and returns a report carrying the
//! verdict, the measured quantity, and a re-checkable witness for any
//! violation. The search space is an explicit report field so a pass is
//! never mistaken for a universal proof.
//!
//! Checkers evaluate *normalized* winner distributions. They are pure over
//! their inputs and partition the profile space, so callers may shard them
//! over [`crate::ballots::enumerate_profiles`] and combine results with a
//! max/min reduction.

pub mod families;

use serde::Serialize;
use thiserror::Error;

use crate::ballots::{all_orders, enumerate_pushups, LinearOrder, Profile};
use crate::bounds;
use crate::distribution::{winner_distribution, WinnerDistribution};
use crate::mechanisms::{edge_win_log_prob, Mechanism, NoiseSpec};
use crate::tally::MajorityMargins;

/// Absolute tolerance for "these two probabilities are equal" in the
/// lexicographic participation walk.
pub const PROB_EQ_TOL: f64 = 1e-9;

/// Tolerance below which a probability decrease is attributed to floating
/// point rather than an axiom violation.
const PROB_VIOLATION_TOL: f64 = 1e-12;

/// Largest profile count a checker will enumerate.
const MAX_PROFILES: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AuditError {
    #[error("envelope m={m}, n={n} is outside the supported range: {detail}")]
    InfeasibleEnvelope {
        m: usize,
        n: usize,
        detail: String,
    },
    #[error("participation checks need n >= 2, got n={n}")]
    NeedTwoVoters { n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxiomId {
    PCondorcet,
    AlphaPCondorcet,
    PPareto,
    AMonotonicity,
    AlphaSdSp,
    LexiParticipation,
    StrongLexiParticipation,
}

impl AxiomId {
    pub fn as_str(self) -> &'static str {
        match self {
            AxiomId::PCondorcet => "p-condorcet",
            AxiomId::AlphaPCondorcet => "alpha-p-condorcet",
            AxiomId::PPareto => "p-pareto",
            AxiomId::AMonotonicity => "a-monotonicity",
            AxiomId::AlphaSdSp => "alpha-sd-sp",
            AxiomId::LexiParticipation => "lexi-participation",
            AxiomId::StrongLexiParticipation => "strong-lexi-participation",
        }
    }
}

impl std::fmt::Display for AxiomId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AxiomId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "p-condorcet" => Ok(AxiomId::PCondorcet),
            "alpha-p-condorcet" => Ok(AxiomId::AlphaPCondorcet),
            "p-pareto" => Ok(AxiomId::PPareto),
            "a-monotonicity" => Ok(AxiomId::AMonotonicity),
            "alpha-sd-sp" => Ok(AxiomId::AlphaSdSp),
            "lexi-participation" => Ok(AxiomId::LexiParticipation),
            "strong-lexi-participation" => Ok(AxiomId::StrongLexiParticipation),
            other => Err(format!("unknown axiom id {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Which ranking indexes the two upper-set sums in the strategyproofness
/// ratio. `Truthful` uses the voter's true order on both sides; `Reported`
/// uses the misreport's order on the replaced side (the literal reading of
/// the displayed inequality, which trivializes at the reporter's old top).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderConvention {
    Truthful,
    Reported,
}

/// What a checker actually walked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SearchSpace {
    /// Every profile in `L(A)^n`.
    Exhaustive { m: usize, n: usize },
    /// An explicit list of cases supplied by the caller.
    Targeted { description: String, cases: usize },
}

/// Maximizing witness of the exact-privacy measurement: re-evaluating the
/// outcome-set probability ratio on this (profile, replacement) pair
/// reproduces `eps_exact`.
#[derive(Clone, Debug, Serialize)]
pub struct EdpWitness {
    pub profile: Profile,
    pub voter: usize,
    pub replacement: LinearOrder,
    /// Alternative indices of the maximizing outcome set.
    pub outcome: Vec<usize>,
}

/// Result of [`audit_edp`]: the measured exact privacy budget together with
/// the closed-form bracket it is compared against.
#[derive(Clone, Debug, Serialize)]
pub struct PrivacyAuditReport {
    pub mechanism: Mechanism,
    pub lambda: f64,
    pub m: usize,
    pub n: usize,
    pub eps_exact: f64,
    pub witness: EdpWitness,
    pub eps_lower_claimed: f64,
    pub eps_upper_claimed: f64,
    pub space: SearchSpace,
}

impl PrivacyAuditReport {
    /// Recomputes the log probability ratio of the stored witness from
    /// scratch; equals `eps_exact` up to floating-point noise.
    pub fn replay(&self) -> f64 {
        let spec = NoiseSpec::new(self.mechanism, self.lambda).expect("validated on construction");
        let p = winner_distribution(spec, &self.witness.profile);
        let neighbor = self
            .witness
            .profile
            .replace_vote(self.witness.voter, self.witness.replacement.clone())
            .expect("witness voter is in range");
        let q = winner_distribution(spec, &neighbor);
        let mass =
            |d: &WinnerDistribution| -> f64 { self.witness.outcome.iter().map(|&a| d.prob(a)).sum() };
        (mass(&p) / mass(&q)).ln()
    }
}

/// Structured counterexample attached to a failing axiom report.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AxiomWitness {
    /// A profile whose Condorcet winner is out-won (relative to `alpha`) by
    /// `rival`.
    CondorcetRatio {
        profile: Profile,
        winner: usize,
        rival: usize,
        winner_prob: f64,
        rival_prob: f64,
    },
    /// A unanimously dominated alternative that wins more often than its
    /// dominator.
    ParetoDominance {
        profile: Profile,
        dominant: usize,
        dominated: usize,
        dominant_prob: f64,
        dominated_prob: f64,
    },
    /// Raising `alt` in one ballot lowered its win probability.
    Pushup {
        profile: Profile,
        voter: usize,
        alt: usize,
        pushed: LinearOrder,
        prob_before: f64,
        prob_after: f64,
    },
    /// A misreport that multiplies some upper-set mass beyond `1/alpha`.
    UpperSetRatio {
        profile: Profile,
        voter: usize,
        replacement: LinearOrder,
        alt: usize,
        truthful_mass: f64,
        misreport_mass: f64,
    },
    /// A voter whose ballot fails to (strictly) help them lexicographically.
    Participation {
        profile: Profile,
        voter: usize,
        probs_with: Vec<f64>,
        probs_without: Vec<f64>,
    },
}

/// Result of one axiom checker run.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub axiom: AxiomId,
    pub mechanism: Mechanism,
    pub lambda: f64,
    /// The level the verdict was judged against, for the parameterized
    /// axioms.
    pub alpha: Option<f64>,
    pub verdict: Verdict,
    /// Worst ratio seen over the space; present for the two
    /// alpha-parameterized axioms.
    pub measured_alpha: Option<f64>,
    pub witness: Option<AxiomWitness>,
    pub space: SearchSpace,
    /// Individual comparisons evaluated, so a vacuous pass is visible.
    pub cases_checked: u64,
}

/// Log win probabilities indexed by integer margin in `-n..=n`.
struct LogGTable {
    n: i64,
    log_g: Vec<f64>,
}

impl LogGTable {
    fn new(spec: NoiseSpec, n: usize) -> Self {
        let n = n as i64;
        let log_g = (-n..=n).map(|w| edge_win_log_prob(spec, w)).collect();
        Self { n, log_g }
    }

    fn log(&self, w: i64) -> f64 {
        self.log_g[(w + self.n) as usize]
    }
}

/// Every profile in `L(A)^n` with its winner distribution, margins and
/// Condorcet winner, indexed by profile rank: the mixed-radix number whose
/// digits are the per-voter permutation ranks, voter 0 most significant.
struct ExhaustiveSpace {
    m: usize,
    n: usize,
    orders: Vec<LinearOrder>,
    /// `m!`, the radix.
    base: usize,
    dists: Vec<WinnerDistribution>,
    margins: Vec<i64>,
    cws: Vec<Option<usize>>,
}

impl ExhaustiveSpace {
    fn profile_count(m: usize, n: usize) -> Option<u64> {
        let base: u64 = (1..=m as u64).product();
        base.checked_pow(n as u32).filter(|&c| c <= MAX_PROFILES)
    }

    fn build(spec: NoiseSpec, m: usize, n: usize) -> Result<Self, AuditError> {
        let count = Self::profile_count(m, n).ok_or_else(|| AuditError::InfeasibleEnvelope {
            m,
            n,
            detail: format!("more than {MAX_PROFILES} profiles"),
        })? as usize;
        let orders = all_orders(m);
        let base = orders.len();
        let table = LogGTable::new(spec, n);

        // per-order margin contribution: +1 in the preferred direction of
        // each pair, -1 in the reverse
        let contrib: Vec<Vec<i64>> = orders
            .iter()
            .map(|o| {
                let mut c = vec![0i64; m * m];
                for i in 0..m {
                    for j in i + 1..m {
                        let (hi, lo) = (o.ranking()[i], o.ranking()[j]);
                        c[hi * m + lo] = 1;
                        c[lo * m + hi] = -1;
                    }
                }
                c
            })
            .collect();

        let mut dists = Vec::with_capacity(count);
        let mut all_margins = Vec::with_capacity(count * m * m);
        let mut cws = Vec::with_capacity(count);
        let mut digits = vec![0usize; n];
        let mut w = vec![0i64; m * m];
        for rank in 0..count {
            if rank > 0 {
                let mut v = n;
                loop {
                    v -= 1;
                    digits[v] += 1;
                    if digits[v] < base {
                        break;
                    }
                    digits[v] = 0;
                }
            }
            w.iter_mut().for_each(|x| *x = 0);
            for &d in &digits {
                for (wi, ci) in w.iter_mut().zip(&contrib[d]) {
                    *wi += ci;
                }
            }
            let scores: Vec<f64> = (0..m)
                .map(|a| {
                    (0..m)
                        .filter(|&b| b != a)
                        .map(|b| table.log(w[a * m + b]))
                        .sum()
                })
                .collect();
            dists.push(WinnerDistribution::from_log_scores(scores));
            cws.push((0..m).find(|&a| (0..m).all(|b| b == a || w[a * m + b] > 0)));
            all_margins.extend_from_slice(&w);
        }
        Ok(Self {
            m,
            n,
            orders,
            base,
            dists,
            margins: all_margins,
            cws,
        })
    }

    fn len(&self) -> usize {
        self.dists.len()
    }

    /// Rank weight of `voter`'s digit.
    fn weight(&self, voter: usize) -> usize {
        self.base.pow((self.n - 1 - voter) as u32)
    }

    fn digit(&self, rank: usize, voter: usize) -> usize {
        rank / self.weight(voter) % self.base
    }

    fn with_digit(&self, rank: usize, voter: usize, digit: usize) -> usize {
        let w = self.weight(voter);
        rank - self.digit(rank, voter) * w + digit * w
    }

    fn margin(&self, rank: usize, a: usize, b: usize) -> i64 {
        self.margins[rank * self.m * self.m + a * self.m + b]
    }

    fn profile(&self, rank: usize) -> Profile {
        let votes = (0..self.n)
            .map(|v| self.orders[self.digit(rank, v)].clone())
            .collect();
        Profile::new(votes).expect("ranks decode to valid profiles")
    }

    fn order_rank(&self, order: &LinearOrder) -> usize {
        self.orders
            .iter()
            .position(|o| o == order)
            .expect("order over the same alternatives")
    }
}

fn exhaustive(m: usize, n: usize) -> SearchSpace {
    SearchSpace::Exhaustive { m, n }
}

/// Non-empty subsets of `0..m`, as index lists.
fn outcome_subsets(m: usize) -> Vec<Vec<usize>> {
    (1u32..1 << m)
        .map(|mask| (0..m).filter(|&a| mask >> a & 1 == 1).collect())
        .collect()
}

/// Measures the exact privacy budget over the whole envelope: the maximum of
/// `ln(P[r(P) in O] / P[r(P') in O])` over every profile `P` in `L(A)^n`,
/// every single-vote replacement `P'`, and every non-empty outcome set `O`
/// (all `2^m - 1` of them — maxima of ratios of sums are not assumed to sit
/// on singletons). Supported envelope: `m <= 4`, `n <= 3`.
///
/// The report carries the closed-form bracket from [`bounds::dp_bounds`] for
/// side-by-side comparison; the measurement is authoritative.
pub fn audit_edp(spec: NoiseSpec, m: usize, n: usize) -> Result<PrivacyAuditReport, AuditError> {
    if !(2..=4).contains(&m) || !(1..=3).contains(&n) {
        return Err(AuditError::InfeasibleEnvelope {
            m,
            n,
            detail: "exact-privacy audits support m in 2..=4, n in 1..=3".into(),
        });
    }
    let space = ExhaustiveSpace::build(spec, m, n)?;
    let subsets = outcome_subsets(m);

    let mut eps_exact = f64::NEG_INFINITY;
    let mut witness = None;
    for rank in 0..space.len() {
        let p = &space.dists[rank];
        for voter in 0..n {
            let current = space.digit(rank, voter);
            for digit in 0..space.base {
                if digit == current {
                    continue;
                }
                let q = &space.dists[space.with_digit(rank, voter, digit)];
                for subset in &subsets {
                    let mass_p: f64 = subset.iter().map(|&a| p.prob(a)).sum();
                    let mass_q: f64 = subset.iter().map(|&a| q.prob(a)).sum();
                    let ratio = (mass_p / mass_q).ln();
                    if ratio > eps_exact {
                        eps_exact = ratio;
                        witness = Some((rank, voter, digit, subset.clone()));
                    }
                }
            }
        }
    }

    let (rank, voter, digit, outcome) = witness.expect("the space is non-empty");
    let (eps_lower_claimed, eps_upper_claimed) =
        bounds::dp_bounds(spec.mechanism(), spec.lambda(), m).expect("validated spec");
    Ok(PrivacyAuditReport {
        mechanism: spec.mechanism(),
        lambda: spec.lambda(),
        m,
        n,
        eps_exact,
        witness: EdpWitness {
            profile: space.profile(rank),
            voter,
            replacement: space.orders[digit].clone(),
            outcome,
        },
        eps_lower_claimed,
        eps_upper_claimed,
        space: exhaustive(m, n),
    })
}

fn pcondorcet_axiom_id(alpha: f64) -> AxiomId {
    if alpha == 1.0 {
        AxiomId::PCondorcet
    } else {
        AxiomId::AlphaPCondorcet
    }
}

/// Running minimum of a checked ratio, with the witness of the minimizer.
struct RatioTracker {
    measured: f64,
    witness: Option<AxiomWitness>,
    cases: u64,
}

impl RatioTracker {
    fn new() -> Self {
        Self {
            measured: f64::INFINITY,
            witness: None,
            cases: 0,
        }
    }

    fn observe(&mut self, ratio: f64, witness: impl FnOnce() -> AxiomWitness) {
        self.cases += 1;
        if ratio < self.measured {
            self.measured = ratio;
            self.witness = Some(witness());
        }
    }
}

fn condorcet_ratio_case(
    dist: &WinnerDistribution,
    cw: usize,
    tracker: &mut RatioTracker,
    profile: impl FnOnce() -> Profile,
) {
    let m = dist.m();
    let rival = (0..m)
        .filter(|&a| a != cw)
        .max_by(|&a, &b| dist.prob(a).partial_cmp(&dist.prob(b)).unwrap())
        .expect("m >= 2");
    let ratio = dist.prob(cw) / dist.prob(rival);
    tracker.observe(ratio, || AxiomWitness::CondorcetRatio {
        profile: profile(),
        winner: cw,
        rival,
        winner_prob: dist.prob(cw),
        rival_prob: dist.prob(rival),
    });
}

fn pcondorcet_report(
    spec: NoiseSpec,
    alpha: f64,
    tracker: RatioTracker,
    space: SearchSpace,
) -> AxiomReport {
    let verdict = if tracker.measured >= alpha {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    AxiomReport {
        axiom: pcondorcet_axiom_id(alpha),
        mechanism: spec.mechanism(),
        lambda: spec.lambda(),
        alpha: Some(alpha),
        verdict,
        measured_alpha: Some(tracker.measured),
        witness: if verdict == Verdict::Fail {
            tracker.witness
        } else {
            None
        },
        space,
        cases_checked: tracker.cases,
    }
}

/// Over every profile in `L(A)^n` with a Condorcet winner, verifies that the
/// winner's probability is at least `alpha` times every other alternative's.
/// `measured_alpha` is the worst ratio seen.
pub fn check_p_condorcet(
    spec: NoiseSpec,
    m: usize,
    n: usize,
    alpha: f64,
) -> Result<AxiomReport, AuditError> {
    let space = ExhaustiveSpace::build(spec, m, n)?;
    let mut tracker = RatioTracker::new();
    for rank in 0..space.len() {
        if let Some(cw) = space.cws[rank] {
            condorcet_ratio_case(&space.dists[rank], cw, &mut tracker, || space.profile(rank));
        }
    }
    Ok(pcondorcet_report(spec, alpha, tracker, exhaustive(m, n)))
}

/// Targeted variant of [`check_p_condorcet`] over an explicit profile list;
/// profiles without a Condorcet winner are skipped.
pub fn check_p_condorcet_profiles(
    spec: NoiseSpec,
    profiles: &[Profile],
    alpha: f64,
    description: &str,
) -> AxiomReport {
    let mut tracker = RatioTracker::new();
    for profile in profiles {
        let margins = MajorityMargins::of(profile);
        let cw = crate::tally::condorcet_winner(&crate::tally::umg(&margins));
        if let Some(cw) = cw {
            let dist = winner_distribution(spec, profile);
            condorcet_ratio_case(&dist, cw, &mut tracker, || profile.clone());
        }
    }
    pcondorcet_report(
        spec,
        alpha,
        tracker,
        SearchSpace::Targeted {
            description: description.into(),
            cases: profiles.len(),
        },
    )
}

/// For every profile and every pair `(a, b)` where all voters rank `a` above
/// `b`, asserts that `a` wins at least as often as `b`.
pub fn check_p_pareto(spec: NoiseSpec, m: usize, n: usize) -> Result<AxiomReport, AuditError> {
    let space = ExhaustiveSpace::build(spec, m, n)?;
    let mut cases = 0u64;
    let mut witness = None;
    'outer: for rank in 0..space.len() {
        let dist = &space.dists[rank];
        for a in 0..m {
            for b in 0..m {
                // a unanimous preference shows up as a full-strength margin
                if a != b && space.margin(rank, a, b) == n as i64 {
                    cases += 1;
                    if dist.prob(a) < dist.prob(b) - PROB_VIOLATION_TOL {
                        witness = Some(AxiomWitness::ParetoDominance {
                            profile: space.profile(rank),
                            dominant: a,
                            dominated: b,
                            dominant_prob: dist.prob(a),
                            dominated_prob: dist.prob(b),
                        });
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(AxiomReport {
        axiom: AxiomId::PPareto,
        mechanism: spec.mechanism(),
        lambda: spec.lambda(),
        alpha: None,
        verdict: if witness.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        measured_alpha: None,
        witness,
        space: exhaustive(m, n),
        cases_checked: cases,
    })
}

/// For every profile, voter, alternative and pushup of that alternative in
/// that voter's ballot, asserts the alternative's (normalized) win
/// probability does not decrease.
pub fn check_a_monotonicity(
    spec: NoiseSpec,
    m: usize,
    n: usize,
) -> Result<AxiomReport, AuditError> {
    let space = ExhaustiveSpace::build(spec, m, n)?;
    let mut cases = 0u64;
    let mut witness = None;
    'outer: for rank in 0..space.len() {
        let dist = &space.dists[rank];
        for voter in 0..n {
            let order = &space.orders[space.digit(rank, voter)];
            for alt in 0..m {
                for pushed in enumerate_pushups(order, alt) {
                    cases += 1;
                    let lifted_rank = space.with_digit(rank, voter, space.order_rank(&pushed));
                    let lifted = &space.dists[lifted_rank];
                    if lifted.prob(alt) < dist.prob(alt) - PROB_VIOLATION_TOL {
                        witness = Some(AxiomWitness::Pushup {
                            profile: space.profile(rank),
                            voter,
                            alt,
                            pushed,
                            prob_before: dist.prob(alt),
                            prob_after: lifted.prob(alt),
                        });
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(AxiomReport {
        axiom: AxiomId::AMonotonicity,
        mechanism: spec.mechanism(),
        lambda: spec.lambda(),
        alpha: None,
        verdict: if witness.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        measured_alpha: None,
        witness,
        space: exhaustive(m, n),
        cases_checked: cases,
    })
}

/// One strategyproofness comparison: the mass a voter's truthful ballot puts
/// above `alt`, against the mass their misreport moves there.
fn sd_ratio(
    truthful: &LinearOrder,
    reported: &LinearOrder,
    alt: usize,
    p: &WinnerDistribution,
    q: &WinnerDistribution,
    convention: OrderConvention,
) -> Option<(f64, f64, f64)> {
    let upper = |order: &LinearOrder, d: &WinnerDistribution| -> f64 {
        let sum: f64 = order
            .ranking()
            .iter()
            .take(order.position_of(alt))
            .map(|&b| d.prob(b))
            .sum();
        sum + 0.0 // empty sums come out as -0.0
    };
    let num = upper(truthful, p);
    let den = match convention {
        OrderConvention::Truthful => upper(truthful, q),
        OrderConvention::Reported => upper(reported, q),
    };
    if den <= 0.0 {
        return None; // empty upper set on the denominator side
    }
    Some((num / den, num, den))
}

fn sdsp_report(
    spec: NoiseSpec,
    alpha: f64,
    tracker: RatioTracker,
    space: SearchSpace,
) -> AxiomReport {
    let verdict = if tracker.measured >= alpha {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    AxiomReport {
        axiom: AxiomId::AlphaSdSp,
        mechanism: spec.mechanism(),
        lambda: spec.lambda(),
        alpha: Some(alpha),
        verdict,
        measured_alpha: Some(tracker.measured),
        witness: if verdict == Verdict::Fail {
            tracker.witness
        } else {
            None
        },
        space,
        cases_checked: tracker.cases,
    }
}

/// Over every profile, voter, replacement ballot and alternative, measures
/// the worst upper-set probability ratio between the truthful profile and the
/// misreported one. Ratios with an empty upper set on the denominator side
/// are skipped.
pub fn check_sd_sp(
    spec: NoiseSpec,
    m: usize,
    n: usize,
    alpha: f64,
    convention: OrderConvention,
) -> Result<AxiomReport, AuditError> {
    let space = ExhaustiveSpace::build(spec, m, n)?;
    let mut tracker = RatioTracker::new();
    for rank in 0..space.len() {
        let p = &space.dists[rank];
        for voter in 0..n {
            let current = space.digit(rank, voter);
            let truthful = &space.orders[current];
            for digit in 0..space.base {
                if digit == current {
                    continue;
                }
                let reported = &space.orders[digit];
                let q = &space.dists[space.with_digit(rank, voter, digit)];
                for alt in 0..m {
                    if let Some((ratio, num, den)) =
                        sd_ratio(truthful, reported, alt, p, q, convention)
                    {
                        tracker.observe(ratio, || AxiomWitness::UpperSetRatio {
                            profile: space.profile(rank),
                            voter,
                            replacement: reported.clone(),
                            alt,
                            truthful_mass: num,
                            misreport_mass: den,
                        });
                    }
                }
            }
        }
    }
    Ok(sdsp_report(spec, alpha, tracker, exhaustive(m, n)))
}

/// Targeted variant of [`check_sd_sp`] over explicit
/// (profile, voter, replacement) cases.
pub fn check_sd_sp_cases(
    spec: NoiseSpec,
    cases: &[(Profile, usize, LinearOrder)],
    alpha: f64,
    convention: OrderConvention,
    description: &str,
) -> AxiomReport {
    let mut tracker = RatioTracker::new();
    for (profile, voter, replacement) in cases {
        let p = winner_distribution(spec, profile);
        let neighbor = profile
            .replace_vote(*voter, replacement.clone())
            .expect("case voter in range");
        let q = winner_distribution(spec, &neighbor);
        let truthful = profile.vote(*voter);
        for alt in 0..profile.m() {
            if let Some((ratio, num, den)) =
                sd_ratio(truthful, replacement, alt, &p, &q, convention)
            {
                tracker.observe(ratio, || AxiomWitness::UpperSetRatio {
                    profile: profile.clone(),
                    voter: *voter,
                    replacement: replacement.clone(),
                    alt,
                    truthful_mass: num,
                    misreport_mass: den,
                });
            }
        }
    }
    sdsp_report(
        spec,
        alpha,
        tracker,
        SearchSpace::Targeted {
            description: description.into(),
            cases: cases.len(),
        },
    )
}

/// For every profile and voter, compares the distribution with and without
/// that voter's ballot, walking the voter's own ranking. Plain
/// lexi-participation fails if some alternative loses probability while
/// everything the voter ranks above it is exactly tied (tolerance
/// [`PROB_EQ_TOL`]); the strong variant additionally requires a strictly
/// improved alternative with everything above it tied.
pub fn check_lexi_participation(
    spec: NoiseSpec,
    m: usize,
    n: usize,
    strong: bool,
) -> Result<AxiomReport, AuditError> {
    if n < 2 {
        return Err(AuditError::NeedTwoVoters { n });
    }
    let with_voter = ExhaustiveSpace::build(spec, m, n)?;
    let without_voter = ExhaustiveSpace::build(spec, m, n - 1)?;

    let mut cases = 0u64;
    let mut witness = None;
    'outer: for rank in 0..with_voter.len() {
        let p = &with_voter.dists[rank];
        for voter in 0..n {
            cases += 1;
            // profile rank with the voter's digit deleted
            let mut removed_rank = 0usize;
            for v in 0..n {
                if v != voter {
                    removed_rank = removed_rank * with_voter.base + with_voter.digit(rank, v);
                }
            }
            let q = &without_voter.dists[removed_rank];
            let order = &with_voter.orders[with_voter.digit(rank, voter)];

            let mut improved = false;
            let mut violated = false;
            for &alt in order.ranking() {
                let diff = p.prob(alt) - q.prob(alt);
                if diff.abs() <= PROB_EQ_TOL {
                    continue; // tied, keep walking
                }
                if diff > 0.0 {
                    improved = true;
                } else {
                    violated = true;
                }
                break;
            }
            let fails = if strong { violated || !improved } else { violated };
            if fails {
                witness = Some(AxiomWitness::Participation {
                    profile: with_voter.profile(rank),
                    voter,
                    probs_with: p.probs().to_vec(),
                    probs_without: q.probs().to_vec(),
                });
                break 'outer;
            }
        }
    }

    Ok(AxiomReport {
        axiom: if strong {
            AxiomId::StrongLexiParticipation
        } else {
            AxiomId::LexiParticipation
        },
        mechanism: spec.mechanism(),
        lambda: spec.lambda(),
        alpha: None,
        verdict: if witness.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        measured_alpha: None,
        witness,
        space: exhaustive(m, n),
        cases_checked: cases,
    })
}
