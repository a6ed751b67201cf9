//! Differentially private Condorcet voting rules.
//!
//! The voting rule implemented here perturbs the pairwise majority graph of a
//! ranked-ballot profile with one of three noise models (Laplace noise on the
//! margins, an exponential-mechanism edge flip, or randomized response on the
//! margin sign) and re-samples the noisy graph until it has a Condorcet
//! winner, which is returned. The winner distribution of that procedure has a
//! closed product form, so it can also be computed exactly and sampled
//! directly.
//!
//! The crate is organised around that pipeline:
//!
//! * [`ballots`] — ranked-ballot data model: linear orders, profiles,
//!   neighbor construction, pushups, and exhaustive profile enumeration.
//! * [`tally`] — pairwise tallies, majority margins, the unweighted majority
//!   graph, and Condorcet-winner detection.
//! * [`mechanisms`] — the three edge-noise models and the rejection sampler.
//! * [`distribution`] — the exact winner distribution in log space, the
//!   probability that a single noisy graph has a Condorcet winner, and direct
//!   categorical sampling.
//! * [`bounds`] — closed-form privacy budgets and axiom-satisfaction levels,
//!   plus CSV curve emission.
//! * [`audit`] — exhaustive exact-DP measurement over neighboring profiles
//!   and checkers for the probabilistic voting axioms, each producing a
//!   witness-carrying report.
//!
//! All types are immutable values and all operations are pure; samplers
//! mutate only the caller-provided random source.

pub mod audit;
pub mod ballots;
pub mod bounds;
pub mod distribution;
pub mod mechanisms;
pub mod tally;

pub use audit::{AxiomId, AxiomReport, OrderConvention, PrivacyAuditReport, SearchSpace, Verdict};
pub use ballots::{Alternatives, LinearOrder, ParsedBallots, Profile};
pub use bounds::{BoundRow, BoundTable};
pub use distribution::WinnerDistribution;
pub use mechanisms::{EdgeProb, Mechanism, NoiseSpec};
pub use tally::{MajorityMargins, PairwiseTally, Umg};
