//! Ranked-ballot data model.
//!
//! A ballot is a [`LinearOrder`], a strict total ranking of all `m`
//! alternatives; a [`Profile`] is one ballot per voter. Alternatives are
//! identified by their index in `0..m` everywhere in this crate; the
//! [`Alternatives`] table maps indices to human-readable labels and only
//! matters at the I/O boundary.
//!
//! Ballot files are UTF-8 text with one record per line:
//!
//! ```text
//! # comments and blank lines are ignored
//! 51: a1 > a2 > a3 > a4 > a5
//! 50: a2 > a3 > a4 > a5 > a1
//! ```
//!
//! Labels match `[A-Za-z0-9_]+`. The alternative set is the union over all
//! lines and every line must rank all of it; multiplicities expand to
//! positional votes in file order.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Largest number of expanded votes a ballot file may produce.
const MAX_PARSED_VOTES: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BallotError {
    #[error("ranking is not a permutation of 0..{m}")]
    NotAPermutation { m: usize },
    #[error("a profile needs at least one vote")]
    EmptyProfile,
    #[error("need at least 2 alternatives, got {m}")]
    TooFewAlternatives { m: usize },
    #[error("vote {index} ranks {got} alternatives, expected {expected}")]
    MixedAlternativeCounts {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("voter id {voter} out of range for {n} voters")]
    VoterOutOfRange { voter: usize, n: usize },
    #[error("replacement order ranks {got} alternatives, expected {expected}")]
    WrongAlternativeCount { got: usize, expected: usize },
    #[error("cannot remove a voter from a single-vote profile")]
    CannotRemoveLastVote,
    #[error("labels must be distinct, non-empty and match [A-Za-z0-9_]+")]
    InvalidLabels,
}

/// Errors raised while parsing a ballot file. Every variant carries the
/// 1-based line number it was detected on.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected '<count>: <alt> > <alt> > ...'")]
    MissingColon { line: usize },
    #[error("line {line}: bad multiplicity {token:?}")]
    BadMultiplicity { line: usize, token: String },
    #[error("line {line}: multiplicity must be positive")]
    NonPositiveMultiplicity { line: usize },
    #[error("line {line}: label {label:?} is not [A-Za-z0-9_]+")]
    BadLabel { line: usize, label: String },
    #[error("line {line}: alternative {label:?} appears twice")]
    DuplicateAlternative { line: usize, label: String },
    #[error("line {line}: ranking does not mention {label:?}")]
    MissingAlternative { line: usize, label: String },
    #[error("ballot file declares {m} alternative(s), need at least 2")]
    TooFewAlternatives { m: usize },
    #[error("ballot file contains no vote records")]
    NoRecords,
    #[error("ballot file expands to more than {MAX_PARSED_VOTES} votes")]
    TooManyVotes,
}

/// A strict total ranking of the alternatives `0..m`, most-preferred first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinearOrder {
    ranking: Vec<usize>,
}

impl LinearOrder {
    /// Builds an order from a ranking, most-preferred first. The ranking must
    /// be a permutation of `0..m`.
    pub fn new(ranking: Vec<usize>) -> Result<Self, BallotError> {
        let m = ranking.len();
        let mut seen = vec![false; m];
        for &alt in &ranking {
            if alt >= m || seen[alt] {
                return Err(BallotError::NotAPermutation { m });
            }
            seen[alt] = true;
        }
        Ok(Self { ranking })
    }

    pub fn m(&self) -> usize {
        self.ranking.len()
    }

    /// Alternatives from most to least preferred.
    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    /// 0-based position of `alt` (0 = most preferred).
    pub fn position_of(&self, alt: usize) -> usize {
        self.ranking.iter().position(|&x| x == alt).unwrap()
    }

    /// Whether `a` is ranked strictly above `b`.
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.position_of(a) < self.position_of(b)
    }

    pub fn top(&self) -> usize {
        self.ranking[0]
    }

    pub fn reversed(&self) -> LinearOrder {
        let mut ranking = self.ranking.clone();
        ranking.reverse();
        LinearOrder { ranking }
    }
}

impl fmt::Debug for LinearOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ranking.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(">"))
    }
}

// Audit reports embed orders and profiles as ballot text under the default
// `a1..am` labels.
impl serde::Serialize for LinearOrder {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_order(self, &Alternatives::default_for(self.m())))
    }
}

/// A preference profile: one [`LinearOrder`] per voter, all over the same
/// `m >= 2` alternatives. Voters are identified by position.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    votes: Vec<LinearOrder>,
    m: usize,
}

impl Profile {
    pub fn new(votes: Vec<LinearOrder>) -> Result<Self, BallotError> {
        let first = votes.first().ok_or(BallotError::EmptyProfile)?;
        let m = first.m();
        if m < 2 {
            return Err(BallotError::TooFewAlternatives { m });
        }
        for (index, vote) in votes.iter().enumerate() {
            if vote.m() != m {
                return Err(BallotError::MixedAlternativeCounts {
                    index,
                    got: vote.m(),
                    expected: m,
                });
            }
        }
        Ok(Self { votes, m })
    }

    /// Number of alternatives.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of voters.
    pub fn n(&self) -> usize {
        self.votes.len()
    }

    pub fn votes(&self) -> &[LinearOrder] {
        &self.votes
    }

    pub fn vote(&self, voter: usize) -> &LinearOrder {
        &self.votes[voter]
    }

    /// The neighboring-profile constructor: returns a copy with voter
    /// `voter`'s ballot replaced by `order`. The voter count is unchanged, so
    /// the result is a neighboring dataset in the differential-privacy sense.
    pub fn replace_vote(&self, voter: usize, order: LinearOrder) -> Result<Profile, BallotError> {
        if voter >= self.n() {
            return Err(BallotError::VoterOutOfRange {
                voter,
                n: self.n(),
            });
        }
        if order.m() != self.m {
            return Err(BallotError::WrongAlternativeCount {
                got: order.m(),
                expected: self.m,
            });
        }
        let mut votes = self.votes.clone();
        votes[voter] = order;
        Ok(Profile { votes, m: self.m })
    }

    /// Removes voter `voter`, preserving the order of the remaining votes.
    /// Used by the participation axioms; privacy analyses use
    /// [`Profile::replace_vote`] instead.
    pub fn remove_vote(&self, voter: usize) -> Result<Profile, BallotError> {
        if self.n() < 2 {
            return Err(BallotError::CannotRemoveLastVote);
        }
        if voter >= self.n() {
            return Err(BallotError::VoterOutOfRange {
                voter,
                n: self.n(),
            });
        }
        let mut votes = self.votes.clone();
        votes.remove(voter);
        Ok(Profile { votes, m: self.m })
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.votes.iter()).finish()
    }
}

impl serde::Serialize for Profile {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_ballots(self, &Alternatives::default_for(self.m)))
    }
}

/// All orders obtained from `order` by moving `alt` to a strictly higher
/// position while keeping the relative order of the other alternatives
/// unchanged. Returns one order per target position, i.e. exactly
/// `order.position_of(alt)` of them; an alternative already on top has no
/// pushups.
pub fn enumerate_pushups(order: &LinearOrder, alt: usize) -> Vec<LinearOrder> {
    let pos = order.position_of(alt);
    let mut rest: Vec<usize> = order
        .ranking()
        .iter()
        .copied()
        .filter(|&x| x != alt)
        .collect();
    let mut out = Vec::with_capacity(pos);
    for target in 0..pos {
        rest.insert(target, alt);
        out.push(LinearOrder {
            ranking: rest.clone(),
        });
        rest.remove(target);
    }
    out
}

/// All `m!` linear orders over `0..m`, in lexicographic order of their
/// rankings. `all_orders(m)[k]` is the order with permutation rank `k`.
pub fn all_orders(m: usize) -> Vec<LinearOrder> {
    assert!(m >= 1, "need at least one alternative");
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..m).collect();
    loop {
        out.push(LinearOrder {
            ranking: current.clone(),
        });
        // next lexicographic permutation
        let Some(i) = (0..m.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..m).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

/// Streams every profile in `L(A)^n` exactly once, in lexicographic order of
/// the per-voter permutation ranks (voter 0 most significant). The caller is
/// responsible for the `(m!)^n` item count being feasible.
pub fn enumerate_profiles(m: usize, n: usize) -> impl Iterator<Item = Profile> {
    assert!(m >= 2, "need at least 2 alternatives");
    assert!(n >= 1, "need at least 1 voter");
    let orders = all_orders(m);
    let base = orders.len();
    let mut digits = vec![0usize; n];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let votes: Vec<LinearOrder> = digits.iter().map(|&d| orders[d].clone()).collect();
        // increment the mixed-radix counter, least significant digit last
        let mut i = n;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < base {
                break;
            }
            digits[i] = 0;
        }
        Some(Profile { votes, m })
    })
}

/// Label table for the alternatives of one election. Index `i` in every
/// other type of this crate refers to `labels[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alternatives {
    labels: Vec<String>,
}

fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Alternatives {
    /// Builds a label table. Labels must be distinct, non-empty and match
    /// `[A-Za-z0-9_]+`.
    pub fn new(labels: Vec<String>) -> Result<Self, BallotError> {
        let m = labels.len();
        if m < 2 {
            return Err(BallotError::TooFewAlternatives { m });
        }
        for (i, label) in labels.iter().enumerate() {
            if !valid_label(label) || labels[..i].contains(label) {
                return Err(BallotError::InvalidLabels);
            }
        }
        Ok(Self { labels })
    }

    /// Default labels `a1..am` for programmatically built profiles.
    pub fn default_for(m: usize) -> Self {
        Self {
            labels: (1..=m).map(|i| format!("a{i}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, alt: usize) -> &str {
        &self.labels[alt]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Result of parsing a ballot file: the profile plus the label table, with
/// indices assigned by first appearance in the file.
#[derive(Clone, Debug)]
pub struct ParsedBallots {
    pub profile: Profile,
    pub alternatives: Alternatives,
}

/// Parses ballot-file text (see the module docs for the grammar).
pub fn parse_profile(text: &str) -> Result<ParsedBallots, ParseError> {
    struct Record {
        line: usize,
        count: u64,
        labels: Vec<String>,
    }

    let mut records = Vec::new();
    let mut label_index: HashMap<String, usize> = HashMap::new();
    let mut labels_in_order: Vec<String> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((count_part, ranking_part)) = trimmed.split_once(':') else {
            return Err(ParseError::MissingColon { line });
        };
        let count_token = count_part.trim();
        let count: i64 = count_token.parse().map_err(|_| ParseError::BadMultiplicity {
            line,
            token: count_token.to_string(),
        })?;
        if count <= 0 {
            return Err(ParseError::NonPositiveMultiplicity { line });
        }
        let mut labels = Vec::new();
        for token in ranking_part.split('>') {
            let label = token.trim();
            if !valid_label(label) {
                return Err(ParseError::BadLabel {
                    line,
                    label: label.to_string(),
                });
            }
            if labels.iter().any(|l: &String| l == label) {
                return Err(ParseError::DuplicateAlternative {
                    line,
                    label: label.to_string(),
                });
            }
            if !label_index.contains_key(label) {
                label_index.insert(label.to_string(), labels_in_order.len());
                labels_in_order.push(label.to_string());
            }
            labels.push(label.to_string());
        }
        records.push(Record {
            line,
            count: count as u64,
            labels,
        });
    }

    if records.is_empty() {
        return Err(ParseError::NoRecords);
    }
    let m = labels_in_order.len();
    if m < 2 {
        return Err(ParseError::TooFewAlternatives { m });
    }

    let mut votes = Vec::new();
    let mut total: u64 = 0;
    for record in &records {
        if record.labels.len() != m {
            // the union has a label this line never mentions
            let missing = labels_in_order
                .iter()
                .find(|l| !record.labels.contains(l))
                .unwrap();
            return Err(ParseError::MissingAlternative {
                line: record.line,
                label: missing.clone(),
            });
        }
        total += record.count;
        if total > MAX_PARSED_VOTES {
            return Err(ParseError::TooManyVotes);
        }
        let ranking: Vec<usize> = record.labels.iter().map(|l| label_index[l]).collect();
        let order = LinearOrder { ranking };
        for _ in 0..record.count {
            votes.push(order.clone());
        }
    }

    let profile = Profile { votes, m };
    let alternatives = Alternatives {
        labels: labels_in_order,
    };
    Ok(ParsedBallots {
        profile,
        alternatives,
    })
}

/// Renders an order as ballot text, e.g. `a1>a2>a3`.
pub fn format_order(order: &LinearOrder, alternatives: &Alternatives) -> String {
    let parts: Vec<&str> = order
        .ranking()
        .iter()
        .map(|&a| alternatives.label(a))
        .collect();
    parts.join(">")
}

/// Renders a profile in the ballot-file grammar, grouping consecutive equal
/// votes into one multiplicity-prefixed line. `parse_profile` on the result
/// reproduces the vote multiset.
pub fn format_ballots(profile: &Profile, alternatives: &Alternatives) -> String {
    let mut out = String::new();
    let votes = profile.votes();
    let mut i = 0;
    while i < votes.len() {
        let mut j = i + 1;
        while j < votes.len() && votes[j] == votes[i] {
            j += 1;
        }
        out.push_str(&format!(
            "{}: {}\n",
            j - i,
            format_order(&votes[i], alternatives)
        ));
        i = j;
    }
    out
}
