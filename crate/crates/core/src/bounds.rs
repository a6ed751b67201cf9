//! Closed-form privacy budgets and axiom-satisfaction levels, as functions of
//! the mechanism, the noise level and the number of alternatives, plus the
//! curve-table emission behind the CLI `curves` subcommand.
//!
//! Nothing here touches a profile: these are the analytic counterparts that
//! the [`crate::audit`] module measures against.

use serde::Serialize;
use thiserror::Error;

use crate::mechanisms::{edge_win_prob, Mechanism, NoiseSpec};

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("noise level must be positive and finite, got {lambda}")]
    InvalidLambda { lambda: f64 },
    #[error("need at least 2 alternatives, got {m}")]
    InvalidM { m: usize },
    #[error("privacy budget must be non-negative, got {eps}")]
    NegativeEpsilon { eps: f64 },
    #[error("randomized response meets the Condorcet ratio 1 for every m")]
    UnboundedMechanism,
    #[error("lambda grid must be non-empty with positive finite entries")]
    InvalidGrid,
}

fn validate(lambda: f64, m: usize) -> Result<(), BoundsError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(BoundsError::InvalidLambda { lambda });
    }
    if m < 2 {
        return Err(BoundsError::InvalidM { m });
    }
    Ok(())
}

/// Closed-form `(eps_lower, eps_upper)` bracket for the exact privacy budget.
///
/// The upper bound is `2(m-1)*lambda` for every mechanism. The lower bound is
/// `(m-1)*lambda` for randomized response; for the Laplace and exponential
/// mechanisms it is
///
/// ```text
/// ln( (G^(m-1)(2) - G^(m-1)(-2)) / (G(2) - G(-2)) * 2^(m-2)/(m-1) ) + (m-1)*lambda
/// ```
///
/// with `G` the per-edge win probability at margins ±2. The audit measures
/// where this bracket is conservative; for the Laplace mechanism the measured
/// budget can exceed the upper bound (its per-edge ratio reaches `e^(2*lambda)`
/// rather than `e^lambda`, see the audit reports).
pub fn dp_bounds(
    mechanism: Mechanism,
    lambda: f64,
    m: usize,
) -> Result<(f64, f64), BoundsError> {
    validate(lambda, m)?;
    let k = (m - 1) as f64;
    let upper = 2.0 * k * lambda;
    let lower = match mechanism {
        Mechanism::Rr => k * lambda,
        Mechanism::Lap | Mechanism::Exp => {
            let spec = NoiseSpec::new(mechanism, lambda).expect("validated");
            let g_hi = edge_win_prob(spec, 2);
            let g_lo = edge_win_prob(spec, -2);
            let ratio = (g_hi.powi(m as i32 - 1) - g_lo.powi(m as i32 - 1)) / (g_hi - g_lo);
            (ratio * 2f64.powi(m as i32 - 2) / k).ln() + k * lambda
        }
    };
    Ok((lower, upper))
}

/// Guaranteed ratio between the Condorcet winner's probability and any other
/// alternative's: `e^lambda` for randomized response,
/// `(1+e^(lambda/2)) / (1+e^(-lambda/2))^(m-1)` for the exponential
/// mechanism, `2e^lambda (1 - e^(-lambda)/2)^(m-1)` for Laplace. Values below
/// 1 are meaningful: they quantify how far the rule is from the ratio-1
/// criterion.
pub fn alpha_pcondorcet(
    mechanism: Mechanism,
    lambda: f64,
    m: usize,
) -> Result<f64, BoundsError> {
    validate(lambda, m)?;
    let k = m as i32 - 1;
    Ok(match mechanism {
        Mechanism::Rr => lambda.exp(),
        Mechanism::Exp => {
            (1.0 + (lambda / 2.0).exp()) / (1.0 + (-lambda / 2.0).exp()).powi(k)
        }
        Mechanism::Lap => 2.0 * lambda.exp() * (1.0 - 0.5 * (-lambda).exp()).powi(k),
    })
}

/// Guaranteed stochastic-dominance strategyproofness level `e^((2-2m)*lambda)`,
/// identical for all three mechanisms.
pub fn alpha_sdsp(lambda: f64, m: usize) -> Result<f64, BoundsError> {
    validate(lambda, m)?;
    Ok(((2.0 - 2.0 * m as f64) * lambda).exp())
}

/// Largest `m` for which [`alpha_pcondorcet`] still reaches 1, i.e. the rule
/// honors the ratio-1 Condorcet criterion. Defined for the Laplace and
/// exponential mechanisms; randomized response reaches ratio `e^lambda >= 1`
/// for every `m`, so asking is an error.
pub fn pcondorcet_max_m(mechanism: Mechanism, lambda: f64) -> Result<usize, BoundsError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(BoundsError::InvalidLambda { lambda });
    }
    let bound = match mechanism {
        Mechanism::Rr => return Err(BoundsError::UnboundedMechanism),
        Mechanism::Exp => {
            let t = ((lambda / 2.0).exp() + 1.0).ln();
            t / (t - lambda / 2.0) + 1.0
        }
        Mechanism::Lap => {
            let ln2 = std::f64::consts::LN_2;
            (lambda + ln2) / (ln2 - (2.0 - (-lambda).exp()).ln()) + 1.0
        }
    };
    Ok(bound.floor() as usize)
}

/// What a privacy budget says about the axioms, independent of mechanism:
/// no `eps`-DP rule exceeds Condorcet ratio `e^eps` (the cap), and every
/// `eps`-DP rule is at least `e^(-eps)`-SD-strategyproof (the floor).
pub fn axiom_dp_relations(eps: f64) -> Result<(f64, f64), BoundsError> {
    if eps.is_nan() || eps < 0.0 {
        return Err(BoundsError::NegativeEpsilon { eps });
    }
    Ok((eps.exp(), (-eps).exp()))
}

/// One grid point of the bound curves.
#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub mechanism: Mechanism,
    pub lambda: f64,
    pub m: usize,
    pub eps_lower: f64,
    pub eps_upper: f64,
    pub alpha_pcond: f64,
    pub alpha_sdsp: f64,
}

/// Bound curves over a lambda grid, one row per (mechanism, lambda), rows
/// ordered by mechanism then lambda.
#[derive(Clone, Debug, Serialize)]
pub struct BoundTable {
    pub m: usize,
    pub rows: Vec<BoundRow>,
}

/// Formats with 12 significant digits.
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

impl BoundTable {
    /// CSV emission: a fixed header then one row per grid point, floats with
    /// 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("mechanism,lambda,m,eps_lower,eps_upper,alpha_pcond,alpha_sdsp\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.mechanism,
                fmt_sig12(row.lambda),
                row.m,
                fmt_sig12(row.eps_lower),
                fmt_sig12(row.eps_upper),
                fmt_sig12(row.alpha_pcond),
                fmt_sig12(row.alpha_sdsp),
            ));
        }
        out
    }
}

/// Evaluates every closed form on a lambda grid for a fixed `m`.
pub fn emit_curves(
    mechanisms: &[Mechanism],
    lambda_grid: &[f64],
    m: usize,
) -> Result<BoundTable, BoundsError> {
    if lambda_grid.is_empty() || mechanisms.is_empty() {
        return Err(BoundsError::InvalidGrid);
    }
    if lambda_grid.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(BoundsError::InvalidGrid);
    }
    let mut grid = lambda_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut mechs: Vec<Mechanism> = Mechanism::ALL
        .into_iter()
        .filter(|mech| mechanisms.contains(mech))
        .collect();
    mechs.dedup();

    let mut rows = Vec::with_capacity(mechs.len() * grid.len());
    for &mech in &mechs {
        for &lambda in &grid {
            let (eps_lower, eps_upper) = dp_bounds(mech, lambda, m)?;
            rows.push(BoundRow {
                mechanism: mech,
                lambda,
                m,
                eps_lower,
                eps_upper,
                alpha_pcond: alpha_pcondorcet(mech, lambda, m)?,
                alpha_sdsp: alpha_sdsp(lambda, m)?,
            });
        }
    }
    Ok(BoundTable { m, rows })
}
