//! Exact check of the two-sided likelihood-ratio bound between the
//! released-value densities of a secret pair.
//!
//! Both densities are Laplace mixtures with the same scale. Between two
//! consecutive atoms each one has the form `A e^{y/θ} + B e^{-y/θ}` with
//! fixed `A, B >= 0`, so their ratio is a Möbius map of `e^{2y/θ}` and is
//! monotone there. The supremum of `|ln m1 - ln m2|` is therefore reached
//! at an atom or in one of the two tails, and [`worst_case_log_ratio`]
//! evaluates exactly those candidates.

use serde::{Serialize, Serializer};

use crate::calibrate::PrivacyBudget;
use crate::dist::{DiscreteDistribution, SecretPair, SystemConfig, SUPPORT_MERGE_TOL};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mechanism::{LaplaceMixture, LaplaceNoise};

/// Additive slack on ε when deciding `satisfied`.
pub const PASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Point(f64),
    PosInf,
    NegInf,
}

impl Serialize for Location {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Location::Point(y) => s.serialize_f64(*y),
            Location::PosInf => s.serialize_str("+inf"),
            Location::NegInf => s.serialize_str("-inf"),
        }
    }
}

/// Supremum of `|ln m1(y) - ln m2(y)|` and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstCase {
    pub max_abs_log_ratio: f64,
    pub attained_at: Location,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub max_abs_log_ratio: f64,
    pub attained_at: Location,
    pub satisfied: bool,
    pub epsilon: f64,
    pub theta: f64,
    pub pair: String,
}

impl VerificationReport {
    pub fn new(worst: WorstCase, eps: PrivacyBudget, theta: f64, pair: String) -> Self {
        Self {
            max_abs_log_ratio: worst.max_abs_log_ratio,
            attained_at: worst.attained_at,
            satisfied: worst.max_abs_log_ratio <= eps.epsilon() + PASS_TOL,
            epsilon: eps.epsilon(),
            theta,
            pair,
        }
    }
}

pub fn worst_case_log_ratio(m1: &LaplaceMixture, m2: &LaplaceMixture) -> Result<WorstCase> {
    if !m1.same_scale(m2) {
        return Err(Error::MismatchedScale(m1.theta(), m2.theta()));
    }

    let mut kinks: Vec<f64> = m1.kinks().iter().chain(m2.kinks()).copied().collect();
    kinks.sort_by(f64::total_cmp);
    kinks.dedup_by(|a, b| (*a - *b).abs() <= SUPPORT_MERGE_TOL);

    let tail = |sign: f64| (m1.log_tail_weight(sign) - m2.log_tail_weight(sign)).abs();
    let candidates = std::iter::once((Location::NegInf, tail(-1.0)))
        .chain(kinks.iter().map(|&y| {
            (
                Location::Point(y),
                (m1.log_evaluate(y) - m2.log_evaluate(y)).abs(),
            )
        }))
        .chain(std::iter::once((Location::PosInf, tail(1.0))));

    let (attained_at, max_abs_log_ratio) = candidates
        .reduce(|best, c| if c.1 > best.1 { c } else { best })
        .expect("at least the two tails");
    Ok(WorstCase {
        max_abs_log_ratio,
        attained_at,
    })
}

fn nearly_equal(p: &DiscreteDistribution, q: &DiscreteDistribution) -> bool {
    p.len() == q.len()
        && p.iter()
            .zip(q.iter())
            .all(|((x, a), (y, b))| (x - y).abs() <= SUPPORT_MERGE_TOL && (a - b).abs() <= 1e-12)
}

/// Builds both conditional priors of `pair`, adds Laplace(θ) to each and
/// checks the two-sided ratio bound.
///
/// `theta <= 0` means no noise, which is only acceptable when both arms
/// induce the same prior.
pub fn verify_pair(
    config: &SystemConfig,
    pair: &SecretPair,
    theta: f64,
    eps: PrivacyBudget,
) -> Result<VerificationReport> {
    let user = pair.require_user()?;
    let (left, right) = pair.arms();
    let p = config.conditional_prior(user, &left)?;
    let q = config.conditional_prior(user, &right)?;

    if theta <= 0.0 || !theta.is_finite() {
        if theta.is_finite() && theta <= 0.0 && nearly_equal(&p, &q) {
            let worst = WorstCase {
                max_abs_log_ratio: 0.0,
                attained_at: Location::Point(p.min()),
            };
            return Ok(VerificationReport::new(worst, eps, theta, pair.describe()));
        }
        return Err(Error::InvalidParameter(format!(
            "theta = {theta} is not a usable Laplace scale for {}",
            pair.describe()
        )));
    }

    let noise = LaplaceNoise::new(theta)?;
    let worst = worst_case_log_ratio(
        &LaplaceMixture::new(p, noise),
        &LaplaceMixture::new(q, noise),
    )?;
    Ok(VerificationReport::new(worst, eps, theta, pair.describe()))
}

/// [`verify_pair`] over many pairs at one θ, in input order.
pub fn verify_pairs(
    config: &SystemConfig,
    pairs: &[SecretPair],
    theta: f64,
    eps: PrivacyBudget,
    exec: Execution,
) -> Result<Vec<VerificationReport>> {
    exec.map(pairs, |pair| verify_pair(config, pair, theta, eps))
        .into_iter()
        .collect()
}
