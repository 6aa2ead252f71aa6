//! Minimal Laplace scale θ for each secret-pair family.
//!
//! | family          | calibrator                          | θ                                        |
//! |-----------------|-------------------------------------|------------------------------------------|
//! | `(s_a, s_b)`    | [`calibrate_sab`]                   | `max |a - b| / ε`                        |
//! | `(s_a, s_⊥)`    | [`calibrate_saperp`]                | `max |a| / ε`                            |
//! | `(s_P, s_⊥)`    | [`calibrate_spperp_max`]            | `max |t| / ε`                            |
//! | `(s_P, s_⊥)`    | [`calibrate_spperp_mgf`]            | root of `E[e^{|D|/θ}] = e^ε`             |
//! | `(s_P, s_⊥)`    | [`calibrate_spperp_bernoulli`]      | `1 / ln((e^ε - (1-p)) / p)`              |
//! | `(s_P, s_Q)`    | [`calibrate_spq`]                   | `max Δ*(P, Q) / ε` on the user's own laws |
//! | `(s_P, s_Q)`    | [`calibrate_spq_bernoulli`]         | `1 / ε`                                  |
//! | `(s_P, s_Q)`    | [`calibrate_spq_bernoulli_relaxed`] | `sup_x 1 / ln(e^ε + (e^ε - 1) ψ(x))`     |
//! | any             | [`calibrate_generic`]               | `max Δ*` of the full conditional priors / ε |
//!
//! None of these depend on presence probabilities. Each returns the
//! smallest θ its sufficient condition allows.

use serde::{Deserialize, Serialize};

use crate::brent::brent;
use crate::dist::{
    DiscreteDistribution, DistAbsent, DistPair, SecretPair, SystemConfig, UserId, ValueAbsent,
    ValuePair,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::transport::delta_star;

/// Default absolute tolerance on θ for the root solve.
pub const DEFAULT_THETA_TOL: f64 = 1e-10;

/// Iteration cap for the root solve; a bracketed monotone root never gets near it.
pub const MAX_BRENT_ITERATIONS: usize = 200;

/// Privacy budget ε, finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct PrivacyBudget(f64);

impl PrivacyBudget {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_finite() && epsilon > 0.0 {
            Ok(Self(epsilon))
        } else {
            Err(Error::InvalidEpsilon(epsilon))
        }
    }

    pub fn epsilon(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Sab,
    Saperp,
    SpperpMax,
    SpperpMgf,
    SpperpBernoulli,
    SpqDelta,
    SpqBernoulli,
    SpqBernoulliRelaxed,
    KantorovichGeneric,
}

/// Which input bound θ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Position of the binding pair or distribution in the input list.
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub user: Option<UserId>,
    /// Binding support point, where one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<f64>,
    pub description: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub theta: f64,
    pub method: Method,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

struct Candidate {
    theta: f64,
    witness: Witness,
    diagnostics: Option<Diagnostics>,
}

// Largest θ wins; ties go to the first candidate in iteration order.
fn reduce(method: Method, candidates: impl IntoIterator<Item = Candidate>) -> CalibrationResult {
    let best = candidates
        .into_iter()
        .fold(None::<Candidate>, |best, c| match best {
            Some(b) if b.theta >= c.theta => Some(b),
            _ => Some(c),
        });
    match best {
        Some(c) => CalibrationResult {
            theta: c.theta,
            method,
            witness: Some(c.witness),
            diagnostics: c.diagnostics,
        },
        None => CalibrationResult {
            theta: 0.0,
            method,
            witness: None,
            diagnostics: Some(Diagnostics {
                note: Some("no secret pairs given".into()),
                ..Default::default()
            }),
        },
    }
}

pub fn calibrate_sab(pairs: &[ValuePair], eps: PrivacyBudget) -> CalibrationResult {
    reduce(
        Method::Sab,
        pairs.iter().enumerate().map(|(i, p)| Candidate {
            theta: (p.a - p.b).abs() / eps.0,
            witness: Witness {
                index: i,
                user: p.user.clone(),
                point: None,
                description: format!("|a - b| = |{} - {}|", p.a, p.b),
            },
            diagnostics: None,
        }),
    )
}

/// Absence is the same as reporting zero, so this is [`calibrate_sab`] with `b = 0`.
pub fn calibrate_saperp(pairs: &[ValueAbsent], eps: PrivacyBudget) -> CalibrationResult {
    reduce(
        Method::Saperp,
        pairs.iter().enumerate().map(|(i, p)| Candidate {
            theta: p.a.abs() / eps.0,
            witness: Witness {
                index: i,
                user: p.user.clone(),
                point: None,
                description: format!("|a| = |{}|", p.a),
            },
            diagnostics: None,
        }),
    )
}

pub fn calibrate_spperp_max(
    dists: &[DiscreteDistribution],
    eps: PrivacyBudget,
) -> CalibrationResult {
    reduce(
        Method::SpperpMax,
        dists.iter().enumerate().map(|(i, d)| {
            let t = if d.min().abs() > d.max().abs() {
                d.min()
            } else {
                d.max()
            };
            Candidate {
                theta: t.abs() / eps.0,
                witness: Witness {
                    index: i,
                    user: None,
                    point: Some(t),
                    description: format!("max |t| = {}", t.abs()),
                },
                diagnostics: None,
            }
        }),
    )
}

/// `ln E[e^{|D|/θ}]`, evaluated as a log-sum-exp.
pub fn log_mgf_abs(dist: &DiscreteDistribution, theta: f64) -> f64 {
    let terms: Vec<f64> = dist.iter().map(|(t, m)| m.ln() + t.abs() / theta).collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + terms.iter().map(|v| (v - top).exp()).sum::<f64>().ln()
}

/// Per-distribution root of `E[e^{|D|/θ}] = e^ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MgfRoot {
    pub theta: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
}

/// Solves `ln E[e^{|D|/θ}] - ε = 0` for θ by Brent's method.
///
/// The left side is strictly decreasing in θ once some `|t| > 0`. The
/// upper end `max|t| / ε` always has a non-positive value because the
/// expectation is at most `e^{max|t|/θ}`; the lower end is found by halving
/// from there until the value turns positive. A law concentrated on zero
/// needs no noise and yields θ = 0.
pub fn mgf_root(dist: &DiscreteDistribution, eps: PrivacyBudget, tol: f64) -> Result<MgfRoot> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be > 0, got {tol}"
        )));
    }
    let top = dist.max_abs();
    if top == 0.0 {
        return Ok(MgfRoot {
            theta: 0.0,
            iterations: 0,
            bracket: (0.0, 0.0),
        });
    }
    let g = |theta: f64| log_mgf_abs(dist, theta) - eps.0;
    let hi = top / eps.0;
    if g(hi) >= 0.0 {
        return Ok(MgfRoot {
            theta: hi,
            iterations: 0,
            bracket: (hi, hi),
        });
    }
    let mut lo = 0.5 * hi;
    while g(lo) <= 0.0 {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return Err(Error::NoConvergence {
                iterations: 0,
                lo,
                hi,
            });
        }
    }
    let root = brent(g, lo, hi, tol, MAX_BRENT_ITERATIONS)?;
    Ok(MgfRoot {
        theta: root.root,
        iterations: root.iterations,
        bracket: root.bracket,
    })
}

/// θ = max over distributions of the [`mgf_root`] of each.
pub fn calibrate_spperp_mgf(
    dists: &[DiscreteDistribution],
    eps: PrivacyBudget,
    tol: f64,
) -> Result<CalibrationResult> {
    let roots = dists
        .iter()
        .map(|d| mgf_root(d, eps, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce(
        Method::SpperpMgf,
        roots.into_iter().enumerate().map(|(i, r)| Candidate {
            theta: r.theta,
            witness: Witness {
                index: i,
                user: None,
                point: None,
                description: "E[exp(|D|/θ)] = exp(ε)".into(),
            },
            diagnostics: Some(Diagnostics {
                iterations: Some(r.iterations),
                bracket: Some(r.bracket),
                note: (r.theta == 0.0)
                    .then(|| "all support points are zero; no noise needed".into()),
            }),
        }),
    ))
}

/// Closed-form root for `D ~ Bernoulli(p)`.
pub fn calibrate_spperp_bernoulli(p: f64, eps: PrivacyBudget) -> Result<CalibrationResult> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "Bernoulli parameter {p} outside [0, 1]"
        )));
    }
    let witness = Witness {
        index: 0,
        user: None,
        point: None,
        description: format!("Bernoulli({p})"),
    };
    if p == 0.0 {
        return Ok(CalibrationResult {
            theta: 0.0,
            method: Method::SpperpBernoulli,
            witness: Some(witness),
            diagnostics: Some(Diagnostics {
                note: Some("p = 0: the user always reports zero".into()),
                ..Default::default()
            }),
        });
    }
    // (e^ε - (1 - p)) / p = 1 + (e^ε - 1) / p
    let theta = 1.0 / (eps.0.exp_m1() / p).ln_1p();
    Ok(CalibrationResult {
        theta,
        method: Method::SpperpBernoulli,
        witness: Some(witness),
        diagnostics: None,
    })
}

/// θ from the user-level laws only; the rest of the system never enters.
pub fn calibrate_spq(pairs: &[DistPair], eps: PrivacyBudget) -> CalibrationResult {
    reduce(
        Method::SpqDelta,
        pairs.iter().enumerate().map(|(i, pair)| {
            let r = delta_star(&pair.p, &pair.q);
            Candidate {
                theta: r.sup / eps.0,
                witness: Witness {
                    index: i,
                    user: pair.user.clone(),
                    point: Some(r.witness),
                    description: format!("sup Δ* = {}", r.sup),
                },
                diagnostics: None,
            }
        }),
    )
}

/// Any two Bernoulli laws are at most one apart in the optimal plan.
pub fn calibrate_spq_bernoulli(eps: PrivacyBudget) -> CalibrationResult {
    CalibrationResult {
        theta: 1.0 / eps.0,
        method: Method::SpqBernoulli,
        witness: None,
        diagnostics: None,
    }
}

/// Inputs to the relaxed Bernoulli condition: the two success
/// probabilities and the law of everyone else's sum.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryRelaxContext {
    p: f64,
    q: f64,
    background: DiscreteDistribution,
}

impl BinaryRelaxContext {
    pub fn new(p: f64, q: f64, background: DiscreteDistribution) -> Result<Self> {
        for v in [p, q] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "Bernoulli parameter {v} outside (0, 1)"
                )));
            }
        }
        if p == q {
            return Err(Error::InvalidParameter("p and q must differ".into()));
        }
        Ok(Self { p, q, background })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn background(&self) -> &DiscreteDistribution {
        &self.background
    }

    /// `(x, ψ(x))` for every `x` with `B(x - 1) > 0`, where `B` is the
    /// background law. Points where `B(x - 1) = 0` carry no plan mass and
    /// impose nothing.
    pub fn psi(&self) -> Vec<(f64, f64)> {
        let (lo, hi, stay) = if self.p < self.q {
            (self.p, self.q, 1.0 - self.q)
        } else {
            (self.q, self.p, 1.0 - self.p)
        };
        self.background
            .iter()
            .map(|(b, mass_before)| {
                let x = b + 1.0;
                let ratio = self.background.mass_at(x) / mass_before;
                (x, (stay * ratio + lo) / (hi - lo))
            })
            .collect()
    }
}

/// Relaxed condition for Bernoulli pairs; never exceeds `1 / ε`.
pub fn calibrate_spq_bernoulli_relaxed(
    ctx: &BinaryRelaxContext,
    eps: PrivacyBudget,
) -> CalibrationResult {
    let psi = ctx.psi();
    if psi.is_empty() {
        return CalibrationResult {
            theta: 1.0 / eps.0,
            method: Method::SpqBernoulliRelaxed,
            witness: None,
            diagnostics: Some(Diagnostics {
                note: Some("no admissible points; falling back to 1/ε".into()),
                ..Default::default()
            }),
        };
    }
    // ln(e^ε + (e^ε - 1) ψ) = ε + ln(1 + ψ (1 - e^{-ε}))
    let shrink = -(-eps.0).exp_m1();
    reduce(
        Method::SpqBernoulliRelaxed,
        psi.into_iter().enumerate().map(|(i, (x, psi))| Candidate {
            theta: 1.0 / (eps.0 + (psi * shrink).ln_1p()),
            witness: Witness {
                index: i,
                user: None,
                point: Some(x),
                description: format!("ψ({x}) = {psi}"),
            },
            diagnostics: None,
        }),
    )
}

/// `Δ*` report for the two conditional priors of a pair.
pub fn pair_delta_star(
    config: &SystemConfig,
    pair: &SecretPair,
) -> Result<crate::transport::DeltaStarReport> {
    let user = pair.require_user()?;
    let (left, right) = pair.arms();
    let p = config.conditional_prior(user, &left)?;
    let q = config.conditional_prior(user, &right)?;
    Ok(delta_star(&p, &q))
}

/// θ from the optimal plan between the full conditional priors of every pair.
pub fn calibrate_generic(
    config: &SystemConfig,
    pairs: &[SecretPair],
    eps: PrivacyBudget,
) -> Result<CalibrationResult> {
    calibrate_generic_with(config, pairs, eps, Execution::default())
}

pub fn calibrate_generic_with(
    config: &SystemConfig,
    pairs: &[SecretPair],
    eps: PrivacyBudget,
    exec: Execution,
) -> Result<CalibrationResult> {
    let reports = exec
        .map(pairs, |pair| -> Result<_> {
            let user = pair.require_user()?;
            Ok((config.user_index(user)?, pair_delta_star(config, pair)?))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by_key(|&i| (reports[i].0, i));
    Ok(reduce(
        Method::KantorovichGeneric,
        order.into_iter().map(|i| {
            let (_, r) = &reports[i];
            Candidate {
                theta: r.sup / eps.0,
                witness: Witness {
                    index: i,
                    user: pairs[i].user().cloned(),
                    point: Some(r.witness),
                    description: format!("{}: sup Δ* = {}", pairs[i].describe(), r.sup),
                },
                diagnostics: None,
            }
        }),
    ))
}

/// Convenience wrappers pulling one family out of a mixed pair list.
pub fn value_pairs(pairs: &[SecretPair]) -> Vec<ValuePair> {
    pairs
        .iter()
        .filter_map(|p| match p {
            SecretPair::ValuePair(v) => Some(v.clone()),
            _ => None,
        })
        .collect()
}

pub fn value_absent_pairs(pairs: &[SecretPair]) -> Vec<ValueAbsent> {
    pairs
        .iter()
        .filter_map(|p| match p {
            SecretPair::ValueAbsent(v) => Some(v.clone()),
            _ => None,
        })
        .collect()
}

pub fn dist_absent_pairs(pairs: &[SecretPair]) -> Vec<DistAbsent> {
    pairs
        .iter()
        .filter_map(|p| match p {
            SecretPair::DistAbsent(v) => Some(v.clone()),
            _ => None,
        })
        .collect()
}

pub fn dist_pairs(pairs: &[SecretPair]) -> Vec<DistPair> {
    pairs
        .iter()
        .filter_map(|p| match p {
            SecretPair::DistPair(v) => Some(v.clone()),
            _ => None,
        })
        .collect()
}

/// `steps` evenly spaced budgets from `min` to `max` inclusive.
pub fn epsilon_grid(min: f64, max: f64, steps: usize) -> Result<Vec<PrivacyBudget>> {
    if steps == 0 || (steps > 1 && max < min) {
        return Err(Error::InvalidParameter(format!(
            "bad sweep: [{min}, {max}] with {steps} steps"
        )));
    }
    if steps == 1 {
        return Ok(vec![PrivacyBudget::new(min)?]);
    }
    let h = (max - min) / (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            PrivacyBudget::new(if i + 1 == steps {
                max
            } else {
                min + h * i as f64
            })
        })
        .collect()
}

/// Runs a calibrator at every budget of a grid, in grid order.
pub fn sweep<F>(
    grid: &[PrivacyBudget],
    exec: Execution,
    calibrator: F,
) -> Result<Vec<CalibrationResult>>
where
    F: Fn(PrivacyBudget) -> Result<CalibrationResult> + Sync + Send,
{
    exec.map(grid, |&eps| calibrator(eps)).into_iter().collect()
}
