//! Kantorovich (1-Wasserstein) optimal transport between discrete laws on
//! the line, and the largest displacement it makes.
//!
//! On the real line the optimal plan for cost `|x - x'|` is the monotone
//! coupling: its joint CDF is `min(F_p(x), F_q(x'))`, so each cell mass is
//! the mixed second difference of that function. [`delta_star`] gets the
//! largest displacement straight from the two CDFs without building the
//! plan.

use serde::Serialize;

use crate::dist::{cdf, DiscreteDistribution, SUPPORT_MERGE_TOL};

/// Plan cells with less mass than this are treated as empty.
pub const PLAN_MASS_TOL: f64 = 1e-12;

/// CDF values closer than this compare as equal.
pub const CDF_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanEntry {
    pub x: f64,
    pub x_prime: f64,
    pub mass: f64,
}

/// Sparse optimal coupling of `source` (rows, `x`) and `target` (columns, `x'`).
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    entries: Vec<PlanEntry>,
    source: DiscreteDistribution,
    target: DiscreteDistribution,
}

impl TransportPlan {
    /// Non-empty cells, sorted by `(x, x')`.
    pub fn entries(&self) -> &[PlanEntry] {
        &self.entries
    }

    pub fn source(&self) -> &DiscreteDistribution {
        &self.source
    }

    pub fn target(&self) -> &DiscreteDistribution {
        &self.target
    }

    pub fn mass(&self, x: f64, x_prime: f64) -> f64 {
        self.entries
            .iter()
            .find(|e| {
                (e.x - x).abs() <= SUPPORT_MERGE_TOL
                    && (e.x_prime - x_prime).abs() <= SUPPORT_MERGE_TOL
            })
            .map_or(0.0, |e| e.mass)
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|e| e.mass).sum()
    }

    /// Expected transport cost `Σ |x - x'| π(x, x')`.
    pub fn cost(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| (e.x - e.x_prime).abs() * e.mass)
            .sum()
    }

    /// Mass leaving each source atom, aligned with `source().support()`.
    pub fn row_sums(&self) -> Vec<f64> {
        marginal(
            self.source.support(),
            self.entries.iter().map(|e| (e.x, e.mass)),
        )
    }

    /// Mass arriving at each target atom, aligned with `target().support()`.
    pub fn column_sums(&self) -> Vec<f64> {
        marginal(
            self.target.support(),
            self.entries.iter().map(|e| (e.x_prime, e.mass)),
        )
    }
}

fn marginal(support: &[f64], cells: impl Iterator<Item = (f64, f64)>) -> Vec<f64> {
    let mut sums = vec![0.0; support.len()];
    for (x, m) in cells {
        let i = support.partition_point(|&s| s < x - SUPPORT_MERGE_TOL);
        sums[i] += m;
    }
    sums
}

/// Optimal transport plan between `p` and `q` for cost `|x - x'|`.
///
/// Candidate cells are found by walking both CDFs in step; each cell's
/// mass is then the inclusion-exclusion
/// `min(F_k, G_l) - min(F_{k-1}, G_l) - min(F_k, G_{l-1}) + min(F_{k-1}, G_{l-1})`
/// with `F_{-1} = G_{-1} = 0`. Cells below [`PLAN_MASS_TOL`] are dropped.
pub fn kantorovich_plan(p: &DiscreteDistribution, q: &DiscreteDistribution) -> TransportPlan {
    let f = cdf(p);
    let g = cdf(q);
    let (f, g) = (f.values(), g.values());
    let prev = |c: &[f64], k: usize| if k == 0 { 0.0 } else { c[k - 1] };

    let mut entries = Vec::with_capacity(p.len() + q.len());
    let (mut k, mut l) = (0, 0);
    while k < f.len() && l < g.len() {
        let (fk, fk1, gl, gl1) = (f[k], prev(f, k), g[l], prev(g, l));
        let mass = fk.min(gl) - fk1.min(gl) - fk.min(gl1) + fk1.min(gl1);
        if mass > PLAN_MASS_TOL {
            entries.push(PlanEntry {
                x: p.support()[k],
                x_prime: q.support()[l],
                mass,
            });
        }
        if fk < gl - CDF_TIE_TOL {
            k += 1;
        } else if gl < fk - CDF_TIE_TOL {
            l += 1;
        } else {
            k += 1;
            l += 1;
        }
    }
    TransportPlan {
        entries,
        source: p.clone(),
        target: q.clone(),
    }
}

/// `sup |x - x'|` over the support of a plan.
pub fn max_plan_distance(plan: &TransportPlan) -> f64 {
    plan.entries
        .iter()
        .map(|e| (e.x - e.x_prime).abs())
        .fold(0.0, f64::max)
}

/// Per-point displacement `Δ*(x)` and its supremum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaStarReport {
    /// `(x, Δ*(x))` over the union of both supports, increasing in `x`.
    pub per_point: Vec<(f64, f64)>,
    pub sup: f64,
    /// Smallest `x` attaining the supremum.
    pub witness: f64,
}

impl DeltaStarReport {
    pub fn at(&self, x: f64) -> Option<f64> {
        self.per_point
            .iter()
            .find(|(y, _)| (y - x).abs() <= SUPPORT_MERGE_TOL)
            .map(|(_, d)| *d)
    }
}

/// Largest displacement of the optimal plan, read off the two CDFs.
///
/// For each `x` in either support:
/// * `F_p(x) = F_q(x)`: `Δ*(x) = 0`;
/// * `F_p(x) > F_q(x)`: p-mass at or below `x` still has to move right, and
///   `Δ*(x)` is the smallest `Δ` with `F_q(x + Δ) >= F_p(x)`;
/// * `F_p(x) < F_q(x)`: q-mass at or below `x` is matched to p-atoms to its
///   right, and `Δ*(x)` is the smallest `Δ` with `F_p(x + Δ) >= F_q(x)`.
///
/// Both searches only need candidate offsets to the other law's atoms,
/// since the CDFs are right-continuous step functions. The supremum equals
/// [`max_plan_distance`] of [`kantorovich_plan`] on the same inputs.
pub fn delta_star(p: &DiscreteDistribution, q: &DiscreteDistribution) -> DeltaStarReport {
    let fp = cdf(p);
    let fq = cdf(q);

    let mut points: Vec<f64> = p.support().iter().chain(q.support()).copied().collect();
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= SUPPORT_MERGE_TOL);

    // smallest atom y >= x of `law` with cumulative mass >= level
    let reach = |x: f64, level: f64, law: &crate::dist::CumulativeDistribution| -> f64 {
        let cum = law.values();
        let i = cum.partition_point(|&c| c < level - CDF_TIE_TOL);
        let y = law.support()[i.min(cum.len() - 1)];
        (y - x).max(0.0)
    };

    let per_point: Vec<(f64, f64)> = points
        .iter()
        .map(|&x| {
            let f = fp.at(x + SUPPORT_MERGE_TOL);
            let g = fq.at(x + SUPPORT_MERGE_TOL);
            let d = if (f - g).abs() <= CDF_TIE_TOL {
                0.0
            } else if f > g {
                reach(x, f, &fq)
            } else {
                reach(x, g, &fp)
            };
            (x, d)
        })
        .collect();

    let (witness, sup) =
        per_point.iter().copied().fold(
            (points[0], 0.0),
            |best, (x, d)| if d > best.1 { (x, d) } else { best },
        );
    DeltaStarReport {
        per_point,
        sup,
        witness,
    }
}
