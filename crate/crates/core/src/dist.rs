//! Finite discrete distributions and the multi-user summation model.
//!
//! Every distribution here is a finite-support probability mass function on
//! the reals. A [`SystemConfig`] holds the adversary's prior: one presence
//! probability and one value distribution per user. The query answer is the
//! sum of every present user's value, so the law of the answer conditioned
//! on a secret about user `i` is the law of the other users' sum, shifted by
//! a value, left alone, or convolved with a distribution.
//!
//! Conditional priors are returned normalized. The product of the other
//! users' presence probabilities multiplies both arms of every same-user
//! secret pair, so it cancels from every likelihood ratio and is dropped.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Support points closer than this are treated as one atom.
pub const SUPPORT_MERGE_TOL: f64 = 1e-12;

/// Allowed deviation of the total mass from one.
pub const MASS_SUM_TOL: f64 = 1e-9;

/// A probability mass function with finite support.
///
/// The support is strictly increasing and every stored mass is positive.
/// Zero-mass entries given at construction are pruned, so `support()` is
/// exactly `supp(P)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct DiscreteDistribution {
    support: Vec<f64>,
    mass: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawDistribution {
    support: Vec<f64>,
    mass: Vec<f64>,
}

impl TryFrom<RawDistribution> for DiscreteDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        Self::new(raw.support, raw.mass)
    }
}

impl From<DiscreteDistribution> for RawDistribution {
    fn from(d: DiscreteDistribution) -> Self {
        RawDistribution {
            support: d.support,
            mass: d.mass,
        }
    }
}

impl DiscreteDistribution {
    /// Builds a distribution from aligned support and mass lists.
    ///
    /// The support may be given in any order; it is sorted and atoms within
    /// [`SUPPORT_MERGE_TOL`] are merged. Masses must be finite and
    /// non-negative and sum to one within [`MASS_SUM_TOL`]. Masses are kept
    /// as given (not rescaled) so that serialization round-trips exactly.
    pub fn new(support: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        if support.len() != mass.len() {
            return Err(Error::InvalidDistribution(format!(
                "support has {} entries but mass has {}",
                support.len(),
                mass.len()
            )));
        }
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if let Some(x) = support.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidDistribution(format!(
                "non-finite support value {x}"
            )));
        }
        if let Some(m) = mass.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(Error::InvalidDistribution(format!("invalid mass {m}")));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {total}, expected 1"
            )));
        }
        Ok(Self::assemble(support.into_iter().zip(mass).collect()))
    }

    /// Builds a distribution from non-negative weights, normalizing them.
    pub fn from_weights<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let atoms: Vec<(f64, f64)> = atoms.into_iter().collect();
        if atoms
            .iter()
            .any(|(x, w)| !x.is_finite() || !w.is_finite() || *w < 0.0)
        {
            return Err(Error::InvalidDistribution("invalid atom or weight".into()));
        }
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Ok(Self::assemble(
            atoms.into_iter().map(|(x, w)| (x, w / total)).collect(),
        ))
    }

    pub fn point_mass(x: f64) -> Self {
        Self {
            support: vec![x],
            mass: vec![1.0],
        }
    }

    /// Bernoulli law on {0, 1} with `P(1) = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "Bernoulli parameter {p} outside [0, 1]"
            )));
        }
        Self::new(vec![0.0, 1.0], vec![1.0 - p, p])
    }

    /// Uniform law over the given values.
    pub fn uniform(values: &[f64]) -> Result<Self> {
        Self::from_weights(values.iter().map(|&x| (x, 1.0)))
    }

    // Sorts, merges near-equal atoms and prunes zero masses.
    fn assemble(mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut mass: Vec<f64> = Vec::with_capacity(atoms.len());
        for (x, m) in atoms {
            match support.last() {
                Some(&last) if (x - last).abs() <= SUPPORT_MERGE_TOL => {
                    *mass.last_mut().unwrap() += m;
                }
                _ => {
                    support.push(x);
                    mass.push(m);
                }
            }
        }
        let (support, mass) = support
            .into_iter()
            .zip(mass)
            .filter(|(_, m)| *m > 0.0)
            .unzip();
        Self { support, mass }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Iterates over `(value, mass)` atoms in increasing value order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support.iter().copied().zip(self.mass.iter().copied())
    }

    pub fn is_point_mass(&self) -> bool {
        self.support.len() == 1
    }

    pub fn min(&self) -> f64 {
        self.support[0]
    }

    pub fn max(&self) -> f64 {
        *self.support.last().unwrap()
    }

    /// Largest `|t|` over the support.
    pub fn max_abs(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(x, m)| x * m).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Probability of the atom at `x`, or zero if `x` is not in the support.
    pub fn mass_at(&self, x: f64) -> f64 {
        self.index_of(x).map_or(0.0, |i| self.mass[i])
    }

    /// Index of the atom within [`SUPPORT_MERGE_TOL`] of `x`.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let i = self.support.partition_point(|&s| s < x - SUPPORT_MERGE_TOL);
        (i < self.support.len() && (self.support[i] - x).abs() <= SUPPORT_MERGE_TOL).then_some(i)
    }

    /// The law of `X + c`.
    pub fn shift(&self, c: f64) -> Self {
        Self {
            support: self.support.iter().map(|x| x + c).collect(),
            mass: self.mass.clone(),
        }
    }

    pub fn cdf(&self) -> CumulativeDistribution {
        cdf(self)
    }
}

/// Law of the sum of two independent variables.
///
/// Sums within [`SUPPORT_MERGE_TOL`] of each other are merged and the result
/// is renormalized.
pub fn convolve(p: &DiscreteDistribution, q: &DiscreteDistribution) -> DiscreteDistribution {
    let mut atoms = Vec::with_capacity(p.len() * q.len());
    for (x, px) in p.iter() {
        for (y, qy) in q.iter() {
            atoms.push((x + y, px * qy));
        }
    }
    let mut out = DiscreteDistribution::assemble(atoms);
    let total = out.total_mass();
    if total > 0.0 && total != 1.0 {
        out.mass.iter_mut().for_each(|m| *m /= total);
    }
    out
}

/// Running sums of a distribution, aligned with its support.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeDistribution {
    support: Vec<f64>,
    cum: Vec<f64>,
}

impl CumulativeDistribution {
    pub fn support(&self) -> &[f64] {
        &self.support
    }

    /// Partial sums; `values()[k]` is `F(support[k])`.
    pub fn values(&self) -> &[f64] {
        &self.cum
    }

    /// `F(x) = P(X <= x)`.
    pub fn at(&self, x: f64) -> f64 {
        let k = self.support.partition_point(|&s| s <= x);
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }

    /// Left limit `P(X < x)`.
    pub fn before(&self, x: f64) -> f64 {
        let k = self.support.partition_point(|&s| s < x);
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }
}

pub fn cdf(p: &DiscreteDistribution) -> CumulativeDistribution {
    let cum = p
        .mass
        .iter()
        .scan(0.0, |acc, m| {
            *acc += m;
            Some(*acc)
        })
        .collect();
    CumulativeDistribution {
        support: p.support.clone(),
        cum,
    }
}

/// Opaque user identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(pub String);

impl UserId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for UserId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserSpec {
    pub id: UserId,
    /// Probability that the user participates.
    pub presence: f64,
    pub distribution: DiscreteDistribution,
}

impl UserSpec {
    pub fn new(id: impl Into<String>, presence: f64, distribution: DiscreteDistribution) -> Self {
        Self {
            id: UserId::new(id),
            presence,
            distribution,
        }
    }
}

/// The adversary's prior: presence probability and value law per user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct SystemConfig {
    users: Vec<UserSpec>,
}

#[derive(Serialize, Deserialize)]
struct RawConfig {
    users: Vec<UserSpec>,
}

impl TryFrom<RawConfig> for SystemConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        Self::new(raw.users)
    }
}

impl From<SystemConfig> for RawConfig {
    fn from(c: SystemConfig) -> Self {
        RawConfig { users: c.users }
    }
}

impl SystemConfig {
    pub fn new(users: Vec<UserSpec>) -> Result<Self> {
        if users.is_empty() {
            return Err(Error::InvalidConfig("no users".into()));
        }
        let mut seen = HashSet::new();
        for u in &users {
            if !seen.insert(&u.id) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate user id `{}`",
                    u.id
                )));
            }
            if !(0.0..=1.0).contains(&u.presence) {
                return Err(Error::InvalidConfig(format!(
                    "presence {} of user `{}` outside [0, 1]",
                    u.presence, u.id
                )));
            }
        }
        Ok(Self { users })
    }

    pub fn users(&self) -> &[UserSpec] {
        &self.users
    }

    pub fn user_index(&self, id: &UserId) -> Result<usize> {
        self.users
            .iter()
            .position(|u| &u.id == id)
            .ok_or_else(|| Error::UnknownUser(id.0.clone()))
    }

    pub fn user(&self, id: &UserId) -> Result<&UserSpec> {
        self.user_index(id).map(|i| &self.users[i])
    }

    /// Copy of this config with every presence probability replaced.
    pub fn with_presences(&self, presences: &[f64]) -> Result<Self> {
        let users = self
            .users
            .iter()
            .zip(presences.iter().chain(std::iter::repeat(&1.0)))
            .map(|(u, &z)| UserSpec {
                presence: z,
                ..u.clone()
            })
            .collect();
        Self::new(users)
    }

    /// Law of the sum of every user's value except `excluded`'s.
    pub fn background_sum(&self, excluded: &UserId) -> Result<DiscreteDistribution> {
        background_sum(self, excluded)
    }

    pub fn conditional_prior(
        &self,
        user: &UserId,
        arm: &SecretArm,
    ) -> Result<DiscreteDistribution> {
        conditional_prior(self, user, arm)
    }
}

/// Law of `f(D_{-i}) = Σ_{j≠i} D_j`; every other user is taken as present.
pub fn background_sum(config: &SystemConfig, excluded: &UserId) -> Result<DiscreteDistribution> {
    config.user_index(excluded)?;
    Ok(config
        .users
        .iter()
        .filter(|u| &u.id != excluded)
        .fold(DiscreteDistribution::point_mass(0.0), |acc, u| {
            convolve(&acc, &u.distribution)
        }))
}

/// One side of a secret about a single user.
#[derive(Debug, Clone, PartialEq)]
pub enum SecretArm {
    /// The user is present and reports this value.
    Value(f64),
    /// The user is absent.
    Absent,
    /// The user is present and reports a draw from this law.
    Distribution(DiscreteDistribution),
}

/// Normalized law of the query answer given a secret arm about `user`.
pub fn conditional_prior(
    config: &SystemConfig,
    user: &UserId,
    arm: &SecretArm,
) -> Result<DiscreteDistribution> {
    let background = background_sum(config, user)?;
    Ok(match arm {
        SecretArm::Value(a) => background.shift(*a),
        SecretArm::Absent => background,
        SecretArm::Distribution(p) => convolve(&background, p),
    })
}

/// `(s_a, s_b)`: the user reports `a` versus `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValuePair {
    pub user: Option<UserId>,
    pub a: f64,
    pub b: f64,
}

/// `(s_a, s_⊥)`: the user reports `a` versus is absent.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueAbsent {
    pub user: Option<UserId>,
    pub a: f64,
}

/// `(s_P, s_⊥)`: the user is present with law `p` versus absent.
#[derive(Debug, Clone, PartialEq)]
pub struct DistAbsent {
    pub user: Option<UserId>,
    pub p: DiscreteDistribution,
}

/// `(s_P, s_Q)`: the user's value follows `p` versus `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistPair {
    pub user: Option<UserId>,
    pub p: DiscreteDistribution,
    pub q: DiscreteDistribution,
}

/// A secret pair from one of the four families.
///
/// JSON form is inferred from the fields present: `{"a", "b"}`, `{"a"}`,
/// `{"p"}` or `{"p", "q"}` (with `p`/`q` distribution objects), each with an
/// optional `"user"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair", into = "RawPair")]
pub enum SecretPair {
    ValuePair(ValuePair),
    ValueAbsent(ValueAbsent),
    DistAbsent(DistAbsent),
    DistPair(DistPair),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    user: Option<UserId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<DiscreteDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<DiscreteDistribution>,
}

impl TryFrom<RawPair> for SecretPair {
    type Error = Error;

    fn try_from(r: RawPair) -> Result<Self> {
        let user = r.user;
        match (r.a, r.b, r.p, r.q) {
            (Some(a), Some(b), None, None) => Ok(Self::ValuePair(ValuePair { user, a, b })),
            (Some(a), None, None, None) => Ok(Self::ValueAbsent(ValueAbsent { user, a })),
            (None, None, Some(p), None) => Ok(Self::DistAbsent(DistAbsent { user, p })),
            (None, None, Some(p), Some(q)) => Ok(Self::DistPair(DistPair { user, p, q })),
            _ => Err(Error::InvalidParameter(
                "secret pair must carry exactly one of {a,b}, {a}, {p}, {p,q}".into(),
            )),
        }
    }
}

impl From<SecretPair> for RawPair {
    fn from(s: SecretPair) -> Self {
        let mut raw = RawPair {
            user: None,
            a: None,
            b: None,
            p: None,
            q: None,
        };
        match s {
            SecretPair::ValuePair(v) => {
                raw.user = v.user;
                raw.a = Some(v.a);
                raw.b = Some(v.b);
            }
            SecretPair::ValueAbsent(v) => {
                raw.user = v.user;
                raw.a = Some(v.a);
            }
            SecretPair::DistAbsent(v) => {
                raw.user = v.user;
                raw.p = Some(v.p);
            }
            SecretPair::DistPair(v) => {
                raw.user = v.user;
                raw.p = Some(v.p);
                raw.q = Some(v.q);
            }
        }
        raw
    }
}

impl SecretPair {
    pub fn user(&self) -> Option<&UserId> {
        match self {
            Self::ValuePair(v) => v.user.as_ref(),
            Self::ValueAbsent(v) => v.user.as_ref(),
            Self::DistAbsent(v) => v.user.as_ref(),
            Self::DistPair(v) => v.user.as_ref(),
        }
    }

    /// The user this pair is about; required whenever a system config is involved.
    pub fn require_user(&self) -> Result<&UserId> {
        self.user()
            .ok_or_else(|| Error::InvalidParameter("secret pair has no user id".into()))
    }

    pub fn arms(&self) -> (SecretArm, SecretArm) {
        match self {
            Self::ValuePair(v) => (SecretArm::Value(v.a), SecretArm::Value(v.b)),
            Self::ValueAbsent(v) => (SecretArm::Value(v.a), SecretArm::Absent),
            Self::DistAbsent(v) => (SecretArm::Distribution(v.p.clone()), SecretArm::Absent),
            Self::DistPair(v) => (
                SecretArm::Distribution(v.p.clone()),
                SecretArm::Distribution(v.q.clone()),
            ),
        }
    }

    /// Short label such as `(s_a, s_b) for user u4`.
    pub fn describe(&self) -> String {
        let family = match self {
            Self::ValuePair(v) => format!("(s_a={}, s_b={})", v.a, v.b),
            Self::ValueAbsent(v) => format!("(s_a={}, s_absent)", v.a),
            Self::DistAbsent(_) => "(s_P, s_absent)".to_owned(),
            Self::DistPair(_) => "(s_P, s_Q)".to_owned(),
        };
        match self.user() {
            Some(u) => format!("{family} for user {u}"),
            None => family,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn table2_users() -> Vec<DiscreteDistribution> {
        let s = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        vec![
            DiscreteDistribution::new(s.clone(), vec![0.01, 0.04, 0.1, 0.2, 0.65]).unwrap(),
            DiscreteDistribution::new(s.clone(), vec![0.7, 0.2, 0.05, 0.04, 0.01]).unwrap(),
            DiscreteDistribution::new(s, vec![0.2; 5]).unwrap(),
        ]
    }

    #[test]
    fn rejects_bad_mass() {
        assert!(DiscreteDistribution::new(vec![0.0, 1.0], vec![0.5, 0.6]).is_err());
        assert!(DiscreteDistribution::new(vec![0.0, 1.0], vec![-0.1, 1.1]).is_err());
        assert!(DiscreteDistribution::new(vec![0.0], vec![1.0, 0.0]).is_err());
        assert!(DiscreteDistribution::new(vec![], vec![]).is_err());
        assert!(DiscreteDistribution::new(vec![f64::NAN], vec![1.0]).is_err());
    }

    #[test]
    fn prunes_zero_mass_and_sorts() {
        let d = DiscreteDistribution::new(vec![3.0, 1.0, 2.0], vec![0.0, 0.5, 0.5]).unwrap();
        assert_eq!(d.support(), &[1.0, 2.0]);
        assert_eq!(d.mass(), &[0.5, 0.5]);
    }

    #[test]
    fn identity_convolution() {
        let q = &table2_users()[0];
        let r = convolve(&DiscreteDistribution::point_mass(0.0), q);
        assert_eq!(r.support(), q.support());
        for (a, b) in r.mass().iter().zip(q.mass()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn bernoulli_sum_is_binomial() {
        let b = DiscreteDistribution::bernoulli(0.5).unwrap();
        let r = convolve(&b, &b);
        assert_eq!(r.support(), &[0.0, 1.0, 2.0]);
        assert_eq!(r.mass(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn three_user_sum_has_thirteen_atoms() {
        let u = table2_users();
        let r = convolve(&convolve(&u[0], &u[1]), &u[2]);
        assert_eq!(r.len(), 13);
        assert_eq!(r.min(), 3.0);
        assert_eq!(r.max(), 15.0);
        assert_abs_diff_eq!(r.mass_at(3.0), 0.01 * 0.7 * 0.2, epsilon = 1e-15);
    }

    #[test]
    fn cdf_of_uniform_and_point_mass() {
        let u = DiscreteDistribution::uniform(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let f = u.cdf();
        for (got, want) in f.values().iter().zip([0.2, 0.4, 0.6, 0.8, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        let f = DiscreteDistribution::point_mass(2.5).cdf();
        assert_eq!(f.at(2.4), 0.0);
        assert_eq!(f.at(2.5), 1.0);
        assert_eq!(f.before(2.5), 0.0);
        assert_eq!(f.at(100.0), 1.0);
    }

    #[test]
    fn background_of_single_user_system_is_zero() {
        let c =
            SystemConfig::new(vec![UserSpec::new("only", 0.3, table2_users()[0].clone())]).unwrap();
        let b = c.background_sum(&"only".into()).unwrap();
        assert_eq!(b, DiscreteDistribution::point_mass(0.0));
    }

    #[test]
    fn background_with_one_other_user() {
        let u = table2_users();
        let c = SystemConfig::new(vec![
            UserSpec::new("a", 1.0, u[0].clone()),
            UserSpec::new("b", 1.0, u[1].clone()),
        ])
        .unwrap();
        let b = c.background_sum(&"a".into()).unwrap();
        assert_eq!(b.support(), u[1].support());
        for (x, y) in b.mass().iter().zip(u[1].mass()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-15);
        }
        assert!(matches!(
            c.background_sum(&"zzz".into()),
            Err(Error::UnknownUser(_))
        ));
    }

    #[test]
    fn config_validation() {
        let d = DiscreteDistribution::point_mass(1.0);
        assert!(SystemConfig::new(vec![]).is_err());
        assert!(SystemConfig::new(vec![
            UserSpec::new("x", 1.0, d.clone()),
            UserSpec::new("x", 1.0, d.clone())
        ])
        .is_err());
        assert!(SystemConfig::new(vec![UserSpec::new("x", 1.5, d)]).is_err());
    }

    #[test]
    fn config_json_shape() {
        let json = r#"{"users":[{"id":"u1","presence":1.0,"distribution":{"support":[1,2,3,4,5],"mass":[0.01,0.04,0.1,0.2,0.65]}}]}"#;
        let c: SystemConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.users()[0].distribution, table2_users()[0]);
        let back: SystemConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn secret_pair_json_forms() {
        let p: SecretPair = serde_json::from_str(r#"{"a":5,"b":3}"#).unwrap();
        assert!(matches!(p, SecretPair::ValuePair(ValuePair { a, b, .. }) if a == 5.0 && b == 3.0));
        let p: SecretPair = serde_json::from_str(r#"{"user":"u4","a":5}"#).unwrap();
        assert_eq!(p.user(), Some(&UserId::new("u4")));
        assert!(matches!(p, SecretPair::ValueAbsent(_)));
        let p: SecretPair =
            serde_json::from_str(r#"{"p":{"support":[0,1],"mass":[0.5,0.5]}}"#).unwrap();
        assert!(matches!(p, SecretPair::DistAbsent(_)));
        assert!(serde_json::from_str::<SecretPair>(r#"{"b":3}"#).is_err());
        assert!(
            serde_json::from_str::<SecretPair>(r#"{"a":1,"p":{"support":[0],"mass":[1]}}"#)
                .is_err()
        );
    }
}
