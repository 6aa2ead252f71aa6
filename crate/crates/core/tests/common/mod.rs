//! Fixtures and random instance generators shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use pufcal::dist::{DistAbsent, DistPair, ValueAbsent, ValuePair};
use pufcal::{DiscreteDistribution, SecretPair, SystemConfig, UserSpec};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn dist(support: &[f64], mass: &[f64]) -> DiscreteDistribution {
    DiscreteDistribution::new(support.to_vec(), mass.to_vec()).unwrap()
}

const ONE_TO_FIVE: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 5.0];

/// Three users with values in 1..=5.
pub fn table2_users() -> Vec<UserSpec> {
    vec![
        UserSpec::new("u1", 0.9, dist(&ONE_TO_FIVE, &[0.01, 0.04, 0.1, 0.2, 0.65])),
        UserSpec::new("u2", 0.8, dist(&ONE_TO_FIVE, &[0.7, 0.2, 0.05, 0.04, 0.01])),
        UserSpec::new("u3", 0.7, dist(&ONE_TO_FIVE, &[0.2; 5])),
    ]
}

pub fn p4() -> DiscreteDistribution {
    dist(&ONE_TO_FIVE, &[0.4, 0.1, 0.0, 0.1, 0.4])
}

pub fn q4() -> DiscreteDistribution {
    dist(&ONE_TO_FIVE, &[0.0, 0.05, 0.9, 0.05, 0.0])
}

/// The three users plus a fourth user `u4` whose own law is `d4`.
pub fn four_user_system(d4: DiscreteDistribution) -> SystemConfig {
    let mut users = table2_users();
    users.push(UserSpec::new("u4", 0.5, d4));
    SystemConfig::new(users).unwrap()
}

/// Law of the three users' sum, computed by brute-force enumeration.
pub fn table2_sum_brute_force() -> Vec<(f64, f64)> {
    let users = table2_users();
    let mut acc = [0.0; 16];
    for (a, pa) in users[0].distribution.iter() {
        for (b, pb) in users[1].distribution.iter() {
            for (c, pc) in users[2].distribution.iter() {
                acc[(a + b + c) as usize] += pa * pb * pc;
            }
        }
    }
    (3..=15).map(|x| (x as f64, acc[x])).collect()
}

/// The two priors of the optimal-transport worked example.
pub fn example_priors() -> (DiscreteDistribution, DiscreteDistribution) {
    (
        dist(&ONE_TO_FIVE, &[0.2, 0.225, 0.5, 0.075, 0.0]),
        dist(&ONE_TO_FIVE, &[0.0, 0.075, 0.5, 0.225, 0.2]),
    )
}

/// Its optimal plan, as `(x, x', mass)`.
pub const EXAMPLE_PLAN: [(f64, f64, f64); 7] = [
    (1.0, 2.0, 0.075),
    (1.0, 3.0, 0.125),
    (2.0, 3.0, 0.225),
    (3.0, 3.0, 0.15),
    (3.0, 4.0, 0.225),
    (3.0, 5.0, 0.125),
    (4.0, 5.0, 0.075),
];

/// Random law with `1..=max_atoms` integer atoms in `[lo, hi]`.
pub fn random_dist<R: Rng>(
    rng: &mut R,
    max_atoms: usize,
    lo: i32,
    hi: i32,
) -> DiscreteDistribution {
    let mut values: Vec<i32> = (lo..=hi).collect();
    values.shuffle(rng);
    let n = rng.gen_range(1..=max_atoms.min(values.len()));
    DiscreteDistribution::from_weights(
        values[..n]
            .iter()
            .map(|&v| (v as f64, rng.gen_range(0.05..1.0)))
            .collect::<Vec<_>>(),
    )
    .unwrap()
}

pub fn random_config<R: Rng>(rng: &mut R, max_users: usize, max_atoms: usize) -> SystemConfig {
    let n = rng.gen_range(1..=max_users);
    SystemConfig::new(
        (0..n)
            .map(|i| {
                UserSpec::new(
                    format!("u{i}"),
                    rng.gen_range(0.0..=1.0),
                    random_dist(rng, max_atoms, -10, 10),
                )
            })
            .collect(),
    )
    .unwrap()
}

/// One pair of each family about a random user of `config`.
pub fn random_pairs<R: Rng>(
    rng: &mut R,
    config: &SystemConfig,
    max_atoms: usize,
) -> [SecretPair; 4] {
    let user = Some(
        config.users()[rng.gen_range(0..config.users().len())]
            .id
            .clone(),
    );
    let value = |rng: &mut R| rng.gen_range(-10..=10) as f64;
    [
        SecretPair::ValuePair(ValuePair {
            user: user.clone(),
            a: value(rng),
            b: value(rng),
        }),
        SecretPair::ValueAbsent(ValueAbsent {
            user: user.clone(),
            a: value(rng),
        }),
        SecretPair::DistAbsent(DistAbsent {
            user: user.clone(),
            p: random_dist(rng, max_atoms, -10, 10),
        }),
        SecretPair::DistPair(DistPair {
            user,
            p: random_dist(rng, max_atoms, -10, 10),
            q: random_dist(rng, max_atoms, -10, 10),
        }),
    ]
}

/// proptest strategy: law with `1..=max_atoms` distinct integer atoms in `[lo, hi]`.
pub fn arb_dist(max_atoms: usize, lo: i32, hi: i32) -> impl Strategy<Value = DiscreteDistribution> {
    prop::collection::btree_map(lo..=hi, 0.05f64..1.0, 1..=max_atoms).prop_map(|m| {
        DiscreteDistribution::from_weights(
            m.into_iter()
                .map(|(x, w)| (x as f64, w))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    })
}

/// proptest strategy: law with real-valued atoms.
pub fn arb_real_dist(max_atoms: usize) -> impl Strategy<Value = DiscreteDistribution> {
    prop::collection::vec((-20.0f64..20.0, 0.05f64..1.0), 1..=max_atoms)
        .prop_map(|v| DiscreteDistribution::from_weights(v).unwrap())
}

pub fn arb_config(max_users: usize, max_atoms: usize) -> impl Strategy<Value = SystemConfig> {
    prop::collection::vec((0.0f64..=1.0, arb_dist(max_atoms, -10, 10)), 1..=max_users).prop_map(
        |users| {
            SystemConfig::new(
                users
                    .into_iter()
                    .enumerate()
                    .map(|(i, (z, d))| UserSpec::new(format!("u{i}"), z, d))
                    .collect(),
            )
            .unwrap()
        },
    )
}
