mod common;

use approx::assert_abs_diff_eq;
use common::*;
use proptest::prelude::*;
use pufcal::dist::SecretArm;
use pufcal::{convolve, DiscreteDistribution, SystemConfig, UserId};

#[test]
fn three_user_sum_matches_enumeration() {
    let config = four_user_system(p4());
    let b = config.background_sum(&UserId::from("u4")).unwrap();
    let want = table2_sum_brute_force();
    assert_eq!(b.len(), want.len());
    for ((x, m), (wx, wm)) in b.iter().zip(want) {
        assert_eq!(x, wx);
        assert_abs_diff_eq!(m, wm, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(b.mass_at(3.0), 0.0014, epsilon = 1e-12);
    assert_abs_diff_eq!(b.mass_at(9.0), 0.1857, epsilon = 1e-12);
}

#[test]
fn unknown_user_is_an_error() {
    let config = four_user_system(p4());
    assert!(config.background_sum(&UserId::from("u9")).is_err());
}

#[test]
fn config_json_round_trip_is_exact() {
    let config = four_user_system(q4());
    let text = serde_json::to_string(&config).unwrap();
    let back: SystemConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(back, config);
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
}

#[test]
fn malformed_distributions_are_rejected() {
    for json in [
        r#"{"support":[1,2],"mass":[0.5]}"#,
        r#"{"support":[1,2],"mass":[0.5,0.6]}"#,
        r#"{"support":[1,2],"mass":[-0.5,1.5]}"#,
        r#"{"support":[],"mass":[]}"#,
    ] {
        assert!(
            serde_json::from_str::<DiscreteDistribution>(json).is_err(),
            "{json}"
        );
    }
}

proptest! {
    #[test]
    fn convolution_commutes(p in arb_dist(6, -10, 10), q in arb_dist(6, -10, 10)) {
        let a = convolve(&p, &q);
        let b = convolve(&q, &p);
        prop_assert_eq!(a.support(), b.support());
        for (x, y) in a.mass().iter().zip(b.mass()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn convolution_adds_means(p in arb_real_dist(6), q in arb_real_dist(6)) {
        let r = convolve(&p, &q);
        prop_assert!((r.mean() - p.mean() - q.mean()).abs() <= 1e-9);
        prop_assert!((r.total_mass() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn value_prior_is_shifted_absent_prior(config in arb_config(5, 6), a in -10i32..=10) {
        let user = config.users()[0].id.clone();
        let absent = config.conditional_prior(&user, &SecretArm::Absent).unwrap();
        let valued = config.conditional_prior(&user, &SecretArm::Value(a as f64)).unwrap();
        prop_assert_eq!(valued.len(), absent.len());
        for ((x, m), (y, n)) in valued.iter().zip(absent.iter()) {
            prop_assert_eq!(x, y + a as f64);
            prop_assert_eq!(m, n);
        }
    }

    #[test]
    fn distribution_prior_matches_enumeration(config in arb_config(4, 4), p in arb_dist(4, -10, 10)) {
        let users = config.users();
        let target = users.last().unwrap().id.clone();
        let prior = config.conditional_prior(&target, &SecretArm::Distribution(p.clone())).unwrap();

        // Enumerate every joint outcome of the other users and the secret law.
        let mut joint: Vec<(f64, f64)> = p.iter().collect();
        for u in &users[..users.len() - 1] {
            joint = joint
                .iter()
                .flat_map(|&(x, m)| u.distribution.iter().map(move |(y, n)| (x + y, m * n)))
                .collect();
        }
        let mut want = std::collections::BTreeMap::<i64, f64>::new();
        for (x, m) in joint {
            *want.entry(x as i64).or_default() += m;
        }
        prop_assert_eq!(prior.len(), want.len());
        for ((x, m), (wx, wm)) in prior.iter().zip(want) {
            prop_assert_eq!(x, wx as f64);
            prop_assert!((m - wm).abs() <= 1e-12);
        }
    }
}
