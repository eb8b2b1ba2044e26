mod common;

use common::joint_distribution_check;
use isoshrink::model::{LambdaExponent, ModelConfig, PriorFamily, Sigma2Prior};

fn config(prior: PriorFamily, exponent: LambdaExponent) -> ModelConfig {
    let mut c = ModelConfig::new(prior);
    c.lambda_exponent = exponent;
    c.sigma2_prior = Sigma2Prior::InverseGamma {
        shape: 3.0,
        scale: 2.0,
    };
    c
}

const REGULAR: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 5.0];
const CHAINS: usize = 5000;
const CHAIN_LEN: usize = 20;

fn assert_consistent(locations: &[f64], prior: PriorFamily, seed: u64) {
    let moments = joint_distribution_check(
        locations.to_vec(),
        &config(prior, LambdaExponent::TwoMinusN),
        CHAINS,
        CHAIN_LEN,
        seed,
    );
    for m in &moments {
        assert!(
            m.z.abs() < 4.0,
            "{prior} {}: prior {} chain {} z {}",
            m.name,
            m.prior_mean,
            m.chain_mean,
            m.z
        );
    }
}

#[test]
fn half_horseshoe_conditionals_match_joint_prior() {
    assert_consistent(&REGULAR, PriorFamily::HalfHorseshoe, 11);
}

#[test]
fn half_laplace_conditionals_match_joint_prior() {
    assert_consistent(&REGULAR, PriorFamily::HalfLaplace, 12);
}

#[test]
fn half_normal_conditionals_match_joint_prior() {
    assert_consistent(&REGULAR, PriorFamily::HalfNormal, 13);
}

#[test]
fn unequal_spacings_match_joint_prior() {
    assert_consistent(&[0.0, 0.3, 2.0, 2.5, 6.0], PriorFamily::HalfHorseshoe, 14);
}

#[test]
fn three_minus_n_exponent_is_detected() {
    let moments = joint_distribution_check(
        REGULAR.to_vec(),
        &config(PriorFamily::HalfHorseshoe, LambdaExponent::ThreeMinusN),
        CHAINS,
        CHAIN_LEN,
        15,
    );
    let worst = moments.iter().map(|m| m.z.abs()).fold(0.0, f64::max);
    assert!(worst > 10.0, "{moments:?}");
}
