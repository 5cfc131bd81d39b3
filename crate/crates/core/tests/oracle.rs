mod common;

use common::*;

#[test]
fn hermite_rule_integrates_polynomials_and_cosine() {
    let q = NormalRule::new(64);
    assert!((q.expect(0.0, |_| 1.0) - 1.0).abs() < 1e-13);
    assert!((q.expect(0.0, |x| x * x) - 1.0).abs() < 1e-12);
    assert!((q.expect(0.0, |x| x.powi(4)) - 3.0).abs() < 1e-11);
    assert!((q.expect(0.3, |x| x.cos()) - 0.3f64.cos() * (-0.5f64).exp()).abs() < 1e-13);
}

#[test]
fn gaussian_sine_matches_closed_form() {
    let v = gaussian_sine_oracle();
    assert!((v - (-0.5f64).exp()).abs() < 1e-12, "{v}");
    assert!((v - GAUSSIAN_SINE).abs() < 1e-12);
}

#[test]
fn sigmoid_matches_frozen_value() {
    let v = sigmoid_oracle();
    assert!((v - SIGMOID).abs() < 1e-10, "{v}");
}

#[test]
fn heavy_tail_matches_frozen_value() {
    assert!((noncentral_t_mean(10.0, 0.5) - 0.541861153969572).abs() < 1e-12);
    let v = heavy_tail_oracle(10.0, 0.5);
    assert!((v - HEAVY_TAIL).abs() < 1e-9, "{v}");
}

#[test]
fn heavy_tail_approaches_gaussian_limit() {
    // Large df and zero ncp: the increment is standard normal and
    // the answer is E[sin N(0,1)] = 0.
    assert!(heavy_tail_oracle(1e4, 0.0).abs() < 1e-12);
    let v = heavy_tail_oracle(1e4, 0.5);
    let limit = (0.5 - (0.5f64).sin()).sin() * (-0.5f64).exp();
    assert!((v - limit).abs() < 1e-3, "{v} vs {limit}");
}
