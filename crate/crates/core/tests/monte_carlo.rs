//! Monte Carlo oracles: empirical moments of the coding scheme against the
//! analytic recursion, power discipline, orthogonality and decoding sanity.

use prelog_core::simulate::{wilson_interval, Campaign, InitMode, MessageConfig, Mode, Scheme};
use prelog_core::{ChannelParams, NoiseSpec, RngSpec};

const N: u64 = 100_000;

fn params(p: f64, s1: f64, s2: f64, rz: f64) -> ChannelParams {
    ChannelParams::new(p, NoiseSpec::new(s1, s2, rz).unwrap()).unwrap()
}

fn check_oracle(pr: ChannelParams, mode: Mode, seed: u64) {
    let cfg = MessageConfig::from_rate_fraction(20, &pr, 0.5).unwrap();
    let s = Campaign::new(cfg, pr, mode, InitMode::Natural, N, seed).unwrap().run().unwrap();
    let p = pr.power();
    assert!(s.max_moment_z() <= 5.0, "moment z {} for {pr:?}", s.max_moment_z());
    assert!(s.max_orthogonality_z() <= 5.0, "orthogonality z {}", s.max_orthogonality_z());
    assert!(s.max_power_z() <= 5.0, "power z {}", s.max_power_z());
    assert!((s.mean_power - p).abs() < 0.01 * p, "mean power {} vs {p}", s.mean_power);
    for st in &s.steps {
        assert!(st.var1 >= 0.0 && st.var2 >= 0.0);
    }
    if mode == Mode::Interference {
        for ps in s.power.iter().skip(2) {
            let (a, b) = ps.transmitters.unwrap();
            assert!(a <= p * 1.02 && b <= p * 1.02, "transmitter powers {a} {b}");
        }
    }
}

#[test]
fn antipodal_equal_noise() {
    check_oracle(params(100.0, 1.0, 1.0, -1.0), Mode::Broadcast, 1);
}

#[test]
fn uncorrelated_equal_noise() {
    check_oracle(params(10.0, 1.0, 1.0, 0.0), Mode::Broadcast, 2);
}

#[test]
fn unequal_partially_correlated_noise() {
    check_oracle(params(30.0, 0.7, 1.6, 0.4), Mode::Broadcast, 3);
}

#[test]
fn unequal_negatively_correlated_noise() {
    check_oracle(params(1000.0, 1.5, 0.8, -0.7), Mode::Broadcast, 4);
}

#[test]
fn interference_transmitters() {
    check_oracle(params(50.0, 1.0, 1.3, -0.5), Mode::Interference, 5);
}

#[test]
fn no_signal_decodes_at_chance() {
    // A vanishing power stands in for P = 0, which the model rejects.
    let pr = params(1e-12, 1.0, 1.0, 0.0);
    let cfg = MessageConfig::new(4, 0.5, 0.5).unwrap();
    assert_eq!(cfg.level_counts(), (4, 4));
    let s = Campaign::new(cfg, pr, Mode::Broadcast, InitMode::Natural, 20_000, 6).unwrap().run().unwrap();
    let success = s.trials - s.block_errors;
    let (lo, hi) = wilson_interval(success, s.trials);
    assert!(lo <= 1.0 / 16.0 && 1.0 / 16.0 <= hi, "success CI {lo}..{hi}");
}

#[test]
fn block_error_does_not_grow_with_block_length() {
    let pr = params(10.0, 1.0, 1.0, -1.0);
    let mut prev: Option<(f64, f64)> = None;
    for n in [6, 9, 12, 16] {
        let cfg = MessageConfig::new(n, 0.8, 0.8).unwrap();
        let s = Campaign::new(cfg, pr, Mode::Broadcast, InitMode::Natural, 10_000, 7).unwrap().run().unwrap();
        if let Some((_, prev_hi)) = prev {
            // non-increasing up to statistical overlap
            assert!(s.block_error_ci.0 <= prev_hi, "n={n}: {:?}", s.block_error_ci);
        }
        prev = Some(s.block_error_ci);
    }
}

#[test]
fn natural_trajectory_approaches_fixed_point() {
    let pr = params(100.0, 1.0, 1.0, -1.0);
    let cfg = MessageConfig::new(30, 1.0, 1.0).unwrap();
    let s = Campaign::new(cfg, pr, Mode::Broadcast, InitMode::Natural, 10_000, 8).unwrap().run().unwrap();
    println!("analytic distance {:.3e}, empirical distance {:.3e}", s.analytic_rho_distance, s.empirical_rho_distance);
    assert!(s.analytic_rho_distance < 1e-6);
}

#[test]
fn trials_are_pure_functions_of_their_stream() {
    let pr = params(20.0, 1.0, 2.0, 0.5);
    let scheme = Scheme::new(MessageConfig::new(10, 1.0, 0.5).unwrap(), pr, InitMode::Natural).unwrap();
    let a: Vec<_> = (0..20).map(|i| scheme.run(Mode::Broadcast, RngSpec::new(1, i)).unwrap()).collect();
    let b: Vec<_> = (0..20).rev().map(|i| scheme.run(Mode::Broadcast, RngSpec::new(1, i)).unwrap()).collect();
    assert!(a.iter().eq(b.iter().rev()));
}
