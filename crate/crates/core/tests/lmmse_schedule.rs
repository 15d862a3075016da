//! The moments induced by the LMMSE coefficients agree with the closed-form
//! recursion.

use prelog_core::simulate::{lmmse_coefficient_schedule, natural_initial_state};
use prelog_core::{ChannelParams, Error, NoiseSpec, RngSpec};
use rand::Rng;

#[test]
fn induced_moments_match_recursion_for_random_draws() {
    let mut rng = RngSpec::new(99, 1).rng();
    let mut worst = (0.0f64, 0.0f64);
    let mut checked = 0;
    for _ in 0..100 {
        let p = 10f64.powf(rng.random_range(-1.0..=3.0));
        let noise =
            NoiseSpec::new(rng.random_range(0.5..=2.0), rng.random_range(0.5..=2.0), rng.random_range(-1.0..=1.0))
                .unwrap();
        let params = ChannelParams::new(p, noise).unwrap();
        let init = natural_initial_state(&params, 1.0 / 12.0, 1.0 / 12.0).unwrap();
        let sched = match lmmse_coefficient_schedule(&params, init, 50) {
            Ok(s) => s,
            Err(Error::NumericalIntegrity(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        for s in &sched.steps {
            let ind = s.induced_posterior(&params);
            let rel1 = (ind.alpha1 - s.posterior.alpha1).abs() / s.posterior.alpha1;
            let rel2 = (ind.alpha2 - s.posterior.alpha2).abs() / s.posterior.alpha2;
            worst.0 = worst.0.max(rel1.max(rel2));
            worst.1 = worst.1.max((ind.rho - s.posterior.rho).abs());
            checked += 1;
        }
    }
    println!("checked {checked} steps, worst alpha rel {:.3e}, worst rho abs {:.3e}", worst.0, worst.1);
    assert!(worst.0 <= 1e-12 && worst.1 <= 1e-12);
}
