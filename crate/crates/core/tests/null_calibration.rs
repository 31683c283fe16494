use locstat::seeding::{derive_trial_seed, trial_rng};
use locstat::stats::{
    chi_square_poisson, empirical_cf_factorization, independence_test, pearson, default_t_grid, CfOptions,
    Thresholds, Verdict,
};
use rand_distr::{Distribution, Poisson};

#[test]
fn poisson_counts_accepted_in_repeated_runs() {
    let th = Thresholds::default();
    let pois = Poisson::new(3.0).unwrap();
    let accepted = (0..100u64)
        .filter(|&i| {
            let mut rng = trial_rng(derive_trial_seed(31, i));
            let counts: Vec<u32> = (0..10_000).map(|_| pois.sample(&mut rng) as u32).collect();
            chi_square_poisson(&counts, 3.0, &th).unwrap().p_value.unwrap() > 0.01
        })
        .count();
    assert!(accepted >= 95, "{accepted} of 100");
}

#[test]
fn misspecified_rate_is_rejected() {
    let th = Thresholds::default();
    let mut rng = trial_rng(5);
    let pois = Poisson::new(3.3).unwrap();
    let counts: Vec<u32> = (0..10_000).map(|_| pois.sample(&mut rng) as u32).collect();
    let rep = chi_square_poisson(&counts, 3.0, &th).unwrap();
    assert_eq!(rep.verdict, Verdict::Fail);
}

#[test]
fn correlated_pairs_are_caught_by_every_component() {
    let mut rng = trial_rng(8);
    let base = Poisson::new(1.0).unwrap();
    // N1 = X + Z, N2 = Y + Z with a shared component.
    let pairs: Vec<(u32, u32)> = (0..5000)
        .map(|_| {
            let z = base.sample(&mut rng) as u32;
            (base.sample(&mut rng) as u32 + z, base.sample(&mut rng) as u32 + z)
        })
        .collect();
    let rep = independence_test(&pairs, &default_t_grid(), None, &Thresholds::default()).unwrap();
    assert_eq!(rep.verdict, Verdict::Fail);
    assert!(rep.get("chi_square_p_value").unwrap() < 1e-6);
    assert!(rep.get("correlation").unwrap() > 0.4);
    let fp: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (a as f64, b as f64)).collect();
    let (lo, _) = pearson(&fp, 0.95).unwrap().ci.unwrap();
    assert!(lo > 0.0);
    let cf = empirical_cf_factorization(&pairs, &default_t_grid(), CfOptions::default()).unwrap();
    assert!(cf.gap > 0.05);
}
