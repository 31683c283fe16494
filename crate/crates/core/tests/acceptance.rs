//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when
//! any criterion fails.

use std::fs;
use std::time::{Duration, Instant};

use locstat::harness::{
    collect_samples, emit_report, run_command, Command, ExperimentConfig, Format, Plan, Report,
};
use locstat::model::{build_lattice_hamiltonian, sample_potential, CubeSpec, DisorderSpec, LatticeCube, OperatorMatrix};
use locstat::seeding::{derive_trial_seed, trial_rng, uniform01};
use locstat::spectral::{count_in, dense_spectrum, eigenvalues_in};
use locstat::stats::{
    chi_square_independence, chi_square_poisson, ks_exponential, pearson, Thresholds,
};
use rand_core::RngCore;
use rand_distr::{Distribution, Exp, Poisson};

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(text).expect("bundled config parses")
}

fn run(cmd: Command, c: &ExperimentConfig) -> (Report, Duration) {
    let t = Instant::now();
    let r = run_command(cmd, c, None).unwrap_or_else(|e| panic!("{cmd} failed: {e}"));
    (r.report, t.elapsed())
}

fn metric(r: &Report, test: &str, key: &str) -> f64 {
    r.test(test)
        .and_then(|t| t.get(key))
        .unwrap_or_else(|| panic!("missing {test}/{key}"))
}

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
}

/// Exact counts and 1e-9 eigenvalues against the dense oracle on 500 random
/// 1D tridiagonal and 2D banded instances of size at most 200.
fn criterion_1() -> Outcome {
    let c = config(include_str!("../../../configs/oracle.json"));
    let (r, dt) = run(Command::OracleCheck, &c);
    let mism = metric(&r, "oracle", "count_mismatches");
    let err = metric(&r, "oracle", "max_eigenvalue_error");
    let n = metric(&r, "oracle", "instances");
    let largest = metric(&r, "oracle", "largest_size");

    // An independent pass with 2D instances compared as full dense matrices.
    let mut dense_mismatch = 0;
    for i in 0..50u64 {
        let mut rng = trial_rng(derive_trial_seed(77, i));
        let side = 2 + (rng.next_u64() % 13) as usize;
        let cube = LatticeCube::with_side(2, side).unwrap();
        let pot = sample_potential(&DisorderSpec::uniform(6.0).unwrap(), &CubeSpec::Lattice(cube), rng.next_u64()).unwrap();
        let h = build_lattice_hamiltonian(&cube, &pot).unwrap();
        let dense = OperatorMatrix::from_dense(h.size(), &h.to_dense()).unwrap();
        let spec = dense_spectrum(&dense).unwrap();
        let a = -5.0 + 10.0 * uniform01(&mut rng);
        let b = a + 4.0 * uniform01(&mut rng);
        let want: Vec<f64> = spec.iter().copied().filter(|&l| l > a && l <= b).collect();
        let got = eigenvalues_in(&dense, a, b, 1e-12).unwrap();
        let ok = count_in(&dense, a, b).unwrap() == want.len()
            && got.len() == want.len()
            && got.iter().zip(&want).all(|(x, y)| (x - y).abs() <= 1e-9);
        dense_mismatch += (!ok) as u32;
    }
    Outcome {
        id: 1,
        title: "oracle equivalence",
        pass: n >= 500.0 && mism == 0.0 && err <= 1e-9 && largest <= 200.0 && dense_mismatch == 0 && dt.as_secs() < 120,
        detail: format!(
            "{n} instances, count mismatches {mism}, max |Δλ| {err:.2e} (tol 1e-9), dense-2D mismatches {dense_mismatch}, {:.1}s (limit 120s)",
            dt.as_secs_f64()
        ),
    }
}

/// Additivity over disjoint windows and the event inclusion, exact, on at
/// least 1e5 (trial, sub-cube, window) triples.
fn criterion_2() -> Outcome {
    let mut c = config(include_str!("../../../configs/decorrelate.json"));
    c.ell = Some(32);
    let (r, _) = run(Command::Decorrelate, &c);
    let checked = metric(&r, "decorrelation", "checked_subcubes");
    let add = metric(&r, "decorrelation", "additivity_violations");
    let inc = metric(&r, "decorrelation", "inclusion_violations");
    Outcome {
        id: 2,
        title: "counting-measure exactness",
        pass: checked >= 1e5 && add == 0.0 && inc == 0.0,
        detail: format!("{checked} sub-cube checks, additivity violations {add}, inclusion violations {inc} (exact)"),
    }
}

fn criterion_3() -> Outcome {
    let c = config(include_str!("../../../configs/dos_free.json"));
    let (r, dt) = run(Command::Dos, &c);
    let t = r.test("dos@2000").expect("dos report");
    let (lo, hi) = t.ci.unwrap();
    let target = 1.0 / (2.0 * std::f64::consts::PI);
    Outcome {
        id: 3,
        title: "DOS sanity",
        pass: lo <= target && target <= hi && dt.as_secs() < 60,
        detail: format!(
            "n̂(0) = {:.4}, CI [{lo:.4}, {hi:.4}] vs 1/(2π) = {target:.4}, {:.1}s (limit 60s)",
            t.statistic.unwrap(),
            dt.as_secs_f64()
        ),
    }
}

fn criterion_4() -> Outcome {
    let c = config(include_str!("../../../configs/wegner.json"));
    let (r, _) = run(Command::Wegner, &c);
    let r2 = metric(&r, "wegner@2048", "r_squared");
    let ratio = metric(&r, "wegner@2048", "bound_ratio");
    Outcome {
        id: 4,
        title: "Wegner linearity",
        pass: r2 >= 0.99 && (0.8..=1.2).contains(&ratio),
        detail: format!("R² = {r2:.5} (≥ 0.99), slope/(n̂/n_L) = {ratio:.4} (in [0.8, 1.2])"),
    }
}

fn criterion_5() -> Outcome {
    let c = config(include_str!("../../../configs/minami.json"));
    let (r, _) = run(Command::Minami, &c);
    let t = r.test("minami").unwrap();
    let series: Vec<String> = t.series["sum_p_ge2"]
        .iter()
        .map(|p| format!("{}: {:.5} [{:.5}, {:.5}]", p.x, p.value, p.ci_low, p.ci_high))
        .collect();
    Outcome {
        id: 5,
        title: "Minami smallness",
        pass: t.passed(),
        detail: format!("Σ_p P(η_p ≥ 2) by side {} (non-increasing up to CI overlap)", series.join(", ")),
    }
}

fn criterion_6() -> Outcome {
    let c = config(include_str!("../../../configs/poisson.json"));
    let (r, _) = run(Command::Poisson, &c);
    let ks = metric(&r, "poisson_gaps@2048", "ks_distance");
    let p = metric(&r, "poisson_counts@2048", "p_value");
    Outcome {
        id: 6,
        title: "Poisson limit",
        pass: ks <= 0.05 && p > 0.01,
        detail: format!("gap KS = {ks:.4} (≤ 0.05), count chi-square p = {p:.4} (> 0.01)"),
    }
}

fn independence_suite(r: &Report, name: &str) -> (bool, String) {
    let lo = metric(r, name, "correlation_ci_low");
    let hi = metric(r, name, "correlation_ci_high");
    let gap = metric(r, name, "cf_gap");
    let p = metric(r, name, "chi_square_p_value");
    let half = 0.5 * (hi - lo);
    let pass = lo <= 0.0 && 0.0 <= hi && half <= 0.05 && gap <= 0.05 && p > 0.01;
    (
        pass,
        format!("corr CI [{lo:.4}, {hi:.4}] half-width {half:.4} (≤ 0.05), CF gap {gap:.4} (≤ 0.05), chi-square p {p:.4} (> 0.01)"),
    )
}

fn criterion_7() -> Outcome {
    let c = config(include_str!("../../../configs/independence.json"));
    let (r, _) = run(Command::Independence, &c);
    let (ok, detail) = independence_suite(&r, "independence@2048");
    // Control: identical energy and window give identical counts.
    let mut ctl = c.clone();
    ctl.energy_prime = ctl.energy;
    ctl.window_b = ctl.window_a.clone();
    let s = collect_samples(&ctl, Plan::default()).unwrap();
    let pairs: Vec<(f64, f64)> = s[0].eta_pairs().iter().map(|&(a, b)| (a as f64, b as f64)).collect();
    let rho = pearson(&pairs, 0.95).map(|c| c.r).unwrap_or(f64::NAN);
    Outcome {
        id: 7,
        title: "independence",
        pass: ok && rho > 0.99,
        detail: format!("{detail}; control corr at E' = E: {rho:.4} (> 0.99)"),
    }
}

fn criterion_8() -> Outcome {
    let c = config(include_str!("../../../configs/decorrelate.json"));
    let (r, _) = run(Command::Decorrelate, &c);
    let t = r.test("decorrelation").unwrap();
    let series: Vec<String> = t.series["sum_both"]
        .iter()
        .map(|p| format!("{}: {:.4} [{:.4}, {:.4}]", p.x, p.value, p.ci_low, p.ci_high))
        .collect();
    Outcome {
        id: 8,
        title: "decorrelation sums",
        pass: t.passed(),
        detail: format!("Σ_p P(both ≥ 1) by side {} (non-increasing up to CI overlap)", series.join(", ")),
    }
}

fn criterion_9() -> Outcome {
    let c = config(include_str!("../../../configs/green.json"));
    let (r, dt) = run(Command::Green, &c);
    let slope = metric(&r, "fractional_moments@256", "decay_slope");
    let r2 = metric(&r, "fractional_moments@256", "r_squared");
    Outcome {
        id: 9,
        title: "fractional-moment decay",
        pass: slope < 0.0 && r2 >= 0.9 && dt.as_secs() < 300,
        detail: format!("slope {slope:.5} (< 0), R² {r2:.4} (≥ 0.9), {:.1}s (limit 300s)", dt.as_secs_f64()),
    }
}

fn criterion_10() -> Outcome {
    let c = config(include_str!("../../../configs/continuum_poisson.json"));
    let (r, _) = run(Command::Poisson, &c);
    let ks = metric(&r, "poisson_gaps@511", "ks_distance");
    let ci = config(include_str!("../../../configs/continuum_independence.json"));
    let (ri, _) = run(Command::Independence, &ci);
    let (ok, detail) = independence_suite(&ri, "independence@511");
    let sep = (ci.energy - ci.energy_prime).abs();
    Outcome {
        id: 10,
        title: "continuum backend",
        pass: ks <= 0.07 && ok && sep >= 0.5,
        detail: format!("gap KS = {ks:.4} (≤ 0.07); E = {}, E' = {} (separation {sep}): {detail}", ci.energy, ci.energy_prime),
    }
}

fn criterion_11() -> Outcome {
    let mut c = config(include_str!("../../../configs/independence.json"));
    c.sides = vec![512, 1024];
    c.trials = 200;
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (k, threads) in [Some(1), Some(1), Some(4)].into_iter().enumerate() {
        let run = run_command(Command::Independence, &c, threads).unwrap();
        let sub = dir.path().join(k.to_string());
        let paths = emit_report(&run, &[Format::Csv, Format::Json], &sub).unwrap();
        outputs.push(paths.iter().map(|p| fs::read(p).unwrap()).collect::<Vec<_>>());
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    Outcome {
        id: 11,
        title: "determinism",
        pass: same,
        detail: format!("two serial runs and one 4-thread run: CSV/JSON byte-identical = {same}"),
    }
}

/// Rejections at level 0.01 over 200 null repetitions must fall within three
/// standard errors of 2.
fn criterion_12() -> Outcome {
    let reps = 200;
    let alpha = 0.01;
    let se = (alpha * (1.0 - alpha) / reps as f64).sqrt();
    let (lo, hi) = (alpha - 3.0 * se, alpha + 3.0 * se);
    let th = Thresholds::default();
    let pois = Poisson::new(3.0).unwrap();
    let exp = Exp::new(2.0).unwrap();
    let pois1 = Poisson::new(1.0).unwrap();
    let mut rejects = [0usize; 4];
    for i in 0..reps as u64 {
        let mut rng = trial_rng(derive_trial_seed(12, i));
        let counts: Vec<u32> = (0..1000).map(|_| pois.sample(&mut rng) as u32).collect();
        let p = chi_square_poisson(&counts, 3.0, &th).unwrap().p_value.unwrap();
        rejects[0] += (p < alpha) as usize;
        let gaps: Vec<f64> = (0..1000).map(|_| exp.sample(&mut rng)).collect();
        rejects[1] += (ks_exponential(&gaps, 2.0).1 < alpha) as usize;
        let pairs: Vec<(u32, u32)> = (0..1000)
            .map(|_| (pois1.sample(&mut rng) as u32, pois1.sample(&mut rng) as u32))
            .collect();
        let c = chi_square_independence(&pairs).unwrap();
        rejects[2] += (c.p_value < alpha) as usize;
        let fp: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (a as f64, b as f64)).collect();
        rejects[3] += (pearson(&fp, 0.95).unwrap().p_value.unwrap() < alpha) as usize;
    }
    let rates: Vec<f64> = rejects.iter().map(|&r| r as f64 / reps as f64).collect();
    Outcome {
        id: 12,
        title: "null calibration",
        pass: rates.iter().all(|&r| r >= lo && r <= hi),
        detail: format!(
            "rejection rates poisson-χ² {:.3}, gap-KS {:.3}, independence-χ² {:.3}, Pearson {:.3} (allowed [{:.3}, {hi:.3}])",
            rates[0],
            rates[1],
            rates[2],
            rates[3],
            lo.max(0.0)
        ),
    }
}

fn main() {
    let criteria: [fn() -> Outcome; 12] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
    ];
    let mut failed = 0;
    for f in criteria {
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2} ({}): {}", o.id, o.title, o.detail);
        failed += (!o.pass) as usize;
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
