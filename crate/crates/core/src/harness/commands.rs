//! The experiment behind each CLI subcommand.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::ensemble::{collect_samples, pilot_intensity, with_threads, Plan};
use crate::harness::oracle::oracle_check;
use crate::model::{CubeSpec, ModelSpec, Site};
use crate::pointprocess::{min_scale_for_disjointness, Window};
use crate::spectral::fractional_moment_estimate;
use crate::stats::{
    decorrelation_check, dos_from_counts, dos_profile, independence_test, minami_check, poisson_test,
    wegner_check, EnsembleSample, PoissonInput, Provenance, SeriesPoint, TestReport, Verdict,
};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Dos,
    Wegner,
    Minami,
    Poisson,
    Independence,
    Decorrelate,
    Green,
    OracleCheck,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Dos,
        Command::Wegner,
        Command::Minami,
        Command::Poisson,
        Command::Independence,
        Command::Decorrelate,
        Command::Green,
        Command::OracleCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Dos => "dos",
            Command::Wegner => "wegner",
            Command::Minami => "minami",
            Command::Poisson => "poisson",
            Command::Independence => "independence",
            Command::Decorrelate => "decorrelate",
            Command::Green => "green",
            Command::OracleCheck => "oracle-check",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command {s:?}")))
    }
}

/// Aggregate, serializable outcome of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub software_version: String,
    pub command: Command,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub trials_total: usize,
    pub excluded: usize,
    pub tests: Vec<TestReport>,
}

impl Report {
    pub fn new(command: Command, config: &ExperimentConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            software_version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            config_hash: config.hash(),
            config: config.clone(),
            trials_total: 0,
            excluded: 0,
            tests: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.tests.iter().all(|t| t.passed())
    }

    pub fn test(&self, name: &str) -> Option<&TestReport> {
        self.tests.iter().find(|t| t.name == name)
    }
}

/// A report together with the per-trial samples it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub report: Report,
    pub samples: Vec<EnsembleSample>,
}

fn label(name: &str, side: f64) -> String {
    format!("{name}@{side}")
}

fn plan_for(command: Command) -> Plan {
    match command {
        Command::Wegner => Plan {
            wegner: true,
            ..Plan::default()
        },
        Command::Minami | Command::Independence => Plan {
            subcubes: true,
            ..Plan::default()
        },
        Command::Decorrelate => Plan {
            subcubes: true,
            union: true,
            ..Plan::default()
        },
        Command::Poisson => Plan {
            points: true,
            ..Plan::default()
        },
        _ => Plan::default(),
    }
}

fn validate(command: Command, config: &ExperimentConfig) -> Result<()> {
    config.validate()?;
    let needs_distinct = matches!(command, Command::Independence | Command::Decorrelate);
    if needs_distinct && config.energy == config.energy_prime {
        return Err(Error::DisjointnessUndefined(config.energy));
    }
    let needs_subcubes = matches!(command, Command::Wegner | Command::Minami | Command::Decorrelate);
    if needs_subcubes && config.flavor == crate::harness::config::Flavor::Continuum {
        return Err(Error::InsufficientDesign(format!(
            "{command} needs sub-cube counts, available for the lattice flavor only"
        )));
    }
    if matches!(command, Command::Minami | Command::Decorrelate) && config.sides.len() < 2 {
        return Err(Error::InsufficientDesign(format!("{command} needs at least two sides")));
    }
    if command == Command::Wegner && config.wegner_lengths.len() < 3 {
        return Err(Error::InsufficientDesign("wegner needs at least 3 window lengths".into()));
    }
    Ok(())
}

/// Validates `config`, runs `command` on a pool of `threads` workers and
/// aggregates every test.
pub fn run_command(command: Command, config: &ExperimentConfig, threads: Option<usize>) -> Result<Run> {
    validate(command, config)?;
    let mut run = with_threads(threads, || execute(command, config))??;
    let prov = Provenance {
        config_hash: run.report.config_hash.clone(),
        seed: config.seed,
    };
    for t in &mut run.report.tests {
        t.provenance = Some(prov.clone());
    }
    Ok(run)
}

fn execute(command: Command, config: &ExperimentConfig) -> Result<Run> {
    let mut report = Report::new(command, config);
    let th = &config.thresholds;
    let samples = match command {
        Command::Dos => {
            let samples = dos_samples(config)?;
            for s in &samples {
                report.tests.push(dos_report(config, s)?);
            }
            samples
        }
        Command::OracleCheck => {
            report.tests.push(oracle_check(
                config.trials,
                config.seed,
                config.oracle.max_size,
                config.oracle.tolerance,
                th,
            )?);
            report.trials_total = config.trials;
            Vec::new()
        }
        Command::Green => {
            for (k, &side) in config.sides.iter().enumerate() {
                let (t, excluded) = green_report(config, side, k)?;
                report.excluded += excluded;
                report.tests.push(t);
            }
            report.trials_total = config.trials * config.sides.len();
            if report.excluded * 1000 > report.trials_total {
                return Err(Error::Exclusions {
                    excluded: report.excluded,
                    total: report.trials_total,
                });
            }
            Vec::new()
        }
        _ => {
            let samples = collect_samples(config, plan_for(command))?;
            match command {
                Command::Wegner => {
                    for s in &samples {
                        let mut t = wegner_check(s, &config.wegner_lengths, None, th)?;
                        t.name = label("wegner", s.meta.side);
                        report.tests.push(t);
                    }
                }
                Command::Minami => {
                    report.tests.push(minami_check(&samples, config.window_a.length(), th)?);
                }
                Command::Poisson => {
                    for (s, &side) in samples.iter().zip(&config.sides) {
                        report.tests.extend(poisson_reports(config, s, side)?);
                    }
                }
                Command::Independence => {
                    for (s, &side) in samples.iter().zip(&config.sides) {
                        report.tests.extend(independence_reports(config, s, side)?);
                    }
                }
                Command::Decorrelate => {
                    let mut t = decorrelation_check(&samples, th)?;
                    let scale = min_scale_for_disjointness(
                        &config.window_a,
                        &config.window_b,
                        config.energy,
                        config.energy_prime,
                        config.sides.iter().map(|&s| s as u64),
                        |l| match config.cube(l as usize) {
                            Ok(c) => config.volume_map.volume(&c),
                            Err(_) => 0.0,
                        },
                    );
                    match scale {
                        Ok(l0) => t.metric("min_disjoint_side", l0 as f64),
                        Err(e) => t.notes.push(e.to_string()),
                    }
                    report.tests.push(t);
                }
                _ => unreachable!("handled above"),
            }
            samples
        }
    };
    if !samples.is_empty() {
        report.trials_total = samples.iter().map(|s| s.records.len()).sum();
        report.excluded = samples
            .iter()
            .map(|s| s.records.iter().filter(|r| r.excluded).count())
            .sum();
    }
    Ok(Run { report, samples })
}

/// For `dos`, window A is the unrescaled bin `(E - bin/2, E + bin/2]`
/// expressed in rescaled units.
fn dos_samples(config: &ExperimentConfig) -> Result<Vec<EnsembleSample>> {
    let mut samples = Vec::with_capacity(config.sides.len());
    for (k, &side) in config.sides.iter().enumerate() {
        let cube = config.cube(side)?;
        let v = config.volume_map.volume(&cube);
        let half = 0.5 * config.dos.bin * v;
        let mut c = config.clone();
        c.sides = vec![side];
        c.window_a = Window::interval(-half, half)?;
        c.window_b = c.window_a.clone();
        c.energy_prime = c.energy;
        // Keep the seed streams of every rung distinct, as in a ladder run.
        c.seed = crate::seeding::derive_trial_seed(config.seed, u64::MAX - k as u64);
        samples.extend(collect_samples(&c, Plan::default())?);
    }
    Ok(samples)
}

/// Bounds containing the spectrum of every realization: the potential
/// enters monotonically, so the extremal constant potentials bracket it.
fn spectral_bounds(model: &ModelSpec) -> Result<(f64, f64)> {
    let (lo, hi) = model.disorder.support();
    let n = model.cube.potential_len();
    let low = model.hamiltonian(&vec![lo; n])?.gershgorin().0;
    let high = model.hamiltonian(&vec![hi; n])?.gershgorin().1;
    Ok((low.min(high) - 1.0, high.max(low) + 1.0))
}

fn dos_report(config: &ExperimentConfig, s: &EnsembleSample) -> Result<TestReport> {
    let side = s.meta.side as usize;
    let model = config.model(side)?;
    let counts: Vec<u32> = s.kept().map(|r| r.eta_a).collect();
    let est = dos_from_counts(config.energy, config.dos.bin, model.cube.volume(), &counts, config.thresholds.ci_level)?;
    let (lo, hi) = spectral_bounds(&model)?;
    let bins = config.dos.profile_bins.max(1);
    let profile = dos_profile(&model, lo, hi, bins, config.trials.min(10), config.seed)?;
    let width = (hi - lo) / bins as f64;
    let mass: f64 = profile.iter().map(|&(_, n)| n * width).sum();

    let mut t = TestReport::new(label("dos", s.meta.side), config.thresholds);
    t.sample_size = counts.len();
    t.statistic = Some(est.value);
    t.ci = Some(est.ci);
    t.metric("n_hat", est.value);
    t.metric("std_err", est.std_err);
    t.metric("resolution", est.resolution);
    t.metric("bin", est.bin);
    t.metric("total_mass", mass);
    t.series.insert(
        "profile".into(),
        profile
            .iter()
            .map(|&(x, v)| SeriesPoint {
                x,
                value: v,
                ci_low: v,
                ci_high: v,
            })
            .collect(),
    );
    // One state per grid point.
    let expected_mass = model.cube.operator_size() as f64 / model.cube.volume();
    t.metric("expected_mass", expected_mass);
    let mass_ok = (mass - expected_mass).abs() <= 0.01 * expected_mass;
    let reference_ok = match config.dos.reference {
        Some(r) => {
            t.metric("reference", r);
            est.ci.0 <= r && r <= est.ci.1
        }
        None => true,
    };
    t.verdict = Verdict::from_bool(mass_ok && reference_ok);
    Ok(t)
}

fn poisson_reports(config: &ExperimentConfig, s: &EnsembleSample, side: usize) -> Result<Vec<TestReport>> {
    let (n_hat, se) = pilot_intensity(config, side, config.energy, &config.window_a)?;
    let counts: Vec<u32> = s.kept().map(|r| r.eta_a).collect();
    let gaps: Vec<f64> = s.kept().flat_map(|r| r.gaps.iter().copied()).collect();
    let lambda = n_hat * config.window_a.length();
    let mut out = Vec::new();
    let mut c = poisson_test(PoissonInput::Counts(&counts), lambda, &config.thresholds)?;
    c.name = label("poisson_counts", s.meta.side);
    let mut g = poisson_test(PoissonInput::Gaps(&gaps), n_hat, &config.thresholds)?;
    g.name = label("poisson_gaps", s.meta.side);
    for t in [&mut c, &mut g] {
        t.metric("n_hat", n_hat);
        t.metric("n_hat_std_err", se);
    }
    out.push(c);
    out.push(g);
    Ok(out)
}

fn independence_reports(config: &ExperimentConfig, s: &EnsembleSample, side: usize) -> Result<Vec<TestReport>> {
    let (n_a, _) = pilot_intensity(config, side, config.energy, &config.window_a)?;
    let (n_b, _) = pilot_intensity(config, side, config.energy_prime, &config.window_b)?;
    let means = Some((n_a * config.window_a.length(), n_b * config.window_b.length()));
    let mut out = Vec::new();
    let mut t = independence_test(&s.eta_pairs(), &config.t_grid, means, &config.thresholds)?;
    t.name = label("independence", s.meta.side);
    t.metric("n_hat_e", n_a);
    t.metric("n_hat_eprime", n_b);
    out.push(t);
    if let Some(z) = s.zeta_pairs() {
        let mut t = independence_test(&z, &config.t_grid, means, &config.thresholds)?;
        t.name = label("independence_zeta", s.meta.side);
        out.push(t);
    }
    Ok(out)
}

fn green_report(config: &ExperimentConfig, side: usize, rung: usize) -> Result<(TestReport, usize)> {
    let model = config.model(side)?;
    let x: Site = [0, 0, 0];
    let ys: Vec<Site> = config.green.separations.iter().map(|&r| [r, 0, 0]).collect();
    if let CubeSpec::Lattice(c) = &model.cube {
        if let Some(y) = ys.iter().find(|y| !c.contains(y)) {
            return Err(Error::Config(format!("target {y:?} lies outside the cube of side {side}")));
        }
    }
    let seed = crate::seeding::derive_trial_seed(config.seed, u64::MAX - rung as u64);
    let fm = fractional_moment_estimate(
        &model,
        x,
        &ys,
        config.energy,
        config.green.eps,
        config.green.s,
        config.trials,
        seed,
        config.thresholds.ci_level,
    )?;
    let mut t = TestReport::new(label("fractional_moments", side as f64), config.thresholds);
    t.sample_size = fm.trials - fm.excluded;
    t.statistic = fm.decay_slope;
    t.metric("s", fm.s);
    t.metric("eps", fm.eps);
    t.metric("excluded", fm.excluded as f64);
    if let (Some(slope), Some(intercept), Some(r2)) = (fm.decay_slope, fm.decay_intercept, fm.r_squared) {
        t.metric("decay_slope", slope);
        t.metric("decay_intercept", intercept);
        t.metric("r_squared", r2);
        t.verdict = Verdict::from_bool(slope < 0.0 && r2 >= config.thresholds.decay_r2_min);
    } else {
        t.notes.push("decay fit undefined (a mean vanished)".into());
    }
    t.series.insert(
        "moments".into(),
        (0..fm.means.len())
            .map(|j| SeriesPoint {
                x: fm.separations[j],
                value: fm.means[j],
                ci_low: fm.ci_low[j],
                ci_high: fm.ci_high[j],
            })
            .collect(),
    );
    Ok((t, fm.excluded))
}
