//! Parallel Monte Carlo execution with an ordered, deterministic merge.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::model::{build_subcube_hamiltonians, partition_subcubes, partition_with_side, CubeSpec, ModelSpec, SubcubePartition};
use crate::model::{LatticeCube, OperatorMatrix};
use crate::pointprocess::{count_window, extract_rescaled_points, rescale_window, Window};
use crate::seeding::{derive_trial_seed, mix64};
use crate::stats::{EnsembleSample, SampleMeta, TrialRecord};

/// Which quantities each trial computes besides the global counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Plan {
    pub subcubes: bool,
    pub union: bool,
    pub wegner: bool,
    pub points: bool,
}

/// Runs `f` on a pool with `threads` workers (`None` for the default).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Everything fixed at one rung of the ladder.
struct Rung {
    model: ModelSpec,
    lattice: Option<(LatticeCube, SubcubePartition)>,
    volume: f64,
    wa: Window,
    wb: Window,
    union: Option<Window>,
    wegner: Vec<Window>,
    meta: SampleMeta,
}

fn rung(config: &ExperimentConfig, side: usize, plan: Plan) -> Result<Rung> {
    let model = config.model(side)?;
    let volume = config.volume_map.volume(&model.cube);
    let wa = rescale_window(&config.window_a, config.energy, volume)?;
    let wb = rescale_window(&config.window_b, config.energy_prime, volume)?;
    let disjoint = wa.is_disjoint(&wb);
    let union = if plan.union && disjoint { Some(wa.disjoint_union(&wb)?) } else { None };
    let wegner = if plan.wegner {
        config
            .wegner_lengths
            .iter()
            .map(|&len| rescale_window(&Window::centered(len)?, config.energy, volume))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    // Sub-cube statistics exist on the lattice only; continuum samples
    // carry global counts.
    let lattice = match (&model.cube, plan.subcubes || plan.wegner) {
        (CubeSpec::Lattice(c), true) => {
            let part = match config.ell {
                Some(ell) => partition_with_side(c, ell)?,
                None => partition_subcubes(c, config.beta)?,
            };
            Some((*c, part))
        }
        _ => None,
    };
    let meta = SampleMeta {
        flavor: match model.cube {
            CubeSpec::Lattice(_) => "lattice".into(),
            CubeSpec::Continuum(_) => "continuum".into(),
        },
        dimension: model.cube.dimension(),
        side: side as f64,
        ell: lattice.as_ref().map(|(_, p)| p.side),
        n_l: lattice.as_ref().map(|(_, p)| p.count),
        volume,
        energy: config.energy,
        energy_prime: config.energy_prime,
        windows_disjoint: disjoint,
    };
    Ok(Rung {
        model,
        lattice,
        volume,
        wa,
        wb,
        union,
        wegner,
        meta,
    })
}

fn counts(hs: &[OperatorMatrix], w: &Window) -> Result<Vec<u32>> {
    hs.iter().map(|h| Ok(count_window(h, w)? as u32)).collect()
}

fn run_trial(config: &ExperimentConfig, r: &Rung, plan: Plan, trial: u64, seed: u64) -> Result<TrialRecord> {
    let real = r.model.realize(seed)?;
    let h = &real.hamiltonian;
    let mut rec = TrialRecord {
        trial,
        seed,
        eta_a: count_window(h, &r.wa)? as u32,
        eta_b: count_window(h, &r.wb)? as u32,
        ..Default::default()
    };
    if let Some((cube, part)) = &r.lattice {
        let subs = build_subcube_hamiltonians(cube, part, &real.potential)?;
        if plan.subcubes {
            rec.sub_a = counts(&subs, &r.wa)?;
            rec.sub_b = counts(&subs, &r.wb)?;
            rec.zeta_a = Some(rec.sub_a.iter().sum());
            rec.zeta_b = Some(rec.sub_b.iter().sum());
            if let Some(u) = &r.union {
                rec.sub_union = counts(&subs, u)?;
            }
        }
        for w in &r.wegner {
            rec.length_global.push(count_window(h, w)? as u32);
            rec.length_sub.push(counts(&subs, w)?);
        }
    }
    if plan.points {
        let pts = extract_rescaled_points(h, config.energy, &config.window_a, r.volume, config.point_tolerance)?;
        rec.points = pts.points;
        rec.gaps = pts.gaps;
    }
    Ok(rec)
}

/// Samples every rung of the ladder. Trial `t` at rung `k` uses the derived
/// seed of global index `k · trials + t`, so rungs never share streams.
///
/// Trials failing with a numerical error are kept as excluded records; the
/// run fails when more than 0.1% of all trials are excluded.
pub fn collect_samples(config: &ExperimentConfig, plan: Plan) -> Result<Vec<EnsembleSample>> {
    if config.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(config.sides.len());
    for (k, &side) in config.sides.iter().enumerate() {
        let r = rung(config, side, plan)?;
        let base = (k * config.trials) as u64;
        let records = (0..config.trials as u64)
            .into_par_iter()
            .map(|t| {
                let seed = derive_trial_seed(config.seed, base + t);
                match run_trial(config, &r, plan, t, seed) {
                    Ok(rec) => Ok(rec),
                    Err(Error::Numerical { .. }) => Ok(TrialRecord {
                        trial: t,
                        seed,
                        excluded: true,
                        ..Default::default()
                    }),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(EnsembleSample { meta: r.meta, records });
    }
    check_exclusions(&out)?;
    Ok(out)
}

pub(crate) fn check_exclusions(samples: &[EnsembleSample]) -> Result<()> {
    let total: usize = samples.iter().map(|s| s.records.len()).sum();
    let excluded: usize = samples.iter().map(|s| s.records.iter().filter(|r| r.excluded).count()).sum();
    if excluded * 1000 > total {
        return Err(Error::Exclusions { excluded, total });
    }
    Ok(())
}

/// Stream tag separating pilot ensembles from the main run.
const PILOT_TAG: u64 = 0x5049_4c4f_545f_4e45;

/// Mean count in `energy + window/V` per unit of `|window|` over an
/// independent pilot ensemble, with its standard error. This estimates
/// `n(E)` in the units of the rescaled process.
pub fn pilot_intensity(config: &ExperimentConfig, side: usize, energy: f64, window: &Window) -> Result<(f64, f64)> {
    let trials = config.pilot_trials();
    if trials == 0 {
        return Err(Error::Config("pilot_trials must be at least 1".into()));
    }
    let model = config.model(side)?;
    let volume = config.volume_map.volume(&model.cube);
    let w = rescale_window(window, energy, volume)?;
    let master = mix64(config.seed ^ PILOT_TAG ^ energy.to_bits());
    let counts: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let real = model.realize(derive_trial_seed(master, t))?;
            Ok(count_window(&real.hamiltonian, &w)? as f64)
        })
        .collect::<Result<_>>()?;
    let (mean, var) = crate::numeric::mean_var(&counts);
    let len = window.length();
    Ok((mean / len, (var / trials as f64).sqrt() / len))
}
