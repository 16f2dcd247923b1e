//! Stochastic trajectories with thermal (and optionally vacuum) noise and
//! their ensemble statistics.
//!
//! Trajectory `i` draws from a ChaCha8 stream selected by `i` under the root
//! seed, and statistics are merged over a fixed binary tree on the index
//! range. Results are therefore bit-identical for any worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::integrators::{integrate_with_noise, Noise};
use crate::models::{MeanFieldSystem, MEAN_FIELD_DIM};
use crate::observables::{energy_balance_residual, Estimator, TimeSeries};
use crate::params::{Backend, Scenario, Variant};

/// Standard deviations of the per-step Wiener increments for the packed
/// state (re a, im a, re b, im b, q, p).
pub fn noise_amplitudes(scenario: &Scenario) -> [f64; MEAN_FIELD_DIM] {
    let pr = &scenario.params;
    let mut amp = [0.0; MEAN_FIELD_DIM];
    if scenario.vacuum_noise {
        let (sa, sb) = ((pr.kappa / 2.0).sqrt(), (pr.gamma / 2.0).sqrt());
        amp[..4].copy_from_slice(&[sa, sa, sb, sb]);
    }
    if scenario.variant.has_mechanics() {
        amp[5] = pr.thermal_noise_strength().sqrt();
    }
    amp
}

/// Random stream for trajectory `index` under the scenario's root seed.
pub fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// One Euler–Maruyama trajectory. The same (scenario, index) always yields
/// the same samples.
pub fn run_trajectory(scenario: &Scenario, index: usize) -> Result<TimeSeries> {
    let amplitudes = noise_amplitudes(scenario);
    let mut rng = trajectory_rng(scenario.seed, index);
    let sys = MeanFieldSystem { scenario };
    let y0 = scenario.mean_field_initial().to_array();
    let traj = integrate_with_noise(
        &sys,
        &y0,
        scenario.t_end,
        scenario.sample_dt,
        &scenario.integrator,
        Some(Noise {
            amplitudes: &amplitudes,
            rng: &mut rng,
        }),
    )
    .map_err(|e| Error::Trajectory {
        index,
        source: Box::new(e),
    })?;
    Ok(TimeSeries::from_mean_field(
        &traj,
        Backend::Ensemble,
        Estimator::EnsembleIntensity,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub mean: TimeSeries,
    /// Standard error of the mean per channel and sample; zero for a single
    /// trajectory.
    pub stderr: TimeSeries,
    pub n_traj: usize,
    pub seed: u64,
}

const STAT_CHANNELS: usize = 9;

/// Running count, mean and sum of squared deviations (Chan et al. merge).
struct Accumulator {
    t: Vec<f64>,
    steps: usize,
    count: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Accumulator {
    fn leaf(s: TimeSeries) -> Self {
        let samples = s.len();
        let mut mean = Vec::with_capacity(STAT_CHANNELS * samples);
        for ch in [
            &s.re_a, &s.im_a, &s.re_b, &s.im_b, &s.q, &s.p, &s.photons, &s.excitons, &s.pair_re,
        ] {
            mean.extend_from_slice(ch);
        }
        Accumulator {
            m2: vec![0.0; mean.len()],
            mean,
            t: s.t,
            steps: s.steps,
            count: 1.0,
        }
    }

    fn merge(mut self, other: Accumulator) -> Self {
        let n = self.count + other.count;
        let (wa, wb) = (self.count, other.count);
        for k in 0..self.mean.len() {
            let delta = other.mean[k] - self.mean[k];
            self.mean[k] += delta * wb / n;
            self.m2[k] += other.m2[k] + delta * delta * wa * wb / n;
        }
        self.count = n;
        self
    }

    fn series(&self, stderr: bool) -> TimeSeries {
        let samples = self.t.len();
        let n = self.count;
        let value = |k: usize| {
            if !stderr {
                self.mean[k]
            } else if n > 1.0 {
                (self.m2[k] / (n - 1.0)).sqrt() / n.sqrt()
            } else {
                0.0
            }
        };
        let column = |c: usize| (0..samples).map(|j| value(c * samples + j)).collect();
        TimeSeries {
            t: self.t.clone(),
            re_a: column(0),
            im_a: column(1),
            re_b: column(2),
            im_b: column(3),
            q: column(4),
            p: column(5),
            photons: column(6),
            excitons: column(7),
            pair_re: column(8),
            residual: vec![f64::NAN; samples],
            backend: Backend::Ensemble,
            estimator: Estimator::EnsembleIntensity,
            steps: self.steps,
            rejected: 0,
        }
    }
}

fn accumulate(scenario: &Scenario, lo: usize, hi: usize) -> Result<Accumulator> {
    if hi - lo == 1 {
        return run_trajectory(scenario, lo).map(Accumulator::leaf);
    }
    let mid = lo + (hi - lo) / 2;
    let (left, right) = rayon::join(
        || accumulate(scenario, lo, mid),
        || accumulate(scenario, mid, hi),
    );
    Ok(left?.merge(right?))
}

/// Runs `scenario.n_traj` trajectories on the global thread pool.
pub fn run_ensemble(scenario: &Scenario) -> Result<EnsembleResult> {
    scenario.validate()?;
    let acc = accumulate(scenario, 0, scenario.n_traj)?;
    Ok(finish(scenario, acc))
}

/// Runs the ensemble on a dedicated pool with `workers` threads.
pub fn run_ensemble_with_workers(scenario: &Scenario, workers: usize) -> Result<EnsembleResult> {
    scenario.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    let acc = pool.install(|| accumulate(scenario, 0, scenario.n_traj))?;
    Ok(finish(scenario, acc))
}

fn finish(scenario: &Scenario, acc: Accumulator) -> EnsembleResult {
    let mut mean = acc.series(false);
    if scenario.variant == Variant::ClassicalMirror && !scenario.vacuum_noise && mean.len() >= 3 {
        if let Ok(r) = energy_balance_residual(&mean, scenario) {
            mean.residual = r;
        }
    }
    EnsembleResult {
        mean,
        stderr: acc.series(true),
        n_traj: scenario.n_traj,
        seed: scenario.seed,
    }
}
