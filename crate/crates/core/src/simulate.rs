//! Dispatch from a scenario to the configured backend.

use crate::ensemble::{run_ensemble, run_ensemble_with_workers, EnsembleResult};
use crate::error::Result;
use crate::integrators::integrate;
use crate::models::MeanFieldSystem;
use crate::moments::propagate_moments;
use crate::observables::{energy_balance_residual, Estimator, TimeSeries};
use crate::params::{Backend, Scenario, Variant};

#[derive(Debug, Clone, PartialEq)]
pub enum RunOutput {
    Deterministic(TimeSeries),
    Ensemble(EnsembleResult),
}

impl RunOutput {
    /// The mean-value series of either kind of run.
    pub fn series(&self) -> &TimeSeries {
        match self {
            RunOutput::Deterministic(s) => s,
            RunOutput::Ensemble(e) => &e.mean,
        }
    }
}

/// Integrates the mean-field equations of any variant.
pub fn run_mean_field(scenario: &Scenario) -> Result<TimeSeries> {
    let sys = MeanFieldSystem { scenario };
    let y0 = scenario.mean_field_initial().to_array();
    let traj = integrate(
        &sys,
        &y0,
        scenario.t_end,
        scenario.sample_dt,
        &scenario.integrator,
    )?;
    let mut s = TimeSeries::from_mean_field(&traj, Backend::MeanField, Estimator::MeanFieldIntensity);
    if scenario.variant == Variant::ClassicalMirror && s.len() >= 3 {
        s.residual = energy_balance_residual(&s, scenario)?;
    }
    Ok(s)
}

/// Validates the scenario and runs its backend. `workers` only affects the
/// ensemble backend and never its results.
pub fn run(scenario: &Scenario, workers: Option<usize>) -> Result<RunOutput> {
    scenario.validate()?;
    Ok(match scenario.backend {
        Backend::MeanField => RunOutput::Deterministic(run_mean_field(scenario)?),
        Backend::Moments => RunOutput::Deterministic(propagate_moments(scenario)?),
        Backend::Ensemble => RunOutput::Ensemble(match workers {
            Some(w) => run_ensemble_with_workers(scenario, w)?,
            None => run_ensemble(scenario)?,
        }),
    })
}
