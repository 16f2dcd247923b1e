//! Closed first- and second-moment equations for the classical-mirror model.
//!
//! The model is linear in (a, b, a†, b†), so the means and the normally
//! ordered second moments N_ij = ⟨:X_i X_j:⟩ close exactly. No truncation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrators::{integrate, Dynamics};
use crate::models::{
    linear_system_model1, LinearSystem, MeanFieldState, Matrix4, Vector4, IDX_A, IDX_A_DAG,
    IDX_B, IDX_B_DAG,
};
use crate::observables::{energy_balance_residual, Estimator, TimeSeries};
use crate::params::{Backend, InitialStyle, Scenario, Variant};

/// Number of reals in a packed [`MomentState`]: 4 complex means and 16
/// complex second moments.
pub const MOMENT_DIM: usize = 40;

/// Occupations below this are treated as round-off and clamped to zero.
pub const NEGATIVE_OCCUPATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    /// ⟨X_i⟩ for X = (a, b, a†, b†).
    pub mu: Vector4,
    /// Normally ordered ⟨:X_i X_j:⟩; symmetric in (i, j).
    pub n: Matrix4,
}

/// True when X_i annihilates and X_j creates in the same mode, i.e. the
/// literal product X_i X_j is anti-normally ordered.
fn commutator(i: usize, j: usize) -> f64 {
    if (i == IDX_A && j == IDX_A_DAG) || (i == IDX_B && j == IDX_B_DAG) {
        1.0
    } else {
        0.0
    }
}

impl MomentState {
    /// Initial moments: the cavity in the coherent state `a`, the exciton in
    /// a coherent state or in the Fock state with ⟨b†b⟩ = |b|². `Auto`
    /// means Fock here.
    pub fn initial(state: &MeanFieldState, style: InitialStyle) -> Self {
        let style = style.resolve(Backend::Moments);
        let (a, b) = (state.a, state.b);
        let mean_b = match style {
            InitialStyle::Fock => Complex64::new(0.0, 0.0),
            _ => b,
        };
        let mu = [a, mean_b, a.conj(), mean_b.conj()];
        let mut n = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                n[i][j] = mu[i] * mu[j];
            }
        }
        if style == InitialStyle::Fock {
            let occ = Complex64::new(b.norm_sqr(), 0.0);
            n[IDX_B][IDX_B_DAG] = occ;
            n[IDX_B_DAG][IDX_B] = occ;
        }
        MomentState { mu, n }
    }

    pub fn pack(&self, out: &mut [f64]) {
        for i in 0..4 {
            out[2 * i] = self.mu[i].re;
            out[2 * i + 1] = self.mu[i].im;
        }
        for i in 0..4 {
            for j in 0..4 {
                let k = 8 + 2 * (4 * i + j);
                out[k] = self.n[i][j].re;
                out[k + 1] = self.n[i][j].im;
            }
        }
    }

    pub fn unpack(y: &[f64]) -> Self {
        let c = |k: usize| Complex64::new(y[k], y[k + 1]);
        let mut mu = [Complex64::new(0.0, 0.0); 4];
        let mut n = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            mu[i] = c(2 * i);
            for j in 0..4 {
                n[i][j] = c(8 + 2 * (4 * i + j));
            }
        }
        MomentState { mu, n }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![0.0; MOMENT_DIM];
        self.pack(&mut v);
        v
    }

    /// ⟨a†a⟩, possibly slightly negative or complex from round-off.
    pub fn raw_photon_number(&self) -> Complex64 {
        self.n[IDX_A_DAG][IDX_A]
    }

    pub fn raw_exciton_number(&self) -> Complex64 {
        self.n[IDX_B_DAG][IDX_B]
    }

    /// ⟨a²⟩.
    pub fn pair_amplitude(&self) -> Complex64 {
        self.n[IDX_A][IDX_A]
    }

    /// Largest violation of ⟨X†⟩ = ⟨X⟩*, N symmetry and Hermiticity of the
    /// occupations.
    pub fn invariant_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            let pi = LinearSystem::partner(i);
            worst = worst.max((self.mu[pi] - self.mu[i].conj()).norm());
            for j in 0..4 {
                let pj = LinearSystem::partner(j);
                worst = worst.max((self.n[i][j] - self.n[j][i]).norm());
                worst = worst.max((self.n[pi][pj] - self.n[i][j].conj()).norm());
            }
        }
        worst
            .max(self.raw_photon_number().im.abs())
            .max(self.raw_exciton_number().im.abs())
    }
}

fn clamp_occupation(quantity: &'static str, raw: Complex64) -> Result<f64> {
    let v = raw.re;
    if v < -NEGATIVE_OCCUPATION_TOL || !v.is_finite() {
        return Err(Error::Physicality {
            quantity,
            value: v,
            t: f64::NAN,
        });
    }
    Ok(v.max(0.0))
}

/// ⟨a†a⟩. Values within round-off below zero are clamped to zero; larger
/// negative values are a physicality error.
pub fn photon_number(ms: &MomentState) -> Result<f64> {
    clamp_occupation("photon number", ms.raw_photon_number())
}

/// ⟨b†b⟩, with the same clamping rule as [`photon_number`].
pub fn exciton_number(ms: &MomentState) -> Result<f64> {
    clamp_occupation("exciton number", ms.raw_exciton_number())
}

/// Right-hand side of the moment equations for the linear system
/// dX = (A X + c) dt + dW with ⟨dW_i dW_j⟩ = D_ij dt:
///
/// dN_ij/dt = Σ_k (A_ik N_kj + A_jk N_ik) + c_i μ_j + c_j μ_i
///          + Σ_k (A_jk [X_i, X_k] + A_ik [X_k, X_j]) + D_ij
///
/// The commutator terms convert literal products back to normal order; for
/// anti-normally ordered (i, j) they cancel against the vacuum diffusion.
pub fn moment_derivative(ls: &LinearSystem, ms: &MomentState) -> MomentState {
    let a = &ls.drift;
    let c = &ls.drive;
    let zero = Complex64::new(0.0, 0.0);
    let mut dmu = [zero; 4];
    for i in 0..4 {
        dmu[i] = c[i] + (0..4).map(|k| a[i][k] * ms.mu[k]).sum::<Complex64>();
    }
    let mut dn = [[zero; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = c[i] * ms.mu[j] + c[j] * ms.mu[i] + ls.diffusion[i][j];
            for k in 0..4 {
                s += a[i][k] * ms.n[k][j] + a[j][k] * ms.n[i][k];
                s += a[j][k] * commutator(i, k) + a[i][k] * commutator(k, j);
            }
            dn[i][j] = s;
        }
    }
    MomentState { mu: dmu, n: dn }
}

pub struct MomentSystem<'a> {
    pub scenario: &'a Scenario,
}

impl Dynamics for MomentSystem<'_> {
    fn dim(&self) -> usize {
        MOMENT_DIM
    }

    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let ls = linear_system_model1(t, self.scenario)?;
        moment_derivative(&ls, &MomentState::unpack(y)).pack(dy);
        Ok(())
    }
}

/// Integrates the moment equations and returns ⟨a⟩, ⟨b⟩, ⟨a†a⟩ and ⟨b†b⟩
/// on the sample grid, with the energy-balance residual filled in.
pub fn propagate_moments(scenario: &Scenario) -> Result<TimeSeries> {
    if scenario.variant != Variant::ClassicalMirror {
        return Err(Error::UnsupportedModel {
            operation: "propagate_moments",
            variant: scenario.variant.name(),
        });
    }
    let y0 = MomentState::initial(&scenario.initial, scenario.initial_style).to_vec();
    let sys = MomentSystem { scenario };
    let traj = integrate(
        &sys,
        &y0,
        scenario.t_end,
        scenario.sample_dt,
        &scenario.integrator,
    )?;
    let mut s = TimeSeries::with_capacity(traj.len(), Backend::Moments, Estimator::SecondMoment);
    for k in 0..traj.len() {
        let t = traj.t[k];
        let ms = MomentState::unpack(traj.state(k));
        let at = |e: Error| match e {
            Error::Physicality { quantity, value, .. } => Error::Physicality { quantity, value, t },
            other => other,
        };
        let photons = photon_number(&ms).map_err(at)?;
        let excitons = exciton_number(&ms).map_err(at)?;
        let st = MeanFieldState {
            a: ms.mu[IDX_A],
            b: ms.mu[IDX_B],
            q: scenario.initial.q,
            p: scenario.initial.p,
        };
        s.push(t, &st, photons, excitons, ms.pair_amplitude().re);
    }
    s.steps = traj.steps;
    s.rejected = traj.rejected;
    if s.len() >= 3 {
        s.residual = energy_balance_residual(&s, scenario)?;
    }
    Ok(s)
}
