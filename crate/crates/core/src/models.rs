//! Right-hand sides of the three coupled-mode systems.
//!
//! All equations are written in the frame rotating at the pump frequency.
//! Operator products are factorized into products of expectation values
//! (⟨aq⟩ → ⟨a⟩⟨q⟩) and zero-mean input noises are dropped; the stochastic
//! backend adds the Brownian force separately.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrators::Dynamics;
use crate::params::{coupling_g, coupling_gm, Scenario, Variant};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Number of real components in a packed [`MeanFieldState`].
pub const MEAN_FIELD_DIM: usize = 6;

/// Relative tolerance on the imaginary part of the mechanical force.
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeanFieldState {
    pub a: Complex64,
    pub b: Complex64,
    pub q: f64,
    pub p: f64,
}

impl MeanFieldState {
    /// Empty cavity, one coherent exciton, mirror at rest.
    pub fn single_exciton() -> Self {
        MeanFieldState {
            b: Complex64::new(1.0, 0.0),
            ..Default::default()
        }
    }

    pub fn to_array(&self) -> [f64; MEAN_FIELD_DIM] {
        [self.a.re, self.a.im, self.b.re, self.b.im, self.q, self.p]
    }

    pub fn from_slice(y: &[f64]) -> Self {
        MeanFieldState {
            a: Complex64::new(y[0], y[1]),
            b: Complex64::new(y[2], y[3]),
            q: y[4],
            p: y[5],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Derivative {
    pub da: Complex64,
    pub db: Complex64,
    pub dq: f64,
    pub dp: f64,
}

impl Derivative {
    pub fn write_to(&self, dy: &mut [f64]) {
        dy[0] = self.da.re;
        dy[1] = self.da.im;
        dy[2] = self.db.re;
        dy[3] = self.db.im;
        dy[4] = self.dq;
        dy[5] = self.dp;
    }

    pub fn is_finite(&self) -> bool {
        [self.da.re, self.da.im, self.db.re, self.db.im, self.dq, self.dp]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Classical mirror: modulated cavity frequency and two-photon term 2χ(t)a†.
pub fn rhs_model1(t: f64, state: &MeanFieldState, scenario: &Scenario) -> Derivative {
    let pr = &scenario.params;
    let m = &scenario.modulation;
    let (a, b) = (state.a, state.b);
    let shift = pr.omega_c * m.epsilon * (m.omega * t).sin();
    let chi = scenario.chi(t);
    let da = -I * (pr.delta_c + shift) * a - I * pr.g0 * b + 2.0 * chi * a.conj()
        + scenario.pump(t)
        - pr.kappa * a;
    let db = -I * pr.delta_b * b - I * pr.g0 * a - pr.gamma * b;
    Derivative {
        da,
        db,
        dq: 0.0,
        dp: 0.0,
    }
}

/// Quantized mirror: every modulated coupling is multiplied by the mirror position.
///
/// The mechanical force is evaluated with complex arithmetic and checked to be
/// real before its real part is returned.
pub fn rhs_model2(t: f64, state: &MeanFieldState, scenario: &Scenario) -> Result<Derivative> {
    let pr = &scenario.params;
    let m = &scenario.modulation;
    let (a, b, q, p) = (state.a, state.b, state.q, state.p);
    let gm_t = coupling_gm(t, pr, m);
    let g_t = coupling_g(t, pr, m);
    let chi = scenario.chi(t);

    let db = -I * pr.delta_b * b - I * pr.g0 * a - I * g_t * a * q - pr.gamma * b;
    let da = -I * pr.delta_c * a - I * gm_t * a * q - I * pr.g0 * b - I * g_t * b * q
        + 2.0 * chi * a.conj() * q
        + scenario.pump(t)
        - pr.kappa * a;
    let dq = pr.omega_m * p;
    // -∂H/∂q; the exchange term enters without a factor i (see README)
    let force: Complex64 = -pr.omega_m * q - gm_t * a.norm_sqr()
        - g_t * (a.conj() * b + b.conj() * a)
        - I * chi * (a.conj() * a.conj() - a * a)
        - pr.gamma_m * p;
    if force.im.abs() > HERMITIAN_TOL * force.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::NonHermitian { t, imag: force.im });
    }
    Ok(Derivative {
        da,
        db,
        dq,
        dp: force.re,
    })
}

/// Constant cavity frequency, static optomechanical coupling, modulated pump.
pub fn rhs_model3(t: f64, state: &MeanFieldState, scenario: &Scenario) -> Derivative {
    let pr = &scenario.params;
    let (a, b, q, p) = (state.a, state.b, state.q, state.p);
    let db = -I * pr.delta_b * b - I * pr.g0 * a - pr.gamma * b;
    let da = -I * pr.delta_c * a - I * pr.gm * a * q - I * pr.g0 * b + scenario.pump(t)
        - pr.kappa * a;
    Derivative {
        da,
        db,
        dq: pr.omega_m * p,
        dp: -pr.omega_m * q - pr.gm * a.norm_sqr() - pr.gamma_m * p,
    }
}

/// Dispatches on the scenario variant.
pub fn rhs(t: f64, state: &MeanFieldState, scenario: &Scenario) -> Result<Derivative> {
    match scenario.variant {
        Variant::ClassicalMirror => Ok(rhs_model1(t, state, scenario)),
        Variant::QuantizedMirror => rhs_model2(t, state, scenario),
        Variant::ModulatedPump => Ok(rhs_model3(t, state, scenario)),
    }
}

/// Mean-field equations of a scenario as an integrable system.
pub struct MeanFieldSystem<'a> {
    pub scenario: &'a Scenario,
}

impl Dynamics for MeanFieldSystem<'_> {
    fn dim(&self) -> usize {
        MEAN_FIELD_DIM
    }

    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let d = rhs(t, &MeanFieldState::from_slice(y), self.scenario)?;
        d.write_to(dy);
        Ok(())
    }
}

pub type Matrix4 = [[Complex64; 4]; 4];
pub type Vector4 = [Complex64; 4];

/// Operator ordering of [`LinearSystem`] rows and columns: (a, b, a†, b†).
pub const IDX_A: usize = 0;
pub const IDX_B: usize = 1;
pub const IDX_A_DAG: usize = 2;
pub const IDX_B_DAG: usize = 3;

/// dX = (A(t) X + c(t)) dt + noise for X = (a, b, a†, b†).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSystem {
    pub drift: Matrix4,
    pub drive: Vector4,
    /// Input correlations ⟨ξ_i ξ_j⟩ in the (i, j) slots; vacuum inputs only
    /// populate ⟨a_in a_in†⟩ and ⟨b_in b_in†⟩.
    pub diffusion: Matrix4,
}

impl LinearSystem {
    /// Index of the Hermitian partner under a ↔ a†, b ↔ b†.
    pub fn partner(i: usize) -> usize {
        (i + 2) % 4
    }

    /// Checks that rows for daggered operators are the conjugates of the
    /// undaggered rows with indices swapped.
    pub fn is_conjugation_symmetric(&self, tol: f64) -> bool {
        (0..4).all(|i| {
            let pi = Self::partner(i);
            (self.drive[pi] - self.drive[i].conj()).norm() <= tol
                && (0..4).all(|j| {
                    let pj = Self::partner(j);
                    (self.drift[pi][pj] - self.drift[i][j].conj()).norm() <= tol
                })
        })
    }
}

pub fn linear_system_model1(t: f64, scenario: &Scenario) -> Result<LinearSystem> {
    if scenario.variant != Variant::ClassicalMirror {
        return Err(Error::UnsupportedModel {
            operation: "linear_system_model1",
            variant: scenario.variant.name(),
        });
    }
    let pr = &scenario.params;
    let m = &scenario.modulation;
    let zero = Complex64::new(0.0, 0.0);
    let shift = pr.omega_c * m.epsilon * (m.omega * t).sin();
    let two_chi = Complex64::new(2.0 * scenario.chi(t), 0.0);
    let a_diag = -I * (pr.delta_c + shift) - pr.kappa;
    let b_diag = -I * pr.delta_b - pr.gamma;
    let g = -I * pr.g0;

    let mut drift = [[zero; 4]; 4];
    drift[IDX_A][IDX_A] = a_diag;
    drift[IDX_A][IDX_B] = g;
    drift[IDX_A][IDX_A_DAG] = two_chi;
    drift[IDX_B][IDX_B] = b_diag;
    drift[IDX_B][IDX_A] = g;
    for i in [IDX_A, IDX_B] {
        for j in 0..4 {
            drift[LinearSystem::partner(i)][LinearSystem::partner(j)] = drift[i][j].conj();
        }
    }

    let pump = Complex64::new(scenario.pump(t), 0.0);
    let drive = [pump, zero, pump, zero];

    let mut diffusion = [[zero; 4]; 4];
    diffusion[IDX_A][IDX_A_DAG] = Complex64::new(2.0 * pr.kappa, 0.0);
    diffusion[IDX_B][IDX_B_DAG] = Complex64::new(2.0 * pr.gamma, 0.0);

    Ok(LinearSystem {
        drift,
        drive,
        diffusion,
    })
}
