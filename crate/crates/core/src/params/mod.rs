//! Physical parameters, time-dependent coefficients and the scenario record.
//!
//! Every rate is stored as a dimensionless multiple of a reference rate: the
//! exciton decay rate γ for the classical- and quantized-mirror models, the
//! mechanical frequency ω_m for the modulated-pump model. Time is measured in
//! the inverse of the same unit, so the reference rate is 1 internally.

mod presets;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::{IntegratorSettings, Method};
use crate::models::MeanFieldState;

pub use presets::{preset, preset_names, Preset, SweepAxis, PRESETS};

/// Which of the three coupled-mode systems a scenario integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Classical mirror motion: the cavity frequency is modulated directly.
    ClassicalMirror,
    /// Quantized mirror: the modulation enters through couplings multiplied by q.
    QuantizedMirror,
    /// Constant cavity frequency with an amplitude-modulated pump.
    ModulatedPump,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::ClassicalMirror => "ClassicalMirror",
            Variant::QuantizedMirror => "QuantizedMirror",
            Variant::ModulatedPump => "ModulatedPump",
        }
    }

    /// True when the mirror coordinates take part in the dynamics.
    pub fn has_mechanics(self) -> bool {
        !matches!(self, Variant::ClassicalMirror)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    MeanField,
    Moments,
    Ensemble,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::MeanField => "MeanField",
            Backend::Moments => "Moments",
            Backend::Ensemble => "Ensemble",
        }
    }
}

/// Form of the two-photon coefficient χ(t) used by the right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiForm {
    /// 2χ₀ cos(Ωt) with χ₀ = εΩ/8.
    #[default]
    Approx,
    /// (1/4ω_c(t)) dω_c/dt evaluated without expansion.
    Exact,
}

/// How the initial exciton amplitude is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialStyle {
    /// `Fock` for the moments backend, `Coherent` for the others.
    #[default]
    Auto,
    /// Coherent exciton amplitude ⟨b⟩ = b(0); ⟨b†b⟩ = |b(0)|².
    Coherent,
    /// Number-like exciton state: ⟨b⟩ = 0 and ⟨b†b⟩ = |b(0)|².
    Fock,
}

impl InitialStyle {
    pub fn resolve(self, backend: Backend) -> InitialStyle {
        match (self, backend) {
            (InitialStyle::Auto, Backend::Moments) => InitialStyle::Fock,
            (InitialStyle::Auto, _) => InitialStyle::Coherent,
            (style, _) => style,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ReferenceRate {
    #[default]
    #[serde(rename = "gamma")]
    Gamma,
    #[serde(rename = "omega_m")]
    OmegaM,
}

impl ReferenceRate {
    /// Axis label for scaled time.
    pub fn time_label(self) -> &'static str {
        match self {
            ReferenceRate::Gamma => "γt",
            ReferenceRate::OmegaM => "ω_m t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModelParams {
    /// Exciton frequency. Informational; only `delta_b` enters the dynamics.
    pub omega_b: f64,
    /// Unperturbed cavity frequency.
    pub omega_c: f64,
    /// Mechanical frequency.
    pub omega_m: f64,
    /// Pump frequency. Informational; only the detunings enter the dynamics.
    pub omega_p: f64,
    /// Exciton-pump detuning.
    pub delta_b: f64,
    /// Cavity-pump detuning Δ.
    pub delta_c: f64,
    pub g0: f64,
    /// Static optomechanical coupling (modulated-pump model).
    pub gm: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub gamma_m: f64,
    pub n_th: f64,
    pub eps_p: f64,
    pub reference_rate: ReferenceRate,
}

impl ModelParams {
    /// Strength γ_m(2n_th+1) of the delta-correlated Brownian force.
    pub fn thermal_noise_strength(&self) -> f64 {
        self.gamma_m * (2.0 * self.n_th + 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("omega_b", self.omega_b),
            ("omega_c", self.omega_c),
            ("omega_m", self.omega_m),
            ("omega_p", self.omega_p),
            ("delta_b", self.delta_b),
            ("delta_c", self.delta_c),
            ("g0", self.g0),
            ("gm", self.gm),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("gamma_m", self.gamma_m),
            ("n_th", self.n_th),
            ("eps_p", self.eps_p),
        ];
        for (key, value) in named {
            if !value.is_finite() {
                return Err(Error::invalid(key, "must be finite"));
            }
        }
        for (key, value) in [
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("gamma_m", self.gamma_m),
            ("n_th", self.n_th),
            ("eps_p", self.eps_p),
        ] {
            if value < 0.0 {
                return Err(Error::invalid(key, format!("{key} >= 0 required, got {value}")));
            }
        }
        if self.omega_m < 0.0 {
            return Err(Error::invalid("omega_m", "omega_m >= 0 required"));
        }
        Ok(())
    }
}

/// Modulation of the cavity frequency (ε, Ω) or of the pump amplitude (η, λ).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Modulation {
    pub epsilon: f64,
    pub omega: f64,
    pub eta: f64,
    pub lambda: f64,
}

impl Modulation {
    /// χ₀ = εΩ/8.
    pub fn chi0(&self) -> f64 {
        self.epsilon * self.omega / 8.0
    }

    pub fn validate(&self) -> Result<()> {
        for (key, value) in [
            ("epsilon", self.epsilon),
            ("Omega", self.omega),
            ("eta", self.eta),
            ("lambda", self.lambda),
        ] {
            if !value.is_finite() {
                return Err(Error::invalid(key, "must be finite"));
            }
        }
        if self.epsilon.abs() >= 1.0 {
            return Err(Error::invalid("epsilon", "|epsilon| < 1 required"));
        }
        if self.eta < 0.0 {
            return Err(Error::invalid("eta", "eta >= 0 required"));
        }
        Ok(())
    }
}

/// ω_c(1 + ε sin Ωt).
pub fn cavity_frequency(t: f64, params: &ModelParams, modulation: &Modulation) -> f64 {
    params.omega_c * (1.0 + modulation.epsilon * (modulation.omega * t).sin())
}

/// (1/4ω_c(t)) dω_c/dt = εΩ cos Ωt / (4(1 + ε sin Ωt)).
pub fn chi_exact(t: f64, _params: &ModelParams, modulation: &Modulation) -> f64 {
    let phase = modulation.omega * t;
    modulation.epsilon * modulation.omega * phase.cos()
        / (4.0 * (1.0 + modulation.epsilon * phase.sin()))
}

/// First-order form 2χ₀ cos Ωt.
pub fn chi_approx(t: f64, _params: &ModelParams, modulation: &Modulation) -> f64 {
    2.0 * modulation.chi0() * (modulation.omega * t).cos()
}

/// Radiation-pressure coupling g_m(t) = ω_c ε sin Ωt of the quantized-mirror model.
pub fn coupling_gm(t: f64, params: &ModelParams, modulation: &Modulation) -> f64 {
    params.omega_c * modulation.epsilon * (modulation.omega * t).sin()
}

/// Three-body coupling g(t) = g₀ ε sin(Ωt) / 2.
pub fn coupling_g(t: f64, params: &ModelParams, modulation: &Modulation) -> f64 {
    params.g0 * modulation.epsilon * (modulation.omega * t).sin() / 2.0
}

/// ε_p(1 + η cos λt) for the modulated-pump model, constant ε_p otherwise.
pub fn pump_amplitude(
    t: f64,
    variant: Variant,
    params: &ModelParams,
    modulation: &Modulation,
) -> f64 {
    match variant {
        Variant::ModulatedPump => {
            params.eps_p * (1.0 + modulation.eta * (modulation.lambda * t).cos())
        }
        _ => params.eps_p,
    }
}

/// Complete description of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub variant: Variant,
    pub params: ModelParams,
    pub modulation: Modulation,
    pub initial: MeanFieldState,
    pub initial_style: InitialStyle,
    pub backend: Backend,
    pub t_end: f64,
    pub sample_dt: f64,
    pub integrator: IntegratorSettings,
    pub seed: u64,
    pub n_traj: usize,
    pub chi_form: ChiForm,
    /// Adds symmetric-ordered vacuum noise on the optical and excitonic
    /// amplitudes in the stochastic backend.
    pub vacuum_noise: bool,
}

pub const DEFAULT_N_TRAJ: usize = 1024;
pub const DEFAULT_SAMPLE_DT: f64 = 0.01;
pub const DEFAULT_T_END: f64 = 50.0;

impl Scenario {
    /// Scenario with documented defaults: all rates zero, one coherent exciton,
    /// mean-field backend on the adaptive integrator.
    pub fn new(variant: Variant) -> Self {
        Scenario {
            variant,
            params: ModelParams {
                reference_rate: match variant {
                    Variant::ModulatedPump => ReferenceRate::OmegaM,
                    _ => ReferenceRate::Gamma,
                },
                ..ModelParams::default()
            },
            modulation: Modulation::default(),
            initial: MeanFieldState::single_exciton(),
            initial_style: InitialStyle::Auto,
            backend: Backend::MeanField,
            t_end: DEFAULT_T_END,
            sample_dt: DEFAULT_SAMPLE_DT,
            integrator: IntegratorSettings::default(),
            seed: 1,
            n_traj: DEFAULT_N_TRAJ,
            chi_form: ChiForm::Approx,
            vacuum_noise: false,
        }
    }

    /// χ(t) in the configured form.
    pub fn chi(&self, t: f64) -> f64 {
        match self.chi_form {
            ChiForm::Approx => chi_approx(t, &self.params, &self.modulation),
            ChiForm::Exact => chi_exact(t, &self.params, &self.modulation),
        }
    }

    pub fn pump(&self, t: f64) -> f64 {
        pump_amplitude(t, self.variant, &self.params, &self.modulation)
    }

    /// Period of the active modulation, if any.
    pub fn modulation_period(&self) -> Option<f64> {
        let freq = match self.variant {
            Variant::ModulatedPump => self.modulation.lambda,
            _ => self.modulation.omega,
        };
        (freq > 0.0).then(|| 2.0 * PI / freq)
    }

    /// Initial state as seen by the mean-field equations.
    pub fn mean_field_initial(&self) -> MeanFieldState {
        let mut s = self.initial;
        if self.initial_style.resolve(self.backend) == InitialStyle::Fock {
            s.b = num_complex::Complex64::new(0.0, 0.0);
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.modulation.validate()?;
        self.integrator.validate()?;
        let init = &self.initial;
        if ![init.a.re, init.a.im, init.b.re, init.b.im, init.q, init.p]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::invalid("initial", "initial state must be finite"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid("t_end", "t_end > 0 required"));
        }
        if !(self.sample_dt > 0.0 && self.sample_dt.is_finite()) {
            return Err(Error::invalid("sample_dt", "sample_dt > 0 required"));
        }
        match self.variant {
            Variant::ClassicalMirror | Variant::QuantizedMirror => {
                if self.modulation.eta != 0.0 {
                    return Err(Error::Inconsistent(format!(
                        "eta (pump modulation) must be 0 for the {} model",
                        self.variant.name()
                    )));
                }
            }
            Variant::ModulatedPump => {
                if self.modulation.epsilon != 0.0 {
                    return Err(Error::Inconsistent(
                        "epsilon (cavity-frequency modulation) must be 0 for the ModulatedPump model"
                            .into(),
                    ));
                }
            }
        }
        match self.backend {
            Backend::Moments if self.variant != Variant::ClassicalMirror => {
                return Err(Error::Inconsistent(format!(
                    "Moments backend requires variant ClassicalMirror, got {}",
                    self.variant.name()
                )));
            }
            Backend::Ensemble => {
                if self.n_traj < 1 {
                    return Err(Error::invalid("n_traj", "n_traj >= 1 required"));
                }
                if self.integrator.method != Method::EulerMaruyama {
                    return Err(Error::Inconsistent(
                        "Ensemble backend requires method EulerMaruyama".into(),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn base() -> (ModelParams, Modulation) {
        let p = ModelParams {
            omega_c: 1.36,
            g0: 5.0,
            eps_p: 1.5,
            ..ModelParams::default()
        };
        let m = Modulation {
            epsilon: 0.1,
            omega: 1.36,
            eta: 0.1,
            lambda: 1.0,
        };
        (p, m)
    }

    #[test]
    fn cavity_frequency_examples() {
        let (p, m) = base();
        assert_eq!(cavity_frequency(0.0, &p, &m), 1.36);
        let t = FRAC_PI_2 / m.omega;
        assert!((cavity_frequency(t, &p, &m) - 1.496).abs() < 1e-12);
        let flat = Modulation { epsilon: 0.0, ..m };
        assert_eq!(cavity_frequency(3.7, &p, &flat), 1.36);
    }

    #[test]
    fn chi_examples() {
        let (p, m) = base();
        assert!((m.chi0() - 0.017).abs() < 1e-15);
        assert!((chi_exact(0.0, &p, &m) - 0.034).abs() < 1e-15);
        assert!((chi_approx(0.0, &p, &m) - 0.034).abs() < 1e-15);
        let t = FRAC_PI_2 / m.omega;
        assert!(chi_exact(t, &p, &m).abs() < 1e-15);
        let flat = Modulation { epsilon: 0.0, ..m };
        for t in [0.0, 0.3, 2.0] {
            assert_eq!(chi_exact(t, &p, &flat), 0.0);
            assert_eq!(chi_approx(t, &p, &flat), 0.0);
        }
    }

    #[test]
    fn coupling_examples() {
        let (p, m) = base();
        let t = FRAC_PI_2 / m.omega;
        assert!((coupling_gm(t, &p, &m) - 0.136).abs() < 1e-12);
        assert_eq!(coupling_gm(0.0, &p, &m), 0.0);
        let m2 = Modulation { epsilon: 0.2, ..m };
        assert!((coupling_gm(t, &p, &m2) - 0.272).abs() < 1e-12);
        assert!((coupling_g(t, &p, &m) - 0.25).abs() < 1e-12);
        assert_eq!(coupling_g(0.0, &p, &m), 0.0);
        let uncoupled = ModelParams { g0: 0.0, ..p };
        assert_eq!(coupling_g(t, &uncoupled, &m), 0.0);
    }

    #[test]
    fn pump_examples() {
        let (p, m) = base();
        let v = Variant::ModulatedPump;
        assert!((pump_amplitude(0.0, v, &p, &m) - 1.65).abs() < 1e-12);
        let flat = Modulation { eta: 0.0, ..m };
        assert_eq!(pump_amplitude(2.3, v, &p, &flat), 1.5);
        let strong = Modulation { eta: 0.4, ..m };
        let t = PI / strong.lambda;
        assert!((pump_amplitude(t, v, &p, &strong) - 0.9).abs() < 1e-12);
        assert_eq!(pump_amplitude(0.0, Variant::ClassicalMirror, &p, &m), 1.5);
    }

    #[test]
    fn chi_approx_has_zero_mean_over_a_period() {
        let (p, m) = base();
        let period = 2.0 * PI / m.omega;
        let n = 4096;
        // periodic trapezoid rule is spectrally accurate here
        let sum: f64 = (0..n)
            .map(|k| chi_approx(k as f64 * period / n as f64, &p, &m))
            .sum::<f64>()
            * period
            / n as f64;
        assert!(sum.abs() < 1e-15 * n as f64);
    }

    #[test]
    fn validation_rejects_mixed_modulation() {
        let mut s = Scenario::new(Variant::ClassicalMirror);
        s.modulation.eta = 0.1;
        assert!(matches!(s.validate(), Err(Error::Inconsistent(_))));
        let mut s = Scenario::new(Variant::ModulatedPump);
        s.modulation.epsilon = 0.1;
        assert!(matches!(s.validate(), Err(Error::Inconsistent(_))));
        // Ω is ignored for the pump model
        let mut s = Scenario::new(Variant::ModulatedPump);
        s.modulation.omega = 3.0;
        assert!(s.validate().is_ok());
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut s = Scenario::new(Variant::ClassicalMirror);
        s.params.kappa = -1.0;
        match s.validate() {
            Err(Error::InvalidValue { key, .. }) => assert_eq!(key, "kappa"),
            other => panic!("unexpected {other:?}"),
        }
        let mut s = Scenario::new(Variant::ClassicalMirror);
        s.modulation.epsilon = 1.0;
        assert!(s.validate().is_err());
        let mut s = Scenario::new(Variant::QuantizedMirror);
        s.backend = Backend::Moments;
        assert!(matches!(s.validate(), Err(Error::Inconsistent(_))));
        let mut s = Scenario::new(Variant::ClassicalMirror);
        s.t_end = 0.0;
        assert!(s.validate().is_err());
    }
}
