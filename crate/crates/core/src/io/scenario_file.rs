//! Flat TOML scenario files.
//!
//! Every key is optional; missing keys take the defaults of
//! [`Scenario::new`] for the chosen variant.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::{IntegratorSettings, Method};
use crate::models::MeanFieldState;
use crate::params::{Backend, ChiForm, InitialStyle, ReferenceRate, Scenario, Variant};

/// Keys accepted in a scenario file.
pub const SCENARIO_KEYS: [&str; 39] = [
    "variant",
    "backend",
    "omega_b",
    "omega_c",
    "omega_m",
    "omega_p",
    "delta_b",
    "delta_c",
    "g0",
    "gm",
    "kappa",
    "gamma",
    "gamma_m",
    "n_th",
    "eps_p",
    "reference_rate_label",
    "epsilon",
    "Omega",
    "eta",
    "lambda",
    "a_re",
    "a_im",
    "b_re",
    "b_im",
    "q",
    "p",
    "initial_style",
    "t_end",
    "sample_dt",
    "method",
    "h",
    "rel_tol",
    "abs_tol",
    "h_min",
    "h_max",
    "seed",
    "n_traj",
    "chi",
    "vacuum_noise",
];

/// Seeds above `i64::MAX` do not fit a TOML integer and are written as strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum SeedRepr {
    Int(i64),
    Text(String),
}

impl SeedRepr {
    fn from_u64(seed: u64) -> Self {
        i64::try_from(seed)
            .map(SeedRepr::Int)
            .unwrap_or_else(|_| SeedRepr::Text(seed.to_string()))
    }

    fn to_u64(&self) -> Result<u64> {
        match self {
            SeedRepr::Int(v) => {
                u64::try_from(*v).map_err(|_| Error::invalid("seed", "seed >= 0 required"))
            }
            SeedRepr::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::invalid("seed", "unsigned 64-bit integer required")),
        }
    }
}

/// One-to-one image of a scenario file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend: Option<Backend>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_th: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_rate_label: Option<ReferenceRate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(rename = "Omega", skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_style: Option<InitialStyle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<SeedRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_traj: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<ChiForm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vacuum_noise: Option<bool>,
}

impl ScenarioFile {
    /// Every key filled from `scenario`.
    pub fn from_scenario(s: &Scenario) -> Self {
        let pr = &s.params;
        let m = &s.modulation;
        let it = &s.integrator;
        ScenarioFile {
            variant: Some(s.variant),
            backend: Some(s.backend),
            omega_b: Some(pr.omega_b),
            omega_c: Some(pr.omega_c),
            omega_m: Some(pr.omega_m),
            omega_p: Some(pr.omega_p),
            delta_b: Some(pr.delta_b),
            delta_c: Some(pr.delta_c),
            g0: Some(pr.g0),
            gm: Some(pr.gm),
            kappa: Some(pr.kappa),
            gamma: Some(pr.gamma),
            gamma_m: Some(pr.gamma_m),
            n_th: Some(pr.n_th),
            eps_p: Some(pr.eps_p),
            reference_rate_label: Some(pr.reference_rate),
            epsilon: Some(m.epsilon),
            omega: Some(m.omega),
            eta: Some(m.eta),
            lambda: Some(m.lambda),
            a_re: Some(s.initial.a.re),
            a_im: Some(s.initial.a.im),
            b_re: Some(s.initial.b.re),
            b_im: Some(s.initial.b.im),
            q: Some(s.initial.q),
            p: Some(s.initial.p),
            initial_style: Some(s.initial_style),
            t_end: Some(s.t_end),
            sample_dt: Some(s.sample_dt),
            method: Some(it.method),
            h: Some(it.h),
            rel_tol: Some(it.rel_tol),
            abs_tol: Some(it.abs_tol),
            h_min: Some(it.h_min),
            h_max: Some(it.h_max),
            seed: Some(SeedRepr::from_u64(s.seed)),
            n_traj: Some(s.n_traj as u64),
            chi: Some(s.chi_form),
            vacuum_noise: Some(s.vacuum_noise),
        }
    }

    /// Applies the present keys on top of the variant defaults. Does not
    /// validate.
    pub fn to_scenario(&self) -> Result<Scenario> {
        let variant = self.variant.unwrap_or(Variant::ClassicalMirror);
        let mut s = Scenario::new(variant);
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        if let Some(b) = self.backend {
            s.backend = b;
        }
        let pr = &mut s.params;
        set(&mut pr.omega_b, self.omega_b);
        set(&mut pr.omega_c, self.omega_c);
        set(&mut pr.omega_m, self.omega_m);
        set(&mut pr.omega_p, self.omega_p);
        set(&mut pr.delta_b, self.delta_b);
        set(&mut pr.delta_c, self.delta_c);
        set(&mut pr.g0, self.g0);
        set(&mut pr.gm, self.gm);
        set(&mut pr.kappa, self.kappa);
        set(&mut pr.gamma, self.gamma);
        set(&mut pr.gamma_m, self.gamma_m);
        set(&mut pr.n_th, self.n_th);
        set(&mut pr.eps_p, self.eps_p);
        if let Some(r) = self.reference_rate_label {
            pr.reference_rate = r;
        }
        let m = &mut s.modulation;
        set(&mut m.epsilon, self.epsilon);
        set(&mut m.omega, self.omega);
        set(&mut m.eta, self.eta);
        set(&mut m.lambda, self.lambda);
        let init = s.initial;
        s.initial = MeanFieldState {
            a: Complex64::new(
                self.a_re.unwrap_or(init.a.re),
                self.a_im.unwrap_or(init.a.im),
            ),
            b: Complex64::new(
                self.b_re.unwrap_or(init.b.re),
                self.b_im.unwrap_or(init.b.im),
            ),
            q: self.q.unwrap_or(init.q),
            p: self.p.unwrap_or(init.p),
        };
        if let Some(v) = self.initial_style {
            s.initial_style = v;
        }
        set(&mut s.t_end, self.t_end);
        set(&mut s.sample_dt, self.sample_dt);
        let defaults = IntegratorSettings::default();
        let it = &mut s.integrator;
        *it = IntegratorSettings {
            method: self.method.unwrap_or(defaults.method),
            ..defaults
        };
        set(&mut it.h, self.h);
        set(&mut it.rel_tol, self.rel_tol);
        set(&mut it.abs_tol, self.abs_tol);
        set(&mut it.h_min, self.h_min);
        set(&mut it.h_max, self.h_max);
        if let Some(seed) = &self.seed {
            s.seed = seed.to_u64()?;
        }
        if let Some(n) = self.n_traj {
            s.n_traj = usize::try_from(n).map_err(|_| Error::invalid("n_traj", "too large"))?;
        }
        if let Some(c) = self.chi {
            s.chi_form = c;
        }
        if let Some(v) = self.vacuum_noise {
            s.vacuum_noise = v;
        }
        Ok(s)
    }
}

fn parse_error(context: &str, e: impl std::fmt::Display) -> Error {
    Error::Parse {
        context: context.to_string(),
        message: e.to_string().trim().to_string(),
    }
}

/// Rejects keys outside [`SCENARIO_KEYS`] and converts the table.
pub fn scenario_from_table(table: &toml::Table) -> Result<Scenario> {
    if let Some(k) = table.keys().find(|k| !SCENARIO_KEYS.contains(&k.as_str())) {
        return Err(Error::UnknownKey(k.clone()));
    }
    // Integers are accepted wherever a float is expected.
    let mut table = table.clone();
    for (k, v) in table.iter_mut() {
        if let toml::Value::Integer(i) = v {
            if !matches!(k.as_str(), "seed" | "n_traj") {
                *v = toml::Value::Float(*i as f64);
            }
        }
    }
    for (k, v) in &table {
        let file: std::result::Result<ScenarioFile, _> =
            toml::Table::from_iter([(k.clone(), v.clone())]).try_into();
        if let Err(e) = file {
            return Err(Error::invalid(k, e.to_string().trim().to_string()));
        }
    }
    let file: ScenarioFile = table
        .try_into()
        .map_err(|e| parse_error("scenario", e))?;
    file.to_scenario()
}

/// Parses and validates a scenario file.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let table: toml::Table = text.parse().map_err(|e| parse_error("scenario", e))?;
    let s = scenario_from_table(&table)?;
    s.validate()?;
    Ok(s)
}

/// Writes every key, so the file pins the scenario independently of defaults.
pub fn write_scenario(scenario: &Scenario) -> String {
    toml::to_string(&ScenarioFile::from_scenario(scenario))
        .expect("flat scenario files always serialize")
}

pub fn scenario_to_table(scenario: &Scenario) -> toml::Table {
    toml::Table::try_from(ScenarioFile::from_scenario(scenario))
        .expect("flat scenario files always serialize")
}

/// Overrides one numeric key of a scenario, as used by sweeps.
pub fn set_numeric_key(scenario: &Scenario, key: &str, value: f64) -> Result<Scenario> {
    let mut table = scenario_to_table(scenario);
    if !SCENARIO_KEYS.contains(&key) {
        return Err(Error::UnknownKey(key.to_string()));
    }
    let v = match key {
        "seed" | "n_traj" => {
            if value < 0.0 || value.fract() != 0.0 || value > i64::MAX as f64 {
                return Err(Error::invalid(key, "non-negative integer required"));
            }
            toml::Value::Integer(value as i64)
        }
        _ => toml::Value::Float(value),
    };
    table.insert(key.to_string(), v);
    scenario_from_table(&table)
}
