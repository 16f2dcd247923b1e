//! Parameter sets of the published figures.
//!
//! Each figure compares two modulation amplitudes, so every preset carries a
//! two-member sweep over `epsilon` (cavity-frequency modulation) or `eta`
//! (pump modulation). The base scenario holds the first member.

use crate::error::{Error, Result};

use super::{ModelParams, Modulation, ReferenceRate, Scenario, Variant};

/// One swept scenario key and its values.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    /// Observable plotted in the figure panel: "A", "B" or "q".
    pub channel: &'static str,
    pub scenario: Scenario,
    pub sweep: SweepAxis,
}

impl Preset {
    /// The swept scenarios, each with a file-name suffix such as `epsilon-0.2`.
    pub fn members(&self) -> Vec<(String, Scenario)> {
        self.sweep
            .values
            .iter()
            .map(|&v| {
                let mut s = self.scenario.clone();
                match self.sweep.key.as_str() {
                    "epsilon" => s.modulation.epsilon = v,
                    "eta" => s.modulation.eta = v,
                    other => unreachable!("preset sweeps only epsilon or eta, not {other}"),
                }
                (format!("{}-{}", self.sweep.key, v), s)
            })
            .collect()
    }
}

#[derive(Clone, Copy)]
enum Family {
    /// Classical mirror, Ω = ω_c.
    Fig2,
    /// Quantized mirror with Ω = omega_factor · ω_m.
    Quantized { omega_factor: f64 },
    /// Modulated pump, λ = ω_m.
    Pump,
}

struct Entry {
    name: &'static str,
    family: Family,
    kappa: f64,
    g0: f64,
    channel: &'static str,
    description: &'static str,
}

const STRONG_G0: f64 = 0.005;
const WEAK_G0: f64 = 5.0;
const PUMP_WEAK_G0: f64 = 1.061;

const RESONANT: Family = Family::Quantized { omega_factor: 1.0 };
const OFF_RESONANT: Family = Family::Quantized { omega_factor: 2.0 };

#[rustfmt::skip]
const ENTRIES: &[Entry] = &[
    Entry { name: "fig2a", family: Family::Fig2, kappa: 1.5, g0: STRONG_G0, channel: "A", description: "classical mirror, bad cavity, strong modulation" },
    Entry { name: "fig2b", family: Family::Fig2, kappa: 1.5, g0: WEAK_G0, channel: "A", description: "classical mirror, bad cavity, weak modulation" },
    Entry { name: "fig2c", family: Family::Fig2, kappa: 0.1, g0: STRONG_G0, channel: "A", description: "classical mirror, good cavity, strong modulation" },
    Entry { name: "fig2d", family: Family::Fig2, kappa: 0.1, g0: WEAK_G0, channel: "A", description: "classical mirror, good cavity, weak modulation" },
    Entry { name: "fig3a", family: Family::Fig2, kappa: 1.5, g0: STRONG_G0, channel: "B", description: "fluorescence, classical mirror, bad cavity, strong modulation" },
    Entry { name: "fig3b", family: Family::Fig2, kappa: 1.5, g0: WEAK_G0, channel: "B", description: "fluorescence, classical mirror, bad cavity, weak modulation" },
    Entry { name: "fig3c", family: Family::Fig2, kappa: 0.1, g0: STRONG_G0, channel: "B", description: "fluorescence, classical mirror, good cavity, strong modulation" },
    Entry { name: "fig3d", family: Family::Fig2, kappa: 0.1, g0: WEAK_G0, channel: "B", description: "fluorescence, classical mirror, good cavity, weak modulation" },
    Entry { name: "fig4a", family: RESONANT, kappa: 1.5, g0: STRONG_G0, channel: "A", description: "quantized mirror, bad cavity, strong modulation, Ω = ω_m" },
    Entry { name: "fig4b", family: RESONANT, kappa: 1.5, g0: WEAK_G0, channel: "A", description: "quantized mirror, bad cavity, weak modulation, Ω = ω_m" },
    Entry { name: "fig4c", family: RESONANT, kappa: 1.5, g0: STRONG_G0, channel: "B", description: "fluorescence, quantized mirror, bad cavity, strong modulation, Ω = ω_m" },
    Entry { name: "fig4d", family: RESONANT, kappa: 1.5, g0: WEAK_G0, channel: "B", description: "fluorescence, quantized mirror, bad cavity, weak modulation, Ω = ω_m" },
    Entry { name: "fig5a", family: RESONANT, kappa: 0.1, g0: STRONG_G0, channel: "A", description: "quantized mirror, good cavity, strong modulation, Ω = ω_m" },
    Entry { name: "fig5b", family: OFF_RESONANT, kappa: 0.1, g0: STRONG_G0, channel: "A", description: "quantized mirror, good cavity, strong modulation, Ω = 2ω_m" },
    Entry { name: "fig5c", family: RESONANT, kappa: 0.1, g0: WEAK_G0, channel: "A", description: "quantized mirror, good cavity, weak modulation, Ω = ω_m" },
    Entry { name: "fig5d", family: OFF_RESONANT, kappa: 0.1, g0: WEAK_G0, channel: "A", description: "quantized mirror, good cavity, weak modulation, Ω = 2ω_m" },
    Entry { name: "fig6a", family: Family::Pump, kappa: 0.1, g0: PUMP_WEAK_G0, channel: "q", description: "mirror position, modulated pump, good cavity, weak modulation" },
    Entry { name: "fig6b", family: Family::Pump, kappa: 0.1, g0: STRONG_G0, channel: "q", description: "mirror position, modulated pump, good cavity, strong modulation" },
    Entry { name: "fig6c", family: Family::Pump, kappa: 1.5, g0: PUMP_WEAK_G0, channel: "q", description: "mirror position, modulated pump, bad cavity, weak modulation" },
    Entry { name: "fig6d", family: Family::Pump, kappa: 1.5, g0: STRONG_G0, channel: "q", description: "mirror position, modulated pump, bad cavity, strong modulation" },
    Entry { name: "fig7a", family: Family::Pump, kappa: 1.5, g0: PUMP_WEAK_G0, channel: "A", description: "photons, modulated pump, bad cavity, weak modulation" },
    Entry { name: "fig7b", family: Family::Pump, kappa: 1.5, g0: STRONG_G0, channel: "A", description: "photons, modulated pump, bad cavity, strong modulation" },
    Entry { name: "fig7c", family: Family::Pump, kappa: 1.5, g0: PUMP_WEAK_G0, channel: "B", description: "fluorescence, modulated pump, bad cavity, weak modulation" },
    Entry { name: "fig7d", family: Family::Pump, kappa: 1.5, g0: STRONG_G0, channel: "B", description: "fluorescence, modulated pump, bad cavity, strong modulation" },
];

/// Names in catalog order.
pub const PRESETS: [&str; 24] = [
    "fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b",
    "fig4c", "fig4d", "fig5a", "fig5b", "fig5c", "fig5d", "fig6a", "fig6b", "fig6c", "fig6d",
    "fig7a", "fig7b", "fig7c", "fig7d",
];

pub fn preset_names() -> impl Iterator<Item = (&'static str, &'static str)> {
    ENTRIES.iter().map(|e| (e.name, e.description))
}

pub fn preset(name: &str) -> Result<Preset> {
    let entry = ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))?;

    let (variant, params, modulation, sweep) = match entry.family {
        Family::Fig2 | Family::Quantized { .. } => {
            let omega_c = 1.36;
            let omega_m = 4.712;
            let (variant, omega_m, omega) = match entry.family {
                Family::Quantized { omega_factor } => {
                    (Variant::QuantizedMirror, omega_m, omega_factor * omega_m)
                }
                // no mechanical frequency is used by the classical-mirror model
                _ => (Variant::ClassicalMirror, 0.0, omega_c),
            };
            let params = ModelParams {
                omega_c,
                omega_m,
                delta_b: 2.0,
                delta_c: 4.712,
                g0: entry.g0,
                kappa: entry.kappa,
                gamma: 1.0,
                gamma_m: 1e-5,
                n_th: 175.0,
                eps_p: 5.0,
                reference_rate: ReferenceRate::Gamma,
                ..ModelParams::default()
            };
            let modulation = Modulation {
                epsilon: 0.1,
                omega,
                ..Modulation::default()
            };
            (variant, params, modulation, ("epsilon", [0.1, 0.2]))
        }
        Family::Pump => {
            let params = ModelParams {
                omega_m: 1.0,
                delta_b: 0.459,
                delta_c: 1.0,
                g0: entry.g0,
                gm: 0.1,
                kappa: entry.kappa,
                gamma: 0.212,
                gamma_m: 1e-5,
                n_th: 175.0,
                eps_p: 1.5,
                reference_rate: ReferenceRate::OmegaM,
                ..ModelParams::default()
            };
            let modulation = Modulation {
                eta: 0.1,
                lambda: 1.0,
                ..Modulation::default()
            };
            (Variant::ModulatedPump, params, modulation, ("eta", [0.1, 0.4]))
        }
    };

    let mut scenario = Scenario::new(variant);
    scenario.params = params;
    scenario.modulation = modulation;
    Ok(Preset {
        name: entry.name,
        description: entry.description,
        channel: entry.channel,
        scenario,
        sweep: SweepAxis {
            key: sweep.0.to_string(),
            values: sweep.1.to_vec(),
        },
    })
}
