//! Sampled observables and the diagnostics computed from them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::Trajectory;
use crate::models::MeanFieldState;
use crate::params::{Backend, Scenario, Variant};

/// How the photon and exciton numbers were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Estimator {
    /// |⟨a⟩|² and |⟨b⟩|² of a factorized (mean-field) trajectory.
    MeanFieldIntensity,
    /// Normally ordered second moments ⟨a†a⟩ and ⟨b†b⟩.
    SecondMoment,
    /// Ensemble average of |a|² and |b|² over stochastic trajectories.
    EnsembleIntensity,
}

impl Estimator {
    pub fn label(self) -> &'static str {
        match self {
            Estimator::MeanFieldIntensity => "|<a>|^2",
            Estimator::SecondMoment => "<a^dag a>",
            Estimator::EnsembleIntensity => "E[|a|^2]",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    ReA,
    ImA,
    ReB,
    ImB,
    Q,
    P,
    /// Photon number A(t).
    A,
    /// Exciton number (fluorescence intensity) B(t).
    B,
    Residual,
}

impl Channel {
    pub const ALL: [Channel; 9] = [
        Channel::ReA,
        Channel::ImA,
        Channel::ReB,
        Channel::ImB,
        Channel::Q,
        Channel::P,
        Channel::A,
        Channel::B,
        Channel::Residual,
    ];

    /// Column name in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            Channel::ReA => "re_a",
            Channel::ImA => "im_a",
            Channel::ReB => "re_b",
            Channel::ImB => "im_b",
            Channel::Q => "q",
            Channel::P => "p",
            Channel::A => "A",
            Channel::B => "B",
            Channel::Residual => "residual",
        }
    }

    pub fn from_name(name: &str) -> Option<Channel> {
        Channel::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Axis label as used on the published figures.
    pub fn axis_label(self) -> &'static str {
        match self {
            Channel::ReA => "Re⟨a⟩",
            Channel::ImA => "Im⟨a⟩",
            Channel::ReB => "Re⟨b⟩",
            Channel::ImB => "Im⟨b⟩",
            Channel::Q => "⟨q(t)⟩",
            Channel::P => "⟨p(t)⟩",
            Channel::A => "A(t)",
            Channel::B => "B(t)",
            Channel::Residual => "energy-balance residual",
        }
    }
}

/// Sampled trajectory of all observables. Every channel has the length of `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub re_a: Vec<f64>,
    pub im_a: Vec<f64>,
    pub re_b: Vec<f64>,
    pub im_b: Vec<f64>,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub photons: Vec<f64>,
    pub excitons: Vec<f64>,
    /// Normalized energy-balance residual; NaN where it does not apply.
    pub residual: Vec<f64>,
    /// Re⟨a²⟩ under the same estimator as `photons`. Not written to CSV.
    pub pair_re: Vec<f64>,
    pub backend: Backend,
    pub estimator: Estimator,
    pub steps: usize,
    pub rejected: usize,
}

impl TimeSeries {
    pub fn with_capacity(n: usize, backend: Backend, estimator: Estimator) -> Self {
        let v = || Vec::with_capacity(n);
        TimeSeries {
            t: v(),
            re_a: v(),
            im_a: v(),
            re_b: v(),
            im_b: v(),
            q: v(),
            p: v(),
            photons: v(),
            excitons: v(),
            residual: v(),
            pair_re: v(),
            backend,
            estimator,
            steps: 0,
            rejected: 0,
        }
    }

    /// Channels of a mean-field trajectory packed as (re a, im a, re b, im b, q, p).
    pub fn from_mean_field(traj: &Trajectory, backend: Backend, estimator: Estimator) -> Self {
        let mut s = TimeSeries::with_capacity(traj.len(), backend, estimator);
        for k in 0..traj.len() {
            let st = MeanFieldState::from_slice(traj.state(k));
            s.push(traj.t[k], &st, intensity(st.a), intensity(st.b), (st.a * st.a).re);
        }
        s.steps = traj.steps;
        s.rejected = traj.rejected;
        s
    }

    pub fn push(&mut self, t: f64, st: &MeanFieldState, photons: f64, excitons: f64, pair_re: f64) {
        self.t.push(t);
        self.re_a.push(st.a.re);
        self.im_a.push(st.a.im);
        self.re_b.push(st.b.re);
        self.im_b.push(st.b.im);
        self.q.push(st.q);
        self.p.push(st.p);
        self.photons.push(photons);
        self.excitons.push(excitons);
        self.residual.push(f64::NAN);
        self.pair_re.push(pair_re);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn channel(&self, c: Channel) -> &[f64] {
        match c {
            Channel::ReA => &self.re_a,
            Channel::ImA => &self.im_a,
            Channel::ReB => &self.re_b,
            Channel::ImB => &self.im_b,
            Channel::Q => &self.q,
            Channel::P => &self.p,
            Channel::A => &self.photons,
            Channel::B => &self.excitons,
            Channel::Residual => &self.residual,
        }
    }

    pub fn channel_mut(&mut self, c: Channel) -> &mut Vec<f64> {
        match c {
            Channel::ReA => &mut self.re_a,
            Channel::ImA => &mut self.im_a,
            Channel::ReB => &mut self.re_b,
            Channel::ImB => &mut self.im_b,
            Channel::Q => &mut self.q,
            Channel::P => &mut self.p,
            Channel::A => &mut self.photons,
            Channel::B => &mut self.excitons,
            Channel::Residual => &mut self.residual,
        }
    }

    pub fn amplitude_a(&self, k: usize) -> Complex64 {
        Complex64::new(self.re_a[k], self.im_a[k])
    }

    /// Samples with `t0 <= t <= t1`.
    pub fn slice_time(&self, t0: f64, t1: f64) -> TimeSeries {
        let lo = self.t.partition_point(|&t| t < t0);
        let hi = self.t.partition_point(|&t| t <= t1);
        let cut = |v: &Vec<f64>| v[lo..hi].to_vec();
        TimeSeries {
            t: cut(&self.t),
            re_a: cut(&self.re_a),
            im_a: cut(&self.im_a),
            re_b: cut(&self.re_b),
            im_b: cut(&self.im_b),
            q: cut(&self.q),
            p: cut(&self.p),
            photons: cut(&self.photons),
            excitons: cut(&self.excitons),
            residual: cut(&self.residual),
            pair_re: cut(&self.pair_re),
            ..self.clone_labels()
        }
    }

    fn clone_labels(&self) -> TimeSeries {
        TimeSeries {
            steps: self.steps,
            rejected: self.rejected,
            ..TimeSeries::with_capacity(0, self.backend, self.estimator)
        }
    }
}

/// |z|².
pub fn intensity(z: Complex64) -> f64 {
    z.norm_sqr()
}

/// Finite-difference weights for the first derivative at `z` on the nodes `x`
/// (Fornberg's recursion).
fn first_derivative_weights(z: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![[0.0f64; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

/// Derivative of a sampled signal: five-point (fourth-order) stencils when at
/// least five samples exist, three-point otherwise. Stencils are centered
/// where possible and shifted inward at the ends.
pub fn sampled_derivative(t: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let n = t.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 samples for a derivative, got {n}"
        )));
    }
    let m = if n >= 5 { 5 } else { 3 };
    let half = m / 2;
    Ok((0..n)
        .map(|i| {
            let start = i.saturating_sub(half).min(n - m);
            let nodes = &t[start..start + m];
            first_derivative_weights(t[i], nodes)
                .iter()
                .zip(&y[start..start + m])
                .map(|(w, v)| w * v)
                .sum()
        })
        .collect())
}

/// Normalized residual of d/dt(A+B) = −2κA − 2γB + 2ε_p Re⟨a⟩ + 4χ Re⟨a²⟩,
/// divided by (A + B + 1).
///
/// Uses the series' own estimator for A, B and Re⟨a²⟩, so it checks both the
/// mean-field trajectories and the second-moment equations.
pub fn energy_balance_residual(series: &TimeSeries, scenario: &Scenario) -> Result<Vec<f64>> {
    if scenario.variant != Variant::ClassicalMirror {
        return Err(Error::UnsupportedModel {
            operation: "energy_balance_residual",
            variant: scenario.variant.name(),
        });
    }
    let total: Vec<f64> = series
        .photons
        .iter()
        .zip(&series.excitons)
        .map(|(a, b)| a + b)
        .collect();
    let deriv = sampled_derivative(&series.t, &total)?;
    let pr = &scenario.params;
    Ok((0..series.len())
        .map(|k| {
            let t = series.t[k];
            let (a, b) = (series.photons[k], series.excitons[k]);
            let balance = -2.0 * pr.kappa * a - 2.0 * pr.gamma * b
                + 2.0 * scenario.pump(t) * series.re_a[k]
                + 4.0 * scenario.chi(t) * series.pair_re[k];
            (deriv[k] - balance) / (a + b + 1.0)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trend {
    Damped,
    Sustained,
    Amplified,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeConfig {
    pub window_count: usize,
    /// Growth ratio above which the trend is `Amplified`.
    pub amplified_above: f64,
    /// Growth ratio below which the trend is `Damped`.
    pub damped_below: f64,
    /// Minimum swing between neighbouring extrema, relative to the channel range.
    pub relative_prominence: f64,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        EnvelopeConfig {
            window_count: 2,
            amplified_above: 1.25,
            damped_below: 0.8,
            relative_prominence: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSummary {
    /// `window_count + 1` window edges in time.
    pub boundaries: Vec<f64>,
    /// Peak-to-peak amplitude in each window.
    pub amplitudes: Vec<f64>,
    pub trend: Trend,
    /// Last-window amplitude over first-window amplitude.
    pub growth_ratio: f64,
    pub config: EnvelopeConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Extremum {
    Max(usize),
    Min(usize),
}

impl Extremum {
    fn index(self) -> usize {
        match self {
            Extremum::Max(i) | Extremum::Min(i) => i,
        }
    }
}

/// Local extrema from sign changes of centered differences, with swings
/// smaller than `prominence` merged away.
fn local_extrema(y: &[f64], prominence: f64) -> Vec<Extremum> {
    let n = y.len();
    if n < 3 {
        return Vec::new();
    }
    let d: Vec<f64> = (1..n - 1).map(|i| y[i + 1] - y[i - 1]).collect();
    let mut out: Vec<Extremum> = Vec::new();
    for j in 0..d.len().saturating_sub(1) {
        let (i0, i1) = (j + 1, j + 2);
        let cand = if d[j] > 0.0 && d[j + 1] <= 0.0 {
            Extremum::Max(if y[i1] > y[i0] { i1 } else { i0 })
        } else if d[j] < 0.0 && d[j + 1] >= 0.0 {
            Extremum::Min(if y[i1] < y[i0] { i1 } else { i0 })
        } else {
            continue;
        };
        match (out.last().copied(), cand) {
            (None, _) => out.push(cand),
            (Some(Extremum::Max(l)), Extremum::Max(c)) => {
                if y[c] > y[l] {
                    *out.last_mut().unwrap() = cand;
                }
            }
            (Some(Extremum::Min(l)), Extremum::Min(c)) => {
                if y[c] < y[l] {
                    *out.last_mut().unwrap() = cand;
                }
            }
            (Some(last), _) => {
                if (y[cand.index()] - y[last.index()]).abs() < prominence {
                    out.pop();
                } else if last.index() != cand.index() {
                    out.push(cand);
                }
            }
        }
    }
    out
}

pub fn envelope_summary(
    series: &TimeSeries,
    channel: Channel,
    window_count: usize,
) -> Result<EnvelopeSummary> {
    envelope_summary_with(
        series,
        channel,
        &EnvelopeConfig {
            window_count,
            ..Default::default()
        },
    )
}

/// Splits the series into equal time windows, measures the peak-to-peak
/// amplitude in each, and classifies the trend of the last window against
/// the first.
pub fn envelope_summary_with(
    series: &TimeSeries,
    channel: Channel,
    config: &EnvelopeConfig,
) -> Result<EnvelopeSummary> {
    if config.window_count < 2 {
        return Err(Error::invalid("window_count", "at least 2 windows required"));
    }
    if series.len() < 3 {
        return Err(Error::InsufficientData("envelope needs at least 3 samples".into()));
    }
    let y = series.channel(channel);
    let t = &series.t;
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let extrema = local_extrema(y, config.relative_prominence * (hi - lo));

    let (t0, t1) = (t[0], t[t.len() - 1]);
    let width = (t1 - t0) / config.window_count as f64;
    let boundaries: Vec<f64> = (0..=config.window_count)
        .map(|k| t0 + k as f64 * width)
        .collect();
    let mut amplitudes = Vec::with_capacity(config.window_count);
    for w in 0..config.window_count {
        let (a, b) = (boundaries[w], boundaries[w + 1]);
        let last = w + 1 == config.window_count;
        let inside = |e: &&Extremum| {
            let te = t[e.index()];
            te >= a && (te < b || (last && te <= b))
        };
        let in_window: Vec<&Extremum> = extrema.iter().filter(inside).collect();
        let max = in_window
            .iter()
            .filter_map(|e| match e {
                Extremum::Max(i) => Some(y[*i]),
                _ => None,
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let min = in_window
            .iter()
            .filter_map(|e| match e {
                Extremum::Min(i) => Some(y[*i]),
                _ => None,
            })
            .fold(f64::INFINITY, f64::min);
        if in_window.len() < 3 || !max.is_finite() || !min.is_finite() {
            return Err(Error::InsufficientOscillation(format!(
                "{} extrema of {} in window [{a}, {b}], at least 3 required",
                in_window.len(),
                channel.name()
            )));
        }
        amplitudes.push((max - min).max(0.0));
    }
    let growth_ratio = amplitudes[amplitudes.len() - 1] / amplitudes[0];
    let trend = if growth_ratio > config.amplified_above {
        Trend::Amplified
    } else if growth_ratio < config.damped_below {
        Trend::Damped
    } else {
        Trend::Sustained
    };
    Ok(EnvelopeSummary {
        boundaries,
        amplitudes,
        trend,
        growth_ratio,
        config: *config,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub mean: f64,
    pub std_dev: f64,
    /// First time of the averaging window.
    pub window_start: f64,
    /// Standard deviation within 10⁻³ of max(|mean|, 1).
    pub converged: bool,
}

/// Mean and spread over the final 20% of samples.
pub fn steady_state_estimate(series: &TimeSeries, channel: Channel) -> Result<SteadyState> {
    let y = series.channel(channel);
    let n = y.len();
    if n == 0 {
        return Err(Error::InsufficientData("empty series".into()));
    }
    let start = ((n as f64) * 0.8).floor() as usize;
    let start = start.min(n - 1);
    let window = &y[start..];
    let m = window.len() as f64;
    let mean = window.iter().sum::<f64>() / m;
    let var = window.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m;
    let std_dev = var.sqrt();
    Ok(SteadyState {
        mean,
        std_dev,
        window_start: series.t[start],
        converged: std_dev <= 1e-3 * mean.abs().max(1.0),
    })
}
