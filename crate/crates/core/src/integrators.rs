//! Time stepping: classical RK4, adaptive Dormand–Prince 5(4) and
//! Euler–Maruyama for additive noise.
//!
//! Systems are integrated on flat `f64` state vectors. Complex amplitudes are
//! packed as (re, im) pairs by the callers.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A first-order system y' = f(t, y).
pub trait Dynamics {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

/// Adapts a closure to [`Dynamics`].
pub struct FnDynamics<F> {
    dim: usize,
    f: F,
}

impl<F> FnDynamics<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    pub fn new(dim: usize, f: F) -> Self {
        FnDynamics { dim, f }
    }
}

impl<F> Dynamics for FnDynamics<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        (self.f)(t, y, dy);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    RK4Fixed,
    RK45Adaptive,
    /// Fixed-step Euler drift; adds noise increments when run by the ensemble backend.
    EulerMaruyama,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::RK4Fixed => "RK4Fixed",
            Method::RK45Adaptive => "RK45Adaptive",
            Method::EulerMaruyama => "EulerMaruyama",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    pub method: Method,
    /// Step size of the fixed-step methods.
    pub h: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            method: Method::RK45Adaptive,
            h: 1e-3,
            rel_tol: 1e-9,
            abs_tol: 1e-9,
            h_min: 1e-12,
            h_max: 1.0,
        }
    }
}

impl IntegratorSettings {
    pub fn fixed(method: Method, h: f64) -> Self {
        IntegratorSettings {
            method,
            h,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::invalid("h", "h > 0 required"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol", "rel_tol > 0 required"));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::invalid("abs_tol", "abs_tol > 0 required"));
        }
        if !(self.h_min > 0.0) {
            return Err(Error::invalid("h_min", "h_min > 0 required"));
        }
        if !(self.h_min <= self.h_max) {
            return Err(Error::invalid("h_max", "h_min <= h_max required"));
        }
        Ok(())
    }
}

fn check_finite(t: f64, y: &[f64]) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Diverged { t })
    }
}

/// Classical fourth-order Runge–Kutta with reusable stage buffers.
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Rk4 {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    /// Advances `y` from `t` to `t + h` in place.
    pub fn step<D: Dynamics + ?Sized>(&mut self, sys: &D, t: f64, y: &mut [f64], h: f64) -> Result<()> {
        let n = y.len();
        sys.eval(t, y, &mut self.k1)?;
        for i in 0..n {
            self.tmp[i] = y[i] + 0.5 * h * self.k1[i];
        }
        sys.eval(t + 0.5 * h, &self.tmp, &mut self.k2)?;
        for i in 0..n {
            self.tmp[i] = y[i] + 0.5 * h * self.k2[i];
        }
        sys.eval(t + 0.5 * h, &self.tmp, &mut self.k3)?;
        for i in 0..n {
            self.tmp[i] = y[i] + h * self.k3[i];
        }
        sys.eval(t + h, &self.tmp, &mut self.k4)?;
        for i in 0..n {
            y[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        check_finite(t + h, y)
    }
}

/// One RK4 step from `(t, state)`.
pub fn rk4_step<D: Dynamics + ?Sized>(sys: &D, t: f64, state: &[f64], h: f64) -> Result<Vec<f64>> {
    let mut y = state.to_vec();
    Rk4::new(y.len()).step(sys, t, &mut y, h)?;
    Ok(y)
}

/// Explicit Euler step, the drift part of [`euler_maruyama_step`].
pub fn euler_step<D: Dynamics + ?Sized>(
    sys: &D,
    t: f64,
    state: &mut [f64],
    h: f64,
    scratch: &mut [f64],
) -> Result<()> {
    sys.eval(t, state, scratch)?;
    for (y, f) in state.iter_mut().zip(scratch.iter()) {
        *y += h * f;
    }
    check_finite(t + h, state)
}

/// One Euler–Maruyama step with additive noise: `y_i += σ_i √h ξ_i` for every
/// component with `σ_i > 0`. Normal variates are drawn in component order.
pub fn euler_maruyama_step<D, R>(
    sys: &D,
    noise_amplitudes: &[f64],
    rng: &mut R,
    t: f64,
    state: &mut [f64],
    h: f64,
    scratch: &mut [f64],
) -> Result<()>
where
    D: Dynamics + ?Sized,
    R: Rng + ?Sized,
{
    sys.eval(t, state, scratch)?;
    let sqrt_h = h.sqrt();
    for i in 0..state.len() {
        state[i] += h * scratch[i];
        let sigma = noise_amplitudes.get(i).copied().unwrap_or(0.0);
        if sigma > 0.0 {
            let xi: f64 = rng.sample(StandardNormal);
            state[i] += sigma * sqrt_h * xi;
        }
    }
    check_finite(t + h, state)
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct DormandPrince {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
    err: Vec<f64>,
}

impl DormandPrince {
    fn new(dim: usize) -> Self {
        DormandPrince {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
            y_new: vec![0.0; dim],
            err: vec![0.0; dim],
        }
    }

    /// Trial step assuming `k[0] = f(t, y)`. Returns the scaled error norm.
    fn attempt<D: Dynamics + ?Sized>(
        &mut self,
        sys: &D,
        t: f64,
        y: &[f64],
        h: f64,
        settings: &IntegratorSettings,
    ) -> Result<f64> {
        let n = y.len();
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        for i in 0..n {
            self.tmp[i] = y[i] + h * A21 * k1[i];
        }
        sys.eval(t + C2 * h, &self.tmp, k2)?;
        for i in 0..n {
            self.tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        sys.eval(t + C3 * h, &self.tmp, k3)?;
        for i in 0..n {
            self.tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        sys.eval(t + C4 * h, &self.tmp, k4)?;
        for i in 0..n {
            self.tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        sys.eval(t + C5 * h, &self.tmp, k5)?;
        for i in 0..n {
            self.tmp[i] = y[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        sys.eval(t + h, &self.tmp, k6)?;
        for i in 0..n {
            self.y_new[i] = y[i]
                + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        sys.eval(t + h, &self.y_new, k7)?;
        let mut sum = 0.0;
        for i in 0..n {
            self.err[i] = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = settings.abs_tol + settings.rel_tol * y[i].abs().max(self.y_new[i].abs());
            sum += (self.err[i] / scale).powi(2);
        }
        Ok((sum / n as f64).sqrt())
    }
}

fn scaled_norm(v: &[f64], y: &[f64], settings: &IntegratorSettings) -> f64 {
    let sum: f64 = v
        .iter()
        .zip(y)
        .map(|(vi, yi)| (vi / (settings.abs_tol + settings.rel_tol * yi.abs())).powi(2))
        .sum();
    (sum / v.len() as f64).sqrt()
}

/// Starting step from the usual two-evaluation heuristic.
fn initial_step<D: Dynamics + ?Sized>(
    sys: &D,
    t: f64,
    y: &[f64],
    f0: &[f64],
    settings: &IntegratorSettings,
) -> Result<f64> {
    let d0 = scaled_norm(y, y, settings);
    let d1 = scaled_norm(f0, y, settings);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = y.iter().zip(f0).map(|(yi, fi)| yi + h0 * fi).collect();
    let mut f1 = vec![0.0; y.len()];
    sys.eval(t + h0, &y1, &mut f1)?;
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = scaled_norm(&diff, y, settings) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).clamp(settings.h_min, settings.h_max))
}

/// Sample times k·dt for k = 0..=⌊t_end/dt⌋, plus `t_end` when it is not a
/// multiple of `dt`.
pub fn sample_times(t_end: f64, sample_dt: f64) -> Vec<f64> {
    let n = (t_end / sample_dt + 1e-9).floor() as usize;
    let mut ts: Vec<f64> = (0..=n).map(|k| k as f64 * sample_dt).collect();
    if t_end - ts[n] > 1e-9 * sample_dt {
        ts.push(t_end);
    }
    ts
}

/// Samples of an integrated trajectory, row-major (`samples × dim`).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub dim: usize,
    pub steps: usize,
    pub rejected: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.y[k * self.dim..(k + 1) * self.dim]
    }
}

/// Per-step noise source for [`integrate_with_noise`].
pub struct Noise<'a, R: Rng + ?Sized> {
    pub amplitudes: &'a [f64],
    pub rng: &'a mut R,
}

/// Integrates deterministically from t = 0 to `t_end`, recording a sample at
/// every multiple of `sample_dt`.
///
/// The adaptive method never steps across a sample time, so every sample is
/// an accepted solver point. Fixed-step methods subdivide each sample
/// interval into equal steps no longer than `settings.h`.
pub fn integrate<D: Dynamics + ?Sized>(
    sys: &D,
    y0: &[f64],
    t_end: f64,
    sample_dt: f64,
    settings: &IntegratorSettings,
) -> Result<Trajectory> {
    integrate_with_noise::<D, rand_chacha::ChaCha8Rng>(sys, y0, t_end, sample_dt, settings, None)
}

pub fn integrate_with_noise<D, R>(
    sys: &D,
    y0: &[f64],
    t_end: f64,
    sample_dt: f64,
    settings: &IntegratorSettings,
    mut noise: Option<Noise<'_, R>>,
) -> Result<Trajectory>
where
    D: Dynamics + ?Sized,
    R: Rng + ?Sized,
{
    let dim = sys.dim();
    assert_eq!(y0.len(), dim, "initial state has the wrong dimension");
    if !(t_end >= 0.0) {
        return Err(Error::invalid("t_end", "t_end >= 0 required"));
    }
    check_finite(0.0, y0)?;
    let times = if t_end == 0.0 {
        vec![0.0]
    } else {
        sample_times(t_end, sample_dt)
    };
    let mut out = Trajectory {
        t: Vec::with_capacity(times.len()),
        y: Vec::with_capacity(times.len() * dim),
        dim,
        steps: 0,
        rejected: 0,
    };
    let mut y = y0.to_vec();
    out.t.push(times[0]);
    out.y.extend_from_slice(&y);

    match settings.method {
        Method::RK4Fixed | Method::EulerMaruyama => {
            let mut rk4 = Rk4::new(dim);
            let mut scratch = vec![0.0; dim];
            for w in times.windows(2) {
                let (t0, t1) = (w[0], w[1]);
                let n = ((t1 - t0) / settings.h - 1e-9).ceil().max(1.0) as usize;
                let h = (t1 - t0) / n as f64;
                for k in 0..n {
                    let t = t0 + k as f64 * h;
                    if settings.method == Method::RK4Fixed {
                        rk4.step(sys, t, &mut y, h)?;
                    } else {
                        match noise.as_mut() {
                            Some(nz) => euler_maruyama_step(
                                sys,
                                nz.amplitudes,
                                nz.rng,
                                t,
                                &mut y,
                                h,
                                &mut scratch,
                            )?,
                            None => euler_step(sys, t, &mut y, h, &mut scratch)?,
                        }
                    }
                    out.steps += 1;
                }
                out.t.push(t1);
                out.y.extend_from_slice(&y);
            }
        }
        Method::RK45Adaptive => {
            if noise.is_some() {
                return Err(Error::Inconsistent(
                    "stochastic integration requires method EulerMaruyama".into(),
                ));
            }
            let mut dp = DormandPrince::new(dim);
            sys.eval(0.0, &y, &mut dp.k[0])?;
            let mut h = initial_step(sys, 0.0, &y, &dp.k[0], settings)?;
            let mut t = 0.0;
            let mut last_rejected = false;
            for &target in &times[1..] {
                while t < target {
                    let remaining = target - t;
                    let landing = h >= remaining * (1.0 - 1e-12);
                    let h_try = if landing { remaining } else { h };
                    let err = dp.attempt(sys, t, &y, h_try, settings)?;
                    if !err.is_finite() {
                        return Err(Error::Diverged { t });
                    }
                    if err <= 1.0 {
                        t = if landing { target } else { t + h_try };
                        y.copy_from_slice(&dp.y_new);
                        dp.k.swap(0, 6);
                        out.steps += 1;
                        check_finite(t, &y)?;
                        let mut factor = 0.9 * err.max(1e-10).powf(-0.2);
                        factor = factor.clamp(0.2, 5.0);
                        if last_rejected {
                            factor = factor.min(1.0);
                        }
                        let proposal = (h_try * factor).min(settings.h_max);
                        // a shortened landing step says nothing against the old step size
                        h = if landing { proposal.max(h.min(settings.h_max)) } else { proposal };
                        last_rejected = false;
                    } else {
                        out.rejected += 1;
                        last_rejected = true;
                        h = h_try * (0.9 * err.powf(-0.2)).max(0.2);
                        if h < settings.h_min {
                            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                            return Err(Error::StepUnderflow { t, h, norm });
                        }
                    }
                }
                out.t.push(target);
                out.y.extend_from_slice(&y);
            }
        }
    }
    Ok(out)
}
