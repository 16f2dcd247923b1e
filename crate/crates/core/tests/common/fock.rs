//! Density-matrix evolution of the classical-mirror model in a truncated
//! two-mode Fock basis, with its own RK4 stepper. Used as an oracle for the
//! moment equations.

use num_complex::Complex64;
use qwcavity::Scenario;

type C = Complex64;

/// Sparse operator as (row, col, value) triples.
#[derive(Clone, Default)]
struct Sparse(Vec<(usize, usize, C)>);

impl Sparse {
    fn scaled(&self, s: C) -> Sparse {
        Sparse(self.0.iter().map(|&(i, j, v)| (i, j, v * s)).collect())
    }

    fn extend(&mut self, other: &Sparse, s: C) {
        self.0.extend(other.0.iter().map(|&(i, j, v)| (i, j, v * s)));
    }

    fn adjoint(&self) -> Sparse {
        Sparse(self.0.iter().map(|&(i, j, v)| (j, i, v.conj())).collect())
    }
}

pub struct FockModel {
    pub n_photons: usize,
    pub n_excitons: usize,
    dim: usize,
    a: Sparse,
    b: Sparse,
    static_h: Sparse,
    number_a: Sparse,
    pair: Sparse,
    scenario: Scenario,
}

impl FockModel {
    /// Photon occupations 0..=max_photons, exciton occupations 0..=max_excitons.
    pub fn new(scenario: &Scenario, max_photons: usize, max_excitons: usize) -> Self {
        let (np, ne) = (max_photons + 1, max_excitons + 1);
        let dim = np * ne;
        let idx = |n: usize, m: usize| n * ne + m;
        let mut a = Sparse::default();
        let mut b = Sparse::default();
        for n in 0..np {
            for m in 0..ne {
                if n > 0 {
                    a.0.push((idx(n - 1, m), idx(n, m), C::new((n as f64).sqrt(), 0.0)));
                }
                if m > 0 {
                    b.0.push((idx(n, m - 1), idx(n, m), C::new((m as f64).sqrt(), 0.0)));
                }
            }
        }
        let number_a = Sparse(
            (0..dim)
                .map(|i| (i, i, C::new((i / ne) as f64, 0.0)))
                .collect(),
        );
        let number_b = Sparse(
            (0..dim)
                .map(|i| (i, i, C::new((i % ne) as f64, 0.0)))
                .collect(),
        );
        let ad = a.adjoint();
        let bd = b.adjoint();
        let mul = |x: &Sparse, y: &Sparse| {
            let mut out = Sparse::default();
            for &(i, k, v) in &x.0 {
                for &(k2, j, w) in &y.0 {
                    if k == k2 {
                        out.0.push((i, j, v * w));
                    }
                }
            }
            out
        };
        let pr = &scenario.params;
        let one = C::new(1.0, 0.0);
        let i = C::new(0.0, 1.0);
        let mut h = Sparse::default();
        h.extend(&number_b, one * pr.delta_b);
        h.extend(&number_a, one * pr.delta_c);
        h.extend(&mul(&ad, &b), one * pr.g0);
        h.extend(&mul(&bd, &a), one * pr.g0);
        h.extend(&ad, i * pr.eps_p);
        h.extend(&a, -i * pr.eps_p);
        // Damping as an anti-Hermitian part: H_eff = H − iκ a†a − iγ b†b.
        h.extend(&number_a, -i * pr.kappa);
        h.extend(&number_b, -i * pr.gamma);
        let mut pair = mul(&ad, &ad);
        pair.extend(&mul(&a, &a), -one);
        FockModel {
            n_photons: np,
            n_excitons: ne,
            dim,
            a,
            b,
            static_h: h,
            number_a,
            pair,
            scenario: scenario.clone(),
        }
    }

    fn effective_h(&self, t: f64) -> Sparse {
        let sc = &self.scenario;
        let m = &sc.modulation;
        let shift = sc.params.omega_c * m.epsilon * (m.omega * t).sin();
        let mut h = self.static_h.clone();
        h.extend(&self.number_a, C::new(shift, 0.0));
        h.extend(&self.pair, C::new(0.0, sc.chi(t)));
        h
    }

    /// dρ/dt = −i(H_eff ρ − ρ H_eff†) + 2κ aρa† + 2γ bρb†.
    fn rhs(&self, t: f64, rho: &[C], out: &mut [C]) {
        let d = self.dim;
        let h = self.effective_h(t);
        let hd = h.adjoint();
        let mi = C::new(0.0, -1.0);
        out.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
        for &(r, k, v) in &h.0 {
            let f = mi * v;
            for j in 0..d {
                out[r * d + j] += f * rho[k * d + j];
            }
        }
        for &(k, c, v) in &hd.0 {
            let f = -mi * v;
            for i in 0..d {
                out[i * d + c] += f * rho[i * d + k];
            }
        }
        let pr = &self.scenario.params;
        for (op, rate) in [(&self.a, pr.kappa), (&self.b, pr.gamma)] {
            if rate == 0.0 {
                continue;
            }
            for &(i, k, v) in &op.0 {
                for &(j, l, w) in &op.0 {
                    out[i * d + j] += 2.0 * rate * v * w.conj() * rho[k * d + l];
                }
            }
        }
    }

    /// |photons = 0, excitons = m⟩⟨·|.
    pub fn exciton_fock_state(&self, m: usize) -> Vec<C> {
        let mut rho = vec![C::new(0.0, 0.0); self.dim * self.dim];
        rho[m * self.dim + m] = C::new(1.0, 0.0);
        rho
    }

    pub fn photon_number(&self, rho: &[C]) -> f64 {
        (0..self.dim)
            .map(|i| (i / self.n_excitons) as f64 * rho[i * self.dim + i].re)
            .sum()
    }

    pub fn exciton_number(&self, rho: &[C]) -> f64 {
        (0..self.dim)
            .map(|i| (i % self.n_excitons) as f64 * rho[i * self.dim + i].re)
            .sum()
    }

    pub fn trace(&self, rho: &[C]) -> C {
        (0..self.dim).map(|i| rho[i * self.dim + i]).sum()
    }

    /// Largest probability in the highest photon or exciton level.
    pub fn edge_population(&self, rho: &[C]) -> f64 {
        (0..self.dim)
            .filter(|i| i / self.n_excitons == self.n_photons - 1 || i % self.n_excitons == self.n_excitons - 1)
            .map(|i| rho[i * self.dim + i].re)
            .fold(0.0, f64::max)
    }

    /// RK4 from t = 0 with step `h`, recording ⟨a†a⟩ at multiples of `every`.
    pub fn evolve(&self, mut rho: Vec<C>, t_end: f64, h: f64, every: f64) -> Vec<(f64, f64, Vec<C>)> {
        let n = (t_end / h).round() as usize;
        let stride = (every / h).round() as usize;
        let len = rho.len();
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
            vec![C::default(); len],
            vec![C::default(); len],
            vec![C::default(); len],
            vec![C::default(); len],
            vec![C::default(); len],
        );
        let mut out = vec![(0.0, self.photon_number(&rho), rho.clone())];
        for s in 0..n {
            let t = s as f64 * h;
            self.rhs(t, &rho, &mut k1);
            for i in 0..len {
                tmp[i] = rho[i] + k1[i] * (h / 2.0);
            }
            self.rhs(t + h / 2.0, &tmp, &mut k2);
            for i in 0..len {
                tmp[i] = rho[i] + k2[i] * (h / 2.0);
            }
            self.rhs(t + h / 2.0, &tmp, &mut k3);
            for i in 0..len {
                tmp[i] = rho[i] + k3[i] * h;
            }
            self.rhs(t + h, &tmp, &mut k4);
            for i in 0..len {
                rho[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
            }
            if (s + 1) % stride == 0 {
                out.push(((s + 1) as f64 * h, self.photon_number(&rho), rho.clone()));
            }
        }
        out
    }
}
