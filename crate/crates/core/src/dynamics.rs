//! Time evolution: the tangential half-wave reduction, a per-frequency
//! radial leapfrog oracle, and the dispersive integral `J(z, j, λ)`.

use crate::error::{LabError, Result};
use crate::experiments::ScalingFit;
use crate::quad::GaussLegendre;
use crate::spectral::{FarBoundary, ModeSpec, ProfileEvaluator};
use crate::synthesis::{gallery_mode_from_spectrum, LpCutoff, TangentialGrid, C64};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Lattice coefficients of `φ(t)` solving `(∂_t² + μ|∇_{x′}|)φ = 0`.
#[derive(Debug, Clone)]
pub struct HalfWaveState {
    pub mu: f64,
    pub grid: TangentialGrid,
    pub spectrum: Vec<C64>,
    pub velocity: Vec<C64>,
    pub t: f64,
}

impl HalfWaveState {
    fn omegas(grid: &TangentialGrid, mu: f64) -> Vec<f64> {
        grid.freq_norms().iter().map(|r| (mu * r).sqrt()).collect()
    }

    fn checked(mu: f64, grid: &TangentialGrid, spectrum: &[C64]) -> Result<()> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(LabError::Validation(format!("mu must be positive, got {mu}")));
        }
        if spectrum.len() != grid.len() {
            return Err(LabError::Validation(format!(
                "spectrum has {} coefficients, grid needs {}",
                spectrum.len(),
                grid.len()
            )));
        }
        Ok(())
    }

    /// Forward half-wave data: `∂_tφ̂ = −i√(μ|ξ′|) φ̂`.
    pub fn half_wave(mu: f64, grid: TangentialGrid, spectrum: Vec<C64>) -> Result<Self> {
        Self::checked(mu, &grid, &spectrum)?;
        let w = Self::omegas(&grid, mu);
        let velocity = spectrum.iter().zip(&w).map(|(c, w)| c * C64::new(0.0, -w)).collect();
        Ok(HalfWaveState { mu, grid, spectrum, velocity, t: 0.0 })
    }

    /// Data `(φ₀, 0)`.
    pub fn at_rest(mu: f64, grid: TangentialGrid, spectrum: Vec<C64>) -> Result<Self> {
        Self::checked(mu, &grid, &spectrum)?;
        let velocity = vec![C64::new(0.0, 0.0); spectrum.len()];
        Ok(HalfWaveState { mu, grid, spectrum, velocity, t: 0.0 })
    }

    /// `‖φ̂‖²` in the lattice Plancherel normalization.
    pub fn l2_sq(&self) -> f64 {
        self.spectrum.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.grid.box_length.powi(self.grid.dims() as i32)
    }

    /// `‖∂_tφ‖² + μ‖|∇′|^{1/2}φ‖²`.
    pub fn energy(&self) -> f64 {
        let w = Self::omegas(&self.grid, self.mu);
        let e: f64 = (0..w.len()).map(|k| self.velocity[k].norm_sqr() + w[k] * w[k] * self.spectrum[k].norm_sqr()).sum();
        e / self.grid.box_length.powi(self.grid.dims() as i32)
    }
}

/// Exact lattice evolution by elapsed time `t`: each coefficient follows
/// `cos(ωt)φ̂ + sin(ωt)/ω ∂_tφ̂` with `ω = √(μ|ξ′|)`. Half-wave data give
/// the phase `e^{−iωt}`; data at rest give `cos(ωt)`.
pub fn halfwave_evolve(initial: &HalfWaveState, t: f64) -> HalfWaveState {
    let w = HalfWaveState::omegas(&initial.grid, initial.mu);
    let (spectrum, velocity): (Vec<C64>, Vec<C64>) = (0..w.len())
        .map(|k| {
            let (p, v) = (initial.spectrum[k], initial.velocity[k]);
            let om = w[k];
            let (s, c) = (om * t).sin_cos();
            let sinc = if om == 0.0 { t } else { s / om };
            (p * c + v * sinc, v * c - p * (om * s))
        })
        .unzip();
    HalfWaveState { mu: initial.mu, grid: initial.grid, spectrum, velocity, t: initial.t + t }
}

/// Residual of `(∂_t² − κx_dΔ − ∂_d)u = 0` for the gallery wave built from
/// the evolved half-wave state, relative to its largest term. The time
/// derivative is a central difference of [`halfwave_evolve`].
pub fn reduction_residual(state: &HalfWaveState, kappa: f64, xd: &[f64]) -> Result<f64> {
    let mode = ModeSpec::with_mu(kappa, state.mu)?;
    let w_max = state.grid.k_max().max(1.0) * state.mu;
    let h = 1e-3 / w_max.sqrt();
    let (a, b) = (halfwave_evolve(state, -h), halfwave_evolve(state, h));
    let acc: Vec<C64> = (0..state.spectrum.len())
        .map(|k| (a.spectrum[k] + b.spectrum[k] - state.spectrum[k] * 2.0) / (h * h))
        .collect();
    let u = gallery_mode_from_spectrum(&state.spectrum, mode, state.grid, xd)?;
    let utt = gallery_mode_from_spectrum(&acc, mode, state.grid, xd)?;
    let (d1, d2) = match (&u.spectrum_d1, &u.spectrum_d2) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(LabError::Validation("gallery wave lacks normal derivative spectra".into())),
    };
    let m = u.slice_len();
    let norms = u.grid.freq_norms();
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for (i, &x) in xd.iter().enumerate() {
        for k in 0..m {
            let idx = i * m + k;
            let t1 = utt.spectrum[idx];
            let t2 = (d2[idx] - u.spectrum[idx] * (norms[k] * norms[k])) * (-kappa * x);
            let t3 = -d1[idx];
            worst = worst.max((t1 + t2 + t3).norm());
            scale = scale.max(t1.norm()).max(t2.norm()).max(t3.norm());
        }
    }
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}

/// Energy drift beyond which [`RadialOracle::evolve_sampled`] fails.
pub const ENERGY_DRIFT_LIMIT: f64 = 1e-4;
/// Largest node spacing in `s` chosen by [`RadialOracle::for_profile`].
pub const RADIAL_MAX_SPACING: f64 = 1e-2;

/// Per-frequency leapfrog for `∂_t²v = κx_d∂_d²v + ∂_dv − κx_d|ξ′|²v` in
/// the scaled variable `s = |ξ′|x_d`, discretized in flux form so that the
/// operator is symmetric in the `s^{1/κ−1}` weighted inner product.
#[derive(Debug, Clone)]
pub struct RadialOracle {
    pub xi_norm: f64,
    pub kappa: f64,
    pub s: Vec<f64>,
    pub far: FarBoundary,
    mass: Vec<f64>,
    cond: Vec<f64>,
    pot: Vec<f64>,
}

/// Leapfrog output: snapshots at the requested times and the staggered
/// discrete energy record.
#[derive(Debug, Clone, Serialize)]
pub struct RadialEvolution {
    pub times: Vec<f64>,
    pub snapshots: Vec<Vec<f64>>,
    pub dt: f64,
    pub steps: usize,
    pub energy_start: f64,
    pub max_energy_drift: f64,
}

impl RadialOracle {
    /// Quadratic grid `s_i = S(i/m)²` on `[0, S]`; `far` selects the
    /// condition at `S` (`Decay` is treated as Dirichlet).
    pub fn new(xi_norm: f64, kappa: f64, s_end: f64, m: usize, far: FarBoundary) -> Result<Self> {
        if !(xi_norm > 0.0) || !(kappa > 0.0) || !(s_end > 0.0) || m < 8 {
            return Err(LabError::Validation(format!(
                "radial oracle needs |xi|>0, kappa>0, S>0, m>=8 (got {xi_norm}, {kappa}, {s_end}, {m})"
            )));
        }
        let s: Vec<f64> = (0..=m).map(|i| s_end * (i as f64 / m as f64).powi(2)).collect();
        let p = 1.0 / kappa;
        let mid = |i: usize| 0.5 * (s[i] + s[i + 1]);
        let mut mass = Vec::with_capacity(m + 1);
        let mut pot = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let a = if i == 0 { 0.0 } else { mid(i - 1) };
            let b = if i == m { s_end } else { mid(i) };
            mass.push(kappa * (b.powf(p) - a.powf(p)));
            pot.push((b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0));
        }
        let cond = (0..m).map(|i| kappa * mid(i).powf(p) / (s[i + 1] - s[i])).collect();
        Ok(RadialOracle { xi_norm, kappa, s, far, mass, cond, pot })
    }

    /// Oracle on the profile's own domain: up to its cut, else `s_max`.
    pub fn for_profile(ev: &ProfileEvaluator, xi_norm: f64, s_max: f64) -> Result<Self> {
        let (end, far) = ev.cut.unwrap_or((s_max, FarBoundary::Decay));
        let m = ((2.0 * end / RADIAL_MAX_SPACING).ceil() as usize).max(64);
        Self::new(xi_norm, ev.spec.kappa, end, m, far)
    }

    /// Number of unknowns; a Dirichlet end node is held at zero.
    pub fn unknowns(&self) -> usize {
        match self.far {
            FarBoundary::Neumann => self.s.len(),
            _ => self.s.len() - 1,
        }
    }

    /// Normal coordinates `x_d = s/|ξ′|` of the unknowns.
    pub fn xd(&self) -> Vec<f64> {
        self.s[..self.unknowns()].iter().map(|s| s / self.xi_norm).collect()
    }

    /// Profile samples `B(s_i)` at the unknowns.
    pub fn sample(&self, ev: &ProfileEvaluator) -> Result<Vec<f64>> {
        self.s[..self.unknowns()].iter().map(|&s| ev.eval(s).map(|v| v[0])).collect()
    }

    fn stiffness(&self, v: &[f64], out: &mut [f64]) {
        let n = v.len();
        let vv = |i: usize| if i < n { v[i] } else { 0.0 };
        for i in 0..n {
            let mut acc = self.kappa * self.pot[i] * v[i];
            if i > 0 {
                acc += self.cond[i - 1] * (v[i] - v[i - 1]);
            }
            if i < self.cond.len() {
                acc += self.cond[i] * (v[i] - vv(i + 1));
            }
            out[i] = acc;
        }
    }

    /// Gershgorin bound on the generator's spectral radius (in `t` units).
    pub fn spectral_radius_bound(&self) -> f64 {
        let n = self.unknowns();
        (0..n)
            .map(|i| {
                let mut r = self.kappa * self.pot[i];
                if i > 0 {
                    r += 2.0 * self.cond[i - 1];
                }
                if i < self.cond.len() {
                    r += 2.0 * self.cond[i];
                }
                self.xi_norm * r / self.mass[i]
            })
            .fold(0.0, f64::max)
    }

    /// Largest leapfrog step kept inside the stability region with margin.
    pub fn stable_dt(&self) -> f64 {
        0.9 * 2.0 / self.spectral_radius_bound().sqrt()
    }

    /// `∫x_d^{1/κ−1}(v_t² + κx_d(v_d² + |ξ′|²v²))dx_d` on the grid.
    pub fn energy(&self, v: &[f64], vt: &[f64]) -> f64 {
        let mut kv = vec![0.0; v.len()];
        self.stiffness(v, &mut kv);
        let kin: f64 = (0..v.len()).map(|i| self.mass[i] * vt[i] * vt[i]).sum();
        let pe: f64 = v.iter().zip(&kv).map(|(a, b)| a * b).sum();
        self.xi_norm.powf(-1.0 / self.kappa) * (kin + self.xi_norm * pe)
    }

    fn staggered_energy(&self, prev: &[f64], next: &[f64], dt: f64, scratch: &mut [f64]) -> f64 {
        self.stiffness(prev, scratch);
        let kin: f64 = (0..prev.len()).map(|i| self.mass[i] * ((next[i] - prev[i]) / dt).powi(2)).sum();
        let pe: f64 = next.iter().zip(scratch.iter()).map(|(a, b)| a * b).sum();
        self.xi_norm.powf(-1.0 / self.kappa) * (kin + self.xi_norm * pe)
    }

    /// Leapfrog from `(v0, v1)` with snapshots at `k·sample_dt`,
    /// `k = 0..=samples`. `dt` defaults to [`Self::stable_dt`] and is
    /// shortened to divide `sample_dt`.
    pub fn evolve_sampled(
        &self,
        v0: &[f64],
        v1: &[f64],
        sample_dt: f64,
        samples: usize,
        dt: Option<f64>,
    ) -> Result<RadialEvolution> {
        let n = self.unknowns();
        if v0.len() != n || v1.len() != n {
            return Err(LabError::Validation(format!("radial data must have {n} entries")));
        }
        if !(sample_dt > 0.0) {
            return Err(LabError::Validation("sample interval must be positive".into()));
        }
        let bound = self.stable_dt();
        let dt0 = dt.unwrap_or(bound);
        if !(dt0 > 0.0) || dt0 > bound {
            return Err(LabError::Validation(format!("dt={dt0:e} exceeds the stability bound {bound:e}")));
        }
        let per = (sample_dt / dt0).ceil().max(1.0) as usize;
        let dt = sample_dt / per as f64;
        let accel = |v: &[f64], out: &mut [f64]| {
            self.stiffness(v, out);
            for i in 0..n {
                out[i] *= -self.xi_norm / self.mass[i];
            }
        };
        let mut a = vec![0.0; n];
        accel(v0, &mut a);
        let mut prev = v0.to_vec();
        let mut cur: Vec<f64> = (0..n).map(|i| v0[i] + dt * v1[i] + 0.5 * dt * dt * a[i]).collect();
        let mut scratch = vec![0.0; n];
        let e0 = self.staggered_energy(&prev, &cur, dt, &mut scratch);
        let mut drift = 0.0f64;
        let mut snapshots = vec![v0.to_vec()];
        let total = per * samples;
        for step in 1..=total {
            if step % per == 0 {
                snapshots.push(cur.clone());
            }
            if step == total {
                break;
            }
            accel(&cur, &mut a);
            for i in 0..n {
                let next = 2.0 * cur[i] - prev[i] + dt * dt * a[i];
                prev[i] = cur[i];
                cur[i] = next;
            }
            let e = self.staggered_energy(&prev, &cur, dt, &mut scratch);
            let rel = if e0 != 0.0 { ((e - e0) / e0).abs() } else { e.abs() };
            drift = drift.max(rel);
            if !rel.is_finite() || rel > ENERGY_DRIFT_LIMIT {
                return Err(LabError::Instability(format!(
                    "energy drift {rel:e} at t={:.6} exceeds {ENERGY_DRIFT_LIMIT:e}",
                    step as f64 * dt
                )));
            }
        }
        let times = (0..=samples).map(|k| k as f64 * sample_dt).collect();
        Ok(RadialEvolution { times, snapshots, dt, steps: total, energy_start: e0, max_energy_drift: drift })
    }

    /// Profile at `t_end`.
    pub fn evolve(&self, v0: &[f64], v1: &[f64], t_end: f64, dt: Option<f64>) -> Result<RadialEvolution> {
        self.evolve_sampled(v0, v1, t_end, 1, dt)
    }
}

/// Worst relative deviation over one period of the leapfrog solution from
/// the separated solution `cos(√(μ|ξ′|)t)·B` started at rest.
pub fn separated_solution_error(ev: &ProfileEvaluator, xi_norm: f64, s_max: f64, samples: usize) -> Result<(f64, RadialEvolution)> {
    let oracle = RadialOracle::for_profile(ev, xi_norm, s_max)?;
    let b = oracle.sample(ev)?;
    let omega = (ev.spec.mu * xi_norm).sqrt();
    let period = 2.0 * PI / omega;
    let zero = vec![0.0; b.len()];
    let run = oracle.evolve_sampled(&b, &zero, period / samples as f64, samples, None)?;
    let peak = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0f64;
    for (t, snap) in run.times.iter().zip(&run.snapshots) {
        let c = (omega * t).cos();
        for (u, bb) in snap.iter().zip(&b) {
            worst = worst.max((u - c * bb).abs() / peak);
        }
    }
    Ok((worst, run))
}

/// Budget on the effective phase scale `λ·max(2^{−j}√μ, |z|)` for `d = 2`.
pub const PHASE_BUDGET_D2: f64 = 1e4;
/// Same budget for `d = 3`.
pub const PHASE_BUDGET_D3: f64 = 2e3;
const GL_PANEL: usize = 16;

/// One evaluation of the dispersive integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersiveSample {
    pub z_norm: f64,
    pub j: i32,
    pub lambda: f64,
    pub re: f64,
    pub im: f64,
}

impl DispersiveSample {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// `G(j, η) = 2^{−j}√μ |η|^{1/2}` prefactor.
pub fn g_scale(j: i32, mu: f64) -> f64 {
    2f64.powi(-j) * mu.sqrt()
}

/// Hessian of `G(j, ·)` at `η` (dimension `d − 1`).
pub fn hessian_g(eta: &[f64], j: i32, mu: f64) -> Vec<Vec<f64>> {
    let r2: f64 = eta.iter().map(|e| e * e).sum();
    let r = r2.sqrt();
    let pre = g_scale(j, mu) / (2.0 * r.powf(1.5));
    (0..eta.len())
        .map(|a| {
            (0..eta.len())
                .map(|b| pre * (if a == b { 1.0 } else { 0.0 } - 1.5 * eta[a] * eta[b] / r2))
                .collect()
        })
        .collect()
}

fn annulus_support(cutoff: &LpCutoff) -> (f64, f64) {
    (0.5 * cutoff.inner, cutoff.outer)
}

fn check_j_args(z: &[f64], lambda: f64, mu: f64, j: i32) -> Result<(usize, f64, f64)> {
    let n = z.len();
    if n != 1 && n != 2 {
        return Err(LabError::Validation(format!("z must have 1 or 2 components, got {n}")));
    }
    if !(lambda > 0.0) || !(mu > 0.0) {
        return Err(LabError::Validation(format!("need lambda>0 and mu>0 (got {lambda}, {mu})")));
    }
    let zn = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    let c = g_scale(j, mu);
    let budget = if n == 1 { PHASE_BUDGET_D2 } else { PHASE_BUDGET_D3 };
    let eff = lambda * c.max(zn);
    if eff > budget {
        return Err(LabError::Resolution(format!(
            "phase scale lambda*max(c,|z|)={eff:e} exceeds the d={} budget {budget:e}",
            n + 1
        )));
    }
    Ok((n, zn, c))
}

/// `J(z, j, λ) = ∫ e^{iλ(z·η − G(j,η))} ψ(η) dη` over `R^{d−1}` with the
/// annulus symbol `ψ(η) − ψ(2η)`. Gauss–Legendre panels in `|η|` resolve at
/// least 16 nodes per oscillation; in `d = 3` the angular integral uses the
/// periodic trapezoid rule with at least 10 nodes per oscillation.
pub fn oscillatory_j(z: &[f64], j: i32, lambda: f64, mu: f64, cutoff: &LpCutoff) -> Result<C64> {
    let (n, zn, c) = check_j_args(z, lambda, mu, j)?;
    let (a, b) = annulus_support(cutoff);
    let slope = lambda * (zn + c / (2.0 * a.sqrt()));
    let panels = ((slope * (b - a) / (2.0 * PI)).ceil() as usize).max(32);
    let gl = GaussLegendre::new(GL_PANEL);
    let h = (b - a) / panels as f64;
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| gl.mapped(a + p as f64 * h, a + (p + 1) as f64 * h).collect::<Vec<_>>())
        .collect();
    let radial = |rho: f64| C64::from_polar(cutoff.multiplier(rho), -lambda * c * rho.sqrt());
    let terms: Vec<C64> = if n == 1 {
        nodes
            .par_iter()
            .map(|&(rho, w)| radial(rho) * (C64::from_polar(1.0, lambda * zn * rho) + C64::from_polar(1.0, -lambda * zn * rho)) * w)
            .collect()
    } else {
        // angle sum over [0, π] using the symmetry θ ↦ −θ
        let osc = 4.0 * lambda * zn * b / (2.0 * PI);
        let half = ((10.0 * osc / 2.0).ceil() as usize).max(32);
        let dth = PI / half as f64;
        let cosines: Vec<(f64, f64)> = (0..=half)
            .map(|k| {
                let wk = if k == 0 || k == half { 0.5 } else { 1.0 };
                ((k as f64 * dth).cos(), 2.0 * wk * dth)
            })
            .collect();
        nodes
            .par_iter()
            .map(|&(rho, w)| {
                let ang: C64 = cosines.iter().map(|&(ct, wt)| C64::from_polar(wt, lambda * zn * rho * ct)).sum();
                radial(rho) * ang * (rho * w)
            })
            .collect()
    };
    Ok(terms.iter().sum())
}

/// Leading stationary-phase term `e^{iπ sgn/4} e^{iλφ(η₀)} (2π/λ)^{(d−1)/2}
/// |det ∇²φ(η₀)|^{−1/2} ψ(η₀)` with `φ(η) = z·η − G(j, η)`.
pub fn stationary_phase_prediction(z: &[f64], j: i32, lambda: f64, mu: f64, cutoff: &LpCutoff) -> Result<C64> {
    let n = z.len();
    if n != 1 && n != 2 {
        return Err(LabError::Validation(format!("z must have 1 or 2 components, got {n}")));
    }
    let zn = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    let c = g_scale(j, mu);
    let (a, b) = annulus_support(cutoff);
    if zn == 0.0 {
        return Err(LabError::NoCriticalPoint("z = 0 has no critical point in the annulus".into()));
    }
    let eta = (c / (2.0 * zn)).powi(2);
    if !(eta > a && eta < b) {
        return Err(LabError::NoCriticalPoint(format!(
            "critical radius {eta} lies outside the annulus ({a}, {b}); J decays rapidly"
        )));
    }
    let phi0 = zn * eta - c * eta.sqrt();
    let e32 = eta.powf(1.5);
    let (sgn, det) = if n == 1 { (1.0, c / (4.0 * e32)) } else { (0.0, c * c / (8.0 * e32 * e32)) };
    let amp = (2.0 * PI / lambda).powf(n as f64 / 2.0) * cutoff.multiplier(eta) / det.sqrt();
    Ok(C64::from_polar(amp, PI * sgn / 4.0 + lambda * phi0))
}

/// `|z|` whose critical point sits at radius `eta`.
pub fn z_for_radius(eta: f64, j: i32, mu: f64) -> f64 {
    g_scale(j, mu) / (2.0 * eta.sqrt())
}

/// Radii at which `sup_z |J|` is sampled (the plateau of the annulus
/// symbol, where the stationary-phase amplitude peaks).
pub const SUP_RADII: [f64; 5] = [0.9, 1.0, 1.1, 1.2, 1.25];

/// `sup_z |J(z, j, λ)|` over [`SUP_RADII`], `z` along the first axis.
pub fn sup_abs_j(d: usize, j: i32, lambda: f64, mu: f64, cutoff: &LpCutoff) -> Result<DispersiveSample> {
    if d != 2 && d != 3 {
        return Err(LabError::Validation(format!("d must be 2 or 3, got {d}")));
    }
    let mut best = DispersiveSample { z_norm: 0.0, j, lambda, re: 0.0, im: 0.0 };
    for eta in SUP_RADII {
        let zn = z_for_radius(eta, j, mu);
        let mut z = vec![0.0; d - 1];
        z[0] = zn;
        let v = oscillatory_j(&z, j, lambda, mu, cutoff)?;
        if v.norm() > best.value().norm() {
            best = DispersiveSample { z_norm: zn, j, lambda, re: v.re, im: v.im };
        }
    }
    Ok(best)
}

/// Log-log fit of `sup_z |J|` against `λ`; predicted slope `−(d−1)/2`.
pub fn dispersive_decay_fit(
    d: usize,
    j: i32,
    lambdas: &[f64],
    mu: f64,
    cutoff: &LpCutoff,
    tolerance: f64,
) -> Result<(ScalingFit, Vec<DispersiveSample>)> {
    if lambdas.len() < 6 {
        return Err(LabError::Validation(format!("need >= 6 lambda values, got {}", lambdas.len())));
    }
    if lambdas.iter().any(|&l| l < 50.0) || lambdas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(LabError::Validation("lambdas must be increasing and >= 50".into()));
    }
    let samples = lambdas.iter().map(|&l| sup_abs_j(d, j, l, mu, cutoff)).collect::<Result<Vec<_>>>()?;
    let xs = lambdas.iter().map(|l| l.log2()).collect();
    let ys = samples.iter().map(|s| s.value().norm().log2()).collect();
    let fit = ScalingFit::fit(xs, ys, -((d - 1) as f64) / 2.0, tolerance)?;
    Ok((fit, samples))
}

/// `m` log-spaced values from `a` to `b` inclusive.
pub fn log_spaced(a: f64, b: f64, m: usize) -> Vec<f64> {
    (0..m).map(|i| a * (b / a).powf(i as f64 / (m - 1).max(1) as f64)).collect()
}
