//! Tangential Fourier synthesis of gallery modes and dyadic wave packets.
//!
//! Fields live on a tensor grid: a graded set of normal heights `x_d` times
//! a periodic lattice in `x′`. The `ξ′` integral is a lattice Riemann sum,
//! so `u(x′) = L^{−(d−1)} Σ_ξ e^{ix′·ξ} û(ξ)`.

use crate::error::{LabError, Result};
use crate::grid;
use crate::spectral::{natural_cut_evaluator, ModeSpec, ProfileEvaluator};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

pub type C64 = Complex64;

/// Periodic tangential lattice of `N^{d−1}` points on a box of side `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentialGrid {
    pub d: usize,
    pub box_length: f64,
    pub points_per_dim: usize,
}

impl TangentialGrid {
    pub fn new(d: usize, box_length: f64, points_per_dim: usize) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(LabError::Validation(format!("dimension d must be 2 or 3, got {d}")));
        }
        if !points_per_dim.is_power_of_two() || points_per_dim < 4 {
            return Err(LabError::Validation(format!("N must be a power of two >= 4, got {points_per_dim}")));
        }
        if !(box_length > 0.0) {
            return Err(LabError::Validation(format!("box length must be positive, got {box_length}")));
        }
        Ok(TangentialGrid { d, box_length, points_per_dim })
    }

    pub fn dims(&self) -> usize {
        self.d - 1
    }

    /// Number of lattice points per normal slice.
    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dims() as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn freq_spacing(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Largest resolved `|ξ′|` along an axis, `πN/L`.
    pub fn k_max(&self) -> f64 {
        PI * self.points_per_dim as f64 / self.box_length
    }

    pub fn cell_volume(&self) -> f64 {
        (self.box_length / self.points_per_dim as f64).powi(self.dims() as i32)
    }

    fn signed(&self, i: usize) -> i64 {
        let n = self.points_per_dim;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Integer lattice coordinates of flat index `k`.
    pub fn lattice(&self, k: usize) -> Vec<i64> {
        let n = self.points_per_dim;
        match self.dims() {
            1 => vec![self.signed(k)],
            _ => vec![self.signed(k / n), self.signed(k % n)],
        }
    }

    /// Wave vector of flat index `k`.
    pub fn frequency(&self, k: usize) -> Vec<f64> {
        let h = self.freq_spacing();
        self.lattice(k).into_iter().map(|m| h * m as f64).collect()
    }

    /// `|ξ′|` at every lattice point.
    pub fn freq_norms(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.frequency(k).iter().map(|v| v * v).sum::<f64>().sqrt()).collect()
    }

    /// Position of flat index `k`.
    pub fn position(&self, k: usize) -> Vec<f64> {
        let n = self.points_per_dim;
        let h = self.box_length / n as f64;
        match self.dims() {
            1 => vec![h * k as f64],
            _ => vec![h * (k / n) as f64, h * (k % n) as f64],
        }
    }
}

/// Plans for the per-slice transforms of one grid.
#[derive(Clone)]
pub struct SliceFft {
    grid: TangentialGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SliceFft {
    pub fn new(grid: TangentialGrid) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.points_per_dim;
        SliceFft { grid, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    fn apply(&self, data: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.points_per_dim;
        if self.grid.dims() == 1 {
            plan.process(data);
            return;
        }
        for row in data.chunks_mut(n) {
            plan.process(row);
        }
        let mut col = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                col[r] = data[r * n + c];
            }
            plan.process(&mut col);
            for r in 0..n {
                data[r * n + c] = col[r];
            }
        }
    }

    /// Physical samples from lattice coefficients.
    pub fn to_physical(&self, data: &mut [C64]) {
        self.apply(data, &self.inverse);
        let s = 1.0 / self.grid.box_length.powi(self.grid.dims() as i32);
        data.iter_mut().for_each(|v| *v *= s);
    }

    /// Lattice coefficients from physical samples.
    pub fn to_spectral(&self, data: &mut [C64]) {
        self.apply(data, &self.forward);
        let s = self.grid.cell_volume();
        data.iter_mut().for_each(|v| *v *= s);
    }
}

/// Annular bump `a(r) = exp(−1/(1 − ((r−1)/ε)²))` on `|r − 1| < ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub epsilon: f64,
}

impl Default for Window {
    fn default() -> Self {
        Window { epsilon: 0.1 }
    }
}

impl Window {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(LabError::Validation(format!("window epsilon must lie in (0, 1/2), got {epsilon}")));
        }
        Ok(Window { epsilon })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let u = (r - 1.0) / self.epsilon;
        if u.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - u * u)).exp()
        }
    }
}

/// Radial cutoff `ψ`: equal to 1 below `inner`, 0 above `outer`, with a
/// smooth `e^{−1/x}` transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpCutoff {
    pub inner: f64,
    pub outer: f64,
}

impl Default for LpCutoff {
    fn default() -> Self {
        LpCutoff { inner: 1.25, outer: 1.75 }
    }
}

fn smooth_step(x: f64) -> f64 {
    let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let (a, b) = (f(x), f(1.0 - x));
    a / (a + b)
}

impl LpCutoff {
    pub fn psi(&self, r: f64) -> f64 {
        if r <= self.inner {
            1.0
        } else if r >= self.outer {
            0.0
        } else {
            1.0 - smooth_step((r - self.inner) / (self.outer - self.inner))
        }
    }

    /// Annulus symbol `ψ(r) − ψ(2r)`.
    pub fn multiplier(&self, r: f64) -> f64 {
        self.psi(r) - self.psi(2.0 * r)
    }
}

/// Complex samples on the tensor grid, row-major `[x_d][x′]`.
#[derive(Debug, Clone)]
pub struct Field {
    pub grid: TangentialGrid,
    pub xd: Vec<f64>,
    pub values: Vec<C64>,
    pub spectrum: Vec<C64>,
    /// Spectrum of `∂_d u`, when known exactly.
    pub spectrum_d1: Option<Vec<C64>>,
    /// Spectrum of `∂_d² u`, when known exactly.
    pub spectrum_d2: Option<Vec<C64>>,
    pub time_frequency: Option<f64>,
}

impl Field {
    /// Builds a field from its spectra; physical values by inverse transform.
    pub fn from_spectra(
        grid: TangentialGrid,
        xd: Vec<f64>,
        spectrum: Vec<C64>,
        spectrum_d1: Option<Vec<C64>>,
        spectrum_d2: Option<Vec<C64>>,
        time_frequency: Option<f64>,
    ) -> Field {
        let values = physical(&grid, &spectrum);
        Field { grid, xd, values, spectrum, spectrum_d1, spectrum_d2, time_frequency }
    }

    pub fn slice_len(&self) -> usize {
        self.grid.len()
    }

    pub fn slice(&self, i: usize) -> &[C64] {
        let m = self.slice_len();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn spectrum_slice(&self, i: usize) -> &[C64] {
        let m = self.slice_len();
        &self.spectrum[i * m..(i + 1) * m]
    }

    /// Multiplies everything by `e^{iωt}` (requires a time frequency).
    pub fn at_time(&self, t: f64) -> Result<Field> {
        let w = self
            .time_frequency
            .ok_or_else(|| LabError::Validation("field has no time frequency".into()))?;
        Ok(self.scaled(C64::from_polar(1.0, w * t)))
    }

    /// Field multiplied by a complex constant.
    pub fn scaled(&self, c: C64) -> Field {
        let mul = |v: &Vec<C64>| v.iter().map(|x| x * c).collect::<Vec<_>>();
        Field {
            grid: self.grid,
            xd: self.xd.clone(),
            values: mul(&self.values),
            spectrum: mul(&self.spectrum),
            spectrum_d1: self.spectrum_d1.as_ref().map(mul),
            spectrum_d2: self.spectrum_d2.as_ref().map(mul),
            time_frequency: self.time_frequency,
        }
    }

    /// Maximum round-trip error between values and spectrum.
    pub fn roundtrip_error(&self) -> f64 {
        let back = spectral(&self.grid, &self.values);
        let scale = self.spectrum.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        back.iter().zip(&self.spectrum).fold(0.0f64, |m, (a, b)| m.max((a - b).norm())) / scale.max(f64::MIN_POSITIVE)
    }

    /// `∫|u(x_d,·)|² dx′` per slice from physical samples.
    pub fn slice_l2_physical(&self) -> Vec<f64> {
        let vol = self.grid.cell_volume();
        self.values.chunks(self.slice_len()).map(|s| vol * s.iter().map(|v| v.norm_sqr()).sum::<f64>()).collect()
    }

    /// `∫|u(x_d,·)|² dx′` per slice from the spectrum (Plancherel).
    pub fn slice_l2_spectral(&self) -> Vec<f64> {
        let s = 1.0 / self.grid.box_length.powi(self.grid.dims() as i32);
        self.spectrum.chunks(self.slice_len()).map(|c| s * c.iter().map(|v| v.norm_sqr()).sum::<f64>()).collect()
    }

    /// Binary export: magic `GWF1`, `d:u32`, `L:f64`, `N:u32`, `n_xd:u32`,
    /// the `x_d` values as `f64`, then the physical samples as complex64
    /// (`f32` real, `f32` imaginary), row-major `[x_d][x′]`, all little-endian.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"GWF1")?;
        w.write_all(&(self.grid.d as u32).to_le_bytes())?;
        w.write_all(&self.grid.box_length.to_le_bytes())?;
        w.write_all(&(self.grid.points_per_dim as u32).to_le_bytes())?;
        w.write_all(&(self.xd.len() as u32).to_le_bytes())?;
        for x in &self.xd {
            w.write_all(&x.to_le_bytes())?;
        }
        for v in &self.values {
            w.write_all(&(v.re as f32).to_le_bytes())?;
            w.write_all(&(v.im as f32).to_le_bytes())?;
        }
        Ok(())
    }

    /// CSV summary `x_d,l2_slice,max_abs` per normal slice.
    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x_d,l2_slice,max_abs")?;
        let l2 = self.slice_l2_spectral();
        for (i, x) in self.xd.iter().enumerate() {
            let mx = self.slice(i).iter().fold(0.0f64, |m, v| m.max(v.norm()));
            writeln!(w, "{x:.15e},{:.15e},{mx:.15e}", l2[i].sqrt())?;
        }
        Ok(())
    }
}

/// Inverse transform of every slice.
pub fn physical(grid: &TangentialGrid, spectrum: &[C64]) -> Vec<C64> {
    let fft = SliceFft::new(*grid);
    let mut out = spectrum.to_vec();
    out.par_chunks_mut(grid.len()).for_each(|s| fft.to_physical(s));
    out
}

/// Forward transform of every slice.
pub fn spectral(grid: &TangentialGrid, values: &[C64]) -> Vec<C64> {
    let fft = SliceFft::new(*grid);
    let mut out = values.to_vec();
    out.par_chunks_mut(grid.len()).for_each(|s| fft.to_spectral(s));
    out
}

/// Applies `ψ(|ξ′|/λ) − ψ(2|ξ′|/λ)` to every spectrum of the field.
pub fn lp_projector(field: &Field, lambda: f64, cutoff: LpCutoff) -> Result<Field> {
    let g = &field.grid;
    if 2.0 * lambda > g.k_max() || g.freq_spacing() > lambda / 8.0 {
        return Err(LabError::Band(format!(
            "annulus around lambda={lambda} not resolved (k_max={}, spacing={})",
            g.k_max(),
            g.freq_spacing()
        )));
    }
    let m: Vec<f64> = g.freq_norms().iter().map(|r| cutoff.multiplier(r / lambda)).collect();
    let apply = |v: &Vec<C64>| v.chunks(m.len()).flat_map(|s| s.iter().zip(&m).map(|(a, b)| a * b)).collect::<Vec<_>>();
    Ok(Field::from_spectra(
        field.grid,
        field.xd.clone(),
        apply(&field.spectrum),
        field.spectrum_d1.as_ref().map(apply),
        field.spectrum_d2.as_ref().map(apply),
        field.time_frequency,
    ))
}

/// Squared integer norm of a lattice point, used to share profile work
/// between lattice points of equal `|ξ′|`.
fn radius_key(grid: &TangentialGrid, k: usize) -> i64 {
    grid.lattice(k).iter().map(|m| m * m).sum()
}

/// Assembles `û(x_d, ξ) = c(ξ) B_ξ(|ξ| x_d)` together with its normal
/// derivatives. `profile(k)` returns the evaluator for lattice point `k`.
fn assemble<F>(grid: &TangentialGrid, xd: &[f64], coef: &[C64], profile: F) -> Result<(Vec<C64>, Vec<C64>, Vec<C64>)>
where
    F: Fn(usize) -> Result<ProfileEvaluator> + Sync,
{
    let m = grid.len();
    let norms = grid.freq_norms();
    let active: Vec<usize> = (0..m).filter(|&k| coef[k] != C64::new(0.0, 0.0)).collect();
    // one profile table per distinct radius
    let mut reps: HashMap<i64, usize> = HashMap::new();
    for &k in &active {
        reps.entry(radius_key(grid, k)).or_insert(k);
    }
    let mut keys: Vec<i64> = reps.keys().copied().collect();
    keys.sort_unstable();
    let tables: Vec<(i64, Vec<[f64; 3]>)> = keys
        .par_iter()
        .map(|&key| {
            let k = reps[&key];
            let r = norms[k];
            let ev = profile(k)?;
            let rows = xd.iter().map(|&x| ev.eval(r * x)).collect::<Result<Vec<_>>>()?;
            Ok((key, rows))
        })
        .collect::<Result<Vec<_>>>()?;
    let tables: HashMap<i64, Vec<[f64; 3]>> = tables.into_iter().collect();
    let zero = C64::new(0.0, 0.0);
    let mut s0 = vec![zero; xd.len() * m];
    let mut s1 = vec![zero; xd.len() * m];
    let mut s2 = vec![zero; xd.len() * m];
    for &k in &active {
        let tab = &tables[&radius_key(grid, k)];
        let r = norms[k];
        for (i, row) in tab.iter().enumerate() {
            s0[i * m + k] = coef[k] * row[0];
            s1[i * m + k] = coef[k] * (r * row[1]);
            s2[i * m + k] = coef[k] * (r * r * row[2]);
        }
    }
    Ok((s0, s1, s2))
}

/// Normal cut-off for mode evaluation in the scaled variable.
pub const PROFILE_S_MAX: f64 = 40.0;

fn mode_evaluator(spec: ModeSpec) -> Result<ProfileEvaluator> {
    let ev = ProfileEvaluator::new(spec)?;
    if ev.is_terminating() {
        Ok(ev)
    } else {
        natural_cut_evaluator(spec, PROFILE_S_MAX)
    }
}

/// Gallery mode `u = (2π)^{−(d−1)} ∫ e^{ix′·ξ′} B(μ, |ξ′|x_d) φ̂(ξ′) dξ′`
/// from physical samples of `φ`.
pub fn synth_gallery_mode(phi: &[C64], mode: ModeSpec, grid: TangentialGrid, xd: &[f64]) -> Result<Field> {
    if phi.len() != grid.len() {
        return Err(LabError::Validation(format!("phi has {} samples, grid needs {}", phi.len(), grid.len())));
    }
    let mut hat = phi.to_vec();
    SliceFft::new(grid).to_spectral(&mut hat);
    gallery_mode_from_spectrum(&hat, mode, grid, xd)
}

/// [`synth_gallery_mode`] from lattice coefficients `φ̂`.
pub fn gallery_mode_from_spectrum(hat: &[C64], mode: ModeSpec, grid: TangentialGrid, xd: &[f64]) -> Result<Field> {
    let ev = mode_evaluator(mode)?;
    let (s0, s1, s2) = assemble(&grid, xd, hat, |_| Ok(ev))?;
    Ok(Field::from_spectra(grid, xd.to_vec(), s0, Some(s1), Some(s2), None))
}

/// Residual of `(κx_dΔ + ∂_d + μ|∇_{x′}|)u = 0` relative to its largest term.
pub fn mode_residual(field: &Field, kappa: f64, mu: f64) -> Result<f64> {
    let (d1, d2) = normal_spectra(field)?;
    let m = field.slice_len();
    let norms = field.grid.freq_norms();
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for (i, &x) in field.xd.iter().enumerate() {
        for k in 0..m {
            let u = field.spectrum[i * m + k];
            let r = norms[k];
            let t1 = (d2[i * m + k] - u * (r * r)) * (kappa * x);
            let t2 = d1[i * m + k];
            let t3 = u * (mu * r);
            worst = worst.max((t1 + t2 + t3).norm());
            scale = scale.max(t1.norm()).max(t2.norm()).max(t3.norm());
        }
    }
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}

/// Residual of `(∂_t² − κx_dΔ − ∂_d)u = 0` for a field with time
/// dependence `e^{iωt}`, relative to its largest term.
pub fn wave_residual(field: &Field, kappa: f64) -> Result<f64> {
    let w = field.time_frequency.ok_or_else(|| LabError::Validation("field has no time frequency".into()))?;
    let (d1, d2) = normal_spectra(field)?;
    let m = field.slice_len();
    let norms = field.grid.freq_norms();
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for (i, &x) in field.xd.iter().enumerate() {
        for k in 0..m {
            let u = field.spectrum[i * m + k];
            let r = norms[k];
            let t1 = u * (-w * w);
            let t2 = (d2[i * m + k] - u * (r * r)) * (-kappa * x);
            let t3 = -d1[i * m + k];
            worst = worst.max((t1 + t2 + t3).norm());
            scale = scale.max(t1.norm()).max(t2.norm()).max(t3.norm());
        }
    }
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}

fn normal_spectra(field: &Field) -> Result<(&Vec<C64>, &Vec<C64>)> {
    match (&field.spectrum_d1, &field.spectrum_d2) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(LabError::Validation("field carries no normal derivative spectra".into())),
    }
}

/// Dyadic packet parameters and its grid budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PacketSpec {
    pub j: u32,
    pub d: usize,
    pub kappa: f64,
    pub window: Window,
    /// Box side at `j = 0`; level `j` uses `L₀ 2^{−2j}`.
    pub box_length_0: f64,
    pub points_per_dim: usize,
    /// Largest scaled height `2^{2j} x_d`.
    pub sigma_max: f64,
    /// Uniform spacing of the scaled heights beyond 1.
    pub sigma_step: f64,
}

impl PacketSpec {
    /// Default budget: `d = 2` uses `L₀ = 256π`, `N = 1024`; `d = 3` uses
    /// `L₀ = 32π`, `N = 64`.
    pub fn new(j: u32, d: usize, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(LabError::Validation(format!("kappa must be positive, got {kappa}")));
        }
        let (l0, n, step) = match d {
            2 => (2.0 * PI * 128.0, 1024, 0.025),
            3 => (2.0 * PI * 16.0, 64, 0.2),
            _ => return Err(LabError::Validation(format!("dimension d must be 2 or 3, got {d}"))),
        };
        Ok(PacketSpec {
            j,
            d,
            kappa,
            window: Window::default(),
            box_length_0: l0,
            points_per_dim: n,
            sigma_max: 45.0,
            sigma_step: step,
        })
    }

    pub fn scale(&self) -> f64 {
        4f64.powi(self.j as i32)
    }

    pub fn grid(&self) -> Result<TangentialGrid> {
        TangentialGrid::new(self.d, self.box_length_0 / self.scale(), self.points_per_dim)
    }

    /// Normal heights `x_d = σ / 2^{2j}` on the graded σ-grid.
    pub fn xd_grid(&self) -> Result<Vec<f64>> {
        let sig = grid::graded_grid_with(self.sigma_max, self.sigma_step)?;
        let s = self.scale();
        Ok(sig.into_iter().map(|v| v / s).collect())
    }

    /// Checks that the window annulus is resolved with room to spare.
    pub fn check_budget(&self) -> Result<()> {
        let g = self.grid()?;
        let lam = self.scale();
        if (1.0 + self.window.epsilon) * lam * 2.0 > g.k_max() {
            return Err(LabError::Band(format!("k_max={} does not cover the annulus at j={}", g.k_max(), self.j)));
        }
        if g.freq_spacing() > self.window.epsilon * lam / 2.0 {
            return Err(LabError::Band(format!("lattice too coarse across the window at j={}", self.j)));
        }
        Ok(())
    }

    /// `2^{2j(d/2 − 1/(2κ))}`, the normalization of the packet data.
    pub fn normalization(&self) -> f64 {
        2f64.powf(2.0 * self.j as f64 * (self.d as f64 / 2.0 - 1.0 / (2.0 * self.kappa)))
    }
}

/// `U^j(t)`: spectrum `e^{it2^j} B(2^{2j}/|ξ′|, |ξ′|x_d) a(2^{−2j}ξ′)`.
pub fn wave_packet(spec: &PacketSpec, t: f64) -> Result<Field> {
    spec.check_budget()?;
    let grid = spec.grid()?;
    let xd = spec.xd_grid()?;
    let lam = spec.scale();
    let norms = grid.freq_norms();
    let coef: Vec<C64> = norms.iter().map(|&r| C64::new(spec.window.eval(r / lam), 0.0)).collect();
    let kappa = spec.kappa;
    let (s0, s1, s2) = assemble(&grid, &xd, &coef, |k| {
        let mu = lam / norms[k];
        natural_cut_evaluator(ModeSpec::with_mu(kappa, mu)?, PROFILE_S_MAX)
    })?;
    let omega = 2f64.powi(spec.j as i32);
    let field = Field::from_spectra(grid, xd, s0, Some(s1), Some(s2), Some(omega));
    if t == 0.0 {
        Ok(field)
    } else {
        field.at_time(t)
    }
}

/// Normalized data `(ψ^j(0), ∂_tψ^j(0))` with `ψ^j = U^j / 2^{2j(d/2 − 1/(2κ))}`.
pub fn packet_initial_data(spec: &PacketSpec) -> Result<(Field, Field)> {
    let u = wave_packet(spec, 0.0)?;
    let psi0 = u.scaled(C64::new(1.0 / spec.normalization(), 0.0));
    let omega = 2f64.powi(spec.j as i32);
    let psi1 = psi0.scaled(C64::new(0.0, omega));
    Ok((psi0, psi1))
}
