//! Normal-mode profiles of the degenerate operator.
//!
//! In the scaled variable `s = |ξ′| x_d` a mode with `λ = μ|ξ′|` solves
//!
//! ```text
//! κ s B″ + B′ + (μ − κ s) B = 0,      B(0) = 1,
//! ```
//!
//! whose regular solution is `B(s) = e^{−s} L^{1/κ−1}_ν(2s) / L^{1/κ−1}_ν(0)`
//! with `ν = (μ − 1)/(2κ)`. The series terminates exactly when
//! `μ = 2κn + 1`.

use crate::error::{LabError, Result};
use crate::grid;
use crate::ode::{self, StepControl};
use crate::quad::GaussLegendre;
use crate::specfun::{self, near_integer};
use serde::Serialize;
use std::io::Write;

/// Eigenvalue data of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeSpec {
    pub kappa: f64,
    pub mu: f64,
    pub n: Option<u32>,
}

impl ModeSpec {
    /// Quantized mode `μ = 2κn + 1`.
    pub fn quantized(kappa: f64, n: u32) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(ModeSpec { kappa, mu: quantized_mu(n, kappa), n: Some(n) })
    }

    /// Mode with an arbitrary `μ`; `n` is filled in when `μ` is quantized.
    pub fn with_mu(kappa: f64, mu: f64) -> Result<Self> {
        check_kappa(kappa)?;
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(LabError::Validation(format!("mu must be positive, got {mu}")));
        }
        let n = near_integer((mu - 1.0) / (2.0 * kappa)).filter(|&n| n >= 0).map(|n| n as u32);
        Ok(ModeSpec { kappa, mu, n })
    }

    /// Laguerre order `1/κ − 1`.
    pub fn order(&self) -> f64 {
        1.0 / self.kappa - 1.0
    }

    /// Laguerre degree `(μ − 1)/(2κ)`.
    pub fn degree(&self) -> f64 {
        (self.mu - 1.0) / (2.0 * self.kappa)
    }

    /// Checks the quantization invariant when `n` is present.
    pub fn validate(&self) -> Result<()> {
        check_kappa(self.kappa)?;
        if let Some(n) = self.n {
            let want = quantized_mu(n, self.kappa);
            if (self.mu - want).abs() > 1e-12 {
                return Err(LabError::Validation(format!("mu={} inconsistent with n={n} (expected {want})", self.mu)));
            }
        }
        Ok(())
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(LabError::Validation(format!("kappa must be positive, got {kappa}")))
    }
}

/// `2κn + 1`.
pub fn quantized_mu(n: u32, kappa: f64) -> f64 {
    2.0 * kappa * n as f64 + 1.0
}

/// Condition imposed where a profile is cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FarBoundary {
    /// No cut: the profile decays on the whole half-line.
    Decay,
    /// Cut at a zero of `B`.
    Dirichlet,
    /// Cut at a critical point of `B`.
    Neumann,
}

/// Sampled mode profile on a half-line grid.
#[derive(Debug, Clone, Serialize)]
pub struct ModeProfile {
    pub spec: ModeSpec,
    pub xi_norm: f64,
    pub s_grid: Vec<f64>,
    pub b: Vec<f64>,
    pub db: Vec<f64>,
    pub d2b: Vec<f64>,
    pub truncation_s_max: f64,
    pub contamination_bound: f64,
    pub far_boundary: FarBoundary,
}

impl ModeProfile {
    fn check(&self) -> Result<()> {
        let n = self.s_grid.len();
        if n < 16 || self.b.len() != n || self.db.len() != n || self.d2b.len() != n {
            return Err(LabError::Validation("profile arrays must have equal length >= 16".into()));
        }
        if !self.s_grid.windows(2).all(|w| w[1] > w[0]) || self.s_grid[0] < 0.0 {
            return Err(LabError::Validation("profile grid must be increasing and nonnegative".into()));
        }
        Ok(())
    }

    /// Writes `s,B,dB,d2B` rows preceded by `#` metadata lines.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# kappa={}", self.spec.kappa)?;
        writeln!(w, "# mu={}", self.spec.mu)?;
        match self.spec.n {
            Some(n) => writeln!(w, "# n={n}")?,
            None => writeln!(w, "# n=")?,
        }
        writeln!(w, "# truncation_s_max={}", self.truncation_s_max)?;
        writeln!(w, "# contamination_bound={:e}", self.contamination_bound)?;
        writeln!(w, "# far_boundary={:?}", self.far_boundary)?;
        writeln!(w, "s,B,dB,d2B")?;
        for i in 0..self.s_grid.len() {
            writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e}", self.s_grid[i], self.b[i], self.db[i], self.d2b[i])?;
        }
        Ok(())
    }
}

/// Pointwise evaluator of the closed-form profile, optionally cut at a
/// zero or critical point (beyond which it returns zero).
#[derive(Debug, Clone, Copy)]
pub struct ProfileEvaluator {
    pub spec: ModeSpec,
    lambda: f64,
    nu: f64,
    l0: f64,
    pub cut: Option<(f64, FarBoundary)>,
}

impl ProfileEvaluator {
    pub fn new(spec: ModeSpec) -> Result<Self> {
        spec.validate()?;
        let lambda = spec.order();
        let nu = spec.degree();
        let l0 = specfun::laguerre(lambda, nu, 0.0)?.value;
        if l0 == 0.0 || !l0.is_finite() {
            return Err(LabError::Domain(format!("L(0) vanishes for mu={}", spec.mu)));
        }
        Ok(ProfileEvaluator { spec, lambda, nu, l0, cut: None })
    }

    pub fn is_terminating(&self) -> bool {
        near_integer(self.nu).is_some_and(|n| n >= 0)
    }

    /// `(B, B′, B″)` at `s`, with the Frobenius values imposed at `s = 0`.
    pub fn eval(&self, s: f64) -> Result<[f64; 3]> {
        if let Some((sc, _)) = self.cut {
            if s > sc {
                return Ok([0.0; 3]);
            }
        }
        let (mu, k) = (self.spec.mu, self.spec.kappa);
        if s == 0.0 {
            return Ok([1.0, -mu, (mu * mu + k) / (k + 1.0)]);
        }
        let l = specfun::laguerre_with_derivatives(self.lambda, self.nu, 2.0 * s)?;
        let e = (-s).exp() / self.l0;
        let (v, d1, d2) = (l.value.value, l.d1, l.d2);
        Ok([e * v, e * (2.0 * d1 - v), e * (v - 4.0 * d1 + 4.0 * d2)])
    }

    fn sample(&self, grid: &[f64]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let mut b = Vec::with_capacity(grid.len());
        let mut db = Vec::with_capacity(grid.len());
        let mut d2b = Vec::with_capacity(grid.len());
        for &s in grid {
            let [v, d1, d2] = self.eval(s)?;
            b.push(v);
            db.push(d1);
            d2b.push(d2);
        }
        Ok((b, db, d2b))
    }
}

/// Relative size of the growing solution admixed into a non-terminating
/// profile at `s_max`: `|ν| e^{2 s_max} s_max^{−ν−1/κ}`.
pub fn contamination_estimate(spec: &ModeSpec, s_max: f64) -> f64 {
    let nu = spec.degree();
    if near_integer(nu).is_some_and(|n| n >= 0) {
        return 0.0;
    }
    let lg = nu.abs().ln() + 2.0 * s_max - (nu + 1.0 / spec.kappa) * s_max.ln();
    lg.exp()
}

/// Admissible contamination of a closed-form profile.
pub const CONTAMINATION_LIMIT: f64 = 1e-6;

/// Closed-form profile sampled on the graded grid up to `s_max`.
pub fn closed_form_profile(spec: ModeSpec, xi_norm: f64, s_max: f64) -> Result<ModeProfile> {
    if !(xi_norm > 0.0) {
        return Err(LabError::Validation(format!("xi_norm must be positive, got {xi_norm}")));
    }
    let ev = ProfileEvaluator::new(spec)?;
    let contamination_bound = contamination_estimate(&spec, s_max);
    if contamination_bound > CONTAMINATION_LIMIT {
        return Err(LabError::Truncation(format!(
            "non-terminating profile (nu={}) has contamination {contamination_bound:e} at s_max={s_max}",
            spec.degree()
        )));
    }
    let s_grid = grid::graded_s_grid(s_max)?;
    let (b, db, d2b) = ev.sample(&s_grid)?;
    Ok(ModeProfile {
        spec,
        xi_norm,
        s_grid,
        b,
        db,
        d2b,
        truncation_s_max: s_max,
        contamination_bound,
        far_boundary: FarBoundary::Decay,
    })
}

/// Tolerance on the size of an uncut non-terminating profile at `s_max`.
pub const UNCUT_TAIL_LIMIT: f64 = 1e-6;

/// Evaluator cut at the natural point of a non-terminating profile.
///
/// For `ν > 0` the cut is the `⌈ν⌉`-th zero of `B` (Dirichlet); for `ν < 0`
/// it is the first critical point of `B` (Neumann). On the cut domain the
/// profile is an exact eigenfunction, so its time dependence stays a pure
/// phase. Terminating profiles are returned uncut.
pub fn natural_cut_evaluator(spec: ModeSpec, s_max: f64) -> Result<ProfileEvaluator> {
    let mut ev = ProfileEvaluator::new(spec)?;
    if ev.is_terminating() {
        return Ok(ev);
    }
    let nu = spec.degree();
    let h = 0.02;
    let steps = (s_max / h).ceil() as usize;
    let (target, idx) = if nu > 0.0 { (nu.ceil() as usize, 0) } else { (1, 1) };
    let mut found = 0;
    let mut prev = ev.eval(0.0)?[idx];
    for i in 1..=steps {
        let s = i as f64 * h;
        let cur = ev.eval(s)?[idx];
        if prev != 0.0 && cur.signum() != prev.signum() {
            found += 1;
            if found == target {
                let sc = ode::bisect(|x| ev.eval(x).map(|v| v[idx]).unwrap_or(f64::NAN), s - h, s, 1e-12)?;
                let kind = if idx == 0 { FarBoundary::Dirichlet } else { FarBoundary::Neumann };
                ev.cut = Some((sc, kind));
                return Ok(ev);
            }
        }
        prev = cur;
    }
    let tail = ev.eval(s_max)?[0].abs();
    if tail > UNCUT_TAIL_LIMIT {
        return Err(LabError::Contamination(format!(
            "no natural cut below s_max={s_max} for nu={nu} and |B(s_max)|={tail:e}"
        )));
    }
    Ok(ev)
}

/// Profile sampled from [`natural_cut_evaluator`]; the grid ends at the cut.
pub fn natural_cut_profile(spec: ModeSpec, xi_norm: f64, s_max: f64) -> Result<ModeProfile> {
    let ev = natural_cut_evaluator(spec, s_max)?;
    let (end, far_boundary) = ev.cut.unwrap_or((s_max, FarBoundary::Decay));
    let mut s_grid: Vec<f64> = grid::graded_s_grid(s_max.max(2.0))?.into_iter().filter(|&s| s < end).collect();
    s_grid.push(end);
    while s_grid.len() < 16 {
        let mut refined = Vec::with_capacity(2 * s_grid.len());
        for w in s_grid.windows(2) {
            refined.push(w[0]);
            refined.push(0.5 * (w[0] + w[1]));
        }
        refined.push(end);
        s_grid = refined;
    }
    let (b, db, d2b) = ev.sample(&s_grid)?;
    Ok(ModeProfile {
        spec,
        xi_norm,
        s_grid,
        b,
        db,
        d2b,
        truncation_s_max: end,
        contamination_bound: 0.0,
        far_boundary,
    })
}

/// `max |κsB″ + B′ + (μ−κs)B| / (1 + |B|)` over the grid.
pub fn mode_ode_residual(profile: &ModeProfile) -> f64 {
    let (k, mu) = (profile.spec.kappa, profile.spec.mu);
    profile
        .s_grid
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let r = k * s * profile.d2b[i] + profile.db[i] + (mu - k * s) * profile.b[i];
            r.abs() / (1.0 + profile.b[i].abs())
        })
        .fold(0.0, f64::max)
}

/// `Q(f) = ∫₀^∞ κ x^{1/κ} (f′² + |ξ′|² f²) dx` with `f(x) = B(|ξ′| x)`.
///
/// Each grid cell is integrated with an 8-point Gauss rule applied to the
/// cubic Hermite interpolant of `B′² + B²`.
pub fn quadratic_form(profile: &ModeProfile, xi_norm: f64, kappa: f64) -> Result<f64> {
    profile.check()?;
    if !(xi_norm > 0.0) {
        return Err(LabError::Validation(format!("xi_norm must be positive, got {xi_norm}")));
    }
    let beta = 1.0 / kappa;
    let s = &profile.s_grid;
    let g: Vec<f64> = (0..s.len()).map(|i| profile.db[i].powi(2) + profile.b[i].powi(2)).collect();
    let dg: Vec<f64> = (0..s.len())
        .map(|i| 2.0 * profile.db[i] * profile.d2b[i] + 2.0 * profile.b[i] * profile.db[i])
        .collect();
    let integrand: Vec<f64> = (0..s.len()).map(|i| s[i].powf(beta) * g[i]).collect();
    let peak = integrand.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok(0.0);
    }
    let last = *integrand.last().unwrap();
    if !last.is_finite() || last.abs() > 1e-10 * peak {
        return Err(LabError::Divergence(format!(
            "Q integrand has not decayed at truncation ({last:e} vs peak {peak:e})"
        )));
    }
    // a regular profile has s·integrand → 0 at the boundary
    let lead = (1..s.len().min(4)).map(|i| s[i] * integrand[i].abs()).fold(0.0, f64::max);
    let bulk = (0..s.len()).map(|i| s[i] * integrand[i].abs()).fold(0.0, f64::max);
    if !lead.is_finite() || lead > 1e-6 * bulk {
        return Err(LabError::Divergence("Q integrand is not integrable at the boundary".into()));
    }
    let gl = GaussLegendre::new(8);
    let mut total = 0.0;
    for i in 0..s.len() - 1 {
        let (a, b) = (s[i], s[i + 1]);
        let h = b - a;
        let cell = |x: f64| {
            let t = (x - a) / h;
            let h00 = (1.0 + 2.0 * t) * (1.0 - t).powi(2);
            let h10 = t * (1.0 - t).powi(2);
            let h01 = t * t * (3.0 - 2.0 * t);
            let h11 = t * t * (t - 1.0);
            let gi = h00 * g[i] + h10 * h * dg[i] + h01 * g[i + 1] + h11 * h * dg[i + 1];
            x.powf(beta) * gi
        };
        total += gl.integrate(a, b, cell);
    }
    Ok(kappa * xi_norm.powf(1.0 - beta) * total)
}

fn mode_rhs(kappa: f64, mu: f64) -> impl Fn(f64, &[f64], &mut [f64]) {
    move |s, y, dy| {
        dy[0] = y[1];
        dy[1] = -(y[1] + (mu - kappa * s) * y[0]) / (kappa * s);
    }
}

/// Integrates the mode equation through `points` (monotone, starting at
/// `start`) and returns `(B, B′, B″)` at every point.
fn march(kappa: f64, mu: f64, start: f64, y0: [f64; 2], points: &[f64], blowup: Option<f64>) -> Result<Vec<[f64; 3]>> {
    let f = mode_rhs(kappa, mu);
    let ctl = StepControl { rtol: 1e-12, atol: 1e-300, h_init: 1e-3 * start.max(1e-6), ..Default::default() };
    let mut t = start;
    let mut y = y0;
    let mut out = Vec::with_capacity(points.len());
    let mut h = ctl.h_init;
    for &p in points {
        if p != t {
            let tr = ode::integrate(&f, t, &y, p, StepControl { h_init: h, ..ctl }, |_, y| match blowup {
                Some(lim) if y[0].abs() > lim => {
                    Some(LabError::Instability(format!("|B| exceeded {lim:e}: mu={mu} is not an eigenvalue")))
                }
                _ => None,
            })?;
            let n = tr.t.len();
            if n >= 2 {
                h = (tr.t[n - 1] - tr.t[n - 2]).abs().max(1e-12);
            }
            let yl = tr.y.last().unwrap();
            y = [yl[0], yl[1]];
            t = p;
        }
        let d2 = -(y[1] + (mu - kappa * t) * y[0]) / (kappa * t);
        out.push([y[0], y[1], d2]);
    }
    Ok(out)
}

/// Starting point of the shooting integration.
pub const SHOOTING_START: f64 = 1e-6;

/// Independent profile by direct integration of the mode equation.
///
/// A forward sweep from `s₀ = 1e−6` with Frobenius data detects
/// non-eigenvalues (the growing solution exceeds `1e6`). The returned
/// profile uses the forward solution up to the turning point `μ/κ` and a
/// backward-integrated decaying solution beyond it, matched by least
/// squares on an overlap window.
pub fn shooting_oracle(spec: ModeSpec, s_max: f64) -> Result<ModeProfile> {
    spec.validate()?;
    let (k, mu) = (spec.kappa, spec.mu);
    let s_grid = grid::graded_s_grid(s_max)?;
    let b2 = (mu * mu + k) / (k + 1.0);
    let s0 = SHOOTING_START;
    let y0 = [1.0 - mu * s0 + 0.5 * b2 * s0 * s0, -mu + b2 * s0];
    let pts: Vec<f64> = s_grid[1..].to_vec();
    let fwd = march(k, mu, s0, y0, &pts, Some(1e6))?;

    let s_match = (mu / k).clamp(1.0, s_max);
    let mut rows = vec![[1.0, -mu, b2]];
    if s_match >= s_max {
        rows.extend(fwd);
    } else {
        let far = s_max.max(mu / k) + 25.0;
        let back_pts: Vec<f64> = pts.iter().rev().copied().filter(|&s| s >= s_match - 1.0).collect();
        let back = march(k, mu, far, [1.0, -1.0], &back_pts, None)?;
        let first_back = pts.len() - back_pts.len();
        let (mut num, mut den) = (0.0, 0.0);
        for (j, &s) in back_pts.iter().enumerate() {
            if s <= s_match + 1.0 {
                let i = pts.len() - 1 - j;
                num += fwd[i][0] * back[j][0];
                den += back[j][0] * back[j][0];
            }
        }
        let scale = if den > 0.0 { num / den } else { 0.0 };
        for (i, &s) in pts.iter().enumerate() {
            if s < s_match || i < first_back {
                rows.push(fwd[i]);
            } else {
                let j = pts.len() - 1 - i;
                rows.push([back[j][0] * scale, back[j][1] * scale, back[j][2] * scale]);
            }
        }
    }
    Ok(ModeProfile {
        spec,
        xi_norm: 1.0,
        b: rows.iter().map(|r| r[0]).collect(),
        db: rows.iter().map(|r| r[1]).collect(),
        d2b: rows.iter().map(|r| r[2]).collect(),
        s_grid,
        truncation_s_max: s_max,
        contamination_bound: 0.0,
        far_boundary: FarBoundary::Decay,
    })
}

/// Default window for the zero-spacing law, as a fraction of `μ/κ`.
pub const ZERO_WINDOW: (f64, f64) = (0.0, 0.125);

/// Deviations of a profile from its asymptotic regimes.
#[derive(Debug, Clone, Serialize)]
pub struct WkbReport {
    /// `B′/B` at the first positive node, expected `−μ`.
    pub small_s_log_derivative: f64,
    pub small_s_deviation: f64,
    /// `B′/B` at the last node, expected `−1`.
    pub large_s_log_derivative: f64,
    pub large_s_deviation: f64,
    /// Zeros of `B` found in the window.
    pub zeros: Vec<f64>,
    /// `2(√s_{k+1} − √s_k)√(μ/κ)/π − 1` for consecutive zeros in the window.
    pub spacing_deviations: Vec<f64>,
    pub window: (f64, f64),
    pub max_spacing_deviation: f64,
}

/// WKB diagnostics in the default zero window.
pub fn wkb_diagnostics(profile: &ModeProfile) -> Result<WkbReport> {
    wkb_diagnostics_in(profile, ZERO_WINDOW)
}

/// WKB diagnostics with the zero window `(lo·μ/κ, hi·μ/κ)`.
pub fn wkb_diagnostics_in(profile: &ModeProfile, window: (f64, f64)) -> Result<WkbReport> {
    profile.check()?;
    let (k, mu) = (profile.spec.kappa, profile.spec.mu);
    let s = &profile.s_grid;
    let i1 = s.iter().position(|&v| v > 0.0).unwrap_or(0);
    let small = profile.db[i1] / profile.b[i1];
    let last = s.len() - 1;
    let large = profile.db[last] / profile.b[last];
    let exact = ProfileEvaluator::new(profile.spec).ok();
    let mut zeros = Vec::new();
    for i in 0..last {
        if profile.b[i] != 0.0 && profile.b[i].signum() != profile.b[i + 1].signum() {
            let z = match &exact {
                Some(ev) => ode::bisect(|x| ev.eval(x).map(|v| v[0]).unwrap_or(f64::NAN), s[i], s[i + 1], 1e-12)?,
                None => s[i] - profile.b[i] * (s[i + 1] - s[i]) / (profile.b[i + 1] - profile.b[i]),
            };
            zeros.push(z);
        }
    }
    let (lo, hi) = (window.0 * mu / k, window.1 * mu / k);
    let inside: Vec<f64> = zeros.iter().copied().filter(|&z| z > lo && z < hi).collect();
    let spacing_deviations: Vec<f64> = inside
        .windows(2)
        .map(|w| 2.0 * (w[1].sqrt() - w[0].sqrt()) * (mu / k).sqrt() / std::f64::consts::PI - 1.0)
        .collect();
    let max_spacing_deviation = spacing_deviations.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(WkbReport {
        small_s_log_derivative: small,
        small_s_deviation: (small + mu).abs() / mu,
        large_s_log_derivative: large,
        large_s_deviation: (large + 1.0).abs(),
        zeros,
        spacing_deviations,
        window: (lo, hi),
        max_spacing_deviation,
    })
}
