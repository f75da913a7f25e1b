//! Norms of fields: the weighted energy norm, power-weighted L², spatial
//! `L^r`, mixed `L^q_t L^r_x`, and the Bernstein surrogate for `H^{2s}`.
//!
//! Normal integrals use product-Simpson weights for `x_d^β` on the graded
//! grid; tangential integrals are lattice sums times the cell volume (or
//! Plancherel sums on the spectrum).

use crate::error::{LabError, Result};
use crate::quad::power_weighted_simpson_weights;
use crate::synthesis::{physical, Field, C64};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

/// Spatial or temporal Lebesgue exponent; `f64::INFINITY` means sup.
pub type Exponent = f64;

pub(crate) fn ser_exponent<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

/// Space-time norm request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormRequest {
    #[serde(serialize_with = "ser_exponent")]
    pub q: Exponent,
    #[serde(serialize_with = "ser_exponent")]
    pub r: Exponent,
    pub time_interval: (f64, f64),
    pub time_samples: usize,
}

impl NormRequest {
    pub fn new(q: Exponent, r: Exponent, time_interval: (f64, f64), time_samples: usize) -> Result<Self> {
        if !(q >= 2.0) || !(r >= 2.0) {
            return Err(LabError::Validation(format!("exponents must be >= 2 (q={q}, r={r})")));
        }
        if time_samples < 4 {
            return Err(LabError::Validation(format!("need at least 4 time samples, got {time_samples}")));
        }
        if !(time_interval.1 > time_interval.0) {
            return Err(LabError::Validation("time interval must be nonempty".into()));
        }
        Ok(NormRequest { q, r, time_interval, time_samples })
    }

    /// Equispaced sample times including both endpoints.
    pub fn times(&self) -> Vec<f64> {
        let (a, b) = self.time_interval;
        let n = self.time_samples;
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }
}

/// Result of a mixed-norm evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    #[serde(serialize_with = "ser_exponent")]
    pub q: Exponent,
    #[serde(serialize_with = "ser_exponent")]
    pub r: Exponent,
    pub value: f64,
    pub per_time_values: Vec<f64>,
    #[serde(rename = "error_estimate")]
    pub quadrature_error_estimate: f64,
}

impl NormReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| LabError::Io(e.to_string()))
    }
}

fn weights(xd: &[f64], beta: f64) -> Result<Vec<f64>> {
    if !(beta > -1.0) {
        return Err(LabError::Divergence(format!("weight x_d^{beta} is not integrable at the boundary")));
    }
    Ok(power_weighted_simpson_weights(xd, beta))
}

fn check_decay(per_slice: &[f64], what: &str) -> Result<()> {
    let peak = per_slice.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let last = per_slice.last().copied().unwrap_or(0.0).abs();
    if !last.is_finite() || last > 1e-10 * peak {
        return Err(LabError::Divergence(format!("{what} integrand has not decayed at truncation ({last:e} vs {peak:e})")));
    }
    Ok(())
}

/// `∫ |∇w(x_d,·)|² dx′` per slice from exact spectra.
fn slice_gradient_sq(w: &Field) -> Result<Vec<f64>> {
    let d1 = w
        .spectrum_d1
        .as_ref()
        .ok_or_else(|| LabError::Validation("gradient needs the normal derivative spectrum".into()))?;
    let norms = w.grid.freq_norms();
    let m = w.slice_len();
    let s = 1.0 / w.grid.box_length.powi(w.grid.dims() as i32);
    Ok((0..w.xd.len())
        .map(|i| {
            s * (0..m)
                .map(|k| d1[i * m + k].norm_sqr() + norms[k] * norms[k] * w.spectrum[i * m + k].norm_sqr())
                .sum::<f64>()
        })
        .collect())
}

/// `‖(s, ∇w)‖_H = (∫ x_d^{1/κ−1} (|s|² + κ x_d |∇w|²) dx)^{1/2}`.
///
/// `w_field` is the field whose full spatial gradient enters the norm.
pub fn h_norm(s_field: &Field, w_field: &Field, kappa: f64) -> Result<f64> {
    if s_field.xd != w_field.xd || s_field.grid != w_field.grid {
        return Err(LabError::Validation("H-norm fields must share a grid".into()));
    }
    let xd = &s_field.xd;
    let s2 = s_field.slice_l2_spectral();
    let g2 = slice_gradient_sq(w_field)?;
    let beta = 1.0 / kappa - 1.0;
    let per: Vec<f64> = (0..xd.len()).map(|i| s2[i] + kappa * xd[i] * g2[i]).collect();
    check_decay(&per, "H-norm")?;
    let w0 = weights(xd, beta)?;
    let w1 = weights(xd, beta + 1.0)?;
    let total: f64 = (0..xd.len()).map(|i| w0[i] * s2[i] + kappa * w1[i] * g2[i]).sum();
    Ok(total.max(0.0).sqrt())
}

/// `(∫ x_d^{2α} |u|² dx)^{1/2}`.
pub fn weighted_l2(field: &Field, alpha: f64) -> Result<f64> {
    let per = field.slice_l2_spectral();
    weighted_slices(&field.xd, &per, alpha)
}

/// `(∫ x_d^{2α} |∇u|² dx)^{1/2}`.
pub fn weighted_gradient_l2(field: &Field, alpha: f64) -> Result<f64> {
    let per = slice_gradient_sq(field)?;
    weighted_slices(&field.xd, &per, alpha)
}

fn weighted_slices(xd: &[f64], per: &[f64], alpha: f64) -> Result<f64> {
    if 2.0 * alpha <= -1.0 && per.first().copied().unwrap_or(0.0) > 0.0 {
        return Err(LabError::Divergence(format!("x_d^{} |u|² is not integrable at the boundary", 2.0 * alpha)));
    }
    check_decay(per, "weighted L2")?;
    let w = weights(xd, 2.0 * alpha)?;
    Ok(w.iter().zip(per).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt())
}

/// Spatial `L^r` norm of physical samples on the field's grid.
pub fn lr_norm_of(field: &Field, values: &[f64], r: Exponent) -> Result<f64> {
    if r.is_infinite() {
        return Ok(values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    let m = field.slice_len();
    let vol = field.grid.cell_volume();
    let per: Vec<f64> = values.par_chunks(m).map(|s| vol * s.iter().map(|v| v.abs().powf(r)).sum::<f64>()).collect();
    check_decay(&per, "L^r")?;
    let w = weights(&field.xd, 0.0)?;
    Ok(w.iter().zip(&per).map(|(a, b)| a * b).sum::<f64>().max(0.0).powf(1.0 / r))
}

/// `‖u‖_{L^r}` of the field itself; `r = 2` uses the spectrum.
pub fn lr_norm(field: &Field, r: Exponent) -> Result<f64> {
    if r == 2.0 {
        return weighted_l2(field, 0.0);
    }
    let mags: Vec<f64> = field.values.iter().map(|v| v.norm()).collect();
    lr_norm_of(field, &mags, r)
}

/// Pointwise Frobenius norm of the Hessian `∇²u`: normal derivatives from
/// the exact spectra, tangential ones spectrally.
pub fn hessian_magnitude(field: &Field) -> Result<Vec<f64>> {
    let (d1, d2) = match (&field.spectrum_d1, &field.spectrum_d2) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(LabError::Validation("Hessian needs normal derivative spectra".into())),
    };
    let g = &field.grid;
    let m = g.len();
    let freqs: Vec<Vec<f64>> = (0..m).map(|k| g.frequency(k)).collect();
    let dims = g.dims();
    let i = C64::new(0.0, 1.0);
    let mut comps: Vec<(f64, Vec<C64>)> = vec![(1.0, d2.clone())];
    for a in 0..dims {
        let c: Vec<C64> = d1.iter().enumerate().map(|(idx, v)| v * i * freqs[idx % m][a]).collect();
        comps.push((2.0, c));
        for b in a..dims {
            let mult = if a == b { 1.0 } else { 2.0 };
            let c: Vec<C64> = field
                .spectrum
                .iter()
                .enumerate()
                .map(|(idx, v)| -v * (freqs[idx % m][a] * freqs[idx % m][b]))
                .collect();
            comps.push((mult, c));
        }
    }
    let mut acc = vec![0.0; field.values.len()];
    for (mult, spec) in comps {
        let vals = physical(g, &spec);
        acc.iter_mut().zip(&vals).for_each(|(a, v)| *a += mult * v.norm_sqr());
    }
    Ok(acc.into_iter().map(f64::sqrt).collect())
}

/// `‖∇²u‖_{L^r}`.
pub fn hessian_lr_norm(field: &Field, r: Exponent) -> Result<f64> {
    let h = hessian_magnitude(field)?;
    lr_norm_of(field, &h, r)
}

/// Outer `L^q` in time from per-time spatial norms at equispaced samples
/// (composite trapezoid; `q = ∞` is the sample maximum).
pub fn mixed_norm_from_values(per_time_values: Vec<f64>, request: &NormRequest) -> Result<NormReport> {
    if per_time_values.len() != request.time_samples {
        return Err(LabError::Validation(format!(
            "expected {} time values, got {}",
            request.time_samples,
            per_time_values.len()
        )));
    }
    let (a, b) = request.time_interval;
    let (value, err) = if request.q.is_infinite() {
        (per_time_values.iter().fold(0.0f64, |m, v| m.max(*v)), 0.0)
    } else {
        let q = request.q;
        let trap = |vals: &[f64]| {
            let h = (b - a) / (vals.len() - 1) as f64;
            let inner: f64 = vals.windows(2).map(|w| 0.5 * h * (w[0].powf(q) + w[1].powf(q))).sum();
            inner.powf(1.0 / q)
        };
        let full = trap(&per_time_values);
        let n = per_time_values.len();
        let coarse = if n % 2 == 1 && n >= 5 {
            let half: Vec<f64> = per_time_values.iter().step_by(2).copied().collect();
            (full - trap(&half)).abs()
        } else {
            0.0
        };
        (full, coarse)
    };
    Ok(NormReport { q: request.q, r: request.r, value, per_time_values, quadrature_error_estimate: err })
}

/// `‖u‖_{L^q_t L^r_x}` from time slices at the request's sample times.
pub fn mixed_norm(time_slices: &[Field], request: &NormRequest) -> Result<NormReport> {
    let per = time_slices.iter().map(|f| lr_norm(f, request.r)).collect::<Result<Vec<_>>>()?;
    mixed_norm_from_values(per, request)
}

/// Bernstein surrogate `2^{2js} ‖·‖_H` for data localized at `2^{2j}`.
pub fn h2s_surrogate(h_value: f64, j: i32, s: f64) -> f64 {
    2f64.powf(2.0 * j as f64 * s) * h_value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ModeSpec;
    use crate::synthesis::{gallery_mode_from_spectrum, TangentialGrid};
    use std::f64::consts::PI;

    #[test]
    fn surrogate_arithmetic() {
        assert_eq!(h2s_surrogate(3.0, 5, 0.0), 3.0);
        assert_eq!(h2s_surrogate(3.0, 0, 0.7), 3.0);
        assert_eq!(h2s_surrogate(3.0, 3, 0.5), 24.0);
    }

    fn exp_field() -> Field {
        // the zero harmonic times e^{-x_d}: B(1, s) = e^{-s} at |ξ′| = 1 needs a
        // nonzero lattice frequency, so use ξ′ = 1 on a 2π box
        let g = TangentialGrid::new(2, 2.0 * PI, 8).unwrap();
        let xd = crate::grid::graded_s_grid(40.0).unwrap();
        let mut hat = vec![C64::new(0.0, 0.0); 8];
        hat[1] = C64::new(2.0 * PI, 0.0);
        gallery_mode_from_spectrum(&hat, ModeSpec::quantized(1.0, 0).unwrap(), g, &xd).unwrap()
    }

    #[test]
    fn h_norm_of_exponential() {
        let f = exp_field();
        let zero = f.scaled(C64::new(0.0, 0.0));
        // |u| = e^{-x_d} on a box of length 2π: ∫ = 2π · 1/2
        let h = h_norm(&f, &zero, 1.0).unwrap();
        assert!((h * h - PI).abs() < 1e-6 * PI, "{}", h * h);
        assert_eq!(h_norm(&zero, &zero, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn lr_norms_consistent() {
        let f = exp_field();
        let l2 = lr_norm(&f, 2.0).unwrap();
        let mags: Vec<f64> = f.values.iter().map(|v| v.norm()).collect();
        let l2_phys = lr_norm_of(&f, &mags, 2.0).unwrap();
        assert!((l2 - l2_phys).abs() < 1e-10 * l2);
        assert!((lr_norm(&f, f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_norm_constant_magnitude() {
        let f = exp_field();
        let req = NormRequest::new(4.0, 2.0, (0.0, 2.0), 16).unwrap();
        let slices: Vec<Field> = req.times().iter().map(|&t| f.scaled(C64::from_polar(1.0, 3.0 * t))).collect();
        let rep = mixed_norm(&slices, &req).unwrap();
        let l2 = lr_norm(&f, 2.0).unwrap();
        assert!((rep.value - 2f64.powf(0.25) * l2).abs() < 1e-10 * l2);
        let first = rep.per_time_values[0];
        assert!(rep.per_time_values.iter().all(|v| (v - first).abs() <= 1e-10 * first));
        assert!(rep.to_json().unwrap().contains("error_estimate"));
    }
}
