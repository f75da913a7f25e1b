//! Bicharacteristics of `H = κ x_d (ξ_d² + |ξ′|²) − τ²`.
//!
//! With `θ(s) = atan(ξ_{d0}/|ξ′|) − κ|ξ′|s` the flow is
//!
//! ```text
//! ξ_d = |ξ′| tan θ,   x_d = x_{d0} cos²θ / cos²θ₀,   t = t₀ − 2sτ₀,
//! x′  = x′₀ + (2 x_{d0} ξ′ / (|ξ′| cos²θ₀)) [ (θ₀−θ)/2 + (sin 2θ₀ − sin 2θ)/4 ].
//! ```
//!
//! The formula is smooth in `s` through the boundary collisions
//! `θ = (2k+1)π/2`, where `x_d` touches zero and `ξ_d` changes sign through
//! infinity. Forward time corresponds to `s > 0` when `τ₀ < 0`.

use crate::error::{LabError, Result};
use crate::ode::{self, StepControl};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

/// A point of phase space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseState {
    pub t: f64,
    pub xd: f64,
    pub xp: Vec<f64>,
    pub tau: f64,
    pub xid: f64,
    pub xip: Vec<f64>,
}

impl PhaseState {
    pub fn xip_norm(&self) -> f64 {
        self.xip.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// State on the characteristic set with the given sign of `τ`.
    pub fn on_characteristic(kappa: f64, xd: f64, xp: Vec<f64>, xid: f64, xip: Vec<f64>, forward: bool) -> Self {
        let q: f64 = xid * xid + xip.iter().map(|v| v * v).sum::<f64>();
        let tau = (kappa * xd * q).sqrt();
        PhaseState { t: 0.0, xd, xp, tau: if forward { -tau } else { tau }, xid, xip }
    }

    fn check(&self) -> Result<()> {
        if self.xp.len() != self.xip.len() || self.xp.is_empty() {
            return Err(LabError::Validation("x′ and ξ′ must have equal length d−1 ≥ 1".into()));
        }
        if !(self.xd >= 0.0) {
            return Err(LabError::Validation(format!("xd must be ≥ 0, got {}", self.xd)));
        }
        Ok(())
    }
}

/// `κ x_d (ξ_d² + |ξ′|²) − τ²`.
pub fn hamiltonian(state: &PhaseState, kappa: f64) -> f64 {
    let q = state.xid * state.xid + state.xip.iter().map(|v| v * v).sum::<f64>();
    kappa * state.xd * q - state.tau * state.tau
}

/// Global closed-form coefficients of a ray with `ξ′ ≠ 0`.
#[derive(Debug, Clone, Copy)]
struct Orbit {
    theta0: f64,
    rate: f64,
    amplitude: f64,
}

impl Orbit {
    fn new(state: &PhaseState, kappa: f64) -> Self {
        let r = state.xip_norm();
        let theta0 = (state.xid / r).atan();
        let c0 = theta0.cos();
        Orbit { theta0, rate: kappa * r, amplitude: state.xd / (c0 * c0) }
    }

    fn theta(&self, s: f64) -> f64 {
        self.theta0 - self.rate * s
    }
}

/// Closed-form state at parameter `s`, ignoring segment structure.
///
/// At a collision `ξ_d` is reported as `±∞`.
pub fn flow_through(state0: &PhaseState, kappa: f64, s: f64) -> PhaseState {
    let r = state0.xip_norm();
    let t = state0.t - 2.0 * s * state0.tau;
    if r == 0.0 {
        let g = 1.0 + kappa * s * state0.xid;
        return PhaseState {
            t,
            xd: state0.xd * g * g,
            xp: state0.xp.clone(),
            tau: state0.tau,
            xid: state0.xid / g,
            xip: state0.xip.clone(),
        };
    }
    let o = Orbit::new(state0, kappa);
    let th = o.theta(s);
    let c = th.cos();
    let drift = 2.0 * o.amplitude / r * ((o.theta0 - th) / 2.0 + ((2.0 * o.theta0).sin() - (2.0 * th).sin()) / 4.0);
    PhaseState {
        t,
        xd: o.amplitude * c * c,
        xp: state0.xp.iter().zip(&state0.xip).map(|(x, k)| x + drift * k).collect(),
        tau: state0.tau,
        xid: r * th.tan(),
        xip: state0.xip.clone(),
    }
}

/// Closed-form flow within the smooth segment containing `s = 0`.
pub fn closed_form_flow(state0: &PhaseState, kappa: f64, s: f64) -> Result<PhaseState> {
    state0.check()?;
    if s == 0.0 {
        return Ok(state0.clone());
    }
    let r = state0.xip_norm();
    if r == 0.0 {
        let g = 1.0 + kappa * s * state0.xid;
        if g.abs() <= 1e-12 {
            return Err(LabError::Pole(format!("ξ_d has a pole at s={s}")));
        }
        if g < 0.0 {
            return Err(LabError::Segment(format!("s={s} crosses the boundary hit of the ξ′ = 0 ray")));
        }
        return Ok(flow_through(state0, kappa, s));
    }
    let o = Orbit::new(state0, kappa);
    // collisions are where θ(s) is an odd multiple of π/2
    let u0 = (o.theta0 - FRAC_PI_2) / PI;
    let u1 = (o.theta(s) - FRAC_PI_2) / PI;
    let nearest = u1.round();
    if (u1 - nearest).abs() <= 1e-12 * u1.abs().max(1.0) && nearest != u0 {
        return Err(LabError::Pole(format!("ξ_d has a pole at s={s}")));
    }
    let (lo, hi) = if u0 < u1 { (u0, u1) } else { (u1, u0) };
    if hi.ceil() - 1.0 > lo {
        return Err(LabError::Segment(format!("s={s} crosses a boundary collision")));
    }
    Ok(flow_through(state0, kappa, s))
}

fn pack(state: &PhaseState) -> Vec<f64> {
    let mut y = vec![state.t, state.xd];
    y.extend(&state.xp);
    y.push(state.tau);
    y.push(state.xid);
    y.extend(&state.xip);
    y
}

fn unpack(y: &[f64], m: usize) -> PhaseState {
    PhaseState {
        t: y[0],
        xd: y[1],
        xp: y[2..2 + m].to_vec(),
        tau: y[2 + m],
        xid: y[3 + m],
        xip: y[4 + m..4 + 2 * m].to_vec(),
    }
}

/// Adaptive Runge–Kutta integration of the Hamiltonian system.
pub fn numeric_flow(state0: &PhaseState, kappa: f64, s: f64, tol: f64) -> Result<PhaseState> {
    state0.check()?;
    let m = state0.xp.len();
    let f = move |_s: f64, y: &[f64], dy: &mut [f64]| {
        let xd = y[1];
        let tau = y[2 + m];
        let xid = y[3 + m];
        let xip = &y[4 + m..4 + 2 * m];
        let q2: f64 = xip.iter().map(|v| v * v).sum();
        dy[0] = -2.0 * tau;
        dy[1] = 2.0 * kappa * xd * xid;
        for i in 0..m {
            dy[2 + i] = 2.0 * kappa * xd * xip[i];
            dy[4 + m + i] = 0.0;
        }
        dy[2 + m] = 0.0;
        dy[3 + m] = -kappa * (xid * xid + q2);
    };
    let ctl = StepControl { rtol: tol, atol: tol * 1e-6, h_init: 1e-3 * s.abs().max(1e-12), h_min: 1e-14 * s.abs(), max_steps: 200_000 };
    let xd0 = state0.xd;
    let tr = ode::integrate(f, 0.0, &pack(state0), s, ctl, |si, y| {
        if !(y[1] > 1e-12 * xd0) || !y[3 + m].is_finite() {
            Some(LabError::StepFailure(format!("ray reached the boundary near s={si}")))
        } else {
            None
        }
    })?;
    Ok(unpack(tr.y.last().unwrap(), m))
}

/// `s_k = (atan(ξ_{d0}/|ξ′|) − (2k+1)π/2) / (κ|ξ′|)` for `k` in the range.
pub fn collision_parameters(state0: &PhaseState, kappa: f64, k_range: std::ops::RangeInclusive<i64>) -> Result<Vec<f64>> {
    let r = state0.xip_norm();
    if r == 0.0 {
        return Err(LabError::Branch("ξ′ = 0 rays do not collide periodically".into()));
    }
    let o = Orbit::new(state0, kappa);
    Ok(k_range.map(|k| (o.theta0 - (2 * k + 1) as f64 * FRAC_PI_2) / o.rate).collect())
}

/// Index of the first collision with `s > 0`.
fn first_forward_index(state0: &PhaseState, kappa: f64) -> i64 {
    let o = Orbit::new(state0, kappa);
    let mut k = (o.theta0 / PI - 0.5).ceil() as i64 - 1;
    while (o.theta0 - (2 * k + 1) as f64 * FRAC_PI_2) <= 0.0 {
        k -= 1;
    }
    while (o.theta0 - (2 * k + 3) as f64 * FRAC_PI_2) > 0.0 {
        k += 1;
    }
    k
}

/// One boundary hit.
#[derive(Debug, Clone, Serialize)]
pub struct Collision {
    pub k: i64,
    pub s: f64,
    pub t: f64,
    pub xp: Vec<f64>,
}

/// Smooth piece of a ray between collisions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Segment {
    pub s_start: f64,
    pub s_end: f64,
}

/// A ray continued through its boundary collisions.
#[derive(Debug, Clone, Serialize)]
pub struct RayPath {
    pub kappa: f64,
    pub origin: PhaseState,
    pub segments: Vec<Segment>,
    pub collisions: Vec<Collision>,
}

impl RayPath {
    /// Path from `state0` up to its first forward collision.
    pub fn new(state0: PhaseState, kappa: f64) -> Result<Self> {
        state0.check()?;
        if state0.xip_norm() == 0.0 {
            return Err(LabError::Branch("ray continuation needs ξ′ ≠ 0".into()));
        }
        let k = first_forward_index(&state0, kappa);
        let s1 = collision_parameters(&state0, kappa, k..=k)?[0];
        Ok(RayPath { kappa, segments: vec![Segment { s_start: 0.0, s_end: s1 }], collisions: Vec::new(), origin: state0 })
    }

    /// State at parameter `s` from the global closed form.
    pub fn state_at(&self, s: f64) -> PhaseState {
        flow_through(&self.origin, self.kappa, s)
    }

    pub fn s_end(&self) -> f64 {
        self.segments.last().map(|g| g.s_end).unwrap_or(0.0)
    }

    /// Writes `s,t,x_d,x1..,xi_d` rows, `per_segment` samples per segment.
    pub fn write_csv<W: Write>(&self, mut w: W, per_segment: usize) -> Result<()> {
        let m = self.origin.xp.len();
        let cols: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
        writeln!(w, "s,t,x_d,{},xi_d", cols.join(","))?;
        for g in &self.segments {
            for i in 0..=per_segment {
                let s = g.s_start + (g.s_end - g.s_start) * i as f64 / per_segment as f64;
                let st = self.state_at(s);
                let xp: Vec<String> = st.xp.iter().map(|v| format!("{v:.15e}")).collect();
                writeln!(w, "{s:.15e},{:.15e},{:.15e},{},{:.15e}", st.t, st.xd, xp.join(","), st.xid)?;
            }
        }
        Ok(())
    }

    /// Writes the collision table `k,s,t,x1..`.
    pub fn write_collisions_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let m = self.origin.xp.len();
        let cols: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
        writeln!(w, "k,s,t,{}", cols.join(","))?;
        for c in &self.collisions {
            let xp: Vec<String> = c.xp.iter().map(|v| format!("{v:.15e}")).collect();
            writeln!(w, "{},{:.15e},{:.15e},{}", c.k, c.s, c.t, xp.join(","))?;
        }
        Ok(())
    }
}

/// Extends `path` across `through` further collisions.
pub fn reflect_and_continue(mut path: RayPath, through: usize) -> RayPath {
    let dk = PI / path.origin.xip_norm() / path.kappa;
    let k_first = first_forward_index(&path.origin, path.kappa);
    for _ in 0..through {
        let s_hit = path.s_end();
        let k = k_first - path.collisions.len() as i64;
        let at = path.state_at(s_hit);
        path.collisions.push(Collision { k, s: s_hit, t: at.t, xp: at.xp });
        path.segments.push(Segment { s_start: s_hit, s_end: s_hit + dk });
    }
    path
}

/// Tangential displacement between successive collisions.
pub fn hop(state0: &PhaseState) -> Vec<f64> {
    let r = state0.xip_norm();
    let f = PI * state0.xd * (r * r + state0.xid * state0.xid) / (r * r * r);
    state0.xip.iter().map(|k| f * k).collect()
}

/// Time between successive collisions, `2π|τ₀|/(κ|ξ′|)`.
pub fn collision_period(state0: &PhaseState, kappa: f64) -> f64 {
    2.0 * PI * state0.tau.abs() / (kappa * state0.xip_norm())
}

/// Fraction of one collision period during which `x_d ≤ c·x_{d0}`.
pub fn dwell_fraction(state0: &PhaseState, kappa: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(LabError::Validation(format!("dwell level must lie in (0,1), got {c}")));
    }
    let k = first_forward_index(state0, kappa);
    let s = collision_parameters(state0, kappa, (k - 1)..=k)?;
    let (a, b) = (s[1], s[0]);
    let mid = 0.5 * (a + b);
    let level = c * state0.xd;
    let g = |x: f64| flow_through(state0, kappa, x).xd - level;
    if g(mid) <= 0.0 {
        return Ok(1.0);
    }
    let r1 = ode::bisect(g, a, mid, 1e-12 * (b - a))?;
    let r2 = ode::bisect(g, mid, b, 1e-12 * (b - a))?;
    Ok(((r1 - a) + (b - r2)) / (b - a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(xd: f64, xid: f64, xip: f64, tau: f64) -> PhaseState {
        PhaseState { t: 0.0, xd, xp: vec![0.0], tau, xid, xip: vec![xip] }
    }

    #[test]
    fn hamiltonian_examples() {
        assert_eq!(hamiltonian(&st(0.0, 3.0, 2.0, 0.0), 1.3), 0.0);
        assert_eq!(hamiltonian(&st(1.0, 0.0, 1.0, 1.0), 1.0), 0.0);
        assert_eq!(hamiltonian(&st(3.0, 1.0, 2.0, 0.0), 2.0), 30.0);
    }

    #[test]
    fn zero_tangential_branch() {
        let s0 = st(1.0, 1.0, 0.0, -1.0);
        let s1 = closed_form_flow(&s0, 1.0, 1.0).unwrap();
        assert!((s1.xd - 4.0).abs() < 1e-14);
        let n = numeric_flow(&s0, 1.0, 1.0, 1e-12).unwrap();
        assert!((n.xd - 4.0).abs() < 1e-8);
        assert!(collision_parameters(&s0, 1.0, 0..=1).is_err());
    }

    #[test]
    fn first_collision_at_quarter_period() {
        let s0 = st(1.0, 0.0, 1.0, -1.0);
        let s = collision_parameters(&s0, 1.0, -1..=-1).unwrap()[0];
        assert!((s - FRAC_PI_2).abs() < 1e-15);
        assert!(flow_through(&s0, 1.0, s).xd < 1e-30);
        assert!(matches!(closed_form_flow(&s0, 1.0, s), Err(LabError::Pole(_))));
        assert!(matches!(closed_form_flow(&s0, 1.0, 2.0), Err(LabError::Segment(_))));
        assert_eq!(closed_form_flow(&s0, 1.0, 0.0).unwrap(), s0);
    }

    #[test]
    fn spacing_and_hop() {
        let s0 = st(1.0, 0.0, PI, -1.0);
        let s = collision_parameters(&s0, 1.0, 0..=1).unwrap();
        assert!(((s[0] - s[1]) - 1.0).abs() < 1e-15);
        let h = hop(&st(2.0, 0.0, 3.0, -1.0));
        assert!((h[0] - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn dwell_limits() {
        let s0 = st(1.0, 0.0, 1.0, -1.0);
        assert!(dwell_fraction(&s0, 1.0, 0.999_999).unwrap() > 0.99);
        for c in [1e-2, 1e-3, 1e-4] {
            let f = dwell_fraction(&s0, 1.0, c).unwrap();
            assert!((0.5..=1.5).contains(&(f / c.sqrt())), "c={c}");
        }
    }
}
