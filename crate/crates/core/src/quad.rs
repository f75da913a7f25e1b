//! Quadrature rules: Gauss–Legendre panels, adaptive refinement, and
//! product-trapezoid rules for power-weighted integrals on graded grids.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrates `f` over `[a, b]` with a single panel.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive bisection with an embedded 10/20-point Gauss–Legendre pair.
///
/// Returns the integral and the accumulated error estimate.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> (f64, f64) {
    let lo = GaussLegendre::new(10);
    let hi = GaussLegendre::new(20);
    let mut total = 0.0;
    let mut err = 0.0;
    let mut stack = vec![(a, b, 0usize)];
    while let Some((x0, x1, depth)) = stack.pop() {
        let coarse = lo.integrate(x0, x1, f);
        let fine = hi.integrate(x0, x1, f);
        let diff = (fine - coarse).abs();
        if diff <= abs_tol.max(rel_tol * fine.abs()) || depth >= 40 {
            total += fine;
            err += diff;
        } else {
            let mid = 0.5 * (x0 + x1);
            stack.push((x0, mid, depth + 1));
            stack.push((mid, x1, depth + 1));
        }
    }
    (total, err)
}

/// Composite trapezoid weights on an arbitrary increasing grid.
pub fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = x[i + 1] - x[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Product-trapezoid weights for `∫ x^beta g(x) dx` with `g` piecewise linear
/// between the nodes. The power weight is integrated exactly on every cell,
/// so integrable singularities at `x = 0` (`beta > -1`) are handled.
pub fn power_weighted_weights(x: &[f64], beta: f64) -> Vec<f64> {
    assert!(beta > -1.0, "power weight x^{beta} is not integrable at 0");
    let n = x.len();
    let mut w = vec![0.0; n];
    if beta == 0.0 {
        return trapezoid_weights(x);
    }
    // moments m_p(a, b) = ∫_a^b x^(beta + p) dx for p = 0, 1
    let moment = |a: f64, b: f64, p: f64| -> f64 {
        let e = beta + p + 1.0;
        (b.powf(e) - a.powf(e)) / e
    };
    for i in 0..n.saturating_sub(1) {
        let (a, b) = (x[i], x[i + 1]);
        let h = b - a;
        let m0 = moment(a, b, 0.0);
        let m1 = moment(a, b, 1.0);
        // g ≈ g_a (b − x)/h + g_b (x − a)/h
        w[i] += (b * m0 - m1) / h;
        w[i + 1] += (m1 - a * m0) / h;
    }
    w
}

/// Product-Simpson weights for `∫ x^beta g(x) dx`: `g` is interpolated by
/// quadratics on consecutive pairs of cells (the last cell of an odd count
/// reuses the preceding node). Exact moments are used on a pair touching
/// `x = 0`; elsewhere the smooth weight is integrated by Gauss–Legendre.
pub fn power_weighted_simpson_weights(x: &[f64], beta: f64) -> Vec<f64> {
    assert!(beta > -1.0, "power weight x^{beta} is not integrable at 0");
    let n = x.len();
    if n < 3 {
        return power_weighted_weights(x, beta);
    }
    let gl = GaussLegendre::new(10);
    let mut w = vec![0.0; n];
    let lagrange = |nodes: [f64; 3], i: usize, t: f64| -> f64 {
        let mut v = 1.0;
        for (k, &xk) in nodes.iter().enumerate() {
            if k != i {
                v *= (t - xk) / (nodes[i] - xk);
            }
        }
        v
    };
    let add_panel = |w: &mut [f64], idx: [usize; 3], a: f64, b: f64| {
        let nodes = [x[idx[0]], x[idx[1]], x[idx[2]]];
        if a == 0.0 {
            let m: Vec<f64> = (0..3).map(|p| b.powf(beta + p as f64 + 1.0) / (beta + p as f64 + 1.0)).collect();
            for i in 0..3 {
                let others: Vec<f64> = (0..3).filter(|&k| k != i).map(|k| nodes[k]).collect();
                let den = (nodes[i] - others[0]) * (nodes[i] - others[1]);
                w[idx[i]] += (m[2] - (others[0] + others[1]) * m[1] + others[0] * others[1] * m[0]) / den;
            }
        } else {
            for (t, wt) in gl.mapped(a, b) {
                let f = t.powf(beta) * wt;
                for i in 0..3 {
                    w[idx[i]] += f * lagrange(nodes, i, t);
                }
            }
        }
    };
    let mut i = 0;
    while i + 2 < n {
        add_panel(&mut w, [i, i + 1, i + 2], x[i], x[i + 2]);
        i += 2;
    }
    if i + 1 < n {
        add_panel(&mut w, [i - 1, i, i + 1], x[i], x[i + 1]);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        // degree 15 is the exactness limit for 8 points
        let v = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let s: f64 = gl.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let f = |x: f64| (-(x - 0.3).powi(2) * 1e4).exp();
        let (v, _) = adaptive(&f, 0.0, 1.0, 1e-13, 0.0);
        let exact = (PI / 1e4).sqrt();
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn power_weights_are_exact_for_linear_integrands() {
        let x: Vec<f64> = (0..=40).map(|i| (i as f64 / 40.0).powi(2) * 3.0).collect();
        for beta in [-0.5, 0.0, 1.0, 0.7] {
            let w = power_weighted_weights(&x, beta);
            let v: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * (2.0 + xi)).sum();
            let e0 = beta + 1.0;
            let exact = 2.0 * 3f64.powf(e0) / e0 + 3f64.powf(e0 + 1.0) / (e0 + 1.0);
            assert!((v - exact).abs() < 1e-11 * exact, "beta={beta}");
        }
    }

    #[test]
    fn simpson_weights_are_exact_for_quadratics() {
        for m in [40usize, 41] {
            let x: Vec<f64> = (0..=m).map(|i| (i as f64 / m as f64).powi(2) * 3.0).collect();
            for beta in [-0.5, 0.0, 1.0, 0.7] {
                let w = power_weighted_simpson_weights(&x, beta);
                let v: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * (2.0 + xi - xi * xi)).sum();
                let e = beta + 1.0;
                let exact = 2.0 * 3f64.powf(e) / e + 3f64.powf(e + 1.0) / (e + 1.0) - 3f64.powf(e + 2.0) / (e + 2.0);
                assert!((v - exact).abs() < 1e-11 * exact.abs(), "beta={beta} m={m}");
            }
        }
    }
}
