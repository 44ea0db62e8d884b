//! Composite Gauss-Legendre quadrature on panels sized to the integrand's
//! oscillation scale.

use num_complex::Complex64;

/// 16-point Gauss-Legendre rule on [-1, 1].
pub const GL16: [(f64, f64); 16] = [
    (-9.89400934991649939e-01, 2.71524594117540374e-02),
    (-9.44575023073232600e-01, 6.22535239386477063e-02),
    (-8.65631202387831755e-01, 9.51585116824925914e-02),
    (-7.55404408355002999e-01, 1.24628971255534030e-01),
    (-6.17876244402643771e-01, 1.49595988816576764e-01),
    (-4.58016777657227370e-01, 1.69156519395002619e-01),
    (-2.81603550779258915e-01, 1.82603415044923612e-01),
    (-9.50125098376374544e-02, 1.89450610455068585e-01),
    (9.50125098376374544e-02, 1.89450610455068585e-01),
    (2.81603550779258915e-01, 1.82603415044923612e-01),
    (4.58016777657227370e-01, 1.69156519395002619e-01),
    (6.17876244402643771e-01, 1.49595988816576764e-01),
    (7.55404408355002999e-01, 1.24628971255534030e-01),
    (8.65631202387831755e-01, 9.51585116824925914e-02),
    (9.44575023073232600e-01, 6.22535239386477063e-02),
    (9.89400934991649939e-01, 2.71524594117540374e-02),
];

/// Quadrature nodes and weights for an interval, built from 16-point
/// Gauss-Legendre panels. `osc_scale` is the fastest phase rate the
/// integrand carries (e.g. `lambda_max` for `cos(lambda t)` factors);
/// panel widths are capped so each panel spans well under a wavelength.
#[derive(Debug, Clone)]
pub struct QuadGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadGrid {
    pub fn panels(a: f64, b: f64, osc_scale: f64, min_panels: usize) -> Self {
        assert!(b > a, "empty quadrature interval [{a}, {b}]");
        let max_width = 4.0 / osc_scale.max(1e-300);
        let mut n = ((b - a) / max_width).ceil() as usize;
        n = n.max(min_panels).max(1);
        let w = (b - a) / n as f64;
        let mut nodes = Vec::with_capacity(16 * n);
        let mut weights = Vec::with_capacity(16 * n);
        for i in 0..n {
            let lo = a + i as f64 * w;
            let c = lo + 0.5 * w;
            for &(x, gw) in GL16.iter() {
                nodes.push(c + 0.5 * w * x);
                weights.push(0.5 * w * gw);
            }
        }
        QuadGrid { nodes, weights }
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }

    pub fn integrate_real(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }

    /// Weighted dot against sample values given at `self.nodes`.
    pub fn dot(&self, vals: &[Complex64]) -> Complex64 {
        vals.iter()
            .zip(&self.weights)
            .map(|(&v, &w)| v * w)
            .sum()
    }
}

/// Barycentric-free local Lagrange interpolation of order 8 on a uniform
/// grid. Used to move sampled functions onto quadrature nodes.
pub fn lagrange8_uniform(x0: f64, dx: f64, vals: &[Complex64], x: f64) -> Complex64 {
    let n = vals.len();
    assert!(n >= 2);
    if n < 8 {
        // degenerate grid: fall back to linear
        let t = ((x - x0) / dx).clamp(0.0, (n - 1) as f64);
        let i = (t.floor() as usize).min(n - 2);
        let f = t - i as f64;
        return vals[i] * (1.0 - f) + vals[i + 1] * f;
    }
    let t = (x - x0) / dx;
    let i_near = t.round() as i64;
    let lo = (i_near - 4).clamp(0, n as i64 - 8) as usize;
    // 8-point Lagrange on nodes lo..lo+8
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..8 {
        let xj = (lo + j) as f64;
        let mut l = 1.0;
        for k in 0..8 {
            if k != j {
                let xk = (lo + k) as f64;
                l *= (t - xk) / (xj - xk);
            }
        }
        acc += vals[lo + j] * l;
    }
    acc
}
