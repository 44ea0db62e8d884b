//! Density models A(r): the entire geometric input of a rank-one harmonic
//! manifold at desk scale. A model provides A, A'/A, the Schroedinger-form
//! potential G = (A'/A)^2/4 + (A'/A)'/2 - rho^2 and the constants rho,
//! dim and the sphere-volume factor.

use crate::error::{Error, Result};
use std::sync::{Mutex, OnceLock};

/// Pole sentinel returned by `eval_density` at r = 0.
pub const LOGDERIV_POLE: f64 = f64::INFINITY;

#[derive(Debug, Clone)]
pub enum DensityKind {
    Jacobi {
        alpha: f64,
        beta: f64,
        scale: f64,
    },
    CustomTable {
        r: Vec<f64>,
        log_a: Vec<f64>,
        slopes: Vec<f64>,
    },
}

#[derive(Debug)]
pub struct DensityModel {
    pub kind: DensityKind,
    pub dim_n: u32,
    /// Set when 2*alpha + 2 is not an integer; dim_n is then the rounding.
    pub non_integer_dim: bool,
    pub rho: f64,
    pub sphere_const: f64,
    /// Small-r exponent of A: A(r) ~ r^{2 alpha + 1}.
    pub small_r_exponent: f64,
    pub(crate) caches: ModelCaches,
}

#[derive(Debug, Default)]
pub(crate) struct ModelCaches {
    /// Plancherel density samples on the ladder lambda = (k+1)*PL_STEP.
    pub plancherel: Mutex<Vec<f64>>,
    /// Calibrated inversion constant C0.
    pub c0: OnceLock<f64>,
}

impl Clone for DensityModel {
    /// Cloning drops the lazy caches; they refill deterministically.
    fn clone(&self) -> Self {
        DensityModel {
            kind: self.kind.clone(),
            dim_n: self.dim_n,
            non_integer_dim: self.non_integer_dim,
            rho: self.rho,
            sphere_const: self.sphere_const,
            small_r_exponent: self.small_r_exponent,
            caches: ModelCaches::default(),
        }
    }
}

/// Gamma via Lanczos (g = 7, 9 coefficients); used only for the
/// sphere-volume constant omega_{n-1}.
fn gamma_fn(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_fn(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = C[0];
        let t = x + G + 0.5;
        for (i, &c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

fn omega_sphere(n: f64) -> f64 {
    2.0 * std::f64::consts::PI.powf(n / 2.0) / gamma_fn(n / 2.0)
}

/// Constructs a Jacobi model A(r) = (2 sinh(s r)/s)^{2a+1} (2 cosh(s r))^{2b+1}
/// with rho = s (a + b + 1).
pub fn make_jacobi_model(alpha: f64, beta: f64, scale: f64) -> Result<DensityModel> {
    if !(alpha > -0.5) {
        return Err(Error::Domain(format!("alpha must be > -1/2, got {alpha}")));
    }
    if !(scale > 0.0) {
        return Err(Error::Domain(format!("scale must be positive, got {scale}")));
    }
    if !(alpha + beta + 1.0 > 0.0) {
        return Err(Error::Domain(format!(
            "alpha + beta + 1 must be positive for rho > 0, got {}",
            alpha + beta + 1.0
        )));
    }
    let rho = scale * (alpha + beta + 1.0);
    let n_real = 2.0 * alpha + 2.0;
    let dim_n = n_real.round().max(1.0) as u32;
    let non_integer_dim = (n_real - n_real.round()).abs() > 1e-12;
    Ok(DensityModel {
        kind: DensityKind::Jacobi { alpha, beta, scale },
        dim_n,
        non_integer_dim,
        rho,
        sphere_const: omega_sphere(n_real),
        small_r_exponent: 2.0 * alpha + 1.0,
        caches: ModelCaches::default(),
    })
}

/// Hyperbolic 3-space surrogate: (alpha, beta, scale) = (1/2, -1/2, 1).
pub fn h3() -> DensityModel {
    make_jacobi_model(0.5, -0.5, 1.0).unwrap()
}

/// Hyperbolic 4-space surrogate: (alpha, beta, scale) = (1, -1/2, 1).
pub fn h4() -> DensityModel {
    make_jacobi_model(1.0, -0.5, 1.0).unwrap()
}

/// Damek-Ricci-type Jacobi model used in the test battery.
pub fn damek_ricci_like() -> DensityModel {
    make_jacobi_model(2.5, 1.5, 1.0).unwrap()
}

/// Monotone cubic (Fritsch-Carlson) slopes for interpolating log A.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = vec![0.0; n - 1];
    for i in 0..n - 1 {
        d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    }
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
            let w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    m
}

/// Builds a model from tabulated (r, A) samples. `rho_hint` overrides the
/// end-slope estimate of rho; `dim_hint` overrides the small-r exponent fit.
pub fn make_table_model(
    r: Vec<f64>,
    a: Vec<f64>,
    rho_hint: Option<f64>,
    dim_hint: Option<u32>,
) -> Result<DensityModel> {
    if r.len() != a.len() || r.len() < 4 {
        return Err(Error::Domain("table needs >= 4 (r, A) rows".into()));
    }
    if r[0] <= 0.0 {
        return Err(Error::Domain("table must start at r > 0 (A(0) = 0 is implied)".into()));
    }
    for w in r.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain("table r column must be strictly increasing".into()));
        }
    }
    if a.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Domain("table A column must be positive".into()));
    }
    let log_a: Vec<f64> = a.iter().map(|v| v.ln()).collect();
    let slopes = pchip_slopes(&r, &log_a);
    let rho = rho_hint.unwrap_or(0.5 * slopes[r.len() - 1]);
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("table model needs rho > 0, got {rho}")));
    }
    // small-r exponent from the first interval of log A vs log r
    let expo = (log_a[1] - log_a[0]) / (r[1].ln() - r[0].ln());
    let dim_n = dim_hint.unwrap_or(((expo + 1.0).round().max(1.0)) as u32);
    let n_real = dim_n as f64;
    Ok(DensityModel {
        kind: DensityKind::CustomTable { r, log_a, slopes },
        dim_n,
        non_integer_dim: false,
        rho,
        sphere_const: omega_sphere(n_real),
        small_r_exponent: expo,
        caches: ModelCaches::default(),
    })
}

impl DensityModel {
    /// log A(r); overflow-safe for large r.
    pub fn log_a(&self, r: f64) -> Result<f64> {
        match &self.kind {
            DensityKind::Jacobi { alpha, beta, scale } => {
                let x = scale * r;
                // ln(2 sinh x) = x + ln(1 - e^{-2x}), ln(2 cosh x) = x + ln(1 + e^{-2x})
                let e = (-(2.0 * x)).exp();
                let ls = x + (-e).ln_1p();
                let lc = x + e.ln_1p();
                Ok((2.0 * alpha + 1.0) * (ls - scale.ln()) + (2.0 * beta + 1.0) * lc)
            }
            DensityKind::CustomTable { r: xs, log_a, slopes } => {
                table_eval(xs, log_a, slopes, r).map(|(v, _)| v)
            }
        }
    }

    /// W(r) = A'(r)/A(r).
    pub fn logderiv(&self, r: f64) -> Result<f64> {
        match &self.kind {
            DensityKind::Jacobi { alpha, beta, scale } => {
                let x = scale * r;
                Ok(scale * ((2.0 * alpha + 1.0) / x.tanh() + (2.0 * beta + 1.0) * x.tanh()))
            }
            DensityKind::CustomTable { r: xs, log_a, slopes } => {
                table_eval(xs, log_a, slopes, r).map(|(_, d)| d)
            }
        }
    }

    /// G(r) = W^2/4 + W'/2 - rho^2 (condition C4 potential).
    pub fn g_potential(&self, r: f64) -> Result<f64> {
        match &self.kind {
            DensityKind::Jacobi { alpha, beta, scale } => {
                let x = scale * r;
                let (a1, b1) = (2.0 * alpha + 1.0, 2.0 * beta + 1.0);
                let ch = 1.0 / x.tanh();
                let th = x.tanh();
                let w = scale * (a1 * ch + b1 * th);
                let sh2 = x.sinh() * x.sinh();
                let ch2 = x.cosh() * x.cosh();
                let wp = scale * scale * (-a1 / sh2 + b1 / ch2);
                Ok(0.25 * w * w + 0.5 * wp - self.rho * self.rho)
            }
            DensityKind::CustomTable { r: xs, .. } => {
                // W' by symmetric differencing of the interpolated slope
                let h = 1e-4 * (1.0 + r.abs());
                let wm = self.logderiv((r - h).max(xs[0]))?;
                let wp = self.logderiv(r + h)?;
                let w = self.logderiv(r)?;
                let dw = (wp - wm) / ((r + h) - (r - h).max(xs[0]));
                Ok(0.25 * w * w + 0.5 * dw - self.rho * self.rho)
            }
        }
    }

    /// Strength of the A'/A pole at r = 0: A'/A ~ pole_coefficient()/r.
    pub fn pole_coefficient(&self) -> f64 {
        self.small_r_exponent
    }

    pub fn scale(&self) -> f64 {
        match &self.kind {
            DensityKind::Jacobi { scale, .. } => *scale,
            DensityKind::CustomTable { .. } => 1.0,
        }
    }

    /// Taylor coefficients of the regular part of the log-derivative:
    /// A'/A - pole_coefficient()/r = sum_j w_j r^{2j+1}. Available in
    /// closed form for Jacobi densities (from the coth/tanh expansions);
    /// None for tabulated densities.
    pub fn logderiv_series(&self) -> Option<Vec<f64>> {
        match &self.kind {
            DensityKind::Jacobi { alpha, beta, scale } => {
                let p = 2.0 * alpha + 1.0;
                let q = 2.0 * beta + 1.0;
                // coth x - 1/x and tanh x coefficients of x^{2j+1}
                let cc = [
                    1.0 / 3.0,
                    -1.0 / 45.0,
                    2.0 / 945.0,
                    -1.0 / 4725.0,
                    2.0 / 93555.0,
                    -1382.0 / 638512875.0,
                ];
                let tt = [
                    1.0,
                    -1.0 / 3.0,
                    2.0 / 15.0,
                    -17.0 / 315.0,
                    62.0 / 2835.0,
                    -1382.0 / 155925.0,
                ];
                Some(
                    (0..6)
                        .map(|j| scale.powi(2 * j as i32 + 2) * (p * cc[j] + q * tt[j]))
                        .collect(),
                )
            }
            DensityKind::CustomTable { .. } => None,
        }
    }
}

fn table_eval(xs: &[f64], ys: &[f64], ms: &[f64], x: f64) -> Result<(f64, f64)> {
    let n = xs.len();
    if x < xs[0] || x > xs[n - 1] {
        return Err(Error::Interpolation(format!(
            "query r = {x} outside table range [{}, {}]",
            xs[0],
            xs[n - 1]
        )));
    }
    let mut i = match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => i,
        Err(i) => i - 1,
    };
    if i == n - 1 {
        i -= 1;
    }
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let (y0, y1, m0, m1) = (ys[i], ys[i + 1], ms[i] * h, ms[i + 1] * h);
    let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    let h10 = t * (1.0 - t) * (1.0 - t);
    let h01 = t * t * (3.0 - 2.0 * t);
    let h11 = t * t * (t - 1.0);
    let v = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
    let d00 = 6.0 * t * t - 6.0 * t;
    let d10 = 3.0 * t * t - 4.0 * t + 1.0;
    let d01 = -d00;
    let d11 = 3.0 * t * t - 2.0 * t;
    let d = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;
    Ok((v, d))
}

/// Evaluates (A(r), A'(r)/A(r)). At r = 0 returns (0, +inf); the exact pole
/// strength is available via `DensityModel::pole_coefficient`.
pub fn eval_density(model: &DensityModel, r: f64) -> Result<(f64, f64)> {
    if r < 0.0 {
        return Err(Error::Domain(format!("radius must be nonnegative, got {r}")));
    }
    if r == 0.0 {
        return Ok((0.0, LOGDERIV_POLE));
    }
    Ok((model.log_a(r)?.exp(), model.logderiv(r)?))
}

/// Measured backing for the (C1)-(C4) checks.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConditionReport {
    pub c1_monotone: bool,
    pub c1_min_increment: f64,
    pub c2_logderiv_decreasing: bool,
    pub c2_limit: f64,
    pub c3_exponent_ok: bool,
    pub c3_fitted_exponent: f64,
    pub c4_integral_finite: bool,
    pub c4_integral: f64,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.c1_monotone && self.c2_logderiv_decreasing && self.c3_exponent_ok && self.c4_integral_finite
    }
}

/// Numerical check of conditions (C1)-(C4) on [0, r_max].
pub fn validate_conditions(model: &DensityModel, r_max: f64, n_samples: usize) -> ConditionReport {
    assert!(r_max > 0.0 && n_samples >= 16);
    let lo = match &model.kind {
        DensityKind::CustomTable { r, .. } => r[0],
        _ => 1e-3,
    };
    let hi = match &model.kind {
        DensityKind::CustomTable { r, .. } => r_max.min(*r.last().unwrap()),
        _ => r_max,
    };
    let dr = (hi - lo) / (n_samples - 1) as f64;
    let mut c1 = true;
    let mut c1_min = f64::INFINITY;
    let mut c2 = true;
    let mut prev_a = f64::NEG_INFINITY;
    let mut prev_w = f64::INFINITY;
    let mut last_w = 0.0;
    for i in 0..n_samples {
        let r = lo + i as f64 * dr;
        let la = model.log_a(r).unwrap_or(f64::NAN);
        let w = model.logderiv(r).unwrap_or(f64::NAN);
        if la <= prev_a {
            c1 = false;
        }
        c1_min = c1_min.min(la - prev_a);
        if i > 0 && w > prev_w + 1e-12 {
            c2 = false;
        }
        prev_a = la;
        prev_w = w;
        last_w = w;
    }
    let c2_limit = 0.5 * last_w;
    let c2_ok = c2 && c2_limit > 0.0;
    // C3: slope of log A vs log r near 0
    let expo = if matches!(model.kind, DensityKind::CustomTable { .. }) {
        model.small_r_exponent
    } else {
        let (r1, r2) = (1e-4, 1e-2);
        (model.log_a(r2).unwrap() - model.log_a(r1).unwrap()) / (r2.ln() - r1.ln())
    };
    let c3_ok = (expo - model.small_r_exponent).abs() < 1e-4 && expo > 0.0;
    // C4: integral of r |G(r)| over [0.1, r_max]
    let q = QuadPanelsForG::grid(0.1_f64.max(lo), hi);
    let integral = q.integrate_real(|r| r * model.g_potential(r).unwrap_or(f64::NAN).abs());
    let c4_ok = integral.is_finite();
    ConditionReport {
        c1_monotone: c1,
        c1_min_increment: c1_min,
        c2_logderiv_decreasing: c2_ok,
        c2_limit,
        c3_exponent_ok: c3_ok,
        c3_fitted_exponent: expo,
        c4_integral_finite: c4_ok,
        c4_integral: integral,
    }
}

use crate::quad::QuadGrid as QuadPanelsForG;
impl QuadPanelsForG {
    fn grid(a: f64, b: f64) -> Self {
        QuadPanelsForG::panels(a, b, 8.0, 8)
    }
}

/// Parses the flat `key = value` model catalog format:
/// `model = jacobi` with `alpha`, `beta`, `scale`, or `model = table`
/// with `csv = path` (two columns r, A) plus optional `rho`, `dim`.
pub fn model_from_catalog(text: &str, base_dir: &std::path::Path) -> Result<DensityModel> {
    let mut kv = std::collections::HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get_f = |k: &str| -> Result<f64> {
        kv.get(k)
            .ok_or_else(|| Error::Config(format!("missing key `{k}`")))?
            .parse::<f64>()
            .map_err(|e| Error::Config(format!("key `{k}`: {e}")))
    };
    match kv.get("model").map(|s| s.as_str()) {
        Some("jacobi") => make_jacobi_model(get_f("alpha")?, get_f("beta")?, get_f("scale")?),
        Some("table") => {
            let path = kv
                .get("csv")
                .ok_or_else(|| Error::Config("table model needs `csv = path`".into()))?;
            let text = std::fs::read_to_string(base_dir.join(path))?;
            let mut r = Vec::new();
            let mut a = Vec::new();
            for line in text.lines().skip(1) {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let mut cols = line.split(',');
                let (c0, c1) = (cols.next(), cols.next());
                match (c0, c1) {
                    (Some(c0), Some(c1)) => {
                        r.push(c0.trim().parse::<f64>().map_err(|e| Error::Config(e.to_string()))?);
                        a.push(c1.trim().parse::<f64>().map_err(|e| Error::Config(e.to_string()))?);
                    }
                    _ => return Err(Error::Config("table csv needs two columns r, A".into())),
                }
            }
            let rho = kv.get("rho").map(|s| s.parse::<f64>()).transpose().map_err(|e| Error::Config(e.to_string()))?;
            let dim = kv.get("dim").map(|s| s.parse::<u32>()).transpose().map_err(|e| Error::Config(e.to_string()))?;
            make_table_model(r, a, rho, dim)
        }
        other => Err(Error::Config(format!("unknown model kind {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_rho_and_dim() {
        let m = h3();
        assert!((m.rho - 1.0).abs() < 1e-12);
        assert_eq!(m.dim_n, 3);
        let m = make_jacobi_model(1.0, -0.5, 1.0).unwrap();
        assert!((m.rho - 1.5).abs() < 1e-12);
        assert_eq!(m.dim_n, 4);
        // rho equals the limit of W/2 at large r (numeric oracle at r = 50)
        for m in [h3(), h4(), damek_ricci_like()] {
            let w = m.logderiv(50.0).unwrap();
            assert!((0.5 * w - m.rho).abs() < 1e-10, "rho limit {} vs {}", 0.5 * w, m.rho);
        }
    }

    #[test]
    fn jacobi_rejects_bad_parameters() {
        assert!(make_jacobi_model(0.5, -0.5, 0.0).is_err());
        assert!(make_jacobi_model(-0.6, 0.0, 1.0).is_err());
        assert!(make_jacobi_model(0.0, -1.5, 1.0).is_err());
    }

    #[test]
    fn h3_density_closed_form() {
        let m = h3();
        let (a, w) = eval_density(&m, 1.0).unwrap();
        let sh = 1.0f64.sinh();
        assert!((a - 4.0 * sh * sh).abs() < 1e-12 * a);
        assert!((w - 2.0 / 1.0f64.tanh()).abs() < 1e-12);
        let (_, w50) = eval_density(&m, 50.0).unwrap();
        assert!((w50 - 2.0).abs() < 1e-10);
        assert!(eval_density(&m, -1.0).is_err());
        let (a0, w0) = eval_density(&m, 0.0).unwrap();
        assert_eq!(a0, 0.0);
        assert!(w0.is_infinite());
    }

    #[test]
    fn logderiv_matches_finite_difference() {
        for m in [h3(), h4(), damek_ricci_like()] {
            for &r in &[0.01, 0.1, 1.0, 5.0, 20.0] {
                let h = 1e-5 * r;
                let fd = (m.log_a(r + h).unwrap() - m.log_a(r - h).unwrap()) / (2.0 * h);
                let w = m.logderiv(r).unwrap();
                assert!((fd - w).abs() <= 1e-8 * w.abs().max(1.0), "r={r} fd={fd} w={w}");
            }
        }
    }

    #[test]
    fn g_potential_h3_vanishes() {
        let m = h3();
        for &r in &[0.05, 0.5, 2.0, 10.0] {
            assert!(m.g_potential(r).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn conditions_pass_for_catalog_models() {
        for m in [h3(), h4(), damek_ricci_like()] {
            let rep = validate_conditions(&m, 30.0, 2000);
            assert!(rep.all_pass(), "{rep:?}");
            assert!((rep.c2_limit - m.rho).abs() < 1e-6);
        }
    }

    #[test]
    fn decreasing_table_fails_c1() {
        let r: Vec<f64> = (1..40).map(|i| i as f64 * 0.25).collect();
        let a: Vec<f64> = r.iter().map(|&x| 10.0 - 0.5 * x + 0.001 * x * x).collect();
        let m = make_table_model(r, a, Some(1.0), Some(3)).unwrap();
        let rep = validate_conditions(&m, 9.0, 100);
        assert!(!rep.c1_monotone);
    }

    #[test]
    fn small_r_exponent_fit() {
        for m in [h3(), h4(), damek_ricci_like()] {
            let (r1, r2) = (1e-4, 1e-2);
            let slope =
                (m.log_a(r2).unwrap() - m.log_a(r1).unwrap()) / (r2.ln() - r1.ln());
            assert!((slope - m.small_r_exponent).abs() < 1e-4);
        }
    }

    #[test]
    fn half_logderiv_decreasing_and_above_rho() {
        for m in [h3(), h4(), damek_ricci_like()] {
            let mut prev = f64::INFINITY;
            for i in 1..400 {
                let r = i as f64 * 0.05;
                let half = 0.5 * m.logderiv(r).unwrap();
                assert!(half >= m.rho - 1e-12);
                assert!(half <= prev + 1e-12);
                prev = half;
            }
        }
    }

    #[test]
    fn catalog_roundtrip() {
        let m = model_from_catalog(
            "model = jacobi\nalpha = 0.5\nbeta = -0.5\nscale = 1.0\n",
            std::path::Path::new("."),
        )
        .unwrap();
        assert_eq!(m.dim_n, 3);
        assert!(model_from_catalog("model = nope", std::path::Path::new(".")).is_err());
    }
}
