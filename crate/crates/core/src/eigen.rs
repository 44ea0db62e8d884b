//! Radial eigenfunctions phi_lambda, Jost solutions Phi_{+-lambda}, the
//! c-function extracted from a weighted Wronskian, the Plancherel density
//! |c|^{-2}, and the Dirichlet eigenproblem on a ball.

use crate::density::DensityModel;
use crate::error::{Error, Result};
use crate::funcs::Grid;
use crate::ode::{default_h_max, Schedule};
use crate::quad::QuadGrid;
use num_complex::Complex64;

/// Spacing of the cached Plancherel-density ladder in lambda.
// fine enough for the tanh-type structure of even-dimensional densities
// (feature scale ~0.3) to interpolate below 1e-9 with 8-point stencils
const PL_STEP: f64 = 0.025;

#[derive(Debug, Clone)]
pub struct EigenFunction {
    pub lambda: Complex64,
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub derivs: Vec<Complex64>,
}

impl EigenFunction {
    pub fn at(&self, r: f64) -> Complex64 {
        crate::quad::lagrange8_uniform(0.0, self.grid.dx, &self.values, r)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CFunctionValue {
    pub lambda: Complex64,
    pub c: Complex64,
    pub plancherel_weight: f64,
}

fn strip_guard(model: &DensityModel, lambda: Complex64) -> Result<()> {
    if lambda.im.abs() > model.rho + 10.0 {
        return Err(Error::Domain(format!(
            "Im lambda = {} outside supported strip |Im| <= rho + 10 = {}",
            lambda.im,
            model.rho + 10.0
        )));
    }
    Ok(())
}

/// phi_lambda on a uniform grid from 0: the L_A eigenfunction with
/// phi(0) = 1, phi'(0) = 0.
pub fn eval_phi(model: &DensityModel, lambda: Complex64, grid: Grid) -> Result<EigenFunction> {
    strip_guard(model, lambda)?;
    let nodes = grid.nodes();
    let sch = Schedule::forward_strict(model, &nodes, lambda.norm(), default_h_max(model))?;
    let out = sch.sweep(lambda);
    if out.u.iter().any(|v| !v.is_finite()) {
        return Err(Error::Convergence(format!("non-finite phi sweep at lambda = {lambda}")));
    }
    Ok(EigenFunction { lambda, grid, values: out.u, derivs: out.up })
}

/// Jost solution Phi_lambda seeded exactly as e^{(i lambda - rho) r_start}
/// at r_start and integrated backward; samples on grid nodes in
/// [dx, r_start].
pub fn eval_phi_asymptotic(
    model: &DensityModel,
    lambda: Complex64,
    grid: Grid,
    r_start: f64,
) -> Result<(EigenFunction, bool)> {
    strip_guard(model, lambda)?;
    if lambda.norm() == 0.0 {
        return Err(Error::Domain("Jost solutions need lambda != 0".into()));
    }
    if r_start < 20.0 / model.scale() {
        return Err(Error::Domain(format!(
            "r_start = {r_start} below the asymptotic launch radius {}",
            20.0 / model.scale()
        )));
    }
    let warning = (-2.0 * model.scale() * r_start).exp() > 1e-10;
    let nodes: Vec<f64> = (1..grid.n)
        .map(|i| grid.x(i))
        .filter(|&r| r <= r_start + 1e-12)
        .collect();
    let sch = Schedule::backward(model, &nodes, r_start, default_h_max(model))?;
    let out = sch.sweep_asymptotic(lambda);
    // grid slot 0 (r = 0) stays zero: Phi is singular at the origin.
    let mut values = vec![Complex64::new(0.0, 0.0); grid.n];
    let mut derivs = vec![Complex64::new(0.0, 0.0); grid.n];
    for (j, &_r) in nodes.iter().enumerate() {
        values[j + 1] = out.u[j];
        derivs[j + 1] = out.up[j];
    }
    Ok((EigenFunction { lambda, grid, values, derivs }, warning))
}

/// c(lambda) from the weighted Wronskian
/// c = W_A[phi, Phi_{-lambda}] / W_A[Phi_lambda, Phi_{-lambda}] at r_match,
/// with the Jost values taken from their defining seeds. Computed in
/// Liouville coordinates v = sqrt(A) u so the weight A cancels.
pub fn compute_c(model: &DensityModel, lambda: Complex64, r_match: f64) -> Result<CFunctionValue> {
    strip_guard(model, lambda)?;
    if lambda.norm() < 1e-3 {
        return Err(Error::Singular(
            "c-function extraction degenerates near lambda = 0; use the Plancherel extrapolation".into(),
        ));
    }
    let sch = Schedule::forward_strict(model, &[r_match], lambda.norm(), default_h_max(model))?;
    let out = sch.sweep(lambda);
    let (u, up) = (out.u[0], out.up[0]);
    let l_half = 0.5 * model.log_a(r_match)?;
    let g = 0.5 * model.logderiv(r_match)?;
    if l_half > 650.0 {
        return Err(Error::Domain(format!("r_match = {r_match} overflows sqrt(A)")));
    }
    let el = l_half.exp();
    let v_phi = u * el;
    let v_phi_p = (up + u * g) * el;
    // x = sqrt(A) e^{-rho r} stays bounded
    let x = (l_half - model.rho * r_match).exp();
    let i = Complex64::new(0.0, 1.0);
    let vp_plus = x * (i * lambda * r_match).exp();
    let vp_plus_d = vp_plus * (i * lambda - model.rho + g);
    let vp_minus = x * (-i * lambda * r_match).exp();
    let vp_minus_d = vp_minus * (-i * lambda - model.rho + g);
    let w_top = v_phi * vp_minus_d - v_phi_p * vp_minus;
    let w_bot = vp_plus * vp_minus_d - vp_plus_d * vp_minus;
    let c = w_top / w_bot;
    if !c.is_finite() {
        return Err(Error::Convergence(format!("c extraction non-finite at lambda = {lambda}")));
    }
    Ok(CFunctionValue { lambda, c, plancherel_weight: 1.0 / c.norm_sqr() })
}

pub(crate) fn default_r_match(model: &DensityModel) -> f64 {
    20.0 / model.scale()
}

/// Plancherel density |c(lambda)|^{-2} at the requested (real, >= 0)
/// lambda nodes. Values are interpolated from a per-model ladder cache
/// (spacing 0.1); the lambda -> 0 end is filled by even quadratic
/// extrapolation of |c|^{-2}/lambda^2.
pub fn plancherel_density(model: &DensityModel, lambdas: &[f64]) -> Result<Vec<f64>> {
    let lam_hi = lambdas.iter().cloned().fold(0.0, f64::max);
    ensure_ladder(model, lam_hi + 1.0)?;
    let cache = model.caches.plancherel.lock().unwrap();
    let h = |k: usize| -> f64 {
        let lam = PL_STEP * (k + 1) as f64;
        cache[k] / (lam * lam)
    };
    let mut out = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let lam = lam.abs(); // even in lambda
        let hval = if lam < 2.0 * PL_STEP {
            // quadratic fit of h in lambda^2 from the first ladder entries
            let (x0, x1, x2) = (PL_STEP, 2.0 * PL_STEP, 3.0 * PL_STEP);
            let (y0, y1, y2) = (h(0), h(1), h(2));
            lagrange3(lam * lam, x0 * x0, y0, x1 * x1, y1, x2 * x2, y2)
        } else {
            // 8-point Lagrange on the ladder
            let t = lam / PL_STEP - 1.0;
            let n = cache.len();
            let lo = ((t.round() as i64) - 4).clamp(0, n as i64 - 8) as usize;
            let mut acc = 0.0;
            for j in 0..8 {
                let xj = (lo + j) as f64;
                let mut l = 1.0;
                for k in 0..8 {
                    if k != j {
                        let xk = (lo + k) as f64;
                        l *= (t - xk) / (xj - xk);
                    }
                }
                acc += h(lo + j) * l;
            }
            acc
        };
        out.push(hval * lam * lam);
    }
    Ok(out)
}

fn lagrange3(x: f64, x0: f64, y0: f64, x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1))
}

fn ensure_ladder(model: &DensityModel, lam_hi: f64) -> Result<()> {
    let need = (lam_hi / PL_STEP).ceil() as usize + 8;
    let have = model.caches.plancherel.lock().unwrap().len();
    if have >= need {
        return Ok(());
    }
    let r_match = default_r_match(model);
    let lam_max = PL_STEP * (need + 1) as f64;
    let sch = Schedule::forward_strict(model, &[r_match], lam_max, default_h_max(model))?;
    let l_half = 0.5 * model.log_a(r_match)?;
    let g = 0.5 * model.logderiv(r_match)?;
    let el = l_half.exp();
    let x = (l_half - model.rho * r_match).exp();
    let mut fresh = Vec::with_capacity(need - have);
    for k in have..need {
        let lam = PL_STEP * (k + 1) as f64;
        let out = sch.sweep(Complex64::new(lam, 0.0));
        let (u, up) = (out.u[0], out.up[0]);
        let v_phi = u * el;
        let v_phi_p = (up + u * g) * el;
        let i = Complex64::new(0.0, 1.0);
        let e = (i * lam * r_match).exp();
        let vp_plus = x * e;
        let vp_plus_d = vp_plus * (i * lam - model.rho + g);
        let vp_minus = x * e.conj();
        let vp_minus_d = vp_minus * (-i * lam - model.rho + g);
        let c = (v_phi * vp_minus_d - v_phi_p * vp_minus) / (vp_plus * vp_minus_d - vp_plus_d * vp_minus);
        fresh.push(1.0 / c.norm_sqr());
    }
    let mut cache = model.caches.plancherel.lock().unwrap();
    if cache.len() < need {
        cache.truncate(have);
        cache.extend(fresh);
    }
    Ok(())
}

#[derive(Debug)]
pub struct DirichletBasis {
    pub r_dom: f64,
    pub lambdas: Vec<f64>,
    pub norms: Vec<f64>,
    pub basis: Vec<EigenFunction>,
    /// quadrature used for the norms and coefficient pairings
    pub quad: QuadGrid,
    /// A(r) at the quadrature nodes
    pub a_at_quad: Vec<f64>,
    /// phi_{lambda_k} at the quadrature nodes
    pub basis_at_quad: Vec<Vec<f64>>,
}

/// First K Dirichlet eigenvalues on the ball of radius `r_dom`: roots of
/// lambda -> phi_lambda(r_dom), found by scanning for sign changes and
/// refining by bisection.
pub fn dirichlet_spectrum(model: &DensityModel, r_dom: f64, k_count: usize) -> Result<DirichletBasis> {
    assert!(r_dom > 0.0 && k_count >= 1);
    let lam_cap = (k_count as f64 + 2.0) * std::f64::consts::PI / r_dom + 5.0;
    let sch = Schedule::forward_strict(model, &[r_dom], lam_cap, default_h_max(model))?;
    let f = |lam: f64| sch.sweep(Complex64::new(lam, 0.0)).u[0].re;
    let mut roots = Vec::with_capacity(k_count);
    let mut step = std::f64::consts::PI / r_dom / 10.0;
    let mut halvings = 0usize;
    let mut lam = 1e-3;
    let mut prev = f(lam);
    while roots.len() < k_count {
        let nxt = lam + step;
        if nxt > lam_cap {
            if halvings < 6 {
                // rescan remaining window more finely
                step *= 0.5;
                halvings += 1;
                lam = roots.last().cloned().unwrap_or(1e-3);
                prev = f(lam);
                continue;
            }
            return Err(Error::Root(format!(
                "found only {} of {} Dirichlet roots below lambda = {lam_cap}",
                roots.len(),
                k_count
            )));
        }
        let cur = f(nxt);
        if prev == 0.0 {
            roots.push(lam);
        } else if prev * cur < 0.0 {
            // bisection, then a few secant polish steps
            let (mut a, mut b, mut fa) = (lam, nxt, prev);
            for _ in 0..40 {
                let mid = 0.5 * (a + b);
                let fm = f(mid);
                if fa * fm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            let (mut x0, mut x1) = (a, b);
            let (mut f0, mut f1) = (f(x0), f(x1));
            for _ in 0..4 {
                if (f1 - f0).abs() < 1e-300 {
                    break;
                }
                let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
                if !x2.is_finite() {
                    break;
                }
                x0 = x1;
                f0 = f1;
                x1 = x2;
                f1 = f(x1);
            }
            roots.push(x1);
        }
        lam = nxt;
        prev = cur;
    }
    let lam_max = *roots.last().unwrap();
    // norms over [0, r_dom] with weight A dr
    let quad = QuadGrid::panels(1e-9, r_dom, lam_max, 8);
    let nsch = Schedule::forward_strict(model, &quad.nodes, lam_max, default_h_max(model))?;
    let a_at_quad: Vec<f64> = quad
        .nodes
        .iter()
        .map(|&r| model.log_a(r).map(f64::exp))
        .collect::<Result<_>>()?;
    let grid = Grid::new(r_dom / 1024.0, 1025);
    let mut norms = Vec::new();
    let mut basis = Vec::new();
    let mut basis_at_quad = Vec::new();
    for &lam in &roots {
        let outq = nsch.sweep(Complex64::new(lam, 0.0));
        let phi_q: Vec<f64> = outq.u.iter().map(|v| v.re).collect();
        let norm: f64 = phi_q
            .iter()
            .zip(&a_at_quad)
            .zip(&quad.weights)
            .map(|((&p, &a), &w)| p * p * a * w)
            .sum();
        norms.push(norm);
        basis.push(eval_phi(model, Complex64::new(lam, 0.0), grid)?);
        basis_at_quad.push(phi_q);
    }
    Ok(DirichletBasis {
        r_dom,
        lambdas: roots,
        norms,
        basis,
        quad,
        a_at_quad,
        basis_at_quad,
    })
}

/// Probes analyticity of the numeric c-function on horizontal lines
/// Im lambda = tau and returns a lower bound for eps_max (the strip where
/// the Plancherel density extends holomorphically). An estimate, not
/// ground truth.
pub fn estimate_eps_max_lower_bound(model: &DensityModel, tau_cap: f64) -> f64 {
    let r_match = default_r_match(model);
    let mut good = 0.0;
    let mut tau = 0.1;
    while tau <= tau_cap {
        let mut ok = true;
        for &lam in &[0.5, 1.0, 2.0, 5.0] {
            match compute_c(model, Complex64::new(lam, tau), r_match) {
                Ok(cv) if cv.c.is_finite() && cv.c.norm() > 1e-12 => {}
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            break;
        }
        good = tau;
        tau += 0.1;
    }
    good
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{damek_ricci_like, h3, h4};

    #[test]
    fn phi_h3_value() {
        let m = h3();
        let g = Grid::span(2.0, 0.5);
        let e = eval_phi(&m, Complex64::new(1.0, 0.0), g).unwrap();
        let want = 1.0f64.sin() / 1.0f64.sinh();
        assert!((e.values[2].re - want).abs() < 1e-10); // r = 1
        assert!((e.values[0].re - 1.0).abs() < 1e-14); // normalization
        assert!((want - 0.7160229153604339).abs() < 1e-12);
    }

    #[test]
    fn phi_rejects_outside_strip() {
        let m = h3();
        let g = Grid::span(1.0, 0.5);
        assert!(eval_phi(&m, Complex64::new(1.0, 12.0), g).is_err());
    }

    #[test]
    fn jost_magnitude_h3() {
        let m = h3();
        let g = Grid::span(40.0, 2.0);
        let (phi, warn) = eval_phi_asymptotic(&m, Complex64::new(1.0, 0.0), g, 40.0).unwrap();
        assert!(!warn);
        let got = phi.values[1].norm(); // r = 2
        let want = (-2.0f64).exp() / (1.0 - (-4.0f64).exp());
        assert!((got - want).abs() < 1e-9, "got {got} want {want}");
        assert!((want - 0.137860).abs() < 1e-6);
        // convergence of |Phi e^{(rho - i lam) r} - 1| -> 0 for large r in H4
        let m4 = h4();
        let (phi4, _) = eval_phi_asymptotic(&m4, Complex64::new(3.0, 0.0), g, 40.0).unwrap();
        let mut prev = f64::INFINITY;
        for i in (4..=20).step_by(4) {
            let r = phi4.grid.x(i);
            let z = phi4.values[i]
                * ((m4.rho - Complex64::new(0.0, 3.0)) * r).exp();
            let dev = (z - 1.0).norm();
            assert!(dev <= prev + 1e-12, "not monotone at r={r}");
            prev = dev;
        }
    }

    #[test]
    fn c_function_h3() {
        let m = h3();
        let cv = compute_c(&m, Complex64::new(2.0, 0.0), 40.0).unwrap();
        // c(lambda) = 1/(i lambda) in H3
        assert!((cv.c - Complex64::new(0.0, -0.5)).norm() < 1e-8, "c = {}", cv.c);
        assert!((cv.plancherel_weight - 4.0).abs() < 1e-7);
        // weight / lambda^2 constant across [0.5, 10]
        let mut vals = Vec::new();
        for i in 0..20 {
            let lam = 0.5 + i as f64 * 0.5;
            let cv = compute_c(&m, Complex64::new(lam, 0.0), 40.0).unwrap();
            vals.push(cv.plancherel_weight / (lam * lam));
        }
        let (mn, mx) = vals.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!((mx - mn) / mx < 1e-6, "spread {}", (mx - mn) / mx);
    }

    #[test]
    fn c_conjugation_symmetry() {
        for m in [h3(), h4(), damek_ricci_like()] {
            let r = default_r_match(&m);
            let cp = compute_c(&m, Complex64::new(3.0, 0.0), r).unwrap();
            let cm = compute_c(&m, Complex64::new(-3.0, 0.0), r).unwrap();
            assert!((cp.c - cm.c.conj()).norm() < 1e-8 * cp.c.norm());
        }
    }

    #[test]
    fn c_match_radius_invariance() {
        for m in [h3(), h4(), damek_ricci_like()] {
            let r = default_r_match(&m);
            let a = compute_c(&m, Complex64::new(1.5, 0.0), r).unwrap();
            let b = compute_c(&m, Complex64::new(1.5, 0.0), r + 5.0).unwrap();
            assert!(
                (a.c - b.c).norm() < 1e-6 * a.c.norm(),
                "c varies with r_match: {} vs {}",
                a.c,
                b.c
            );
        }
    }

    #[test]
    fn c_singular_near_zero() {
        let m = h3();
        assert!(matches!(
            compute_c(&m, Complex64::new(1e-5, 0.0), 40.0),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn plancherel_h3_is_lambda_squared() {
        let m = h3();
        let lams: Vec<f64> = (0..50).map(|i| i as f64 * 0.25).collect();
        let w = plancherel_density(&m, &lams).unwrap();
        for (i, &lam) in lams.iter().enumerate() {
            assert!((w[i] - lam * lam).abs() < 1e-6 * (1.0 + lam * lam), "lam={lam} w={}", w[i]);
        }
        assert!(w[0].abs() < 1e-6);
    }

    #[test]
    fn dirichlet_h3_integer_spectrum() {
        let m = h3();
        let b = dirichlet_spectrum(&m, std::f64::consts::PI, 5).unwrap();
        for (k, &lam) in b.lambdas.iter().enumerate() {
            assert!((lam - (k + 1) as f64).abs() < 1e-9, "lambda_{k} = {lam}");
        }
        // norm oracle: phi_k = sin(k r)/(k sinh r), A = 4 sinh^2 =>
        // ||phi_k||^2 = (4/k^2) int_0^pi sin^2(k r) dr = 2 pi / k^2
        for (k, &n) in b.norms.iter().enumerate() {
            let want = 2.0 * std::f64::consts::PI / ((k + 1) as f64).powi(2);
            assert!((n - want).abs() < 1e-8 * want, "norm_{k} = {n} want {want}");
        }
        // boundary values vanish
        for e in &b.basis {
            assert!(e.values[e.grid.n - 1].norm() < 1e-8);
        }
    }

    #[test]
    fn dirichlet_h4_gaps() {
        let m = h4();
        let b = dirichlet_spectrum(&m, 2.0, 20).unwrap();
        for w in b.lambdas.windows(2) {
            assert!(w[1] > w[0]);
        }
        let gap_tail = b.lambdas[19] - b.lambdas[18];
        assert!((gap_tail - std::f64::consts::PI / 2.0).abs() < 0.05, "gap {gap_tail}");
    }

    #[test]
    fn eigenfunction_bounds_in_strip() {
        // |phi_lambda(r)| <= phi_{i Im lambda}(r) <= e^{|Im| r}, and
        // e^{(|Im|-rho) r} <= phi_{i Im}(r) <= 1 for |Im| <= rho
        for m in [h3(), h4()] {
            let g = Grid::span(10.0, 0.5);
            for &tau in &[0.0, 0.3, 0.9 * m.rho] {
                let lam = Complex64::new(1.3, tau);
                let phi = eval_phi(&m, lam, g).unwrap();
                let maj = eval_phi(&m, Complex64::new(0.0, tau), g).unwrap();
                for i in 0..g.n {
                    let r = g.x(i);
                    assert!(phi.values[i].norm() <= maj.values[i].re + 1e-10);
                    assert!(maj.values[i].re <= (tau * r).exp() + 1e-10);
                    if tau <= m.rho {
                        assert!(maj.values[i].re <= 1.0 + 1e-10);
                        assert!(maj.values[i].re >= ((tau - m.rho) * r).exp() - 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn phi0_subexponential_growth_of_e_rho_r() {
        // phi_0(r) e^{rho r} should grow at most polynomially
        for m in [h3(), h4()] {
            let g = Grid::span(30.0, 1.0);
            let phi = eval_phi(&m, Complex64::new(0.0, 0.0), g).unwrap();
            let mut logs = Vec::new();
            for i in 5..=30 {
                let r = g.x(i);
                logs.push(((phi.values[i].re * (m.rho * r).exp()).ln(), r.ln()));
            }
            // slope of log(phi e^{rho r}) vs log r must stay modest
            let n = logs.len() as f64;
            let sx: f64 = logs.iter().map(|p| p.1).sum();
            let sy: f64 = logs.iter().map(|p| p.0).sum();
            let sxx: f64 = logs.iter().map(|p| p.1 * p.1).sum();
            let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
            let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            assert!(slope.abs() <= 2.0, "slope {slope}");
        }
    }

    #[test]
    fn eps_max_probe_h3_reaches_cap() {
        let m = h3();
        assert!(estimate_eps_max_lower_bound(&m, 0.8) >= 0.7);
    }
}
