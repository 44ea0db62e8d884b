//! The transform stack: radial Fourier transform and its inverse with the
//! calibrated constant C0, Plancherel pairing, Abel transform (spectral
//! route), dual Abel transform and its inverse, and the Euclidean line
//! Fourier transform on even functions.

use crate::density::DensityModel;
use crate::eigen::plancherel_density;
use crate::error::{Error, Result};
use crate::funcs::{EvenLineFunction, Grid, RadialFunction, SpectralFunction};
use crate::ode::{default_h_max, Schedule};
use crate::quad::QuadGrid;
use num_complex::Complex64;
use rayon::prelude::*;

/// Ceiling for adaptive spectral truncation.
const LAMBDA_CEIL: f64 = 2000.0;

/// f(r) A(r) sphere_const at quadrature nodes, from interpolated samples.
fn weighted_samples(model: &DensityModel, f: &RadialFunction, quad: &QuadGrid) -> Result<Vec<Complex64>> {
    quad.nodes
        .iter()
        .map(|&r| Ok(f.at(r) * (model.log_a(r)?.exp() * model.sphere_const)))
        .collect()
}

/// u_hat(lambda) = sphere_const * int_0^inf u(r) phi_lambda(r) A(r) dr on
/// the given uniform lambda grid.
pub fn forward_radial_fourier(
    model: &DensityModel,
    f: &RadialFunction,
    lambda_grid: Grid,
) -> Result<SpectralFunction> {
    let lam_max = lambda_grid.x_max();
    if lam_max * f.grid.dx > 0.2 {
        return Err(Error::Resolution(format!(
            "lambda_max * dr = {} exceeds 0.2; refine the radial grid",
            lam_max * f.grid.dx
        )));
    }
    if f.support_radius > f.grid.x_max() - 2.0 * f.grid.dx {
        return Err(Error::Resolution(
            "radial function not supported well inside its grid".into(),
        ));
    }
    let r_hi = (f.support_radius + 2.0 * f.grid.dx).min(f.grid.x_max());
    let quad = QuadGrid::panels(0.0, r_hi.max(4.0 * f.grid.dx), lam_max, 8);
    let wf = weighted_samples(model, f, &quad)?;
    let sch = Schedule::forward(model, &quad.nodes, lam_max, default_h_max(model))?;
    let lambdas = lambda_grid.nodes();
    let values: Vec<Complex64> = lambdas
        .par_iter()
        .map(|&lam| {
            let out = sch.sweep(Complex64::new(lam, 0.0));
            out.u
                .iter()
                .zip(&wf)
                .zip(&quad.weights)
                .map(|((&p, &v), &w)| p * v * w)
                .sum()
        })
        .collect();
    let weight = plancherel_density(model, &lambdas)?;
    Ok(SpectralFunction { grid: lambda_grid, values, weight })
}

/// Forward transform with the truncation radius Lambda_max chosen
/// adaptively so the spectrum has decayed below `tail_tol` times its peak.
pub fn forward_radial_fourier_auto(
    model: &DensityModel,
    f: &RadialFunction,
    tail_tol: f64,
) -> Result<SpectralFunction> {
    let r_eff = f.support_radius.max(4.0 * f.grid.dx);
    let dlam = (0.05 / r_eff).min(0.2 / (f.grid.dx * LAMBDA_CEIL));
    let chunk = 256usize;
    let mut values: Vec<Complex64> = Vec::new();
    let mut peak = 0.0f64;
    let r_hi = (f.support_radius + 2.0 * f.grid.dx)
        .min(f.grid.x_max())
        .max(4.0 * f.grid.dx);
    loop {
        let start = values.len();
        let lams: Vec<f64> = (start..start + chunk).map(|i| i as f64 * dlam).collect();
        if lams[0] > LAMBDA_CEIL {
            return Err(Error::Truncation(format!(
                "spectrum not decayed below {tail_tol} of peak at lambda = {LAMBDA_CEIL}"
            )));
        }
        let lam_end = lams[lams.len() - 1];
        if lam_end * f.grid.dx > 0.2 {
            return Err(Error::Resolution(format!(
                "adaptive truncation needs lambda_max = {lam_end} but lambda_max * dr exceeds 0.2"
            )));
        }
        let quad = QuadGrid::panels(0.0, r_hi, lam_end, 8);
        let wf = weighted_samples(model, f, &quad)?;
        let sch = Schedule::forward(model, &quad.nodes, lam_end, default_h_max(model))?;
        let mut fresh: Vec<Complex64> = lams
            .par_iter()
            .map(|&lam| {
                let out = sch.sweep(Complex64::new(lam, 0.0));
                out.u
                    .iter()
                    .zip(&wf)
                    .zip(&quad.weights)
                    .map(|((&p, &v), &w)| p * v * w)
                    .sum()
            })
            .collect();
        peak = fresh.iter().fold(peak, |m, v| m.max(v.norm()));
        values.append(&mut fresh);
        let tail = values[values.len() - 32..]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if peak > 0.0 && tail <= tail_tol * peak {
            break;
        }
        if peak == 0.0 && values.len() >= 4 * chunk {
            break; // zero input
        }
    }
    let grid = Grid { dx: dlam, n: values.len() };
    let weight = plancherel_density(model, &grid.nodes())?;
    Ok(SpectralFunction { grid, values, weight })
}

/// Guard shared by the inverse-type syntheses.
fn truncation_guard(fs: &SpectralFunction) -> Result<()> {
    let m = fs.max_abs();
    if m == 0.0 {
        return Ok(());
    }
    let tail = fs.values[fs.values.len().saturating_sub(8)..]
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    if tail > 1e-10 * m {
        return Err(Error::Truncation(format!(
            "spectrum tail {:.3e} above 1e-10 of peak {:.3e} at Lambda_max",
            tail, m
        )));
    }
    Ok(())
}

/// Quadrature in lambda for a spectral synthesis whose physical-side
/// oscillation scale is `r_scale`. Panels also stay fine enough to resolve
/// the stored spectrum itself.
pub(crate) fn lambda_quad(fs: &SpectralFunction, r_scale: f64) -> QuadGrid {
    let own_scale = (0.2 / fs.grid.dx).min(40.0);
    QuadGrid::panels(0.0, fs.grid.x_max(), r_scale + own_scale, 8)
}

/// Generic synthesis sum_k qw_k m(lambda_k) phi_{lambda_k}(r_j) over a set
/// of output radii; `mults` supplies one multiplier per output row. When
/// `use_deriv` is set for a row, d/dr phi is accumulated instead of phi.
pub(crate) fn synthesize(
    model: &DensityModel,
    quad: &QuadGrid,
    mults: &[Vec<Complex64>],
    use_deriv: &[bool],
    r_nodes: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    let lam_max = fs_max(&quad.nodes);
    let sch = Schedule::forward(model, r_nodes, lam_max, default_h_max(model))?;
    let n_rows = mults.len();
    let zero = vec![vec![Complex64::new(0.0, 0.0); r_nodes.len()]; n_rows];
    let acc = quad
        .nodes
        .par_iter()
        .enumerate()
        .fold(
            || zero.clone(),
            |mut acc, (k, &lam)| {
                let out = sch.sweep(Complex64::new(lam, 0.0));
                let qw = quad.weights[k];
                for (row, mult) in mults.iter().enumerate() {
                    let m = mult[k] * qw;
                    if m.norm_sqr() == 0.0 {
                        continue;
                    }
                    let src = if use_deriv[row] { &out.up } else { &out.u };
                    for (j, &p) in src.iter().enumerate() {
                        acc[row][j] += m * p;
                    }
                }
                acc
            },
        )
        .reduce(
            || zero.clone(),
            |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
                a
            },
        );
    Ok(acc)
}

fn fs_max(nodes: &[f64]) -> f64 {
    nodes.iter().cloned().fold(0.0, f64::max)
}

/// The calibrated inversion constant C0, fixed per model by enforcing the
/// Plancherel identity on a reference truncated Gaussian.
pub fn calibrate_c0(model: &DensityModel) -> Result<f64> {
    if let Some(&c0) = model.caches.c0.get() {
        return Ok(c0);
    }
    let grid = Grid::span(8.0, 2e-3);
    let fref = RadialFunction::from_fn(grid, 8.0 - 3.0 * 2e-3, |r| {
        Complex64::new((-r * r).exp(), 0.0)
    });
    let fs = forward_radial_fourier(model, &fref, Grid::span(14.0 + 2.0 * model.rho, 0.01))?;
    let num = l2_norm_physical(model, &fref)?;
    let den = {
        let q = lambda_quad(&fs, 0.0);
        q.integrate_real(|lam| {
            let v = fs.at(lam).norm_sqr();
            let w = plancherel_weight_interp(&fs, lam);
            v * w
        })
    };
    let c0 = num / den;
    let _ = model.caches.c0.set(c0);
    Ok(c0)
}

/// sphere_const * int |f|^2 A dr.
pub fn l2_norm_physical(model: &DensityModel, f: &RadialFunction) -> Result<f64> {
    let hi = (f.support_radius + 2.0 * f.grid.dx).min(f.grid.x_max());
    let quad = QuadGrid::panels(0.0, hi.max(4.0 * f.grid.dx), 10.0 / f.grid.dx.min(1.0), 8);
    let mut acc = 0.0;
    for (&r, &w) in quad.nodes.iter().zip(&quad.weights) {
        acc += f.at(r).norm_sqr() * model.log_a(r)?.exp() * w;
    }
    Ok(acc * model.sphere_const)
}

/// C0 * int |F|^2 weight dlambda.
pub fn l2_norm_spectral(model: &DensityModel, fs: &SpectralFunction) -> Result<f64> {
    let c0 = calibrate_c0(model)?;
    let q = lambda_quad(fs, 0.0);
    Ok(c0
        * q.integrate_real(|lam| fs.at(lam).norm_sqr() * plancherel_weight_interp(fs, lam)))
}

/// Plancherel weight at arbitrary lambda from the samples stored on the
/// spectral grid (they were produced by the eigen-module ladder).
pub(crate) fn plancherel_weight_interp(fs: &SpectralFunction, lam: f64) -> f64 {
    let t = lam / fs.grid.dx;
    let n = fs.weight.len();
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
        acc += fs.weight[lo + j] * l;
    }
    acc.max(0.0)
}

/// u(r) = C0 int F(lambda) phi_lambda(r) |c|^{-2} dlambda.
pub fn inverse_radial_fourier(
    model: &DensityModel,
    fs: &SpectralFunction,
    r_grid: Grid,
) -> Result<RadialFunction> {
    truncation_guard(fs)?;
    let c0 = calibrate_c0(model)?;
    let quad = lambda_quad(fs, r_grid.x_max());
    let mult: Vec<Complex64> = quad
        .nodes
        .iter()
        .map(|&lam| fs.at(lam) * (plancherel_weight_interp(fs, lam) * c0))
        .collect();
    let r_nodes = r_grid.nodes();
    let rows = synthesize(model, &quad, &[mult], &[false], &r_nodes)?;
    let values = rows.into_iter().next().unwrap();
    let f = RadialFunction { grid: r_grid, values, support_radius: r_grid.x_max() };
    let sr = crate::funcs::support_radius(&f, 1e-9);
    Ok(RadialFunction { support_radius: sr, ..f })
}

/// Abel transform via the Abel-Fourier relation: A(f) is the inverse line
/// Fourier transform of the radial Fourier transform of f.
pub fn abel(model: &DensityModel, f: &RadialFunction) -> Result<EvenLineFunction> {
    let fs = forward_radial_fourier_auto(model, f, 1e-11)?;
    let s_grid = Grid::span(f.support_radius + 0.5, f.grid.dx.max(1e-3));
    inverse_line_fourier(&fs, s_grid)
}

/// Dual Abel transform: cosine-analyze the even line function, then
/// synthesize against phi_lambda with the flat measure dlambda / pi, so
/// that a(cos(lambda .)) = phi_lambda node-wise.
pub fn dual_abel(model: &DensityModel, u: &EvenLineFunction, r_grid: Grid) -> Result<RadialFunction> {
    // adaptive spectral cap for the cosine data (the probe quadrature must
    // resolve cos(lambda s) at the frequency it probes)
    let mut lam_cap = 10.0 / u.grid.x_max().max(0.1);
    let base_quad = QuadGrid::panels(0.0, u.grid.x_max(), 2.0, 8);
    let mut peak = (0..16)
        .map(|i| {
            let lam = i as f64 * 0.125;
            2.0 * base_quad.integrate(|s| u.at(s) * (lam * s).cos()).norm()
        })
        .fold(0.0f64, f64::max);
    loop {
        let probe_quad = QuadGrid::panels(0.0, u.grid.x_max(), lam_cap + 1.0, 8);
        let probe: f64 = (0..16)
            .map(|i| {
                let lam = lam_cap + i as f64 * 0.05;
                probe_quad
                    .integrate(|s| u.at(s) * (lam * s).cos())
                    .norm()
            })
            .fold(0.0, f64::max);
        peak = peak.max(2.0 * probe);
        if peak > 0.0 && 2.0 * probe <= 1e-9 * peak {
            break;
        }
        if peak == 0.0 && lam_cap > 50.0 {
            break;
        }
        lam_cap *= 1.3;
        if lam_cap > LAMBDA_CEIL {
            return Err(Error::Truncation(
                "cosine spectrum of line data does not decay within the lambda ceiling".into(),
            ));
        }
    }
    // the s-quadrature must resolve cos(lam_cap s): rebuild if needed
    let s_quad = QuadGrid::panels(0.0, u.grid.x_max(), lam_cap, 8);
    let samples: Vec<Complex64> = s_quad
        .nodes
        .iter()
        .zip(&s_quad.weights)
        .map(|(&s, &w)| u.at(s) * w)
        .collect();
    let cosine = |lam: f64| -> Complex64 {
        2.0 * s_quad
            .nodes
            .iter()
            .zip(&samples)
            .map(|(&s, &v)| v * (lam * s).cos())
            .sum::<Complex64>()
    };
    let quad = QuadGrid::panels(0.0, lam_cap, r_grid.x_max() + u.grid.x_max(), 8);
    let mult: Vec<Complex64> = quad
        .nodes
        .iter()
        .map(|&lam| cosine(lam) / std::f64::consts::PI)
        .collect();
    let r_nodes = r_grid.nodes();
    let rows = synthesize(model, &quad, &[mult], &[false], &r_nodes)?;
    let values = rows.into_iter().next().unwrap();
    let f = RadialFunction { grid: r_grid, values, support_radius: r_grid.x_max() };
    let sr = crate::funcs::support_radius(&f, 1e-9);
    Ok(RadialFunction { support_radius: sr, ..f })
}

/// Inverse dual Abel transform:
/// a^{-1}(g)(t) = C0 int g_hat(lambda) cos(lambda t) |c|^{-2} dlambda.
pub fn inverse_dual_abel(model: &DensityModel, g: &RadialFunction, t_grid: Grid) -> Result<EvenLineFunction> {
    let gs = forward_radial_fourier_auto(model, g, 1e-11)?;
    inverse_dual_abel_spectral(model, &gs, t_grid)
}

/// Same, starting from an already-computed spectrum.
pub fn inverse_dual_abel_spectral(
    model: &DensityModel,
    gs: &SpectralFunction,
    t_grid: Grid,
) -> Result<EvenLineFunction> {
    let c0 = calibrate_c0(model)?;
    let quad = lambda_quad(gs, t_grid.x_max());
    let values: Vec<Complex64> = t_grid
        .nodes()
        .par_iter()
        .map(|&t| {
            quad.nodes
                .iter()
                .zip(&quad.weights)
                .map(|(&lam, &w)| {
                    gs.at(lam) * ((lam * t).cos() * plancherel_weight_interp(gs, lam) * c0 * w)
                })
                .sum()
        })
        .collect();
    Ok(EvenLineFunction { grid: t_grid, values })
}

/// Line Fourier transform of an even function in cosine form:
/// F(u)(lambda) = 2 int_0^inf u(t) cos(lambda t) dt. The weight field of
/// the result is zero (no Plancherel density on the line side).
pub fn line_fourier(u: &EvenLineFunction, lambda_grid: Grid) -> SpectralFunction {
    let quad = QuadGrid::panels(0.0, u.grid.x_max(), lambda_grid.x_max(), 8);
    let samples: Vec<Complex64> = quad
        .nodes
        .iter()
        .zip(&quad.weights)
        .map(|(&s, &w)| u.at(s) * w)
        .collect();
    let values: Vec<Complex64> = lambda_grid
        .nodes()
        .par_iter()
        .map(|&lam| {
            2.0 * quad
                .nodes
                .iter()
                .zip(&samples)
                .map(|(&s, &v)| v * (lam * s).cos())
                .sum::<Complex64>()
        })
        .collect();
    SpectralFunction { grid: lambda_grid, values, weight: vec![0.0; lambda_grid.n] }
}

/// Line Fourier transform evaluated at one complex frequency.
pub fn line_fourier_complex(u: &EvenLineFunction, lambda: Complex64) -> Complex64 {
    let quad = QuadGrid::panels(0.0, u.grid.x_max(), lambda.re.abs() + lambda.im.abs(), 8);
    2.0 * quad
        .nodes
        .iter()
        .zip(&quad.weights)
        .map(|(&s, &w)| u.at(s) * (lambda * s).cos() * w)
        .sum::<Complex64>()
}

/// Inverse line Fourier transform of an even spectrum:
/// u(s) = (1/pi) int_0^inf F(lambda) cos(lambda s) dlambda.
pub fn inverse_line_fourier(fs: &SpectralFunction, s_grid: Grid) -> Result<EvenLineFunction> {
    let quad = lambda_quad(fs, s_grid.x_max());
    let values: Vec<Complex64> = s_grid
        .nodes()
        .par_iter()
        .map(|&s| {
            quad.nodes
                .iter()
                .zip(&quad.weights)
                .map(|(&lam, &w)| fs.at(lam) * ((lam * s).cos() * w / std::f64::consts::PI))
                .sum()
        })
        .collect();
    Ok(EvenLineFunction { grid: s_grid, values })
}

/// Forward transform at a single complex lambda (Paley-Wiener probes).
pub fn forward_at_complex(model: &DensityModel, f: &RadialFunction, lambda: Complex64) -> Result<Complex64> {
    let r_hi = (f.support_radius + 2.0 * f.grid.dx).min(f.grid.x_max());
    let quad = QuadGrid::panels(0.0, r_hi.max(4.0 * f.grid.dx), lambda.norm(), 8);
    let wf = weighted_samples(model, f, &quad)?;
    let sch = Schedule::forward(model, &quad.nodes, lambda.norm(), default_h_max(model))?;
    let out = sch.sweep(lambda);
    Ok(out
        .u
        .iter()
        .zip(&wf)
        .zip(&quad.weights)
        .map(|((&p, &v), &w)| p * v * w)
        .sum())
}
