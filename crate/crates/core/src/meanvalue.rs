//! Spherical-mean operator M_x on radial data, via the spectral product
//! formula M_x phi_lambda = phi_lambda(d) phi_lambda(r), plus the
//! Asgeirsson-symmetry diagnostic.

use crate::density::DensityModel;
use crate::error::Result;
use crate::funcs::{plateau_profile, Grid, RadialFunction};
use crate::ode::{default_h_max, Schedule};
use crate::transforms::{
    calibrate_c0, forward_radial_fourier_auto, lambda_quad, plancherel_weight_interp, synthesize,
};
use num_complex::Complex64;

/// Mean of f (radial about the base point) over the sphere of radius r
/// centered at a point at distance d from the base point:
/// M f(r) = C0 int f_hat(lambda) phi_lambda(d) phi_lambda(r) w(lambda) dlambda.
/// At d = 0 the operator is the identity on radial profiles and is applied
/// exactly.
pub fn spherical_mean(
    model: &DensityModel,
    f: &RadialFunction,
    d: f64,
    r_grid: Grid,
) -> Result<RadialFunction> {
    if d == 0.0 {
        let values: Vec<Complex64> = r_grid.nodes().iter().map(|&r| f.at(r)).collect();
        return Ok(RadialFunction {
            grid: r_grid,
            values,
            support_radius: f.support_radius.min(r_grid.x_max()),
        });
    }
    let fs = forward_radial_fourier_auto(model, f, 1e-11)?;
    let c0 = calibrate_c0(model)?;
    let quad = lambda_quad(&fs, r_grid.x_max() + d);
    // phi_lambda(d) at every quadrature node, one short sweep each
    let sch_d = Schedule::forward(model, &[d], fs.grid.x_max(), default_h_max(model))?;
    let phi_d: Vec<Complex64> = quad
        .nodes
        .iter()
        .map(|&lam| sch_d.sweep(Complex64::new(lam, 0.0)).u[0])
        .collect();
    let mult: Vec<Complex64> = quad
        .nodes
        .iter()
        .zip(&phi_d)
        .map(|(&lam, &pd)| fs.at(lam) * pd * (plancherel_weight_interp(&fs, lam) * c0))
        .collect();
    let r_nodes = r_grid.nodes();
    let rows = synthesize(model, &quad, &[mult], &[false], &r_nodes)?;
    let values = rows.into_iter().next().unwrap();
    let out = RadialFunction { grid: r_grid, values, support_radius: r_grid.x_max() };
    let sr = crate::funcs::support_radius(&out, 1e-9);
    Ok(RadialFunction { support_radius: sr, ..out })
}

/// Point-evaluation surrogate: the r -> 0 limit of the mean,
/// C0 int f_hat(lambda) phi_lambda(d) w(lambda) dlambda.
pub fn mean_at_origin(model: &DensityModel, f: &RadialFunction, d: f64) -> Result<Complex64> {
    let fs = forward_radial_fourier_auto(model, f, 1e-11)?;
    let c0 = calibrate_c0(model)?;
    let quad = lambda_quad(&fs, d);
    let sch_d = Schedule::forward(model, &[d.max(1e-12)], fs.grid.x_max(), default_h_max(model))?;
    Ok(quad
        .nodes
        .iter()
        .zip(&quad.weights)
        .map(|(&lam, &w)| {
            let pd = sch_d.sweep(Complex64::new(lam, 0.0)).u[0];
            fs.at(lam) * pd * (plancherel_weight_interp(&fs, lam) * c0 * w)
        })
        .sum())
}

/// phi_lambda(d) phi_lambda(t) obtained through the mean-value route: the
/// eigenfunction is windowed to compact support (flat out to where the
/// sphere of radius t about the distance-d point can reach), transformed,
/// and averaged spectrally.
fn product_via_mean(model: &DensityModel, lambda: f64, d: f64, t: f64) -> Result<Complex64> {
    let inner = d + t + 0.3;
    let outer = inner + 1.0;
    let win = plateau_profile(inner, outer);
    let dr = (0.2 / (lambda + 40.0)).min(5e-4);
    let grid = Grid::span(outer + 4.0 * dr, dr);
    let phi = crate::eigen::eval_phi(model, Complex64::new(lambda, 0.0), grid)?;
    let f = RadialFunction {
        grid,
        values: phi
            .values
            .iter()
            .zip(grid.nodes())
            .map(|(&v, r)| v * win(r))
            .collect(),
        support_radius: outer,
    };
    let m = spherical_mean(model, &f, d, Grid::new(t.max(1e-9), 2))?;
    Ok(m.values[1])
}

/// Symmetry defect of the Asgeirsson identity for the separable
/// eigen-solution u(x, y) = phi_lambda(d(base, x)) phi_lambda(d(q, y)):
/// the mean in y at radius r about the distance-d2 point, against the mean
/// in x at radius s about the distance-d1 point. Both sides are
/// phi_lambda(d1) phi_lambda(d2) phi_lambda(r or s); the defect measures
/// the numerics of the product formula applied from either slot.
pub fn asgeirsson_residual(
    model: &DensityModel,
    lambda: f64,
    d1: f64,
    d2: f64,
    r: f64,
    s: f64,
) -> Result<f64> {
    let grid = Grid::span(d1.max(d2) + 1e-3, 1e-4);
    let phi = crate::eigen::eval_phi(model, Complex64::new(lambda, 0.0), grid)?;
    let p_d1 = phi.at(d1);
    let p_d2 = phi.at(d2);
    let lhs = p_d1 * product_via_mean(model, lambda, d2, r)?;
    let rhs = p_d2 * product_via_mean(model, lambda, d1, s)?;
    Ok((lhs - rhs).norm())
}
