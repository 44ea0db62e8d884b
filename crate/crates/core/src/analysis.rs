//! Theorem-level diagnostics: Huygens decay behind the light cone,
//! kinetic/potential equipartition, Paley-Wiener decay of transforms in a
//! complex strip, spectral-support radius from Plancherel moments, and
//! light-cone leakage of computed trajectories.

use crate::density::{DensityKind, DensityModel};
use crate::error::Result;
use crate::funcs::{Grid, RadialFunction, SpectralFunction};
use crate::quad::QuadGrid;
use crate::transforms::{
    calibrate_c0, forward_at_complex, forward_radial_fourier_auto, lambda_quad,
    plancherel_weight_interp, synthesize,
};
use crate::wave::{CauchyData, WaveState};
use num_complex::Complex64;
use serde::Serialize;

/// A measured decay profile with an optional fitted exponential rate.
/// The rate is reported only when the log-linear fit residual (RMS) is
/// below 0.1, as required for any quantitative claim.
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub claim: String,
    pub region: String,
    pub abscissa: Vec<f64>,
    pub values: Vec<f64>,
    pub rate: Option<f64>,
    pub fit_residual: f64,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl DecayReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Least-squares log-linear fit of the upper envelope of |values| over the
/// abscissa; returns (decay rate = -slope, RMS residual of the fit).
/// Envelope points (running maxima from the right) are used because the
/// profiles oscillate through near-zeros that would dominate a raw log fit.
fn fit_decay(abscissa: &[f64], values: &[f64]) -> (f64, f64) {
    let mut env: Vec<(f64, f64)> = Vec::new();
    let mut best = 0.0f64;
    for i in (0..values.len()).rev() {
        if values[i] > best {
            best = values[i];
            env.push((abscissa[i], best.ln()));
        }
    }
    env.reverse();
    if env.len() < 3 {
        return (0.0, f64::INFINITY);
    }
    let n = env.len() as f64;
    let sx: f64 = env.iter().map(|p| p.0).sum();
    let sy: f64 = env.iter().map(|p| p.1).sum();
    let sxx: f64 = env.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = env.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return (0.0, f64::INFINITY);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let inter = (sy - slope * sx) / n;
    let res = (env
        .iter()
        .map(|p| {
            let e = p.1 - (slope * p.0 + inter);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    (-slope, res)
}

/// True for the model with an entire (polynomial) Plancherel density in our
/// catalog: the 3-dimensional real hyperbolic space, where the strong
/// Huygens principle holds exactly.
fn strong_huygens(model: &DensityModel) -> bool {
    matches!(model.kind, DensityKind::Jacobi { alpha, beta, .. }
        if (alpha - 0.5).abs() < 1e-12 && (beta + 0.5).abs() < 1e-12)
}

/// |u(d, t)| over a grid of times, asserted to vanish behind the light cone
/// t = d + R0 where the strong Huygens principle applies (H^3), otherwise
/// fitted to a measured exponential decay rate.
pub fn huygens_profile(
    model: &DensityModel,
    data: &CauchyData,
    d: f64,
    t_grid: Grid,
) -> Result<DecayReport> {
    let fs = forward_radial_fourier_auto(model, &data.f, 1e-11)?;
    let gs = forward_radial_fourier_auto(model, &data.g, 1e-11)?;
    let c0 = calibrate_c0(model)?;
    let ts = t_grid.nodes();
    let wide = if fs.grid.x_max() >= gs.grid.x_max() { &fs } else { &gs };
    let quad = lambda_quad(wide, d + t_grid.x_max());
    // one multiplier row per observation time; a single sweep pass over the
    // shared lambda quadrature evaluates every u(d, t)
    let mults: Vec<Vec<Complex64>> = ts
        .iter()
        .map(|&t| {
            quad.nodes
                .iter()
                .map(|&lam| {
                    let w = plancherel_weight_interp(&fs, lam)
                        .max(plancherel_weight_interp(&gs, lam));
                    let (s, c) = (lam * t).sin_cos();
                    let sinc = if lam.abs() < 1e-6 { t } else { s / lam };
                    (fs.at(lam) * c + gs.at(lam) * sinc) * (w * c0)
                })
                .collect()
        })
        .collect();
    let use_deriv = vec![false; mults.len()];
    let rows = synthesize(model, &quad, &mults, &use_deriv, &[d])?;
    let values: Vec<f64> = rows.iter().map(|row| row[0].norm()).collect();
    let peak = values.iter().cloned().fold(0.0, f64::max);
    let cone = d + data.support_radius;
    let region = format!("t >= {cone} (behind the light cone at d = {d})");
    if strong_huygens(model) {
        let margin = cone + 2.0 * data.f.grid.dx;
        let measured = ts
            .iter()
            .zip(&values)
            .filter(|(&t, _)| t >= margin)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max);
        let threshold = 1e-6 * peak;
        Ok(DecayReport {
            claim: "strong Huygens lacuna".into(),
            region,
            abscissa: ts,
            values,
            rate: None,
            fit_residual: 0.0,
            measured,
            threshold,
            pass: measured <= threshold,
        })
    } else {
        // fit window: the near-cone transient (about one unit past the
        // cone) is not exponential yet, and past cone + 3 the synthesized
        // profile sinks toward the quadrature floor (~1e-8 relative), so
        // the fit uses the clean stretch in between
        let post_peak = ts
            .iter()
            .zip(&values)
            .filter(|(&t, _)| t > cone)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max);
        let (xs, vs): (Vec<f64>, Vec<f64>) = ts
            .iter()
            .zip(&values)
            .filter(|(&t, &v)| {
                t > cone + 1.0 && t <= cone + 3.0 && v >= 1e-12 * post_peak
            })
            .map(|(&t, &v)| (t, v))
            .unzip();
        let (rate, res) = fit_decay(&xs, &vs);
        let ok = res < 0.1;
        Ok(DecayReport {
            claim: "asymptotic Huygens decay".into(),
            region,
            abscissa: ts,
            values,
            rate: if ok { Some(rate) } else { None },
            fit_residual: res,
            measured: rate,
            threshold: 0.0,
            pass: ok && rate > 0.0,
        })
    }
}

/// |K - P| / E over a grid of times, from the closed spectral expressions
/// K = 1/2 C0 int |-(lambda) f_hat sin + g_hat cos|^2 w dlambda and
/// P = 1/2 C0 int |lambda f_hat cos + g_hat sin|^2 w dlambda.
pub fn equipartition_profile(
    model: &DensityModel,
    data: &CauchyData,
    t_grid: Grid,
) -> Result<DecayReport> {
    let fs = forward_radial_fourier_auto(model, &data.f, 1e-11)?;
    let gs = forward_radial_fourier_auto(model, &data.g, 1e-11)?;
    let c0 = calibrate_c0(model)?;
    let wide = if fs.grid.x_max() >= gs.grid.x_max() { &fs } else { &gs };
    let quad = lambda_quad(wide, 2.0 * t_grid.x_max());
    let ts = t_grid.nodes();
    let mut values = Vec::with_capacity(ts.len());
    let mut e_total = 0.0;
    for &t in &ts {
        let (mut k, mut p) = (0.0, 0.0);
        for (&lam, &qw) in quad.nodes.iter().zip(&quad.weights) {
            let w = plancherel_weight_interp(&fs, lam)
                .max(plancherel_weight_interp(&gs, lam));
            let (s, c) = (lam * t).sin_cos();
            let fh = fs.at(lam);
            let gh = gs.at(lam);
            k += (fh * (-lam * s) + gh * c).norm_sqr() * w * qw;
            p += (fh * (lam * c) + gh * s).norm_sqr() * w * qw;
        }
        k *= 0.5 * c0;
        p *= 0.5 * c0;
        e_total = k + p;
        values.push((k - p).abs() / (k + p));
    }
    let _ = e_total;
    let r0 = data.support_radius;
    if strong_huygens(model) {
        let margin = r0 + 2.0 * data.f.grid.dx;
        let measured = ts
            .iter()
            .zip(&values)
            .filter(|(&t, _)| t >= margin)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max);
        Ok(DecayReport {
            claim: "exact equipartition".into(),
            region: format!("t >= {margin}"),
            abscissa: ts,
            values,
            rate: None,
            fit_residual: 0.0,
            measured,
            threshold: 1e-6,
            pass: measured <= 1e-6,
        })
    } else {
        // fit window: the steep post-support transient ends about 1.25
        // units past the support radius, and past r0 + 2.5 the ratio sinks
        // toward the quadrature floor, so the fit uses the stretch between
        let post_peak = ts
            .iter()
            .zip(&values)
            .filter(|(&t, _)| t > r0)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max);
        let (xs, vs): (Vec<f64>, Vec<f64>) = ts
            .iter()
            .zip(&values)
            .filter(|(&t, &v)| {
                t > r0 + 1.25 && t <= r0 + 2.5 && v >= 1e-12 * post_peak
            })
            .map(|(&t, &v)| (t, v))
            .unzip();
        let (rate, res) = fit_decay(&xs, &vs);
        let ok = res < 0.1;
        Ok(DecayReport {
            claim: "asymptotic equipartition decay".into(),
            region: format!("t > {r0}"),
            abscissa: ts,
            values,
            rate: if ok { Some(rate) } else { None },
            fit_residual: res,
            measured: rate,
            threshold: 0.0,
            pass: ok && rate > 0.0,
        })
    }
}

/// One row of the Paley-Wiener table: the measured strip bound
/// sup_lambda e^{-R tau} (1 + |lambda + i tau|)^n |f_hat(lambda + i tau)|.
#[derive(Debug, Clone, Serialize)]
pub struct PwRow {
    pub n: u32,
    pub tau: f64,
    pub sup: f64,
    /// true when the running sup stopped growing as the lambda grid was
    /// extended, i.e. the bound is finite on the sampled range
    pub plateau: bool,
}

/// Paley-Wiener decay table for a compactly supported f with declared
/// support radius `r_support`, over polynomial orders `n_list` and strip
/// heights `tau_list`.
pub fn paley_wiener_report(
    model: &DensityModel,
    f: &RadialFunction,
    r_support: f64,
    n_list: &[u32],
    tau_list: &[f64],
    lambda_max: f64,
) -> Result<Vec<PwRow>> {
    let lams: Vec<f64> = {
        let n = (lambda_max / 0.5).ceil() as usize;
        (0..=n).map(|i| i as f64 * 0.5).collect()
    };
    let mut rows = Vec::new();
    for &tau in tau_list {
        let vals: Vec<f64> = lams
            .iter()
            .map(|&lam| {
                forward_at_complex(model, f, Complex64::new(lam, tau)).map(|v| v.norm())
            })
            .collect::<Result<_>>()?;
        for &n in n_list {
            let weight = |lam: f64, v: f64| {
                (-r_support * tau).exp()
                    * (1.0 + Complex64::new(lam, tau).norm()).powi(n as i32)
                    * v
            };
            let half_sup = lams
                .iter()
                .zip(&vals)
                .filter(|(&lam, _)| lam <= 0.5 * lambda_max)
                .map(|(&lam, &v)| weight(lam, v))
                .fold(0.0, f64::max);
            let sup = lams
                .iter()
                .zip(&vals)
                .map(|(&lam, &v)| weight(lam, v))
                .fold(0.0, f64::max);
            rows.push(PwRow {
                n,
                tau,
                sup,
                plateau: sup <= half_sup * (1.0 + 1e-12) || sup == 0.0,
            });
        }
    }
    Ok(rows)
}

/// The Plancherel moment I_j = C0 int lambda^{2j} |F|^2 w dlambda, returned
/// as ln I_j (log space, so large j cannot overflow).
pub fn spectral_moment_ln(
    model: &DensityModel,
    fs: &SpectralFunction,
    j: u32,
) -> Result<f64> {
    let c0 = calibrate_c0(model)?;
    let quad = lambda_quad(fs, 0.0);
    let lam_scale = fs.grid.x_max();
    // I_j = lam_scale^{2j} * int (lambda/lam_scale)^{2j} |F|^2 w dlambda
    let scaled: f64 = quad
        .nodes
        .iter()
        .zip(&quad.weights)
        .map(|(&lam, &qw)| {
            (lam / lam_scale).powi(2 * j as i32)
                * fs.at(lam).norm_sqr()
                * plancherel_weight_interp(fs, lam)
                * qw
        })
        .sum();
    Ok(2.0 * j as f64 * lam_scale.ln() + (scaled * c0).ln())
}

/// Spectral support radius by Plancherel moments. The raw 2j-th roots
/// I_j^{1/(2j)} share the limit R_F but approach it like R_F (2j)^{-1/(2j)}
/// (still ~5% low at j = 40); the successive-moment ratios
/// m_j = (I_j / I_{j-1})^{1/2} have the same limit and converge fast, and by
/// Cauchy-Schwarz they increase monotonically. Returns (m_1 .. m_{j_max}).
pub fn pw_radius(model: &DensityModel, fs: &SpectralFunction, j_max: u32) -> Result<Vec<f64>> {
    if fs.max_abs() == 0.0 {
        return Ok(vec![0.0; j_max as usize]);
    }
    let mut prev = spectral_moment_ln(model, fs, 0)?;
    let mut out = Vec::with_capacity(j_max as usize);
    for j in 1..=j_max {
        let cur = spectral_moment_ln(model, fs, j)?;
        out.push((0.5 * (cur - prev)).exp());
        prev = cur;
    }
    Ok(out)
}

/// Max over snapshots of the energy-mass fraction outside the light cone
/// r = r0 + |t| + 3 dr (finite propagation speed, Cor. on support growth).
pub fn light_cone_leakage(model: &DensityModel, states: &[WaveState], r0: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for st in states {
        let cone = r0 + st.t.abs() + 3.0 * st.u.grid.dx;
        let r_max = st.u.grid.x_max();
        if cone >= r_max {
            continue;
        }
        let mass = |a: f64, b: f64| -> Result<f64> {
            let q = QuadGrid::panels(a, b, 20.0, 8);
            let mut acc = 0.0;
            for (&r, &w) in q.nodes.iter().zip(&q.weights) {
                acc += (st.u.at(r).norm_sqr() + st.ut.at(r).norm_sqr())
                    * model.log_a(r)?.exp()
                    * w;
            }
            Ok(acc)
        };
        let inside = mass(0.0, cone)?;
        let outside = mass(cone, r_max)?;
        if inside > 0.0 {
            worst = worst.max(outside / inside);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{h3, h4};
    use crate::funcs::bump;
    use crate::transforms::{l2_norm_physical, l2_norm_spectral};
    use crate::wave::{energy, propagate_spectral};

    fn bump_data(r0: f64) -> CauchyData {
        let grid = Grid::span(r0 + 0.25, 2e-4);
        CauchyData::new(bump(grid, r0, 1.0), RadialFunction::zeros(grid))
    }

    #[test]
    fn huygens_h3_lacuna_passes() {
        let m = h3();
        let data = bump_data(0.5);
        let rep = huygens_profile(&m, &data, 2.0, Grid::new(0.2, 18)).unwrap();
        assert!(rep.pass, "measured {:.3e} vs {:.3e}", rep.measured, rep.threshold);
        // inside the forbidden region (t < d + R0) the theorem is silent
        // and the profile is genuinely nonzero
        let near = rep
            .abscissa
            .iter()
            .zip(&rep.values)
            .find(|(&t, _)| (t - 2.4).abs() < 0.11)
            .map(|(_, &v)| v)
            .unwrap();
        assert!(near > rep.threshold, "pre-cone value {near:.3e} unexpectedly small");
    }

    #[test]
    fn huygens_h4_measured_rate() {
        let m = h4();
        let data = bump_data(0.5);
        let rep = huygens_profile(&m, &data, 2.0, Grid::new(0.1, 60)).unwrap();
        assert!(rep.pass, "fit residual {:.3}", rep.fit_residual);
        assert!(rep.rate.unwrap() > 0.0);
    }

    #[test]
    fn equipartition_h3_exact() {
        let m = h3();
        let data = bump_data(0.5);
        let rep = equipartition_profile(&m, &data, Grid::new(0.2, 16)).unwrap();
        assert!(rep.pass, "measured {:.3e}", rep.measured);
    }

    #[test]
    fn equipartition_t0_all_potential() {
        // g = 0 data at t = 0: K = 0, so |K - P|/E = 1
        let m = h4();
        let data = bump_data(0.5);
        let rep = equipartition_profile(&m, &data, Grid::new(0.5, 4)).unwrap();
        assert!((rep.values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equipartition_h4_decay_dominates_huygens() {
        let m = h4();
        let data = bump_data(0.5);
        let eq = equipartition_profile(&m, &data, Grid::new(0.1, 45)).unwrap();
        assert!(eq.pass, "fit residual {:.3}", eq.fit_residual);
        let hu = huygens_profile(&m, &data, 2.0, Grid::new(0.1, 60)).unwrap();
        let (req, rhu) = (eq.rate.unwrap(), hu.rate.unwrap());
        assert!(
            req >= 2.0 * rhu * 0.9,
            "equipartition rate {req:.3} vs 2x Huygens rate {:.3}",
            2.0 * rhu
        );
    }

    #[test]
    fn paley_wiener_bump_plateaus() {
        let m = h3();
        let grid = Grid::span(1.25, 2.5e-4);
        let f = bump(grid, 1.0, 1.0);
        let rows =
            paley_wiener_report(&m, &f, 1.0, &[0, 3, 6], &[0.0, 0.5], 160.0).unwrap();
        for row in &rows {
            assert!(row.plateau, "no plateau at n = {}, tau = {}", row.n, row.tau);
            assert!(row.sup.is_finite());
        }
        // classical envelope at n = 0, tau = 0.5: values stay below
        // e^{tau R} * ||A f||_L1, and the Abel transform is bounded by the
        // weighted L1 mass of f itself
        let abel_l1 = {
            let a = crate::transforms::abel(&m, &f).unwrap();
            let q = QuadGrid::panels(0.0, a.grid.x_max(), 4.0, 8);
            2.0 * q.integrate_real(|s| a.at(s).norm())
        };
        let row = rows.iter().find(|r| r.n == 0 && r.tau == 0.5).unwrap();
        let envelope = (0.5f64 * 1.0).exp() * abel_l1;
        // the report already divides out e^{-R tau}
        assert!(
            row.sup * (0.5f64 * 1.0).exp() <= envelope * (1.0 + 1e-6),
            "sup {:.6e} vs envelope {:.6e}",
            row.sup * (0.5f64 * 1.0).exp(),
            envelope
        );
    }

    #[test]
    fn paley_wiener_zero_input() {
        let m = h3();
        let grid = Grid::span(1.0, 1e-3);
        let f = RadialFunction::zeros(grid);
        let rows = paley_wiener_report(&m, &f, 1.0, &[0, 3], &[0.0], 10.0).unwrap();
        assert!(rows.iter().all(|r| r.sup == 0.0 && r.plateau));
    }

    #[test]
    fn pw_radius_band_limited() {
        // indicator-smoothed spectrum on [0, 2]: moments approach 2
        let m = h3();
        let lam_grid = Grid::span(2.2, 5e-4);
        let fs = {
            let edge = crate::funcs::plateau_profile(1.99, 2.0);
            let values: Vec<Complex64> =
                lam_grid.nodes().iter().map(|&lam| Complex64::new(edge(lam), 0.0)).collect();
            let weight =
                crate::eigen::plancherel_density(&m, &lam_grid.nodes()).unwrap();
            SpectralFunction { grid: lam_grid, values, weight }
        };
        let ms = pw_radius(&m, &fs, 40).unwrap();
        let m40 = ms[39];
        assert!((m40 - 2.0).abs() <= 0.04, "m_40 = {m40}");
        for w in ms.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "moments not monotone: {:?}", w);
        }
    }

    #[test]
    fn pw_radius_zero_and_divergent() {
        let m = h3();
        let zero = SpectralFunction {
            grid: Grid::span(2.0, 0.01),
            values: vec![Complex64::new(0.0, 0.0); 201],
            weight: vec![0.0; 201],
        };
        assert!(pw_radius(&m, &zero, 10).unwrap().iter().all(|&v| v == 0.0));
        // a space-side bump has full spectral support: moments keep growing
        // far beyond any bounded radius (the R_g = infinity branch)
        let grid = Grid::span(0.75, 2e-4);
        let f = bump(grid, 0.5, 1.0);
        let fs = forward_radial_fourier_auto(&m, &f, 1e-11).unwrap();
        let ms = pw_radius(&m, &fs, 40).unwrap();
        assert!(ms[39] > 50.0, "m_40 = {} did not diverge", ms[39]);
        assert!(ms[39] > ms[9]);
    }

    #[test]
    fn pw_space_consistency() {
        // applying the multiplier lambda^{2j} and taking the Plancherel norm
        // reproduces the pw_radius moment exactly
        let m = h3();
        let lam_grid = Grid::span(6.0, 0.005);
        let values: Vec<Complex64> = lam_grid
            .nodes()
            .iter()
            .map(|&lam| Complex64::new((-lam * lam).exp(), 0.0))
            .collect();
        let weight = crate::eigen::plancherel_density(&m, &lam_grid.nodes()).unwrap();
        let fs = SpectralFunction { grid: lam_grid, values: values.clone(), weight: weight.clone() };
        let j = 6u32;
        let i_j = spectral_moment_ln(&m, &fs, j).unwrap().exp();
        let shifted = SpectralFunction {
            grid: lam_grid,
            values: lam_grid
                .nodes()
                .iter()
                .zip(&values)
                .map(|(&lam, &v)| v * lam.powi(j as i32))
                .collect(),
            weight,
        };
        let via_norm = l2_norm_spectral(&m, &shifted).unwrap();
        assert!(
            (i_j - via_norm).abs() <= 1e-8 * i_j,
            "moment {i_j} vs multiplier route {via_norm}"
        );
    }

    #[test]
    fn light_cone_leakage_spectral() {
        let m = h3();
        let data = bump_data(0.5);
        let states: Vec<WaveState> = [0.5, 1.0, 1.5]
            .iter()
            .map(|&t| propagate_spectral(&m, &data, t).unwrap())
            .collect();
        let leak = light_cone_leakage(&m, &states, data.support_radius).unwrap();
        assert!(leak <= 1e-8, "leakage {leak:.3e}");
        let zero_grid = Grid::span(1.0, 1e-3);
        let z = WaveState {
            t: 1.0,
            u: RadialFunction::zeros(zero_grid),
            ut: RadialFunction::zeros(zero_grid),
        };
        assert_eq!(light_cone_leakage(&m, &[z], 0.2).unwrap(), 0.0);
    }

    #[test]
    fn energy_bound_band_limited() {
        // 2E <= Lambda^2 ||f||^2 + ||g||^2 for f spectrally supported in
        // [0, Lambda]
        let m = h3();
        let lam_grid = Grid::span(2.2, 0.005);
        let edge = crate::funcs::plateau_profile(1.95, 2.0);
        let values: Vec<Complex64> =
            lam_grid.nodes().iter().map(|&lam| Complex64::new(edge(lam), 0.0)).collect();
        let weight = crate::eigen::plancherel_density(&m, &lam_grid.nodes()).unwrap();
        let fs = SpectralFunction { grid: lam_grid, values, weight };
        let f = crate::transforms::inverse_radial_fourier(&m, &fs, Grid::span(12.0, 2e-3)).unwrap();
        let grid = f.grid;
        let g = RadialFunction::from_fn(grid, 1.45, |r| {
            Complex64::new(0.3 * (-16.0 * r * r).exp(), 0.0)
        });
        let st = WaveState { t: 0.0, u: f.clone(), ut: g.clone() };
        let gs = forward_radial_fourier_auto(&m, &g, 1e-11).unwrap();
        let (_, _, e) = energy(&m, &st, Some((&fs, &gs))).unwrap();
        let bound = 4.0 * l2_norm_physical(&m, &f).unwrap()
            + l2_norm_physical(&m, &g).unwrap()
            + 1e-6;
        assert!(2.0 * e <= bound, "2E = {:.6e} vs bound {:.6e}", 2.0 * e, bound);
    }
}
