//! Radial eigenfunction ODE engine.
//!
//! The equation u'' + (A'/A) u' = -(lambda^2 + rho^2) u is integrated in
//! Liouville form: with v = sqrt(A) u it becomes v'' = (G(r) - lambda^2) v
//! where G is the condition-(C4) potential. A two-node Magnus scheme of
//! order four propagates v exactly through the oscillation, so the step
//! count is independent of |lambda|. The step schedule (and the potential
//! samples at its Gauss nodes) depends only on the model and the requested
//! output nodes and is reused across lambda sweeps.

use crate::density::DensityModel;
use crate::error::{Error, Result};
use num_complex::Complex64;

const SQRT3: f64 = 1.7320508075688772;

#[derive(Debug, Clone, Copy)]
struct Step {
    h: f64,
    g1: f64,
    g2: f64,
    /// output slot to fill after this step, if any
    emit: Option<u32>,
}

#[derive(Debug, Clone, Copy)]
struct Emit {
    /// e^{-log A / 2} at the node
    inv_sqrt_a: f64,
    /// A'/(2A) at the node
    g_half: f64,
}

/// Candidate series-to-Magnus handoff point. The Frobenius launch series
/// converges fastest when sqrt(|lambda^2 + rho^2|) * r stays moderate, so
/// each sweep enters the march at the largest boundary satisfying that,
/// skipping the G ~ c/r^2 pole region where stepping loses accuracy.
#[derive(Debug, Clone, Copy)]
struct LaunchPt {
    r: f64,
    step_index: usize,
    emits_before: usize,
    sqrt_a: f64,
    g_half: f64,
}

/// Precomputed integration schedule for one model and one set of output
/// radii. `sweep` evaluates phi_lambda (and derivative) at every node.
#[derive(Debug)]
pub struct Schedule {
    r0: f64,
    start_inv: Emit,
    steps: Vec<Step>,
    emits: Vec<Emit>,
    /// radius of each emit, in emit order
    emit_r: Vec<f64>,
    /// output slot of each emit, in emit order
    emit_out: Vec<u32>,
    launch: Vec<LaunchPt>,
    n_out: usize,
    /// nodes at or below the series radius (index, radius)
    series_nodes: Vec<(usize, f64)>,
    /// pole strength p in A'/A ~ p/r
    pole_p: f64,
    /// regular-part coefficients of A'/A (empty when unavailable)
    series_w: Vec<f64>,
    rho: f64,
}

fn emit_at(model: &DensityModel, r: f64) -> Result<Emit> {
    Ok(Emit {
        inv_sqrt_a: (-0.5 * model.log_a(r)?).exp(),
        g_half: 0.5 * model.logderiv(r)?,
    })
}

impl Schedule {
    /// Forward schedule from the regular-singular origin out to the last of
    /// `r_nodes` (sorted ascending, all >= 0). `lambda_abs_max` bounds the
    /// |lambda| this schedule will be used with (it sets the series-start
    /// radius); `h_max` is the uniform step ceiling.
    pub fn forward(
        model: &DensityModel,
        r_nodes: &[f64],
        lambda_abs_max: f64,
        h_max: f64,
    ) -> Result<Schedule> {
        // relative accuracy at lambda far above the cap knee degrades to
        // ~1e-5, which syntheses tolerate (spectra have decayed there)
        Self::forward_inner(model, r_nodes, lambda_abs_max, h_max, lambda_abs_max.min(60.0))
    }

    /// As `forward`, but with the origin-region phase cap tracking the full
    /// lambda range. Used where relative accuracy at large lambda matters
    /// (Plancherel ladder, c-function, eigenvalue roots).
    pub fn forward_strict(
        model: &DensityModel,
        r_nodes: &[f64],
        lambda_abs_max: f64,
        h_max: f64,
    ) -> Result<Schedule> {
        Self::forward_inner(model, r_nodes, lambda_abs_max, h_max, lambda_abs_max)
    }

    fn forward_inner(
        model: &DensityModel,
        r_nodes: &[f64],
        lambda_abs_max: f64,
        h_max: f64,
        cap_lambda: f64,
    ) -> Result<Schedule> {
        assert!(!r_nodes.is_empty());
        let scale = model.scale();
        let s_max = (lambda_abs_max * lambda_abs_max + model.rho * model.rho).sqrt();
        let r0 = 1e-3 / (1.0 + s_max) / scale.max(1.0);
        let mut series_nodes = Vec::new();
        let mut walk = Vec::new();
        for (i, &r) in r_nodes.iter().enumerate() {
            assert!(r >= 0.0, "negative radius in schedule");
            if i > 0 {
                assert!(r > r_nodes[i - 1], "r_nodes must be strictly increasing");
            }
            if r <= r0 {
                series_nodes.push((i, r));
            } else {
                walk.push((i, r));
            }
        }
        let series_w = model.logderiv_series().unwrap_or_default();
        // the series is trusted out to here (tanh/coth expansion accuracy)
        let r_series_max = if series_w.is_empty() { r0 } else { 0.35 / scale };
        let mut steps = Vec::new();
        let mut emits = Vec::new();
        let mut emit_r = Vec::new();
        let mut emit_out = Vec::new();
        let mut launch = Vec::new();
        let mut r = r0;
        // near the origin, where G still varies strongly, cap the phase
        // advance per step for the largest lambda this schedule serves
        let phase_cap = 0.25 / (1.0 + cap_lambda);
        let r_phase = 1.0 / scale.max(1.0);
        let mut next = walk.iter().peekable();
        let push_launch = |model: &DensityModel, r: f64, si: usize, eb: usize, launch: &mut Vec<LaunchPt>| -> Result<()> {
            let e = emit_at(model, r)?;
            launch.push(LaunchPt {
                r,
                step_index: si,
                emits_before: eb,
                sqrt_a: 1.0 / e.inv_sqrt_a,
                g_half: e.g_half,
            });
            Ok(())
        };
        push_launch(model, r0, 0, 0, &mut launch)?;
        while let Some(&&(idx, rn)) = next.peek() {
            // graded near the origin, uniform elsewhere
            let mut h_here = h_max.min((r / 6.0).max(r0));
            if r < r_phase {
                h_here = h_here.min(phase_cap.max(r0));
            }
            let target = (r + h_here).min(rn);
            let h = target - r;
            let c1 = r + h * (0.5 - SQRT3 / 6.0);
            let c2 = r + h * (0.5 + SQRT3 / 6.0);
            let emit = if target >= rn - 1e-15 {
                next.next();
                emits.push(emit_at(model, rn)?);
                emit_r.push(rn);
                emit_out.push(idx as u32);
                Some(idx as u32)
            } else {
                None
            };
            steps.push(Step {
                h,
                g1: model.g_potential(c1)?,
                g2: model.g_potential(c2)?,
                emit,
            });
            r = target;
            if r <= r_series_max {
                push_launch(model, r, steps.len(), emits.len(), &mut launch)?;
            }
        }
        Ok(Schedule {
            r0,
            start_inv: emit_at(model, r0)?,
            steps,
            emits,
            emit_r,
            emit_out,
            launch,
            n_out: r_nodes.len(),
            series_nodes,
            pole_p: model.small_r_exponent,
            series_w,
            rho: model.rho,
        })
    }

    /// Backward schedule seeding an asymptotic (Jost) solution at `r_start`
    /// and emitting at `r_nodes` (ascending, all in (0, r_start]).
    pub fn backward(
        model: &DensityModel,
        r_nodes: &[f64],
        r_start: f64,
        h_max: f64,
    ) -> Result<Schedule> {
        assert!(!r_nodes.is_empty());
        let r_min = r_nodes[0];
        if r_min <= 0.0 {
            return Err(Error::Domain(
                "asymptotic solutions are singular at r = 0; nodes must be positive".into(),
            ));
        }
        if *r_nodes.last().unwrap() > r_start + 1e-12 {
            return Err(Error::Domain("output nodes beyond the seed radius".into()));
        }
        let mut steps = Vec::new();
        let mut emits = Vec::new();
        let mut emit_r = Vec::new();
        let mut r = r_start;
        let mut targets = r_nodes.iter().enumerate().rev().peekable();
        // emit exactly at the seed if requested
        while let Some(&(idx, &rn)) = targets.peek() {
            if rn >= r_start - 1e-15 {
                emits.push(emit_at(model, rn)?);
                emit_r.push(rn);
                steps.push(Step { h: 0.0, g1: 0.0, g2: 0.0, emit: Some(idx as u32) });
                targets.next();
            } else {
                break;
            }
        }
        while let Some(&(idx, &rn)) = targets.peek() {
            let h_here = h_max.min((r / 3.0).max(1e-6));
            let target = (r - h_here).max(rn);
            let h = target - r; // negative
            let c1 = r + h * (0.5 - SQRT3 / 6.0);
            let c2 = r + h * (0.5 + SQRT3 / 6.0);
            let emit = if target <= rn + 1e-15 {
                targets.next();
                emits.push(emit_at(model, rn)?);
                emit_r.push(rn);
                Some(idx as u32)
            } else {
                None
            };
            steps.push(Step {
                h,
                g1: model.g_potential(c1)?,
                g2: model.g_potential(c2)?,
                emit,
            });
            r = target;
        }
        Ok(Schedule {
            r0: r_start,
            start_inv: emit_at(model, r_start)?,
            steps,
            emits,
            emit_r,
            emit_out: Vec::new(),
            launch: Vec::new(),
            n_out: r_nodes.len(),
            series_nodes: Vec::new(),
            pole_p: model.small_r_exponent,
            series_w: Vec::new(),
            rho: model.rho,
        })
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    /// phi_lambda sweep: Frobenius series launch, Magnus march, emit (u, u').
    pub fn sweep(&self, lambda: Complex64) -> SweepOut {
        let rho2 = self.rho * self.rho;
        let s2 = lambda * lambda + rho2;
        let lam2 = lambda * lambda;
        let mut out = SweepOut::zeros(self.n_out);
        // nodes inside the series region (incl. r = 0)
        for &(idx, r) in &self.series_nodes {
            let (u, up) = self.series_eval(s2, r);
            out.u[idx] = u;
            out.up[idx] = up;
        }
        // deepest handoff point the series still converges well at
        let s_abs = s2.norm().sqrt();
        let entry = self
            .launch
            .iter()
            .rev()
            .find(|lp| s_abs * lp.r <= 3.0)
            .unwrap_or(&self.launch[0]);
        // nodes the march will now skip get their values from the series
        for e in 0..entry.emits_before {
            let idx = self.emit_out[e] as usize;
            let (u, up) = self.series_eval(s2, self.emit_r[e]);
            out.u[idx] = u;
            out.up[idx] = up;
        }
        out.emitted = entry.emits_before;
        // launch state in v coordinates
        let (u0, up0) = self.series_eval(s2, entry.r);
        let mut v = u0 * entry.sqrt_a;
        let mut vp = (up0 + u0 * entry.g_half) * entry.sqrt_a;
        self.march(entry.step_index, lam2, &mut v, &mut vp, &mut out);
        out
    }

    /// Jost-solution sweep: seed v from Phi = e^{(i lambda - rho) r_start}
    /// and march backward. Only valid for `backward` schedules.
    pub fn sweep_asymptotic(&self, lambda: Complex64) -> SweepOut {
        let lam2 = lambda * lambda;
        let mut out = SweepOut::zeros(self.n_out);
        let seed = (Complex64::new(0.0, 1.0) * lambda - self.rho) * self.r0;
        let phi = seed.exp();
        let sa = 1.0 / self.start_inv.inv_sqrt_a;
        let mut v = phi * sa;
        let mut vp =
            phi * (Complex64::new(0.0, 1.0) * lambda - self.rho + self.start_inv.g_half) * sa;
        self.march(0, lam2, &mut v, &mut vp, &mut out);
        out
    }

    /// Frobenius solution of u'' + (p/r + sum w_j r^{2j+1}) u' + mu u = 0
    /// with u(0) = 1: u = sum a_k r^{2k}, the recurrence
    /// a_k = -(mu a_{k-1} + sum_j 2(k-1-j) w_j a_{k-1-j}) / (2k (2k-1+p)).
    fn series_eval(&self, mu: Complex64, r: f64) -> (Complex64, Complex64) {
        let p = self.pole_p;
        let r2 = r * r;
        let mut a = Vec::with_capacity(24);
        a.push(Complex64::new(1.0, 0.0));
        let mut u = Complex64::new(1.0, 0.0);
        let mut up = Complex64::new(0.0, 0.0);
        let mut rpow = 1.0; // r^{2k}
        for k in 1..=60usize {
            let mut num = mu * a[k - 1];
            for (j, &w) in self.series_w.iter().enumerate() {
                if j + 1 > k - 1 + 1 {
                    break;
                }
                let m = k as i64 - 1 - j as i64;
                if m < 0 {
                    break;
                }
                num += 2.0 * m as f64 * w * a[m as usize];
            }
            let ak = -num / (2.0 * k as f64 * (2.0 * k as f64 - 1.0 + p));
            a.push(ak);
            rpow *= r2;
            let term = ak * rpow;
            u += term;
            up += ak * (2.0 * k as f64) * rpow / r.max(1e-300);
            if term.norm() < 1e-18 * (1.0 + u.norm()) {
                break;
            }
        }
        if r == 0.0 {
            up = Complex64::new(0.0, 0.0);
        }
        (u, up)
    }

    fn march(&self, from: usize, lam2: Complex64, v: &mut Complex64, vp: &mut Complex64, out: &mut SweepOut) {
        let real_lam = lam2.im == 0.0;
        for st in &self.steps[from..] {
            if st.h != 0.0 {
                let h = st.h;
                let qbar = Complex64::new(0.5 * (st.g1 + st.g2), 0.0) - lam2;
                let d = SQRT3 * h * h / 12.0 * (st.g2 - st.g1);
                let theta2 = qbar * (h * h) + d * d;
                let (c, s) = cosh_sinhc(theta2, real_lam);
                let nv = (c - s * d) * *v + s * h * *vp;
                let nvp = s * h * qbar * *v + (c + s * d) * *vp;
                *v = nv;
                *vp = nvp;
            }
            if let Some(idx) = st.emit {
                let e = self.emits[out.emitted];
                out.emitted += 1;
                let i = idx as usize;
                out.u[i] = *v * e.inv_sqrt_a;
                out.up[i] = (*vp - *v * e.g_half) * e.inv_sqrt_a;
            }
        }
    }
}

/// cosh(theta) and sinh(theta)/theta from theta^2, with real fast paths.
#[inline]
fn cosh_sinhc(theta2: Complex64, real: bool) -> (Complex64, Complex64) {
    if real {
        let x = theta2.re;
        if x.abs() < 1e-12 {
            return (
                Complex64::new(1.0 + 0.5 * x, 0.0),
                Complex64::new(1.0 + x / 6.0, 0.0),
            );
        }
        if x > 0.0 {
            let t = x.sqrt();
            (
                Complex64::new(t.cosh(), 0.0),
                Complex64::new(t.sinh() / t, 0.0),
            )
        } else {
            let t = (-x).sqrt();
            (
                Complex64::new(t.cos(), 0.0),
                Complex64::new(t.sin() / t, 0.0),
            )
        }
    } else {
        if theta2.norm() < 1e-12 {
            return (1.0 + 0.5 * theta2, 1.0 + theta2 / 6.0);
        }
        let t = theta2.sqrt();
        (t.cosh(), t.sinh() / t)
    }
}

/// Result of one radial sweep: u and u' at the schedule's output nodes.
#[derive(Debug, Clone)]
pub struct SweepOut {
    pub u: Vec<Complex64>,
    pub up: Vec<Complex64>,
    emitted: usize,
}

impl SweepOut {
    fn zeros(n: usize) -> Self {
        SweepOut {
            u: vec![Complex64::new(0.0, 0.0); n],
            up: vec![Complex64::new(0.0, 0.0); n],
            emitted: 0,
        }
    }
}

/// Default uniform step ceiling for Magnus marching.
pub fn default_h_max(model: &DensityModel) -> f64 {
    0.02 / model.scale().max(1.0)
}
