//! Explicit Runge-Kutta integration of the six-dimensional first-order
//! systems, with conserved-quantity diagnostics.
//!
//! Two methods: classical fixed-step RK4 and an embedded Dormand-Prince
//! 5(4) pair with a PI step-size controller. Output samples are produced on
//! a uniform grid by clipping steps to land exactly on grid times; there is
//! no dense output.

use serde::{Deserialize, Serialize};

use crate::dynamics::{first_integral, lorentz_rhs, printed_system_rhs, speed_squared, State, SystemKind};
use crate::error::{H3Error, Result};
use crate::geometry::ModelParams;

/// Integration method selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum Method {
    /// Classical RK4 with a fixed step.
    FixedRk4 { step: f64 },
    /// Dormand-Prince 5(4) with relative/absolute tolerances.
    Embedded45 { rel_tol: f64, abs_tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub t_start: f64,
    pub t_end: f64,
    pub max_steps: u64,
    /// Output grid spacing (in |t| units).
    pub sample_every: f64,
}

impl IntegratorConfig {
    pub const DEFAULT_REL_TOL: f64 = 1e-10;
    pub const DEFAULT_ABS_TOL: f64 = 1e-12;

    pub fn embedded(t_start: f64, t_end: f64, sample_every: f64) -> Self {
        Self {
            method: Method::Embedded45 {
                rel_tol: Self::DEFAULT_REL_TOL,
                abs_tol: Self::DEFAULT_ABS_TOL,
            },
            t_start,
            t_end,
            max_steps: 1_000_000,
            sample_every,
        }
    }

    pub fn fixed_rk4(step: f64, t_start: f64, t_end: f64, sample_every: f64) -> Self {
        Self {
            method: Method::FixedRk4 { step },
            t_start,
            t_end,
            max_steps: 10_000_000,
            sample_every,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(H3Error::InvalidParam(m));
        if !(self.t_start.is_finite() && self.t_end.is_finite()) || self.t_end == self.t_start {
            return bad(format!("integration span must satisfy t_end != t_start, got [{}, {}]", self.t_start, self.t_end));
        }
        if !(self.sample_every.is_finite() && self.sample_every > 0.0) {
            return bad(format!("sample_every must be positive, got {}", self.sample_every));
        }
        if self.max_steps < 1 {
            return bad("max_steps must be >= 1".to_string());
        }
        match self.method {
            Method::FixedRk4 { step } => {
                if !(step.is_finite() && step > 0.0) {
                    return bad(format!("fixed step must be positive, got {step}"));
                }
            }
            Method::Embedded45 { rel_tol, abs_tol } => {
                if !(rel_tol >= 1e-14 && abs_tol >= 1e-14) {
                    return bad(format!("tolerances must be >= 1e-14, got rtol={rel_tol} atol={abs_tol}"));
                }
            }
        }
        Ok(())
    }
}

/// Conservation diagnostics accumulated against the values at `t_start`.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_speed2_drift: f64,
    /// None when the system carries no closed first integral (scaled fields).
    pub max_first_integral_drift: Option<f64>,
    pub steps: u64,
    pub rejected_steps: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: ModelParams,
    pub system: SystemKind,
    pub samples: Vec<(f64, State)>,
    pub diagnostics: Diagnostics,
}

type Vec6 = [f64; 6];

fn pack(s: &State) -> Vec6 {
    [s.x, s.y, s.z, s.vx, s.vy, s.vz]
}

fn unpack(v: &Vec6) -> State {
    State::new(v[0], v[1], v[2], v[3], v[4], v[5])
}

/// Second-order right-hand side: the speed-preserving Lorentz assembly or
/// the as-printed reduced systems (see `dynamics`).
type AccelFn = fn(&ModelParams, &SystemKind, &State) -> [f64; 3];

fn rhs6(p: &ModelParams, sys: &SystemKind, accel: AccelFn, y: &Vec6) -> Vec6 {
    let s = unpack(y);
    let a = accel(p, sys, &s);
    [y[3], y[4], y[5], a[0], a[1], a[2]]
}

fn axpy(y: &Vec6, h: f64, k: &Vec6) -> Vec6 {
    std::array::from_fn(|i| y[i] + h * k[i])
}

// Dormand-Prince 5(4) coefficients. The systems are autonomous, so the
// stage abscissae are not needed.
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Stepper<'a> {
    p: &'a ModelParams,
    sys: &'a SystemKind,
    accel: AccelFn,
    steps: u64,
    rejected: u64,
    max_steps: u64,
}

impl<'a> Stepper<'a> {
    fn check_budget(&self, t: f64) -> Result<()> {
        if self.steps >= self.max_steps {
            return Err(H3Error::MaxStepsExceeded { t, max_steps: self.max_steps });
        }
        Ok(())
    }

    fn rk4_step(&mut self, t: f64, y: &Vec6, h: f64) -> Result<Vec6> {
        self.check_budget(t)?;
        let k1 = rhs6(self.p, self.sys, self.accel, y);
        let k2 = rhs6(self.p, self.sys, self.accel, &axpy(y, h / 2.0, &k1));
        let k3 = rhs6(self.p, self.sys, self.accel, &axpy(y, h / 2.0, &k2));
        let k4 = rhs6(self.p, self.sys, self.accel, &axpy(y, h, &k3));
        let out: Vec6 =
            std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        self.steps += 1;
        if out.iter().any(|v| !v.is_finite()) {
            return Err(H3Error::NonFinite { t: t + h });
        }
        Ok(out)
    }

    /// One Dormand-Prince trial step; returns the 5th-order solution and the
    /// weighted RMS error estimate.
    fn dp_step(&self, y: &Vec6, h: f64, rel: f64, abs: f64) -> (Vec6, f64) {
        let mut k = [[0.0; 6]; 7];
        k[0] = rhs6(self.p, self.sys, self.accel, y);
        for s in 1..7 {
            let mut ys = *y;
            for i in 0..6 {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                ys[i] += h * acc;
            }
            k[s] = rhs6(self.p, self.sys, self.accel, &ys);
        }
        let mut y5 = *y;
        let mut err = 0.0;
        for i in 0..6 {
            let mut s5 = 0.0;
            let mut s4 = 0.0;
            for j in 0..7 {
                s5 += B5[j] * k[j][i];
                s4 += B4[j] * k[j][i];
            }
            y5[i] += h * s5;
            let sc = abs + rel * y[i].abs().max(y5[i].abs());
            let e = h * (s5 - s4) / sc;
            err += e * e;
        }
        (y5, (err / 6.0).sqrt())
    }

    fn initial_step(&self, y: &Vec6, span: f64, rel: f64, abs: f64) -> f64 {
        let f = rhs6(self.p, self.sys, self.accel, y);
        let d0 = (y.iter().map(|v| (v / (abs + rel * v.abs())).powi(2)).sum::<f64>() / 6.0).sqrt();
        let d1 = (f.iter().map(|v| (v / (abs + rel * v.abs())).powi(2)).sum::<f64>() / 6.0).sqrt();
        let h = if d0 > 1e-10 && d1 > 1e-10 { 0.01 * d0 / d1 } else { 1e-6 * span };
        h.min(span.abs() / 10.0).max(1e-10 * span.abs())
    }

    /// Integrate from (t, y) to exactly `target`, adapting the step.
    fn dp_advance(
        &mut self,
        t: &mut f64,
        y: &mut Vec6,
        h: &mut f64,
        err_old: &mut f64,
        target: f64,
        rel: f64,
        abs: f64,
        span: f64,
    ) -> Result<()> {
        let dir = (target - *t).signum();
        const SAFETY: f64 = 0.9;
        const ALPHA: f64 = 0.17; // 1/5 - 0.75*beta
        const BETA: f64 = 0.04;
        while (*t - target) * dir < 0.0 {
            self.check_budget(*t)?;
            let mut hs = h.abs().min((target - *t).abs()) * dir;
            if hs.abs() < 1e-13 * span.abs() {
                return Err(H3Error::StepUnderflow { t: *t, h: hs });
            }
            let (ynew, err) = self.dp_step(y, hs, rel, abs);
            self.steps += 1;
            if ynew.iter().any(|v| !v.is_finite()) || !err.is_finite() {
                // shrink hard and retry
                self.rejected += 1;
                *h *= 0.2;
                if h.abs() < 1e-13 * span.abs() {
                    return Err(H3Error::NonFinite { t: *t });
                }
                continue;
            }
            if err <= 1.0 {
                *t += hs;
                *y = ynew;
                let e = err.max(1e-10);
                let fac = (SAFETY * e.powf(-ALPHA) * err_old.powf(BETA)).clamp(0.2, 5.0);
                *err_old = e;
                hs = hs.abs() * fac;
                *h = hs;
            } else {
                self.rejected += 1;
                let fac = (SAFETY * err.powf(-0.2)).clamp(0.2, 1.0);
                *h = hs.abs() * fac;
            }
        }
        Ok(())
    }
}

/// Build the uniform output grid; `t_end` is appended when the spacing does
/// not divide the span.
fn sample_grid(cfg: &IntegratorConfig) -> Vec<f64> {
    let dir = (cfg.t_end - cfg.t_start).signum();
    let span = (cfg.t_end - cfg.t_start).abs();
    let eps = 1e-9 * span.max(1.0);
    let mut ts = Vec::new();
    let mut i = 0u64;
    loop {
        let t = cfg.t_start + dir * cfg.sample_every * i as f64;
        if (t - cfg.t_start).abs() > span + eps {
            break;
        }
        ts.push(t);
        i += 1;
    }
    if (ts.last().copied().unwrap_or(cfg.t_start) - cfg.t_end).abs() > eps {
        ts.push(cfg.t_end);
    } else {
        *ts.last_mut().unwrap() = cfg.t_end;
    }
    ts
}

/// Integrate one initial state of the Lorentz (speed-preserving) assembly,
/// sampling on the configured grid.
pub fn integrate(
    p: &ModelParams,
    sys: &SystemKind,
    s0: &State,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate_accel(p, sys, s0, cfg, lorentz_rhs)
}

/// Integrate the reduced system exactly as printed in the source material
/// (see `dynamics::printed_system_rhs`). This is the governing operator of
/// the closed-form curve catalogue, so the cross-validation of those
/// curves against integration uses this entry point. Note that the
/// speed-squared drift diagnostic is genuinely nonzero for these flows.
pub fn integrate_printed_system(
    p: &ModelParams,
    sys: &SystemKind,
    s0: &State,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate_accel(p, sys, s0, cfg, printed_system_rhs)
}

fn integrate_accel(
    p: &ModelParams,
    sys: &SystemKind,
    s0: &State,
    cfg: &IntegratorConfig,
    accel: AccelFn,
) -> Result<Trajectory> {
    cfg.validate()?;
    if !s0.is_finite() {
        return Err(H3Error::InvalidParam("initial state must be finite".to_string()));
    }

    let grid = sample_grid(cfg);
    let span = cfg.t_end - cfg.t_start;
    let mut stepper = Stepper { p, sys, accel, steps: 0, rejected: 0, max_steps: cfg.max_steps };

    let speed0 = speed_squared(p, s0);
    let fi0 = first_integral(p, sys, s0).ok();
    let mut max_speed_drift: f64 = 0.0;
    let mut max_fi_drift: Option<f64> = fi0.map(|_| 0.0);

    let mut samples = Vec::with_capacity(grid.len());
    samples.push((grid[0], *s0));

    let mut t = cfg.t_start;
    let mut y = pack(s0);

    match cfg.method {
        Method::FixedRk4 { step } => {
            for &target in &grid[1..] {
                let dir = (target - t).signum();
                while (t - target) * dir < 0.0 {
                    let h = step.min((target - t).abs()) * dir;
                    y = stepper.rk4_step(t, &y, h)?;
                    t += h;
                }
                t = target;
                samples.push((t, unpack(&y)));
            }
        }
        Method::Embedded45 { rel_tol, abs_tol } => {
            let mut h = stepper.initial_step(&y, span, rel_tol, abs_tol);
            let mut err_old = 1e-4;
            for &target in &grid[1..] {
                stepper.dp_advance(&mut t, &mut y, &mut h, &mut err_old, target, rel_tol, abs_tol, span)?;
                samples.push((t, unpack(&y)));
            }
        }
    }

    for (_, s) in &samples[1..] {
        max_speed_drift = max_speed_drift.max((speed_squared(p, s) - speed0).abs());
        if let (Some(f0), Some(drift)) = (fi0, max_fi_drift.as_mut()) {
            let f = first_integral(p, sys, s).expect("first integral availability is state-independent");
            *drift = drift.max((f - f0).abs());
        }
    }

    Ok(Trajectory {
        params: *p,
        system: *sys,
        samples,
        diagnostics: Diagnostics {
            max_speed2_drift: max_speed_drift,
            max_first_integral_drift: max_fi_drift,
            steps: stepper.steps,
            rejected_steps: stepper.rejected,
        },
    })
}

/// Elementwise sweep over (params, initial state) pairs. Per-run errors are
/// collected, not propagated, so one divergent run does not abort the rest.
pub fn sweep(
    params: &[ModelParams],
    sys: &SystemKind,
    states: &[State],
    cfg: &IntegratorConfig,
) -> Vec<Result<Trajectory>> {
    assert_eq!(params.len(), states.len(), "sweep lists must have equal length");
    assert!(!params.is_empty(), "sweep lists must be non-empty");
    params
        .iter()
        .zip(states)
        .map(|(p, s0)| integrate(p, sys, s0, cfg))
        .collect()
}
