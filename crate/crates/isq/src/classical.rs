//! Classical motion in V(x) = (m ω²/2) x² + g/x²: closed-form trajectory,
//! energy bookkeeping, and a fixed-step RK4 integrator used as an
//! independent oracle. All bounded orbits share the period π/ω — the
//! classical caustics.

use crate::error::{IsqError, Result};
use crate::model::PhysicalParams;

#[derive(Debug, Clone, Copy)]
pub struct ClassicalState {
    pub x: f64,
    pub v: f64,
    pub t: f64,
}

/// E = m v²/2 + m ω² x²/2 + g/x².
pub fn energy(state: &ClassicalState, params: &PhysicalParams) -> Result<f64> {
    if state.x == 0.0 {
        return Err(IsqError::Classical("energy undefined at x = 0".into()));
    }
    Ok(0.5 * params.m * state.v * state.v
        + 0.5 * params.m * params.omega * params.omega * state.x * state.x
        + params.g / (state.x * state.x))
}

/// Smallest energy of a bounded orbit, ω√(2gm), reached at x⁴ = 2g/(mω²).
pub fn min_energy(params: &PhysicalParams) -> f64 {
    params.omega * (2.0 * params.g * params.m).sqrt()
}

/// x(t) = sign · [ √(E² − 2gmω²)/(mω²) · sin(2ω(t + t0)) + E/(mω²) ]^{1/2}.
/// The branch never crosses x = 0: the bracket stays nonnegative because
/// E ≥ √(E² − 2gmω²).
pub fn closed_form_trajectory(
    e: f64,
    t0: f64,
    sign: i8,
    t: f64,
    params: &PhysicalParams,
) -> Result<f64> {
    let m = params.m;
    let w = params.omega;
    let disc = e * e - 2.0 * params.g * m * w * w;
    if disc < 0.0 {
        return Err(IsqError::Classical(format!(
            "energy {e} below the orbit minimum {}",
            min_energy(params)
        )));
    }
    let amp = disc.sqrt() / (m * w * w);
    let bracket = amp * (2.0 * w * (t + t0)).sin() + e / (m * w * w);
    Ok(f64::from(sign.signum()) * bracket.max(0.0).sqrt())
}

fn accel(x: f64, params: &PhysicalParams) -> f64 {
    let w = params.omega;
    -w * w * x + 2.0 * params.g / (params.m * x * x * x)
}

/// Fixed-step RK4 on ẍ = −ω²x + 2g/(mx³); returns the sampled states
/// including the initial one. A sign change of x between steps means dt is
/// too coarse (analytically impossible for g > 0) and is rejected.
pub fn integrate_trajectory(
    initial: ClassicalState,
    dt: f64,
    steps: usize,
    params: &PhysicalParams,
) -> Result<Vec<ClassicalState>> {
    if initial.x == 0.0 {
        return Err(IsqError::Classical("cannot start at x = 0".into()));
    }
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = initial;
    out.push(s);
    for _ in 0..steps {
        let (x, v) = (s.x, s.v);
        let k1x = v;
        let k1v = accel(x, params);
        let k2x = v + 0.5 * dt * k1v;
        let k2v = accel(x + 0.5 * dt * k1x, params);
        let k3x = v + 0.5 * dt * k2v;
        let k3v = accel(x + 0.5 * dt * k2x, params);
        let k4x = v + dt * k3v;
        let k4v = accel(x + dt * k3x, params);
        let xn = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        let vn = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if xn == 0.0 || xn.signum() != x.signum() {
            return Err(IsqError::Classical(format!(
                "step crossed x = 0 (x: {x} -> {xn}); decrease dt"
            )));
        }
        s = ClassicalState {
            x: xn,
            v: vn,
            t: s.t + dt,
        };
        out.push(s);
    }
    Ok(out)
}
