//! Spectral condition for a general extension: solves
//! F(λ) = Γ((c1−λ)/2)/Γ((c2−λ)/2) · Γ(c2)/Γ(c1) = √(ħ/mω)(c1−c2)/L
//! on each branch L±. L = ∞ and L = 0 short-circuit to the exact ladders
//! λ_n = 2n + c2 and λ_n = 2n + c1.

use serde::Serialize;

use crate::error::{IsqError, Result};
use crate::model::{BoundaryData, ExtLength, Exponents, PhysicalParams};
use crate::specfun::{log_gamma, POLE_TOL};

/// Lower edge of the root search window; finite attractive extensions can
/// push one level below c2, never anywhere near this deep for in-scope
/// parameters.
const LAMBDA_FLOOR: f64 = -40.0;
const SCAN_POINTS: usize = 2000;

#[derive(Debug, Clone, Copy)]
pub struct SpectralFunctionValue {
    pub lambda: f64,
    /// F(λ); ±∞ at poles.
    pub value: f64,
    pub is_pole: bool,
    pub is_zero: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub branch: Branch,
    /// Ascending eigenvalues λ_n (E_n = λ_n ħω).
    pub levels: Vec<f64>,
    /// Right-hand side √(ħ/mω)(c1−c2)/L; ±∞ encodes the L = 0 ladder,
    /// 0 the L = ∞ ladder.
    pub target: f64,
}

impl SpectrumResult {
    pub fn energies(&self, params: &PhysicalParams) -> Vec<f64> {
        self.levels
            .iter()
            .map(|l| l * params.hbar * params.omega)
            .collect()
    }
}

/// F(λ) in log-space with sign tracking. A pole of Γ((c1−λ)/2) (λ on the
/// c1-ladder) is a pole of F; a pole of Γ((c2−λ)/2) (λ on the c2-ladder)
/// is a zero.
pub fn spectral_function(lambda: f64, exps: &Exponents) -> SpectralFunctionValue {
    let alpha1 = 0.5 * (exps.c1 - lambda);
    let alpha2 = 0.5 * (exps.c2 - lambda);
    let g1 = log_gamma(alpha1);
    let g2 = log_gamma(alpha2);
    let gc2 = log_gamma(exps.c2);
    let gc1 = log_gamma(exps.c1);
    if g1.is_pole {
        return SpectralFunctionValue {
            lambda,
            value: f64::INFINITY,
            is_pole: true,
            is_zero: false,
        };
    }
    if g2.is_pole {
        return SpectralFunctionValue {
            lambda,
            value: 0.0,
            is_pole: false,
            is_zero: true,
        };
    }
    let sign = (g1.sign * g2.sign * gc2.sign * gc1.sign) as f64;
    let value = sign * (g1.log_abs - g2.log_abs + gc2.log_abs - gc1.log_abs).exp();
    SpectralFunctionValue {
        lambda,
        value,
        is_pole: false,
        is_zero: false,
    }
}

fn ladder(base: f64, n_max: usize) -> Vec<f64> {
    (0..=n_max).map(|n| base + 2.0 * n as f64).collect()
}

/// Right-hand side of the spectral condition for a finite length.
pub fn spectral_target(exps: &Exponents, l: f64, params: &PhysicalParams) -> f64 {
    (exps.c1 - exps.c2) / (params.beta() * l)
}

fn bisect(exps: &Exponents, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    let f = |x: f64| spectral_function(x, exps).value - target;
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        // run down to machine resolution: the residual tolerance on F is
        // |F'| times the λ error, and |F'| grows with λ between poles
        if mid == lo || mid == hi {
            return mid;
        }
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign-change scan of F(λ) − target on (lo, hi), endpoints excluded
/// (poles of F sit at interval ends). Returns all bracketed roots.
fn roots_in_interval(exps: &Exponents, target: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let pad = 1e-9 * (hi - lo).max(1.0);
    let (a, b) = (lo + pad, hi - pad);
    let step = (b - a) / SCAN_POINTS as f64;
    let f = |x: f64| spectral_function(x, exps).value - target;
    let mut xp = a;
    let mut fp = f(a);
    for i in 1..=SCAN_POINTS {
        let x = a + step * i as f64;
        let fx = f(x);
        if fp == 0.0 {
            out.push(xp);
        } else if (fx < 0.0) != (fp < 0.0) {
            out.push(bisect(exps, target, xp, x));
        }
        xp = x;
        fp = fx;
    }
    out
}

/// Eigenvalues λ_n on one branch. Exact ladders at L ∈ {0, ∞}; otherwise a
/// bracketed scan between consecutive poles of F.
pub fn solve_spectrum(
    exps: &Exponents,
    l: ExtLength,
    n_max: usize,
    params: &PhysicalParams,
    branch: Branch,
) -> Result<SpectrumResult> {
    match l {
        ExtLength::Infinite => Ok(SpectrumResult {
            branch,
            levels: ladder(exps.c2, n_max),
            target: 0.0,
        }),
        ExtLength::Zero => Ok(SpectrumResult {
            branch,
            levels: ladder(exps.c1, n_max),
            target: f64::INFINITY,
        }),
        ExtLength::Finite(lval) => {
            let target = spectral_target(exps, lval, params);
            // poles of F partition the window; every interval between two
            // consecutive poles carries exactly one root for a finite
            // nonzero target. The leading interval (floor, c1) holds the
            // possible deep attractive level, which dives below the floor
            // as L -> 0+, so zero roots there is not an error.
            let mut levels = roots_in_interval(exps, target, LAMBDA_FLOOR, exps.c1);
            if levels.len() > 1 {
                return Err(IsqError::RootCount {
                    lo: LAMBDA_FLOOR,
                    hi: exps.c1,
                    found: levels.len(),
                    expected: 1,
                });
            }
            for k in 0..=n_max {
                let (lo, hi) = (exps.c1 + 2.0 * k as f64, exps.c1 + 2.0 * (k + 1) as f64);
                let found = roots_in_interval(exps, target, lo, hi);
                if found.len() != 1 {
                    return Err(IsqError::RootCount {
                        lo,
                        hi,
                        found: found.len(),
                        expected: 1,
                    });
                }
                levels.extend(found);
            }
            levels.truncate(n_max + 1);
            Ok(SpectrumResult {
                branch,
                levels,
                target,
            })
        }
    }
}

/// Both branches of one extension.
pub fn spectral_family(
    bd: &BoundaryData,
    exps: &Exponents,
    n_max: usize,
    params: &PhysicalParams,
) -> Result<(SpectrumResult, SpectrumResult)> {
    let plus = solve_spectrum(exps, bd.l_plus, n_max, params, Branch::Plus)?;
    let minus = solve_spectrum(exps, bd.l_minus, n_max, params, Branch::Minus)?;
    Ok((plus, minus))
}

/// Index pairs of levels shared by the two branches within 1e-9.
pub fn degenerate_levels(a: &SpectrumResult, b: &SpectrumResult) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, la) in a.levels.iter().enumerate() {
        for (j, lb) in b.levels.iter().enumerate() {
            if (la - lb).abs() < 1e-9 {
                out.push((i, j));
            }
        }
    }
    out
}

/// Is λ on the c1-ladder (pole of F) or the c2-ladder (zero of F)?
pub fn on_ladder(lambda: f64, base: f64) -> bool {
    let n = 0.5 * (lambda - base);
    n >= -POLE_TOL && (n - n.round()).abs() < 1e-9
}
