//! Modified Bessel function I_nu for the argument classes the propagator
//! needs: small complex arguments by Maclaurin series, purely imaginary
//! arguments of any size through J_nu of real argument, and large real
//! arguments by the exponential asymptotic expansion.
//!
//! Orders are restricted to nu in [-1, 2].

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{IsqError, Result};
use crate::specfun::gamma::recip_gamma;

const SERIES_LIMIT: f64 = 12.0;
const MAX_TERMS: usize = 400;

fn check_order(nu: f64) -> Result<()> {
    if !(-1.0..2.0).contains(&nu) {
        return Err(IsqError::BesselArgument { nu, z_abs: 0.0 });
    }
    Ok(())
}

/// J_nu(x) for x > 0, nu in [-1, 2).
pub fn bessel_j_real(nu: f64, x: f64) -> Result<f64> {
    check_order(nu)?;
    assert!(x > 0.0);
    if x <= 15.0 {
        bessel_j_series(nu, x)
    } else {
        Ok(bessel_j_asymptotic(nu, x))
    }
}

fn bessel_j_series(nu: f64, x: f64) -> Result<f64> {
    let half = 0.5 * x;
    let mut sum = 0.0f64;
    let mut pow = half.powf(nu); // (x/2)^{nu + 2k} / k!, built incrementally
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let term = pow * recip_gamma(nu + kf + 1.0);
        sum += if k % 2 == 0 { term } else { -term };
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k > 4 {
            return Ok(sum);
        }
        pow *= half * half / (kf + 1.0);
    }
    Err(IsqError::SeriesDivergence {
        what: "bessel_j",
        terms: MAX_TERMS,
        z_abs: x,
    })
}

/// Hankel expansion, accurate to ~1e-13 absolute for x >= 15, nu <= 2.
fn bessel_j_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let chi = x - nu * FRAC_PI_2 - FRAC_PI_4;
    let mut p = 0.0f64;
    let mut q = 0.0f64;
    let mut ak = 1.0f64; // a_k(nu) / x^k
    let mut prev = f64::INFINITY;
    for k in 0..24usize {
        let contrib = ak;
        if contrib.abs() > prev {
            break;
        }
        prev = contrib.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * contrib;
        } else {
            q += sign * contrib;
        }
        let kf = k as f64;
        ak *= (mu - (2.0 * kf + 1.0).powi(2)) / ((kf + 1.0) * 8.0 * x);
    }
    (2.0 / (PI * x)).sqrt() * (chi.cos() * p - chi.sin() * q)
}

fn bessel_i_series(nu: f64, z: Complex64) -> Result<Complex64> {
    let half = 0.5 * z;
    // principal branch of (z/2)^nu
    let mut pow = (nu * half.ln()).exp();
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let term = pow * recip_gamma(nu + kf + 1.0);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm().max(1e-300) && k > 4 {
            return Ok(sum);
        }
        pow *= half * half / (kf + 1.0);
    }
    Err(IsqError::SeriesDivergence {
        what: "bessel_i",
        terms: MAX_TERMS,
        z_abs: z.norm(),
    })
}

/// I_nu(x) ~ e^x/sqrt(2 pi x) sum_k (-1)^k a_k(nu)/x^k for large real x.
fn bessel_i_asymptotic_real(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut sum = 0.0f64;
    let mut ak = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 0..24usize {
        if ak.abs() > prev {
            break;
        }
        prev = ak.abs();
        sum += if k % 2 == 0 { ak } else { -ak };
        let kf = k as f64;
        ak *= (mu - (2.0 * kf + 1.0).powi(2)) / ((kf + 1.0) * 8.0 * x);
    }
    x.exp() / (2.0 * PI * x).sqrt() * sum
}

/// I_nu(z) for nu in [-1, 2), with the argument either small, purely
/// imaginary, or real.
pub fn bessel_i(nu: f64, z: Complex64) -> Result<Complex64> {
    check_order(nu)?;
    let r = z.norm();
    if r == 0.0 {
        return Ok(if nu == 0.0 {
            Complex64::new(1.0, 0.0)
        } else if nu > 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        });
    }
    if r <= SERIES_LIMIT {
        return bessel_i_series(nu, z);
    }
    let imag_dominant = z.re.abs() <= 1e-12 * r;
    if imag_dominant {
        // I_nu(-i w) = e^{-i nu pi/2} J_nu(w), w > 0, and the conjugate
        // relation on the upper half axis.
        let w = -z.im;
        if w > 0.0 {
            let j = bessel_j_real(nu, w)?;
            return Ok(Complex64::from_polar(1.0, -nu * FRAC_PI_2) * j);
        } else {
            let j = bessel_j_real(nu, -w)?;
            return Ok(Complex64::from_polar(1.0, nu * FRAC_PI_2) * j);
        }
    }
    if z.im.abs() <= 1e-12 * r && z.re > 0.0 {
        return Ok(Complex64::new(bessel_i_asymptotic_real(nu, z.re), 0.0));
    }
    Err(IsqError::BesselArgument { nu, z_abs: r })
}
