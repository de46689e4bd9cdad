//! Kummer confluent hypergeometric function M(alpha, gamma; z) and the
//! decaying Tricomi companion U(alpha, gamma; z), both for real arguments
//! with z >= 0.
//!
//! Route selection for M:
//! - alpha at a non-positive integer: terminating series via the Laguerre
//!   recurrence (stable for all z).
//! - alpha > 0: plain Maclaurin series (all terms positive), dominant-branch
//!   asymptotic expansion once e^z would overflow.
//! - alpha < 0 non-integer: Maclaurin series in double-double arithmetic.
//!   The leading terms alternate and cancel down by a factor of order
//!   exp(2 sqrt(|alpha| z)); the extended significand absorbs that loss
//!   up to a guard threshold, beyond which only the asymptotic expansion
//!   (when it converges) is attempted.
//!
//! U is seeded from its integral representation (a > 0) and carried to
//! negative a with the contiguous recurrence, which is stable in that
//! direction because U is the dominant solution as a decreases.

use crate::error::{IsqError, Result};
use crate::quad::{self, QuadOptions};
use crate::specfun::gamma::{log_gamma, recip_gamma, POLE_TOL};
use crate::specfun::poly::laguerre;

const MAX_TERMS: usize = 1600;
/// Above this value of 2 sqrt(|alpha| z) the double-double series has lost
/// too many digits to certify 1e-10.
const DD_LOSS_GUARD: f64 = 55.0;

/// A real number carried as `mantissa * exp(exponent)`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledReal {
    pub mantissa: f64,
    pub exponent: f64,
}

impl ScaledReal {
    pub fn new(mantissa: f64, exponent: f64) -> Self {
        ScaledReal { mantissa, exponent }
    }

    pub fn value(&self) -> f64 {
        self.mantissa * self.exponent.exp()
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= POLE_TOL && (x - x.round()).abs() < POLE_TOL
}

// ---------------------------------------------------------------------
// double-double helpers (Dekker/Knuth error-free transformations)

#[derive(Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: f64::mul_add(a, b, -p),
    }
}

impl Dd {
    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        quick_two_sum(s.hi, s.lo + self.lo + o.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        quick_two_sum(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(Dd::from(-q1).mul(o));
        let q2 = r.hi / o.hi;
        let r2 = r.add(Dd::from(-q2).mul(o));
        let q3 = r2.hi / o.hi;
        quick_two_sum(q1, q2).add(Dd::from(q3))
    }
}

// ---------------------------------------------------------------------

/// Terminating case M(-n, gamma; z) = Gamma(gamma) n! / Gamma(gamma + n) L_n^{(gamma-1)}(z).
fn kummer_polynomial(n: usize, gamma_p: f64, z: f64) -> f64 {
    let lg = log_gamma(gamma_p);
    let lgn = log_gamma(gamma_p + n as f64);
    let mut log_fact = 0.0;
    for k in 2..=n {
        log_fact += (k as f64).ln();
    }
    let scale = (lg.sign * lgn.sign) as f64 * (lg.log_abs + log_fact - lgn.log_abs).exp();
    scale * laguerre(n, gamma_p - 1.0, z)
}

/// Plain series; adequate when all terms share a sign (alpha >= 0).
fn kummer_series(alpha: f64, gamma_p: f64, z: f64) -> Result<f64> {
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (alpha + kf) * z / ((gamma_p + kf) * (kf + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k > 4 {
            return Ok(sum);
        }
    }
    Err(IsqError::SeriesDivergence {
        what: "kummer_m",
        terms: MAX_TERMS,
        z_abs: z,
    })
}

/// Series in double-double arithmetic for alternating (alpha < 0) cases.
fn kummer_series_dd(alpha: f64, gamma_p: f64, z: f64) -> Result<f64> {
    let zd = Dd::from(z);
    let mut sum = Dd::from(1.0);
    let mut term = Dd::from(1.0);
    let mut max_abs = 1.0f64;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term = term
            .mul(two_sum(alpha, kf))
            .mul(zd)
            .div(two_sum(gamma_p, kf).mul(Dd::from(kf + 1.0)));
        sum = sum.add(term);
        max_abs = max_abs.max(term.hi.abs());
        if term.hi.abs() <= 1e-34 * sum.hi.abs().max(1e-300) && kf > -alpha && k > 4 {
            return Ok(sum.hi + sum.lo);
        }
    }
    Err(IsqError::SeriesDivergence {
        what: "kummer_m",
        terms: MAX_TERMS,
        z_abs: z,
    })
}

/// Dominant branch of the large-z expansion:
/// M ~ Gamma(gamma)/Gamma(alpha) e^z z^{alpha-gamma} sum_k (gamma-alpha)_k (1-alpha)_k / (k! z^k).
/// The algebraic subdominant branch is smaller by e^{-z} and is dropped.
fn kummer_asymptotic(alpha: f64, gamma_p: f64, z: f64) -> Result<ScaledReal> {
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    let mut prev_abs = f64::INFINITY;
    for k in 0..60 {
        let kf = k as f64;
        term *= (gamma_p - alpha + kf) * (1.0 - alpha + kf) / ((kf + 1.0) * z);
        if term.abs() > prev_abs {
            // tail started growing; truncate at the optimal point
            break;
        }
        prev_abs = term.abs();
        sum += term;
        if term.abs() <= 1e-16 * sum.abs() {
            break;
        }
    }
    let lg = log_gamma(gamma_p);
    let la = log_gamma(alpha);
    let sign = (lg.sign * la.sign) as f64;
    let mantissa = sign * (lg.log_abs - la.log_abs + (alpha - gamma_p) * z.ln()).exp() * sum;
    Ok(ScaledReal::new(mantissa, z))
}

fn asymptotic_converges(alpha: f64, gamma_p: f64, z: f64) -> bool {
    (gamma_p - alpha).abs() * (1.0 - alpha).abs() < 0.7 * z
}

/// M(alpha, gamma; z) as a scaled value; guards overflow for large z.
pub fn kummer_m_scaled(alpha: f64, gamma_p: f64, z: f64) -> Result<ScaledReal> {
    assert!(z >= 0.0, "kummer_m is defined here for z >= 0");
    if is_nonpositive_integer(gamma_p) {
        return Err(IsqError::InvalidParams(format!(
            "kummer_m: gamma = {gamma_p} is a non-positive integer"
        )));
    }
    if z == 0.0 {
        return Ok(ScaledReal::new(1.0, 0.0));
    }
    if is_nonpositive_integer(alpha) {
        let n = (-alpha.round()) as usize;
        return Ok(ScaledReal::new(kummer_polynomial(n, gamma_p, z), 0.0));
    }
    if alpha > 0.0 {
        return if z <= 700.0 {
            Ok(ScaledReal::new(kummer_series(alpha, gamma_p, z)?, 0.0))
        } else {
            kummer_asymptotic(alpha, gamma_p, z)
        };
    }
    // negative non-integer alpha
    let loss = 2.0 * (-alpha * z).sqrt();
    if z <= 700.0 && loss <= DD_LOSS_GUARD {
        return Ok(ScaledReal::new(kummer_series_dd(alpha, gamma_p, z)?, 0.0));
    }
    if asymptotic_converges(alpha, gamma_p, z) {
        return kummer_asymptotic(alpha, gamma_p, z);
    }
    Err(IsqError::SeriesDivergence {
        what: "kummer_m (cancellation beyond double-double range)",
        terms: MAX_TERMS,
        z_abs: z,
    })
}

/// M(alpha, gamma; z); may overflow to +-inf for very large z (use the
/// scaled variant above z ~ 700).
pub fn kummer_m(alpha: f64, gamma_p: f64, z: f64) -> Result<f64> {
    Ok(kummer_m_scaled(alpha, gamma_p, z)?.value())
}

/// Integral seed for U(a, b; z), a > 0, z > 0:
/// U = 1/Gamma(a) int_0^1 exp(-z s/(1-s) + (a-1) ln s - b ln(1-s)) ds.
fn tricomi_integral(a: f64, b: f64, z: f64) -> Result<f64> {
    let opts = QuadOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-13,
        max_level: 13,
    };
    let r = quad::integrate(
        |s| {
            if s <= 0.0 || s >= 1.0 {
                return 0.0;
            }
            let e = -z * s / (1.0 - s) + (a - 1.0) * s.ln() - b * (1.0 - s).ln();
            e.exp()
        },
        0.0,
        1.0,
        opts,
    )?;
    Ok(r.value * recip_gamma(a))
}

/// Tricomi U(a, b; z) for z > 0 and b in (0, 2); any real a.
pub fn tricomi_u(a: f64, b: f64, z: f64) -> Result<f64> {
    assert!(z > 0.0);
    if is_nonpositive_integer(a) {
        let n = (-a.round()) as usize;
        if n > 150 {
            return Err(IsqError::SeriesDivergence {
                what: "tricomi_u polynomial order",
                terms: n,
                z_abs: z,
            });
        }
        let mut fact = 1.0;
        for k in 2..=n {
            fact *= k as f64;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(sign * fact * laguerre(n, b - 1.0, z));
    }
    if a > 0.0 {
        return tricomi_integral(a, b, z);
    }
    // descend: U(a-1) = (2a - b + z) U(a) - a (a - b + 1) U(a+1)
    let a0 = a - a.floor(); // in (0, 1)
    let steps = (a0 - a).round() as usize;
    let mut upper = tricomi_integral(a0 + 1.0, b, z)?;
    let mut mid = tricomi_integral(a0, b, z)?;
    let mut ac = a0;
    for _ in 0..steps {
        let lower = (2.0 * ac - b + z) * mid - ac * (ac - b + 1.0) * upper;
        upper = mid;
        mid = lower;
        ac -= 1.0;
    }
    Ok(mid)
}
