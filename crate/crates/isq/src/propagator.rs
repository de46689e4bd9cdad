//! The Feynman kernel for the σ₁ extension, three ways: the closed Bessel
//! form off caustic times, the regularized spectral sum with ε → 0
//! extrapolation, and the delta-kernel weights at the caustic times
//! T = kπ/ω, where
//!     K = (−1)^k [cos(akπ) δ(x_f − x_i) + i sin(akπ) δ(x_f + x_i)].

use num_complex::Complex64;

use crate::eigenbasis::Sigma1Basis;
use crate::error::{IsqError, Result};
use crate::model::{Exponents, PhysicalParams};
use crate::specfun::bessel_i;

const CAUSTIC_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct KernelRequest {
    pub x_f: f64,
    pub x_i: f64,
    pub t: f64,
    /// Spectral-path regularizer (the appendix convention: the damping per
    /// mode is e^{−λ ε/2}).
    pub epsilon: f64,
    pub n_max: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct CausticWeights {
    pub k: usize,
    pub same_side: Complex64,
    pub mirror: Complex64,
}

/// Delta-kernel weights at T = kπ/ω.
pub fn caustic_weights(k: usize, a: f64) -> CausticWeights {
    assert!(k >= 1);
    assert!((0.5..=1.0).contains(&a));
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let (s, c) = (a * k as f64 * std::f64::consts::PI).sin_cos();
    CausticWeights {
        k,
        same_side: Complex64::new(sign * c, 0.0),
        mirror: Complex64::new(0.0, sign * s),
    }
}

/// Closed kernel: (mω/2iħ sin ωT)|x_f x_i|^{1/2}
/// exp[imω cos ωT (x_f²+x_i²)/(2ħ sin ωT)] × {I_a + I_{−a}} (same side)
/// or {−I_a + I_{−a}} (across), Bessel argument (mω/iħ)|x_f x_i|/sin ωT.
pub fn kernel_closed(
    req: &KernelRequest,
    exps: &Exponents,
    params: &PhysicalParams,
) -> Result<Complex64> {
    assert!(req.x_f != 0.0 && req.x_i != 0.0);
    let (m, w, hb) = (params.m, params.omega, params.hbar);
    let s = (w * req.t).sin();
    if s.abs() < CAUSTIC_GUARD {
        return Err(IsqError::CausticTime { sin_abs: s.abs() });
    }
    let c = (w * req.t).cos();
    let prod = (req.x_f * req.x_i).abs();
    let pref = Complex64::new(0.0, -1.0) * (m * w / (2.0 * hb * s))
        * prod.sqrt()
        * Complex64::from_polar(1.0, m * w * c * (req.x_f * req.x_f + req.x_i * req.x_i) / (2.0 * hb * s));
    let zeta = Complex64::new(0.0, -m * w * prod / (hb * s));
    let i_minus = bessel_i(-exps.a, zeta)?;
    if req.x_f * req.x_i > 0.0 {
        let i_plus = bessel_i(exps.a, zeta)?;
        Ok(pref * (i_plus + i_minus))
    } else if (exps.a - 1.0).abs() < 1e-12 {
        // I_{−1} = I_1: the cross-side terms cancel identically
        Ok(Complex64::new(0.0, 0.0))
    } else {
        let i_plus = bessel_i(exps.a, zeta)?;
        Ok(pref * (i_minus - i_plus))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralKernel {
    pub value: Complex64,
    /// Geometric bound on the dropped tail.
    pub tail: f64,
}

/// Regularized eigenfunction sum
/// S = Σ_s Σ_n ψ_n^(s)(x_f) e^{−iλ_n ωT − λ_n ε/2} ψ_n^(s)(x_i).
pub fn kernel_spectral(
    req: &KernelRequest,
    basis: &Sigma1Basis,
    params: &PhysicalParams,
) -> Result<SpectralKernel> {
    assert!(req.epsilon > 0.0);
    assert!(req.n_max <= basis.n_max);
    let (f1, f2) = basis.values(req.x_f);
    let (g1, g2) = basis.values(req.x_i);
    let wt = params.omega * req.t;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last = 0.0f64;
    for n in 0..=req.n_max {
        let mut add = |lam: f64, a: f64, b: f64| {
            let phase = Complex64::from_polar((-0.5 * lam * req.epsilon).exp(), -lam * wt);
            let term = a * b * phase;
            sum += term;
            term.norm()
        };
        let t1 = add(basis.lambda(n, 1), f1[n], g1[n]);
        let t2 = add(basis.lambda(n, 2), f2[n], g2[n]);
        if n == req.n_max {
            last = t1 + t2;
        }
    }
    // per-mode damping ratio e^{−ε} (λ increases by 2 per n)
    let r = (-req.epsilon).exp();
    let tail = last * r / (1.0 - r);
    Ok(SpectralKernel { value: sum, tail })
}

/// Neville extrapolation of the spectral kernel to ε = 0 over the given
/// regularizer ladder (default {0.02, 0.01, 0.005}).
pub fn kernel_spectral_extrapolated(
    x_f: f64,
    x_i: f64,
    t: f64,
    basis: &Sigma1Basis,
    params: &PhysicalParams,
    epsilons: &[f64],
) -> Result<Complex64> {
    assert!(epsilons.len() >= 2);
    let mut vals = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let n_needed = (32.0 / eps).ceil() as usize;
        if n_needed > basis.n_max {
            return Err(IsqError::SpectralTail {
                tail: f64::INFINITY,
                tol: 0.0,
            });
        }
        let req = KernelRequest {
            x_f,
            x_i,
            t,
            epsilon: eps,
            n_max: n_needed,
        };
        let k = kernel_spectral(&req, basis, params)?;
        let tol = 1e-6 * k.value.norm().max(1e-6);
        if k.tail > tol {
            return Err(IsqError::SpectralTail { tail: k.tail, tol });
        }
        vals.push(k.value);
    }
    // Neville tableau evaluated at ε = 0
    let mut p = vals;
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (e0, e1) = (epsilons[i], epsilons[i + level]);
            p[i] = (p[i + 1] * e0 - p[i] * e1) / (e0 - e1);
        }
    }
    Ok(p[0])
}

pub const DEFAULT_EPSILONS: [f64; 3] = [0.02, 0.01, 0.005];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::{inner_product, sigma1_eigenstate};
    use crate::quad::{self, QuadOptions};
    use rand::Rng;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn params_for(a: f64) -> (PhysicalParams, Exponents) {
        let g = Exponents::coupling_for(a, 1.0, 1.0);
        let p = PhysicalParams::natural_limit(g).unwrap();
        (p, Exponents::from_params(&p))
    }

    fn req(x_f: f64, x_i: f64, t: f64) -> KernelRequest {
        KernelRequest {
            x_f,
            x_i,
            t,
            epsilon: 0.0,
            n_max: 0,
        }
    }

    #[test]
    fn symmetric_in_endpoints() {
        let (p, e) = params_for(0.75);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x_f: f64 = rng.gen_range(0.2..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let x_i: f64 = rng.gen_range(0.2..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let t: f64 = rng.gen_range(0.3..2.8);
            let a = kernel_closed(&req(x_f, x_i, t), &e, &p).unwrap();
            let b = kernel_closed(&req(x_i, x_f, t), &e, &p).unwrap();
            assert!((a - b).norm() < 1e-12 * a.norm().max(1e-12));
        }
    }

    #[test]
    fn mehler_limit() {
        // a = 1/2 must reproduce the harmonic oscillator kernel
        let (p, e) = params_for(0.5);
        let mehler = |x_f: f64, x_i: f64, t: f64| -> Complex64 {
            let s = t.sin();
            let c = t.cos();
            let pref = (Complex64::new(0.0, 2.0 * PI * s)).powf(-0.5);
            pref * Complex64::from_polar(
                1.0,
                ((x_f * x_f + x_i * x_i) * c - 2.0 * x_f * x_i) / (2.0 * s),
            )
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x_f: f64 = rng.gen_range(0.2..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let x_i: f64 = rng.gen_range(0.2..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let t: f64 = rng.gen_range(0.3..2.8);
            let k = kernel_closed(&req(x_f, x_i, t), &e, &p).unwrap();
            let m = mehler(x_f, x_i, t);
            assert!(
                (k - m).norm() < 1e-9 * m.norm(),
                "({x_f}, {x_i}, {t}): {k} vs {m}"
            );
        }
    }

    #[test]
    fn conventional_limit_blocks_tunneling() {
        let (p, e) = params_for(1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x_f: f64 = rng.gen_range(0.2..3.0);
            let x_i: f64 = -rng.gen_range(0.2..3.0);
            let t: f64 = rng.gen_range(0.3..2.8);
            let k = kernel_closed(&req(x_f, x_i, t), &e, &p).unwrap();
            assert!(k.norm() <= 1e-12, "({x_f}, {x_i}, {t}): {k}");
        }
    }

    #[test]
    fn caustic_time_rejected() {
        let (p, e) = params_for(0.75);
        match kernel_closed(&req(1.0, 0.7, PI), &e, &p) {
            Err(IsqError::CausticTime { sin_abs }) => assert!(sin_abs < 1e-9),
            other => panic!("expected CausticTime, got {other:?}"),
        }
    }

    #[test]
    fn caustic_weight_cases() {
        // harmonic oscillator half period: pure mirror delta
        let w = caustic_weights(1, 0.5);
        assert!(w.same_side.norm() < 1e-15);
        assert!((w.mirror - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        // conventional quantization: never a mirror term
        for k in 1..=4 {
            let w = caustic_weights(k, 1.0);
            assert!((w.same_side.norm() - 1.0).abs() < 1e-14);
            assert!(w.mirror.norm() < 1e-14);
        }
        // a = 3/4, k = 2: complete transfer to the other side
        let w = caustic_weights(2, 0.75);
        assert!(w.same_side.norm() < 1e-15);
        assert!((w.mirror.norm() - 1.0).abs() < 1e-15);
        // unitarity of the split
        for k in 1..=5 {
            for &a in &[0.6, 0.75, 0.9] {
                let w = caustic_weights(k, a);
                let total = w.same_side.norm_sqr() + w.mirror.norm_sqr();
                assert!((total - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn spectral_matches_closed() {
        let (p, e) = params_for(0.75);
        let basis = Sigma1Basis::new(e, p, 6400).unwrap();
        for (x_f, x_i) in [(1.0, 0.7), (-1.0, 0.7)] {
            let k_closed = kernel_closed(&req(x_f, x_i, 1.1), &e, &p).unwrap();
            let k_spec =
                kernel_spectral_extrapolated(x_f, x_i, 1.1, &basis, &p, &DEFAULT_EPSILONS)
                    .unwrap();
            assert!(
                (k_closed - k_spec).norm() < 1e-4 * k_closed.norm(),
                "({x_f}, {x_i}): {k_closed} vs {k_spec}"
            );
        }
    }

    #[test]
    fn large_epsilon_single_mode() {
        // at ε = 5 and n_max = 0 the sum is the two ground-state terms
        let (p, e) = params_for(0.75);
        let basis = Sigma1Basis::new(e, p, 8).unwrap();
        let (x_f, x_i, t) = (0.9, 0.6, 0.7);
        let r = KernelRequest {
            x_f,
            x_i,
            t,
            epsilon: 5.0,
            n_max: 0,
        };
        let got = kernel_spectral(&r, &basis, &p).unwrap().value;
        let mut expect = Complex64::new(0.0, 0.0);
        for s in [1u8, 2] {
            let st = sigma1_eigenstate(0, s, &e, &p).unwrap();
            let lam = st.lambda;
            expect += st.value(x_f).unwrap()
                * Complex64::from_polar((-0.5 * lam * 5.0).exp(), -lam * t)
                * st.value(x_i).unwrap().conj();
        }
        assert!((got - expect).norm() < 1e-8 * expect.norm());
    }

    #[test]
    fn caustic_time_weak_delta() {
        // smear the spectral kernel at T = π against a narrow Gaussian and
        // compare with the delta-kernel weights
        let (p, e) = params_for(0.75);
        let basis = Sigma1Basis::new(e, p, 6400).unwrap();
        // width 0.4: narrower packets need far more modes (coefficient
        // decay goes like [(1 - w^2)/(1 + w^2)]^n)
        let g = |x: f64| Complex64::new((-(x - 1.5_f64).powi(2) / (2.0 * 0.4f64.powi(2))).exp(), 0.0);
        // coefficients of g in the basis
        let n_exp = 120usize;
        let mut c1 = vec![Complex64::new(0.0, 0.0); n_exp + 1];
        let mut c2 = vec![Complex64::new(0.0, 0.0); n_exp + 1];
        for n in 0..=n_exp {
            for (s, store) in [(1u8, &mut c1), (2u8, &mut c2)] {
                let st = sigma1_eigenstate(n, s, &e, &p).unwrap();
                let f = |x: f64| st.value(x).unwrap();
                store[n] = inner_product(&f, &g, &p).unwrap();
            }
        }
        let w = caustic_weights(1, 0.75);
        for &x in &[1.3, 1.5, -1.5, -1.7] {
            let (v1, v2) = basis.values(x);
            let mut evolved = Complex64::new(0.0, 0.0);
            for n in 0..=n_exp {
                evolved += c1[n] * v1[n] * Complex64::from_polar(1.0, -basis.lambda(n, 1) * PI);
                evolved += c2[n] * v2[n] * Complex64::from_polar(1.0, -basis.lambda(n, 2) * PI);
            }
            let predict = w.same_side * g(x) + w.mirror * g(-x);
            assert!(
                (evolved - predict).norm() <= 1e-3,
                "x = {x}: {evolved} vs {predict}"
            );
        }
    }

    #[test]
    fn semigroup_on_half_lines() {
        // ∫ K(x_f, y; T) K(y, x_i; T) dy = K(x_f, x_i; 2T). The integrand
        // decays only by oscillation (a Fresnel tail), so it is tamed with
        // a Gaussian damper e^{−η y²} whose η → 0 limit is recovered by
        // Neville extrapolation; the model ∫ e^{(iα−η)y²} dy is analytic
        // in η there.
        let (p, e) = params_for(0.75);
        let (x_f, x_i, t) = (1.1, 0.8, 0.4);
        let target = kernel_closed(&req(x_f, x_i, 2.0 * t), &e, &p).unwrap();
        let opts = QuadOptions {
            abs_tol: 1e-7,
            rel_tol: 1e-7,
            max_level: 13,
        };
        let etas = [0.16, 0.08, 0.04, 0.02];
        let mut vals = Vec::new();
        for &eta in &etas {
            let integrand = |y: f64| {
                if y == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                kernel_closed(&req(x_f, y, t), &e, &p).unwrap()
                    * kernel_closed(&req(y, x_i, t), &e, &p).unwrap()
                    * (-eta * y * y).exp()
            };
            let cutoff = (45.0 / eta).sqrt();
            let right = quad::integrate_complex(integrand, 0.0, cutoff, opts).unwrap();
            let left = quad::integrate_complex(integrand, -cutoff, 0.0, opts).unwrap();
            vals.push(right.value + left.value);
        }
        let n = vals.len();
        for level in 1..n {
            for i in 0..n - level {
                let (e0, e1) = (etas[i], etas[i + level]);
                vals[i] = (vals[i + 1] * e0 - vals[i] * e1) / (e0 - e1);
            }
        }
        let total = vals[0];
        assert!(
            (total - target).norm() <= 2e-3 * target.norm(),
            "{total} vs {target}"
        );
    }
}
