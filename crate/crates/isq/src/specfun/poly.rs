//! Laguerre and Hermite polynomials by three-term recurrence.

use super::gamma::gamma;

/// Associated Laguerre polynomial L_n^{(nu)}(z).
pub fn laguerre(n: usize, nu: f64, z: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut lm1 = 1.0;
    let mut l = 1.0 + nu - z;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + nu - z) * l - (kf + nu) * lm1) / (kf + 1.0);
        lm1 = l;
        l = next;
    }
    l
}

/// All of L_0^{(nu)}(z) .. L_n^{(nu)}(z).
pub fn laguerre_all(n: usize, nu: f64, z: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(1.0 + nu - z);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + nu - z) * out[k] - (kf + nu) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// sqrt(n!/Gamma(n+nu+1)) * L_n^{(nu)}(z) for n = 0..=n_max.
///
/// The scaled recurrence keeps every intermediate O(1) even for large n,
/// which matters for spectral sums truncated at thousands of modes.
pub fn laguerre_normalized_all(n_max: usize, nu: f64, z: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    // S_0 = 1/sqrt(Gamma(nu+1))
    let s0 = 1.0 / gamma(nu + 1.0).sqrt();
    out.push(s0);
    if n_max == 0 {
        return out;
    }
    out.push((1.0 + nu - z) * s0 / (1.0 + nu).sqrt());
    for k in 1..n_max {
        let kf = k as f64;
        let r1 = ((kf + 1.0) / (kf + 1.0 + nu)).sqrt();
        let r2 = (kf * (kf + 1.0) * (kf + nu) / (kf + 1.0 + nu)).sqrt();
        let next = ((2.0 * kf + 1.0 + nu - z) * r1 * out[k] - r2 * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Physicists' Hermite polynomial H_n(y).
pub fn hermite(n: usize, y: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut hm1 = 1.0;
    let mut h = 2.0 * y;
    for k in 1..n {
        let next = 2.0 * y * h - 2.0 * k as f64 * hm1;
        hm1 = h;
        h = next;
    }
    h
}
