//! Self-contained special-function kernel: log-Gamma with sign tracking,
//! Kummer and Tricomi confluent hypergeometric functions, associated
//! Laguerre and Hermite polynomials, and modified Bessel functions at
//! complex argument.

mod bessel;
mod gamma;
mod kummer;
mod poly;

pub use bessel::{bessel_i, bessel_j_real};
pub use gamma::{gamma, gamma_ratio, log_gamma, recip_gamma, sin_pi, GammaValue, POLE_TOL};
pub use kummer::{kummer_m, kummer_m_scaled, tricomi_u, ScaledReal};
pub use poly::{hermite, laguerre, laguerre_all, laguerre_normalized_all};
