//! Physical parameters, the derived exponents (a, c1, c2), and the U(2)
//! boundary-condition data: eigenphase decomposition of the characteristic
//! matrix and the extension lengths L± = L0 cot(θ±/2).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{IsqError, Result};

const UNITARY_TOL: f64 = 1e-12;
const ANGLE_SNAP: f64 = 1e-12;

/// Mass, frequency, action and coupling of the oscillator with an
/// inverse-square core, V(x) = (m ω²/2) x² + g/x².
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub m: f64,
    pub omega: f64,
    pub hbar: f64,
    pub g: f64,
}

impl PhysicalParams {
    /// Strict constructor: tunneling regime 0 < g < 3ħ²/(8m).
    pub fn new(m: f64, omega: f64, hbar: f64, g: f64) -> Result<Self> {
        let p = Self::new_limit(m, omega, hbar, g)?;
        if g <= 0.0 || g >= p.coupling_max() {
            return Err(IsqError::InvalidParams(format!(
                "coupling g = {g} outside the tunneling window (0, {})",
                p.coupling_max()
            )));
        }
        Ok(p)
    }

    /// Limit-test constructor: additionally admits g = 0 (a = 1/2) and
    /// g = 3ħ²/(8m) (a = 1) for the kernel-limit checks.
    pub fn new_limit(m: f64, omega: f64, hbar: f64, g: f64) -> Result<Self> {
        if !(m > 0.0 && omega > 0.0 && hbar > 0.0) {
            return Err(IsqError::InvalidParams(format!(
                "m, omega, hbar must be positive (got {m}, {omega}, {hbar})"
            )));
        }
        let max = 3.0 * hbar * hbar / (8.0 * m);
        if !(0.0..=max).contains(&g) {
            return Err(IsqError::InvalidParams(format!(
                "coupling g = {g} outside [0, {max}]"
            )));
        }
        Ok(PhysicalParams { m, omega, hbar, g })
    }

    /// Natural units m = ω = ħ = 1, strict coupling window.
    pub fn natural(g: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, g)
    }

    /// Natural units, limit-test coupling window [0, 3/8].
    pub fn natural_limit(g: f64) -> Result<Self> {
        Self::new_limit(1.0, 1.0, 1.0, g)
    }

    /// Upper end of the coupling window, 3ħ²/(8m).
    pub fn coupling_max(&self) -> f64 {
        3.0 * self.hbar * self.hbar / (8.0 * self.m)
    }

    /// Inverse oscillator length β = √(mω/ħ); y = βx.
    pub fn beta(&self) -> f64 {
        (self.m * self.omega / self.hbar).sqrt()
    }
}

/// a = (1/2)√(1 + 8mg/ħ²) and the indicial exponents c1 = 1 + a, c2 = 1 − a.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Exponents {
    pub a: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Exponents {
    pub fn from_params(params: &PhysicalParams) -> Self {
        let a = 0.5 * (1.0 + 8.0 * params.m * params.g / (params.hbar * params.hbar)).sqrt();
        Exponents {
            a,
            c1: 1.0 + a,
            c2: 1.0 - a,
        }
    }

    /// Natural-unit exponents directly from a target a ∈ [1/2, 1]:
    /// g = ħ²(4a² − 1)/(8m).
    pub fn coupling_for(a: f64, m: f64, hbar: f64) -> f64 {
        hbar * hbar * (4.0 * a * a - 1.0) / (8.0 * m)
    }
}

/// a, c1, c2 from the coupling.
pub fn exponents_from_coupling(params: &PhysicalParams) -> Exponents {
    Exponents::from_params(params)
}

/// Dense 2×2 complex matrix; rows-of-entries layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Mat2([[o, z], [z, o]])
    }

    pub fn sigma1() -> Self {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Mat2([[z, o], [o, z]])
    }

    pub fn diag(d0: Complex64, d1: Complex64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Mat2([[d0, z], [z, d1]])
    }

    pub fn scale(self, s: Complex64) -> Self {
        Mat2([
            [self.0[0][0] * s, self.0[0][1] * s],
            [self.0[1][0] * s, self.0[1][1] * s],
        ])
    }

    pub fn mul(self, o: Mat2) -> Self {
        let mut r = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j];
            }
        }
        Mat2(r)
    }

    pub fn adjoint(self) -> Self {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn det(self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Max-norm of U†U − I.
    pub fn unitarity_deviation(self) -> f64 {
        let p = self.adjoint().mul(self);
        let id = Mat2::identity();
        let mut d = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((p.0[i][j] - id.0[i][j]).norm());
            }
        }
        d
    }

    /// Max-norm distance to another matrix.
    pub fn max_norm_diff(self, o: Mat2) -> f64 {
        let mut d = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - o.0[i][j]).norm());
            }
        }
        d
    }
}

/// Extended-real extension length: cot(θ/2) sends θ = 0 to infinity and
/// θ = π to zero, and those two cases select the closed-form ladders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtLength {
    Zero,
    Infinite,
    Finite(f64),
}

impl ExtLength {
    /// L = L0 cot(θ/2), θ taken in [0, 2π).
    pub fn from_angle(theta: f64, l0: f64) -> Self {
        if theta.abs() < ANGLE_SNAP || (theta - 2.0 * PI).abs() < ANGLE_SNAP {
            ExtLength::Infinite
        } else if (theta - PI).abs() < ANGLE_SNAP {
            ExtLength::Zero
        } else {
            ExtLength::Finite(l0 / (0.5 * theta).tan())
        }
    }

    /// ξ = −1/L: 0 for L = ∞; the boundary form uses it to stay finite at L = 0.
    pub fn xi(&self) -> Option<f64> {
        match self {
            ExtLength::Zero => None,
            ExtLength::Infinite => Some(0.0),
            ExtLength::Finite(l) => Some(-1.0 / l),
        }
    }
}

/// One self-adjoint extension: the characteristic matrix U together with
/// its eigenphase decomposition U = V⁻¹ diag(e^{iθ₊}, e^{iθ₋}) V and the
/// derived lengths.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryData {
    pub u: Mat2,
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub v: Mat2,
    pub l0: f64,
    pub l_plus: ExtLength,
    pub l_minus: ExtLength,
}

impl BoundaryData {
    pub fn is_degenerate(&self) -> bool {
        (self.theta_plus - self.theta_minus).abs() < 1e-9
    }
}

fn wrap_angle(phi: f64) -> f64 {
    let mut t = phi % (2.0 * PI);
    if t < 0.0 {
        t += 2.0 * PI;
    }
    // snap near-2π down to 0 so exact cases stay exact
    if (t - 2.0 * PI).abs() < ANGLE_SNAP {
        t = 0.0;
    }
    t
}

/// Eigenphase decomposition of a 2×2 unitary with the θ₊ ordering
/// convention: the eigenphase whose eigenvector has the larger
/// first-component magnitude comes first; ties break toward the smaller
/// phase.
pub fn decompose_unitary(u: Mat2, l0: f64) -> Result<BoundaryData> {
    if !(l0 > 0.0) {
        return Err(IsqError::InvalidParams(format!("L0 = {l0} must be positive")));
    }
    let dev = u.unitarity_deviation();
    if dev > UNITARY_TOL {
        return Err(IsqError::NotUnitary { deviation: dev });
    }

    let t = u.trace();
    let d = u.det();
    let disc = (t * t - 4.0 * d).sqrt();
    let e0 = 0.5 * (t + disc);
    let e1 = 0.5 * (t - disc);

    if (e0 - e1).norm() < 1e-12 {
        // degenerate: U = e^{iθ} I, any V works; canonical V = I
        let theta = wrap_angle(e0.arg());
        let l = ExtLength::from_angle(theta, l0);
        return Ok(BoundaryData {
            u,
            theta_plus: theta,
            theta_minus: theta,
            v: Mat2::identity(),
            l0,
            l_plus: l,
            l_minus: l,
        });
    }

    // eigenvector for eigenvalue e: columns of (U - e I) are linearly
    // dependent; the nullvector comes from whichever row is larger
    let eigvec = |e: Complex64| -> [Complex64; 2] {
        let r0 = [u.0[0][0] - e, u.0[0][1]];
        let r1 = [u.0[1][0], u.0[1][1] - e];
        let n0 = r0[0].norm() + r0[1].norm();
        let n1 = r1[0].norm() + r1[1].norm();
        let v = if n0 >= n1 {
            [-r0[1], r0[0]]
        } else {
            [-r1[1], r1[0]]
        };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    };

    let mut pairs = [(wrap_angle(e0.arg()), eigvec(e0)), (wrap_angle(e1.arg()), eigvec(e1))];
    let m0 = pairs[0].1[0].norm();
    let m1 = pairs[1].1[0].norm();
    let swap = if (m0 - m1).abs() <= 1e-9 {
        pairs[1].0 < pairs[0].0
    } else {
        m1 > m0
    };
    if swap {
        pairs.swap(0, 1);
    }
    let (theta_plus, wp) = pairs[0];
    let (theta_minus, wm) = pairs[1];

    // V has the conjugated eigenvectors as rows, so that V U V† = diag;
    // rescale by a global phase to land in SU(2)
    let mut v = Mat2([
        [wp[0].conj(), wp[1].conj()],
        [wm[0].conj(), wm[1].conj()],
    ]);
    let detv = v.det();
    let phase = Complex64::from_polar(1.0, -0.5 * detv.arg());
    v = v.scale(phase / detv.norm().sqrt());

    Ok(BoundaryData {
        u,
        theta_plus,
        theta_minus,
        v,
        l0,
        l_plus: ExtLength::from_angle(theta_plus, l0),
        l_minus: ExtLength::from_angle(theta_minus, l0),
    })
}

/// Characteristic matrices by keyword: `minus_identity`, `sigma1`,
/// `identity`, or `diag:θ+,θ−` with angles in radians.
pub fn unitary_from_keyword(kw: &str) -> Result<Mat2> {
    match kw {
        "minus_identity" => Ok(Mat2::identity().scale(Complex64::new(-1.0, 0.0))),
        "sigma1" => Ok(Mat2::sigma1()),
        "identity" => Ok(Mat2::identity()),
        _ => {
            if let Some(rest) = kw.strip_prefix("diag:") {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 2 {
                    return Err(IsqError::Config(format!(
                        "diag keyword needs two angles, got {kw:?}"
                    )));
                }
                let tp: f64 = parts[0]
                    .trim()
                    .parse()
                    .map_err(|e| IsqError::Config(format!("bad angle in {kw:?}: {e}")))?;
                let tm: f64 = parts[1]
                    .trim()
                    .parse()
                    .map_err(|e| IsqError::Config(format!("bad angle in {kw:?}: {e}")))?;
                Ok(Mat2::diag(
                    Complex64::from_polar(1.0, tp),
                    Complex64::from_polar(1.0, tm),
                ))
            } else {
                Err(IsqError::Config(format!("unknown unitary keyword {kw:?}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recompose(bd: &BoundaryData) -> Mat2 {
        let d = Mat2::diag(
            Complex64::from_polar(1.0, bd.theta_plus),
            Complex64::from_polar(1.0, bd.theta_minus),
        );
        bd.v.adjoint().mul(d).mul(bd.v)
    }

    #[test]
    fn exponent_window() {
        let p = PhysicalParams::natural(5.0 / 32.0).unwrap();
        let e = Exponents::from_params(&p);
        assert!((e.a - 0.75).abs() < 1e-15);
        assert!((e.c1 - 1.75).abs() < 1e-15);
        assert!((e.c2 - 0.25).abs() < 1e-15);

        let p = PhysicalParams::natural_limit(0.0).unwrap();
        let e = Exponents::from_params(&p);
        assert_eq!(e.a, 0.5);
        assert_eq!(e.c1, 1.5);
        assert_eq!(e.c2, 0.5);

        let p = PhysicalParams::natural_limit(3.0 / 8.0).unwrap();
        assert_eq!(Exponents::from_params(&p).a, 1.0);

        assert!(PhysicalParams::natural(0.0).is_err());
        assert!(PhysicalParams::natural(3.0 / 8.0).is_err());
        assert!(PhysicalParams::natural_limit(0.4).is_err());
        assert!(PhysicalParams::new(-1.0, 1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn coupling_for_inverts() {
        let g = Exponents::coupling_for(0.75, 1.0, 1.0);
        assert!((g - 5.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn minus_identity_case() {
        let u = unitary_from_keyword("minus_identity").unwrap();
        let bd = decompose_unitary(u, 1.0).unwrap();
        assert!((bd.theta_plus - PI).abs() < 1e-12);
        assert!((bd.theta_minus - PI).abs() < 1e-12);
        assert_eq!(bd.l_plus, ExtLength::Zero);
        assert_eq!(bd.l_minus, ExtLength::Zero);
        assert!(recompose(&bd).max_norm_diff(u) < 1e-12);
    }

    #[test]
    fn sigma1_case() {
        let u = Mat2::sigma1();
        let bd = decompose_unitary(u, 1.0).unwrap();
        assert!(bd.theta_plus.abs() < 1e-12);
        assert!((bd.theta_minus - PI).abs() < 1e-12);
        assert_eq!(bd.l_plus, ExtLength::Infinite);
        assert_eq!(bd.l_minus, ExtLength::Zero);
        assert!((bd.v.det() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(recompose(&bd).max_norm_diff(u) < 1e-12);
    }

    #[test]
    fn identity_case() {
        let bd = decompose_unitary(Mat2::identity(), 2.5).unwrap();
        assert_eq!(bd.theta_plus, 0.0);
        assert_eq!(bd.l_plus, ExtLength::Infinite);
        assert_eq!(bd.l_minus, ExtLength::Infinite);
        assert!(bd.is_degenerate());
    }

    #[test]
    fn diag_keyword_case() {
        let u = unitary_from_keyword("diag:1.0471975511965976,-0.7853981633974483").unwrap();
        let bd = decompose_unitary(u, 1.0).unwrap();
        assert!(recompose(&bd).max_norm_diff(u) < 1e-12);
        match (bd.l_plus, bd.l_minus) {
            (ExtLength::Finite(_), ExtLength::Finite(_)) => {}
            other => panic!("expected finite lengths, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_unitary() {
        let mut u = Mat2::identity();
        u.0[0][0] = Complex64::new(1.1, 0.0);
        match decompose_unitary(u, 1.0) {
            Err(IsqError::NotUnitary { deviation }) => assert!(deviation > 0.1),
            other => panic!("expected NotUnitary, got {other:?}"),
        }
    }

    #[test]
    fn ext_length_signs() {
        // θ in (0, π) gives positive length, (π, 2π) negative
        match ExtLength::from_angle(PI / 2.0, 1.0) {
            ExtLength::Finite(l) => assert!((l - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        match ExtLength::from_angle(3.0 * PI / 2.0, 1.0) {
            ExtLength::Finite(l) => assert!((l + 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn random_unitary(a: f64, b: f64, c: f64, d: f64) -> Mat2 {
            // SU(2) from a point on S³ times a global phase
            let n = (a * a + b * b + c * c + d * d).sqrt().max(1e-6);
            let (a, b, c, d) = (a / n, b / n, c / n, d / n);
            let su = Mat2([
                [Complex64::new(a, b), Complex64::new(c, d)],
                [Complex64::new(-c, d), Complex64::new(a, -b)],
            ]);
            su.scale(Complex64::from_polar(1.0, 0.7 * a + 1.3 * d))
        }

        proptest! {
            #[test]
            fn round_trip(a in -1.0f64..1.0, b in -1.0f64..1.0,
                          c in -1.0f64..1.0, d in -1.0f64..1.0) {
                let u = random_unitary(a, b, c, d);
                prop_assume!(u.unitarity_deviation() < 1e-12);
                let bd = decompose_unitary(u, 1.0).unwrap();
                prop_assert!((bd.v.det() - Complex64::new(1.0, 0.0)).norm() < 1e-9);
                let r = bd.v.adjoint()
                    .mul(Mat2::diag(
                        Complex64::from_polar(1.0, bd.theta_plus),
                        Complex64::from_polar(1.0, bd.theta_minus),
                    ))
                    .mul(bd.v);
                prop_assert!(r.max_norm_diff(u) < 1e-10);
            }

            #[test]
            fn a_monotone_in_g(g1 in 0.0f64..0.375, g2 in 0.0f64..0.375) {
                prop_assume!(g1 < g2);
                let a1 = Exponents::from_params(&PhysicalParams::natural_limit(g1).unwrap()).a;
                let a2 = Exponents::from_params(&PhysicalParams::natural_limit(g2).unwrap()).a;
                prop_assert!(a1 < a2);
            }

            #[test]
            fn a_is_dimensionless(kappa in 0.1f64..10.0, g in 0.01f64..0.35) {
                let p1 = PhysicalParams::new_limit(1.0, 1.0, 1.0, g).unwrap();
                let p2 = PhysicalParams::new_limit(kappa, 1.0, kappa, kappa * g).unwrap();
                let e1 = Exponents::from_params(&p1);
                let e2 = Exponents::from_params(&p2);
                prop_assert!((e1.a - e2.a).abs() < 1e-12);
            }
        }
    }
}
