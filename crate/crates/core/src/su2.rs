//! SU(2) as unit quaternions and su(2) as 3-vectors.
//!
//! A unit quaternion `w + xi + yj + zk` stands for the SU(2) matrix
//!
//! ```text
//! [[ w + ix,  y + iz ],
//!  [ −y + iz, w − ix ]]
//! ```
//!
//! so its trace is `2w`. A tangent vector `v = (v1, v2, v3)` stands for the
//! su(2) matrix `[[i v1, v2 + i v3], [−v2 + i v3, −i v1]]`, which is the pure
//! quaternion `v1 i + v2 j + v3 k` under the same identification. With these
//! layouts `exp(v) = cos|v| + sin|v|·v/|v|` and the adjoint right action
//! `X·g = g⁻¹ X g` is a rotation of `v`.

use std::f64::consts::PI;
use std::ops::{Mul, Neg};

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default tolerance on `|tr g − 2cos r|` accepted by [`log_unit`].
pub const TRACE_TOLERANCE: f64 = 1e-9;

/// Below this norm the vector part of a unit quaternion is treated as zero.
const DEGENERATE_VECTOR_NORM: f64 = 1e-12;

#[inline]
fn hamilton(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    let [aw, ax, ay, az] = a;
    let [bw, bx, by, bz] = b;
    [
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ]
}

/// An element of SU(2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitQuaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitQuaternion {
    pub const IDENTITY: Self = Self::raw(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::raw(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::raw(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::raw(0.0, 0.0, 0.0, 1.0);

    const fn raw(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// Normalizes `(w, x, y, z)`. Panics on the zero quaternion.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        assert!(norm > 0.0, "cannot normalize the zero quaternion");
        Self::raw(w / norm, x / norm, y / norm, z / norm)
    }

    /// Builds from components without renormalizing (for deserialized input).
    pub fn from_components_unchecked(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self::raw(w, x, y, z)
    }

    pub fn components(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn vector_part(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn norm(&self) -> f64 {
        self.components().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Inverse, equal to the conjugate for unit quaternions.
    pub fn inverse(&self) -> Self {
        Self::raw(self.w, -self.x, -self.y, -self.z)
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.w
    }

    /// Euclidean distance in ℝ⁴ (equivalently the Frobenius distance of the
    /// SU(2) matrices divided by √2).
    pub fn distance(&self, other: &Self) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `min(d(a, b), d(a, −b))`, the distance of the images in SO(3).
    pub fn distance_up_to_sign(&self, other: &Self) -> f64 {
        self.distance(other).min(self.distance(&-*other))
    }

    /// `g X g⁻¹` on pure quaternions, as a 3×3 rotation matrix.
    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - z * w),
            2.0 * (x * z + y * w),
            2.0 * (x * y + z * w),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - x * w),
            2.0 * (x * z - y * w),
            2.0 * (y * z + x * w),
            1.0 - 2.0 * (x * x + y * y),
        )
    }

    /// One of the two preimages `±g` of a rotation under the double cover
    /// `g ↦ (v ↦ g v g⁻¹)`. The other preimage is its negation.
    pub fn from_rotation_matrix(m: &Matrix3<f64>) -> Self {
        let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        // Shepperd: branch on the largest diagonal term for stability
        if trace > m[(0, 0)].max(m[(1, 1)]).max(m[(2, 2)]) {
            let s = (1.0 + trace).sqrt() * 2.0;
            Self::new(
                0.25 * s,
                (m[(2, 1)] - m[(1, 2)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(1, 0)] - m[(0, 1)]) / s,
            )
        } else if m[(0, 0)] >= m[(1, 1)] && m[(0, 0)] >= m[(2, 2)] {
            let s = (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * 2.0;
            Self::new(
                (m[(2, 1)] - m[(1, 2)]) / s,
                0.25 * s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
            )
        } else if m[(1, 1)] >= m[(2, 2)] {
            let s = (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * 2.0;
            Self::new(
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                0.25 * s,
                (m[(1, 2)] + m[(2, 1)]) / s,
            )
        } else {
            let s = (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * 2.0;
            Self::new(
                (m[(1, 0)] - m[(0, 1)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                0.25 * s,
            )
        }
    }

    /// The SU(2) matrix, row-major, entries as `[re, im]`.
    pub fn to_matrix(&self) -> [[f64; 2]; 4] {
        [
            [self.w, self.x],
            [self.y, self.z],
            [-self.y, self.z],
            [self.w, -self.x],
        ]
    }

    /// Diagonal element `diag(e^{it}, e^{−it})`.
    pub fn diagonal(t: f64) -> Self {
        Self::raw(t.cos(), t.sin(), 0.0, 0.0)
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;

    /// Hamilton product, renormalized.
    fn mul(self, rhs: Self) -> Self {
        let [w, x, y, z] = hamilton(self.components(), rhs.components());
        Self::new(w, x, y, z)
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;

    fn neg(self) -> Self {
        Self::raw(-self.w, -self.x, -self.y, -self.z)
    }
}

pub fn qmul(a: UnitQuaternion, b: UnitQuaternion) -> UnitQuaternion {
    a * b
}

/// An element of su(2), stored as a 3-vector; its radius `|v|` is the `r`
/// of the sphere `S²(r)` it lies on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "VectorJson", into = "VectorJson")]
pub struct TangentVector(pub Vector3<f64>);

#[derive(Serialize, Deserialize)]
struct VectorJson {
    v: [f64; 3],
}

impl From<VectorJson> for TangentVector {
    fn from(j: VectorJson) -> Self {
        TangentVector(Vector3::from(j.v))
    }
}

impl From<TangentVector> for VectorJson {
    fn from(t: TangentVector) -> Self {
        VectorJson { v: t.0.into() }
    }
}

impl TangentVector {
    pub fn new(v1: f64, v2: f64, v3: f64) -> Self {
        Self(Vector3::new(v1, v2, v3))
    }

    /// `D(r) = diag(ir, −ir)`.
    pub fn diagonal(r: f64) -> Self {
        Self::new(r, 0.0, 0.0)
    }

    /// `r · u` for a unit direction `u`.
    pub fn on_sphere(u: &Vector3<f64>, r: f64) -> Self {
        Self(u.normalize() * r)
    }

    pub fn radius(&self) -> f64 {
        self.0.norm()
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn direction(&self) -> Vector3<f64> {
        self.0.normalize()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self.0 - other.0).norm()
    }

    /// The su(2) matrix, row-major, entries as `[re, im]`.
    pub fn to_matrix(&self) -> [[f64; 2]; 4] {
        let [v1, v2, v3] = [self.0.x, self.0.y, self.0.z];
        [[0.0, v1], [v2, v3], [-v2, v3], [0.0, -v1]]
    }
}

/// A point of the unit sphere in ℝ³ (the Azcan–Fenn presentation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "UnitJson", into = "UnitJson")]
pub struct SpherePoint(pub Vector3<f64>);

#[derive(Serialize, Deserialize)]
struct UnitJson {
    u: [f64; 3],
}

impl From<UnitJson> for SpherePoint {
    fn from(j: UnitJson) -> Self {
        SpherePoint(Vector3::from(j.u))
    }
}

impl From<SpherePoint> for UnitJson {
    fn from(p: SpherePoint) -> Self {
        UnitJson { u: p.0.into() }
    }
}

impl SpherePoint {
    /// Normalizes `(x1, x2, x3)`.
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self(Vector3::new(x1, x2, x3).normalize())
    }

    pub fn from_vector(v: Vector3<f64>) -> Self {
        Self(v.normalize())
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self.0 - other.0).norm()
    }
}

/// `exp: su(2) → SU(2)`, `v ↦ cos|v| + sin|v|·v/|v|`; the identity at `v = 0`.
pub fn exp_tangent(x: &TangentVector) -> UnitQuaternion {
    let r = x.radius();
    if r == 0.0 {
        return UnitQuaternion::IDENTITY;
    }
    let s = r.sin() / r;
    UnitQuaternion::new(r.cos(), s * x.0.x, s * x.0.y, s * x.0.z)
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r < PI {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            what: "r",
            value: r,
            domain: "(0, π)",
        })
    }
}

/// Inverse of `exp` restricted to `S²(r)`, with the default trace tolerance.
pub fn log_unit(g: &UnitQuaternion, r: f64) -> Result<TangentVector> {
    log_unit_with_tolerance(g, r, TRACE_TOLERANCE)
}

/// The unique `X` with `|X| = r` and `exp X = g`, for `r ∈ (0, π)`.
///
/// Requires `tr g = 2cos r` within `tolerance`; `±identity` has no
/// well-defined direction and is rejected first.
pub fn log_unit_with_tolerance(g: &UnitQuaternion, r: f64, tolerance: f64) -> Result<TangentVector> {
    check_radius(r)?;
    let vector = g.vector_part();
    let s = vector.norm();
    if s < DEGENERATE_VECTOR_NORM {
        return Err(Error::DegenerateLogarithm);
    }
    let expected = 2.0 * r.cos();
    if (g.trace() - expected).abs() > tolerance {
        return Err(Error::TraceMismatch {
            trace: g.trace(),
            expected,
        });
    }
    Ok(TangentVector(vector * (r / s)))
}

/// The adjoint right action `X·g = g⁻¹ X g`, renormalized to `|X|`.
pub fn adjoint(x: &TangentVector, g: &UnitQuaternion) -> TangentVector {
    let r = x.radius();
    if r == 0.0 {
        return *x;
    }
    let pure = [0.0, x.0.x, x.0.y, x.0.z];
    let [_, a, b, c] = hamilton(hamilton(g.inverse().components(), pure), g.components());
    let v = Vector3::new(a, b, c);
    TangentVector(v * (r / v.norm()))
}

/// Conjugation `g⁻¹ h g` in SU(2).
pub fn conjugate(h: &UnitQuaternion, g: &UnitQuaternion) -> UnitQuaternion {
    g.inverse() * *h * *g
}

/// Group commutator `a b a⁻¹ b⁻¹`.
pub fn commutator(a: &UnitQuaternion, b: &UnitQuaternion) -> UnitQuaternion {
    *a * *b * a.inverse() * b.inverse()
}

pub fn random_unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> UnitQuaternion {
    loop {
        let c: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return UnitQuaternion::new(c[0], c[1], c[2], c[3]);
        }
    }
}

/// Uniform point on the unit sphere of ℝ³.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let norm: f64 = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// Sampled check that the isotropy subgroups of `D(r)` (adjoint action) and of
/// `exp D(r)` (conjugation) are exactly the diagonal elements of SU(2).
///
/// Every sampled diagonal element must fix both; every sampled element with
/// off-diagonal part `√(y² + z²) ≥ 0.1` must move both. Sampling is seeded
/// and deterministic.
pub fn isotropy_is_diagonal(r: f64) -> Result<bool> {
    if !r.is_finite() || r.sin().abs() < 1e-12 {
        return Err(Error::OutOfDomain {
            what: "r",
            value: r,
            domain: "ℝ ∖ πℤ",
        });
    }
    let d = TangentVector::diagonal(r);
    let exp_d = exp_tangent(&d);
    let fix_tol = 1e-12 * r.abs().max(1.0);

    let diagonal_fixes = (0..=64).all(|k| {
        let g = UnitQuaternion::diagonal(2.0 * PI * k as f64 / 64.0);
        adjoint(&d, &g).distance(&d) < fix_tol && conjugate(&exp_d, &g).distance(&exp_d) < 1e-12
    });

    let mut rng = ChaCha8Rng::seed_from_u64(0x1505_7e0f);
    let mut moved = 0;
    while moved < 256 {
        let g = random_unit_quaternion(&mut rng);
        let off_diagonal = g.y.hypot(g.z);
        if off_diagonal < 0.1 {
            continue;
        }
        // exact displacements are 2|r|·s and 2|sin r|·s
        let need_d = 1e-6 * 2.0 * r.abs() * off_diagonal;
        let need_exp = 1e-6 * 2.0 * r.sin().abs() * off_diagonal;
        if adjoint(&d, &g).distance(&d) <= need_d
            || conjugate(&exp_d, &g).distance(&exp_d) <= need_exp
        {
            return Ok(false);
        }
        moved += 1;
    }
    Ok(diagonal_fixes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: &UnitQuaternion, b: &UnitQuaternion, tol: f64) -> bool {
        a.distance(b) < tol
    }

    #[test]
    fn quaternion_relations() {
        let g = UnitQuaternion::new(0.3, -0.4, 0.5, 0.1);
        assert!(close(&qmul(UnitQuaternion::IDENTITY, g), &g, 1e-15));
        assert!(close(
            &qmul(UnitQuaternion::I, UnitQuaternion::I),
            &-UnitQuaternion::IDENTITY,
            1e-15
        ));
        assert!(close(
            &qmul(UnitQuaternion::I, UnitQuaternion::J),
            &UnitQuaternion::K,
            1e-15
        ));
        assert!(close(
            &qmul(UnitQuaternion::J, UnitQuaternion::K),
            &UnitQuaternion::I,
            1e-15
        ));
    }

    #[test]
    fn exp_examples() {
        let g = exp_tangent(&TangentVector::diagonal(FRAC_PI_2));
        assert!(close(&g, &UnitQuaternion::I, 1e-15));
        assert!(g.trace().abs() < 1e-15);
        assert_eq!(exp_tangent(&TangentVector::new(0.0, 0.0, 0.0)), UnitQuaternion::IDENTITY);
        assert!(close(
            &exp_tangent(&TangentVector::new(PI, 0.0, 0.0)),
            &-UnitQuaternion::IDENTITY,
            1e-15
        ));
    }

    #[test]
    fn log_examples() {
        let x = log_unit(&UnitQuaternion::I, FRAC_PI_2).unwrap();
        assert!(x.distance(&TangentVector::diagonal(FRAC_PI_2)) < 1e-15);

        assert_eq!(
            log_unit(&UnitQuaternion::IDENTITY, 1.0),
            Err(Error::DegenerateLogarithm)
        );
        assert_eq!(
            log_unit(&-UnitQuaternion::IDENTITY, 1.0),
            Err(Error::DegenerateLogarithm)
        );

        let y = TangentVector::new(0.0, PI / 3.0, 0.0);
        let back = log_unit(&exp_tangent(&y), PI / 3.0).unwrap();
        assert!(back.distance(&y) < 1e-15);

        assert!(matches!(
            log_unit(&UnitQuaternion::I, 1.0),
            Err(Error::TraceMismatch { .. })
        ));
        assert!(matches!(
            log_unit(&UnitQuaternion::I, 0.0),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(matches!(
            log_unit(&UnitQuaternion::I, PI),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn adjoint_examples() {
        let x = TangentVector::new(0.3, -1.1, 0.4);
        assert!(adjoint(&x, &UnitQuaternion::IDENTITY).distance(&x) < 1e-15);

        let r = 0.7;
        let flipped = adjoint(&TangentVector::diagonal(r), &UnitQuaternion::J);
        assert!(flipped.distance(&TangentVector::new(-r, 0.0, 0.0)) < 1e-15);
    }

    #[test]
    fn adjoint_matches_rotation_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let g = random_unit_quaternion(&mut rng);
            let x = TangentVector(random_unit_vector(&mut rng) * 1.3);
            let via_matrix = g.inverse().rotation_matrix() * x.0;
            assert!((adjoint(&x, &g).0 - via_matrix).norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_lift_is_a_preimage() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let g = random_unit_quaternion(&mut rng);
            let lifted = UnitQuaternion::from_rotation_matrix(&g.rotation_matrix());
            assert!(lifted.distance_up_to_sign(&g) < 1e-12);
        }
        // half-turns exercise the non-trace branches
        for g in [UnitQuaternion::I, UnitQuaternion::J, UnitQuaternion::K] {
            let lifted = UnitQuaternion::from_rotation_matrix(&g.rotation_matrix());
            assert!(lifted.distance_up_to_sign(&g) < 1e-15);
        }
    }

    #[test]
    fn matrix_layout() {
        let g = UnitQuaternion::new(0.5, 0.5, 0.5, 0.5);
        let m = g.to_matrix();
        assert_eq!(m[0], [0.5, 0.5]);
        assert_eq!(m[1], [0.5, 0.5]);
        assert_eq!(m[2], [-0.5, 0.5]);
        assert_eq!(m[3], [0.5, -0.5]);
    }

    #[test]
    fn isotropy() {
        assert_eq!(isotropy_is_diagonal(FRAC_PI_2), Ok(true));
        assert_eq!(isotropy_is_diagonal(1.0), Ok(true));
        assert_eq!(isotropy_is_diagonal(-2.5), Ok(true));
        assert!(matches!(
            isotropy_is_diagonal(PI),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(isotropy_is_diagonal(0.0).is_err());
    }

    #[test]
    fn json_forms() {
        let q = UnitQuaternion::I;
        assert_eq!(
            serde_json::to_string(&q).unwrap(),
            r#"{"w":0.0,"x":1.0,"y":0.0,"z":0.0}"#
        );
        let t: TangentVector = serde_json::from_str(r#"{"v":[1.0,2.0,3.0]}"#).unwrap();
        assert_eq!(t, TangentVector::new(1.0, 2.0, 3.0));
        let p = SpherePoint::new(0.0, 0.0, 2.0);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"u":[0.0,0.0,1.0]}"#);
    }
}
