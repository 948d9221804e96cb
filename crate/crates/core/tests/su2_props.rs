//! SU(2) arithmetic checked against plain 2×2 complex matrices.

use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sphandle::su2::{
    adjoint, exp_tangent, log_unit, random_unit_quaternion, random_unit_vector, TangentVector, UnitQuaternion,
};

type M = [[C; 2]; 2];

fn from_layout(m: [[f64; 2]; 4]) -> M {
    let c = |e: [f64; 2]| C::new(e[0], e[1]);
    [[c(m[0]), c(m[1])], [c(m[2]), c(m[3])]]
}

fn mul(a: &M, b: &M) -> M {
    let mut out = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn add(a: &M, b: &M) -> M {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += b[i][j];
        }
    }
    out
}

fn scale(a: &M, s: f64) -> M {
    a.map(|row| row.map(|e| e * s))
}

fn dagger(a: &M) -> M {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn dist(a: &M, b: &M) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            s += (a[i][j] - b[i][j]).norm_sqr();
        }
    }
    s.sqrt()
}

/// Truncated power series `Σ_{k<terms} A^k / k!`.
fn exp_series(a: &M, terms: usize) -> M {
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let mut sum = [[one, zero], [zero, one]];
    let mut term = sum;
    for k in 1..terms {
        term = scale(&mul(&term, a), 1.0 / k as f64);
        sum = add(&sum, &term);
    }
    sum
}

fn tangent(v: [f64; 3]) -> TangentVector {
    TangentVector::new(v[0], v[1], v[2])
}

/// 20-term series on `A/16`, squared back four times. Near `|A| = π` the
/// unscaled 20-term remainder is about 4e-9, too coarse for a 1e-12 check.
fn exp_oracle(a: &M) -> M {
    let mut e = exp_series(&scale(a, 1.0 / 16.0), 20);
    for _ in 0..4 {
        e = mul(&e, &e);
    }
    e
}

#[test]
fn exp_matches_power_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let r = rand::Rng::random_range(&mut rng, 0.0..std::f64::consts::PI);
        let x = TangentVector(random_unit_vector(&mut rng) * r);
        let series = exp_oracle(&from_layout(x.to_matrix()));
        let closed = from_layout(exp_tangent(&x).to_matrix());
        assert!(dist(&series, &closed) < 1e-12, "r = {r}");
    }
}

#[test]
fn quaternion_product_is_matrix_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..2000 {
        let a = random_unit_quaternion(&mut rng);
        let b = random_unit_quaternion(&mut rng);
        let lhs = from_layout((a * b).to_matrix());
        let rhs = mul(&from_layout(a.to_matrix()), &from_layout(b.to_matrix()));
        assert!(dist(&lhs, &rhs) < 1e-14);
        let inv = from_layout(a.inverse().to_matrix());
        assert!(dist(&inv, &dagger(&from_layout(a.to_matrix()))) < 1e-15);
    }
}

#[test]
fn adjoint_matches_matrix_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..2000 {
        let x = TangentVector(random_unit_vector(&mut rng) * 1.3);
        let g = random_unit_quaternion(&mut rng);
        let gm = from_layout(g.to_matrix());
        let expected = mul(&mul(&dagger(&gm), &from_layout(x.to_matrix())), &gm);
        assert!(dist(&from_layout(adjoint(&x, &g).to_matrix()), &expected) < 1e-13);
    }
}

#[test]
fn trace_of_exp_on_many_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10_000 {
        let r = rand::Rng::random_range(&mut rng, 0.0..std::f64::consts::PI);
        let x = TangentVector(random_unit_vector(&mut rng) * r);
        assert!((exp_tangent(&x).trace() - 2.0 * r.cos()).abs() < 1e-12);
        let g = random_unit_quaternion(&mut rng);
        assert!((adjoint(&x, &g).radius() - r).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn log_inverts_exp(v in prop::array::uniform3(-1.0f64..1.0), r in 0.01f64..3.13) {
        let u = nalgebra::Vector3::from(v);
        prop_assume!(u.norm() > 1e-3);
        let x = TangentVector(u.normalize() * r);
        let back = log_unit(&exp_tangent(&x), r).unwrap();
        prop_assert!(back.distance(&x) < 1e-9 * (1.0 + 1.0 / (std::f64::consts::PI - r)));
    }

    #[test]
    fn adjoint_is_a_right_action(
        v in prop::array::uniform3(-2.0f64..2.0),
        a in prop::array::uniform4(-1.0f64..1.0),
        b in prop::array::uniform4(-1.0f64..1.0),
    ) {
        prop_assume!(a.iter().map(|t| t * t).sum::<f64>() > 1e-2);
        prop_assume!(b.iter().map(|t| t * t).sum::<f64>() > 1e-2);
        prop_assume!(v.iter().map(|t| t * t).sum::<f64>() > 1e-4);
        let g = UnitQuaternion::new(a[0], a[1], a[2], a[3]);
        let h = UnitQuaternion::new(b[0], b[1], b[2], b[3]);
        let x = tangent(v);
        let stepwise = adjoint(&adjoint(&x, &g), &h);
        prop_assert!(stepwise.distance(&adjoint(&x, &(g * h))) < 1e-12);
    }

    #[test]
    fn adjoint_is_a_rotation(a in prop::array::uniform4(-1.0f64..1.0)) {
        prop_assume!(a.iter().map(|t| t * t).sum::<f64>() > 1e-2);
        let g = UnitQuaternion::new(a[0], a[1], a[2], a[3]);
        // column j is the image of the j-th basis vector
        let cols: Vec<_> = (0..3)
            .map(|j| adjoint(&TangentVector(nalgebra::Vector3::ith(j, 1.0)), &g).0)
            .collect();
        let m = nalgebra::Matrix3::from_columns(&cols);
        prop_assert!((m.transpose() * m - nalgebra::Matrix3::identity()).norm() < 1e-12);
        prop_assert!((m.determinant() - 1.0).abs() < 1e-12);
    }
}
