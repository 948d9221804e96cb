use std::cell::RefCell;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sphandle::quandle::{sampled_axiom_residuals, Quandle};
use sphandle::spherical::{
    clark_saito_consistency, faithfulness_ratio, h_inverse, h_map, inner_rotation_check, op_azcan_fenn,
    Augmented, AzcanFenn, ClarkSaito, Orientation,
};
use sphandle::su2::{random_unit_vector, SpherePoint, TangentVector};

const TRIPLES: usize = 10_000;

fn grid() -> impl Iterator<Item = f64> {
    (1..=20).map(|k| PI * k as f64 / 21.0)
}

fn unit_sampler(seed: u64) -> impl FnMut() -> SpherePoint {
    let rng = RefCell::new(ChaCha8Rng::seed_from_u64(seed));
    move || SpherePoint(random_unit_vector(&mut *rng.borrow_mut()))
}

#[test]
fn azcan_fenn_axioms() {
    let res = sampled_axiom_residuals(&AzcanFenn, unit_sampler(1), |a, b| a.distance(b), TRIPLES);
    assert!(res.iter().all(|&e| e < 1e-10), "{res:?}");
}

#[test]
fn augmented_axioms_on_grid() {
    for (k, r) in grid().enumerate() {
        let q = Augmented::new(r).unwrap();
        let mut unit = unit_sampler(100 + k as u64);
        let sample = move || TangentVector(unit().0 * r);
        let res = sampled_axiom_residuals(&q, sample, |a, b| a.distance(b), TRIPLES);
        assert!(res.iter().all(|&e| e < 1e-10), "r = {r}: {res:?}");
    }
}

#[test]
fn clark_saito_axioms_on_grid() {
    // ψ ∈ (0, π]; the last grid point is ψ = π exactly
    for (k, psi) in (1..=20).map(|k| PI * k as f64 / 20.0).enumerate() {
        let q = ClarkSaito::calibrated(psi).unwrap();
        let res = sampled_axiom_residuals(&q, unit_sampler(200 + k as u64), |a, b| a.distance(b), TRIPLES);
        assert!(res.iter().all(|&e| e < 1e-10), "ψ = {psi}: {res:?}");
    }
}

#[test]
fn azcan_fenn_is_involutory() {
    let mut sample = unit_sampler(3);
    for _ in 0..TRIPLES {
        let (x, y) = (sample(), sample());
        assert!(op_azcan_fenn(&op_azcan_fenn(&x, &y), &y).distance(&x) < 1e-12);
    }
}

#[test]
fn antipodal_pairs_are_trivial() {
    let mut sample = unit_sampler(4);
    for _ in 0..1000 {
        let p = sample();
        let minus = SpherePoint(-p.0);
        assert!(op_azcan_fenn(&p, &minus).distance(&p) < 1e-14);
        assert!(op_azcan_fenn(&minus, &p).distance(&minus) < 1e-14);
    }
}

#[test]
fn h_is_a_bijection() {
    let mut sample = unit_sampler(5);
    for _ in 0..TRIPLES {
        let x = sample();
        assert!(h_inverse(&h_map(&x)).unwrap().distance(&x) < 1e-14);
    }
}

#[test]
fn presentations_agree_on_grid() {
    for r in grid() {
        let res = clark_saito_consistency(r, Orientation::RightHanded, 1000, 6).unwrap();
        assert!(res < 1e-10, "r = {r}: {res}");
    }
}

#[test]
fn inner_maps_are_rotations_by_2r() {
    for r in grid() {
        let report = inner_rotation_check(r, 100, 7).unwrap();
        assert!(report.passed(), "{report:?}");
    }
}

#[test]
fn exp_is_faithful_on_spheres() {
    for r in grid() {
        let ratio = faithfulness_ratio(r, 500, 8).unwrap();
        assert!(ratio > 1e-9, "r = {r}: {ratio}");
    }
}

#[test]
fn operations_keep_radius() {
    let mut sample = unit_sampler(9);
    for r in grid() {
        let q = Augmented::new(r).unwrap();
        for _ in 0..200 {
            let x = TangentVector(sample().0 * r);
            let y = TangentVector(sample().0 * r);
            assert!((q.operate(&x, &y).radius() - r).abs() < 1e-14);
        }
    }
}
