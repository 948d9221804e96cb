//! Colorings of knot diagrams: `Hom(Q_K, X)` computed from crossing relations.
//!
//! For a finite quandle the colorings are enumerated exactly by backtracking
//! with constraint propagation. For `S²(r)` they are found numerically: the
//! crossing equations are solved by damped Gauss–Newton on a product of
//! spheres from many random starts, then reduced modulo rotations.
//!
//! The numerical search is not a completeness proof. It returns the orbits it
//! found, plus the constant coloring which is always a solution.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::knot::{CrossingRelation, KnotDiagram, Sign};
use crate::quandle::FiniteQuandle;
use crate::spherical::{rotate_about, rotation_matrix_about};
use crate::su2::{adjoint, exp_tangent, random_unit_vector, TangentVector};
use crate::{Error, Result};

/// Colors closer than this (unit sphere), up to sign, count as equal for
/// [`classify`].
pub const TRIVIAL_EPS: f64 = 1e-6;

/// Below this distance from the `z`-axis a gauge-fixed color is treated as
/// collinear with the first color.
const COLLINEAR_EPS: f64 = 1e-6;

/// An assignment of quandle elements to the arcs of a diagram.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteColoring {
    pub assignment: Vec<usize>,
}

/// Whether `assignment` satisfies every crossing relation of `relations` in `q`.
pub fn satisfies_finite(relations: &[CrossingRelation], q: &FiniteQuandle, assignment: &[usize]) -> bool {
    relations.iter().all(|rel| {
        let (i, o, u) = (assignment[rel.input], assignment[rel.over], assignment[rel.output]);
        match rel.sign {
            Sign::Positive => q.op(i, o) == u,
            Sign::Negative => q.op(u, o) == i,
        }
    })
}

/// All `q`-colorings of `d`, in lexicographic order.
///
/// Fails if some right translation of `q` is not a bijection, since negative
/// crossings need `S_y⁻¹`.
pub fn enumerate_finite(d: &KnotDiagram, q: &FiniteQuandle) -> Result<Vec<FiniteColoring>> {
    let inverse = q
        .inverse_table()
        .ok_or_else(|| Error::MalformedInput("table violates Q2; S_y⁻¹ undefined".into()))?;
    let relations = d.crossing_relations();
    let mut search = Backtrack {
        q,
        inverse: &inverse,
        relations: &relations,
        out: Vec::new(),
    };
    search.extend(vec![None; d.n_arcs()]);
    let mut out = search.out;
    out.sort();
    Ok(out)
}

struct Backtrack<'a> {
    q: &'a FiniteQuandle,
    inverse: &'a [Vec<usize>],
    relations: &'a [CrossingRelation],
    out: Vec<FiniteColoring>,
}

impl Backtrack<'_> {
    /// Fills forced values until a fixed point. `false` on a contradiction.
    fn propagate(&self, assignment: &mut [Option<usize>]) -> bool {
        loop {
            let mut changed = false;
            for rel in self.relations {
                let Some(over) = assignment[rel.over] else {
                    continue;
                };
                // forward: the arc leaving under; backward: the arc entering
                let (forward, backward): (&[Vec<usize>], &[Vec<usize>]) = match rel.sign {
                    Sign::Positive => (self.q.table(), self.inverse),
                    Sign::Negative => (self.inverse, self.q.table()),
                };
                match (assignment[rel.input], assignment[rel.output]) {
                    (Some(i), Some(u)) => {
                        if forward[i][over] != u {
                            return false;
                        }
                    }
                    (Some(i), None) => {
                        assignment[rel.output] = Some(forward[i][over]);
                        changed = true;
                    }
                    (None, Some(u)) => {
                        assignment[rel.input] = Some(backward[u][over]);
                        changed = true;
                    }
                    (None, None) => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn extend(&mut self, mut assignment: Vec<Option<usize>>) {
        if !self.propagate(&mut assignment) {
            return;
        }
        match assignment.iter().position(Option::is_none) {
            None => self.out.push(FiniteColoring {
                assignment: assignment.into_iter().map(Option::unwrap).collect(),
            }),
            Some(arc) => {
                for value in 0..self.q.len() {
                    let mut next = assignment.clone();
                    next[arc] = Some(value);
                    self.extend(next);
                }
            }
        }
    }
}

/// Knobs for [`solve_spherical`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub starts: usize,
    pub max_iters: usize,
    /// Stop iterating once the max crossing error drops below this.
    pub tol_residual: f64,
    /// Keep a local solution only if its re-evaluated residual is below this.
    pub tol_accept: f64,
    pub seed: u64,
    /// Colorings within this distance after gauge fixing are merged.
    pub dedupe_eps: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            max_iters: 500,
            tol_residual: 1e-12,
            tol_accept: 1e-9,
            seed: 0,
            dedupe_eps: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::Config("starts must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        for (name, v) in [
            ("tol_residual", self.tol_residual),
            ("tol_accept", self.tol_accept),
            ("dedupe_eps", self.dedupe_eps),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// An `S²(r)`-coloring: one radius-`r` tangent vector per arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalColoring {
    pub radius: f64,
    pub assignment: Vec<TangentVector>,
    /// Max crossing error `|X_in ▷^{±1} X_over − X_out| / r`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ColoringClass {
    Trivial,
    Nontrivial,
}

impl SphericalColoring {
    /// Builds a coloring from unit directions and computes its residual.
    pub fn from_directions(relations: &[CrossingRelation], directions: &[Vector3<f64>], radius: f64) -> Self {
        let assignment = directions
            .iter()
            .map(|u| TangentVector::on_sphere(u, radius))
            .collect();
        let mut c = Self {
            radius,
            assignment,
            residual: 0.0,
        };
        c.residual = coloring_residual(relations, &c);
        c
    }

    pub fn constant(arcs: usize, color: TangentVector) -> Self {
        Self {
            radius: color.radius(),
            assignment: vec![color; arcs],
            residual: 0.0,
        }
    }

    pub fn directions(&self) -> Vec<Vector3<f64>> {
        self.assignment.iter().map(|x| x.0 / self.radius).collect()
    }

    /// `max_a | |X_a| − r |`.
    pub fn radius_error(&self) -> f64 {
        self.assignment
            .iter()
            .map(|x| (x.radius() - self.radius).abs())
            .fold(0.0, f64::max)
    }

    /// Applies `X ↦ R X` to every color (the SO(3) action).
    pub fn rotated(&self, rotation: &Matrix3<f64>) -> Self {
        Self {
            radius: self.radius,
            assignment: self
                .assignment
                .iter()
                .map(|x| TangentVector(rotation * x.0))
                .collect(),
            residual: self.residual,
        }
    }

    /// Largest pointwise distance between unit directions.
    pub fn distance(&self, other: &Self) -> f64 {
        self.directions()
            .iter()
            .zip(other.directions())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Max crossing error of `c` against `relations`, evaluated with the exact
/// adjoint formula on the stored vectors (radii are not assumed).
pub fn coloring_residual(relations: &[CrossingRelation], c: &SphericalColoring) -> f64 {
    relations
        .iter()
        .map(|rel| {
            let (x_in, x_over, x_out) = (
                &c.assignment[rel.input],
                &c.assignment[rel.over],
                &c.assignment[rel.output],
            );
            let g = match rel.sign {
                Sign::Positive => exp_tangent(x_over),
                Sign::Negative => exp_tangent(x_over).inverse(),
            };
            adjoint(x_in, &g).distance(x_out) / c.radius
        })
        .fold(0.0, f64::max)
}

/// Rotation angle applied to `x_in` about `x_over` at a crossing.
fn crossing_angle(sign: Sign, r: f64) -> f64 {
    match sign {
        Sign::Positive => -2.0 * r,
        Sign::Negative => 2.0 * r,
    }
}

/// Stacked crossing residuals `rot(p_in; p_over, ∓2r) − p_out` on unit
/// directions, three rows per crossing.
pub fn residual_vector(relations: &[CrossingRelation], points: &[Vector3<f64>], r: f64) -> DVector<f64> {
    let mut f = DVector::zeros(3 * relations.len());
    for (k, rel) in relations.iter().enumerate() {
        let predicted = rotate_about(&points[rel.input], &points[rel.over], crossing_angle(rel.sign, r));
        f.fixed_rows_mut::<3>(3 * k)
            .copy_from(&(predicted - points[rel.output]));
    }
    f
}

/// Ambient Jacobian of [`residual_vector`] with respect to all coordinates of
/// all points (`3m × 3n`). The rotation formula is differentiated as a
/// polynomial in the axis, so this is exact off the sphere too.
pub fn residual_jacobian(relations: &[CrossingRelation], points: &[Vector3<f64>], r: f64) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(3 * relations.len(), 3 * points.len());
    for (k, rel) in relations.iter().enumerate() {
        let theta = crossing_angle(rel.sign, r);
        let (s, c) = theta.sin_cos();
        let p = points[rel.input];
        let n = points[rel.over];
        let d_in = rotation_matrix_about(&n, theta);
        let d_over = -p.cross_matrix() * s + (n * p.transpose() + Matrix3::identity() * n.dot(&p)) * (1.0 - c);

        let row = 3 * k;
        let mut add = |col_point: usize, block: &Matrix3<f64>| {
            let mut view = j.fixed_view_mut::<3, 3>(row, 3 * col_point);
            view += block;
        };
        add(rel.input, &d_in);
        add(rel.over, &d_over);
        add(rel.output, &-Matrix3::identity());
    }
    j
}

/// Orthonormal basis of the tangent plane at unit `p`.
fn tangent_basis(p: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let least = p.iamin();
    let e = Vector3::ith(least, 1.0);
    let t1 = p.cross(&e).normalize();
    let t2 = p.cross(&t1);
    (t1, t2)
}

fn max_block_norm(f: &DVector<f64>) -> f64 {
    (0..f.len() / 3)
        .map(|k| f.fixed_rows::<3>(3 * k).norm())
        .fold(0.0, f64::max)
}

/// Levenberg–Marquardt on the product of unit spheres, with tangent-plane
/// steps followed by renormalization. Returns the final points.
fn local_solve(relations: &[CrossingRelation], mut points: Vec<Vector3<f64>>, r: f64, cfg: &SolverConfig) -> Vec<Vector3<f64>> {
    let n = points.len();
    let mut f = residual_vector(relations, &points, r);
    let mut cost = f.norm_squared();
    let mut lambda = 1e-3;

    for _ in 0..cfg.max_iters {
        if max_block_norm(&f) < cfg.tol_residual {
            break;
        }
        let ambient = residual_jacobian(relations, &points, r);
        let bases: Vec<_> = points.iter().map(tangent_basis).collect();
        let mut basis = DMatrix::zeros(3 * n, 2 * n);
        for (a, (t1, t2)) in bases.iter().enumerate() {
            basis.fixed_view_mut::<3, 1>(3 * a, 2 * a).copy_from(t1);
            basis.fixed_view_mut::<3, 1>(3 * a, 2 * a + 1).copy_from(t2);
        }
        let jt = ambient * basis;
        let normal = jt.transpose() * &jt;
        let gradient = jt.transpose() * &f;

        let mut improved = false;
        while lambda < 1e12 {
            let damped = &normal + DMatrix::identity(2 * n, 2 * n) * lambda;
            let Some(step) = damped.cholesky().map(|ch| ch.solve(&(-&gradient))) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<Vector3<f64>> = points
                .iter()
                .zip(&bases)
                .enumerate()
                .map(|(a, (p, (t1, t2)))| (p + t1 * step[2 * a] + t2 * step[2 * a + 1]).normalize())
                .collect();
            let trial_f = residual_vector(relations, &trial, r);
            let trial_cost = trial_f.norm_squared();
            if trial_cost < cost {
                points = trial;
                f = trial_f;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    points
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

/// Numerically computes `Hom(Q_K, S²(r))` modulo rotations.
///
/// Returns gauge-fixed, deduplicated representatives sorted canonically: the
/// constant coloring first, then every accepted local solution. The result is
/// independent of thread count for a fixed config.
pub fn solve_spherical(d: &KnotDiagram, r: f64, cfg: &SolverConfig) -> Result<Vec<SphericalColoring>> {
    check_radius(r)?;
    cfg.validate()?;
    let relations = d.crossing_relations();
    let arcs = d.n_arcs();

    let constant = SphericalColoring::constant(arcs, TangentVector(Vector3::z() * r));
    let mut candidates = vec![constant];

    if !relations.is_empty() {
        let found: Vec<Option<SphericalColoring>> = (0..cfg.starts)
            .into_par_iter()
            .map(|start| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(start as u64);
                let initial: Vec<_> = (0..arcs).map(|_| random_unit_vector(&mut rng)).collect();
                let points = local_solve(&relations, initial, r, cfg);
                let c = gauge_fix(&SphericalColoring::from_directions(&relations, &points, r));
                (c.residual < cfg.tol_accept).then_some(c)
            })
            .collect();
        candidates.extend(found.into_iter().flatten());
    }

    let orbits = orbit_reduce(&candidates, cfg.dedupe_eps)?;
    let mut reps: Vec<SphericalColoring> = orbits.into_iter().map(|o| o.representative).collect();
    let (first, rest) = reps.split_at_mut(1);
    debug_assert_eq!(classify(&first[0]), ColoringClass::Trivial);
    rest.sort_by(canonical_order);
    Ok(reps)
}

fn canonical_order(a: &SphericalColoring, b: &SphericalColoring) -> Ordering {
    let key = |c: &SphericalColoring| -> Vec<f64> {
        c.directions()
            .iter()
            .flat_map(|v| [v.x, v.y, v.z])
            .collect()
    };
    for (x, y) in key(a).iter().zip(key(b)) {
        match x.total_cmp(&y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// TRIVIAL iff the image lies in an antipodal pair `{p, −p}`, the trivial
/// subquandles of `S²(r)`.
pub fn classify(c: &SphericalColoring) -> ColoringClass {
    let dirs = c.directions();
    let Some(first) = dirs.first() else {
        return ColoringClass::Trivial;
    };
    let collinear = dirs
        .iter()
        .all(|p| (p - first).norm() < TRIVIAL_EPS || (p + first).norm() < TRIVIAL_EPS);
    if collinear {
        ColoringClass::Trivial
    } else {
        ColoringClass::Nontrivial
    }
}

/// Rotation sending unit `p` to the north pole `e_z` by the shortest path.
fn rotation_to_north(p: &Vector3<f64>) -> Matrix3<f64> {
    let north = Vector3::z();
    let axis = p.cross(&north);
    let s = axis.norm();
    let c = p.dot(&north);
    if s < 1e-15 {
        return if c > 0.0 {
            Matrix3::identity()
        } else {
            rotation_matrix_about(&Vector3::x(), PI)
        };
    }
    rotation_matrix_about(&(axis / s), s.atan2(c))
}

/// The rotation applied by [`gauge_fix`]: first color to the north pole, then
/// the first color off the polar axis into the half-plane `y = 0, x > 0`.
pub fn gauge_rotation(c: &SphericalColoring) -> Matrix3<f64> {
    let dirs = c.directions();
    let Some(first) = dirs.first() else {
        return Matrix3::identity();
    };
    let tilt = rotation_to_north(first);
    let spin = dirs
        .iter()
        .map(|p| tilt * p)
        .find(|p| p.x.hypot(p.y) > COLLINEAR_EPS)
        .map(|p| rotation_matrix_about(&Vector3::z(), -p.y.atan2(p.x)))
        .unwrap_or_else(Matrix3::identity);
    spin * tilt
}

/// Canonical representative of the SO(3)-orbit of `c`.
pub fn gauge_fix(c: &SphericalColoring) -> SphericalColoring {
    let rotation = gauge_rotation(c);
    let dirs: Vec<_> = c.directions().iter().map(|p| (rotation * p).normalize()).collect();
    SphericalColoring {
        radius: c.radius,
        assignment: dirs.iter().map(|u| TangentVector(u * c.radius)).collect(),
        residual: c.residual,
    }
}

/// Orthogonal Procrustes: the rotation `R ∈ SO(3)` minimizing
/// `Σ |R a_i − b_i|²`.
pub fn procrustes(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> Matrix3<f64> {
    let mut h = Matrix3::zeros();
    for (p, q) in a.iter().zip(b) {
        h += p * q.transpose();
    }
    let svd = SVD::new(h, true, true);
    let u = svd.u.expect("U requested");
    let v = svd.v_t.expect("Vᵀ requested").transpose();
    let d = (v * u.transpose()).determinant().signum();
    v * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * u.transpose()
}

/// If `a` and `b` lie in the same SO(3)-orbit within `eps` (pointwise, on
/// unit directions), the rotation taking `a` to `b`.
pub fn orbit_equivalence(a: &SphericalColoring, b: &SphericalColoring, eps: f64) -> Option<Matrix3<f64>> {
    if a.assignment.len() != b.assignment.len() {
        return None;
    }
    let (da, db) = (a.directions(), b.directions());
    let rotation = procrustes(&da, &db);
    let worst = da
        .iter()
        .zip(&db)
        .map(|(p, q)| (rotation * p - q).norm())
        .fold(0.0, f64::max);
    (worst < eps).then_some(rotation)
}

/// One SO(3)-orbit among a list of colorings.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    /// Gauge-fixed first member.
    pub representative: SphericalColoring,
    /// Number of input colorings in this orbit.
    pub size: usize,
}

/// Groups colorings into SO(3)-orbits. Representatives keep input order.
pub fn orbit_reduce(cs: &[SphericalColoring], eps: f64) -> Result<Vec<Orbit>> {
    let Some(first) = cs.first() else {
        return Ok(Vec::new());
    };
    if let Some(other) = cs.iter().find(|c| (c.radius - first.radius).abs() > 1e-12) {
        return Err(Error::MixedRadius {
            expected: first.radius,
            found: other.radius,
        });
    }
    let mut orbits: Vec<Orbit> = Vec::new();
    for c in cs {
        let fixed = gauge_fix(c);
        match orbits
            .iter_mut()
            .find(|o| orbit_equivalence(&fixed, &o.representative, eps).is_some())
        {
            Some(orbit) => orbit.size += 1,
            None => orbits.push(Orbit {
                representative: fixed,
                size: 1,
            }),
        }
    }
    Ok(orbits)
}
