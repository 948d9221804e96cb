//! The bijection between `S²(r)`-colorings of a knot and SU(2)
//! representations of its knot group with meridian trace `2cos r`.
//!
//! A coloring `X` goes to the representation sending the Wirtinger generator
//! of arc `a` to `exp X_a`; the inverse takes the logarithm on `S²(r)`, which
//! is unique because `exp` is injective there. Crossing relations are carried
//! over by `exp(X ▷ Y) = exp(Y)⁻¹ exp(X) exp(Y)`.
//!
//! [`audit`] turns the accompanying statements into checks: trivial colorings
//! correspond to abelian representations, and rotating a coloring conjugates
//! its representation by a lift of the rotation.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::knot::{CrossingRelation, Sign, WirtingerPresentation};
use crate::solver::{classify, coloring_residual, orbit_equivalence, ColoringClass, SphericalColoring};
use crate::su2::{commutator, conjugate, exp_tangent, log_unit_with_tolerance, random_unit_quaternion, UnitQuaternion};
use crate::{Error, Result};

/// Tolerance on generator traces for membership in `R(K, SU(2))`.
pub const TRACE_TOLERANCE: f64 = 1e-9;

/// Commutators this close to `±identity` count as trivial.
pub const COMMUTATOR_TOLERANCE: f64 = 1e-9;

/// Floor for the relation-error bound `10·√residual`, so that exactly
/// constructed colorings (residual 0) still tolerate rounding.
const RELATION_BOUND_FLOOR: f64 = 1e-12;

/// A representation `π_K → SU(2)` given by the images of the Wirtinger
/// generators.
#[derive(Debug, Clone, PartialEq)]
pub struct SU2Representation {
    pub images: Vec<UnitQuaternion>,
    pub presentation: WirtingerPresentation,
    /// Largest `|ρ(x_out) − ρ(x_over)^{−ε} ρ(x_in) ρ(x_over)^{ε}|`.
    pub max_relation_error: f64,
}

/// Evaluates one Wirtinger relation and returns `(lhs, rhs)`.
fn relation_sides(images: &[UnitQuaternion], rel: &CrossingRelation) -> (UnitQuaternion, UnitQuaternion) {
    let over = match rel.sign {
        Sign::Positive => images[rel.over],
        Sign::Negative => images[rel.over].inverse(),
    };
    (images[rel.output], conjugate(&images[rel.input], &over))
}

pub fn relation_errors(images: &[UnitQuaternion], relations: &[CrossingRelation]) -> Vec<f64> {
    relations
        .iter()
        .map(|rel| {
            let (lhs, rhs) = relation_sides(images, rel);
            lhs.distance(&rhs)
        })
        .collect()
}

impl SU2Representation {
    /// Wraps generator images, measuring the relation error.
    pub fn new(images: Vec<UnitQuaternion>, presentation: WirtingerPresentation) -> Result<Self> {
        if images.len() != presentation.generators {
            return Err(Error::MalformedInput(format!(
                "{} images for {} generators",
                images.len(),
                presentation.generators
            )));
        }
        let max_relation_error = relation_errors(&images, &presentation.relations)
            .into_iter()
            .fold(0.0, f64::max);
        Ok(Self {
            images,
            presentation,
            max_relation_error,
        })
    }

    pub fn meridian_image(&self) -> UnitQuaternion {
        self.images[self.presentation.meridian]
    }

    /// `max_g |tr ρ(g) − 2cos r|`.
    pub fn trace_error(&self, r: f64) -> f64 {
        let expected = 2.0 * r.cos();
        self.images
            .iter()
            .map(|g| (g.trace() - expected).abs())
            .fold(0.0, f64::max)
    }

    /// Largest generator-wise distance to `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> RepresentationJson {
        RepresentationJson {
            generators: self
                .images
                .iter()
                .enumerate()
                .map(|(arc, &q)| GeneratorImage { arc, q })
                .collect(),
            max_relation_error: self.max_relation_error,
        }
    }

    /// Rebuilds from JSON against a presentation; the relation error is
    /// recomputed rather than trusted.
    pub fn from_json(json: &RepresentationJson, presentation: WirtingerPresentation) -> Result<Self> {
        let mut images = vec![None; presentation.generators];
        for g in &json.generators {
            let slot = images.get_mut(g.arc).ok_or_else(|| {
                Error::MalformedInput(format!("generator {} out of range", g.arc))
            })?;
            *slot = Some(g.q);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(arc, q)| q.ok_or_else(|| Error::MalformedInput(format!("generator {arc} missing"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(images, presentation)
    }
}

/// Representation JSON: `{"generators":[{"arc":..,"q":{..}}],"max_relation_error":..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationJson {
    pub generators: Vec<GeneratorImage>,
    pub max_relation_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorImage {
    pub arc: usize,
    pub q: UnitQuaternion,
}

/// `ρ(x_a) = exp X_a` without any validation of the coloring.
pub fn build_representation(c: &SphericalColoring, p: &WirtingerPresentation) -> Result<SU2Representation> {
    SU2Representation::new(c.assignment.iter().map(exp_tangent).collect(), p.clone())
}

/// The forward map: coloring ↦ representation.
///
/// Fails if the generator traces are not `2cos r`, or if some Wirtinger
/// relation is off by more than `10·√residual` of the coloring (which would
/// mean the coloring and presentation disagree).
pub fn coloring_to_rep(c: &SphericalColoring, p: &WirtingerPresentation) -> Result<SU2Representation> {
    let rho = build_representation(c, p)?;
    let expected = 2.0 * c.radius.cos();
    if let Some(g) = rho
        .images
        .iter()
        .find(|g| (g.trace() - expected).abs() > TRACE_TOLERANCE)
    {
        return Err(Error::TraceMismatch {
            trace: g.trace(),
            expected,
        });
    }
    let residual = coloring_residual(&p.relations, c);
    let bound = (10.0 * residual.sqrt()).max(RELATION_BOUND_FLOOR);
    if rho.max_relation_error > bound {
        return Err(Error::CorrespondenceViolation {
            error: rho.max_relation_error,
            bound,
        });
    }
    Ok(rho)
}

/// The inverse map: representation ↦ coloring, `X_a = log ρ(x_a)` on `S²(r)`.
///
/// Every generator (not only the meridian) must have trace `2cos r`.
pub fn rep_to_coloring(rho: &SU2Representation, r: f64) -> Result<SphericalColoring> {
    if !(r > 0.0 && r < PI) {
        return Err(Error::OutOfDomain {
            what: "r",
            value: r,
            domain: "(0, π)",
        });
    }
    let expected = 2.0 * r.cos();
    let assignment = rho
        .images
        .iter()
        .enumerate()
        .map(|(generator, g)| {
            if g.vector_part().norm() < 1e-12 {
                return Err(Error::DegenerateLogarithm);
            }
            if (g.trace() - expected).abs() > TRACE_TOLERANCE {
                return Err(Error::NotInRepresentationSpace {
                    generator,
                    trace: g.trace(),
                    expected,
                });
            }
            log_unit_with_tolerance(g, r, TRACE_TOLERANCE)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut c = SphericalColoring {
        radius: r,
        assignment,
        residual: 0.0,
    };
    c.residual = coloring_residual(&rho.presentation.relations, &c);
    Ok(c)
}

/// True iff all pairwise commutators of generator images are `±identity`
/// within [`COMMUTATOR_TOLERANCE`].
pub fn is_abelian(rho: &SU2Representation) -> bool {
    let images = &rho.images;
    (0..images.len()).all(|a| {
        (a + 1..images.len()).all(|b| {
            commutator(&images[a], &images[b]).distance_up_to_sign(&UnitQuaternion::IDENTITY)
                <= COMMUTATOR_TOLERANCE
        })
    })
}

/// Lifts `R ∈ SO(3)` to the `q ∈ SU(2)` with `X·q = q⁻¹ X q = R X`. The
/// other lift is `−q`.
pub fn lift_rotation(rotation: &Matrix3<f64>) -> UnitQuaternion {
    UnitQuaternion::from_rotation_matrix(rotation).inverse()
}

/// Largest `|q⁻¹ ρ(x) q − σ(x)|` over generators.
pub fn conjugation_error(rho: &SU2Representation, sigma: &SU2Representation, q: &UnitQuaternion) -> f64 {
    rho.images
        .iter()
        .zip(&sigma.images)
        .map(|(a, b)| conjugate(a, q).distance(b))
        .fold(0.0, f64::max)
}

/// An element `q` with `q⁻¹ ρ(x) q = σ(x)` for every generator, if one
/// exists within `tol`. Found by aligning the two colorings with Procrustes
/// and lifting the rotation; both lifts `±q` are tried.
pub fn conjugating_element(
    rho: &SU2Representation,
    sigma: &SU2Representation,
    r: f64,
    tol: f64,
) -> Result<Option<UnitQuaternion>> {
    let a = rep_to_coloring(rho, r)?;
    let b = rep_to_coloring(sigma, r)?;
    let Some(rotation) = orbit_equivalence(&a, &b, tol.max(1e-12)) else {
        return Ok(None);
    };
    let q = lift_rotation(&rotation);
    Ok([q, -q]
        .into_iter()
        .find(|g| conjugation_error(rho, sigma, g) <= tol))
}

/// One named check in an [`AuditReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Clause {
    fn measured(residual: f64, tolerance: f64) -> Self {
        Self {
            passed: residual <= tolerance,
            residual,
            tolerance,
            detail: None,
        }
    }

    fn failed(detail: String, tolerance: f64) -> Self {
        Self {
            passed: false,
            residual: f64::INFINITY,
            tolerance,
            detail: Some(detail),
        }
    }
}

/// Audit of one coloring against its image under the correspondence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    /// `|tr ρ(x) − 2cos r|` on every generator.
    pub trace: Clause,
    /// Wirtinger relation errors of `ρ`.
    pub relations: Clause,
    /// Both round trips through the bijection.
    pub round_trip: Clause,
    /// TRIVIAL coloring ⟺ abelian representation.
    pub triviality: Clause,
    pub class: ColoringClass,
    pub abelian: bool,
    /// Rotated coloring ↦ representation conjugate by the lifted rotation.
    pub conjugacy: Clause,
    /// Which lift (`+1` or `−1`) realized the conjugation.
    pub lift_sign: Option<i8>,
}

/// Audit tolerances.
pub const AUDIT_TRACE_TOLERANCE: f64 = 1e-10;
pub const AUDIT_RELATION_TOLERANCE: f64 = 1e-9;
pub const AUDIT_ROUND_TRIP_TOLERANCE: f64 = 1e-10;
pub const AUDIT_CONJUGACY_TOLERANCE: f64 = 1e-9;

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failed_clauses().is_empty()
    }

    pub fn failed_clauses(&self) -> Vec<String> {
        [
            ("trace", &self.trace),
            ("relations", &self.relations),
            ("round_trip", &self.round_trip),
            ("triviality", &self.triviality),
            ("conjugacy", &self.conjugacy),
        ]
        .into_iter()
        .filter(|(_, c)| !c.passed)
        .map(|(name, _)| name.to_owned())
        .collect()
    }
}

fn round_trip_clause(c: &SphericalColoring, p: &WirtingerPresentation, rho: &SU2Representation) -> Clause {
    let back = match rep_to_coloring(rho, c.radius) {
        Ok(back) => back,
        Err(e) => return Clause::failed(format!("representation → coloring: {e}"), AUDIT_ROUND_TRIP_TOLERANCE),
    };
    let coloring_error = c
        .assignment
        .iter()
        .zip(&back.assignment)
        .map(|(a, b)| a.distance(b))
        .fold(0.0, f64::max);
    let again = match build_representation(&back, p) {
        Ok(again) => again,
        Err(e) => return Clause::failed(e.to_string(), AUDIT_ROUND_TRIP_TOLERANCE),
    };
    Clause::measured(coloring_error.max(again.distance(rho)), AUDIT_ROUND_TRIP_TOLERANCE)
}

/// Runs every clause on `c`, using `rotation` for the conjugacy clause. Never
/// fails early: broken inputs produce failed clauses.
pub fn audit(c: &SphericalColoring, p: &WirtingerPresentation, rotation: &Matrix3<f64>) -> Result<AuditReport> {
    let rho = build_representation(c, p)?;
    let trace = Clause::measured(rho.trace_error(c.radius), AUDIT_TRACE_TOLERANCE);
    let relations = Clause::measured(rho.max_relation_error, AUDIT_RELATION_TOLERANCE);
    let round_trip = round_trip_clause(c, p, &rho);

    let class = classify(c);
    let abelian = is_abelian(&rho);
    let triviality = Clause {
        passed: (class == ColoringClass::Trivial) == abelian,
        residual: 0.0,
        tolerance: 0.0,
        detail: Some(format!("{class:?} coloring, abelian = {abelian}")),
    };

    let rotated = build_representation(&c.rotated(rotation), p)?;
    let q = lift_rotation(rotation);
    let (lift_sign, error) = [(1i8, q), (-1i8, -q)]
        .into_iter()
        .map(|(s, g)| (s, conjugation_error(&rho, &rotated, &g)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("two lifts");
    let conjugacy = Clause::measured(error, AUDIT_CONJUGACY_TOLERANCE);

    Ok(AuditReport {
        trace,
        relations,
        round_trip,
        triviality,
        class,
        abelian,
        lift_sign: conjugacy.passed.then_some(lift_sign),
        conjugacy,
    })
}

/// [`audit`] with a random rotation; errors with the failing clauses named.
pub fn equivalence_audit<R: Rng + ?Sized>(
    c: &SphericalColoring,
    p: &WirtingerPresentation,
    rng: &mut R,
) -> Result<AuditReport> {
    let rotation = random_unit_quaternion(rng).rotation_matrix();
    let report = audit(c, p, &rotation)?;
    if report.passed() {
        Ok(report)
    } else {
        Err(Error::AuditFailure {
            clauses: report.failed_clauses(),
        })
    }
}
