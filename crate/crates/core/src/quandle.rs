//! Quandles: the abstract interface and finite Cayley-table quandles.
//!
//! A quandle is a set with a binary operation `x ▷ y` such that
//!
//! - (Q1) `x ▷ x = x`,
//! - (Q2) every right translation `S_y: x ↦ x ▷ y` is a bijection,
//! - (Q3) `(x ▷ y) ▷ z = (x ▷ z) ▷ (y ▷ z)`.
//!
//! Finite quandles on `{0, …, n−1}` are stored as Cayley tables and checked
//! exhaustively. Continuous quandles (see [`crate::spherical`]) implement the
//! same [`Quandle`] trait and are checked by sampling with
//! [`sampled_axiom_residuals`].

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A binary operation `x ▷ y` together with the inverse right translation.
pub trait Quandle {
    type Element;

    /// `x ▷ y`.
    fn operate(&self, x: &Self::Element, y: &Self::Element) -> Self::Element;

    /// `S_y⁻¹(x)`, the unique `w` with `w ▷ y = x`.
    fn operate_inverse(&self, x: &Self::Element, y: &Self::Element) -> Self::Element;
}

/// Cayley-table quandle on `{0, …, n−1}`; `table[x][y] = x ▷ y`.
///
/// Construction only checks that the table is square with entries in range.
/// The quandle axioms are checked separately by [`check_axioms`], so that
/// broken tables can still be loaded and diagnosed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct FiniteQuandle {
    n: usize,
    table: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    n: usize,
    table: Vec<Vec<usize>>,
}

impl TryFrom<RawTable> for FiniteQuandle {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        if raw.table.len() != raw.n {
            return Err(Error::MalformedInput(format!(
                "table has {} rows but n = {}",
                raw.table.len(),
                raw.n
            )));
        }
        FiniteQuandle::from_table(raw.table)
    }
}

impl From<FiniteQuandle> for RawTable {
    fn from(q: FiniteQuandle) -> Self {
        RawTable {
            n: q.n,
            table: q.table,
        }
    }
}

impl FiniteQuandle {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidSize(0));
        }
        for (x, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MalformedInput(format!(
                    "row {x} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some((y, v)) = row.iter().enumerate().find(|(_, &v)| v >= n) {
                return Err(Error::MalformedInput(format!(
                    "table[{x}][{y}] = {v} is out of range 0..{n}"
                )));
            }
        }
        Ok(Self { n, table })
    }

    fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize(0));
        }
        let table = (0..n).map(|x| (0..n).map(|y| f(x, y)).collect()).collect();
        Ok(Self { n, table })
    }

    /// The dihedral quandle `R_n`: `x ▷ y = 2y − x mod n`.
    pub fn dihedral(n: usize) -> Result<Self> {
        Self::from_fn(n, |x, y| (2 * y + n - x) % n)
    }

    /// The trivial quandle: `x ▷ y = x`.
    pub fn trivial(n: usize) -> Result<Self> {
        Self::from_fn(n, |x, _| x)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    #[inline]
    pub fn op(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    /// The right translation `S_y` as a permutation vector, `S_y[x] = x ▷ y`.
    pub fn right_translation(&self, y: usize) -> Vec<usize> {
        (0..self.n).map(|x| self.table[x][y]).collect()
    }

    /// Inverse Cayley table, `inv[x][y] = S_y⁻¹(x)`. `None` if some `S_y`
    /// is not a bijection.
    pub fn inverse_table(&self) -> Option<Vec<Vec<usize>>> {
        let mut inv = vec![vec![usize::MAX; self.n]; self.n];
        for (x, row) in self.table.iter().enumerate() {
            for (y, &image) in row.iter().enumerate() {
                if inv[image][y] != usize::MAX {
                    return None;
                }
                inv[image][y] = x;
            }
        }
        Some(inv)
    }
}

impl Quandle for FiniteQuandle {
    type Element = usize;

    fn operate(&self, x: &usize, y: &usize) -> usize {
        self.table[*x][*y]
    }

    /// Panics if `S_y` is not a bijection.
    fn operate_inverse(&self, x: &usize, y: &usize) -> usize {
        (0..self.n)
            .find(|&w| self.table[w][*y] == *x)
            .expect("right translation is not surjective")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axiom {
    Q1,
    Q2,
    Q3,
}

/// One failed instance of an axiom.
///
/// Witness layout: Q1 `[x]`; Q2 `[x, x', y]` with `x ≠ x'` and
/// `x ▷ y = x' ▷ y`; Q3 `[x, y, z]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
}

/// Outcome of [`check_axioms`]. At most [`AxiomReport::MAX_WITNESSES`]
/// witnesses are kept per axiom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub q1_ok: bool,
    pub q2_ok: bool,
    pub q3_ok: bool,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub const MAX_WITNESSES: usize = 16;

    pub fn all_ok(&self) -> bool {
        self.q1_ok && self.q2_ok && self.q3_ok
    }
}

/// Exhaustive check of Q1–Q3, `O(n³)`.
pub fn check_axioms(q: &FiniteQuandle) -> AxiomReport {
    let n = q.n;
    let mut violations = Vec::new();
    let mut push = |axiom: Axiom, witness: Vec<usize>, count: &mut usize| {
        if *count < AxiomReport::MAX_WITNESSES {
            violations.push(Violation { axiom, witness });
        }
        *count += 1;
    };

    let mut q1 = 0;
    for x in 0..n {
        if q.op(x, x) != x {
            push(Axiom::Q1, vec![x], &mut q1);
        }
    }

    let mut q2 = 0;
    for y in 0..n {
        let mut preimage = vec![None; n];
        for x in 0..n {
            let image = q.op(x, y);
            match preimage[image] {
                Some(prev) => push(Axiom::Q2, vec![prev, x, y], &mut q2),
                None => preimage[image] = Some(x),
            }
        }
    }

    let mut q3 = 0;
    for x in 0..n {
        for y in 0..n {
            let xy = q.op(x, y);
            for z in 0..n {
                if q.op(xy, z) != q.op(q.op(x, z), q.op(y, z)) {
                    push(Axiom::Q3, vec![x, y, z], &mut q3);
                }
            }
        }
    }

    AxiomReport {
        q1_ok: q1 == 0,
        q2_ok: q2 == 0,
        q3_ok: q3 == 0,
        violations,
    }
}

/// `(x ▷ y) ▷ y = x` for all pairs.
pub fn is_involutory(q: &FiniteQuandle) -> bool {
    (0..q.n).all(|x| (0..q.n).all(|y| q.op(q.op(x, y), y) == x))
}

/// A map between finite quandles; the homomorphism property is checked by
/// [`check_hom`], not assumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteQuandleHom {
    pub source: FiniteQuandle,
    pub target: FiniteQuandle,
    pub map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomCheck {
    pub is_hom: bool,
    /// Pairs `(x, y)` with `f(x ▷ y) ≠ f(x) ▷ f(y)`.
    pub violations: Vec<(usize, usize)>,
}

pub fn check_hom(h: &FiniteQuandleHom) -> Result<HomCheck> {
    if h.map.len() != h.source.len() {
        return Err(Error::MalformedInput(format!(
            "map has length {}, source has {} elements",
            h.map.len(),
            h.source.len()
        )));
    }
    if let Some(&v) = h.map.iter().find(|&&v| v >= h.target.len()) {
        return Err(Error::MalformedInput(format!(
            "map value {v} is outside the target 0..{}",
            h.target.len()
        )));
    }
    let f = &h.map;
    let mut violations = Vec::new();
    for x in 0..h.source.len() {
        for y in 0..h.source.len() {
            if f[h.source.op(x, y)] != h.target.op(f[x], f[y]) {
                violations.push((x, y));
            }
        }
    }
    Ok(HomCheck {
        is_hom: violations.is_empty(),
        violations,
    })
}

/// The inner automorphism group `Inn X = ⟨S_y⟩`, as a closure of permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerGroup {
    pub order: usize,
    /// `S_0, …, S_{n−1}` in order (duplicates kept).
    pub generators: Vec<Vec<usize>>,
    /// Every element of the closure, identity first, in breadth-first order.
    pub elements: Vec<Vec<usize>>,
}

/// Breadth-first closure of `{S_y}` under composition.
///
/// The monoid generated by a finite set of permutations is a group, so no
/// inverses need to be added explicitly.
pub fn inner_automorphism_group(q: &FiniteQuandle) -> InnerGroup {
    let generators: Vec<Vec<usize>> = (0..q.n).map(|y| q.right_translation(y)).collect();
    let identity: Vec<usize> = (0..q.n).collect();

    let mut seen = HashSet::new();
    let mut elements = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(identity.clone());
    queue.push_back(identity);

    while let Some(p) = queue.pop_front() {
        for g in &generators {
            let composed: Vec<usize> = p.iter().map(|&x| g[x]).collect();
            if seen.insert(composed.clone()) {
                queue.push_back(composed);
            }
        }
        elements.push(p);
    }

    InnerGroup {
        order: elements.len(),
        generators,
        elements,
    }
}

/// True iff `a ▷ b = a` for all `a, b` in `colors`, i.e. the set is a trivial
/// subquandle. Trivial colorings are exactly those whose image passes this.
pub fn image_is_trivial_subquandle(colors: &[usize], q: &FiniteQuandle) -> Result<bool> {
    if let Some(&c) = colors.iter().find(|&&c| c >= q.len()) {
        return Err(Error::MalformedInput(format!(
            "element {c} is outside 0..{}",
            q.len()
        )));
    }
    Ok(colors
        .iter()
        .all(|&a| colors.iter().all(|&b| q.op(a, b) == a)))
}

/// Worst-case residuals of Q1, Q2 and Q3 over `triples` sampled triples of a
/// continuous quandle, measured with `distance`.
///
/// Q2 is measured as `max(d(S_y⁻¹ S_y x, x), d(S_y S_y⁻¹ x, x))`.
pub fn sampled_axiom_residuals<Q, S, D>(
    q: &Q,
    mut sample: S,
    distance: D,
    triples: usize,
) -> [f64; 3]
where
    Q: Quandle,
    S: FnMut() -> Q::Element,
    D: Fn(&Q::Element, &Q::Element) -> f64,
{
    let mut worst = [0.0f64; 3];
    for _ in 0..triples {
        let (x, y, z) = (sample(), sample(), sample());

        worst[0] = worst[0].max(distance(&q.operate(&x, &x), &x));

        let there_and_back = q.operate_inverse(&q.operate(&x, &y), &y);
        let back_and_there = q.operate(&q.operate_inverse(&x, &y), &y);
        worst[1] = worst[1]
            .max(distance(&there_and_back, &x))
            .max(distance(&back_and_there, &x));

        let lhs = q.operate(&q.operate(&x, &y), &z);
        let rhs = q.operate(&q.operate(&x, &z), &q.operate(&y, &z));
        worst[2] = worst[2].max(distance(&lhs, &rhs));
    }
    worst
}
