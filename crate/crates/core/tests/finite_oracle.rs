//! Backtracking enumeration against a naive `n^arcs` enumerator, and against
//! counts predicted by knot determinants and Alexander polynomials.

use sphandle::knot::{builtin, KnotDiagram, Sign, BUILTIN_KNOTS};
use sphandle::quandle::{check_axioms, check_hom, inner_automorphism_group, FiniteQuandle, FiniteQuandleHom};
use sphandle::solver::enumerate_finite;

/// `x ▷ y = t·x + (1 − t)·y` over `Z/n`.
fn alexander(n: usize, t: usize) -> FiniteQuandle {
    let table = (0..n)
        .map(|x| (0..n).map(|y| (t * x + (n + 1 - t % n) * y) % n).collect())
        .collect();
    FiniteQuandle::from_table(table).unwrap()
}

/// Conjugation quandle on the eight 3-cycles of A4 splits into two classes of
/// four; this is one of them, written out by hand.
fn tetrahedral() -> FiniteQuandle {
    FiniteQuandle::from_table(vec![
        vec![0, 2, 3, 1],
        vec![3, 1, 0, 2],
        vec![1, 3, 2, 0],
        vec![2, 0, 1, 3],
    ])
    .unwrap()
}

fn fixtures() -> Vec<(String, FiniteQuandle)> {
    let mut out = Vec::new();
    for n in 1..=5 {
        out.push((format!("dihedral{n}"), FiniteQuandle::dihedral(n).unwrap()));
        out.push((format!("trivial{n}"), FiniteQuandle::trivial(n).unwrap()));
    }
    out.push(("alexander5_2".into(), alexander(5, 2)));
    out.push(("alexander5_3".into(), alexander(5, 3)));
    out.push(("alexander3_2".into(), alexander(3, 2)));
    out.push(("tetrahedral".into(), tetrahedral()));
    out
}

fn naive_count(d: &KnotDiagram, q: &FiniteQuandle) -> usize {
    let arcs = d.n_arcs();
    let n = q.len();
    let relations = d.crossing_relations();
    let total = n.pow(arcs as u32);
    let mut count = 0;
    let mut a = vec![0usize; arcs];
    for code in 0..total {
        let mut c = code;
        for slot in a.iter_mut() {
            *slot = c % n;
            c /= n;
        }
        let ok = relations.iter().all(|rel| match rel.sign {
            Sign::Positive => q.op(a[rel.input], a[rel.over]) == a[rel.output],
            Sign::Negative => q.op(a[rel.output], a[rel.over]) == a[rel.input],
        });
        if ok {
            count += 1;
        }
    }
    count
}

#[test]
fn fixtures_are_quandles() {
    for (name, q) in fixtures() {
        assert!(check_axioms(&q).all_ok(), "{name}");
    }
}

#[test]
fn backtracking_matches_naive_enumeration() {
    for knot in BUILTIN_KNOTS {
        let d = builtin(knot).unwrap();
        for (name, q) in fixtures() {
            let fast = enumerate_finite(&d, &q).unwrap();
            assert_eq!(fast.len(), naive_count(&d, &q), "{knot} / {name}");
            let mut seen = fast.clone();
            seen.dedup();
            assert_eq!(seen.len(), fast.len(), "duplicates for {knot} / {name}");
        }
    }
}

#[test]
fn fox_counts_from_determinants() {
    // Fox p-colorings: p² when p divides the determinant (cyclic homology of
    // the double branched cover for these two-bridge knots), p otherwise.
    let cases = [
        ("trefoil", 3, 9),
        ("trefoil", 5, 5),
        ("figure8", 5, 25),
        ("figure8", 3, 3),
        ("5_1", 5, 25),
        ("5_1", 3, 3),
        ("5_2", 7, 49),
        ("5_2", 5, 5),
        ("6_1", 3, 9),
        ("6_1", 5, 5),
    ];
    for (knot, p, expected) in cases {
        let d = builtin(knot).unwrap();
        let q = FiniteQuandle::dihedral(p).unwrap();
        assert_eq!(enumerate_finite(&d, &q).unwrap().len(), expected, "{knot} mod {p}");
    }
}

#[test]
fn alexander_counts() {
    // 6_1 has Δ(t) = 2t² − 5t + 2 ≡ 2(t² + 1) mod 5, vanishing at t = 2, 3;
    // the other builtins have Δ(2), Δ(3) nonzero mod 5.
    for knot in BUILTIN_KNOTS {
        let d = builtin(knot).unwrap();
        for t in [2, 3] {
            let expected = if knot == "6_1" { 25 } else { 5 };
            let count = enumerate_finite(&d, &alexander(5, t)).unwrap().len();
            assert_eq!(count, expected, "{knot}, t = {t}");
        }
    }
}

#[test]
fn constant_colorings_are_always_present() {
    for knot in BUILTIN_KNOTS {
        let d = builtin(knot).unwrap();
        for (name, q) in fixtures() {
            let all = enumerate_finite(&d, &q).unwrap();
            for x in 0..q.len() {
                assert!(
                    all.iter().any(|c| c.assignment.iter().all(|&a| a == x)),
                    "{knot} / {name} misses constant {x}"
                );
            }
        }
    }
}

#[test]
fn right_translations_and_inner_maps_are_automorphisms() {
    let mut quandles = fixtures();
    for n in [6, 7, 12] {
        quandles.push((format!("dihedral{n}"), FiniteQuandle::dihedral(n).unwrap()));
    }
    for (name, q) in quandles {
        for map in inner_automorphism_group(&q).elements {
            let hom = FiniteQuandleHom {
                source: q.clone(),
                target: q.clone(),
                map,
            };
            assert!(check_hom(&hom).unwrap().is_hom, "{name}");
        }
    }
}
