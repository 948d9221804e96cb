//! Knot diagrams from PD codes, and the relations they induce on the knot
//! group and the knot quandle.
//!
//! A PD code lists each crossing as `[a, b, c, d]`: the four edge labels read
//! counterclockwise starting from the incoming under-strand, so `a` enters
//! under, `c` leaves under and `b`, `d` are the two halves of the over-strand.
//! Orientation is traced by walking the diagram, not inferred from label
//! arithmetic, so any labelling with each label used exactly twice works.
//!
//! Arcs are the over-strand classes: `b` and `d` of every crossing lie on the
//! same arc, and each arc ends at an under-crossing.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Crossing sign. Positive means the over-strand, turned counterclockwise by
/// less than π, points along the under-strand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value()
    }
}

impl TryFrom<i8> for Sign {
    type Error = Error;

    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Sign::Positive),
            -1 => Ok(Sign::Negative),
            _ => Err(Error::MalformedInput(format!("crossing sign must be ±1, got {v}"))),
        }
    }
}

/// The arcs meeting at one crossing. Group relation
/// `x_out = x_over^{−ε} x_in x_over^{ε}`; quandle relation
/// `x_out = x_in ▷ x_over` for `ε = +1`, `x_out = S⁻¹_{x_over}(x_in)` for `ε = −1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CrossingRelation {
    pub input: usize,
    pub over: usize,
    pub output: usize,
    pub sign: Sign,
}

/// A validated, oriented knot diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnotDiagram {
    crossings: Vec<[u32; 4]>,
    signs: Vec<Sign>,
    /// Per crossing, the arcs `(in, over, out)`.
    arcs: Vec<[usize; 3]>,
    n_arcs: usize,
}

impl KnotDiagram {
    /// The crossingless unknot: one arc, no crossings.
    pub fn unknot() -> Self {
        Self {
            crossings: Vec::new(),
            signs: Vec::new(),
            arcs: Vec::new(),
            n_arcs: 1,
        }
    }

    pub fn from_crossings(crossings: Vec<[u32; 4]>) -> Result<Self> {
        if crossings.is_empty() {
            return Err(Error::EmptyDiagram);
        }

        // every label occurs exactly twice
        let mut occurrences: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, crossing) in crossings.iter().enumerate() {
            for (pos, &label) in crossing.iter().enumerate() {
                occurrences.entry(label).or_default().push((ci, pos));
            }
        }
        if let Some((label, occ)) = occurrences.iter().find(|(_, occ)| occ.len() != 2) {
            return Err(Error::MalformedPd(format!(
                "edge label {label} appears {} times, expected 2",
                occ.len()
            )));
        }
        let other_end = |label: u32, here: (usize, usize)| -> (usize, usize) {
            let occ = &occurrences[&label];
            if occ[0] == here {
                occ[1]
            } else {
                occ[0]
            }
        };

        // Walk the knot from the outgoing under-edge of crossing 0. Entering a
        // crossing at position 0 continues through position 2; entering at 1
        // or 3 continues through 3 or 1 and fixes the over-strand direction.
        // Entering at position 2 contradicts the convention.
        let n = crossings.len();
        let mut over_entry: Vec<Option<usize>> = vec![None; n];
        let mut under_visits = vec![0usize; n];
        let mut visited = 0usize;
        let start = (0usize, 2usize);
        let mut exit = start;
        loop {
            let label = crossings[exit.0][exit.1];
            let (ci, pos) = other_end(label, exit);
            visited += 1;
            exit = match pos {
                0 => {
                    under_visits[ci] += 1;
                    (ci, 2)
                }
                1 | 3 => {
                    if over_entry[ci].is_some() {
                        return Err(Error::Orientation(format!(
                            "over-strand of crossing {ci} traversed twice"
                        )));
                    }
                    over_entry[ci] = Some(pos);
                    (ci, 4 - pos)
                }
                _ => {
                    return Err(Error::Orientation(format!(
                        "edge {label} enters crossing {ci} through its outgoing under-strand"
                    )))
                }
            };
            if exit == start {
                break;
            }
            if visited > 2 * n {
                return Err(Error::Orientation("walk does not close up".into()));
            }
        }
        if visited != 2 * n {
            return Err(Error::MalformedPd(format!(
                "diagram has more than one component ({visited} of {} edges on the first)",
                2 * n
            )));
        }
        debug_assert!(under_visits.iter().all(|&v| v == 1));

        // over-strand entering at d (position 3) runs d → b
        let signs: Vec<Sign> = over_entry
            .iter()
            .map(|e| match e.expect("every over-strand visited") {
                3 => Sign::Positive,
                _ => Sign::Negative,
            })
            .collect();

        // arcs: union b ~ d at every crossing
        let labels: Vec<u32> = occurrences.keys().copied().collect();
        let index_of = |label: u32| labels.binary_search(&label).expect("known label");
        let mut parent: Vec<usize> = (0..labels.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for crossing in &crossings {
            let a = find(&mut parent, index_of(crossing[1]));
            let b = find(&mut parent, index_of(crossing[3]));
            parent[a.max(b)] = a.min(b);
        }
        // arcs numbered in order of their smallest edge label
        let mut arc_of_root = BTreeMap::new();
        let mut arc_of_label = Vec::with_capacity(labels.len());
        for i in 0..labels.len() {
            let root = find(&mut parent, i);
            let next = arc_of_root.len();
            arc_of_label.push(*arc_of_root.entry(root).or_insert(next));
        }
        let n_arcs = arc_of_root.len();
        if n_arcs != n {
            return Err(Error::MalformedPd(format!(
                "{n_arcs} arcs for {n} crossings"
            )));
        }
        let arcs = crossings
            .iter()
            .map(|c| {
                [
                    arc_of_label[index_of(c[0])],
                    arc_of_label[index_of(c[1])],
                    arc_of_label[index_of(c[2])],
                ]
            })
            .collect();

        Ok(Self {
            crossings,
            signs,
            arcs,
            n_arcs,
        })
    }

    pub fn crossings(&self) -> &[[u32; 4]] {
        &self.crossings
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn n_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn n_arcs(&self) -> usize {
        self.n_arcs
    }

    /// `(in, over, out, sign)` per crossing, in crossing order.
    pub fn crossing_relations(&self) -> Vec<CrossingRelation> {
        self.arcs
            .iter()
            .zip(&self.signs)
            .map(|(&[input, over, output], &sign)| CrossingRelation {
                input,
                over,
                output,
                sign,
            })
            .collect()
    }

    /// PD text `[[a,b,c,d],...]`; the unknot serializes as `[]`.
    pub fn to_pd_string(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for KnotDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, [a, b, c, d]) in self.crossings.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[{a},{b},{c},{d}]")?;
        }
        write!(f, "]")
    }
}

/// JSON dump `{"crossings": [[int×4]], "signs": [±1]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub crossings: Vec<[u32; 4]>,
    pub signs: Vec<Sign>,
}

impl From<&KnotDiagram> for DiagramJson {
    fn from(d: &KnotDiagram) -> Self {
        Self {
            crossings: d.crossings.clone(),
            signs: d.signs.clone(),
        }
    }
}

impl TryFrom<DiagramJson> for KnotDiagram {
    type Error = Error;

    /// Re-derives the diagram; the stored signs must agree with the trace.
    fn try_from(json: DiagramJson) -> Result<Self> {
        let d = if json.crossings.is_empty() {
            KnotDiagram::unknot()
        } else {
            KnotDiagram::from_crossings(json.crossings)?
        };
        if d.signs != json.signs {
            return Err(Error::Orientation(
                "stored signs disagree with the traced orientation".into(),
            ));
        }
        Ok(d)
    }
}

/// Parses a PD code such as `[[1,4,2,5],[3,6,4,1],[5,2,6,3]]`.
pub fn parse_pd(text: &str) -> Result<KnotDiagram> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::EmptyDiagram);
    }
    let tuples: Vec<Vec<i64>> = serde_json::from_str(text)
        .map_err(|e| Error::MalformedPd(format!("expected a list of 4-tuples: {e}")))?;
    if tuples.is_empty() {
        return Err(Error::EmptyDiagram);
    }
    let crossings = tuples
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let labels: [i64; 4] = t.as_slice().try_into().map_err(|_| {
                Error::MalformedPd(format!("crossing {i} has {} entries, expected 4", t.len()))
            })?;
            let mut out = [0u32; 4];
            for (slot, label) in out.iter_mut().zip(labels) {
                *slot = u32::try_from(label)
                    .ok()
                    .filter(|&l| l > 0)
                    .ok_or_else(|| Error::MalformedPd(format!("label {label} is not a positive integer")))?;
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    KnotDiagram::from_crossings(crossings)
}

/// Names accepted by [`builtin`].
pub const BUILTIN_KNOTS: [&str; 6] = ["unknot", "trefoil", "figure8", "5_1", "5_2", "6_1"];

fn builtin_pd(name: &str) -> Option<&'static str> {
    Some(match name {
        "trefoil" | "3_1" => "[[1,4,2,5],[3,6,4,1],[5,2,6,3]]",
        "figure8" | "4_1" => "[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]",
        "5_1" => "[[1,6,2,7],[3,8,4,9],[5,10,6,1],[7,2,8,3],[9,4,10,5]]",
        "5_2" => "[[1,4,2,5],[3,8,4,9],[5,10,6,1],[9,6,10,7],[7,2,8,3]]",
        "6_1" => "[[1,4,2,5],[7,10,8,11],[3,9,4,8],[9,3,10,2],[5,12,6,1],[11,6,12,7]]",
        _ => return None,
    })
}

/// A knot from the embedded table (standard Rolfsen-table PD codes).
pub fn builtin(name: &str) -> Result<KnotDiagram> {
    if name == "unknot" || name == "0_1" {
        return Ok(KnotDiagram::unknot());
    }
    let pd = builtin_pd(name).ok_or_else(|| Error::UnknownKnot {
        name: name.to_owned(),
        available: BUILTIN_KNOTS.to_vec(),
    })?;
    parse_pd(pd)
}

/// Wirtinger presentation of the knot group: one generator per arc, one
/// relation per crossing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WirtingerPresentation {
    pub generators: usize,
    pub relations: Vec<CrossingRelation>,
    /// Generator taken as the meridian.
    pub meridian: usize,
}

impl WirtingerPresentation {
    /// True when the relations identify all generators in the
    /// abelianization, i.e. the in/out graph is connected.
    pub fn abelianization_is_cyclic(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.generators).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for rel in &self.relations {
            let a = find(&mut parent, rel.input);
            let b = find(&mut parent, rel.output);
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (0..self.generators).all(|g| find(&mut parent, g) == root)
    }

    /// Human-readable relators, e.g. `x2 = x1^-1 x0 x1`.
    pub fn relation_strings(&self) -> Vec<String> {
        self.relations
            .iter()
            .map(|r| {
                let (left, right) = match r.sign {
                    Sign::Positive => ("^-1", ""),
                    Sign::Negative => ("", "^-1"),
                };
                format!(
                    "x{} = x{}{left} x{} x{}{right}",
                    r.output, r.over, r.input, r.over
                )
            })
            .collect()
    }
}

pub fn wirtinger(d: &KnotDiagram) -> WirtingerPresentation {
    WirtingerPresentation {
        generators: d.n_arcs(),
        relations: d.crossing_relations(),
        meridian: 0,
    }
}

/// Crossing relations of the knot quandle, one triple per crossing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuandleRelationSet {
    pub arcs: usize,
    pub relations: Vec<CrossingRelation>,
}

pub fn quandle_relations(d: &KnotDiagram) -> QuandleRelationSet {
    QuandleRelationSet {
        arcs: d.n_arcs(),
        relations: d.crossing_relations(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TREFOIL: &str = "[[1,4,2,5],[3,6,4,1],[5,2,6,3]]";
    const FIGURE8: &str = "[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]";
    /// trefoil # trefoil, spliced by hand at edge 1 of each summand
    const GRANNY: &str = "[[1,4,2,5],[3,6,4,7],[5,2,6,3],[7,10,8,11],[9,12,10,1],[11,8,12,9]]";

    #[test]
    fn trefoil() {
        let d = parse_pd(TREFOIL).unwrap();
        assert_eq!(d.n_crossings(), 3);
        assert_eq!(d.n_arcs(), 3);
        // hand trace: over-strand classes {1,6}, {2,3}, {4,5} become arcs
        // 0, 1, 2 (numbered by smallest label)
        let rels = d.crossing_relations();
        let triples: Vec<[usize; 3]> = rels.iter().map(|r| [r.input, r.over, r.output]).collect();
        assert_eq!(triples, vec![[0, 2, 1], [1, 0, 2], [2, 1, 0]]);
        assert!(d.signs().iter().all(|&s| s == Sign::Negative));
    }

    #[test]
    fn figure_eight() {
        let d = parse_pd(FIGURE8).unwrap();
        assert_eq!(d.n_crossings(), 4);
        assert_eq!(d.n_arcs(), 4);
        assert_eq!(
            d.signs(),
            &[Sign::Positive, Sign::Positive, Sign::Negative, Sign::Negative]
        );
    }

    #[test]
    fn kinked_unknot() {
        let d = parse_pd("[[1,1,2,2]]").unwrap();
        assert_eq!(d.n_crossings(), 1);
        assert_eq!(d.n_arcs(), 1);
        let r = d.crossing_relations()[0];
        assert_eq!((r.input, r.over, r.output), (0, 0, 0));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_pd(""), Err(Error::EmptyDiagram));
        assert_eq!(parse_pd("[]"), Err(Error::EmptyDiagram));
        assert!(matches!(parse_pd("[[1,2,3]]"), Err(Error::MalformedPd(_))));
        assert!(matches!(parse_pd("[[1,4,2,5],[3,6,4,1]]"), Err(Error::MalformedPd(_))));
        assert!(matches!(parse_pd("[[0,1,1,0]]"), Err(Error::MalformedPd(_))));
        assert!(matches!(parse_pd("not a pd"), Err(Error::MalformedPd(_))));
        // under-strand reversed at the first crossing
        assert!(matches!(
            parse_pd("[[2,4,1,5],[3,6,4,1],[5,2,6,3]]"),
            Err(Error::Orientation(_))
        ));
        // two-component diagram (Hopf link)
        assert!(matches!(
            parse_pd("[[4,1,3,2],[2,3,1,4]]"),
            Err(Error::MalformedPd(_)) | Err(Error::Orientation(_))
        ));
    }

    #[test]
    fn builtins() {
        for name in BUILTIN_KNOTS {
            let d = builtin(name).unwrap();
            if name == "unknot" {
                assert_eq!(d.n_crossings(), 0);
                assert_eq!(d.n_arcs(), 1);
                continue;
            }
            let mut counts = BTreeMap::new();
            for c in d.crossings() {
                for l in c {
                    *counts.entry(*l).or_insert(0) += 1;
                }
            }
            assert!(counts.values().all(|&c| c == 2), "{name}");
            assert_eq!(d.n_arcs(), d.n_crossings(), "{name}");
            assert!(wirtinger(&d).abelianization_is_cyclic(), "{name}");
        }
        assert_eq!(builtin("trefoil").unwrap().n_crossings(), 3);
        assert!(matches!(builtin("7_99"), Err(Error::UnknownKnot { .. })));
    }

    #[test]
    fn presentations() {
        let t = wirtinger(&parse_pd(TREFOIL).unwrap());
        assert_eq!(t.generators, 3);
        assert_eq!(t.relations.len(), 3);
        assert_eq!(t.meridian, 0);
        for r in &t.relations {
            let mut arcs = [r.input, r.over, r.output];
            arcs.sort();
            assert_eq!(arcs, [0, 1, 2]);
        }
        assert_eq!(t.relation_strings()[0], "x1 = x2 x0 x2^-1");

        let u = wirtinger(&KnotDiagram::unknot());
        assert_eq!(u.generators, 1);
        assert!(u.relations.is_empty());
        assert!(u.abelianization_is_cyclic());

        let f = wirtinger(&parse_pd(FIGURE8).unwrap());
        assert_eq!((f.generators, f.relations.len()), (4, 4));
        assert!(f.relations.iter().any(|r| r.sign == Sign::Positive));
        assert!(f.relations.iter().any(|r| r.sign == Sign::Negative));
    }

    #[test]
    fn quandle_relation_sets() {
        let q = quandle_relations(&parse_pd(TREFOIL).unwrap());
        assert_eq!(q.relations.len(), 3);
        assert!(quandle_relations(&KnotDiagram::unknot()).relations.is_empty());

        let granny = parse_pd(GRANNY).unwrap();
        assert_eq!(granny.n_arcs(), 6);
        assert_eq!(quandle_relations(&granny).relations.len(), 6);
    }

    #[test]
    fn relabelled_codes_parse_identically() {
        // shift every label by 10: same arcs, same signs
        let shifted = "[[11,14,12,15],[13,16,14,11],[15,12,16,13]]";
        let a = parse_pd(TREFOIL).unwrap();
        let b = parse_pd(shifted).unwrap();
        assert_eq!(a.crossing_relations(), b.crossing_relations());
    }

    #[test]
    fn diagram_json() {
        let d = parse_pd(FIGURE8).unwrap();
        let json = serde_json::to_string(&DiagramJson::from(&d)).unwrap();
        assert_eq!(
            json,
            r#"{"crossings":[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]],"signs":[1,1,-1,-1]}"#
        );
        let back: DiagramJson = serde_json::from_str(&json).unwrap();
        assert_eq!(KnotDiagram::try_from(back).unwrap(), d);

        let tampered: DiagramJson = serde_json::from_str(
            r#"{"crossings":[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]],"signs":[1,1,1,-1]}"#,
        )
        .unwrap();
        assert!(KnotDiagram::try_from(tampered).is_err());
    }
}
