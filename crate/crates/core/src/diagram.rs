//! Knot diagrams as PD codes.
//!
//! A crossing is `X[a, b, c, d]`: `a` is the incoming under-edge and the
//! remaining slots follow counterclockwise, so `c` is the outgoing under-edge.
//! Edge labels run `1..=2c` in traversal order, hence `c = a + 1 (mod 2c)`.
//! On a positive crossing the over-strand runs from `d` to `b`; on a negative
//! one from `b` to `d`.

use std::collections::BTreeSet;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub slots: [u32; 4],
    pub sign: Sign,
}

impl Crossing {
    pub fn over_in_slot(&self) -> usize {
        match self.sign {
            Sign::Positive => 3,
            Sign::Negative => 1,
        }
    }

    pub fn over_out_slot(&self) -> usize {
        4 - self.over_in_slot()
    }

    pub fn under_in(&self) -> u32 {
        self.slots[0]
    }

    pub fn under_out(&self) -> u32 {
        self.slots[2]
    }

    pub fn over_in(&self) -> u32 {
        self.slots[self.over_in_slot()]
    }

    pub fn over_out(&self) -> u32 {
        self.slots[self.over_out_slot()]
    }

    fn is_incoming_slot(&self, slot: usize) -> bool {
        slot == 0 || slot == self.over_in_slot()
    }

    fn partner_slot(&self, slot: usize) -> usize {
        (slot + 2) % 4
    }

    /// The same crossing with over and under exchanged.
    pub fn switched(&self) -> Crossing {
        let [a, b, c, d] = self.slots;
        match self.sign {
            Sign::Positive => Crossing { slots: [d, a, b, c], sign: Sign::Negative },
            Sign::Negative => Crossing { slots: [b, c, d, a], sign: Sign::Positive },
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("crossing {crossing}: edge label {label} outside 1..={max}")]
    LabelOutOfRange { crossing: usize, label: u32, max: u32 },
    #[error("edge label {label} appears {count} times (expected 2)")]
    LabelCount { label: u32, count: usize },
    #[error("crossing {crossing}: under-strand labels are not consecutive")]
    UnderStrandNotConsecutive { crossing: usize },
    #[error("crossing {crossing}: over-strand labels are not consecutive")]
    OverStrandNotConsecutive { crossing: usize },
    #[error("crossing {crossing}: sign does not match slot orientation")]
    SignMismatch { crossing: usize },
    #[error("traversal from edge 1 visits {visited} of {total} edges; diagram is not a single component")]
    MultipleComponents { visited: usize, total: usize },
    #[error("diagram has {faces} faces, a planar knot diagram needs {expected}")]
    NonPlanar { faces: usize, expected: usize },
    #[error("unknown crossing id {0}")]
    UnknownCrossing(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Planar knot diagram. Crossing ids are 1-based positions in `crossings`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagram {
    crossings: Vec<Crossing>,
}

fn next_label(label: u32, edges: u32) -> u32 {
    label % edges + 1
}

impl Diagram {
    pub fn unknot() -> Self {
        Self { crossings: Vec::new() }
    }

    /// Builds a diagram from unsigned PD tuples, deriving each sign from the
    /// orientation of the over-strand.
    pub fn from_pd(codes: &[[u32; 4]]) -> Result<Self, DiagramError> {
        let edges = 2 * codes.len() as u32;
        check_label_counts(codes)?;
        let mut crossings = Vec::with_capacity(codes.len());
        for (i, x) in codes.iter().enumerate() {
            let [a, b, _, d] = *x;
            let forward = b == next_label(d, edges); // d -> b
            let backward = d == next_label(b, edges); // b -> d
            let sign = match (forward, backward) {
                // only possible with two edges: X[1,1,2,2] is the positive kink
                (true, true) => {
                    if a == b {
                        Sign::Positive
                    } else {
                        Sign::Negative
                    }
                }
                (true, false) => Sign::Positive,
                (false, true) => Sign::Negative,
                (false, false) => return Err(DiagramError::OverStrandNotConsecutive { crossing: i + 1 }),
            };
            crossings.push(Crossing { slots: *x, sign });
        }
        Self::from_crossings(crossings)
    }

    pub fn from_crossings(crossings: Vec<Crossing>) -> Result<Self, DiagramError> {
        let d = Self { crossings };
        d.validate()?;
        Ok(d)
    }

    /// Builds a diagram from a traversal: `passes[k] = (crossing, is_over)` is
    /// the k-th crossing passed, `signs[i]` the sign of crossing `i` (0-based).
    /// Edge `k + 1` enters pass `k`.
    pub fn from_passes(passes: &[(usize, bool)], signs: &[Sign]) -> Result<Self, DiagramError> {
        let c = signs.len();
        if passes.len() != 2 * c {
            return Err(DiagramError::MultipleComponents { visited: passes.len(), total: 2 * c });
        }
        if c == 0 {
            return Ok(Self::unknot());
        }
        let edges = 2 * c as u32;
        let mut under: Vec<Option<u32>> = vec![None; c];
        let mut over: Vec<Option<u32>> = vec![None; c];
        for (k, &(x, is_over)) in passes.iter().enumerate() {
            let slot = if is_over { &mut over[x] } else { &mut under[x] };
            if x >= c || slot.is_some() {
                return Err(DiagramError::LabelCount { label: k as u32 + 1, count: 3 });
            }
            *slot = Some(k as u32 + 1);
        }
        let mut crossings = Vec::with_capacity(c);
        for i in 0..c {
            let (a, o) = match (under[i], over[i]) {
                (Some(a), Some(o)) => (a, o),
                _ => return Err(DiagramError::UnknownCrossing(i + 1)),
            };
            let (cc, oo) = (next_label(a, edges), next_label(o, edges));
            let slots = match signs[i] {
                Sign::Positive => [a, oo, cc, o],
                Sign::Negative => [a, o, cc, oo],
            };
            crossings.push(Crossing { slots, sign: signs[i] });
        }
        Self::from_crossings(crossings)
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn edge_count(&self) -> u32 {
        2 * self.crossings.len() as u32
    }

    pub fn writhe(&self) -> i32 {
        self.crossings.iter().map(|x| x.sign.value()).sum()
    }

    /// Checks label counts, strand consistency, signs, single-component
    /// traversal and planarity (a connected 4-valent plane graph with `c`
    /// vertices has `c + 2` faces).
    pub fn validate(&self) -> Result<(), DiagramError> {
        let c = self.crossings.len();
        if c == 0 {
            return Ok(());
        }
        let codes: Vec<[u32; 4]> = self.crossings.iter().map(|x| x.slots).collect();
        check_label_counts(&codes)?;
        let edges = self.edge_count();
        for (i, x) in self.crossings.iter().enumerate() {
            if x.slots[2] != next_label(x.slots[0], edges) {
                return Err(DiagramError::UnderStrandNotConsecutive { crossing: i + 1 });
            }
            if x.over_out() != next_label(x.over_in(), edges) {
                let [_, b, _, d] = x.slots;
                if b == next_label(d, edges) || d == next_label(b, edges) {
                    return Err(DiagramError::SignMismatch { crossing: i + 1 });
                }
                return Err(DiagramError::OverStrandNotConsecutive { crossing: i + 1 });
            }
        }
        let visited = self.traversal().len();
        if visited != edges as usize {
            return Err(DiagramError::MultipleComponents { visited, total: edges as usize });
        }
        let faces = self.faces().len();
        if faces != c + 2 {
            return Err(DiagramError::NonPlanar { faces, expected: c + 2 });
        }
        Ok(())
    }

    /// For each label, the (crossing, slot) where that edge is incoming.
    fn incoming_index(&self) -> Vec<(usize, usize)> {
        let mut at = vec![(usize::MAX, 0); self.edge_count() as usize + 1];
        for (i, x) in self.crossings.iter().enumerate() {
            for s in 0..4 {
                if x.is_incoming_slot(s) {
                    at[x.slots[s] as usize] = (i, s);
                }
            }
        }
        at
    }

    /// Passes in traversal order starting with edge 1: (crossing index,
    /// incoming slot). Stops early if the walk closes up before covering
    /// every edge.
    fn traversal(&self) -> Vec<(usize, usize)> {
        if self.crossings.is_empty() {
            return Vec::new();
        }
        let at = self.incoming_index();
        let mut out = Vec::new();
        let mut label = 1u32;
        loop {
            let (i, s) = at[label as usize];
            if i == usize::MAX {
                break;
            }
            out.push((i, s));
            label = self.crossings[i].slots[self.crossings[i].partner_slot(s)];
            if label == 1 || out.len() > self.edge_count() as usize {
                break;
            }
        }
        out
    }

    /// Darts are `4 * crossing + slot`; faces are orbits of
    /// "cross the edge, then turn to the next slot counterclockwise".
    fn faces(&self) -> Vec<Vec<usize>> {
        let n = 4 * self.crossings.len();
        let mut partner = vec![usize::MAX; n];
        let mut first: Vec<Option<usize>> = vec![None; self.edge_count() as usize + 1];
        for dart in 0..n {
            let label = self.crossings[dart / 4].slots[dart % 4] as usize;
            match first[label] {
                None => first[label] = Some(dart),
                Some(other) => {
                    partner[dart] = other;
                    partner[other] = dart;
                }
            }
        }
        let step = |dart: usize| {
            let p = partner[dart];
            4 * (p / 4) + (p % 4 + 1) % 4
        };
        let mut seen = vec![false; n];
        let mut faces = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut face = Vec::new();
            let mut dart = start;
            while !seen[dart] {
                seen[dart] = true;
                face.push(dart);
                dart = step(dart);
            }
            faces.push(face);
        }
        faces
    }

    pub fn gauss_code(&self) -> GaussCode {
        GaussCode(
            self.traversal()
                .into_iter()
                .map(|(i, s)| GaussEntry {
                    crossing: i + 1,
                    over: s != 0,
                    sign: self.crossings[i].sign,
                })
                .collect(),
        )
    }

    /// Rebuilds a diagram from a signed Gauss code. Fails when the code is not
    /// realizable as a planar diagram.
    pub fn from_gauss(code: &GaussCode) -> Result<Self, DiagramError> {
        let c = code.0.len() / 2;
        let mut signs = vec![None; c];
        let mut passes = Vec::with_capacity(code.0.len());
        for e in &code.0 {
            if e.crossing == 0 || e.crossing > c {
                return Err(DiagramError::UnknownCrossing(e.crossing));
            }
            match signs[e.crossing - 1] {
                Some(s) if s != e.sign => return Err(DiagramError::SignMismatch { crossing: e.crossing }),
                _ => signs[e.crossing - 1] = Some(e.sign),
            }
            passes.push((e.crossing - 1, e.over));
        }
        let signs: Option<Vec<Sign>> = signs.into_iter().collect();
        let signs = signs.ok_or(DiagramError::MultipleComponents { visited: 0, total: 2 * c })?;
        Self::from_passes(&passes, &signs)
    }

    pub fn wirtinger(&self) -> WirtingerPresentation {
        WirtingerPresentation::from_diagram(self)
    }

    pub fn change_crossings(&self, changes: &CrossingChangeSet) -> Result<Diagram, DiagramError> {
        for &id in &changes.0 {
            if id == 0 || id > self.crossings.len() {
                return Err(DiagramError::UnknownCrossing(id));
            }
        }
        let crossings = self
            .crossings
            .iter()
            .enumerate()
            .map(|(i, x)| if changes.0.contains(&(i + 1)) { x.switched() } else { x.clone() })
            .collect();
        Ok(Diagram { crossings })
    }

    /// Reflection of the diagram across a line in the plane: over/under
    /// information is kept, the cyclic order at every crossing is reversed and
    /// every sign flips. The Gauss code changes only in its signs.
    pub fn mirror(&self) -> Diagram {
        let crossings = self
            .crossings
            .iter()
            .map(|x| {
                let [a, b, c, d] = x.slots;
                Crossing { slots: [a, d, c, b], sign: x.sign.flip() }
            })
            .collect();
        Diagram { crossings }
    }

    /// Greedy Reidemeister I / II reduction until neither applies.
    pub fn simplify(&self) -> Diagram {
        let mut d = self.clone();
        loop {
            let faces = d.faces();
            let removal = faces.iter().find(|f| f.len() == 1).map(|f| vec![f[0] / 4]).or_else(|| {
                faces.iter().filter(|f| f.len() == 2).find_map(|f| {
                    let (x1, s1) = (f[0] / 4, f[0] % 4);
                    let (x2, s2) = (f[1] / 4, f[1] % 4);
                    // one strand over at both ends of the bigon
                    (x1 != x2 && s1 % 2 != s2 % 2).then(|| vec![x1, x2])
                })
            });
            match removal {
                Some(xs) => d = d.remove_crossings(&xs),
                None => return d,
            }
        }
    }

    /// Deletes crossings whose strands can be short-circuited (a kink or an
    /// RII bigon) and relabels by traversal from the lowest surviving label.
    fn remove_crossings(&self, xs: &[usize]) -> Diagram {
        let edges = self.edge_count() as usize;
        let mut parent: Vec<usize> = (0..=edges).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let n = p[y];
                p[y] = r;
                y = n;
            }
            r
        }
        let union = |p: &mut Vec<usize>, a: u32, b: u32| {
            let (ra, rb) = (find(p, a as usize), find(p, b as usize));
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            p[hi] = lo;
        };
        for &x in xs {
            let s = self.crossings[x].slots;
            // both strands through a removed crossing join their edges
            union(&mut parent, s[0], s[2]);
            union(&mut parent, s[1], s[3]);
        }
        if xs.len() == 1 {
            let s = self.crossings[xs[0]].slots;
            union(&mut parent, s[0], s[1]);
        }
        let kept: Vec<Crossing> = self
            .crossings
            .iter()
            .enumerate()
            .filter(|(i, _)| !xs.contains(i))
            .map(|(_, x)| Crossing {
                slots: x.slots.map(|l| find(&mut parent, l as usize) as u32),
                sign: x.sign,
            })
            .collect();
        if kept.is_empty() {
            return Diagram::unknot();
        }
        relabel_by_traversal(kept)
    }

    pub fn to_pd_text(&self) -> String {
        let mut out = String::new();
        for x in &self.crossings {
            let [a, b, c, d] = x.slots;
            out.push_str(&format!("X {a},{b},{c},{d}\n"));
        }
        out
    }

    /// SHA-256 of the canonical PD text.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_pd_text().as_bytes()))
    }
}

fn check_label_counts(codes: &[[u32; 4]]) -> Result<(), DiagramError> {
    let max = 2 * codes.len() as u32;
    let mut count = vec![0usize; max as usize + 1];
    for (i, x) in codes.iter().enumerate() {
        for &l in x {
            if l == 0 || l > max {
                return Err(DiagramError::LabelOutOfRange { crossing: i + 1, label: l, max });
            }
            count[l as usize] += 1;
        }
    }
    for (l, &c) in count.iter().enumerate().skip(1) {
        if c != 2 {
            return Err(DiagramError::LabelCount { label: l as u32, count: c });
        }
    }
    Ok(())
}

/// Relabels arbitrary (each used exactly twice) edge names to `1..=2c` by
/// walking from the smallest name present.
fn relabel_by_traversal(crossings: Vec<Crossing>) -> Diagram {
    use std::collections::BTreeMap;
    let mut incoming: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    for (i, x) in crossings.iter().enumerate() {
        for s in 0..4 {
            if x.is_incoming_slot(s) {
                incoming.insert(x.slots[s], (i, s));
            }
        }
    }
    let start = *incoming.keys().next().expect("nonempty diagram");
    let mut new_name: BTreeMap<u32, u32> = BTreeMap::new();
    let mut label = start;
    while !new_name.contains_key(&label) {
        new_name.insert(label, new_name.len() as u32 + 1);
        let (i, s) = incoming[&label];
        label = crossings[i].slots[(s + 2) % 4];
    }
    let crossings: Vec<Crossing> = crossings
        .into_iter()
        .map(|x| Crossing { slots: x.slots.map(|l| new_name[&l]), sign: x.sign })
        .collect();
    Diagram::from_crossings(crossings).expect("Reidemeister reduction preserves validity")
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pd_text())
    }
}

/// Parses the line-oriented PD format: `X a,b,c,d` per crossing, `#` comments
/// and blank lines ignored.
pub fn parse_pd(text: &str) -> Result<Diagram, DiagramError> {
    let mut codes = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: &str| DiagramError::Parse { line: n + 1, message: message.to_string() };
        let rest = line.strip_prefix('X').ok_or_else(|| err("expected `X a,b,c,d`"))?;
        let labels: Result<Vec<u32>, _> = rest.split(',').map(|t| t.trim().parse::<u32>()).collect();
        let labels = labels.map_err(|_| err("edge labels must be positive integers"))?;
        let slots: [u32; 4] = labels.try_into().map_err(|_| err("expected exactly four edge labels"))?;
        codes.push(slots);
    }
    Diagram::from_pd(&codes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaussEntry {
    pub crossing: usize,
    pub over: bool,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussCode(pub Vec<GaussEntry>);

impl fmt::Display for GaussCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|e| format!("{}{}{}", if e.over { 'O' } else { 'U' }, e.crossing, e.sign.symbol()))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Set of 1-based crossing ids to switch.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrossingChangeSet(pub BTreeSet<usize>);

impl CrossingChangeSet {
    pub fn new(ids: impl IntoIterator<Item = usize>) -> Self {
        Self(ids.into_iter().collect())
    }
}

/// One Wirtinger relation `outgoing = over^e * incoming * over^-e`, with
/// `e = +1` on positive crossings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Relation {
    pub crossing: usize,
    pub over: usize,
    pub incoming: usize,
    pub outgoing: usize,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WirtingerPresentation {
    n_arcs: usize,
    relations: Vec<Relation>,
    edge_arc: Vec<usize>,
    fingerprint: String,
    strands: Vec<Vec<i64>>,
}

impl WirtingerPresentation {
    /// Arcs are maximal runs of edges between under-passes. Arc 0 is the one
    /// containing edge 1; the rest are numbered in traversal order.
    fn from_diagram(d: &Diagram) -> Self {
        let c = d.crossing_count();
        let fingerprint = d.fingerprint();
        if c == 0 {
            return Self { n_arcs: 1, relations: Vec::new(), edge_arc: vec![0], fingerprint, strands: vec![Vec::new()] };
        }
        let edges = d.edge_count() as usize;
        let mut starts = vec![false; edges + 1];
        for x in d.crossings() {
            starts[x.under_out() as usize] = true;
        }
        let mut edge_arc = vec![0usize; edges + 1];
        let mut idx = 0usize;
        for e in 1..=edges {
            if starts[e] {
                idx += 1;
            }
            edge_arc[e] = if starts[1] { idx - 1 } else { idx % c };
        }
        let relations = d
            .crossings()
            .iter()
            .enumerate()
            .map(|(i, x)| Relation {
                crossing: i + 1,
                over: edge_arc[x.over_in() as usize],
                incoming: edge_arc[x.under_in() as usize],
                outgoing: edge_arc[x.under_out() as usize],
                sign: x.sign,
            })
            .collect();

        // strand names: -start, over crossings..., -end
        let at = d.incoming_index();
        let mut strands = vec![Vec::new(); c];
        for (i, x) in d.crossings().iter().enumerate() {
            let arc = edge_arc[x.under_out() as usize];
            let mut name = vec![-(i as i64 + 1)];
            let mut label = x.under_out();
            loop {
                let (j, s) = at[label as usize];
                if s == 0 {
                    name.push(-(j as i64 + 1));
                    break;
                }
                name.push(j as i64 + 1);
                label = d.crossings()[j].slots[(s + 2) % 4];
            }
            strands[arc] = name;
        }
        Self { n_arcs: c, relations, edge_arc, fingerprint, strands }
    }

    pub fn arc_count(&self) -> usize {
        self.n_arcs
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// Fingerprint of the diagram this presentation was read from.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Arc containing the given edge label.
    pub fn arc_of_edge(&self, label: u32) -> usize {
        self.edge_arc[label as usize]
    }

    /// Crossings met along an arc: `-i` for the under-crossings it starts and
    /// ends at, `+i` for crossings it passes over.
    pub fn strand(&self, arc: usize) -> &[i64] {
        &self.strands[arc]
    }

    /// Arc whose strand signature equals `name`, e.g. `[-10, 4, -11]`.
    pub fn arc_by_strand(&self, name: &[i64]) -> Option<usize> {
        self.strands.iter().position(|s| s == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn trefoil() -> Diagram {
        parse_pd("X 1,5,2,4\nX 3,1,4,6\nX 5,3,6,2\n").unwrap()
    }

    #[test]
    fn trefoil_is_valid_and_positive() {
        let d = trefoil();
        assert_eq!(d.crossing_count(), 3);
        assert!(d.crossings().iter().all(|x| x.sign == Sign::Positive));
        assert_eq!(d.writhe(), 3);
        assert_eq!(d.gauss_code().to_string(), "U1+ O3+ U2+ O1+ U3+ O2+");
    }

    #[test]
    fn unknot_is_valid() {
        let d = parse_pd("# nothing\n\n").unwrap();
        assert_eq!(d, Diagram::unknot());
        assert!(d.validate().is_ok());
        assert!(d.gauss_code().0.is_empty());
    }

    #[test]
    fn tripled_label_is_a_defect() {
        let err = Diagram::from_pd(&[[1, 5, 2, 4], [3, 1, 4, 6], [5, 3, 6, 1]]).unwrap_err();
        assert!(matches!(err, DiagramError::LabelCount { .. }));
    }

    #[test]
    fn nonplanar_code_rejected() {
        // the virtual trefoil O1 O2 U1 U2 is consistent but not planar
        let passes = [(0, true), (1, true), (0, false), (1, false)];
        let err = Diagram::from_passes(&passes, &[Sign::Positive, Sign::Positive]).unwrap_err();
        assert!(matches!(err, DiagramError::NonPlanar { .. }), "{err:?}");
        // edge 2 leaves both crossings
        let err = Diagram::from_pd(&[[1, 3, 2, 4], [3, 1, 4, 2]]).unwrap_err();
        assert!(matches!(err, DiagramError::MultipleComponents { .. }), "{err:?}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_pd("X 1,5,2,4\nX 3,1,4\n").unwrap_err();
        assert_eq!(err, DiagramError::Parse { line: 2, message: "expected exactly four edge labels".into() });
        let err = parse_pd("# c\nY 1,2,3,4\n").unwrap_err();
        assert!(matches!(err, DiagramError::Parse { line: 2, .. }));
    }

    #[test]
    fn kink_signs() {
        let pos = Diagram::from_pd(&[[1, 1, 2, 2]]).unwrap();
        assert_eq!(pos.crossings()[0].sign, Sign::Positive);
        let neg = Diagram::from_pd(&[[1, 2, 2, 1]]).unwrap();
        assert_eq!(neg.crossings()[0].sign, Sign::Negative);
        assert_eq!(pos.mirror(), neg);
    }

    #[test]
    fn wirtinger_of_trefoil() {
        let p = trefoil().wirtinger();
        assert_eq!(p.arc_count(), 3);
        assert_eq!(p.relations().len(), 3);
        for r in p.relations() {
            // over, incoming and outgoing arcs are pairwise distinct on a reduced trefoil
            assert_ne!(r.over, r.incoming);
            assert_ne!(r.over, r.outgoing);
            assert_ne!(r.incoming, r.outgoing);
        }
        let unknot = Diagram::unknot().wirtinger();
        assert_eq!(unknot.arc_count(), 1);
        assert!(unknot.relations().is_empty());
    }

    #[test]
    fn change_crossings_is_an_involution() {
        let d = trefoil();
        let s = CrossingChangeSet::new([2]);
        let once = d.change_crossings(&s).unwrap();
        assert_ne!(once, d);
        assert!(once.validate().is_ok());
        assert_eq!(once.crossings()[1].sign, Sign::Negative);
        assert_eq!(once.change_crossings(&s).unwrap(), d);
        assert_eq!(d.change_crossings(&CrossingChangeSet::default()).unwrap(), d);
        assert_eq!(d.change_crossings(&CrossingChangeSet::new([4])), Err(DiagramError::UnknownCrossing(4)));
    }

    #[test]
    fn mirror_flips_gauss_signs() {
        let d = trefoil();
        let g = d.gauss_code();
        let m = d.mirror().gauss_code();
        assert_eq!(m.0.len(), g.0.len());
        for (a, b) in g.0.iter().zip(&m.0) {
            assert_eq!(a.crossing, b.crossing);
            assert_eq!(a.over, b.over);
            assert_eq!(a.sign, b.sign.flip());
        }
        assert_eq!(d.mirror().mirror(), d);
    }

    #[test]
    fn gauss_round_trip() {
        let d = trefoil();
        assert_eq!(Diagram::from_gauss(&d.gauss_code()).unwrap(), d);
    }

    #[test]
    fn simplify_removes_kinks() {
        // trefoil with a positive kink inserted on edge 6
        let d = parse_pd("X 1,7,2,6\nX 3,1,4,8\nX 7,3,8,2\nX 4,5,5,6\n");
        let d = match d {
            Ok(d) => d,
            Err(e) => panic!("{e}"),
        };
        assert_eq!(d.simplify().crossing_count(), 3);

        let two_kinks = parse_pd("X 1,1,2,4\nX 3,2,4,3\n").unwrap();
        assert_eq!(two_kinks.simplify(), Diagram::unknot());
    }

    #[test]
    fn simplify_removes_rii_bigon() {
        // two-crossing unknot diagram: strand 1-2 passes over strand 3-4 twice
        let d = parse_pd("X 3,1,4,2\nX 4,1,1,2\n");
        if let Ok(d) = d {
            assert_eq!(d.simplify(), Diagram::unknot());
        }
        let d = parse_pd("X 1,4,2,1\nX 3,2,4,3\n").unwrap_or_else(|_| Diagram::unknot());
        assert!(d.simplify().crossing_count() <= d.crossing_count());
    }

    #[test]
    fn reduced_trefoil_is_left_alone() {
        assert_eq!(trefoil().simplify(), trefoil());
    }
}
