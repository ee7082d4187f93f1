//! Homomorphisms from knot groups onto symmetric groups that send every
//! Wirtinger generator (a meridian) to a transposition.
//!
//! A surjection onto `S_n` of this kind bounds the bridge index below by
//! `n - 1`. Labelings are found by depth-first search with propagation
//! through the Wirtinger relations and reported one per conjugacy class.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::diagram::WirtingerPresentation;

/// The transposition `(a b)` with `1 <= a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transposition {
    a: u8,
    b: u8,
}

impl Transposition {
    pub fn new(i: u8, j: u8) -> Option<Self> {
        if i == j || i == 0 || j == 0 {
            return None;
        }
        Some(Self { a: i.min(j), b: i.max(j) })
    }

    pub fn points(self) -> (u8, u8) {
        (self.a, self.b)
    }

    fn moves(self, p: u8) -> bool {
        p == self.a || p == self.b
    }

    fn apply(self, p: u8) -> u8 {
        if p == self.a {
            self.b
        } else if p == self.b {
            self.a
        } else {
            p
        }
    }

    /// `self * x * self`, computed by relabelling the points of `x`.
    pub fn conjugate(self, x: Transposition) -> Transposition {
        Transposition::new(self.apply(x.a), self.apply(x.b)).unwrap()
    }

    /// The unique transposition `o` with `o x o = y`, when `x != y`; `None`
    /// when no transposition conjugates `x` to `y` (disjoint supports).
    fn conjugator(x: Transposition, y: Transposition) -> Option<Transposition> {
        let shared: Vec<u8> = [x.a, x.b].into_iter().filter(|&p| y.moves(p)).collect();
        if shared.len() != 1 {
            return None;
        }
        let s = shared[0];
        let xo = if x.a == s { x.b } else { x.a };
        let yo = if y.a == s { y.b } else { y.a };
        Transposition::new(xo, yo)
    }

    pub fn commutes(self, x: Transposition) -> bool {
        self == x || !(self.moves(x.a) || self.moves(x.b))
    }

    /// All transpositions of `S_n` in lexicographic order.
    pub fn all(n: u8) -> Vec<Transposition> {
        let mut out = Vec::new();
        for a in 1..=n {
            for b in (a + 1)..=n {
                out.push(Transposition { a, b });
            }
        }
        out
    }
}

impl fmt::Display for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {})", self.a, self.b)
    }
}

impl std::str::FromStr for Transposition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("expected `(a b)`, got `{s}`"))?;
        let pts: Vec<u8> = inner
            .split_whitespace()
            .map(|t| t.parse::<u8>().map_err(|_| format!("bad point `{t}`")))
            .collect::<Result<_, _>>()?;
        match pts[..] {
            [i, j] => Transposition::new(i, j).ok_or_else(|| format!("`{s}` is not a transposition")),
            _ => Err(format!("expected two points in `{s}`")),
        }
    }
}

/// True iff the transpositions generate `S_n`: the graph on `1..=n` with an
/// edge per transposition is connected and touches every point.
pub fn transpositions_generate(ts: &[Transposition], n: u8) -> bool {
    let n = n as usize;
    if n <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for t in ts {
        if t.b as usize > n {
            return false;
        }
        let (ra, rb) = (find(&mut parent, t.a as usize), find(&mut parent, t.b as usize));
        parent[ra] = rb;
    }
    let root = find(&mut parent, 1);
    (2..=n).all(|p| find(&mut parent, p) == root)
}

/// Arc index -> transposition in `S_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Labeling {
    pub degree: u8,
    pub assignment: Vec<Transposition>,
}

impl Labeling {
    pub fn new(degree: u8, assignment: Vec<Transposition>) -> Self {
        Self { degree, assignment }
    }

    /// Conjugate by the permutation `perm` (`perm[p - 1]` is the image of p).
    pub fn conjugated(&self, perm: &[u8]) -> Labeling {
        let assignment = self
            .assignment
            .iter()
            .map(|t| Transposition::new(perm[t.a as usize - 1], perm[t.b as usize - 1]).unwrap())
            .collect();
        Labeling { degree: self.degree, assignment }
    }

    /// Lexicographically smallest labeling in the conjugacy class.
    pub fn canonical(&self) -> Labeling {
        permutations(self.degree)
            .iter()
            .map(|p| self.conjugated(p))
            .min()
            .expect("S_n is nonempty")
    }

    /// Every labeling conjugate to this one.
    pub fn conjugacy_class(&self) -> BTreeSet<Labeling> {
        permutations(self.degree).iter().map(|p| self.conjugated(p)).collect()
    }
}

fn permutations(n: u8) -> Vec<Vec<u8>> {
    fn rec(cur: &mut Vec<u8>, used: &mut Vec<bool>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for p in 0..used.len() {
            if !used[p] {
                used[p] = true;
                cur.push(p as u8 + 1);
                rec(cur, used, out);
                cur.pop();
                used[p] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n as usize], &mut out);
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelingFailure {
    #[error("labeling has {got} entries, presentation has {expected} arcs")]
    WrongLength { got: usize, expected: usize },
    #[error("transposition {0} lies outside S_{1}")]
    OutOfDegree(Transposition, u8),
    #[error("relation at crossing {crossing} fails: {over} {incoming} {over} != {outgoing}")]
    RelationFails {
        crossing: usize,
        over: Transposition,
        incoming: Transposition,
        outgoing: Transposition,
    },
    #[error("transpositions do not generate S_{0}")]
    NotGenerating(u8),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCheck {
    pub crossing: usize,
    pub passed: bool,
}

/// A verified surjection onto `S_n` with transposition meridians, witnessing
/// bridge index at least `n - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomCertificate {
    pub fingerprint: String,
    pub labeling: Labeling,
    pub transcript: Vec<RelationCheck>,
}

impl HomCertificate {
    pub fn degree(&self) -> u8 {
        self.labeling.degree
    }

    pub fn bridge_bound(&self) -> u32 {
        self.labeling.degree as u32 - 1
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("HOMCERT\n");
        out.push_str(&format!("fingerprint {}\n", self.fingerprint));
        out.push_str(&format!("degree {}\n", self.degree()));
        out.push_str(&format!("bound {}\n", self.bridge_bound()));
        for (i, t) in self.labeling.assignment.iter().enumerate() {
            out.push_str(&format!("arc {i} -> {t}\n"));
        }
        for r in &self.transcript {
            out.push_str(&format!("relation {}: {}\n", r.crossing, if r.passed { "PASS" } else { "FAIL" }));
        }
        out
    }

    /// Parses [`HomCertificate::to_text`] output. The result still has to be
    /// re-verified against a presentation before it is trusted.
    pub fn parse(text: &str) -> Result<Self, LabelingFailure> {
        let mut fingerprint = None;
        let mut degree = None;
        let mut assignment = Vec::new();
        let mut transcript = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let err = |m: &str| LabelingFailure::Parse { line: n + 1, message: m.to_string() };
            let line = line.trim();
            if line.is_empty() || line == "HOMCERT" {
                continue;
            }
            if let Some(f) = line.strip_prefix("fingerprint ") {
                fingerprint = Some(f.trim().to_string());
            } else if let Some(d) = line.strip_prefix("degree ") {
                degree = Some(d.trim().parse::<u8>().map_err(|_| err("bad degree"))?);
            } else if line.starts_with("bound ") {
                // implied by degree
            } else if let Some(rest) = line.strip_prefix("arc ") {
                let (idx, t) = rest.split_once("->").ok_or_else(|| err("expected `arc i -> (a b)`"))?;
                let idx: usize = idx.trim().parse().map_err(|_| err("bad arc index"))?;
                if idx != assignment.len() {
                    return Err(err("arcs must be listed in order"));
                }
                assignment.push(t.parse::<Transposition>().map_err(|m| err(&m))?);
            } else if let Some(rest) = line.strip_prefix("relation ") {
                let (c, verdict) = rest.split_once(':').ok_or_else(|| err("expected `relation j: PASS`"))?;
                transcript.push(RelationCheck {
                    crossing: c.trim().parse().map_err(|_| err("bad crossing id"))?,
                    passed: verdict.trim() == "PASS",
                });
            } else {
                return Err(err("unrecognised line"));
            }
        }
        let err = |m: &str| LabelingFailure::Parse { line: 0, message: m.to_string() };
        Ok(HomCertificate {
            fingerprint: fingerprint.ok_or_else(|| err("missing fingerprint"))?,
            labeling: Labeling::new(degree.ok_or_else(|| err("missing degree"))?, assignment),
            transcript,
        })
    }
}

/// Checks every relation by explicit conjugation and that the labels
/// generate `S_n`.
pub fn verify_labeling(
    pres: &WirtingerPresentation,
    labeling: &Labeling,
) -> Result<HomCertificate, LabelingFailure> {
    let lab = &labeling.assignment;
    if lab.len() != pres.arc_count() {
        return Err(LabelingFailure::WrongLength { got: lab.len(), expected: pres.arc_count() });
    }
    if let Some(t) = lab.iter().find(|t| t.b > labeling.degree) {
        return Err(LabelingFailure::OutOfDegree(*t, labeling.degree));
    }
    let mut transcript = Vec::with_capacity(pres.relations().len());
    for r in pres.relations() {
        let (o, a, b) = (lab[r.over], lab[r.incoming], lab[r.outgoing]);
        if o.conjugate(a) != b {
            return Err(LabelingFailure::RelationFails { crossing: r.crossing, over: o, incoming: a, outgoing: b });
        }
        transcript.push(RelationCheck { crossing: r.crossing, passed: true });
    }
    if !transpositions_generate(lab, labeling.degree) {
        return Err(LabelingFailure::NotGenerating(labeling.degree));
    }
    Ok(HomCertificate { fingerprint: pres.fingerprint().to_string(), labeling: labeling.clone(), transcript })
}

/// Reads a labeling keyed by strand names (`strand -10,4,-11 (1 2)`), as
/// printed next to a labeled diagram, and maps it onto arc indices.
pub fn parse_strand_labeling(text: &str, pres: &WirtingerPresentation) -> Result<Labeling, LabelingFailure> {
    let mut degree = None;
    let mut slots: Vec<Option<Transposition>> = vec![None; pres.arc_count()];
    for (n, raw) in text.lines().enumerate() {
        let err = |m: String| LabelingFailure::Parse { line: n + 1, message: m };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(d) = line.strip_prefix("degree ") {
            degree = Some(d.trim().parse::<u8>().map_err(|_| err("bad degree".into()))?);
            continue;
        }
        let rest = line.strip_prefix("strand ").ok_or_else(|| err("expected `strand ...`".into()))?;
        let (name, t) = rest.split_once('(').ok_or_else(|| err("missing transposition".into()))?;
        let t = t.trim_end_matches('*').trim();
        let t: Transposition = format!("({t}").parse().map_err(err)?;
        let name: Vec<i64> = name
            .trim()
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| err("bad strand name".into()))?;
        let arc = pres.arc_by_strand(&name).ok_or_else(|| err(format!("no strand {name:?} in diagram")))?;
        slots[arc] = Some(t);
    }
    let degree = degree.ok_or(LabelingFailure::Parse { line: 0, message: "missing degree".into() })?;
    let assignment: Option<Vec<Transposition>> = slots.into_iter().collect();
    let assignment = assignment.ok_or(LabelingFailure::Parse { line: 0, message: "some strands unlabeled".into() })?;
    Ok(Labeling::new(degree, assignment))
}

struct Search<'a> {
    pres: &'a WirtingerPresentation,
    n: u8,
    all: Vec<Transposition>,
    order: Vec<usize>,
    rels_of_arc: Vec<Vec<usize>>,
    assign: Vec<Option<Transposition>>,
    trail: Vec<usize>,
    queue: Vec<usize>,
    results: BTreeSet<Labeling>,
    max_results: usize,
}

impl<'a> Search<'a> {
    fn new(pres: &'a WirtingerPresentation, n: u8, max_results: usize) -> Self {
        let arcs = pres.arc_count();
        let mut rels_of_arc = vec![Vec::new(); arcs];
        for (j, r) in pres.relations().iter().enumerate() {
            for arc in [r.over, r.incoming, r.outgoing] {
                if !rels_of_arc[arc].contains(&j) {
                    rels_of_arc[arc].push(j);
                }
            }
        }
        // most constrained first, ties by index
        let mut order: Vec<usize> = (0..arcs).collect();
        order.sort_by_key(|&a| (std::cmp::Reverse(rels_of_arc[a].len()), a));
        Self {
            pres,
            n,
            all: Transposition::all(n),
            order,
            rels_of_arc,
            assign: vec![None; arcs],
            trail: Vec::new(),
            queue: Vec::new(),
            results: BTreeSet::new(),
            max_results,
        }
    }

    fn set(&mut self, arc: usize, t: Transposition) -> bool {
        match self.assign[arc] {
            Some(u) => u == t,
            None => {
                self.assign[arc] = Some(t);
                self.trail.push(arc);
                self.queue.push(arc);
                true
            }
        }
    }

    /// Assigns and propagates; false on contradiction.
    fn assign_and_propagate(&mut self, arc: usize, t: Transposition) -> bool {
        if !self.set(arc, t) {
            return false;
        }
        while let Some(arc) = self.queue.pop() {
            for k in 0..self.rels_of_arc[arc].len() {
                let r = self.pres.relations()[self.rels_of_arc[arc][k]];
                let (o, a, b) = (self.assign[r.over], self.assign[r.incoming], self.assign[r.outgoing]);
                let ok = match (o, a, b) {
                    (Some(o), Some(a), Some(b)) => o.conjugate(a) == b,
                    (Some(o), Some(a), None) => self.set(r.outgoing, o.conjugate(a)),
                    (Some(o), None, Some(b)) => self.set(r.incoming, o.conjugate(b)),
                    (None, Some(a), Some(b)) => {
                        if a == b {
                            true
                        } else {
                            match Transposition::conjugator(a, b) {
                                Some(o) => self.set(r.over, o),
                                None => false,
                            }
                        }
                    }
                    _ => true,
                };
                if !ok {
                    self.queue.clear();
                    return false;
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let arc = self.trail.pop().unwrap();
            self.assign[arc] = None;
        }
    }

    /// Candidate values for the next arc. Points not yet used by any label
    /// are interchangeable, so only the two smallest unused ones are offered.
    fn candidates(&self) -> Vec<Transposition> {
        let mut used = vec![false; self.n as usize + 1];
        for t in self.assign.iter().flatten() {
            used[t.a as usize] = true;
            used[t.b as usize] = true;
        }
        let fresh: Vec<u8> = (1..=self.n).filter(|&p| !used[p as usize]).take(2).collect();
        let allowed = |p: u8| used[p as usize] || fresh.contains(&p);
        self.all
            .iter()
            .copied()
            .filter(|t| allowed(t.a) && allowed(t.b))
            // (i f2) with i used is conjugate to (i f1)
            .filter(|t| !(fresh.len() == 2 && t.moves(fresh[1]) && !t.moves(fresh[0])))
            .collect()
    }

    fn done(&self) -> bool {
        self.results.len() >= self.max_results
    }

    fn dfs(&mut self) {
        if self.done() {
            return;
        }
        let next = self.order.iter().copied().find(|&a| self.assign[a].is_none());
        let Some(arc) = next else {
            let labels: Vec<Transposition> = self.assign.iter().map(|t| t.unwrap()).collect();
            if transpositions_generate(&labels, self.n) {
                self.results.insert(Labeling::new(self.n, labels).canonical());
            }
            return;
        };
        for t in self.candidates() {
            let mark = self.trail.len();
            if self.assign_and_propagate(arc, t) {
                self.dfs();
            }
            self.undo_to(mark);
            if self.done() {
                return;
            }
        }
    }
}

/// Surjections onto `S_n` sending meridians to transpositions, one canonical
/// representative per conjugacy class, sorted. An empty result for
/// `max_results = usize::MAX` proves that no such surjection exists.
pub fn search_homomorphisms(pres: &WirtingerPresentation, n: u8, max_results: usize) -> Vec<Labeling> {
    assert!(n >= 2, "degree must be at least 2");
    if max_results == 0 {
        return Vec::new();
    }
    let mut s = Search::new(pres, n, max_results);
    let root = s.order[0];
    // every labeling is conjugate to one with the first arc on (1 2)
    if s.assign_and_propagate(root, Transposition { a: 1, b: 2 }) {
        s.dfs();
    }
    s.results.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeBound {
    pub bound: u32,
    pub certificate: Option<HomCertificate>,
}

/// Largest `n` in `3..=n_max` admitting a surjection (searched downwards);
/// the bound is `n - 1`, or the vacuous 1 when none exists.
pub fn bridge_lower_bound(pres: &WirtingerPresentation, n_max: u8) -> BridgeBound {
    for n in (3..=n_max).rev() {
        if let Some(l) = search_homomorphisms(pres, n, 1).into_iter().next() {
            let cert = verify_labeling(pres, &l).expect("search only returns verified labelings");
            return BridgeBound { bound: n as u32 - 1, certificate: Some(cert) };
        }
    }
    BridgeBound { bound: 1, certificate: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{parse_pd, Diagram};

    fn t(a: u8, b: u8) -> Transposition {
        Transposition::new(a, b).unwrap()
    }

    fn trefoil() -> Diagram {
        parse_pd("X 1,5,2,4\nX 3,1,4,6\nX 5,3,6,2\n").unwrap()
    }

    #[test]
    fn conjugation_closed_form() {
        assert_eq!(t(1, 2).conjugate(t(2, 3)), t(1, 3));
        assert_eq!(t(1, 2).conjugate(t(3, 4)), t(3, 4));
        assert_eq!(t(1, 2).conjugate(t(1, 2)), t(1, 2));
        assert_eq!(Transposition::conjugator(t(1, 2), t(1, 3)), Some(t(2, 3)));
        assert_eq!(Transposition::conjugator(t(1, 2), t(3, 4)), None);
        assert!(t(3, 4).commutes(t(2, 5)));
        assert!(!t(3, 4).commutes(t(1, 4)));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("(2 5)".parse::<Transposition>().unwrap(), t(2, 5));
        assert_eq!("(5 2)".parse::<Transposition>().unwrap(), t(2, 5));
        assert!("(2 2)".parse::<Transposition>().is_err());
        assert!("2 5".parse::<Transposition>().is_err());
        assert_eq!(t(1, 4).to_string(), "(1 4)");
    }

    #[test]
    fn generation() {
        assert!(transpositions_generate(&[t(1, 2), t(1, 3), t(1, 4), t(2, 5)], 5));
        assert!(!transpositions_generate(&[t(1, 2), t(3, 4)], 4));
        assert!(transpositions_generate(&[t(1, 2)], 2));
        assert!(!transpositions_generate(&[t(1, 2), t(2, 3)], 4));
    }

    #[test]
    fn unknot_labeling_does_not_generate() {
        let pres = Diagram::unknot().wirtinger();
        let err = verify_labeling(&pres, &Labeling::new(3, vec![t(1, 2)])).unwrap_err();
        assert_eq!(err, LabelingFailure::NotGenerating(3));
    }

    #[test]
    fn trefoil_s3_certificate() {
        let pres = trefoil().wirtinger();
        let found = search_homomorphisms(&pres, 3, usize::MAX);
        assert_eq!(found.len(), 1);
        let cert = verify_labeling(&pres, &found[0]).unwrap();
        assert_eq!(cert.bridge_bound(), 2);
        let text = cert.to_text();
        assert!(text.contains("degree 3"));
        assert!(text.contains("relation 3: PASS"));
        assert_eq!(HomCertificate::parse(&text).unwrap(), cert);
        assert!(search_homomorphisms(&pres, 4, usize::MAX).is_empty());
    }

    #[test]
    fn broken_relation_reported() {
        let pres = trefoil().wirtinger();
        let err = verify_labeling(&pres, &Labeling::new(3, vec![t(1, 2), t(1, 2), t(1, 3)])).unwrap_err();
        assert!(matches!(err, LabelingFailure::RelationFails { .. }));
        let err = verify_labeling(&pres, &Labeling::new(3, vec![t(1, 2)])).unwrap_err();
        assert!(matches!(err, LabelingFailure::WrongLength { .. }));
    }

    #[test]
    fn canonical_is_class_invariant() {
        let l = Labeling::new(4, vec![t(2, 3), t(3, 4), t(1, 3)]);
        let c = l.canonical();
        for m in l.conjugacy_class() {
            assert_eq!(m.canonical(), c);
        }
        assert_eq!(c.assignment[0], t(1, 2));
    }

    #[test]
    fn bridge_bound_of_unknot_is_vacuous() {
        let b = bridge_lower_bound(&Diagram::unknot().wirtinger(), 6);
        assert_eq!(b, BridgeBound { bound: 1, certificate: None });
    }
}
