//! Exact polygon geometry: edge lengths, regular projection directions,
//! projection to a knot diagram and height-function extrema.
//!
//! Every verdict (parallelism, incidence, over/under, height order) is decided
//! with big-integer or big-rational arithmetic. Floats only appear in values
//! that are reported for display.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::{Diagram, Sign};

pub type Vec3 = [BigInt; 3];

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn dot(a: &Vec3, b: &Vec3) -> BigInt {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn is_zero(a: &Vec3) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn vec3(x: i64, y: i64, z: i64) -> Vec3 {
    [BigInt::from(x), BigInt::from(y), BigInt::from(z)]
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("zero-length edge between vertices {0} and {1}")]
    ZeroEdge(usize, usize),
    #[error("vertices {0}, {1}, {2} are collinear")]
    Collinear(usize, usize, usize),
    #[error("scale must be positive")]
    NonPositiveScale,
    #[error("vertex index {index} out of range for a {len}-gon")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("direction vector must be nonzero")]
    ZeroDirection,
    #[error("direction is not Morse: vertices {0} and {1} have equal height")]
    NonMorse(usize, usize),
    #[error("projection is not regular: {0}")]
    NotRegular(RegularityReport),
    #[error("no regular direction found after {0} rejections")]
    NoRegularDirection(usize),
    #[error("edges {0} and {1} meet in space; the polygon is not embedded")]
    SelfIntersection(usize, usize),
}

/// Closed polygon with integer vertices. Geometric coordinates are
/// `vertex * scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon3 {
    vertices: Vec<Vec3>,
    scale: BigRational,
    name: Option<String>,
}

impl Polygon3 {
    pub fn new(
        vertices: Vec<Vec3>,
        scale: BigRational,
        name: Option<String>,
    ) -> Result<Self, GeomError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeomError::TooFewVertices(n));
        }
        if !scale.is_positive() {
            return Err(GeomError::NonPositiveScale);
        }
        for i in 0..n {
            let j = (i + 1) % n;
            if vertices[i] == vertices[j] {
                return Err(GeomError::ZeroEdge(i, j));
            }
        }
        for i in 0..n {
            let (h, j) = ((i + n - 1) % n, (i + 1) % n);
            let e0 = sub(&vertices[i], &vertices[h]);
            let e1 = sub(&vertices[j], &vertices[i]);
            if is_zero(&cross(&e0, &e1)) {
                return Err(GeomError::Collinear(h, i, j));
            }
        }
        Ok(Self { vertices, scale, name })
    }

    /// Polygon with unit scale, handy for small hand-made examples.
    pub fn from_i64(points: &[[i64; 3]]) -> Result<Self, GeomError> {
        let vertices = points.iter().map(|p| vec3(p[0], p[1], p[2])).collect();
        Self::new(vertices, BigRational::one(), None)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Number of edges, which is the stick count of this representative.
    pub fn edge_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    fn heights(&self, d: &Vec3) -> Vec<BigInt> {
        self.vertices.iter().map(|v| dot(d, v)).collect()
    }
}

/// Projection direction `d` together with an integer basis `u`, `v` of the
/// plane orthogonal to it. `u x v` is a positive multiple of `d`, so the
/// viewer sits on the `+d` side and larger `d`-height means "over".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Direction {
    d: Vec3,
    u: Vec3,
    v: Vec3,
}

impl Direction {
    pub fn new(d: Vec3) -> Result<Self, GeomError> {
        if is_zero(&d) {
            return Err(GeomError::ZeroDirection);
        }
        // axis least aligned with d, smallest index on ties
        let k = (0..3)
            .min_by(|&a, &b| d[a].abs().cmp(&d[b].abs()).then(a.cmp(&b)))
            .unwrap();
        let mut axis = vec3(0, 0, 0);
        axis[k] = BigInt::one();
        let u = cross(&d, &axis);
        let v = cross(&d, &u);
        Ok(Self { d, u, v })
    }

    pub fn from_i64(x: i64, y: i64, z: i64) -> Result<Self, GeomError> {
        Self::new(vec3(x, y, z))
    }

    pub fn d(&self) -> &Vec3 {
        &self.d
    }

    pub fn u(&self) -> &Vec3 {
        &self.u
    }

    pub fn v(&self) -> &Vec3 {
        &self.v
    }

    pub fn negated(&self) -> Direction {
        let d = [-&self.d[0], -&self.d[1], -&self.d[2]];
        Direction::new(d).expect("negation of a nonzero vector is nonzero")
    }

    fn project(&self, p: &Vec3) -> [BigInt; 2] {
        [dot(&self.u, p), dot(&self.v, p)]
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.d[0], self.d[1], self.d[2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Regular,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FailureKind {
    EdgeParallelToDirection,
    VertexOverEdge,
    TriplePoint,
    AdjacentHeightTie,
    VertexCoincidence,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FailureKind::EdgeParallelToDirection => "edge-parallel-to-d",
            FailureKind::VertexOverEdge => "vertex-over-edge",
            FailureKind::TriplePoint => "triple-point",
            FailureKind::AdjacentHeightTie => "adjacent-height-tie",
            FailureKind::VertexCoincidence => "vertex-coincidence",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityReport {
    pub verdict: Verdict,
    pub failure_kind: Option<FailureKind>,
    /// Offending vertex or edge indices. Edge `i` joins vertex `i` to `i + 1`.
    pub witness: Vec<usize>,
}

impl RegularityReport {
    fn regular() -> Self {
        Self { verdict: Verdict::Regular, failure_kind: None, witness: Vec::new() }
    }

    fn fail(kind: FailureKind, witness: Vec<usize>) -> Self {
        Self { verdict: Verdict::Fail, failure_kind: Some(kind), witness }
    }

    pub fn is_regular(&self) -> bool {
        self.verdict == Verdict::Regular
    }
}

impl fmt::Display for RegularityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.failure_kind {
            None => f.write_str("regular"),
            Some(kind) => write!(f, "{} at {:?}", kind, self.witness),
        }
    }
}

type P2 = [BigInt; 2];

fn orient(a: &P2, b: &P2, c: &P2) -> BigInt {
    (&b[0] - &a[0]) * (&c[1] - &a[1]) - (&b[1] - &a[1]) * (&c[0] - &a[0])
}

/// `p` on the closed segment `[a, b]`.
fn on_segment(p: &P2, a: &P2, b: &P2) -> bool {
    if !orient(a, b, p).is_zero() {
        return false;
    }
    let within = |k: usize| {
        let (lo, hi) = if a[k] <= b[k] { (&a[k], &b[k]) } else { (&b[k], &a[k]) };
        lo <= &p[k] && &p[k] <= hi
    };
    within(0) && within(1)
}

/// Closed segments `[a0, a1]` and `[b0, b1]` share a point. Coplanar
/// segments are dropped onto a coordinate plane the projection is injective
/// on and tested with orientation predicates there.
fn segments_meet(a0: &Vec3, a1: &Vec3, b0: &Vec3, b1: &Vec3) -> bool {
    let u = sub(a1, a0);
    if !dot(&u, &cross(&sub(b0, a0), &sub(b1, a0))).is_zero() {
        return false;
    }
    let normal = [cross(&u, &sub(b0, a0)), cross(&u, &sub(b1, a0)), cross(&sub(b1, b0), &sub(a0, b0))]
        .into_iter()
        .find(|n| !is_zero(n));
    let drop = match &normal {
        Some(n) => (0..3).find(|&k| !n[k].is_zero()),
        // all four collinear: drop an axis the line is not parallel to
        None => (0..3).find(|&k| (0..3).any(|j| j != k && !u[j].is_zero())),
    }
    .expect("nonzero vector");
    let flat = |p: &Vec3| -> P2 {
        let keep: Vec<usize> = (0..3).filter(|&k| k != drop).collect();
        [p[keep[0]].clone(), p[keep[1]].clone()]
    };
    let (a0, a1, b0, b1) = (flat(a0), flat(a1), flat(b0), flat(b1));
    let side = |x: BigInt| x.sign();
    let (o1, o2) = (side(orient(&a0, &a1, &b0)), side(orient(&a0, &a1, &b1)));
    let (o3, o4) = (side(orient(&b0, &b1, &a0)), side(orient(&b0, &b1, &a1)));
    let strict = |x: num_bigint::Sign, y: num_bigint::Sign| {
        x != num_bigint::Sign::NoSign && y != num_bigint::Sign::NoSign && x != y
    };
    (strict(o1, o2) && strict(o3, o4))
        || on_segment(&b0, &a0, &a1)
        || on_segment(&b1, &a0, &a1)
        || on_segment(&a0, &b0, &b1)
        || on_segment(&a1, &b0, &b1)
}

/// Fails with [`GeomError::SelfIntersection`] when two non-adjacent edges
/// share a point. Adjacent edges only meet at their common vertex, since
/// consecutive collinear vertices are already excluded.
pub fn check_embedded(poly: &Polygon3) -> Result<(), GeomError> {
    let v = poly.vertices();
    let n = v.len();
    for i in 0..n {
        for j in i + 1..n {
            if !edges_adjacent(i, j, n) && segments_meet(&v[i], &v[(i + 1) % n], &v[j], &v[(j + 1) % n]) {
                return Err(GeomError::SelfIntersection(i, j));
            }
        }
    }
    Ok(())
}

/// Transverse crossing of two projected edges, parameters measured from the
/// start of each edge.
#[derive(Clone, Debug)]
struct RawCrossing {
    edges: [usize; 2],
    params: [BigRational; 2],
}

fn edges_adjacent(i: usize, j: usize, n: usize) -> bool {
    i == j || (i + 1) % n == j || (j + 1) % n == i
}

struct Projected {
    pts: Vec<P2>,
    heights: Vec<BigInt>,
}

impl Projected {
    fn new(poly: &Polygon3, dir: &Direction) -> Self {
        Self {
            pts: poly.vertices.iter().map(|p| dir.project(p)).collect(),
            heights: poly.heights(&dir.d),
        }
    }

    fn edge(&self, i: usize) -> (&P2, &P2) {
        let n = self.pts.len();
        (&self.pts[i], &self.pts[(i + 1) % n])
    }

    /// Proper crossings between non-adjacent edges. Assumes no vertex lies on
    /// a non-incident edge, so every intersection is interior to both edges.
    fn crossings(&self) -> Vec<RawCrossing> {
        let n = self.pts.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if edges_adjacent(i, j, n) {
                    continue;
                }
                let (p0, p1) = self.edge(i);
                let (q0, q1) = self.edge(j);
                let a0 = orient(q0, q1, p0);
                let a1 = orient(q0, q1, p1);
                let b0 = orient(p0, p1, q0);
                let b1 = orient(p0, p1, q1);
                if a0.sign() == a1.sign() || b0.sign() == b1.sign() {
                    continue;
                }
                if a0.is_zero() || a1.is_zero() || b0.is_zero() || b1.is_zero() {
                    continue;
                }
                let t = BigRational::new(a0.clone(), &a0 - &a1);
                let s = BigRational::new(b0.clone(), &b0 - &b1);
                out.push(RawCrossing { edges: [i, j], params: [t, s] });
            }
        }
        out
    }

    fn height_at(&self, edge: usize, t: &BigRational) -> BigRational {
        let n = self.heights.len();
        let h0 = BigRational::from_integer(self.heights[edge].clone());
        let h1 = BigRational::from_integer(self.heights[(edge + 1) % n].clone());
        &h0 + t * (h1 - &h0)
    }

    fn direction_2d(&self, edge: usize) -> [BigInt; 2] {
        let (a, b) = self.edge(edge);
        [&b[0] - &a[0], &b[1] - &a[1]]
    }
}

/// Checks every genericity condition needed for a regular projection and
/// well-defined height extrema.
pub fn check_regularity(poly: &Polygon3, dir: &Direction) -> RegularityReport {
    let proj = Projected::new(poly, dir);
    let n = poly.len();
    for i in 0..n {
        let j = (i + 1) % n;
        if proj.pts[i] == proj.pts[j] {
            return RegularityReport::fail(FailureKind::EdgeParallelToDirection, vec![i]);
        }
    }
    for i in 0..n {
        let j = (i + 1) % n;
        if proj.heights[i] == proj.heights[j] {
            return RegularityReport::fail(FailureKind::AdjacentHeightTie, vec![i, j]);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if proj.pts[i] == proj.pts[j] {
                return RegularityReport::fail(FailureKind::VertexCoincidence, vec![i, j]);
            }
        }
    }
    for k in 0..n {
        for e in 0..n {
            if k == e || k == (e + 1) % n {
                continue;
            }
            let (a, b) = proj.edge(e);
            if on_segment(&proj.pts[k], a, b) {
                return RegularityReport::fail(FailureKind::VertexOverEdge, vec![k, e]);
            }
        }
    }
    let crossings = proj.crossings();
    let mut per_edge: Vec<Vec<(&BigRational, usize)>> = vec![Vec::new(); n];
    for c in &crossings {
        per_edge[c.edges[0]].push((&c.params[0], c.edges[1]));
        per_edge[c.edges[1]].push((&c.params[1], c.edges[0]));
    }
    for (e, list) in per_edge.iter_mut().enumerate() {
        list.sort();
        for w in list.windows(2) {
            if w[0].0 == w[1].0 {
                return RegularityReport::fail(FailureKind::TriplePoint, vec![e, w[0].1, w[1].1]);
            }
        }
    }
    RegularityReport::regular()
}

fn random_direction(rng: &mut ChaCha8Rng, bound: i64) -> Vec3 {
    loop {
        let d = [
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
        ];
        if d != [0, 0, 0] {
            return vec3(d[0], d[1], d[2]);
        }
    }
}

pub const DEFAULT_MAX_REJECTIONS: usize = 1_000_000;

/// Rejection-samples integer directions until one passes
/// [`check_regularity`]. The entry bound starts at 64 and doubles after every
/// 32 consecutive rejections. Non-embedded polygons are refused up front,
/// since no direction is regular for them.
pub fn find_regular_direction(
    poly: &Polygon3,
    seed: u64,
    max_rejections: usize,
) -> Result<(Direction, RegularityReport), GeomError> {
    check_embedded(poly)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bound: i64 = 64;
    for attempt in 0..=max_rejections {
        if attempt > 0 && attempt % 32 == 0 && bound < (1 << 40) {
            bound *= 2;
        }
        let dir = Direction::new(random_direction(&mut rng, bound))?;
        let report = check_regularity(poly, &dir);
        if report.is_regular() {
            return Ok((dir, report));
        }
    }
    Err(GeomError::NoRegularDirection(max_rejections))
}

/// A crossing of the projection, in terms of polygon edges (edge `i` runs
/// from vertex `i` to vertex `i + 1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectedCrossing {
    pub over_edge: usize,
    pub under_edge: usize,
    pub sign: Sign,
}

/// Over/under by exact height comparison at the crossing point; the sign is
/// positive when the over-strand turns counterclockwise onto the under-strand
/// as seen from `+d`.
fn classify(proj: &Projected, raw: &[RawCrossing]) -> Result<Vec<ProjectedCrossing>, GeomError> {
    raw.iter()
        .map(|c| {
            let h0 = proj.height_at(c.edges[0], &c.params[0]);
            let h1 = proj.height_at(c.edges[1], &c.params[1]);
            let (over, under) = match h0.cmp(&h1) {
                Ordering::Greater => (c.edges[0], c.edges[1]),
                Ordering::Less => (c.edges[1], c.edges[0]),
                Ordering::Equal => return Err(GeomError::SelfIntersection(c.edges[0], c.edges[1])),
            };
            let o = proj.direction_2d(over);
            let w = proj.direction_2d(under);
            let z = &o[0] * &w[1] - &o[1] * &w[0];
            let sign = if z.is_positive() { Sign::Positive } else { Sign::Negative };
            Ok(ProjectedCrossing { over_edge: over, under_edge: under, sign })
        })
        .collect()
}

/// All crossings of the projection along a regular direction, sorted.
pub fn projected_crossings(poly: &Polygon3, dir: &Direction) -> Result<Vec<ProjectedCrossing>, GeomError> {
    let report = check_regularity(poly, dir);
    if !report.is_regular() {
        return Err(GeomError::NotRegular(report));
    }
    let proj = Projected::new(poly, dir);
    let mut out = classify(&proj, &proj.crossings())?;
    out.sort();
    Ok(out)
}

/// Projects `poly` along `dir`. Crossings are numbered by first encounter when
/// walking the polygon from vertex 0; edge labels follow the same walk.
pub fn project_to_diagram(poly: &Polygon3, dir: &Direction) -> Result<Diagram, GeomError> {
    let report = check_regularity(poly, dir);
    if !report.is_regular() {
        return Err(GeomError::NotRegular(report));
    }
    let proj = Projected::new(poly, dir);
    let raw = proj.crossings();
    if raw.is_empty() {
        return Ok(Diagram::unknot());
    }

    let classified = classify(&proj, &raw)?;
    let over_is_first: Vec<bool> = classified.iter().zip(&raw).map(|(c, r)| c.over_edge == r.edges[0]).collect();
    let signs: Vec<Sign> = classified.iter().map(|c| c.sign).collect();

    // passes in traversal order: (raw crossing index, is_over)
    let n = poly.len();
    let mut per_edge: Vec<Vec<(BigRational, usize, bool)>> = vec![Vec::new(); n];
    for (k, c) in raw.iter().enumerate() {
        per_edge[c.edges[0]].push((c.params[0].clone(), k, over_is_first[k]));
        per_edge[c.edges[1]].push((c.params[1].clone(), k, !over_is_first[k]));
    }
    let mut passes = Vec::with_capacity(2 * raw.len());
    for list in per_edge.iter_mut() {
        list.sort_by(|a, b| a.0.cmp(&b.0));
        passes.extend(list.iter().map(|(_, k, over)| (*k, *over)));
    }

    // renumber crossings by first encounter
    let mut id = vec![usize::MAX; raw.len()];
    let mut next = 0;
    for &(k, _) in &passes {
        if id[k] == usize::MAX {
            id[k] = next;
            next += 1;
        }
    }
    let passes: Vec<(usize, bool)> = passes.into_iter().map(|(k, o)| (id[k], o)).collect();
    let mut ordered_signs = vec![Sign::Positive; raw.len()];
    for (k, s) in signs.into_iter().enumerate() {
        ordered_signs[id[k]] = s;
    }
    Ok(Diagram::from_passes(&passes, &ordered_signs)
        .expect("projection of a regular polygon yields a valid diagram"))
}

fn check_morse(heights: &[BigInt]) -> Result<(), GeomError> {
    let n = heights.len();
    for i in 0..n {
        let j = (i + 1) % n;
        if heights[i] == heights[j] {
            return Err(GeomError::NonMorse(i, j));
        }
    }
    Ok(())
}

fn count_extrema(heights: &[BigInt], ord: Ordering) -> usize {
    let n = heights.len();
    (0..n)
        .filter(|&i| {
            heights[i].cmp(&heights[(i + n - 1) % n]) == ord
                && heights[i].cmp(&heights[(i + 1) % n]) == ord
        })
        .count()
}

/// Number of vertices strictly higher than both neighbours along `dir`.
pub fn local_maxima_count(poly: &Polygon3, dir: &Direction) -> Result<usize, GeomError> {
    let h = poly.heights(&dir.d);
    check_morse(&h)?;
    Ok(count_extrema(&h, Ordering::Greater))
}

/// Number of vertices strictly lower than both neighbours along `dir`.
pub fn local_minima_count(poly: &Polygon3, dir: &Direction) -> Result<usize, GeomError> {
    let h = poly.heights(&dir.d);
    check_morse(&h)?;
    Ok(count_extrema(&h, Ordering::Less))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepResult {
    pub samples: usize,
    pub min_count: usize,
    pub max_count: usize,
    pub min_witness: Direction,
    pub max_witness: Direction,
}

pub const SWEEP_BOUND: i64 = 1 << 20;

fn sweep_sample(vertices: &[[i128; 3]], seed: u64, index: u64) -> ([i64; 3], usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let d = [
            rng.gen_range(-SWEEP_BOUND..=SWEEP_BOUND),
            rng.gen_range(-SWEEP_BOUND..=SWEEP_BOUND),
            rng.gen_range(-SWEEP_BOUND..=SWEEP_BOUND),
        ];
        if d == [0, 0, 0] {
            continue;
        }
        let h: Vec<i128> = vertices
            .iter()
            .map(|v| v[0] * d[0] as i128 + v[1] * d[1] as i128 + v[2] * d[2] as i128)
            .collect();
        let n = h.len();
        if (0..n).any(|i| h[i] == h[(i + 1) % n]) {
            continue;
        }
        let maxima = (0..n)
            .filter(|&i| h[i] > h[(i + n - 1) % n] && h[i] > h[(i + 1) % n])
            .count();
        return (d, maxima);
    }
}

/// Min and max of [`local_maxima_count`] over `samples` pseudo-random integer
/// directions. Sample `i` draws from its own ChaCha stream, so the result does
/// not depend on evaluation order.
pub fn direction_sweep(poly: &Polygon3, samples: usize, seed: u64) -> Result<SweepResult, GeomError> {
    assert!(samples >= 1, "direction_sweep needs at least one sample");
    // Heights are evaluated in i128 when coordinates are small enough that
    // |d . v| cannot overflow; the maxima count is then still exact.
    let limit = BigInt::one() << 80;
    let small: Option<Vec<[i128; 3]>> = poly
        .vertices()
        .iter()
        .map(|v| {
            let mut out = [0i128; 3];
            for k in 0..3 {
                if v[k].abs() >= limit {
                    return None;
                }
                out[k] = v[k].to_i128()?;
            }
            Some(out)
        })
        .collect();
    let results: Vec<([i64; 3], usize)> = match &small {
        Some(vs) => (0..samples as u64).into_par_iter().map(|i| sweep_sample(vs, seed, i)).collect(),
        None => (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                loop {
                    let d = random_direction(&mut rng, SWEEP_BOUND);
                    let dir = Direction::new(d.clone()).unwrap();
                    if let Ok(c) = local_maxima_count(poly, &dir) {
                        let di = [d[0].to_i64().unwrap(), d[1].to_i64().unwrap(), d[2].to_i64().unwrap()];
                        return (di, c);
                    }
                }
            })
            .collect(),
    };
    let mut min_i = 0;
    let mut max_i = 0;
    for (i, r) in results.iter().enumerate() {
        if r.1 < results[min_i].1 {
            min_i = i;
        }
        if r.1 > results[max_i].1 {
            max_i = i;
        }
    }
    let dir = |i: usize| {
        let d = results[i].0;
        Direction::from_i64(d[0], d[1], d[2])
    };
    Ok(SweepResult {
        samples,
        min_count: results[min_i].1,
        max_count: results[max_i].1,
        min_witness: dir(min_i)?,
        max_witness: dir(max_i)?,
    })
}

/// Exact squared edge lengths in geometric units; entry `i` is the edge from
/// vertex `i` to vertex `i + 1`.
pub fn edge_lengths_squared(poly: &Polygon3) -> Vec<BigRational> {
    let n = poly.len();
    let s2 = poly.scale() * poly.scale();
    (0..n)
        .map(|i| {
            let e = sub(&poly.vertices[(i + 1) % n], &poly.vertices[i]);
            BigRational::from_integer(dot(&e, &e)) * &s2
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilateralCheck {
    pub equilateral: bool,
    /// `max |L_i - L| / L` with `L^2` the mean squared length. Approximate,
    /// for display only.
    pub max_rel_deviation: f64,
    /// Exact `max |L_i^2 - L^2| / L^2`.
    pub max_sq_rel_deviation: BigRational,
}

/// Decides `|L_i - L| <= rel_tol * L` for every edge exactly, by comparing
/// `L_i^2` against `(1 +- rel_tol)^2 L^2`.
pub fn check_equilateral(poly: &Polygon3, rel_tol: &BigRational) -> EquilateralCheck {
    assert!(rel_tol.is_positive(), "tolerance must be positive");
    let sq = edge_lengths_squared(poly);
    let n = BigRational::from_integer(BigInt::from(sq.len()));
    let mean = sq.iter().fold(BigRational::zero(), |acc, x| acc + x) / n;
    let one = BigRational::one();
    let hi = (&one + rel_tol) * (&one + rel_tol) * &mean;
    let lo_factor = &one - rel_tol;
    let lo = if lo_factor.is_positive() { &lo_factor * &lo_factor * &mean } else { BigRational::zero() };
    let equilateral = sq.iter().all(|s| &lo <= s && s <= &hi);
    let max_sq_rel_deviation = sq
        .iter()
        .map(|s| ((s - &mean) / &mean).abs())
        .max()
        .unwrap_or_else(BigRational::zero);
    let max_rel_deviation = sq
        .iter()
        .map(|s| {
            let r = (s / &mean).to_f64().unwrap_or(f64::NAN);
            (r.sqrt() - 1.0).abs()
        })
        .fold(0.0, f64::max);
    EquilateralCheck { equilateral, max_rel_deviation, max_sq_rel_deviation }
}

/// Replaces one vertex, re-checking the polygon invariants.
pub fn move_vertex(poly: &Polygon3, index: usize, new_vertex: Vec3) -> Result<Polygon3, GeomError> {
    if index >= poly.len() {
        return Err(GeomError::IndexOutOfRange { index, len: poly.len() });
    }
    let mut vertices = poly.vertices.clone();
    vertices[index] = new_vertex;
    Polygon3::new(vertices, poly.scale.clone(), poly.name.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn square() -> Polygon3 {
        Polygon3::from_i64(&[[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]).unwrap()
    }

    #[test]
    fn polygon_invariants() {
        assert_eq!(
            Polygon3::from_i64(&[[0, 0, 0], [1, 0, 0]]).unwrap_err(),
            GeomError::TooFewVertices(2)
        );
        assert!(matches!(
            Polygon3::from_i64(&[[0, 0, 0], [1, 0, 0], [1, 0, 0], [0, 1, 0]]),
            Err(GeomError::ZeroEdge(1, 2))
        ));
        // closing edge
        assert!(matches!(
            Polygon3::from_i64(&[[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 0]]),
            Err(GeomError::ZeroEdge(3, 0))
        ));
        assert!(matches!(
            Polygon3::from_i64(&[[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 1, 0]]),
            Err(GeomError::Collinear(0, 1, 2))
        ));
    }

    #[test]
    fn basis_is_orthogonal() {
        for d in [[1, 2, 3], [0, 0, 5], [-7, 7, 1], [3, 3, 3]] {
            let dir = Direction::from_i64(d[0], d[1], d[2]).unwrap();
            assert!(dot(dir.d(), dir.u()).is_zero());
            assert!(dot(dir.d(), dir.v()).is_zero());
            let w = cross(dir.u(), dir.v());
            // u x v is a positive multiple of d
            let k = dot(&w, dir.d());
            assert!(k.is_positive());
            assert!(is_zero(&cross(&w, dir.d())));
        }
        assert_eq!(Direction::from_i64(0, 0, 0).unwrap_err(), GeomError::ZeroDirection);
    }

    #[test]
    fn triangle_lengths() {
        // equilateral triangle on the coordinate axes
        let t = Polygon3::from_i64(&[[1, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap();
        let two = BigRational::from_integer(BigInt::from(2));
        assert_eq!(edge_lengths_squared(&t), vec![two.clone(), two.clone(), two]);
        let tol = BigRational::new(1.into(), 1000.into());
        assert!(check_equilateral(&t, &tol).equilateral);
    }

    #[test]
    fn doubled_edge_is_not_equilateral() {
        let p = Polygon3::from_i64(&[[0, 0, 0], [2, 0, 0], [2, 1, 0], [0, 1, 0]]).unwrap();
        let tol = BigRational::new(1.into(), 1000.into());
        let check = check_equilateral(&p, &tol);
        assert!(!check.equilateral);
        assert!(check.max_rel_deviation > 0.1);
    }

    #[test]
    fn planar_square_in_plane_direction_rejected() {
        let dir = Direction::from_i64(1, 0, 0).unwrap();
        let report = check_regularity(&square(), &dir);
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(matches!(
            report.failure_kind,
            Some(FailureKind::EdgeParallelToDirection) | Some(FailureKind::VertexCoincidence)
        ));
        let dir = Direction::from_i64(1, 1, 0).unwrap();
        assert!(!check_regularity(&square(), &dir).is_regular());
    }

    #[test]
    fn adjacent_tie_detected() {
        // top view of the square: all heights equal
        let dir = Direction::from_i64(0, 0, 1).unwrap();
        let report = check_regularity(&square(), &dir);
        assert_eq!(report.failure_kind, Some(FailureKind::AdjacentHeightTie));
        assert_eq!(local_maxima_count(&square(), &dir), Err(GeomError::NonMorse(0, 1)));
    }

    #[test]
    fn vertex_over_edge_detected() {
        // vertex 4 projects (along z) onto the middle of edge 0-1
        let p = Polygon3::from_i64(&[[0, 0, 0], [4, 0, 1], [4, 4, 2], [3, 2, 3], [2, 0, 5], [0, 4, 4]])
            .unwrap();
        let dir = Direction::from_i64(0, 0, 1).unwrap();
        let report = check_regularity(&p, &dir);
        assert_eq!(report.failure_kind, Some(FailureKind::VertexOverEdge));
        assert_eq!(report.witness, vec![4, 0]);
    }

    #[test]
    fn convex_quadrilateral_has_no_crossings() {
        let p = Polygon3::from_i64(&[[0, 0, 0], [5, 0, 1], [6, 4, 0], [1, 5, 2]]).unwrap();
        let (dir, report) = find_regular_direction(&p, 0, DEFAULT_MAX_REJECTIONS).unwrap();
        assert!(report.is_regular());
        let d = project_to_diagram(&p, &dir).unwrap();
        assert_eq!(d.crossing_count(), 0);
    }

    #[test]
    fn projection_rejects_irregular_direction() {
        let dir = Direction::from_i64(1, 0, 0).unwrap();
        assert!(matches!(project_to_diagram(&square(), &dir), Err(GeomError::NotRegular(_))));
    }

    #[test]
    fn regular_planar_10gon_has_one_maximum() {
        // convex decagon in the plane z = 0
        let pts = [
            [10, 0, 0], [8, 6, 0], [3, 9, 0], [-3, 9, 0], [-8, 6, 0],
            [-10, 0, 0], [-8, -6, 0], [-3, -9, 0], [3, -9, 0], [8, -6, 0],
        ];
        let p = Polygon3::from_i64(&pts).unwrap();
        let dir = Direction::from_i64(7, 3, 0).unwrap();
        assert_eq!(local_maxima_count(&p, &dir).unwrap(), 1);
        assert_eq!(local_minima_count(&p, &dir).unwrap(), 1);
    }

    #[test]
    fn move_vertex_cases() {
        let p = square();
        assert_eq!(move_vertex(&p, 2, vec3(1, 1, 0)).unwrap(), p);
        assert!(matches!(move_vertex(&p, 2, vec3(0, 1, 0)), Err(GeomError::ZeroEdge(2, 3))));
        assert!(matches!(move_vertex(&p, 9, vec3(0, 1, 0)), Err(GeomError::IndexOutOfRange { .. })));
        let q = move_vertex(&p, 2, vec3(1, 1, 3)).unwrap();
        assert_eq!(q.vertices()[2], vec3(1, 1, 3));
        assert_eq!(q.vertices()[0], p.vertices()[0]);
    }

    #[test]
    fn sweep_is_deterministic() {
        let p = Polygon3::from_i64(&[[0, 0, 0], [5, 0, 1], [6, 4, 0], [1, 5, 2], [-2, 3, 7]]).unwrap();
        let a = direction_sweep(&p, 200, 11).unwrap();
        let b = direction_sweep(&p, 200, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.min_count >= 1 && a.max_count <= 2);
        assert_eq!(local_maxima_count(&p, &a.max_witness).unwrap(), a.max_count);
        assert_eq!(local_maxima_count(&p, &a.min_witness).unwrap(), a.min_count);
    }
}
