//! Deliberately naive reference computations on plain data. Nothing here
//! shares code with the library under test: the geometry uses a different
//! formulation (line-to-line closest approach along `d` instead of a
//! projection basis), arcs come from a union-find over PD labels, and the
//! algebra is exhaustive enumeration.

use std::collections::{BTreeMap, BTreeSet};

type V3 = [i128; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: V3, b: V3) -> i128 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn widen(p: [i64; 3]) -> V3 {
    [p[0] as i128, p[1] as i128, p[2] as i128]
}

/// `(over edge, under edge, sign)` for every pair of non-adjacent edges whose
/// projections along `d` cross at interior points of both. Edge `i` joins
/// vertex `i` to vertex `i + 1`. Sign is that of `(e_over x e_under) . d`.
/// Assumes `d` is a regular direction for the polygon.
pub fn segment_crossings(points: &[[i64; 3]], d: [i64; 3]) -> Vec<(usize, usize, i8)> {
    let n = points.len();
    let d = widen(d);
    let p: Vec<V3> = points.iter().map(|&x| widen(x)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if j <= i || j == (i + 1) % n || i == (j + 1) % n {
                continue;
            }
            let (p0, p1) = (p[i], p[(i + 1) % n]);
            let (q0, q1) = (p[j], p[(j + 1) % n]);
            let e = sub(p1, p0);
            let f = sub(q1, q0);
            let w = sub(p0, q0);
            // need (w + t e - s f) x d = 0
            let (ex, fx, wx) = (cross(e, d), cross(f, d), cross(w, d));
            // solve t ex - s fx = -wx on the component pair with a nonzero determinant
            let mut sol = None;
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                let det = -ex[a] * fx[b] + fx[a] * ex[b];
                if det != 0 {
                    let t_num = wx[a] * fx[b] - fx[a] * wx[b];
                    let s_num = wx[a] * ex[b] - ex[a] * wx[b];
                    sol = Some((t_num, s_num, det));
                    break;
                }
            }
            let Some((t_num, s_num, det)) = sol else { continue };
            let (t_num, s_num, det) = if det < 0 { (-t_num, -s_num, -det) } else { (t_num, s_num, det) };
            if t_num <= 0 || t_num >= det || s_num <= 0 || s_num >= det {
                continue;
            }
            // residual check of the third equation
            let r: V3 = [
                wx[0] * det + t_num * ex[0] - s_num * fx[0],
                wx[1] * det + t_num * ex[1] - s_num * fx[1],
                wx[2] * det + t_num * ex[2] - s_num * fx[2],
            ];
            assert_eq!(r, [0, 0, 0], "inconsistent crossing solve");
            // height of P(t) minus height of Q(s), scaled by det > 0
            let gap = dot(w, d) * det + t_num * dot(e, d) - s_num * dot(f, d);
            assert!(gap != 0, "edges {i} and {j} intersect in space");
            let (over, under, eo, eu) = if gap > 0 { (i, j, e, f) } else { (j, i, f, e) };
            let sign = if dot(cross(eo, eu), d) > 0 { 1 } else { -1 };
            out.push((over, under, sign));
        }
    }
    out.sort();
    out
}

/// Number of vertices strictly above both neighbours along `d`.
pub fn maxima(points: &[[i64; 3]], d: [i64; 3]) -> usize {
    let h: Vec<i128> = points.iter().map(|&p| dot(widen(p), widen(d))).collect();
    let n = h.len();
    (0..n).filter(|&i| h[i] > h[(i + n - 1) % n] && h[i] > h[(i + 1) % n]).count()
}

fn find(p: &mut [usize], x: usize) -> usize {
    if p[x] != x {
        let r = find(p, p[x]);
        p[x] = r;
    }
    p[x]
}

/// Wirtinger data read straight off a PD code: arcs are the classes of edge
/// labels glued through over-passes (`b ~ d` in `X[a,b,c,d]`).
pub struct Arcs {
    /// Arc index of each edge label (index 0 unused).
    pub arc_of_edge: Vec<usize>,
    pub arc_count: usize,
    /// `(over, incoming under, outgoing under)` per crossing.
    pub relations: Vec<(usize, usize, usize)>,
}

pub fn arcs_from_pd(pd: &[[u32; 4]]) -> Arcs {
    let labels = 2 * pd.len();
    let mut parent: Vec<usize> = (0..=labels).collect();
    for x in pd {
        let (a, b) = (find(&mut parent, x[1] as usize), find(&mut parent, x[3] as usize));
        parent[a] = b;
    }
    let mut index = vec![usize::MAX; labels + 1];
    let mut arc_of_edge = vec![usize::MAX; labels + 1];
    let mut count = 0;
    for (l, slot) in arc_of_edge.iter_mut().enumerate().skip(1) {
        let r = find(&mut parent, l);
        if index[r] == usize::MAX {
            index[r] = count;
            count += 1;
        }
        *slot = index[r];
    }
    let relations = pd
        .iter()
        .map(|x| (arc_of_edge[x[1] as usize], arc_of_edge[x[0] as usize], arc_of_edge[x[2] as usize]))
        .collect();
    Arcs { arc_of_edge, arc_count: count.max(1), relations }
}

fn conj(o: (u8, u8), a: (u8, u8)) -> (u8, u8) {
    let m = |x: u8| if x == o.0 { o.1 } else if x == o.1 { o.0 } else { x };
    let (x, y) = (m(a.0), m(a.1));
    (x.min(y), x.max(y))
}

fn generates(ts: &[(u8, u8)], n: u8) -> bool {
    let mut p: Vec<usize> = (0..=n as usize).collect();
    for &(a, b) in ts {
        let (ra, rb) = (find(&mut p, a as usize), find(&mut p, b as usize));
        p[ra] = rb;
    }
    let r = find(&mut p, 1);
    (1..=n as usize).all(|x| find(&mut p, x) == r)
}

/// Every transposition assignment (as a per-edge-label vector, index 0
/// unused) that satisfies all relations and generates `S_n`.
pub fn all_surjections(arcs: &Arcs, n: u8) -> BTreeSet<Vec<(u8, u8)>> {
    let ts: Vec<(u8, u8)> = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect();
    let k = arcs.arc_count;
    let mut out = BTreeSet::new();
    let mut idx = vec![0usize; k];
    loop {
        let lab: Vec<(u8, u8)> = idx.iter().map(|&i| ts[i]).collect();
        if arcs.relations.iter().all(|&(o, a, b)| conj(lab[o], lab[a]) == lab[b]) && generates(&lab, n) {
            let per_edge = arcs.arc_of_edge.iter().map(|&a| if a == usize::MAX { (0, 0) } else { lab[a] }).collect();
            out.insert(per_edge);
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == k {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < ts.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Number of arc labelings in `Z/p` with `2 over = in + out` everywhere.
pub fn count_colorings(arcs: &Arcs, p: u64) -> u64 {
    let k = arcs.arc_count as u32;
    let mut count = 0;
    for code in 0..p.pow(k) {
        let lab: Vec<u64> = (0..k).map(|i| code / p.pow(i) % p).collect();
        if arcs.relations.iter().all(|&(o, a, b)| (2 * lab[o] + 2 * p - lab[a] - lab[b]).is_multiple_of(p)) {
            count += 1;
        }
    }
    count
}

/// Whether the closed polygon fails to be embedded: two non-adjacent edges
/// meet, or two adjacent edges fold back onto each other.
pub fn is_singular(points: &[[i64; 3]]) -> bool {
    let n = points.len();
    let p: Vec<V3> = points.iter().map(|&v| widen(v)).collect();
    let edge = |i: usize| (p[i], sub(p[(i + 1) % n], p[i]));
    for i in 0..n {
        for j in i + 1..n {
            let ((a, u), (b, v)) = (edge(i), edge(j));
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let uv = cross(u, v);
            if adjacent {
                if n == 3 {
                    // a triangle is singular only if degenerate
                    if uv == [0, 0, 0] {
                        return true;
                    }
                    continue;
                }
                // shared vertex; singular only when folding back along a line
                let (first, second) = if j == i + 1 { (u, v) } else { (v, u) };
                if cross(first, second) == [0, 0, 0] && dot(first, second) < 0 {
                    return true;
                }
                continue;
            }
            let w = sub(b, a);
            if uv != [0, 0, 0] {
                if dot(w, uv) != 0 {
                    continue;
                }
                let den = dot(uv, uv);
                let s = dot(cross(w, v), uv);
                let t = dot(cross(w, u), uv);
                if (0..=den).contains(&s) && (0..=den).contains(&t) {
                    return true;
                }
            } else if cross(w, u) == [0, 0, 0] {
                let (x, y) = (dot(w, u), dot(sub(b, a), u) + dot(v, u));
                if x.min(y).max(0) <= x.max(y).min(dot(u, u)) {
                    return true;
                }
            }
        }
    }
    false
}

/// Crossing sign read off the labels: the over strand runs `d -> b` on a
/// positive crossing and `b -> d` on a negative one.
pub fn pd_sign(x: [u32; 4], crossings: usize) -> i8 {
    let next = |l: u32| l % (2 * crossings as u32) + 1;
    if x[1] == next(x[3]) {
        1
    } else {
        assert_eq!(x[3], next(x[1]), "over strand labels are not consecutive");
        -1
    }
}

type Poly = Vec<i64>;

fn padd(a: &Poly, b: &Poly) -> Poly {
    (0..a.len().max(b.len())).map(|i| a.get(i).unwrap_or(&0) + b.get(i).unwrap_or(&0)).collect()
}

fn pmul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![0; a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Cofactor expansion along the first row.
fn laplace(m: &[Vec<Poly>]) -> Poly {
    if m.is_empty() {
        return vec![1];
    }
    let mut total = vec![0];
    for j in 0..m.len() {
        if m[0][j].iter().all(|&c| c == 0) {
            continue;
        }
        let minor: Vec<Vec<Poly>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, p)| p.clone()).collect()).collect();
        let mut term = pmul(&m[0][j], &laplace(&minor));
        if j % 2 == 1 {
            term.iter_mut().for_each(|c| *c = -*c);
        }
        total = padd(&total, &term);
    }
    total
}

/// Alexander polynomial coefficients, lowest power first, with the lowest
/// power shifted to 0 and the top coefficient made positive. Exponential in
/// the crossing count.
pub fn alexander(pd: &[[u32; 4]]) -> Vec<i64> {
    if pd.len() <= 1 {
        return vec![1];
    }
    let arcs = arcs_from_pd(pd);
    let k = arcs.arc_count;
    let mut m = vec![vec![vec![0i64; 2]; k]; k];
    for (i, (&(o, a, b), x)) in arcs.relations.iter().zip(pd).enumerate() {
        let add = |m: &mut Vec<Vec<Poly>>, j: usize, c0: i64, c1: i64| {
            m[i][j][0] += c0;
            m[i][j][1] += c1;
        };
        if pd_sign(*x, pd.len()) > 0 {
            add(&mut m, o, 1, -1);
            add(&mut m, a, 0, 1);
            add(&mut m, b, -1, 0);
        } else {
            add(&mut m, o, -1, 1);
            add(&mut m, a, 1, 0);
            add(&mut m, b, 0, -1);
        }
    }
    let minor: Vec<Vec<Poly>> = m[..k - 1].iter().map(|r| r[..k - 1].to_vec()).collect();
    let mut p = laplace(&minor);
    while p.last() == Some(&0) {
        p.pop();
    }
    let lead = p.iter().position(|&c| c != 0).expect("Alexander determinant vanished");
    p.drain(..lead);
    if *p.last().unwrap() < 0 {
        p.iter_mut().for_each(|c| *c = -*c);
    }
    p
}

/// Unnormalized Kauffman bracket `<D>` by summing over all `2^c` states;
/// `(exponent of A, coefficient)`, zero terms dropped.
pub fn bracket(pd: &[[u32; 4]]) -> BTreeMap<i64, i64> {
    let c = pd.len();
    let mut out: BTreeMap<i64, i64> = BTreeMap::new();
    if c == 0 {
        out.insert(0, 1);
        return out;
    }
    for state in 0u64..1 << c {
        let mut parent: Vec<usize> = (0..=2 * c).collect();
        let mut a_count = 0i64;
        for (i, x) in pd.iter().enumerate() {
            let x = x.map(|l| l as usize);
            let pairs = if state >> i & 1 == 0 {
                a_count += 1;
                [(x[0], x[1]), (x[2], x[3])]
            } else {
                [(x[0], x[3]), (x[1], x[2])]
            };
            for (u, v) in pairs {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                parent[ru] = rv;
            }
        }
        let loops = (1..=2 * c).filter(|&l| find(&mut parent, l) == l).count();
        // A^(a - b) * (-A^2 - A^-2)^(loops - 1)
        let mut term: BTreeMap<i64, i64> = BTreeMap::from([(a_count - (c as i64 - a_count), 1)]);
        for _ in 1..loops {
            let mut next = BTreeMap::new();
            for (&e, &k) in &term {
                *next.entry(e + 2).or_insert(0) -= k;
                *next.entry(e - 2).or_insert(0) -= k;
            }
            term = next;
        }
        for (e, k) in term {
            *out.entry(e).or_insert(0) += k;
        }
    }
    out.retain(|_, k| *k != 0);
    out
}
