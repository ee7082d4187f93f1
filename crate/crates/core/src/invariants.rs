//! Diagram invariants used to identify knots and cross-check the pipeline:
//! Alexander polynomial (Fox calculus on the Wirtinger presentation),
//! determinant, Fox p-coloring counts and the normalized Kauffman bracket.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::{Diagram, Sign};

/// Laurent polynomial with big-integer coefficients; zero coefficients are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn monomial(coeff: impl Into<BigInt>, exp: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff.into());
        p
    }

    /// From `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<C: Into<BigInt>>(terms: impl IntoIterator<Item = (i64, C)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    fn add_term(&mut self, exp: i64, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn shift(&self, k: i64) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, x)| (*e, x * c)))
    }

    /// `t -> t^-1`.
    pub fn invert_variable(&self) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect() }
    }

    pub fn eval(&self, t: &BigInt) -> Option<BigInt> {
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let e = *e;
            if e >= 0 {
                acc += c * t.pow(e as u32);
            } else {
                if t.is_zero() {
                    return None;
                }
                let d = t.pow((-e) as u32);
                let (q, r) = c.div_rem(&d);
                if !r.is_zero() {
                    return None;
                }
                acc += q;
            }
        }
        Some(acc)
    }

    /// Representative of `{+-t^k p}` with lowest exponent 0 and positive
    /// leading coefficient.
    pub fn normalized(&self) -> Self {
        let Some(lo) = self.min_exp() else { return Self::zero() };
        let p = self.shift(-lo);
        let lead = p.terms.values().next_back().unwrap();
        if lead.is_negative() {
            p.scale(&BigInt::from(-1))
        } else {
            p
        }
    }

    /// Renders with variable `var`, ascending exponents, e.g.
    /// `1 - 1*t + 1*t^2` or `-1*A^-3`.
    pub fn render(&self, var: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            out.push_str(&mag.to_string());
            match e {
                0 => {}
                1 => out.push_str(&format!("*{var}")),
                _ => out.push_str(&format!("*{var}^{e}")),
            }
        }
        out
    }

    /// Inverse of [`LaurentPoly::render`].
    pub fn parse(text: &str, var: &str) -> Result<Self, PolyParseError> {
        let text = text.trim();
        if text == "0" {
            return Ok(Self::zero());
        }
        let err = || PolyParseError(text.to_string());
        let mut tokens = text.split(' ').filter(|s| !s.is_empty());
        let mut p = Self::zero();
        let mut sign = BigInt::one();
        let mut first = true;
        while let Some(tok) = tokens.next() {
            let term = if first {
                first = false;
                if let Some(rest) = tok.strip_prefix('-') {
                    sign = BigInt::from(-1);
                    rest
                } else {
                    tok
                }
            } else {
                sign = match tok {
                    "+" => BigInt::one(),
                    "-" => BigInt::from(-1),
                    _ => return Err(err()),
                };
                tokens.next().ok_or_else(err)?
            };
            let (coeff, exp) = match term.split_once('*') {
                None => (term, 0i64),
                Some((c, v)) => {
                    let rest = v.strip_prefix(var).ok_or_else(err)?;
                    let exp = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^').ok_or_else(err)?.parse().map_err(|_| err())?
                    };
                    (c, exp)
                }
            };
            let coeff: BigInt = coeff.parse().map_err(|_| err())?;
            if coeff.is_negative() {
                return Err(err());
            }
            p.add_term(exp, &sign * coeff);
        }
        Ok(p)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed polynomial `{0}`")]
pub struct PolyParseError(pub String);

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}

impl std::ops::Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(*e, c.clone());
        }
        p
    }
}

impl std::ops::Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                p.add_term(e1 + e2, c1 * c2);
            }
        }
        p
    }
}

/// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Newton interpolation through integer nodes. Divided differences of an
/// integer polynomial at integer nodes are integers, so division is exact.
fn interpolate(nodes: &[BigInt], values: &[BigInt]) -> LaurentPoly {
    let n = nodes.len();
    let mut coef: Vec<BigInt> = values.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = &coef[i] - &coef[i - 1];
            let den = &nodes[i] - &nodes[i - j];
            debug_assert!((&num % &den).is_zero());
            coef[i] = num / den;
        }
    }
    // expand the Newton form
    let mut poly: Vec<BigInt> = vec![BigInt::zero(); n];
    for k in (0..n).rev() {
        // poly = poly * (t - nodes[k]) + coef[k]
        let mut next = vec![BigInt::zero(); n];
        for d in 0..n - 1 {
            next[d + 1] += &poly[d];
            next[d] -= &poly[d] * &nodes[k];
        }
        next[0] += &coef[k];
        poly = next;
    }
    LaurentPoly::from_terms(poly.into_iter().enumerate().map(|(e, c)| (e as i64, c)))
}

/// Rows of the Alexander matrix: abelianized Fox derivatives of each
/// Wirtinger relation, scaled by `t` on negative crossings so every entry is
/// a polynomial `c0 + c1 t`.
fn alexander_rows(diagram: &Diagram) -> Vec<Vec<[i64; 2]>> {
    let pres = diagram.wirtinger();
    let n = pres.arc_count();
    pres.relations()
        .iter()
        .map(|r| {
            let mut row = vec![[0i64; 2]; n];
            match r.sign {
                // o a o^-1 b^-1: (1 - t) at o, t at a, -1 at b
                Sign::Positive => {
                    row[r.over][0] += 1;
                    row[r.over][1] -= 1;
                    row[r.incoming][1] += 1;
                    row[r.outgoing][0] -= 1;
                }
                // t * (o^-1 a o b^-1): (t - 1) at o, 1 at a, -t at b
                Sign::Negative => {
                    row[r.over][1] += 1;
                    row[r.over][0] -= 1;
                    row[r.incoming][0] += 1;
                    row[r.outgoing][1] -= 1;
                }
            }
            row
        })
        .collect()
}

/// Normalized Alexander polynomial: determinant of the Alexander matrix with
/// the last row and column deleted, interpolated exactly from its values at
/// the `2c + 1` integers `-c..=c`.
pub fn alexander(diagram: &Diagram) -> LaurentPoly {
    let c = diagram.crossing_count();
    if c <= 1 {
        return LaurentPoly::one();
    }
    let rows = alexander_rows(diagram);
    let m = c - 1;
    let nodes: Vec<BigInt> = (-(c as i64)..=(c as i64)).map(BigInt::from).collect();
    let values: Vec<BigInt> = nodes
        .par_iter()
        .map(|t| {
            let mat = (0..m)
                .map(|i| (0..m).map(|j| BigInt::from(rows[i][j][0]) + BigInt::from(rows[i][j][1]) * t).collect())
                .collect();
            bareiss_determinant(mat)
        })
        .collect();
    let p = interpolate(&nodes, &values);
    debug_assert!(p.max_exp().unwrap_or(0) < c as i64);
    p.normalized()
}

/// `|Delta(-1)|`.
pub fn determinant(diagram: &Diagram) -> BigUint {
    alexander(diagram)
        .eval(&BigInt::from(-1))
        .expect("normalized Alexander polynomial has no negative powers")
        .magnitude()
        .clone()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringCount {
    pub p: u64,
    /// The count is `p^nullity`.
    pub nullity: usize,
}

impl ColoringCount {
    pub fn count(&self) -> BigUint {
        BigUint::from(self.p).pow(self.nullity as u32)
    }

    /// More than the `p` constant colorings.
    pub fn has_nontrivial(&self) -> bool {
        self.nullity > 1
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{crossings} crossings exceed the bracket cap of {cap}")]
    CapExceeded { crossings: usize, cap: usize },
}

/// Rank of an integer matrix over `F_p`.
fn rank_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !m[r][col].is_multiple_of(p)) else { continue };
        m.swap(rank, piv);
        let inv = mod_pow(m[rank][col], p - 2, p);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Counts arc labelings in `Z/p` with `2 over = under_in + under_out` at
/// every crossing, as `p^(arcs - rank)`.
pub fn count_colorings(diagram: &Diagram, p: u64) -> Result<ColoringCount, InvariantError> {
    if !is_prime(p) {
        return Err(InvariantError::NotPrime(p));
    }
    let pres = diagram.wirtinger();
    let n = pres.arc_count();
    let rows: Vec<Vec<u64>> = pres
        .relations()
        .iter()
        .map(|r| {
            let mut row = vec![0i64; n];
            row[r.over] += 2;
            row[r.incoming] -= 1;
            row[r.outgoing] -= 1;
            row.into_iter().map(|v| v.rem_euclid(p as i64) as u64).collect()
        })
        .collect();
    let rank = rank_mod_p(rows, p);
    Ok(ColoringCount { p, nullity: n - rank })
}

pub const DEFAULT_CROSSING_CAP: usize = 24;

/// Writhe-normalized Kauffman bracket `(-A^3)^-w <D>` in the variable `A`,
/// computed on the RI/RII-simplified diagram. The A-smoothing of
/// `X[a, b, c, d]` joins `a` with `b` and `c` with `d`.
pub fn kauffman_bracket(diagram: &Diagram, crossing_cap: usize) -> Result<LaurentPoly, InvariantError> {
    let d = diagram.simplify();
    let c = d.crossing_count();
    if c > crossing_cap {
        return Err(InvariantError::CapExceeded { crossings: c, cap: crossing_cap });
    }
    let bracket = raw_bracket(&d);
    let w = d.writhe() as i64;
    let sign = if w.rem_euclid(2) == 0 { 1 } else { -1 };
    Ok(bracket.shift(-3 * w).scale(&BigInt::from(sign)))
}

/// Unnormalized bracket with `<O> = 1`.
pub fn raw_bracket(diagram: &Diagram) -> LaurentPoly {
    let c = diagram.crossing_count();
    if c == 0 {
        return LaurentPoly::one();
    }
    let edges = diagram.edge_count() as usize;
    let slots: Vec<[u32; 4]> = diagram.crossings().iter().map(|x| x.slots).collect();
    // table[k][loops]: states with k A-smoothings and that many loops
    let chunk_bits = c.min(10);
    let high_states: u64 = 1 << (c - chunk_bits);
    let count_loops = |state: u64, parent: &mut Vec<usize>| -> usize {
        for (i, p) in parent.iter_mut().enumerate() {
            *p = i;
        }
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut loops = edges;
        for (i, s) in slots.iter().enumerate() {
            let pairs = if state >> i & 1 == 1 { [(s[0], s[1]), (s[2], s[3])] } else { [(s[0], s[3]), (s[1], s[2])] };
            for (a, b) in pairs {
                let (ra, rb) = (find(parent, a as usize), find(parent, b as usize));
                if ra != rb {
                    parent[ra] = rb;
                    loops -= 1;
                }
            }
        }
        loops
    };
    let table: Vec<Vec<u64>> = (0..high_states)
        .into_par_iter()
        .map(|hi| {
            let mut local = vec![vec![0u64; edges + 2]; c + 1];
            let mut parent = vec![0usize; edges + 1];
            for lo in 0..(1u64 << chunk_bits) {
                let state = (hi << chunk_bits) | lo;
                let loops = count_loops(state, &mut parent);
                local[state.count_ones() as usize][loops] += 1;
            }
            local
        })
        .reduce(
            || vec![vec![0u64; edges + 2]; c + 1],
            |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
                a
            },
        );
    // delta = -A^2 - A^-2
    let delta = LaurentPoly::from_terms([(2, -1), (-2, -1)]);
    let mut delta_pow = vec![LaurentPoly::one()];
    for i in 1..=edges {
        let next = &delta_pow[i - 1] * &delta;
        delta_pow.push(next);
    }
    let mut total = LaurentPoly::zero();
    for (k, row) in table.iter().enumerate() {
        for (loops, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let a_exp = k as i64 - (c - k) as i64;
            let term = delta_pow[loops - 1].shift(a_exp).scale(&BigInt::from(count));
            total = &total + &term;
        }
    }
    total
}

/// Nontrivial by a computed invariant: determinant other than 1, a nontrivial
/// 3-coloring, or Alexander polynomial other than 1.
pub fn detects_nontrivial(diagram: &Diagram) -> bool {
    let alex = alexander(diagram);
    alex != LaurentPoly::one()
        || determinant(diagram).to_u64() != Some(1)
        || count_colorings(diagram, 3).map(|c| c.has_nontrivial()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    fn trefoil() -> Diagram {
        parse_pd("X 1,5,2,4\nX 3,1,4,6\nX 5,3,6,2\n").unwrap()
    }

    #[test]
    fn render_and_parse() {
        let p = LaurentPoly::from_terms([(0, 1), (1, -1), (2, 1)]);
        assert_eq!(p.render("t"), "1 - 1*t + 1*t^2");
        assert_eq!(LaurentPoly::parse("1 - 1*t + 1*t^2", "t").unwrap(), p);
        let q = LaurentPoly::from_terms([(-3, -1), (4, 12)]);
        assert_eq!(q.render("A"), "-1*A^-3 + 12*A^4");
        assert_eq!(LaurentPoly::parse(&q.render("A"), "A").unwrap(), q);
        assert_eq!(LaurentPoly::zero().render("t"), "0");
        assert!(LaurentPoly::parse("1 + + 2", "t").is_err());
    }

    #[test]
    fn normalization() {
        let p = LaurentPoly::from_terms([(-2, -1), (-1, 1), (0, -1)]);
        assert_eq!(p.normalized(), LaurentPoly::from_terms([(0, 1), (1, -1), (2, 1)]));
    }

    #[test]
    fn bareiss_small() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(1), BigInt::from(3)],
            vec![BigInt::from(0), BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(4), BigInt::from(5), BigInt::from(6)],
        ];
        // 2(0*6-1*5) - 1(0*6-1*4) + 3(0*5-0*4) = -10 + 4
        assert_eq!(bareiss_determinant(m), BigInt::from(-6));
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = LaurentPoly::from_terms([(0, 3), (2, -5), (3, 2)]);
        let nodes: Vec<BigInt> = (-4..=4).map(BigInt::from).collect();
        let values: Vec<BigInt> = nodes.iter().map(|t| p.eval(t).unwrap()).collect();
        assert_eq!(interpolate(&nodes, &values), p);
    }

    #[test]
    fn trefoil_invariants() {
        let d = trefoil();
        assert_eq!(alexander(&d).to_string(), "1 - 1*t + 1*t^2");
        assert_eq!(determinant(&d), BigUint::from(3u32));
        assert_eq!(count_colorings(&d, 3).unwrap().count(), BigUint::from(9u32));
        assert_eq!(count_colorings(&d, 5).unwrap().count(), BigUint::from(5u32));
        assert!(detects_nontrivial(&d));
    }

    #[test]
    fn unknot_invariants() {
        let u = Diagram::unknot();
        assert_eq!(alexander(&u), LaurentPoly::one());
        assert_eq!(determinant(&u), BigUint::from(1u32));
        assert_eq!(count_colorings(&u, 5).unwrap().count(), BigUint::from(5u32));
        assert_eq!(kauffman_bracket(&u, 24).unwrap(), LaurentPoly::one());
        assert!(!detects_nontrivial(&u));
        assert_eq!(count_colorings(&u, 4), Err(InvariantError::NotPrime(4)));
    }

    #[test]
    fn positive_kink_bracket() {
        let kink = Diagram::from_pd(&[[1, 1, 2, 2]]).unwrap();
        assert_eq!(raw_bracket(&kink), LaurentPoly::monomial(-1, 3));
        // the normalized version is computed after simplification
        assert_eq!(kauffman_bracket(&kink, 24).unwrap(), LaurentPoly::one());
        // and also directly from the raw bracket
        let w = kink.writhe() as i64;
        assert_eq!(raw_bracket(&kink).shift(-3 * w).scale(&BigInt::from(-1)), LaurentPoly::one());
    }

    #[test]
    fn trefoil_bracket_is_chiral() {
        let d = trefoil();
        let f = kauffman_bracket(&d, 24).unwrap();
        let g = kauffman_bracket(&d.mirror(), 24).unwrap();
        assert_ne!(f, g);
        assert_eq!(g, f.invert_variable());
        // positive trefoil: -A^-16 + A^-12 + A^-4 by the 8-state expansion
        assert_eq!(f, LaurentPoly::from_terms([(-16, -1), (-12, 1), (-4, 1)]));
    }

    #[test]
    fn bracket_cap() {
        assert_eq!(
            kauffman_bracket(&trefoil(), 2),
            Err(InvariantError::CapExceeded { crossings: 3, cap: 2 })
        );
    }
}
