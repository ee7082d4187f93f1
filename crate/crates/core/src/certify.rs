//! Interval bookkeeping for bridge index, superbridge index and stick number.
//!
//! Facts only ever tighten, and each tightening is recorded as a [`Step`]
//! citing one rule and the bound or witness it was derived from:
//!
//! - `STICK_UPPER_FROM_WITNESS`: a closed polygon with `n` edges gives
//!   `stick <= n`.
//! - `BRIDGE_LOWER_FROM_HOM`: a surjection onto `S_n` sending meridians to
//!   transpositions gives `bridge >= n - 1`.
//! - `KUIPER`: `bridge < superbridge` for nontrivial knots.
//! - `RANDELL`: `superbridge <= stick / 2`.
//!
//! Intervals are integer intervals, so rounding (`floor(stick / 2)`) is part
//! of each rule rather than a separate squeeze step.

use std::fmt;

use thiserror::Error;

use crate::geom::Polygon3;
use crate::quotients::HomCertificate;

/// Closed integer interval `[lo, hi]`; `hi = None` means unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: u32,
    pub hi: Option<u32>,
}

impl Interval {
    pub fn at_least(lo: u32) -> Self {
        Self { lo, hi: None }
    }

    pub fn new(lo: u32, hi: u32) -> Self {
        Self { lo, hi: Some(hi) }
    }

    pub fn is_empty(&self) -> bool {
        self.hi.is_some_and(|h| h < self.lo)
    }

    pub fn exact(&self) -> Option<u32> {
        (self.hi == Some(self.lo)).then_some(self.lo)
    }

    pub fn contains(&self, x: u32) -> bool {
        x >= self.lo && self.hi.is_none_or(|h| x <= h)
    }

    fn hi_text(&self) -> String {
        self.hi.map_or_else(|| "inf".to_string(), |h| h.to_string())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi_text())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    Bridge,
    Superbridge,
    Stick,
}

impl Quantity {
    pub fn key(self) -> &'static str {
        match self {
            Quantity::Bridge => "bridge",
            Quantity::Superbridge => "sb",
            Quantity::Stick => "stick",
        }
    }

    fn long_name(self) -> &'static str {
        match self {
            Quantity::Bridge => "bridge",
            Quantity::Superbridge => "superbridge",
            Quantity::Stick => "stick",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Lo,
    Hi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bound {
    pub quantity: Quantity,
    pub side: Side,
}

impl Bound {
    const fn new(quantity: Quantity, side: Side) -> Self {
        Self { quantity, side }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Lo => "lo",
            Side::Hi => "hi",
        };
        write!(f, "{}.{}", self.quantity.key(), side)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    StickUpperFromWitness,
    BridgeLowerFromHom,
    Kuiper,
    Randell,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::StickUpperFromWitness => "STICK_UPPER_FROM_WITNESS",
            Rule::BridgeLowerFromHom => "BRIDGE_LOWER_FROM_HOM",
            Rule::Kuiper => "KUIPER",
            Rule::Randell => "RANDELL",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Evidence attached to a set of facts, kept as the numbers the rules read.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Witness {
    Polygon { name: String, sticks: u32 },
    Hom { fingerprint: String, degree: u8 },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Polygon { name, sticks } => write!(f, "polygon {name} with {sticks} sticks"),
            Witness::Hom { fingerprint, degree } => {
                let short = &fingerprint[..fingerprint.len().min(12)];
                write!(f, "S_{degree} labeling of diagram {short}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Premise {
    /// Index into [`KnotFacts::witnesses`].
    Witness(usize),
    /// The value a bound had when the rule fired.
    Bound(Bound, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub rule: Rule,
    pub target: Bound,
    pub value: u32,
    pub premise: Premise,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("{name}: {quantity} interval {interval} is empty after {rule}\n{chain}")]
    Contradiction {
        name: String,
        quantity: &'static str,
        interval: Interval,
        rule: Rule,
        chain: String,
    },
    #[error("homomorphism certificate has failing relations")]
    UnverifiedCertificate,
    #[error("step {index}: {message}")]
    Replay { index: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnotFacts {
    name: String,
    nontrivial: bool,
    bridge: Interval,
    superbridge: Interval,
    stick: Interval,
    derivation: Vec<Step>,
    witnesses: Vec<Witness>,
}

impl KnotFacts {
    /// Definitional bounds only: `bridge >= 1`, `superbridge >= 1` (2 when
    /// nontrivial), `stick >= 3`.
    pub fn new(name: impl Into<String>, nontrivial: bool) -> Self {
        Self {
            name: name.into(),
            nontrivial,
            bridge: Interval::at_least(1),
            superbridge: Interval::at_least(if nontrivial { 2 } else { 1 }),
            stick: Interval::at_least(3),
            derivation: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nontrivial(&self) -> bool {
        self.nontrivial
    }

    pub fn bridge(&self) -> Interval {
        self.bridge
    }

    pub fn superbridge(&self) -> Interval {
        self.superbridge
    }

    pub fn stick(&self) -> Interval {
        self.stick
    }

    pub fn derivation(&self) -> &[Step] {
        &self.derivation
    }

    pub fn witnesses(&self) -> &[Witness] {
        &self.witnesses
    }

    pub fn interval(&self, q: Quantity) -> Interval {
        match q {
            Quantity::Bridge => self.bridge,
            Quantity::Superbridge => self.superbridge,
            Quantity::Stick => self.stick,
        }
    }

    fn interval_mut(&mut self, q: Quantity) -> &mut Interval {
        match q {
            Quantity::Bridge => &mut self.bridge,
            Quantity::Superbridge => &mut self.superbridge,
            Quantity::Stick => &mut self.stick,
        }
    }

    fn bound_value(&self, b: Bound) -> Option<u32> {
        let i = self.interval(b.quantity);
        match b.side {
            Side::Lo => Some(i.lo),
            Side::Hi => i.hi,
        }
    }

    /// Applies one candidate tightening; records a step only if it tightens.
    fn tighten(&mut self, rule: Rule, target: Bound, value: u32, premise: Premise) -> Result<bool, CertifyError> {
        let i = self.interval_mut(target.quantity);
        let changed = match target.side {
            Side::Lo if value > i.lo => {
                i.lo = value;
                true
            }
            Side::Hi if i.hi.is_none_or(|h| value < h) => {
                i.hi = Some(value);
                true
            }
            _ => false,
        };
        if !changed {
            return Ok(false);
        }
        self.derivation.push(Step { rule, target, value, premise });
        let i = self.interval(target.quantity);
        if i.is_empty() {
            return Err(CertifyError::Contradiction {
                name: self.name.clone(),
                quantity: target.quantity.long_name(),
                interval: i,
                rule,
                chain: self.machine_steps(),
            });
        }
        Ok(true)
    }

    fn with_witness(&self, w: Witness) -> (Self, usize) {
        let mut next = self.clone();
        let idx = match next.witnesses.iter().position(|x| *x == w) {
            Some(i) => i,
            None => {
                next.witnesses.push(w);
                next.witnesses.len() - 1
            }
        };
        (next, idx)
    }

    pub fn add_stick_witness(&self, poly: &Polygon3) -> Result<Self, CertifyError> {
        let name = poly.name().unwrap_or("unnamed").to_string();
        self.add_stick_count(name, poly.edge_count() as u32)
    }

    /// Same as [`KnotFacts::add_stick_witness`] from a recorded edge count.
    pub fn add_stick_count(&self, name: impl Into<String>, sticks: u32) -> Result<Self, CertifyError> {
        let (mut next, idx) = self.with_witness(Witness::Polygon { name: name.into(), sticks });
        next.tighten(Rule::StickUpperFromWitness, Bound::new(Quantity::Stick, Side::Hi), sticks, Premise::Witness(idx))?;
        Ok(next)
    }

    /// The certificate must carry an all-pass transcript; re-verifying it
    /// against its presentation is the caller's job.
    pub fn add_hom_certificate(&self, cert: &HomCertificate) -> Result<Self, CertifyError> {
        if cert.transcript.is_empty() && cert.labeling.assignment.len() > 1
            || cert.transcript.iter().any(|r| !r.passed)
        {
            return Err(CertifyError::UnverifiedCertificate);
        }
        self.add_hom_degree(cert.fingerprint.clone(), cert.degree())
    }

    pub fn add_hom_degree(&self, fingerprint: impl Into<String>, degree: u8) -> Result<Self, CertifyError> {
        let (mut next, idx) = self.with_witness(Witness::Hom { fingerprint: fingerprint.into(), degree });
        let value = degree.saturating_sub(1) as u32;
        next.tighten(Rule::BridgeLowerFromHom, Bound::new(Quantity::Bridge, Side::Lo), value, Premise::Witness(idx))?;
        Ok(next)
    }

    /// Bridge index, superbridge index and stick number are all invariant
    /// under mirroring (reflect the polygon; heights along a reflected
    /// direction are unchanged). Each side adopts the other's witnesses, so
    /// after saturation both share the same intervals.
    pub fn identify_mirrors(&self, mirror: &KnotFacts) -> Result<(KnotFacts, KnotFacts), CertifyError> {
        fn adopt(into: &KnotFacts, from: &KnotFacts) -> Result<KnotFacts, CertifyError> {
            let mut out = into.clone();
            for w in &from.witnesses {
                out = match w {
                    Witness::Polygon { name, sticks } => out.add_stick_count(format!("{name} (mirror)"), *sticks)?,
                    Witness::Hom { fingerprint, degree } => out.add_hom_degree(fingerprint.clone(), *degree)?,
                };
            }
            out.saturate()
        }
        Ok((adopt(self, mirror)?, adopt(mirror, self)?))
    }

    /// Applies KUIPER (nontrivial knots only) and RANDELL until nothing
    /// changes. Lower bounds only feed lower bounds and upper bounds only
    /// feed upper bounds along an acyclic chain, so this terminates.
    pub fn saturate(&self) -> Result<Self, CertifyError> {
        use Quantity::*;
        use Side::*;
        let mut f = self.clone();
        loop {
            let mut changed = false;
            if f.nontrivial {
                let b_lo = f.bridge.lo;
                changed |= f.tighten(
                    Rule::Kuiper,
                    Bound::new(Superbridge, Lo),
                    b_lo + 1,
                    Premise::Bound(Bound::new(Bridge, Lo), b_lo),
                )?;
                if let Some(sb_hi) = f.superbridge.hi {
                    changed |= f.tighten(
                        Rule::Kuiper,
                        Bound::new(Bridge, Hi),
                        sb_hi.saturating_sub(1),
                        Premise::Bound(Bound::new(Superbridge, Hi), sb_hi),
                    )?;
                }
            }
            if let Some(st_hi) = f.stick.hi {
                changed |= f.tighten(
                    Rule::Randell,
                    Bound::new(Superbridge, Hi),
                    st_hi / 2,
                    Premise::Bound(Bound::new(Stick, Hi), st_hi),
                )?;
            }
            let sb_lo = f.superbridge.lo;
            changed |= f.tighten(
                Rule::Randell,
                Bound::new(Stick, Lo),
                2 * sb_lo,
                Premise::Bound(Bound::new(Superbridge, Lo), sb_lo),
            )?;
            if !changed {
                return Ok(f);
            }
        }
    }

    fn step_detail(&self, s: &Step) -> String {
        let premise = match &s.premise {
            Premise::Witness(i) => match self.witnesses.get(*i) {
                Some(w) => format!("witness {i}: {w}"),
                None => format!("witness {i}: missing"),
            },
            Premise::Bound(b, v) => format!("{b}={v}"),
        };
        format!("{}={} from {premise}", s.target, s.value)
    }

    fn machine_steps(&self) -> String {
        self.derivation.iter().map(|s| format!("STEP {} {}\n", s.rule, self.step_detail(s))).collect()
    }

    /// `FACT <name> bridge=[a,b] sb=[c,d] stick=[e,f]` followed by one
    /// `STEP <rule> <detail>` line per tightening.
    pub fn machine(&self) -> String {
        let i = |x: Interval| format!("[{},{}]", x.lo, x.hi_text());
        let mut out = format!(
            "FACT {} bridge={} sb={} stick={}\n",
            self.name,
            i(self.bridge),
            i(self.superbridge),
            i(self.stick)
        );
        out.push_str(&self.machine_steps());
        out
    }

    pub fn report(&self) -> String {
        let mut out = format!("knot {}\n", self.name);
        out.push_str(&format!("nontrivial: {}\n", if self.nontrivial { "yes" } else { "not established" }));
        for q in [Quantity::Bridge, Quantity::Superbridge, Quantity::Stick] {
            let i = self.interval(q);
            match i.exact() {
                Some(v) => out.push_str(&format!("{} = {v} (exact)\n", q.long_name())),
                None => out.push_str(&format!("{} in {i}\n", q.long_name())),
            }
        }
        if !self.witnesses.is_empty() {
            out.push_str("witnesses:\n");
            for (k, w) in self.witnesses.iter().enumerate() {
                out.push_str(&format!("  {k}. {w}\n"));
            }
        }
        out.push_str("derivation:\n");
        if self.derivation.is_empty() {
            out.push_str("  (none)\n");
        }
        for (k, s) in self.derivation.iter().enumerate() {
            out.push_str(&format!("  {}. {} {}\n", k + 1, s.rule, self.step_detail(s)));
        }
        out
    }

    /// Re-derives every step from its cited premise, starting from the
    /// definitional bounds, and checks the final intervals.
    pub fn replay(&self) -> Result<(), CertifyError> {
        let mut state = KnotFacts::new(self.name.clone(), self.nontrivial);
        state.witnesses = self.witnesses.clone();
        for (index, s) in self.derivation.iter().enumerate() {
            let fail = |message: String| CertifyError::Replay { index, message };
            let expected = match (s.rule, &s.premise) {
                (Rule::StickUpperFromWitness, Premise::Witness(w)) => match self.witnesses.get(*w) {
                    Some(Witness::Polygon { sticks, .. }) if s.target == Bound::new(Quantity::Stick, Side::Hi) => *sticks,
                    _ => return Err(fail("cites no polygon witness".into())),
                },
                (Rule::BridgeLowerFromHom, Premise::Witness(w)) => match self.witnesses.get(*w) {
                    Some(Witness::Hom { degree, .. }) if s.target == Bound::new(Quantity::Bridge, Side::Lo) => {
                        degree.saturating_sub(1) as u32
                    }
                    _ => return Err(fail("cites no homomorphism witness".into())),
                },
                (Rule::Kuiper | Rule::Randell, Premise::Bound(b, v)) => {
                    if state.bound_value(*b) != Some(*v) {
                        return Err(fail(format!("premise {b}={v} does not hold at this point")));
                    }
                    use Quantity::*;
                    use Side::*;
                    let t = s.target;
                    match (s.rule, b.quantity, b.side, t.quantity, t.side) {
                        (Rule::Kuiper, Bridge, Lo, Superbridge, Lo) if self.nontrivial => v + 1,
                        (Rule::Kuiper, Superbridge, Hi, Bridge, Hi) if self.nontrivial => v.saturating_sub(1),
                        (Rule::Randell, Stick, Hi, Superbridge, Hi) => v / 2,
                        (Rule::Randell, Superbridge, Lo, Stick, Lo) => 2 * v,
                        _ => return Err(fail(format!("{} does not derive {t} from {b}", s.rule))),
                    }
                }
                _ => return Err(fail("premise kind does not match rule".into())),
            };
            if expected != s.value {
                return Err(fail(format!("{} gives {}={expected}, step claims {}", s.rule, s.target, s.value)));
            }
            match state.tighten(s.rule, s.target, s.value, s.premise.clone()) {
                Ok(true) => {}
                Ok(false) => return Err(fail("step does not tighten".into())),
                Err(e) => return Err(fail(e.to_string())),
            }
        }
        if (state.bridge, state.superbridge, state.stick) != (self.bridge, self.superbridge, self.stick) {
            return Err(CertifyError::Replay {
                index: self.derivation.len(),
                message: "replayed intervals differ from recorded ones".into(),
            });
        }
        Ok(())
    }
}
