//! Pipeline behind the `stickcert` binary. Every command returns its full
//! stdout text so output can be compared byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;

use stickcert::certify::{CertifyError, KnotFacts};
use stickcert::diagram::{parse_pd, CrossingChangeSet, Diagram, DiagramError};
use stickcert::geom::{
    check_equilateral, direction_sweep, find_regular_direction, project_to_diagram, Direction, EquilateralCheck,
    GeomError, Polygon3, SweepResult, DEFAULT_MAX_REJECTIONS,
};
use stickcert::invariants::{
    alexander, count_colorings, detects_nontrivial, determinant, kauffman_bracket, InvariantError, LaurentPoly,
};
use stickcert::quotients::{
    bridge_lower_bound, parse_strand_labeling, search_homomorphisms, verify_labeling, BridgeBound, HomCertificate,
    LabelingFailure,
};
use stickcert::store::{default_scale, read_coordinates, StoreError};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Geometry(String),
    Contradiction(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Geometry(_) => 3,
            CliError::Contradiction(_) => 4,
            CliError::Internal(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::Parse(m)
            | CliError::Geometry(m)
            | CliError::Contradiction(m)
            | CliError::Internal(m) => m,
        }
    }

    fn context(self, what: &str) -> Self {
        let m = format!("{what}: {}", self.message());
        match self {
            CliError::Usage(_) => CliError::Usage(m),
            CliError::Parse(_) => CliError::Parse(m),
            CliError::Geometry(_) => CliError::Geometry(m),
            CliError::Contradiction(_) => CliError::Contradiction(m),
            CliError::Internal(_) => CliError::Internal(m),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Geometry(g) => g.into(),
            // an unreadable input path is a usage problem, not a parse one
            StoreError::Io(e) => CliError::Usage(e.to_string()),
            StoreError::Malformed { .. } | StoreError::Diagram(_) | StoreError::Certificate(_) | StoreError::BadName(_) => {
                CliError::Parse(e.to_string())
            }
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        CliError::Geometry(e.to_string())
    }
}

impl From<DiagramError> for CliError {
    fn from(e: DiagramError) -> Self {
        match e {
            DiagramError::UnknownCrossing(_) => CliError::Usage(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<CertifyError> for CliError {
    fn from(e: CertifyError) -> Self {
        match e {
            CertifyError::Contradiction { .. } => CliError::Contradiction(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<LabelingFailure> for CliError {
    fn from(e: LabelingFailure) -> Self {
        match e {
            LabelingFailure::Parse { .. } => CliError::Parse(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn read_polygon(path: &Path) -> Result<Polygon3, CliError> {
    read_coordinates(path, &default_scale()).map_err(|e| CliError::from(e).context(&path.display().to_string()))
}

pub fn read_diagram(path: &Path) -> Result<Diagram, CliError> {
    parse_pd(&read_text(path)?).map_err(|e| CliError::from(e).context(&path.display().to_string()))
}

/// Parses `1e-5`, `0.00001` or `1/100000` exactly.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let bad = || format!("`{text}` is not a number");
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if !frac.chars().all(|c| c.is_ascii_digit()) || int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let exp = exp - frac.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    Ok(BigRational::from_integer(digits) * pow_i32(&ten, exp))
}

fn pow_i32(base: &BigRational, exp: i32) -> BigRational {
    let mut r = BigRational::from_integer(BigInt::from(1));
    for _ in 0..exp.unsigned_abs() {
        r *= base;
    }
    if exp < 0 {
        r = BigRational::from_integer(BigInt::from(1)) / r;
    }
    r
}

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub seed: u64,
    pub samples: usize,
    pub degree_max: u8,
    pub tolerance: BigRational,
    pub crossing_cap: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 10_000,
            degree_max: 6,
            tolerance: BigRational::new(BigInt::from(1), BigInt::from(100_000)),
            crossing_cap: stickcert::invariants::DEFAULT_CROSSING_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub name: String,
    pub sticks: usize,
    pub equilateral: EquilateralCheck,
    pub direction: Direction,
    pub diagram: Diagram,
    pub simplified: Diagram,
    pub alexander: LaurentPoly,
    pub determinant: String,
    pub colorings3: String,
    pub bracket: Result<LaurentPoly, InvariantError>,
    pub nontrivial: bool,
    pub sweep: Option<SweepResult>,
    pub degree_searched: u8,
    pub bound: BridgeBound,
    pub facts: KnotFacts,
}

/// Projection, invariants, homomorphism search and the derivation for one
/// polygon. The searched degree is capped at `floor(sticks / 2)`: a
/// surjection onto `S_n` gives `n - 1 <= bridge < sb <= sticks / 2`.
pub fn analyze(poly: &Polygon3, opts: &AnalyzeOptions) -> Result<Analysis, CliError> {
    let name = poly.name().unwrap_or("unnamed").to_string();
    let sticks = poly.edge_count();
    let equilateral = check_equilateral(poly, &opts.tolerance);
    let (direction, _) = find_regular_direction(poly, opts.seed, DEFAULT_MAX_REJECTIONS)?;
    let diagram = project_to_diagram(poly, &direction)?;
    let simplified = diagram.simplify();
    let alex = alexander(&simplified);
    let det = determinant(&simplified);
    let col3 = count_colorings(&simplified, 3).map_err(|e| CliError::Internal(e.to_string()))?;
    let bracket = kauffman_bracket(&simplified, opts.crossing_cap);
    let nontrivial = detects_nontrivial(&simplified);
    let sweep = if opts.samples > 0 { Some(direction_sweep(poly, opts.samples, opts.seed)?) } else { None };

    let degree = opts.degree_max.min((sticks / 2).min(u8::MAX as usize) as u8);
    let pres = simplified.wirtinger();
    let bound = if degree >= 3 { bridge_lower_bound(&pres, degree) } else { BridgeBound { bound: 1, certificate: None } };

    let mut facts = KnotFacts::new(name.clone(), nontrivial).add_stick_witness(poly)?;
    if let Some(cert) = &bound.certificate {
        // re-check against the presentation before trusting it
        let checked = verify_labeling(&pres, &cert.labeling)
            .map_err(|e| CliError::Internal(format!("search returned an invalid labeling: {e}")))?;
        facts = facts.add_hom_certificate(&checked)?;
    }
    let facts = facts.saturate()?;
    facts.replay()?;

    Ok(Analysis {
        name,
        sticks,
        equilateral,
        direction,
        diagram,
        simplified,
        alexander: alex,
        determinant: det.to_string(),
        colorings3: col3.count().to_string(),
        bracket,
        nontrivial,
        sweep,
        degree_searched: degree,
        bound,
        facts,
    })
}

fn interval_text(i: stickcert::certify::Interval) -> String {
    match i.exact() {
        Some(v) => v.to_string(),
        None => i.to_string(),
    }
}

impl Analysis {
    pub fn conclusion(&self) -> String {
        format!(
            "bridge={} sb={} stick={}",
            interval_text(self.facts.bridge()),
            interval_text(self.facts.superbridge()),
            interval_text(self.facts.stick())
        )
    }

    fn verdict(&self) -> &'static str {
        if self.simplified.crossing_count() == 0 {
            "unknotted diagram"
        } else if self.nontrivial {
            "nontrivial"
        } else {
            "not distinguished from the unknot"
        }
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "== {} ==", self.name);
        let _ = writeln!(out, "sticks: {}", self.sticks);
        let _ = writeln!(
            out,
            "equilateral: {} (max relative deviation {:.3e})",
            if self.equilateral.equilateral { "yes" } else { "no" },
            self.equilateral.max_rel_deviation
        );
        let _ = writeln!(out, "projection direction: {}", self.direction);
        let _ = writeln!(
            out,
            "diagram: {} crossings, {} after RI/RII simplification",
            self.diagram.crossing_count(),
            self.simplified.crossing_count()
        );
        let _ = writeln!(out, "diagram fingerprint: {}", self.simplified.fingerprint());
        let _ = writeln!(out, "alexander: {}", self.alexander);
        let _ = writeln!(out, "determinant: {}", self.determinant);
        let _ = writeln!(out, "3-colorings: {}", self.colorings3);
        match &self.bracket {
            Ok(p) => {
                let _ = writeln!(out, "kauffman bracket: {}", p.render("A"));
            }
            Err(e) => {
                let _ = writeln!(out, "kauffman bracket: skipped ({e})");
            }
        }
        let _ = writeln!(out, "verdict: {}", self.verdict());
        if let Some(s) = &self.sweep {
            let _ = writeln!(
                out,
                "sweep: {} directions, maxima min {} at {}, max {} at {}",
                s.samples, s.min_count, s.min_witness, s.max_count, s.max_witness
            );
        }
        if self.degree_searched < 3 {
            let _ = writeln!(out, "homomorphism search: skipped (degree cap {})", self.degree_searched);
        } else {
            match &self.bound.certificate {
                Some(c) => {
                    let _ = writeln!(
                        out,
                        "homomorphism search: S_{} surjection found, bridge >= {}",
                        c.degree(),
                        c.bridge_bound()
                    );
                    out.push_str(&indent(&c.to_text()));
                }
                None => {
                    let _ = writeln!(out, "homomorphism search: none for n in 3..={}", self.degree_searched);
                }
            }
        }
        out.push_str(&self.facts.report());
        let _ = writeln!(out, "conclusion: {}", self.conclusion());
        out
    }

    pub fn machine(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "KNOT {}", self.name);
        let _ = writeln!(out, "STICKS {}", self.sticks);
        let _ = writeln!(
            out,
            "EQUILATERAL {} {:.6e}",
            self.equilateral.equilateral, self.equilateral.max_rel_deviation
        );
        let _ = writeln!(out, "DIRECTION {}", self.direction);
        let _ = writeln!(out, "CROSSINGS {} {}", self.diagram.crossing_count(), self.simplified.crossing_count());
        let _ = writeln!(out, "ALEXANDER {}", self.alexander);
        let _ = writeln!(out, "DETERMINANT {}", self.determinant);
        if let Some(c) = &self.bound.certificate {
            out.push_str(&c.to_text());
        }
        out.push_str(&self.facts.machine());
        out
    }
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}\n")).collect()
}

pub fn cmd_analyze(path: &Path, opts: &AnalyzeOptions, machine: bool) -> Result<String, CliError> {
    let poly = read_polygon(path)?;
    let a = analyze(&poly, opts)?;
    Ok(if machine { a.machine() } else { a.report() })
}

pub fn cmd_sweep(path: &Path, samples: usize, seed: u64, machine: bool) -> Result<String, CliError> {
    if samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let poly = read_polygon(path)?;
    let s = direction_sweep(&poly, samples, seed)?;
    let name = poly.name().unwrap_or("unnamed");
    Ok(if machine {
        format!("SWEEP {name} samples={} min={} max={} min_dir={} max_dir={}\n", s.samples, s.min_count, s.max_count, s.min_witness, s.max_witness)
    } else {
        format!(
            "{name}: {} directions\nmin maxima: {} at {}\nmax maxima: {} at {}\n",
            s.samples, s.min_count, s.min_witness, s.max_count, s.max_witness
        )
    })
}

fn search_outcome(diagram: &Diagram, degree_max: u8) -> (String, BridgeBound) {
    let bound = bridge_lower_bound(&diagram.wirtinger(), degree_max);
    let text = match &bound.certificate {
        Some(c) => format!("S_{} surjection found, bridge >= {}\n{}", c.degree(), c.bridge_bound(), c.to_text()),
        None => format!("no surjection onto S_n for n in 3..={degree_max}\n"),
    };
    (text, bound)
}

pub fn parse_crossing_list(text: &str) -> Result<CrossingChangeSet, CliError> {
    let mut ids = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        ids.push(part.parse::<usize>().map_err(|_| CliError::Usage(format!("bad crossing id `{part}`")))?);
    }
    Ok(CrossingChangeSet::new(ids))
}

/// Switches the listed crossings, writes the new PD (to `output` if given,
/// otherwise into the returned text) and reruns the homomorphism search.
pub fn cmd_change(
    path: &Path,
    changes: &CrossingChangeSet,
    degree_max: u8,
    output: Option<&Path>,
) -> Result<String, CliError> {
    check_degree(degree_max)?;
    let d = read_diagram(path)?;
    let changed = d.change_crossings(changes)?;
    let mut out = String::new();
    let ids: Vec<String> = changes.0.iter().map(|i| i.to_string()).collect();
    let _ = writeln!(out, "changed crossings: {}", if ids.is_empty() { "none".into() } else { ids.join(",") });
    let pd = changed.to_pd_text();
    match output {
        Some(p) => {
            fs::write(p, &pd).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            let _ = writeln!(out, "diagram written to {}", p.display());
        }
        None => out.push_str(&pd),
    }
    let _ = writeln!(out, "alexander: {}", alexander(&changed));
    let (text, _) = search_outcome(&changed, degree_max);
    out.push_str(&text);
    Ok(out)
}

fn check_degree(degree_max: u8) -> Result<(), CliError> {
    if degree_max < 3 {
        return Err(CliError::Usage("--degree-max must be at least 3".into()));
    }
    Ok(())
}

/// Homomorphism search on a PD diagram. With `degree` every conjugacy class
/// at that degree is listed; with `labeling` a strand labeling file is
/// verified instead.
pub fn cmd_homsearch(
    path: &Path,
    degree_max: u8,
    degree: Option<u8>,
    labeling: Option<&Path>,
) -> Result<String, CliError> {
    let d = read_diagram(path)?;
    let pres = d.wirtinger();
    if let Some(lp) = labeling {
        let lab = parse_strand_labeling(&read_text(lp)?, &pres).map_err(|e| CliError::from(e).context(&lp.display().to_string()))?;
        return match verify_labeling(&pres, &lab) {
            Ok(cert) => Ok(format!("labeling verified, bridge >= {}\n{}", cert.bridge_bound(), cert.to_text())),
            Err(e) => Err(CliError::Contradiction(format!("labeling rejected: {e}"))),
        };
    }
    if let Some(n) = degree {
        check_degree(n)?;
        let found = search_homomorphisms(&pres, n, usize::MAX);
        let mut out = format!("{} conjugacy classes of surjections onto S_{n}\n", found.len());
        for (k, l) in found.iter().enumerate() {
            let cert: HomCertificate = verify_labeling(&pres, l).map_err(|e| CliError::Internal(e.to_string()))?;
            let _ = writeln!(out, "# class {}", k + 1);
            out.push_str(&cert.to_text());
        }
        return Ok(out);
    }
    check_degree(degree_max)?;
    Ok(search_outcome(&d, degree_max).0)
}

pub fn cmd_invariants(path: &Path, crossing_cap: usize, machine: bool) -> Result<String, CliError> {
    let d = read_diagram(path)?;
    let s = d.simplify();
    let mut rows: Vec<(&str, String)> = vec![
        ("crossings", d.crossing_count().to_string()),
        ("simplified", s.crossing_count().to_string()),
        ("writhe", d.writhe().to_string()),
        ("alexander", alexander(&d).to_string()),
        ("determinant", determinant(&d).to_string()),
    ];
    for p in [3u64, 5, 7] {
        let c = count_colorings(&d, p).map_err(|e| CliError::Internal(e.to_string()))?;
        rows.push((["colorings3", "colorings5", "colorings7"][(p as usize - 3) / 2], c.count().to_string()));
    }
    rows.push((
        "bracket",
        match kauffman_bracket(&d, crossing_cap) {
            Ok(p) => p.render("A"),
            Err(e) => format!("skipped ({e})"),
        },
    ));
    let mut out = String::new();
    for (k, v) in rows {
        if machine {
            let _ = writeln!(out, "{}\t{v}", k.to_uppercase());
        } else {
            let _ = writeln!(out, "{k}: {v}");
        }
    }
    Ok(out)
}

/// Analyzes every `*.tsv` file in `dir` (sorted by file name). Failing files
/// are reported in the error list and skipped.
pub fn cmd_batch(dir: &Path, opts: &AnalyzeOptions) -> Result<(String, Vec<(PathBuf, CliError)>), CliError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "tsv"))
        .collect();
    files.sort();
    let mut out = String::from("name\tsticks\tequilateral\tcrossings\tsimplified\tbridge_bound\tconclusion\n");
    let mut errors = Vec::new();
    for f in files {
        match read_polygon(&f).and_then(|p| analyze(&p, opts)) {
            Ok(a) => {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    a.name,
                    a.sticks,
                    a.equilateral.equilateral,
                    a.diagram.crossing_count(),
                    a.simplified.crossing_count(),
                    a.bound.bound,
                    a.conclusion()
                );
            }
            Err(e) => errors.push((f, e)),
        }
    }
    Ok((out, errors))
}
