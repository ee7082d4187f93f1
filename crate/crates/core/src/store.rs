//! Coordinate files and the on-disk catalog.
//!
//! Coordinate files hold one vertex per line as three integers separated by
//! tabs or spaces; `,` and `_` digit separators are ignored. `# name: <x>`
//! and `# scale: <p>/<q>` header comments are recognised, other `#` lines
//! are skipped.
//!
//! Catalog layout:
//!
//! ```text
//! catalog/<name>/record.txt
//! catalog/<name>/coords.tsv
//! catalog/<name>/certs/<k>.txt
//! catalog/.lock
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diagram::{parse_pd, Diagram, DiagramError};
use crate::geom::{GeomError, Polygon3};
use crate::quotients::{verify_labeling, HomCertificate, LabelingFailure};

/// `10^-7`, the scale of the published coordinate tables.
pub fn default_scale() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10_000_000))
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Certificate(#[from] LabelingFailure),
    #[error("no catalog record named `{0}`")]
    Missing(String),
    #[error("record `{name}`: {what} fingerprint mismatch (stored {stored}, computed {computed})")]
    FingerprintMismatch { name: String, what: &'static str, stored: String, computed: String },
    #[error("catalog is locked by another writer ({0})")]
    Locked(PathBuf),
    #[error("invalid record name `{0}`")]
    BadName(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn parse_scale(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let r = match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            if q == BigInt::from(0) {
                return None;
            }
            BigRational::new(p.trim().parse().ok()?, q)
        }
        None => BigRational::from_integer(s.parse().ok()?),
    };
    Some(r)
}

fn render_scale(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses a coordinate file. A `# scale:` header overrides `scale`.
pub fn parse_coordinates(text: &str, scale: &BigRational) -> Result<Polygon3, StoreError> {
    let mut name = None;
    let mut scale = scale.clone();
    let mut vertices = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let malformed = |message: String| StoreError::Malformed { line: i + 1, message };
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(n) = comment.strip_prefix("name:") {
                name = Some(n.trim().to_string());
            } else if let Some(s) = comment.strip_prefix("scale:") {
                scale = parse_scale(s).ok_or_else(|| malformed(format!("bad scale `{}`", s.trim())))?;
            }
            continue;
        }
        let cleaned: String = line.chars().filter(|c| *c != ',' && *c != '_').collect();
        let fields: Vec<&str> = cleaned.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(malformed(format!("expected 3 coordinates, found {}", fields.len())));
        }
        let mut p = Vec::with_capacity(3);
        for f in fields {
            p.push(f.parse::<BigInt>().map_err(|_| malformed(format!("`{f}` is not an integer")))?);
        }
        let [x, y, z]: [BigInt; 3] = p.try_into().unwrap();
        vertices.push([x, y, z]);
    }
    Ok(Polygon3::new(vertices, scale, name)?)
}

/// Canonical tab-separated rendering. The scale is written only when it
/// differs from the default.
pub fn write_coordinates(poly: &Polygon3) -> String {
    let mut out = String::new();
    if let Some(n) = poly.name().filter(|n| !n.is_empty()) {
        out.push_str(&format!("# name: {n}\n"));
    }
    if *poly.scale() != default_scale() {
        out.push_str(&format!("# scale: {}\n", render_scale(poly.scale())));
    }
    for [x, y, z] in poly.vertices() {
        out.push_str(&format!("{x}\t{y}\t{z}\n"));
    }
    out
}

pub fn read_coordinates(path: &Path, scale: &BigRational) -> Result<Polygon3, StoreError> {
    let text = fs::read_to_string(path)?;
    let poly = parse_coordinates(&text, scale)?;
    if poly.name().is_some() {
        return Ok(poly);
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("unnamed").to_string();
    Ok(poly.with_name(stem))
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogRecord {
    pub name: String,
    pub polygon: Polygon3,
    pub diagram: Diagram,
    pub certificates: Vec<HomCertificate>,
    /// Rendered invariant values keyed by invariant name.
    pub invariants: BTreeMap<String, String>,
    /// Seconds since the Unix epoch.
    pub created: u64,
}

impl CatalogRecord {
    pub fn fingerprint(&self) -> String {
        self.diagram.fingerprint()
    }

    fn to_text(&self) -> String {
        let mut out = format!("RECORD {}\n", self.name);
        out.push_str(&format!("created {}\n", self.created));
        out.push_str(&format!("coords-sha256 {}\n", sha256_hex(&write_coordinates(&self.polygon))));
        out.push_str(&format!("fingerprint {}\n", self.fingerprint()));
        for (k, v) in &self.invariants {
            out.push_str(&format!("invariant {k} {v}\n"));
        }
        for k in 0..self.certificates.len() {
            out.push_str(&format!("cert {k}.txt\n"));
        }
        out.push_str("pd\n");
        out.push_str(&self.diagram.to_pd_text());
        out.push_str("end\n");
        out
    }
}

/// Directory-backed catalog. Writes take an exclusive lock file; reads
/// never modify anything.
#[derive(Clone, Debug)]
pub struct Catalog {
    root: PathBuf,
}

struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

fn check_name(name: &str) -> Result<(), StoreError> {
    let ok = !name.is_empty()
        && !name.starts_with('.')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.+".contains(c));
    if ok {
        Ok(())
    } else {
        Err(StoreError::BadName(name.to_string()))
    }
}

impl Catalog {
    pub fn open(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn lock(&self) -> Result<LockGuard, StoreError> {
        fs::create_dir_all(&self.root)?;
        let path = self.root.join(".lock");
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                writeln!(f, "{}", std::process::id())?;
                Ok(LockGuard(path))
            }
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => Err(StoreError::Locked(path)),
            Err(e) => Err(e.into()),
        }
    }

    pub fn put(&self, record: &CatalogRecord) -> Result<(), StoreError> {
        check_name(&record.name)?;
        let _guard = self.lock()?;
        let dir = self.root.join(&record.name);
        let certs = dir.join("certs");
        if certs.exists() {
            fs::remove_dir_all(&certs)?;
        }
        fs::create_dir_all(&certs)?;
        for (k, c) in record.certificates.iter().enumerate() {
            fs::write(certs.join(format!("{k}.txt")), c.to_text())?;
        }
        fs::write(dir.join("coords.tsv"), write_coordinates(&record.polygon))?;
        // record last, so a complete record.txt implies complete siblings
        fs::write(dir.join("record.txt"), record.to_text())?;
        Ok(())
    }

    pub fn names(&self) -> Result<Vec<String>, StoreError> {
        let mut out = Vec::new();
        let Ok(entries) = fs::read_dir(&self.root) else { return Ok(out) };
        for e in entries {
            let e = e?;
            if e.path().join("record.txt").is_file() {
                if let Some(n) = e.file_name().to_str() {
                    out.push(n.to_string());
                }
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn get(&self, name: &str) -> Result<CatalogRecord, StoreError> {
        check_name(name)?;
        let dir = self.root.join(name);
        let record_path = dir.join("record.txt");
        if !record_path.is_file() {
            return Err(StoreError::Missing(name.to_string()));
        }
        let text = fs::read_to_string(&record_path)?;
        let coords_text = fs::read_to_string(dir.join("coords.tsv"))?;

        let mut created = 0;
        let mut coords_sha = String::new();
        let mut fingerprint = String::new();
        let mut invariants = BTreeMap::new();
        let mut cert_files = Vec::new();
        let mut pd = String::new();
        let mut in_pd = false;
        let mut stored_name = None;
        for (i, line) in text.lines().enumerate() {
            let malformed = |m: &str| StoreError::Malformed { line: i + 1, message: format!("record.txt: {m}") };
            if in_pd {
                if line == "end" {
                    in_pd = false;
                } else {
                    pd.push_str(line);
                    pd.push('\n');
                }
                continue;
            }
            let (key, value) = line.split_once(' ').unwrap_or((line, ""));
            match key {
                "RECORD" => stored_name = Some(value.to_string()),
                "created" => created = value.parse().map_err(|_| malformed("bad timestamp"))?,
                "coords-sha256" => coords_sha = value.to_string(),
                "fingerprint" => fingerprint = value.to_string(),
                "invariant" => {
                    let (k, v) = value.split_once(' ').ok_or_else(|| malformed("bad invariant line"))?;
                    invariants.insert(k.to_string(), v.to_string());
                }
                "cert" => cert_files.push(value.to_string()),
                "pd" => in_pd = true,
                "" => {}
                _ => return Err(malformed("unrecognised line")),
            }
        }
        if stored_name.as_deref() != Some(name) {
            return Err(StoreError::Malformed { line: 1, message: "record.txt: name does not match directory".into() });
        }

        let computed = sha256_hex(&coords_text);
        if computed != coords_sha {
            return Err(StoreError::FingerprintMismatch {
                name: name.to_string(),
                what: "coordinate",
                stored: coords_sha,
                computed,
            });
        }
        let diagram = parse_pd(&pd)?;
        let computed = diagram.fingerprint();
        if computed != fingerprint {
            return Err(StoreError::FingerprintMismatch {
                name: name.to_string(),
                what: "diagram",
                stored: fingerprint,
                computed,
            });
        }
        let polygon = parse_coordinates(&coords_text, &default_scale())?;
        let pres = diagram.wirtinger();
        let mut certificates = Vec::new();
        for f in cert_files {
            let cert = HomCertificate::parse(&fs::read_to_string(dir.join("certs").join(&f))?)?;
            if cert.fingerprint != fingerprint {
                return Err(StoreError::FingerprintMismatch {
                    name: name.to_string(),
                    what: "certificate",
                    stored: cert.fingerprint,
                    computed: fingerprint,
                });
            }
            // never trust a stored transcript
            certificates.push(verify_labeling(&pres, &cert.labeling)?);
        }
        Ok(CatalogRecord { name: name.to_string(), polygon, diagram, certificates, invariants, created })
    }
}
