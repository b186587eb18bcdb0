//! Run configuration: a flat `key = value` file with `[section]` headers.
//!
//! ```text
//! [flux]
//! spec = burgers
//! [grid]
//! nx = 2048
//! t1 = 1.2
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Every key a config file may set, as `section.key`.
pub const KNOWN_KEYS: &[&str] = &[
    "run.tag",
    "run.seed",
    "run.out",
    "flux.spec",
    "entropy.spec",
    "init.spec",
    "solver.scheme",
    "solver.cfl",
    "solver.boundary",
    "grid.nx",
    "grid.nt",
    "grid.t0",
    "grid.t1",
    "grid.x0",
    "grid.x1",
    "vgrid.nv",
    "cutoff.ta",
    "cutoff.tb",
    "cutoff.xa",
    "cutoff.xb",
    "cutoff.plateau",
    "shifts.spec",
];

/// Parsed `section.key → (value, line)` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub entries: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return Err(diag(line_no, "unterminated section header"));
                };
                let name = name.trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(diag(line_no, &format!("bad section name '{name}'")));
                }
                section = name.to_string();
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(diag(line_no, "expected 'key = value'"));
            };
            let (k, v) = (k.trim(), v.trim());
            if section.is_empty() {
                return Err(diag(line_no, &format!("key '{k}' appears before any section header")));
            }
            let full = format!("{section}.{k}");
            if !KNOWN_KEYS.contains(&full.as_str()) {
                return Err(diag(line_no, &format!("unknown key '{full}'")));
            }
            if v.is_empty() {
                return Err(diag(line_no, &format!("empty value for '{full}'")));
            }
            if let Some((_, prev)) = entries.get(&full) {
                return Err(diag(line_no, &format!("duplicate key '{full}' (first set on line {prev})")));
            }
            entries.insert(full, (v.to_string(), line_no));
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::InvalidInput(m) => Error::InvalidInput(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn num<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| diag(*line, &format!("field '{key}': cannot parse '{v}' as a number"))),
        }
    }
}

fn diag(line: usize, msg: &str) -> Error {
    Error::InvalidInput(format!("config line {line}: {msg}"))
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RunConfig {
    pub tag: String,
    pub seed: u64,
    pub out: PathBuf,
    pub flux: String,
    pub entropy: String,
    pub init: String,
    pub scheme: String,
    pub cfl: f64,
    pub boundary: Option<String>,
    pub nx: usize,
    pub nt: Option<usize>,
    pub t0: f64,
    pub t1: f64,
    pub x0: Option<f64>,
    pub x1: Option<f64>,
    pub nv: usize,
    /// `(ta, tb, xa, xb)`; defaults to a box inside the grid.
    pub cutoff: Option<[f64; 4]>,
    pub plateau: f64,
    /// Dyadic shift range in cells.
    pub shifts: Option<(usize, usize)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tag: "run".into(),
            seed: 7,
            out: PathBuf::from("out"),
            flux: "burgers".into(),
            entropy: "quadratic".into(),
            init: "sine:1,1".into(),
            scheme: "godunov".into(),
            cfl: 0.45,
            boundary: None,
            nx: 512,
            nt: None,
            t0: 0.0,
            t1: 1.0,
            x0: None,
            x1: None,
            nv: 64,
            cutoff: None,
            plateau: 0.5,
            shifts: None,
        }
    }
}

/// Parses `dyadic:MIN,MAX` (cells).
pub fn parse_shifts(spec: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidInput(format!("bad shift spec '{spec}', expected dyadic:MIN,MAX"));
    let rest = spec.strip_prefix("dyadic:").ok_or_else(bad)?;
    let (a, b) = rest.split_once(',').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b < a {
        return Err(bad());
    }
    Ok((a, b))
}

/// Parses `ta,tb,xa,xb`.
pub fn parse_box(spec: &str) -> Result<[f64; 4]> {
    let v: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidInput(format!("bad cutoff box '{spec}', expected ta,tb,xa,xb")))?;
    if v.len() != 4 {
        return Err(Error::InvalidInput(format!("bad cutoff box '{spec}', expected ta,tb,xa,xb")));
    }
    Ok([v[0], v[1], v[2], v[3]])
}

impl RunConfig {
    /// Applies the keys of a config file on top of `self`.
    pub fn apply_file(&mut self, f: &ConfigFile) -> Result<()> {
        if let Some(v) = f.str("run.tag") {
            self.tag = v.into();
        }
        if let Some(v) = f.num("run.seed")? {
            self.seed = v;
        }
        if let Some(v) = f.str("run.out") {
            self.out = v.into();
        }
        if let Some(v) = f.str("flux.spec") {
            self.flux = v.into();
        }
        if let Some(v) = f.str("entropy.spec") {
            self.entropy = v.into();
        }
        if let Some(v) = f.str("init.spec") {
            self.init = v.into();
        }
        if let Some(v) = f.str("solver.scheme") {
            self.scheme = v.into();
        }
        if let Some(v) = f.num("solver.cfl")? {
            self.cfl = v;
        }
        if let Some(v) = f.str("solver.boundary") {
            self.boundary = Some(v.into());
        }
        if let Some(v) = f.num("grid.nx")? {
            self.nx = v;
        }
        if let Some(v) = f.num("grid.nt")? {
            self.nt = Some(v);
        }
        if let Some(v) = f.num("grid.t0")? {
            self.t0 = v;
        }
        if let Some(v) = f.num("grid.t1")? {
            self.t1 = v;
        }
        if let Some(v) = f.num("grid.x0")? {
            self.x0 = Some(v);
        }
        if let Some(v) = f.num("grid.x1")? {
            self.x1 = Some(v);
        }
        if let Some(v) = f.num("vgrid.nv")? {
            self.nv = v;
        }
        let parts: Vec<Option<f64>> = ["cutoff.ta", "cutoff.tb", "cutoff.xa", "cutoff.xb"]
            .iter()
            .map(|k| f.num(k))
            .collect::<Result<_>>()?;
        match parts.iter().filter(|p| p.is_some()).count() {
            0 => {}
            4 => self.cutoff = Some([parts[0].unwrap(), parts[1].unwrap(), parts[2].unwrap(), parts[3].unwrap()]),
            _ => {
                let line = f.entries.get("cutoff.ta").or(f.entries.get("cutoff.xa")).map(|e| e.1).unwrap_or(0);
                return Err(diag(line, "cutoff needs all of ta, tb, xa, xb"));
            }
        }
        if let Some(v) = f.num("cutoff.plateau")? {
            self.plateau = v;
        }
        if let Some(v) = f.str("shifts.spec") {
            let line = f.entries["shifts.spec"].1;
            self.shifts = Some(parse_shifts(v).map_err(|e| diag(line, &e.to_string()))?);
        }
        Ok(())
    }
}
