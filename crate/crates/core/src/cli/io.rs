//! Solution files: JSON with a schema version, the grid, and the row-major
//! values as shortest round-trip decimals.

use std::path::Path;

use crate::error::{Error, Result};
use crate::fields::{Grid2D, SpaceTimeField};
use crate::flux_entropy::FluxFunction;
use crate::solver::{Boundary, Scheme, SolutionRecord};

pub const SCHEMA_VERSION: &str = "1.0";
const SCHEMA_MAJOR: &str = "1";

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolutionFile {
    pub schema_version: String,
    pub grid: Grid2D,
    pub flux: String,
    pub scheme: Scheme,
    pub cfl: f64,
    pub boundary: Boundary,
    #[serde(default)]
    pub riemann_states: Option<(f64, f64)>,
    pub init_range: (f64, f64),
    pub values: Vec<f64>,
    pub supnorm: f64,
}

/// Rejects files whose major schema version differs from ours.
pub fn check_schema(version: &str) -> Result<()> {
    let major = version.split('.').next().unwrap_or("");
    if major != SCHEMA_MAJOR {
        return Err(Error::InvalidInput(format!(
            "unsupported schema_version '{version}' (expected {SCHEMA_MAJOR}.x)"
        )));
    }
    Ok(())
}

impl SolutionFile {
    pub fn from_record(rec: &SolutionRecord) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            grid: *rec.grid(),
            flux: rec.flux.tag(),
            scheme: rec.scheme,
            cfl: rec.cfl,
            boundary: rec.boundary,
            riemann_states: rec.riemann_states,
            init_range: rec.init_range,
            values: rec.field.values().to_vec(),
            supnorm: rec.field.supnorm(),
        }
    }

    pub fn into_record(self) -> Result<SolutionRecord> {
        check_schema(&self.schema_version)?;
        let g = self.grid;
        let grid = Grid2D::new(g.t0, g.t1, g.x0, g.x1, g.nt, g.nx)?;
        if self.values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "values has {} entries, grid needs {}",
                self.values.len(),
                grid.len()
            )));
        }
        Ok(SolutionRecord {
            field: SpaceTimeField::new(grid, self.values)?,
            flux: FluxFunction::parse(&self.flux)?,
            scheme: self.scheme,
            cfl: self.cfl,
            boundary: self.boundary,
            riemann_states: self.riemann_states,
            init_range: self.init_range,
        })
    }
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    write_text(path, &(text + "\n"))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    std::fs::write(path, text).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

pub fn write_solution(path: &Path, rec: &SolutionRecord) -> Result<()> {
    let text = serde_json::to_string(&SolutionFile::from_record(rec))
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    write_text(path, &(text + "\n"))
}

pub fn read_solution(path: &Path) -> Result<SolutionRecord> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let probe: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: malformed JSON: {e}", path.display())))?;
    match probe.get("schema_version").and_then(|v| v.as_str()) {
        Some(v) => check_schema(v)?,
        None => return Err(Error::InvalidInput(format!("{}: missing schema_version", path.display()))),
    }
    let file: SolutionFile = serde_json::from_value(probe)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    file.into_record()
}
