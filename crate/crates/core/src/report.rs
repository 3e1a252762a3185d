//! JSON and CSV outputs of the binary.

use crate::config::DivergenceEntry;
use crate::geometry::Direction;
use crate::hvz::{ConstantView, DirectionView, EssentialSpectrumEstimate, LocalizationReport};
use crate::interactions::ElementDoc;
use crate::spectra::{FiberSpectrum, KineticSymbol};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot serialize {name}: {source}")]
    Json {
        name: String,
        #[source]
        source: serde_json::Error,
    },
}

/// Output directory, created on first write.
#[derive(Clone, Debug)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        OutputDir { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, ReportError> {
        let path = self.root.join(name);
        let io = |source| ReportError::Io {
            path: path.clone(),
            source,
        };
        std::fs::create_dir_all(&self.root).map_err(io)?;
        std::fs::write(&path, text).map_err(io)?;
        Ok(path)
    }

    /// Pretty JSON with a trailing newline.
    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, ReportError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|source| ReportError::Json {
            name: name.to_string(),
            source,
        })?;
        text.push('\n');
        self.write_text(name, &text)
    }
}

/// `H_α` as written by the `localize` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizedSpecView {
    pub direction: DirectionView,
    pub kinetic: KineticSymbol,
    pub potential: ElementDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub divergence: Vec<DivergenceEntry>,
    /// Integer spanning rows of each kept interaction kernel.
    pub surviving: Vec<Vec<Vec<i64>>>,
    pub collapsed: Vec<ConstantView>,
    /// Constant part of the localized potential.
    pub constant: f64,
}

impl LocalizedSpecView {
    pub fn new(loc: &LocalizationReport) -> Self {
        let spec = &loc.localized;
        let divergence = spec
            .divergence
            .iter()
            .flat_map(|g| {
                g.iter().enumerate().flat_map(move |(mu, row)| {
                    row.iter().enumerate().filter(move |(nu, _)| *nu >= mu).filter_map(move |(nu, e)| {
                        e.as_ref().map(|e| DivergenceEntry {
                            mu,
                            nu,
                            coefficient: ElementDoc::from_element(e),
                        })
                    })
                })
            })
            .collect();
        LocalizedSpecView {
            direction: (&loc.direction).into(),
            kinetic: spec.kinetic.clone(),
            potential: ElementDoc::from_element(&spec.potential),
            divergence,
            surviving: loc.surviving.iter().map(|y| y.basis_i64().unwrap_or_default()).collect(),
            collapsed: loc
                .collapsed
                .iter()
                .map(|c| ConstantView {
                    term: c.term,
                    kernel: c.kernel.basis_i64().unwrap_or_default(),
                    value: c.value,
                })
                .collect(),
            constant: loc.constant,
        }
    }
}

/// `σ(H_α)` as written by the `spectrum` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizedSpectrumView {
    pub direction: DirectionView,
    pub fibering: Vec<Vec<i64>>,
    pub spectrum: FiberSpectrum,
}

impl LocalizedSpectrumView {
    pub fn new(alpha: &Direction, fibering: Vec<Vec<i64>>, spectrum: FiberSpectrum) -> Self {
        LocalizedSpectrumView {
            direction: alpha.into(),
            fibering,
            spectrum,
        }
    }
}

/// `a,b` rows.
pub fn intervals_csv(intervals: &[(f64, f64)]) -> String {
    let mut s = String::from("a,b\n");
    for (a, b) in intervals {
        let _ = writeln!(s, "{a},{b}");
    }
    s
}

/// `index,value` rows.
pub fn eigenvalues_csv(values: &[f64]) -> String {
    let mut s = String::from("index,value\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{i},{v}");
    }
    s
}

/// One row per interval of every cell: `pattern,continuum,samples,a,b`.
pub fn cells_csv(est: &EssentialSpectrumEstimate) -> String {
    let mut s = String::from("pattern,continuum,samples,a,b\n");
    for c in &est.cells {
        for (a, b) in &c.intervals {
            let _ = writeln!(s, "{},{},{},{a},{b}", c.pattern, c.continuum, c.samples.len());
        }
    }
    s
}

/// `level,samples,hausdorff_drift` rows.
pub fn refinement_csv(est: &EssentialSpectrumEstimate) -> String {
    let mut s = String::from("level,samples,hausdorff_drift\n");
    for l in &est.refinement.levels {
        let _ = writeln!(s, "{},{},{}", l.level, l.samples, l.hausdorff_drift);
    }
    s
}
