//! JSON run configuration of the `hvzlab` binary.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "dim": 1,
//!   "kinetic": {"kind": "power", "s": 1.0},
//!   "potential": {"terms": [{"coeff": 1.0, "factors": [
//!       {"subspace": [], "radial": {"tail": {"boundary": {"op": "coord", "index": 0}}}}]}]},
//!   "numerics": {"transverse_points": 2048, "transverse_halflength": 100.0},
//!   "seed": 0,
//!   "output_dir": "out",
//!   "alpha": [1.0]
//! }
//! ```
//!
//! `potential` uses the element schema of [`crate::interactions::ElementDoc`].
//! Optional `divergence` entries `{"mu": i, "nu": j, "coefficient": <element>}`
//! describe `Σ p^μ g_{μν} p^ν` with index 0 standing for the identity; an
//! off-diagonal entry sets both `g_{μν}` and `g_{νμ}`. Unknown fields are
//! rejected. [`RunConfig::resolved`] writes every default explicitly.

use crate::geometry::{Direction, Space};
use crate::hvz::{CoefficientTable, HamiltonianSpec, Numerics};
use crate::interactions::ElementDoc;
use crate::spectra::{GridSpec, KineticSymbol};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// Output directory when neither the config nor the command line names one.
pub const DEFAULT_OUTPUT_DIR: &str = "hvzlab-out";

/// A config or AST document failed validation at `path`.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{path}: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}, at {path}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivergenceEntry {
    pub mu: usize,
    pub nu: usize,
    pub coefficient: ElementDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub dim: usize,
    #[serde(default)]
    pub kinetic: KineticSymbol,
    #[serde(default)]
    pub potential: ElementDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub divergence: Vec<DivergenceEntry>,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    /// Direction used by `localize` and `spectrum` when none is given on
    /// the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            ConfigError::Parse {
                path,
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn space(&self) -> Result<Space, SchemaError> {
        Space::new(self.dim).map_err(|e| SchemaError::new("dim", e.to_string()))
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SchemaError::new(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        self.hamiltonian()?;
        if let Some(a) = &self.alpha {
            self.direction(a, "alpha")?;
        }
        let num = &self.numerics;
        if num.drift_tol <= 0.0 || !num.drift_tol.is_finite() {
            return Err(SchemaError::new("numerics.drift_tol", "must be positive"));
        }
        if num.fiber.longitudinal_samples == 0 {
            return Err(SchemaError::new("numerics.fiber.longitudinal_samples", "must be positive"));
        }
        if let Some((lo, hi)) = num.fiber.window {
            if !(lo < hi) {
                return Err(SchemaError::new("numerics.fiber.window", "lower end must be below the upper end"));
            }
        }
        Ok(())
    }

    /// Parses a direction given as a coordinate list.
    pub fn direction(&self, v: &[f64], path: &str) -> Result<Direction, SchemaError> {
        let space = self.space()?;
        if v.len() != self.dim {
            return Err(SchemaError::new(path, format!("expected {} coordinates, found {}", self.dim, v.len())));
        }
        // integer coordinates keep the exact rational direction
        if v.iter().all(|x| x.fract() == 0.0 && x.abs() < 1e15) {
            let ints: Vec<i64> = v.iter().map(|&x| x as i64).collect();
            return Direction::from_integers(space, &ints).map_err(|e| SchemaError::new(path, e.to_string()));
        }
        Direction::from_f64(space, v).map_err(|e| SchemaError::new(path, e.to_string()))
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianSpec, SchemaError> {
        let space = self.space()?;
        self.kinetic
            .check_proper(self.dim)
            .map_err(|e| SchemaError::new("kinetic", e.to_string()))?;
        let potential = self.potential.to_element(space, "potential")?;
        let mut h = HamiltonianSpec::new(self.kinetic.clone(), potential).with_numerics(self.numerics.clone());
        h.space = space;
        if !self.divergence.is_empty() {
            let n = self.dim;
            let mut table: CoefficientTable = vec![vec![None; n + 1]; n + 1];
            for (i, entry) in self.divergence.iter().enumerate() {
                let path = format!("divergence[{i}]");
                if entry.mu > n || entry.nu > n {
                    return Err(SchemaError::new(path, format!("indices must lie in 0..={n}")));
                }
                let g = entry.coefficient.to_element(space, &format!("{path}.coefficient"))?;
                if table[entry.mu][entry.nu].is_some() {
                    return Err(SchemaError::new(path, "duplicate coefficient entry"));
                }
                table[entry.nu][entry.mu] = Some(g.clone());
                table[entry.mu][entry.nu] = Some(g);
            }
            h = h.with_divergence(table);
        }
        h.validate().map_err(|e| SchemaError::new("", e.to_string()))?;
        Ok(h)
    }

    /// The same configuration with every default written out.
    pub fn resolved(&self) -> Result<RunConfig, SchemaError> {
        let mut out = self.clone();
        let h = self.hamiltonian()?;
        out.potential = ElementDoc::from_element(&h.potential);
        // in the plane every fiber is one-dimensional; in three dimensions
        // unset values keep their per-dimension defaults
        if self.dim == 2 {
            let base = GridSpec::default_for(1).map_err(|e| SchemaError::new("numerics", e.to_string()))?;
            out.numerics.transverse_points.get_or_insert(base.points()[0]);
            out.numerics.transverse_halflength.get_or_insert(base.halflengths()[0]);
        }
        out.output_dir.get_or_insert_with(|| DEFAULT_OUTPUT_DIR.to_string());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TANH: &str = r#"{"schema_version": 1, "dim": 1,
        "potential": {"terms": [{"factors": [{"subspace": [],
            "radial": {"tail": {"boundary": {"op": "coord", "index": 0}}}}]}]}}"#;

    #[test]
    fn parses_minimal_config() {
        let cfg = RunConfig::from_json(TANH).unwrap();
        let h = cfg.hamiltonian().unwrap();
        assert_eq!(h.space.dim(), 1);
        assert!((h.potential.eval(&[50.0]) - 1.0).abs() < 1e-15);
        let r = cfg.resolved().unwrap();
        assert_eq!(r.output_dir.as_deref(), Some(DEFAULT_OUTPUT_DIR));
        // parsing the resolved document gives back the same document
        let text = serde_json::to_string(&r).unwrap();
        let again = RunConfig::from_json(&text).unwrap();
        assert_eq!(serde_json::to_string(&again).unwrap(), text);
    }

    #[test]
    fn reports_paths() {
        let bad = r#"{"schema_version": 1, "dim": 2,
            "potential": {"terms": [{"factors": [{"subspace": [[1, 0, 0]], "radial": {}}]}]}}"#;
        let err = RunConfig::from_json(bad).unwrap_err();
        match err {
            ConfigError::Schema(e) => assert_eq!(e.path, "potential.terms[0].factors[0].subspace[0]"),
            other => panic!("{other}"),
        }
        let unknown = r#"{"schema_version": 1, "dim": 1, "potentail": {}}"#;
        assert!(matches!(RunConfig::from_json(unknown), Err(ConfigError::Parse { .. })));
        let typed = r#"{"schema_version": 1, "dim": 1, "numerics": {"drift_tol": "x"}}"#;
        match RunConfig::from_json(typed).unwrap_err() {
            ConfigError::Parse { path, line, .. } => {
                assert_eq!(path, "numerics.drift_tol");
                assert_eq!(line, 1);
            }
            other => panic!("{other}"),
        }
        let version = r#"{"schema_version": 7, "dim": 1}"#;
        assert!(matches!(RunConfig::from_json(version), Err(ConfigError::Schema(_))));
    }

    #[test]
    fn divergence_entries_symmetrize() {
        let json = r#"{"schema_version": 1, "dim": 1,
            "divergence": [{"mu": 1, "nu": 1, "coefficient": {"terms": [{"coeff": 2.0}]}},
                           {"mu": 0, "nu": 1, "coefficient": {"terms": [{"coeff": 0.5}]}}]}"#;
        let cfg = RunConfig::from_json(json).unwrap();
        let h = cfg.hamiltonian().unwrap();
        let g = h.divergence.unwrap();
        assert_eq!(g[1][0].as_ref().unwrap().as_constant(), Some(0.5));
        assert_eq!(g[1][1].as_ref().unwrap().as_constant(), Some(2.0));
    }
}
