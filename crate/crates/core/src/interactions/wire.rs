//! JSON form of an [`Element`]:
//!
//! ```json
//! {"terms": [{"coeff": 1.0,
//!             "factors": [{"subspace": [[0, 1]],
//!                          "radial": {"constant": 0.0, "core": [], "tail": {...},
//!                                     "mean_vanishing": []}}]}]}
//! ```
//!
//! `subspace` lists integer spanning rows of the kernel `Y` (empty for the
//! zero subspace). The radial function is written in quotient coordinates
//! `z = Q x`, where the rows of `Q` are the canonical basis of the rational
//! orthogonal complement of `Y`.

use super::{Element, Generator, RadialFunction, Term};
use crate::config::SchemaError;
use crate::geometry::{Space, Subspace};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ElementDoc {
    #[serde(default)]
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDoc {
    #[serde(default = "one")]
    pub coeff: f64,
    #[serde(default)]
    pub factors: Vec<FactorDoc>,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorDoc {
    pub subspace: Vec<Vec<i64>>,
    pub radial: RadialFunction,
}

impl ElementDoc {
    pub fn to_element(&self, space: Space, path: &str) -> Result<Element, SchemaError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            let tpath = format!("{path}.terms[{i}]");
            if !t.coeff.is_finite() {
                return Err(SchemaError::new(format!("{tpath}.coeff"), "coefficient must be finite"));
            }
            let mut factors = Vec::with_capacity(t.factors.len());
            for (j, f) in t.factors.iter().enumerate() {
                let fpath = format!("{tpath}.factors[{j}]");
                factors.push(Arc::new(f.to_generator(space, &fpath)?));
            }
            terms.push(Term { coeff: t.coeff, factors });
        }
        Ok(Element::from_terms(space, terms))
    }

    pub fn from_element(u: &Element) -> Self {
        ElementDoc {
            terms: u
                .terms()
                .iter()
                .map(|t| TermDoc {
                    coeff: t.coeff,
                    factors: t
                        .factors
                        .iter()
                        .map(|g| FactorDoc {
                            subspace: g.kernel().basis_i64().expect("kernel rows fit in i64"),
                            radial: g.radial().clone(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl FactorDoc {
    pub fn to_generator(&self, space: Space, path: &str) -> Result<Generator, SchemaError> {
        for (r, row) in self.subspace.iter().enumerate() {
            if row.len() != space.dim() {
                return Err(SchemaError::new(
                    format!("{path}.subspace[{r}]"),
                    format!("row has length {}, expected {}", row.len(), space.dim()),
                ));
            }
        }
        let kernel = Subspace::from_vectors(space, &self.subspace)
            .map_err(|e| SchemaError::new(format!("{path}.subspace"), e.to_string()))?;
        let mut radial = self.radial.clone();
        radial.quotient_dim = space.dim() - kernel.dim();
        Generator::new(kernel, radial).map_err(|e| SchemaError::new(format!("{path}.radial"), e.to_string()))
    }
}

impl From<&Element> for ElementDoc {
    fn from(u: &Element) -> Self {
        ElementDoc::from_element(u)
    }
}
