//! Localizations at infinity `H_α` and the essential spectrum as the
//! closed union of their spectra.
//!
//! `H_α = h(p) + τ_α(V)` keeps every interaction whose kernel contains
//! `α` and replaces the others by their radial limits. The map
//! `α ↦ H_α` only depends on the containment pattern of `α` and on the
//! boundary values of the collapsed interactions, so the sphere at
//! infinity is explored cell by cell.

mod demos;
mod oracle;

pub use demos::{
    continuity_profile, noncommute_demo, pathology_demo, two_body_instance, unclosed_union_demo,
    unclosed_union_element, ContinuityLevel, ContinuityReport, NoncommuteReport, PathologyReport, RayValue,
    UnclosedUnionReport, NONCOMMUTE_MIN_GAP, UNCLOSED_GAP,
};
pub use oracle::{
    detect_infinite_localization, resolvent_limit_check, resolvent_limit_check_fn, test_vectors, truncated_box, truncation_oracle,
    CountRow, DivergenceProbe, LimitOperator, ResolventLimitReport, ResolventLimitRow, TruncationBox, TruncationReport,
    TRUNCATION_EIGS,
};

use crate::geometry::{arrangement_cells, sphere_samples, Direction, SamplerConfig, Space, Subspace};
use crate::interactions::{Collapse, Element, InvarianceSampling};
use crate::spectra::{
    fiber_spectrum_divergence, FiberConfig, FiberSpectrum, GridSpec, KineticSymbol, SpectraError, SpectrumSet,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Coefficient table `g[μ][ν]` of a first-order divergence-form term;
/// index 0 stands for the identity.
pub type CoefficientTable = Vec<Vec<Option<Element>>>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HvzError {
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error("invalid Hamiltonian: {0}")]
    InvalidSpec(String),
    #[error("no valid fibering subspace for direction {0}")]
    NoFibering(String),
}

/// Numerical parameters of the essential-spectrum pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Numerics {
    /// Transverse grid points per axis (default by transverse dimension).
    pub transverse_points: Option<usize>,
    /// Transverse box half-length (default by transverse dimension).
    pub transverse_halflength: Option<f64>,
    pub fiber: FiberConfig,
    pub sampler: SamplerConfig,
    /// Initial sample count on a two-dimensional continuum cell; scaled
    /// by the sphere dimension for larger cells.
    pub continuum_samples: usize,
    /// Number of doublings after the initial level.
    pub max_refinements: usize,
    /// Stop refining once consecutive estimates are this close.
    pub drift_tol: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            transverse_points: None,
            transverse_halflength: None,
            fiber: FiberConfig::default(),
            sampler: SamplerConfig::default(),
            continuum_samples: 64,
            max_refinements: 4,
            drift_tol: 1e-2,
        }
    }
}

impl Numerics {
    pub fn transverse_grid(&self, dim: usize) -> Result<GridSpec, SpectraError> {
        let base = GridSpec::default_for(dim)?;
        let n = self.transverse_points.unwrap_or(base.points()[0]);
        let l = self.transverse_halflength.unwrap_or(base.halflengths()[0]);
        GridSpec::uniform(dim, n, l)
    }
}

/// `H = h(p) + V (+ Σ p^μ g_{μν} p^ν)`.
#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    pub space: Space,
    pub kinetic: KineticSymbol,
    pub potential: Element,
    pub divergence: Option<CoefficientTable>,
    pub numerics: Numerics,
}

impl HamiltonianSpec {
    pub fn new(kinetic: KineticSymbol, potential: Element) -> Self {
        HamiltonianSpec {
            space: potential.space(),
            kinetic,
            potential,
            divergence: None,
            numerics: Numerics::default(),
        }
    }

    pub fn with_numerics(mut self, numerics: Numerics) -> Self {
        self.numerics = numerics;
        self
    }

    pub fn with_divergence(mut self, g: CoefficientTable) -> Self {
        self.divergence = Some(g);
        self
    }

    pub fn validate(&self) -> Result<(), HvzError> {
        let n = self.space.dim();
        if self.potential.space() != self.space {
            return Err(HvzError::InvalidSpec("potential lives on a different space".into()));
        }
        self.kinetic.check_proper(n)?;
        if let Some(g) = &self.divergence {
            if g.len() != n + 1 || g.iter().any(|r| r.len() != n + 1) {
                return Err(HvzError::InvalidSpec(format!("divergence table must be {0}x{0}", n + 1)));
            }
            if g.iter().flatten().flatten().any(|e| e.space() != self.space) {
                return Err(HvzError::InvalidSpec("coefficient lives on a different space".into()));
            }
        }
        Ok(())
    }

    /// Distinct interaction kernels of the potential and coefficients.
    pub fn subspaces(&self) -> Vec<Subspace> {
        let mut out = self.potential.subspaces();
        for e in self.divergence.iter().flatten().flatten().flatten() {
            for y in e.subspaces() {
                if !out.contains(&y) {
                    out.push(y);
                }
            }
        }
        out
    }
}

/// `H_α` together with the bookkeeping of which interactions survived.
#[derive(Clone, Debug)]
pub struct LocalizationReport {
    pub direction: Direction,
    pub localized: HamiltonianSpec,
    /// Kernels `Y ⊃ α` of the interactions kept unchanged.
    pub surviving: Vec<Subspace>,
    /// Interactions replaced by their radial limit `v_Y(π_Y α)`.
    pub collapsed: Vec<Collapse>,
    /// Constant part of the localized potential.
    pub constant: f64,
}

/// Constant (factor-free) part of an element.
pub fn constant_part(u: &Element) -> f64 {
    u.terms().iter().filter(|t| t.factors.is_empty()).map(|t| t.coeff).sum()
}

/// `H_α = h(p) + τ_α(V)`, with the divergence coefficients localized
/// entry by entry.
pub fn localize(h: &HamiltonianSpec, alpha: &Direction) -> LocalizationReport {
    let (potential, collapsed) = h.potential.tau_alpha_traced(alpha);
    let divergence = h.divergence.as_ref().map(|g| {
        g.iter()
            .map(|row| row.iter().map(|e| e.as_ref().map(|e| e.tau_alpha(alpha))).collect())
            .collect()
    });
    let surviving = potential.subspaces();
    let constant = constant_part(&potential);
    LocalizationReport {
        direction: alpha.clone(),
        localized: HamiltonianSpec {
            space: h.space,
            kinetic: h.kinetic.clone(),
            potential,
            divergence,
            numerics: h.numerics.clone(),
        },
        surviving,
        collapsed,
        constant,
    }
}

/// A cell of directions with identical surviving interactions.
#[derive(Clone, Debug)]
pub struct LocalizationCell {
    pub pattern: u64,
    pub span: Subspace,
    pub representative: Direction,
    /// Boundary samples from the arrangement sampler.
    pub samples: Vec<Direction>,
    /// The collapsed radial limits vary inside the cell, so the
    /// localizations form a continuum and the cell must be sampled.
    pub continuum: bool,
}

/// Cells of the arrangement of all interaction kernels, each flagged
/// when its localizations vary continuously.
pub fn localization_cells(h: &HamiltonianSpec) -> Vec<LocalizationCell> {
    let subspaces = h.subspaces();
    let cells = arrangement_cells(h.space, &subspaces, &h.numerics.sampler);
    let generators: Vec<&crate::interactions::Generator> = h
        .potential
        .generators()
        .chain(h.divergence.iter().flatten().flatten().flatten().flat_map(|e| e.generators()))
        .collect();
    cells
        .into_iter()
        .map(|cell| {
            let mut probes = cell.samples.clone();
            probes.push(cell.representative.clone());
            let continuum = generators.iter().any(|g| {
                if g.kernel().contains_subspace(&cell.span) {
                    return false;
                }
                let values: Vec<f64> = probes.iter().filter_map(|a| g.limit_along(a)).collect();
                let (lo, hi) = values
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
                hi - lo > 1e-12
            });
            LocalizationCell {
                pattern: cell.pattern,
                span: cell.span,
                representative: cell.representative,
                samples: cell.samples,
                continuum,
            }
        })
        .collect()
}

/// Largest subspace along which the localized Hamiltonian is invariant:
/// the intersection of the surviving kernels (the whole space when none
/// survives), shrunk to `[α]` if the sampled invariance test fails.
pub fn fibering_subspace(loc: &LocalizationReport) -> Result<Subspace, HvzError> {
    let space = loc.localized.space;
    let mut kernels = loc.localized.potential.subspaces();
    for e in loc.localized.divergence.iter().flatten().flatten().flatten() {
        kernels.extend(e.subspaces());
    }
    let mut c = Subspace::full(space);
    for y in &kernels {
        c = c.intersect(y).expect("same space");
    }
    let sampling = InvarianceSampling::default();
    let invariant = |c: &Subspace| {
        loc.localized.potential.is_invariant_under(c, &sampling)
            && loc
                .localized
                .divergence
                .iter()
                .flatten()
                .flatten()
                .flatten()
                .all(|e| e.is_invariant_under(c, &sampling))
    };
    if !c.is_zero() && invariant(&c) {
        return Ok(c);
    }
    let alpha = &loc.direction;
    let line = alpha
        .rational_vector()
        .and_then(|v| Subspace::from_rationals(space, &[v]).ok())
        .ok_or_else(|| HvzError::NoFibering(alpha.to_string()))?;
    if invariant(&line) {
        Ok(line)
    } else {
        Err(HvzError::NoFibering(alpha.to_string()))
    }
}

/// `σ(H_α)` via the fiber decomposition along [`fibering_subspace`].
pub fn localized_spectrum(h: &HamiltonianSpec, alpha: &Direction) -> Result<(LocalizationReport, Subspace, FiberSpectrum), HvzError> {
    let loc = localize(h, alpha);
    let c = fibering_subspace(&loc)?;
    let t = h.space.dim() - c.dim();
    let grid = if t > 0 { Some(h.numerics.transverse_grid(t)?) } else { None };
    let fs = fiber_spectrum_divergence(
        &loc.localized.kinetic,
        &loc.localized.potential,
        loc.localized.divergence.as_deref(),
        &c,
        grid.as_ref(),
        &h.numerics.fiber,
    )?;
    Ok((loc, c, fs))
}

/// Serializable view of a direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionView {
    pub unit: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integer: Option<Vec<i64>>,
}

impl From<&Direction> for DirectionView {
    fn from(a: &Direction) -> Self {
        use num_traits::ToPrimitive;
        DirectionView {
            unit: a.unit().to_vec(),
            integer: a.primitive().and_then(|p| p.iter().map(|x| x.to_i64()).collect()),
        }
    }
}

fn rows(y: &Subspace) -> Vec<Vec<i64>> {
    y.basis_i64().unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantView {
    pub term: usize,
    pub kernel: Vec<Vec<i64>>,
    pub value: f64,
}

/// One computed localization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub direction: DirectionView,
    pub fibering: Vec<Vec<i64>>,
    pub surviving: Vec<Vec<Vec<i64>>>,
    pub constants: Vec<ConstantView>,
    pub bottom: f64,
    pub intervals: Vec<(f64, f64)>,
    pub analytic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub pattern: u64,
    pub span: Vec<Vec<i64>>,
    pub representative: DirectionView,
    pub continuum: bool,
    /// Localization data of the representative.
    pub surviving: Vec<Vec<Vec<i64>>>,
    pub constants: Vec<ConstantView>,
    /// Union over the computed samples of the cell, clipped to the window.
    pub intervals: Vec<(f64, f64)>,
    pub samples: Vec<SampleReport>,
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub level: usize,
    pub samples: usize,
    /// Hausdorff distance to the previous level (0 for the first).
    pub hausdorff_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementRecord {
    pub levels: Vec<RefinementLevel>,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EssentialSpectrumEstimate {
    pub essential_spectrum: SpectrumSet,
    pub window: (f64, f64),
    /// The spectrum continues above the window top and was cut there.
    pub truncated_above: bool,
    pub cells: Vec<CellReport>,
    pub refinement: RefinementRecord,
}

impl EssentialSpectrumEstimate {
    pub fn inf(&self) -> Option<f64> {
        self.essential_spectrum.inf()
    }

    pub fn errors(&self) -> Vec<String> {
        self.cells
            .iter()
            .flat_map(|c| c.errors.iter().map(move |e| format!("cell {}: {e}", c.pattern)))
            .collect()
    }
}

struct Computed {
    cell: usize,
    result: Result<(SampleReport, SpectrumSet), String>,
}

fn compute_samples(h: &HamiltonianSpec, jobs: &[(usize, Direction)]) -> Vec<Computed> {
    jobs.par_iter()
        .map(|(cell, alpha)| Computed {
            cell: *cell,
            result: localized_spectrum(h, alpha)
                .map(|(loc, c, fs)| {
                    let report = SampleReport {
                        direction: alpha.into(),
                        fibering: rows(&c),
                        surviving: loc.surviving.iter().map(rows).collect(),
                        constants: constants_view(&loc.collapsed),
                        bottom: fs.bottom,
                        intervals: fs.set.intervals().to_vec(),
                        analytic: fs.analytic,
                    };
                    (report, fs.set)
                })
                .map_err(|e| format!("direction {alpha}: {e}")),
        })
        .collect()
}

fn constants_view(collapsed: &[Collapse]) -> Vec<ConstantView> {
    collapsed
        .iter()
        .map(|c| ConstantView {
            term: c.term,
            kernel: rows(&c.kernel),
            value: c.value,
        })
        .collect()
}

/// Sample directions of a continuum cell at refinement `level`.
fn continuum_samples(h: &HamiltonianSpec, cell: &LocalizationCell, level: usize) -> Vec<Direction> {
    let base = h.numerics.continuum_samples.max(1) << (cell.span.dim() - 2);
    let subspaces = h.subspaces();
    sphere_samples(h.space, &cell.span, base << level)
        .into_iter()
        .filter(|a| crate::geometry::containment_pattern(&subspaces, a) == cell.pattern)
        .collect()
}

/// `σ_ess(H) = ∪̄_α σ(H_α)`, assembled cell by cell.
///
/// Cells without a continuum of localizations use one representative;
/// one-dimensional cells use both of their directions; higher-dimensional
/// continuum cells start at `continuum_samples` directions and double
/// until consecutive estimates are within `drift_tol` (Hausdorff). The
/// estimate at each level is the union over all samples so far, so it
/// never shrinks. Failures are recorded per cell and do not abort the
/// union.
pub fn essential_spectrum(h: &HamiltonianSpec) -> Result<EssentialSpectrumEstimate, HvzError> {
    h.validate()?;
    let num = &h.numerics;
    let cells = localization_cells(h);

    let mut jobs: Vec<(usize, Direction)> = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        if !cell.continuum {
            jobs.push((i, cell.representative.clone()));
        } else if cell.span.dim() == 1 {
            jobs.extend(cell.samples.iter().map(|a| (i, a.clone())));
        } else {
            jobs.extend(continuum_samples(h, cell, 0).into_iter().map(|a| (i, a)));
        }
    }
    let refinable: Vec<usize> = (0..cells.len())
        .filter(|&i| cells[i].continuum && cells[i].span.dim() >= 2)
        .collect();

    let mut computed = compute_samples(h, &jobs);
    let tol = computed
        .iter()
        .filter_map(|c| c.result.as_ref().ok().map(|r| r.1.tol()))
        .fold(num.fiber.merge_tol.unwrap_or(crate::spectra::MIN_MERGE_TOL), f64::max);

    let assemble = |computed: &[Computed]| -> ((f64, f64), SpectrumSet) {
        let bottom = computed
            .iter()
            .filter_map(|c| c.result.as_ref().ok().map(|r| r.0.bottom))
            .fold(f64::INFINITY, f64::min);
        let window = num
            .fiber
            .window
            .unwrap_or((bottom - num.fiber.below, bottom + num.fiber.above));
        let set = SpectrumSet::union_all(computed.iter().filter_map(|c| c.result.as_ref().ok().map(|r| &r.1)), tol)
            .clip(window.0, window.1);
        (window, set)
    };

    let (mut window, mut estimate) = assemble(&computed);
    let mut levels = vec![RefinementLevel {
        level: 0,
        samples: computed.len(),
        hausdorff_drift: 0.0,
    }];
    let mut converged = refinable.is_empty();
    for level in 1..=num.max_refinements {
        if converged {
            break;
        }
        let extra: Vec<(usize, Direction)> = refinable
            .iter()
            .flat_map(|&i| continuum_samples(h, &cells[i], level).into_iter().map(move |a| (i, a)))
            .collect();
        computed.extend(compute_samples(h, &extra));
        let (w, next) = assemble(&computed);
        let drift = next.hausdorff(&estimate);
        levels.push(RefinementLevel {
            level,
            samples: computed.len(),
            hausdorff_drift: drift,
        });
        window = w;
        estimate = next;
        converged = drift < num.drift_tol;
    }

    // per-cell reports, in cell order then sample order
    let mut reports: Vec<CellReport> = cells
        .iter()
        .map(|cell| {
            let loc = localize(h, &cell.representative);
            CellReport {
                pattern: cell.pattern,
                span: rows(&cell.span),
                representative: (&cell.representative).into(),
                continuum: cell.continuum,
                surviving: loc.surviving.iter().map(rows).collect(),
                constants: constants_view(&loc.collapsed),
                intervals: Vec::new(),
                samples: Vec::new(),
                errors: Vec::new(),
            }
        })
        .collect();
    let mut cell_sets: Vec<Vec<&SpectrumSet>> = vec![Vec::new(); cells.len()];
    for c in &computed {
        match &c.result {
            Ok((rep, set)) => {
                reports[c.cell].samples.push(rep.clone());
                cell_sets[c.cell].push(set);
            }
            Err(e) => reports[c.cell].errors.push(e.clone()),
        }
    }
    for (rep, sets) in reports.iter_mut().zip(cell_sets) {
        rep.intervals = SpectrumSet::union_all(sets, tol)
            .clip(window.0, window.1)
            .intervals()
            .to_vec();
    }
    let truncated_above = estimate.sup().is_some_and(|s| s >= window.1);
    Ok(EssentialSpectrumEstimate {
        essential_spectrum: estimate,
        window,
        truncated_above,
        cells: reports,
        refinement: RefinementRecord { levels, converged },
    })
}
