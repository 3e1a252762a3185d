//! Cells of the arrangement cut out on the sphere at infinity by a finite
//! list of subspaces.
//!
//! Two directions belong to the same cell when they are contained in
//! exactly the same subspaces. Every cell is the set of directions of some
//! element `W` of the intersection lattice generated by the list (the
//! whole space for the generic cell) that avoid all smaller elements.

use super::{gram_schmidt, Direction, Space, Subspace};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Sample counts per sphere dimension (`S^{m-1}` inside an `m`-dim cell).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    pub samples_dim2: usize,
    pub samples_dim3: usize,
    pub samples_dim4: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            samples_dim2: 256,
            samples_dim3: 1024,
            samples_dim4: 2048,
        }
    }
}

impl SamplerConfig {
    pub fn count_for(&self, cell_dim: usize) -> usize {
        match cell_dim {
            0 => 0,
            1 => 2,
            2 => self.samples_dim2,
            3 => self.samples_dim3,
            _ => self.samples_dim4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    /// Bit `j` is set when the directions of the cell lie in `subspaces[j]`.
    pub pattern: u64,
    /// The lattice element whose generic directions form the cell.
    pub span: Subspace,
    pub representative: Direction,
    pub samples: Vec<Direction>,
}

/// Containment bitmask `{ j : α ⊂ subspaces[j] }`.
pub fn containment_pattern(subspaces: &[Subspace], alpha: &Direction) -> u64 {
    subspaces
        .iter()
        .enumerate()
        .filter(|(_, y)| y.contains_direction(alpha))
        .fold(0u64, |m, (j, _)| m | (1 << j))
}

/// Enumerates the realizable containment patterns of directions.
///
/// Cells are ordered by decreasing dimension of their span (the generic
/// cell first), then by pattern.
pub fn arrangement_cells(space: Space, subspaces: &[Subspace], config: &SamplerConfig) -> Vec<Cell> {
    assert!(subspaces.len() <= 64, "at most 64 subspaces are supported");
    let mut lattice: Vec<Subspace> = vec![Subspace::full(space)];
    for y in subspaces {
        if y.dim() >= 1 && !lattice.contains(y) {
            lattice.push(y.clone());
        }
    }
    // close under intersection
    let mut i = 1;
    while i < lattice.len() {
        for j in 1..i {
            let w = lattice[i].intersect(&lattice[j]).expect("same space");
            if w.dim() >= 1 && !lattice.contains(&w) {
                lattice.push(w);
            }
        }
        i += 1;
    }

    let mut cells: Vec<Cell> = lattice
        .iter()
        .map(|w| {
            let pattern = subspaces
                .iter()
                .enumerate()
                .filter(|(_, y)| y.contains_subspace(w))
                .fold(0u64, |m, (j, _)| m | (1 << j));
            let obstacles: Vec<&Subspace> = subspaces
                .iter()
                .filter(|y| !y.contains_subspace(w))
                .collect();
            let representative = generic_rational_direction(space, w, &obstacles);
            let samples = if w.dim() == 1 {
                vec![representative.clone(), representative.negate()]
            } else {
                sphere_samples(space, w, config.count_for(w.dim()))
                    .into_iter()
                    .filter(|a| containment_pattern(subspaces, a) == pattern)
                    .collect()
            };
            Cell {
                pattern,
                span: w.clone(),
                representative,
                samples,
            }
        })
        .collect();
    cells.sort_by(|a, b| b.span.dim().cmp(&a.span.dim()).then(a.pattern.cmp(&b.pattern)));
    cells
}

/// Smallest integer combination of the basis of `w` avoiding every
/// obstacle subspace.
fn generic_rational_direction(space: Space, w: &Subspace, obstacles: &[&Subspace]) -> Direction {
    let basis = w.basis_i64().expect("lattice bases fit in i64");
    let m = basis.len();
    for radius in 1i64.. {
        let side = (2 * radius + 1) as usize;
        let total = side.pow(m as u32);
        for idx in 0..total {
            let mut rest = idx;
            let coeffs: Vec<i64> = (0..m)
                .map(|_| {
                    // digits 0,1,2,3,4,.. map to 0,1,-1,2,-2,..
                    let d = (rest % side) as i64;
                    let c = if d % 2 == 1 { (d + 1) / 2 } else { -d / 2 };
                    rest /= side;
                    c
                })
                .collect();
            if coeffs.iter().map(|c| c.abs()).max() != Some(radius) {
                continue;
            }
            let v: Vec<i64> = (0..space.dim())
                .map(|k| coeffs.iter().zip(&basis).map(|(c, b)| c * b[k]).sum())
                .collect();
            let Ok(d) = Direction::from_integers(space, &v) else {
                continue;
            };
            if obstacles.iter().all(|y| !y.contains_direction(&d)) {
                return d;
            }
        }
    }
    unreachable!("a finite union of proper subspaces cannot cover a subspace")
}

/// Deterministic quasi-uniform points on the unit sphere of `w`.
pub fn sphere_samples(space: Space, w: &Subspace, count: usize) -> Vec<Direction> {
    let q = gram_schmidt(&w.basis_f64());
    let m = q.len();
    let local: Vec<Vec<f64>> = match m {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|i| {
                let t = 2.0 * PI * (i as f64 + 0.5) / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = (1.0 + 5f64.sqrt()) / 2.0;
            (0..count)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = 2.0 * PI * (i as f64 / golden).fract();
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            // Kronecker sequence with the generalised golden ratio of order 3
            let mut g = 2.0f64;
            for _ in 0..30 {
                g = (1.0 + g).powf(1.0 / 4.0);
            }
            let a = [1.0 / g, 1.0 / (g * g), 1.0 / (g * g * g)];
            (0..count)
                .map(|i| {
                    let u: Vec<f64> = a.iter().map(|ak| (0.5 + ak * (i as f64 + 1.0)).fract()).collect();
                    let (s, c) = ((1.0 - u[0]).sqrt(), u[0].sqrt());
                    let (t1, t2) = (2.0 * PI * u[1], 2.0 * PI * u[2]);
                    vec![s * t1.sin(), s * t1.cos(), c * t2.sin(), c * t2.cos()]
                })
                .collect()
        }
    };
    local
        .into_iter()
        .filter_map(|c| {
            let v: Vec<f64> = (0..space.dim())
                .map(|k| c.iter().zip(&q).map(|(ci, qi)| ci * qi[k]).sum())
                .collect();
            Direction::from_f64(space, &v).ok()
        })
        .collect()
}
