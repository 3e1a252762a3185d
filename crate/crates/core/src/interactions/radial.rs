//! Functions on a quotient `X/Y` with radial limits at infinity.
//!
//! A [`RadialFunction`] is `constant + Σ core + θ(|z - c|)·V((z - c)/|z - c|)
//! + Σ mean_vanishing`, where the core primitives decay pointwise, `V` is
//! a continuous boundary function and the mean-vanishing primitives only
//! vanish on average. The radial limit along `β` is `constant + V(β)`.

use super::boundary::BoundaryExpr;
use super::InteractionError;
use crate::geometry::{norm, Direction};
use serde::{Deserialize, Serialize};

/// Default inner radius of the tail cutoff.
pub const TAIL_INNER: f64 = 1.0;
/// Default outer radius of the tail cutoff.
pub const TAIL_OUTER: f64 = 2.0;

/// `θ(r)`: 0 on `[0, inner]`, 1 on `[outer, ∞)`, C¹ smoothstep in between.
pub fn cutoff(r: f64, inner: f64, outer: f64) -> f64 {
    if r <= inner {
        0.0
    } else if r >= outer {
        1.0
    } else {
        let t = (r - inner) / (outer - inner);
        t * t * (3.0 - 2.0 * t)
    }
}

fn dist(z: &[f64], c: &[f64]) -> f64 {
    if c.is_empty() {
        return norm(z);
    }
    z.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn offset(z: &[f64], c: &[f64]) -> Vec<f64> {
    if c.is_empty() {
        return z.to_vec();
    }
    z.iter().zip(c).map(|(a, b)| a - b).collect()
}

/// Smooth compactly supported bump normalised to 1 at the centre.
fn bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// Pointwise decaying primitives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorePrimitive {
    /// `A exp(-|z - c|² / w²)`
    Gaussian {
        amplitude: f64,
        #[serde(default)]
        center: Vec<f64>,
        width: f64,
    },
    /// `A (1 + |z - c|²)^(-p)`, `p > 0`
    InversePower {
        amplitude: f64,
        #[serde(default)]
        center: Vec<f64>,
        power: f64,
    },
    /// `A exp(1 - 1/(1 - |z - c|²/R²))` inside the ball of radius `R`.
    Bump {
        amplitude: f64,
        #[serde(default)]
        center: Vec<f64>,
        radius: f64,
    },
}

impl CorePrimitive {
    pub fn eval(&self, z: &[f64]) -> f64 {
        match self {
            CorePrimitive::Gaussian { amplitude, center, width } => {
                let r = dist(z, center);
                amplitude * (-(r * r) / (width * width)).exp()
            }
            CorePrimitive::InversePower { amplitude, center, power } => {
                let r = dist(z, center);
                amplitude * (1.0 + r * r).powf(-power)
            }
            CorePrimitive::Bump { amplitude, center, radius } => amplitude * bump(dist(z, center) / radius),
        }
    }

    fn center_mut(&mut self) -> &mut Vec<f64> {
        match self {
            CorePrimitive::Gaussian { center, .. }
            | CorePrimitive::InversePower { center, .. }
            | CorePrimitive::Bump { center, .. } => center,
        }
    }

    fn amplitude(&self) -> f64 {
        match self {
            CorePrimitive::Gaussian { amplitude, .. }
            | CorePrimitive::InversePower { amplitude, .. }
            | CorePrimitive::Bump { amplitude, .. } => *amplitude,
        }
    }

    fn validate(&self, d: usize) -> Result<(), String> {
        let (center, scale, name) = match self {
            CorePrimitive::Gaussian { center, width, .. } => (center, *width, "width"),
            CorePrimitive::InversePower { center, power, .. } => (center, *power, "power"),
            CorePrimitive::Bump { center, radius, .. } => (center, *radius, "radius"),
        };
        check_center(center, d)?;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(format!("{name} must be positive"));
        }
        if !self.amplitude().is_finite() {
            return Err("amplitude must be finite".into());
        }
        Ok(())
    }
}

fn check_center(center: &[f64], d: usize) -> Result<(), String> {
    if !center.is_empty() && center.len() != d {
        return Err(format!("center has length {}, expected {d}", center.len()));
    }
    if center.iter().any(|x| !x.is_finite()) {
        return Err("center must be finite".into());
    }
    Ok(())
}

fn default_inner() -> f64 {
    TAIL_INNER
}

fn default_outer() -> f64 {
    TAIL_OUTER
}

/// `θ(|z - c|) · V((z - c)/|z - c|)`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tail {
    pub boundary: BoundaryExpr,
    #[serde(default)]
    pub center: Vec<f64>,
    #[serde(default = "default_inner")]
    pub inner: f64,
    #[serde(default = "default_outer")]
    pub outer: f64,
}

impl Tail {
    pub fn new(boundary: BoundaryExpr) -> Self {
        Tail {
            boundary,
            center: Vec::new(),
            inner: TAIL_INNER,
            outer: TAIL_OUTER,
        }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        let w = offset(z, &self.center);
        let r = norm(&w);
        let t = cutoff(r, self.inner, self.outer);
        if t == 0.0 {
            return 0.0;
        }
        let unit: Vec<f64> = w.iter().map(|x| x / r).collect();
        t * self.boundary.eval(&unit)
    }
}

/// Bounded primitives that vanish in the mean but not pointwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeanVanishing {
    /// `A sin(k·(z - c) + φ) (1 + |z - c|)^(-ε)`, `ε > 0`
    Oscillator {
        amplitude: f64,
        #[serde(default)]
        center: Vec<f64>,
        frequency: Vec<f64>,
        #[serde(default)]
        phase: f64,
        decay: f64,
    },
    /// Bumps of height `A` centred at `c + first·ratio^j·u` with radius
    /// `width/(1 + j)`, `j < count`.
    BumpTrain {
        amplitude: f64,
        #[serde(default)]
        center: Vec<f64>,
        direction: Vec<f64>,
        first: f64,
        ratio: f64,
        width: f64,
        count: usize,
    },
}

impl MeanVanishing {
    pub fn eval(&self, z: &[f64]) -> f64 {
        match self {
            MeanVanishing::Oscillator {
                amplitude,
                center,
                frequency,
                phase,
                decay,
            } => {
                let w = offset(z, center);
                let arg: f64 = frequency.iter().zip(&w).map(|(k, x)| k * x).sum::<f64>() + phase;
                amplitude * arg.sin() * (1.0 + norm(&w)).powf(-decay)
            }
            MeanVanishing::BumpTrain {
                amplitude,
                center,
                direction,
                first,
                ratio,
                width,
                count,
            } => {
                let w = offset(z, center);
                let dn = norm(direction);
                let mut total = 0.0;
                let mut pos = *first;
                for j in 0..*count {
                    let radius = width / (1.0 + j as f64);
                    let d: f64 = w
                        .iter()
                        .zip(direction)
                        .map(|(x, u)| {
                            let e = x - pos * u / dn;
                            e * e
                        })
                        .sum::<f64>()
                        .sqrt();
                    total += bump(d / radius);
                    pos *= ratio;
                }
                amplitude * total
            }
        }
    }

    fn center_mut(&mut self) -> &mut Vec<f64> {
        match self {
            MeanVanishing::Oscillator { center, .. } | MeanVanishing::BumpTrain { center, .. } => center,
        }
    }

    fn sup_bound(&self) -> f64 {
        match self {
            MeanVanishing::Oscillator { amplitude, .. } => amplitude.abs(),
            MeanVanishing::BumpTrain { amplitude, count, .. } => amplitude.abs() * *count as f64,
        }
    }

    fn validate(&self, d: usize) -> Result<(), String> {
        match self {
            MeanVanishing::Oscillator {
                amplitude,
                center,
                frequency,
                phase,
                decay,
            } => {
                check_center(center, d)?;
                if frequency.len() != d {
                    return Err(format!("frequency has length {}, expected {d}", frequency.len()));
                }
                if !(*decay > 0.0) {
                    return Err("decay must be positive".into());
                }
                if !(amplitude.is_finite() && phase.is_finite()) {
                    return Err("amplitude and phase must be finite".into());
                }
            }
            MeanVanishing::BumpTrain {
                amplitude,
                center,
                direction,
                first,
                ratio,
                width,
                ..
            } => {
                check_center(center, d)?;
                if direction.len() != d || norm(direction) == 0.0 {
                    return Err(format!("direction must be a nonzero vector of length {d}"));
                }
                if !(*first > 0.0 && *ratio > 1.0 && *width > 0.0 && amplitude.is_finite()) {
                    return Err("bump train needs first > 0, ratio > 1, width > 0".into());
                }
            }
        }
        Ok(())
    }
}

/// A bounded function on a `quotient_dim`-dimensional quotient with
/// uniform radial limits (up to a part vanishing in the mean).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialFunction {
    #[serde(skip)]
    pub quotient_dim: usize,
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub core: Vec<CorePrimitive>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<Tail>,
    #[serde(default)]
    pub mean_vanishing: Vec<MeanVanishing>,
}

impl RadialFunction {
    pub fn new(quotient_dim: usize) -> Self {
        RadialFunction {
            quotient_dim,
            constant: 0.0,
            core: Vec::new(),
            tail: None,
            mean_vanishing: Vec::new(),
        }
    }

    pub fn constant(quotient_dim: usize, c: f64) -> Self {
        RadialFunction {
            constant: c,
            ..Self::new(quotient_dim)
        }
    }

    /// `A exp(-|z|²/w²)`
    pub fn gaussian(quotient_dim: usize, amplitude: f64, width: f64) -> Self {
        Self::new(quotient_dim).with_core(CorePrimitive::Gaussian {
            amplitude,
            center: Vec::new(),
            width,
        })
    }

    /// Pure tail with boundary function `V`.
    pub fn tail(quotient_dim: usize, boundary: BoundaryExpr) -> Self {
        Self::new(quotient_dim).with_tail(Tail::new(boundary))
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant = c;
        self
    }

    pub fn with_core(mut self, p: CorePrimitive) -> Self {
        self.core.push(p);
        self
    }

    pub fn with_tail(mut self, t: Tail) -> Self {
        self.tail = Some(t);
        self
    }

    pub fn with_mean_vanishing(mut self, m: MeanVanishing) -> Self {
        self.mean_vanishing.push(m);
        self
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        let mut v = self.constant;
        for c in &self.core {
            v += c.eval(z);
        }
        if let Some(t) = &self.tail {
            v += t.eval(z);
        }
        for m in &self.mean_vanishing {
            v += m.eval(z);
        }
        v
    }

    /// Boundary value `V(ω)` on the unit sphere (0 without a tail).
    pub fn boundary_value(&self, unit: &[f64]) -> f64 {
        self.tail.as_ref().map_or(0.0, |t| t.boundary.eval(unit))
    }

    /// `lim_{r→∞} v(r β + z)` for a direction of the quotient.
    pub fn radial_limit(&self, beta: &Direction) -> f64 {
        self.constant + self.boundary_value(beta.unit())
    }

    /// Upper bound on `sup |v|`.
    pub fn sup_bound(&self) -> f64 {
        self.constant.abs()
            + self.core.iter().map(|c| c.amplitude().abs()).sum::<f64>()
            + self.tail.as_ref().map_or(0.0, |t| t.boundary.sup_bound())
            + self.mean_vanishing.iter().map(|m| m.sup_bound()).sum::<f64>()
    }

    /// `z ↦ v(z + s)`: every centre moves by `-s`.
    pub fn translated(&self, s: &[f64]) -> RadialFunction {
        let shift = |c: &mut Vec<f64>| {
            if c.is_empty() {
                *c = vec![0.0; s.len()];
            }
            for (ci, si) in c.iter_mut().zip(s) {
                *ci -= si;
            }
        };
        let mut out = self.clone();
        for c in &mut out.core {
            shift(c.center_mut());
        }
        if let Some(t) = &mut out.tail {
            shift(&mut t.center);
        }
        for m in &mut out.mean_vanishing {
            shift(m.center_mut());
        }
        out
    }

    /// Whether the boundary function is constant on the unit sphere,
    /// checked on the sample points `units`.
    pub fn has_constant_boundary(&self, units: &[Vec<f64>]) -> bool {
        let Some(t) = &self.tail else {
            return true;
        };
        if t.boundary.max_coord().is_none() {
            return true;
        }
        let vals: Vec<f64> = units.iter().map(|u| t.boundary.eval(u)).collect();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        hi - lo <= 1e-12
    }

    pub fn validate(&self) -> Result<(), InteractionError> {
        let d = self.quotient_dim;
        let bad = |what: &str, i: usize, msg: String| InteractionError::InvalidRadial(format!("{what}[{i}]: {msg}"));
        if !self.constant.is_finite() {
            return Err(InteractionError::InvalidRadial("constant must be finite".into()));
        }
        for (i, c) in self.core.iter().enumerate() {
            c.validate(d).map_err(|m| bad("core", i, m))?;
        }
        for (i, m) in self.mean_vanishing.iter().enumerate() {
            m.validate(d).map_err(|msg| bad("mean_vanishing", i, msg))?;
        }
        if let Some(t) = &self.tail {
            check_center(&t.center, d).map_err(|m| InteractionError::InvalidRadial(format!("tail: {m}")))?;
            if !(t.inner >= 0.0 && t.outer > t.inner) {
                return Err(InteractionError::InvalidRadial("tail: need 0 <= inner < outer".into()));
            }
            if let Some(k) = t.boundary.max_coord() {
                if k >= d {
                    return Err(InteractionError::InvalidRadial(format!(
                        "tail: boundary uses coordinate {k} on a {d}-dimensional quotient"
                    )));
                }
            }
            if !t.boundary.is_finite() {
                return Err(InteractionError::InvalidRadial("tail: non-finite constant".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Space;

    #[test]
    fn cutoff_is_c1_and_monotone() {
        assert_eq!(cutoff(0.5, 1.0, 2.0), 0.0);
        assert_eq!(cutoff(2.5, 1.0, 2.0), 1.0);
        let mut prev = 0.0;
        for i in 0..=100 {
            let r = 1.0 + i as f64 / 100.0;
            let t = cutoff(r, 1.0, 2.0);
            assert!(t >= prev);
            prev = t;
        }
        let h = 1e-6;
        let slope_in = (cutoff(1.0 + h, 1.0, 2.0) - cutoff(1.0, 1.0, 2.0)) / h;
        let slope_out = (cutoff(2.0, 1.0, 2.0) - cutoff(2.0 - h, 1.0, 2.0)) / h;
        assert!(slope_in.abs() < 1e-5 && slope_out.abs() < 1e-5);
    }

    #[test]
    fn radial_limit_examples() {
        let s1 = Space::new(1).unwrap();
        let tanh_like = RadialFunction::tail(1, BoundaryExpr::coord(0));
        assert_eq!(tanh_like.radial_limit(&s1.axis(0)), 1.0);
        assert_eq!(tanh_like.radial_limit(&s1.axis(0).negate()), -1.0);

        let g = RadialFunction::gaussian(1, 3.0, 1.0);
        assert_eq!(g.radial_limit(&s1.axis(0)), 0.0);

        let s2 = Space::new(2).unwrap();
        let prod = RadialFunction::tail(2, BoundaryExpr::mul(vec![BoundaryExpr::coord(0), BoundaryExpr::coord(1)]));
        let beta = Direction::from_integers(s2, &[1, 1]).unwrap();
        assert!((prod.radial_limit(&beta) - 0.5).abs() < 1e-15);
        // and numerically along the ray
        let far = prod.eval(&[1e6, 1e6]);
        assert!((far - 0.5).abs() < 1e-12);
    }

    #[test]
    fn translation_moves_centres() {
        let g = RadialFunction::gaussian(1, 1.0, 1.0);
        let t = g.translated(&[2.0]);
        for z in [-3.0, -1.0, 0.0, 0.7, 4.0] {
            assert!((t.eval(&[z]) - g.eval(&[z + 2.0])).abs() < 1e-15);
        }
        match &t.core[0] {
            CorePrimitive::Gaussian { center, .. } => assert_eq!(center, &vec![-2.0]),
            _ => unreachable!(),
        }
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let mut r = RadialFunction::gaussian(1, 1.0, -1.0);
        assert!(r.validate().is_err());
        r = RadialFunction::tail(1, BoundaryExpr::coord(1));
        assert!(r.validate().is_err());
        r = RadialFunction::new(2).with_core(CorePrimitive::InversePower {
            amplitude: 1.0,
            center: vec![0.0],
            power: 1.0,
        });
        assert!(r.validate().is_err());
    }

    #[test]
    fn bump_train_sup_does_not_decay() {
        let m = MeanVanishing::BumpTrain {
            amplitude: 1.0,
            center: vec![],
            direction: vec![1.0],
            first: 10.0,
            ratio: 2.0,
            width: 1.0,
            count: 6,
        };
        for j in 0..6 {
            let c = 10.0 * 2f64.powi(j);
            assert!((m.eval(&[c]) - 1.0).abs() < 1e-12);
        }
    }
}
