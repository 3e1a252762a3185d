use serde::{Deserialize, Serialize};

/// Closed-form expression in the coordinates of a point `ω`.
///
/// Used for boundary values on the unit sphere of a quotient space and for
/// custom kinetic symbols. Every expression of this grammar is continuous.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum BoundaryExpr {
    Const { value: f64 },
    Coord { index: usize },
    Add { terms: Vec<BoundaryExpr> },
    Mul { factors: Vec<BoundaryExpr> },
    Tanh { arg: Box<BoundaryExpr> },
    Sin { arg: Box<BoundaryExpr> },
    Cos { arg: Box<BoundaryExpr> },
    /// `Σ_i coeffs[i] · arg^i`
    Poly { coeffs: Vec<f64>, arg: Box<BoundaryExpr> },
}

impl BoundaryExpr {
    pub fn constant(value: f64) -> Self {
        BoundaryExpr::Const { value }
    }

    pub fn coord(index: usize) -> Self {
        BoundaryExpr::Coord { index }
    }

    pub fn scaled(self, c: f64) -> Self {
        BoundaryExpr::Mul {
            factors: vec![BoundaryExpr::constant(c), self],
        }
    }

    pub fn add(terms: Vec<BoundaryExpr>) -> Self {
        BoundaryExpr::Add { terms }
    }

    pub fn mul(factors: Vec<BoundaryExpr>) -> Self {
        BoundaryExpr::Mul { factors }
    }

    pub fn tanh(arg: BoundaryExpr) -> Self {
        BoundaryExpr::Tanh { arg: Box::new(arg) }
    }

    pub fn sin(arg: BoundaryExpr) -> Self {
        BoundaryExpr::Sin { arg: Box::new(arg) }
    }

    pub fn cos(arg: BoundaryExpr) -> Self {
        BoundaryExpr::Cos { arg: Box::new(arg) }
    }

    pub fn eval(&self, w: &[f64]) -> f64 {
        match self {
            BoundaryExpr::Const { value } => *value,
            BoundaryExpr::Coord { index } => w[*index],
            BoundaryExpr::Add { terms } => terms.iter().map(|t| t.eval(w)).sum(),
            BoundaryExpr::Mul { factors } => factors.iter().map(|t| t.eval(w)).product(),
            BoundaryExpr::Tanh { arg } => arg.eval(w).tanh(),
            BoundaryExpr::Sin { arg } => arg.eval(w).sin(),
            BoundaryExpr::Cos { arg } => arg.eval(w).cos(),
            BoundaryExpr::Poly { coeffs, arg } => {
                let t = arg.eval(w);
                coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
            }
        }
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            BoundaryExpr::Const { .. } => None,
            BoundaryExpr::Coord { index } => Some(*index),
            BoundaryExpr::Add { terms: xs } | BoundaryExpr::Mul { factors: xs } => {
                xs.iter().filter_map(|t| t.max_coord()).max()
            }
            BoundaryExpr::Tanh { arg }
            | BoundaryExpr::Sin { arg }
            | BoundaryExpr::Cos { arg }
            | BoundaryExpr::Poly { arg, .. } => arg.max_coord(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            BoundaryExpr::Const { value } => value.is_finite(),
            BoundaryExpr::Coord { .. } => true,
            BoundaryExpr::Add { terms: xs } | BoundaryExpr::Mul { factors: xs } => {
                xs.iter().all(|t| t.is_finite())
            }
            BoundaryExpr::Tanh { arg } | BoundaryExpr::Sin { arg } | BoundaryExpr::Cos { arg } => {
                arg.is_finite()
            }
            BoundaryExpr::Poly { coeffs, arg } => {
                coeffs.iter().all(|c| c.is_finite()) && arg.is_finite()
            }
        }
    }

    /// Interval enclosure of the values when every coordinate ranges
    /// over `[-1, 1]` (in particular on the unit sphere).
    pub fn range_on_cube(&self) -> (f64, f64) {
        match self {
            BoundaryExpr::Const { value } => (*value, *value),
            BoundaryExpr::Coord { .. } => (-1.0, 1.0),
            BoundaryExpr::Add { terms } => terms.iter().fold((0.0, 0.0), |(a, b), t| {
                let (c, d) = t.range_on_cube();
                (a + c, b + d)
            }),
            BoundaryExpr::Mul { factors } => factors
                .iter()
                .fold((1.0, 1.0), |acc, t| interval_mul(acc, t.range_on_cube())),
            BoundaryExpr::Tanh { arg } => {
                let (a, b) = arg.range_on_cube();
                (a.tanh(), b.tanh())
            }
            BoundaryExpr::Sin { arg } => trig_range(arg.range_on_cube(), 0.0),
            BoundaryExpr::Cos { arg } => trig_range(arg.range_on_cube(), std::f64::consts::FRAC_PI_2),
            BoundaryExpr::Poly { coeffs, arg } => {
                let t = arg.range_on_cube();
                coeffs.iter().rev().fold((0.0, 0.0), |acc, &c| {
                    let (a, b) = interval_mul(acc, t);
                    (a + c, b + c)
                })
            }
        }
    }

    /// `sup |V|` over the unit sphere, bounded above.
    pub fn sup_bound(&self) -> f64 {
        let (a, b) = self.range_on_cube();
        a.abs().max(b.abs())
    }
}

fn interval_mul((a, b): (f64, f64), (c, d): (f64, f64)) -> (f64, f64) {
    let p = [a * c, a * d, b * c, b * d];
    (
        p.iter().cloned().fold(f64::INFINITY, f64::min),
        p.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    )
}

/// Range of `sin(t + shift)` for `t ∈ [a, b]`.
fn trig_range((a, b): (f64, f64), shift: f64) -> (f64, f64) {
    use std::f64::consts::{FRAC_PI_2, PI};
    if b - a >= 2.0 * PI {
        return (-1.0, 1.0);
    }
    let (a, b) = (a + shift, b + shift);
    let mut lo = a.sin().min(b.sin());
    let mut hi = a.sin().max(b.sin());
    // critical points FRAC_PI_2 + k PI inside [a, b]
    let k0 = ((a - FRAC_PI_2) / PI).ceil() as i64;
    let k1 = ((b - FRAC_PI_2) / PI).floor() as i64;
    for k in k0..=k1 {
        if k.rem_euclid(2) == 0 {
            hi = 1.0;
        } else {
            lo = -1.0;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_bounds() {
        let e = BoundaryExpr::mul(vec![BoundaryExpr::coord(0), BoundaryExpr::coord(1)]);
        let s = 0.5f64.sqrt();
        assert!((e.eval(&[s, s]) - 0.5).abs() < 1e-15);
        assert_eq!(e.range_on_cube(), (-1.0, 1.0));

        let p = BoundaryExpr::Poly {
            coeffs: vec![1.0, 0.0, 2.0],
            arg: Box::new(BoundaryExpr::coord(0)),
        };
        assert_eq!(p.eval(&[0.5]), 1.5);
        let (lo, hi) = p.range_on_cube();
        assert!(lo <= 1.0 && hi >= 3.0);

        let c = BoundaryExpr::cos(BoundaryExpr::coord(0).scaled(0.1));
        let (lo, hi) = c.range_on_cube();
        assert!(lo <= 0.1f64.cos() && (hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let e = BoundaryExpr::tanh(BoundaryExpr::coord(0).scaled(2.0));
        let s = serde_json::to_string(&e).unwrap();
        assert!(s.starts_with(r#"{"op":"tanh","arg":{"op":"mul""#));
        let back: BoundaryExpr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
