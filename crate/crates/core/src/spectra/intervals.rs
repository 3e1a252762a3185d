use serde::{Deserialize, Serialize};

/// A finite union of closed intervals, kept sorted with gaps larger than
/// the merge tolerance. The empty set stands for the spectrum of the
/// `∞` operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSet {
    intervals: Vec<(f64, f64)>,
    tol: f64,
    /// Number of eigenvalues (or analytic pieces) the set was built from.
    pub source_count: usize,
}

impl SpectrumSet {
    pub fn empty(tol: f64) -> Self {
        SpectrumSet {
            intervals: Vec::new(),
            tol,
            source_count: 0,
        }
    }

    /// Normalizes arbitrary closed intervals: sorts them and joins those
    /// that overlap or are separated by at most `tol`.
    pub fn from_intervals(mut raw: Vec<(f64, f64)>, tol: f64) -> Self {
        assert!(tol >= 0.0, "merge tolerance must be non-negative");
        raw.retain(|(a, b)| a <= b && !a.is_nan() && !b.is_nan());
        raw.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match out.last_mut() {
                Some(last) if a - last.1 <= tol => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        let source_count = out.len();
        SpectrumSet {
            intervals: out,
            tol,
            source_count,
        }
    }

    /// Connected components of `⋃ [λ − tol, λ + tol]`.
    pub fn merge_intervals(eigs: &[f64], tol: f64) -> Self {
        assert!(tol > 0.0, "merge tolerance must be positive");
        let mut s = Self::from_intervals(eigs.iter().map(|&l| (l - tol, l + tol)).collect(), tol);
        s.source_count = eigs.len();
        s
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn inf(&self) -> Option<f64> {
        self.intervals.first().map(|i| i.0)
    }

    pub fn sup(&self) -> Option<f64> {
        self.intervals.last().map(|i| i.1)
    }

    /// Union, re-merged with the larger of the two tolerances.
    pub fn union(&self, other: &SpectrumSet) -> SpectrumSet {
        let tol = self.tol.max(other.tol);
        let mut s = Self::from_intervals(self.intervals.iter().chain(&other.intervals).copied().collect(), tol);
        s.source_count = self.source_count + other.source_count;
        s
    }

    pub fn union_all<'a, I: IntoIterator<Item = &'a SpectrumSet>>(sets: I, tol: f64) -> SpectrumSet {
        let mut raw = Vec::new();
        let mut count = 0;
        let mut tol = tol;
        for s in sets {
            raw.extend_from_slice(&s.intervals);
            count += s.source_count;
            tol = tol.max(s.tol);
        }
        let mut s = Self::from_intervals(raw, tol);
        s.source_count = count;
        s
    }

    /// Intersection with `[lo, hi]`.
    pub fn clip(&self, lo: f64, hi: f64) -> SpectrumSet {
        SpectrumSet {
            intervals: self
                .intervals
                .iter()
                .filter(|(a, b)| *b >= lo && *a <= hi)
                .map(|(a, b)| (a.max(lo), b.min(hi)))
                .collect(),
            tol: self.tol,
            source_count: self.source_count,
        }
    }

    pub fn shift(&self, c: f64) -> SpectrumSet {
        SpectrumSet {
            intervals: self.intervals.iter().map(|(a, b)| (a + c, b + c)).collect(),
            ..self.clone()
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|(a, b)| *a <= x && x <= *b)
    }

    /// Distance from `x` to the set (`∞` for the empty set).
    pub fn distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| if x < a { a - x } else if x > b { x - b } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    }

    /// `sup_{x ∈ self} dist(x, other)`. The distance to a union of
    /// intervals is piecewise linear, so it peaks at an endpoint of `self`
    /// or at the midpoint of a gap of `other`.
    pub fn excess_over(&self, other: &SpectrumSet) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        if other.is_empty() {
            return f64::INFINITY;
        }
        let mids: Vec<f64> = other.intervals.windows(2).map(|w| 0.5 * (w[0].1 + w[1].0)).collect();
        self.intervals
            .iter()
            .flat_map(|&(a, b)| {
                let inner = mids.iter().copied().filter(move |m| *m > a && *m < b);
                [a, b].into_iter().chain(inner)
            })
            .map(|x| other.distance(x))
            .fold(0.0, f64::max)
    }

    /// Hausdorff distance; zero for two empty sets, infinite when exactly
    /// one is empty.
    pub fn hausdorff(&self, other: &SpectrumSet) -> f64 {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => 0.0,
            (true, false) | (false, true) => f64::INFINITY,
            _ => self.excess_over(other).max(other.excess_over(self)),
        }
    }

    /// Every interval of `self` lies within `slack` of `other`.
    pub fn is_subset_of(&self, other: &SpectrumSet, slack: f64) -> bool {
        self.excess_over(other) <= slack
    }

    /// Widest gap between consecutive intervals, if any.
    pub fn widest_gap(&self) -> Option<f64> {
        self.intervals.windows(2).map(|w| w[1].0 - w[0].1).reduce(f64::max)
    }

    /// `a,b` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("a,b\n");
        for (a, b) in &self.intervals {
            s.push_str(&format!("{a},{b}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merging() {
        let s = SpectrumSet::merge_intervals(&[0.0, 0.5, 1.0], 0.3);
        assert_eq!(s.intervals(), &[(-0.3, 1.3)]);
        let t = SpectrumSet::merge_intervals(&[0.0, 10.0], 0.3);
        assert_eq!(t.intervals().len(), 2);
        assert_eq!(t.inf(), Some(-0.3));
    }

    #[test]
    fn hausdorff_values() {
        let a = SpectrumSet::from_intervals(vec![(0.0, 1.0)], 1e-3);
        let b = SpectrumSet::from_intervals(vec![(0.0, 1.0), (5.0, 6.0)], 1e-3);
        assert_eq!(a.hausdorff(&b), 5.0);
        assert_eq!(a.hausdorff(&a), 0.0);
        // a gap midpoint is the farthest point
        let c = SpectrumSet::from_intervals(vec![(0.0, 10.0)], 1e-3);
        let d = SpectrumSet::from_intervals(vec![(0.0, 2.0), (8.0, 10.0)], 1e-3);
        assert_eq!(c.hausdorff(&d), 3.0);
        let e = SpectrumSet::empty(1e-3);
        assert_eq!(e.hausdorff(&e), 0.0);
        assert!(e.hausdorff(&a).is_infinite());
    }

    #[test]
    fn union_laws() {
        let a = SpectrumSet::from_intervals(vec![(0.0, 1.0), (3.0, 4.0)], 0.1);
        let b = SpectrumSet::from_intervals(vec![(1.05, 2.0)], 0.1);
        let c = SpectrumSet::from_intervals(vec![(2.5, 2.95), (9.0, 9.5)], 0.1);
        assert_eq!(a.union(&b).intervals(), b.union(&a).intervals());
        assert_eq!(a.union(&b).union(&c).intervals(), a.union(&b.union(&c)).intervals());
        assert_eq!(a.union(&b).intervals(), &[(0.0, 2.0), (3.0, 4.0)]);
        let e = SpectrumSet::empty(0.1);
        assert_eq!(a.union(&e).intervals(), a.intervals());
    }

    #[test]
    fn clip_and_shift() {
        let a = SpectrumSet::from_intervals(vec![(0.0, 1.0), (3.0, 4.0)], 0.1);
        assert_eq!(a.clip(0.5, 3.5).intervals(), &[(0.5, 1.0), (3.0, 3.5)]);
        assert_eq!(a.shift(1.0).inf(), Some(1.0));
        assert_eq!(a.widest_gap(), Some(2.0));
        assert!(a.contains(3.5) && !a.contains(2.0));
    }
}
