//! Interval boxes: Cartesian products of intervals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::counters::OpCounters;
use crate::error::IntervalError;
use crate::interval::Interval;
use crate::round;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalBox {
    components: Vec<Interval>,
}

impl IntervalBox {
    pub fn new(components: Vec<Interval>) -> IntervalBox {
        IntervalBox { components }
    }

    pub fn from_bounds(bounds: &[(f64, f64)]) -> IntervalBox {
        IntervalBox::new(
            bounds
                .iter()
                .map(|&(lo, hi)| Interval::new(lo, hi))
                .collect(),
        )
    }

    /// `[lo, hi]^n`.
    pub fn cube(lo: f64, hi: f64, n: usize) -> IntervalBox {
        IntervalBox::new(vec![Interval::new(lo, hi); n])
    }

    pub fn point(x: &[f64]) -> IntervalBox {
        IntervalBox::new(x.iter().map(|&v| Interval::point(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [Interval] {
        &mut self.components
    }

    pub fn into_components(self) -> Vec<Interval> {
        self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.iter().any(Interval::is_empty)
    }

    /// Product of component widths (rounded upward).
    pub fn volume(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.components
            .iter()
            .map(|c| c.diam().unwrap_or(0.0))
            .fold(1.0, round::mul_up)
    }

    /// Maximum component width, charging `n` subtractions and `n - 1`
    /// comparisons.
    pub fn diam(&self, c: &mut OpCounters) -> Result<f64, IntervalError> {
        if self.components.is_empty() || self.is_empty() {
            return Err(IntervalError::EmptyBox);
        }
        let n = self.components.len() as u64;
        c.box_diams += 1;
        c.subs += n;
        c.comparisons += n - 1;
        let mut best = f64::NEG_INFINITY;
        for comp in &self.components {
            let d = comp.diam()?;
            if d > best {
                best = d;
            }
        }
        Ok(best)
    }

    /// Index of the widest component; ties go to the lowest index.
    pub fn widest_axis(&self) -> usize {
        let mut axis = 0;
        let mut best = f64::NEG_INFINITY;
        for (i, comp) in self.components.iter().enumerate() {
            let d = comp.diam().unwrap_or(f64::NEG_INFINITY);
            if d > best {
                best = d;
                axis = i;
            }
        }
        axis
    }

    pub fn midpoint(&self) -> Result<Vec<f64>, IntervalError> {
        self.components.iter().map(Interval::mid).collect()
    }

    /// Splits the box at the midpoint of component `axis`.
    pub fn bisect(&self, axis: usize) -> Result<(IntervalBox, IntervalBox), IntervalError> {
        if self.is_empty() {
            return Err(IntervalError::EmptyBox);
        }
        let comp = self
            .components
            .get(axis)
            .ok_or(IntervalError::AxisOutOfRange {
                axis,
                dim: self.dim(),
            })?;
        if comp.is_point() {
            return Err(IntervalError::DegenerateAxis { axis });
        }
        let (l, r) = comp.split()?;
        if l == *comp || r == *comp {
            // Adjacent floats: the midpoint coincides with an endpoint.
            return Err(IntervalError::DegenerateAxis { axis });
        }
        let mut left = self.clone();
        let mut right = self.clone();
        left.components[axis] = l;
        right.components[axis] = r;
        Ok((left, right))
    }

    pub fn intersect(&self, other: &IntervalBox) -> IntervalBox {
        IntervalBox::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.intersect(b))
                .collect(),
        )
    }

    pub fn hull(&self, other: &IntervalBox) -> IntervalBox {
        IntervalBox::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.hull(b))
                .collect(),
        )
    }

    pub fn subset_of(&self, other: &IntervalBox) -> bool {
        self.dim() == other.dim()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a.subset_of(b))
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && self
                .components
                .iter()
                .zip(x)
                .all(|(c, &v)| c.contains_point(v))
    }

    /// Order by lower corners, then upper corners.
    pub fn lex_cmp(&self, other: &IntervalBox) -> Ordering {
        for (a, b) in self.components.iter().zip(&other.components) {
            match a.lo().total_cmp(&b.lo()) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        for (a, b) in self.components.iter().zip(&other.components) {
            match a.hi().total_cmp(&b.hi()) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.dim().cmp(&other.dim())
    }
}

impl Index<usize> for IntervalBox {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.components[i]
    }
}

impl fmt::Debug for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Cut points of `[lo, hi]` into `m` equal parts. The first and last cut
/// points are the endpoints themselves, and neighbouring parts share a cut.
fn cuts(c: &Interval, m: usize) -> Vec<f64> {
    let (lo, hi) = (c.lo(), c.hi());
    let mut out = Vec::with_capacity(m + 1);
    out.push(lo);
    for j in 1..m {
        let t = j as f64 / m as f64;
        let x = lo + (hi - lo) * t;
        out.push(x.clamp(lo, hi));
    }
    out.push(hi);
    // Rounding can only produce non-decreasing cuts after clamping, but keep
    // the sequence monotone explicitly.
    for j in 1..out.len() {
        if out[j] < out[j - 1] {
            out[j] = out[j - 1];
        }
    }
    out
}

/// Lazy iterator over the uniform `m^n` grid of a box, last axis fastest.
#[derive(Clone, Debug)]
pub struct GridIter {
    cuts: Vec<Vec<f64>>,
    index: Vec<usize>,
    m: usize,
    done: bool,
}

impl GridIter {
    pub fn new(x: &IntervalBox, m: usize) -> Result<GridIter, IntervalError> {
        if m == 0 {
            return Err(IntervalError::ZeroSubdivisions);
        }
        if x.is_empty() || x.dim() == 0 {
            return Err(IntervalError::EmptyBox);
        }
        Ok(GridIter {
            cuts: x.components().iter().map(|c| cuts(c, m)).collect(),
            index: vec![0; x.dim()],
            m,
            done: false,
        })
    }

    /// `m^n`, saturating at `u64::MAX`.
    pub fn total(&self) -> u64 {
        (self.m as u64).saturating_pow(self.cuts.len() as u32)
    }
}

impl Iterator for GridIter {
    type Item = IntervalBox;

    fn next(&mut self) -> Option<IntervalBox> {
        if self.done {
            return None;
        }
        let item = IntervalBox::new(
            self.index
                .iter()
                .zip(&self.cuts)
                .map(|(&j, c)| Interval::new(c[j], c[j + 1]))
                .collect(),
        );
        let mut axis = self.index.len();
        loop {
            if axis == 0 {
                self.done = true;
                break;
            }
            axis -= 1;
            self.index[axis] += 1;
            if self.index[axis] < self.m {
                break;
            }
            self.index[axis] = 0;
        }
        Some(item)
    }
}

/// Uniform subdivision of `x` into `m` parts per dimension (`m^n` boxes).
pub fn subdivide_uniform(x: &IntervalBox, m: usize) -> Result<Vec<IntervalBox>, IntervalError> {
    Ok(GridIter::new(x, m)?.collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_diam_examples() {
        let mut c = OpCounters::new();
        let b = IntervalBox::from_bounds(&[(0.0, 1.0), (0.0, 3.0)]);
        assert_eq!(b.diam(&mut c).unwrap(), 3.0);
        assert_eq!((c.subs, c.comparisons), (2, 1));
        let eps = 1e-6;
        assert_eq!(IntervalBox::cube(0.0, eps, 4).diam(&mut c).unwrap(), eps);
        assert_eq!(IntervalBox::point(&[1.0, 2.0]).diam(&mut c).unwrap(), 0.0);
        let empty = IntervalBox::new(vec![Interval::EMPTY, Interval::new(0.0, 1.0)]);
        assert_eq!(empty.diam(&mut c), Err(IntervalError::EmptyBox));
    }

    #[test]
    fn bisect_examples() {
        let b = IntervalBox::cube(0.0, 2.0, 2);
        let (l, r) = b.bisect(0).unwrap();
        assert_eq!(l, IntervalBox::from_bounds(&[(0.0, 1.0), (0.0, 2.0)]));
        assert_eq!(r, IntervalBox::from_bounds(&[(1.0, 2.0), (0.0, 2.0)]));
        assert_eq!(l.volume() + r.volume(), b.volume());
        let (l, r) = IntervalBox::from_bounds(&[(0.0, 10.0)]).bisect(0).unwrap();
        assert_eq!(
            (l[0], r[0]),
            (Interval::new(0.0, 5.0), Interval::new(5.0, 10.0))
        );
        let p = IntervalBox::from_bounds(&[(1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(p.bisect(0), Err(IntervalError::DegenerateAxis { axis: 0 }));
    }

    #[test]
    fn subdivision_counts() {
        let x = IntervalBox::cube(0.0, 10.0, 2);
        assert_eq!(subdivide_uniform(&x, 100).unwrap().len(), 10_000);
        let x = IntervalBox::cube(0.0, 10.0, 5);
        assert_eq!(GridIter::new(&x, 5).unwrap().count(), 3125);
        let x = IntervalBox::from_bounds(&[(0.0, 1.0), (2.0, 3.0)]);
        assert_eq!(subdivide_uniform(&x, 1).unwrap(), vec![x.clone()]);
    }

    #[test]
    fn widest_axis_ties_to_lowest_index() {
        let b = IntervalBox::from_bounds(&[(0.0, 2.0), (0.0, 2.0), (0.0, 1.0)]);
        assert_eq!(b.widest_axis(), 0);
        let b = IntervalBox::from_bounds(&[(0.0, 1.0), (0.0, 2.0), (0.0, 2.0)]);
        assert_eq!(b.widest_axis(), 1);
    }
}
