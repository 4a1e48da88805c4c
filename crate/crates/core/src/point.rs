//! Dense real vectors and the handful of BLAS-1 helpers the solvers need.

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

/// A point of `R^n`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }

    pub fn distance(&self, other: &[f64]) -> f64 {
        distance(&self.0, other)
    }

    /// `self - other` as a new point.
    pub fn sub(&self, other: &[f64]) -> Point {
        sub(&self.0, other)
    }

    /// Returns `self` scaled to unit norm, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Point> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self.0.iter().map(|x| x / n).collect())
        } else {
            None
        }
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Point(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point(v.to_vec())
    }
}

impl FromIterator<f64> for Point {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Point(iter.into_iter().collect())
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Point {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a = Point::from([3.0, 4.0]);
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.dot(&[1.0, 1.0]), 7.0);
        assert_eq!(a.sub(&[1.0, 1.0]), Point::from([2.0, 3.0]));
        assert_eq!(a.distance(&[0.0, 0.0]), 5.0);
        assert_eq!(a.normalized().unwrap(), Point::from([0.6, 0.8]));
        assert!(Point::zeros(3).normalized().is_none());
    }

    #[test]
    fn serializes_as_plain_array() {
        let a = Point::from([1.0, -2.5]);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[1.0,-2.5]");
        let back: Point = serde_json::from_str("[1.0,-2.5]").unwrap();
        assert_eq!(back, a);
    }
}
