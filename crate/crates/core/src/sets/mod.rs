//! Convex test sets with exact linear-optimization oracles and known geometry.

mod descriptor;

pub use descriptor::{random_hull, DynOracle, SetDescriptor, SetKind};

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{LinearOracle, OracleAnswer};
use crate::point::{distance, dot, norm, Point};
use crate::rng::seeded;
use crate::simplex::{project_columns, DEFAULT_TOLERANCE};
use crate::{Error, Result};

/// Geometric constants of a set (relative to a target point where relevant).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SetMetadata {
    /// Diameter `D`.
    pub diameter: f64,
    /// Exact `dist(S, r)`.
    pub known_dstar: Option<f64>,
    /// Distance from an interior `r` to the boundary.
    pub boundary_gap: Option<f64>,
    /// Curvature `R`: every boundary point `s` with outer unit normal `h`
    /// satisfies `h.(x-s) + R |(I - h h^T)(x-s)|^2 <= 0` for all `x` in `S`.
    pub curvature: Option<f64>,
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Axis-aligned box `[lower, upper]`. Vertex `i` takes `upper[j]` where bit `j`
/// of `i` is set and `lower[j]` otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSet {
    pub lower: Point,
    pub upper: Point,
}

impl BoxSet {
    pub fn new(lower: Point, upper: Point) -> Result<Self> {
        check_dim(lower.dim(), upper.dim())?;
        if lower.dim() == 0 {
            return Err(Error::InvalidConfig("box must have positive dimension".into()));
        }
        if lower.iter().chain(upper.iter()).any(|x| !x.is_finite())
            || lower.iter().zip(upper.iter()).any(|(l, u)| l > u)
        {
            return Err(Error::InvalidConfig(
                "box bounds must be finite with lower <= upper".into(),
            ));
        }
        Ok(BoxSet { lower, upper })
    }

    /// The rectangle with vertices `(+-1, 0)`, `(+-1, -1)` used for the
    /// convergence experiments.
    pub fn rectangle() -> Self {
        BoxSet {
            lower: Point::from([-1.0, -1.0]),
            upper: Point::from([1.0, 0.0]),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn vertex(&self, index: usize) -> Point {
        (0..self.dim())
            .map(|j| {
                if index >> j & 1 == 1 {
                    self.upper[j]
                } else {
                    self.lower[j]
                }
            })
            .collect()
    }

    /// All `2^n` vertices, in index order.
    pub fn vertices(&self) -> Vec<Point> {
        assert!(self.dim() < 24, "vertex enumeration only for small boxes");
        (0..1usize << self.dim()).map(|i| self.vertex(i)).collect()
    }

    /// Nearest point of the box to `r` (coordinate-wise clamp).
    pub fn nearest(&self, r: &[f64]) -> Point {
        r.iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .map(|(x, (l, u))| x.clamp(*l, *u))
            .collect()
    }

    pub fn metadata(&self, r: &[f64]) -> SetMetadata {
        let dstar = distance(r, &self.nearest(r));
        let gap = (dstar == 0.0).then(|| {
            r.iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .map(|(x, (l, u))| (x - l).min(u - x))
                .fold(f64::INFINITY, f64::min)
        });
        SetMetadata {
            diameter: distance(&self.lower, &self.upper),
            known_dstar: Some(dstar),
            boundary_gap: gap.filter(|g| *g > 0.0),
            curvature: Some(0.0),
        }
    }
}

/// Vertex maximizing `c . s`; ties go to the lowest vertex index.
pub fn box_oracle(c: &[f64], set: &BoxSet) -> Result<OracleAnswer> {
    check_dim(set.dim(), c.len())?;
    let point: Point = c
        .iter()
        .enumerate()
        .map(|(j, &cj)| if cj > 0.0 { set.upper[j] } else { set.lower[j] })
        .collect();
    Ok(OracleAnswer::new(point, c, true))
}

impl LinearOracle for BoxSet {
    fn dimension(&self) -> usize {
        self.dim()
    }
    fn maximize(&self, direction: &[f64], _seed: u64) -> Result<OracleAnswer> {
        box_oracle(direction, self)
    }
    fn maximize_exact(&self, direction: &[f64]) -> Result<OracleAnswer> {
        box_oracle(direction, self)
    }
}

/// Euclidean ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSet {
    pub center: Point,
    pub radius: f64,
}

impl BallSet {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidConfig("ball radius must be positive".into()));
        }
        Ok(BallSet { center, radius })
    }

    pub fn unit_disc() -> Self {
        BallSet {
            center: Point::zeros(2),
            radius: 1.0,
        }
    }

    /// Curvature constant of a ball of radius `rho`: `1 / (2 rho)`.
    pub fn curvature(&self) -> f64 {
        1.0 / (2.0 * self.radius)
    }

    pub fn metadata(&self, r: &[f64]) -> SetMetadata {
        let dc = distance(r, &self.center);
        SetMetadata {
            diameter: 2.0 * self.radius,
            known_dstar: Some((dc - self.radius).max(0.0)),
            boundary_gap: (dc < self.radius).then_some(self.radius - dc),
            curvature: Some(self.curvature()),
        }
    }
}

/// `center + radius c / |c|`.
pub fn ball_oracle(c: &[f64], set: &BallSet) -> Result<OracleAnswer> {
    check_dim(set.center.dim(), c.len())?;
    let n = norm(c);
    if n == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let point: Point = set
        .center
        .iter()
        .zip(c)
        .map(|(x, ci)| x + set.radius * ci / n)
        .collect();
    Ok(OracleAnswer::new(point, c, true))
}

impl LinearOracle for BallSet {
    fn dimension(&self) -> usize {
        self.center.dim()
    }
    fn maximize(&self, direction: &[f64], _seed: u64) -> Result<OracleAnswer> {
        self.maximize_exact(direction)
    }
    fn maximize_exact(&self, direction: &[f64]) -> Result<OracleAnswer> {
        match ball_oracle(direction, self) {
            // Every point maximizes the zero functional.
            Err(Error::ZeroDirection) => Ok(OracleAnswer::new(self.center.clone(), direction, true)),
            other => other,
        }
    }
}

/// Convex hull of an explicit list of generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullSet {
    pub generators: Vec<Point>,
}

/// Generator lists longer than this are scanned in parallel.
const PARALLEL_SCAN: usize = 1 << 14;

impl HullSet {
    pub fn new(generators: Vec<Point>) -> Result<Self> {
        let first = generators.first().ok_or(Error::EmptyHull)?;
        let n = first.dim();
        for g in &generators {
            check_dim(n, g.dim())?;
        }
        Ok(HullSet { generators })
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn diameter(&self) -> f64 {
        let g = &self.generators;
        let mut best = 0.0f64;
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                best = best.max(distance(&g[i], &g[j]));
            }
        }
        best
    }

    pub fn metadata(&self, r: &[f64]) -> Result<SetMetadata> {
        Ok(SetMetadata {
            diameter: self.diameter(),
            known_dstar: Some(exact_hull_distance(self, r)?),
            boundary_gap: None,
            curvature: Some(0.0),
        })
    }
}

/// Generator maximizing `c . s`, lowest index on ties.
pub fn hull_oracle(c: &[f64], set: &HullSet) -> Result<OracleAnswer> {
    check_dim(set.dim(), c.len())?;
    let better = |a: (usize, f64), b: (usize, f64)| {
        if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    let init = (usize::MAX, f64::NEG_INFINITY);
    let (idx, _) = if set.generators.len() > PARALLEL_SCAN {
        set.generators
            .par_iter()
            .enumerate()
            .map(|(i, g)| (i, dot(c, g)))
            .reduce(|| init, better)
    } else {
        set.generators
            .iter()
            .enumerate()
            .map(|(i, g)| (i, dot(c, g)))
            .fold(init, better)
    };
    Ok(OracleAnswer::new(set.generators[idx].clone(), c, true))
}

impl LinearOracle for HullSet {
    fn dimension(&self) -> usize {
        self.dim()
    }
    fn maximize(&self, direction: &[f64], _seed: u64) -> Result<OracleAnswer> {
        hull_oracle(direction, self)
    }
    fn maximize_exact(&self, direction: &[f64]) -> Result<OracleAnswer> {
        hull_oracle(direction, self)
    }
}

/// `dist(conv(generators), r)` by projecting onto the full generator list.
pub fn exact_hull_distance(set: &HullSet, r: &[f64]) -> Result<f64> {
    check_dim(set.dim(), r.len())?;
    let cols: Vec<&[f64]> = set.generators.iter().map(|g| &g[..]).collect();
    Ok(project_columns(&cols, r, DEFAULT_TOLERANCE, None)?.distance)
}

/// Hull of the `2^k` sign-pattern points `offset + sum_i sigma_i g_i`,
/// `sigma in {-1, +1}^k` (a zonotope). Linear maximization decomposes per
/// generator, `sigma_i = sign(c . g_i)`, so no enumeration is needed.
///
/// Point index `i` has `sigma_j = +1` where bit `j` of `i` is set; ties
/// (`c . g_j = 0`) take `-1`, i.e. the lowest index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZonotopeSet {
    pub offset: Point,
    pub generators: Vec<Point>,
}

impl ZonotopeSet {
    pub fn new(offset: Point, generators: Vec<Point>) -> Result<Self> {
        for g in &generators {
            check_dim(offset.dim(), g.dim())?;
        }
        Ok(ZonotopeSet { offset, generators })
    }

    /// Seeded instance: `count` Gaussian generators in `R^dim`, each scaled by
    /// `1/sqrt(dim)`, centered at the origin. Construction version 1.
    pub fn seeded(dim: usize, count: usize, seed: u64) -> Self {
        let mut rng = seeded(seed);
        let scale = 1.0 / (dim as f64).sqrt();
        let generators = (0..count)
            .map(|_| {
                (0..dim)
                    .map(|_| scale * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
                    .collect()
            })
            .collect();
        ZonotopeSet {
            offset: Point::zeros(dim),
            generators,
        }
    }

    pub fn dim(&self) -> usize {
        self.offset.dim()
    }

    pub fn point_count_log2(&self) -> usize {
        self.generators.len()
    }

    pub fn point(&self, signs: &[f64]) -> Point {
        let mut p = self.offset.clone();
        for (g, &s) in self.generators.iter().zip(signs) {
            for (pi, gi) in p.iter_mut().zip(g.iter()) {
                *pi += s * gi;
            }
        }
        p
    }

    pub fn point_by_index(&self, index: u64) -> Point {
        let signs: Vec<f64> = (0..self.generators.len())
            .map(|j| if index >> j & 1 == 1 { 1.0 } else { -1.0 })
            .collect();
        self.point(&signs)
    }

    /// Upper bound on the diameter: `2 sum_i |g_i|`.
    pub fn diameter_bound(&self) -> f64 {
        2.0 * self.generators.iter().map(|g| g.norm()).sum::<f64>()
    }
}

/// Maximizer of `c . s` over the sign-pattern points, one sign per generator.
pub fn zonotope_oracle(c: &[f64], set: &ZonotopeSet) -> Result<OracleAnswer> {
    check_dim(set.dim(), c.len())?;
    let signs: Vec<f64> = set
        .generators
        .iter()
        .map(|g| if dot(c, g) > 0.0 { 1.0 } else { -1.0 })
        .collect();
    Ok(OracleAnswer::new(set.point(&signs), c, true))
}

impl LinearOracle for ZonotopeSet {
    fn dimension(&self) -> usize {
        self.dim()
    }
    fn maximize(&self, direction: &[f64], _seed: u64) -> Result<OracleAnswer> {
        zonotope_oracle(direction, self)
    }
    fn maximize_exact(&self, direction: &[f64]) -> Result<OracleAnswer> {
        zonotope_oracle(direction, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rectangle_oracle() {
        let rect = BoxSet::rectangle();
        let a = box_oracle(&[-0.5, 2.0], &rect).unwrap();
        assert_eq!(a.point, Point::from([-1.0, 0.0]));
        assert_abs_diff_eq!(a.overlap, 0.5, epsilon = 1e-15);
        // zero functional: lowest vertex index
        assert_eq!(box_oracle(&[0.0, 0.0], &rect).unwrap().point, rect.vertex(0));
        let square = BoxSet::new(Point::from([0.0, 0.0]), Point::from([1.0, 1.0])).unwrap();
        assert_eq!(box_oracle(&[1.0, 1.0], &square).unwrap().point, Point::from([1.0, 1.0]));
    }

    #[test]
    fn ball_oracle_closed_form() {
        let disc = BallSet::unit_disc();
        assert_eq!(ball_oracle(&[0.0, 1.0], &disc).unwrap().point, Point::from([0.0, 1.0]));
        let p = ball_oracle(&[3.0, 4.0], &disc).unwrap().point;
        assert_abs_diff_eq!(p[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.8, epsilon = 1e-15);
        assert!(matches!(ball_oracle(&[0.0, 0.0], &disc), Err(Error::ZeroDirection)));
        assert_eq!(disc.maximize(&[0.0, 0.0], 0).unwrap().point, disc.center);
    }

    #[test]
    fn ball_metadata() {
        let md = BallSet::unit_disc().metadata(&[0.0, 1.3]);
        assert_eq!(md.diameter, 2.0);
        assert_abs_diff_eq!(md.known_dstar.unwrap(), 0.3, epsilon = 1e-15);
        assert_eq!(md.curvature, Some(0.5));
        assert!(md.boundary_gap.is_none());
    }

    #[test]
    fn hull_oracle_examples() {
        let h = HullSet::new(vec![Point::from([1.0, 0.0]), Point::from([0.0, 1.0])]).unwrap();
        assert_eq!(hull_oracle(&[2.0, 1.0], &h).unwrap().point, Point::from([1.0, 0.0]));
        assert_eq!(hull_oracle(&[1.0, 1.0], &h).unwrap().point, Point::from([1.0, 0.0]));
    }

    #[test]
    fn exact_distances() {
        let rect = HullSet::new(BoxSet::rectangle().vertices()).unwrap();
        assert_abs_diff_eq!(exact_hull_distance(&rect, &[0.0, 1.0]).unwrap(), 1.0, epsilon = 1e-12);
        assert!(exact_hull_distance(&rect, &[0.2, -0.3]).unwrap() <= 1e-10);
        let seg = HullSet::new(vec![Point::from([-1.0, 0.0]), Point::from([1.0, 0.0])]).unwrap();
        assert_abs_diff_eq!(exact_hull_distance(&seg, &[0.0, 2.0]).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn box_metadata_interior_gap() {
        let md = BoxSet::rectangle().metadata(&[-0.5, -0.1]);
        assert_eq!(md.known_dstar, Some(0.0));
        assert_abs_diff_eq!(md.boundary_gap.unwrap(), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(md.diameter, 5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn zonotope_matches_enumeration_on_small_slice() {
        let z = ZonotopeSet::seeded(6, 8, 42);
        let mut rng = seeded(1);
        for _ in 0..50 {
            let c: Vec<f64> = (0..6)
                .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
                .collect();
            let fast = zonotope_oracle(&c, &z).unwrap();
            let best = (0..256u64)
                .map(|i| dot(&c, &z.point_by_index(i)))
                .fold(f64::NEG_INFINITY, f64::max);
            assert_abs_diff_eq!(fast.overlap, best, epsilon = 1e-12);
        }
    }
}
