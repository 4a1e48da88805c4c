//! Euclidean projection of a point onto the convex hull of finitely many
//! points: `min ||A x - r||` subject to `x >= 0`, `sum(x) = 1`.
//!
//! The solver is Wolfe's nearest-point active-set method. It keeps a "corral"
//! of affinely independent columns, repeatedly adds the column most violating
//! the optimality condition and restores feasibility with minor cycles that
//! move toward the affine minimizer of the corral. Termination is finite; on
//! the small problems the memory variant of the engine produces (a few
//! hundred columns at most) it is exact up to rounding.

use nalgebra::{DMatrix, DVector};

use crate::point::{distance, dot, Point};
use crate::{Error, Result};

/// Default tolerance on the KKT residual.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Columns closer than this are merged before solving.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// Weights at or below this are dropped from the corral.
const ZERO_WEIGHT: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct HullProblem {
    pub columns: Vec<Point>,
    pub target: Point,
}

impl HullProblem {
    pub fn new(columns: Vec<Point>, target: Point) -> Result<Self> {
        let problem = HullProblem { columns, target };
        problem.validate()?;
        Ok(problem)
    }

    fn validate(&self) -> Result<()> {
        if self.columns.is_empty() {
            return Err(Error::EmptyHull);
        }
        let n = self.target.dim();
        for c in &self.columns {
            if c.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.dim(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HullProjection {
    /// Convex weights, one per input column. Merged duplicates carry weight 0.
    pub weights: Vec<f64>,
    /// `A x`, recomputed from the weights.
    pub point: Point,
    pub distance: f64,
    pub kkt_residual: f64,
}

/// Projects `problem.target` onto the hull of `problem.columns`.
pub fn project(problem: &HullProblem, tol: f64) -> Result<HullProjection> {
    problem.validate()?;
    let cols: Vec<&[f64]> = problem.columns.iter().map(|c| &c[..]).collect();
    project_columns(&cols, &problem.target, tol, None)
}

/// Like [`project`], starting from the convex weights `warm` (one per column).
pub fn project_warm(problem: &HullProblem, tol: f64, warm: &[f64]) -> Result<HullProjection> {
    problem.validate()?;
    let cols: Vec<&[f64]> = problem.columns.iter().map(|c| &c[..]).collect();
    project_columns(&cols, &problem.target, tol, Some(warm))
}

/// Borrowing entry point used by the engine's memory step.
pub fn project_columns(columns: &[&[f64]], target: &[f64], tol: f64, warm: Option<&[f64]>) -> Result<HullProjection> {
    if columns.is_empty() {
        return Err(Error::EmptyHull);
    }
    if let Some(w) = warm {
        if w.len() != columns.len() {
            return Err(Error::DimensionMismatch {
                expected: columns.len(),
                found: w.len(),
            });
        }
    }

    let groups = dedupe(columns);
    let unique: Vec<usize> = groups.representatives.clone();
    let u = unique.len();

    let mut solver = Wolfe::new(unique.iter().map(|&j| columns[j]).collect(), target);

    let start = warm.map(|w| {
        let mut x = vec![0.0; u];
        for (j, &wj) in w.iter().enumerate() {
            x[groups.slot[j]] += wj.max(0.0);
        }
        x
    });
    let x = solver.solve(tol, start)?;

    let mut weights = vec![0.0; columns.len()];
    for (slot, &j) in unique.iter().enumerate() {
        weights[j] = x[slot];
    }
    let point = combine(columns, &weights, target.len());
    let dist = distance(&point, target);
    let kkt = residual_of(columns, target, &point);
    Ok(HullProjection {
        weights,
        point,
        distance: dist,
        kkt_residual: kkt,
    })
}

/// Largest violation of the variational inequality
/// `(r - p) . (a_j - p) <= 0` over the columns, clipped below at 0,
/// where `p = A weights`.
pub fn kkt_residual(problem: &HullProblem, weights: &[f64]) -> f64 {
    let cols: Vec<&[f64]> = problem.columns.iter().map(|c| &c[..]).collect();
    let p = combine(&cols, weights, problem.target.dim());
    residual_of(&cols, &problem.target, &p)
}

fn combine(columns: &[&[f64]], weights: &[f64], dim: usize) -> Point {
    let mut p = Point::zeros(dim);
    for (c, &w) in columns.iter().zip(weights) {
        if w != 0.0 {
            for (pi, ci) in p.iter_mut().zip(c.iter()) {
                *pi += w * ci;
            }
        }
    }
    p
}

fn residual_of(columns: &[&[f64]], target: &[f64], p: &[f64]) -> f64 {
    let g: Vec<f64> = target.iter().zip(p).map(|(r, p)| r - p).collect();
    let gp = dot(&g, p);
    columns.iter().map(|a| dot(&g, a) - gp).fold(0.0, f64::max)
}

struct Groups {
    /// Lowest original index of each group, in increasing order.
    representatives: Vec<usize>,
    /// For every original column, the slot of its group in `representatives`.
    slot: Vec<usize>,
}

/// Merges columns within [`DUPLICATE_TOLERANCE`] of each other. Candidates are
/// found by sorting along a fixed pseudo-random direction, so the cost is
/// `O(m log m + m n)` rather than quadratic in the column count.
fn dedupe(columns: &[&[f64]]) -> Groups {
    let m = columns.len();
    let n = columns[0].len();
    let probe: Vec<f64> = (0..n)
        .map(|i| ((i as f64 + 1.0) * 0.754_877_666_246_692_7).fract() - 0.5)
        .collect();
    let window = DUPLICATE_TOLERANCE * dot(&probe, &probe).sqrt() * (1.0 + 1e-9);
    let keys: Vec<f64> = columns.iter().map(|c| dot(c, &probe)).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));

    // Union-find with the lowest original index as root.
    fn find(parent: &mut [usize], mut j: usize) -> usize {
        while parent[j] != j {
            parent[j] = parent[parent[j]];
            j = parent[j];
        }
        j
    }
    let mut group: Vec<usize> = (0..m).collect();
    for (pos, &j) in order.iter().enumerate() {
        for &k in order[..pos].iter().rev() {
            if keys[j] - keys[k] > window {
                break;
            }
            if distance(columns[j], columns[k]) < DUPLICATE_TOLERANCE {
                let (a, b) = (find(&mut group, j), find(&mut group, k));
                let (lo, hi) = (a.min(b), a.max(b));
                group[hi] = lo;
            }
        }
    }
    for j in 0..m {
        group[j] = find(&mut group, j);
    }

    let representatives: Vec<usize> = (0..m).filter(|&j| group[j] == j).collect();
    let mut slot_of = vec![usize::MAX; m];
    for (s, &j) in representatives.iter().enumerate() {
        slot_of[j] = s;
    }
    let slot = (0..m).map(|j| slot_of[group[j]]).collect();
    Groups { representatives, slot }
}

struct Wolfe {
    /// Columns translated by the target: `P_j = a_j - r`.
    shifted: Vec<Vec<f64>>,
    gram: Vec<f64>,
    dim: usize,
}

impl Wolfe {
    fn new(columns: Vec<&[f64]>, target: &[f64]) -> Self {
        let u = columns.len();
        let shifted = columns
            .iter()
            .map(|c| c.iter().zip(target).map(|(a, r)| a - r).collect())
            .collect();
        Wolfe {
            shifted,
            gram: vec![f64::NAN; u * u],
            dim: target.len(),
        }
    }

    fn g(&mut self, i: usize, j: usize) -> f64 {
        let u = self.shifted.len();
        let cached = self.gram[i * u + j];
        if !cached.is_nan() {
            return cached;
        }
        let v = dot(&self.shifted[i], &self.shifted[j]);
        self.gram[i * u + j] = v;
        self.gram[j * u + i] = v;
        v
    }

    fn solve(&mut self, tol: f64, start: Option<Vec<f64>>) -> Result<Vec<f64>> {
        let u = self.shifted.len();
        let cap = 50 * u.max(1) + 10;

        let (mut x, mut corral) = match start {
            Some(x0) if x0.iter().sum::<f64>() > 0.0 => {
                let total: f64 = x0.iter().sum();
                let x: Vec<f64> = x0.iter().map(|v| v / total).collect();
                let corral: Vec<usize> = (0..u).filter(|&j| x[j] > ZERO_WEIGHT).collect();
                (x, corral)
            }
            _ => {
                let j0 = (0..u)
                    .map(|j| (j, self.g(j, j)))
                    .fold(
                        (0, f64::INFINITY),
                        |best, (j, v)| if v < best.1 { (j, v) } else { best },
                    )
                    .0;
                let mut x = vec![0.0; u];
                x[j0] = 1.0;
                (x, vec![j0])
            }
        };

        let mut cycles = 0usize;
        // A warm start may hand over a corral that is not yet affinely optimal.
        if corral.len() > 1 {
            self.minor_cycles(&mut x, &mut corral, &mut cycles, cap)?;
        }

        let mut p = vec![0.0; self.dim];
        let mut last_added = usize::MAX;
        loop {
            cycles += 1;
            p.iter_mut().for_each(|v| *v = 0.0);
            for &i in &corral {
                for (pk, sk) in p.iter_mut().zip(&self.shifted[i]) {
                    *pk += x[i] * sk;
                }
            }
            let pp = dot(&p, &p);
            let (jmin, val) = self.shifted.iter().enumerate().map(|(j, s)| (j, dot(&p, s))).fold(
                (usize::MAX, f64::INFINITY),
                |best, (j, v)| {
                    if v < best.1 {
                        (j, v)
                    } else {
                        best
                    }
                },
            );
            let residual = pp - val;
            if residual <= tol {
                return Ok(x);
            }
            if corral.contains(&jmin) || jmin == last_added && cycles > 1 && x[jmin] <= ZERO_WEIGHT {
                // No further progress is representable in floating point.
                if residual <= tol.max(1e-9) {
                    return Ok(x);
                }
                return Err(Error::NonConvergence {
                    iterations: cycles,
                    residual,
                });
            }
            if cycles > cap {
                return Err(Error::NonConvergence {
                    iterations: cycles,
                    residual,
                });
            }
            corral.push(jmin);
            x[jmin] = 0.0;
            last_added = jmin;
            self.minor_cycles(&mut x, &mut corral, &mut cycles, cap)?;
        }
    }

    fn minor_cycles(&mut self, x: &mut [f64], corral: &mut Vec<usize>, cycles: &mut usize, cap: usize) -> Result<()> {
        loop {
            *cycles += 1;
            if *cycles > cap {
                return Err(Error::NonConvergence {
                    iterations: *cycles,
                    residual: f64::NAN,
                });
            }
            let y = self.affine_minimizer(corral);
            if y.iter().all(|&v| v > ZERO_WEIGHT) {
                for (&i, &yi) in corral.iter().zip(&y) {
                    x[i] = yi;
                }
                return Ok(());
            }
            // Walk from x toward y until the first weight hits zero.
            // Some weight is <= ZERO_WEIGHT, so the minimum ratio is always set.
            let mut theta = f64::INFINITY;
            let mut blocking = 0usize;
            for (k, (&i, &yi)) in corral.iter().zip(&y).enumerate() {
                if yi <= ZERO_WEIGHT {
                    let den = x[i] - yi;
                    let t = if den > 0.0 { x[i] / den } else { 0.0 };
                    if t < theta {
                        theta = t;
                        blocking = k;
                    }
                }
            }
            let theta = theta.clamp(0.0, 1.0);
            for (&i, &yi) in corral.iter().zip(&y) {
                x[i] = (1.0 - theta) * x[i] + theta * yi;
            }
            x[corral[blocking]] = 0.0;
            corral.retain(|&i| {
                if x[i] > ZERO_WEIGHT {
                    true
                } else {
                    x[i] = 0.0;
                    false
                }
            });
            if corral.is_empty() {
                return Err(Error::NonConvergence {
                    iterations: *cycles,
                    residual: f64::NAN,
                });
            }
            let total: f64 = corral.iter().map(|&i| x[i]).sum();
            for &i in corral.iter() {
                x[i] /= total;
            }
        }
    }

    /// Minimizer of `|sum_i y_i P_i|` over the affine hull of the corral,
    /// obtained by eliminating the first weight: `y_0 = 1 - sum_{i>0} y_i`.
    fn affine_minimizer(&mut self, corral: &[usize]) -> Vec<f64> {
        let q = corral.len();
        if q == 1 {
            return vec![1.0];
        }
        let b = corral[0];
        let gbb = self.g(b, b);
        let mut mat = DMatrix::<f64>::zeros(q - 1, q - 1);
        let mut rhs = DVector::<f64>::zeros(q - 1);
        for i in 1..q {
            let ci = corral[i];
            let gib = self.g(ci, b);
            rhs[i - 1] = gbb - gib;
            for j in i..q {
                let cj = corral[j];
                let v = self.g(ci, cj) - gib - self.g(b, cj) + gbb;
                mat[(i - 1, j - 1)] = v;
                mat[(j - 1, i - 1)] = v;
            }
        }
        let sol = match mat.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => mat
                .svd(true, true)
                .solve(&rhs, 1e-14)
                .unwrap_or_else(|_| DVector::zeros(q - 1)),
        };
        let mut y = Vec::with_capacity(q);
        y.push(1.0 - sol.sum());
        y.extend(sol.iter().copied());
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn problem(cols: &[&[f64]], r: &[f64]) -> HullProblem {
        HullProblem::new(cols.iter().map(|c| Point::from(*c)).collect(), Point::from(r)).unwrap()
    }

    #[test]
    fn midpoint_of_segment() {
        let p = project(&problem(&[&[0.0, 0.0], &[1.0, 0.0]], &[0.5, 1.0]), DEFAULT_TOLERANCE).unwrap();
        assert_abs_diff_eq!(p.point[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.point[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.weights[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.weights[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.distance, 1.0, epsilon = 1e-12);
        assert!(p.kkt_residual <= 1e-10);
    }

    #[test]
    fn target_on_an_edge_of_a_wider_hull() {
        // The affine minimizer of the corral {a0, a4, a1} puts ~1e-17 weight on a4;
        // the ratio test must drop a4, not a0.
        let cols: [&[f64]; 6] = [
            &[-0.4172981706308262, 0.08310931911419603],
            &[-0.42465034227779835, -0.3566819995502452],
            &[0.7746647230471573, 0.9809994373760219],
            &[0.5814292141791506, 0.05869600734079086],
            &[0.24767346859634867, -0.4621972476195038],
            &[0.6209826685869442, -0.3393367303020036],
        ];
        let r = [-0.41780624635788305, 0.05271730642556808];
        let p = project(&problem(&cols, &r), DEFAULT_TOLERANCE).unwrap();
        assert!(p.distance <= 1e-9);
        assert!(p.kkt_residual <= 1e-9);
    }

    #[test]
    fn symmetric_segment() {
        let p = project(&problem(&[&[1.0, 0.0], &[-1.0, 0.0]], &[0.0, 1.0]), DEFAULT_TOLERANCE).unwrap();
        assert_abs_diff_eq!(p.point[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.distance, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rectangle_vertices() {
        let cols: [&[f64]; 4] = [&[-1.0, 0.0], &[1.0, 0.0], &[1.0, -1.0], &[-1.0, -1.0]];
        let p = project(&problem(&cols, &[0.0, 1.0]), DEFAULT_TOLERANCE).unwrap();
        assert_abs_diff_eq!(p.point[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.point[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.distance, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn interior_target_has_zero_distance() {
        let cols: [&[f64]; 3] = [&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0]];
        let p = project(&problem(&cols, &[0.5, 0.5]), DEFAULT_TOLERANCE).unwrap();
        assert!(p.distance < 1e-12);
        assert_abs_diff_eq!(p.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kkt_residual_examples() {
        let pr = problem(&[&[0.0, 0.0], &[1.0, 0.0]], &[0.5, 1.0]);
        assert_abs_diff_eq!(kkt_residual(&pr, &[0.5, 0.5]), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(kkt_residual(&pr, &[1.0, 0.0]), 0.5, epsilon = 1e-12);
        let single = problem(&[&[3.0, -1.0]], &[0.0, 0.0]);
        assert_eq!(kkt_residual(&single, &[1.0]), 0.0);
    }

    #[test]
    fn duplicates_get_zero_weight() {
        let cols: [&[f64]; 4] = [&[1.0, 0.0], &[-1.0, 0.0], &[1.0, 0.0], &[-1.0, 1e-14]];
        let p = project(&problem(&cols, &[0.0, 1.0]), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(p.weights[2], 0.0);
        assert_eq!(p.weights[3], 0.0);
        assert_abs_diff_eq!(p.weights[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.distance, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn warm_start_reaches_same_point() {
        let cols: [&[f64]; 4] = [&[-1.0, 0.0], &[1.0, 0.0], &[1.0, -1.0], &[-1.0, -1.0]];
        let pr = problem(&cols, &[0.3, 2.0]);
        let cold = project(&pr, DEFAULT_TOLERANCE).unwrap();
        let warm = project_warm(&pr, DEFAULT_TOLERANCE, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_abs_diff_eq!(cold.distance, warm.distance, epsilon = 1e-12);
        assert_abs_diff_eq!(warm.point[0], 0.3, epsilon = 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            HullProblem::new(vec![], Point::zeros(2)),
            Err(Error::EmptyHull)
        ));
        assert!(matches!(
            HullProblem::new(vec![Point::zeros(3)], Point::zeros(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
