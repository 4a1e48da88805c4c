//! EPR steering of the two-qubit Werner state with Pauli measurements on the
//! trusted side.
//!
//! With untrusted measurement directions `a_x`, the quantum assemblage is the
//! `n x 3` table `Q_x(v) = -v a_x`. The unsteerable set is the convex hull of
//! the tables `Q_x = a_x m` for signs `a in {+1,-1}^n` and unit Bloch vectors
//! `m` (pure states). Maximizing `W . Q` over it gives
//! `max_a lambda_max(sum_x a_x W_x . sigma) = max_a |sum_x a_x W_x|`, since a
//! traceless `2 x 2` Hermitian matrix `m . sigma` has eigenvalues `+-|m|`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{LinearOracle, OracleAnswer};
use crate::enumerate::gray_max;
use crate::point::Point;
use crate::rng::seeded;
use crate::{Error, Result};

/// Largest direction count the exact oracle accepts by default.
pub const DEFAULT_EXACT_CAP: usize = 24;
/// See-saw restarts per oracle call by default.
pub const DEFAULT_RESTARTS: usize = 100;
const SEESAW_TOLERANCE: f64 = 1e-12;
const SEESAW_MAX_ITERATIONS: usize = 1000;

fn dot3(u: &[f64], v: &[f64]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// The 30 truncated-icosahedron directions modulo inversion: the 60 vertices
/// (cyclic permutations of `(0, +-1, +-3phi)`, `(+-1, +-(2+phi), +-2phi)`,
/// `(+-phi, +-2, +-(2phi+1))`), normalized, keeping the representative whose
/// first nonzero coordinate is positive, in lexicographic order.
pub fn buckyball_directions() -> Vec<[f64; 3]> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let families = [
        [0.0, 1.0, 3.0 * phi],
        [1.0, 2.0 + phi, 2.0 * phi],
        [phi, 2.0, 2.0 * phi + 1.0],
    ];
    let mut out: Vec<[f64; 3]> = Vec::with_capacity(30);
    for f in families {
        for signs in 0..8u32 {
            let s = |i: usize| if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
            let v = [s(0) * f[0], s(1) * f[1], s(2) * f[2]];
            // skip sign patterns that flip a zero coordinate (duplicates)
            if (0..3).any(|i| v[i] == 0.0 && signs >> i & 1 == 1) {
                continue;
            }
            for shift in 0..3 {
                let p = [v[shift % 3], v[(shift + 1) % 3], v[(shift + 2) % 3]];
                let first = p.iter().copied().find(|&x| x != 0.0).unwrap_or(0.0);
                if first > 0.0 {
                    let norm = dot3(&p, &p).sqrt();
                    out.push([p[0] / norm, p[1] / norm, p[2] / norm]);
                }
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    out
}

/// Steering assemblage `Q_x = -v a_x`, flattened row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringPoint {
    pub n: usize,
    pub values: Point,
    pub v: f64,
}

pub fn steering_point(directions: &[[f64; 3]], v: f64) -> Result<SteeringPoint> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidConfig(format!("visibility must lie in [0, 1], got {v}")));
    }
    for (index, d) in directions.iter().enumerate() {
        let norm = dot3(d, d).sqrt();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(Error::NonUnitVector { index, norm });
        }
    }
    Ok(SteeringPoint {
        n: directions.len(),
        values: directions.iter().flat_map(|d| d.iter().map(move |x| -v * x)).collect(),
        v,
    })
}

/// Extreme point of the unsteerable set: signs `a` and a pure qubit state
/// `psi = (re0, im0, re1, im1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnsteerableVertex {
    pub a: Vec<i8>,
    pub psi: [f64; 4],
}

impl UnsteerableVertex {
    /// Bloch vector `<psi|sigma|psi>`.
    pub fn bloch(&self) -> [f64; 3] {
        let [r0, i0, r1, i1] = self.psi;
        // conj(psi0) psi1
        let re = r0 * r1 + i0 * i1;
        let im = r0 * i1 - i0 * r1;
        [2.0 * re, 2.0 * im, r0 * r0 + i0 * i0 - r1 * r1 - i1 * i1]
    }
}

/// Pure state whose Bloch vector is `m / |m|`; `|0>` when `m = 0`.
pub fn state_from_bloch(m: [f64; 3]) -> [f64; 4] {
    let norm = dot3(&m, &m).sqrt();
    if norm == 0.0 {
        return [1.0, 0.0, 0.0, 0.0];
    }
    let [x, y, z] = [m[0] / norm, m[1] / norm, m[2] / norm];
    // Two charts (differing by a global phase) avoid cancellation in 1 + z.
    if z >= 0.0 {
        let s = (2.0 * (1.0 + z)).sqrt();
        [((1.0 + z) / 2.0).sqrt(), 0.0, x / s, y / s]
    } else {
        let s = (2.0 * (1.0 - z)).sqrt();
        [x / s, -y / s, ((1.0 - z) / 2.0).sqrt(), 0.0]
    }
}

/// Row `x` of the vertex table is `a_x <psi|sigma|psi>`.
pub fn unsteerable_vertex_point(vertex: &UnsteerableVertex) -> Point {
    let m = vertex.bloch();
    vertex
        .a
        .iter()
        .flat_map(|&ax| m.iter().map(move |mk| f64::from(ax) * mk))
        .collect()
}

fn rows(w: &[f64]) -> Result<usize> {
    if w.len().is_multiple_of(3) {
        Ok(w.len() / 3)
    } else {
        Err(Error::InvalidConfig(format!(
            "steering functional length {} is not a multiple of 3",
            w.len()
        )))
    }
}

fn combine(w: &[f64], a: &[i8]) -> [f64; 3] {
    let mut m = [0.0; 3];
    for (x, &ax) in a.iter().enumerate() {
        for k in 0..3 {
            m[k] += f64::from(ax) * w[3 * x + k];
        }
    }
    m
}

fn vertex_for(w: &[f64], a: Vec<i8>) -> (f64, UnsteerableVertex) {
    let m = combine(w, &a);
    let vertex = UnsteerableVertex {
        psi: state_from_bloch(m),
        a,
    };
    (dot3(&m, &m).sqrt(), vertex)
}

/// Exact `max_a |sum_x a_x W_x|` over the `2^(n-1)` sign classes (`a_0 = +1`),
/// with the maximizing pure state.
pub fn steering_exact_oracle(w: &[f64], cap: usize) -> Result<(f64, UnsteerableVertex)> {
    let n = rows(w)?;
    if n > cap {
        return Err(Error::BudgetExceeded { settings: n, cap });
    }
    if n == 0 {
        return Ok((
            0.0,
            UnsteerableVertex {
                a: vec![],
                psi: state_from_bloch([0.0; 3]),
            },
        ));
    }
    let signs = |mask: u64| -> Vec<i8> {
        (0..n)
            .map(|x| if x > 0 && mask >> (x - 1) & 1 == 1 { -1 } else { 1 })
            .collect()
    };
    let init = |mask: u64| combine(w, &signs(mask));
    let flip = |m: &mut [f64; 3], bit: usize, negative: bool| {
        let x = bit + 1;
        let f = if negative { -2.0 } else { 2.0 };
        for k in 0..3 {
            m[k] += f * w[3 * x + k];
        }
    };
    let (_, mask) = gray_max(n - 1, init, flip, |m| dot3(m, m));
    Ok(vertex_for(w, signs(mask)))
}

/// See-saw lower bound: from random signs, alternate `m = sum a_x W_x` and
/// `a_x = sign(W_x . m)` until `lambda_max = |m|` stops increasing. Restart
/// `i` is seeded with `seed + i`.
pub fn steering_seesaw_oracle(w: &[f64], restarts: usize, seed: u64) -> Result<(f64, UnsteerableVertex)> {
    let n = rows(w)?;
    let results: Vec<(f64, Vec<i8>)> = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded(seed.wrapping_add(i));
            let mut a: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            let mut m = combine(w, &a);
            let mut lambda = dot3(&m, &m).sqrt();
            for _ in 0..SEESAW_MAX_ITERATIONS {
                for (x, ax) in a.iter_mut().enumerate() {
                    *ax = if dot3(&w[3 * x..3 * x + 3], &m) >= 0.0 { 1 } else { -1 };
                }
                m = combine(w, &a);
                let next = dot3(&m, &m).sqrt();
                let done = (next - lambda).abs() < SEESAW_TOLERANCE;
                lambda = next;
                if done {
                    break;
                }
            }
            (lambda, a)
        })
        .collect();
    let (_, a) = results
        .into_iter()
        .reduce(|best, r| if r.0 > best.0 { r } else { best })
        .expect("at least one restart");
    Ok(vertex_for(w, a))
}

/// `w / quantum_value`, the visibility below which the inequality is silent.
pub fn steering_bound(w: f64, quantum_value: f64) -> Result<f64> {
    crate::bell::visibility_bound(w, quantum_value)
}

/// `tr(Q(v=1) W^T) = -sum_x a_x . W_x`.
pub fn steering_quantum_value(directions: &[[f64; 3]], w: &[f64]) -> f64 {
    directions
        .iter()
        .enumerate()
        .map(|(x, d)| -dot3(d, &w[3 * x..3 * x + 3]))
        .sum()
}

/// The unsteerable set as a [`LinearOracle`] on `R^(3n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnsteerableSet {
    pub n: usize,
    /// Per-iteration answers come from the exact oracle instead of the see-saw.
    pub exact: bool,
    pub exact_cap: usize,
    pub restarts: usize,
}

impl UnsteerableSet {
    /// See-saw answers with the default restarts; exact certification up to
    /// the default cap.
    pub fn new(n: usize) -> Self {
        UnsteerableSet {
            n,
            exact: false,
            exact_cap: DEFAULT_EXACT_CAP,
            restarts: DEFAULT_RESTARTS,
        }
    }
}

impl LinearOracle for UnsteerableSet {
    fn dimension(&self) -> usize {
        3 * self.n
    }

    fn maximize(&self, direction: &[f64], seed: u64) -> Result<OracleAnswer> {
        if self.exact {
            return self.maximize_exact(direction);
        }
        let (_, vertex) = steering_seesaw_oracle(direction, self.restarts, seed)?;
        Ok(OracleAnswer::new(unsteerable_vertex_point(&vertex), direction, false))
    }

    fn maximize_exact(&self, direction: &[f64]) -> Result<OracleAnswer> {
        let (_, vertex) = steering_exact_oracle(direction, self.exact_cap)?;
        Ok(OracleAnswer::new(unsteerable_vertex_point(&vertex), direction, true))
    }
}

/// Exported steering inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringWitness {
    pub n: usize,
    #[serde(rename = "W")]
    pub w: Vec<[f64; 3]>,
    pub unsteerable_bound: f64,
    pub quantum_value: f64,
    pub v_bound: f64,
    /// True when `unsteerable_bound` comes from see-saw restarts rather than
    /// exact enumeration (then `v_bound` is not a rigorous bound).
    #[serde(default)]
    pub heuristic: bool,
}

impl SteeringWitness {
    pub fn new(w: &[f64], unsteerable_bound: f64, quantum_value: f64, heuristic: bool) -> Result<Self> {
        let n = rows(w)?;
        Ok(SteeringWitness {
            n,
            w: w.chunks(3).map(|c| [c[0], c[1], c[2]]).collect(),
            unsteerable_bound,
            quantum_value,
            v_bound: steering_bound(unsteerable_bound, quantum_value)?,
            heuristic,
        })
    }

    pub fn flat(&self) -> Vec<f64> {
        self.w.iter().flatten().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::Matrix2;
    use num_complex::Complex64;

    #[test]
    fn buckyball_shape() {
        let d = buckyball_directions();
        assert_eq!(d.len(), 30);
        for (i, u) in d.iter().enumerate() {
            assert_abs_diff_eq!(dot3(u, u), 1.0, epsilon = 1e-12);
            for v in &d[i + 1..] {
                assert!(dot3(u, v) > -1.0 + 1e-9, "antipodal pair");
            }
        }
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let norm = (1.0 + 9.0 * phi * phi).sqrt();
        let target = [0.0, 1.0 / norm, 3.0 * phi / norm];
        assert!(d.iter().any(|u| (0..3).all(|k| (u[k] - target[k]).abs() < 1e-12)));
        assert_abs_diff_eq!(target[1], 0.201774, epsilon = 1e-6);
        assert_eq!(d, buckyball_directions());
    }

    #[test]
    fn steering_point_examples() {
        let q = steering_point(&[[0.0, 0.0, 1.0]], 1.0).unwrap();
        assert_eq!(&q.values[..], &[-0.0, -0.0, -1.0]);
        assert!(steering_point(&[[0.0, 0.0, 1.0]], 0.0)
            .unwrap()
            .values
            .iter()
            .all(|&x| x == 0.0));
        let q = steering_point(&buckyball_directions(), 0.51).unwrap();
        for row in q.values.chunks(3) {
            assert_abs_diff_eq!(dot3(row, row).sqrt(), 0.51, epsilon = 1e-12);
        }
    }

    #[test]
    fn vertex_examples() {
        let zero = UnsteerableVertex {
            a: vec![1],
            psi: [1.0, 0.0, 0.0, 0.0],
        };
        assert_eq!(&unsteerable_vertex_point(&zero)[..], &[0.0, 0.0, 1.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = UnsteerableVertex {
            a: vec![-1],
            psi: [h, 0.0, h, 0.0],
        };
        let p = unsteerable_vertex_point(&plus);
        assert_abs_diff_eq!(p[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn exact_oracle_examples() {
        let (w, v) = steering_exact_oracle(&[1.0, 0.0, 0.0], 24).unwrap();
        assert_eq!(w, 1.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(v.psi[0], h, epsilon = 1e-15);
        assert_abs_diff_eq!(v.psi[2], h, epsilon = 1e-15);
        let (w, _) = steering_exact_oracle(&[1.0, 0.0, 0.0, 0.0, 0.0, 1.0], 24).unwrap();
        assert_abs_diff_eq!(w, 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(steering_exact_oracle(&[0.0; 9], 24).unwrap().0, 0.0);
        assert!(matches!(
            steering_exact_oracle(&[0.0; 9], 2),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn bound_examples() {
        let w = 4_166_724_363f64.sqrt();
        let s5 = 5f64.sqrt();
        let qv = (632_541.0 + 282_885.0 * s5) / (58.0 + 18.0 * s5).sqrt();
        assert_abs_diff_eq!(steering_bound(w, qv).unwrap(), 0.5058, epsilon = 1e-4);
        assert!(matches!(steering_bound(1.0, 1.0), Err(Error::NoSeparation { .. })));
        assert_eq!(steering_bound(0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn lambda_max_closed_form_matches_eigensolver() {
        let mut rng = seeded(17);
        for _ in 0..10_000 {
            let m = crate::rng::unit_vector3(&mut rng).map(|x| x * rng.random_range(0.0..5.0));
            let h = Matrix2::new(
                Complex64::new(m[2], 0.0),
                Complex64::new(m[0], -m[1]),
                Complex64::new(m[0], m[1]),
                Complex64::new(-m[2], 0.0),
            );
            let eig = h.symmetric_eigenvalues();
            let top = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert_abs_diff_eq!(top, dot3(&m, &m).sqrt(), epsilon = 1e-12);
            // the analytic eigenvector has Bloch vector m / |m|
            let v = UnsteerableVertex {
                a: vec![1],
                psi: state_from_bloch(m),
            };
            let b = v.bloch();
            let norm = dot3(&m, &m).sqrt();
            for k in 0..3 {
                assert_abs_diff_eq!(b[k], m[k] / norm, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn seesaw_is_a_lower_bound_and_sign_symmetric() {
        for seed in 0..20u64 {
            let mut rng = seeded(seed);
            let n = 3 + seed as usize % 8;
            let w: Vec<f64> = (0..3 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let (exact, vx) = steering_exact_oracle(&w, 24).unwrap();
            let (heur, vh) = steering_seesaw_oracle(&w, 8, seed).unwrap();
            assert!(heur <= exact + 1e-12);
            let neg: Vec<f64> = w.iter().map(|x| -x).collect();
            assert_abs_diff_eq!(steering_exact_oracle(&neg, 24).unwrap().0, exact, epsilon = 1e-12);
            for (val, v) in [(exact, vx), (heur, vh)] {
                assert_abs_diff_eq!(
                    crate::point::dot(&w, &unsteerable_vertex_point(&v)),
                    val,
                    epsilon = 1e-10
                );
            }
        }
    }
}
