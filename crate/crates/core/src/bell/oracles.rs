//! Exact (enumerative) and heuristic (alternating sign ascent) linear
//! maximization over the correlation polytopes.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DeterministicStrategy;
use crate::engine::{LinearOracle, OracleAnswer};
use crate::enumerate::{gray_max, gray_max_seq, sign_of};
use crate::rng::seeded;
use crate::{Error, Result};

/// Largest bipartite setting count the exact oracle accepts by default.
pub const DEFAULT_EXACT_CAP_2: usize = 30;
/// Largest tripartite setting count the exact oracle accepts by default.
pub const DEFAULT_EXACT_CAP_3: usize = 12;

/// Ascent sweeps per restart before giving up on reaching a fixed point.
const MAX_SWEEPS: usize = 1000;

fn side(len: usize, order: u32) -> Result<usize> {
    let n = (len as f64).powf(1.0 / f64::from(order)).round() as usize;
    if n.pow(order) == len {
        Ok(n)
    } else {
        Err(Error::InvalidConfig(format!(
            "functional of length {len} is not an order-{order} table"
        )))
    }
}

fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::BudgetExceeded { settings: n, cap })
    } else {
        Ok(())
    }
}

/// Row sums `t_x = sum_y m[x][y] s_y` for the sign vector with `s_0 = +1` and
/// `s_{j+1}` given by bit `j` of `mask`.
fn row_sums(m: &[f64], n: usize, mask: u64) -> Vec<f64> {
    (0..n)
        .map(|x| {
            let row = &m[x * n..(x + 1) * n];
            row[0] + (1..n).map(|y| sign_of(mask, y - 1) * row[y]).sum::<f64>()
        })
        .collect()
}

fn signs_from_mask(n: usize, mask: u64) -> Vec<i8> {
    (0..n)
        .map(|y| if y > 0 && mask >> (y - 1) & 1 == 1 { -1 } else { 1 })
        .collect()
}

/// `max_s sum_x |sum_y m[x][y] s_y|` with `s_0 = +1`; returns the value and mask.
fn abs_row_max(m: &[f64], n: usize, parallel: bool) -> (f64, u64) {
    if n == 0 {
        return (0.0, 0);
    }
    let init = |mask: u64| row_sums(m, n, mask);
    let flip = |t: &mut Vec<f64>, bit: usize, negative: bool| {
        let y = bit + 1;
        let f = if negative { -2.0 } else { 2.0 };
        for (x, tx) in t.iter_mut().enumerate() {
            *tx += f * m[x * n + y];
        }
    };
    let value = |t: &Vec<f64>| t.iter().map(|v| v.abs()).sum::<f64>();
    if parallel {
        gray_max(n - 1, init, flip, value)
    } else {
        gray_max_seq(n - 1, init, flip, value)
    }
}

/// Exact bipartite maximum `max_{a,b} sum W_xy a_x b_y` by enumerating Bob's
/// `2^(n-1)` strategies (`b_0 = +1`) and choosing `a_x` optimally.
pub fn bell2_exact_oracle(w: &[f64], cap: usize) -> Result<(f64, DeterministicStrategy)> {
    let n = side(w.len(), 2)?;
    check_cap(n, cap)?;
    let (_, mask) = abs_row_max(w, n, true);
    let b = signs_from_mask(n, mask);
    let t = row_sums(w, n, mask);
    let a: Vec<i8> = t.iter().map(|&v| sign(v)).collect();
    let strategy = DeterministicStrategy { a, b, c: None };
    Ok((strategy.value(w), strategy))
}

/// Alternating sign ascent from `restarts` random starts; restart `i` is
/// seeded with `seed + i`. The value is a lower bound on the exact maximum.
pub fn bell2_heuristic_oracle(w: &[f64], restarts: usize, seed: u64) -> Result<(f64, DeterministicStrategy)> {
    let n = side(w.len(), 2)?;
    let restarts = restarts.max(1);
    let results: Vec<(f64, DeterministicStrategy)> = (0..restarts as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded(seed.wrapping_add(i));
            let mut a: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            let mut b = vec![1i8; n];
            let mut best = f64::NEG_INFINITY;
            for _ in 0..MAX_SWEEPS {
                for (y, by) in b.iter_mut().enumerate() {
                    *by = sign((0..n).map(|x| w[x * n + y] * f64::from(a[x])).sum());
                }
                let mut value = 0.0;
                for (x, ax) in a.iter_mut().enumerate() {
                    let t: f64 = (0..n).map(|y| w[x * n + y] * f64::from(b[y])).sum();
                    *ax = sign(t);
                    value += t.abs();
                }
                if value <= best {
                    break;
                }
                best = value;
            }
            let s = DeterministicStrategy { a, b, c: None };
            (s.value(w), s)
        })
        .collect();
    Ok(pick_best(results))
}

/// First result among those with the largest value.
fn pick_best(results: Vec<(f64, DeterministicStrategy)>) -> (f64, DeterministicStrategy) {
    results
        .into_iter()
        .reduce(|best, r| if r.0 > best.0 { r } else { best })
        .expect("at least one restart")
}

/// `M_xz = sum_y W_xyz b_y` for Bob's signs from `mask` (`b_0 = +1`).
fn contract_b(w: &[f64], n: usize, mask: u64) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for x in 0..n {
        for y in 0..n {
            let s = if y == 0 { 1.0 } else { sign_of(mask, y - 1) };
            for z in 0..n {
                m[x * n + z] += s * w[(x * n + y) * n + z];
            }
        }
    }
    m
}

/// Exact tripartite maximum, enumerating `b` (outer, parallel) and `c`
/// (inner) with `a` chosen optimally: `max_{b,c} sum_x |sum_yz W b_y c_z|`.
pub fn bell3_exact_oracle(w: &[f64], cap: usize) -> Result<(f64, DeterministicStrategy)> {
    let n = side(w.len(), 3)?;
    check_cap(n, cap)?;
    if n == 0 {
        return Ok((
            0.0,
            DeterministicStrategy {
                a: vec![],
                b: vec![],
                c: Some(vec![]),
            },
        ));
    }
    let init = |mask: u64| contract_b(w, n, mask);
    let flip = |m: &mut Vec<f64>, bit: usize, negative: bool| {
        let y = bit + 1;
        let f = if negative { -2.0 } else { 2.0 };
        for x in 0..n {
            for z in 0..n {
                m[x * n + z] += f * w[(x * n + y) * n + z];
            }
        }
    };
    let value = |m: &Vec<f64>| abs_row_max(m, n, false).0;
    let (_, b_mask) = gray_max(n - 1, init, flip, value);
    let m = contract_b(w, n, b_mask);
    let (_, c_mask) = abs_row_max(&m, n, false);
    let t = row_sums(&m, n, c_mask);
    let strategy = DeterministicStrategy {
        a: t.iter().map(|&v| sign(v)).collect(),
        b: signs_from_mask(n, b_mask),
        c: Some(signs_from_mask(n, c_mask)),
    };
    Ok((strategy.value(w), strategy))
}

/// Cyclic sign ascent over `a`, then `b`, then `c`, from `restarts` random
/// starts seeded `seed + i`.
pub fn bell3_heuristic_oracle(w: &[f64], restarts: usize, seed: u64) -> Result<(f64, DeterministicStrategy)> {
    let n = side(w.len(), 3)?;
    let idx = |x: usize, y: usize, z: usize| (x * n + y) * n + z;
    let restarts = restarts.max(1);
    let results: Vec<(f64, DeterministicStrategy)> = (0..restarts as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded(seed.wrapping_add(i));
            let mut random_signs =
                || -> Vec<i8> { (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect() };
            let mut a = vec![1i8; n];
            let mut b = random_signs();
            let mut c = random_signs();
            let f = |s: i8| f64::from(s);
            let mut best = f64::NEG_INFINITY;
            for _ in 0..MAX_SWEEPS {
                for x in 0..n {
                    a[x] = sign(
                        (0..n)
                            .flat_map(|y| (0..n).map(move |z| (y, z)))
                            .map(|(y, z)| w[idx(x, y, z)] * f(b[y]) * f(c[z]))
                            .sum(),
                    );
                }
                for y in 0..n {
                    b[y] = sign(
                        (0..n)
                            .flat_map(|x| (0..n).map(move |z| (x, z)))
                            .map(|(x, z)| w[idx(x, y, z)] * f(a[x]) * f(c[z]))
                            .sum(),
                    );
                }
                let mut value = 0.0;
                for z in 0..n {
                    let t: f64 = (0..n)
                        .flat_map(|x| (0..n).map(move |y| (x, y)))
                        .map(|(x, y)| w[idx(x, y, z)] * f(a[x]) * f(b[y]))
                        .sum();
                    c[z] = sign(t);
                    value += t.abs();
                }
                if value <= best {
                    break;
                }
                best = value;
            }
            let s = DeterministicStrategy { a, b, c: Some(c) };
            (s.value(w), s)
        })
        .collect();
    Ok(pick_best(results))
}

/// Which oracle answers the engine's per-iteration queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMode {
    Exact,
    Heuristic,
}

/// Bipartite correlation polytope with `n` settings per party, as a
/// [`LinearOracle`] on `R^(n^2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bipartite {
    pub n: usize,
    pub mode: OracleMode,
    pub exact_cap: usize,
    pub restarts: usize,
}

impl Bipartite {
    /// Exact per-iteration answers up to 16 settings, heuristic beyond.
    pub fn new(n: usize) -> Self {
        Bipartite {
            n,
            mode: if n <= 16 {
                OracleMode::Exact
            } else {
                OracleMode::Heuristic
            },
            exact_cap: DEFAULT_EXACT_CAP_2,
            restarts: 64,
        }
    }

    pub fn with_mode(mut self, mode: OracleMode) -> Self {
        self.mode = mode;
        self
    }
}

impl LinearOracle for Bipartite {
    fn dimension(&self) -> usize {
        self.n * self.n
    }

    fn maximize(&self, direction: &[f64], seed: u64) -> Result<OracleAnswer> {
        match self.mode {
            OracleMode::Exact => self.maximize_exact(direction),
            OracleMode::Heuristic => {
                let (_, s) = bell2_heuristic_oracle(direction, self.restarts, seed)?;
                Ok(OracleAnswer::new(s.point(), direction, false))
            }
        }
    }

    fn maximize_exact(&self, direction: &[f64]) -> Result<OracleAnswer> {
        let (_, s) = bell2_exact_oracle(direction, self.exact_cap)?;
        Ok(OracleAnswer::new(s.point(), direction, true))
    }
}

/// Tripartite correlation polytope on `R^(n^3)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tripartite {
    pub n: usize,
    pub mode: OracleMode,
    pub exact_cap: usize,
    pub restarts: usize,
}

impl Tripartite {
    /// Exact per-iteration answers up to 6 settings, heuristic beyond.
    pub fn new(n: usize) -> Self {
        Tripartite {
            n,
            mode: if n <= 6 {
                OracleMode::Exact
            } else {
                OracleMode::Heuristic
            },
            exact_cap: DEFAULT_EXACT_CAP_3,
            restarts: 64,
        }
    }

    pub fn with_mode(mut self, mode: OracleMode) -> Self {
        self.mode = mode;
        self
    }
}

impl LinearOracle for Tripartite {
    fn dimension(&self) -> usize {
        self.n.pow(3)
    }

    fn maximize(&self, direction: &[f64], seed: u64) -> Result<OracleAnswer> {
        match self.mode {
            OracleMode::Exact => self.maximize_exact(direction),
            OracleMode::Heuristic => {
                let (_, s) = bell3_heuristic_oracle(direction, self.restarts, seed)?;
                Ok(OracleAnswer::new(s.point(), direction, false))
            }
        }
    }

    fn maximize_exact(&self, direction: &[f64]) -> Result<OracleAnswer> {
        let (_, s) = bell3_exact_oracle(direction, self.exact_cap)?;
        Ok(OracleAnswer::new(s.point(), direction, true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand_distr::{Distribution, StandardNormal};

    fn brute2(w: &[f64], n: usize) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for am in 0..1u64 << n {
            for bm in 0..1u64 << n {
                let v: f64 = (0..n)
                    .flat_map(|x| (0..n).map(move |y| (x, y)))
                    .map(|(x, y)| w[x * n + y] * sign_of(am, x) * sign_of(bm, y))
                    .sum();
                best = best.max(v);
            }
        }
        best
    }

    fn gaussian(len: usize, seed: u64) -> Vec<f64> {
        let mut rng = seeded(seed);
        (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn bell2_exact_examples() {
        assert_eq!(bell2_exact_oracle(&[1.0, 1.0, 1.0, -1.0], 30).unwrap().0, 2.0);
        let id3 = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        assert_eq!(bell2_exact_oracle(&id3, 30).unwrap().0, 3.0);
        assert_eq!(bell2_exact_oracle(&[0.0; 16], 30).unwrap().0, 0.0);
        assert!(matches!(
            bell2_exact_oracle(&[0.0; 16], 3),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(bell2_exact_oracle(&[0.0; 5], 3).is_err());
    }

    #[test]
    fn bell2_exact_matches_brute_force() {
        for seed in 0..20 {
            let n = 2 + (seed as usize % 5);
            let w = gaussian(n * n, seed);
            let (v, s) = bell2_exact_oracle(&w, 30).unwrap();
            assert_abs_diff_eq!(v, brute2(&w, n), epsilon = 1e-10);
            assert_abs_diff_eq!(s.value(&w), v, epsilon = 1e-12);
        }
    }

    #[test]
    fn bell2_exact_parallel_path() {
        // n = 18 crosses the chunking threshold; compare with a sequential scan.
        let n = 18;
        let w = gaussian(n * n, 99);
        let (v, _) = bell2_exact_oracle(&w, 30).unwrap();
        let (seq, _) = abs_row_max(&w, n, false);
        assert_abs_diff_eq!(v, seq, epsilon = 1e-9);
    }

    #[test]
    fn bell2_heuristic_examples() {
        let chsh = [1.0, 1.0, 1.0, -1.0];
        assert_eq!(bell2_heuristic_oracle(&chsh, 16, 0).unwrap().0, 2.0);
        assert_eq!(bell2_heuristic_oracle(&[0.0; 4], 4, 0).unwrap().0, 0.0);
    }

    #[test]
    fn bell3_examples() {
        let mermin: Vec<f64> = (0..8)
            .map(|i| {
                let (x, y, z) = (i / 4, i / 2 % 2, i % 2);
                ((x + y + z) as f64 * std::f64::consts::FRAC_PI_2).cos()
            })
            .collect();
        let (w, s) = bell3_exact_oracle(&mermin, 12).unwrap();
        assert_abs_diff_eq!(w, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.value(&mermin), 2.0, epsilon = 1e-12);
        let quantum: f64 = mermin.iter().map(|x| x * x).sum();
        assert_abs_diff_eq!(quantum, 4.0, epsilon = 1e-12);
        assert_eq!(bell3_exact_oracle(&[0.0; 8], 12).unwrap().0, 0.0);
        assert!(bell3_heuristic_oracle(&mermin, 8, 1).unwrap().0 <= w + 1e-12);
    }

    #[test]
    fn bell3_exact_matches_brute_force() {
        for seed in 0..5 {
            let w = gaussian(27, seed);
            let mut best = f64::NEG_INFINITY;
            for m in 0..1u64 << 9 {
                let v: f64 = (0..27)
                    .map(|i| w[i] * sign_of(m, i / 9) * sign_of(m, 3 + i / 3 % 3) * sign_of(m, 6 + i % 3))
                    .sum();
                best = best.max(v);
            }
            assert_abs_diff_eq!(bell3_exact_oracle(&w, 12).unwrap().0, best, epsilon = 1e-10);
        }
    }

    #[test]
    fn polytope_oracles() {
        let p = Bipartite::new(2);
        let a = p.maximize(&[1.0, 1.0, 1.0, -1.0], 0).unwrap();
        assert!(a.exact);
        assert_eq!(a.overlap, 2.0);
        let h = Bipartite::new(2).with_mode(OracleMode::Heuristic);
        assert!(!h.maximize(&[1.0, 1.0, 1.0, -1.0], 0).unwrap().exact);
    }
}
