//! Two-qubit see-saw and the visibility-descent loop for Werner states.

use serde::{Deserialize, Serialize};

use super::{dot3, werner_point, BellWitness, Bipartite, BlochVectors};
use crate::engine::{run, Outcome, RunConfig};
use crate::rng::derive_seed;
use crate::{Error, Result};

const SEESAW_TOLERANCE: f64 = 1e-10;
const SEESAW_MAX_ITERATIONS: usize = 10_000;

/// `sum_xy W_xy (-a_x . b_y)`.
fn quantum_value(w: &[f64], v: &BlochVectors) -> f64 {
    let n = v.n();
    (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| -w[x * n + y] * dot3(&v.a[x], &v.b[y]))
        .sum()
}

/// Replaces each target vector by the normalized `-sum W a`, keeping the old
/// one where that sum vanishes.
fn best_response(targets: &mut [[f64; 3]], coefficient: impl Fn(usize, usize) -> f64, others: &[[f64; 3]]) {
    for (t, target) in targets.iter_mut().enumerate() {
        let mut m = [0.0; 3];
        for (o, other) in others.iter().enumerate() {
            let f = -coefficient(t, o);
            for k in 0..3 {
                m[k] += f * other[k];
            }
        }
        let norm = dot3(&m, &m).sqrt();
        if norm > 0.0 {
            *target = [m[0] / norm, m[1] / norm, m[2] / norm];
        }
    }
}

/// Maximizes the singlet value of `W` over measurement directions by
/// alternating exact best responses of Bob and Alice, starting from `start`.
/// The value never decreases between half-steps.
pub fn quantum_seesaw_2party(w: &[f64], start: &BlochVectors) -> Result<(BlochVectors, f64)> {
    let n = start.n();
    if w.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: w.len(),
        });
    }
    let mut v = start.clone();
    let mut value = quantum_value(w, &v);
    for _ in 0..SEESAW_MAX_ITERATIONS {
        best_response(&mut v.b, |y, x| w[x * n + y], &v.a);
        best_response(&mut v.a, |x, y| w[x * n + y], &v.b);
        let next = quantum_value(w, &v);
        let done = next - value < SEESAW_TOLERANCE;
        value = value.max(next);
        if done {
            break;
        }
    }
    Ok((v, value))
}

/// Settings of the visibility-descent loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WernerConfig {
    pub n: usize,
    pub v_start: f64,
    /// Visibility decrement per round.
    pub dv: f64,
    /// Lowest visibility tried.
    pub v_floor: f64,
    /// Engine settings for each separation call: plain variant, run to the
    /// budget so the functional comes from the most converged iterate.
    pub engine: RunConfig,
    /// Fresh random starting directions tried when the first point is not separated.
    pub max_redraws: usize,
    /// Random see-saw restarts in addition to the current directions.
    pub seesaw_restarts: usize,
    pub seed: u64,
}

impl Default for WernerConfig {
    fn default() -> Self {
        WernerConfig {
            n: 2,
            v_start: 1.0,
            dv: 1e-3,
            v_floor: 0.70,
            engine: RunConfig {
                run_to_budget: true,
                ..RunConfig::default()
            },
            max_redraws: 16,
            seesaw_restarts: 4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerResult {
    /// Directions attaining the best bound.
    pub vectors: BlochVectors,
    pub witness: BellWitness,
    /// Best certified upper bound on the critical visibility.
    pub bound: f64,
    /// Last visibility at which the engine separated the Werner point.
    pub last_separated_v: f64,
    pub rounds: usize,
}

/// The descent loop: separate `Q(v)` with the engine, re-optimize the
/// directions for the returned inequality, record `w / Q(1).W`, lower `v`.
pub fn optimize_measurements(config: &WernerConfig) -> Result<WernerResult> {
    let n = config.n;
    if n < 2 {
        return Err(Error::InvalidConfig("werner loop needs n >= 2".into()));
    }
    if !(config.dv > 0.0) || !(config.v_floor <= config.v_start) {
        return Err(Error::InvalidConfig("need dv > 0 and v_floor <= v_start".into()));
    }
    let oracle = Bipartite::new(n);
    let mut stream = 0u64;
    let mut next_seed = || {
        stream += 1;
        derive_seed(config.seed, stream)
    };

    let mut vectors = BlochVectors::random(n, next_seed());
    let mut redraws = 0;
    let mut v = config.v_start;
    let mut rounds = 0;
    let mut best: Option<WernerResult> = None;

    while v >= config.v_floor - 1e-12 {
        rounds += 1;
        let q = werner_point(&vectors, v.clamp(0.0, 1.0))?;
        let engine = RunConfig {
            rng_seed: next_seed(),
            ..config.engine.clone()
        };
        let record = run(&q.values, &oracle, &engine)?;
        let Outcome::Separated(witness) = record.outcome else {
            if best.is_none() && redraws < config.max_redraws {
                redraws += 1;
                vectors = BlochVectors::random(n, next_seed());
                continue;
            }
            break;
        };

        let mut candidates = vec![quantum_seesaw_2party(&witness.c, &vectors)?];
        for _ in 0..config.seesaw_restarts {
            candidates.push(quantum_seesaw_2party(
                &witness.c,
                &BlochVectors::random(n, next_seed()),
            )?);
        }
        let (improved, qv) = candidates
            .into_iter()
            .reduce(|a, b| if b.1 > a.1 { b } else { a })
            .expect("non-empty");
        if qv > witness.local_bound {
            let bell = BellWitness::new(vec![n, n], &witness.c, witness.local_bound, qv)?;
            if best.as_ref().is_none_or(|b| bell.visibility_bound < b.bound) {
                best = Some(WernerResult {
                    vectors: improved.clone(),
                    bound: bell.visibility_bound,
                    witness: bell,
                    last_separated_v: v,
                    rounds,
                });
            }
            vectors = improved;
        }
        if let Some(b) = best.as_mut() {
            b.last_separated_v = v;
            b.rounds = rounds;
        }
        v -= config.dv;
    }
    best.ok_or(Error::Stalled { floor: config.v_floor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn seesaw_examples() {
        let chsh = [1.0, 1.0, 1.0, -1.0];
        let (_, v) = quantum_seesaw_2party(&chsh, &BlochVectors::random(2, 3)).unwrap();
        assert_abs_diff_eq!(v, 2.0 * 2f64.sqrt(), epsilon = 1e-9);
        let (_, v) = quantum_seesaw_2party(&[0.0; 4], &BlochVectors::random(2, 3)).unwrap();
        assert_eq!(v, 0.0);
        let (_, v) = quantum_seesaw_2party(&[1.0], &BlochVectors::random(1, 3)).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn seesaw_is_monotone_per_half_step() {
        let n = 4;
        let mut rng = crate::rng::seeded(5);
        let w: Vec<f64> = (0..n * n)
            .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
            .collect();
        let mut v = BlochVectors::random(n, 9);
        let mut last = quantum_value(&w, &v);
        for _ in 0..50 {
            best_response(&mut v.b, |y, x| w[x * n + y], &v.a);
            let half = quantum_value(&w, &v);
            assert!(half >= last - 1e-12);
            best_response(&mut v.a, |x, y| w[x * n + y], &v.b);
            last = quantum_value(&w, &v);
            assert!(last >= half - 1e-12);
        }
    }
}
