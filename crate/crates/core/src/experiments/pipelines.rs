//! End-to-end GHZ and steering pipelines.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{ghz_point, BellWitness, GhzAngles, Tripartite};
use crate::engine::{certify_witness, run, RunConfig, RunRecord};
use crate::point::{dot, sub};
use crate::steering::{
    buckyball_directions, steering_exact_oracle, steering_point, steering_quantum_value, steering_seesaw_oracle,
    SteeringWitness, UnsteerableSet,
};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GhzConfig {
    pub n: usize,
    /// Noise parameter of the separated GHZ point.
    pub p: f64,
    /// Planar measurement angles; `pi (i - 1) / n` when absent.
    pub angles: Option<GhzAngles>,
    pub engine: RunConfig,
}

impl Default for GhzConfig {
    fn default() -> Self {
        GhzConfig {
            n: 2,
            p: 0.6,
            angles: None,
            engine: RunConfig {
                memory_capacity: 10,
                max_iterations: 10_000,
                run_to_budget: true,
                ..RunConfig::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzResult {
    pub witness: BellWitness,
    /// `w / (Q(p=1) . W)`, an upper bound on the critical `p` for these angles.
    pub bound: f64,
}

/// Separates `Q(p)` from the tripartite local polytope and converts the
/// functional at the final iterate into a bound on the critical `p`.
pub fn ghz_pipeline(config: &GhzConfig) -> Result<(GhzResult, RunRecord)> {
    let n = config.n;
    let q = ghz_point(n, config.angles.as_ref(), config.p)?;
    let q1 = ghz_point(n, config.angles.as_ref(), 1.0)?;
    let oracle = Tripartite::new(n);
    let record = run(&q.values, &oracle, &config.engine)?;
    // Prefer the functional at the (most converged) final iterate.
    let witness = match certify_witness(&q.values, &record.final_point, &oracle) {
        Ok(Some(w)) => w,
        Ok(None) | Err(Error::BudgetExceeded { .. }) => {
            record.outcome.witness().cloned().ok_or(Error::NoSeparation {
                local_bound: f64::NAN,
                quantum_value: f64::NAN,
            })?
        }
        Err(e) => return Err(e),
    };
    let quantum = dot(&witness.c, &q1.values);
    let bell = BellWitness::new(vec![n, n, n], &witness.c, witness.local_bound, quantum)?;
    Ok((
        GhzResult {
            bound: bell.visibility_bound,
            witness: bell,
        },
        record,
    ))
}

/// How the final steering inequality's unsteerable bound is computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// Skip certification.
    None,
    /// Exact enumeration over `2^(n-1)` sign classes, allowed up to `cap` directions.
    Exact { cap: usize },
    /// Best of `restarts` see-saw runs; the resulting bound is heuristic.
    SeeSaw { restarts: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteerConfig {
    pub v: f64,
    /// One continuing run per buffer size.
    pub memories: Vec<usize>,
    /// Iterations at which `d_k` is reported; the largest sets the budget.
    pub checkpoints: Vec<usize>,
    /// See-saw restarts per oracle call.
    pub restarts: usize,
    /// Unit directions; the 30 buckyball directions when absent.
    pub directions: Option<Vec<[f64; 3]>>,
    pub certification: Certification,
    pub seed: u64,
}

impl Default for SteerConfig {
    fn default() -> Self {
        SteerConfig {
            v: 0.51,
            memories: vec![1, 10, 100],
            checkpoints: vec![100, 1_000, 10_000, 100_000],
            restarts: crate::steering::DEFAULT_RESTARTS,
            directions: None,
            certification: Certification::Exact { cap: 30 },
            seed: 0,
        }
    }
}

/// `d_k` at the checkpoints of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringRow {
    pub memory: usize,
    pub distances: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringResult {
    pub rows: Vec<SteeringRow>,
    /// Inequality from the final iterate of the largest-buffer run.
    pub witness: Option<SteeringWitness>,
}

/// Runs the steering point `Q(v)` against the unsteerable set (see-saw oracle,
/// no plateau certification) for every buffer size, snapshots the distance
/// at each checkpoint, and certifies the final functional.
pub fn steering_table(config: &SteerConfig) -> Result<(SteeringResult, Vec<RunRecord>)> {
    let directions = config.directions.clone().unwrap_or_else(buckyball_directions);
    let n = directions.len();
    let q = steering_point(&directions, config.v)?;
    let budget = config.checkpoints.iter().copied().max().unwrap_or(0);
    let oracle = UnsteerableSet {
        restarts: config.restarts,
        ..UnsteerableSet::new(n)
    };
    let records: Vec<(usize, RunRecord)> = config
        .memories
        .par_iter()
        .map(|&m| {
            let engine = RunConfig {
                max_iterations: budget,
                memory_capacity: m,
                run_to_budget: true,
                certify_on_plateau: false,
                delta: 1e-12,
                rng_seed: config.seed,
                ..RunConfig::default()
            };
            Ok((m, run(&q.values, &oracle, &engine)?))
        })
        .collect::<Result<_>>()?;

    let rows = records
        .iter()
        .map(|(m, rec)| SteeringRow {
            memory: *m,
            distances: config
                .checkpoints
                .iter()
                .filter_map(|&k| rec.distance_at(k).map(|d| (k, d)))
                .collect(),
        })
        .collect();

    let witness = match (&config.certification, records.iter().max_by_key(|(m, _)| *m)) {
        (Certification::None, _) | (_, None) => None,
        (cert, Some((_, rec))) => {
            let c = sub(&q.values, &rec.final_point)
                .normalized()
                .ok_or(Error::ZeroDirection)?;
            let (w, heuristic) = match cert {
                Certification::Exact { cap } => (steering_exact_oracle(&c, *cap)?.0, false),
                Certification::SeeSaw { restarts } => (steering_seesaw_oracle(&c, *restarts, config.seed)?.0, true),
                Certification::None => unreachable!(),
            };
            let quantum = steering_quantum_value(&directions, &c);
            Some(SteeringWitness::new(&c, w, quantum, heuristic)?)
        }
    };
    Ok((
        SteeringResult { rows, witness },
        records.into_iter().map(|(_, r)| r).collect(),
    ))
}
