//! Convergence benchmarks on sets with known geometry.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{end_above_floor, fit_exponential, fit_loglog_slope, FitWindow, SlopeFit};
use crate::engine::{run, RunConfig, RunRecord};
use crate::point::{dot, Point};
use crate::rng::{derive_seed, seeded};
use crate::sets::{BallSet, BoxSet, SetMetadata, ZonotopeSet};
use crate::{Error, Result};

/// Exponential fits stop where `d_k - d*` reaches this floor (rounding noise below).
pub const EXPONENTIAL_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// Rectangle, `r = (0, 1)` outside: `d_k - d* ~ 1/k`.
    RectangleExterior,
    /// Rectangle, `r = (0, 0)` on the boundary: `d_k ~ 1/sqrt(k)`.
    RectangleBoundary,
    /// Rectangle, `r = (-0.5, -0.1)` inside: exponential decay.
    RectangleInterior,
    /// Unit disc, `r = (0, 1.3)`: exponential decay to `d* = 0.3`.
    Circle,
    /// Seeded 39-generator sign-pattern hull in dimension 400, memory sweep.
    HullMemory,
}

impl Shape {
    pub const ALL: [Shape; 5] = [
        Shape::RectangleExterior,
        Shape::RectangleBoundary,
        Shape::RectangleInterior,
        Shape::Circle,
        Shape::HullMemory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::RectangleExterior => "rectangle-exterior",
            Shape::RectangleBoundary => "rectangle-boundary",
            Shape::RectangleInterior => "rectangle-interior",
            Shape::Circle => "circle",
            Shape::HullMemory => "hull-memory",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Shape::ALL
            .into_iter()
            .find(|shape| shape.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown benchmark shape '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchParams {
    pub iterations: usize,
    /// Buffer sizes swept by the hull-memory shape; other shapes use the first entry.
    pub memories: Vec<usize>,
    pub seed: u64,
    pub window: FitWindow,
    pub hull: HullInstanceParams,
}

impl Default for BenchParams {
    fn default() -> Self {
        BenchParams {
            iterations: 100_000,
            memories: vec![1],
            seed: 0,
            window: FitWindow::default(),
            hull: HullInstanceParams::default(),
        }
    }
}

impl BenchParams {
    /// Defaults for `shape`: `10^5` iterations, or `10^4` and `m in {1,5,10,20,30}`
    /// for the hull sweep.
    pub fn for_shape(shape: Shape) -> Self {
        match shape {
            Shape::HullMemory => BenchParams {
                iterations: 10_000,
                memories: vec![1, 5, 10, 20, 30],
                ..Default::default()
            },
            _ => BenchParams::default(),
        }
    }
}

/// Construction parameters of the seeded high-dimensional hull instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HullInstanceParams {
    pub dim: usize,
    pub generators: usize,
    /// Generators spanning the face that contains the nearest point.
    pub face: usize,
    /// Distance of `r` from the set.
    pub dstar: f64,
}

impl Default for HullInstanceParams {
    fn default() -> Self {
        HullInstanceParams {
            dim: 400,
            generators: 39,
            face: 20,
            dstar: 0.5,
        }
    }
}

/// A sign-pattern hull with a target whose nearest point is known.
///
/// With `c` orthogonal to the face generators `g_i` (`i < face`), the points
/// maximizing `c . s` form the face `base + sum_{i<face} tau_i g_i`,
/// `tau in [-1, 1]^face`. The target is `s* + dstar c` for `s*` in the relative
/// interior of that face, so `s*` is its projection and `d* = dstar`.
#[derive(Clone, Debug)]
pub struct FaceInstance {
    pub set: ZonotopeSet,
    pub target: Point,
    pub nearest: Point,
    pub dstar: f64,
}

pub fn face_instance(params: &HullInstanceParams, seed: u64) -> Result<FaceInstance> {
    let HullInstanceParams {
        dim,
        generators,
        face,
        dstar,
    } = *params;
    if face >= dim || face > generators || !(dstar >= 0.0) {
        return Err(Error::InvalidConfig(
            "hull instance needs face < dim, face <= generators, dstar >= 0".into(),
        ));
    }
    let set = ZonotopeSet::seeded(dim, generators, seed);
    let mut rng = seeded(derive_seed(seed, 1));
    // c: random direction with the face generators projected out
    let mut c: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    if face > 0 {
        let g = DMatrix::from_fn(dim, face, |i, j| set.generators[j][i]);
        let q = g.qr().q();
        let coeff = q.transpose() * nalgebra::DVector::from_column_slice(&c);
        let proj = &q * coeff;
        for (ci, pi) in c.iter_mut().zip(proj.iter()) {
            *ci -= pi;
        }
    }
    let c = Point::from(c).normalized().ok_or(Error::ZeroDirection)?;

    let mut nearest = set.offset.clone();
    for (i, g) in set.generators.iter().enumerate() {
        let weight = if i < face {
            rng.random_range(-0.5..0.5)
        } else if dot(&c, g) > 0.0 {
            1.0
        } else {
            -1.0
        };
        crate::point::axpy(weight, g, &mut nearest);
    }
    let mut target = nearest.clone();
    crate::point::axpy(dstar, &c, &mut target);
    Ok(FaceInstance {
        set,
        target,
        nearest,
        dstar,
    })
}

/// One engine run of a benchmark.
#[derive(Clone, Debug)]
pub struct BenchRun {
    pub label: String,
    pub memory: usize,
    pub dstar: f64,
    pub metadata: SetMetadata,
    pub record: RunRecord,
    pub fit: Option<SlopeFit>,
}

impl BenchRun {
    /// `d_k - d*` for every recorded iteration.
    pub fn excess(&self) -> Vec<f64> {
        self.record.rows.iter().map(|r| r.d_k - self.dstar).collect()
    }

    pub fn final_excess(&self) -> f64 {
        self.record.final_distance() - self.dstar
    }
}

#[derive(Clone, Debug)]
pub struct BenchResult {
    pub shape: Shape,
    pub runs: Vec<BenchRun>,
}

fn trace_config(params: &BenchParams, memory: usize, s0: Option<Point>) -> RunConfig {
    RunConfig {
        max_iterations: params.iterations,
        memory_capacity: memory,
        run_to_budget: true,
        initial_point: s0,
        rng_seed: params.seed,
        ..RunConfig::default()
    }
}

/// Start `(0.5, -1)` on the rectangle, `(1, 0)` on the disc.
const RECTANGLE_START: [f64; 2] = [0.5, -1.0];
const CIRCLE_START: [f64; 2] = [1.0, 0.0];

/// Fits the window `[start, end)` where `end` is where the excess reaches
/// the rounding floor; the burn-in shrinks when decay is that fast.
fn exponential_fit(excess: &[f64], window: FitWindow) -> Option<SlopeFit> {
    let end = window
        .end
        .unwrap_or(usize::MAX)
        .min(end_above_floor(excess, EXPONENTIAL_FLOOR));
    let start = window.start.min(end / 2);
    fit_exponential(excess, FitWindow::new(start, Some(end))).ok()
}

pub fn convergence_bench(shape: Shape, params: &BenchParams) -> Result<BenchResult> {
    let memory = params.memories.first().copied().unwrap_or(1);
    let runs = match shape {
        Shape::RectangleExterior | Shape::RectangleBoundary | Shape::RectangleInterior => {
            let rect = BoxSet::rectangle();
            let r: [f64; 2] = match shape {
                Shape::RectangleExterior => [0.0, 1.0],
                Shape::RectangleBoundary => [0.0, 0.0],
                _ => [-0.5, -0.1],
            };
            let metadata = rect.metadata(&r);
            let dstar = metadata.known_dstar.unwrap_or(0.0);
            let record = run(&r, &rect, &trace_config(params, memory, Some(RECTANGLE_START.into())))?;
            let mut bench = BenchRun {
                label: format!("{shape} m={memory}"),
                memory,
                dstar,
                metadata,
                record,
                fit: None,
            };
            let excess = bench.excess();
            bench.fit = if shape == Shape::RectangleInterior {
                exponential_fit(&excess, params.window)
            } else {
                fit_loglog_slope(&excess, params.window).ok()
            };
            vec![bench]
        }
        Shape::Circle => {
            let disc = BallSet::unit_disc();
            let r = [0.0, 1.3];
            let metadata = disc.metadata(&r);
            let record = run(&r, &disc, &trace_config(params, memory, Some(CIRCLE_START.into())))?;
            let mut bench = BenchRun {
                label: format!("{shape} m={memory}"),
                memory,
                dstar: metadata.known_dstar.unwrap_or(0.0),
                metadata,
                record,
                fit: None,
            };
            bench.fit = exponential_fit(&bench.excess(), params.window);
            vec![bench]
        }
        Shape::HullMemory => {
            let inst = face_instance(&params.hull, params.seed)?;
            let metadata = SetMetadata {
                diameter: inst.set.diameter_bound(),
                known_dstar: Some(inst.dstar),
                boundary_gap: None,
                curvature: Some(0.0),
            };
            params
                .memories
                .par_iter()
                .map(|&m| {
                    let record = run(&inst.target, &inst.set, &trace_config(params, m, None))?;
                    let mut bench = BenchRun {
                        label: format!("{shape} m={m}"),
                        memory: m,
                        dstar: inst.dstar,
                        metadata: metadata.clone(),
                        record,
                        fit: None,
                    };
                    bench.fit = fit_loglog_slope(&bench.excess(), params.window).ok();
                    Ok(bench)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(BenchResult { shape, runs })
}
