//! Gilbert's minimum-distance iteration and the weak-separation driver.
//!
//! Starting from any `s_0` in the set, every iteration asks the oracle for the
//! point `s'_k` maximizing `(r - s_k) . s` and moves to the point of the
//! segment `[s_k, s'_k]` (plain variant) or of the hull of the last `m` oracle
//! points together with `s_k` (memory variant) closest to `r`. Distances never
//! increase. When an exact oracle answer satisfies `d_k . d'_k > 0`, the
//! normalized residual `r - s_k` is a separating functional; when `d_k` drops
//! below `delta` the target is declared inside.

use std::collections::VecDeque;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::point::{axpy, distance, dot, norm, sub, Point};
use crate::rng::derive_seed;
use crate::simplex::{self, HullProjection};
use crate::{Error, Result};

/// Relative threshold below which `||s_k - s'_k||` counts as zero.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// A point returned by a linear-optimization oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleAnswer {
    /// Maximizer (or, for heuristic oracles, a good point) of the functional; always in `S`.
    pub point: Point,
    /// `direction . point`.
    pub overlap: f64,
    /// True iff `point` is a certified maximizer.
    pub exact: bool,
}

impl OracleAnswer {
    pub fn new(point: Point, direction: &[f64], exact: bool) -> Self {
        let overlap = dot(direction, &point);
        OracleAnswer { point, overlap, exact }
    }
}

/// Access to a convex set through linear optimization.
///
/// Implementations must behave as pure functions of their arguments.
pub trait LinearOracle {
    fn dimension(&self) -> usize;

    /// Returns a point of the set with large overlap `direction . s`. Exact
    /// oracles return a maximizer; heuristic ones any point of the set, using
    /// `seed` for their randomness.
    fn maximize(&self, direction: &[f64], seed: u64) -> Result<OracleAnswer>;

    /// Certified maximizer, when the set can afford one.
    fn maximize_exact(&self, _direction: &[f64]) -> Result<OracleAnswer> {
        Err(Error::ExactOracleUnavailable)
    }

    /// Preferred starting point, if the set has a natural one.
    fn initial_point(&self) -> Option<Point> {
        None
    }
}

impl<T: LinearOracle + ?Sized> LinearOracle for &T {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn maximize(&self, direction: &[f64], seed: u64) -> Result<OracleAnswer> {
        (**self).maximize(direction, seed)
    }
    fn maximize_exact(&self, direction: &[f64]) -> Result<OracleAnswer> {
        (**self).maximize_exact(direction)
    }
    fn initial_point(&self) -> Option<Point> {
        (**self).initial_point()
    }
}

impl<T: LinearOracle + ?Sized> LinearOracle for Box<T> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn maximize(&self, direction: &[f64], seed: u64) -> Result<OracleAnswer> {
        (**self).maximize(direction, seed)
    }
    fn maximize_exact(&self, direction: &[f64]) -> Result<OracleAnswer> {
        (**self).maximize_exact(direction)
    }
    fn initial_point(&self) -> Option<Point> {
        (**self).initial_point()
    }
}

/// FIFO store of the last `capacity` oracle points.
#[derive(Clone, Debug)]
pub struct MemoryBuffer {
    capacity: usize,
    entries: VecDeque<Point>,
}

impl MemoryBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "memory capacity must be at least 1");
        MemoryBuffer {
            capacity,
            entries: VecDeque::with_capacity(capacity + 1),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends `point`, evicting the oldest entry once the buffer is over capacity.
    pub fn push(&mut self, point: Point) {
        self.entries.push_back(point);
        if self.entries.len() > self.capacity {
            self.entries.pop_front();
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> {
        self.entries.iter()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterateState {
    pub k: usize,
    pub s: Point,
    /// `||r - s||`, always recomputed from `s`.
    pub d: f64,
    /// Step length of the last plain step; `None` for memory steps and at `k = 0`.
    pub epsilon: Option<f64>,
    /// The last step found `s'_k` numerically equal to `s_k`.
    pub degenerate: bool,
}

impl IterateState {
    pub fn new(s: Point, r: &[f64]) -> Self {
        let d = distance(r, &s);
        IterateState {
            k: 0,
            s,
            d,
            epsilon: None,
            degenerate: false,
        }
    }
}

/// Separating functional `c` (unit norm) with `c . r > w = max_{s in S} c . s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "WitnessJson", try_from = "WitnessJson")]
pub struct Witness {
    pub c: Point,
    pub local_bound: f64,
    pub value_at_r: f64,
    pub margin: f64,
}

#[derive(Serialize, Deserialize)]
struct WitnessJson {
    dimension: usize,
    c: Vec<f64>,
    local_bound: f64,
    value_at_r: f64,
    margin: f64,
}

impl From<Witness> for WitnessJson {
    fn from(w: Witness) -> Self {
        WitnessJson {
            dimension: w.c.dim(),
            c: w.c.into_vec(),
            local_bound: w.local_bound,
            value_at_r: w.value_at_r,
            margin: w.margin,
        }
    }
}

impl TryFrom<WitnessJson> for Witness {
    type Error = String;

    fn try_from(w: WitnessJson) -> std::result::Result<Self, String> {
        if w.c.len() != w.dimension {
            return Err(format!(
                "witness dimension {} does not match {} coefficients",
                w.dimension,
                w.c.len()
            ));
        }
        Ok(Witness {
            c: w.c.into(),
            local_bound: w.local_bound,
            value_at_r: w.value_at_r,
            margin: w.margin,
        })
    }
}

impl Witness {
    /// Builds the witness for functional `c` given the exact maximum `local_bound`
    /// of `c` over the set; `None` unless it separates `r`.
    pub fn from_functional(c: Point, local_bound: f64, r: &[f64]) -> Option<Witness> {
        let value_at_r = dot(&c, r);
        let margin = value_at_r - local_bound;
        (margin > 0.0).then_some(Witness {
            c,
            local_bound,
            value_at_r,
            margin,
        })
    }
}

fn default_delta() -> f64 {
    1e-6
}
fn default_max_iterations() -> usize {
    10_000
}
fn default_memory() -> usize {
    1
}
fn default_stop_tolerance() -> f64 {
    1e-12
}
fn default_plateau_window() -> usize {
    100
}
fn default_plateau_tolerance() -> f64 {
    1e-7
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Target accuracy: stop once `d_k < delta`.
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Size `m` of the oracle-point buffer; `1` runs the plain iteration.
    #[serde(default = "default_memory")]
    pub memory_capacity: usize,
    /// Slack for the `d_k . d'_k > tol` separation test.
    #[serde(default = "default_stop_tolerance")]
    pub stop_tolerance: f64,
    /// Window `W` of the plateau test `(d_{k-W} - d_k) / d_k < plateau_tolerance`.
    #[serde(default = "default_plateau_window")]
    pub plateau_window: usize,
    #[serde(default = "default_plateau_tolerance")]
    pub plateau_tolerance: f64,
    /// Call the exact oracle once the heuristic iteration plateaus.
    #[serde(default = "default_true")]
    pub certify_on_plateau: bool,
    /// Keep iterating after an outcome is reached (convergence traces).
    #[serde(default)]
    pub run_to_budget: bool,
    #[serde(default)]
    pub diameter_hint: Option<f64>,
    #[serde(default)]
    pub initial_point: Option<Point>,
    #[serde(default)]
    pub rng_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            delta: default_delta(),
            max_iterations: default_max_iterations(),
            memory_capacity: default_memory(),
            stop_tolerance: default_stop_tolerance(),
            plateau_window: default_plateau_window(),
            plateau_tolerance: default_plateau_tolerance(),
            certify_on_plateau: true,
            run_to_budget: false,
            diameter_hint: None,
            initial_point: None,
            rng_seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.delta > 0.0) {
            return bad("delta must be positive");
        }
        if self.memory_capacity < 1 {
            return bad("memory_capacity must be at least 1");
        }
        if self.max_iterations < 1 {
            return bad("max_iterations must be at least 1");
        }
        if !(self.stop_tolerance >= 0.0) || !(self.plateau_tolerance > 0.0) {
            return bad("tolerances must be non-negative");
        }
        if self.plateau_window < 1 {
            return bad("plateau_window must be at least 1");
        }
        if let Some(d) = self.diameter_hint {
            if !(d > 0.0) {
                return bad("diameter_hint must be positive");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub d_k: f64,
    pub epsilon_k: Option<f64>,
    /// `d_k . d'_k` for the oracle answer at iteration `k`.
    pub overlap: Option<f64>,
    pub wallclock_us: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    InsideWithinDelta,
    Separated(Witness),
    IterationBudgetExhausted,
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::InsideWithinDelta => "inside_within_delta",
            Outcome::Separated(_) => "separated",
            Outcome::IterationBudgetExhausted => "iteration_budget_exhausted",
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Outcome::Separated(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub rows: Vec<TraceRow>,
    pub outcome: Outcome,
    pub final_point: Point,
    pub oracle_calls: usize,
    pub exact_oracle_calls: usize,
}

impl RunRecord {
    pub fn distances(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.d_k).collect()
    }

    pub fn final_distance(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.d_k)
    }

    /// Distance after `k` iterations, if the run got that far.
    pub fn distance_at(&self, k: usize) -> Option<f64> {
        self.rows.get(k).filter(|r| r.k == k).map(|r| r.d_k)
    }

    pub const CSV_HEADER: &'static str = "k,d_k,epsilon_k,overlap,wallclock_us";

    /// Writes the trace as CSV with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        for row in &self.rows {
            writeln!(
                out,
                "{},{:.16e},{},{},{}",
                row.k,
                row.d_k,
                opt(row.epsilon_k),
                opt(row.overlap),
                row.wallclock_us
            )?;
        }
        Ok(())
    }
}

/// Optimal step length along `v = d' - d = s_k - s'_k`:
/// `min(-(d . v) / (v . v), 1)`, clamped to `[0, 1]`.
pub fn compute_epsilon(d_vec: &[f64], v_vec: &[f64]) -> Result<f64> {
    let vv = dot(v_vec, v_vec);
    let vn = vv.sqrt();
    if !(vn >= DEGENERACY_TOLERANCE * norm(d_vec).max(1.0)) {
        return Err(Error::DegenerateDirection { norm: vn });
    }
    Ok((-dot(d_vec, v_vec) / vv).clamp(0.0, 1.0))
}

/// Overlap `d_k . d'_k > tol` with an exact answer proves `r` is not in `S`.
pub fn check_stop_witness(overlap: f64, tolerance: f64) -> bool {
    overlap > tolerance
}

/// One plain step: `s_{k+1} = (1 - eps) s_k + eps s'_k`.
pub fn step_plain(state: &IterateState, answer: &OracleAnswer, r: &[f64]) -> IterateState {
    let d_vec = sub(r, &state.s);
    let v_vec = sub(&state.s, &answer.point);
    match compute_epsilon(&d_vec, &v_vec) {
        Ok(eps) => {
            let mut s = state.s.clone();
            // s + eps (s' - s) = s - eps v
            axpy(-eps, &v_vec, &mut s);
            let d = distance(r, &s);
            IterateState {
                k: state.k + 1,
                s,
                d,
                epsilon: Some(eps),
                degenerate: false,
            }
        }
        Err(_) => IterateState {
            k: state.k + 1,
            s: state.s.clone(),
            d: state.d,
            epsilon: Some(0.0),
            degenerate: true,
        },
    }
}

/// One memory step: push `s'_k` into `buffer`, then project `r` onto the hull
/// of the buffer together with `s_k`.
pub fn step_memory(
    state: &IterateState,
    answer: &OracleAnswer,
    buffer: &mut MemoryBuffer,
    r: &[f64],
) -> Result<IterateState> {
    buffer.push(answer.point.clone());
    let mut columns: Vec<&[f64]> = buffer.iter().map(|p| &p[..]).collect();
    columns.push(&state.s);
    let HullProjection { point, .. } = simplex::project_columns(&columns, r, simplex::DEFAULT_TOLERANCE, None)?;

    let plain = step_plain(state, answer, r);
    let d = distance(r, &point);
    // The plain segment lies inside the projected hull; keep whichever is closer
    // so rounding in the projection can never cost monotonicity.
    let (s, d) = if d <= plain.d { (point, d) } else { (plain.s, plain.d) };
    Ok(IterateState {
        k: state.k + 1,
        s,
        d,
        epsilon: None,
        degenerate: plain.degenerate,
    })
}

/// Calls the exact oracle once on `c = (r - s_k) / ||r - s_k||` and returns the
/// witness if `c` separates `r` from the set.
pub fn certify_witness<O: LinearOracle + ?Sized>(r: &[f64], s_k: &[f64], oracle: &O) -> Result<Option<Witness>> {
    let Some(c) = sub(r, s_k).normalized() else {
        return Ok(None);
    };
    let answer = oracle.maximize_exact(&c)?;
    Ok(Witness::from_functional(c, answer.overlap, r))
}

/// Solves weak separation of `r` from the set behind `oracle`.
pub fn run<O: LinearOracle + ?Sized>(r: &[f64], oracle: &O, config: &RunConfig) -> Result<RunRecord> {
    config.validate()?;
    let n = oracle.dimension();
    if r.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: r.len(),
        });
    }
    if !r.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidConfig("target point has non-finite entries".into()));
    }

    let clock = Instant::now();
    let mut oracle_calls = 0usize;
    let mut exact_calls = 0usize;

    let s0 = match config.initial_point.clone().or_else(|| oracle.initial_point()) {
        Some(p) => p,
        None => {
            oracle_calls += 1;
            oracle.maximize(r, derive_seed(config.rng_seed, u64::MAX))?.point
        }
    };
    if s0.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s0.dim(),
        });
    }

    let mut state = IterateState::new(s0, r);
    let mut buffer = MemoryBuffer::new(config.memory_capacity);
    let mut rows = Vec::with_capacity(config.max_iterations.min(1 << 20) + 1);
    let mut witness: Option<Witness> = None;
    let mut inside = false;
    let mut last_certification: Option<usize> = None;
    let window = config.plateau_window;

    let mut done = false;
    while state.k < config.max_iterations {
        if state.d < config.delta {
            inside = true;
            if !config.run_to_budget || state.d == 0.0 {
                break;
            }
        }

        let d_vec = sub(r, &state.s);
        let answer = oracle.maximize(&d_vec, derive_seed(config.rng_seed, state.k as u64))?;
        oracle_calls += 1;
        if answer.exact {
            exact_calls += 1;
        }
        // d_k . d'_k = d_k . r - d_k . s'_k
        let overlap = dot(&d_vec, r) - answer.overlap;
        if answer.exact && check_stop_witness(overlap, config.stop_tolerance) {
            if let Some(c) = d_vec.normalized() {
                let dn = state.d;
                witness = Witness::from_functional(c, answer.overlap / dn, r).or(witness);
            }
            if witness.is_some() && !config.run_to_budget && !inside {
                rows.push(row(&state, None, Some(overlap), &clock));
                done = true;
                break;
            }
        }

        let next = if config.memory_capacity == 1 {
            step_plain(&state, &answer, r)
        } else {
            step_memory(&state, &answer, &mut buffer, r)?
        };
        rows.push(row(&state, next.epsilon, Some(overlap), &clock));
        let stuck = next.degenerate || next.d >= state.d;
        state = next;

        if !answer.exact && config.certify_on_plateau && witness.is_none() {
            let k = state.k;
            let due = last_certification.is_none_or(|t| k >= t + window);
            let plateau =
                stuck || (k >= window && (rows[k - window].d_k - state.d) / state.d < config.plateau_tolerance);
            if due && plateau {
                last_certification = Some(k);
                match certify_witness(r, &state.s, oracle) {
                    Ok(found) => {
                        exact_calls += 1;
                        witness = found;
                    }
                    Err(Error::ExactOracleUnavailable) | Err(Error::BudgetExceeded { .. }) => {}
                    Err(e) => return Err(e),
                }
                if witness.is_some() && !config.run_to_budget {
                    break;
                }
            }
        }

        if state.degenerate && answer.exact {
            // s'_k == s_k: the oracle can offer no improvement.
            break;
        }
    }
    if !done {
        if state.d < config.delta {
            inside = true;
        }
        rows.push(row(&state, None, None, &clock));
    }

    let outcome = if inside {
        Outcome::InsideWithinDelta
    } else if let Some(w) = witness {
        Outcome::Separated(w)
    } else {
        Outcome::IterationBudgetExhausted
    };
    Ok(RunRecord {
        rows,
        outcome,
        final_point: state.s,
        oracle_calls,
        exact_oracle_calls: exact_calls,
    })
}

fn row(state: &IterateState, epsilon: Option<f64>, overlap: Option<f64>, clock: &Instant) -> TraceRow {
    TraceRow {
        k: state.k,
        d_k: state.d,
        epsilon_k: epsilon,
        overlap,
        wallclock_us: clock.elapsed().as_micros(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{BallSet, BoxSet};
    use approx::assert_abs_diff_eq;

    #[test]
    fn epsilon_examples() {
        assert_abs_diff_eq!(
            compute_epsilon(&[-0.5, 2.0], &[1.5, -1.0]).unwrap(),
            2.75 / 3.25,
            epsilon = 1e-15
        );
        assert_eq!(compute_epsilon(&[1.0, 0.0], &[-1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(compute_epsilon(&[0.0, 1.0], &[-2.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(
            compute_epsilon(&[1.0, 0.0], &[0.0, 0.0]),
            Err(Error::DegenerateDirection { .. })
        ));
    }

    #[test]
    fn plain_step_on_rectangle() {
        let r = [0.0, 1.0];
        let state = IterateState::new(Point::from([0.5, -1.0]), &r);
        let answer = OracleAnswer::new(Point::from([-1.0, 0.0]), &sub(&r, &state.s), true);
        let next = step_plain(&state, &answer, &r);
        assert_abs_diff_eq!(next.s[0], -0.769_230_769, epsilon = 1e-6);
        assert_abs_diff_eq!(next.s[1], -0.153_846_154, epsilon = 1e-6);
        assert_abs_diff_eq!(next.d, 1.386_750, epsilon = 1e-6);
        assert_eq!(next.k, 1);
        // residual orthogonal to the step
        let d = sub(&r, &next.s);
        assert!(dot(&d, &sub(&answer.point, &state.s)).abs() < 1e-12);
    }

    #[test]
    fn plain_step_at_optimum_stays_put() {
        let r = [0.0, -0.5];
        let state = IterateState::new(Point::from(r), &r);
        let answer = BoxSet::rectangle().maximize(&[0.0, 0.0], 0).unwrap();
        let next = step_plain(&state, &answer, &r);
        assert_eq!(next.d, 0.0);
    }

    #[test]
    fn memory_step_with_single_entry_matches_plain() {
        let r = [0.3, 1.7];
        let state = IterateState::new(Point::from([0.5, -1.0]), &r);
        let answer = OracleAnswer::new(Point::from([-1.0, 0.0]), &sub(&r, &state.s), true);
        let plain = step_plain(&state, &answer, &r);
        let mut buffer = MemoryBuffer::new(1);
        let mem = step_memory(&state, &answer, &mut buffer, &r).unwrap();
        assert_abs_diff_eq!(mem.d, plain.d, epsilon = 1e-12);
    }

    #[test]
    fn memory_buffer_is_fifo() {
        let mut b = MemoryBuffer::new(2);
        for i in 0..4 {
            b.push(Point::from([f64::from(i)]));
        }
        let kept: Vec<f64> = b.iter().map(|p| p[0]).collect();
        assert_eq!(kept, vec![2.0, 3.0]);
    }

    #[test]
    fn stop_witness_examples() {
        assert!(check_stop_witness(1.0, 1e-12));
        assert!(!check_stop_witness(-0.3, 1e-12));
        let disc = BallSet::unit_disc();
        let d = [0.0, 1.0];
        let s = disc.maximize_exact(&d).unwrap();
        // d* . d'* = d* . (r - s')
        assert_abs_diff_eq!(dot(&d, &sub(&[0.0, 2.0], &s.point)), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn certify_examples() {
        let disc = BallSet::unit_disc();
        let w = certify_witness(&[0.0, 2.0], &[0.0, 1.0], &disc).unwrap().unwrap();
        assert_eq!(&w.c[..], &[0.0, 1.0]);
        assert_eq!(w.local_bound, 1.0);
        assert_eq!(w.margin, 1.0);
        assert!(certify_witness(&[0.2, 0.1], &[0.2, 0.1], &disc).unwrap().is_none());

        struct NoExact;
        impl LinearOracle for NoExact {
            fn dimension(&self) -> usize {
                1
            }
            fn maximize(&self, d: &[f64], _: u64) -> Result<OracleAnswer> {
                Ok(OracleAnswer::new(Point::from([0.0]), d, false))
            }
        }
        assert!(matches!(
            certify_witness(&[1.0], &[0.0], &NoExact),
            Err(Error::ExactOracleUnavailable)
        ));
    }

    #[test]
    fn run_outcomes() {
        let rect = BoxSet::rectangle();
        let rec = run(&[0.0, 1.0], &rect, &RunConfig::default()).unwrap();
        let w = rec.outcome.witness().expect("separated");
        assert!(w.margin > 0.0);
        assert!(w.c[1] > 0.99);

        let disc = BallSet::unit_disc();
        let rec = run(&[0.0, 0.5], &disc, &RunConfig::default()).unwrap();
        assert_eq!(rec.outcome, Outcome::InsideWithinDelta);

        let rec = run(
            &[0.0, 1.3],
            &disc,
            &RunConfig {
                max_iterations: 3,
                stop_tolerance: 1e9,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(rec.outcome, Outcome::IterationBudgetExhausted);
        assert!(rec.distances().windows(2).all(|p| p[1] <= p[0] + 1e-12));

        assert!(matches!(
            run(&[0.0], &disc, &RunConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn csv_and_witness_json() {
        let rec = run(&[0.0, 1.0], &BoxSet::rectangle(), &RunConfig::default()).unwrap();
        let mut out = Vec::new();
        rec.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("k,d_k,epsilon_k,overlap,wallclock_us\n"));
        let w = rec.outcome.witness().unwrap();
        let json = serde_json::to_value(w).unwrap();
        assert_eq!(json["dimension"], 2);
        let back: Witness = serde_json::from_value(json).unwrap();
        assert_eq!(&back, w);
    }
}
