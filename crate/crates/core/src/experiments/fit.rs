//! Least-squares fits of convergence traces.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Minimum number of points a fit accepts.
pub const MIN_FIT_POINTS: usize = 10;
/// Iterations discarded at the start of a trace by default.
pub const DEFAULT_BURN_IN: usize = 100;

/// Ordinary least squares `y = slope x + intercept` on transformed data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Range of iterations `k` used by a fit: `start <= k < end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitWindow {
    pub start: usize,
    pub end: Option<usize>,
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow {
            start: DEFAULT_BURN_IN,
            end: None,
        }
    }
}

impl FitWindow {
    pub fn new(start: usize, end: Option<usize>) -> Self {
        FitWindow { start, end }
    }

    fn range(&self, len: usize) -> std::ops::Range<usize> {
        let end = self.end.map_or(len, |e| e.min(len));
        self.start.min(end)..end
    }
}

pub fn ols(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_POINTS,
            found: n,
        });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(SlopeFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: n,
    })
}

fn window_points(excess: &[f64], window: FitWindow, x_of: impl Fn(usize) -> f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let range = window.range(excess.len());
    let (mut xs, mut ys) = (Vec::with_capacity(range.len()), Vec::with_capacity(range.len()));
    for k in range {
        let e = excess[k];
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "d_k - d* must be positive inside the fit window (k = {k}: {e})"
            )));
        }
        xs.push(x_of(k));
        ys.push(e.ln());
    }
    Ok((xs, ys))
}

/// Fits `ln(d_k - d*) = slope ln(k) + intercept`; `excess[k] = d_k - d*`.
/// Iterations with `k = 0` are skipped.
pub fn fit_loglog_slope(excess: &[f64], window: FitWindow) -> Result<SlopeFit> {
    let window = FitWindow {
        start: window.start.max(1),
        ..window
    };
    let (xs, ys) = window_points(excess, window, |k| (k as f64).ln())?;
    ols(&xs, &ys)
}

/// Fits `ln(d_k - d*) = slope k + intercept` (exponential convergence).
pub fn fit_exponential(excess: &[f64], window: FitWindow) -> Result<SlopeFit> {
    let (xs, ys) = window_points(excess, window, |k| k as f64)?;
    ols(&xs, &ys)
}

/// First index at which `excess` drops to `floor` or below (or its length):
/// the end of the usable window for exponential fits.
pub fn end_above_floor(excess: &[f64], floor: f64) -> usize {
    excess.iter().position(|&e| !(e > floor)).unwrap_or(excess.len())
}
