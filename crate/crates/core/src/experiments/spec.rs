//! Input description of a single separation problem.

use serde::{Deserialize, Serialize};

use crate::bell::{ghz_point, werner_point, BlochVectors, GhzAngles};
use crate::engine::RunConfig;
use crate::point::Point;
use crate::sets::SetDescriptor;
use crate::steering::{buckyball_directions, steering_point};
use crate::Result;

/// The point to separate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Explicit coordinates.
    Point(Point),
    /// Singlet correlations `-v a_x . b_y`; CHSH-optimal directions when absent.
    Werner {
        #[serde(default)]
        vectors: Option<BlochVectors>,
        v: f64,
    },
    /// GHZ correlations with planar angles.
    Ghz {
        n: usize,
        p: f64,
        #[serde(default)]
        angles: Option<GhzAngles>,
    },
    /// Steering assemblage `-v a_x`; buckyball directions when absent.
    Steering {
        #[serde(default)]
        directions: Option<Vec<[f64; 3]>>,
        v: f64,
    },
}

impl Target {
    pub fn resolve(&self) -> Result<Point> {
        Ok(match self {
            Target::Point(p) => p.clone(),
            Target::Werner { vectors, v } => {
                werner_point(vectors.as_ref().unwrap_or(&BlochVectors::chsh()), *v)?.values
            }
            Target::Ghz { n, p, angles } => ghz_point(*n, angles.as_ref(), *p)?.values,
            Target::Steering { directions, v } => {
                let dirs = directions.clone().unwrap_or_else(buckyball_directions);
                steering_point(&dirs, *v)?.values
            }
        })
    }
}

/// `gilbert separate --config` input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub set: SetDescriptor,
    pub target: Target,
    #[serde(default)]
    pub run: RunConfig,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        let s: ExperimentSpec = serde_json::from_str(
            r#"{"set":{"type":"rectangle"},"target":{"point":[0,1]},"run":{"max_iterations":50}}"#,
        )
        .unwrap();
        assert_eq!(s.target.resolve().unwrap(), Point::from([0.0, 1.0]));
        assert_eq!(s.run.max_iterations, 50);
        let s: ExperimentSpec = serde_json::from_str(
            r#"{"set":{"type":"correlation2","parameters":{"n":2}},"target":{"werner":{"v":0.72}}}"#,
        )
        .unwrap();
        assert_eq!(s.target.resolve().unwrap().dim(), 4);
        assert!(serde_json::from_str::<ExperimentSpec>(
            r#"{"set":{"type":"rectangle"},"target":{"point":[0,1]},"bogus":1}"#
        )
        .is_err());
    }
}
