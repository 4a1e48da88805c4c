//! JSON descriptions of sets: `{"type": ..., "parameters": {...}, "seed": u64}`.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{BallSet, BoxSet, HullSet, SetMetadata, ZonotopeSet};
use crate::bell::{Bipartite, OracleMode, Tripartite};
use crate::engine::LinearOracle;
use crate::point::Point;
use crate::rng::seeded;
use crate::steering::UnsteerableSet;
use crate::Result;

/// A set and its construction parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "parameters", rename_all = "snake_case")]
pub enum SetKind {
    /// The rectangle with vertices `(+-1, 0)`, `(+-1, -1)`.
    Rectangle,
    Box {
        lower: Point,
        upper: Point,
    },
    Ball {
        center: Point,
        radius: f64,
    },
    Hull {
        generators: Vec<Point>,
    },
    /// `count` seeded Gaussian points in `R^dim`.
    RandomHull {
        dim: usize,
        count: usize,
    },
    /// Seeded sign-pattern hull with `generators` Gaussian generators in `R^dim`.
    Zonotope {
        dim: usize,
        generators: usize,
    },
    /// Bipartite correlation polytope with `n` settings per party.
    Correlation2 {
        n: usize,
        #[serde(default)]
        mode: Option<OracleMode>,
    },
    /// Tripartite correlation polytope.
    Correlation3 {
        n: usize,
        #[serde(default)]
        mode: Option<OracleMode>,
    },
    /// Unsteerable set for `n` untrusted qubit measurements.
    Unsteerable {
        n: usize,
        #[serde(default)]
        exact: bool,
        #[serde(default)]
        restarts: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetDescriptor {
    #[serde(flatten)]
    pub kind: SetKind,
    #[serde(default)]
    pub seed: u64,
}

/// A set behind a thread-safe oracle.
pub type DynOracle = Box<dyn LinearOracle + Send + Sync>;

impl SetDescriptor {
    pub fn new(kind: SetKind) -> Self {
        SetDescriptor { kind, seed: 0 }
    }

    pub fn build(&self) -> Result<DynOracle> {
        Ok(match &self.kind {
            SetKind::Rectangle => Box::new(BoxSet::rectangle()),
            SetKind::Box { lower, upper } => Box::new(BoxSet::new(lower.clone(), upper.clone())?),
            SetKind::Ball { center, radius } => Box::new(BallSet::new(center.clone(), *radius)?),
            SetKind::Hull { generators } => Box::new(HullSet::new(generators.clone())?),
            SetKind::RandomHull { dim, count } => Box::new(random_hull(*dim, *count, self.seed)?),
            SetKind::Zonotope { dim, generators } => Box::new(ZonotopeSet::seeded(*dim, *generators, self.seed)),
            SetKind::Correlation2 { n, mode } => {
                let p = Bipartite::new(*n);
                let mode = mode.unwrap_or(p.mode);
                Box::new(p.with_mode(mode))
            }
            SetKind::Correlation3 { n, mode } => {
                let p = Tripartite::new(*n);
                let mode = mode.unwrap_or(p.mode);
                Box::new(p.with_mode(mode))
            }
            SetKind::Unsteerable { n, exact, restarts } => {
                let mut s = UnsteerableSet::new(*n);
                s.exact = *exact;
                if let Some(r) = restarts {
                    s.restarts = *r;
                }
                Box::new(s)
            }
        })
    }

    /// Geometric metadata relative to `r`, where known in closed form or
    /// cheaply computable.
    pub fn metadata(&self, r: &[f64]) -> Result<Option<SetMetadata>> {
        Ok(match &self.kind {
            SetKind::Rectangle => Some(BoxSet::rectangle().metadata(r)),
            SetKind::Box { lower, upper } => Some(BoxSet::new(lower.clone(), upper.clone())?.metadata(r)),
            SetKind::Ball { center, radius } => Some(BallSet::new(center.clone(), *radius)?.metadata(r)),
            SetKind::Hull { generators } => Some(HullSet::new(generators.clone())?.metadata(r)?),
            SetKind::RandomHull { dim, count } => Some(random_hull(*dim, *count, self.seed)?.metadata(r)?),
            _ => None,
        })
    }
}

/// `count` standard Gaussian points in `R^dim` from `seed`.
pub fn random_hull(dim: usize, count: usize, seed: u64) -> Result<HullSet> {
    let mut rng = seeded(seed);
    HullSet::new(
        (0..count)
            .map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_builds() {
        let d: SetDescriptor = serde_json::from_str(r#"{"type":"rectangle"}"#).unwrap();
        assert_eq!(d.kind, SetKind::Rectangle);
        assert_eq!(d.build().unwrap().dimension(), 2);

        let d: SetDescriptor =
            serde_json::from_str(r#"{"type":"ball","parameters":{"center":[0,0],"radius":1},"seed":3}"#).unwrap();
        assert_eq!(d.seed, 3);
        assert_eq!(d.metadata(&[0.0, 1.3]).unwrap().unwrap().curvature, Some(0.5));

        let d: SetDescriptor =
            serde_json::from_str(r#"{"type":"zonotope","parameters":{"dim":400,"generators":39},"seed":1}"#).unwrap();
        assert_eq!(d.build().unwrap().dimension(), 400);

        let d: SetDescriptor = serde_json::from_str(r#"{"type":"unsteerable","parameters":{"n":30}}"#).unwrap();
        assert_eq!(d.build().unwrap().dimension(), 90);

        let d = SetDescriptor::new(SetKind::Correlation2 { n: 2, mode: None });
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<SetDescriptor>(&text).unwrap(), d);

        assert!(
            serde_json::from_str::<SetDescriptor>(r#"{"type":"ball","parameters":{"center":[0],"radius":-1}}"#)
                .unwrap()
                .build()
                .is_err()
        );
    }
}
