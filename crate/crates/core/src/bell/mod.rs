//! Bipartite and tripartite correlation polytopes.
//!
//! A local deterministic strategy assigns a sign to every measurement setting;
//! its correlation table is `D(x,y) = a_x b_y` (bipartite) or
//! `D(x,y,z) = a_x b_y c_z` (tripartite). The local set is the convex hull of
//! these tables. Quantum points come from the singlet with visibility `v`,
//! `Q(x,y) = -v a_x . b_y`, and from the GHZ state with planar measurements,
//! `Q(x,y,z) = p cos(theta_x + theta_y + theta_z)`.
//!
//! Tables are stored flat in row-major order, so the engine sees them as
//! points of `R^(n^2)` or `R^(n^3)`.

mod oracles;
mod werner;

pub use oracles::{
    bell2_exact_oracle, bell2_heuristic_oracle, bell3_exact_oracle, bell3_heuristic_oracle, Bipartite, OracleMode,
    Tripartite, DEFAULT_EXACT_CAP_2, DEFAULT_EXACT_CAP_3,
};
pub use werner::{optimize_measurements, quantum_seesaw_2party, WernerConfig, WernerResult};

use serde::{Deserialize, Serialize};

use crate::point::Point;
use crate::{Error, Result};

/// Tolerance on `|a_x| = 1` for measurement directions.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Measurement directions (Bloch vectors) of two parties, `n` settings each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlochVectorsJson", into = "BlochVectorsJson")]
pub struct BlochVectors {
    pub a: Vec<[f64; 3]>,
    pub b: Vec<[f64; 3]>,
}

#[derive(Serialize, Deserialize)]
struct BlochVectorsJson {
    n: usize,
    a: Vec<[f64; 3]>,
    b: Vec<[f64; 3]>,
}

impl From<BlochVectors> for BlochVectorsJson {
    fn from(v: BlochVectors) -> Self {
        BlochVectorsJson {
            n: v.a.len(),
            a: v.a,
            b: v.b,
        }
    }
}

impl TryFrom<BlochVectorsJson> for BlochVectors {
    type Error = Error;
    fn try_from(j: BlochVectorsJson) -> Result<Self> {
        if j.a.len() != j.n || j.b.len() != j.n {
            return Err(Error::DimensionMismatch {
                expected: j.n,
                found: j.a.len().max(j.b.len()),
            });
        }
        BlochVectors::new(j.a, j.b)
    }
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn dot3(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

impl BlochVectors {
    /// Validates that both lists have the same length and contain unit vectors.
    pub fn new(a: Vec<[f64; 3]>, b: Vec<[f64; 3]>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        let v = BlochVectors { a, b };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        for (index, u) in self.a.iter().chain(self.b.iter()).enumerate() {
            let norm = norm3(u);
            if !((norm - 1.0).abs() <= UNIT_TOLERANCE) {
                return Err(Error::NonUnitVector { index, norm });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Uniformly random directions.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = crate::rng::seeded(seed);
        let a = (0..n).map(|_| crate::rng::unit_vector3(&mut rng)).collect();
        let b = (0..n).map(|_| crate::rng::unit_vector3(&mut rng)).collect();
        BlochVectors { a, b }
    }

    /// The CHSH-optimal pair `a = (x, z)`, `b = ((x+z)/sqrt2, (x-z)/sqrt2)`.
    pub fn chsh() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        BlochVectors {
            a: vec![[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
            b: vec![[h, 0.0, h], [h, 0.0, -h]],
        }
    }
}

/// A correlation table `Q` of shape `[n, n]` or `[n, n, n]` at parameter `v`/`p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPoint {
    pub shape: Vec<usize>,
    pub values: Point,
    pub parameter: f64,
}

impl CorrelationPoint {
    pub fn n(&self) -> usize {
        self.shape[0]
    }

    pub fn get2(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.n() + y]
    }

    pub fn get3(&self, x: usize, y: usize, z: usize) -> f64 {
        let n = self.n();
        self.values[(x * n + y) * n + z]
    }
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {v}")))
    }
}

/// Singlet correlations `Q(x,y) = -v a_x . b_y`.
pub fn werner_point(vectors: &BlochVectors, v: f64) -> Result<CorrelationPoint> {
    check_unit_interval("visibility", v)?;
    vectors.validate()?;
    let n = vectors.n();
    let values = vectors
        .a
        .iter()
        .flat_map(|a| vectors.b.iter().map(move |b| -v * dot3(a, b)))
        .collect();
    Ok(CorrelationPoint {
        shape: vec![n, n],
        values,
        parameter: v,
    })
}

/// Measurement angles in the x-y plane of the three GHZ parties.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzAngles {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl GhzAngles {
    /// `theta_i = pi (i - 1) / n` for every party.
    pub fn standard(n: usize) -> Self {
        let t: Vec<f64> = (0..n).map(|i| std::f64::consts::PI * i as f64 / n as f64).collect();
        GhzAngles {
            a: t.clone(),
            b: t.clone(),
            c: t,
        }
    }
}

/// GHZ correlations `Q(x,y,z) = p cos(theta^a_x + theta^b_y + theta^c_z)`.
pub fn ghz_point(n: usize, angles: Option<&GhzAngles>, p: f64) -> Result<CorrelationPoint> {
    check_unit_interval("p", p)?;
    let standard;
    let angles = match angles {
        Some(a) => a,
        None => {
            standard = GhzAngles::standard(n);
            &standard
        }
    };
    if angles.a.len() != n || angles.b.len() != n || angles.c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: angles.a.len(),
        });
    }
    let mut values = Vec::with_capacity(n * n * n);
    for ta in &angles.a {
        for tb in &angles.b {
            for tc in &angles.c {
                values.push(p * (ta + tb + tc).cos());
            }
        }
    }
    Ok(CorrelationPoint {
        shape: vec![n, n, n],
        values: values.into(),
        parameter: p,
    })
}

/// Local deterministic strategy; `c` is present for three parties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub a: Vec<i8>,
    pub b: Vec<i8>,
    pub c: Option<Vec<i8>>,
}

impl DeterministicStrategy {
    /// The flat correlation table `a_x b_y (c_z)` of this strategy.
    pub fn point(&self) -> Point {
        let mut out = Vec::new();
        for &ax in &self.a {
            for &by in &self.b {
                match &self.c {
                    None => out.push(f64::from(ax * by)),
                    Some(c) => out.extend(c.iter().map(|&cz| f64::from(ax * by * cz))),
                }
            }
        }
        out.into()
    }

    /// `sum W . D` for this strategy.
    pub fn value(&self, w: &[f64]) -> f64 {
        crate::point::dot(w, &self.point())
    }
}

/// `w / (Q(v=1) . W)`: the visibility below which `W` certifies nothing.
pub fn visibility_bound(w: f64, quantum_value: f64) -> Result<f64> {
    if quantum_value > w {
        Ok(w / quantum_value)
    } else {
        Err(Error::NoSeparation {
            local_bound: w,
            quantum_value,
        })
    }
}

/// Exported Bell inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellWitness {
    pub shape: Vec<usize>,
    #[serde(rename = "W")]
    pub w: serde_json::Value,
    pub local_bound: f64,
    pub quantum_value: f64,
    pub visibility_bound: f64,
}

impl BellWitness {
    /// Packs a flat functional of the given shape, nesting `W` as arrays.
    pub fn new(shape: Vec<usize>, flat: &[f64], local_bound: f64, quantum_value: f64) -> Result<Self> {
        let visibility_bound = visibility_bound(local_bound, quantum_value)?;
        Ok(BellWitness {
            w: nest(&shape, flat),
            shape,
            local_bound,
            quantum_value,
            visibility_bound,
        })
    }

    /// The flat functional back from the nested representation.
    pub fn flat(&self) -> Result<Vec<f64>> {
        fn walk(v: &serde_json::Value, out: &mut Vec<f64>) -> Result<()> {
            match v {
                serde_json::Value::Array(items) => items.iter().try_for_each(|i| walk(i, out)),
                serde_json::Value::Number(x) => {
                    out.push(x.as_f64().unwrap_or(f64::NAN));
                    Ok(())
                }
                _ => Err(Error::InvalidConfig("W must be nested numeric arrays".into())),
            }
        }
        let mut out = Vec::new();
        walk(&self.w, &mut out)?;
        let expected: usize = self.shape.iter().product();
        if out.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: out.len(),
            });
        }
        Ok(out)
    }
}

fn nest(shape: &[usize], flat: &[f64]) -> serde_json::Value {
    match shape {
        [] | [_] => serde_json::json!(flat),
        [n, rest @ ..] => {
            let stride = flat.len() / n.max(&1);
            serde_json::Value::Array(flat.chunks(stride.max(1)).map(|c| nest(rest, c)).collect())
        }
    }
}
