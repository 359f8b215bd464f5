//! Empirical distribution functions, probability-integral-transform values,
//! pooled EDFs, and directional projections of multivariate samples.

use crate::error::{Error, Result};
use crate::numerics::RngStream;

/// A univariate sample. Keeps the observations in input order together with
/// a sorted copy for O(log n) EDF evaluation.
#[derive(Debug, Clone)]
pub struct UniSample {
    values: Vec<f64>,
    sorted: Vec<f64>,
}

impl UniSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("sample must not be empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite observation {bad}")));
        }
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(UniSample { values, sorted })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Empirical distribution function F_n(t) = #{values <= t} / n;
    /// right-continuous, evaluated by binary search on the sorted copy.
    pub fn edf(&self, t: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v <= t);
        count as f64 / self.n() as f64
    }

    /// True when the sorted sample contains at least one exact duplicate.
    pub fn has_ties(&self) -> bool {
        self.sorted.windows(2).any(|w| w[0] == w[1])
    }
}

/// Probability-integral-transform values V_j = F_n(Y_j) of `y` through the
/// EDF of `x`. Values may attain both 0 and 1; no clipping is applied.
pub fn pit_values(x: &UniSample, y: &UniSample) -> Vec<f64> {
    y.values().iter().map(|&t| x.edf(t)).collect()
}

/// Pooled EDF H(t) = {n F_n(t) + m G_m(t)} / (n + m).
pub fn pooled_edf(x: &UniSample, y: &UniSample, t: f64) -> f64 {
    let n = x.n() as f64;
    let m = y.n() as f64;
    (n * x.edf(t) + m * y.edf(t)) / (n + m)
}

/// A multivariate sample of n observations in p dimensions.
#[derive(Debug, Clone)]
pub struct MultiSample {
    rows: Vec<Vec<f64>>,
    dim: usize,
}

impl MultiSample {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Input("sample must not be empty".into()));
        }
        let dim = rows[0].len();
        if dim == 0 {
            return Err(Error::Input("rows must have dimension >= 1".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Input(format!(
                    "row {i} has dimension {} but expected {dim}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Input(format!("non-finite observation {bad} in row {i}")));
            }
        }
        Ok(MultiSample { rows, dim })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// One-dimensional projection u' X_i of every observation.
    pub fn project(&self, dir: &Direction) -> Result<UniSample> {
        if dir.dim() != self.dim {
            return Err(Error::Input(format!(
                "direction dimension {} does not match sample dimension {}",
                dir.dim(),
                self.dim
            )));
        }
        let u = dir.unit();
        let values = self
            .rows
            .iter()
            .map(|row| row.iter().zip(u).map(|(a, b)| a * b).sum())
            .collect();
        UniSample::new(values)
    }

    /// Projection values without constructing a sample; fills `out` with
    /// u' X_i in row order.
    pub(crate) fn project_into(&self, u: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.rows
                .iter()
                .map(|row| row.iter().zip(u).map(|(a, b)| a * b).sum::<f64>()),
        );
    }
}

/// A unit vector on S^{p-1} together with the spherical angles that
/// generate it:
/// u_1 = cos a_1, u_2 = sin a_1 cos a_2, ..., u_p = sin a_1 ... sin a_{p-1}.
#[derive(Debug, Clone)]
pub struct Direction {
    unit: Vec<f64>,
    angles: Vec<f64>,
}

impl Direction {
    /// Build the direction generated by p - 1 spherical angles (p >= 2).
    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::Input(
                "from_angles needs at least one angle (p >= 2)".into(),
            ));
        }
        Ok(Direction {
            unit: unit_from_angles(angles),
            angles: angles.to_vec(),
        })
    }

    /// Uniform random direction: a vector of standard gaussians normalized
    /// to unit length (retrying in the measure-zero event of a zero draw).
    pub fn random(p: usize, stream: &mut RngStream) -> Result<Self> {
        if p < 1 {
            return Err(Error::Input("dimension must be >= 1".into()));
        }
        loop {
            let v: Vec<f64> = (0..p).map(|_| stream.gaussian()).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                let unit: Vec<f64> = v.iter().map(|x| x / norm).collect();
                return Ok(Direction {
                    angles: angles_from_unit(&unit),
                    unit,
                });
            }
        }
    }

    /// Wrap a vector that is already unit length (within 1e-9); it is not
    /// renormalized, so projections use exactly the given coordinates.
    pub fn from_unit(unit: Vec<f64>) -> Result<Self> {
        let norm: f64 = unit.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Input(format!(
                "direction must have unit norm, got |u| = {norm}"
            )));
        }
        Ok(Direction {
            angles: angles_from_unit(&unit),
            unit,
        })
    }

    /// The signed coordinate axis e_k (0-based) in dimension p.
    pub fn axis(p: usize, k: usize, negative: bool) -> Result<Self> {
        if k >= p {
            return Err(Error::Input(format!("axis {k} out of range for p = {p}")));
        }
        let mut unit = vec![0.0; p];
        unit[k] = if negative { -1.0 } else { 1.0 };
        Ok(Direction {
            angles: angles_from_unit(&unit),
            unit,
        })
    }

    pub fn dim(&self) -> usize {
        self.unit.len()
    }

    pub fn unit(&self) -> &[f64] {
        &self.unit
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

/// Spherical coordinates -> unit vector.
pub(crate) fn unit_from_angles(angles: &[f64]) -> Vec<f64> {
    let p = angles.len() + 1;
    let mut u = vec![0.0; p];
    let mut sin_prod = 1.0;
    for (i, &a) in angles.iter().enumerate() {
        u[i] = sin_prod * a.cos();
        sin_prod *= a.sin();
    }
    u[p - 1] = sin_prod;
    u
}

/// Unit vector -> spherical coordinates (the inverse of
/// [`unit_from_angles`] up to the usual chart conventions).
pub(crate) fn angles_from_unit(u: &[f64]) -> Vec<f64> {
    let p = u.len();
    if p < 2 {
        return Vec::new();
    }
    let mut angles = vec![0.0; p - 1];
    for i in 0..p - 2 {
        let tail: f64 = u[i + 1..].iter().map(|x| x * x).sum::<f64>().sqrt();
        angles[i] = tail.atan2(u[i]);
    }
    angles[p - 2] = u[p - 1].atan2(u[p - 2]);
    angles
}
