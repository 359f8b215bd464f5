//! Orthonormal function systems on [0, 1]: the trigonometric (cosine)
//! series psi_k(z) = sqrt(2) cos(pi k z) and the normalized Legendre
//! polynomials psi_k(z) = sqrt(2k+1) P_k(2z - 1), together with their
//! derivatives and closed-form sup-norm bounds.
//!
//! psi_0 = 1 is implicit everywhere: evaluated vectors hold psi_1..psi_d.

use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    #[serde(rename = "trig")]
    Trigonometric,
    Legendre,
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisKind::Trigonometric => write!(f, "trig"),
            BasisKind::Legendre => write!(f, "legendre"),
        }
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trig" | "trigonometric" | "cosine" => Ok(BasisKind::Trigonometric),
            "legendre" | "lp" => Ok(BasisKind::Legendre),
            other => Err(Error::Input(format!("unknown basis kind: {other}"))),
        }
    }
}

/// An orthonormal family psi_1..psi_d on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSystem {
    kind: BasisKind,
    d: usize,
}

impl BasisSystem {
    pub fn new(kind: BasisKind, d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::Domain("truncation d must be >= 1".into()));
        }
        Ok(BasisSystem { kind, d })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Same family at a different truncation.
    pub fn with_d(&self, d: usize) -> Result<Self> {
        BasisSystem::new(self.kind, d)
    }

    fn check_z(z: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::Domain(format!("z = {z} outside [0, 1]")));
        }
        Ok(())
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k < 1 || k > self.d {
            return Err(Error::Domain(format!(
                "index k = {k} outside [1, {}]",
                self.d
            )));
        }
        Ok(())
    }

    /// psi_k(z) for 1 <= k <= d, 0 <= z <= 1.
    pub fn eval(&self, k: usize, z: f64) -> Result<f64> {
        self.check_k(k)?;
        Self::check_z(z)?;
        Ok(match self.kind {
            BasisKind::Trigonometric => SQRT_2 * (PI * k as f64 * z).cos(),
            BasisKind::Legendre => {
                let x = 2.0 * z - 1.0;
                ((2 * k + 1) as f64).sqrt() * legendre_p(k, x)
            }
        })
    }

    /// (psi_1(z), ..., psi_d(z)).
    pub fn eval_vector(&self, z: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.d];
        self.eval_into(z, &mut out)?;
        Ok(out)
    }

    /// Evaluate all d components into `out` (length d). The Legendre values
    /// come from a single pass of the three-term recurrence.
    pub fn eval_into(&self, z: f64, out: &mut [f64]) -> Result<()> {
        Self::check_z(z)?;
        assert_eq!(out.len(), self.d);
        match self.kind {
            BasisKind::Trigonometric => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = SQRT_2 * (PI * (i + 1) as f64 * z).cos();
                }
            }
            BasisKind::Legendre => {
                let x = 2.0 * z - 1.0;
                let mut p0 = 1.0;
                let mut p1 = x;
                out[0] = 3.0_f64.sqrt() * p1;
                for k in 1..self.d {
                    let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                    p0 = p1;
                    p1 = p2;
                    out[k] = ((2 * (k + 1) + 1) as f64).sqrt() * p1;
                }
            }
        }
        Ok(())
    }

    /// ell-th derivative of psi_k at z, ell in {0, 1, 2}. Trigonometric
    /// derivatives are closed-form; Legendre first derivatives use
    /// (x^2 - 1) P'_k = k (x P_k - P_{k-1}) and second derivatives the
    /// Legendre ODE, with the analytic endpoint limits at z = 0, 1.
    pub fn eval_deriv(&self, k: usize, z: f64, ell: usize) -> Result<f64> {
        self.check_k(k)?;
        Self::check_z(z)?;
        assert!(ell <= 2, "derivative order must be 0, 1 or 2");
        match self.kind {
            BasisKind::Trigonometric => {
                let kk = k as f64;
                Ok(match ell {
                    0 => SQRT_2 * (PI * kk * z).cos(),
                    1 => -SQRT_2 * PI * kk * (PI * kk * z).sin(),
                    _ => -SQRT_2 * PI * PI * kk * kk * (PI * kk * z).cos(),
                })
            }
            BasisKind::Legendre => {
                let x = 2.0 * z - 1.0;
                let scale = ((2 * k + 1) as f64).sqrt();
                Ok(match ell {
                    0 => scale * legendre_p(k, x),
                    1 => 2.0 * scale * legendre_p_deriv(k, x),
                    _ => 4.0 * scale * legendre_p_deriv2(k, x),
                })
            }
        }
    }

    /// Closed-form sup-norm bound B over the first `d` members of the
    /// family: max_{k <= d} sup_z |psi_k^(ell)(z)| <= bound(kind, ell, d).
    ///
    /// Legendre derivative bounds come from the Markov brothers' inequality
    /// with the interval-scaling factor 2^ell for [0,1] (each derivative in
    /// z picks up a factor 2 relative to the classical [-1,1] statement;
    /// without it the bound is already violated by psi_1' = 2 sqrt(3)).
    pub fn bound(kind: BasisKind, ell: usize, d: usize) -> f64 {
        assert!(ell <= 2, "derivative order must be 0, 1 or 2");
        let dd = d as f64;
        match kind {
            BasisKind::Trigonometric => match ell {
                0 => SQRT_2,
                1 => SQRT_2 * PI * dd,
                _ => SQRT_2 * PI * PI * dd * dd,
            },
            BasisKind::Legendre => match ell {
                0 => (2.0 * dd + 1.0).sqrt(),
                1 => 2.0 * 3.0_f64.sqrt() * dd.powf(2.5),
                _ => 4.0 / 3.0_f64.sqrt() * dd.powf(4.5),
            },
        }
    }

    /// d x d Gram matrix of the family under `order`-node Gauss-Legendre
    /// quadrature on [0, 1]; a diagnostic for orthonormality.
    pub fn gram_matrix(&self, order: usize) -> Result<Vec<Vec<f64>>> {
        if order < self.d + 1 {
            return Err(Error::Domain(format!(
                "gram_matrix needs at least d + 1 = {} nodes, got {order}",
                self.d + 1
            )));
        }
        let (nodes, weights) = gauss_legendre(order);
        let mut gram = vec![vec![0.0; self.d]; self.d];
        let mut psi = vec![0.0; self.d];
        for (x, w) in nodes.iter().zip(&weights) {
            let z = 0.5 * (x + 1.0);
            let w = 0.5 * w;
            self.eval_into(z, &mut psi)?;
            for k in 0..self.d {
                for l in 0..=k {
                    gram[k][l] += w * psi[k] * psi[l];
                }
            }
        }
        for k in 0..self.d {
            for l in 0..k {
                gram[l][k] = gram[k][l];
            }
        }
        Ok(gram)
    }
}

/// Classical Legendre polynomial P_k on [-1, 1] by the three-term
/// recurrence (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}.
fn legendre_p(k: usize, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 1..k {
        let p2 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p0) / (j + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// P'_k via (x^2 - 1) P'_k = k (x P_k - P_{k-1}); endpoint limits
/// P'_k(+-1) = (+-1)^{k-1} k(k+1)/2.
fn legendre_p_deriv(k: usize, x: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let denom = x * x - 1.0;
    if denom.abs() < 1e-12 {
        let sign = if x > 0.0 || k % 2 == 1 { 1.0 } else { -1.0 };
        return sign * (k * (k + 1)) as f64 / 2.0;
    }
    k as f64 * (x * legendre_p(k, x) - legendre_p(k - 1, x)) / denom
}

/// P''_k from the Legendre equation (1 - x^2) P'' = 2x P' - k(k+1) P;
/// endpoint limits P''_k(+-1) = (+-1)^k (k-1)k(k+1)(k+2)/8.
fn legendre_p_deriv2(k: usize, x: f64) -> f64 {
    if k <= 1 {
        return 0.0;
    }
    let denom = 1.0 - x * x;
    if denom.abs() < 1e-12 {
        let sign = if x > 0.0 || k % 2 == 0 { 1.0 } else { -1.0 };
        return sign * ((k - 1) * k * (k + 1) * (k + 2)) as f64 / 8.0;
    }
    (2.0 * x * legendre_p_deriv(k, x) - (k * (k + 1)) as f64 * legendre_p(k, x)) / denom
}
