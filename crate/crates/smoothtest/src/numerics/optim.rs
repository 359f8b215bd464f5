//! Derivative-free simplex maximization (Nelder-Mead).
//!
//! The search objectives in this crate are piecewise constant (they depend
//! on data ranks), so the simplex method with a value-spread stopping rule
//! is a natural fit: once all vertices land on one plateau the spread is
//! zero and the search stops.

use crate::error::{Error, Result};

/// Search budget for the simplex optimizer and for the multi-start sphere
/// searches built on top of it.
#[derive(Debug, Clone)]
pub struct OptimConfig {
    /// Number of restart points for multi-start searches; >= 1.
    pub restarts: usize,
    /// Iteration cap for one simplex run.
    pub max_iterations: usize,
    /// Stop when the spread of vertex values falls below this.
    pub simplex_tolerance: f64,
    /// Offset (in radians, for angular parameterizations) used to build the
    /// initial simplex around the start point.
    pub initial_step: f64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        OptimConfig {
            restarts: 10,
            max_iterations: 200,
            simplex_tolerance: 1e-6,
            initial_step: 0.5,
        }
    }
}

impl OptimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::Domain("OptimConfig: restarts must be >= 1".into()));
        }
        if self.simplex_tolerance.is_nan() || self.simplex_tolerance <= 0.0 {
            return Err(Error::Domain(
                "OptimConfig: simplex_tolerance must be > 0".into(),
            ));
        }
        Ok(())
    }

    /// Budget used per bootstrap replicate: a replicate searches with at
    /// most 5 restarts while the main statistic keeps the full budget.
    pub fn bootstrap_budget(&self) -> OptimConfig {
        OptimConfig {
            restarts: self.restarts.clamp(1, 5),
            ..self.clone()
        }
    }
}

/// Maximize `objective` starting from `start`, returning the best point and
/// its value. Standard coefficients (reflection 1, expansion 2, contraction
/// 0.5, shrink 0.5); stops when the simplex value spread drops below
/// `cfg.simplex_tolerance` or after `cfg.max_iterations` iterations.
///
/// The returned value is never below `objective(start)`. Non-finite
/// objective values are reported as errors.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut objective: F,
    start: &[f64],
    cfg: &OptimConfig,
) -> Result<(Vec<f64>, f64)> {
    cfg.validate()?;
    let n = start.len();
    assert!(n >= 1, "nelder_mead needs at least one dimension");

    // minimize -objective with the textbook simplex moves
    let mut eval = |x: &[f64]| -> Result<f64> {
        let v = objective(x);
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("objective({x:?}) = {v}")));
        }
        Ok(-v)
    };

    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
    simplex.push((eval(start)?, start.to_vec()));
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += cfg.initial_step;
        simplex.push((eval(&v)?, v));
    }

    for _ in 0..cfg.max_iterations {
        simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let spread = simplex[n].0 - simplex[0].0;
        if spread < cfg.simplex_tolerance {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(_, v)| v[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].1.clone();
        let f_best = simplex[0].0;
        let f_second_worst = simplex[n - 1].0;
        let f_worst = simplex[n].0;

        let point = |coef: f64| -> Vec<f64> {
            (0..n)
                .map(|j| centroid[j] + coef * (centroid[j] - worst[j]))
                .collect()
        };

        let reflected = point(1.0);
        let f_reflected = eval(&reflected)?;

        if f_reflected < f_best {
            let expanded = point(2.0);
            let f_expanded = eval(&expanded)?;
            if f_expanded < f_reflected {
                simplex[n] = (f_expanded, expanded);
            } else {
                simplex[n] = (f_reflected, reflected);
            }
        } else if f_reflected < f_second_worst {
            simplex[n] = (f_reflected, reflected);
        } else {
            let contracted = if f_reflected < f_worst {
                point(0.5)
            } else {
                point(-0.5)
            };
            let f_contracted = eval(&contracted)?;
            if f_contracted < f_worst.min(f_reflected) {
                simplex[n] = (f_contracted, contracted);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].1.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (v, b) in entry.1.iter_mut().zip(&best) {
                        *v = b + 0.5 * (*v - b);
                    }
                    entry.0 = eval(&entry.1)?;
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let (f, x) = simplex.swap_remove(0);
    Ok((x, -f))
}
