//! Monte Carlo size and power experiments.
//!
//! Each replicate owns the stream `root.derive(replicate_index)`, so
//! rejection counts are bit-identical at any parallelism width; threads
//! only split the replicate range.

use super::generators::{sample, GeneratorSpec, SampleData};
use crate::basis::{BasisKind, BasisSystem};
use crate::empirical::MultiSample;
use crate::error::{Error, Result};
use crate::multitest::{bf_test, ms_test};
use crate::numerics::{OptimConfig, RngStream};
use crate::unitest::{bgx_test, cvm_test, ks_test, smooth_test};

/// Which test a replicate runs, with its calibration parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum TestMethod {
    Smooth { kind: BasisKind, d: usize },
    Ks { permutations: usize },
    Cvm { permutations: usize },
    Bgx { kind: BasisKind, d: usize },
    Ms { kind: BasisKind, d: usize, bootstrap: usize, restarts: usize },
    Bf { directions: usize, permutations: usize },
}

impl TestMethod {
    pub fn label(&self) -> &'static str {
        match self {
            TestMethod::Smooth { .. } => "smooth",
            TestMethod::Ks { .. } => "ks",
            TestMethod::Cvm { .. } => "cvm",
            TestMethod::Bgx { .. } => "bgx",
            TestMethod::Ms { .. } => "ms",
            TestMethod::Bf { .. } => "bf",
        }
    }
}

/// One Monte Carlo experiment: a generator pair, sample sizes, a test, and
/// the replication plan.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub x_spec: GeneratorSpec,
    pub y_spec: GeneratorSpec,
    pub n: usize,
    pub m: usize,
    pub method: TestMethod,
    pub alpha: f64,
    pub replicates: usize,
    pub seed: u64,
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(Error::Domain("replicates must be >= 1".into()));
        }
        if self.n < 2 || self.m < 2 {
            return Err(Error::Domain("need n >= 2 and m >= 2".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Domain(format!(
                "alpha must be in (0,1), got {}",
                self.alpha
            )));
        }
        if self.x_spec.dim() != self.y_spec.dim() {
            return Err(Error::Input(format!(
                "generator dimensions differ: {} vs {}",
                self.x_spec.dim(),
                self.y_spec.dim()
            )));
        }
        self.x_spec.validate()?;
        self.y_spec.validate()
    }
}

/// Rejection frequency with its Monte Carlo standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub rejection_rate: f64,
    pub mc_standard_error: f64,
    pub replicates: usize,
    pub rejections: usize,
}

/// Run the experiment as configured (null or alternative).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let root = RngStream::new(cfg.seed, 0);
    let flags = run_replicates(cfg.replicates, cfg.jobs, |idx| {
        run_one(cfg, &root.derive(idx as u64))
    })?;
    let rejections = flags.iter().filter(|&&r| r).count();
    let rate = rejections as f64 / cfg.replicates as f64;
    Ok(ExperimentResult {
        rejection_rate: rate,
        mc_standard_error: (rate * (1.0 - rate) / cfg.replicates as f64).sqrt(),
        replicates: cfg.replicates,
        rejections,
    })
}

/// A size experiment requires the two generators to coincide.
pub fn size_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    if cfg.x_spec != cfg.y_spec {
        return Err(Error::Input(
            "size experiment requires identical generators for both samples".into(),
        ));
    }
    run_experiment(cfg)
}

/// One row of a power curve.
#[derive(Debug, Clone)]
pub struct PowerPoint {
    pub param: f64,
    pub result: ExperimentResult,
}

/// One experiment per grid value, the alternative re-parameterized each
/// time. The same seed is reused across grid points (common random
/// numbers), which tightens power comparisons along the curve.
pub fn power_curve(cfg: &ExperimentConfig, grid: &[f64]) -> Result<Vec<PowerPoint>> {
    if grid.is_empty() {
        return Err(Error::Input("power grid must not be empty".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &param in grid {
        let point_cfg = ExperimentConfig {
            y_spec: cfg.y_spec.with_param(param)?,
            ..cfg.clone()
        };
        points.push(PowerPoint {
            param,
            result: run_experiment(&point_cfg)?,
        });
    }
    Ok(points)
}

/// Generate one replicate's data and apply the configured test. The
/// replicate stream is split: child 0 draws X, child 1 draws Y, child 2
/// drives any test randomization (permutations, bootstrap, directions).
fn run_one(cfg: &ExperimentConfig, rep: &RngStream) -> Result<bool> {
    let mut xs = rep.derive(0);
    let mut ys = rep.derive(1);
    let ts = rep.derive(2);
    let x = sample(&cfg.x_spec, cfg.n, &mut xs)?;
    let y = sample(&cfg.y_spec, cfg.m, &mut ys)?;
    let report = match (&cfg.method, &x, &y) {
        (TestMethod::Smooth { kind, d }, SampleData::Uni(x), SampleData::Uni(y)) => {
            smooth_test(x, y, &BasisSystem::new(*kind, *d)?, cfg.alpha)?
        }
        (TestMethod::Ks { permutations }, SampleData::Uni(x), SampleData::Uni(y)) => {
            ks_test(x, y, cfg.alpha, *permutations, &ts)?
        }
        (TestMethod::Cvm { permutations }, SampleData::Uni(x), SampleData::Uni(y)) => {
            cvm_test(x, y, cfg.alpha, *permutations, &ts)?
        }
        (TestMethod::Bgx { kind, d }, SampleData::Uni(x), SampleData::Uni(y)) => {
            bgx_test(x, y, &BasisSystem::new(*kind, *d)?, cfg.alpha)?
        }
        (TestMethod::Ms { kind, d, bootstrap, restarts }, x, y) => {
            let cfg_opt = OptimConfig {
                restarts: *restarts,
                ..OptimConfig::default()
            };
            let (mx, my) = as_multi(x, y)?;
            ms_test(
                &mx,
                &my,
                &BasisSystem::new(*kind, *d)?,
                cfg.alpha,
                *bootstrap,
                &cfg_opt,
                &ts,
            )?
        }
        (TestMethod::Bf { directions, permutations }, x, y) => {
            let (mx, my) = as_multi(x, y)?;
            bf_test(&mx, &my, *directions, cfg.alpha, *permutations, &ts)?
        }
        (method, _, _) => {
            return Err(Error::Input(format!(
                "{} requires univariate generators",
                method.label()
            )))
        }
    };
    Ok(report.reject)
}

fn as_multi(x: &SampleData, y: &SampleData) -> Result<(MultiSample, MultiSample)> {
    let lift = |s: &SampleData| -> Result<MultiSample> {
        match s {
            SampleData::Multi(m) => Ok(m.clone()),
            SampleData::Uni(u) => {
                MultiSample::new(u.values().iter().map(|&v| vec![v]).collect())
            }
        }
    };
    Ok((lift(x)?, lift(y)?))
}

/// Evaluate `f` for indices 0..count on up to `jobs` threads, preserving
/// index order in the output. Work is split into contiguous chunks; since
/// every index derives its own stream, the outcome does not depend on the
/// split.
pub fn run_replicates<T, F>(count: usize, jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send + Clone + Default,
    F: Fn(usize) -> Result<T> + Sync,
{
    let jobs = jobs.max(1).min(count.max(1));
    let mut out: Vec<Result<T>> = vec![Ok(T::default()); count];
    let chunk = count.div_ceil(jobs);
    std::thread::scope(|scope| {
        for (w, slot) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (i, r) in slot.iter_mut().enumerate() {
                    *r = f(w * chunk + i);
                }
            });
        }
    });
    out.into_iter().collect()
}
