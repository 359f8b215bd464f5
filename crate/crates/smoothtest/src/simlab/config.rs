//! The experiment-file grammar and CSV output.
//!
//! Configs are flat `key = value` lines with `#` comments:
//!
//! ```text
//! # Table-style size experiment
//! mode = size
//! test = smooth
//! basis = trig
//! d = 4
//! alpha = 0.05
//! n = 180
//! m = 150
//! replicates = 2000
//! seed = 42
//! null = gamma(2,2)
//! ```
//!
//! Power mode replaces `null` with the reference generator `x`, the
//! parameterized `alternative` family, and the sweep `grid`:
//!
//! ```text
//! mode = power
//! x = uniform(-1,1)
//! alternative = example1
//! grid = 0.2,0.6,1.0
//! ```
//!
//! Unknown keys are rejected. Results render as CSV with the header
//! `param,rate,se,R,seed` (size experiments report a single row with
//! param = 0).

use super::experiment::{power_curve, size_experiment, ExperimentConfig, PowerPoint, TestMethod};
use super::generators::{CovSpec, GeneratorSpec};
use crate::basis::BasisKind;
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    Size,
    Power,
}

/// A parsed experiment file with every default resolved.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub mode: SimMode,
    pub experiment: ExperimentConfig,
    /// Sweep values; empty in size mode.
    pub grid: Vec<f64>,
}

/// One output row.
#[derive(Debug, Clone)]
pub struct CsvRow {
    pub param: f64,
    pub rate: f64,
    pub se: f64,
    pub replicates: usize,
    pub seed: u64,
}

pub fn rows_to_csv(rows: &[CsvRow]) -> String {
    let mut out = String::from("param,rate,se,R,seed\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.param, r.rate, r.se, r.replicates, r.seed
        ));
    }
    out
}

impl SimConfig {
    /// Parse the `key = value` grammar, resolving defaults. Unknown keys
    /// and missing required keys are errors.
    pub fn parse(text: &str) -> Result<SimConfig> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Input(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim().to_string();
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Input(format!("duplicate key `{key}`")));
            }
        }

        const KNOWN: &[&str] = &[
            "mode",
            "test",
            "basis",
            "d",
            "alpha",
            "n",
            "m",
            "replicates",
            "seed",
            "perm",
            "bootstrap",
            "restarts",
            "directions",
            "null",
            "x",
            "alternative",
            "grid",
        ];
        for key in map.keys() {
            if !KNOWN.contains(&key.as_str()) {
                return Err(Error::Input(format!("unknown key `{key}`")));
            }
        }

        let get = |k: &str| -> Result<&String> {
            map.get(k)
                .ok_or_else(|| Error::Input(format!("missing required key `{k}`")))
        };
        let parse_usize = |k: &str, v: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| Error::Input(format!("key `{k}`: `{v}` is not a count")))
        };
        let parse_f64 = |k: &str, v: &str| -> Result<f64> {
            v.parse()
                .map_err(|_| Error::Input(format!("key `{k}`: `{v}` is not a number")))
        };

        let mode = match get("mode")?.as_str() {
            "size" => SimMode::Size,
            "power" => SimMode::Power,
            other => return Err(Error::Input(format!("mode must be size|power, got {other}"))),
        };

        let test = get("test")?.as_str().to_string();
        let basis: BasisKind = map
            .get("basis")
            .map(|s| s.parse())
            .transpose()?
            .unwrap_or(BasisKind::Trigonometric);
        let d = map
            .get("d")
            .map(|v| parse_usize("d", v))
            .transpose()?
            .unwrap_or(match test.as_str() {
                "bgx" | "ms" => 4,
                _ => 10,
            });
        let alpha = map
            .get("alpha")
            .map(|v| parse_f64("alpha", v))
            .transpose()?
            .unwrap_or(0.05);
        let perm = map
            .get("perm")
            .map(|v| parse_usize("perm", v))
            .transpose()?
            .unwrap_or(999);
        let bootstrap = map
            .get("bootstrap")
            .map(|v| parse_usize("bootstrap", v))
            .transpose()?
            .unwrap_or(500);
        let restarts = map
            .get("restarts")
            .map(|v| parse_usize("restarts", v))
            .transpose()?
            .unwrap_or(10);
        let directions = map
            .get("directions")
            .map(|v| parse_usize("directions", v))
            .transpose()?
            .unwrap_or(32);

        let method = match test.as_str() {
            "smooth" => TestMethod::Smooth { kind: basis, d },
            "ks" => TestMethod::Ks { permutations: perm },
            "cvm" => TestMethod::Cvm { permutations: perm },
            "bgx" => TestMethod::Bgx { kind: basis, d },
            "ms" => TestMethod::Ms {
                kind: basis,
                d,
                bootstrap,
                restarts,
            },
            "bf" => TestMethod::Bf {
                directions,
                permutations: perm,
            },
            other => {
                return Err(Error::Input(format!(
                    "test must be smooth|ks|cvm|bgx|ms|bf, got {other}"
                )))
            }
        };

        let n = parse_usize("n", get("n")?)?;
        let m = parse_usize("m", get("m")?)?;
        let replicates = parse_usize("replicates", get("replicates")?)?;
        let seed = map
            .get("seed")
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| Error::Input(format!("key `seed`: `{v}` is not an integer")))
            })
            .transpose()?
            .unwrap_or(0);

        let (x_spec, y_spec, grid) = match mode {
            SimMode::Size => {
                if map.contains_key("x") || map.contains_key("alternative") || map.contains_key("grid") {
                    return Err(Error::Input(
                        "size mode takes `null`, not `x`/`alternative`/`grid`".into(),
                    ));
                }
                let spec = parse_generator(get("null")?)?;
                (spec.clone(), spec, Vec::new())
            }
            SimMode::Power => {
                if map.contains_key("null") {
                    return Err(Error::Input("power mode takes `x`, not `null`".into()));
                }
                let x_spec = parse_generator(get("x")?)?;
                let family = parse_alternative_family(get("alternative")?)?;
                let grid: Vec<f64> = get("grid")?
                    .split(',')
                    .map(|tok| parse_f64("grid", tok.trim()))
                    .collect::<Result<_>>()?;
                if grid.is_empty() {
                    return Err(Error::Input("grid must list at least one value".into()));
                }
                // pin the family at the first grid value; the sweep
                // re-parameterizes per point
                let y_spec = family.with_param(grid[0])?;
                (x_spec, y_spec, grid)
            }
        };

        let cfg = SimConfig {
            mode,
            experiment: ExperimentConfig {
                x_spec,
                y_spec,
                n,
                m,
                method,
                alpha,
                replicates,
                seed,
                jobs: 1,
            },
            grid,
        };
        cfg.experiment.validate()?;
        Ok(cfg)
    }

    /// Canonical echo of the fully resolved configuration; parses back to
    /// an equivalent config, so reruns are reproducible from the manifest.
    pub fn resolved(&self) -> String {
        let e = &self.experiment;
        let mut out = String::new();
        out.push_str(&format!(
            "mode = {}\n",
            match self.mode {
                SimMode::Size => "size",
                SimMode::Power => "power",
            }
        ));
        out.push_str(&format!("test = {}\n", e.method.label()));
        match &e.method {
            TestMethod::Smooth { kind, d } | TestMethod::Bgx { kind, d } => {
                out.push_str(&format!("basis = {kind}\nd = {d}\n"));
            }
            TestMethod::Ks { permutations } | TestMethod::Cvm { permutations } => {
                out.push_str(&format!("perm = {permutations}\n"));
            }
            TestMethod::Ms {
                kind,
                d,
                bootstrap,
                restarts,
            } => {
                out.push_str(&format!(
                    "basis = {kind}\nd = {d}\nbootstrap = {bootstrap}\nrestarts = {restarts}\n"
                ));
            }
            TestMethod::Bf {
                directions,
                permutations,
            } => {
                out.push_str(&format!("directions = {directions}\nperm = {permutations}\n"));
            }
        }
        out.push_str(&format!("alpha = {}\n", e.alpha));
        out.push_str(&format!("n = {}\nm = {}\n", e.n, e.m));
        out.push_str(&format!("replicates = {}\n", e.replicates));
        out.push_str(&format!("seed = {}\n", e.seed));
        match self.mode {
            SimMode::Size => out.push_str(&format!("null = {}\n", e.x_spec)),
            SimMode::Power => {
                out.push_str(&format!("x = {}\n", e.x_spec));
                out.push_str(&format!("alternative = {}\n", family_name(&e.y_spec)));
                let grid: Vec<String> = self.grid.iter().map(|g| g.to_string()).collect();
                out.push_str(&format!("grid = {}\n", grid.join(",")));
            }
        }
        out
    }

    /// Run the experiment(s) with the given parallelism width.
    pub fn run(&self, jobs: usize) -> Result<Vec<CsvRow>> {
        let mut experiment = self.experiment.clone();
        experiment.jobs = jobs.max(1);
        let to_row = |param: f64, p: &super::experiment::ExperimentResult| CsvRow {
            param,
            rate: p.rejection_rate,
            se: p.mc_standard_error,
            replicates: p.replicates,
            seed: experiment.seed,
        };
        match self.mode {
            SimMode::Size => {
                let res = size_experiment(&experiment)?;
                Ok(vec![to_row(0.0, &res)])
            }
            SimMode::Power => {
                let points: Vec<PowerPoint> = power_curve(&experiment, &self.grid)?;
                Ok(points
                    .iter()
                    .map(|p| to_row(p.param, &p.result))
                    .collect())
            }
        }
    }
}

/// Accepted alternative families for power sweeps (bare name or a full
/// generator spec whose parameter the grid replaces).
fn parse_alternative_family(s: &str) -> Result<GeneratorSpec> {
    if s.contains('(') {
        return parse_generator(s);
    }
    match s {
        "example1" => Ok(GeneratorSpec::Example1 { mu: 0.0 }),
        "example2" => Ok(GeneratorSpec::Example2 { sigma: 0.5 }),
        "example3" => Ok(GeneratorSpec::Example3 { a: 0.0 }),
        "example4" => Ok(GeneratorSpec::Example4 { c: 0.0 }),
        "example5" => Ok(GeneratorSpec::Example5 { c: 0.0, clip: false }),
        "example5clip" => Ok(GeneratorSpec::Example5 { c: 0.0, clip: true }),
        "example6" => Ok(GeneratorSpec::Example6 { mu: 0.0 }),
        "example7" => Ok(GeneratorSpec::Example7 { c: 0.0 }),
        "example8" => Ok(GeneratorSpec::Example8 { delta: 0.0 }),
        "example9" => Ok(GeneratorSpec::Example9 { delta: 0.0 }),
        other => Err(Error::Input(format!("unknown alternative family `{other}`"))),
    }
}

/// Family name of a sweepable spec, for the manifest echo.
fn family_name(spec: &GeneratorSpec) -> String {
    match spec {
        GeneratorSpec::Example1 { .. } => "example1".into(),
        GeneratorSpec::Example2 { .. } => "example2".into(),
        GeneratorSpec::Example3 { .. } => "example3".into(),
        GeneratorSpec::Example4 { .. } => "example4".into(),
        GeneratorSpec::Example5 { clip: false, .. } => "example5".into(),
        GeneratorSpec::Example5 { clip: true, .. } => "example5clip".into(),
        GeneratorSpec::Example6 { .. } => "example6".into(),
        GeneratorSpec::Example7 { .. } => "example7".into(),
        GeneratorSpec::Example8 { .. } => "example8".into(),
        GeneratorSpec::Example9 { .. } => "example9".into(),
        other => other.to_string(),
    }
}

/// Parse a generator spec string: `name` or `name(arg1,arg2,...)`.
pub fn parse_generator(s: &str) -> Result<GeneratorSpec> {
    let s = s.trim();
    let (name, args): (&str, Vec<&str>) = match s.find('(') {
        Some(open) => {
            if !s.ends_with(')') {
                return Err(Error::Input(format!("malformed generator spec `{s}`")));
            }
            let inner = &s[open + 1..s.len() - 1];
            let args = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner.split(',').map(|a| a.trim()).collect()
            };
            (&s[..open], args)
        }
        None => (s, Vec::new()),
    };

    let num = |idx: usize| -> Result<f64> {
        args.get(idx)
            .ok_or_else(|| Error::Input(format!("generator `{name}` needs more arguments")))?
            .parse()
            .map_err(|_| Error::Input(format!("generator `{name}`: bad number `{}`", args[idx])))
    };
    let count = |idx: usize| -> Result<usize> {
        args.get(idx)
            .ok_or_else(|| Error::Input(format!("generator `{name}` needs more arguments")))?
            .parse()
            .map_err(|_| Error::Input(format!("generator `{name}`: bad count `{}`", args[idx])))
    };
    let expect_args = |k: usize| -> Result<()> {
        if args.len() != k {
            return Err(Error::Input(format!(
                "generator `{name}` takes {k} argument(s), got {}",
                args.len()
            )));
        }
        Ok(())
    };

    let spec = match name {
        "uniform" => {
            expect_args(2)?;
            GeneratorSpec::Uniform { a: num(0)?, b: num(1)? }
        }
        "normal" => {
            expect_args(2)?;
            GeneratorSpec::Normal { mean: num(0)?, sd: num(1)? }
        }
        "lognormal" => {
            expect_args(2)?;
            GeneratorSpec::Lognormal { mu: num(0)?, sigma: num(1)? }
        }
        "gamma" => {
            expect_args(2)?;
            GeneratorSpec::Gamma { shape: num(0)?, scale: num(1)? }
        }
        "logistic" => {
            expect_args(2)?;
            GeneratorSpec::Logistic { location: num(0)?, scale: num(1)? }
        }
        "pareto" => {
            expect_args(3)?;
            GeneratorSpec::Pareto { shape: num(0)?, scale: num(1)?, location: num(2)? }
        }
        "stable" => {
            expect_args(4)?;
            GeneratorSpec::Stable {
                alpha: num(0)?,
                beta: num(1)?,
                scale: num(2)?,
                location: num(3)?,
            }
        }
        "t" => {
            expect_args(1)?;
            GeneratorSpec::StudentT { df: count(0)? }
        }
        "example1" => {
            expect_args(1)?;
            GeneratorSpec::Example1 { mu: num(0)? }
        }
        "example2" => {
            expect_args(1)?;
            GeneratorSpec::Example2 { sigma: num(0)? }
        }
        "example3" => {
            expect_args(1)?;
            GeneratorSpec::Example3 { a: num(0)? }
        }
        "example4" => {
            expect_args(1)?;
            GeneratorSpec::Example4 { c: num(0)? }
        }
        "example5" => {
            let clip = args.last() == Some(&"clip");
            if args.len() != 1 + clip as usize {
                return Err(Error::Input(
                    "example5 takes (c) or (c,clip)".into(),
                ));
            }
            GeneratorSpec::Example5 { c: num(0)?, clip }
        }
        "smoothalt" => {
            if args.len() < 2 {
                return Err(Error::Input(
                    "smoothalt takes (basis,theta1,...,thetad)".into(),
                ));
            }
            let kind: BasisKind = args[0].parse()?;
            let theta: Vec<f64> = (1..args.len()).map(num).collect::<Result<_>>()?;
            GeneratorSpec::SmoothAlt { kind, theta }
        }
        "mvnormal" => {
            let p = count(0)?;
            let cov = parse_cov(&args[1..])?;
            GeneratorSpec::MvNormal { p, cov }
        }
        "mvt" => {
            let p = count(0)?;
            let df = count(1)?;
            let cov = parse_cov(&args[2..])?;
            GeneratorSpec::MvStudentT { p, df, cov }
        }
        "example6" => {
            expect_args(1)?;
            GeneratorSpec::Example6 { mu: num(0)? }
        }
        "example7" => {
            expect_args(1)?;
            GeneratorSpec::Example7 { c: num(0)? }
        }
        "example8" => {
            expect_args(1)?;
            GeneratorSpec::Example8 { delta: num(0)? }
        }
        "example9" => {
            expect_args(1)?;
            GeneratorSpec::Example9 { delta: num(0)? }
        }
        other => return Err(Error::Input(format!("unknown generator `{other}`"))),
    };
    spec.validate()?;
    Ok(spec)
}

fn parse_cov(args: &[&str]) -> Result<CovSpec> {
    match args {
        [] => Ok(CovSpec::Identity),
        ["identity"] => Ok(CovSpec::Identity),
        ["ar1", rho] => Ok(CovSpec::Ar1(rho.parse().map_err(|_| {
            Error::Input(format!("ar1: bad correlation `{rho}`"))
        })?)),
        other => Err(Error::Input(format!(
            "covariance must be `identity` or `ar1,rho`, got {other:?}"
        ))),
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Uniform { a, b } => write!(f, "uniform({a},{b})"),
            GeneratorSpec::Normal { mean, sd } => write!(f, "normal({mean},{sd})"),
            GeneratorSpec::Lognormal { mu, sigma } => write!(f, "lognormal({mu},{sigma})"),
            GeneratorSpec::Gamma { shape, scale } => write!(f, "gamma({shape},{scale})"),
            GeneratorSpec::Logistic { location, scale } => {
                write!(f, "logistic({location},{scale})")
            }
            GeneratorSpec::Pareto {
                shape,
                scale,
                location,
            } => write!(f, "pareto({shape},{scale},{location})"),
            GeneratorSpec::Stable {
                alpha,
                beta,
                scale,
                location,
            } => write!(f, "stable({alpha},{beta},{scale},{location})"),
            GeneratorSpec::StudentT { df } => write!(f, "t({df})"),
            GeneratorSpec::Example1 { mu } => write!(f, "example1({mu})"),
            GeneratorSpec::Example2 { sigma } => write!(f, "example2({sigma})"),
            GeneratorSpec::Example3 { a } => write!(f, "example3({a})"),
            GeneratorSpec::Example4 { c } => write!(f, "example4({c})"),
            GeneratorSpec::Example5 { c, clip: false } => write!(f, "example5({c})"),
            GeneratorSpec::Example5 { c, clip: true } => write!(f, "example5({c},clip)"),
            GeneratorSpec::SmoothAlt { kind, theta } => {
                let ts: Vec<String> = theta.iter().map(|t| t.to_string()).collect();
                write!(f, "smoothalt({kind},{})", ts.join(","))
            }
            GeneratorSpec::MvNormal { p, cov } => match cov {
                CovSpec::Identity => write!(f, "mvnormal({p})"),
                CovSpec::Ar1(rho) => write!(f, "mvnormal({p},ar1,{rho})"),
            },
            GeneratorSpec::MvStudentT { p, df, cov } => match cov {
                CovSpec::Identity => write!(f, "mvt({p},{df})"),
                CovSpec::Ar1(rho) => write!(f, "mvt({p},{df},ar1,{rho})"),
            },
            GeneratorSpec::Example6 { mu } => write!(f, "example6({mu})"),
            GeneratorSpec::Example7 { c } => write!(f, "example7({c})"),
            GeneratorSpec::Example8 { delta } => write!(f, "example8({delta})"),
            GeneratorSpec::Example9 { delta } => write!(f, "example9({delta})"),
        }
    }
}
