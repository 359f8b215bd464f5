//! Data generators for the simulation studies: classical null families,
//! the nine alternative designs, smooth-alternative densities on [0, 1],
//! and the multivariate normal / t draws.

use crate::basis::{BasisKind, BasisSystem};
use crate::empirical::{MultiSample, UniSample};
use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, RngStream};
use std::f64::consts::PI;

/// Covariance structure for the multivariate families.
#[derive(Debug, Clone, PartialEq)]
pub enum CovSpec {
    Identity,
    /// AR(1): Sigma_{ij} = rho^{|i-j|}.
    Ar1(f64),
}

impl CovSpec {
    fn matrix(&self, p: usize) -> Vec<Vec<f64>> {
        let mut cov = vec![vec![0.0; p]; p];
        for i in 0..p {
            for j in 0..p {
                cov[i][j] = match self {
                    CovSpec::Identity => {
                        if i == j {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    CovSpec::Ar1(rho) => rho.powi((i as i32 - j as i32).abs()),
                };
            }
        }
        cov
    }
}

/// A sampling recipe for one of the study distributions.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Uniform { a: f64, b: f64 },
    Normal { mean: f64, sd: f64 },
    Lognormal { mu: f64, sigma: f64 },
    Gamma { shape: f64, scale: f64 },
    Logistic { location: f64, scale: f64 },
    Pareto { shape: f64, scale: f64, location: f64 },
    Stable { alpha: f64, beta: f64, scale: f64, location: f64 },
    StudentT { df: usize },
    /// Local bump on uniform(-1,1): g(x) = 1/2 + 2x(mu-|x|)/mu^2 I(|x|<mu).
    Example1 { mu: f64 },
    /// Global oscillation on uniform(-1,1): g(x) = {1 + sin(2 pi sigma x)}/2.
    Example2 { sigma: f64 },
    /// Lognormal with matching moments: g(x) = f(x){1 + a sin(2 pi log x)}.
    Example3 { a: f64 },
    /// High-frequency tilt on (0,1): g(x) = exp{c sin(5 pi x)}/Z(c).
    Example4 { c: f64 },
    /// Cosine bump on (0,1): g(x) = 1 + c cos(5 pi x); for c > 1 the
    /// clipped-and-renormalized variant max{0, g}/Z must be opted into.
    Example5 { c: f64, clip: bool },
    /// Exponential-family tilt of uniform(0,1) along an orthonormal basis.
    SmoothAlt { kind: BasisKind, theta: Vec<f64> },
    MvNormal { p: usize, cov: CovSpec },
    MvStudentT { p: usize, df: usize, cov: CovSpec },
    /// Trivariate version of Example 1 with the deterministic third
    /// coordinate 0.3 Y1 + 0.7 Y2; mu = 0 is the null member.
    Example6 { mu: f64 },
    /// Trivariate version of Example 4, same construction.
    Example7 { c: f64 },
    /// N(0, I_5) mixed by A = blockdiag([[sqrt(1-d), sqrt(d)], [sqrt(d),
    /// sqrt(1-d)]], I_3); delta = 0 is the null member.
    Example8 { delta: f64 },
    /// Same mixing applied to t_4(0, I_5).
    Example9 { delta: f64 },
}

/// A drawn dataset, univariate or multivariate.
#[derive(Debug, Clone)]
pub enum SampleData {
    Uni(UniSample),
    Multi(MultiSample),
}

impl SampleData {
    pub fn dim(&self) -> usize {
        match self {
            SampleData::Uni(_) => 1,
            SampleData::Multi(s) => s.dim(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            SampleData::Uni(s) => s.n(),
            SampleData::Multi(s) => s.n(),
        }
    }
}

impl GeneratorSpec {
    pub fn is_multivariate(&self) -> bool {
        matches!(
            self,
            GeneratorSpec::MvNormal { .. }
                | GeneratorSpec::MvStudentT { .. }
                | GeneratorSpec::Example6 { .. }
                | GeneratorSpec::Example7 { .. }
                | GeneratorSpec::Example8 { .. }
                | GeneratorSpec::Example9 { .. }
        )
    }

    pub fn dim(&self) -> usize {
        match self {
            GeneratorSpec::MvNormal { p, .. } | GeneratorSpec::MvStudentT { p, .. } => *p,
            GeneratorSpec::Example6 { .. } | GeneratorSpec::Example7 { .. } => 3,
            GeneratorSpec::Example8 { .. } | GeneratorSpec::Example9 { .. } => 5,
            _ => 1,
        }
    }

    /// Same family at a different sweep parameter; defined for the
    /// parameterized alternative designs used in power curves.
    pub fn with_param(&self, param: f64) -> Result<GeneratorSpec> {
        let spec = match self {
            GeneratorSpec::Example1 { .. } => GeneratorSpec::Example1 { mu: param },
            GeneratorSpec::Example2 { .. } => GeneratorSpec::Example2 { sigma: param },
            GeneratorSpec::Example3 { .. } => GeneratorSpec::Example3 { a: param },
            GeneratorSpec::Example4 { .. } => GeneratorSpec::Example4 { c: param },
            GeneratorSpec::Example5 { clip, .. } => GeneratorSpec::Example5 {
                c: param,
                clip: *clip,
            },
            GeneratorSpec::Example6 { .. } => GeneratorSpec::Example6 { mu: param },
            GeneratorSpec::Example7 { .. } => GeneratorSpec::Example7 { c: param },
            GeneratorSpec::Example8 { .. } => GeneratorSpec::Example8 { delta: param },
            GeneratorSpec::Example9 { .. } => GeneratorSpec::Example9 { delta: param },
            other => {
                return Err(Error::Domain(format!(
                    "{other:?} has no sweep parameter"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Check the parameters against each family's stated range.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        match self {
            GeneratorSpec::Uniform { a, b } if a >= b => bad(format!("uniform needs a < b, got [{a}, {b}]")),
            GeneratorSpec::Normal { sd, .. } if *sd <= 0.0 => bad("normal needs sd > 0".into()),
            GeneratorSpec::Lognormal { sigma, .. } if *sigma <= 0.0 => {
                bad("lognormal needs sigma > 0".into())
            }
            GeneratorSpec::Gamma { shape, scale } if *shape <= 0.0 || *scale <= 0.0 => {
                bad("gamma needs shape > 0 and scale > 0".into())
            }
            GeneratorSpec::Logistic { scale, .. } if *scale <= 0.0 => {
                bad("logistic needs scale > 0".into())
            }
            GeneratorSpec::Pareto { shape, scale, .. } if *shape <= 0.0 || *scale <= 0.0 => {
                bad("pareto needs shape > 0 and scale > 0".into())
            }
            GeneratorSpec::Stable { alpha, beta, scale, .. }
                if !(*alpha > 0.0 && *alpha <= 2.0) || beta.abs() > 1.0 || *scale <= 0.0 =>
            {
                bad("stable needs 0 < alpha <= 2, |beta| <= 1, scale > 0".into())
            }
            GeneratorSpec::Stable { alpha, beta, .. } if *alpha == 1.0 && *beta != 0.0 => {
                bad("stable with alpha = 1 is only supported for beta = 0".into())
            }
            GeneratorSpec::StudentT { df } if *df < 1 => bad("t needs df >= 1".into()),
            GeneratorSpec::Example1 { mu } if !(0.0..=1.0).contains(mu) => {
                bad(format!("example1 needs mu in [0, 1], got {mu}"))
            }
            GeneratorSpec::Example2 { sigma } if !(0.5..=5.0).contains(sigma) => {
                bad(format!("example2 needs sigma in [0.5, 5], got {sigma}"))
            }
            GeneratorSpec::Example3 { a } if a.abs() > 1.0 => {
                bad(format!("example3 needs a in [-1, 1], got {a}"))
            }
            GeneratorSpec::Example4 { c } if !(0.0..=2.0).contains(c) => {
                bad(format!("example4 needs c in [0, 2], got {c}"))
            }
            GeneratorSpec::Example5 { c, clip } => {
                if !(0.0..=2.0).contains(c) {
                    return bad(format!("example5 needs c in [0, 2], got {c}"));
                }
                if *c > 1.0 && !clip {
                    return bad(format!(
                        "example5 with c = {c} > 1 is not a density; enable the clipped variant"
                    ));
                }
                Ok(())
            }
            GeneratorSpec::SmoothAlt { theta, .. } => {
                if theta.is_empty() || theta.iter().any(|t| !t.is_finite()) {
                    return bad("smoothalt needs a nonempty, finite theta vector".into());
                }
                Ok(())
            }
            GeneratorSpec::MvNormal { p, cov } | GeneratorSpec::MvStudentT { p, cov, .. } => {
                if *p < 1 {
                    return bad("dimension must be >= 1".into());
                }
                if let CovSpec::Ar1(rho) = cov {
                    if rho.abs() >= 1.0 {
                        return bad("ar1 needs |rho| < 1".into());
                    }
                }
                if let GeneratorSpec::MvStudentT { df, .. } = self {
                    if *df < 1 {
                        return bad("t needs df >= 1".into());
                    }
                }
                Ok(())
            }
            GeneratorSpec::Example6 { mu } if !(0.0..=1.0).contains(mu) => {
                bad(format!("example6 needs mu in [0, 1], got {mu}"))
            }
            GeneratorSpec::Example7 { c } if !(0.0..=2.0).contains(c) => {
                bad(format!("example7 needs c in [0, 2], got {c}"))
            }
            GeneratorSpec::Example8 { delta } | GeneratorSpec::Example9 { delta }
                if !(0.0..=0.5).contains(delta) =>
            {
                bad(format!("mixing delta must lie in [0, 0.5], got {delta}"))
            }
            _ => Ok(()),
        }
    }
}

/// Draw `n` i.i.d. observations from `spec`.
pub fn sample(spec: &GeneratorSpec, n: usize, stream: &mut RngStream) -> Result<SampleData> {
    spec.validate()?;
    if spec.is_multivariate() {
        let rows = sample_rows(spec, n, stream)?;
        Ok(SampleData::Multi(MultiSample::new(rows)?))
    } else {
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(sample_scalar(spec, stream)?);
        }
        Ok(SampleData::Uni(UniSample::new(values)?))
    }
}

fn sample_scalar(spec: &GeneratorSpec, s: &mut RngStream) -> Result<f64> {
    Ok(match spec {
        GeneratorSpec::Uniform { a, b } => a + (b - a) * s.uniform(),
        GeneratorSpec::Normal { mean, sd } => mean + sd * s.gaussian(),
        GeneratorSpec::Lognormal { mu, sigma } => (mu + sigma * s.gaussian()).exp(),
        GeneratorSpec::Gamma { shape, scale } => gamma_sample(*shape, *scale, s),
        GeneratorSpec::Logistic { location, scale } => {
            let u = positive_uniform(s);
            location + scale * (u / (1.0 - u)).ln()
        }
        GeneratorSpec::Pareto {
            shape,
            scale,
            location,
        } => location + scale * ((1.0 - s.uniform()).powf(-1.0 / shape) - 1.0),
        GeneratorSpec::Stable {
            alpha,
            beta,
            scale,
            location,
        } => location + scale * stable_standard(*alpha, *beta, s),
        GeneratorSpec::StudentT { df } => student_t_sample(*df, s),
        GeneratorSpec::Example1 { mu } => {
            if *mu == 0.0 {
                2.0 * s.uniform() - 1.0
            } else {
                // density <= 1 on (-1, 1), analytic sup attained at mu/2
                rejection_on_interval(s, -1.0, 1.0, 1.0, |x| example1_density(*mu, x))?
            }
        }
        GeneratorSpec::Example2 { sigma } => {
            rejection_on_interval(s, -1.0, 1.0, 1.0, |x| 0.5 * (1.0 + (2.0 * PI * sigma * x).sin()))?
        }
        GeneratorSpec::Example3 { a } => loop {
            // accept W ~ N(0,1) with probability {1 + a sin(2 pi W)}/(1+|a|),
            // return exp(W)
            let w = s.gaussian();
            if s.uniform() * (1.0 + a.abs()) <= 1.0 + a * (2.0 * PI * w).sin() {
                break w.exp();
            }
        },
        GeneratorSpec::Example4 { c } => {
            // unnormalized density exp{c sin(5 pi x)} <= e^c
            rejection_on_interval(s, 0.0, 1.0, c.exp(), |x| (c * (5.0 * PI * x).sin()).exp())?
        }
        GeneratorSpec::Example5 { c, .. } => {
            // unnormalized (possibly clipped) density <= 1 + c
            rejection_on_interval(s, 0.0, 1.0, 1.0 + c, |x| {
                (1.0 + c * (5.0 * PI * x).cos()).max(0.0)
            })?
        }
        GeneratorSpec::SmoothAlt { kind, theta } => {
            let basis = BasisSystem::new(*kind, theta.len())?;
            let dens = |z: f64| smooth_alt_unnormalized(&basis, theta, z);
            // envelope from a 10^4-point grid with a 5% safety margin
            let mut sup = 0.0_f64;
            for i in 0..=10_000 {
                sup = sup.max(dens(i as f64 / 10_000.0));
            }
            rejection_on_interval(s, 0.0, 1.0, 1.05 * sup, dens)?
        }
        other => {
            return Err(Error::Domain(format!(
                "{other:?} is not a univariate generator"
            )))
        }
    })
}

fn sample_rows(spec: &GeneratorSpec, n: usize, s: &mut RngStream) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::with_capacity(n);
    match spec {
        GeneratorSpec::MvNormal { p, cov } => {
            let chol = cholesky(&cov.matrix(*p))?;
            for _ in 0..n {
                let z: Vec<f64> = (0..*p).map(|_| s.gaussian()).collect();
                rows.push(matvec_lower(&chol, &z));
            }
        }
        GeneratorSpec::MvStudentT { p, df, cov } => {
            let chol = cholesky(&cov.matrix(*p))?;
            for _ in 0..n {
                let z: Vec<f64> = (0..*p).map(|_| s.gaussian()).collect();
                let w = chi_square_sample(*df, s);
                let f = (w / *df as f64).sqrt();
                rows.push(matvec_lower(&chol, &z).iter().map(|v| v / f).collect());
            }
        }
        GeneratorSpec::Example6 { mu } => {
            let comp = GeneratorSpec::Example1 { mu: *mu };
            for _ in 0..n {
                let y1 = sample_scalar(&comp, s)?;
                let y2 = sample_scalar(&comp, s)?;
                rows.push(vec![y1, y2, 0.3 * y1 + 0.7 * y2]);
            }
        }
        GeneratorSpec::Example7 { c } => {
            let comp = GeneratorSpec::Example4 { c: *c };
            for _ in 0..n {
                let y1 = sample_scalar(&comp, s)?;
                let y2 = sample_scalar(&comp, s)?;
                rows.push(vec![y1, y2, 0.3 * y1 + 0.7 * y2]);
            }
        }
        GeneratorSpec::Example8 { delta } => {
            for _ in 0..n {
                let z: Vec<f64> = (0..5).map(|_| s.gaussian()).collect();
                rows.push(mix_first_two(&z, *delta));
            }
        }
        GeneratorSpec::Example9 { delta } => {
            for _ in 0..n {
                let z: Vec<f64> = (0..5).map(|_| s.gaussian()).collect();
                let w = chi_square_sample(4, s);
                let f = (w / 4.0).sqrt();
                let t: Vec<f64> = z.iter().map(|v| v / f).collect();
                rows.push(mix_first_two(&t, *delta));
            }
        }
        other => {
            return Err(Error::Domain(format!(
                "{other:?} is not a multivariate generator"
            )))
        }
    }
    Ok(rows)
}

/// A = blockdiag(A0, I_3) with A0 = [[sqrt(1-d), sqrt(d)], [sqrt(d),
/// sqrt(1-d)]] applied to a 5-vector.
fn mix_first_two(z: &[f64], delta: f64) -> Vec<f64> {
    let a = (1.0 - delta).sqrt();
    let b = delta.sqrt();
    vec![
        a * z[0] + b * z[1],
        b * z[0] + a * z[1],
        z[2],
        z[3],
        z[4],
    ]
}

fn example1_density(mu: f64, x: f64) -> f64 {
    if x.abs() < mu {
        0.5 + 2.0 * x * (mu - x.abs()) / (mu * mu)
    } else {
        0.5
    }
}

fn smooth_alt_unnormalized(basis: &BasisSystem, theta: &[f64], z: f64) -> f64 {
    let mut expo = 0.0;
    for (k, t) in theta.iter().enumerate() {
        expo += t * basis.eval(k + 1, z).expect("z in [0,1], k <= d");
    }
    expo.exp()
}

/// Rejection sampling from a uniform proposal on [lo, hi] with envelope
/// `sup` over the (possibly unnormalized) density. A drawn density value
/// above the envelope aborts with a diagnostic rather than silently
/// producing a biased sample.
fn rejection_on_interval<F: Fn(f64) -> f64>(
    s: &mut RngStream,
    lo: f64,
    hi: f64,
    sup: f64,
    density: F,
) -> Result<f64> {
    loop {
        let x = lo + (hi - lo) * s.uniform();
        let d = density(x);
        if d > sup {
            return Err(Error::Domain(format!(
                "envelope failure: density {d} exceeds bound {sup} at x = {x}"
            )));
        }
        if s.uniform() * sup <= d {
            return Ok(x);
        }
    }
}

fn positive_uniform(s: &mut RngStream) -> f64 {
    loop {
        let u = s.uniform();
        if u > 0.0 {
            return u;
        }
    }
}

/// Marsaglia-Tsang gamma sampler (squeeze-free variant); shapes below 1 are
/// boosted through gamma(shape + 1).
fn gamma_sample(shape: f64, scale: f64, s: &mut RngStream) -> f64 {
    if shape < 1.0 {
        let g = gamma_sample(shape + 1.0, 1.0, s);
        let u = positive_uniform(s);
        return scale * g * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = s.gaussian();
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v3 = v * v * v;
        let u = positive_uniform(s);
        if u.ln() < 0.5 * x * x + d - d * v3 + d * v3.ln() {
            return scale * d * v3;
        }
    }
}

fn exponential_sample(s: &mut RngStream) -> f64 {
    -positive_uniform(s).ln()
}

fn chi_square_sample(df: usize, s: &mut RngStream) -> f64 {
    (0..df).map(|_| s.gaussian().powi(2)).sum()
}

fn student_t_sample(df: usize, s: &mut RngStream) -> f64 {
    let g = s.gaussian();
    let w = chi_square_sample(df, s);
    g / (w / df as f64).sqrt()
}

/// Chambers-Mallows-Stuck construction of a standard stable variate.
fn stable_standard(alpha: f64, beta: f64, s: &mut RngStream) -> f64 {
    let v = PI * (s.uniform() - 0.5);
    let w = exponential_sample(s);
    if alpha == 1.0 {
        // supported only for beta = 0 (validated): standard Cauchy
        return v.tan();
    }
    let half_pi_alpha_tan = (PI * alpha / 2.0).tan();
    let b = (beta * half_pi_alpha_tan).atan() / alpha;
    let scale = (1.0 + beta * beta * half_pi_alpha_tan * half_pi_alpha_tan)
        .powf(1.0 / (2.0 * alpha));
    scale * (alpha * (v + b)).sin() / v.cos().powf(1.0 / alpha)
        * ((v - alpha * (v + b)).cos() / w).powf((1.0 - alpha) / alpha)
}

fn cholesky(cov: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let p = cov.len();
    let mut l = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..=i {
            let mut sum = cov[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::Domain(
                        "covariance matrix is not positive definite".into(),
                    ));
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Ok(l)
}

fn matvec_lower(l: &[Vec<f64>], z: &[f64]) -> Vec<f64> {
    (0..l.len())
        .map(|i| l[i][..=i].iter().zip(z).map(|(a, b)| a * b).sum())
        .collect()
}

/// Density of a univariate spec where a closed or numerically normalized
/// form exists. The Example 4 and clipped Example 5 normalizers (and the
/// smooth-alternative constant) are computed by adaptive quadrature.
pub fn density(spec: &GeneratorSpec, x: f64) -> Result<f64> {
    spec.validate()?;
    Ok(match spec {
        GeneratorSpec::Uniform { a, b } => {
            if x >= *a && x <= *b {
                1.0 / (b - a)
            } else {
                0.0
            }
        }
        GeneratorSpec::Normal { mean, sd } => {
            let z = (x - mean) / sd;
            (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
        }
        GeneratorSpec::Lognormal { mu, sigma } => {
            if x <= 0.0 {
                0.0
            } else {
                let z = (x.ln() - mu) / sigma;
                (-0.5 * z * z).exp() / (x * sigma * (2.0 * PI).sqrt())
            }
        }
        GeneratorSpec::Gamma { shape, scale } => {
            if x <= 0.0 {
                0.0
            } else {
                let a = *shape;
                ((a - 1.0) * x.ln() - x / scale - crate::numerics::ln_gamma(a)
                    - a * scale.ln())
                .exp()
            }
        }
        GeneratorSpec::Logistic { location, scale } => {
            let e = (-(x - location) / scale).exp();
            e / (scale * (1.0 + e) * (1.0 + e))
        }
        GeneratorSpec::Pareto {
            shape,
            scale,
            location,
        } => {
            if x <= *location {
                0.0
            } else {
                shape / scale * (scale / (x - location + scale)).powf(shape + 1.0)
            }
        }
        GeneratorSpec::StudentT { df } => {
            let v = *df as f64;
            let ln_norm = crate::numerics::ln_gamma((v + 1.0) / 2.0)
                - crate::numerics::ln_gamma(v / 2.0)
                - 0.5 * (v * PI).ln();
            (ln_norm - (v + 1.0) / 2.0 * (1.0 + x * x / v).ln()).exp()
        }
        GeneratorSpec::Example1 { mu } => {
            if !(-1.0..=1.0).contains(&x) {
                0.0
            } else if *mu == 0.0 {
                0.5
            } else {
                example1_density(*mu, x)
            }
        }
        GeneratorSpec::Example2 { sigma } => {
            if (-1.0..=1.0).contains(&x) {
                0.5 * (1.0 + (2.0 * PI * sigma * x).sin())
            } else {
                0.0
            }
        }
        GeneratorSpec::Example3 { a } => {
            if x <= 0.0 {
                0.0
            } else {
                let lx = x.ln();
                (2.0 * PI).sqrt().recip() / x
                    * (-0.5 * lx * lx).exp()
                    * (1.0 + a * (2.0 * PI * lx).sin())
            }
        }
        GeneratorSpec::Example4 { c } => {
            if (0.0..=1.0).contains(&x) {
                let z = adaptive_simpson(&|t: f64| (c * (5.0 * PI * t).sin()).exp(), 0.0, 1.0, 1e-10);
                (c * (5.0 * PI * x).sin()).exp() / z
            } else {
                0.0
            }
        }
        GeneratorSpec::Example5 { c, .. } => {
            if !(0.0..=1.0).contains(&x) {
                0.0
            } else if *c <= 1.0 {
                1.0 + c * (5.0 * PI * x).cos()
            } else {
                let clipped = |t: f64| (1.0 + c * (5.0 * PI * t).cos()).max(0.0);
                let z = adaptive_simpson(&clipped, 0.0, 1.0, 1e-10);
                clipped(x) / z
            }
        }
        GeneratorSpec::SmoothAlt { kind, theta } => {
            if !(0.0..=1.0).contains(&x) {
                0.0
            } else {
                let basis = BasisSystem::new(*kind, theta.len())?;
                let z = adaptive_simpson(
                    &|t: f64| smooth_alt_unnormalized(&basis, theta, t),
                    0.0,
                    1.0,
                    1e-10,
                );
                smooth_alt_unnormalized(&basis, theta, x) / z
            }
        }
        other => {
            return Err(Error::Domain(format!(
                "no density available for {other:?}"
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn draws(spec: &GeneratorSpec, n: usize, seed: u64) -> Vec<f64> {
        let mut s = RngStream::new(seed, 0);
        match sample(spec, n, &mut s).unwrap() {
            SampleData::Uni(u) => u.values().to_vec(),
            SampleData::Multi(_) => panic!("expected univariate"),
        }
    }

    /// KS distance between draws and a CDF tabulated by cumulative Simpson
    /// on a fine grid over [lo, hi].
    fn ks_against_density(values: &[f64], spec: &GeneratorSpec, lo: f64, hi: f64) -> f64 {
        let grid = 4000usize;
        let h = (hi - lo) / grid as f64;
        let mut cdf = vec![0.0; grid + 1];
        let mut acc = 0.0;
        for i in 0..grid {
            let a = lo + i as f64 * h;
            acc += adaptive_simpson(&|t: f64| density(spec, t).unwrap(), a, a + h, 1e-12);
            cdf[i + 1] = acc;
        }
        let total = cdf[grid];
        assert!((total - 1.0).abs() < 1e-4, "density mass {total}");
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len() as f64;
        let mut ks = 0.0_f64;
        for (i, c) in cdf.iter().enumerate() {
            let t = lo + i as f64 * h;
            let emp = sorted.partition_point(|&v| v <= t) as f64 / n;
            ks = ks.max((emp - c / total).abs());
        }
        ks
    }

    #[test]
    fn example1_zero_mu_is_uniform() {
        let vals = draws(&GeneratorSpec::Example1 { mu: 0.0 }, 50_000, 1);
        assert!(vals.iter().all(|v| (-1.0..1.0).contains(v)));
        let ks = ks_against_density(&vals, &GeneratorSpec::Uniform { a: -1.0, b: 1.0 }, -1.0, 1.0);
        assert!(ks < 0.01, "ks = {ks}");
    }

    #[test]
    fn smooth_alt_zero_theta_is_uniform() {
        let spec = GeneratorSpec::SmoothAlt {
            kind: BasisKind::Trigonometric,
            theta: vec![0.0, 0.0],
        };
        let vals = draws(&spec, 50_000, 2);
        let ks = ks_against_density(&vals, &GeneratorSpec::Uniform { a: 0.0, b: 1.0 }, 0.0, 1.0);
        assert!(ks < 0.01, "ks = {ks}");
    }

    #[test]
    fn example4_zero_c_is_uniform() {
        let vals = draws(&GeneratorSpec::Example4 { c: 0.0 }, 20_000, 3);
        let ks = ks_against_density(&vals, &GeneratorSpec::Uniform { a: 0.0, b: 1.0 }, 0.0, 1.0);
        assert!(ks < 0.012, "ks = {ks}");
    }

    #[test]
    fn rejection_samplers_match_their_densities() {
        let cases: Vec<(GeneratorSpec, f64, f64)> = vec![
            (GeneratorSpec::Example1 { mu: 0.6 }, -1.0, 1.0),
            (GeneratorSpec::Example2 { sigma: 2.0 }, -1.0, 1.0),
            (GeneratorSpec::Example4 { c: 1.0 }, 0.0, 1.0),
            (GeneratorSpec::Example5 { c: 0.8, clip: false }, 0.0, 1.0),
            (
                GeneratorSpec::SmoothAlt {
                    kind: BasisKind::Trigonometric,
                    theta: vec![0.8, 0.0, 0.3],
                },
                0.0,
                1.0,
            ),
        ];
        for (spec, lo, hi) in cases {
            let vals = draws(&spec, 100_000, 7);
            let ks = ks_against_density(&vals, &spec, lo, hi);
            assert!(ks < 0.01, "{spec:?}: ks = {ks}");
        }
    }

    #[test]
    fn example3_sampler_matches_density_on_log_scale() {
        // KS is invariant under the log transform; compare W = log Y to the
        // tilted normal density
        let spec = GeneratorSpec::Example3 { a: 0.5 };
        let vals: Vec<f64> = draws(&spec, 100_000, 8).iter().map(|v| v.ln()).collect();
        // density of W: phi(w){1 + a sin(2 pi w)}
        let mut sorted = vals.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let grid = 3000;
        let (lo, hi) = (-5.0, 5.0);
        let h = (hi - lo) / grid as f64;
        let dens = |w: f64| {
            (-0.5 * w * w).exp() / (2.0 * PI).sqrt() * (1.0 + 0.5 * (2.0 * PI * w).sin())
        };
        let mut acc = 0.0;
        let mut ks = 0.0_f64;
        for i in 0..=grid {
            let t = lo + i as f64 * h;
            if i > 0 {
                acc += adaptive_simpson(&dens, t - h, t, 1e-12);
            }
            let emp = sorted.partition_point(|&v| v <= t) as f64 / sorted.len() as f64;
            ks = ks.max((emp - acc).abs());
        }
        assert!(ks < 0.01, "ks = {ks}");
    }

    #[test]
    fn densities_integrate_to_one() {
        // breakpoints keep the adaptive rule from stepping over narrow
        // peaks inside wide truncation windows
        let cases: Vec<(GeneratorSpec, Vec<f64>)> = vec![
            (GeneratorSpec::Example1 { mu: 0.5 }, vec![-1.0, 1.0]),
            (GeneratorSpec::Example2 { sigma: 3.0 }, vec![-1.0, 1.0]),
            (GeneratorSpec::Example4 { c: 1.0 }, vec![0.0, 1.0]),
            (GeneratorSpec::Example4 { c: 2.0 }, vec![0.0, 1.0]),
            (GeneratorSpec::Example5 { c: 1.0, clip: false }, vec![0.0, 1.0]),
            (GeneratorSpec::Example5 { c: 1.6, clip: true }, vec![0.0, 1.0]),
            (
                GeneratorSpec::SmoothAlt {
                    kind: BasisKind::Legendre,
                    theta: vec![0.4, -0.2],
                },
                vec![0.0, 1.0],
            ),
            (GeneratorSpec::Normal { mean: 0.0, sd: 1.0 }, vec![-10.0, 0.0, 10.0]),
            (
                GeneratorSpec::Logistic { location: 0.0, scale: 1.0 },
                vec![-45.0, -5.0, 5.0, 45.0],
            ),
            (
                GeneratorSpec::StudentT { df: 7 },
                vec![-200.0, -10.0, 0.0, 10.0, 200.0],
            ),
            (
                GeneratorSpec::Gamma { shape: 2.0, scale: 2.0 },
                vec![0.0, 2.0, 8.0, 30.0, 120.0],
            ),
            (
                GeneratorSpec::Lognormal { mu: 0.0, sigma: 1.0 },
                vec![0.0, 0.5, 1.0, 2.0, 4.0, 16.0, 64.0, 210.0],
            ),
        ];
        for (spec, brk) in cases {
            let mass: f64 = brk
                .windows(2)
                .map(|w| adaptive_simpson(&|t: f64| density(&spec, t).unwrap(), w[0], w[1], 1e-10))
                .sum();
            assert!((mass - 1.0).abs() < 1e-6, "{spec:?}: mass = {mass}");
        }
    }

    #[test]
    fn example2_and_example5_density_values() {
        // sin(0) = 0 at the origin
        let d = density(&GeneratorSpec::Example2 { sigma: 3.3 }, 0.0).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        // Example 5 at c = 1, x = 0: cos(0) = 1 and the normalizer is 1
        let d = density(&GeneratorSpec::Example5 { c: 1.0, clip: false }, 0.0).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn example5_above_one_requires_clip() {
        let mut s = RngStream::new(5, 5);
        assert!(sample(&GeneratorSpec::Example5 { c: 1.5, clip: false }, 10, &mut s).is_err());
        assert!(sample(&GeneratorSpec::Example5 { c: 1.5, clip: true }, 10, &mut s).is_ok());
    }

    #[test]
    fn pareto_matches_closed_form_cdf() {
        let spec = GeneratorSpec::Pareto {
            shape: 0.5,
            scale: 1.0,
            location: 1.0,
        };
        let vals = draws(&spec, 100_000, 9);
        assert!(vals.iter().all(|&v| v >= 1.0));
        let mut sorted = vals;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len() as f64;
        let mut ks = 0.0_f64;
        for i in 0..400 {
            let t = 1.0 + i as f64 * 0.25;
            let cdf = 1.0 - (1.0 / (t - 1.0 + 1.0)).sqrt();
            let emp = sorted.partition_point(|&v| v <= t) as f64 / n;
            ks = ks.max((emp - cdf).abs());
        }
        assert!(ks < 0.01, "ks = {ks}");
    }

    #[test]
    fn stable_alpha_two_is_gaussian() {
        // at alpha = 2 the CMS construction reduces to N(0, 2)
        let spec = GeneratorSpec::Stable {
            alpha: 2.0,
            beta: 0.0,
            scale: 1.0,
            location: 0.0,
        };
        let vals = draws(&spec, 100_000, 10);
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
        assert!(mean.abs() < 0.02, "mean = {mean}");
        assert!((var - 2.0).abs() < 0.05, "var = {var}");
    }

    #[test]
    fn stable_symmetric_median_at_location() {
        let spec = GeneratorSpec::Stable {
            alpha: 1.5,
            beta: 0.0,
            scale: 1.0,
            location: 1.0,
        };
        let vals = draws(&spec, 100_000, 11);
        let below = vals.iter().filter(|&&v| v <= 1.0).count() as f64 / vals.len() as f64;
        assert!((below - 0.5).abs() < 0.01, "P(X <= loc) = {below}");
    }

    #[test]
    fn gamma_moments() {
        let vals = draws(&GeneratorSpec::Gamma { shape: 2.0, scale: 2.0 }, 100_000, 12);
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
        assert!((mean - 4.0).abs() < 0.05, "mean = {mean}"); // shape*scale
        assert!((var - 8.0).abs() < 0.4, "var = {var}"); // shape*scale^2
    }

    #[test]
    fn student_t_matches_density() {
        let vals = draws(&GeneratorSpec::StudentT { df: 7 }, 100_000, 13);
        let ks = ks_against_density(&vals, &GeneratorSpec::StudentT { df: 7 }, -30.0, 30.0);
        assert!(ks < 0.01, "ks = {ks}");
    }

    #[test]
    fn multivariate_shapes_and_mixing() {
        let mut s = RngStream::new(14, 0);
        let spec = GeneratorSpec::MvNormal {
            p: 3,
            cov: CovSpec::Ar1(0.5),
        };
        match sample(&spec, 200, &mut s).unwrap() {
            SampleData::Multi(m) => {
                assert_eq!(m.dim(), 3);
                assert_eq!(m.n(), 200);
            }
            _ => panic!("expected multivariate"),
        }
        // delta = 0 mixing is the identity: bit-identical to the raw draws
        let mut s1 = RngStream::new(15, 0);
        let mut s2 = RngStream::new(15, 0);
        let a = sample(&GeneratorSpec::Example8 { delta: 0.0 }, 50, &mut s1).unwrap();
        let b = sample(
            &GeneratorSpec::MvNormal {
                p: 5,
                cov: CovSpec::Identity,
            },
            50,
            &mut s2,
        )
        .unwrap();
        match (a, b) {
            (SampleData::Multi(a), SampleData::Multi(b)) => {
                for (ra, rb) in a.rows().iter().zip(b.rows()) {
                    assert_eq!(ra, rb);
                }
            }
            _ => panic!("expected multivariate"),
        }
    }

    #[test]
    fn ar1_covariance_is_reproduced() {
        let mut s = RngStream::new(16, 0);
        let spec = GeneratorSpec::MvNormal {
            p: 3,
            cov: CovSpec::Ar1(0.5),
        };
        let m = match sample(&spec, 60_000, &mut s).unwrap() {
            SampleData::Multi(m) => m,
            _ => unreachable!(),
        };
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for row in m.rows() {
                    acc += row[i] * row[j];
                }
                let got = acc / m.n() as f64;
                let want = 0.5_f64.powi((i as i32 - j as i32).abs());
                assert!((got - want).abs() < 0.03, "cov({i},{j}) = {got}");
            }
        }
    }

    #[test]
    fn parameter_ranges_are_enforced() {
        assert!(GeneratorSpec::Example1 { mu: 1.5 }.validate().is_err());
        assert!(GeneratorSpec::Example3 { a: -2.0 }.validate().is_err());
        assert!(GeneratorSpec::Example8 { delta: 0.7 }.validate().is_err());
        assert!(GeneratorSpec::Gamma { shape: -1.0, scale: 1.0 }.validate().is_err());
        assert!(GeneratorSpec::Example1 { mu: 0.5 }.validate().is_ok());
        let swept = GeneratorSpec::Example1 { mu: 0.0 }.with_param(0.8).unwrap();
        assert_eq!(swept, GeneratorSpec::Example1 { mu: 0.8 });
        assert!(GeneratorSpec::Normal { mean: 0.0, sd: 1.0 }.with_param(0.5).is_err());
    }
}
