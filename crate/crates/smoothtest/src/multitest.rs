//! Multivariate two-sample smooth test by projection pursuit.
//!
//! Along each unit direction u the samples reduce to a univariate problem
//! through their projections; the directional statistic is
//!
//! ```text
//! Psi_u(d) = max_{k<=d} | (1/m) sum_j psi_k( F^u_n(u' Y_j) ) |,
//! ```
//!
//! and the test statistic is Psihat_max = sqrt(nm/(n+m)) sup_u Psi_u(d),
//! the supremum searched by multi-start Nelder-Mead over spherical angles
//! (the objective is piecewise constant in u, so every search phase also
//! serves as a certified lower bound). Critical values come from the
//! multiplier bootstrap: gaussian weights e_i on the X-sample scores
//! psi_k(F^u_n(u' X_i)), maximized over (u, k) the same way.
//!
//! The Baringhaus-Franz statistic (sphere average of the squared EDF
//! distance of the projections) is included as a baseline.

use crate::basis::BasisSystem;
use crate::empirical::{unit_from_angles, Direction, MultiSample, UniSample};
use crate::error::{Error, Result};
use crate::numerics::{nelder_mead, OptimConfig, RngStream};
use crate::unitest::{scale_factor, smooth_statistic, TestReport};

/// Outcome of one sphere search: the best direction found, its objective
/// value, and the per-phase values (axis sweep, grid sweep, then one entry
/// per Nelder-Mead restart).
#[derive(Debug, Clone)]
pub struct SphereSearchResult {
    pub best_direction: Direction,
    pub best_value: f64,
    pub restart_values: Vec<f64>,
    pub evaluations: usize,
}

/// Multiplier-bootstrap calibration: the replicate statistics (in replicate
/// order) and the upper-quantile critical value.
#[derive(Debug, Clone)]
pub struct BootstrapResult {
    pub critical_value: f64,
    pub replicate_values: Vec<f64>,
    pub replicates: usize,
    pub alpha: f64,
}

/// The unscaled directional statistic Psi_u(d); the caller applies the
/// sqrt(nm/(n+m)) factor.
pub fn directional_statistic(
    x: &MultiSample,
    y: &MultiSample,
    dir: &Direction,
    basis: &BasisSystem,
) -> Result<f64> {
    if x.dim() != y.dim() || dir.dim() != x.dim() {
        return Err(Error::Input(format!(
            "dimension mismatch: x has p = {}, y has p = {}, direction has p = {}",
            x.dim(),
            y.dim(),
            dir.dim()
        )));
    }
    let xp = x.project(dir)?;
    let yp = y.project(dir)?;
    let d = basis.d();
    let mut psi = vec![0.0; d];
    let mut acc = vec![0.0; d];
    Ok(unscaled_directional(
        xp.sorted(),
        yp.values(),
        basis,
        &mut psi,
        &mut acc,
    ))
}

/// Basis values at every attainable PIT value count/n, count = 0..=n; row
/// `count` holds (psi_1, ..., psi_d) at count/n.
fn pit_basis_table(basis: &BasisSystem, n: usize) -> Vec<f64> {
    let d = basis.d();
    let mut table = vec![0.0; (n + 1) * d];
    for t in 0..=n {
        let z = t as f64 / n as f64;
        basis
            .eval_into(z, &mut table[t * d..t * d + d])
            .expect("z in [0,1]");
    }
    table
}

/// Shared kernel: max_k |(1/m) sum_j psi_k(F^u_n(t_j))| for projected data,
/// with `xsorted` the sorted X projections and `yproj` the Y projections in
/// observation order.
fn unscaled_directional(
    xsorted: &[f64],
    yproj: &[f64],
    basis: &BasisSystem,
    psi: &mut [f64],
    acc: &mut [f64],
) -> f64 {
    acc.fill(0.0);
    let n = xsorted.len() as f64;
    for &t in yproj {
        let v = xsorted.partition_point(|&s| s <= t) as f64 / n;
        basis.eval_into(v, psi).expect("EDF values lie in [0,1]");
        for (a, p) in acc.iter_mut().zip(psi.iter()) {
            *a += p;
        }
    }
    let m = yproj.len() as f64;
    acc.iter().fold(0.0_f64, |best, &s| best.max((s / m).abs()))
}

/// Generic maximization over the unit sphere. `objective` maps a unit
/// vector to a value. Candidate phases: the 2p signed axes, a 32-point
/// angular grid when p = 2, then `cfg.restarts` Nelder-Mead runs over the
/// p-1 spherical angles (restart r seeds from `stream.derive(r)`, so
/// enlarging the restart budget never changes earlier starts). For p = 1
/// the sphere is {+1, -1} but only u = +1 is evaluated, matching the
/// univariate convention.
///
/// When `dense_cells` reports the objective has at most [`DENSE_GRID`]
/// plateau cells on the circle (p = 2 with small samples), the search is an
/// exhaustive sweep of DENSE_GRID equispaced angles instead: on such coarse
/// plateau structures the sweep dominates the multistart heuristic and is
/// fully deterministic.
const DENSE_GRID: usize = 3600;

fn sphere_maximize<F: FnMut(&[f64]) -> f64>(
    p: usize,
    mut objective: F,
    cfg: &OptimConfig,
    stream: &RngStream,
    dense_cells: usize,
) -> Result<SphereSearchResult> {
    cfg.validate()?;
    let mut evals = 0usize;
    if p == 1 {
        let dir = Direction::axis(1, 0, false)?;
        let value = objective(dir.unit());
        return Ok(SphereSearchResult {
            best_direction: dir,
            best_value: value,
            restart_values: vec![value],
            evaluations: 1,
        });
    }

    let mut best_value = f64::NEG_INFINITY;
    let mut best_dir: Option<Direction> = None;
    let mut restart_values = Vec::new();

    if p == 2 && dense_cells <= DENSE_GRID {
        for g in 0..DENSE_GRID {
            let angles = [2.0 * std::f64::consts::PI * g as f64 / DENSE_GRID as f64];
            let u = unit_from_angles(&angles);
            let v = objective(&u);
            evals += 1;
            if v > best_value {
                best_value = v;
                best_dir = Some(Direction::from_angles(&angles)?);
            }
        }
        restart_values.push(best_value);
        return Ok(SphereSearchResult {
            best_direction: best_dir.expect("grid evaluated"),
            best_value,
            restart_values,
            evaluations: evals,
        });
    }

    // axis sweep: certified lower bound at every signed coordinate axis
    let mut phase_best = f64::NEG_INFINITY;
    for k in 0..p {
        for negative in [false, true] {
            let dir = Direction::axis(p, k, negative)?;
            let v = objective(dir.unit());
            evals += 1;
            phase_best = phase_best.max(v);
            if v > best_value {
                best_value = v;
                best_dir = Some(dir);
            }
        }
    }
    restart_values.push(phase_best);

    // equispaced angular grid for p = 2
    let mut grid_best_angles: Option<Vec<f64>> = None;
    if p == 2 {
        let grid = 32usize;
        let mut phase_best = f64::NEG_INFINITY;
        for g in 0..grid {
            let angles = [2.0 * std::f64::consts::PI * g as f64 / grid as f64];
            let u = unit_from_angles(&angles);
            let v = objective(&u);
            evals += 1;
            if v > phase_best {
                phase_best = v;
                grid_best_angles = Some(angles.to_vec());
            }
            if v > best_value {
                best_value = v;
                best_dir = Some(Direction::from_angles(&angles)?);
            }
        }
        restart_values.push(phase_best);
    }

    // multi-start simplex over the angles
    for r in 0..cfg.restarts {
        let start: Vec<f64> = if r == 0 && grid_best_angles.is_some() {
            grid_best_angles.clone().unwrap()
        } else {
            let mut rs = stream.derive(r as u64);
            Direction::random(p, &mut rs)?.angles().to_vec()
        };
        let mut wrapped = |angles: &[f64]| {
            evals += 1;
            let u = unit_from_angles(angles);
            objective(&u)
        };
        let (angles, value) = nelder_mead(&mut wrapped, &start, cfg)?;
        restart_values.push(value);
        if value > best_value {
            best_value = value;
            best_dir = Some(Direction::from_angles(&angles)?);
        }
    }

    Ok(SphereSearchResult {
        best_direction: best_dir.expect("at least one candidate evaluated"),
        best_value,
        restart_values,
        evaluations: evals,
    })
}

/// The scaled projection-pursuit statistic
/// Psihat_max = sqrt(nm/(n+m)) sup_u Psi_u(d), with the search result for
/// diagnostics. Deterministic given `(cfg, stream)`.
pub fn max_statistic(
    x: &MultiSample,
    y: &MultiSample,
    basis: &BasisSystem,
    cfg: &OptimConfig,
    stream: &RngStream,
) -> Result<(f64, SphereSearchResult)> {
    if x.dim() != y.dim() {
        return Err(Error::Input(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    let p = x.dim();
    let n = x.n();
    let scale = scale_factor(x.n(), y.n());
    let d = basis.d();
    // The PIT values only ever hit the n+1 rationals count/n, so the basis
    // is tabulated once per search; entries are the same floats eval_into
    // would produce, keeping the objective bit-identical to
    // directional_statistic at any direction.
    let table = pit_basis_table(basis, n);
    let mut xproj = Vec::with_capacity(n);
    let mut yproj = Vec::with_capacity(y.n());
    let mut acc = vec![0.0; d];
    let objective = |u: &[f64]| {
        x.project_into(u, &mut xproj);
        xproj.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        y.project_into(u, &mut yproj);
        acc.fill(0.0);
        for &t in &yproj {
            let count = xproj.partition_point(|&s| s <= t);
            let row = &table[count * d..count * d + d];
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        let m = yproj.len() as f64;
        scale * acc.iter().fold(0.0_f64, |best, &s| best.max((s / m).abs()))
    };
    // the PIT counts change at the 2nm angles where an X and a Y projection
    // cross, so that is the plateau-cell count on the circle
    let result = sphere_maximize(p, objective, cfg, stream, 2 * x.n() * y.n())?;
    Ok((result.best_value, result))
}

/// The multiplier-bootstrap statistic
/// sup_{u,k} | n^{-1/2} sum_i e_i psi_k(F^u_n(u' X_i)) | for one gaussian
/// weight vector `e`. Each projected point ranks itself, so the transformed
/// values are always >= 1/n.
pub fn multiplier_statistic(
    x: &MultiSample,
    e: &[f64],
    basis: &BasisSystem,
    cfg: &OptimConfig,
    stream: &RngStream,
) -> Result<f64> {
    if e.len() != x.n() {
        return Err(Error::Input(format!(
            "multiplier vector has length {} but sample has n = {}",
            e.len(),
            x.n()
        )));
    }
    let p = x.dim();
    let n = x.n();
    let d = basis.d();
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    let table = pit_basis_table(basis, n);
    let mut xproj = Vec::with_capacity(n);
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut rank_count = vec![0usize; n];
    let mut acc = vec![0.0; d];
    let objective = |u: &[f64]| {
        x.project_into(u, &mut xproj);
        // counts #{x <= x_i} via one sorted pass (ties share a count)
        order.clear();
        order.extend(0..n);
        order.sort_unstable_by(|&a, &b| xproj[a].partial_cmp(&xproj[b]).unwrap());
        let mut pos = 0;
        while pos < n {
            let mut end = pos;
            while end + 1 < n && xproj[order[end + 1]] == xproj[order[pos]] {
                end += 1;
            }
            for &i in &order[pos..=end] {
                rank_count[i] = end + 1;
            }
            pos = end + 1;
        }
        acc.fill(0.0);
        for (&count, &w) in rank_count.iter().zip(e.iter()) {
            let row = &table[count * d..count * d + d];
            for (a, v) in acc.iter_mut().zip(row) {
                *a += w * v;
            }
        }
        acc.iter().fold(0.0_f64, |best, &s| best.max(s.abs())) * inv_sqrt_n
    };
    // ranks permute at the n(n-1) angles where two X projections cross
    let result = sphere_maximize(p, objective, cfg, stream, n * n.saturating_sub(1))?;
    Ok(result.best_value)
}

/// Conditional critical value: B multiplier statistics from independent
/// gaussian weight vectors (replicate b draws from `stream.derive(b)`), the
/// critical value being the ceil((1-alpha) B)-th order statistic. Each
/// replicate searches with the reduced restart budget.
pub fn bootstrap_critical_value(
    x: &MultiSample,
    basis: &BasisSystem,
    alpha: f64,
    replicates: usize,
    cfg: &OptimConfig,
    stream: &RngStream,
) -> Result<BootstrapResult> {
    if replicates < 20 {
        return Err(Error::Domain(format!(
            "bootstrap needs B >= 20 replicates, got {replicates}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must be in (0,1), got {alpha}")));
    }
    let rep_cfg = cfg.bootstrap_budget();
    let mut values = Vec::with_capacity(replicates);
    for b in 0..replicates {
        let mut rep_stream = stream.derive(b as u64);
        let e = rep_stream.gaussian_vec(x.n());
        let search = rep_stream.derive(0);
        values.push(multiplier_statistic(x, &e, basis, &rep_cfg, &search)?);
    }
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let idx = ((1.0 - alpha) * replicates as f64).ceil() as usize;
    let idx = idx.clamp(1, replicates);
    Ok(BootstrapResult {
        critical_value: sorted[idx - 1],
        replicate_values: values,
        replicates,
        alpha,
    })
}

/// The multivariate smooth test: reject iff Psihat_max(d) >= the
/// multiplier-bootstrap critical value. For p = 1 the statistic and the
/// bootstrap both collapse to the univariate smooth machinery (the sample
/// providing the EDF is the larger one, as in the univariate module).
pub fn ms_test(
    x: &MultiSample,
    y: &MultiSample,
    basis: &BasisSystem,
    alpha: f64,
    bootstrap_replicates: usize,
    cfg: &OptimConfig,
    stream: &RngStream,
) -> Result<TestReport> {
    if x.dim() != y.dim() {
        return Err(Error::Input(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    let p = x.dim();

    let (statistic, best_direction, provider) = if p == 1 {
        let x1 = UniSample::new(x.rows().iter().map(|r| r[0]).collect())?;
        let y1 = UniSample::new(y.rows().iter().map(|r| r[0]).collect())?;
        let stat = smooth_statistic(&x1, &y1, basis);
        let provider = if y1.n() > x1.n() { y } else { x };
        (stat, Direction::axis(1, 0, false)?, provider)
    } else {
        let (stat, search) = max_statistic(x, y, basis, cfg, &stream.derive(0))?;
        (stat, search.best_direction, x)
    };

    let boot = bootstrap_critical_value(
        provider,
        basis,
        alpha,
        bootstrap_replicates,
        cfg,
        &stream.derive(1),
    )?;

    let mut report = TestReport {
        method: "ms".to_string(),
        statistic,
        critical_value: Some(boot.critical_value),
        p_value: None,
        reject: statistic >= boot.critical_value,
        alpha,
        d: Some(basis.d()),
        basis: Some(basis.kind()),
        n: x.n(),
        m: y.n(),
        seed: Some(stream.seed()),
        swapped: p == 1 && y.n() > x.n(),
        warnings: Vec::new(),
        best_direction: Some(best_direction.unit().to_vec()),
    };
    if p == 1 {
        report
            .warnings
            .push("p = 1 input: delegated to the univariate smooth statistic".into());
    }
    if basis.d() > x.n().min(y.n()) {
        report.warnings.push(format!(
            "d = {} exceeds min(n, m) = {}",
            basis.d(),
            x.n().min(y.n())
        ));
    }
    Ok(report)
}

/// Exact inner integral of the squared EDF distance of the projections:
/// int (F^u_n(t) - G^u_m(t))^2 dt, a finite sum over the pooled projected
/// order statistics (the integrand is piecewise constant and vanishes
/// outside the pooled range).
fn squared_edf_line_integral(xp: &UniSample, yp: &UniSample) -> f64 {
    let xs = xp.sorted();
    let ys = yp.sorted();
    let n = xs.len();
    let m = ys.len();
    let (mut i, mut j) = (0usize, 0usize);
    let mut total = 0.0_f64;
    let mut prev: Option<f64> = None;
    let mut diff = 0.0_f64;
    while i < n || j < m {
        let t = match (xs.get(i), ys.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        if let Some(prev_t) = prev {
            total += diff * diff * (t - prev_t);
        }
        while i < n && xs[i] == t {
            i += 1;
        }
        while j < m && ys[j] == t {
            j += 1;
        }
        diff = i as f64 / n as f64 - j as f64 / m as f64;
        prev = Some(t);
    }
    total
}

/// Baringhaus-Franz statistic with a fixed direction set:
/// nm/(n+m) times the average over directions of the exact line integral.
pub fn bf_statistic_with_directions(
    x: &MultiSample,
    y: &MultiSample,
    directions: &[Direction],
) -> Result<f64> {
    if directions.is_empty() {
        return Err(Error::Domain("need at least one direction".into()));
    }
    let mut sum = 0.0;
    for dir in directions {
        let xp = x.project(dir)?;
        let yp = y.project(dir)?;
        sum += squared_edf_line_integral(&xp, &yp);
    }
    Ok((x.n() * y.n()) as f64 / (x.n() + y.n()) as f64 * sum / directions.len() as f64)
}

/// Baringhaus-Franz statistic: Monte Carlo sphere average over
/// `m_directions` uniform directions drawn from `stream`.
pub fn bf_statistic(
    x: &MultiSample,
    y: &MultiSample,
    m_directions: usize,
    stream: &RngStream,
) -> Result<f64> {
    let dirs = draw_directions(x.dim(), m_directions, stream)?;
    bf_statistic_with_directions(x, y, &dirs)
}

fn draw_directions(p: usize, count: usize, stream: &RngStream) -> Result<Vec<Direction>> {
    if count < 1 {
        return Err(Error::Domain("need at least one direction".into()));
    }
    (0..count)
        .map(|g| {
            let mut s = stream.derive(g as u64);
            Direction::random(p, &mut s)
        })
        .collect()
}

/// Permutation-calibrated Baringhaus-Franz test. The direction set is
/// drawn once and reused for every permutation replicate.
pub fn bf_test(
    x: &MultiSample,
    y: &MultiSample,
    m_directions: usize,
    alpha: f64,
    permutations: usize,
    stream: &RngStream,
) -> Result<TestReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must be in (0,1), got {alpha}")));
    }
    if x.dim() != y.dim() {
        return Err(Error::Input(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    let dirs = draw_directions(x.dim(), m_directions, &stream.derive(0))?;
    let observed = bf_statistic_with_directions(x, y, &dirs)?;

    let n = x.n();
    let pooled: Vec<Vec<f64>> = x.rows().iter().chain(y.rows().iter()).cloned().collect();
    let perm_stream = stream.derive(1);
    let mut exceed = 0usize;
    for b in 0..permutations {
        let mut rep = perm_stream.derive(b as u64);
        let mut order: Vec<usize> = (0..pooled.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rep.below(i + 1));
        }
        let px = MultiSample::new(order[..n].iter().map(|&i| pooled[i].clone()).collect())?;
        let py = MultiSample::new(order[n..].iter().map(|&i| pooled[i].clone()).collect())?;
        if bf_statistic_with_directions(&px, &py, &dirs)? >= observed {
            exceed += 1;
        }
    }
    let p_value = (1 + exceed) as f64 / (permutations + 1) as f64;

    let mut report = TestReport {
        method: "bf".to_string(),
        statistic: observed,
        critical_value: None,
        p_value: Some(p_value),
        reject: p_value <= alpha,
        alpha,
        d: None,
        basis: None,
        n: x.n(),
        m: y.n(),
        seed: Some(stream.seed()),
        swapped: false,
        warnings: Vec::new(),
        best_direction: None,
    };
    if m_directions < 8 {
        report
            .warnings
            .push(format!("sphere average uses only {m_directions} directions"));
    }
    Ok(report)
}
