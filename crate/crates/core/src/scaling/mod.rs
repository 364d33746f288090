//! Finite-size scaling: data collapse, power-law fits and logarithmic derivatives.
//!
//! Collapse model: `y(L, p) = F((p − p_c) L^{1/ν})` with `F` a cubic
//! B-spline refit for every trial `(p_c, ν)`. Only points inside the window
//! where the rescaled ranges of all sizes overlap enter the residual.
//! Quality is the error-weighted residual divided by the error-weighted
//! variance of the values used, so it is invariant under `y → a·y + b`.

mod spline;

pub use spline::CubicSpline;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub l: usize,
    pub p: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollapseOptions {
    pub knots: usize,
    pub pc_range: (f64, f64),
    pub nu_range: (f64, f64),
    pub grid: usize,
    pub max_iters: u64,
    /// Minimum points per size inside the overlap window.
    pub min_points_per_size: usize,
}

impl Default for CollapseOptions {
    fn default() -> Self {
        Self { knots: 8, pc_range: (0.12, 0.20), nu_range: (0.8, 2.0), grid: 5, max_iters: 2000, min_points_per_size: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseFit {
    pub p_c: f64,
    pub nu: f64,
    pub quality: f64,
    /// Covariance of `(p_c, ν)` from the curvature of the weighted residual.
    pub covariance: [[f64; 2]; 2],
    pub n_points: usize,
    pub converged: bool,
    /// No finite `ν` is preferred, or the optimum sits at the edge of the search region.
    pub degenerate: bool,
}

impl CollapseFit {
    pub fn stderr_pc(&self) -> f64 {
        self.covariance[0][0].sqrt()
    }

    pub fn stderr_nu(&self) -> f64 {
        self.covariance[1][1].sqrt()
    }
}

const NU_MIN: f64 = 0.2;
const NU_MAX: f64 = 20.0;
const PENALTY: f64 = 10.0;

struct Residual<'a> {
    points: &'a [ScanPoint],
    sizes: Vec<usize>,
    opts: &'a CollapseOptions,
    p_lo: f64,
    p_hi: f64,
}

struct Eval {
    quality: f64,
    chi2: f64,
    used: usize,
}

impl<'a> Residual<'a> {
    fn new(points: &'a [ScanPoint], opts: &'a CollapseOptions) -> Self {
        let mut sizes: Vec<usize> = points.iter().map(|p| p.l).collect();
        sizes.sort_unstable();
        sizes.dedup();
        let p_lo = points.iter().map(|p| p.p).fold(f64::INFINITY, f64::min);
        let p_hi = points.iter().map(|p| p.p).fold(f64::NEG_INFINITY, f64::max);
        Self { points, sizes, opts, p_lo, p_hi }
    }

    fn eval(&self, pc: f64, nu: f64) -> Eval {
        let bad = |shortfall: f64| Eval { quality: PENALTY + shortfall, chi2: f64::INFINITY, used: 0 };
        let span = self.p_hi - self.p_lo;
        if !(NU_MIN..=NU_MAX).contains(&nu) || pc < self.p_lo - span || pc > self.p_hi + span {
            return bad(nu.max(pc.abs()));
        }
        let x: Vec<f64> = self.points.iter().map(|q| (q.p - pc) * (q.l as f64).powf(1.0 / nu)).collect();
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for &l in &self.sizes {
            let xs = self.points.iter().zip(&x).filter(|(q, _)| q.l == l).map(|(_, &v)| v);
            let (mn, mx) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            lo = lo.max(mn);
            hi = hi.min(mx);
        }
        let inside: Vec<usize> = (0..x.len()).filter(|&i| x[i] >= lo && x[i] <= hi).collect();
        let mut shortfall = 0usize;
        for &l in &self.sizes {
            let c = inside.iter().filter(|&&i| self.points[i].l == l).count();
            shortfall += self.opts.min_points_per_size.saturating_sub(c);
        }
        if hi <= lo || shortfall > 0 {
            return bad(shortfall as f64);
        }
        let xs: Vec<f64> = inside.iter().map(|&i| x[i]).collect();
        let ys: Vec<f64> = inside.iter().map(|&i| self.points[i].value).collect();
        let ws: Vec<f64> = inside.iter().map(|&i| self.points[i].stderr.powi(-2)).collect();
        // keep at least three points per coefficient
        let intervals = (self.opts.knots.saturating_sub(1)).min((xs.len() / 3).saturating_sub(3)).max(1);
        let Some(s) = CubicSpline::fit(&xs, &ys, &ws, intervals) else {
            return bad(1.0);
        };
        let wsum: f64 = ws.iter().sum();
        let ybar = ws.iter().zip(&ys).map(|(w, y)| w * y).sum::<f64>() / wsum;
        let total: f64 = ws.iter().zip(&ys).map(|(w, y)| w * (y - ybar).powi(2)).sum();
        let chi2: f64 = xs.iter().zip(&ys).zip(&ws).map(|((&x, &y), &w)| w * (y - s.eval(x)).powi(2)).sum();
        if total <= 0.0 {
            return Eval { quality: 0.0, chi2, used: xs.len() };
        }
        Eval { quality: chi2 / total, chi2, used: xs.len() }
    }
}

impl CostFunction for Residual<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.eval(p[0], p[1]).quality)
    }
}

fn validate_points(points: &[ScanPoint]) -> Result<()> {
    let mut per_size: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (i, q) in points.iter().enumerate() {
        if !(q.stderr > 0.0) || !q.value.is_finite() {
            return Err(Error::NonPositive { index: i, value: q.stderr });
        }
        per_size.entry(q.l).or_default().push(q.p);
    }
    if per_size.len() < 3 {
        return Err(Error::InsufficientData(format!("{} distinct sizes, need ≥ 3", per_size.len())));
    }
    for (l, ps) in &per_size {
        let mut ps = ps.clone();
        ps.sort_by(f64::total_cmp);
        ps.dedup();
        if ps.len() < 5 {
            return Err(Error::InsufficientData(format!("size {l} has {} p values, need ≥ 5", ps.len())));
        }
    }
    Ok(())
}

/// Best collapse over a grid of Nelder–Mead starts.
pub fn collapse(points: &[ScanPoint], opts: &CollapseOptions) -> Result<CollapseFit> {
    validate_points(points)?;
    let res = Residual::new(points, opts);
    let g = opts.grid.max(1);
    let at = |r: (f64, f64), k: usize| if g == 1 { 0.5 * (r.0 + r.1) } else { r.0 + (r.1 - r.0) * k as f64 / (g - 1) as f64 };
    let mut best: Option<(f64, f64, f64, bool)> = None;
    for i in 0..g {
        for j in 0..g {
            let (pc0, nu0) = (at(opts.pc_range, i), at(opts.nu_range, j));
            let simplex = vec![vec![pc0, nu0], vec![pc0 + 0.01, nu0], vec![pc0, nu0 + 0.1]];
            let solver = NelderMead::new(simplex)
                .with_sd_tolerance(1e-12)
                .map_err(|e| Error::Internal(e.to_string()))?;
            let run = Executor::new(Residual::new(points, opts), solver)
                .configure(|s| s.max_iters(opts.max_iters))
                .run()
                .map_err(|e| Error::Internal(e.to_string()))?;
            let state = run.state();
            let Some(p) = state.get_best_param() else { continue };
            let converged = matches!(
                state.get_termination_status(),
                TerminationStatus::Terminated(TerminationReason::SolverConverged)
            );
            let q = res.eval(p[0], p[1]).quality;
            if best.map_or(true, |b| q < b.2) {
                best = Some((p[0], p[1], q, converged));
            }
        }
    }
    let (pc, nu, quality, converged) = best.ok_or(Error::NoConvergence { iterations: opts.max_iters as usize })?;
    if quality >= PENALTY {
        return Err(Error::InsufficientData("no trial (p_c, nu) gives overlapping rescaled data".into()));
    }
    let e = res.eval(pc, nu);
    let covariance = curvature_covariance(&res, pc, nu, e.chi2, e.used);
    let flat = {
        let q2 = res.eval(pc, (2.0 * nu).min(NU_MAX)).quality;
        (q2 - quality).abs() <= 1e-3 * quality.max(1e-12) || q2 <= quality
    };
    let degenerate = nu > 0.9 * NU_MAX || pc < res.p_lo || pc > res.p_hi || flat;
    Ok(CollapseFit { p_c: pc, nu, quality, covariance, n_points: e.used, converged, degenerate })
}

/// `2·H⁻¹` of the weighted residual, inflated by the reduced residual when it exceeds 1.
fn curvature_covariance(res: &Residual, pc: f64, nu: f64, chi2: f64, used: usize) -> [[f64; 2]; 2] {
    let h = [1e-3, 1e-2 * nu];
    let f = |dp: f64, dn: f64| res.eval(pc + dp, nu + dn).chi2;
    let f0 = chi2;
    let hpp = (f(h[0], 0.0) - 2.0 * f0 + f(-h[0], 0.0)) / (h[0] * h[0]);
    let hnn = (f(0.0, h[1]) - 2.0 * f0 + f(0.0, -h[1])) / (h[1] * h[1]);
    let hpn = (f(h[0], h[1]) - f(h[0], -h[1]) - f(-h[0], h[1]) + f(-h[0], -h[1])) / (4.0 * h[0] * h[1]);
    let det = hpp * hnn - hpn * hpn;
    if !(det > 0.0 && hpp > 0.0) || !det.is_finite() {
        return [[f64::NAN; 2]; 2];
    }
    let dof = used.saturating_sub(2).max(1) as f64;
    let inflate = (chi2 / dof).max(1.0);
    let s = 2.0 * inflate / det;
    [[s * hnn, -s * hpn], [-s * hpn, s * hpp]]
}

/// Per-trajectory observations of one `(L, p)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSamples {
    pub l: usize,
    pub p: f64,
    pub values: Vec<f64>,
}

impl CellSamples {
    pub fn point(&self) -> ScanPoint {
        let (mean, stderr) = crate::monitored::mean_stderr(&self.values);
        ScanPoint { l: self.l, p: self.p, value: mean, stderr }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bootstrap {
    pub stderr_pc: f64,
    pub stderr_nu: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Resamples trajectories within each cell and refits; replicate `b` uses `trajectory_seed(seed, b)`.
pub fn bootstrap_collapse(cells: &[CellSamples], opts: &CollapseOptions, n_boot: usize, seed: u64) -> Result<Bootstrap> {
    let fits: Vec<(f64, f64)> = (0..n_boot as u64)
        .into_par_iter()
        .filter_map(|b| {
            let mut rng = rng_from_seed(crate::rng::trajectory_seed(seed, b));
            let pts: Vec<ScanPoint> = cells
                .iter()
                .map(|c| {
                    let n = c.values.len();
                    let v: Vec<f64> = (0..n).map(|_| c.values[rng.gen_range(0..n)]).collect();
                    CellSamples { l: c.l, p: c.p, values: v }.point()
                })
                .collect();
            collapse(&pts, opts).ok().map(|f| (f.p_c, f.nu))
        })
        .collect();
    if fits.len() < 2 {
        return Err(Error::InsufficientData("fewer than two bootstrap fits succeeded".into()));
    }
    let pcs: Vec<f64> = fits.iter().map(|f| f.0).collect();
    let nus: Vec<f64> = fits.iter().map(|f| f.1).collect();
    let sd = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    Ok(Bootstrap { stderr_pc: sd(&pcs), stderr_nu: sd(&nus), samples: fits })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub stderr: f64,
}

/// `y = A·x^b` by weighted regression of `ln y` on `ln x`, with `σ_ln y = err/y`.
/// The exponent error is scaled by the reduced residual.
pub fn power_law_fit(xs: &[f64], ys: &[f64], errs: Option<&[f64]>) -> Result<PowerLawFit> {
    if xs.len() != ys.len() || errs.is_some_and(|e| e.len() != xs.len()) {
        return Err(Error::InvalidConfig("mismatched input lengths".into()));
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientData("need ≥ 2 points".into()));
    }
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if !(x > 0.0) {
            return Err(Error::NonPositive { index: i, value: x });
        }
        if !(y > 0.0) {
            return Err(Error::NonPositive { index: i, value: y });
        }
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let w: Vec<f64> = match errs {
        Some(e) => e.iter().zip(ys).map(|(&s, &y)| if s > 0.0 { (y / s).powi(2) } else { 1.0 }).collect(),
        None => vec![1.0; xs.len()],
    };
    let sw: f64 = w.iter().sum();
    let mx = w.iter().zip(&lx).map(|(w, x)| w * x).sum::<f64>() / sw;
    let my = w.iter().zip(&ly).map(|(w, y)| w * y).sum::<f64>() / sw;
    let sxx: f64 = w.iter().zip(&lx).map(|(w, x)| w * (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData("all x equal".into()));
    }
    let sxy: f64 = w.iter().zip(lx.iter().zip(&ly)).map(|(w, (x, y))| w * (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let chi2: f64 = w.iter().zip(lx.iter().zip(&ly)).map(|(w, (x, y))| w * (y - a - b * x).powi(2)).sum();
    let n = xs.len();
    let stderr = if n > 2 { (chi2 / (n - 2) as f64 / sxx).sqrt() } else { (1.0 / sxx).sqrt() };
    Ok(PowerLawFit { exponent: b, amplitude: a.exp(), stderr })
}

/// `d ln y / d ln t`: central differences inside, one-sided at the ends.
pub fn log_derivative(ts: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    if ts.len() != ys.len() {
        return Err(Error::InvalidConfig("mismatched input lengths".into()));
    }
    if ts.len() < 2 {
        return Err(Error::InsufficientData("need ≥ 2 points".into()));
    }
    for (i, (&t, &y)) in ts.iter().zip(ys).enumerate() {
        if !(t > 0.0) {
            return Err(Error::NonPositive { index: i, value: t });
        }
        if !(y > 0.0) {
            return Err(Error::NonPositive { index: i, value: y });
        }
    }
    if ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("times must be strictly increasing".into()));
    }
    let lt: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = ts.len();
    Ok((0..n)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            (ly[b] - ly[a]) / (lt[b] - lt[a])
        })
        .collect())
}

/// Fit report written next to collapse results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub estimates: BTreeMap<String, f64>,
    pub stderr: BTreeMap<String, f64>,
    pub quality: f64,
    pub n_points: usize,
    pub converged: bool,
    pub degenerate: bool,
    pub config: CollapseOptions,
}

impl FitReport {
    pub fn new(fit: &CollapseFit, boot: Option<&Bootstrap>, config: &CollapseOptions) -> Self {
        let estimates = BTreeMap::from([("p_c".to_string(), fit.p_c), ("nu".to_string(), fit.nu)]);
        let (spc, snu) = match boot {
            Some(b) => (b.stderr_pc, b.stderr_nu),
            None => (fit.stderr_pc(), fit.stderr_nu()),
        };
        let stderr = BTreeMap::from([("p_c".to_string(), spc), ("nu".to_string(), snu)]);
        Self {
            estimates,
            stderr,
            quality: fit.quality,
            n_points: fit.n_points,
            converged: fit.converged,
            degenerate: fit.degenerate,
            config: config.clone(),
        }
    }
}
