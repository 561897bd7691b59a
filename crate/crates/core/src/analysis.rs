//! Least-squares fits and finite-size-scaling collapse.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// `sqrt(SSR / n)`.
    pub residual_rms: f64,
    pub n_points: usize,
    /// Standard error of the slope; `None` with only two points.
    pub slope_std_error: Option<f64>,
}

impl FitResult {
    /// `slope / SE(slope)`; infinite for an exact fit.
    pub fn slope_t_statistic(&self) -> Option<f64> {
        self.slope_std_error.map(|se| if se == 0.0 { f64::INFINITY.copysign(self.slope) } else { self.slope / se })
    }
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::InsufficientData(format!("{} x values vs {} y values", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientData("a line needs at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let spread = xs.iter().fold(0.0f64, |m, x| m.max((x - mx).abs()));
    if sxx <= 0.0 || spread <= 1e-12 * mx.abs().max(1.0) {
        return Err(Error::SingularFit("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let slope_std_error = (xs.len() > 2).then(|| (ssr / (n - 2.0) / sxx).sqrt());
    Ok(FitResult { slope, intercept, residual_rms: (ssr / n).sqrt(), n_points: xs.len(), slope_std_error })
}

/// Observable versus measurement rate for one system size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingCurve {
    pub size: usize,
    pub p: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridAxis {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.start + k as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseOptions {
    pub p_c: GridAxis,
    pub nu: GridAxis,
    /// Knots of the piecewise-linear master curve; defaults to the smallest
    /// number of points on any curve.
    pub knots: Option<usize>,
}

impl Default for CollapseOptions {
    fn default() -> Self {
        Self {
            p_c: GridAxis { start: 0.05, stop: 0.35, step: 0.005 },
            nu: GridAxis { start: 0.5, stop: 2.5, step: 0.05 },
            knots: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseResult {
    pub p_c: f64,
    pub nu: f64,
    pub objective: f64,
    pub grid_resolution: (f64, f64),
    /// The optimum sits on the edge of the search grid.
    pub low_confidence: bool,
}

/// Mean squared residual of the best piecewise-linear fit with `knots`
/// equally spaced nodes through the points.
fn master_curve_residual(points: &mut [(f64, f64)], knots: usize) -> f64 {
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (lo, hi) = (points[0].0, points[points.len() - 1].0);
    let width = (hi - lo).max(1e-300);
    let h = width / (knots - 1) as f64;
    // normal equations of the hat basis are tridiagonal
    let mut diag = vec![0.0; knots];
    let mut off = vec![0.0; knots - 1];
    let mut rhs = vec![0.0; knots];
    let locate = |x: f64| {
        let s = ((x - lo) / h).clamp(0.0, (knots - 1) as f64);
        let k = (s.floor() as usize).min(knots - 2);
        (k, s - k as f64)
    };
    for &(x, y) in points.iter() {
        let (k, w) = locate(x);
        let (a, b) = (1.0 - w, w);
        diag[k] += a * a;
        diag[k + 1] += b * b;
        off[k] += a * b;
        rhs[k] += a * y;
        rhs[k + 1] += b * y;
    }
    // a small ridge keeps knots without data well posed
    let ridge = 1e-9 * points.len() as f64;
    for d in diag.iter_mut() {
        *d += ridge;
    }
    // Thomas algorithm
    let mut c = vec![0.0; knots];
    let mut d = vec![0.0; knots];
    c[0] = off.first().copied().unwrap_or(0.0) / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..knots {
        let denom = diag[i] - off[i - 1] * c[i - 1];
        c[i] = if i < knots - 1 { off[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / denom;
    }
    let mut coef = vec![0.0; knots];
    coef[knots - 1] = d[knots - 1];
    for i in (0..knots - 1).rev() {
        coef[i] = d[i] - c[i] * coef[i + 1];
    }
    points
        .iter()
        .map(|&(x, y)| {
            let (k, w) = locate(x);
            (y - (1.0 - w) * coef[k] - w * coef[k + 1]).powi(2)
        })
        .sum::<f64>()
        / points.len() as f64
}

/// Collapse objective for one candidate `(p_c, nu)`.
pub fn collapse_objective(curves: &[ScalingCurve], p_c: f64, nu: f64, knots: usize) -> f64 {
    let mut pts: Vec<(f64, f64)> = curves
        .iter()
        .flat_map(|c| {
            let scale = (c.size as f64).powf(1.0 / nu);
            c.p.iter().zip(&c.y).map(move |(&p, &y)| ((p - p_c) * scale, y))
        })
        .collect();
    master_curve_residual(&mut pts, knots)
}

/// Exhaustive grid search for the `(p_c, nu)` that best collapses
/// `y` versus `(p - p_c) N^(1/nu)` onto one curve.
pub fn fss_collapse(curves: &[ScalingCurve], opts: &CollapseOptions) -> Result<CollapseResult> {
    if curves.len() < 3 {
        return Err(Error::InsufficientData(format!("collapse needs >= 3 sizes, got {}", curves.len())));
    }
    if let Some(c) = curves.iter().find(|c| c.p.len() < 8 || c.p.len() != c.y.len()) {
        return Err(Error::InsufficientData(format!("size {} has {} points (need >= 8)", c.size, c.p.len())));
    }
    let knots = opts.knots.unwrap_or_else(|| curves.iter().map(|c| c.p.len()).min().unwrap_or(8)).max(2);
    let pcs = opts.p_c.values();
    let nus = opts.nu.values();
    let rows: Vec<(usize, usize, f64)> = pcs
        .par_iter()
        .enumerate()
        .map(|(i, &pc)| {
            nus.iter()
                .enumerate()
                .map(|(j, &nu)| (i, j, collapse_objective(curves, pc, nu, knots)))
                .fold((i, 0, f64::INFINITY), |best, cand| if cand.2 < best.2 { cand } else { best })
        })
        .collect();
    // strict `<` over index order gives lexicographic tie-breaking on (p_c, nu)
    let (i, j, objective) =
        rows.into_iter().fold((0, 0, f64::INFINITY), |best, cand| if cand.2 < best.2 { cand } else { best });
    Ok(CollapseResult {
        p_c: pcs[i],
        nu: nus[j],
        objective,
        grid_resolution: (opts.p_c.step, opts.nu.step),
        low_confidence: i == 0 || i + 1 == pcs.len() || j == 0 || j + 1 == nus.len(),
    })
}

/// First `p` where `larger - smaller` turns from positive to non-positive,
/// by linear interpolation on a shared grid.
pub fn crossing_point(smaller: &ScalingCurve, larger: &ScalingCurve) -> Option<f64> {
    let diff: Vec<f64> = larger.y.iter().zip(&smaller.y).map(|(a, b)| a - b).collect();
    (1..diff.len().min(smaller.p.len())).find_map(|k| {
        let (d0, d1) = (diff[k - 1], diff[k]);
        (d0 > 0.0 && d1 <= 0.0).then(|| {
            let (p0, p1) = (smaller.p[k - 1], smaller.p[k]);
            p0 + (p1 - p0) * d0 / (d0 - d1)
        })
    })
}
