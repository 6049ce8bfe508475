//! Penalized NPMLE of a nonincreasing density, maximizing
//! `(1/n) sum log f(X_i) - alpha f(0+)`.
//!
//! For a fixed Lagrange multiplier `lambda` on the mass constraint the
//! problem is an antitonic regression whose first cell is lengthened by
//! `alpha / lambda`, i.e. the slopes of the least concave majorant of the
//! empirical CDF vertices shifted right by `alpha / lambda`, divided by
//! `lambda`. Stationarity gives `lambda = 1 - alpha f(0+)`, so the fit reduces
//! to a one-dimensional root search in `lambda`. Only the first cell depends on
//! `lambda`: it is the tangent from the shifted origin to the upper hull of the
//! vertices, so each evaluation costs one pass over the hull.

use crate::error::{Error, Result};
use crate::estimator::StepDensity;
use crate::hull::upper_hull;
use crate::sample::Sample;

/// Constant in `alpha_hat = 0.649 beta_hat^(-1/3) n^(-2/3)`.
pub const ALPHA_CONSTANT: f64 = 0.649;

/// Default floor exponent for `beta_hat`.
pub const DEFAULT_Q: f64 = 1.0 / 3.0;

/// Tabulated pilot smoothing parameters `(n, alpha_0)`.
pub const PILOT_ALPHA0: [(usize, f64); 3] = [(50, 0.0516), (100, 0.0325), (200, 0.0205)];

/// `beta = -f(0) f'(0) / 2` used for the theoretical pilot at large `n`.
pub const PILOT_BETA: f64 = 0.5;

const SOLVER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PenalizedFit {
    pub density: StepDensity,
    pub alpha: f64,
    /// Achieved penalized log-likelihood.
    pub objective: f64,
    /// Second point of jump; `None` when the fit has a single block.
    pub x_m: Option<f64>,
    /// Multiplier on the mass constraint, `1 - alpha f(0+)` at the optimum;
    /// zero when the constraint is slack.
    pub multiplier: f64,
    /// Stationarity residual `|lambda + alpha f(0+) - 1|`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaRecipe {
    pub alpha0: f64,
    pub q: f64,
    pub beta_hat: f64,
    pub alpha_hat: f64,
    /// Second jump of the pilot fit, if it has one.
    pub x_m: Option<f64>,
    /// Set when the pilot had fewer than two jumps and `beta_hat` fell back
    /// to the floor `n^(-q)`.
    pub fallback: bool,
}

/// Upper hull of the ECDF vertices without the origin, reused across
/// multiplier evaluations.
struct Vertices {
    xs: Vec<f64>,
    ys: Vec<f64>,
    weights: Vec<f64>,
    hull: Vec<usize>,
}

impl Vertices {
    fn new(s: &Sample) -> Self {
        let v = s.values();
        let n = v.len() as f64;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut weights = Vec::new();
        let mut counts = Vec::new();
        let mut prev = 0usize;
        for (i, &x) in v.iter().enumerate() {
            if i + 1 == v.len() || v[i + 1] != x {
                xs.push(x);
                ys.push((i + 1) as f64 / n);
                weights.push((i + 1 - prev) as f64);
                counts.push((i + 1) as f64);
                prev = i + 1;
            }
        }
        let hull = upper_hull(&xs, &counts);
        Vertices {
            xs,
            ys,
            weights,
            hull,
        }
    }

    /// First height and tangent position (into `hull`) for multiplier `lambda`.
    /// Ties go to the rightmost vertex so consecutive heights stay distinct.
    fn first_cell(&self, lambda: f64, alpha: f64) -> (f64, usize) {
        let mut best = f64::NEG_INFINITY;
        let mut pos = 0;
        for (p, &j) in self.hull.iter().enumerate() {
            let h = self.ys[j] / (lambda * self.xs[j] + alpha);
            if h >= best {
                best = h;
                pos = p;
            }
        }
        (best, pos)
    }
}

/// Penalized NPMLE with smoothing parameter `alpha`.
pub fn penalized_fit(s: &Sample, alpha: f64) -> Result<PenalizedFit> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    if s.values()[0] == 0.0 {
        return Err(Error::Degenerate("observation at 0".into()));
    }
    let v = Vertices::new(s);
    let n = s.n() as f64;
    let x_max = s.max();

    if alpha >= x_max {
        // Mass constraint slack: a single cell of height 1/alpha on [0, alpha].
        let h = 1.0 / alpha;
        let density = StepDensity::new(vec![0.0, alpha], vec![h])?;
        return Ok(PenalizedFit {
            density,
            alpha,
            objective: h.ln() - alpha * h,
            x_m: None,
            multiplier: 0.0,
            residual: 0.0,
        });
    }

    // g(lambda) = lambda + alpha h1(lambda) - 1 is negative just above 0 and
    // positive at 1 when alpha < max X; the root is unique.
    let g = |lambda: f64| lambda + alpha * v.first_cell(lambda, alpha).0 - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= SOLVER_TOL * hi {
            break;
        }
    }
    let lambda = hi;
    let residual = g(lambda).abs();
    if !(residual < 1e-8) {
        return Err(Error::NoConvergence(residual));
    }

    let (h1, pos) = v.first_cell(lambda, alpha);
    let knots = &v.hull[pos..];
    let mut breakpoints = Vec::with_capacity(knots.len() + 1);
    let mut heights = Vec::with_capacity(knots.len());
    breakpoints.push(0.0);
    breakpoints.push(v.xs[knots[0]]);
    heights.push(h1);
    for w in knots.windows(2) {
        breakpoints.push(v.xs[w[1]]);
        heights.push((v.ys[w[1]] - v.ys[w[0]]) / (lambda * (v.xs[w[1]] - v.xs[w[0]])));
    }
    let density = StepDensity::new(breakpoints, heights)?;

    let mut loglik = 0.0;
    for (&x, &w) in v.xs.iter().zip(&v.weights) {
        loglik += w * density.value(x).ln();
    }
    let objective = loglik / n - alpha * h1;
    let x_m = density.breakpoints().get(2).copied();
    Ok(PenalizedFit {
        density,
        alpha,
        objective,
        x_m,
        multiplier: lambda,
        residual,
    })
}

/// Penalized objective of an arbitrary step density on sample `s`.
pub fn penalized_objective(s: &Sample, density: &StepDensity, alpha: f64) -> f64 {
    let n = s.n() as f64;
    let ll: f64 = s.values().iter().map(|&x| density.value(x).ln()).sum();
    ll / n - alpha * density.first_height()
}

/// Pilot smoothing parameter for sample size `n`: tabulated values,
/// log-log interpolated between them, and the theoretical
/// `0.649 beta^(-1/3) n^(-2/3)` with `beta = 1/2` from `n = 1000` on.
pub fn default_alpha0(n: usize) -> f64 {
    let theoretical = |n: f64| ALPHA_CONSTANT * PILOT_BETA.powf(-1.0 / 3.0) * n.powf(-2.0 / 3.0);
    if n >= 1000 {
        return theoretical(n as f64);
    }
    let mut pts: Vec<(f64, f64)> = PILOT_ALPHA0.iter().map(|&(n, a)| (n as f64, a)).collect();
    pts.push((1000.0, theoretical(1000.0)));
    let x = n.max(1) as f64;
    let seg = pts
        .windows(2)
        .position(|w| x <= w[1].0)
        .unwrap_or(pts.len() - 2);
    let (x0, y0) = pts[seg];
    let (x1, y1) = pts[seg + 1];
    let t = (x.ln() - x0.ln()) / (x1.ln() - x0.ln());
    (y0.ln() + t * (y1.ln() - y0.ln())).exp()
}

/// Data-driven smoothing parameter from a pilot fit at `alpha0`.
pub fn alpha_recipe(s: &Sample, alpha0: f64, q: f64) -> Result<AlphaRecipe> {
    Ok(alpha_recipe_with_pilot(s, alpha0, q)?.0)
}

fn alpha_recipe_with_pilot(s: &Sample, alpha0: f64, q: f64) -> Result<(AlphaRecipe, PenalizedFit)> {
    if !(q > 0.0 && q < 0.5) {
        return Err(Error::InvalidArgument(format!("q must lie in (0, 0.5), got {q}")));
    }
    let pilot = penalized_fit(s, alpha0)?;
    let n = s.n() as f64;
    let floor = n.powf(-q);
    let (beta_hat, fallback) = match pilot.x_m {
        Some(x_m) => {
            let f0 = pilot.density.first_height();
            let fx = pilot.density.value(x_m);
            ((f0 * (f0 - fx) / (2.0 * x_m)).max(floor), false)
        }
        None => (floor, true),
    };
    let alpha_hat = ALPHA_CONSTANT * beta_hat.powf(-1.0 / 3.0) * n.powf(-2.0 / 3.0);
    Ok((
        AlphaRecipe {
            alpha0,
            q,
            beta_hat,
            alpha_hat,
            x_m: pilot.x_m,
            fallback,
        },
        pilot,
    ))
}

/// Result of the full penalized pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct PenalizedZero {
    pub value: f64,
    pub recipe: AlphaRecipe,
    pub fit: PenalizedFit,
}

/// `f_n^P(alpha_hat, 0)` with `alpha_hat` from [`alpha_recipe`].
pub fn penalized_zero(s: &Sample, alpha0: f64, q: f64) -> Result<PenalizedZero> {
    let (recipe, _) = alpha_recipe_with_pilot(s, alpha0, q)?;
    let fit = penalized_fit(s, recipe.alpha_hat)?;
    Ok(PenalizedZero {
        value: fit.density.first_height(),
        recipe,
        fit,
    })
}
