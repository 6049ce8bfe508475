//! Functionals of a discretized Brownian path.
//!
//! Processes are `Z(t) = W(t) - |t|^p` for a drift exponent `p`; `p = 0`
//! means no drift. Slopes of the least concave majorant are read off a
//! monotone-chain hull of the grid points.

use crate::error::{Error, Result};
use std::sync::Arc;

use crate::hull::HullStack;

use super::brownian::{BrownianPath, TimeGrid};

#[inline]
fn drift(t: f64, p: u32) -> f64 {
    match p {
        0 => 0.0,
        1 => t.abs(),
        2 => t * t,
        3 => (t * t * t).abs(),
        _ => t.abs().powi(p as i32),
    }
}

/// Reusable buffers for hull computations over a path.
#[derive(Debug, Default, Clone)]
pub struct LcmScratch {
    hull: HullStack,
    /// Grid abscissae of the last build, ascending (negative side first if
    /// two-sided).
    grid: Option<Arc<TimeGrid>>,
    two_sided: bool,
}

impl LcmScratch {
    pub fn new() -> Self {
        Self::default()
    }

    /// LCM of `W(t) - t^p` over the nonnegative grid.
    pub fn build_right(&mut self, path: &BrownianPath, p: u32) {
        self.build_right_upto(path, p, f64::INFINITY);
    }

    /// As [`Self::build_right`], ignoring grid points beyond `t_max`.
    pub fn build_right_upto(&mut self, path: &BrownianPath, p: u32, t_max: f64) {
        let t = path.grid().times();
        let m = t.partition_point(|&x| x <= t_max);
        self.hull.clear();
        for (i, (&t, &w)) in t[..m].iter().zip(path.values()).enumerate() {
            self.hull.push(t, w - drift(t, p), i);
        }
        self.grid = Some(path.grid_arc());
        self.two_sided = false;
    }

    /// LCM of `W(t) - |t|^p` over the full two-sided grid.
    pub fn build_two_sided(&mut self, path: &BrownianPath, p: u32) -> Result<()> {
        let left = path
            .left_values()
            .ok_or_else(|| Error::InvalidArgument("path is one-sided".into()))?;
        let t = path.grid().times();
        self.hull.clear();
        for i in (1..t.len()).rev() {
            self.hull.push(-t[i], left[i] - drift(t[i], p), i);
        }
        for (i, (&t, &w)) in t.iter().zip(path.values()).enumerate() {
            self.hull.push(t, w - drift(t, p), i);
        }
        self.grid = Some(path.grid_arc());
        self.two_sided = true;
        Ok(())
    }

    /// Right slope of the last built majorant at the first grid point `>= at`.
    /// `at` must lie strictly inside the grid.
    pub fn right_slope(&self, at: f64) -> Result<f64> {
        let outside = || Error::InvalidArgument(format!("evaluation point {at} outside the grid"));
        let t = self.grid.as_ref().ok_or_else(outside)?.times();
        let end = t[t.len() - 1];
        let g = if at >= 0.0 || !self.two_sided {
            if at < 0.0 {
                return Err(outside());
            }
            let i = t.partition_point(|&x| x < at);
            if i + 1 >= t.len() {
                return Err(outside());
            }
            t[i]
        } else {
            if -at > end {
                return Err(outside());
            }
            -t[t.partition_point(|&x| x <= -at) - 1]
        };
        let v = self.hull.vertices();
        let pos = v.partition_point(|k| k.0 <= g);
        if pos == 0 || pos >= v.len() {
            return Err(outside());
        }
        let (a, b) = (v[pos - 1], v[pos]);
        Ok((b.1 - a.1) / (b.0 - a.0))
    }

    /// Vertices of the last built majorant as `(t, z)` pairs.
    pub fn knots(&self) -> Vec<(f64, f64)> {
        self.hull.vertices().iter().map(|k| (k.0, k.1)).collect()
    }
}

fn check_inside(path: &BrownianPath, at: f64) -> Result<()> {
    if at.abs() >= path.horizon() || at.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "evaluation point {at} is not inside the horizon {}",
            path.horizon()
        )));
    }
    Ok(())
}

/// `D_R[W(t) - t^p](at)`: right slope at `at` of the LCM of the process
/// restricted to `t >= 0`.
pub fn dr_functional(path: &BrownianPath, drift_exp: u32, at: f64) -> Result<f64> {
    if at < 0.0 {
        return Err(Error::InvalidArgument(format!("evaluation point {at} is negative")));
    }
    check_inside(path, at)?;
    let mut s = LcmScratch::new();
    s.build_right(path, drift_exp);
    s.right_slope(at)
}

/// As [`dr_functional`] for several points on one hull.
pub fn dr_functional_many(
    path: &BrownianPath,
    drift_exp: u32,
    ats: &[f64],
    scratch: &mut LcmScratch,
) -> Result<Vec<f64>> {
    for &at in ats {
        if at < 0.0 {
            return Err(Error::InvalidArgument(format!("evaluation point {at} is negative")));
        }
        check_inside(path, at)?;
    }
    scratch.build_right(path, drift_exp);
    ats.iter().map(|&at| scratch.right_slope(at)).collect()
}

/// `D[W(t) - t^2](at)` over the two-sided path.
pub fn d_functional_twosided(path: &BrownianPath, at: f64) -> Result<f64> {
    check_inside(path, at)?;
    let mut s = LcmScratch::new();
    s.build_two_sided(path, 2)?;
    s.right_slope(at)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgmaxDraw {
    pub location: f64,
    /// The maximizer sits in the outer tenth of the grid.
    pub flagged: bool,
}

/// Grid argmax of `W(t) - |t|^p`, over `t >= 0` or over both branches of a
/// two-sided path. Ties go to the last maximizer.
pub fn argmax_functional(path: &BrownianPath, drift_exp: u32, restrict_nonneg: bool) -> Result<ArgmaxDraw> {
    let t = path.grid().times();
    let mut best = f64::NEG_INFINITY;
    let mut loc = 0.0;
    if !restrict_nonneg {
        let left = path
            .left_values()
            .ok_or_else(|| Error::InvalidArgument("two-sided argmax needs a two-sided path".into()))?;
        for i in (1..t.len()).rev() {
            let z = left[i] - drift(t[i], drift_exp);
            if z >= best {
                best = z;
                loc = -t[i];
            }
        }
    }
    for (&ti, &w) in t.iter().zip(path.values()) {
        let z = w - drift(ti, drift_exp);
        if z >= best {
            best = z;
            loc = ti;
        }
    }
    Ok(ArgmaxDraw {
        location: loc,
        flagged: loc.abs() >= 0.9 * path.grid().end(),
    })
}

/// Grid supremum over `t > 0` of `(W(t) - (cpen - f0 f'(0) t^2 / 2)) / t`.
pub fn sup_penalized_functional(path: &BrownianPath, cpen: f64, f0: f64, fprime0: f64) -> Result<f64> {
    if !(cpen > 0.0) {
        return Err(Error::InvalidArgument(format!("penalization constant must be positive, got {cpen}")));
    }
    let half = 0.5 * f0 * fprime0;
    let t = path.grid().times();
    let w = path.values();
    let mut best = f64::NEG_INFINITY;
    for i in 1..t.len() {
        let v = (w[i] - cpen + half * t[i] * t[i]) / t[i];
        if v > best {
            best = v;
        }
    }
    Ok(best)
}
