//! Discretized standard Brownian motion.
//!
//! Paths live on a [`TimeGrid`]: uniform with step `h` on `[0, T]`, and
//! optionally continued by geometrically growing steps out to a far horizon.
//! The graded tail matters for driftless functionals, whose concave majorant
//! can touch the path arbitrarily far out. An optional geometric head refines
//! the grid near the origin, for functionals that live at small times.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::sampling::rng_for;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
    /// Standard deviation of each increment, `sqrt(t_i - t_{i-1})`; entry 0 unused.
    sd: Vec<f64>,
    horizon: f64,
    step: f64,
    /// Index of the first point of the uniform part; 0 without a head.
    head_end: usize,
}

/// Smallest head point, relative to the step.
const HEAD_FLOOR: f64 = 1e-9;

impl TimeGrid {
    /// `0, h, 2h, ..., T`. `T / h` must be an integer up to rounding.
    pub fn uniform(horizon: f64, step: f64) -> Result<Self> {
        let n = Self::steps(horizon, step)?;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
        Ok(Self::from_times(times, horizon, step))
    }

    /// Uniform on `[0, T]`, then steps growing by the factor `1 + growth`
    /// until `far` is passed.
    pub fn graded(horizon: f64, step: f64, far: f64, growth: f64) -> Result<Self> {
        let n = Self::steps(horizon, step)?;
        if !(far > horizon) || !(growth > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "graded grid needs far > T and growth > 0 (got far = {far}, growth = {growth})"
            )));
        }
        let mut times: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
        let mut t = times[n];
        let mut dt = step;
        while t < far {
            dt *= 1.0 + growth;
            t += dt;
            times.push(t);
        }
        Ok(Self::from_times(times, horizon, step))
    }

    fn steps(horizon: f64, step: f64) -> Result<usize> {
        if !(horizon > 0.0 && step > 0.0 && step <= horizon) || !horizon.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need T > 0 and 0 < h <= T (got T = {horizon}, h = {step})"
            )));
        }
        let n = (horizon / step).round();
        if ((n * step) - horizon).abs() > 1e-9 * horizon {
            return Err(Error::InvalidArgument(format!("T / h = {} is not an integer", horizon / step)));
        }
        Ok(n as usize)
    }

    fn from_times(times: Vec<f64>, horizon: f64, step: f64) -> Self {
        let mut sd = vec![0.0; times.len()];
        for i in 1..times.len() {
            sd[i] = (times[i] - times[i - 1]).sqrt();
        }
        TimeGrid {
            times,
            sd,
            horizon,
            step,
            head_end: 0,
        }
    }

    /// Replaces the uniform points below `h / spacing` by points growing by
    /// the factor `1 + spacing`, starting just above 0, so the step near `t`
    /// is at most `spacing * t`.
    pub fn with_head(self, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing < 1.0) {
            return Err(Error::InvalidArgument(format!("head spacing must lie in (0, 1), got {spacing}")));
        }
        if self.head_end != 0 {
            return Err(Error::InvalidArgument("grid already has a head".into()));
        }
        let k0 = (1.0 / spacing).ceil() as usize;
        let n = Self::steps(self.horizon, self.step)?;
        if k0 >= n {
            return Err(Error::InvalidArgument("head reaches past the uniform part".into()));
        }
        let mut head = Vec::new();
        let mut t = k0 as f64 * self.step;
        loop {
            t /= 1.0 + spacing;
            if t < HEAD_FLOOR * self.step {
                break;
            }
            head.push(t);
        }
        let mut times = Vec::with_capacity(self.times.len() + head.len());
        times.push(0.0);
        times.extend(head.iter().rev());
        let head_end = times.len();
        times.extend_from_slice(&self.times[k0..]);
        let mut g = Self::from_times(times, self.horizon, self.step);
        g.head_end = head_end;
        Ok(g)
    }

    /// Multiple of the step at the start of the uniform part.
    fn uniform_first(&self) -> usize {
        (self.times[self.head_end] / self.step).round() as usize
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// End of the uniform part.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Last grid time.
    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Every interval split at its midpoint; the uniform step halves.
    pub fn refined(&self) -> Self {
        let mut times = Vec::with_capacity(2 * self.times.len());
        times.push(0.0);
        let k0 = self.uniform_first();
        let uniform_last = self.head_end + (self.horizon / self.step).round() as usize - k0;
        let h2 = self.step / 2.0;
        for i in 1..self.times.len() {
            if i > self.head_end && i <= uniform_last {
                // Keep the uniform part on exact multiples of the new step.
                let k = k0 + i - self.head_end;
                times.push((2 * k - 1) as f64 * h2);
                times.push((2 * k) as f64 * h2);
            } else {
                times.push(0.5 * (self.times[i - 1] + self.times[i]));
                times.push(self.times[i]);
            }
        }
        let mut g = Self::from_times(times, self.horizon, h2);
        g.head_end = 2 * self.head_end;
        g
    }

    /// Uniform part extended to `2T`; coarser points inside `(T, 2T]` are
    /// replaced, points beyond are kept.
    pub fn doubled(&self) -> Self {
        let n = (2.0 * self.horizon / self.step).round() as usize;
        let mut times = self.times[..self.head_end].to_vec();
        times.extend((self.uniform_first()..=n).map(|i| i as f64 * self.step));
        let end = n as f64 * self.step;
        times.extend(self.times.iter().copied().filter(|&t| t > end));
        let mut g = Self::from_times(times, 2.0 * self.horizon, self.step);
        g.head_end = self.head_end;
        g
    }
}

/// Standard Brownian motion sampled on a grid, with an optional independent
/// branch for negative times (`left[i]` is `W(-t_i)`).
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    grid: Arc<TimeGrid>,
    right: Vec<f64>,
    left: Option<Vec<f64>>,
}

fn fill<R: Rng + ?Sized>(grid: &TimeGrid, out: &mut Vec<f64>, rng: &mut R) {
    out.clear();
    out.reserve(grid.len());
    let mut w = 0.0;
    out.push(w);
    for &sd in &grid.sd[1..] {
        let z: f64 = rng.sample(StandardNormal);
        w += sd * z;
        out.push(w);
    }
}

/// Values on `new` given values `old` on `old_grid`, by Brownian-bridge
/// interpolation between known points and free increments past the end.
fn resample<R: Rng + ?Sized>(old_grid: &TimeGrid, old: &[f64], new: &TimeGrid, rng: &mut R) -> Vec<f64> {
    let ot = old_grid.times();
    let mut out = Vec::with_capacity(new.len());
    // (time, value) of the latest point conditioned on
    let mut last = (0.0, 0.0);
    let mut j = 0; // first old index with time >= current new time
    for &s in new.times() {
        while j < ot.len() && ot[j] < s {
            // Passing an old point: it becomes the left conditioning point.
            last = (ot[j], old[j]);
            j += 1;
        }
        let v = if j < ot.len() && ot[j] == s {
            old[j]
        } else if j < ot.len() {
            let (a, wa) = last;
            let (b, wb) = (ot[j], old[j]);
            let mean = wa + (s - a) / (b - a) * (wb - wa);
            let var = (s - a) * (b - s) / (b - a);
            let z: f64 = rng.sample(StandardNormal);
            mean + var.sqrt() * z
        } else {
            let z: f64 = rng.sample(StandardNormal);
            last.1 + (s - last.0).sqrt() * z
        };
        last = (s, v);
        out.push(v);
    }
    out
}

impl BrownianPath {
    pub fn simulate<R: Rng + ?Sized>(grid: Arc<TimeGrid>, two_sided: bool, rng: &mut R) -> Self {
        let mut right = Vec::new();
        fill(&grid, &mut right, rng);
        let left = two_sided.then(|| {
            let mut v = Vec::new();
            fill(&grid, &mut v, rng);
            v
        });
        BrownianPath { grid, right, left }
    }

    /// Redraws in place, reusing the buffers.
    pub fn resimulate<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        fill(&self.grid, &mut self.right, rng);
        if let Some(left) = self.left.as_mut() {
            fill(&self.grid, left, rng);
        }
    }

    /// Path from given values, e.g. a deterministic test input.
    pub fn from_values(grid: Arc<TimeGrid>, right: Vec<f64>, left: Option<Vec<f64>>) -> Result<Self> {
        let ok = right.len() == grid.len() && left.as_ref().map_or(true, |l| l.len() == grid.len());
        if !ok {
            return Err(Error::InvalidArgument("path length does not match grid".into()));
        }
        Ok(BrownianPath { grid, right, left })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> Arc<TimeGrid> {
        Arc::clone(&self.grid)
    }

    pub fn horizon(&self) -> f64 {
        self.grid.horizon()
    }

    pub fn step(&self) -> f64 {
        self.grid.step()
    }

    /// `W(t_i)` for `t_i >= 0`.
    pub fn values(&self) -> &[f64] {
        &self.right
    }

    /// `W(-t_i)` if the path is two-sided.
    pub fn left_values(&self) -> Option<&[f64]> {
        self.left.as_deref()
    }

    pub fn two_sided(&self) -> bool {
        self.left.is_some()
    }

    /// The same path observed on a finer or longer grid: new points are drawn
    /// from the Brownian bridge between the existing ones.
    pub fn resampled<R: Rng + ?Sized>(&self, grid: Arc<TimeGrid>, rng: &mut R) -> Self {
        let right = resample(&self.grid, &self.right, &grid, rng);
        let left = self.left.as_ref().map(|l| resample(&self.grid, l, &grid, rng));
        BrownianPath { grid, right, left }
    }
}

/// Uniform-grid path for replication 0 of `seed`.
pub fn simulate_path(horizon: f64, step: f64, two_sided: bool, seed: u64) -> Result<BrownianPath> {
    let grid = Arc::new(TimeGrid::uniform(horizon, step)?);
    let mut rng = rng_for(seed, 0);
    Ok(BrownianPath::simulate(grid, two_sided, &mut rng))
}
