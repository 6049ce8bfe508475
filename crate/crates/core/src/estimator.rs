//! The Grenander estimator: empirical CDF, its least concave majorant and the
//! left-derivative step density, together with the inverse process `U_n`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hull::{upper_hull, ConcaveMajorant};
use crate::sample::Sample;

/// Vertices of the empirical CDF: `(0, 0)` followed by one vertex per distinct
/// observation carrying the cumulative proportion. Ties collapse.
pub fn ecdf_vertices(s: &Sample) -> Vec<(f64, f64)> {
    let v = s.values();
    let n = v.len() as f64;
    let mut out = Vec::with_capacity(v.len() + 1);
    out.push((0.0, 0.0));
    for (i, &x) in v.iter().enumerate() {
        let last = i + 1 == v.len() || v[i + 1] != x;
        if last {
            out.push((x, (i + 1) as f64 / n));
        }
    }
    out
}

/// Least concave majorant of the empirical CDF.
pub fn ecdf_lcm(s: &Sample) -> Result<ConcaveMajorant> {
    if s.values()[0] == 0.0 {
        return Err(Error::Degenerate(
            "observation at 0 makes the empirical CDF jump at the origin".into(),
        ));
    }
    let verts = ecdf_vertices(s);
    let n = s.n() as f64;
    // hull on integer counts: exact cross products for collinear vertices
    let xs: Vec<f64> = verts.iter().map(|p| p.0).collect();
    let counts: Vec<f64> = verts.iter().map(|p| (p.1 * n).round()).collect();
    Ok(ConcaveMajorant::from_knots(
        upper_hull(&xs, &counts).into_iter().map(|i| verts[i]).collect(),
    ))
}

/// Nonincreasing, left-continuous step density.
///
/// `heights[i]` is the value on `(breakpoints[i], breakpoints[i + 1]]`; the
/// value at 0 is the first height and the density vanishes beyond the last
/// breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDensity {
    breakpoints: Vec<f64>,
    heights: Vec<f64>,
}

impl StepDensity {
    /// Builds a step density, checking the shape constraints. Mass is not
    /// checked here; see [`StepDensity::mass`].
    pub fn new(breakpoints: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        if heights.is_empty() || breakpoints.len() != heights.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "need m + 1 breakpoints for m heights (got {} and {})",
                breakpoints.len(),
                heights.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::InvalidArgument("first breakpoint must be 0".into()));
        }
        if let Some(i) = breakpoints.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(format!(
                "breakpoints not strictly increasing at index {}",
                i + 1
            )));
        }
        if let Some(i) = heights.iter().position(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidArgument(format!("height {i} not positive")));
        }
        if let Some(i) = heights.windows(2).position(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidArgument(format!(
                "heights not strictly decreasing at index {}",
                i + 1
            )));
        }
        Ok(StepDensity {
            breakpoints,
            heights,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    /// Value at 0, the first height.
    pub fn first_height(&self) -> f64 {
        self.heights[0]
    }

    pub fn upper_support(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1]
    }

    pub fn mass(&self) -> f64 {
        self.heights
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(h, w)| h * (w[1] - w[0]))
            .sum()
    }

    /// Left-continuous evaluation.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::NegativeAbscissa(x));
        }
        Ok(self.value(x))
    }

    /// As [`StepDensity::eval`], for callers that already know `x >= 0`.
    #[inline]
    pub(crate) fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.heights[0];
        }
        let j = self.breakpoints.partition_point(|&b| b < x);
        if j > self.heights.len() {
            0.0
        } else {
            self.heights[j - 1]
        }
    }

    /// CSV with header `breakpoint,height`; row `i` holds `b_i` and the height
    /// to its right, the final row carrying height 0.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("breakpoint,height\n");
        for (i, b) in self.breakpoints.iter().enumerate() {
            let h = self.heights.get(i).copied().unwrap_or(0.0);
            let _ = writeln!(out, "{b:?},{h:?}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == "breakpoint,height" => {}
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "expected header breakpoint,height".into(),
                })
            }
        }
        let mut b = Vec::new();
        let mut h = Vec::new();
        for (i, line) in lines {
            let parse = |f: Option<&str>| -> Result<f64> {
                f.and_then(|v| v.trim().parse().ok()).ok_or_else(|| Error::Parse {
                    line: i + 1,
                    msg: format!("bad row {line:?}"),
                })
            };
            let mut fields = line.split(',');
            b.push(parse(fields.next())?);
            h.push(parse(fields.next())?);
        }
        match h.pop() {
            Some(last) if last == 0.0 => {}
            _ => {
                return Err(Error::Parse {
                    line: 0,
                    msg: "final row must carry height 0".into(),
                })
            }
        }
        Self::new(b, h)
    }
}

/// The Grenander estimator: left derivative of the LCM of the empirical CDF.
pub fn grenander(s: &Sample) -> Result<StepDensity> {
    let values = s.values();
    if values[0] == 0.0 {
        return Err(Error::Degenerate(
            "observation at 0 makes the empirical CDF jump at the origin".into(),
        ));
    }
    let n = values.len() as f64;
    let mut xs = Vec::with_capacity(values.len() + 1);
    let mut ys = Vec::with_capacity(values.len() + 1);
    xs.push(0.0);
    ys.push(0.0);
    for (i, &x) in values.iter().enumerate() {
        if i + 1 == values.len() || values[i + 1] != x {
            xs.push(x);
            ys.push((i + 1) as f64);
        }
    }
    let idx = upper_hull(&xs, &ys);
    let breakpoints: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
    let heights = idx
        .windows(2)
        .map(|w| (ys[w[1]] - ys[w[0]]) / (n * (xs[w[1]] - xs[w[0]])))
        .collect();
    Ok(StepDensity {
        breakpoints,
        heights,
    })
}

/// `U_n(a)`: the last maximizer over `t >= 0` of `F_n(t) - a t`.
///
/// Only `t = 0` and the order statistics are candidates, since the process
/// jumps up at data points and decreases linearly in between.
pub fn inverse_process(s: &Sample, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("a must be positive, got {a}")));
    }
    let mut best_t = 0.0;
    let mut best = 0.0;
    for &(x, y) in ecdf_vertices(s).iter().skip(1) {
        let v = y - a * x;
        if v >= best {
            best = v;
            best_t = x;
        }
    }
    Ok(best_t)
}

/// Checks the switching relation `f_n(x) <= a  <=>  U_n(a) <= x`.
pub fn switching_check(s: &Sample, a: f64, x: f64) -> Result<bool> {
    let d = grenander(s)?;
    let lhs = d.eval(x)? <= a;
    let rhs = inverse_process(s, a)? <= x;
    Ok(lhs == rhs)
}
