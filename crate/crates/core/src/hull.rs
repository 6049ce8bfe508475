//! Upper convex hulls and least concave majorants.
//!
//! The hull is built with a single monotone-chain pass over points sorted by
//! strictly increasing abscissa. The turn test uses the cross-product form so
//! no slopes are divided out while deciding which vertices survive, and
//! treats turns within the rounding error of the inputs as collinear.

use crate::error::{Error, Result};

/// Cross product of `(b - a) x (c - a)`. Nonnegative means `b` lies on or
/// below the chord from `a` to `c`.
#[inline]
fn cross(ax: f64, ay: f64, bx: f64, by: f64, cx: f64, cy: f64) -> f64 {
    (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
}

/// Bound on the error of [`cross`] when every coordinate carries a relative
/// rounding error of a few ulps.
#[inline]
fn cross_slack(ax: f64, ay: f64, bx: f64, by: f64, cx: f64, cy: f64) -> f64 {
    4.0 * f64::EPSILON
        * ((ax.abs() + bx.abs()) * (cy - ay).abs()
            + (ay.abs() + cy.abs()) * (bx - ax).abs()
            + (ay.abs() + by.abs()) * (cx - ax).abs()
            + (ax.abs() + cx.abs()) * (by - ay).abs())
}

/// True when `b` lies on or below the chord from `a` to `c`, up to rounding.
#[inline]
fn on_or_below(ax: f64, ay: f64, bx: f64, by: f64, cx: f64, cy: f64) -> bool {
    cross(ax, ay, bx, by, cx, cy) >= -cross_slack(ax, ay, bx, by, cx, cy)
}

/// Upper hull built one point at a time, left to right.
#[derive(Debug, Clone, Default)]
pub struct HullStack {
    pts: Vec<(f64, f64, usize)>,
}

impl HullStack {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.pts.clear();
    }

    /// Adds `(x, y)`, tagged `i`. `x` must exceed every earlier abscissa.
    #[inline]
    pub fn push(&mut self, x: f64, y: f64, i: usize) {
        while let [.., (ax, ay, _), (bx, by, _)] = self.pts[..] {
            if on_or_below(ax, ay, bx, by, x, y) {
                self.pts.pop();
            } else {
                break;
            }
        }
        self.pts.push((x, y, i));
    }

    /// Current vertices as `(x, y, tag)`.
    pub fn vertices(&self) -> &[(f64, f64, usize)] {
        &self.pts
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }
}

/// Indices of the vertices of the upper hull of `(xs[i], ys[i])`.
///
/// `xs` must be strictly increasing. Collinear interior points, up to
/// rounding, are dropped so successive chord slopes of the result are
/// strictly decreasing. `out` is
/// cleared and reused.
pub fn upper_hull_into(xs: &[f64], ys: &[f64], out: &mut Vec<usize>) {
    debug_assert_eq!(xs.len(), ys.len());
    let mut h = HullStack::new();
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        h.push(x, y, i);
    }
    out.clear();
    out.extend(h.vertices().iter().map(|v| v.2));
}

pub fn upper_hull(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    upper_hull_into(xs, ys, &mut out);
    out
}

/// Piecewise-linear concave function through its touch points.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveMajorant {
    knots: Vec<(f64, f64)>,
}

impl ConcaveMajorant {
    pub(crate) fn from_knots(knots: Vec<(f64, f64)>) -> Self {
        ConcaveMajorant { knots }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Chord slopes between successive knots (strictly decreasing).
    pub fn slopes(&self) -> Vec<f64> {
        self.knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect()
    }

    /// Value of the majorant at `x`, held constant past the last knot.
    pub fn value_at(&self, x: f64) -> f64 {
        let k = &self.knots;
        if x <= k[0].0 {
            return k[0].1;
        }
        let j = k.partition_point(|p| p.0 < x);
        if j >= k.len() {
            return k[k.len() - 1].1;
        }
        let (x0, y0) = k[j - 1];
        let (x1, y1) = k[j];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// True when `(x, y)` lies on or below the majorant, up to the rounding
    /// error of the cross product against the enclosing segment.
    pub fn dominates(&self, x: f64, y: f64) -> bool {
        let k = &self.knots;
        if x <= k[0].0 {
            return x == k[0].0 && y <= k[0].1;
        }
        let j = k.partition_point(|p| p.0 < x);
        if j >= k.len() {
            return y <= k[k.len() - 1].1;
        }
        let (x0, y0) = k[j - 1];
        let (x1, y1) = k[j];
        on_or_below(x0, y0, x, y, x1, y1)
    }
}

/// Least concave majorant of a vertex sequence starting at the origin.
///
/// Requires strictly increasing `x`, nondecreasing `y` and a first vertex of
/// `(0, 0)`. The knots returned are a subset of the input vertices.
pub fn lcm(vertices: &[(f64, f64)]) -> Result<ConcaveMajorant> {
    match vertices.first() {
        Some(&(x, y)) if x == 0.0 && y == 0.0 => {}
        _ => return Err(Error::MissingOrigin),
    }
    for (i, w) in vertices.windows(2).enumerate() {
        if !(w[1].0 > w[0].0) || w[1].1 < w[0].1 {
            return Err(Error::UnsortedVertices(i + 1));
        }
    }
    let xs: Vec<f64> = vertices.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = vertices.iter().map(|p| p.1).collect();
    let idx = upper_hull(&xs, &ys);
    Ok(ConcaveMajorant {
        knots: idx.into_iter().map(|i| vertices[i]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force hull: a vertex is a knot iff no pair of other vertices
    /// straddling it has a chord passing on or above it.
    fn brute_force_hull(v: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let n = v.len();
        (0..n)
            .filter(|&j| {
                if j == 0 || j == n - 1 {
                    return true;
                }
                !(0..j).any(|i| {
                    (j + 1..n).any(|k| {
                        let t = (v[j].0 - v[i].0) / (v[k].0 - v[i].0);
                        v[i].1 + t * (v[k].1 - v[i].1) >= v[j].1
                    })
                })
            })
            .map(|j| v[j])
            .collect()
    }

    #[test]
    fn spec_examples() {
        let a = [(0.0, 0.0), (1.0, 0.5), (3.0, 1.0)];
        assert_eq!(lcm(&a).unwrap().knots(), &a);
        assert_eq!(brute_force_hull(&a), a.to_vec());

        let b = [(0.0, 0.0), (1.0, 0.5), (1.5, 1.0)];
        assert_eq!(lcm(&b).unwrap().knots(), &[(0.0, 0.0), (1.5, 1.0)]);
        assert_eq!(brute_force_hull(&b), vec![(0.0, 0.0), (1.5, 1.0)]);

        let c = [(0.0, 0.0), (1.0, 1.0)];
        assert_eq!(lcm(&c).unwrap().knots(), &c);
    }

    #[test]
    fn rejects_bad_vertices() {
        assert_eq!(lcm(&[(0.0, 0.0), (2.0, 0.5), (1.0, 1.0)]), Err(Error::UnsortedVertices(2)));
        assert_eq!(lcm(&[(0.0, 0.0), (1.0, 0.5), (2.0, 0.4)]), Err(Error::UnsortedVertices(2)));
        assert_eq!(lcm(&[(1.0, 0.0), (2.0, 1.0)]), Err(Error::MissingOrigin));
        assert_eq!(lcm(&[]), Err(Error::MissingOrigin));
    }

    #[test]
    fn collinear_points_dropped() {
        let v = [(0.0, 0.0), (1.0, 0.25), (2.0, 0.5), (4.0, 1.0)];
        assert_eq!(lcm(&v).unwrap().knots(), &[(0.0, 0.0), (4.0, 1.0)]);
    }

    #[test]
    fn value_at_interpolates() {
        let m = lcm(&[(0.0, 0.0), (1.0, 0.5), (3.0, 1.0)]).unwrap();
        assert_eq!(m.value_at(0.5), 0.25);
        assert_eq!(m.value_at(2.0), 0.75);
        assert_eq!(m.value_at(10.0), 1.0);
        assert_eq!(m.slopes(), vec![0.5, 0.25]);
    }

    proptest::proptest! {
        #[test]
        fn matches_brute_force(steps in proptest::collection::vec((0.01f64..3.0, 0.0f64..2.0), 1..12)) {
            let mut v = vec![(0.0, 0.0)];
            for (dx, dy) in steps {
                let (x, y) = *v.last().unwrap();
                v.push((x + dx, y + dy));
            }
            let m = lcm(&v).unwrap();
            proptest::prop_assert_eq!(m.knots().to_vec(), brute_force_hull(&v));
            let s = m.slopes();
            for w in s.windows(2) {
                proptest::prop_assert!(w[1] < w[0]);
            }
            for &(x, y) in &v {
                proptest::prop_assert!(m.dominates(x, y));
            }
        }
    }
}
