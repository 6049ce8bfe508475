#![allow(dead_code)]

use grenander::Sample;

/// Log-likelihood `(1/n) sum log f(X_i)` of heights on the blocks
/// `(x_{i-1}, x_i]` of the distinct sorted observations.
fn mean_loglik(counts: &[usize], heights: &[f64], n: usize) -> f64 {
    counts
        .iter()
        .zip(heights)
        .map(|(&c, &h)| c as f64 * h.ln())
        .sum::<f64>()
        / n as f64
}

/// Distinct sorted values with multiplicities.
pub fn distinct(s: &Sample) -> (Vec<f64>, Vec<usize>) {
    let mut xs: Vec<f64> = Vec::new();
    let mut counts = Vec::new();
    for &v in s.values() {
        if xs.last() == Some(&v) {
            *counts.last_mut().unwrap() += 1;
        } else {
            xs.push(v);
            counts.push(1);
        }
    }
    (xs, counts)
}

/// Maximum likelihood over nonincreasing densities by enumerating every
/// partition of the distinct observations into consecutive blocks, with the
/// block-average height on each. Returns `(loglik, heights per distinct
/// value)`.
pub fn npmle_brute_force(s: &Sample) -> (f64, Vec<f64>) {
    let (xs, counts) = distinct(s);
    let m = xs.len();
    let n = s.n();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for mask in 0u32..(1 << (m - 1)) {
        // bit i set: a block ends after distinct value i
        let mut heights = Vec::with_capacity(m);
        let mut start = 0;
        let mut ok = true;
        let mut prev = f64::INFINITY;
        for i in 0..m {
            if i == m - 1 || mask & (1 << i) != 0 {
                let left = if start == 0 { 0.0 } else { xs[start - 1] };
                let c: usize = counts[start..=i].iter().sum();
                let h = c as f64 / n as f64 / (xs[i] - left);
                if h > prev {
                    ok = false;
                    break;
                }
                prev = h;
                heights.extend(std::iter::repeat(h).take(i + 1 - start));
                start = i + 1;
            }
        }
        if ok {
            let ll = mean_loglik(&counts, &heights, n);
            if ll > best.0 {
                best = (ll, heights);
            }
        }
    }
    best
}

/// Penalized objective `(1/n) sum log f(X_i) - alpha f(0+)` maximized over
/// nonincreasing step functions with mass at most one.
///
/// Heights are `h1 * prod(r_j)` for ratios `r_j` in `(0, 1]`; for fixed
/// ratios the best `h1` is `min(1/alpha, 1/mass(ratios))`, so only the ratios
/// are searched, by repeated grid refinement around the incumbent.
pub fn penalized_grid_search(s: &Sample, alpha: f64) -> f64 {
    let (xs, counts) = distinct(s);
    let m = xs.len();
    let n = s.n();
    let widths: Vec<f64> = (0..m).map(|i| xs[i] - if i == 0 { 0.0 } else { xs[i - 1] }).collect();
    let objective = |r: &[f64]| -> f64 {
        let mut rel = vec![1.0; m];
        for j in 1..m {
            rel[j] = rel[j - 1] * r[j - 1];
        }
        let mass: f64 = rel.iter().zip(&widths).map(|(a, w)| a * w).sum();
        let h1 = (1.0 / alpha).min(1.0 / mass);
        let heights: Vec<f64> = rel.iter().map(|a| a * h1).collect();
        mean_loglik(&counts, &heights, n) - alpha * h1
    };
    let dims = m - 1;
    if dims == 0 {
        return objective(&[]);
    }
    let mut center = vec![0.5; dims];
    let mut half = 0.5;
    let mut best = (objective(&center), center.clone());
    let points = 11usize;
    for _ in 0..40 {
        let mut idx = vec![0usize; dims];
        loop {
            let r: Vec<f64> = idx
                .iter()
                .zip(&center)
                .map(|(&i, &c)| {
                    let v = c - half + 2.0 * half * i as f64 / (points - 1) as f64;
                    v.clamp(1e-9, 1.0)
                })
                .collect();
            let v = objective(&r);
            if v > best.0 {
                best = (v, r);
            }
            let mut d = 0;
            while d < dims {
                idx[d] += 1;
                if idx[d] < points {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == dims {
                break;
            }
        }
        center = best.1.clone();
        half *= 0.6;
    }
    best.0
}

/// Samples from a small deterministic generator, for oracle sweeps.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407))
    }

    pub fn unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    /// Positive values, some repeated, on a coarse grid.
    pub fn sample(&mut self, n: usize) -> Sample {
        let v: Vec<f64> = (0..n).map(|_| (1.0 + (self.unit() * 40.0).floor()) / 10.0).collect();
        Sample::ingest(&v).unwrap()
    }
}

/// Structural checks on one sample: majorant dominates and touches the ECDF,
/// slopes strictly decrease, mass is one, and the switching relation holds
/// at the given `(a, x)` pairs. Returns the number of violations.
pub fn structural_violations(s: &Sample, pairs: &[(f64, f64)]) -> usize {
    use grenander::estimator::{ecdf_lcm, ecdf_vertices};
    let mut bad = 0;
    let m = ecdf_lcm(s).unwrap();
    let verts = ecdf_vertices(s);
    for &(x, y) in &verts {
        if !m.dominates(x, y) {
            bad += 1;
        }
    }
    for &(kx, ky) in m.knots() {
        if !verts.iter().any(|&(x, y)| x == kx && y == ky) {
            bad += 1;
        }
    }
    if m.slopes().windows(2).any(|w| !(w[1] < w[0])) {
        bad += 1;
    }
    let d = grenander::grenander(s).unwrap();
    if (d.mass() - 1.0).abs() > 1e-12 {
        bad += 1;
    }
    for &(a, x) in pairs {
        if !grenander::switching_check(s, a, x).unwrap() {
            bad += 1;
        }
    }
    bad
}

/// Randomized sweep of `triples` (sample, a, x) cases with `n <= 200`.
pub fn structural_sweep(triples: usize, seed: u64) -> usize {
    let mut g = Lcg::new(seed);
    let per_sample = 10;
    let mut bad = 0;
    for _ in 0..triples / per_sample {
        let n = 1 + (g.unit() * 200.0) as usize;
        let s = if g.unit() < 0.5 {
            g.sample(n)
        } else {
            let v: Vec<f64> = (0..n).map(|_| -g.unit().ln()).collect();
            Sample::ingest(&v).unwrap()
        };
        let top = grenander::grenander(&s).unwrap().first_height();
        let pairs: Vec<(f64, f64)> = (0..per_sample)
            .map(|_| (1.2 * top * g.unit(), 1.2 * s.max() * g.unit()))
            .collect();
        bad += structural_violations(&s, &pairs);
    }
    bad
}

/// Largest gap between brute-force optima and the library's objectives over
/// random small samples: Grenander with `n <= 8`, penalized with `n <= 5`.
pub fn oracle_gaps(cases: usize, seed: u64) -> (f64, f64) {
    let mut g = Lcg::new(seed);
    let mut worst_mle: f64 = 0.0;
    let mut worst_pen: f64 = 0.0;
    for i in 0..cases {
        let s = g.sample(2 + i % 7);
        let d = grenander::grenander(&s).unwrap();
        let (xs, counts) = distinct(&s);
        let ll: f64 = xs
            .iter()
            .zip(&counts)
            .map(|(&x, &c)| c as f64 * d.eval(x).unwrap().ln())
            .sum::<f64>()
            / s.n() as f64;
        let (best, _) = npmle_brute_force(&s);
        worst_mle = worst_mle.max((best - ll).abs());

        let s = g.sample(1 + i % 5);
        let alpha = [0.01, 0.1, 0.3, 1.0][i % 4];
        let fit = grenander::penalized_fit(&s, alpha).unwrap();
        let brute = penalized_grid_search(&s, alpha);
        worst_pen = worst_pen.max((brute - fit.objective).abs());
    }
    (worst_mle, worst_pen)
}
