//! Monte Carlo summaries.

/// Mean, population variance and mean square of a set of draws, with
/// standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    pub var: f64,
    pub mse: f64,
    pub se_mean: f64,
    pub se_var: f64,
    pub se_mse: f64,
}

impl Moments {
    pub fn from_draws(draws: &[f64]) -> Self {
        let n = draws.len();
        if n == 0 {
            return Moments {
                count: 0,
                mean: f64::NAN,
                var: f64::NAN,
                mse: f64::NAN,
                se_mean: f64::NAN,
                se_var: f64::NAN,
                se_mse: f64::NAN,
            };
        }
        let nf = n as f64;
        let mean = draws.iter().sum::<f64>() / nf;
        let (mut m2, mut m4) = (0.0, 0.0);
        let (mut s2, mut s4) = (0.0, 0.0);
        for &x in draws {
            let d = x - mean;
            let d2 = d * d;
            m2 += d2;
            m4 += d2 * d2;
            let x2 = x * x;
            s2 += x2;
            s4 += x2 * x2;
        }
        let var = m2 / nf;
        let m4 = m4 / nf;
        let sq = s2 / nf;
        let sq_var = (s4 / nf - sq * sq).max(0.0);
        Moments {
            count: n,
            mean,
            var,
            mse: var + mean * mean,
            se_mean: (var / nf).sqrt(),
            se_var: ((m4 - var * var).max(0.0) / nf).sqrt(),
            se_mse: (sq_var / nf).sqrt(),
        }
    }

    /// Moments of `draws[i] * scale`.
    pub fn scaled(draws: &[f64], scale: f64) -> Self {
        let v: Vec<f64> = draws.iter().map(|x| x * scale).collect();
        Self::from_draws(&v)
    }
}

/// Two-sample Kolmogorov-Smirnov statistic. Inputs need not be sorted.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Critical value of the two-sample KS statistic at level `alpha`
/// (asymptotic).
pub fn ks_critical(alpha: f64, na: usize, nb: usize) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((na + nb) as f64 / (na as f64 * nb as f64)).sqrt()
}
