//! Test distributions and the per-replication RNG contract.
//!
//! Every replication draws from its own ChaCha stream selected by
//! `(seed, rep_index)`, so results do not depend on the order in which
//! replications are executed.

use std::f64::consts::{FRAC_2_PI, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sample::Sample;

/// Independent generator for replication `rep` under `seed`.
pub fn rng_for(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Known boundary behaviour of a density on `[0, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Analytic {
    pub f0: f64,
    pub fprime0: f64,
    pub fsecond0: f64,
    pub support_upper: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub enum Family {
    Exponential,
    HalfNormal,
    Uniform01,
    /// Inverse-CDF sampler supplied by the caller.
    Custom {
        inverse_cdf: fn(f64) -> f64,
        analytic: Option<Analytic>,
    },
}

impl PartialEq for Family {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (
                Family::Custom {
                    inverse_cdf: a,
                    analytic: x,
                },
                Family::Custom {
                    inverse_cdf: b,
                    analytic: y,
                },
            ) => std::ptr::fn_addr_eq(*a, *b) && x == y,
            _ => std::mem::discriminant(self) == std::mem::discriminant(other),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Exponential => "exponential",
            Family::HalfNormal => "half_normal",
            Family::Uniform01 => "uniform01",
            Family::Custom { .. } => "custom_inverse_cdf",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "exponential" | "exp" => Ok(Family::Exponential),
            "half_normal" | "halfnormal" => Ok(Family::HalfNormal),
            "uniform01" | "uniform" => Ok(Family::Uniform01),
            other => Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        }
    }
}

/// `(f(0), f^(k)(0), k)` plus a flag for densities violating the
/// nonvanishing-derivative condition at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundary {
    pub f0: f64,
    pub fk0: f64,
    pub k: u32,
    pub degenerate: bool,
}

/// A distribution to sample from, with its analytic boundary values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    pub family: Family,
}

impl DistributionSpec {
    pub fn exponential() -> Self {
        DistributionSpec {
            family: Family::Exponential,
        }
    }

    pub fn half_normal() -> Self {
        DistributionSpec {
            family: Family::HalfNormal,
        }
    }

    pub fn uniform01() -> Self {
        DistributionSpec {
            family: Family::Uniform01,
        }
    }

    pub fn analytic(&self) -> Option<Analytic> {
        let hn0 = FRAC_2_PI.sqrt();
        match self.family {
            Family::Exponential => Some(Analytic {
                f0: 1.0,
                fprime0: -1.0,
                fsecond0: 1.0,
                support_upper: None,
            }),
            Family::HalfNormal => Some(Analytic {
                f0: hn0,
                fprime0: 0.0,
                fsecond0: -hn0,
                support_upper: None,
            }),
            Family::Uniform01 => Some(Analytic {
                f0: 1.0,
                fprime0: 0.0,
                fsecond0: 0.0,
                support_upper: Some(1.0),
            }),
            Family::Custom { analytic, .. } => analytic,
        }
    }

    /// Maps a uniform variate to a draw.
    #[inline]
    fn transform<R: Rng>(&self, rng: &mut R) -> f64 {
        match self.family {
            Family::Exponential => -(1.0 - rng.random::<f64>()).ln(),
            Family::HalfNormal => {
                // Box-Muller; 1 - u keeps the logarithm finite.
                let u1 = 1.0 - rng.random::<f64>();
                let u2 = rng.random::<f64>();
                ((-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()).abs()
            }
            Family::Uniform01 => rng.random::<f64>(),
            Family::Custom { inverse_cdf, .. } => inverse_cdf(rng.random::<f64>()),
        }
    }

    /// Draws `n` observations for replication `rep` under `seed`.
    pub fn draw(&self, n: usize, seed: u64, rep: u64) -> Result<Sample> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let mut rng = rng_for(seed, rep);
        let raw: Vec<f64> = (0..n).map(|_| self.transform(&mut rng)).collect();
        Sample::from_vec(raw)
    }

    /// Distribution function, where it is known in closed form.
    pub fn cdf(&self, x: f64) -> Option<f64> {
        if x <= 0.0 {
            return Some(0.0);
        }
        match self.family {
            Family::Exponential => Some(1.0 - (-x).exp()),
            Family::HalfNormal => Some(erf(x / std::f64::consts::SQRT_2)),
            Family::Uniform01 => Some(x.min(1.0)),
            Family::Custom { .. } => None,
        }
    }

    pub fn density(&self, x: f64) -> Option<f64> {
        if x < 0.0 {
            return Some(0.0);
        }
        match self.family {
            Family::Exponential => Some((-x).exp()),
            Family::HalfNormal => Some(FRAC_2_PI.sqrt() * (-0.5 * x * x).exp()),
            Family::Uniform01 => Some(if x <= 1.0 { 1.0 } else { 0.0 }),
            Family::Custom { .. } => None,
        }
    }

    /// `(f(0), f^(k)(0), k)` with `k` the first nonvanishing derivative.
    pub fn analytic_boundary(&self) -> Result<Boundary> {
        let a = self
            .analytic()
            .ok_or_else(|| Error::InvalidArgument("custom family without analytic block".into()))?;
        let b = if a.fprime0 != 0.0 {
            Boundary {
                f0: a.f0,
                fk0: a.fprime0,
                k: 1,
                degenerate: false,
            }
        } else if a.fsecond0 != 0.0 {
            Boundary {
                f0: a.f0,
                fk0: a.fsecond0,
                k: 2,
                degenerate: false,
            }
        } else {
            Boundary {
                f0: a.f0,
                fk0: 0.0,
                k: 0,
                degenerate: true,
            }
        };
        Ok(b)
    }
}

/// Error function: power series below 2.5, continued fraction above.
pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x < 2.5 {
        // Maclaurin series; converges quickly on this range.
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -x2 / k;
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum * 2.0 / PI.sqrt()
    } else {
        1.0 - erfc_cf(x)
    }
}

/// Complementary error function by Lentz's continued fraction, for x >= 2.5.
fn erfc_cf(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for i in 1..300 {
        let a = i as f64 / 2.0;
        d = x + a * d;
        d = if d.abs() < tiny { tiny } else { d };
        c = x + a / c;
        c = if c.abs() < tiny { tiny } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (f * PI.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_reference_values() {
        // Values from standard tables.
        assert!((erf(0.5) - 0.520_499_877_813_046_5).abs() < 1e-14);
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 1e-14);
        assert!((erf(2.0) - 0.995_322_265_018_952_7).abs() < 1e-14);
        assert!((erf(3.0) - 0.999_977_909_503_001_4).abs() < 1e-14);
        assert_eq!(erf(-1.0), -erf(1.0));
    }

    #[test]
    fn draws_are_deterministic() {
        let spec = DistributionSpec::exponential();
        let a = spec.draw(50, 7, 3).unwrap();
        let b = spec.draw(50, 7, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, spec.draw(50, 7, 4).unwrap());
        assert_ne!(a, spec.draw(50, 8, 3).unwrap());
        assert!(spec.draw(0, 1, 0).is_err());
    }

    #[test]
    fn boundary_values() {
        let e = DistributionSpec::exponential().analytic_boundary().unwrap();
        assert_eq!((e.f0, e.fk0, e.k, e.degenerate), (1.0, -1.0, 1, false));
        let h = DistributionSpec::half_normal().analytic_boundary().unwrap();
        assert!((h.f0 - 0.797_884_560_802_865_4).abs() < 1e-15);
        assert_eq!(h.fk0, -h.f0);
        assert_eq!(h.k, 2);
        let u = DistributionSpec::uniform01().analytic_boundary().unwrap();
        assert!(u.degenerate);
        let custom = DistributionSpec {
            family: Family::Custom {
                inverse_cdf: |u| u,
                analytic: None,
            },
        };
        assert!(custom.analytic_boundary().is_err());
    }

    #[test]
    fn half_normal_derivatives_by_finite_differences() {
        let spec = DistributionSpec::half_normal();
        let h = 1e-3;
        let f = |x: f64| spec.density(x).unwrap();
        let a = spec.analytic().unwrap();
        // one-sided differences at the boundary
        let d1 = (f(h) - f(0.0)) / h;
        let d2 = (f(2.0 * h) - 2.0 * f(h) + f(0.0)) / (h * h);
        assert!(d1.abs() < 1e-3);
        assert!((d2 - a.fsecond0).abs() < 1e-3);
    }

    #[test]
    fn family_parsing() {
        assert_eq!("exponential".parse::<Family>().unwrap(), Family::Exponential);
        assert_eq!("half-normal".parse::<Family>().unwrap(), Family::HalfNormal);
        assert!("cauchy".parse::<Family>().is_err());
        assert_eq!(Family::HalfNormal.to_string(), "half_normal");
    }
}
