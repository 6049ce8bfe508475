//! Estimators of the density at the boundaries of its support, all built by
//! evaluating the Grenander estimate at a shrinking abscissa.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimator::{grenander, StepDensity};
use crate::sample::Sample;

/// Minimizer of the limiting mean squared error over the bandwidth multiple,
/// shared by the `k = 1` and `k = 2` adaptive estimators.
pub const DEFAULT_CSTAR: f64 = 0.345;

/// Default multiplier in `m = floor(a n^(2/3))`.
pub const DEFAULT_ORDER_STAT_A: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    SimpleK1,
    AdaptiveK1,
    SimpleK2,
    AdaptiveK2,
    OrderStat,
    NumericalDerivative,
    EndpointOne,
    Penalized,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::SimpleK1,
        Method::AdaptiveK1,
        Method::SimpleK2,
        Method::AdaptiveK2,
        Method::OrderStat,
        Method::NumericalDerivative,
        Method::EndpointOne,
        Method::Penalized,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::SimpleK1 => "simple_k1",
            Method::AdaptiveK1 => "adaptive_k1",
            Method::SimpleK2 => "simple_k2",
            Method::AdaptiveK2 => "adaptive_k2",
            Method::OrderStat => "order_stat",
            Method::NumericalDerivative => "numerical_derivative",
            Method::EndpointOne => "endpoint_one",
            Method::Penalized => "penalized",
        }
    }

    /// The order `k` whose rate `n^(k/(2k+1))` the estimator is tuned for.
    pub fn k(self) -> u32 {
        match self {
            Method::SimpleK2 | Method::AdaptiveK2 => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s.trim() {
            "simple" | "simple_k1" => Method::SimpleK1,
            "adaptive" | "adaptive_k1" => Method::AdaptiveK1,
            "simple2" | "simple_k2" => Method::SimpleK2,
            "adaptive2" | "adaptive_k2" => Method::AdaptiveK2,
            "orderstat" | "order_stat" => Method::OrderStat,
            "numderiv" | "numerical_derivative" => Method::NumericalDerivative,
            "endpoint" | "endpoint_one" => Method::EndpointOne,
            "penalized" => Method::Penalized,
            other => return Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        };
        Ok(m)
    }
}

/// Plug-in quantities used by the adaptive estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveTuning {
    pub c_star: f64,
    /// Estimate of `B_2k`.
    pub b_hat: f64,
    /// Clamped estimate of `f'(0)` (k = 1) or `f''(0)` (k = 2).
    pub deriv_hat: f64,
    /// Abscissa `c* B_hat n^(-1/(2k+1))` at which the estimate is read off.
    pub bandwidth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroEstimate {
    pub value: f64,
    pub method: Method,
    pub tuning: Option<AdaptiveTuning>,
}

impl ZeroEstimate {
    fn plain(value: f64, method: Method) -> Self {
        ZeroEstimate {
            value,
            method,
            tuning: None,
        }
    }
}

/// A sample together with its Grenander estimate, so several boundary
/// estimators can share one hull computation.
#[derive(Debug, Clone)]
pub struct BoundaryFit<'a> {
    sample: &'a Sample,
    density: StepDensity,
}

impl<'a> BoundaryFit<'a> {
    pub fn new(sample: &'a Sample) -> Result<Self> {
        if sample.n() < 2 {
            return Err(Error::SampleTooSmall {
                n: sample.n(),
                min: 2,
            });
        }
        Ok(BoundaryFit {
            sample,
            density: grenander(sample)?,
        })
    }

    pub fn sample(&self) -> &'a Sample {
        self.sample
    }

    pub fn density(&self) -> &StepDensity {
        &self.density
    }

    fn n(&self) -> f64 {
        self.sample.n() as f64
    }

    fn at(&self, x: f64) -> f64 {
        self.density.value(x)
    }

    pub fn simple_zero(&self) -> ZeroEstimate {
        ZeroEstimate::plain(self.at(self.n().cbrt().recip()), Method::SimpleK1)
    }

    pub fn deriv_zero(&self) -> f64 {
        let n = self.n();
        let third = n.cbrt().recip();
        let sixth = n.powf(-1.0 / 6.0);
        let fd = (self.at(sixth) - self.at(third)) / sixth;
        fd.min(-third)
    }

    pub fn adaptive_zero(&self, c_star: f64) -> Result<ZeroEstimate> {
        let simple = self.simple_zero().value;
        if simple <= 0.0 {
            return Err(Error::Degenerate(
                "simple estimate is 0; n^(-1/3) lies beyond the data".into(),
            ));
        }
        let deriv_hat = self.deriv_zero();
        let b_hat = (4.0 * simple).cbrt() * deriv_hat.abs().powf(-2.0 / 3.0);
        let bandwidth = c_star * b_hat / self.n().cbrt();
        Ok(ZeroEstimate {
            value: self.at(bandwidth),
            method: Method::AdaptiveK1,
            tuning: Some(AdaptiveTuning {
                c_star,
                b_hat,
                deriv_hat,
                bandwidth,
            }),
        })
    }

    pub fn simple_zero_k2(&self) -> ZeroEstimate {
        ZeroEstimate::plain(self.at(self.n().powf(-0.2)), Method::SimpleK2)
    }

    pub fn second_deriv_zero(&self) -> f64 {
        let n = self.n();
        let fifth = n.powf(-0.2);
        let eighth = n.powf(-0.125);
        let fd = 2.0 * n.powf(0.25) * (self.at(eighth) - self.at(fifth));
        fd.min(-fifth)
    }

    pub fn adaptive_zero_k2(&self, c_star: f64) -> Result<ZeroEstimate> {
        let simple = self.simple_zero_k2().value;
        if simple <= 0.0 {
            return Err(Error::Degenerate(
                "simple k = 2 estimate is 0; n^(-1/5) lies beyond the data".into(),
            ));
        }
        let deriv_hat = self.second_deriv_zero();
        let b_hat = (36.0 * simple).powf(0.2) * deriv_hat.abs().powf(-0.4);
        let bandwidth = c_star * b_hat * self.n().powf(-0.2);
        Ok(ZeroEstimate {
            value: self.at(bandwidth),
            method: Method::AdaptiveK2,
            tuning: Some(AdaptiveTuning {
                c_star,
                b_hat,
                deriv_hat,
                bandwidth,
            }),
        })
    }

    fn order_index(&self, a: f64) -> Result<usize> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidArgument(format!("a must be positive, got {a}")));
        }
        let m = (a * self.n().powf(2.0 / 3.0)).floor() as usize;
        if m == 0 || m > self.sample.n() {
            return Err(Error::OrderStatOutOfRange {
                m,
                n: self.sample.n(),
            });
        }
        Ok(m)
    }

    pub fn order_stat_zero(&self, a: f64) -> Result<ZeroEstimate> {
        let m = self.order_index(a)?;
        let x = self.sample.order_stat(m)?;
        Ok(ZeroEstimate::plain(self.at(x), Method::OrderStat))
    }

    pub fn numerical_derivative_zero(&self, a: f64) -> Result<ZeroEstimate> {
        let m = self.order_index(a)?;
        let x = self.sample.order_stat(m)?;
        if x <= 0.0 {
            return Err(Error::Degenerate(format!("order statistic X_({m}) is 0")));
        }
        Ok(ZeroEstimate::plain(
            (m as f64 / self.n()) / x,
            Method::NumericalDerivative,
        ))
    }

    pub fn endpoint_one(&self, upper: f64) -> Result<ZeroEstimate> {
        let max = self.sample.max();
        if upper < max {
            return Err(Error::OutsideSupport { max, upper });
        }
        let x = upper - self.n().cbrt().recip();
        let value = self.density.eval(x).map_err(|_| {
            Error::InvalidArgument(format!(
                "upper - n^(-1/3) = {x} is negative; sample too small for this support"
            ))
        })?;
        Ok(ZeroEstimate::plain(value, Method::EndpointOne))
    }
}

/// `f_n(n^(-1/3))`.
pub fn simple_zero(s: &Sample) -> Result<ZeroEstimate> {
    Ok(BoundaryFit::new(s)?.simple_zero())
}

/// Finite-difference estimate of `f'(0)`, clamped to at most `-n^(-1/3)`.
pub fn deriv_zero(s: &Sample) -> Result<f64> {
    Ok(BoundaryFit::new(s)?.deriv_zero())
}

pub fn adaptive_zero(s: &Sample, c_star: f64) -> Result<ZeroEstimate> {
    BoundaryFit::new(s)?.adaptive_zero(c_star)
}

/// `f_n(n^(-1/5))`.
pub fn simple_zero_k2(s: &Sample) -> Result<ZeroEstimate> {
    Ok(BoundaryFit::new(s)?.simple_zero_k2())
}

/// Finite-difference estimate of `f''(0)`, clamped to at most `-n^(-1/5)`.
pub fn second_deriv_zero(s: &Sample) -> Result<f64> {
    Ok(BoundaryFit::new(s)?.second_deriv_zero())
}

pub fn adaptive_zero_k2(s: &Sample, c_star: f64) -> Result<ZeroEstimate> {
    BoundaryFit::new(s)?.adaptive_zero_k2(c_star)
}

/// `f_n(X_(m:n))` with `m = floor(a n^(2/3))`; scale-equivariant.
pub fn order_stat_zero(s: &Sample, a: f64) -> Result<ZeroEstimate> {
    BoundaryFit::new(s)?.order_stat_zero(a)
}

/// `(m/n) / X_(m:n)` with `m = floor(a n^(2/3))`.
pub fn numerical_derivative_zero(s: &Sample, a: f64) -> Result<ZeroEstimate> {
    BoundaryFit::new(s)?.numerical_derivative_zero(a)
}

/// `f_n(upper - n^(-1/3))`, estimating the density at the upper end of a
/// known support.
pub fn endpoint_one(s: &Sample, upper: f64) -> Result<ZeroEstimate> {
    BoundaryFit::new(s)?.endpoint_one(upper)
}
