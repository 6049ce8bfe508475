use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Zero,
    One,
}

/// Normalizing constants for the boundary limit laws of the Grenander
/// estimator evaluated at `c n^(-alpha)` (or `1 - c n^(-alpha)`).
///
/// `a1` scales the fast regime, `b2k`/`a2k` the critical one with
/// `alpha = 1/(2k+1)`, and `a3k` the slow regime where the limit is the
/// two-sided Chernoff-type slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitConstants {
    pub k: u32,
    pub c: f64,
    pub f0: f64,
    pub fk0: f64,
    pub a1: f64,
    pub b2k: f64,
    pub a2k: f64,
    pub a3k: f64,
    pub endpoint: Endpoint,
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

impl LimitConstants {
    /// `f0` is the density at the endpoint and `fk0` its first nonvanishing
    /// derivative there, of order `k`.
    pub fn new(f0: f64, fk0: f64, k: u32, c: f64, endpoint: Endpoint) -> Result<Self> {
        if !(f0 > 0.0) || !f0.is_finite() {
            return Err(Error::InvalidArgument(format!("f0 must be positive, got {f0}")));
        }
        if fk0 == 0.0 || !fk0.is_finite() {
            return Err(Error::InvalidArgument("k-th derivative must be nonzero".into()));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if !(c > 0.0) {
            return Err(Error::InvalidArgument(format!("c must be positive, got {c}")));
        }
        let kf = f64::from(k);
        let a1 = (c / f0).sqrt();
        let (b2k, a3k) = match endpoint {
            Endpoint::Zero => (
                (f0.sqrt() / fk0.abs() * factorial(k + 1)).powf(2.0 / (2.0 * kf + 1.0)),
                (2.0 * factorial(k - 1)).cbrt() * (f0 * fk0 * c.powf(kf - 1.0)).abs().cbrt().recip(),
            ),
            Endpoint::One => (
                (f0.sqrt() / fk0.abs() * factorial(k + 1).powi(2)).powf(1.0 / (2.0 * kf + 1.0)),
                factorial(k - 1).cbrt() * (4.0 * f0 * fk0 * c.powf(kf - 1.0)).abs().cbrt().recip(),
            ),
        };
        let a2k = (b2k / f0).sqrt();
        Ok(LimitConstants {
            k,
            c,
            f0,
            fk0,
            a1,
            b2k,
            a2k,
            a3k,
            endpoint,
        })
    }
}

/// Free-function form of [`LimitConstants::new`].
pub fn constants(f0: f64, fk0: f64, k: u32, c: f64, endpoint: Endpoint) -> Result<LimitConstants> {
    LimitConstants::new(f0, fk0, k, c, endpoint)
}
