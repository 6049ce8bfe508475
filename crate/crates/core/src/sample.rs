use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// A sorted sample of nonnegative observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    /// Validates and sorts raw observations. Duplicates are kept.
    pub fn ingest(raw: &[f64]) -> Result<Self> {
        Self::from_vec(raw.to_vec())
    }

    pub fn from_vec(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue(i));
            }
            if v < 0.0 {
                return Err(Error::NegativeValue(i));
            }
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Sample { values })
    }

    /// Parses the text format: one decimal literal per line, blank lines and
    /// lines starting with `#` ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: f64 = line.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("not a number: {line:?}"),
            })?;
            raw.push(v);
        }
        Self::from_vec(raw)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("{}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    /// Serializes in the ingestion format (round-trip exact).
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 20);
        for v in &self.values {
            let _ = writeln!(out, "{v:?}");
        }
        out
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// The order statistic X_{m:n}, with `m` one-based.
    pub fn order_stat(&self, m: usize) -> Result<f64> {
        if m == 0 || m > self.n() {
            return Err(Error::OrderStatOutOfRange { m, n: self.n() });
        }
        Ok(self.values[m - 1])
    }

    /// Multiplies every observation by `sigma > 0`.
    pub fn scaled(&self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {sigma}")));
        }
        Ok(Sample {
            values: self.values.iter().map(|v| v * sigma).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ingest_sorts() {
        let s = Sample::ingest(&[3.0, 1.0]).unwrap();
        assert_eq!(s.values(), &[1.0, 3.0]);
        assert_eq!(s.n(), 2);
        assert_eq!(Sample::ingest(&[1.0]).unwrap().values(), &[1.0]);
    }

    #[test]
    fn ingest_rejects_bad_input() {
        assert_eq!(Sample::ingest(&[]), Err(Error::EmptySample));
        let err = Sample::ingest(&[1.0, -0.5]).unwrap_err();
        assert_eq!(err, Error::NegativeValue(1));
        assert_eq!(err.to_string(), "negative value at index 1");
        assert_eq!(Sample::ingest(&[f64::NAN]), Err(Error::NonFiniteValue(0)));
        assert_eq!(Sample::ingest(&[0.0, f64::INFINITY]), Err(Error::NonFiniteValue(1)));
    }

    #[test]
    fn duplicates_preserved() {
        let s = Sample::ingest(&[2.0, 2.0, 1.0]).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 2.0]);
    }

    #[test]
    fn parse_skips_comments() {
        let s = Sample::parse("# header\n3.5\n\n  1e-1 \n# trailing\n").unwrap();
        assert_eq!(s.values(), &[0.1, 3.5]);
        assert!(matches!(Sample::parse("1\nabc\n"), Err(Error::Parse { line: 2, .. })));
        assert_eq!(Sample::parse("# only comments\n"), Err(Error::EmptySample));
    }

    #[test]
    fn text_round_trip() {
        let s = Sample::ingest(&[0.1, 1.0 / 3.0, 2.718281828459045]).unwrap();
        assert_eq!(Sample::parse(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn order_stat_bounds() {
        let s = Sample::ingest(&[1.0, 3.0]).unwrap();
        assert_eq!(s.order_stat(1).unwrap(), 1.0);
        assert_eq!(s.order_stat(2).unwrap(), 3.0);
        assert!(s.order_stat(0).is_err());
        assert!(s.order_stat(3).is_err());
    }
}
