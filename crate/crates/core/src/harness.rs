//! Replicated experiments: draw samples, apply the boundary estimators, and
//! aggregate the scaled errors `n^beta (estimate - f(0))`.
//!
//! Every estimator in a replication sees the same sample. Variances use the
//! divisor `reps`, so `mse = var + mean^2` exactly.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::boundary::{BoundaryFit, Method, DEFAULT_CSTAR, DEFAULT_ORDER_STAT_A};
use crate::error::{Error, Result};
use crate::exec::{map_reps, Exec};
use crate::penalized::{default_alpha0, penalized_zero, DEFAULT_Q};
use crate::sampling::{DistributionSpec, Family};
use crate::stats::Moments;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// `n^(1/3)`, for estimators tuned to a nonzero first derivative.
    NOneThird,
    /// `n^(2/5)`, for estimators tuned to a nonzero second derivative.
    NTwoFifths,
}

impl Scaling {
    pub fn exponent(self) -> f64 {
        match self {
            Scaling::NOneThird => 1.0 / 3.0,
            Scaling::NTwoFifths => 2.0 / 5.0,
        }
    }

    pub fn for_k(k: u32) -> Self {
        if k == 2 {
            Scaling::NTwoFifths
        } else {
            Scaling::NOneThird
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Scaling::NOneThird => "n_one_third",
            Scaling::NTwoFifths => "n_two_fifths",
        }
    }
}

impl FromStr for Scaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "n_one_third" | "1/3" => Ok(Scaling::NOneThird),
            "n_two_fifths" | "2/5" => Ok(Scaling::NTwoFifths),
            other => Err(Error::Config(format!("unknown scaling {other:?}"))),
        }
    }
}

/// Pilot smoothing parameter for the penalized estimator.
#[derive(Debug, Clone, PartialEq)]
pub enum Alpha0 {
    /// Tabulated and interpolated defaults.
    Auto,
    Fixed(f64),
    PerN(Vec<(usize, f64)>),
}

impl Alpha0 {
    pub fn for_n(&self, n: usize) -> Result<f64> {
        match self {
            Alpha0::Auto => Ok(default_alpha0(n)),
            Alpha0::Fixed(a) => Ok(*a),
            Alpha0::PerN(v) => v
                .iter()
                .find(|p| p.0 == n)
                .map(|p| p.1)
                .ok_or_else(|| Error::Config(format!("alpha0 has no entry for n = {n}"))),
        }
    }
}

impl fmt::Display for Alpha0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha0::Auto => f.write_str("auto"),
            Alpha0::Fixed(a) => write!(f, "{a}"),
            Alpha0::PerN(v) => {
                let parts: Vec<String> = v.iter().map(|(n, a)| format!("{n}:{a}")).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub distribution: DistributionSpec,
    pub sample_sizes: Vec<usize>,
    pub reps: u64,
    pub estimators: Vec<Method>,
    pub scaling: Scaling,
    pub seed: u64,
    pub alpha0: Alpha0,
    pub q: f64,
    pub c_star: f64,
    pub order_stat_a: f64,
    pub exec: Exec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            distribution: DistributionSpec::exponential(),
            sample_sizes: vec![50, 100, 200, 10_000],
            reps: 10_000,
            estimators: vec![Method::SimpleK1, Method::AdaptiveK1, Method::Penalized],
            scaling: Scaling::NOneThird,
            seed: 1,
            alpha0: Alpha0::Auto,
            q: DEFAULT_Q,
            c_star: DEFAULT_CSTAR,
            order_stat_a: DEFAULT_ORDER_STAT_A,
            exec: Exec::default(),
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment. Unset keys keep
    /// their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "distribution" => {
                    let family: Family = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
                    cfg.distribution = DistributionSpec { family };
                }
                "sample_sizes" => {
                    cfg.sample_sizes = value
                        .split(',')
                        .map(|v| parse_num::<f64>(key, v).map(|x| x as usize))
                        .collect::<Result<_>>()?;
                }
                "reps" => cfg.reps = parse_num::<f64>(key, value)? as u64,
                "estimators" => {
                    cfg.estimators = value
                        .split(',')
                        .map(str::trim)
                        .filter(|v| !v.is_empty())
                        .map(|v| v.parse::<Method>().map_err(|e| Error::Config(e.to_string())))
                        .collect::<Result<_>>()?;
                }
                "scaling" => cfg.scaling = value.parse()?,
                "seed" => cfg.seed = parse_num(key, value)?,
                "alpha0" => {
                    cfg.alpha0 = if value == "auto" {
                        Alpha0::Auto
                    } else if value.contains(':') {
                        Alpha0::PerN(
                            value
                                .split(',')
                                .map(|p| {
                                    let (n, a) = p
                                        .split_once(':')
                                        .ok_or_else(|| Error::Config(format!("alpha0: bad entry {p:?}")))?;
                                    Ok((parse_num::<f64>(key, n)? as usize, parse_num(key, a)?))
                                })
                                .collect::<Result<_>>()?,
                        )
                    } else {
                        Alpha0::Fixed(parse_num(key, value)?)
                    }
                }
                "q" => cfg.q = parse_num(key, value)?,
                "c_star" => cfg.c_star = parse_num(key, value)?,
                "order_stat_a" => cfg.order_stat_a = parse_num(key, value)?,
                "exec" => {
                    cfg.exec = match value {
                        "parallel" => Exec::Parallel,
                        "sequential" => Exec::Sequential,
                        other => return Err(Error::Config(format!("exec: unknown mode {other:?}"))),
                    }
                }
                other => return Err(Error::Config(format!("unknown key {other:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical text form; parses back to the same config.
    pub fn to_text(&self) -> String {
        let est: Vec<&str> = self.estimators.iter().map(|m| m.tag()).collect();
        let sizes: Vec<String> = self.sample_sizes.iter().map(|n| n.to_string()).collect();
        format!(
            "distribution = {}\nsample_sizes = {}\nreps = {}\nestimators = {}\nscaling = {}\nseed = {}\nalpha0 = {}\nq = {:?}\nc_star = {:?}\norder_stat_a = {:?}\n",
            self.distribution.family,
            sizes.join(","),
            self.reps,
            est.join(","),
            self.scaling.tag(),
            self.seed,
            self.alpha0,
            self.q,
            self.c_star,
            self.order_stat_a,
        )
    }

    /// FNV-1a hash of [`Self::to_text`].
    pub fn hash(&self) -> u64 {
        self.to_text().bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
            (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.iter().any(|&n| n < 2) {
            return Err(Error::Config("sample sizes must be at least 2".into()));
        }
        if matches!(self.distribution.family, Family::Custom { .. }) && self.distribution.analytic().is_none() {
            return Err(Error::Config("custom distribution needs analytic boundary values".into()));
        }
        for &m in &self.estimators {
            if Scaling::for_k(m.k()) != self.scaling {
                return Err(Error::Config(format!(
                    "estimator {m} needs scaling {}, config has {}",
                    Scaling::for_k(m.k()).tag(),
                    self.scaling.tag()
                )));
            }
            if m == Method::EndpointOne && self.upper_endpoint().is_none() {
                return Err(Error::Config("endpoint_one needs a distribution with bounded support".into()));
            }
        }
        if !(self.q > 0.0 && self.q < 0.5) {
            return Err(Error::Config(format!("q must lie in (0, 0.5), got {}", self.q)));
        }
        if !(self.c_star > 0.0) || !(self.order_stat_a > 0.0) {
            return Err(Error::Config("c_star and order_stat_a must be positive".into()));
        }
        for &n in &self.sample_sizes {
            if self.estimators.contains(&Method::Penalized) {
                self.alpha0.for_n(n)?;
            }
        }
        Ok(())
    }

    fn upper_endpoint(&self) -> Option<f64> {
        self.distribution.analytic().and_then(|a| a.support_upper)
    }

    /// Value the estimator is consistent for.
    fn target(&self, m: Method) -> Result<f64> {
        let a = self
            .distribution
            .analytic()
            .ok_or_else(|| Error::Config("distribution has no analytic boundary values".into()))?;
        if m == Method::EndpointOne {
            let upper = self.upper_endpoint().ok_or_else(|| Error::Config("unbounded support".into()))?;
            return self
                .distribution
                .density(upper)
                .ok_or_else(|| Error::Config("density unknown at the upper endpoint".into()));
        }
        Ok(a.f0)
    }
}

/// Aggregates for one `(estimator, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub method: Method,
    pub n: usize,
    pub moments: Moments,
    /// Replications where the penalized pilot fell back to the `beta` floor.
    pub fallbacks: u64,
    /// Replications where the estimator returned an error; excluded.
    pub failures: u64,
    pub reps: u64,
}

impl CellReport {
    pub fn flags(&self) -> String {
        let mut parts = Vec::new();
        if self.fallbacks > 0 {
            parts.push(format!("fallback={}", self.fallbacks));
        }
        if self.failures > 0 {
            parts.push(format!("failed={}", self.failures));
        }
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join(";")
        }
    }

    pub fn fallback_rate(&self) -> f64 {
        (self.fallbacks + self.failures) as f64 / self.reps as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub cells: Vec<CellReport>,
    pub config_hash: u64,
    pub seed: u64,
}

impl ExperimentReport {
    pub fn cell(&self, method: Method, n: usize) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.method == method && c.n == n)
    }

    /// True if any cell had more than `limit` of its replications fall back
    /// or fail.
    pub fn fallback_exceeds(&self, limit: f64) -> bool {
        self.cells.iter().any(|c| c.fallback_rate() > limit)
    }
}

#[derive(Debug, Clone, Copy)]
enum Outcome {
    Value(f64, bool),
    Failed,
}

fn mix_seed(seed: u64, n: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn estimate(cfg: &ExperimentConfig, fit: &BoundaryFit<'_>, m: Method, alpha0: f64) -> Result<(f64, bool)> {
    let plain = |r: Result<crate::boundary::ZeroEstimate>| r.map(|e| (e.value, false));
    match m {
        Method::SimpleK1 => Ok((fit.simple_zero().value, false)),
        Method::AdaptiveK1 => plain(fit.adaptive_zero(cfg.c_star)),
        Method::SimpleK2 => Ok((fit.simple_zero_k2().value, false)),
        Method::AdaptiveK2 => plain(fit.adaptive_zero_k2(cfg.c_star)),
        Method::OrderStat => plain(fit.order_stat_zero(cfg.order_stat_a)),
        Method::NumericalDerivative => plain(fit.numerical_derivative_zero(cfg.order_stat_a)),
        Method::EndpointOne => plain(fit.endpoint_one(cfg.upper_endpoint().unwrap_or(f64::NAN))),
        Method::Penalized => {
            let p = penalized_zero(fit.sample(), alpha0, cfg.q)?;
            Ok((p.value, p.recipe.fallback))
        }
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let beta = cfg.scaling.exponent();
    let targets: Vec<f64> = cfg.estimators.iter().map(|&m| cfg.target(m)).collect::<Result<_>>()?;
    let mut cells = Vec::new();
    for &n in &cfg.sample_sizes {
        let seed = mix_seed(cfg.seed, n);
        let alpha0 = if cfg.estimators.contains(&Method::Penalized) {
            cfg.alpha0.for_n(n)?
        } else {
            f64::NAN
        };
        let scale = (n as f64).powf(beta);
        let rows: Vec<Result<Vec<Outcome>>> = map_reps(
            cfg.exec,
            cfg.reps,
            || (),
            |_, rep| {
                let sample = cfg.distribution.draw(n, seed, rep)?;
                let fit = BoundaryFit::new(&sample)?;
                Ok(cfg
                    .estimators
                    .iter()
                    .zip(&targets)
                    .map(|(&m, &target)| match estimate(cfg, &fit, m, alpha0) {
                        Ok((v, fb)) => Outcome::Value(scale * (v - target), fb),
                        Err(_) => Outcome::Failed,
                    })
                    .collect())
            },
        );
        let k = cfg.estimators.len();
        let mut draws = vec![Vec::with_capacity(cfg.reps as usize); k];
        let mut fallbacks = vec![0u64; k];
        let mut failures = vec![0u64; k];
        for row in rows {
            for (j, o) in row?.into_iter().enumerate() {
                match o {
                    Outcome::Value(v, fb) => {
                        draws[j].push(v);
                        fallbacks[j] += u64::from(fb);
                    }
                    Outcome::Failed => failures[j] += 1,
                }
            }
        }
        for (j, &m) in cfg.estimators.iter().enumerate() {
            cells.push(CellReport {
                method: m,
                n,
                moments: Moments::from_draws(&draws[j]),
                fallbacks: fallbacks[j],
                failures: failures[j],
                reps: cfg.reps,
            });
        }
    }
    Ok(ExperimentReport {
        config: cfg.clone(),
        cells,
        config_hash: cfg.hash(),
        seed: cfg.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

pub const CSV_HEADER: &str = "estimator,n,mean,var,mse,se_mean,se_var,flags";

fn scaled_label(m: Method, scaling: Scaling) -> String {
    let rate = match scaling {
        Scaling::NOneThird => "n^(1/3)",
        Scaling::NTwoFifths => "n^(2/5)",
    };
    let target = if m == Method::EndpointOne { "f(1)" } else { "f(0)" };
    format!("{rate}({} - {target})", m.tag())
}

pub fn emit_table(report: &ExperimentReport, format: TableFormat) -> String {
    let mut s = String::new();
    match format {
        TableFormat::Csv => {
            s.push_str(CSV_HEADER);
            s.push('\n');
            for c in &report.cells {
                let m = &c.moments;
                let _ = writeln!(
                    s,
                    "{},{},{:?},{:?},{:?},{:?},{:?},{}",
                    c.method.tag(),
                    c.n,
                    m.mean,
                    m.var,
                    m.mse,
                    m.se_mean,
                    m.se_var,
                    c.flags()
                );
            }
        }
        TableFormat::Markdown => {
            let cfg = &report.config;
            let _ = writeln!(
                s,
                "Simulated mean, variance (divisor = reps) and MSE at the {} distribution; reps = {}, seed = {}, config hash = {:016x}\n",
                cfg.distribution.family, cfg.reps, report.seed, report.config_hash
            );
            let _ = write!(s, "| Estimator | |");
            for n in &cfg.sample_sizes {
                let _ = write!(s, " n = {n} |");
            }
            s.push_str("\n|---|---|");
            for _ in &cfg.sample_sizes {
                s.push_str("---:|");
            }
            s.push('\n');
            for &m in &cfg.estimators {
                for (i, stat) in ["Mean", "Var", "MSE"].iter().enumerate() {
                    let label = if i == 0 { scaled_label(m, cfg.scaling) } else { String::new() };
                    let _ = write!(s, "| {label} | {stat} |");
                    for &n in &cfg.sample_sizes {
                        let c = report.cell(m, n).map(|c| c.moments);
                        let v = c.map_or(f64::NAN, |c| [c.mean, c.var, c.mse][i]);
                        let _ = write!(s, " {v:.3} |");
                    }
                    s.push('\n');
                }
            }
        }
    }
    s
}

/// One parsed line of the CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub method: Method,
    pub n: usize,
    pub mean: f64,
    pub var: f64,
    pub mse: f64,
    pub se_mean: f64,
    pub se_var: f64,
    pub flags: String,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "missing header".into(),
            })
        }
    }
    lines
        .map(|(i, l)| {
            let err = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.into(),
            };
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 8 {
                return Err(err("expected 8 fields"));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| err("bad number"));
            Ok(CsvRow {
                method: f[0].parse().map_err(|_| err("unknown estimator"))?,
                n: f[1].trim().parse().map_err(|_| err("bad n"))?,
                mean: num(f[2])?,
                var: num(f[3])?,
                mse: num(f[4])?,
                se_mean: num(f[5])?,
                se_var: num(f[6])?,
                flags: f[7].trim().to_string(),
            })
        })
        .collect()
}
