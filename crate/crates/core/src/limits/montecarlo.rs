//! Monte Carlo evaluation of Brownian functionals.
//!
//! Replication `r` of seed `s` always draws the same path, whatever the
//! execution mode, and every law requested together is evaluated on that one
//! path.

use std::fmt;
use std::sync::Arc;

use crate::boundary::DEFAULT_CSTAR;
use crate::error::{Error, Result};
use crate::exec::{map_reps, Exec};
use crate::penalized::{ALPHA_CONSTANT, PILOT_BETA};
use crate::sampling::{rng_for, DistributionSpec};
use crate::stats::Moments;

use super::brownian::{BrownianPath, TimeGrid};
use super::constants::{Endpoint, LimitConstants};
use super::functionals::{argmax_functional, sup_penalized_functional, LcmScratch};

/// A Brownian functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Law {
    /// `D_R[W(t)](1)`.
    DrW1,
    /// `D_R[W(t) - t^p](c)`.
    DrDrift { p: u32, c: f64 },
    /// `D[W(t) - t^2](0)` over the two-sided path.
    DTwoSided0,
    /// `argmax_{t >= 0} {W(t) - t}`.
    ArgmaxWMinusT,
    /// `argmax_{t real} {W(t) - t^2}`.
    ArgmaxWMinusT2,
    /// `sup_{t > 0} (W(t) - (c - f0 f'(0) t^2 / 2)) / t`.
    SupPenalized { cpen: f64, f0: f64, fprime0: f64 },
}

impl Law {
    pub fn two_sided(&self) -> bool {
        matches!(self, Law::DTwoSided0 | Law::ArgmaxWMinusT2)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Law::DrW1 => "DR_W_at_1",
            Law::DrDrift { .. } => "DR_drift_at_c",
            Law::DTwoSided0 => "D_twosided_at_0",
            Law::ArgmaxWMinusT => "argmax_W_minus_t",
            Law::ArgmaxWMinusT2 => "argmax_W_minus_t2",
            Law::SupPenalized { .. } => "sup_penalized",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Law::DrDrift { p, c } => write!(f, "{}(p={p},c={c})", self.tag()),
            Law::SupPenalized { cpen, f0, fprime0 } => {
                write!(f, "{}(c={cpen},f0={f0},f1={fprime0})", self.tag())
            }
            _ => f.write_str(self.tag()),
        }
    }
}

/// Grid recipe for path simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub horizon: f64,
    pub step: f64,
    /// Far end of a graded tail, if any.
    pub far: Option<f64>,
    pub growth: f64,
    /// Relative spacing of a geometric refinement near the origin, if any.
    pub head: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            horizon: 10.0,
            step: 5e-4,
            far: Some(1e6),
            growth: 2e-3,
            head: None,
        }
    }
}

impl GridSpec {
    pub fn uniform(horizon: f64, step: f64) -> Self {
        GridSpec {
            horizon,
            step,
            far: None,
            growth: 0.0,
            head: None,
        }
    }

    pub fn build(&self) -> Result<TimeGrid> {
        let g = match self.far {
            Some(far) => TimeGrid::graded(self.horizon, self.step, far, self.growth)?,
            None => TimeGrid::uniform(self.horizon, self.step)?,
        };
        match self.head {
            Some(spacing) => g.with_head(spacing),
            None => Ok(g),
        }
    }
}

/// Draws of one law.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSample {
    pub law: Law,
    pub draws: Vec<f64>,
    /// Replications attempted, including flagged ones.
    pub reps: u64,
    /// Argmax draws excluded because the maximizer sat at the grid edge.
    pub flagged: u64,
    pub grid: GridSpec,
    pub seed: u64,
}

impl FunctionalSample {
    pub fn flag_rate(&self) -> f64 {
        self.flagged as f64 / self.reps.max(1) as f64
    }

    /// Moments of the draws divided by `divisor`.
    pub fn moments(&self, divisor: f64) -> Moments {
        Moments::scaled(&self.draws, divisor.recip())
    }
}

struct Scratch {
    path: Option<BrownianPath>,
    lcm: LcmScratch,
    built: Option<(bool, u32)>,
}

fn eval_law(law: &Law, path: &BrownianPath, s: &mut Scratch) -> Result<Option<f64>> {
    let slope = |two: bool, p: u32, at: f64, s: &mut Scratch| -> Result<f64> {
        if s.built != Some((two, p)) {
            if two {
                s.lcm.build_two_sided(path, p)?;
            } else if p >= 2 {
                s.lcm.build_right_upto(path, p, path.horizon());
            } else {
                s.lcm.build_right(path, p);
            }
            s.built = Some((two, p));
        }
        s.lcm.right_slope(at)
    };
    Ok(match *law {
        Law::DrW1 => Some(slope(false, 0, 1.0, s)?),
        Law::DrDrift { p, c } => Some(slope(false, p, c, s)?),
        Law::DTwoSided0 => Some(slope(true, 2, 0.0, s)?),
        Law::ArgmaxWMinusT => {
            let d = argmax_functional(path, 1, true)?;
            (!d.flagged).then_some(d.location)
        }
        Law::ArgmaxWMinusT2 => {
            let d = argmax_functional(path, 2, false)?;
            (!d.flagged).then_some(d.location)
        }
        Law::SupPenalized { cpen, f0, fprime0 } => Some(sup_penalized_functional(path, cpen, f0, fprime0)?),
    })
}

fn check_law(law: &Law, grid: &GridSpec) -> Result<()> {
    let at = match *law {
        Law::DrW1 => 1.0,
        Law::DrDrift { c, .. } => c,
        _ => 0.0,
    };
    if !(at >= 0.0 && at < grid.horizon) {
        return Err(Error::InvalidArgument(format!("{law}: evaluation point outside [0, T)")));
    }
    Ok(())
}

/// A path together with derived versions on other grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Base,
    /// Step halved by bridge infill.
    Refined,
    /// Uniform part extended to twice the horizon.
    Doubled,
}

/// Evaluates every law on the same `reps` paths, and on each requested
/// variant of those paths. Output is indexed `[variant][law]`.
pub fn simulate_variants(
    laws: &[Law],
    variants: &[Variant],
    reps: u64,
    grid: GridSpec,
    seed: u64,
    exec: Exec,
) -> Result<Vec<Vec<FunctionalSample>>> {
    for law in laws {
        check_law(law, &grid)?;
    }
    let two_sided = laws.iter().any(Law::two_sided);
    let tg = Arc::new(grid.build()?);
    let refined = Arc::new(tg.refined());
    let doubled = Arc::new(tg.doubled());
    let spec_of = |v: Variant| match v {
        Variant::Base => grid,
        Variant::Refined => GridSpec {
            step: grid.step / 2.0,
            ..grid
        },
        Variant::Doubled => GridSpec {
            horizon: 2.0 * grid.horizon,
            ..grid
        },
    };
    let rows: Vec<Result<Vec<Vec<Option<f64>>>>> = map_reps(
        exec,
        reps,
        || Scratch {
            path: None,
            lcm: LcmScratch::new(),
            built: None,
        },
        |s, rep| {
            let mut rng = rng_for(seed, rep);
            let path = match s.path.take() {
                Some(mut p) => {
                    p.resimulate(&mut rng);
                    p
                }
                None => BrownianPath::simulate(tg.clone(), two_sided, &mut rng),
            };
            let mut out = Vec::with_capacity(variants.len());
            for &v in variants {
                let derived;
                let target = match v {
                    Variant::Base => &path,
                    Variant::Refined => {
                        derived = path.resampled(refined.clone(), &mut rng);
                        &derived
                    }
                    Variant::Doubled => {
                        derived = path.resampled(doubled.clone(), &mut rng);
                        &derived
                    }
                };
                s.built = None;
                out.push(laws.iter().map(|law| eval_law(law, target, s)).collect::<Result<Vec<_>>>()?);
            }
            s.path = Some(path);
            Ok(out)
        },
    );
    let mut samples: Vec<Vec<FunctionalSample>> = variants
        .iter()
        .map(|&v| {
            laws.iter()
                .map(|&law| FunctionalSample {
                    law,
                    draws: Vec::with_capacity(reps as usize),
                    reps,
                    flagged: 0,
                    grid: spec_of(v),
                    seed,
                })
                .collect()
        })
        .collect();
    for row in rows {
        for (per_variant, vals) in samples.iter_mut().zip(row?) {
            for (sample, v) in per_variant.iter_mut().zip(vals) {
                match v {
                    Some(x) => sample.draws.push(x),
                    None => sample.flagged += 1,
                }
            }
        }
    }
    Ok(samples)
}

/// Evaluates every law on the same `reps` paths.
pub fn simulate_laws(laws: &[Law], reps: u64, grid: GridSpec, seed: u64, exec: Exec) -> Result<Vec<FunctionalSample>> {
    Ok(simulate_variants(laws, &[Variant::Base], reps, grid, seed, exec)?.remove(0))
}

pub fn simulate_functional(law: Law, reps: u64, grid: GridSpec, seed: u64, exec: Exec) -> Result<FunctionalSample> {
    Ok(simulate_laws(&[law], reps, grid, seed, exec)?.remove(0))
}

/// Moments of the estimator limit: draws divided by `divisor`, e.g. the
/// `A` constant of the matching regime.
pub fn limit_moments(sample: &FunctionalSample, divisor: f64) -> Moments {
    sample.moments(divisor)
}

/// Mean-square objective `E(D_R[W(t) - t^(k+1)](c))^2` over a grid of `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct CstarEstimate {
    pub k: u32,
    pub c_star: f64,
    /// `(c, objective, standard error)` per grid value.
    pub curve: Vec<(f64, f64, f64)>,
    pub reps: u64,
}

impl CstarEstimate {
    /// Objective at `c`, linearly interpolated along the curve.
    pub fn objective_at(&self, c: f64) -> Option<f64> {
        let i = self.curve.iter().position(|p| p.0 >= c)?;
        if i == 0 {
            return (self.curve[0].0 == c).then_some(self.curve[0].1);
        }
        let (a, b) = (self.curve[i - 1], self.curve[i]);
        Some(a.1 + (c - a.0) / (b.0 - a.0) * (b.1 - a.1))
    }

    /// Objective at the estimated minimizer, interpolated along the curve.
    pub fn min_objective(&self) -> f64 {
        self.objective_at(self.c_star).unwrap_or(f64::NAN)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("c,objective,se\n");
        for (c, o, e) in &self.curve {
            s.push_str(&format!("{c},{o},{e}\n"));
        }
        s
    }
}

pub fn default_c_grid() -> Vec<f64> {
    (0..=24).map(|i| 0.1 + 0.025 * i as f64).collect()
}

pub fn estimate_cstar(k: u32, reps: u64, c_grid: &[f64], grid: GridSpec, seed: u64, exec: Exec) -> Result<CstarEstimate> {
    if !(k == 1 || k == 2) {
        return Err(Error::InvalidArgument(format!("k must be 1 or 2, got {k}")));
    }
    if c_grid.len() < 3
        || c_grid.windows(2).any(|w| !(w[1] > w[0]))
        || !(c_grid[0] > 0.0)
        || c_grid[c_grid.len() - 1] > 2.0
        || c_grid[c_grid.len() - 1] >= grid.horizon
    {
        return Err(Error::InvalidArgument(
            "c grid must be increasing, inside (0, 2], with at least 3 points".into(),
        ));
    }
    let tg = Arc::new(grid.build()?);
    let p = k + 1;
    let rows: Vec<Result<Vec<f64>>> = map_reps(
        exec,
        reps,
        || (None::<BrownianPath>, LcmScratch::new()),
        |(slot, lcm), rep| {
            let mut rng = rng_for(seed, rep);
            let path = match slot {
                Some(p) => {
                    p.resimulate(&mut rng);
                    p
                }
                None => slot.insert(BrownianPath::simulate(tg.clone(), false, &mut rng)),
            };
            lcm.build_right_upto(path, p, path.horizon());
            c_grid.iter().map(|&c| lcm.right_slope(c).map(|d| d * d)).collect()
        },
    );
    let m = c_grid.len();
    let (mut s1, mut s2) = (vec![0.0; m], vec![0.0; m]);
    for row in rows {
        for (j, v) in row?.into_iter().enumerate() {
            s1[j] += v;
            s2[j] += v * v;
        }
    }
    let nf = reps as f64;
    let curve: Vec<(f64, f64, f64)> = (0..m)
        .map(|j| {
            let mean = s1[j] / nf;
            let var = (s2[j] / nf - mean * mean).max(0.0);
            (c_grid[j], mean, (var / nf).sqrt())
        })
        .collect();
    let jmin = (0..m).min_by(|&a, &b| curve[a].1.total_cmp(&curve[b].1)).unwrap_or(0);
    if jmin == 0 || jmin == m - 1 {
        return Err(Error::GridBoundary(curve[jmin].0));
    }
    let (x0, y0) = (curve[jmin - 1].0, curve[jmin - 1].1);
    let (x1, y1) = (curve[jmin].0, curve[jmin].1);
    let (x2, y2) = (curve[jmin + 1].0, curve[jmin + 1].1);
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    let c_star = if den != 0.0 { x1 - 0.5 * num / den } else { x1 };
    Ok(CstarEstimate {
        k,
        c_star: c_star.clamp(x0, x2),
        curve,
        reps,
    })
}

/// One row of the limiting-moment table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table4Row {
    pub estimator: &'static str,
    pub exponential: Cell,
    pub half_normal: Cell,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Simulated(Moments),
    /// Estimator degenerates: fixed limit values, not simulated.
    Degenerate { mean: f64, var: f64, mse: f64 },
}

impl Cell {
    pub fn triple(&self) -> (f64, f64, f64) {
        match *self {
            Cell::Simulated(m) => (m.mean, m.var, m.mse),
            Cell::Degenerate { mean, var, mse } => (mean, var, mse),
        }
    }

    pub fn moments(&self) -> Option<Moments> {
        match *self {
            Cell::Simulated(m) => Some(m),
            Cell::Degenerate { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table4 {
    pub rows: Vec<Table4Row>,
    pub reps: u64,
    pub grid: GridSpec,
    pub seed: u64,
    pub c_star: f64,
    /// Flagged draws over all simulated cells.
    pub flagged: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table4Options {
    pub reps: u64,
    pub grid: GridSpec,
    pub seed: u64,
    pub c_star: f64,
    pub exec: Exec,
}

impl Default for Table4Options {
    fn default() -> Self {
        Table4Options {
            reps: 100_000,
            grid: GridSpec::default(),
            seed: 2006,
            c_star: DEFAULT_CSTAR,
            exec: Exec::default(),
        }
    }
}

pub const TABLE4_ESTIMATORS: [&str; 5] = ["simple", "adaptive", "penalized", "simple2", "adaptive2"];

struct Table4Plan {
    laws: [Law; 6],
    a21: f64,
    a22: f64,
    root_f0_hn: f64,
}

fn table4_plan(c_star: f64) -> Result<Table4Plan> {
    let exp = DistributionSpec::exponential().analytic_boundary()?;
    let hn = DistributionSpec::half_normal().analytic_boundary()?;
    let e1 = LimitConstants::new(exp.f0, exp.fk0, 1, 1.0, Endpoint::Zero)?;
    let h2 = LimitConstants::new(hn.f0, hn.fk0, 2, 1.0, Endpoint::Zero)?;
    let cpen = ALPHA_CONSTANT * PILOT_BETA.powf(-1.0 / 3.0);
    Ok(Table4Plan {
        laws: [
            Law::DrDrift { p: 2, c: 1.0 / e1.b2k },
            Law::DrDrift { p: 2, c: c_star },
            Law::SupPenalized {
                cpen,
                f0: exp.f0,
                fprime0: exp.fk0,
            },
            Law::DrW1,
            Law::DrDrift { p: 3, c: 1.0 / h2.b2k },
            Law::DrDrift { p: 3, c: c_star },
        ],
        a21: e1.a2k,
        a22: h2.a2k,
        root_f0_hn: hn.f0.sqrt(),
    })
}

fn assemble(plan: &Table4Plan, s: &[FunctionalSample], opts: &Table4Options, grid: GridSpec) -> Table4 {
    let sim = |i: usize, divisor: f64| Cell::Simulated(s[i].moments(divisor));
    let zero = Cell::Degenerate {
        mean: 0.0,
        var: 0.0,
        mse: 0.0,
    };
    let diverge = Cell::Degenerate {
        mean: f64::NEG_INFINITY,
        var: f64::INFINITY,
        mse: f64::INFINITY,
    };
    let cells = [
        (sim(0, plan.a21), sim(3, plan.root_f0_hn.recip())),
        (sim(1, plan.a21), zero),
        (sim(2, 1.0), zero),
        (diverge, sim(4, plan.a22)),
        (diverge, sim(5, plan.a22)),
    ];
    let rows = TABLE4_ESTIMATORS
        .iter()
        .zip(cells)
        .map(|(&estimator, (exponential, half_normal))| Table4Row {
            estimator,
            exponential,
            half_normal,
        })
        .collect();
    Table4 {
        rows,
        reps: opts.reps,
        grid,
        seed: opts.seed,
        c_star: opts.c_star,
        flagged: s.iter().map(|x| x.flagged).sum(),
    }
}

/// Limiting mean, variance and MSE of the boundary estimators at the
/// exponential and half-normal distributions.
pub fn table4(opts: &Table4Options) -> Result<Table4> {
    let plan = table4_plan(opts.c_star)?;
    let s = simulate_laws(&plan.laws, opts.reps, opts.grid, opts.seed, opts.exec)?;
    Ok(assemble(&plan, &s, opts, opts.grid))
}

/// The table on the base grid, with the step halved, and with the horizon
/// doubled, all from the same paths.
#[derive(Debug, Clone, PartialEq)]
pub struct Table4Stability {
    pub base: Table4,
    pub refined: Table4,
    pub doubled: Table4,
}

impl Table4Stability {
    /// Largest shift of a simulated entry, in units of its base standard
    /// error, as `(shift, estimator, column)`.
    /// Every cell's shift against the base table, in base standard errors,
    /// as `(variant, estimator, column, z)`.
    pub fn shifts(&self) -> Vec<(&'static str, &'static str, &'static str, f64)> {
        let mut out = Vec::new();
        for (name, other) in [("refined", &self.refined), ("doubled", &self.doubled)] {
            for (b, o) in self.base.rows.iter().zip(&other.rows) {
                for (fam, cb, co) in [("exp", b.exponential, o.exponential), ("hn", b.half_normal, o.half_normal)] {
                    let (Some(mb), Some(mo)) = (cb.moments(), co.moments()) else { continue };
                    for (col, x, y, se) in [
                        ("mean", mb.mean, mo.mean, mb.se_mean),
                        ("var", mb.var, mo.var, mb.se_var),
                        ("mse", mb.mse, mo.mse, mb.se_mse),
                    ] {
                        out.push((name, b.estimator, column_name(fam, col), (x - y).abs() / se));
                    }
                }
            }
        }
        out
    }

    pub fn worst_shift(&self) -> (f64, &'static str, &'static str) {
        self.shifts()
            .into_iter()
            .fold((0.0, "", ""), |w, (_, e, c, z)| if z > w.0 { (z, e, c) } else { w })
    }
}

fn column_name(fam: &str, col: &str) -> &'static str {
    match (fam, col) {
        ("exp", "mean") => "exp_mean",
        ("exp", "var") => "exp_var",
        ("exp", "mse") => "exp_mse",
        ("hn", "mean") => "hn_mean",
        ("hn", "var") => "hn_var",
        _ => "hn_mse",
    }
}

pub fn table4_stability(opts: &Table4Options) -> Result<Table4Stability> {
    let plan = table4_plan(opts.c_star)?;
    let variants = [Variant::Base, Variant::Refined, Variant::Doubled];
    let s = simulate_variants(&plan.laws, &variants, opts.reps, opts.grid, opts.seed, opts.exec)?;
    let t = |i: usize| assemble(&plan, &s[i], opts, s[i][0].grid);
    Ok(Table4Stability {
        base: t(0),
        refined: t(1),
        doubled: t(2),
    })
}

fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.3}")
    }
}

impl Table4 {
    pub fn row(&self, estimator: &str) -> Option<&Table4Row> {
        self.rows.iter().find(|r| r.estimator == estimator)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("estimator,exp_mean,exp_var,exp_mse,hn_mean,hn_var,hn_mse\n");
        for r in &self.rows {
            let (a, b, c) = r.exponential.triple();
            let (d, e, f) = r.half_normal.triple();
            let cells: Vec<String> = [a, b, c, d, e, f].iter().map(|&x| fmt_num(x)).collect();
            s.push_str(&format!("{},{}\n", r.estimator, cells.join(",")));
        }
        s
    }
}
