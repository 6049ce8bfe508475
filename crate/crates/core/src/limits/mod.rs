//! Limiting constants and Monte Carlo evaluation of the Brownian limit laws.

pub mod brownian;
pub mod constants;
pub mod functionals;
pub mod montecarlo;

pub use brownian::{simulate_path, BrownianPath, TimeGrid};
pub use constants::{constants, Endpoint, LimitConstants};
pub use functionals::{
    argmax_functional, d_functional_twosided, dr_functional, dr_functional_many, sup_penalized_functional,
    ArgmaxDraw, LcmScratch,
};
pub use montecarlo::{
    default_c_grid, estimate_cstar, limit_moments, simulate_functional, simulate_laws, simulate_variants, table4,
    table4_stability, Cell, CstarEstimate, FunctionalSample, GridSpec, Law, Table4, Table4Options, Table4Row,
    Table4Stability, Variant, TABLE4_ESTIMATORS,
};
