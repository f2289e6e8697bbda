//! Numerical tolerances, truncation levels and budgets.
//!
//! Every threshold used by the library, the experiment suites and the
//! acceptance tests lives here so that a change propagates everywhere.

/// Absolute accuracy target for `zeta`.
pub const ZETA_ABS_TOL: f64 = 1e-12;

/// Tail bound for polylogarithm series summation.
pub const POLYLOG_SERIES_TAIL: f64 = 1e-12;

/// Absolute tolerance handed to adaptive quadrature in the polylogarithm
/// integral representation.
pub const POLYLOG_QUAD_TOL: f64 = 1e-13;

/// Series and integral polylogarithm must agree this closely on their overlap.
pub const POLYLOG_DUAL_AGREEMENT: f64 = 1e-9;

/// Below this distance from 1, `c(ell)` and `e(ell)` use Taylor expansions.
pub const ELL_TAYLOR_RADIUS: f64 = 1e-4;

/// Two-sided continuity of `c` and `e` at `ell = 1`.
pub const ELL_CONTINUITY: f64 = 1e-8;

/// Default energy cutoff `T`: sites with energy above it are dropped.
pub const DEFAULT_TRUNCATION: f64 = 40.0;

/// Truncation error bound required for the parallel-vector double sum.
pub const PARALLEL_SUM_TAIL: f64 = 1e-12;

/// Calibration stops once every relative moment residual is below this.
pub const CALIBRATION_RESIDUAL: f64 = 1e-6;

/// Hard iteration cap for damped Newton.
pub const NEWTON_MAX_ITER: usize = 60;

/// Relative agreement of the free-energy gradient with finite differences.
pub const GRADIENT_FD_REL: f64 = 1e-4;

/// Relative agreement of the covariance diagonal with finite-difference Hessian.
pub const HESSIAN_FD_REL: f64 = 1e-3;

/// Relative step used for the finite-difference checks.
pub const FD_REL_STEP: f64 = 1e-6;

/// Absolute tolerance of limit-shape quadratures.
pub const SHAPE_QUAD_TOL: f64 = 1e-10;

/// Parabola on-curve identity.
pub const PARABOLA_IDENTITY: f64 = 1e-12;

/// Maximal gap between the mixed family at mixing 0 and the parabola.
pub const MIXED_PARABOLA_GAP: f64 = 1e-6;

/// Mixing parameter used as a stand-in for the infinite-mixing circle limit.
pub const CIRCLE_PROXY_MIXING: f64 = 1e3;

/// Distance allowed between the proxy curve and the circle.
pub const CIRCLE_PROXY_GAP: f64 = 1e-2;

/// Allowed error of `L(0)`.
pub const LENGTH_AT_ZERO_TOL: f64 = 1e-9;

/// Default operation budget for the exact counting dynamic program.
pub const DEFAULT_COUNT_BUDGET: f64 = 2e10;

/// Largest box side accepted by the exhaustive enumerator.
pub const BRUTE_FORCE_CAP: usize = 12;

/// Largest total length accepted by length-bucketed enumeration.
pub const LENGTH_ENUM_CAP: f64 = 15.0;

/// Redraw budget of the reordering sampler.
pub const VALTR_REDRAW_BUDGET: usize = 10_000;

/// Site budget for Gibbs models (number of truncated sites).
pub const DEFAULT_SITE_BUDGET: usize = 20_000_000;

/// Smallest admissible mesh for Hausdorff distances.
pub const MIN_MESH: usize = 100;

/// Significance level of the uniformity chi-square test.
pub const CHI_SQUARE_ALPHA: f64 = 1e-3;

/// Geometric grid on which `c(lambda) = ratio` is bracketed.
pub const LAMBDA_GRID_LO: f64 = 1e-8;
pub const LAMBDA_GRID_HI: f64 = 1e4;
pub const LAMBDA_GRID_POINTS: usize = 241;

/// Published decimals of `c(1)` and `e(1)` and their rounding.
pub const PUBLISHED_C1: f64 = 0.749;
pub const PUBLISHED_E1: f64 = 2.702;
pub const PUBLISHED_DECIMALS_TOL: f64 = 1e-3;

/// `c(ell)` at large `ell` against the maximal vertex density, relative.
pub const C_LARGE_ELL_REL: f64 = 0.02;

/// Bracket for the few-vertex ratio `p(n; k) k! / C(n-1, k-1)^2`.
pub const ERDOS_LEHNER_LO: f64 = 0.8;
pub const ERDOS_LEHNER_HI: f64 = 1.1;

/// Small-`k` calibration: `beta1` against `k / n1`, relative.
pub const SMALL_K_BETA_REL: f64 = 0.3;

/// Residue law at the smallest `beta`.
pub const RESIDUE_LAW_TOL: f64 = 0.03;

/// Relative error of the counting prediction.
pub const COUNT_PREDICTION_REL: f64 = 0.25;

/// Parallel-vectors probability against its expansion, relative.
pub const PARALLEL_REL: f64 = 0.05;

/// Greedy maximal vertex count against the length formula, relative.
pub const JARNIK_GREEDY_REL: f64 = 0.05;

/// Monte Carlo means must agree with exact sums within this many standard errors.
pub const MC_STANDARD_ERRORS: f64 = 3.0;

/// Median Hausdorff distance bounds for the shape experiments.
pub const GIBBS_SHAPE_MEDIAN: f64 = 0.05;
pub const VALTR_SHAPE_MEDIAN: f64 = 0.12;

/// Relative accuracy of one-parameter `beta` calibration.
pub const BETA_CALIBRATION_REL: f64 = 1e-9;
