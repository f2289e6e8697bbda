//! Choosing `(beta1, beta2, lambda)` so that the mean endpoint and mean vertex
//! number hit a target, and turning the calibrated ensemble into a prediction
//! of `log p(n1, n2; k)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gibbs::{log_partition_on, moments_on, GibbsParams, MomentReport, SiteSet};
use crate::scalar::{lit, Real};
use crate::special::{c_of_ell, vertex_factor, zeta};
use crate::tolerances::{
    CALIBRATION_RESIDUAL, LAMBDA_GRID_HI, LAMBDA_GRID_LO, LAMBDA_GRID_POINTS, NEWTON_MAX_ITER,
};

/// Endpoint `(n1, n2)` and vertex number `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CalibrationTarget {
    pub n1: u64,
    pub n2: u64,
    pub k: u64,
}

impl CalibrationTarget {
    pub fn new(n1: u64, n2: u64, k: u64) -> Result<Self> {
        if n1 == 0 || n2 == 0 || k == 0 {
            return Err(Error::InvalidArgument("n1, n2 and k must be positive".into()));
        }
        Ok(Self { n1, n2, k })
    }

    pub fn swapped(self) -> Self {
        Self {
            n1: self.n2,
            n2: self.n1,
            k: self.k,
        }
    }

    fn as_reals<T: Real>(&self) -> [T; 3] {
        [
            T::from_u64(self.n1).unwrap(),
            T::from_u64(self.n2).unwrap(),
            T::from_u64(self.k).unwrap(),
        ]
    }

    /// `k / (n1 n2)^(1/3)`.
    pub fn density<T: Real>(&self) -> T {
        let [a, b, k] = self.as_reals::<T>();
        k / (a * b).cbrt()
    }
}

/// Outcome of [`exact_calibrate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationResult<T> {
    pub beta1: T,
    pub beta2: T,
    pub lambda: T,
    /// Relative errors of `E X1`, `E X2`, `E K` against the target.
    pub residuals: [T; 3],
    pub iterations: usize,
    pub free_energy: T,
    /// Free energy after each accepted step, starting at the initializer.
    pub free_energy_trace: Vec<T>,
    /// Smallest covariance eigenvalue at each accepted iterate.
    pub eigenvalue_trace: Vec<T>,
    /// True when Newton was abandoned for the small-`k` closed forms.
    pub degraded: bool,
    pub truncation: T,
}

impl<T: Real> CalibrationResult<T> {
    pub fn max_residual(&self) -> T {
        self.residuals.iter().fold(T::zero(), |m, r| m.max(r.abs()))
    }

    pub fn params(&self) -> GibbsParams<T> {
        GibbsParams::linear(self.beta1, self.beta2, self.lambda).with_truncation(self.truncation)
    }
}

/// `beta` from `lambda` through the leading-order mean relations.
fn betas_for<T: Real>(target: &CalibrationTarget, lambda: T) -> Result<(T, T)> {
    let [n1, n2, _] = target.as_reals::<T>();
    let u = vertex_factor(lambda)? / zeta(lit::<T>(2.0))?;
    Ok(((u * n2 / (n1 * n1)).cbrt(), (u * n1 / (n2 * n2)).cbrt()))
}

fn lambda_grid<T: Real>() -> Vec<T> {
    let lo: T = lit(LAMBDA_GRID_LO);
    let hi: T = lit(LAMBDA_GRID_HI);
    let steps = LAMBDA_GRID_POINTS - 1;
    (0..LAMBDA_GRID_POINTS)
        .map(|i| {
            let t = T::from_usize_lossy(i) / T::from_usize_lossy(steps);
            (lo.ln() + t * (hi.ln() - lo.ln())).exp()
        })
        .collect()
}

/// Leading-order parameters: `lambda` solves `c(lambda) (n1 n2)^(1/3) = k` on
/// the first sign change of a geometric grid, then both `beta`s follow.
/// Below the grid the small-`k` forms `beta_i = k / n_i`,
/// `lambda = k^3 / (n1 n2)` are returned.
pub fn asymptotic_params<T: Real>(target: &CalibrationTarget) -> Result<(T, T, T)> {
    let ratio = target.density::<T>();
    let grid = lambda_grid::<T>();
    let g = |l: T| -> Result<T> { Ok(c_of_ell(l)? - ratio) };
    let first = g(grid[0])?;
    if first >= T::zero() {
        let [n1, n2, k] = target.as_reals::<T>();
        return Ok((k / n1, k / n2, k * k * k / (n1 * n2)));
    }
    let mut lo = grid[0];
    let mut glo = first;
    for &hi in &grid[1..] {
        let ghi = g(hi)?;
        if ghi >= T::zero() {
            let lambda = bisect_log(&g, lo, hi, glo)?;
            let (b1, b2) = betas_for(target, lambda)?;
            return Ok((b1, b2, lambda));
        }
        lo = hi;
        glo = ghi;
    }
    Err(Error::NoBracket {
        lo: LAMBDA_GRID_LO,
        hi: LAMBDA_GRID_HI,
        ratio: ratio.to_f64_lossy(),
    })
}

fn bisect_log<T: Real>(g: &impl Fn(T) -> Result<T>, mut lo: T, mut hi: T, mut glo: T) -> Result<T> {
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if !(mid > lo && mid < hi) {
            break;
        }
        let gm = g(mid)?;
        if (gm < T::zero()) == (glo < T::zero()) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// Initializer used when [`asymptotic_params`] finds no bracket because the
/// target density exceeds every value of `c` on the grid: the grid point
/// where `c` is largest.
pub fn clamped_params<T: Real>(target: &CalibrationTarget) -> Result<(T, T, T)> {
    let mut best = (T::neg_infinity(), T::one());
    for l in lambda_grid::<T>() {
        let c = c_of_ell(l)?;
        if c > best.0 {
            best = (c, l);
        }
    }
    let (b1, b2) = betas_for(target, best.1)?;
    Ok((b1, b2, best.1))
}

/// `f(beta, gamma) = beta1 n1 + beta2 n2 + gamma k + log Z(beta, e^-gamma)`,
/// strictly convex with gradient `(n - E X, k - E K)` and Hessian the
/// covariance of `(X1, X2, K)`.
pub fn free_energy_on<T: Real>(
    target: &CalibrationTarget,
    beta1: T,
    beta2: T,
    gamma: T,
    truncation: T,
    sites: &SiteSet,
) -> Result<T> {
    let [n1, n2, k] = target.as_reals::<T>();
    let p = GibbsParams::linear(beta1, beta2, (-gamma).exp()).with_truncation(truncation);
    Ok(beta1 * n1 + beta2 * n2 + gamma * k + log_partition_on(&p, sites)?)
}

/// Gradient of [`free_energy_on`] from the moment sums.
pub fn free_energy_gradient<T: Real>(target: &CalibrationTarget, m: &MomentReport<T>) -> [T; 3] {
    let [n1, n2, k] = target.as_reals::<T>();
    [n1 - m.ex1, n2 - m.ex2, k - m.ek]
}

fn relative_residuals<T: Real>(target: &CalibrationTarget, m: &MomentReport<T>) -> [T; 3] {
    let [n1, n2, k] = target.as_reals::<T>();
    [(m.ex1 - n1) / n1, (m.ex2 - n2) / n2, (m.ek - k) / k]
}

fn solve3<T: Real>(a: &[[T; 3]; 3], b: &[T; 3]) -> Option<[T; 3]> {
    let mut m = [[T::zero(); 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    let scale = a.iter().flatten().fold(T::zero(), |s, v| s.max(v.abs()));
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if !(m[piv][col].abs() > scale * T::epsilon() * lit(16.0)) {
            return None;
        }
        m.swap(col, piv);
        for r in 0..3 {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..4 {
                    m[r][c] = m[r][c] - f * m[col][c];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

struct Point<T> {
    x: [T; 3], // beta1, beta2, gamma
    f: T,
    m: MomentReport<T>,
}

fn evaluate<T: Real>(target: &CalibrationTarget, x: [T; 3], truncation: T) -> Result<Point<T>> {
    let p = GibbsParams::linear(x[0], x[1], (-x[2]).exp()).with_truncation(truncation);
    let sites = SiteSet::for_params(&p)?;
    let f = free_energy_on(target, x[0], x[1], x[2], truncation, &sites)?;
    let m = moments_on(&p, &sites)?;
    Ok(Point { x, f, m })
}

/// Damped Newton on the free energy in `(beta1, beta2, gamma = -ln lambda)`.
///
/// Each step is shortened so that both `beta`s stay within a factor two of
/// their current values and `gamma` moves by at most 2, then halved until the
/// free energy decreases. Targets with `n1 > n2` are solved in the mirrored
/// orientation, which makes the result exactly symmetric.
pub fn exact_calibrate<T: Real>(target: &CalibrationTarget, truncation: T) -> Result<CalibrationResult<T>> {
    if target.n1 > target.n2 {
        let mut r = exact_calibrate(&target.swapped(), truncation)?;
        std::mem::swap(&mut r.beta1, &mut r.beta2);
        r.residuals.swap(0, 1);
        return Ok(r);
    }
    let (b1, b2, lambda) = match asymptotic_params::<T>(target) {
        Ok(v) => v,
        Err(Error::NoBracket { .. }) => clamped_params::<T>(target)?,
        Err(e) => return Err(e),
    };
    let tol: T = lit(CALIBRATION_RESIDUAL);
    let mut cur = evaluate(target, [b1, b2, -lambda.ln()], truncation)?;
    let mut f_trace = vec![cur.f];
    let mut eig_trace = vec![cur.m.smallest_eigenvalue];
    let finish = |cur: &Point<T>, it: usize, f_trace: Vec<T>, eig_trace: Vec<T>, degraded: bool| {
        CalibrationResult {
            beta1: cur.x[0],
            beta2: cur.x[1],
            lambda: (-cur.x[2]).exp(),
            residuals: relative_residuals(target, &cur.m),
            iterations: it,
            free_energy: cur.f,
            free_energy_trace: f_trace,
            eigenvalue_trace: eig_trace,
            degraded,
            truncation,
        }
    };
    for it in 0..=NEWTON_MAX_ITER {
        let res = relative_residuals(target, &cur.m);
        if res.iter().all(|r| r.abs() <= tol) {
            return Ok(finish(&cur, it, f_trace, eig_trace, false));
        }
        if it == NEWTON_MAX_ITER {
            break;
        }
        let g = free_energy_gradient(target, &cur.m);
        let Some(d) = solve3(&cur.m.covariance, &[-g[0], -g[1], -g[2]]) else {
            // Covariance singular: fugacity has underflowed.
            let [n1, n2, k] = target.as_reals::<T>();
            let x = [k / n1, k / n2, -(k * k * k / (n1 * n2)).ln()];
            let fallback = evaluate(target, x, truncation)?;
            return Ok(finish(&fallback, it, f_trace, eig_trace, true));
        };
        let mut s = T::one();
        let half: T = lit(0.5);
        let two: T = lit(2.0);
        for i in 0..2 {
            while cur.x[i] + s * d[i] < half * cur.x[i] || cur.x[i] + s * d[i] > two * cur.x[i] {
                s = s * half;
            }
        }
        while (s * d[2]).abs() > two {
            s = s * half;
        }
        let res_norm = res.iter().fold(T::zero(), |m, r| m.max(r.abs()));
        let mut accepted = None;
        for _ in 0..60 {
            let x = [cur.x[0] + s * d[0], cur.x[1] + s * d[1], cur.x[2] + s * d[2]];
            let trial = evaluate(target, x, truncation)?;
            // Near the minimum f is flat to rounding; accept a step that does
            // not raise f beyond rounding and improves the residuals.
            let slack = cur.f.abs() * T::epsilon() * lit(8.0);
            let trial_res = relative_residuals(target, &trial.m)
                .iter()
                .fold(T::zero(), |m, r| m.max(r.abs()));
            if trial.f < cur.f || (trial.f <= cur.f + slack && trial_res < res_norm) {
                accepted = Some(trial);
                break;
            }
            s = s * half;
        }
        let Some(next) = accepted else {
            break;
        };
        cur = next;
        f_trace.push(cur.f);
        eig_trace.push(cur.m.smallest_eigenvalue);
    }
    let res = relative_residuals(target, &cur.m);
    Err(Error::NoConvergence {
        iterations: f_trace.len() - 1,
        residual: res.iter().fold(0.0, |m, r| m.max(r.abs().to_f64_lossy())),
    })
}

/// Right-hand side of the counting identity
/// `p = Z e^{beta . n} lambda^-k P[X = n, K = k]`, in logarithms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Prediction<T> {
    pub log_p: T,
    /// Whether the local-limit prefactor was added.
    pub llt_applied: bool,
    /// Whether `k` is large enough against `log n` for the local limit to be
    /// expected to hold (`k > ln max(n1, n2)`).
    pub llt_supported: bool,
}

/// `log Z + beta . n - k log lambda`, plus the logarithm of
/// `(2 pi)^(-3/2) sqrt(k) / (n1 n2)` when `with_llt` is set.
pub fn predicted_log_pnk<T: Real>(
    target: &CalibrationTarget,
    result: &CalibrationResult<T>,
    with_llt: bool,
) -> Result<Prediction<T>> {
    let params = result.params();
    let sites = SiteSet::for_params(&params)?;
    let [n1, n2, k] = target.as_reals::<T>();
    let mut log_p = log_partition_on(&params, &sites)? + result.beta1 * n1 + result.beta2 * n2
        - k * result.lambda.ln();
    if with_llt {
        let two_pi = lit::<T>(2.0) * T::PI();
        log_p = log_p - lit::<T>(1.5) * two_pi.ln() + lit::<T>(0.5) * k.ln() - (n1 * n2).ln();
    }
    Ok(Prediction {
        log_p,
        llt_applied: with_llt,
        llt_supported: k > n1.max(n2).ln(),
    })
}
