//! Reproducible experiment runners: the reordering sampler for few vertices,
//! the Euclidean-length model, shape statistics and the named check suites.
//!
//! Everything here works in `f64` and is deterministic for a fixed seed.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::calibration::{exact_calibrate, free_energy_gradient, free_energy_on, CalibrationTarget};
use crate::count::{brute_force_enum, count_lines_k, enumerate_lines_with_k, erdos_lehner_ratio, max_vertices};
use crate::error::{Error, Result};
use crate::gibbs::{
    log_partition_on, mean_energy_on, mean_profile_on, moments_on, GibbsParams, MomentReport,
    ObservableSampler, SiteSet,
};
use crate::lattice::{omega_to_polyline, polyline_to_omega, primitive_vectors_in_box, ConvexPolyline};
use crate::shapes::{
    hausdorff_distance, mixed_curve, mixed_length, normalize, parabola_length, parabola_point,
    polyline_hausdorff, ShapeCurve,
};
use crate::special::{
    c_of_ell, e_of_ell, max_vertex_constant, typical_entropy_constant, typical_vertex_constant, zeta,
};
use crate::tolerances::*;

/// Generator for the `index`-th independent draw of an experiment.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Median of a sample; `NaN` when empty.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

// ---------------------------------------------------------------------------
// Reordering sampler
// ---------------------------------------------------------------------------

/// True when `k^3 >= n`, outside the regime where the sampler is known to be
/// close to uniform on all lines with `k` edges.
pub fn valtr_outside_regime(n: u64, k: usize) -> bool {
    (k as f64).powi(3) >= n as f64
}

/// Uniform random line to `(n, n)` with `k` edges, none on an axis.
///
/// Draws `k - 1` abscissas and ordinates uniformly in `(0, 1)`, rounds them
/// up (resp. down) to `(1/n) Z`, sorts both lists and takes increments. A
/// draw is kept when all increments are strictly North-East and pairwise
/// non-parallel; the kept increments are reordered by slope.
pub fn sample_valtr(n: u64, k: usize, seed: u64) -> Result<ConvexPolyline> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw_valtr(n, k, &mut rng)
}

fn draw_valtr<R: Rng + ?Sized>(n: u64, k: usize, rng: &mut R) -> Result<ConvexPolyline> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if n < k as u64 || n > u32::MAX as u64 {
        return Err(Error::InvalidArgument(format!("need k <= n <= 2^32 - 1, got n = {n}, k = {k}")));
    }
    let nf = n as f64;
    let mut u = vec![0u64; k + 1];
    let mut v = vec![0u64; k + 1];
    let mut steps = vec![[0u64; 2]; k];
    for _ in 0..VALTR_REDRAW_BUDGET {
        u[k] = n;
        v[k] = n;
        for i in 1..k {
            u[i] = ((rng.random::<f64>() * nf).ceil() as u64).min(n);
            v[i] = ((rng.random::<f64>() * nf).floor() as u64).min(n);
        }
        u[1..k].sort_unstable();
        v[1..k].sort_unstable();
        let mut ok = true;
        for i in 0..k {
            let d = [u[i + 1].wrapping_sub(u[i]), v[i + 1].wrapping_sub(v[i])];
            if d[0] == 0 || d[1] == 0 || d[0] > n || d[1] > n {
                ok = false;
                break;
            }
            steps[i] = d;
        }
        if !ok {
            continue;
        }
        // Slope order by cross product; equal slopes mean parallel steps.
        let cross = |a: &[u64; 2], b: &[u64; 2]| (a[1] as u128 * b[0] as u128, b[1] as u128 * a[0] as u128);
        steps.sort_by(|a, b| {
            let (l, r) = cross(a, b);
            l.cmp(&r)
        });
        if steps.windows(2).any(|w| {
            let (l, r) = cross(&w[0], &w[1]);
            l == r
        }) {
            continue;
        }
        let mut vertices = Vec::with_capacity(k + 1);
        let mut cur = [0u64, 0u64];
        vertices.push(cur);
        for s in &steps {
            cur = [cur[0] + s[0], cur[1] + s[1]];
            vertices.push(cur);
        }
        return ConvexPolyline::new(vertices);
    }
    Err(Error::RejectionBudget {
        budget: VALTR_REDRAW_BUDGET,
        reason: format!("no draw with {k} distinct strictly North-East directions at n = {n}"),
    })
}

/// Pearson chi-square test of the reordering sampler against the uniform law.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformityTest {
    pub cells: usize,
    pub samples: usize,
    pub statistic: f64,
    pub dof: f64,
    pub p_value: f64,
    /// Draws that fell outside the enumerated set (always a defect).
    pub unmatched: usize,
}

impl UniformityTest {
    pub fn passes(&self, alpha: f64) -> bool {
        self.unmatched == 0 && self.p_value >= alpha
    }
}

/// Compares `samples` draws of [`sample_valtr`]-type lines to `(n, n)` with
/// `k` edges against the exact list of such lines.
pub fn valtr_uniformity(n: u32, k: usize, samples: usize, seed: u64) -> Result<UniformityTest> {
    let lines = enumerate_lines_with_k(n, n, k, true)?;
    let index: HashMap<_, usize> = lines.into_iter().enumerate().map(|(i, w)| (w, i)).collect();
    let cells = index.len();
    if cells < 2 || samples == 0 {
        return Err(Error::InvalidArgument("need at least two cells and one sample".into()));
    }
    let mut counts = vec![0u64; cells];
    let mut unmatched = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let line = draw_valtr(n as u64, k, &mut rng)?;
        match index.get(&polyline_to_omega(&line)?) {
            Some(&i) => counts[i] += 1,
            None => unmatched += 1,
        }
    }
    let expected = samples as f64 / cells as f64;
    let statistic = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum::<f64>();
    let dof = (cells - 1) as f64;
    let dist = ChiSquared::new(dof).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(UniformityTest {
        cells,
        samples,
        statistic,
        dof,
        p_value: dist.sf(statistic),
        unmatched,
    })
}

// ---------------------------------------------------------------------------
// Shape statistics
// ---------------------------------------------------------------------------

/// Divides by the line's own endpoint (coordinates of 0 are left unscaled).
fn self_normalized(line: &ConvexPolyline) -> Result<crate::shapes::NormalizedPolyline<f64>> {
    let e = line.endpoint();
    normalize(line, [e[0].max(1) as f64, e[1].max(1) as f64])
}

/// Distances to the parabola of lines sampled from the Gibbs measure
/// calibrated at `(n, n)` and the typical vertex number. Each line is
/// normalized by its own endpoint.
pub fn gibbs_shape_distances(n: u64, samples: usize, seed: u64, mesh: usize) -> Result<Vec<f64>> {
    let k = typical_vertex_count(n);
    let cal = exact_calibrate(&CalibrationTarget::new(n, n, k)?, DEFAULT_TRUNCATION)?;
    let params = cal.params();
    let sites = SiteSet::for_params(&params)?;
    let sampler = ObservableSampler::new(&params, &sites)?;
    let curve = ShapeCurve::parabola();
    (0..samples)
        .map(|i| {
            let omega = sampler.sample_omega(&mut sample_rng(seed, i as u64));
            hausdorff_distance(&self_normalized(&omega_to_polyline(&omega))?, &curve, mesh)
        })
        .collect()
}

/// Distances to the parabola of [`sample_valtr`] lines normalized by `n`.
pub fn valtr_shape_distances(n: u64, k: usize, samples: usize, seed: u64, mesh: usize) -> Result<Vec<f64>> {
    let curve = ShapeCurve::parabola();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let line = draw_valtr(n, k, &mut rng)?;
            hausdorff_distance(&normalize(&line, [n as f64, n as f64])?, &curve, mesh)
        })
        .collect()
}

/// `round(c(1) n^(2/3))`, the typical vertex number on the diagonal.
pub fn typical_vertex_count(n: u64) -> u64 {
    (typical_vertex_constant::<f64>() * (n as f64).powf(2.0 / 3.0)).round().max(1.0) as u64
}

// ---------------------------------------------------------------------------
// Euclidean-length model
// ---------------------------------------------------------------------------

/// `(3/2) L^(2/3) / pi^(1/3)`.
pub fn jarnik_formula(length: f64) -> f64 {
    1.5 * length.powf(2.0 / 3.0) / std::f64::consts::PI.cbrt()
}

/// Maximal number of edges of a convex lattice line of Euclidean length at
/// most `length` with edge angles in `[0, pi/2]`: the shortest directions
/// taken in increasing length, each once.
pub fn jarnik_greedy(length: f64) -> Result<usize> {
    if !(length >= 0.0 && length.is_finite()) {
        return Err(Error::InvalidArgument(format!("length must be finite and nonnegative, got {length}")));
    }
    // The greedy radius is about (pi L)^(1/3); directions of length at most
    // L beyond the box are never reached before the budget runs out.
    let side = ((std::f64::consts::PI * length).cbrt() * 2.0 + 2.0).ceil().min(length.max(1.0)) as u32;
    let mut lens: Vec<f64> = primitive_vectors_in_box(side, side)?
        .iter()
        .map(|v| v.euclidean::<f64>())
        .collect();
    lens.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for (count, l) in lens.into_iter().enumerate() {
        if total + l > length {
            return Ok(count);
        }
        total += l;
    }
    Err(Error::InvalidArgument("greedy search box too small".into()))
}

/// Which parameter of a one-parameter model is solved for.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OneParamModel {
    /// Euclidean energy with a fixed fugacity; matches the mean length.
    Euclidean { fugacity: f64 },
    /// Mixed energy; matches the mean of `X1`.
    Mixed { mixing: f64 },
}

impl OneParamModel {
    pub fn params(&self, beta: f64, truncation: f64) -> GibbsParams<f64> {
        match *self {
            OneParamModel::Euclidean { fugacity } => GibbsParams::euclidean(beta, fugacity),
            OneParamModel::Mixed { mixing } => GibbsParams::mixed(beta, mixing),
        }
        .with_truncation(truncation)
    }

    fn mean(&self, beta: f64, truncation: f64) -> Result<f64> {
        let p = self.params(beta, truncation);
        let sites = SiteSet::for_params(&p)?;
        match self {
            OneParamModel::Euclidean { .. } => Ok(mean_energy_on(&p, &sites)? / beta),
            OneParamModel::Mixed { .. } => Ok(moments_on(&p, &sites)?.ex1),
        }
    }
}

/// Solves `mean(beta) = target` for `beta`. The mean scales like
/// `beta^-3`, so the iteration `beta <- beta (mean / target)^(1/3)` is a
/// Newton step in logarithmic coordinates.
pub fn calibrate_beta(model: OneParamModel, target: f64, truncation: f64) -> Result<f64> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidArgument(format!("target must be positive, got {target}")));
    }
    let mut beta = target.powf(-1.0 / 3.0);
    let mut rel = f64::INFINITY;
    for _ in 0..100 {
        let m = model.mean(beta, truncation)?;
        rel = m / target - 1.0;
        if rel.abs() <= BETA_CALIBRATION_REL {
            return Ok(beta);
        }
        beta *= (m / target).cbrt();
    }
    Err(Error::NoConvergence {
        iterations: 100,
        residual: rel.abs(),
    })
}

/// Summary of a Euclidean-model run. Exact quantities are sums over the
/// truncated sites; `empirical_*` come from the samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JarnikReport {
    pub beta: f64,
    pub lambda: f64,
    pub samples: usize,
    pub seed: u64,
    pub site_count: usize,
    pub mean_length: f64,
    pub mean_k: f64,
    pub var_k: f64,
    pub empirical_mean_k: f64,
    pub k_standard_error: f64,
    /// `E K / (E length)^(2/3)` and its small-`beta` limit at unit fugacity.
    pub k_ratio: f64,
    pub k_ratio_target: f64,
    /// `(log Z + beta E length - E K ln lambda) / (E length)^(2/3)`.
    pub entropy_ratio: f64,
    pub entropy_ratio_target: f64,
    pub median_circle_distance: f64,
}

/// `(3 / (4 pi zeta(3)^2))^(1/3)`.
pub fn euclidean_vertex_constant() -> f64 {
    let z3 = zeta(3.0f64).unwrap_or(f64::NAN);
    (3.0 / (4.0 * std::f64::consts::PI * z3 * z3)).cbrt()
}

/// `3^(4/3) zeta(3)^(1/3) / (4 pi)^(1/3)`.
pub fn euclidean_entropy_constant() -> f64 {
    let z3 = zeta(3.0f64).unwrap_or(f64::NAN);
    3f64.powf(4.0 / 3.0) * z3.cbrt() / (4.0 * std::f64::consts::PI).cbrt()
}

pub fn run_jarnik(beta: f64, lambda: f64, samples: usize, seed: u64, mesh: usize) -> Result<JarnikReport> {
    let params = GibbsParams::euclidean(beta, lambda);
    let sites = SiteSet::for_params(&params)?;
    let m = moments_on(&params, &sites)?;
    let mean_length = mean_energy_on(&params, &sites)? / beta;
    let log_z = log_partition_on(&params, &sites)?;
    let sampler = ObservableSampler::new(&params, &sites)?;
    let circle = ShapeCurve::Circle;
    let mut ks = Vec::with_capacity(samples);
    let mut dists = Vec::with_capacity(samples);
    for i in 0..samples {
        let omega = sampler.sample_omega(&mut sample_rng(seed, i as u64));
        ks.push(omega.vertex_count() as f64);
        dists.push(hausdorff_distance(&self_normalized(&omega_to_polyline(&omega))?, &circle, mesh)?);
    }
    let var_k = m.covariance[2][2];
    let l23 = mean_length.powf(2.0 / 3.0);
    Ok(JarnikReport {
        beta,
        lambda,
        samples,
        seed,
        site_count: sites.len(),
        mean_length,
        mean_k: m.ek,
        var_k,
        empirical_mean_k: ks.iter().sum::<f64>() / samples.max(1) as f64,
        k_standard_error: (var_k / samples.max(1) as f64).sqrt(),
        k_ratio: m.ek / l23,
        k_ratio_target: euclidean_vertex_constant(),
        entropy_ratio: (log_z + beta * mean_length - m.ek * lambda.ln()) / l23,
        entropy_ratio_target: euclidean_entropy_constant(),
        median_circle_distance: median(&dists),
    })
}

// ---------------------------------------------------------------------------
// Mixed-norm model
// ---------------------------------------------------------------------------

/// One row of the mixed-family table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedShapeRow {
    pub mixing: f64,
    pub length: f64,
    /// Distance of the computed endpoint from `(1, 1)`.
    pub endpoint_error: f64,
    /// Hausdorff distance between the Gibbs mean profile at `beta` and the curve.
    pub profile_distance: f64,
    pub beta: f64,
}

pub fn mixed_shape_table(mixings: &[f64], beta: f64, truncation: f64, mesh: usize) -> Result<Vec<MixedShapeRow>> {
    mixings
        .iter()
        .map(|&mixing| {
            let end = mixed_curve(mixing, std::f64::consts::FRAC_PI_2)?;
            let params = GibbsParams::mixed(beta, mixing).with_truncation(truncation);
            let sites = SiteSet::for_params(&params)?;
            let profile = mean_profile_on(&params, &sites, mesh)?;
            let curve = ShapeCurve::mixed(mixing)?;
            Ok(MixedShapeRow {
                mixing,
                length: mixed_length(mixing)?,
                endpoint_error: (end[0] - 1.0).hypot(end[1] - 1.0),
                profile_distance: polyline_hausdorff(&profile, &curve.samples(mesh), mesh)?,
                beta,
            })
        })
        .collect()
}

/// `(ell, c(ell), e(ell))` on a grid.
pub fn asymptotics_table(grid: &[f64]) -> Result<Vec<crate::special::AsymptoticProfile<f64>>> {
    grid.iter().map(|&l| crate::special::AsymptoticProfile::at(l)).collect()
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

/// One line of a suite report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub target: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// `|observed - target| <= tolerance`.
    pub fn within(check: impl Into<String>, target: f64, observed: f64, tolerance: f64) -> Self {
        let pass = (observed - target).abs() <= tolerance;
        Self { check: check.into(), target, observed, tolerance, pass }
    }

    /// `|observed / target - 1| <= tolerance`.
    pub fn relative(check: impl Into<String>, target: f64, observed: f64, tolerance: f64) -> Self {
        let pass = (observed / target - 1.0).abs() <= tolerance;
        Self { check: check.into(), target, observed, tolerance, pass }
    }

    /// `observed < bound`; the tolerance field is unused and zero.
    pub fn below(check: impl Into<String>, bound: f64, observed: f64) -> Self {
        Self { check: check.into(), target: bound, observed, tolerance: 0.0, pass: observed < bound }
    }

    /// Boolean property; target and observed are 1 or 0.
    pub fn holds(check: impl Into<String>, ok: bool) -> Self {
        Self {
            check: check.into(),
            target: 1.0,
            observed: if ok { 1.0 } else { 0.0 },
            tolerance: 0.0,
            pass: ok,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Counting,
    Calibration,
    Shapes,
    Jarnik,
    Mixed,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Counting, Suite::Calibration, Suite::Shapes, Suite::Jarnik, Suite::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Counting => "counting",
            Suite::Calibration => "calibration",
            Suite::Shapes => "shapes",
            Suite::Jarnik => "jarnik",
            Suite::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

/// Settings shared by the suites.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub truncation: f64,
    pub mesh: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            truncation: DEFAULT_TRUNCATION,
            mesh: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub config: SuiteConfig,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn run_suite(name: &str, config: &SuiteConfig) -> Result<SuiteReport> {
    let suite: Suite = name.parse()?;
    if config.mesh < MIN_MESH {
        return Err(Error::InvalidArgument(format!("mesh must be at least {MIN_MESH}")));
    }
    let checks = match suite {
        Suite::Counting => counting_checks()?,
        Suite::Calibration => calibration_checks(config)?,
        Suite::Shapes => shape_checks(config)?,
        Suite::Jarnik => jarnik_checks(config)?,
        Suite::Mixed => mixed_checks(config)?,
    };
    Ok(SuiteReport {
        suite,
        config: config.clone(),
        checks,
    })
}

fn counting_checks() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let mut mismatches = 0usize;
    let mut max_mismatches = 0usize;
    for n1 in 1..=8u32 {
        for n2 in 1..=8u32 {
            let lines = brute_force_enum(n1, n2)?;
            let kmax = lines.iter().map(|w| w.vertex_count()).max().unwrap_or(0);
            let mut by_k = vec![0u64; kmax + 1];
            for w in &lines {
                by_k[w.vertex_count()] += 1;
            }
            let table = count_lines_k(n1, n2, kmax + 1)?;
            let dp = table.at_endpoint();
            for (k, &b) in by_k.iter().enumerate() {
                if dp[k] != b.into() {
                    mismatches += 1;
                }
            }
            if dp[kmax + 1] != 0u64.into() {
                mismatches += 1;
            }
            if max_vertices(n1, n2)? != kmax {
                max_mismatches += 1;
            }
        }
    }
    out.push(CheckRecord::within("dp_vs_bruteforce_mismatches_n_le_8", 0.0, mismatches as f64, 0.0));
    out.push(CheckRecord::within("max_vertices_vs_bruteforce_mismatches_n_le_8", 0.0, max_mismatches as f64, 0.0));
    let mid = 0.5 * (ERDOS_LEHNER_LO + ERDOS_LEHNER_HI);
    let half = 0.5 * (ERDOS_LEHNER_HI - ERDOS_LEHNER_LO);
    let r60 = erdos_lehner_ratio(60, 2)?;
    out.push(CheckRecord::within("few_vertex_ratio_n60_k2", mid, r60, half));
    let r30 = erdos_lehner_ratio(30, 2)?;
    out.push(CheckRecord::holds("few_vertex_ratio_k2_closer_at_60_than_30", (r60 - 1.0).abs() < (r30 - 1.0).abs()));
    Ok(out)
}

fn calibration_checks(config: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let n = 300u64;
    for k in [5, typical_vertex_count(n)] {
        let target = CalibrationTarget::new(n, n, k)?;
        let r = exact_calibrate(&target, config.truncation)?;
        out.push(CheckRecord::within(
            format!("calibration_residual_n300_k{k}"),
            0.0,
            r.max_residual(),
            CALIBRATION_RESIDUAL,
        ));
        if k == 5 {
            out.push(CheckRecord::relative("small_k_beta1_vs_k_over_n", k as f64 / n as f64, r.beta1, SMALL_K_BETA_REL));
        }
    }
    let (g, h) = finite_difference_errors(&CalibrationTarget::new(n, n, typical_vertex_count(n))?, config.truncation)?;
    out.push(CheckRecord::within("free_energy_gradient_fd_rel", 0.0, g, GRADIENT_FD_REL));
    out.push(CheckRecord::within("free_energy_hessian_fd_rel", 0.0, h, HESSIAN_FD_REL));
    Ok(out)
}

/// Largest relative disagreement of the analytic gradient and Hessian
/// diagonal with central differences at the calibrated point. Gradient
/// errors are relative to the target component, Hessian errors to the
/// diagonal entry.
pub fn finite_difference_errors(target: &CalibrationTarget, truncation: f64) -> Result<(f64, f64)> {
    let r = exact_calibrate(target, truncation)?;
    // Move off the minimum so the gradient is not zero.
    let x = [r.beta1 * 1.05, r.beta2 * 0.97, -r.lambda.ln() + 0.1];
    let params = |x: [f64; 3]| GibbsParams::linear(x[0], x[1], (-x[2]).exp()).with_truncation(truncation);
    let sites = SiteSet::for_params(&params(x))?;
    let m: MomentReport<f64> = moments_on(&params(x), &sites)?;
    let grad = free_energy_gradient(target, &m);
    let scale = [target.n1 as f64, target.n2 as f64, target.k as f64];
    let f = |x: [f64; 3]| free_energy_on(target, x[0], x[1], x[2], truncation, &sites);
    let mut gerr: f64 = 0.0;
    let mut herr: f64 = 0.0;
    for i in 0..3 {
        let h = FD_REL_STEP * x[i].abs().max(1.0);
        let mut xp = x;
        let mut xm = x;
        xp[i] += h;
        xm[i] -= h;
        let fd = (f(xp)? - f(xm)?) / (2.0 * h);
        gerr = gerr.max((fd - grad[i]).abs() / scale[i]);
        // Second differences of the gradient are better conditioned than
        // of f itself.
        let mp = moments_on(&params(xp), &sites)?;
        let mm = moments_on(&params(xm), &sites)?;
        let gp = free_energy_gradient(target, &mp);
        let gm = free_energy_gradient(target, &mm);
        let hd = (gp[i] - gm[i]) / (2.0 * h);
        herr = herr.max((hd - m.covariance[i][i]).abs() / m.covariance[i][i]);
    }
    Ok((gerr, herr))
}

fn shape_checks(config: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        // Exponential spread of theta over many scales.
        let theta: f64 = (rng.random::<f64>() * 20.0 - 10.0).exp();
        let p = parabola_point(theta, 1.0)?;
        worst = worst.max((p[1].sqrt() + (1.0 - p[0]).sqrt() - 1.0).abs());
    }
    out.push(CheckRecord::within("parabola_identity_max", 0.0, worst, PARABOLA_IDENTITY));
    let circle_worst = ShapeCurve::<f64>::Circle
        .samples(config.mesh)
        .iter()
        .map(|p| (p[0] * p[0] + (p[1] - 1.0).powi(2) - 1.0).abs())
        .fold(0.0, f64::max);
    out.push(CheckRecord::within("circle_identity_max", 0.0, circle_worst, PARABOLA_IDENTITY));
    out.push(CheckRecord::within("length_at_mixing_0", parabola_length(), mixed_length(0.0)?, LENGTH_AT_ZERO_TOL));
    let gap = polyline_hausdorff(
        &ShapeCurve::mixed(0.0)?.samples(4000),
        &ShapeCurve::parabola().samples(4000),
        4000,
    )?;
    out.push(CheckRecord::within("mixed_0_vs_parabola_gap", 0.0, gap, MIXED_PARABOLA_GAP));
    let circle = ShapeCurve::<f64>::Circle;
    let proxy = ShapeCurve::mixed(CIRCLE_PROXY_MIXING)?
        .samples(config.mesh)
        .iter()
        .filter_map(|&p| circle.exact_distance(p))
        .fold(0.0, f64::max);
    out.push(CheckRecord::within("mixed_large_vs_circle_gap", 0.0, proxy, CIRCLE_PROXY_GAP));
    out.push(CheckRecord::within(
        "length_at_large_mixing",
        std::f64::consts::FRAC_PI_2,
        mixed_length(CIRCLE_PROXY_MIXING)?,
        CIRCLE_PROXY_GAP,
    ));
    let d = hausdorff_distance(
        &crate::shapes::NormalizedPolyline {
            vertices: ShapeCurve::parabola().samples(10_000),
            scale: [1.0, 1.0],
        },
        &ShapeCurve::parabola(),
        10_000,
    )?;
    out.push(CheckRecord::below("parabola_self_distance_mesh_1e4", 2e-4, d));
    out.push(CheckRecord::within("c_at_1_closed_form", typical_vertex_constant(), c_of_ell(1.0)?, 1e-9));
    out.push(CheckRecord::within("e_at_1_closed_form", typical_entropy_constant(), e_of_ell(1.0)?, 1e-9));
    out.push(CheckRecord::within("c_at_1_published", PUBLISHED_C1, c_of_ell(1.0)?, PUBLISHED_DECIMALS_TOL));
    out.push(CheckRecord::within("e_at_1_published", PUBLISHED_E1, e_of_ell(1.0)?, PUBLISHED_DECIMALS_TOL));
    out.push(CheckRecord::relative("c_at_1e6_vs_max_density", max_vertex_constant(), c_of_ell(1e6)?, C_LARGE_ELL_REL));
    Ok(out)
}

fn jarnik_checks(config: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let l = 1e4;
    out.push(CheckRecord::relative("greedy_max_edges_length_1e4", jarnik_formula(l), jarnik_greedy(l)? as f64, JARNIK_GREEDY_REL));
    let r = run_jarnik(0.05, 1.0, 200, config.seed, config.mesh)?;
    out.push(CheckRecord::within(
        "mean_k_monte_carlo_beta_0.05",
        r.mean_k,
        r.empirical_mean_k,
        MC_STANDARD_ERRORS * r.k_standard_error,
    ));
    let fine = run_jarnik(0.02, 1.0, 100, config.seed, config.mesh)?;
    let coarse = run_jarnik(0.1, 1.0, 100, config.seed, config.mesh)?;
    out.push(CheckRecord::below(
        "circle_distance_beta_0.02_below_beta_0.1",
        coarse.median_circle_distance,
        fine.median_circle_distance,
    ));
    out.push(CheckRecord::relative("vertex_ratio_beta_0.02", fine.k_ratio_target, fine.k_ratio, 0.05));
    out.push(CheckRecord::relative("entropy_ratio_beta_0.02", fine.entropy_ratio_target, fine.entropy_ratio, 0.05));
    let len = calibrate_beta(OneParamModel::Euclidean { fugacity: 1.0 }, fine.mean_length, config.truncation)?;
    out.push(CheckRecord::relative("length_calibration_recovers_beta", 0.02, len, 1e-6));
    Ok(out)
}

fn mixed_checks(config: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let mixings = [-3.0, -0.5, 0.0, 1.0, 5.0];
    for &m in &mixings {
        let e = mixed_curve(m, std::f64::consts::FRAC_PI_2)?;
        out.push(CheckRecord::within(format!("endpoint_mixing_{m}"), 0.0, (e[0] - 1.0).hypot(e[1] - 1.0), 1e-9));
    }
    let lens: Vec<f64> = [0.0, 1.0, 10.0, 100.0].iter().map(|&m| mixed_length(m)).collect::<Result<_>>()?;
    out.push(CheckRecord::holds("length_decreases_on_0_1_10_100", lens.windows(2).all(|w| w[1] < w[0])));
    for m in [1.0, -0.5] {
        let coarse = mixed_shape_table(&[m], 0.04, 30.0, 400)?[0].profile_distance;
        let fine = mixed_shape_table(&[m], 0.02, 30.0, 400)?[0].profile_distance;
        out.push(CheckRecord::below(format!("profile_distance_shrinks_mixing_{m}"), coarse, fine));
        out.push(CheckRecord::below(format!("profile_distance_beta_0.02_mixing_{m}"), 0.01, fine));
    }
    let model = OneParamModel::Mixed { mixing: 1.0 };
    let beta = calibrate_beta(model, 500.0, config.truncation)?;
    let params = model.params(beta, config.truncation);
    let ex1 = moments_on(&params, &SiteSet::for_params(&params)?)?.ex1;
    out.push(CheckRecord::relative("mixed_calibration_mean_x1", 500.0, ex1, 1e-8));
    Ok(out)
}
