//! Grand-canonical product measure on multiplicity distributions.
//!
//! Each direction `x` carries an independent multiplicity with law
//! `P[w = j] ∝ exp(-j E(x)) lambda^{1{j > 0}}`, where `E` is the energy model.
//! Everything here is an exact finite sum over the sites with `E(x) <= T`,
//! together with a bound on what the truncation leaves out.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{primitive_vectors_by_weight_budgeted, MultiplicityDistribution, PrimitiveVector};
use crate::scalar::{lit, Real};
use crate::special::{parallel_constant_laurent, parallel_constant_published, zeta};
use crate::tolerances::{DEFAULT_SITE_BUDGET, DEFAULT_TRUNCATION, PARALLEL_SUM_TAIL};

/// Energy of a direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnergyModel<T> {
    /// `beta1 x1 + beta2 x2`.
    Linear { beta1: T, beta2: T },
    /// `beta |x|_2`.
    Euclidean { beta: T },
    /// `beta (|x|_1 + mixing sqrt(2) |x|_2)`, convergent for `mixing > -1/sqrt(2)`.
    Mixed { beta: T, mixing: T },
}

impl<T: Real> EnergyModel<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: T, name: &str| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match *self {
            EnergyModel::Linear { beta1, beta2 } => {
                pos(beta1, "beta1")?;
                pos(beta2, "beta2")
            }
            EnergyModel::Euclidean { beta } => pos(beta, "beta"),
            EnergyModel::Mixed { beta, mixing } => {
                pos(beta, "beta")?;
                if !(mixing > -T::FRAC_1_SQRT_2()) || !mixing.is_finite() {
                    return Err(Error::Divergent(format!(
                        "mixed energy needs mixing > -1/sqrt(2), got {mixing}"
                    )));
                }
                Ok(())
            }
        }
    }

    #[inline]
    pub fn energy(&self, x1: u32, x2: u32) -> T {
        let a = T::from_u32(x1).unwrap();
        let b = T::from_u32(x2).unwrap();
        match *self {
            EnergyModel::Linear { beta1, beta2 } => beta1 * a + beta2 * b,
            EnergyModel::Euclidean { beta } => beta * a.hypot(b),
            EnergyModel::Mixed { beta, mixing } => {
                beta * (a + b + mixing * T::SQRT_2() * a.hypot(b))
            }
        }
    }

    /// Constants `(lo, hi)` with `lo |x|_1 <= E(x) <= hi |x|_1`.
    pub fn l1_rates(&self) -> (T, T) {
        match *self {
            EnergyModel::Linear { beta1, beta2 } => (beta1.min(beta2), beta1.max(beta2)),
            EnergyModel::Euclidean { beta } => (beta * T::FRAC_1_SQRT_2(), beta),
            EnergyModel::Mixed { beta, mixing } => {
                let a = beta * (T::one() + mixing);
                let b = beta * (T::one() + mixing * T::SQRT_2());
                (a.min(b), a.max(b))
            }
        }
    }
}

/// Energy model, vertex fugacity and energy cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GibbsParams<T> {
    pub energy: EnergyModel<T>,
    pub fugacity: T,
    pub truncation: T,
}

impl<T: Real> GibbsParams<T> {
    pub fn linear(beta1: T, beta2: T, fugacity: T) -> Self {
        Self {
            energy: EnergyModel::Linear { beta1, beta2 },
            fugacity,
            truncation: lit(DEFAULT_TRUNCATION),
        }
    }

    pub fn euclidean(beta: T, fugacity: T) -> Self {
        Self {
            energy: EnergyModel::Euclidean { beta },
            fugacity,
            truncation: lit(DEFAULT_TRUNCATION),
        }
    }

    /// The mixed-norm model has no vertex weight; fugacity is fixed to 1.
    pub fn mixed(beta: T, mixing: T) -> Self {
        Self {
            energy: EnergyModel::Mixed { beta, mixing },
            fugacity: T::one(),
            truncation: lit(DEFAULT_TRUNCATION),
        }
    }

    pub fn with_truncation(mut self, truncation: T) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.energy.validate()?;
        if !(self.fugacity > T::zero()) || !self.fugacity.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "fugacity must be positive, got {}",
                self.fugacity
            )));
        }
        if !(self.truncation > T::zero()) || !self.truncation.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "truncation must be positive, got {}",
                self.truncation
            )));
        }
        Ok(())
    }

    /// Bound on `log Z_x` for any single omitted site.
    pub fn per_site_bound(&self) -> T {
        let e = (-self.truncation).exp();
        self.fugacity * e / (T::one() - e)
    }

    /// Bound on the total contribution to `log Z` of the omitted sites.
    ///
    /// Sites with `|x|_1 = m` number at most `m + 1`, and an omitted one has
    /// `m > T / hi` and `rho <= min(e^-T, e^(-lo m))`.
    pub fn truncation_bound(&self) -> T {
        let (lo, hi) = self.energy.l1_rates();
        let t = self.truncation;
        let e_t = (-t).exp();
        let scale = self.fugacity / (T::one() - e_t);
        let first = (t / hi).floor().to_usize().unwrap_or(usize::MAX - 1) + 1;
        let mut sum = T::zero();
        let mut m = first;
        loop {
            let mf = T::from_usize_lossy(m);
            let term = (mf + T::one()) * e_t.min((-lo * mf).exp());
            sum = sum + term;
            if lo * mf > t && term <= sum * T::epsilon() {
                break;
            }
            if m - first > 50_000_000 {
                return T::infinity();
            }
            m += 1;
        }
        scale * sum
    }
}

/// The sites kept by a truncation, in slope order. Holding the set fixed lets
/// finite differences in the parameters see a smooth function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteSet {
    sites: Vec<PrimitiveVector>,
}

impl SiteSet {
    pub fn for_params<T: Real>(params: &GibbsParams<T>) -> Result<Self> {
        Self::for_params_budgeted(params, DEFAULT_SITE_BUDGET)
    }

    pub fn for_params_budgeted<T: Real>(params: &GibbsParams<T>, budget: usize) -> Result<Self> {
        params.validate()?;
        let energy = params.energy;
        let sites =
            primitive_vectors_by_weight_budgeted(|a, b| energy.energy(a, b), params.truncation, budget)?;
        Ok(Self { sites })
    }

    pub fn from_vectors(mut sites: Vec<PrimitiveVector>) -> Self {
        sites.sort_unstable();
        sites.dedup();
        Self { sites }
    }

    pub fn as_slice(&self) -> &[PrimitiveVector] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

/// Per-site law: `rho = e^-E`, `p = P[w > 0]`, `1 - rho` computed without
/// cancellation.
#[derive(Clone, Copy, Debug)]
struct Site<T> {
    rho: T,
    one_minus_rho: T,
    p: T,
}

impl<T: Real> Site<T> {
    #[inline]
    fn new(energy: T, lambda: T) -> Self {
        let rho = (-energy).exp();
        let one_minus_rho = -(-energy).exp_m1();
        let w = lambda * rho;
        let p = w / (one_minus_rho + w);
        Site {
            rho,
            one_minus_rho,
            p,
        }
    }

    #[inline]
    fn log_z(&self, lambda: T) -> T {
        (lambda * self.rho / self.one_minus_rho).ln_1p()
    }

    /// `(E w, Var w, Cov(w, 1{w > 0}), Var 1{w > 0})`.
    #[inline]
    fn moments(&self) -> (T, T, T, T) {
        let mean = self.p / self.one_minus_rho;
        let second = self.p * (T::one() + self.rho) / (self.one_minus_rho * self.one_minus_rho);
        let var = second - mean * mean;
        (mean, var, mean * (T::one() - self.p), self.p * (T::one() - self.p))
    }
}

/// `log Z` over the sites of the truncation.
pub fn log_partition<T: Real>(params: &GibbsParams<T>) -> Result<T> {
    let sites = SiteSet::for_params(params)?;
    log_partition_on(params, &sites)
}

/// `log Z` summed over a given site set.
pub fn log_partition_on<T: Real>(params: &GibbsParams<T>, sites: &SiteSet) -> Result<T> {
    params.validate()?;
    let lambda = params.fugacity;
    Ok(sites.sites.iter().fold(T::zero(), |acc, x| {
        acc + Site::new(params.energy.energy(x.x1(), x.x2()), lambda).log_z(lambda)
    }))
}

/// Means and covariance of `(X1, X2, K)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport<T> {
    pub ex1: T,
    pub ex2: T,
    pub ek: T,
    pub covariance: [[T; 3]; 3],
    pub site_count: usize,
    pub truncation_bound: T,
    pub smallest_eigenvalue: T,
}

impl<T: Real> MomentReport<T> {
    pub fn means(&self) -> [T; 3] {
        [self.ex1, self.ex2, self.ek]
    }

    pub fn trace(&self) -> T {
        self.covariance[0][0] + self.covariance[1][1] + self.covariance[2][2]
    }

    /// Positive semidefinite up to rounding: smallest eigenvalue at least
    /// `-1e-10` times the trace.
    pub fn is_psd(&self) -> bool {
        self.smallest_eigenvalue >= -lit::<T>(1e-10) * self.trace()
    }

    pub fn to_json(&self) -> Result<String>
    where
        T: Serialize,
    {
        Ok(serde_json::to_string(self)?)
    }
}

pub fn moments<T: Real>(params: &GibbsParams<T>) -> Result<MomentReport<T>> {
    let sites = SiteSet::for_params(params)?;
    moments_on(params, &sites)
}

pub fn moments_on<T: Real>(params: &GibbsParams<T>, sites: &SiteSet) -> Result<MomentReport<T>> {
    params.validate()?;
    let lambda = params.fugacity;
    let mut mean = [T::zero(); 3];
    let mut cov = [[T::zero(); 3]; 3];
    for x in &sites.sites {
        let site = Site::new(params.energy.energy(x.x1(), x.x2()), lambda);
        let (m, v, c, vk) = site.moments();
        let a = T::from_u32(x.x1()).unwrap();
        let b = T::from_u32(x.x2()).unwrap();
        mean[0] = mean[0] + m * a;
        mean[1] = mean[1] + m * b;
        mean[2] = mean[2] + site.p;
        cov[0][0] = cov[0][0] + v * a * a;
        cov[0][1] = cov[0][1] + v * a * b;
        cov[1][1] = cov[1][1] + v * b * b;
        cov[0][2] = cov[0][2] + c * a;
        cov[1][2] = cov[1][2] + c * b;
        cov[2][2] = cov[2][2] + vk;
    }
    cov[1][0] = cov[0][1];
    cov[2][0] = cov[0][2];
    cov[2][1] = cov[1][2];
    Ok(MomentReport {
        ex1: mean[0],
        ex2: mean[1],
        ek: mean[2],
        covariance: cov,
        site_count: sites.len(),
        truncation_bound: params.truncation_bound(),
        smallest_eigenvalue: symmetric3_eigenvalues(&cov)[0],
    })
}

/// `E[sum_x w(x) E(x)]`, the mean total energy; for the Euclidean model
/// divided by `beta` this is the mean length.
pub fn mean_energy_on<T: Real>(params: &GibbsParams<T>, sites: &SiteSet) -> Result<T> {
    params.validate()?;
    let mut sum = T::zero();
    for x in &sites.sites {
        let e = params.energy.energy(x.x1(), x.x2());
        let (m, _, _, _) = Site::new(e, params.fugacity).moments();
        sum = sum + m * e;
    }
    Ok(sum)
}

/// Mean displacement carried by the directions of angle at most
/// `phi_j = j pi / (2 mesh)`, divided by the total mean displacement, for
/// `j = 0..=mesh`. As the parameters go to zero this traces the limit curve
/// parametrized by its tangent angle.
pub fn mean_profile_on<T: Real>(params: &GibbsParams<T>, sites: &SiteSet, mesh: usize) -> Result<Vec<[T; 2]>> {
    params.validate()?;
    let mesh = mesh.max(1);
    let angle = |j: usize| T::from_usize_lossy(j) / T::from_usize_lossy(mesh) * T::FRAC_PI_2();
    let mut out = Vec::with_capacity(mesh + 1);
    let mut acc = [T::zero(); 2];
    let mut j = 0;
    for x in &sites.sites {
        let a = T::from_u32(x.x1()).unwrap();
        let b = T::from_u32(x.x2()).unwrap();
        let theta = b.atan2(a);
        while j <= mesh && theta > angle(j) {
            out.push(acc);
            j += 1;
        }
        let (m, _, _, _) = Site::new(params.energy.energy(x.x1(), x.x2()), params.fugacity).moments();
        acc = [acc[0] + m * a, acc[1] + m * b];
    }
    while out.len() <= mesh {
        out.push(acc);
    }
    if !(acc[0] > T::zero() && acc[1] > T::zero()) {
        return Err(Error::InvalidArgument("profile needs sites on both sides of the diagonal".into()));
    }
    Ok(out.into_iter().map(|p| [p[0] / acc[0], p[1] / acc[1]]).collect())
}

/// Eigenvalues of a symmetric 3x3 matrix in ascending order (trigonometric
/// closed form).
pub fn symmetric3_eigenvalues<T: Real>(a: &[[T; 3]; 3]) -> [T; 3] {
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let q = (a[0][0] + a[1][1] + a[2][2]) / lit(3.0);
    if p1 == T::zero() {
        let mut d = [a[0][0], a[1][1], a[2][2]];
        d.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        return d;
    }
    let sq = |x: T| x * x;
    let p2 = sq(a[0][0] - q) + sq(a[1][1] - q) + sq(a[2][2] - q) + lit::<T>(2.0) * p1;
    let p = (p2 / lit(6.0)).sqrt();
    let mut b = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { q } else { T::zero() };
            b[i][j] = (a[i][j] - id) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det / lit(2.0)).max(-T::one()).min(T::one());
    let phi = r.acos() / lit(3.0);
    let two_pi_3: T = lit(2.0 * std::f64::consts::PI / 3.0);
    let two: T = lit(2.0);
    let hi = q + two * p * phi.cos();
    let lo = q + two * p * (phi + two_pi_3).cos();
    let mid = lit::<T>(3.0) * q - hi - lo;
    [lo, mid, hi]
}

/// One draw from `P[j] ∝ rho^j lambda^{1{j > 0}}`: zero with probability
/// `1 / (1 + lambda rho / (1 - rho))`, otherwise one plus a geometric
/// variable with ratio `rho`.
pub fn biased_geometric<T: Real, R: Rng + ?Sized>(rho: T, lambda: T, rng: &mut R) -> Result<u64> {
    if !(rho > T::zero() && rho < T::one()) {
        return Err(Error::InvalidArgument(format!("rho must lie in (0, 1), got {rho}")));
    }
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    let one_minus = T::one() - rho;
    let p = lambda * rho / (one_minus + lambda * rho);
    Ok(draw_site(p, rho.ln(), rng))
}

#[inline]
fn draw_site<T: Real, R: Rng + ?Sized>(p: T, ln_rho: T, rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    if lit::<T>(u) >= p {
        return 0;
    }
    // 1 - U lies in (0, 1]; floor(ln V / ln rho) is geometric with ratio rho.
    let v: f64 = 1.0 - rng.random::<f64>();
    let g = (lit::<T>(v).ln() / ln_rho).floor();
    1 + g.to_u64().unwrap_or(u64::MAX - 1)
}

/// Generator for the site of slope rank `rank`: the seed picks the key and
/// the rank picks the stream, so draws do not depend on iteration order.
pub fn site_rng(seed: u64, rank: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rank as u64);
    rng
}

/// One sample of the product measure.
pub fn sample_omega<T: Real>(params: &GibbsParams<T>, seed: u64) -> Result<MultiplicityDistribution> {
    let sites = SiteSet::for_params(params)?;
    sample_omega_on(params, &sites, seed)
}

pub fn sample_omega_on<T: Real>(
    params: &GibbsParams<T>,
    sites: &SiteSet,
    seed: u64,
) -> Result<MultiplicityDistribution> {
    params.validate()?;
    let lambda = params.fugacity;
    let mut omega = MultiplicityDistribution::new();
    for (rank, x) in sites.sites.iter().enumerate() {
        let e = params.energy.energy(x.x1(), x.x2());
        let site = Site::new(e, lambda);
        let mut rng = site_rng(seed, rank);
        let m = draw_site(site.p, -e, &mut rng);
        if m > 0 {
            omega.set(*x, m);
        }
    }
    Ok(omega)
}

/// Observables `(X1, X2, K)` of one sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Observables {
    pub x1: u64,
    pub x2: u64,
    pub k: u64,
}

/// Fast sampler of `(X1, X2, K)` alone, for rare-event frequencies.
///
/// Sites are sorted by decreasing `p` and cut into blocks; inside a block the
/// nonzero sites are found by geometric skips at the block's largest `p` and
/// thinning. The law is exactly that of [`sample_omega_on`], but the random
/// stream is a single one per sample, so individual draws differ.
pub struct ObservableSampler<T> {
    sites: Vec<(u32, u32, T, T)>, // (x1, x2, p, ln rho)
    blocks: Vec<SkipBlock<T>>,
}

// Sites [start, end) share the rate pmax; `hazard` is -ln(1 - pmax) per site
// and `before` the total hazard of all earlier blocks.
struct SkipBlock<T> {
    start: usize,
    end: usize,
    pmax: T,
    hazard: T,
    before: T,
}

const SKIP_BLOCK: usize = 64;

impl<T: Real> ObservableSampler<T> {
    pub fn new(params: &GibbsParams<T>, sites: &SiteSet) -> Result<Self> {
        params.validate()?;
        let mut v: Vec<(u32, u32, T, T)> = sites
            .sites
            .iter()
            .map(|x| {
                let e = params.energy.energy(x.x1(), x.x2());
                (x.x1(), x.x2(), Site::new(e, params.fugacity).p, -e)
            })
            .collect();
        v.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap_or(std::cmp::Ordering::Equal));
        let v: Vec<_> = v.into_iter().take_while(|s| s.2 > T::zero()).collect();
        let cap = T::one() - T::epsilon();
        let mut blocks = Vec::new();
        let mut before = T::zero();
        for start in (0..v.len()).step_by(SKIP_BLOCK) {
            let end = (start + SKIP_BLOCK).min(v.len());
            let pmax = v[start].2;
            let hazard = -(T::one() - pmax.min(cap)).ln();
            blocks.push(SkipBlock { start, end, pmax, hazard, before });
            before = before + hazard * lit((end - start) as f64);
        }
        Ok(Self { sites: v, blocks })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Observables {
        let mut obs = Observables { x1: 0, x2: 0, k: 0 };
        self.walk(rng, |a, b, m| {
            obs.x1 += m * a as u64;
            obs.x2 += m * b as u64;
            obs.k += 1;
        });
        obs
    }

    // Candidates are the points where the running hazard crosses a sum of
    // unit exponentials; inside block b this is a geometric skip at rate
    // pmax_b, and each candidate is kept with probability p / pmax_b.
    fn walk<R: Rng + ?Sized>(&self, rng: &mut R, mut visit: impl FnMut(u32, u32, u64)) {
        let mut pos = T::zero();
        let mut b = 0;
        while b < self.blocks.len() {
            let u: f64 = 1.0 - rng.random::<f64>();
            let target = pos - lit::<T>(u).ln();
            b += self.blocks[b..].partition_point(|blk| {
                blk.before + blk.hazard * lit((blk.end - blk.start) as f64) <= target
            });
            let Some(blk) = self.blocks.get(b) else { break };
            let offset = ((target - blk.before) / blk.hazard).floor().to_usize().unwrap_or(0);
            let i = (blk.start + offset).min(blk.end - 1);
            let (a, c, p, ln_rho) = self.sites[i];
            let accept: f64 = rng.random();
            if lit::<T>(accept) * blk.pmax < p {
                let v: f64 = 1.0 - rng.random::<f64>();
                let m = 1 + (lit::<T>(v).ln() / ln_rho).floor().to_u64().unwrap_or(0);
                visit(a, c, m);
            }
            pos = blk.before + blk.hazard * lit((i - blk.start + 1) as f64);
            if i + 1 == blk.end {
                b += 1;
            }
        }
    }

    /// A full sample drawn with the same skips as [`Self::sample`].
    pub fn sample_omega<R: Rng + ?Sized>(&self, rng: &mut R) -> MultiplicityDistribution {
        let mut omega = MultiplicityDistribution::new();
        self.walk(rng, |a, b, m| omega.set(PrimitiveVector::new_unchecked(a, b), m));
        omega
    }
}

/// One JSON line of a sample dump.
#[derive(Serialize)]
pub struct SampleRecord<'a, T> {
    pub seed: u64,
    pub params: &'a GibbsParams<T>,
    pub omega: &'a MultiplicityDistribution,
}

impl<T: Real + Serialize> SampleRecord<'_, T> {
    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// How [`parallel_probability`] is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParallelMode {
    /// Truncated double sum over all directions, axes included.
    ExactSum,
    /// The same sum restricted to directions with both coordinates positive.
    InteriorSum,
    /// `beta^2 ln(1/beta) / zeta(2) - C beta^2` with the published constant.
    Asymptotic,
    /// The same expansion with the Laurent constant of the interior sum.
    LaurentAsymptotic,
}

/// Probability that two independent vectors with geometric coordinates of
/// ratio `e^-beta`, both nonzero, are parallel:
/// `(1 - e^-beta)^4 sum_x sum_{i,j >= 1} e^{-beta (i + j)(x1 + x2)}`.
pub fn parallel_probability<T: Real>(beta: T, mode: ParallelMode) -> Result<T> {
    if !(beta > T::zero() && beta <= lit(0.2)) {
        return Err(Error::InvalidArgument(format!("beta must lie in (0, 0.2], got {beta}")));
    }
    let b2 = beta * beta;
    let log_term = b2 * beta.recip().ln() / zeta(lit::<T>(2.0))?;
    match mode {
        ParallelMode::Asymptotic => Ok(log_term - parallel_constant_published::<T>() * b2),
        ParallelMode::LaurentAsymptotic => Ok(log_term - parallel_constant_laurent::<T>() * b2),
        ParallelMode::ExactSum => Ok(parallel_sum(beta, true).0),
        ParallelMode::InteriorSum => Ok(parallel_sum(beta, false).0),
    }
}

/// The double sum grouped by `s = x1 + x2`: `phi(s)` interior directions per
/// level (plus the two axis directions at `s = 1`), each contributing
/// `(q / (1 - q))^2` with `q = e^{-beta s}`. Returns the value and the bound
/// on the omitted levels.
pub fn parallel_sum<T: Real>(beta: T, with_axes: bool) -> (T, T) {
    let prefactor = (-(-beta).exp_m1()).powi(4);
    let tol: T = lit(PARALLEL_SUM_TAIL);
    // Omitted levels s > S contribute at most
    // prefactor * sum_{s > S} s e^{-2 beta s} / (1 - e^{-beta})^2.
    let denom = (-(-beta).exp_m1()).powi(2);
    let tail = |s: usize| -> T {
        let q = (-beta * lit::<T>(2.0)).exp();
        let sf = T::from_usize_lossy(s);
        // sum_{t > s} t q^t <= q^(s+1) ((s+1) / (1-q) + q / (1-q)^2)
        let one_q = T::one() - q;
        prefactor / denom * q.powf(sf + T::one()) * ((sf + T::one()) / one_q + q / (one_q * one_q))
    };
    let mut limit = 16usize;
    while tail(limit) > tol {
        limit *= 2;
    }
    let phi = totients(limit);
    let mut sum = T::zero();
    for (s, &ph) in phi.iter().enumerate().skip(1) {
        let count = if s == 1 {
            if with_axes {
                2
            } else {
                0
            }
        } else {
            ph
        };
        if count == 0 {
            continue;
        }
        let q = (-beta * T::from_usize_lossy(s)).exp();
        let r = q / (T::one() - q);
        sum = sum + T::from_usize_lossy(count) * r * r;
    }
    (prefactor * sum, tail(limit))
}

fn totients(n: usize) -> Vec<usize> {
    let mut phi: Vec<usize> = (0..=n).collect();
    for i in 2..=n {
        if phi[i] == i {
            let mut j = i;
            while j <= n {
                phi[j] -= phi[j] / i;
                j += i;
            }
        }
    }
    phi
}
