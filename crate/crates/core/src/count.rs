//! Exact enumeration of convex lattice lines: counts by vertex number, the
//! maximal vertex number, length-bucketed counts and brute-force oracles.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{CheckedAdd, One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{primitive_vectors_in_box, MultiplicityDistribution, PrimitiveVector};
use crate::tolerances::{BRUTE_FORCE_CAP, DEFAULT_COUNT_BUDGET, LENGTH_ENUM_CAP};

/// Additive counter used by the dynamic program. `u128` is tried first and
/// the computation is redone in `BigUint` if it overflows.
pub trait Count: Clone + Zero + One + CheckedAdd {}
impl Count for u128 {}
impl Count for BigUint {}

/// Exact counts `p(a, b; k)` for every `a <= n1`, `b <= n2`, `k <= kmax`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    n1: u32,
    n2: u32,
    kmax: usize,
    data: Vec<BigUint>,
}

#[derive(Serialize)]
struct Row {
    n1: u32,
    n2: u32,
    k: usize,
    count: String,
}

impl CountTable {
    pub fn n1(&self) -> u32 {
        self.n1
    }

    pub fn n2(&self) -> u32 {
        self.n2
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    fn index(&self, a: u32, b: u32, k: usize) -> usize {
        ((a as usize) * (self.n2 as usize + 1) + b as usize) * (self.kmax + 1) + k
    }

    /// `p(a, b; k)`; `None` outside the computed range.
    pub fn get(&self, a: u32, b: u32, k: usize) -> Option<&BigUint> {
        if a > self.n1 || b > self.n2 || k > self.kmax {
            return None;
        }
        Some(&self.data[self.index(a, b, k)])
    }

    /// Counts at the table's own endpoint, indexed by `k`.
    pub fn at_endpoint(&self) -> Vec<BigUint> {
        (0..=self.kmax)
            .map(|k| self.data[self.index(self.n1, self.n2, k)].clone())
            .collect()
    }

    /// `sum_k p(a, b; k)` over the computed range of `k`.
    pub fn total(&self, a: u32, b: u32) -> Option<BigUint> {
        if a > self.n1 || b > self.n2 {
            return None;
        }
        Some((0..=self.kmax).map(|k| &self.data[self.index(a, b, k)]).sum())
    }

    /// Every `(a, b, k, count)` entry in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, usize, &BigUint)> + '_ {
        (0..=self.n1).flat_map(move |a| {
            (0..=self.n2).flat_map(move |b| {
                (0..=self.kmax).map(move |k| (a, b, k, &self.data[self.index(a, b, k)]))
            })
        })
    }

    fn endpoint_rows(&self) -> Vec<Row> {
        (1..=self.kmax)
            .map(|k| Row {
                n1: self.n1,
                n2: self.n2,
                k,
                count: self.data[self.index(self.n1, self.n2, k)].to_string(),
            })
            .collect()
    }

    /// CSV rows `n1,n2,k,count` at the table's endpoint for `1 <= k <= kmax`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n1,n2,k,count\n");
        for r in self.endpoint_rows() {
            s.push_str(&format!("{},{},{},{}\n", r.n1, r.n2, r.k, r.count));
        }
        s
    }

    /// Same rows as [`CountTable::to_csv`], as a JSON array.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.endpoint_rows())?)
    }
}

fn box_vectors(n1: u32, n2: u32) -> Result<Vec<PrimitiveVector>> {
    Ok(primitive_vectors_in_box(n1, n2)?.into_vec())
}

fn guard(n1: u32, n2: u32, kmax: usize, sites: usize, budget: f64) -> Result<()> {
    let estimate = (n1 as f64 + 1.0) * (n2 as f64 + 1.0) * (kmax as f64 + 1.0) * sites as f64;
    if estimate > budget {
        return Err(Error::BudgetExceeded { estimate, budget });
    }
    Ok(())
}

/// Exact `p(a, b; k)` for the whole box up to `(n1, n2)` and `k <= kmax`.
pub fn count_lines_k(n1: u32, n2: u32, kmax: usize) -> Result<CountTable> {
    count_lines_k_budgeted(n1, n2, kmax, DEFAULT_COUNT_BUDGET)
}

pub fn count_lines_k_budgeted(n1: u32, n2: u32, kmax: usize, budget: f64) -> Result<CountTable> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument("endpoint coordinates must be positive".into()));
    }
    if kmax == 0 {
        return Err(Error::InvalidArgument("kmax must be positive".into()));
    }
    let vectors = box_vectors(n1, n2)?;
    guard(n1, n2, kmax, vectors.len(), budget)?;
    let data = match dp::<u128>(n1, n2, kmax, &vectors) {
        Some(d) => d.into_iter().map(BigUint::from).collect(),
        None => dp::<BigUint>(n1, n2, kmax, &vectors).ok_or(Error::Overflow)?,
    };
    Ok(CountTable {
        n1,
        n2,
        kmax,
        data,
    })
}

/// Processes one direction at a time. With `S[a][k] = sum_{m >= 1} old[a - m v][k - 1]`,
/// the recursion `S[a][k] = old[a - v][k - 1] + S[a - v][k]` gives every
/// multiplicity of `v` in one pass.
fn dp<C: Count>(n1: u32, n2: u32, kmax: usize, vectors: &[PrimitiveVector]) -> Option<Vec<C>> {
    let (w, h, kk) = (n1 as usize + 1, n2 as usize + 1, kmax + 1);
    let idx = |a: usize, b: usize, k: usize| (a * h + b) * kk + k;
    let mut table = vec![C::zero(); w * h * kk];
    table[idx(0, 0, 0)] = C::one();
    let mut helper = vec![C::zero(); w * h * kk];
    for v in vectors {
        let (v1, v2) = (v.x1() as usize, v.x2() as usize);
        for a in 0..w {
            for b in 0..h {
                if a < v1 || b < v2 {
                    for k in 0..kk {
                        helper[idx(a, b, k)] = C::zero();
                    }
                    continue;
                }
                let (pa, pb) = (a - v1, b - v2);
                helper[idx(a, b, 0)] = C::zero();
                for k in 1..kk {
                    let s = table[idx(pa, pb, k - 1)].checked_add(&helper[idx(pa, pb, k)])?;
                    helper[idx(a, b, k)] = s;
                }
            }
        }
        for (t, s) in table.iter_mut().zip(helper.iter()) {
            if !s.is_zero() {
                *t = t.checked_add(s)?;
            }
        }
    }
    Some(table)
}

/// Maximal vertex number `M(n1, n2)` over convex lines to `(n1, n2)`.
pub fn max_vertices(n1: u32, n2: u32) -> Result<usize> {
    max_vertices_budgeted(n1, n2, DEFAULT_COUNT_BUDGET)
}

pub fn max_vertices_budgeted(n1: u32, n2: u32, budget: f64) -> Result<usize> {
    Ok(max_vertices_table(n1, n2, budget)?[n1 as usize][n2 as usize].unwrap_or(0))
}

/// `M(a, b)` for every point of the box, by the max-plus version of the
/// counting recursion.
pub fn max_vertices_table(n1: u32, n2: u32, budget: f64) -> Result<Vec<Vec<Option<usize>>>> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument("endpoint coordinates must be positive".into()));
    }
    let vectors = box_vectors(n1, n2)?;
    guard(n1, n2, 0, vectors.len(), budget)?;
    let (w, h) = (n1 as usize + 1, n2 as usize + 1);
    let mut best: Vec<Option<usize>> = vec![None; w * h];
    best[0] = Some(0);
    let mut helper: Vec<Option<usize>> = vec![None; w * h];
    for v in &vectors {
        let (v1, v2) = (v.x1() as usize, v.x2() as usize);
        for a in 0..w {
            for b in 0..h {
                helper[a * h + b] = if a < v1 || b < v2 {
                    None
                } else {
                    let p = (a - v1) * h + (b - v2);
                    best[p].max(helper[p])
                };
            }
        }
        for (t, s) in best.iter_mut().zip(helper.iter()) {
            if let Some(s) = s {
                *t = (*t).max(Some(s + 1));
            }
        }
    }
    Ok(best.chunks(h).map(|r| r.to_vec()).collect())
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn factorial(k: u64) -> BigUint {
    (1..=k).map(BigUint::from).product()
}

/// `p(n, n; k) k! / C(n - 1, k - 1)^2` as an exact rational.
pub fn erdos_lehner_ratio_exact(n: u32, k: usize) -> Result<BigRational> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument("n and k must be positive".into()));
    }
    let table = count_lines_k(n, n, k)?;
    let p = table.get(n, n, k).cloned().unwrap_or_default();
    let b = binomial(n as u64 - 1, k as u64 - 1);
    if b.is_zero() {
        return Err(Error::InvalidArgument(format!("C({}, {}) vanishes", n - 1, k - 1)));
    }
    let num = BigInt::from(p * factorial(k as u64));
    let den = BigInt::from(&b * &b);
    Ok(BigRational::new(num, den))
}

/// [`erdos_lehner_ratio_exact`] converted to `f64`.
pub fn erdos_lehner_ratio(n: u32, k: usize) -> Result<f64> {
    erdos_lehner_ratio_exact(n, k)?.to_f64().ok_or(Error::Overflow)
}

/// Every multiplicity distribution with endpoint `(n1, n2)`, by exhaustive
/// recursion over the directions of the box.
pub fn brute_force_enum(n1: u32, n2: u32) -> Result<Vec<MultiplicityDistribution>> {
    let cap = BRUTE_FORCE_CAP as u32;
    if n1 > cap || n2 > cap {
        return Err(Error::CapExceeded {
            what: "brute-force enumeration",
            value: n1.max(n2) as usize,
            cap: BRUTE_FORCE_CAP,
        });
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument("endpoint coordinates must be positive".into()));
    }
    let vectors = box_vectors(n1, n2)?;
    let mut out = Vec::new();
    let mut current = Vec::new();
    brute_recurse(&vectors, 0, [n1 as u64, n2 as u64], &mut current, &mut out);
    Ok(out)
}

fn brute_recurse(
    vectors: &[PrimitiveVector],
    start: usize,
    rem: [u64; 2],
    current: &mut Vec<(PrimitiveVector, u64)>,
    out: &mut Vec<MultiplicityDistribution>,
) {
    if rem == [0, 0] {
        out.push(MultiplicityDistribution::from_pairs(current.iter().copied()));
        return;
    }
    for (i, &v) in vectors.iter().enumerate().skip(start) {
        let (v1, v2) = (v.x1() as u64, v.x2() as u64);
        let mut m = 1;
        while m * v1 <= rem[0] && m * v2 <= rem[1] {
            current.push((v, m));
            brute_recurse(vectors, i + 1, [rem[0] - m * v1, rem[1] - m * v2], current, out);
            current.pop();
            m += 1;
        }
    }
}

/// All lines to `(n1, n2)` with exactly `k` directions. With
/// `strictly_north_east`, directions on the axes are excluded.
///
/// The last direction is forced by the remaining displacement, so the cost is
/// about `|directions|^(k-1)`; no size cap beyond the caller's patience.
pub fn enumerate_lines_with_k(
    n1: u32,
    n2: u32,
    k: usize,
    strictly_north_east: bool,
) -> Result<Vec<MultiplicityDistribution>> {
    if n1 == 0 || n2 == 0 || k == 0 {
        return Err(Error::InvalidArgument("n1, n2, k must be positive".into()));
    }
    let vectors: Vec<PrimitiveVector> = box_vectors(n1, n2)?
        .into_iter()
        .filter(|v| !strictly_north_east || !v.is_axis())
        .collect();
    let rank: BTreeMap<PrimitiveVector, usize> =
        vectors.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    k_recurse(&vectors, &rank, 0, k, [n1 as u64, n2 as u64], &mut current, &mut out);
    Ok(out)
}

fn k_recurse(
    vectors: &[PrimitiveVector],
    rank: &BTreeMap<PrimitiveVector, usize>,
    start: usize,
    left: usize,
    rem: [u64; 2],
    current: &mut Vec<(PrimitiveVector, u64)>,
    out: &mut Vec<MultiplicityDistribution>,
) {
    if left == 1 {
        let g = rem[0].gcd(&rem[1]);
        if g == 0 {
            return;
        }
        let (d1, d2) = (rem[0] / g, rem[1] / g);
        let Ok(v) = PrimitiveVector::new(d1 as u32, d2 as u32) else {
            return;
        };
        if rank.get(&v).is_some_and(|&r| r >= start) {
            current.push((v, g));
            out.push(MultiplicityDistribution::from_pairs(current.iter().copied()));
            current.pop();
        }
        return;
    }
    for (i, &v) in vectors.iter().enumerate().skip(start) {
        if vectors.len() - i < left {
            break;
        }
        let (v1, v2) = (v.x1() as u64, v.x2() as u64);
        let mut m = 1;
        while m * v1 <= rem[0] && m * v2 <= rem[1] {
            let next = [rem[0] - m * v1, rem[1] - m * v2];
            if next != [0, 0] {
                current.push((v, m));
                k_recurse(vectors, rank, i + 1, left - 1, next, current, out);
                current.pop();
            }
            m += 1;
        }
    }
}

/// Order in which [`count_by_length`] walks the directions. Both orders
/// enumerate the same set of lines; comparing them checks the pruning.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LengthOrder {
    Slope,
    Length,
}

/// Counts of nonempty lines issuing from the origin with Euclidean length
/// below `lmax`, keyed by `(floor(length), K)`. Buckets are half-open.
pub fn count_by_length(lmax: f64, order: LengthOrder) -> Result<BTreeMap<(u64, usize), u64>> {
    if !(lmax > 0.0) {
        return Err(Error::InvalidArgument("lmax must be positive".into()));
    }
    if lmax > LENGTH_ENUM_CAP {
        return Err(Error::CapExceeded {
            what: "length-bucketed enumeration",
            value: lmax.ceil() as usize,
            cap: LENGTH_ENUM_CAP as usize,
        });
    }
    let side = lmax.floor() as u32;
    let mut dirs: Vec<(PrimitiveVector, f64)> = if side == 0 {
        Vec::new()
    } else {
        box_vectors(side, side)?
            .into_iter()
            .map(|v| (v, v.euclidean::<f64>()))
            .filter(|&(_, l)| l < lmax)
            .collect()
    };
    if order == LengthOrder::Length {
        dirs.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    }
    let mut out = BTreeMap::new();
    length_recurse(&dirs, 0, 0.0, 0, lmax, order, &mut out);
    Ok(out)
}

fn length_recurse(
    dirs: &[(PrimitiveVector, f64)],
    start: usize,
    length: f64,
    k: usize,
    lmax: f64,
    order: LengthOrder,
    out: &mut BTreeMap<(u64, usize), u64>,
) {
    if k > 0 {
        *out.entry((length.floor() as u64, k)).or_insert(0) += 1;
    }
    for (i, &(_, l)) in dirs.iter().enumerate().skip(start) {
        if length + l >= lmax {
            // Sorted by length: every later direction is at least as long.
            if order == LengthOrder::Length {
                break;
            }
            continue;
        }
        let mut m = 1.0;
        while length + m * l < lmax {
            length_recurse(dirs, i + 1, length + m * l, k + 1, lmax, order, out);
            m += 1.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn unit_box() {
        let t = count_lines_k(1, 1, 2).unwrap();
        assert_eq!(t.at_endpoint(), vec![big(0), big(1), big(1)]);
        assert_eq!(t.total(1, 1).unwrap(), big(2));
        assert_eq!(brute_force_enum(1, 1).unwrap().len(), 2);
    }

    #[test]
    fn two_box_k2_lines() {
        let t = count_lines_k(2, 2, 4).unwrap();
        assert_eq!(t.get(2, 2, 1), Some(&big(1)));
        assert_eq!(t.get(2, 2, 2), Some(&big(3)));
        let mut pairs: Vec<Vec<(u32, u32)>> = brute_force_enum(2, 2)
            .unwrap()
            .into_iter()
            .filter(|w| w.vertex_count() == 2)
            .map(|w| w.iter().map(|(v, _)| (v.x1(), v.x2())).collect())
            .collect();
        pairs.sort();
        assert_eq!(
            pairs,
            vec![
                vec![(1, 0), (0, 1)],
                vec![(1, 0), (1, 2)],
                vec![(2, 1), (0, 1)],
            ]
        );
    }

    #[test]
    fn diagonal_single_direction() {
        for n in 1..=15 {
            let t = count_lines_k(n, n, 1).unwrap();
            assert_eq!(t.get(n, n, 1), Some(&big(1)));
        }
    }

    #[test]
    fn known_counts_at_thirty() {
        let t = count_lines_k(30, 30, 8).unwrap();
        let expect = [0u64, 1, 465, 39585, 1079616, 12617082, 71309215, 207414660, 318335305];
        let got: Vec<BigUint> = t.at_endpoint();
        assert_eq!(got, expect.iter().map(|&x| big(x)).collect::<Vec<_>>());
    }

    #[test]
    fn big_integer_fallback_agrees() {
        let v = box_vectors(9, 7).unwrap();
        let a = dp::<u128>(9, 7, 6, &v).unwrap();
        let b = dp::<BigUint>(9, 7, 6, &v).unwrap();
        assert_eq!(a.into_iter().map(BigUint::from).collect::<Vec<_>>(), b);
    }

    #[test]
    fn budget_guard_refuses() {
        match count_lines_k_budgeted(50, 50, 10, 1e6) {
            Err(Error::BudgetExceeded { estimate, budget }) => {
                assert!(estimate > budget);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn brute_force_cap() {
        assert!(matches!(brute_force_enum(13, 2), Err(Error::CapExceeded { .. })));
        assert!(brute_force_enum(0, 2).is_err());
    }

    #[test]
    fn maximal_vertices_small() {
        assert_eq!(max_vertices(1, 1).unwrap(), 2);
        assert_eq!(max_vertices(1, 2).unwrap(), 2);
        for n1 in 1..=6 {
            for n2 in 1..=6 {
                let brute = brute_force_enum(n1, n2)
                    .unwrap()
                    .iter()
                    .map(|w| w.vertex_count())
                    .max()
                    .unwrap();
                assert_eq!(max_vertices(n1, n2).unwrap(), brute, "({n1}, {n2})");
            }
        }
    }

    #[test]
    fn maximal_vertices_near_limit_constant() {
        let limit = crate::special::max_vertex_constant::<f64>();
        for n in [20u32, 30, 40, 50, 60] {
            let r = max_vertices(n, n).unwrap() as f64 / (n as f64).powf(2.0 / 3.0);
            assert!(r > limit * 0.95 && r < limit * 1.1, "n = {n}: {r}");
        }
        assert_eq!(max_vertices(60, 60).unwrap(), 22);
    }

    #[test]
    fn positive_counts_exactly_up_to_max() {
        for n in [5u32, 9, 12] {
            let m = max_vertices(n, n).unwrap();
            let t = count_lines_k(n, n, m + 2).unwrap();
            for k in 0..=m + 2 {
                let positive = !t.get(n, n, k).unwrap().is_zero();
                assert_eq!(positive, (1..=m).contains(&k), "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn erdos_lehner_trivial() {
        assert_eq!(erdos_lehner_ratio(1, 1).unwrap(), 1.0);
        // p(n, n; 1) = 1 and C(n-1, 0) = 1.
        assert_eq!(erdos_lehner_ratio(17, 1).unwrap(), 1.0);
    }

    #[test]
    fn k_enumeration_matches_counts() {
        let t = count_lines_k(11, 9, 4).unwrap();
        for k in 1..=4 {
            let lines = enumerate_lines_with_k(11, 9, k, false).unwrap();
            assert_eq!(BigUint::from(lines.len()), *t.get(11, 9, k).unwrap());
            assert!(lines.iter().all(|w| w.vertex_count() == k && w.endpoint() == [11, 9]));
        }
        let ne = enumerate_lines_with_k(11, 9, 3, true).unwrap();
        let all = enumerate_lines_with_k(11, 9, 3, false).unwrap();
        let filtered = all.iter().filter(|w| w.is_strictly_north_east()).count();
        assert_eq!(ne.len(), filtered);
    }

    #[test]
    fn short_lengths() {
        let b = count_by_length(1.5, LengthOrder::Slope).unwrap();
        assert_eq!(b.get(&(1, 1)), Some(&3));
        assert_eq!(b.len(), 1);
        assert!(b.keys().all(|&(bucket, _)| bucket != 0));
        let tiny = count_by_length(0.9, LengthOrder::Slope).unwrap();
        assert!(tiny.is_empty());
        assert!(count_by_length(15.5, LengthOrder::Slope).is_err());
    }

    #[test]
    fn length_orders_agree() {
        let a = count_by_length(10.0, LengthOrder::Slope).unwrap();
        let b = count_by_length(10.0, LengthOrder::Length).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_and_json_rows() {
        let t = count_lines_k(2, 2, 2).unwrap();
        assert_eq!(t.to_csv(), "n1,n2,k,count\n2,2,1,1\n2,2,2,3\n");
        let v: serde_json::Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(v[1]["count"], "3");
    }
}
