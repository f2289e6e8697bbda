//! Primitive lattice directions and the correspondence between multiplicity
//! distributions and convex polygonal lines.
//!
//! A line issuing from the origin with edges of nonnegative slope is encoded by
//! the number of unit steps it takes along each primitive direction. Vertex
//! count convention: `K` is the number of distinct directions, so a line with
//! `K = k` has `k + 1` lattice points including both endpoints.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tolerances::DEFAULT_SITE_BUDGET;

/// A lattice direction `(x1, x2)` with coprime nonnegative coordinates.
///
/// Ordering is by slope `x2 / x1`, with `(1, 0)` first and `(0, 1)` last.
/// Two distinct primitive vectors never share a slope, so this is a total
/// order compatible with equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimitiveVector {
    x1: u32,
    x2: u32,
}

impl PrimitiveVector {
    pub fn new(x1: u32, x2: u32) -> Result<Self> {
        if x1.gcd(&x2) != 1 {
            return Err(Error::InvalidArgument(format!(
                "({x1}, {x2}) is not a primitive vector"
            )));
        }
        Ok(Self { x1, x2 })
    }

    /// Caller guarantees `gcd(x1, x2) == 1`.
    #[inline]
    pub(crate) const fn new_unchecked(x1: u32, x2: u32) -> Self {
        Self { x1, x2 }
    }

    #[inline]
    pub fn x1(self) -> u32 {
        self.x1
    }

    #[inline]
    pub fn x2(self) -> u32 {
        self.x2
    }

    /// Taxicab norm.
    #[inline]
    pub fn l1(self) -> u64 {
        self.x1 as u64 + self.x2 as u64
    }

    pub fn euclidean<T: Real>(self) -> T {
        let a = T::from_u32(self.x1).unwrap();
        let b = T::from_u32(self.x2).unwrap();
        a.hypot(b)
    }

    /// Exact slope comparison by cross product.
    #[inline]
    pub fn cmp_slope(self, other: Self) -> Ordering {
        let lhs = self.x2 as u64 * other.x1 as u64;
        let rhs = self.x1 as u64 * other.x2 as u64;
        lhs.cmp(&rhs)
    }

    pub fn is_axis(self) -> bool {
        self.x1 == 0 || self.x2 == 0
    }
}

impl PartialOrd for PrimitiveVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrimitiveVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_slope(*other)
    }
}

/// Primitive vectors sorted by increasing slope.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SlopeOrder(Vec<PrimitiveVector>);

impl SlopeOrder {
    pub fn from_unsorted(mut v: Vec<PrimitiveVector>) -> Self {
        v.sort_unstable();
        Self(v)
    }

    pub fn as_slice(&self) -> &[PrimitiveVector] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PrimitiveVector> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<PrimitiveVector> {
        self.0
    }
}

impl<'a> IntoIterator for &'a SlopeOrder {
    type Item = &'a PrimitiveVector;
    type IntoIter = std::slice::Iter<'a, PrimitiveVector>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// All primitive vectors in the box `[0, n1] x [0, n2]`, in slope order.
pub fn primitive_vectors_in_box(n1: u32, n2: u32) -> Result<SlopeOrder> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument("box sides must be positive".into()));
    }
    let mut out = Vec::new();
    for x1 in 0..=n1 {
        for x2 in 0..=n2 {
            if x1.gcd(&x2) == 1 {
                out.push(PrimitiveVector::new_unchecked(x1, x2));
            }
        }
    }
    Ok(SlopeOrder::from_unsorted(out))
}

/// Primitive vectors whose energy does not exceed `cutoff`, in slope order.
///
/// `energy` must be strictly positive away from the origin and strictly
/// increasing in each coordinate; this is checked at every scanned point.
pub fn primitive_vectors_by_weight<T, F>(energy: F, cutoff: T) -> Result<Vec<PrimitiveVector>>
where
    T: Real,
    F: Fn(u32, u32) -> T,
{
    primitive_vectors_by_weight_budgeted(energy, cutoff, DEFAULT_SITE_BUDGET)
}

pub fn primitive_vectors_by_weight_budgeted<T, F>(
    energy: F,
    cutoff: T,
    budget: usize,
) -> Result<Vec<PrimitiveVector>>
where
    T: Real,
    F: Fn(u32, u32) -> T,
{
    if !(cutoff > T::zero()) {
        return Err(Error::InvalidArgument("cutoff must be positive".into()));
    }
    let mut out = Vec::new();
    let mut scanned = 0usize;
    // Energies of the previous row, used for the monotonicity check in x1.
    let mut prev_row: Vec<T> = Vec::new();
    let mut x1 = 0u32;
    loop {
        let mut row: Vec<T> = Vec::new();
        let mut x2 = 0u32;
        loop {
            if x1 == 0 && x2 == 0 {
                row.push(T::zero());
                x2 += 1;
                continue;
            }
            let e = energy(x1, x2);
            scanned += 1;
            if scanned > budget.saturating_mul(4) {
                return Err(Error::BudgetExceeded {
                    estimate: scanned as f64,
                    budget: budget as f64 * 4.0,
                });
            }
            if !(e > T::zero()) {
                return Err(Error::NonMonotoneEnergy { x1, x2 });
            }
            if x2 > 0 && !(e > row[x2 as usize - 1]) {
                return Err(Error::NonMonotoneEnergy { x1, x2 });
            }
            if let Some(&left) = prev_row.get(x2 as usize) {
                if !(e > left) {
                    return Err(Error::NonMonotoneEnergy { x1, x2 });
                }
            }
            if e > cutoff {
                break;
            }
            row.push(e);
            if x1.gcd(&x2) == 1 {
                out.push(PrimitiveVector::new_unchecked(x1, x2));
                if out.len() > budget {
                    return Err(Error::BudgetExceeded {
                        estimate: out.len() as f64,
                        budget: budget as f64,
                    });
                }
            }
            x2 += 1;
        }
        // Row x1 is empty past the origin column: every later row is too.
        if x1 > 0 && row.is_empty() {
            break;
        }
        if x1 == 0 && row.len() <= 1 {
            // (0, 1) already exceeds the cutoff; (1, 0) may not.
            let e = energy(1, 0);
            if e > cutoff {
                break;
            }
        }
        prev_row = row;
        x1 += 1;
    }
    out.sort_unstable();
    Ok(out)
}

/// Finitely supported multiplicity function on primitive directions.
///
/// Zero multiplicities are never stored, so the support size is the vertex count.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MultiplicityDistribution {
    support: BTreeMap<PrimitiveVector, u64>,
}

impl MultiplicityDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from `(direction, multiplicity)` pairs; zero entries are dropped
    /// and repeated directions accumulate.
    pub fn from_pairs<I: IntoIterator<Item = (PrimitiveVector, u64)>>(pairs: I) -> Self {
        let mut d = Self::new();
        for (v, m) in pairs {
            d.add(v, m);
        }
        d
    }

    pub fn add(&mut self, v: PrimitiveVector, m: u64) {
        if m > 0 {
            *self.support.entry(v).or_insert(0) += m;
        }
    }

    pub fn set(&mut self, v: PrimitiveVector, m: u64) {
        if m == 0 {
            self.support.remove(&v);
        } else {
            self.support.insert(v, m);
        }
    }

    pub fn get(&self, v: PrimitiveVector) -> u64 {
        self.support.get(&v).copied().unwrap_or(0)
    }

    /// Number of distinct directions, i.e. the number of edges of the line.
    pub fn vertex_count(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn endpoint(&self) -> [u64; 2] {
        self.support.iter().fold([0, 0], |[a, b], (v, &m)| {
            [a + m * v.x1 as u64, b + m * v.x2 as u64]
        })
    }

    /// Entries in slope order.
    pub fn iter(&self) -> impl Iterator<Item = (PrimitiveVector, u64)> + '_ {
        self.support.iter().map(|(v, m)| (*v, *m))
    }

    pub fn euclidean_length<T: Real>(&self) -> T {
        self.iter().fold(T::zero(), |acc, (v, m)| {
            acc + T::from_u64(m).unwrap() * v.euclidean::<T>()
        })
    }

    /// True when no edge is horizontal or vertical.
    pub fn is_strictly_north_east(&self) -> bool {
        self.support.keys().all(|v| !v.is_axis())
    }
}

/// A convex lattice polygonal line from the origin with nonnegative, strictly
/// increasing edge slopes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConvexPolyline {
    vertices: Vec<[u64; 2]>,
}

impl ConvexPolyline {
    /// Validates the vertex list.
    pub fn new(vertices: Vec<[u64; 2]>) -> Result<Self> {
        check_polyline(&vertices)?;
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[[u64; 2]] {
        &self.vertices
    }

    pub fn endpoint(&self) -> [u64; 2] {
        *self.vertices.last().expect("polyline has at least the origin")
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.vertices.len() - 1
    }
}

fn check_polyline(vertices: &[[u64; 2]]) -> Result<()> {
    match vertices.first() {
        Some([0, 0]) => {}
        _ => {
            return Err(Error::NotConvex {
                edge: 0,
                reason: "first vertex must be the origin".into(),
            })
        }
    }
    let mut prev: Option<PrimitiveVector> = None;
    for (i, w) in vertices.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if b[0] < a[0] || b[1] < a[1] {
            return Err(Error::NotConvex {
                edge: i,
                reason: "edge is not in the closed positive quadrant".into(),
            });
        }
        let d = [b[0] - a[0], b[1] - a[1]];
        if d == [0, 0] {
            return Err(Error::NotConvex {
                edge: i,
                reason: "zero-length edge".into(),
            });
        }
        let dir = direction(d)?;
        if let Some(p) = prev {
            if p.cmp_slope(dir) != Ordering::Less {
                return Err(Error::NotConvex {
                    edge: i,
                    reason: "slope does not strictly increase".into(),
                });
            }
        }
        prev = Some(dir);
    }
    Ok(())
}

fn direction(d: [u64; 2]) -> Result<PrimitiveVector> {
    let g = d[0].gcd(&d[1]);
    let (a, b) = (d[0] / g, d[1] / g);
    match (u32::try_from(a), u32::try_from(b)) {
        (Ok(a), Ok(b)) => Ok(PrimitiveVector::new_unchecked(a, b)),
        _ => Err(Error::InvalidArgument("edge direction exceeds u32 range".into())),
    }
}

/// Partial sums of the steps in slope order.
pub fn omega_to_polyline(omega: &MultiplicityDistribution) -> ConvexPolyline {
    let mut vertices = Vec::with_capacity(omega.vertex_count() + 1);
    let mut cur = [0u64, 0u64];
    vertices.push(cur);
    for (v, m) in omega.iter() {
        cur = [cur[0] + m * v.x1 as u64, cur[1] + m * v.x2 as u64];
        vertices.push(cur);
    }
    ConvexPolyline { vertices }
}

/// Inverse of [`omega_to_polyline`]; each edge becomes its primitive direction
/// with multiplicity equal to the gcd of its coordinates.
pub fn polyline_to_omega(line: &ConvexPolyline) -> Result<MultiplicityDistribution> {
    vertices_to_omega(line.vertices())
}

/// Same as [`polyline_to_omega`] on a raw vertex list, reporting the first
/// violating edge.
pub fn vertices_to_omega(vertices: &[[u64; 2]]) -> Result<MultiplicityDistribution> {
    check_polyline(vertices)?;
    let mut omega = MultiplicityDistribution::new();
    for w in vertices.windows(2) {
        let d = [w[1][0] - w[0][0], w[1][1] - w[0][1]];
        let g = d[0].gcd(&d[1]);
        omega.set(direction(d)?, g);
    }
    Ok(omega)
}

#[derive(Serialize, Deserialize)]
struct PolylineRepr {
    vertices: Vec<[u64; 2]>,
}

impl Serialize for ConvexPolyline {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolylineRepr {
            vertices: self.vertices.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConvexPolyline {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PolylineRepr::deserialize(d)?;
        ConvexPolyline::new(r.vertices).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct OmegaRepr {
    support: Vec<[u64; 3]>,
}

impl Serialize for MultiplicityDistribution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OmegaRepr {
            support: self
                .iter()
                .map(|(v, m)| [v.x1 as u64, v.x2 as u64, m])
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiplicityDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = OmegaRepr::deserialize(d)?;
        let mut omega = MultiplicityDistribution::new();
        for [a, b, m] in r.support {
            let (a, b) = match (u32::try_from(a), u32::try_from(b)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => return Err(D::Error::custom("coordinate exceeds u32 range")),
            };
            let v = PrimitiveVector::new(a, b).map_err(D::Error::custom)?;
            if omega.get(v) != 0 {
                return Err(D::Error::custom("repeated direction in support"));
            }
            omega.add(v, m);
        }
        Ok(omega)
    }
}
