//! Limit curves in the unit square, normalization of lattice lines and
//! Hausdorff distances between them.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::ConvexPolyline;
use crate::quadrature::adaptive_simpson;
use crate::scalar::{lit, Real};
use crate::tolerances::{MIN_MESH, SHAPE_QUAD_TOL};

/// `(theta (theta + 2r) / (theta + r)^2, theta^2 / (theta + r)^2)`; infinite
/// `theta` maps to `(1, 1)`.
pub fn parabola_point<T: Real>(theta: T, ratio: T) -> Result<[T; 2]> {
    if !(ratio > T::zero()) {
        return Err(Error::InvalidArgument(format!("ratio must be positive, got {ratio}")));
    }
    if theta.is_infinite() && theta > T::zero() {
        return Ok([T::one(), T::one()]);
    }
    if !(theta >= T::zero()) {
        return Err(Error::InvalidArgument(format!("theta must be nonnegative, got {theta}")));
    }
    let d = theta + ratio;
    Ok([theta * (theta + ratio + ratio) / (d * d), theta * theta / (d * d)])
}

/// A limit curve from `(0, 0)` to `(1, 1)`, parametrized by `t` in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShapeCurve<T> {
    /// `sqrt(y) + sqrt(1 - x) = 1`. The aspect ratio only changes the speed
    /// along the curve, not the curve itself.
    Parabola { ratio: T },
    /// `x^2 + (y - 1)^2 = 1`.
    Circle,
    /// The mixed-norm family; `mixing = 0` is the parabola and large
    /// `|mixing|` approaches the circle.
    Mixed { mixing: T },
}

impl<T: Real> ShapeCurve<T> {
    pub fn parabola() -> Self {
        ShapeCurve::Parabola { ratio: T::one() }
    }

    pub fn mixed(mixing: T) -> Result<Self> {
        check_mixing(mixing)?;
        Ok(ShapeCurve::Mixed { mixing })
    }

    pub fn eval(&self, t: T) -> [T; 2] {
        let t = t.max(T::zero()).min(T::one());
        match *self {
            ShapeCurve::Parabola { ratio } => {
                // theta = r t / (1 - t) in the closed form.
                if t == T::one() {
                    return [T::one(), T::one()];
                }
                parabola_point(ratio * t / (T::one() - t), ratio).unwrap_or([T::zero(); 2])
            }
            ShapeCurve::Circle => {
                let phi = t * T::FRAC_PI_2();
                [phi.sin(), T::one() - phi.cos()]
            }
            ShapeCurve::Mixed { mixing } => {
                mixed_curve(mixing, t * T::FRAC_PI_2()).unwrap_or([T::nan(); 2])
            }
        }
    }

    /// `mesh + 1` points at equally spaced parameters. The mixed family is
    /// integrated panel by panel so the cost is linear in `mesh`.
    pub fn samples(&self, mesh: usize) -> Vec<[T; 2]> {
        let mesh = mesh.max(1);
        let step = |i: usize| T::from_usize_lossy(i) / T::from_usize_lossy(mesh);
        match *self {
            ShapeCurve::Mixed { mixing } => {
                let d = mixed_denominator(mixing);
                let tol = lit::<T>(SHAPE_QUAD_TOL) / T::from_usize_lossy(mesh);
                let mut out = Vec::with_capacity(mesh + 1);
                let (mut x, mut y) = (T::zero(), T::zero());
                out.push([x, y]);
                for i in 1..=mesh {
                    let a = step(i - 1) * T::FRAC_PI_2();
                    let b = step(i) * T::FRAC_PI_2();
                    x = x + adaptive_simpson(|u| mixed_weight(mixing, u) * u.cos(), a, b, tol);
                    y = y + adaptive_simpson(|u| mixed_weight(mixing, u) * u.sin(), a, b, tol);
                    out.push([T::SQRT_2() * x / d, T::SQRT_2() * y / d]);
                }
                out
            }
            _ => (0..=mesh).map(|i| self.eval(step(i))).collect(),
        }
    }

    /// Distance from `p` to the curve when a closed form exists.
    pub fn exact_distance(&self, p: [T; 2]) -> Option<T> {
        match *self {
            ShapeCurve::Circle => {
                // Nearest point of the quarter circle, or an endpoint.
                let (dx, dy) = (p[0], p[1] - T::one());
                let r = dx.hypot(dy);
                let on_arc = dx >= T::zero() && dy <= T::zero() && r > T::zero();
                if on_arc {
                    Some((r - T::one()).abs())
                } else {
                    let a = p[0].hypot(p[1]);
                    let b = (p[0] - T::one()).hypot(p[1] - T::one());
                    Some(a.min(b))
                }
            }
            _ => None,
        }
    }

    pub fn to_csv(&self, mesh: usize) -> String {
        let mut s = String::from("t,x,y\n");
        let pts = self.samples(mesh);
        let m = pts.len() - 1;
        for (i, p) in pts.iter().enumerate() {
            let t = i as f64 / m.max(1) as f64;
            let _ = writeln!(s, "{t:.6},{:.12},{:.12}", p[0].to_f64_lossy(), p[1].to_f64_lossy());
        }
        s
    }
}

fn check_mixing<T: Real>(mixing: T) -> Result<()> {
    // The denominators lam + cos(.) vanish for some angle in [-pi/4, pi/4]
    // exactly when -1 <= lam <= -1/sqrt(2).
    if !mixing.is_finite() || (mixing >= -T::one() && mixing <= -T::FRAC_1_SQRT_2()) {
        return Err(Error::SingularQuadrature(mixing.to_f64_lossy()));
    }
    Ok(())
}

#[inline]
fn mixed_weight<T: Real>(mixing: T, u: T) -> T {
    let c = mixing + (u - T::FRAC_PI_4()).cos();
    (c * c * c).recip()
}

fn mixed_denominator<T: Real>(mixing: T) -> T {
    let f = |u: T| {
        let c = mixing + u.cos();
        u.cos() / (c * c * c)
    };
    let tol: T = lit(SHAPE_QUAD_TOL);
    adaptive_simpson(f, -T::FRAC_PI_4(), T::FRAC_PI_4(), tol * lit(1e-2))
}

/// Point of the mixed-norm limit curve at angle `phi` in `[0, pi/2]`.
pub fn mixed_curve<T: Real>(mixing: T, phi: T) -> Result<[T; 2]> {
    check_mixing(mixing)?;
    if !(phi >= T::zero() && phi <= T::FRAC_PI_2()) {
        return Err(Error::InvalidArgument(format!("phi must lie in [0, pi/2], got {phi}")));
    }
    let d = mixed_denominator(mixing);
    let tol: T = lit(SHAPE_QUAD_TOL);
    let x = adaptive_simpson(|u| mixed_weight(mixing, u) * u.cos(), T::zero(), phi, tol * lit(1e-2));
    let y = adaptive_simpson(|u| mixed_weight(mixing, u) * u.sin(), T::zero(), phi, tol * lit(1e-2));
    Ok([T::SQRT_2() * x / d, T::SQRT_2() * y / d])
}

/// Euclidean length `L` of the mixed-norm limit curve.
pub fn mixed_length<T: Real>(mixing: T) -> Result<T> {
    check_mixing(mixing)?;
    let tol: T = lit::<T>(SHAPE_QUAD_TOL) * lit(1e-2);
    let w = |u: T| {
        let c = mixing + u.cos();
        (c * c * c).recip()
    };
    let num = adaptive_simpson(w, T::zero(), T::FRAC_PI_4(), tol);
    let den = adaptive_simpson(|u: T| w(u) * u.cos(), T::zero(), T::FRAC_PI_4(), tol);
    Ok(T::SQRT_2() * num / den)
}

/// `1 + ln(1 + sqrt 2) / sqrt 2`, the length of the parabola.
pub fn parabola_length<T: Real>() -> T {
    T::one() + (T::one() + T::SQRT_2()).ln() / T::SQRT_2()
}

/// A lattice line rescaled into the unit square.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedPolyline<T> {
    pub vertices: Vec<[T; 2]>,
    pub scale: [T; 2],
}

/// Divides each coordinate by the matching scale.
pub fn normalize<T: Real>(line: &ConvexPolyline, scale: [T; 2]) -> Result<NormalizedPolyline<T>> {
    if !(scale[0] > T::zero() && scale[1] > T::zero()) {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    let vertices = line
        .vertices()
        .iter()
        .map(|v| [T::from_u64(v[0]).unwrap() / scale[0], T::from_u64(v[1]).unwrap() / scale[1]])
        .collect();
    Ok(NormalizedPolyline { vertices, scale })
}

fn point_segment<T: Real>(p: [T; 2], a: [T; 2], b: [T; 2]) -> T {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > T::zero() {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

fn point_polyline<T: Real>(p: [T; 2], poly: &[[T; 2]]) -> T {
    if poly.len() == 1 {
        return (p[0] - poly[0][0]).hypot(p[1] - poly[0][1]);
    }
    poly.windows(2)
        .fold(T::infinity(), |m, w| m.min(point_segment(p, w[0], w[1])))
}

/// Points of `poly` with extra points on each edge, about `mesh` in total.
fn densify<T: Real>(poly: &[[T; 2]], mesh: usize) -> Vec<[T; 2]> {
    let lens: Vec<T> = poly
        .windows(2)
        .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
        .collect();
    let total = lens.iter().fold(T::zero(), |a, &b| a + b);
    let mut out = vec![poly[0]];
    for (w, &l) in poly.windows(2).zip(&lens) {
        let pieces = if total > T::zero() {
            (l / total * T::from_usize_lossy(mesh)).ceil().to_usize().unwrap_or(1).max(1)
        } else {
            1
        };
        for j in 1..=pieces {
            let s = T::from_usize_lossy(j) / T::from_usize_lossy(pieces);
            out.push([w[0][0] + s * (w[1][0] - w[0][0]), w[0][1] + s * (w[1][1] - w[0][1])]);
        }
    }
    out
}

/// Hausdorff distance between two polylines, each side's points (vertices
/// plus about `mesh` interpolated points) measured against the other's
/// segments.
pub fn polyline_hausdorff<T: Real>(a: &[[T; 2]], b: &[[T; 2]], mesh: usize) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    let da = densify(a, mesh);
    let db = densify(b, mesh);
    let ab = da.iter().fold(T::zero(), |m, &p| m.max(point_polyline(p, b)));
    let ba = db.iter().fold(T::zero(), |m, &p| m.max(point_polyline(p, a)));
    Ok(ab.max(ba))
}

/// Hausdorff distance between a normalized line and a limit curve sampled at
/// `mesh + 1` parameters. The curve is replaced by its inscribed polyline, an
/// error of order `(length / mesh)^2` times its curvature.
pub fn hausdorff_distance<T: Real>(line: &NormalizedPolyline<T>, curve: &ShapeCurve<T>, mesh: usize) -> Result<T> {
    if mesh < MIN_MESH {
        return Err(Error::InvalidArgument(format!("mesh must be at least {MIN_MESH}, got {mesh}")));
    }
    if line.vertices.is_empty() {
        return Err(Error::InvalidArgument("polyline has no points".into()));
    }
    polyline_hausdorff(&line.vertices, &curve.samples(mesh), mesh)
}

/// SVG drawing of lines over a curve in the unit square, y axis pointing up.
pub fn svg<T: Real>(curve: &ShapeCurve<T>, lines: &[NormalizedPolyline<T>], mesh: usize) -> String {
    let fmt = |pts: &[[T; 2]]| {
        pts.iter()
            .map(|p| format!("{:.6},{:.6}", p[0].to_f64_lossy(), 1.0 - p[1].to_f64_lossy()))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = String::new();
    s.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\" width=\"600\" height=\"600\">\n");
    s.push_str("<rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"none\" stroke=\"#999\" stroke-width=\"0.002\"/>\n");
    let _ = writeln!(
        s,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#c00\" stroke-width=\"0.004\"/>",
        fmt(&curve.samples(mesh))
    );
    for l in lines {
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#036\" stroke-width=\"0.002\"/>",
            fmt(&l.vertices)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(p: [f64; 2]) -> f64 {
        (p[1].sqrt() + (1.0 - p[0]).sqrt() - 1.0).abs()
    }

    #[test]
    fn parabola_examples() {
        let p = parabola_point(1.0f64, 1.0).unwrap();
        assert_eq!(p, [0.75, 0.25]);
        assert_eq!(parabola_point(0.0f64, 2.0).unwrap(), [0.0, 0.0]);
        assert_eq!(parabola_point(f64::INFINITY, 2.0).unwrap(), [1.0, 1.0]);
        assert!(parabola_point(1.0f64, 0.0).is_err());
        for r in [0.5, 3.0] {
            for i in 0..50 {
                let th = i as f64 * 0.37;
                assert!(residual(parabola_point(th, r).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn curves_end_at_corners_and_increase() {
        let curves = [
            ShapeCurve::parabola(),
            ShapeCurve::Circle,
            ShapeCurve::mixed(0.5f64).unwrap(),
            ShapeCurve::mixed(-0.5f64).unwrap(),
            ShapeCurve::mixed(-3.0f64).unwrap(),
        ];
        for c in curves {
            let s = c.samples(200);
            assert!(s[0][0].abs() < 1e-12 && s[0][1].abs() < 1e-12);
            let last = s[200];
            assert!((last[0] - 1.0).abs() < 1e-9 && (last[1] - 1.0).abs() < 1e-9, "{c:?}: {last:?}");
            assert!(s.windows(2).all(|w| w[1][0] >= w[0][0] - 1e-15 && w[1][1] >= w[0][1] - 1e-15));
            let e = c.eval(1.0);
            assert!((e[0] - 1.0).abs() < 1e-9 && (e[1] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn circle_identity() {
        for p in ShapeCurve::<f64>::Circle.samples(1000) {
            assert!((p[0] * p[0] + (p[1] - 1.0).powi(2) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_pointwise_matches_panelwise() {
        let c = ShapeCurve::mixed(2.0f64).unwrap();
        let s = c.samples(100);
        for i in [0usize, 13, 50, 99, 100] {
            let p = c.eval(i as f64 / 100.0);
            assert!((p[0] - s[i][0]).abs() < 1e-9 && (p[1] - s[i][1]).abs() < 1e-9);
        }
    }

    #[test]
    fn singular_mixing_rejected() {
        assert!(matches!(mixed_length(-0.8f64), Err(Error::SingularQuadrature(_))));
        assert!(ShapeCurve::mixed(-1.0f64).is_err());
        assert!(mixed_curve(0.0f64, 2.0).is_err());
    }

    #[test]
    fn lengths() {
        assert!((mixed_length(0.0f64).unwrap() - parabola_length::<f64>()).abs() < 1e-9);
        let l: Vec<f64> = [0.0, 1.0, 10.0, 100.0].iter().map(|&m| mixed_length(m).unwrap()).collect();
        assert!(l.windows(2).all(|w| w[1] < w[0]), "{l:?}");
        assert!((mixed_length(1e3f64).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-2);
        assert!((mixed_length(-1e3f64).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-2);
    }

    #[test]
    fn self_distance_and_symmetry() {
        let c = ShapeCurve::parabola();
        let pts = c.samples(10_000);
        let line = NormalizedPolyline {
            vertices: pts.clone(),
            scale: [1.0, 1.0],
        };
        assert!(hausdorff_distance(&line, &c, 10_000).unwrap() <= 2e-4);
        let diag: Vec<[f64; 2]> = vec![[0.0, 0.0], [1.0, 1.0]];
        let a = polyline_hausdorff(&diag, &c.samples(2000), 2000).unwrap();
        let b = polyline_hausdorff(&c.samples(2000), &diag, 2000).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(a > 0.1);
    }

    #[test]
    fn diagonal_distance_matches_direct_optimum() {
        // Farthest parabola point from y = x is at t = 1/2: (3/4, 1/4).
        let expect = (0.75f64 - 0.25) / 2f64.sqrt();
        let line = NormalizedPolyline {
            vertices: vec![[0.0, 0.0], [1.0, 1.0]],
            scale: [1.0, 1.0],
        };
        let d = hausdorff_distance(&line, &ShapeCurve::parabola(), 4000).unwrap();
        assert!((d - expect).abs() < 1e-6, "{d} vs {expect}");
    }

    #[test]
    fn normalization() {
        let line = ConvexPolyline::new(vec![[0, 0], [3, 1], [5, 5]]).unwrap();
        let n = normalize(&line, [5.0f64, 5.0]).unwrap();
        assert_eq!(n.vertices.last(), Some(&[1.0, 1.0]));
        let empty = ConvexPolyline::new(vec![[0, 0]]).unwrap();
        let e = normalize(&empty, [1.0f64, 1.0]).unwrap();
        let d = hausdorff_distance(&e, &ShapeCurve::parabola(), 1000).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
        assert!(hausdorff_distance(&e, &ShapeCurve::parabola(), 10).is_err());
    }

    #[test]
    fn svg_is_deterministic() {
        let line = normalize(&ConvexPolyline::new(vec![[0, 0], [2, 1], [3, 3]]).unwrap(), [3.0f64, 3.0]).unwrap();
        let a = svg(&ShapeCurve::parabola(), std::slice::from_ref(&line), 100);
        let b = svg(&ShapeCurve::parabola(), &[line], 100);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg") && a.contains("viewBox=\"0 0 1 1\""));
    }

    #[test]
    fn mixed_at_zero_is_parabola() {
        let m = ShapeCurve::mixed(0.0f64).unwrap().samples(4000);
        assert!(m.iter().map(|&p| residual(p)).fold(0.0, f64::max) < 1e-6);
        let d = polyline_hausdorff(&m, &ShapeCurve::parabola().samples(4000), 4000).unwrap();
        assert!(d < crate::tolerances::MIXED_PARABOLA_GAP, "{d}");
    }

    #[test]
    fn large_mixing_approaches_circle() {
        let c = ShapeCurve::<f64>::Circle;
        for mixing in [1e3, -1e3] {
            let m = ShapeCurve::mixed(mixing).unwrap().samples(1000);
            let gap = m.iter().map(|&p| c.exact_distance(p).unwrap()).fold(0.0, f64::max);
            assert!(gap < crate::tolerances::CIRCLE_PROXY_GAP, "{mixing}: {gap}");
        }
    }
}
