//! Adaptive Simpson quadrature.

use crate::scalar::{lit, Real};

/// Depth limit of the bisection; 2^50 subintervals is far past any useful
/// resolution in double precision.
pub const MAX_DEPTH: u32 = 50;

struct Panel<T> {
    a: T,
    m: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` by adaptive
/// Simpson bisection with Richardson correction.
pub fn adaptive_simpson<T, F>(f: F, a: T, b: T, tol: T) -> T
where
    T: Real,
    F: Fn(T) -> T,
{
    if a == b {
        return T::zero();
    }
    if b < a {
        return -adaptive_simpson(f, b, a, tol);
    }
    let m = (a + b) / lit(2.0);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / lit(6.0) * (fa + lit::<T>(4.0) * fm + fb);
    let p = Panel {
        a,
        m,
        b,
        fa,
        fm,
        fb,
        whole,
    };
    recurse(&f, p, tol, MAX_DEPTH)
}

fn recurse<T: Real, F: Fn(T) -> T>(f: &F, p: Panel<T>, tol: T, depth: u32) -> T {
    let two: T = lit(2.0);
    let lm = (p.a + p.m) / two;
    let rm = (p.m + p.b) / two;
    let (flm, frm) = (f(lm), f(rm));
    let six: T = lit(6.0);
    let four: T = lit(4.0);
    let left = (p.m - p.a) / six * (p.fa + four * flm + p.fm);
    let right = (p.b - p.m) / six * (p.fm + four * frm + p.fb);
    let delta = left + right - p.whole;
    // Stop when the panel can no longer be split in floating point, or when
    // the requested tolerance is below the rounding level of the panel sum.
    let degenerate = lm <= p.a || rm >= p.b || p.m <= lm || p.m >= rm;
    let rounding = T::epsilon() * lit(64.0) * (left.abs() + right.abs());
    if depth == 0 || degenerate || delta.abs() <= lit::<T>(15.0) * tol || delta.abs() <= rounding {
        return left + right + delta / lit(15.0);
    }
    let half = tol / two;
    recurse(
        f,
        Panel {
            a: p.a,
            m: lm,
            b: p.m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
        },
        half,
        depth - 1,
    ) + recurse(
        f,
        Panel {
            a: p.m,
            m: rm,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
        },
        half,
        depth - 1,
    )
}

/// Integrates over `[a, b]` split at the given interior breakpoints, sharing
/// the tolerance between pieces.
pub fn adaptive_simpson_split<T, F>(f: F, points: &[T], tol: T) -> T
where
    T: Real,
    F: Fn(T) -> T,
{
    if points.len() < 2 {
        return T::zero();
    }
    let pieces = T::from_usize_lossy(points.len() - 1);
    points
        .windows(2)
        .fold(T::zero(), |acc, w| acc + adaptive_simpson(&f, w[0], w[1], tol / pieces))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = adaptive_simpson(|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12);
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn smooth_transcendental() {
        let v = adaptive_simpson(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-11);
        let v = adaptive_simpson(|x: f64| (-x).exp(), 0.0, 30.0, 1e-13);
        assert!((v - (1.0 - (-30f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn reversed_bounds_and_split() {
        let f = |x: f64| x.cos();
        let a = adaptive_simpson(f, 1.0, 0.0, 1e-12);
        assert!((a + 1f64.sin()).abs() < 1e-12);
        let b = adaptive_simpson_split(f, &[0.0, 0.3, 1.0], 1e-12);
        assert!((b - 1f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let v = adaptive_simpson(|x: f32| x.exp(), 0.0, 1.0, 1e-6);
        assert!((v - (std::f32::consts::E - 1.0)).abs() < 1e-5);
    }
}
