//! One-dimensional adaptive quadrature.
//!
//! The workhorse is adaptive Simpson with a per-call absolute tolerance and a
//! recursion-depth guard. Improper integrals over `[a, inf)` are split at a
//! finite pivot and the far tail is mapped back to a bounded interval with
//! `t -> 1/t`, so the same bounded-interval routine serves both cases.
//!
//! Integrands with endpoint singularities of power type (|t - t0|^gamma,
//! gamma > -1) are integrable and the bisection pattern concentrates points
//! near the singular endpoint; callers split their interval at interior
//! singularities first so each panel is singular at most at its endpoints.

/// Adaptive Simpson on `[a, b]` with absolute tolerance `tol`.
///
/// Depth is capped at 48; a panel that still disagrees at the cap contributes
/// its best Richardson-extrapolated value. With the tolerance halved at each
/// split the total error is bounded by roughly `2 tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    adapt(f, a, b, fa, fm, fb, whole, tol, 48)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // Standard 1/15 Richardson factor for Simpson refinement.
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        let half_tol = 0.5 * tol;
        adapt(f, a, m, fa, flm, fm, left, half_tol, depth - 1)
            + adapt(f, m, b, fm, frm, fb, right, half_tol, depth - 1)
    }
}

/// Integral over `[a, inf)`: bounded part on `[a, pivot]` plus the tail
/// `[pivot, inf)` mapped through `t = 1/s`, i.e.
/// `int_pivot^inf f(t) dt = int_0^{1/pivot} f(1/s) / s^2 ds`.
///
/// `pivot` must be positive; it defaults well to `max(a, 1)` for integrands
/// that decay at least polynomially of order > 1.
pub fn adaptive_simpson_to_infinity<F: Fn(f64) -> f64>(f: &F, a: f64, pivot: f64, tol: f64) -> f64 {
    assert!(pivot > 0.0 && pivot >= a, "pivot must satisfy 0 < a <= pivot");
    let head = if pivot > a {
        adaptive_simpson(f, a, pivot, 0.5 * tol)
    } else {
        0.0
    };
    let mapped = |s: f64| {
        if s == 0.0 {
            0.0
        } else {
            let t = 1.0 / s;
            let v = f(t) * t * t;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        }
    };
    let tail = adaptive_simpson(&mapped, 0.0, 1.0 / pivot, 0.5 * tol);
    head + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_near_exact() {
        let f = |t: f64| 3.0 * t * t;
        let v = adaptive_simpson(&f, 0.0, 2.0, 1e-12);
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_square_root_singularity() {
        // int_0^1 t^{-1/2} dt = 2
        let f = |t: f64| if t == 0.0 { 0.0 } else { t.powf(-0.5) };
        let v = adaptive_simpson(&f, 0.0, 1.0, 1e-10);
        assert!((v - 2.0).abs() < 1e-7, "got {v}");
    }

    #[test]
    fn fractional_power_endpoint() {
        // int_0^1 t^{0.75} dt = 1/1.75
        let f = |t: f64| t.abs().powf(0.75);
        let v = adaptive_simpson(&f, 0.0, 1.0, 1e-11);
        assert!((v - 1.0 / 1.75).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn gaussian_tail_to_infinity() {
        // int_0^inf e^{-t^2} dt = sqrt(pi)/2
        let f = |t: f64| (-t * t).exp();
        let v = adaptive_simpson_to_infinity(&f, 0.0, 1.0, 1e-12);
        assert!((v - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn heavy_tail_to_infinity() {
        // int_1^inf t^{-3/2} dt = 2
        let f = |t: f64| t.powf(-1.5);
        let v = adaptive_simpson_to_infinity(&f, 1.0, 1.0, 1e-10);
        assert!((v - 2.0).abs() < 1e-7, "got {v}");
    }
}
