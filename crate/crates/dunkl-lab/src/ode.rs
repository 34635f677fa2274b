//! Embedded Runge-Kutta integration for two-component radial systems.
//!
//! A plain Dormand-Prince 5(4) pair with a caller-supplied scaled error norm.
//! The radial solvers integrate the conserved pair (u, w) with w = r^{m-1} u',
//! whose natural error measure is not the raw component norm (w spans many
//! orders of magnitude across a profile), so the norm is injected rather than
//! baked in. Steps are accepted when the scaled norm is <= 1.

/// Two-component state.
pub type State2 = [f64; 2];

/// Why an integration run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum EndReason {
    /// Reached `r_end` exactly.
    ReachedEnd,
    /// The stop predicate fired on an accepted candidate step; `r_at`/`y_at`
    /// hold that (unemitted) candidate, while the integration state retains
    /// the last point before it.
    Stopped { r_at: f64, y_at: State2 },
    /// Step size underflowed (stiff blow-up or non-finite right-hand side).
    StepFailure { r_at: f64 },
}

/// Final state of an integration run.
#[derive(Debug, Clone)]
pub struct Integration {
    pub r: f64,
    pub y: State2,
    pub end: EndReason,
}

/// One Dormand-Prince 5(4) step of size `h` from `(r, y)`.
/// Returns the fifth-order solution and the embedded error estimate.
pub fn dp45_step<F: Fn(f64, &State2) -> State2>(rhs: &F, r: f64, y: &State2, h: f64) -> (State2, State2) {
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    // Fifth-order weights coincide with the last stage row; fourth-order
    // weights below give the embedded estimate.
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut k = [[0.0f64; 2]; 7];
    k[0] = rhs(r, y);
    for s in 1..7 {
        let mut ys = *y;
        for comp in 0..2 {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(s) {
                acc += A[s][j] * kj[comp];
            }
            ys[comp] += h * acc;
        }
        k[s] = rhs(r + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = [0.0f64; 2];
    for comp in 0..2 {
        // B5 = A[6] with a zero seventh weight.
        let b5: f64 = (0..6).map(|j| A[6][j] * k[j][comp]).sum();
        y5[comp] += h * b5;
        let mut e = 0.0;
        for j in 0..7 {
            let b5j = if j < 6 { A[6][j] } else { 0.0 };
            e += (b5j - B4[j]) * k[j][comp];
        }
        err[comp] = h * e;
    }
    (y5, err)
}

/// Integrate from `(r0, y0)` toward `r_end` with adaptive step control.
///
/// * `error_norm(r, y_new, err)` returns the scaled error (accept when <= 1).
/// * `on_accept` receives every accepted step strictly before the stop check.
/// * `stop` inspects accepted candidates; returning true ends the run without
///   emitting that candidate (see [`EndReason::Stopped`]).
#[allow(clippy::too_many_arguments)]
pub fn integrate_to<F, N, E, S>(
    rhs: &F,
    error_norm: &N,
    r0: f64,
    y0: State2,
    r_end: f64,
    h_init: f64,
    max_step: f64,
    mut on_accept: E,
    mut stop: S,
) -> Integration
where
    F: Fn(f64, &State2) -> State2,
    N: Fn(f64, &State2, &State2) -> f64,
    E: FnMut(f64, &State2),
    S: FnMut(f64, &State2) -> bool,
{
    let mut r = r0;
    let mut y = y0;
    let mut h = h_init.min(max_step).min(r_end - r0);
    if h <= 0.0 {
        return Integration {
            r,
            y,
            end: EndReason::ReachedEnd,
        };
    }
    loop {
        if h > r_end - r {
            h = r_end - r;
        }
        let (y_new, err) = dp45_step(rhs, r, &y, h);
        let mut norm = error_norm(r, &y_new, &err);
        if !norm.is_finite() || !y_new.iter().all(|v| v.is_finite()) {
            norm = f64::INFINITY;
        }
        if norm <= 1.0 {
            let r_new = r + h;
            if stop(r_new, &y_new) {
                return Integration {
                    r,
                    y,
                    end: EndReason::Stopped { r_at: r_new, y_at: y_new },
                };
            }
            on_accept(r_new, &y_new);
            r = r_new;
            y = y_new;
            if r >= r_end {
                return Integration {
                    r,
                    y,
                    end: EndReason::ReachedEnd,
                };
            }
            let factor = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * factor).min(max_step);
        } else {
            let factor = if norm.is_finite() {
                (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.2
            };
            h *= factor;
        }
        if h < 1e-14 * r.abs().max(1.0) {
            return Integration {
                r,
                y,
                end: EndReason::StepFailure { r_at: r },
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain_norm(atol: f64, rtol: f64) -> impl Fn(f64, &State2, &State2) -> f64 {
        move |_r, y, e| {
            let s0 = e[0].abs() / (atol + rtol * y[0].abs());
            let s1 = e[1].abs() / (atol + rtol * y[1].abs());
            s0.max(s1)
        }
    }

    #[test]
    fn harmonic_oscillator_accuracy() {
        // y'' = -y as a first-order pair; exact solution cos(r).
        let rhs = |_r: f64, y: &State2| [y[1], -y[0]];
        let norm = plain_norm(1e-12, 1e-10);
        let run = integrate_to(&rhs, &norm, 0.0, [1.0, 0.0], 10.0, 1e-3, 0.5, |_, _| {}, |_, _| false);
        assert_eq!(run.end, EndReason::ReachedEnd);
        assert!((run.y[0] - 10.0f64.cos()).abs() < 1e-8);
        assert!((run.y[1] + 10.0f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn stop_predicate_reports_crossing() {
        // Exponential growth; stop once y exceeds e^2.
        let rhs = |_r: f64, y: &State2| [y[0], 0.0];
        let norm = plain_norm(1e-12, 1e-10);
        let bound = (2.0f64).exp();
        let run = integrate_to(
            &rhs,
            &norm,
            0.0,
            [1.0, 0.0],
            10.0,
            1e-3,
            0.25,
            |_, _| {},
            |_, y| y[0] > bound,
        );
        match run.end {
            EndReason::Stopped { r_at, y_at } => {
                assert!(y_at[0] > bound);
                assert!(run.y[0] <= bound);
                assert!(r_at > run.r);
                assert!(r_at < 2.5);
            }
            other => panic!("expected Stopped, got {other:?}"),
        }
    }
}
