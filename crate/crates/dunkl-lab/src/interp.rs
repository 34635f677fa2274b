//! Interpolation and finite-difference weights on nonuniform grids.
//!
//! Solution profiles come out of the integrators as (grid, values,
//! derivatives) triples; piecewise cubic Hermite interpolation reconstructs
//! them between nodes with the same O(h^4) accuracy the integrator provides
//! at the nodes. Fornberg's algorithm supplies finite-difference weights of
//! arbitrary order on scattered nodes for residual checks.

/// Index `i` such that `grid[i] <= r <= grid[i+1]`, clamped to valid cells.
pub fn bracket_index(grid: &[f64], r: f64) -> usize {
    debug_assert!(grid.len() >= 2);
    match grid.binary_search_by(|g| g.partial_cmp(&r).unwrap()) {
        Ok(i) => i.min(grid.len() - 2),
        Err(0) => 0,
        Err(i) => (i - 1).min(grid.len() - 2),
    }
}

/// Piecewise cubic Hermite evaluation of a profile given values and
/// first derivatives at the nodes. Out-of-range `r` extrapolates from the
/// nearest cell (callers guard range).
pub fn hermite_eval(grid: &[f64], vals: &[f64], derivs: &[f64], r: f64) -> f64 {
    let i = bracket_index(grid, r);
    let (x0, x1) = (grid[i], grid[i + 1]);
    let h = x1 - x0;
    if h == 0.0 {
        return vals[i];
    }
    let t = (r - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * vals[i] + h10 * h * derivs[i] + h01 * vals[i + 1] + h11 * h * derivs[i + 1]
}

/// Derivative of the piecewise cubic Hermite interpolant at `r`.
pub fn hermite_eval_derivative(grid: &[f64], vals: &[f64], derivs: &[f64], r: f64) -> f64 {
    let i = bracket_index(grid, r);
    let (x0, x1) = (grid[i], grid[i + 1]);
    let h = x1 - x0;
    if h == 0.0 {
        return derivs[i];
    }
    let t = (r - x0) / h;
    let t2 = t * t;
    let dh00 = (6.0 * t2 - 6.0 * t) / h;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = (-6.0 * t2 + 6.0 * t) / h;
    let dh11 = 3.0 * t2 - 2.0 * t;
    dh00 * vals[i] + dh10 * derivs[i] + dh01 * vals[i + 1] + dh11 * derivs[i + 1]
}

/// Four-point (locally cubic) Lagrange interpolation of tabulated values.
/// Uses the two nodes on each side of `r` where available.
pub fn lagrange4_eval(grid: &[f64], vals: &[f64], r: f64) -> f64 {
    let n = grid.len();
    if n < 4 {
        // Fall back to linear interpolation on tiny tables.
        let i = bracket_index(grid, r);
        let h = grid[i + 1] - grid[i];
        if h == 0.0 {
            return vals[i];
        }
        let t = (r - grid[i]) / h;
        return (1.0 - t) * vals[i] + t * vals[i + 1];
    }
    let i = bracket_index(grid, r);
    let start = i.saturating_sub(1).min(n - 4);
    let xs = &grid[start..start + 4];
    let ys = &vals[start..start + 4];
    let mut acc = 0.0;
    for j in 0..4 {
        let mut lj = ys[j];
        for l in 0..4 {
            if l != j {
                lj *= (r - xs[l]) / (xs[j] - xs[l]);
            }
        }
        acc += lj;
    }
    acc
}

/// Fornberg finite-difference weights: given nodes `xs` and expansion point
/// `x0`, returns weights `w` with `sum_j w[j] f(xs[j]) ~ f^{(k)}(x0)`,
/// exact for polynomials of degree `xs.len() - 1`.
pub fn fd_weights(xs: &[f64], x0: f64, k: usize) -> Vec<f64> {
    let n = xs.len();
    assert!(k < n, "need more nodes than the derivative order");
    // B. Fornberg's recursive algorithm, weights for orders 0..=k.
    let mut c = vec![vec![0.0; n]; k + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(k);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for s in (1..=mn).rev() {
                    c[s][i] = c1 * (s as f64 * c[s - 1][i - 1] - c5 * c[s][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for s in (1..=mn).rev() {
                c[s][j] = (c4 * c[s][j] - s as f64 * c[s - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c[k].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_reproduces_cubics_exactly() {
        let grid: Vec<f64> = (0..6).map(|i| 0.3 * i as f64).collect();
        let f = |x: f64| x * x * x - 2.0 * x + 1.0;
        let fp = |x: f64| 3.0 * x * x - 2.0;
        let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let ders: Vec<f64> = grid.iter().map(|&x| fp(x)).collect();
        for i in 0..50 {
            let r = 1.5 * i as f64 / 49.0;
            assert!((hermite_eval(&grid, &vals, &ders, r) - f(r)).abs() < 1e-13);
            assert!((hermite_eval_derivative(&grid, &vals, &ders, r) - fp(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn lagrange4_reproduces_cubics_exactly() {
        let grid: Vec<f64> = vec![0.0, 0.2, 0.5, 0.9, 1.4, 2.0];
        let f = |x: f64| 2.0 * x * x * x + x * x - 3.0;
        let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        for i in 0..40 {
            let r = 2.0 * i as f64 / 39.0;
            assert!((lagrange4_eval(&grid, &vals, r) - f(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn fornberg_weights_match_central_stencil() {
        // Uniform 5-point second-derivative stencil: [-1, 16, -30, 16, -1]/12h^2
        let h = 0.1;
        let xs: Vec<f64> = (-2..=2).map(|i| i as f64 * h).collect();
        let w = fd_weights(&xs, 0.0, 2);
        let expect = [-1.0, 16.0, -30.0, 16.0, -1.0].map(|c| c / (12.0 * h * h));
        for (a, b) in w.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0));
        }
    }

    #[test]
    fn fornberg_weights_nonuniform_derivative() {
        let xs = [0.0, 0.07, 0.19, 0.31, 0.5];
        let f = |x: f64| x.powi(4) - x;
        let fpp = |x: f64| 12.0 * x * x;
        let w = fd_weights(&xs, 0.19, 2);
        let approx: f64 = xs.iter().zip(w.iter()).map(|(&x, &c)| c * f(x)).sum();
        assert!((approx - fpp(0.19)).abs() < 1e-9);
    }
}
