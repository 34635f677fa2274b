//! Self-verification suite: every library invariant as a named, runnable
//! check.
//!
//! Each check re-derives one mathematical property from scratch (closed
//! forms, independent oracles, cross-implementation agreement) and reports
//! pass/fail with a one-line numeric summary. The quick tier runs the
//! analytic and ODE checks in seconds; the full tier adds the Monte Carlo
//! batteries at production path counts with frozen seeds, so its results
//! are reproducible bit for bit.
//!
//! The names are stable identifiers: a failed run reports exactly which
//! invariant broke, which is what the command-line front end prints and
//! what regression reports should quote.

use crate::calculus::apply_dunkl_laplacian;
use crate::kernels::{KernelContext, QuadratureConfig};
use crate::phi::Phi;
use crate::radial::{
    blowup_radius, classify_entire_solution, find_seed_for_radius, integrate_radial_ivp,
    integral_equation_residual, ko_integral, sandwich_check, solve_radial_dirichlet_shooting,
    BlowupControls, BlowupStatus, EntireSolutions, InnerLimit, IvpControls, KoIntegral,
};
use crate::root_system::{FamilySpec, RootSystem};
use crate::semilinear::{
    comparison_check, picard_solve, verify_solution, DirichletProblem, PicardConfig,
};
use crate::sim::{radial_law_check, simulate_exit, support_check, Domain, SimConfig};

type CheckBody = fn() -> Result<String, String>;

/// One named invariant check.
pub struct Check {
    pub name: &'static str,
    /// Monte Carlo batteries at production path counts run only in the
    /// full tier.
    pub full_only: bool,
    body: CheckBody,
}

/// Outcome of one check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Run the suite, streaming results through `emit` as they finish.
pub fn run_suite(full: bool, emit: &mut dyn FnMut(&CheckResult)) -> Vec<CheckResult> {
    let mut results = Vec::new();
    for check in checks() {
        if check.full_only && !full {
            continue;
        }
        let outcome = (check.body)();
        let result = CheckResult {
            name: check.name,
            passed: outcome.is_ok(),
            detail: match outcome {
                Ok(d) => d,
                Err(d) => d,
            },
        };
        emit(&result);
        results.push(result);
    }
    results
}

/// The registry. Quick checks first, Monte Carlo tier after.
pub fn checks() -> Vec<Check> {
    macro_rules! c {
        ($name:literal, $full:expr, $body:path) => {
            Check {
                name: $name,
                full_only: $full,
                body: $body,
            }
        };
    }
    vec![
        c!("kernels.ball_branch_continuity", false, kernels_branch_continuity),
        c!("kernels.green_origin_inverse_rho", false, kernels_green_origin),
        c!("kernels.normalization_frozen_values", false, kernels_normalization),
        c!("kernels.exit_time_is_green_of_one", false, kernels_exit_identity),
        c!("kernels.annulus_bound_dominates", false, kernels_annulus_dominance),
        c!("calculus.linear_functions_annihilated", false, calculus_linear),
        c!("calculus.squared_norm_gives_twice_m", false, calculus_quadratic),
        c!("calculus.radial_formula_agrees", false, calculus_radial_agreement),
        c!("radial.linear_profile_series_oracle", false, radial_linear_oracle),
        c!("radial.a_priori_bound", false, radial_a_priori),
        c!("radial.derivative_bracket", false, radial_derivative_bracket),
        c!("radial.integral_equation_consistency", false, radial_integral_eq),
        c!("radial.growth_integral_frozen_values", false, radial_growth_frozen),
        c!("radial.growth_dichotomy", false, radial_dichotomy),
        c!("radial.blowup_radius_frozen_values", false, radial_blowup_frozen),
        c!("radial.blowup_sandwich", false, radial_sandwich),
        c!("radial.seed_round_trip", false, radial_seed_round_trip),
        c!("semilinear.picard_equals_shooting", false, semilinear_two_methods),
        c!("semilinear.fixed_point_residual", false, semilinear_residuals),
        c!("semilinear.comparison_principle", false, semilinear_comparison),
        c!("semilinear.monotone_in_boundary_data", false, semilinear_monotone),
        c!("sim.exit_time_quick_sanity", false, sim_quick_exit),
        c!("sim.determinism_quick", false, sim_quick_determinism),
        c!("sim.exit_time_closed_form_m3", true, sim_exit_m3),
        c!("sim.exit_time_closed_form_m5", true, sim_exit_m5),
        c!("sim.exit_time_generic_start", true, sim_exit_generic),
        c!("sim.support_centered_ball", true, sim_support_centered),
        c!("sim.support_offset_ball", true, sim_support_offset),
        c!("sim.support_half_ball", true, sim_support_half_ball),
        c!("sim.jump_radius_invariance", true, sim_jump_invariance),
        c!("sim.radial_law_gamma_ks", true, sim_radial_law),
        c!("sim.bessel_cross_check", true, sim_bessel_cross),
        c!("sim.determinism_production_slice", true, sim_determinism_slice),
    ]
}

fn fail(msg: String) -> Result<String, String> {
    Err(msg)
}

fn ok(msg: String) -> Result<String, String> {
    Ok(msg)
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

fn kernels_branch_continuity() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for m in [2.5, 3.0, 4.0, 5.0, 10.0] {
        let ctx = KernelContext::new(m, 1.0).map_err(|e| e.to_string())?;
        for r in [0.5, 1.0, 2.0] {
            let eps = 1e-9 * r;
            let inside = ctx.green_potential_ball(r, r - eps).map_err(|e| e.to_string())?;
            let outside = ctx.green_potential_ball(r, r + eps).map_err(|e| e.to_string())?;
            let at = ctx.green_potential_ball(r, r).map_err(|e| e.to_string())?;
            let branch = r * r / (m * (m - 2.0));
            worst = worst
                .max((at - branch).abs())
                .max((inside - at).abs() / (1.0 + at))
                .max((outside - at).abs() / (1.0 + at));
        }
    }
    if worst < 1e-7 {
        ok(format!("branch mismatch at most {worst:.2e}"))
    } else {
        fail(format!("branch mismatch {worst:.2e} exceeds 1e-7"))
    }
}

fn kernels_green_origin() -> Result<String, String> {
    let sys = RootSystem::build(&FamilySpec::A1Product { k: vec![1.0] })
        .map_err(|e| e.to_string())?;
    let ctx = KernelContext::from_system(&sys, &QuadratureConfig::default())
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for rho in [0.25, 0.5, 1.0, 2.0, 5.0] {
        let got = ctx.green_origin(rho).map_err(|e| e.to_string())?;
        worst = worst.max((got - 1.0 / (4.0 * rho)).abs() * 4.0 * rho);
    }
    if worst < 1e-9 {
        ok(format!("relative error at most {worst:.2e}"))
    } else {
        fail(format!("free-space value off by {worst:.2e} relative"))
    }
}

fn kernels_normalization() -> Result<String, String> {
    let cases: [(FamilySpec, f64); 3] = [
        (FamilySpec::A1Product { k: vec![1.0] }, 0.5641895835477563),
        (
            FamilySpec::Dihedral { order: 3, k: vec![1.0] },
            0.2122065907891938,
        ),
        (
            FamilySpec::BRank2 { k_short: 1.0, k_long: 1.0 },
            0.1061032953945969,
        ),
    ];
    let mut worst: f64 = 0.0;
    for (spec, expect) in cases {
        let sys = RootSystem::build(&spec).map_err(|e| e.to_string())?;
        let ctx = KernelContext::from_system(&sys, &QuadratureConfig::default())
            .map_err(|e| e.to_string())?;
        worst = worst.max((ctx.normalization() - expect).abs() / expect);
    }
    if worst < 1e-6 {
        ok(format!("normalization constants match to {worst:.2e} relative"))
    } else {
        fail(format!("normalization off by {worst:.2e} relative"))
    }
}

fn kernels_exit_identity() -> Result<String, String> {
    let ctx = KernelContext::new(4.0, 1.0).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
    let via_green = ctx
        .green_operator_radial(1.0, |_| 1.0, &grid)
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (i, &r) in grid.iter().enumerate() {
        let closed = ctx.expected_exit_time_ball(1.0, r).map_err(|e| e.to_string())?;
        worst = worst.max((via_green[i] - closed).abs());
    }
    if worst < 1e-8 {
        ok(format!("operator and closed form agree to {worst:.2e}"))
    } else {
        fail(format!("exit-time identity off by {worst:.2e}"))
    }
}

fn kernels_annulus_dominance() -> Result<String, String> {
    // The bound 2s(s-t)/(m-2) dominates the difference of ball potentials
    // G_{B_s} - G_{B_t} at every radius of the annulus t <= rho <= s.
    let mut checked = 0;
    for m in [2.5, 3.0, 4.0, 6.0] {
        let ctx = KernelContext::new(m, 1.0).map_err(|e| e.to_string())?;
        for (t, s) in [(0.5, 1.0), (0.25, 2.0), (0.9, 1.1)] {
            let bound = ctx.green_annulus_bound(t, s).map_err(|e| e.to_string())?;
            for i in 0..=20 {
                let rho = t + (s - t) * i as f64 / 20.0;
                let big = ctx.green_potential_ball(s, rho).map_err(|e| e.to_string())?;
                let small = ctx.green_potential_ball(t, rho).map_err(|e| e.to_string())?;
                let diff = big - small;
                if diff > bound * (1.0 + 1e-12) {
                    return fail(format!(
                        "difference {diff:.6e} exceeds bound {bound:.6e} at m={m}, t={t}, s={s}, rho={rho}"
                    ));
                }
                checked += 1;
            }
        }
    }
    ok(format!("bound dominates at {checked} sampled radii"))
}

// ---------------------------------------------------------------------------
// Calculus
// ---------------------------------------------------------------------------

fn calculus_catalog() -> Result<Vec<RootSystem>, String> {
    Ok(vec![
        RootSystem::build(&FamilySpec::A1Product { k: vec![1.0] }).map_err(|e| e.to_string())?,
        RootSystem::build(&FamilySpec::A1Product { k: vec![0.5, 0.75] })
            .map_err(|e| e.to_string())?,
        RootSystem::build(&FamilySpec::Dihedral { order: 3, k: vec![0.5] })
            .map_err(|e| e.to_string())?,
        RootSystem::build(&FamilySpec::BRank2 { k_short: 0.5, k_long: 0.75 })
            .map_err(|e| e.to_string())?,
    ])
}

fn calculus_linear() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for sys in calculus_catalog()? {
        let d = sys.dimension();
        let x: Vec<f64> = (0..d).map(|i| 0.37 + 0.21 * i as f64).collect();
        let f = |y: &[f64]| y.iter().enumerate().map(|(i, v)| (i as f64 + 1.5) * v).sum::<f64>() + 0.4;
        let val = apply_dunkl_laplacian(&sys, &f, &x, 1e-3).map_err(|e| e.to_string())?;
        worst = worst.max(val.abs());
    }
    if worst < 1e-6 {
        ok(format!("largest residual {worst:.2e}"))
    } else {
        fail(format!("linear function not annihilated: {worst:.2e}"))
    }
}

fn calculus_quadratic() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for sys in calculus_catalog()? {
        let d = sys.dimension();
        let m = sys.effective_dimension();
        let x: Vec<f64> = (0..d).map(|i| 0.53 - 0.17 * i as f64).collect();
        let f = |y: &[f64]| y.iter().map(|v| v * v).sum::<f64>();
        let val = apply_dunkl_laplacian(&sys, &f, &x, 1e-3).map_err(|e| e.to_string())?;
        worst = worst.max((val - 2.0 * m).abs() / (2.0 * m));
    }
    if worst < 1e-4 {
        ok(format!("relative error at most {worst:.2e}"))
    } else {
        fail(format!("squared-norm identity off by {worst:.2e} relative"))
    }
}

fn calculus_radial_agreement() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for sys in calculus_catalog()? {
        let d = sys.dimension();
        let m = sys.effective_dimension();
        let x: Vec<f64> = (0..d).map(|i| 0.41 + 0.13 * i as f64).collect();
        let r = crate::linalg::norm(&x);
        let h = 1e-3;
        let f = |y: &[f64]| {
            let s = y.iter().map(|v| v * v).sum::<f64>();
            (-s).exp()
        };
        let full = apply_dunkl_laplacian(&sys, &f, &x, h).map_err(|e| e.to_string())?;
        // Radial profile g(r) = exp(-r^2): g' = -2 r g, g'' = (4 r^2 - 2) g.
        let g = (-r * r).exp();
        let radial = crate::calculus::radial_dunkl_laplacian(m, g, -2.0 * r * g, (4.0 * r * r - 2.0) * g, r)
            .map_err(|e| e.to_string())?;
        worst = worst.max((full - radial).abs() / (1.0 + radial.abs()));
    }
    if worst < 1e-4 {
        ok(format!("full and radial forms agree to {worst:.2e} relative"))
    } else {
        fail(format!("radial reduction off by {worst:.2e} relative"))
    }
}

// ---------------------------------------------------------------------------
// Radial engine
// ---------------------------------------------------------------------------

fn radial_linear_oracle() -> Result<String, String> {
    let phi = Phi::linear(1.0).map_err(|e| e.to_string())?;
    let sol = integrate_radial_ivp(4.0, &phi, 1.0, 1.0, &IvpControls::default())
        .map_err(|e| e.to_string())?;
    let got = sol.boundary_value();
    let expect = 1.1303182079849700;
    let err = (got - expect).abs();
    if err < 1e-6 {
        ok(format!("u(1) = {got:.10} vs series {expect:.10} ({err:.2e})"))
    } else {
        fail(format!("u(1) = {got:.10} off the series oracle by {err:.2e}"))
    }
}

fn radial_cases() -> Result<Vec<(Phi, f64, f64)>, String> {
    // 20 deterministic (phi, a, m) cases spread over the families.
    let mut cases = Vec::new();
    let mut c = 0.6;
    let mut a = 0.3;
    let mut m = 3.1;
    for i in 0..20 {
        let phi = match i % 4 {
            0 => Phi::power(c, 1.0 + (i % 5) as f64 * 0.5),
            1 => Phi::linear(c),
            2 => Phi::expm1(0.4 + 0.1 * (i % 3) as f64),
            _ => Phi::poly(vec![c, 0.0, 0.3]),
        }
        .map_err(|e| e.to_string())?;
        cases.push((phi, a, m));
        c = 0.5 + (c * 1.7) % 1.5;
        a = 0.2 + (a * 2.3) % 1.8;
        m = 3.0 + (m * 1.9) % 4.0;
    }
    Ok(cases)
}

fn radial_a_priori() -> Result<String, String> {
    for (phi, a, m) in radial_cases()? {
        let sol = integrate_radial_ivp(m, &phi, a, 1.2, &IvpControls::default())
            .map_err(|e| e.to_string())?;
        for i in 0..sol.grid.len() {
            let (r, u) = (sol.grid[i], sol.values[i]);
            let floor = a + phi.eval(a) * r * r / (2.0 * m);
            if u < floor - 1e-10 * (1.0 + u) {
                return fail(format!(
                    "profile dips below its floor at r={r}: {u} < {floor} (phi={}, a={a}, m={m})",
                    phi.describe()
                ));
            }
        }
    }
    ok("floor holds at every grid point of 20 cases".into())
}

fn radial_derivative_bracket() -> Result<String, String> {
    for (phi, a, m) in radial_cases()? {
        let sol = integrate_radial_ivp(m, &phi, a, 1.2, &IvpControls::default())
            .map_err(|e| e.to_string())?;
        for i in 0..sol.grid.len() {
            let (r, u, du) = (sol.grid[i], sol.values[i], sol.derivatives[i]);
            if du < -1e-12 {
                return fail(format!("negative slope {du} at r={r}"));
            }
            let cap = r / m * phi.eval(u);
            if du > cap * (1.0 + 1e-8) + 1e-12 {
                return fail(format!("slope {du} above cap {cap} at r={r}"));
            }
        }
    }
    ok("0 <= u' <= (r/m) phi(u) across 20 cases".into())
}

fn radial_integral_eq() -> Result<String, String> {
    let phi = Phi::expm1(1.0).map_err(|e| e.to_string())?;
    let sol = integrate_radial_ivp(3.5, &phi, 0.7, 1.1, &IvpControls::default())
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for r in [0.3, 0.7, 1.1] {
        let res = integral_equation_residual(3.5, &phi, &sol, r).abs();
        worst = worst.max(res / sol.eval(r).abs().max(1.0));
    }
    if worst < 1e-8 {
        ok(format!("largest relative residual {worst:.2e}"))
    } else {
        fail(format!("integral-equation residual {worst:.2e} exceeds 1e-8"))
    }
}

fn radial_growth_frozen() -> Result<String, String> {
    let p12 = Phi::power(1.0, 2.0).map_err(|e| e.to_string())?;
    let cases: [(f64, f64); 3] = [
        (0.5, 5.9489548508043511),
        (1.0, 4.2065463159763627),
        (2.0, 2.9744774254021755),
    ];
    let mut worst: f64 = 0.0;
    for (a, expect) in cases {
        match ko_integral(&p12, a, InnerLimit::FromA).map_err(|e| e.to_string())? {
            KoIntegral::Finite(v) => worst = worst.max((v - expect).abs() / expect),
            KoIntegral::Divergent => return fail(format!("a={a}: unexpectedly divergent")),
        }
    }
    if worst < 1e-6 {
        ok(format!("frozen integrals reproduced to {worst:.2e} relative"))
    } else {
        fail(format!("growth integral off by {worst:.2e} relative"))
    }
}

fn radial_dichotomy() -> Result<String, String> {
    let table: [(Phi, EntireSolutions); 5] = [
        (
            Phi::power(1.0, 1.0).map_err(|e| e.to_string())?,
            EntireSolutions::Exist,
        ),
        (
            Phi::power(1.0, 1.5).map_err(|e| e.to_string())?,
            EntireSolutions::DoNotExist,
        ),
        (
            Phi::power(1.0, 2.0).map_err(|e| e.to_string())?,
            EntireSolutions::DoNotExist,
        ),
        (
            Phi::power(1.0, 3.0).map_err(|e| e.to_string())?,
            EntireSolutions::DoNotExist,
        ),
        (
            Phi::expm1(1.0).map_err(|e| e.to_string())?,
            EntireSolutions::DoNotExist,
        ),
    ];
    for (phi, expect) in table {
        let got = classify_entire_solution(&phi).map_err(|e| e.to_string())?;
        if got != expect {
            return fail(format!(
                "{}: classified {:?}, expected {:?}",
                phi.describe(),
                got,
                expect
            ));
        }
    }
    ok("power p=1 keeps entire solutions; p in {1.5,2,3} and expm1 do not".into())
}

fn radial_blowup_frozen() -> Result<String, String> {
    let p12 = Phi::power(1.0, 2.0).map_err(|e| e.to_string())?;
    let cases: [(f64, f64, f64); 2] = [(4.0, 1.0, 4.3144963), (3.0, 1.0, 3.9645856)];
    let mut worst: f64 = 0.0;
    for (m, a, expect) in cases {
        let (r, status) = blowup_radius(m, &p12, a, &BlowupControls::default())
            .map_err(|e| e.to_string())?;
        if status != BlowupStatus::Finite {
            return fail(format!("m={m}: no finite radius reported"));
        }
        worst = worst.max((r - expect).abs());
    }
    if worst < 6e-4 {
        ok(format!("frozen radii reproduced to {worst:.2e}"))
    } else {
        fail(format!("blow-up radius off by {worst:.2e}"))
    }
}

fn radial_sandwich() -> Result<String, String> {
    let p12 = Phi::power(1.0, 2.0).map_err(|e| e.to_string())?;
    for m in [3.0, 4.0, 5.0] {
        for a in [0.5, 1.0, 2.0] {
            let rep = sandwich_check(m, &p12, a).map_err(|e| e.to_string())?;
            match rep.sandwich {
                Some(s) if s.ok => {}
                Some(s) => {
                    return fail(format!(
                        "m={m}, a={a}: {} <= {} <= {} violated",
                        s.lower, s.scaled_radius, s.upper
                    ))
                }
                None => return fail(format!("m={m}, a={a}: sandwich not computed")),
            }
        }
    }
    ok("two-sided radius bounds hold on the 3 x 3 grid".into())
}

fn radial_seed_round_trip() -> Result<String, String> {
    let p12 = Phi::power(1.0, 2.0).map_err(|e| e.to_string())?;
    let target = 2.0;
    let seed = find_seed_for_radius(4.0, &p12, target, 1e-3).map_err(|e| e.to_string())?;
    let (r, _) = blowup_radius(4.0, &p12, seed, &BlowupControls::default())
        .map_err(|e| e.to_string())?;
    let rel = (r - target).abs() / target;
    if rel <= 1.5e-3 {
        ok(format!("seed {seed:.5} reproduces radius {r:.5} ({rel:.2e} relative)"))
    } else {
        fail(format!("round trip off by {rel:.2e} relative"))
    }
}

// ---------------------------------------------------------------------------
// Semilinear
// ---------------------------------------------------------------------------

fn semilinear_two_methods() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for (m, phi) in [
        (3.0, Phi::power(1.0, 2.0).map_err(|e| e.to_string())?),
        (5.0, Phi::expm1(1.0).map_err(|e| e.to_string())?),
    ] {
        for c in [0.5, 2.0] {
            let prob = DirichletProblem {
                m,
                phi: phi.clone(),
                r_ball: 1.0,
                boundary_value: c,
            };
            let fixed = picard_solve(&prob, &PicardConfig::default()).map_err(|e| e.to_string())?;
            let shot = solve_radial_dirichlet_shooting(m, &phi, 1.0, c, 1e-9)
                .map_err(|e| e.to_string())?;
            for i in 0..=100 {
                let r = i as f64 / 100.0;
                worst = worst.max((fixed.profile.eval(r) - shot.eval(r)).abs());
            }
        }
    }
    if worst <= 1e-6 {
        ok(format!("methods agree to {worst:.2e} sup-norm"))
    } else {
        fail(format!("methods disagree by {worst:.2e} sup-norm"))
    }
}

fn semilinear_residuals() -> Result<String, String> {
    let prob = DirichletProblem {
        m: 4.0,
        phi: Phi::power(1.0, 2.0).map_err(|e| e.to_string())?,
        r_ball: 1.0,
        boundary_value: 1.0,
    };
    let sol = picard_solve(&prob, &PicardConfig::default()).map_err(|e| e.to_string())?;
    let check = verify_solution(&prob, &sol.profile).map_err(|e| e.to_string())?;
    if check.fixedpoint_residual <= 1e-9 && check.ode_residual <= 1e-5 && check.bounds_ok {
        ok(format!(
            "fixed point {:.2e}, second-order residual {:.2e}, bounds hold",
            check.fixedpoint_residual, check.ode_residual
        ))
    } else {
        fail(format!(
            "certificates: fixed point {:.2e}, second-order {:.2e}, bounds {}",
            check.fixedpoint_residual, check.ode_residual, check.bounds_ok
        ))
    }
}

fn semilinear_comparison() -> Result<String, String> {
    let phi = Phi::power(1.0, 2.0).map_err(|e| e.to_string())?;
    let solve = |c: f64| -> Result<crate::radial::RadialSolution, String> {
        Ok(picard_solve(
            &DirichletProblem {
                m: 3.0,
                phi: phi.clone(),
                r_ball: 1.0,
                boundary_value: c,
            },
            &PicardConfig::default(),
        )
        .map_err(|e| e.to_string())?
        .profile)
    };
    let lower = solve(0.5)?;
    let upper = solve(1.5)?;
    let rep = comparison_check(3.0, &phi, 1.0, &upper, &lower).map_err(|e| e.to_string())?;
    if rep.dominates {
        ok(format!("worst gap {:.2e} (positive as required)", rep.worst_gap))
    } else {
        fail(format!("ordering violated, worst gap {:.2e}", rep.worst_gap))
    }
}

fn semilinear_monotone() -> Result<String, String> {
    let phi = Phi::poly(vec![0.4, 0.3]).map_err(|e| e.to_string())?;
    let mut prev: Option<crate::radial::RadialSolution> = None;
    for c in [0.5, 1.0, 2.0] {
        let sol = picard_solve(
            &DirichletProblem {
                m: 4.0,
                phi: phi.clone(),
                r_ball: 1.0,
                boundary_value: c,
            },
            &PicardConfig::default(),
        )
        .map_err(|e| e.to_string())?
        .profile;
        if let Some(p) = &prev {
            for i in 0..=64 {
                let r = i as f64 / 64.0;
                if sol.eval(r) < p.eval(r) - 1e-10 {
                    return fail(format!("solution order broken at r={r}, c={c}"));
                }
            }
        }
        prev = Some(sol);
    }
    ok("profiles increase with the boundary data".into())
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

fn sys_m3() -> Result<RootSystem, String> {
    RootSystem::build(&FamilySpec::A1Product { k: vec![1.0] }).map_err(|e| e.to_string())
}

fn sys_m5() -> Result<RootSystem, String> {
    RootSystem::build(&FamilySpec::A1Product { k: vec![0.75, 0.75] }).map_err(|e| e.to_string())
}

fn exit_check(
    sys: &RootSystem,
    x0: &[f64],
    cfg: &SimConfig,
    expect: f64,
) -> Result<String, String> {
    let dom = Domain::CenteredBall { radius: 1.0 };
    let study = simulate_exit(sys, &dom, x0, cfg).map_err(|e| e.to_string())?;
    if study.capped_fraction > 1e-3 {
        return fail(format!("capped fraction {} too large", study.capped_fraction));
    }
    let tol = 3.0 * study.stderr_exit_time + 5.0 * cfg.h;
    let err = (study.mean_exit_time - expect).abs();
    if err < tol {
        ok(format!(
            "mean {:.6} vs {:.6} (3 stderr + 5h = {:.1e}, {} paths)",
            study.mean_exit_time, expect, tol, cfg.n_paths
        ))
    } else {
        fail(format!(
            "mean {:.6} off closed form {:.6} by {err:.2e} (allowed {tol:.2e})",
            study.mean_exit_time, expect
        ))
    }
}

fn production_cfg(seed: u64) -> SimConfig {
    SimConfig {
        h: 1e-4,
        n_paths: 100_000,
        rng_seed: seed,
        max_time: 50.0,
        ..SimConfig::default()
    }
}

fn sim_quick_exit() -> Result<String, String> {
    let cfg = SimConfig {
        h: 1e-3,
        n_paths: 3000,
        rng_seed: 9,
        ..SimConfig::default()
    };
    exit_check(&sys_m3()?, &[0.0], &cfg, 1.0 / 6.0)
}

fn sim_quick_determinism() -> Result<String, String> {
    let sys = sys_m3()?;
    let dom = Domain::CenteredBall { radius: 1.0 };
    let cfg = SimConfig {
        h: 1e-3,
        n_paths: 128,
        rng_seed: 77,
        ..SimConfig::default()
    };
    let a = simulate_exit(&sys, &dom, &[0.2], &cfg).map_err(|e| e.to_string())?;
    let b = simulate_exit(&sys, &dom, &[0.2], &cfg).map_err(|e| e.to_string())?;
    for (sa, sb) in a.samples.iter().zip(&b.samples) {
        if sa.exit_time.to_bits() != sb.exit_time.to_bits() {
            return fail("exit times differ between identical runs".into());
        }
    }
    ok("128-path rerun reproduced bit for bit".into())
}

fn sim_exit_m3() -> Result<String, String> {
    exit_check(&sys_m3()?, &[0.0], &production_cfg(116), 1.0 / 6.0)
}

fn sim_exit_m5() -> Result<String, String> {
    exit_check(&sys_m5()?, &[0.0, 0.0], &production_cfg(117), 0.1)
}

fn sim_exit_generic() -> Result<String, String> {
    // Start half-way to the boundary in a direction off both mirrors.
    let rho: f64 = 0.5;
    let x0 = [rho * 0.7f64.cos(), rho * 0.7f64.sin()];
    exit_check(&sys_m5()?, &x0, &production_cfg(118), (1.0 - rho * rho) / 10.0)
}

fn support_check_runner(
    sys: &RootSystem,
    dom: &Domain,
    x0: &[f64],
    seed: u64,
    threshold: f64,
) -> Result<String, String> {
    let cfg = SimConfig {
        h: 1e-4,
        n_paths: 10_000,
        rng_seed: seed,
        max_time: 50.0,
        ..SimConfig::default()
    };
    let (study, report) = support_check(sys, dom, x0, &cfg, None).map_err(|e| e.to_string())?;
    if study.capped_fraction > 1e-3 {
        return fail(format!("capped fraction {}", study.capped_fraction));
    }
    if report.fraction_within >= threshold {
        ok(format!(
            "fraction {:.4} >= {threshold} (worst distance {:.2e}, group order {})",
            report.fraction_within, report.worst_distance, report.group_order
        ))
    } else {
        fail(format!(
            "fraction {:.4} below {threshold} (worst distance {:.2e})",
            report.fraction_within, report.worst_distance
        ))
    }
}

fn sim_support_centered() -> Result<String, String> {
    support_check_runner(
        &sys_m5()?,
        &Domain::CenteredBall { radius: 1.0 },
        &[0.3, 0.2],
        119,
        0.999,
    )
}

fn sim_support_offset() -> Result<String, String> {
    support_check_runner(
        &sys_m5()?,
        &Domain::OffsetBall {
            center: vec![0.6, 0.5],
            radius: 0.35,
        },
        &[0.6, 0.5],
        120,
        0.995,
    )
}

fn sim_support_half_ball() -> Result<String, String> {
    support_check_runner(
        &sys_m5()?,
        &Domain::HalfBall {
            radius: 1.0,
            axis: 1,
        },
        &[0.2, 0.5],
        121,
        0.995,
    )
}

fn sim_jump_invariance() -> Result<String, String> {
    let sys = sys_m5()?;
    let dom = Domain::CenteredBall { radius: 1.0 };
    let cfg = SimConfig {
        h: 1e-4,
        n_paths: 20_000,
        rng_seed: 122,
        max_time: 50.0,
        ..SimConfig::default()
    };
    let study = simulate_exit(&sys, &dom, &[0.1, 0.2], &cfg).map_err(|e| e.to_string())?;
    if study.jump_norm_violations == 0 {
        ok(format!(
            "no norm drift across {:.0} jumps in 20k paths",
            study.mean_jumps * cfg.n_paths as f64
        ))
    } else {
        fail(format!("{} jumps moved the norm", study.jump_norm_violations))
    }
}

fn sim_radial_law() -> Result<String, String> {
    let sys = sys_m3()?;
    let cfg = SimConfig {
        h: 1e-4,
        n_paths: 10_000,
        rng_seed: 123,
        ..SimConfig::default()
    };
    let rep = radial_law_check(&sys, 0.02, &cfg).map_err(|e| e.to_string())?;
    if rep.ok {
        ok(format!(
            "KS {:.4} below the 1% critical {:.4} at n = {}",
            rep.ks_statistic, rep.critical_value, rep.n
        ))
    } else {
        fail(format!(
            "KS {:.4} at or above critical {:.4}",
            rep.ks_statistic, rep.critical_value
        ))
    }
}

fn sim_bessel_cross() -> Result<String, String> {
    // Two realizations of the same effective dimension m = 3: one mirror
    // with k = 1 in dimension one, and a single active mirror with k = 1/2
    // plus an inert axis in dimension two. Exit-time laws from the origin
    // must coincide.
    let sys_a = sys_m3()?;
    let sys_b = RootSystem::build(&FamilySpec::A1Product { k: vec![0.5, 0.0] })
        .map_err(|e| e.to_string())?;
    let dom = Domain::CenteredBall { radius: 1.0 };
    let cfg = |seed| SimConfig {
        h: 1e-4,
        n_paths: 30_000,
        rng_seed: seed,
        max_time: 50.0,
        ..SimConfig::default()
    };
    let a = simulate_exit(&sys_a, &dom, &[0.0], &cfg(124)).map_err(|e| e.to_string())?;
    let b = simulate_exit(&sys_b, &dom, &[0.0, 0.0], &cfg(125)).map_err(|e| e.to_string())?;
    let gap = (a.mean_exit_time - b.mean_exit_time).abs();
    let tol = 3.0 * (a.stderr_exit_time + b.stderr_exit_time) + 10.0 * 1e-4;
    if gap < tol {
        ok(format!(
            "one- and two-dimensional realizations agree: {:.5} vs {:.5}",
            a.mean_exit_time, b.mean_exit_time
        ))
    } else {
        fail(format!(
            "realizations disagree by {gap:.2e} (allowed {tol:.2e})"
        ))
    }
}

fn sim_determinism_slice() -> Result<String, String> {
    let sys = sys_m5()?;
    let dom = Domain::CenteredBall { radius: 1.0 };
    let cfg = SimConfig {
        h: 1e-4,
        n_paths: 20_000,
        rng_seed: 126,
        max_time: 50.0,
        ..SimConfig::default()
    };
    let a = simulate_exit(&sys, &dom, &[0.25, 0.15], &cfg).map_err(|e| e.to_string())?;
    let b = simulate_exit(&sys, &dom, &[0.25, 0.15], &cfg).map_err(|e| e.to_string())?;
    for (i, (sa, sb)) in a.samples.iter().zip(&b.samples).enumerate() {
        if sa.exit_time.to_bits() != sb.exit_time.to_bits()
            || sa.n_jumps != sb.n_jumps
            || sa
                .exit_point
                .iter()
                .zip(&sb.exit_point)
                .any(|(x, y)| x.to_bits() != y.to_bits())
        {
            return fail(format!("path {i} differs between identical runs"));
        }
    }
    ok("20k-path production slice reproduced bit for bit".into())
}
