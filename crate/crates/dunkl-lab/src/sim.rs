//! Monte Carlo simulation of the jump-diffusion generated by the operator.
//!
//! The process combines three mechanisms:
//!
//! * a Brownian part with generator Delta (variance 2t per coordinate),
//! * a radial drift b(x) = 2 sum_{alpha > 0} k(alpha) alpha / <alpha, x>
//!   pushing away from every mirror hyperplane, and
//! * mirror jumps x -> sigma_alpha(x) at state-dependent rate
//!   k(alpha) |alpha|^2 / <alpha, x>^2 (see [`RateConvention`]).
//!
//! Discretization is Euler-Maruyama with per-root thinning for the jumps.
//! The step size adapts near mirrors (the drift must not overshoot a
//! hyperplane within one step) and a Brownian proposal landing inside the
//! guard band around a mirror is resampled, then retried with halved steps.
//!
//! Exit handling is corrected by default ([`BoundaryCorrection`]):
//!
//! * discrete monitoring only sees the path at grid times and so
//!   systematically overestimates exit times by O(sqrt(h)); counting a path
//!   as exited once it comes within 0.5826 sqrt(2h) of the boundary removes
//!   that leading error term (0.5826 is -zeta(1/2)/sqrt(2 pi), the constant
//!   of the half-order barrier-shift correction, for Gaussian increments of
//!   per-axis variance 2h);
//! * a sub-step whose diffusive move crosses the boundary outright records
//!   its exit where the displacement segment meets the boundary (the Euler
//!   path is polygonal and the domains are convex, so that point is exact
//!   for the simulated path), not at the overshot endpoint, keeping exit
//!   points on the boundary instead of a sqrt(h)-sized Gaussian tail
//!   outside it. Mirror jumps straight out of the domain are genuine
//!   discontinuities and are recorded at the landing point.
//!
//! The raw first-failure scheme remains available for bias studies.
//!
//! Runs are reproducible by construction: each path derives its own
//! counter-based generator from (seed, path index), so results are
//! bit-identical across reruns regardless of thread count.

use crate::error::{Error, Result};
use crate::kernels::drift_into;
use crate::linalg::{dot, norm, SquareMatrix};
use crate::root_system::{RootSystem, GROUP_CAP};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_lr;

/// Minimum allowed distance (in <alpha, x> units, relative to max(1, |x|))
/// between a path and a mirror hyperplane. Proposals inside the band are
/// resampled; division by <alpha, x> stays well-conditioned above it.
pub const WALL_GUARD: f64 = 1e-8;
/// Boundary-shift constant -zeta(1/2)/sqrt(2 pi) of the half-order exit
/// correction.
pub const BGK_SHIFT_COEFF: f64 = 0.5826;
/// Relative norm drift allowed across one mirror jump before it is counted
/// as a violation (reflections are isometries; anything beyond rounding is
/// a bug).
pub const JUMP_NORM_REL_TOL: f64 = 1e-12;
/// Asymptotic 1% critical coefficient of the one-sample Kolmogorov-Smirnov
/// statistic: reject at D > 1.6276 / sqrt(n).
pub const KS_COEFF_1PCT: f64 = 1.6276;
/// Step halvings attempted when proposals keep landing in the guard band.
pub const MAX_STEP_HALVINGS: u32 = 20;
/// Attempts to nudge a start point off a mirror before giving up.
pub const START_NUDGE_ATTEMPTS: u32 = 8;

/// Which rate the mirror jumps use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RateConvention {
    /// k |alpha|^2 / <alpha, x>^2 -- the difference part of the generator,
    /// matching the closed-form exit-time and radial laws.
    #[default]
    Generator,
    /// k / <alpha, x>^2 -- the jump kernel normalized per unit root length.
    LevyKernel,
}

/// Exit-time and exit-point boundary handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCorrection {
    /// Count an exit as soon as the path is within 0.5826 sqrt(2h) of the
    /// boundary (removes the O(sqrt(h)) discrete-monitoring time bias), and
    /// record outright diffusive crossings at the segment-boundary
    /// intersection instead of the overshot endpoint.
    #[default]
    HalfOrderShift,
    /// Raw first grid time outside the domain, overshot endpoint and all.
    None,
}

/// Simulation parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// Base time step.
    pub h: f64,
    pub n_paths: usize,
    pub rng_seed: u64,
    /// Wall-clock cap per path, in process time; paths reaching it are
    /// flagged capped, never silently dropped.
    pub max_time: f64,
    pub rate_convention: RateConvention,
    pub boundary_correction: BoundaryCorrection,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            h: 1e-3,
            n_paths: 1000,
            rng_seed: 1,
            max_time: 50.0,
            rate_convention: RateConvention::Generator,
            boundary_correction: BoundaryCorrection::HalfOrderShift,
        }
    }
}

/// Domains the exit simulation understands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Domain {
    CenteredBall {
        radius: f64,
    },
    OffsetBall {
        center: Vec<f64>,
        radius: f64,
    },
    /// Open half-ball {|x| < radius, x[axis] > 0}.
    HalfBall {
        radius: f64,
        axis: usize,
    },
}

impl Domain {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::CenteredBall { radius } => norm(x) < *radius,
            Domain::OffsetBall { center, radius } => {
                let mut s = 0.0;
                for (xi, ci) in x.iter().zip(center) {
                    s += (xi - ci) * (xi - ci);
                }
                s.sqrt() < *radius
            }
            Domain::HalfBall { radius, axis } => x[*axis] > 0.0 && norm(x) < *radius,
        }
    }

    /// Distance from an interior point to the boundary (meaningful only
    /// when `contains(x)`).
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match self {
            Domain::CenteredBall { radius } => radius - norm(x),
            Domain::OffsetBall { center, radius } => {
                let mut s = 0.0;
                for (xi, ci) in x.iter().zip(center) {
                    s += (xi - ci) * (xi - ci);
                }
                radius - s.sqrt()
            }
            Domain::HalfBall { radius, axis } => (radius - norm(x)).min(x[*axis]),
        }
    }

    /// Euclidean distance from an arbitrary point to the closed domain
    /// (zero inside). Used to test membership of exit points in reflected
    /// copies of the domain.
    pub fn closure_distance(&self, y: &[f64]) -> f64 {
        match self {
            Domain::CenteredBall { radius } => (norm(y) - radius).max(0.0),
            Domain::OffsetBall { center, radius } => {
                let mut s = 0.0;
                for (yi, ci) in y.iter().zip(center) {
                    s += (yi - ci) * (yi - ci);
                }
                (s.sqrt() - radius).max(0.0)
            }
            Domain::HalfBall { radius, axis } => {
                let yn = y[*axis];
                if yn >= 0.0 {
                    return (norm(y) - radius).max(0.0);
                }
                // Below the flat face the nearest closure point lies on the
                // face disc {x[axis] = 0, |x'| <= radius}.
                let mut tang_sq = 0.0;
                for (i, &yi) in y.iter().enumerate() {
                    if i != *axis {
                        tang_sq += yi * yi;
                    }
                }
                let overhang = (tang_sq.sqrt() - radius).max(0.0);
                (yn * yn + overhang * overhang).sqrt()
            }
        }
    }

    /// Boundary crossing of the segment from an inside point to an outside
    /// point: returns (theta, point) with point = inside + theta (outside -
    /// inside) on the boundary (to floating-point resolution, from the
    /// outside). All supported domains are convex, so the crossing is
    /// unique and bisection on membership finds it.
    pub fn segment_crossing(&self, inside: &[f64], outside: &[f64]) -> (f64, Vec<f64>) {
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        let mut point = vec![0.0; inside.len()];
        let place = |theta: f64, point: &mut Vec<f64>| {
            for (i, p) in point.iter_mut().enumerate() {
                *p = inside[i] + theta * (outside[i] - inside[i]);
            }
        };
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            place(mid, &mut point);
            if self.contains(&point) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        place(hi, &mut point);
        (hi, point)
    }

    fn validate(&self, d: usize) -> Result<()> {
        let radius = match self {
            Domain::CenteredBall { radius } => *radius,
            Domain::OffsetBall { center, radius } => {
                if center.len() != d {
                    return Err(Error::InvalidInput(format!(
                        "domain center has dimension {}, system has {d}",
                        center.len()
                    )));
                }
                *radius
            }
            Domain::HalfBall { radius, axis } => {
                if *axis >= d {
                    return Err(Error::InvalidInput(format!(
                        "half-ball axis {axis} out of range for dimension {d}"
                    )));
                }
                *radius
            }
        };
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::ZeroRadius);
        }
        Ok(())
    }
}

/// Why a path was stopped before exiting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapReason {
    /// Ran past `max_time`.
    TimeCap,
    /// Proposals kept landing in the mirror guard band after the full
    /// halving budget (pathological; counts toward the capped fraction).
    WallStuck,
}

/// One simulated path's outcome.
#[derive(Debug, Clone, Serialize)]
pub struct ExitSample {
    pub exit_time: f64,
    pub exit_point: Vec<f64>,
    pub n_jumps: u32,
    pub capped: bool,
    pub cap_reason: Option<CapReason>,
}

/// Aggregate of an exit-time simulation.
#[derive(Debug, Clone, Serialize)]
pub struct ExitStudy {
    pub samples: Vec<ExitSample>,
    /// Mean and standard error over non-capped paths.
    pub mean_exit_time: f64,
    pub stderr_exit_time: f64,
    pub capped_fraction: f64,
    pub mean_jumps: f64,
    /// Mirror jumps that moved the norm by more than rounding; always zero
    /// unless reflection arithmetic is broken.
    pub jump_norm_violations: u64,
}

/// Result of testing exit points against the union of reflected copies of
/// the domain closure.
#[derive(Debug, Clone, Serialize)]
pub struct SupportReport {
    pub n_exits: usize,
    pub fraction_within: f64,
    pub worst_distance: f64,
    pub tol: f64,
    pub group_order: usize,
}

/// Result of the squared-radius distribution test.
#[derive(Debug, Clone, Serialize)]
pub struct RadialLawReport {
    pub n: usize,
    pub time: f64,
    /// Effective dimension; |X_t|^2 / (4t) is Gamma(m/2, 1)-distributed
    /// when started at the origin.
    pub m: f64,
    pub ks_statistic: f64,
    pub critical_value: f64,
    pub ok: bool,
}

// ---------------------------------------------------------------------------
// Per-path machinery
// ---------------------------------------------------------------------------

/// Independent generator for path `idx`: a 64-bit mixing chain expands
/// (seed, idx) into a 256-bit stream key, so every path draws from its own
/// stream no matter how work is scheduled across threads.
fn path_rng(seed: u64, idx: u64) -> ChaCha8Rng {
    const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut s = seed.wrapping_add(idx.wrapping_mul(GOLDEN));
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        s = s.wrapping_add(GOLDEN);
        let mut z = s;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Smallest |<alpha, x>| over roots with positive multiplicity (infinite
/// when every multiplicity vanishes).
fn min_wall_gap(sys: &RootSystem, x: &[f64]) -> f64 {
    let mut g = f64::INFINITY;
    for (alpha, &k) in sys.positive_roots().iter().zip(sys.multiplicities()) {
        if k > 0.0 {
            g = g.min(dot(alpha, x).abs());
        }
    }
    g
}

/// Largest step for which the drift alone cannot cross (or reach) any
/// mirror: h <= |<alpha, x>| / (2 |<alpha, b>|) for every active root.
fn safe_step(sys: &RootSystem, x: &[f64], b: &[f64]) -> f64 {
    let mut hs = f64::INFINITY;
    for (alpha, &k) in sys.positive_roots().iter().zip(sys.multiplicities()) {
        if k == 0.0 {
            continue;
        }
        let vb = dot(alpha, b).abs();
        if vb > 0.0 {
            hs = hs.min(dot(alpha, x).abs() / (2.0 * vb));
        }
    }
    hs
}

struct PathOutcome {
    x: Vec<f64>,
    t: f64,
    n_jumps: u32,
    exited: bool,
    cap_reason: Option<CapReason>,
    norm_violations: u64,
}

/// Run one path until it leaves `domain` (if given), or until `t_end`.
fn run_path(
    sys: &RootSystem,
    domain: Option<&Domain>,
    x0: &[f64],
    t_end: f64,
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> PathOutcome {
    let d = sys.dimension();
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut n_jumps: u32 = 0;
    let mut norm_violations: u64 = 0;
    let guard = |y: &[f64]| WALL_GUARD * norm(y).max(1.0);

    let done = |x: Vec<f64>, t: f64, n_jumps: u32, exited: bool, cap: Option<CapReason>, nv: u64| {
        PathOutcome {
            x,
            t,
            n_jumps,
            exited,
            cap_reason: cap,
            norm_violations: nv,
        }
    };

    // Starting on or outside the boundary is an immediate exit.
    if let Some(dom) = domain {
        if !dom.contains(&x) {
            return done(x, 0.0, 0, true, None, 0);
        }
    }

    // A start on a mirror (the origin included) cannot be stepped from
    // directly: displace by one Brownian step's length in a random
    // direction and charge one step of time for it.
    if min_wall_gap(sys, &x) < guard(&x) {
        let scale = (2.0 * cfg.h).sqrt();
        let mut moved = false;
        for _ in 0..START_NUDGE_ATTEMPTS {
            let mut u: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let n = norm(&u);
            if n == 0.0 {
                continue;
            }
            for ui in &mut u {
                *ui *= scale / n;
            }
            let cand: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + b).collect();
            if min_wall_gap(sys, &cand) >= guard(&cand) {
                x = cand;
                t = cfg.h;
                moved = true;
                break;
            }
        }
        if !moved {
            return done(x, t, 0, false, Some(CapReason::WallStuck), 0);
        }
        if let Some(dom) = domain {
            if !dom.contains(&x) {
                return done(x, t, 0, true, None, 0);
            }
        }
    }

    let mut b = vec![0.0; d];
    let mut cand = vec![0.0; d];
    let q_factor = match cfg.rate_convention {
        RateConvention::Generator => 1.0, // multiplies |alpha|^2 below
        RateConvention::LevyKernel => 0.5, // rate k / <alpha,x>^2, |alpha|^2 = 2
    };

    loop {
        if t >= t_end {
            let cap = domain.map(|_| CapReason::TimeCap);
            return done(x, t, n_jumps, false, cap, norm_violations);
        }
        drift_into(sys, &x, &mut b);
        let mut hp = cfg.h.min(t_end - t).min(safe_step(sys, &x, &b));

        // Propose the diffusive move; resample once, then halve, if the
        // proposal lands in a mirror guard band.
        let mut resampled = false;
        let mut halvings = 0u32;
        loop {
            let root_h = (2.0 * hp).sqrt();
            for i in 0..d {
                let z: f64 = rng.sample(StandardNormal);
                cand[i] = x[i] + b[i] * hp + root_h * z;
            }
            if min_wall_gap(sys, &cand) >= guard(&cand) {
                break;
            }
            if !resampled {
                resampled = true;
                continue;
            }
            halvings += 1;
            if halvings > MAX_STEP_HALVINGS {
                return done(x, t, n_jumps, false, Some(CapReason::WallStuck), norm_violations);
            }
            hp *= 0.5;
        }

        let corrected = matches!(cfg.boundary_correction, BoundaryCorrection::HalfOrderShift);

        // A diffusive move that crosses the boundary ends the path at the
        // segment's boundary intersection (corrected mode); the jump draw
        // for this final fragment of a sub-step is skipped, an O(rate * h)
        // perturbation of the exit law, the same order as thinning itself.
        if corrected {
            if let Some(dom) = domain {
                if !dom.contains(&cand) {
                    let (theta, point) = dom.segment_crossing(&x, &cand);
                    return done(
                        point,
                        t + theta * hp,
                        n_jumps,
                        true,
                        None,
                        norm_violations,
                    );
                }
            }
        }

        // Mirror jumps by thinning: rates frozen at the sub-step start
        // state, evaluated root by root in fixed order, at most one jump
        // per sub-step, applied to the post-increment state.
        for (alpha, &k) in sys.positive_roots().iter().zip(sys.multiplicities()) {
            if k == 0.0 {
                continue;
            }
            let ip = dot(alpha, &x);
            let rate = k * q_factor * crate::linalg::norm_sq(alpha) / (ip * ip);
            let p_jump = 1.0 - (-rate * hp).exp();
            if rng.random::<f64>() < p_jump {
                let before = norm(&cand);
                crate::root_system::reflect_in_place(alpha, &mut cand);
                let after = norm(&cand);
                if (after - before).abs() > JUMP_NORM_REL_TOL * before.max(1.0) {
                    norm_violations += 1;
                }
                n_jumps += 1;
                break;
            }
        }

        t += hp;
        std::mem::swap(&mut x, &mut cand);

        if let Some(dom) = domain {
            if !dom.contains(&x) {
                // Jump straight out of the domain (or, in raw mode, any
                // first membership failure): the landing point is the exit.
                return done(x, t, n_jumps, true, None, norm_violations);
            }
            if corrected && dom.boundary_distance(&x) <= BGK_SHIFT_COEFF * (2.0 * hp).sqrt() {
                return done(x, t, n_jumps, true, None, norm_violations);
            }
        }
    }
}

fn validate_common(sys: &RootSystem, x0: &[f64], cfg: &SimConfig) -> Result<()> {
    if x0.len() != sys.dimension() {
        return Err(Error::InvalidInput(format!(
            "start point has dimension {}, system has {}",
            x0.len(),
            sys.dimension()
        )));
    }
    if !(cfg.h > 0.0) || !cfg.h.is_finite() {
        return Err(Error::InvalidInput(format!(
            "time step must be positive, got {}",
            cfg.h
        )));
    }
    if cfg.n_paths == 0 {
        return Err(Error::InvalidInput("need at least one path".into()));
    }
    if !(cfg.max_time > 0.0) {
        return Err(Error::InvalidInput(format!(
            "max_time must be positive, got {}",
            cfg.max_time
        )));
    }
    Ok(())
}

/// Simulate `cfg.n_paths` independent paths from `x0` until they leave
/// `domain`, in parallel, reproducibly.
pub fn simulate_exit(
    sys: &RootSystem,
    domain: &Domain,
    x0: &[f64],
    cfg: &SimConfig,
) -> Result<ExitStudy> {
    validate_common(sys, x0, cfg)?;
    domain.validate(sys.dimension())?;

    let outcomes: Vec<(ExitSample, u64)> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|idx| {
            let mut rng = path_rng(cfg.rng_seed, idx as u64);
            let out = run_path(sys, Some(domain), x0, cfg.max_time, cfg, &mut rng);
            (
                ExitSample {
                    exit_time: out.t,
                    exit_point: out.x,
                    n_jumps: out.n_jumps,
                    capped: !out.exited,
                    cap_reason: out.cap_reason,
                },
                out.norm_violations,
            )
        })
        .collect();

    let mut n_ok = 0usize;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut jumps = 0.0;
    let mut violations = 0u64;
    let mut samples = Vec::with_capacity(outcomes.len());
    for (s, v) in outcomes {
        violations += v;
        jumps += s.n_jumps as f64;
        if !s.capped {
            n_ok += 1;
            sum += s.exit_time;
            sum_sq += s.exit_time * s.exit_time;
        }
        samples.push(s);
    }
    let mean = if n_ok > 0 { sum / n_ok as f64 } else { f64::NAN };
    let var = if n_ok > 1 {
        ((sum_sq - sum * sum / n_ok as f64) / (n_ok as f64 - 1.0)).max(0.0)
    } else {
        f64::NAN
    };
    Ok(ExitStudy {
        mean_exit_time: mean,
        stderr_exit_time: (var / n_ok.max(1) as f64).sqrt(),
        capped_fraction: (cfg.n_paths - n_ok) as f64 / cfg.n_paths as f64,
        mean_jumps: jumps / cfg.n_paths as f64,
        jump_norm_violations: violations,
        samples,
    })
}

/// Final positions of free (no-domain) paths at time `t_end`, plus the
/// total count of norm-violating jumps.
pub fn simulate_endpoints(
    sys: &RootSystem,
    x0: &[f64],
    t_end: f64,
    cfg: &SimConfig,
) -> Result<(Vec<Vec<f64>>, u64)> {
    validate_common(sys, x0, cfg)?;
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidInput(format!(
            "end time must be positive, got {t_end}"
        )));
    }
    let outcomes: Vec<(Vec<f64>, u64)> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|idx| {
            let mut rng = path_rng(cfg.rng_seed, idx as u64);
            let out = run_path(sys, None, x0, t_end, cfg, &mut rng);
            (out.x, out.norm_violations)
        })
        .collect();
    let mut violations = 0u64;
    let mut points = Vec::with_capacity(outcomes.len());
    for (x, v) in outcomes {
        violations += v;
        points.push(x);
    }
    Ok((points, violations))
}

/// Membership of a point in the reflected-boundary set: true exactly when
/// `z` lies outside the open domain but within `tol` of some reflected copy
/// g(closure of D) of it, g in the finite reflection group.
pub fn gamma_d_member(sys: &RootSystem, domain: &Domain, z: &[f64], tol: f64) -> Result<bool> {
    if z.len() != sys.dimension() {
        return Err(Error::InvalidInput(format!(
            "point has dimension {}, system has {}",
            z.len(),
            sys.dimension()
        )));
    }
    domain.validate(sys.dimension())?;
    if domain.contains(z) {
        return Ok(false);
    }
    let group = sys.enumerate_group(GROUP_CAP)?;
    let mut pulled = vec![0.0; z.len()];
    for g in &group {
        g.matrix.transpose().apply_into(z, &mut pulled);
        if domain.closure_distance(&pulled) <= tol {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Exit-point support test: every exit point must lie in some reflected
/// copy g(closure of D), g in the finite reflection group. `tol` defaults
/// to 2 sqrt(h) (one diffusive step's length scale).
pub fn support_check(
    sys: &RootSystem,
    domain: &Domain,
    x0: &[f64],
    cfg: &SimConfig,
    tol: Option<f64>,
) -> Result<(ExitStudy, SupportReport)> {
    let study = simulate_exit(sys, domain, x0, cfg)?;
    let tol = tol.unwrap_or(2.0 * cfg.h.sqrt());
    let group = sys.enumerate_group(GROUP_CAP)?;
    let inverses: Vec<SquareMatrix> = group.iter().map(|g| g.matrix.transpose()).collect();

    let mut n_exits = 0usize;
    let mut n_within = 0usize;
    let mut worst: f64 = 0.0;
    let mut pulled = vec![0.0; sys.dimension()];
    for s in &study.samples {
        if s.capped {
            continue;
        }
        n_exits += 1;
        let mut dist = f64::INFINITY;
        for m in &inverses {
            m.apply_into(&s.exit_point, &mut pulled);
            dist = dist.min(domain.closure_distance(&pulled));
        }
        worst = worst.max(dist);
        if dist <= tol {
            n_within += 1;
        }
    }
    let report = SupportReport {
        n_exits,
        fraction_within: if n_exits > 0 {
            n_within as f64 / n_exits as f64
        } else {
            f64::NAN
        },
        worst_distance: worst,
        tol,
        group_order: group.len(),
    };
    Ok((study, report))
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` against the
/// Gamma(shape, 1) distribution.
pub fn ks_statistic_vs_gamma(samples: &[f64], shape: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("no samples for the KS statistic".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = gamma_lr(shape, x.max(0.0));
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// Distribution test for the squared radius: started at the origin,
/// |X_t|^2 / (4t) follows Gamma(m/2, 1). Requires t >= 100 h so the
/// discretization error is far below the test's resolution.
pub fn radial_law_check(sys: &RootSystem, t: f64, cfg: &SimConfig) -> Result<RadialLawReport> {
    if t < 100.0 * cfg.h {
        return Err(Error::InvalidInput(format!(
            "radial-law test needs t >= 100 h (t = {t}, h = {})",
            cfg.h
        )));
    }
    let d = sys.dimension();
    let origin = vec![0.0; d];
    let (points, _violations) = simulate_endpoints(sys, &origin, t, cfg)?;
    let samples: Vec<f64> = points
        .iter()
        .map(|x| crate::linalg::norm_sq(x) / (4.0 * t))
        .collect();
    let m = sys.effective_dimension();
    let ks = ks_statistic_vs_gamma(&samples, 0.5 * m)?;
    let critical = KS_COEFF_1PCT / (samples.len() as f64).sqrt();
    Ok(RadialLawReport {
        n: samples.len(),
        time: t,
        m,
        ks_statistic: ks,
        critical_value: critical,
        ok: ks < critical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::FamilySpec;

    fn a1(k: f64) -> RootSystem {
        RootSystem::build(&FamilySpec::A1Product { k: vec![k] }).unwrap()
    }

    fn a1x2(k: f64) -> RootSystem {
        RootSystem::build(&FamilySpec::A1Product { k: vec![k, k] }).unwrap()
    }

    #[test]
    fn reruns_are_bit_identical_and_schedule_free() {
        let sys = a1x2(0.5);
        let dom = Domain::CenteredBall { radius: 1.0 };
        let cfg = SimConfig {
            h: 1e-3,
            n_paths: 64,
            rng_seed: 42,
            ..SimConfig::default()
        };
        let a = simulate_exit(&sys, &dom, &[0.3, 0.1], &cfg).unwrap();
        let b = simulate_exit(&sys, &dom, &[0.3, 0.1], &cfg).unwrap();
        for (sa, sb) in a.samples.iter().zip(&b.samples) {
            assert_eq!(sa.exit_time.to_bits(), sb.exit_time.to_bits());
            assert_eq!(sa.n_jumps, sb.n_jumps);
            for (pa, pb) in sa.exit_point.iter().zip(&sb.exit_point) {
                assert_eq!(pa.to_bits(), pb.to_bits());
            }
        }
        // Path idx draws from its own stream: a shorter run reproduces the
        // prefix exactly, so scheduling cannot matter.
        let cfg_small = SimConfig {
            n_paths: 8,
            ..cfg.clone()
        };
        let c = simulate_exit(&sys, &dom, &[0.3, 0.1], &cfg_small).unwrap();
        for (sa, sc) in a.samples.iter().take(8).zip(&c.samples) {
            assert_eq!(sa.exit_time.to_bits(), sc.exit_time.to_bits());
        }
    }

    #[test]
    fn exit_time_from_origin_matches_closed_form() {
        // m = 3 via one mirror with k = 1 in d = 1; E tau = r^2 / (2m).
        let sys = a1(1.0);
        let dom = Domain::CenteredBall { radius: 1.0 };
        let cfg = SimConfig {
            h: 1e-3,
            n_paths: 4000,
            rng_seed: 7,
            ..SimConfig::default()
        };
        let study = simulate_exit(&sys, &dom, &[0.0], &cfg).unwrap();
        assert!(study.capped_fraction == 0.0);
        let expect = 1.0 / 6.0;
        let tol = 3.0 * study.stderr_exit_time + 5.0 * cfg.h;
        assert!(
            (study.mean_exit_time - expect).abs() < tol,
            "mean {} vs {expect} (tol {tol})",
            study.mean_exit_time
        );
        // With k = 1 the jump rate is substantial: every path should see
        // jumps now and then.
        assert!(study.mean_jumps > 0.5, "mean jumps {}", study.mean_jumps);
        assert_eq!(study.jump_norm_violations, 0);
    }

    #[test]
    fn interior_start_matches_closed_form_too() {
        let sys = a1(1.0);
        let dom = Domain::CenteredBall { radius: 1.0 };
        let cfg = SimConfig {
            h: 1e-3,
            n_paths: 4000,
            rng_seed: 11,
            ..SimConfig::default()
        };
        let rho: f64 = 0.5;
        let study = simulate_exit(&sys, &dom, &[rho], &cfg).unwrap();
        let expect = (1.0 - rho * rho) / 6.0;
        let tol = 3.0 * study.stderr_exit_time + 5.0 * cfg.h;
        assert!(
            (study.mean_exit_time - expect).abs() < tol,
            "mean {} vs {expect} (tol {tol})",
            study.mean_exit_time
        );
    }

    #[test]
    fn outside_start_exits_instantly() {
        let sys = a1(1.0);
        let dom = Domain::CenteredBall { radius: 1.0 };
        let cfg = SimConfig {
            n_paths: 16,
            ..SimConfig::default()
        };
        let study = simulate_exit(&sys, &dom, &[2.0], &cfg).unwrap();
        for s in &study.samples {
            assert_eq!(s.exit_time, 0.0);
            assert!(!s.capped);
            assert_eq!(s.exit_point, vec![2.0]);
        }
    }

    #[test]
    fn time_cap_is_flagged() {
        let sys = a1(1.0);
        let dom = Domain::CenteredBall { radius: 1.0 };
        let cfg = SimConfig {
            h: 1e-3,
            n_paths: 64,
            max_time: 0.01,
            rng_seed: 3,
            ..SimConfig::default()
        };
        let study = simulate_exit(&sys, &dom, &[0.0], &cfg).unwrap();
        assert!(study.capped_fraction > 0.9);
        let capped = study.samples.iter().find(|s| s.capped).unwrap();
        assert_eq!(capped.cap_reason, Some(CapReason::TimeCap));
    }

    #[test]
    fn boundary_shift_removes_the_half_order_bias() {
        // Without the correction the discrete monitor overestimates exit
        // times by O(sqrt(h)); the shifted estimate must come out smaller
        // and much closer to the closed form.
        let sys = a1(1.0);
        let dom = Domain::CenteredBall { radius: 1.0 };
        let base = SimConfig {
            h: 4e-3,
            n_paths: 4000,
            rng_seed: 19,
            ..SimConfig::default()
        };
        let raw_cfg = SimConfig {
            boundary_correction: BoundaryCorrection::None,
            ..base.clone()
        };
        let shifted = simulate_exit(&sys, &dom, &[0.0], &base).unwrap();
        let raw = simulate_exit(&sys, &dom, &[0.0], &raw_cfg).unwrap();
        let expect = 1.0 / 6.0;
        assert!(
            raw.mean_exit_time > shifted.mean_exit_time,
            "raw {} <= shifted {}",
            raw.mean_exit_time,
            shifted.mean_exit_time
        );
        assert!(
            (shifted.mean_exit_time - expect).abs() < (raw.mean_exit_time - expect).abs(),
            "shift did not reduce the bias: raw {}, shifted {}",
            raw.mean_exit_time,
            shifted.mean_exit_time
        );
    }

    #[test]
    fn levy_kernel_convention_halves_jump_rates() {
        let sys = a1x2(0.75);
        let dom = Domain::CenteredBall { radius: 1.0 };
        let base = SimConfig {
            h: 1e-3,
            n_paths: 2000,
            rng_seed: 23,
            ..SimConfig::default()
        };
        let lk = SimConfig {
            rate_convention: RateConvention::LevyKernel,
            ..base.clone()
        };
        let gen = simulate_exit(&sys, &dom, &[0.2, 0.3], &base).unwrap();
        let levy = simulate_exit(&sys, &dom, &[0.2, 0.3], &lk).unwrap();
        assert!(
            levy.mean_jumps < 0.75 * gen.mean_jumps,
            "levy {} vs generator {}",
            levy.mean_jumps,
            gen.mean_jumps
        );
    }

    #[test]
    fn exit_points_stay_on_the_reflected_closure() {
        // Offset ball in d = 2: jumps across either mirror carry exit
        // points into reflected copies, never elsewhere.
        let sys = a1x2(0.5);
        let dom = Domain::OffsetBall {
            center: vec![0.5, 0.4],
            radius: 0.35,
        };
        let cfg = SimConfig {
            h: 5e-4,
            n_paths: 1500,
            rng_seed: 31,
            ..SimConfig::default()
        };
        let (study, report) = support_check(&sys, &dom, &[0.5, 0.4], &cfg, None).unwrap();
        assert!(study.capped_fraction < 1e-3);
        assert_eq!(report.group_order, 4);
        // Corrected exit recording puts diffusive exits on the boundary and
        // jump exits inside a reflected copy: distances collapse to
        // rounding, far below the sqrt(h)-scale tolerance band.
        assert_eq!(report.fraction_within, 1.0, "worst {}", report.worst_distance);
        assert!(
            report.worst_distance < 1e-9,
            "worst distance {}",
            report.worst_distance
        );
        // Membership predicate agrees on concrete points: a boundary point
        // of the domain itself, a reflected interior point, an interior
        // point, and a far-away point.
        assert!(gamma_d_member(&sys, &dom, &[0.85, 0.4], 1e-9).unwrap());
        assert!(gamma_d_member(&sys, &dom, &[-0.5, 0.4], 1e-9).unwrap());
        assert!(!gamma_d_member(&sys, &dom, &[0.5, 0.4], 1e-9).unwrap());
        assert!(!gamma_d_member(&sys, &dom, &[3.0, 3.0], 1e-9).unwrap());
    }

    #[test]
    fn half_ball_distances_are_correct_geometry() {
        let dom = Domain::HalfBall {
            radius: 1.0,
            axis: 1,
        };
        // Interior point distances: min of cap and face.
        assert!((dom.boundary_distance(&[0.0, 0.3]) - 0.3).abs() < 1e-15);
        assert!((dom.boundary_distance(&[0.0, 0.9]) - 0.1).abs() < 1e-14);
        // Closure distance from below the face: straight down to the disc.
        assert!((dom.closure_distance(&[0.2, -0.4]) - 0.4).abs() < 1e-15);
        // Below and outside the rim: slanted distance to the rim circle.
        let d = dom.closure_distance(&[1.3, -0.4]);
        assert!((d - (0.3f64 * 0.3 + 0.4 * 0.4).sqrt()).abs() < 1e-15);
        // Above the face: distance to the spherical cap.
        assert!((dom.closure_distance(&[0.0, 1.5]) - 0.5).abs() < 1e-15);
        assert_eq!(dom.closure_distance(&[0.3, 0.2]), 0.0);
    }

    #[test]
    fn squared_radius_follows_the_gamma_law() {
        let sys = a1(1.0); // m = 3
        let cfg = SimConfig {
            h: 5e-4,
            n_paths: 2000,
            rng_seed: 5,
            ..SimConfig::default()
        };
        let report = radial_law_check(&sys, 0.05, &cfg).unwrap();
        assert_eq!(report.n, 2000);
        assert!((report.m - 3.0).abs() < 1e-12);
        assert!(
            report.ks_statistic < report.critical_value,
            "KS {} vs critical {}",
            report.ks_statistic,
            report.critical_value
        );
    }

    #[test]
    fn radial_law_requires_enough_steps() {
        let sys = a1(1.0);
        let cfg = SimConfig {
            h: 1e-2,
            ..SimConfig::default()
        };
        assert!(radial_law_check(&sys, 0.05, &cfg).is_err());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let sys = a1x2(0.5);
        let dom = Domain::CenteredBall { radius: 1.0 };
        let cfg = SimConfig::default();
        assert!(simulate_exit(&sys, &dom, &[0.1], &cfg).is_err());
        let bad_dom = Domain::OffsetBall {
            center: vec![0.1],
            radius: 1.0,
        };
        assert!(simulate_exit(&sys, &bad_dom, &[0.1, 0.1], &cfg).is_err());
        let bad_axis = Domain::HalfBall {
            radius: 1.0,
            axis: 5,
        };
        assert!(simulate_exit(&sys, &bad_axis, &[0.1, 0.1], &cfg).is_err());
        let zero = Domain::CenteredBall { radius: 0.0 };
        assert!(matches!(
            simulate_exit(&sys, &zero, &[0.1, 0.1], &cfg),
            Err(Error::ZeroRadius)
        ));
    }
}
