//! The Dirichlet problem on a ball, solved twice: by the damped
//! fixed-point iteration on the Green-operator form, and by shooting on
//! the seed of the radial ODE. The two share no numerics, so their
//! agreement certifies both; the solution also carries residual
//! certificates of its own.
//!
//! Run with: cargo run --example dirichlet_methods

use dunkl_lab::phi::Phi;
use dunkl_lab::radial::solve_radial_dirichlet_shooting;
use dunkl_lab::semilinear::{picard_solve, verify_solution, DirichletProblem, PicardConfig};

fn main() -> dunkl_lab::Result<()> {
    let problem = DirichletProblem {
        m: 3.0,
        phi: Phi::expm1(1.0)?,
        r_ball: 1.0,
        boundary_value: 1.0,
    };
    println!(
        "Delta_k u = {} on the unit ball, u = {} at the boundary, m = {}",
        problem.phi.describe(),
        problem.boundary_value,
        problem.m
    );

    let fixed = picard_solve(&problem, &PicardConfig::default())?;
    let shot = solve_radial_dirichlet_shooting(
        problem.m,
        &problem.phi,
        problem.r_ball,
        problem.boundary_value,
        1e-9,
    )?;
    println!(
        "\nfixed-point iteration: {} sweeps, last update {:.3e}",
        fixed.iterations, fixed.update_size
    );
    println!("shooting seed: u(0) = {:.10}", shot.seed);

    println!("\n{:>5} {:>16} {:>16} {:>12}", "r", "fixed point", "shooting", "difference");
    let mut worst: f64 = 0.0;
    for i in 0..=8 {
        let r = f64::from(i) / 8.0;
        let a = fixed.profile.eval(r);
        let b = shot.eval(r);
        worst = worst.max((a - b).abs());
        println!("{r:>5} {a:>16.10} {b:>16.10} {:>12.3e}", a - b);
    }
    println!("sup-norm disagreement (sampled): {worst:.3e}");

    let check = verify_solution(&problem, &fixed.profile)?;
    println!("\ncertificates of the accepted solution:");
    println!("  fixed-point residual   {:.3e}", check.fixedpoint_residual);
    println!("  second-order residual  {:.3e}", check.ode_residual);
    println!("  0 <= u <= c, monotone  {}", check.bounds_ok);
    Ok(())
}
