//! Tour of the closed-form kernels: ball potentials and their branches,
//! the annulus bound, the free-space pole, heat-kernel values, and the
//! exit-time identity tying the Green operator to a one-line formula.
//!
//! Run with: cargo run --example kernel_tour

use dunkl_lab::kernels::{KernelContext, QuadratureConfig};
use dunkl_lab::root_system::{FamilySpec, RootSystem};

fn main() -> dunkl_lab::Result<()> {
    // One mirror with multiplicity 1: effective dimension m = 3, and every
    // kernel has an elementary closed form to compare against.
    let sys = RootSystem::build(&FamilySpec::A1Product { k: vec![1.0] })?;
    let ctx = KernelContext::from_system(&sys, &QuadratureConfig::default())?;
    let m = ctx.effective_dimension();
    println!("system: one mirror, k = 1  =>  m = {m}, c_k = {:.12}", ctx.normalization());

    println!("\nball potential G_B(rho) for the unit ball (branch at rho = 1):");
    for rho in [0.0, 0.5, 0.9, 1.0, 1.1, 2.0] {
        let v = ctx.green_potential_ball(1.0, rho)?;
        println!("  rho = {rho:>4}:  {v:.10}");
    }

    let t = 0.5;
    let s = 1.0;
    let bound = ctx.green_annulus_bound(t, s)?;
    let diff = ctx.green_potential_ball(s, 0.75)? - ctx.green_potential_ball(t, 0.75)?;
    println!("\nannulus bound on [{t}, {s}]: {bound:.6} >= potential difference {diff:.6}");

    println!("\nfree-space pole (should equal 1/(4 rho) at m = 3, k = 1):");
    for rho in [0.25, 1.0, 4.0] {
        println!(
            "  rho = {rho:>4}:  {:.12}  vs  {:.12}",
            ctx.green_origin(rho)?,
            1.0 / (4.0 * rho)
        );
    }

    println!("\nheat kernel at the origin, p_t(0, y) as a function of |y|:");
    for rho in [0.0, 0.5, 1.0] {
        println!("  t = 0.25, |y| = {rho}: {:.10}", ctx.heat_kernel_origin(0.25, rho)?);
    }

    // Expected exit time of the ball: the Green operator applied to the
    // constant 1, which collapses to (R^2 - rho^2)/(2m).
    println!("\nexit-time identity for the unit ball:");
    let grid: Vec<f64> = (0..=4).map(|i| f64::from(i) / 4.0).collect();
    let via_operator = ctx.green_operator_radial(1.0, |_| 1.0, &grid)?;
    for (i, &rho) in grid.iter().enumerate() {
        let closed = ctx.expected_exit_time_ball(1.0, rho)?;
        println!(
            "  rho = {rho:>5}:  operator {:.10}  closed form {:.10}",
            via_operator[i], closed
        );
    }
    Ok(())
}
