//! Boundary blow-up: for a superlinear nonlinearity every radial profile
//! explodes at a finite radius R_a, decreasing in the seed a. This example
//! sweeps seeds, verifies the two-sided radius bounds, and solves the
//! inverse problem (which seed explodes exactly at the unit sphere?).
//!
//! Run with: cargo run --example blowup_profiles

use dunkl_lab::phi::Phi;
use dunkl_lab::radial::{
    blowup_radius, sandwich_check, solve_blowup_problem, BlowupControls,
};

fn main() -> dunkl_lab::Result<()> {
    let phi = Phi::power(1.0, 2.0)?;
    let m = 4.0;

    println!("explosion radii for phi = {}, m = {m}:", phi.describe());
    println!("{:>6} {:>12}   two-sided bounds (L <= sqrt(2) R_a <= sqrt(m) L)", "a", "R_a");
    for a in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let (r_a, _) = blowup_radius(m, &phi, a, &BlowupControls::default())?;
        let rep = sandwich_check(m, &phi, a)?;
        let s = rep.sandwich.expect("explosive nonlinearity");
        println!(
            "{a:>6} {r_a:>12.6}   {:.6} <= {:.6} <= {:.6}  ({})",
            s.lower,
            s.scaled_radius,
            s.upper,
            if s.ok { "ok" } else { "VIOLATED" }
        );
    }

    // Inverse problem: the seed whose profile explodes at the boundary of
    // the unit ball, and the profile itself on the way up.
    let sol = solve_blowup_problem(m, &phi, 1.0)?;
    println!("\nseed with explosion at the unit sphere: a = {:.6}", sol.seed);
    println!("profile on the way up:");
    for r in [0.0, 0.25, 0.5, 0.75, 0.9, 0.99] {
        println!("  u({r:>5}) = {:>14.4}", sol.eval(r));
    }
    println!(
        "  (grid reaches r = {:.6} with u = {:.3e})",
        sol.max_radius(),
        sol.boundary_value()
    );
    Ok(())
}
