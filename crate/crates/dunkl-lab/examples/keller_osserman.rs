//! The growth dichotomy: a nonlinearity either keeps entire solutions
//! (threshold integral divergent) or forces every radial profile to
//! explode at a finite radius (integral convergent). This example
//! classifies a menu of nonlinearities and prints their integrals.
//!
//! Run with: cargo run --example keller_osserman

use dunkl_lab::phi::Phi;
use dunkl_lab::radial::{ko_integral, ko_report, EntireSolutions, InnerLimit, KoIntegral};

fn show(i: &KoIntegral) -> String {
    match i {
        KoIntegral::Finite(v) => format!("{v:.6}"),
        KoIntegral::Divergent => "divergent".into(),
    }
}

fn main() -> dunkl_lab::Result<()> {
    let menu = [
        Phi::power(1.0, 1.0)?,
        Phi::power(1.0, 1.5)?,
        Phi::power(1.0, 2.0)?,
        Phi::power(1.0, 3.0)?,
        Phi::linear(2.0)?,
        Phi::expm1(1.0)?,
        Phi::poly(vec![0.5, 0.0, 0.5])?,
    ];

    println!(
        "{:<16} {:>14} {:>14}   verdict",
        "phi", "integral(0+)", "integral(a=1)"
    );
    for phi in &menu {
        let rep = ko_report(&phi, 1.0)?;
        let verdict = match rep.entire_solutions {
            EntireSolutions::Exist => "entire solutions exist (no blow-up)",
            EntireSolutions::DoNotExist => "finite explosion radius for every seed",
        };
        println!(
            "{:<16} {:>14} {:>14}   {verdict}",
            phi.describe(),
            show(&rep.integral_from_zero),
            show(&rep.integral_from_a)
        );
    }

    // The integral from a shrinks as a grows: higher launch value, faster
    // explosion.
    let p = Phi::power(1.0, 2.0)?;
    println!("\nthreshold integral of power:1,2 from different inner limits:");
    for a in [0.5, 1.0, 2.0, 4.0] {
        println!("  a = {a:>3}:  {}", show(&ko_integral(&p, a, InnerLimit::FromA)?));
    }
    Ok(())
}
