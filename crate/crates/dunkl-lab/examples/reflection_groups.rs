//! The discrete backbone: root systems, their reflection groups, and the
//! quantities derived from them -- the effective dimension m, the weight
//! function, and the singular drift that pushes paths away from mirrors.
//!
//! Run with: cargo run --example reflection_groups

use dunkl_lab::kernels::drift_into;
use dunkl_lab::root_system::{FamilySpec, RootSystem};

fn main() -> dunkl_lab::Result<()> {
    let specs = [
        ("a1:1", FamilySpec::A1Product { k: vec![1.0] }),
        ("a1xa1:0.75", FamilySpec::A1Product { k: vec![0.75, 0.75] }),
        ("dihedral:3,1", FamilySpec::Dihedral { order: 3, k: vec![1.0] }),
        ("b2:0.5,0.75", FamilySpec::BRank2 { k_short: 0.5, k_long: 0.75 }),
    ];

    println!(
        "{:<14} {:>3} {:>7} {:>6} {:>12}",
        "system", "d", "roots", "|W|", "m"
    );
    for (name, spec) in &specs {
        let sys = RootSystem::build(spec)?;
        let group = sys.enumerate_group(10_000)?;
        println!(
            "{name:<14} {:>3} {:>7} {:>6} {:>12.2}",
            sys.dimension(),
            2 * sys.positive_roots().len(),
            group.len(),
            sys.effective_dimension()
        );
    }

    // The weight w_k vanishes on mirrors and is reflection-invariant; the
    // drift b = grad(log w_k) blows up toward each mirror, keeping the
    // diffusion from sticking to it.
    let sys = RootSystem::build(&FamilySpec::BRank2 { k_short: 0.5, k_long: 0.75 })?;
    println!("\nb2:0.5,0.75 weight and drift along the ray x = t * (1, 0.4):");
    println!("{:>6} {:>14} {:>26}", "t", "w_k(x)", "drift b(x)");
    let mut b = vec![0.0; 2];
    for t in [0.25, 0.5, 1.0, 2.0] {
        let x = [t, 0.4 * t];
        drift_into(&sys, &x, &mut b);
        println!("{t:>6} {:>14.6} {:>12.4}, {:>11.4}", sys.weight(&x), b[0], b[1]);
    }
    println!("\n(<b(x), x> = m - d identically; the drift is homogeneous of degree -1)");
    Ok(())
}
