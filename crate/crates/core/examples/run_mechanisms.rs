//! Runs the six mechanisms on a two-agent, two-item instance and prints the
//! exact distributions and assignment matrices.

use fairdiv::mechanisms::{run_sincere, Mechanism, MechanismKind};
use fairdiv::model::{int, marginals, render, Instance, Limits};

fn main() -> fairdiv::Result<()> {
    let instance = Instance::from_integers(&[vec![1, 2], vec![2, 1]])?;
    let limits = Limits::default();
    for mech in MechanismKind::all(instance.agents()) {
        let dist = run_sincere(&mech, &instance, &limits)?;
        println!("{}", mech.name());
        for (alloc, p) in dist.iter() {
            println!("  {:>4}  {}", render(p), alloc.display(instance.agents()));
        }
        let p = marginals(&dist);
        for (i, row) in p.rows().iter().enumerate() {
            let row: Vec<String> = row.iter().map(render).collect();
            println!("  agent {}: {}", i + 1, row.join(" "));
        }
    }

    // Misreports are just another bid profile.
    let bids = instance.sincere_bids().with_row(0, &[int(0), int(2)]);
    let dist = MechanismKind::MaximumLike.run(&bids, &limits)?;
    println!(
        "maximum-like after agent 1 hides o1: {} allocation(s)",
        dist.len()
    );
    Ok(())
}
