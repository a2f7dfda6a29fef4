//! Envy-freeness ex ante on every item prefix fixes all marginals at 1/2 on
//! the instance below, and the resulting utilities are dominated ex ante.

use fairdiv::axioms::efa_forced_marginals;
use fairdiv::model::{expected_utilities, render, Instance, Limits};
use fairdiv::oracle::is_pea;

fn main() -> fairdiv::Result<()> {
    let instance = Instance::from_integers(&[vec![1, 2], vec![2, 1]])?;
    let forced = efa_forced_marginals(&instance)?.expect("marginals are forced");
    for (i, row) in forced.rows().iter().enumerate() {
        let row: Vec<String> = row.iter().map(render).collect();
        println!("agent {}: {}", i + 1, row.join(" "));
    }
    let ubar = expected_utilities(&forced, instance.utilities())?.diagonal();
    let outcome = is_pea(&ubar, instance.utilities(), &Limits::default())?;
    let shown: Vec<String> = ubar.iter().map(render).collect();
    let better: Vec<String> = outcome.solution.utilities.iter().map(render).collect();
    println!(
        "expected utilities ({}) efficient: {}; a lottery reaches ({})",
        shown.join(", "),
        outcome.efficient,
        better.join(", ")
    );
    Ok(())
}
