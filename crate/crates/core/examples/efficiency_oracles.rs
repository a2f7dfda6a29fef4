//! Pareto frontier enumeration and the exact LP test for efficiency ex ante.

use fairdiv::model::{ratio, render, Instance, Limits};
use fairdiv::oracle::{is_pea, pareto_frontier};

fn main() -> fairdiv::Result<()> {
    let instance = Instance::from_integers(&[vec![1, 4], vec![2, 3]])?;
    let limits = Limits::default();
    let values = instance.utilities();
    println!("Pareto frontier of {values}");
    for alloc in pareto_frontier(values, &limits)? {
        let u: Vec<String> = alloc.utility_vector(values).iter().map(render).collect();
        println!("  {}  ({})", alloc.display(2), u.join(", "));
    }

    let target = [ratio(5, 2), ratio(5, 2)];
    let outcome = is_pea(&target, values, &limits)?;
    println!("(5/2, 5/2) efficient ex ante: {}", outcome.efficient);
    if !outcome.efficient {
        println!(
            "  dominated by a lottery with total gain {}",
            render(&outcome.solution.objective)
        );
        for (alloc, w) in &outcome.solution.weights {
            println!("    {:>4}  {}", render(w), alloc.display(2));
        }
    }
    Ok(())
}
