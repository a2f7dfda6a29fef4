//! The prefix form of Pareto Like can reach a round where no agent keeps the
//! partial allocation efficient. The shipped rule only admits agents whose
//! choice can still be completed to an efficient allocation.

use fairdiv::mechanisms::{allocate, pareto_like_prefix_rule, pareto_like_rule};
use fairdiv::model::{Instance, Limits};
use fairdiv::oracle::pareto_frontier;

fn main() -> fairdiv::Result<()> {
    let instance = Instance::from_integers(&[vec![1, 3, 1], vec![2, 3, 1]])?;
    let bids = instance.sincere_bids();
    match allocate(&pareto_like_prefix_rule(), &instance, &bids) {
        Ok(dist) => println!("prefix rule: {} allocations", dist.len()),
        Err(e) => println!("prefix rule: {e}"),
    }
    let dist = allocate(&pareto_like_rule(), &instance, &bids)?;
    println!("completable rule:");
    for (alloc, p) in dist.iter() {
        println!("  {p:>4}  {}", alloc.display(2));
    }
    let frontier = pareto_frontier(instance.utilities(), &Limits::default())?;
    println!(
        "frontier size {}, support size {}",
        frontier.len(),
        dist.len()
    );
    Ok(())
}
