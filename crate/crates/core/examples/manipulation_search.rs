//! Grid search for profitable misreports and the step/memoryless probes.

use fairdiv::mechanisms::MechanismKind;
use fairdiv::model::{render, Instance, Limits};
use fairdiv::strategic::{classify, sp_falsify, BidGrid};

fn main() -> fairdiv::Result<()> {
    let limits = Limits::default();
    let instance = Instance::from_integers(&[vec![1, 2], vec![2, 1]])?;
    let grid = BidGrid::for_instance(&instance, &[]);
    for mech in MechanismKind::all(2) {
        match sp_falsify(&mech, &instance, &grid, &limits)? {
            Some(dev) => {
                let row: Vec<String> = dev.bid_row(&instance).iter().map(render).collect();
                println!(
                    "{mech}: agent {} reports ({}) and gets {} instead of {}",
                    dev.agent + 1,
                    row.join(", "),
                    render(&dev.deviant),
                    render(&dev.sincere)
                );
            }
            None => println!("{mech}: no profitable misreport in the grid"),
        }
    }

    let suite = vec![
        instance,
        Instance::from_integers(&[vec![1, 3, 2], vec![2, 1, 3]])?,
        Instance::from_integers(&[vec![1, 1, 0], vec![1, 2, 1], vec![0, 1, 1]])?,
    ];
    for mech in MechanismKind::all(2) {
        if matches!(mech, MechanismKind::Osd(_)) {
            continue;
        }
        let c = classify(&mech, &suite, &[], &limits)?;
        println!(
            "{mech}: step {} memoryless {} violation {}",
            c.step,
            c.memoryless,
            c.violation.is_some()
        );
    }
    Ok(())
}
