//! Audits every axiom for every mechanism on a few instances.

use fairdiv::axioms::{check, Axiom};
use fairdiv::instances::{generate, Domain, DomainSpec};
use fairdiv::mechanisms::{run_sincere, MechanismKind};
use fairdiv::model::{Instance, Limits};

fn main() -> fairdiv::Result<()> {
    let limits = Limits::default();
    let instances = vec![
        Instance::from_integers(&[vec![1, 2], vec![2, 1]])?,
        generate(&DomainSpec::new(Domain::Binary, 3, 3, 4))?,
    ];
    for instance in &instances {
        println!("{}", instance.utilities());
        for mech in MechanismKind::all(instance.agents()) {
            let dist = run_sincere(&mech, instance, &limits)?;
            let mut line = format!("  {:<14}", mech.to_string());
            for axiom in Axiom::ALL {
                if axiom == Axiom::Befp && !instance.utilities().is_binary() {
                    continue;
                }
                let v = check(axiom, &dist, instance, &limits)?;
                line += &format!(" {}{}", axiom, if v.holds { "+" } else { "-" });
            }
            println!("{line}");
        }
    }
    Ok(())
}
