//! Seeded instance generation, suite manifests and the text formats.

use fairdiv::instances::{
    expand_suite, generate, in_domain, parse_instance, parse_manifest, serialize_instance, Domain,
    DomainSpec,
};

fn main() -> fairdiv::Result<()> {
    for domain in Domain::ALL {
        let spec = DomainSpec::new(domain, 3, 3, 11);
        let instance = generate(&spec)?;
        assert!(in_domain(domain, &instance));
        print!("# {spec}\n{}", serialize_instance(&instance));
    }

    let manifest =
        "# domain n m seed count [bound [denominator]]\nbinary 3 4 1 3\nnon-zero 2 3 5 2 4 2\n";
    for s in expand_suite(&parse_manifest(manifest)?)? {
        let text = serialize_instance(&s.instance);
        assert_eq!(parse_instance(&text)?, s.instance);
        println!("{}: {}", s.label, s.instance.utilities());
    }
    Ok(())
}
