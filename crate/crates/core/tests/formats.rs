use fairdiv::instances::{
    expand_suite, parse_bids, parse_instance, parse_manifest, serialize_instance,
    serialize_manifest, small_suite_manifest,
};
use fairdiv::model::{ratio, Instance};
use fairdiv::Error;

#[test]
fn instance_text_round_trip() {
    let text = "# two agents\n2 3\n1 1/2 0\n\n0 3 7/3\n";
    let inst = parse_instance(text).unwrap();
    assert_eq!(inst.utility(0, 1), &ratio(1, 2));
    assert_eq!(inst.utility(1, 2), &ratio(7, 3));
    assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
}

#[test]
fn empty_item_set() {
    let inst = parse_instance("2 0\n").unwrap();
    assert_eq!((inst.agents(), inst.items()), (2, 0));
}

#[test]
fn parse_errors_name_the_line() {
    let bad = |text: &str| parse_instance(text).unwrap_err();
    assert!(matches!(
        bad("2 2\n1 1\n1 x\n"),
        Error::Parse { line: 3, .. }
    ));
    assert!(matches!(
        bad("2 2\n1 1 1\n1 1\n"),
        Error::Parse { line: 2, .. }
    ));
    assert!(matches!(bad("2 2\n1 1\n"), Error::Parse { .. }));
    assert!(matches!(
        bad("2 2\n1 1\n1 -1\n"),
        Error::Parse { line: 3, .. }
    ));
    assert!(matches!(bad("2\n"), Error::Parse { line: 1, .. }));
    assert!(matches!(bad("0 2\n"), Error::NoAgents));
    assert!(matches!(bad("2 2\n1 0\n1 0\n"), Error::UnvaluedItem { .. }));
}

#[test]
fn bids_may_have_zero_columns_but_must_match_shape() {
    let inst = Instance::from_integers(&[vec![1, 2], vec![2, 1]]).unwrap();
    let bids = parse_bids("2 2\n0 1\n0 5/2\n", &inst).unwrap();
    assert_eq!(bids.bid(1, 1), &ratio(5, 2));
    assert!(matches!(
        parse_bids("2 1\n1\n1\n", &inst).unwrap_err(),
        Error::ShapeMismatch { .. }
    ));
}

#[test]
fn manifest_round_trip() {
    let entries = small_suite_manifest();
    let text = serialize_manifest(&entries);
    assert_eq!(parse_manifest(&text).unwrap(), entries);
    assert_eq!(expand_suite(&entries).unwrap().len(), 80);
    let parsed = parse_manifest("# comment\nbinary 3 2 9 4\nnon-zero 2 2 1 2 5 3\n").unwrap();
    assert_eq!(parsed[0].count, 4);
    assert_eq!((parsed[1].spec.bound, parsed[1].spec.denominator), (5, 3));
    assert!(parse_manifest("nowhere 2 2 1 1\n").is_err());
    assert!(matches!(
        parse_manifest("binary 2 2\n").unwrap_err(),
        Error::Parse { line: 1, .. }
    ));
}
