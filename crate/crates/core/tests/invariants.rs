use proptest::prelude::*;

use posmon_core::factor::{factorizations, lengths, max_length};
use posmon_core::monoid::{atom_divisors, atoms, divisor_set, elements_below, is_member, membership, Limits};
use posmon_core::{parse_spec, render_spec, truncate, GeneratorSpec, PositiveRational};

fn rational() -> impl Strategy<Value = PositiveRational> {
    (1u64..=24, 1u64..=6).prop_map(|(n, d)| PositiveRational::new(n, d).unwrap())
}

fn finite_spec() -> impl Strategy<Value = GeneratorSpec> {
    prop::collection::vec(rational(), 1..=4).prop_map(GeneratorSpec::Finite)
}

fn cyclic_spec() -> impl Strategy<Value = GeneratorSpec> {
    (1u64..=7, 1u64..=7)
        .prop_filter("base 1 is degenerate", |(n, d)| n != d)
        .prop_map(|(n, d)| GeneratorSpec::Geometric(PositiveRational::new(n, d).unwrap()))
}

fn any_spec() -> impl Strategy<Value = GeneratorSpec> {
    prop_oneof![finite_spec(), cyclic_spec()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn certificates_evaluate_to_their_element(spec in any_spec(), depth in 1u32..=4) {
        let t = truncate(&spec, depth).unwrap();
        let bound = t.max_generator() * &PositiveRational::from(3);
        for x in elements_below(&bound, &t).unwrap() {
            let cert = membership(&x, &t).expect("enumerated elements are members");
            prop_assert_eq!(cert.evaluate(), x);
        }
    }

    #[test]
    fn atoms_are_generators_with_no_proper_divisor(spec in any_spec(), depth in 1u32..=4) {
        let t = truncate(&spec, depth).unwrap();
        for a in atoms(&t) {
            prop_assert!(t.generators().contains(&a));
            prop_assert_eq!(divisor_set(&a, &t).unwrap(), vec![a.clone()]);
        }
    }

    #[test]
    fn divisors_pair_up(spec in any_spec(), depth in 1u32..=3) {
        let t = truncate(&spec, depth).unwrap();
        let x = t.max_generator() * &PositiveRational::from(2);
        let d = divisor_set(&x, &t).unwrap();
        prop_assert_eq!(d.last(), Some(&x));
        for v in &d {
            if let Some(rest) = x.checked_sub(v).filter(|r| !r.is_zero()) {
                prop_assert!(d.binary_search(&rest).is_ok(), "{} - {} missing", x, v);
            }
        }
        let a = atom_divisors(&x, &t).unwrap();
        let all_atoms = atoms(&t);
        prop_assert!(a.iter().all(|g| d.contains(g) && all_atoms.contains(g)));
    }

    #[test]
    fn factorizations_agree_with_lengths(spec in finite_spec()) {
        let t = truncate(&spec, 1).unwrap();
        let limits = Limits::default();
        for x in elements_below(&(t.max_generator() * &PositiveRational::from(2)), &t).unwrap() {
            let zs = factorizations(&x, &t).unwrap();
            prop_assert!(!zs.is_empty());
            prop_assert!(zs.iter().all(|z| z.image() == x));
            let l = lengths(&x, &t).unwrap();
            prop_assert_eq!(l.iter().next_back().copied(), max_length(&x, &t, &limits).unwrap());
        }
    }

    #[test]
    fn deeper_truncations_keep_members(spec in cyclic_spec(), depth in 1u32..=3) {
        let shallow = truncate(&spec, depth).unwrap();
        let deep = truncate(&spec, depth + 1).unwrap();
        let bound = shallow.max_generator() * &PositiveRational::from(2);
        for x in elements_below(&bound, &shallow).unwrap() {
            prop_assert!(is_member(&x, &deep));
        }
    }

    #[test]
    fn spec_files_round_trip(spec in any_spec()) {
        prop_assert_eq!(parse_spec(&render_spec(&spec)).unwrap(), spec);
    }
}

#[test]
fn zero_has_one_empty_factorization() {
    let t = truncate(&GeneratorSpec::Finite(vec!["1/2".parse().unwrap(), "1/3".parse().unwrap()]), 1).unwrap();
    let zs = factorizations(&PositiveRational::zero(), &t).unwrap();
    assert_eq!(zs.len(), 1);
    assert_eq!(zs[0].length(), 0);
    assert_eq!(lengths(&PositiveRational::zero(), &t).unwrap().into_iter().collect::<Vec<_>>(), vec![0]);
}
