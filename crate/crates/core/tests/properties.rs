use std::collections::BTreeMap;

use lattower::autgroup::{tau_sigma_on_lattice, SlotPermutation};
use lattower::gf2::Subspace;
use lattower::group_spec::{ChainPosition, TowerGroupSpec};
use lattower::lattice::{AdmissibleTriple, Lattice};
use lattower::perm_oracle::differential_validate;
use proptest::prelude::*;

fn spec_strategy(
    degrees: std::ops::RangeInclusive<u32>,
    max_slots: usize,
) -> impl Strategy<Value = TowerGroupSpec> {
    prop::collection::vec(degrees, 0..=max_slots)
        .prop_map(|d| TowerGroupSpec::from_degrees(&d).unwrap())
}

/// Inclusion read directly off the two conditions on triples: effective
/// components compare slot by slot, and every sign pattern realised by the
/// first subgroup is allowed by the second.
fn literal_leq(spec: &TowerGroupSpec, a: &AdmissibleTriple, b: &AdmissibleTriple) -> bool {
    let t = spec.slot_count();
    if !(0..t).all(|s| a.effective(s) <= b.effective(s)) {
        return false;
    }
    let free: Vec<usize> = (0..t)
        .filter(|&s| a.position(s) == Some(ChainPosition::Full))
        .collect();
    let coupled_b = b.coupled();
    for h in a.signs().elements() {
        for choice in 0u64..1 << free.len() {
            let mut pattern = vec![false; t];
            for (c, &s) in a.coupled().iter().enumerate() {
                pattern[s] = h.get(c);
            }
            for (i, &s) in free.iter().enumerate() {
                pattern[s] = choice >> i & 1 == 1;
            }
            let on_j2 = coupled_b
                .iter()
                .enumerate()
                .fold(0u64, |m, (c, &s)| m | u64::from(pattern[s]) << c);
            if !b.signs().contains_raw(on_j2) {
                return false;
            }
            let outside_ok = (0..t)
                .filter(|s| !coupled_b.contains(s))
                .all(|s| !pattern[s] || b.position(s) == Some(ChainPosition::Full));
            if !outside_ok {
                return false;
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inclusion_matches_literal_conditions(spec in spec_strategy(3..=5, 4)) {
        let l = Lattice::enumerate(&spec).unwrap();
        for i in 0..l.len() {
            for j in 0..l.len() {
                let literal = literal_leq(&spec, &l.elements()[i].triple, &l.elements()[j].triple);
                prop_assert_eq!(l.leq(i, j).unwrap(), literal);
                prop_assert_eq!(l.leq_by_triples(i, j).unwrap(), literal);
            }
        }
    }

    #[test]
    fn meet_and_join_are_bounds(spec in spec_strategy(3..=6, 3)) {
        let l = Lattice::enumerate(&spec).unwrap();
        let n = l.len();
        for i in 0..n {
            for j in 0..n {
                let (m, jn) = (l.meet(i, j).unwrap(), l.join(i, j).unwrap());
                prop_assert!(l.leq(m, i).unwrap() && l.leq(m, j).unwrap());
                prop_assert!(l.leq(i, jn).unwrap() && l.leq(j, jn).unwrap());
                for c in 0..n {
                    if l.leq(c, i).unwrap() && l.leq(c, j).unwrap() {
                        prop_assert!(l.leq(c, m).unwrap());
                    }
                    if l.leq(i, c).unwrap() && l.leq(j, c).unwrap() {
                        prop_assert!(l.leq(jn, c).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn relabelling_is_an_automorphism(spec in spec_strategy(3..=5, 4), pick in any::<prop::sample::Index>()) {
        let l = Lattice::enumerate(&spec).unwrap();
        let perms = SlotPermutation::all(&spec);
        let sigma = &perms[pick.index(perms.len())];
        let tau = tau_sigma_on_lattice(&l, sigma).unwrap();
        let abstract_lattice = l.to_abstract();
        prop_assert!(tau.preserves_order(&abstract_lattice));
        let same_degrees = (0..spec.slot_count()).all(|s| spec.slots()[s].degree == spec.slots()[sigma.apply(s)].degree);
        for (i, e) in l.elements().iter().enumerate() {
            let image = &l.elements()[tau.apply(i)];
            prop_assert_eq!(image.family.label(), e.family.label());
            prop_assert_eq!(abstract_lattice.height(tau.apply(i)), abstract_lattice.height(i));
            if same_degrees {
                prop_assert_eq!(image.order, e.order);
            }
        }
        let back = tau_sigma_on_lattice(&l, &sigma.inverse()).unwrap();
        prop_assert!(back.compose(&tau).is_identity());
    }

    #[test]
    fn order_formula_counts_elements(spec in spec_strategy(3..=5, 4)) {
        let l = Lattice::enumerate(&spec).unwrap();
        let total = spec.group_order().unwrap();
        prop_assert_eq!(l.elements()[l.top()].order, total);
        prop_assert_eq!(l.elements()[l.bottom()].order, 1);
        for e in l.elements() {
            prop_assert_eq!(total % e.order, 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn oracle_agrees_on_random_small_groups(spec in spec_strategy(3..=4, 3)) {
        prop_assume!(spec.group_order().unwrap() <= 1000);
        let report = differential_validate(&spec, 1000, 8).unwrap();
        prop_assert!(report.is_ok(), "{:?}", report);
    }
}

#[test]
fn literal_oracle_on_named_elements() {
    let g = TowerGroupSpec::parse("S3^3").unwrap();
    let e = AdmissibleTriple::new(
        &g,
        &[0, 1, 2],
        &BTreeMap::new(),
        Subspace::from_bit_strings(3, &["111".to_string()]).unwrap(),
    )
    .unwrap();
    let d12 = AdmissibleTriple::sign_parity(&g, &[0, 1]).unwrap();
    let d13 = AdmissibleTriple::sign_parity(&g, &[0, 2]).unwrap();
    assert!(literal_leq(&g, &e, &d12));
    assert!(literal_leq(&g, &e, &d13));
    assert!(!literal_leq(&g, &d12, &e));
    assert!(!literal_leq(&g, &d12, &d13));
}
