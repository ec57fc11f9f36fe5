mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use mll::{empire, is_correct_exhaustive, is_correct_fast, rewire_targets, Kind, Linking};
use proptest::prelude::*;

proptest! {
    #[test]
    fn checkers_agree_on_random_linkings((s, l) in arb::linking(12)) {
        let fast = is_correct_fast(&s, &l).unwrap();
        prop_assert_eq!(fast, is_correct_exhaustive(&s, &l).unwrap());
        prop_assert_eq!(fast, dr_correct(&s, &l));
        if fast {
            prop_assert_eq!(s.balance(), 0);
        }
    }

    #[test]
    fn empire_ones_are_the_rewirings((s, l) in arb::net(12)) {
        for (slot, &a) in s.bots().iter().enumerate() {
            let e = empire(&s, &l, a).unwrap();
            for &w in s.ones() {
                prop_assert_eq!(e.contains(w), dr_correct(&s, &l.with(slot, w)));
            }
            let mut targets = rewire_targets(&s, &l, a).unwrap();
            targets.sort();
            let want: Vec<usize> = s.ones().iter().copied().filter(|&w| e.contains(w)).collect();
            prop_assert_eq!(targets, want);
        }
    }

    #[test]
    fn empires_are_subnets((s, l) in arb::net(14)) {
        for v in 0..s.len() {
            let e = empire(&s, &l, v).unwrap();
            prop_assert!(e.contains(v));
            let sub = s.restrict(&e.roots(&s));
            let names = l.to_names(&s);
            let jumps: BTreeMap<String, String> = sub
                .bots()
                .iter()
                .map(|&b| {
                    let a = sub.name(b);
                    (a.to_string(), names[a].clone())
                })
                .collect();
            let sl = Linking::from_names(&sub, &jumps).unwrap();
            prop_assert!(dr_correct(&sub, &sl), "empire of {} is not a net", s.name(v));
        }
    }

    #[test]
    fn tensor_children_have_disjoint_empires((s, l) in arb::net(14)) {
        for t in (0..s.len()).filter(|&t| s.kind(t) == Kind::Tensor) {
            let es: Vec<BTreeSet<usize>> =
                s.children(t).iter().map(|&c| empire(&s, &l, c).unwrap().nodes().into_iter().collect()).collect();
            for (i, a) in es.iter().enumerate() {
                for b in &es[i + 1..] {
                    prop_assert!(a.is_disjoint(b));
                }
            }
        }
    }
}

#[test]
fn pruned_net_search_matches_the_filter() {
    for s in basic_sequents(10) {
        let mut a = basic_nets(&s);
        let mut b = nets(&s);
        a.sort_by(|x, y| x.targets().cmp(y.targets()));
        b.sort_by(|x, y| x.targets().cmp(y.targets()));
        assert_eq!(a, b, "{}", mll::print_sequent(&s));
    }
}

#[test]
fn all_nets_matches_the_oracle() {
    for n in 2..=7 {
        for s in sequents(n) {
            assert_eq!(mll::all_nets(&s), nets(&s), "{}", mll::print_sequent(&s));
        }
    }
}

#[test]
fn targets_outside_the_ones_are_rejected() {
    let s = mll::parse_sequent("bot:a * bot:b, 1:x, 1:y").unwrap();
    let l = Linking::from_pairs(&s, &[("a", "b"), ("b", "y")]).unwrap();
    assert!(rewire_targets(&s, &l, s.id("b").unwrap()).is_err());
    assert!(empire(&s, &l, s.id("a").unwrap()).is_err());
}
