mod common;

use common::*;
use mll::{check_proof, equivalent, proof_to_net, random_proof, sequentialise, Equivalence};
use proptest::prelude::*;

proptest! {
    #[test]
    fn random_proofs_translate_to_nets(seed in any::<u64>(), size in 1usize..40) {
        let p = random_proof(seed, size);
        prop_assert!(check_proof(&p));
        let l = proof_to_net(&p).unwrap();
        prop_assert!(dr_correct(&p.conclusion, &l));
    }

    #[test]
    fn sequentialising_a_translated_proof_round_trips((s, l) in arb::net(30)) {
        let p = sequentialise(&s, &l).unwrap();
        prop_assert!(check_proof(&p));
        prop_assert_eq!(&p.conclusion, &s);
        prop_assert_eq!(proof_to_net(&p).unwrap(), l);
    }
}

#[test]
fn every_small_net_sequentialises() {
    let mut count = 0;
    for n in 2..=9 {
        for s in sequents(n) {
            for l in nets(&s) {
                let p = sequentialise(&s, &l).unwrap();
                assert!(check_proof(&p));
                assert_eq!(proof_to_net(&p).unwrap(), l);
                count += 1;
            }
        }
    }
    assert!(count > 1000, "{count}");
}

#[test]
fn proofs_are_equivalent_when_their_nets_are() {
    let s = mll::parse_sequent("bot * bot, 1, 1, 1, bot * bot").unwrap();
    let all = nets(&s);
    let classes = brute_classes(&s, &all);
    let idx = class_index(&classes);
    let proofs: Vec<_> = all.iter().map(|l| sequentialise(&s, l).unwrap()).collect();
    for (i, p) in proofs.iter().enumerate() {
        for (j, q) in proofs.iter().enumerate() {
            let (a, b) = (proof_to_net(p).unwrap(), proof_to_net(q).unwrap());
            let same = matches!(equivalent(&s, &a, &b, 10_000).unwrap(), Equivalence::Found(_));
            assert_eq!(same, idx[&all[i]] == idx[&all[j]]);
        }
    }
}

#[test]
fn incorrect_linkings_do_not_sequentialise() {
    let s = mll::parse_sequent("bot:a * bot:b, 1:x | 1:y").unwrap();
    let l = mll::Linking::from_pairs(&s, &[("a", "x"), ("b", "x")]).unwrap();
    assert!(!dr_correct(&s, &l));
    assert!(sequentialise(&s, &l).is_err());
}
