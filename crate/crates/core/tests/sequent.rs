mod common;

use common::arb;
use mll::{parse_sequent, print_sequent, reduction, Formula, Sequent};
use proptest::prelude::*;

fn unnamed(f: Formula) -> Formula {
    Formula { kind: f.kind, name: None, children: f.children.into_iter().map(unnamed).collect() }
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(s in arb::sequent(40)) {
        let back = parse_sequent(&print_sequent(&s)).unwrap();
        prop_assert_eq!(&back, &s);
        for v in 0..s.len() {
            prop_assert_eq!(back.name(v), s.name(v));
        }
    }

    #[test]
    fn balance_adds_up(a in arb::sequent(20), b in arb::sequent(20)) {
        let roots = |s: &Sequent| s.roots().iter().map(|&r| unnamed(s.formula(r))).collect::<Vec<_>>();
        let mut fs = roots(&a);
        fs.extend(roots(&b));
        let ab = Sequent::new(fs).unwrap();
        prop_assert_eq!(ab.balance(), a.balance() + b.balance() - 1);
    }

    #[test]
    fn inhabited_sequents_are_balanced(s in arb::sequent(12)) {
        if reduction::find_proof_net(&s, 1_000_000).unwrap().is_some() {
            prop_assert_eq!(s.balance(), 0);
        }
    }
}

#[test]
fn named_nodes_survive_printing() {
    let s = parse_sequent("(bot:a * bot:b):t, 1:x | 1:y, bot").unwrap();
    let back = parse_sequent(&print_sequent(&s)).unwrap();
    assert_eq!(back, s);
    assert!(back.lookup("t").is_some() && back.lookup("y").is_some());
}
