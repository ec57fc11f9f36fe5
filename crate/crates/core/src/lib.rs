//! Proof nets for unit-only multiplicative linear logic.
//!
//! Sequents are built from the units `1` and `⊥` with n-ary alternating
//! tensor and par. A proof net is a sequent together with a linking that
//! sends each `⊥` to a target; two nets are equivalent when one can be
//! rewired into the other one jump at a time.
//!
//! Alongside the nets, the crate carries nondeterministic constraint logic
//! and an executable encoding of constraint-graph reconfiguration into proof
//! net equivalence, with decoding and a compiler from reconfiguration
//! sequences to rewiring paths.
//!
//! ```
//! use mll::{parse_sequent, Linking, is_correct_fast};
//!
//! let s = parse_sequent("bot:a * bot:b, 1:x | 1:y").unwrap();
//! let l = Linking::from_pairs(&s, &[("a", "x"), ("b", "y")]).unwrap();
//! assert!(is_correct_fast(&s, &l).unwrap());
//! ```

pub mod dot;
pub mod error;
pub mod io;
pub mod ncl;
pub mod proofcalc;
pub mod proofnet;
pub mod reduction;
pub mod rewiring;
pub mod sequent;
mod unionfind;

pub use error::{Error, Result};
pub use proofcalc::{
    check_proof, normalize_to_unit_targets, proof_to_net, random_proof, sequentialise, ProofTree, Rule,
};
pub use proofnet::{
    all_nets, empire, find_boxing, is_correct_exhaustive, is_correct_fast, is_net, restricted_linkings, rewire_targets, Boxing, Linking,
    SubSequent, Switching,
};
pub use rewiring::{
    basic_equivalent, basic_path, classes, double_exchange, enumerate_class, equivalent, neighbors, parity,
    small_step_neighbors, Equivalence, Parity, RewirePath, Step,
};
pub use sequent::{balance, is_basic, parse_sequent, print_sequent, Formula, Kind, NodeId, Sequent};
pub use unionfind::UnionFind;
