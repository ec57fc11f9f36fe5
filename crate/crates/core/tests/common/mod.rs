//! Test oracles written against the bare sequent structure, independent of
//! the library's checkers, plus small sequent corpora.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use mll::{Formula, Kind, Linking, NodeId, Sequent};

/// Danos-Regnier by brute force: every switching graph is a tree.
pub fn dr_correct(s: &Sequent, l: &Linking) -> bool {
    let n = s.len();
    let pars: Vec<NodeId> = (0..n).filter(|&v| s.kind(v) == Kind::Par).collect();
    let mut choice = vec![0usize; pars.len()];
    loop {
        let mut edges: Vec<(NodeId, NodeId)> = vec![];
        for v in 0..n {
            match s.kind(v) {
                Kind::Tensor => edges.extend(s.children(v).iter().map(|&c| (v, c))),
                Kind::Bot => edges.push((v, l.of(s, v))),
                _ => {}
            }
        }
        for (i, &p) in pars.iter().enumerate() {
            edges.push((p, s.children(p)[choice[i]]));
        }
        if edges.len() + 1 != n || !is_tree(n, &edges) {
            return false;
        }
        // Next switching, odometer style.
        let mut i = 0;
        loop {
            if i == pars.len() {
                return true;
            }
            choice[i] += 1;
            if choice[i] < s.children(pars[i]).len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn is_tree(n: usize, edges: &[(NodeId, NodeId)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    edges.iter().all(|&(a, b)| union(&mut parent, a, b))
}

/// Every restricted linking, bot by bot over the ones.
pub fn linkings(s: &Sequent) -> Vec<Linking> {
    let ones = s.ones();
    let mut out = vec![vec![]];
    for _ in s.bots() {
        out = out
            .into_iter()
            .flat_map(|t: Vec<NodeId>| {
                ones.iter().map(move |&o| {
                    let mut t = t.clone();
                    t.push(o);
                    t
                })
            })
            .collect();
    }
    out.into_iter().map(Linking::new).collect()
}

pub fn nets(s: &Sequent) -> Vec<Linking> {
    linkings(s).into_iter().filter(|l| dr_correct(s, l)).collect()
}

/// Nets of a par-free sequent by depth-first search over jumps, cutting any
/// branch that closes a cycle. Agrees with filtering `linkings` by
/// `dr_correct` but skips most of the search space.
pub fn basic_nets(s: &Sequent) -> Vec<Linking> {
    assert!(s.is_basic());
    let n = s.len();
    let mut uf: Vec<usize> = (0..n).collect();
    for v in 0..n {
        if s.kind(v) == Kind::Tensor {
            for &c in s.children(v) {
                if !union(&mut uf, v, c) {
                    return vec![];
                }
            }
        }
    }
    let edges = (0..n).filter(|&v| s.kind(v) == Kind::Tensor).map(|v| s.children(v).len()).sum::<usize>() + s.bots().len();
    if edges + 1 != n {
        return vec![];
    }
    let mut out = vec![];
    let mut cur = vec![];
    extend(s, &uf, &mut cur, &mut out);
    out
}

fn extend(s: &Sequent, uf: &[usize], cur: &mut Vec<NodeId>, out: &mut Vec<Linking>) {
    let slot = cur.len();
    if slot == s.bots().len() {
        out.push(Linking::new(cur.clone()));
        return;
    }
    for &o in s.ones() {
        let mut next = uf.to_vec();
        if union(&mut next, s.bots()[slot], o) {
            cur.push(o);
            extend(s, &next, cur, out);
            cur.pop();
        }
    }
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut x = x;
    while p[x] != r {
        let nx = p[x];
        p[x] = r;
        x = nx;
    }
    r
}

/// Joins the classes of `a` and `b`; false when they were already joined.
fn union(p: &mut [usize], a: usize, b: usize) -> bool {
    let (ra, rb) = (find(p, a), find(p, b));
    p[ra] = rb;
    ra != rb
}

/// Big-step rewiring neighbours by trying every retarget.
pub fn brute_neighbors(s: &Sequent, l: &Linking) -> Vec<Linking> {
    let mut out = vec![];
    for slot in 0..s.bots().len() {
        for &o in s.ones() {
            if o != l.target(slot) {
                let m = l.with(slot, o);
                if dr_correct(s, &m) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Connected components of the rewiring graph over `all`.
pub fn brute_classes(s: &Sequent, all: &[Linking]) -> Vec<Vec<Linking>> {
    let mut seen: HashSet<Linking> = HashSet::new();
    let mut out = vec![];
    for l in all {
        if !seen.insert(l.clone()) {
            continue;
        }
        let mut class = vec![l.clone()];
        let mut q = VecDeque::from([l.clone()]);
        while let Some(x) = q.pop_front() {
            for y in brute_neighbors(s, &x) {
                if seen.insert(y.clone()) {
                    class.push(y.clone());
                    q.push_back(y);
                }
            }
        }
        out.push(class);
    }
    out
}

/// Index of each net's class.
pub fn class_index(classes: &[Vec<Linking>]) -> HashMap<Linking, usize> {
    classes.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |l| (l.clone(), i))).collect()
}

fn unit(k: Kind) -> Formula {
    if k == Kind::One {
        Formula::one()
    } else {
        Formula::bot()
    }
}

/// All alternating formulas with exactly `size` nodes whose root is not
/// `not_root`, children in non-decreasing order of their printed form.
pub fn formulas(size: usize, not_root: Option<Kind>) -> Vec<Formula> {
    let mut out = vec![];
    if size == 1 {
        return vec![unit(Kind::One), unit(Kind::Bot)];
    }
    for kind in [Kind::Tensor, Kind::Par] {
        if Some(kind) == not_root {
            continue;
        }
        for kids in multisets(size - 1, Some(kind), 2) {
            out.push(if kind == Kind::Tensor { Formula::tensor(kids) } else { Formula::par(kids) });
        }
    }
    out
}

/// Multisets of at least `min` formulas (roots not of kind `not_root`)
/// whose sizes add up to `total`.
fn multisets(total: usize, not_root: Option<Kind>, min: usize) -> Vec<Vec<Formula>> {
    let mut pool: Vec<(usize, Formula)> = vec![];
    for sz in 1..=total {
        for f in formulas(sz, not_root) {
            pool.push((sz, f));
        }
    }
    let mut out = vec![];
    let mut cur = vec![];
    pick(&pool, 0, total, min, &mut cur, &mut out);
    out
}

fn pick(pool: &[(usize, Formula)], from: usize, left: usize, min: usize, cur: &mut Vec<Formula>, out: &mut Vec<Vec<Formula>>) {
    if left == 0 {
        if cur.len() >= min {
            out.push(cur.clone());
        }
        return;
    }
    for i in from..pool.len() {
        let (sz, f) = &pool[i];
        if *sz <= left {
            cur.push(f.clone());
            pick(pool, i, left - sz, min, cur, out);
            cur.pop();
        }
    }
}

/// All sequents with exactly `names` nodes, one per multiset of formulas.
pub fn sequents(names: usize) -> Vec<Sequent> {
    multisets(names, None, 1).into_iter().map(|fs| Sequent::new(fs).unwrap()).collect()
}

/// Basic sequents (no pars) with at most `names` nodes, balance zero and at
/// least two tensor formulas holding two or more bots each. A par-free
/// alternating formula is a unit or a tensor of units, so a sequent is fixed
/// by its root units and the (ones, bots) shape of each tensor.
pub fn basic_sequents(names: usize) -> Vec<Sequent> {
    let mut shapes = vec![];
    for size in 3..=names {
        for ones in 0..size {
            shapes.push((ones, size - 1 - ones));
        }
    }
    let mut out = vec![];
    let mut cur = vec![];
    tensors(&shapes, 0, names, &mut cur, &mut out);
    out
}

fn tensors(shapes: &[(usize, usize)], from: usize, left: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Sequent>) {
    if cur.iter().filter(|&&(_, b)| b >= 2).count() >= 2 {
        for ones in 0..=left {
            for bots in 0..=left - ones {
                let mut fs: Vec<Formula> = vec![Formula::one(); ones];
                fs.extend(vec![Formula::bot(); bots]);
                for &(o, b) in cur.iter() {
                    let mut kids = vec![Formula::one(); o];
                    kids.extend(vec![Formula::bot(); b]);
                    fs.push(Formula::tensor(kids));
                }
                let s = Sequent::new(fs).unwrap();
                if s.balance() == 0 {
                    out.push(s);
                }
            }
        }
    }
    for i in from..shapes.len() {
        let (o, b) = shapes[i];
        if o + b < left {
            cur.push((o, b));
            tensors(shapes, i, left - o - b - 1, cur, out);
            cur.pop();
        }
    }
}

pub fn names(s: &Sequent, ids: &[NodeId]) -> BTreeSet<String> {
    ids.iter().map(|&i| s.name(i).to_string()).collect()
}

pub mod arb {
    use mll::{Formula, Linking, Sequent};
    use proptest::prelude::*;
    use proptest::sample::Index;

    pub fn formula() -> BoxedStrategy<Formula> {
        let leaf = prop_oneof![Just(Formula::one()), Just(Formula::bot())];
        leaf.prop_recursive(3, 12, 4, |inner| {
            (any::<bool>(), prop::collection::vec(inner, 2..4))
                .prop_map(|(t, kids)| if t { Formula::tensor(kids) } else { Formula::par(kids) })
        })
        .boxed()
    }

    /// Sequents of one to three formulas with at most `max` nodes.
    pub fn sequent(max: usize) -> BoxedStrategy<Sequent> {
        prop::collection::vec(formula(), 1..4)
            .prop_filter_map("too large", move |fs| Sequent::new(fs).ok().filter(|s| s.len() <= max))
            .boxed()
    }

    /// A sequent with a restricted linking, correct or not.
    pub fn linking(max: usize) -> BoxedStrategy<(Sequent, Linking)> {
        sequent(max)
            .prop_filter("bots but no ones", |s| !s.ones().is_empty() || s.bots().is_empty())
            .prop_flat_map(|s| {
                let k = s.bots().len();
                (Just(s), prop::collection::vec(any::<Index>(), k))
            })
            .prop_map(|(s, idx)| {
                let t = idx.iter().map(|i| s.ones()[i.index(s.ones().len())]).collect();
                (s, Linking::new(t))
            })
            .boxed()
    }

    /// A proof net read off a random proof.
    pub fn net(max_size: usize) -> BoxedStrategy<(Sequent, Linking)> {
        (any::<u64>(), 2..max_size)
            .prop_map(|(seed, size)| {
                let p = mll::random_proof(seed, size);
                let l = mll::proof_to_net(&p).unwrap();
                (p.conclusion, l)
            })
            .boxed()
    }
}
