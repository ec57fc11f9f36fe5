//! Linkings, switching graphs, correctness, boxings and empires.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sequent::{Kind, NodeId, Sequent};
use crate::unionfind::UnionFind;

/// Jump targets indexed by bot slot (the bot's position in preorder).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Linking {
    targets: Vec<NodeId>,
}

impl Linking {
    pub fn new(targets: Vec<NodeId>) -> Self {
        Linking { targets }
    }

    pub fn from_names(s: &Sequent, jumps: &BTreeMap<String, String>) -> Result<Linking> {
        let mut targets = vec![usize::MAX; s.bots().len()];
        for (b, t) in jumps {
            let bid = s.id(b)?;
            let slot = s.bot_slot(bid).ok_or_else(|| Error::NotABot(b.clone()))?;
            targets[slot] = s.id(t)?;
        }
        if let Some(i) = targets.iter().position(|&t| t == usize::MAX) {
            return Err(Error::Linking(format!("no jump for `{}`", s.name(s.bots()[i]))));
        }
        Ok(Linking { targets })
    }

    /// Builds a linking from `(bot, target)` name pairs.
    pub fn from_pairs(s: &Sequent, pairs: &[(&str, &str)]) -> Result<Linking> {
        let m = pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        Linking::from_names(s, &m)
    }

    pub fn to_names(&self, s: &Sequent) -> BTreeMap<String, String> {
        s.bots()
            .iter()
            .zip(&self.targets)
            .map(|(&b, &t)| (s.name(b).to_string(), s.name(t).to_string()))
            .collect()
    }

    pub fn targets(&self) -> &[NodeId] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn target(&self, slot: usize) -> NodeId {
        self.targets[slot]
    }

    /// Target of the bot node `bot`.
    pub fn of(&self, s: &Sequent, bot: NodeId) -> NodeId {
        self.targets[s.bot_slot(bot).expect("not a bot")]
    }

    pub fn set(&mut self, slot: usize, target: NodeId) {
        self.targets[slot] = target;
    }

    pub fn with(&self, slot: usize, target: NodeId) -> Linking {
        let mut l = self.clone();
        l.targets[slot] = target;
        l
    }

    /// Every jump lands on a one.
    pub fn is_restricted(&self, s: &Sequent) -> bool {
        self.targets.iter().all(|&t| s.kind(t) == Kind::One)
    }

    /// Checks that the linking is total over the bots of `s` and targets
    /// existing nodes.
    pub fn validate(&self, s: &Sequent) -> Result<()> {
        if self.targets.len() != s.bots().len() {
            return Err(Error::Linking(format!(
                "{} jumps for {} bots",
                self.targets.len(),
                s.bots().len()
            )));
        }
        if let Some(&t) = self.targets.iter().find(|&&t| t >= s.len()) {
            return Err(Error::Linking(format!("target {t} out of range")));
        }
        Ok(())
    }

    /// Bots jumping to each node.
    pub fn incoming(&self, s: &Sequent) -> Vec<Vec<NodeId>> {
        let mut inc = vec![vec![]; s.len()];
        for (i, &t) in self.targets.iter().enumerate() {
            inc[t].push(s.bots()[i]);
        }
        inc
    }
}

/// One selected child index per par node, in preorder of the pars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Switching(pub Vec<usize>);

/// Every restricted linking of `s`, each bot sent to some `1`, in
/// lexicographic order of targets.
pub fn restricted_linkings(s: &Sequent) -> impl Iterator<Item = Linking> + '_ {
    let ones = s.ones().to_vec();
    let k = s.bots().len();
    let mut idx = vec![0usize; k];
    let mut done = ones.is_empty() && k > 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = Linking::new(idx.iter().map(|&i| ones[i]).collect());
        done = true;
        for i in (0..k).rev() {
            idx[i] += 1;
            if idx[i] < ones.len() {
                done = false;
                break;
            }
            idx[i] = 0;
        }
        Some(out)
    })
}

/// Every correct restricted linking of `s`.
pub fn all_nets(s: &Sequent) -> Vec<Linking> {
    restricted_linkings(s).filter(|l| is_net(s, l)).collect()
}

pub fn pars(s: &Sequent) -> Vec<NodeId> {
    (0..s.len()).filter(|&v| s.kind(v) == Kind::Par).collect()
}

/// Edges of the switching graph for `sw`.
pub fn switching_graph(s: &Sequent, l: &Linking, sw: &Switching) -> Vec<(NodeId, NodeId)> {
    let mut edges = vec![];
    let mut p = 0;
    for v in 0..s.len() {
        match s.kind(v) {
            Kind::Tensor => edges.extend(s.children(v).iter().map(|&c| (v, c))),
            Kind::Par => {
                edges.push((v, s.children(v)[sw.0[p]]));
                p += 1;
            }
            Kind::Bot => edges.push((v, l.of(s, v))),
            Kind::One => {}
        }
    }
    edges
}

fn edge_count(s: &Sequent) -> usize {
    s.nodes()
        .iter()
        .map(|n| match n.kind {
            Kind::Tensor => n.children.len(),
            Kind::Par | Kind::Bot => 1,
            Kind::One => 0,
        })
        .sum()
}

/// Checks every switching graph for being a tree.
pub fn is_correct_exhaustive(s: &Sequent, l: &Linking) -> Result<bool> {
    l.validate(s)?;
    if s.is_empty() || edge_count(s) != s.len() - 1 {
        return Ok(false);
    }
    let ps = pars(s);
    let arity: Vec<usize> = ps.iter().map(|&p| s.children(p).len()).collect();
    let mut sw = Switching(vec![0; ps.len()]);
    loop {
        let mut uf = UnionFind::new(s.len());
        if !switching_graph(s, l, &sw).into_iter().all(|(a, b)| uf.union(a, b)) {
            return Ok(false);
        }
        let mut i = 0;
        loop {
            if i == ps.len() {
                return Ok(true);
            }
            sw.0[i] += 1;
            if sw.0[i] < arity[i] {
                break;
            }
            sw.0[i] = 0;
            i += 1;
        }
    }
}

/// Polynomial correctness check by contraction.
pub fn is_correct_fast(s: &Sequent, l: &Linking) -> Result<bool> {
    l.validate(s)?;
    Ok(is_net(s, l))
}

/// [`is_correct_fast`] for a linking already known to be well formed.
pub fn is_net(s: &Sequent, l: &Linking) -> bool {
    let all: Vec<NodeId> = s.roots().to_vec();
    correct_on(s, l, &all)
}

/// Contraction check restricted to the subtrees at `roots`. Jumps leaving the
/// region make it incorrect.
pub fn correct_on(s: &Sequent, l: &Linking, roots: &[NodeId]) -> bool {
    let mut inside = vec![false; s.len()];
    let mut count = 0;
    for &r in roots {
        for v in s.subtree(r) {
            inside[v] = true;
            count += 1;
        }
    }
    contract(s, l, &inside, roots, count)
}

fn contract(s: &Sequent, l: &Linking, inside: &[bool], roots: &[NodeId], count: usize) -> bool {
    if count == 0 {
        return false;
    }
    let mut edges = 0;
    let mut pending = vec![];
    for &r in roots {
        for v in s.subtree(r) {
            match s.kind(v) {
                Kind::Tensor => edges += s.children(v).len(),
                Kind::Par => {
                    edges += 1;
                    pending.push(v);
                }
                Kind::Bot => edges += 1,
                Kind::One => {}
            }
        }
    }
    if edges != count - 1 {
        return false;
    }
    let mut uf = UnionFind::new(s.len());
    for &r in roots {
        for v in s.subtree(r) {
            match s.kind(v) {
                Kind::Tensor => {
                    for &c in s.children(v) {
                        if !uf.union(v, c) {
                            return false;
                        }
                    }
                }
                Kind::Bot => {
                    let t = l.of(s, v);
                    if !inside[t] || !uf.union(v, t) {
                        return false;
                    }
                }
                _ => {}
            }
        }
    }
    loop {
        let before = pending.len();
        let mut failed = false;
        pending.retain(|&p| {
            if failed {
                return true;
            }
            let kids = s.children(p);
            let r = uf.find(kids[0]);
            if kids[1..].iter().all(|&c| uf.find(c) == r) {
                if uf.find(p) == r {
                    failed = true;
                } else {
                    uf.union(p, r);
                }
                return false;
            }
            true
        });
        if failed {
            return false;
        }
        if pending.is_empty() {
            return true;
        }
        if pending.len() == before {
            return false;
        }
    }
}

/// A set of nodes closed under subformulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubSequent {
    members: Vec<bool>,
}

impl SubSequent {
    pub fn from_members(members: Vec<bool>) -> Self {
        SubSequent { members }
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members[v]
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        (0..self.members.len()).filter(|&v| self.members[v]).collect()
    }

    /// Members whose parent is not a member.
    pub fn roots(&self, s: &Sequent) -> Vec<NodeId> {
        (0..self.members.len())
            .filter(|&v| self.members[v] && s.parent(v).is_none_or(|p| !self.members[p]))
            .collect()
    }

    pub fn root_names(&self, s: &Sequent) -> Vec<String> {
        self.roots(s).into_iter().map(|v| s.name(v).to_string()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The largest subnet with `v` as a port, by propagation from `v`.
pub fn empire(s: &Sequent, l: &Linking, v: NodeId) -> Result<SubSequent> {
    l.validate(s)?;
    if v >= s.len() {
        return Err(Error::UnknownName(v.to_string()));
    }
    if !l.is_restricted(s) {
        return Err(Error::Precondition("empire needs jumps onto ones only".into()));
    }
    Ok(empire_with(s, l, &l.incoming(s), v))
}

/// [`empire`] with a precomputed incoming-jump table.
pub fn empire_with(s: &Sequent, l: &Linking, incoming: &[Vec<NodeId>], v: NodeId) -> SubSequent {
    let mut members = vec![false; s.len()];
    let mut work = vec![v];
    members[v] = true;
    let add = |x: NodeId, members: &mut Vec<bool>, work: &mut Vec<NodeId>| {
        if !members[x] {
            members[x] = true;
            work.push(x);
        }
    };
    while let Some(x) = work.pop() {
        for &c in s.children(x) {
            add(c, &mut members, &mut work);
        }
        match s.kind(x) {
            Kind::Bot => add(l.of(s, x), &mut members, &mut work),
            Kind::One => {
                for &b in &incoming[x] {
                    add(b, &mut members, &mut work);
                }
            }
            _ => {}
        }
        if x == v {
            continue;
        }
        if let Some(p) = s.parent(x) {
            if members[p] {
                continue;
            }
            let enter = match s.kind(p) {
                Kind::Tensor => true,
                _ => s.children(p).iter().all(|&c| c != v && members[c]),
            };
            if enter {
                add(p, &mut members, &mut work);
            }
        }
    }
    SubSequent { members }
}

/// Ones to which the jump of bot `a` may be moved.
pub fn rewire_targets(s: &Sequent, l: &Linking, a: NodeId) -> Result<Vec<NodeId>> {
    if a >= s.len() || s.kind(a) != Kind::Bot {
        return Err(Error::NotABot(if a < s.len() { s.name(a).to_string() } else { a.to_string() }));
    }
    let e = empire(s, l, a)?;
    Ok(s.ones().iter().copied().filter(|&w| e.contains(w)).collect())
}

/// For each par, the roots of the sub-sequent it boxes.
pub type Boxing = BTreeMap<NodeId, Vec<NodeId>>;

/// A boxing whose local graphs are trees, read off a sequentialisation.
pub fn find_boxing(s: &Sequent, l: &Linking) -> Option<Boxing> {
    if l.validate(s).is_err() || !is_net(s, l) {
        return None;
    }
    let proof = crate::proofcalc::sequentialise(s, l).ok()?;
    let mut boxing = Boxing::new();
    collect_boxes(s, &proof, &mut boxing);
    Some(boxing)
}

fn collect_boxes(s: &Sequent, p: &crate::proofcalc::ProofTree, out: &mut Boxing) {
    if p.rule == crate::proofcalc::Rule::Par {
        let c = &p.conclusion;
        let roots: Vec<NodeId> = c.roots().iter().map(|&r| s.id(c.name(r)).unwrap()).collect();
        let v = roots
            .iter()
            .copied()
            .find(|&r| p.premises[0].conclusion.lookup(s.name(r)).is_none())
            .expect("par rule introduces a root");
        out.insert(v, roots);
    }
    for q in &p.premises {
        collect_boxes(s, q, out);
    }
}

/// Checks that boxes are ports of their par, pairwise nested or disjoint,
/// and that every local graph, and the top-level graph with all maximal
/// boxes closed, is a tree.
pub fn check_boxing(s: &Sequent, l: &Linking, b: &Boxing) -> bool {
    if l.validate(s).is_err() || b.len() != pars(s).len() {
        return false;
    }
    let mut sets: BTreeMap<NodeId, Vec<bool>> = BTreeMap::new();
    for (&v, roots) in b {
        if s.kind(v) != Kind::Par || !roots.contains(&v) {
            return false;
        }
        let mut m = vec![false; s.len()];
        for &r in roots {
            for x in s.subtree(r) {
                if m[x] {
                    return false;
                }
                m[x] = true;
            }
        }
        sets.insert(v, m);
    }
    let subset = |a: &[bool], b: &[bool]| a.iter().zip(b).all(|(&x, &y)| !x || y);
    let keys: Vec<NodeId> = sets.keys().copied().collect();
    for (i, &v) in keys.iter().enumerate() {
        for &w in &keys[i + 1..] {
            let (a, c) = (&sets[&v], &sets[&w]);
            let meet = a.iter().zip(c).any(|(&x, &y)| x && y);
            if meet && !(subset(a, c) && a != c || subset(c, a) && a != c) {
                return false;
            }
        }
    }
    // Closing vertex of each node: the largest box inside the scope holding it.
    let size = |v: NodeId| sets[&v].iter().filter(|&&x| x).count();
    let owner = |x: NodeId, within: Option<NodeId>| -> Option<NodeId> {
        keys.iter()
            .copied()
            .filter(|&w| Some(w) != within && sets[&w][x])
            .filter(|&w| within.is_none_or(|u| subset(&sets[&w], &sets[&u])))
            .max_by_key(|&w| size(w))
    };
    let mut scopes: Vec<Option<NodeId>> = keys.iter().map(|&v| Some(v)).collect();
    scopes.push(None);
    for scope in scopes {
        let members: Vec<NodeId> = match scope {
            Some(v) => (0..s.len()).filter(|&x| sets[&v][x] && x != v).collect(),
            None => (0..s.len()).collect(),
        };
        // Map each member to its vertex in the local graph.
        let mut rep = vec![usize::MAX; s.len()];
        let mut closed = vec![false; s.len()];
        for &x in &members {
            let o = owner(x, scope);
            rep[x] = o.unwrap_or(x);
            closed[x] = o.is_some();
        }
        let mut verts: Vec<NodeId> = members.iter().map(|&x| rep[x]).collect();
        verts.sort_unstable();
        verts.dedup();
        let mut uf = UnionFind::new(s.len());
        let mut edges = 0;
        let mut link = |a: NodeId, c: NodeId, uf: &mut UnionFind| -> bool {
            edges += 1;
            uf.union(a, c)
        };
        for &x in &members {
            if closed[x] {
                continue;
            }
            match s.kind(x) {
                Kind::Tensor => {
                    for &c in s.children(x) {
                        if !link(x, rep[c], &mut uf) {
                            return false;
                        }
                    }
                }
                Kind::Bot => {
                    let t = l.of(s, x);
                    if rep[t] == usize::MAX || !link(x, rep[t], &mut uf) {
                        return false;
                    }
                }
                // A par outside any inner box would have its own box.
                Kind::Par => return false,
                Kind::One => {}
            }
        }
        // Jumps from inside closed boxes leave through the box vertex.
        for &x in &members {
            if closed[x] && s.kind(x) == Kind::Bot {
                let t = l.of(s, x);
                if rep[t] == usize::MAX {
                    return false;
                }
                if rep[t] != rep[x] && !link(rep[x], rep[t], &mut uf) {
                    return false;
                }
            }
        }
        if edges + 1 != verts.len() {
            return false;
        }
    }
    true
}
