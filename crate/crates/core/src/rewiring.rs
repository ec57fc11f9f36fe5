//! Rewiring of jumps: neighbours, equivalence search, the parity invariant,
//! double exchange, and constructive paths for basic sequents.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::proofnet::{empire_with, is_net, Linking, Switching};
use crate::sequent::{Kind, NodeId, Sequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// Moves the jump of `bot` onto `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub bot: NodeId,
    pub to: NodeId,
}

/// A start linking and a sequence of single-jump moves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewirePath {
    pub start: Linking,
    pub steps: Vec<Step>,
}

impl RewirePath {
    pub fn empty(start: Linking) -> Self {
        RewirePath { start, steps: vec![] }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Every linking along the path, starting with `start`.
    pub fn linkings(&self, s: &Sequent) -> Vec<Linking> {
        let mut cur = self.start.clone();
        let mut out = vec![cur.clone()];
        for st in &self.steps {
            cur.set(s.bot_slot(st.bot).expect("step on a bot"), st.to);
            out.push(cur.clone());
        }
        out
    }

    pub fn end(&self, s: &Sequent) -> Linking {
        let mut cur = self.start.clone();
        for st in &self.steps {
            cur.set(s.bot_slot(st.bot).expect("step on a bot"), st.to);
        }
        cur
    }

    /// Checks that the start is a net and each step moves exactly one jump to
    /// a new target, keeping the net correct.
    pub fn verify(&self, s: &Sequent) -> Result<()> {
        self.start.validate(s)?;
        if !is_net(s, &self.start) {
            return Err(Error::Step { step: 0, msg: "start is not a proof net".into() });
        }
        let mut cur = self.start.clone();
        for (i, st) in self.steps.iter().enumerate() {
            let slot = s
                .bot_slot(st.bot)
                .ok_or_else(|| Error::Step { step: i + 1, msg: format!("node {} is not a bot", st.bot) })?;
            if st.to >= s.len() || cur.target(slot) == st.to {
                return Err(Error::Step { step: i + 1, msg: "step does not change a jump".into() });
            }
            cur.set(slot, st.to);
            if !is_net(s, &cur) {
                return Err(Error::Step { step: i + 1, msg: format!("moving {} breaks correctness", s.name(st.bot)) });
            }
        }
        Ok(())
    }

    pub fn reversed(&self, s: &Sequent) -> RewirePath {
        let ls = self.linkings(s);
        let steps = self
            .steps
            .iter()
            .enumerate()
            .rev()
            .map(|(i, st)| Step { bot: st.bot, to: ls[i].of(s, st.bot) })
            .collect();
        RewirePath { start: ls.last().unwrap().clone(), steps }
    }

    /// Appends `other`, which must start where this path ends.
    pub fn extend(&mut self, other: &RewirePath) {
        self.steps.extend_from_slice(&other.steps);
    }
}

/// Builds a path move by move, checking each move as it is made.
#[derive(Clone, Debug)]
pub struct PathBuilder<'a> {
    s: &'a Sequent,
    cur: Linking,
    path: RewirePath,
}

impl<'a> PathBuilder<'a> {
    pub fn new(s: &'a Sequent, start: Linking) -> Self {
        PathBuilder { s, cur: start.clone(), path: RewirePath::empty(start) }
    }

    pub fn current(&self) -> &Linking {
        &self.cur
    }

    pub fn sequent(&self) -> &'a Sequent {
        self.s
    }

    /// Moves `bot` onto `to`; a move onto the current target is skipped.
    pub fn move_to(&mut self, bot: NodeId, to: NodeId) -> Result<()> {
        let slot = self.s.bot_slot(bot).ok_or_else(|| Error::NotABot(self.s.name(bot).into()))?;
        if self.cur.target(slot) == to {
            return Ok(());
        }
        let next = self.cur.with(slot, to);
        if !is_net(self.s, &next) {
            return Err(Error::Step {
                step: self.path.len() + 1,
                msg: format!("moving {} onto {} breaks correctness", self.s.name(bot), self.s.name(to)),
            });
        }
        self.cur = next;
        self.path.steps.push(Step { bot, to });
        Ok(())
    }

    pub fn append(&mut self, p: &RewirePath) -> Result<()> {
        for st in &p.steps {
            self.move_to(st.bot, st.to)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    pub fn finish(self) -> RewirePath {
        self.path
    }
}

fn by_name(s: &Sequent, ids: &[NodeId]) -> Vec<NodeId> {
    let mut v = ids.to_vec();
    v.sort_by(|&a, &b| s.name(a).cmp(s.name(b)));
    v
}

fn check_restricted(s: &Sequent, l: &Linking) -> Result<()> {
    l.validate(s)?;
    if !l.is_restricted(s) {
        return Err(Error::Precondition("jumps must target ones".into()));
    }
    Ok(())
}

/// All single-jump rewirings of a restricted net, ordered by bot name and
/// then target name.
pub fn neighbors(s: &Sequent, l: &Linking) -> Result<Vec<(Linking, Step)>> {
    check_restricted(s, l)?;
    Ok(neighbors_unchecked(s, l))
}

pub(crate) fn neighbors_unchecked(s: &Sequent, l: &Linking) -> Vec<(Linking, Step)> {
    let inc = l.incoming(s);
    let ones = by_name(s, s.ones());
    let mut out = vec![];
    for a in by_name(s, s.bots()) {
        let e = empire_with(s, l, &inc, a);
        let slot = s.bot_slot(a).unwrap();
        for &w in &ones {
            if w != l.target(slot) && e.contains(w) {
                out.push((l.with(slot, w), Step { bot: a, to: w }));
            }
        }
    }
    out
}

/// Local rewirings: a jump moves to a one that is adjacent to its current
/// target across connectives and other bots, without passing another one.
pub fn small_step_neighbors(s: &Sequent, l: &Linking) -> Result<Vec<(Linking, Step)>> {
    check_restricted(s, l)?;
    let inc = l.incoming(s);
    let ones = by_name(s, s.ones());
    let mut out = vec![];
    for a in by_name(s, s.bots()) {
        let slot = s.bot_slot(a).unwrap();
        let x = l.target(slot);
        let near = local_ones(s, l, &inc, a, x);
        let e = empire_with(s, l, &inc, a);
        for &w in &ones {
            if w != x && near[w] && e.contains(w) {
                out.push((l.with(slot, w), Step { bot: a, to: w }));
            }
        }
    }
    Ok(out)
}

fn local_ones(s: &Sequent, l: &Linking, inc: &[Vec<NodeId>], a: NodeId, x: NodeId) -> Vec<bool> {
    let mut seen = vec![false; s.len()];
    let mut hit = vec![false; s.len()];
    let mut work = vec![x];
    seen[x] = true;
    while let Some(v) = work.pop() {
        let mut adj: Vec<NodeId> = s.children(v).to_vec();
        adj.extend(s.parent(v));
        match s.kind(v) {
            Kind::Bot => adj.push(l.of(s, v)),
            Kind::One => adj.extend(inc[v].iter().copied()),
            _ => {}
        }
        for u in adj {
            if u == a || seen[u] {
                continue;
            }
            seen[u] = true;
            if s.kind(u) == Kind::One {
                hit[u] = true;
            } else {
                work.push(u);
            }
        }
    }
    hit
}

/// The switching graph as a tree directed towards the root: for each vertex,
/// the label of the edge to its parent. Multi-formula sequents get a virtual
/// root par, and virtual unary connectives restore strict alternation where
/// a par-like node sits under a par or a tensor-like node under a tensor.
fn edge_labels(s: &Sequent, l: &Linking, sw: &Switching) -> Vec<(usize, usize)> {
    let n = s.len();
    // Virtual nodes live at ids n.. ; `up[v]` is v's parent in the augmented tree.
    let par_like = |k: Kind| matches!(k, Kind::Par | Kind::Bot);
    let mut kinds: Vec<Kind> = s.nodes().iter().map(|x| x.kind).collect();
    let mut up: Vec<Option<usize>> = vec![None; n];
    let mut kids: Vec<Vec<usize>> = vec![vec![]; n];
    let attach = |parent: usize, child: usize, kinds: &mut Vec<Kind>, up: &mut Vec<Option<usize>>, kids: &mut Vec<Vec<usize>>| {
        let clash = par_like(kinds[parent]) == par_like(kinds[child]);
        if clash {
            let w = kinds.len();
            kinds.push(if par_like(kinds[child]) { Kind::Tensor } else { Kind::Par });
            up.push(Some(parent));
            kids.push(vec![child]);
            kids[parent].push(w);
            up[child] = Some(w);
        } else {
            kids[parent].push(child);
            up[child] = Some(parent);
        }
    };
    for v in 0..n {
        for &c in s.children(v) {
            attach(v, c, &mut kinds, &mut up, &mut kids);
        }
    }
    let root = if s.roots().len() == 1 {
        s.roots()[0]
    } else {
        let r = kinds.len();
        kinds.push(Kind::Par);
        up.push(None);
        kids.push(vec![]);
        for &x in s.roots() {
            attach(r, x, &mut kinds, &mut up, &mut kids);
        }
        r
    };
    // Edges: tensor-like owners label children by index; par-like owners have
    // one edge, the switched child or the jump.
    let total = kinds.len();
    let mut adj: Vec<Vec<(usize, (usize, usize))>> = vec![vec![]; total];
    let mut p = 0;
    for v in 0..total {
        match kinds[v] {
            Kind::Tensor => {
                for (i, &c) in kids[v].iter().enumerate() {
                    adj[v].push((c, (v, i)));
                    adj[c].push((v, (v, i)));
                }
            }
            Kind::Par => {
                let c = if v < n {
                    let k = s.children(v)[sw.0[p]];
                    p += 1;
                    // The switched child may sit under a virtual node.
                    kids[v].iter().copied().find(|&x| x == k || (x >= n && kids[x][0] == k)).unwrap()
                } else {
                    kids[v][0]
                };
                adj[v].push((c, (v, 0)));
                adj[c].push((v, (v, 0)));
            }
            Kind::Bot => {
                let t = l.of(s, v);
                adj[v].push((t, (v, 0)));
                adj[t].push((v, (v, 0)));
            }
            Kind::One => {}
        }
    }
    let mut label = vec![(usize::MAX, usize::MAX); total];
    let mut seen = vec![false; total];
    seen[root] = true;
    let mut q = VecDeque::from([root]);
    while let Some(v) = q.pop_front() {
        for &(u, e) in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                label[u] = e;
                q.push_back(u);
            }
        }
    }
    label
}

fn default_switching(s: &Sequent) -> Switching {
    Switching(vec![0; crate::proofnet::pars(s).len()])
}

/// Parity of the permutation induced by two nets' switching trees.
pub fn parity(s: &Sequent, l1: &Linking, l2: &Linking) -> Result<Parity> {
    let sw = default_switching(s);
    parity_with(s, l1, &sw, l2, &sw)
}

/// [`parity`] with explicit switchings for each net.
pub fn parity_with(s: &Sequent, l1: &Linking, sw1: &Switching, l2: &Linking, sw2: &Switching) -> Result<Parity> {
    for l in [l1, l2] {
        l.validate(s)?;
        if !is_net(s, l) {
            return Err(Error::Precondition("parity needs two proof nets".into()));
        }
    }
    let f1 = edge_labels(s, l1, sw1);
    let f2 = edge_labels(s, l2, sw2);
    let inv: HashMap<(usize, usize), usize> =
        f2.iter().enumerate().filter(|(_, e)| e.0 != usize::MAX).map(|(v, &e)| (e, v)).collect();
    let n = f1.len();
    let mut seen = vec![false; n];
    let mut transpositions = 0;
    for v in 0..n {
        if seen[v] || f1[v].0 == usize::MAX {
            continue;
        }
        let mut len = 0;
        let mut x = v;
        while !seen[x] {
            seen[x] = true;
            x = inv[&f1[x]];
            len += 1;
        }
        transpositions += len - 1;
    }
    Ok(if transpositions % 2 == 0 { Parity::Even } else { Parity::Odd })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reason {
    /// The nets have odd parity.
    Parity,
    /// The whole class of one net was enumerated without meeting the other.
    Exhausted { class_size: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Found(RewirePath),
    Inequivalent(Reason),
    /// The state budget ran out.
    Unknown,
}

fn same_sequent_nets(s: &Sequent, l1: &Linking, l2: &Linking) -> Result<()> {
    for l in [l1, l2] {
        check_restricted(s, l)?;
        if !is_net(s, l) {
            return Err(Error::Precondition("not a proof net".into()));
        }
    }
    Ok(())
}

/// Decides equivalence by parity and then bidirectional search, visiting at
/// most `budget` states.
pub fn equivalent(s: &Sequent, l1: &Linking, l2: &Linking, budget: usize) -> Result<Equivalence> {
    same_sequent_nets(s, l1, l2)?;
    if parity(s, l1, l2)? == Parity::Odd {
        return Ok(Equivalence::Inequivalent(Reason::Parity));
    }
    Ok(bidirectional(s, l1, l2, budget, &|_, _| true))
}

type Parents = HashMap<Linking, Option<(Linking, Step)>>;

/// Bidirectional breadth-first search over rewirings allowed by `allow`.
pub(crate) fn bidirectional(
    s: &Sequent,
    l1: &Linking,
    l2: &Linking,
    budget: usize,
    allow: &dyn Fn(usize, NodeId) -> bool,
) -> Equivalence {
    if l1 == l2 {
        return Equivalence::Found(RewirePath::empty(l1.clone()));
    }
    let mut seen: [Parents; 2] = [HashMap::new(), HashMap::new()];
    seen[0].insert(l1.clone(), None);
    seen[1].insert(l2.clone(), None);
    let mut front = [vec![l1.clone()], vec![l2.clone()]];
    loop {
        let side = if front[0].len() <= front[1].len() { 0 } else { 1 };
        let mut next = vec![];
        for l in std::mem::take(&mut front[side]) {
            for (m, st) in neighbors_unchecked(s, &l) {
                if !allow(s.bot_slot(st.bot).unwrap(), st.to) || seen[side].contains_key(&m) {
                    continue;
                }
                seen[side].insert(m.clone(), Some((l.clone(), st)));
                if seen[1 - side].contains_key(&m) {
                    return Equivalence::Found(join(s, &seen, side, &m));
                }
                next.push(m);
                if seen[0].len() + seen[1].len() > budget {
                    return Equivalence::Unknown;
                }
            }
        }
        if next.is_empty() {
            return Equivalence::Inequivalent(Reason::Exhausted { class_size: seen[side].len() });
        }
        front[side] = next;
    }
}

fn trace(seen: &Parents, mut at: Linking) -> (Linking, Vec<Step>) {
    let mut steps = vec![];
    while let Some(Some((prev, st))) = seen.get(&at) {
        steps.push(*st);
        at = prev.clone();
    }
    steps.reverse();
    (at, steps)
}

fn join(s: &Sequent, seen: &[Parents; 2], side: usize, meet: &Linking) -> RewirePath {
    let (a, b) = if side == 0 { (&seen[0], &seen[1]) } else { (&seen[1], &seen[0]) };
    let (start_a, steps_a) = trace(a, meet.clone());
    let (start_b, steps_b) = trace(b, meet.clone());
    let pa = RewirePath { start: start_a, steps: steps_a };
    let pb = RewirePath { start: start_b, steps: steps_b };
    if side == 0 {
        let mut p = pa;
        p.extend(&pb.reversed(s));
        p
    } else {
        let mut p = pb;
        p.extend(&pa.reversed(s));
        p
    }
}

/// The rewiring class of `l`, in breadth-first order.
pub fn enumerate_class(s: &Sequent, l: &Linking, budget: usize) -> Result<Vec<Linking>> {
    same_sequent_nets(s, l, l)?;
    let mut seen = std::collections::HashSet::from([l.clone()]);
    let mut order = vec![l.clone()];
    let mut i = 0;
    while i < order.len() {
        let cur = order[i].clone();
        i += 1;
        for (m, _) in neighbors_unchecked(s, &cur) {
            if seen.insert(m.clone()) {
                if seen.len() > budget {
                    return Err(Error::Budget(budget));
                }
                order.push(m);
            }
        }
    }
    Ok(order)
}

/// The rewiring classes of all correct restricted linkings of `s`, each in
/// breadth-first order from its least member.
pub fn classes(s: &Sequent, budget: usize) -> Result<Vec<Vec<Linking>>> {
    let mut out: Vec<Vec<Linking>> = vec![];
    let mut seen = std::collections::HashSet::new();
    for l in crate::proofnet::all_nets(s) {
        if seen.contains(&l) {
            continue;
        }
        let class = enumerate_class(s, &l, budget)?;
        seen.extend(class.iter().cloned());
        out.push(class);
    }
    Ok(out)
}

/// Exchanges the targets of `a` and `b` and of `c` and `d` in six moves.
pub fn double_exchange(s: &Sequent, l: &Linking, a: NodeId, b: NodeId, c: NodeId, d: NodeId) -> Result<RewirePath> {
    let names = [a, b, c, d];
    for (i, &x) in names.iter().enumerate() {
        if x >= s.len() || s.kind(x) != Kind::Bot {
            return Err(Error::NotABot(x.to_string()));
        }
        if names[..i].contains(&x) {
            return Err(Error::Precondition("double exchange needs four distinct bots".into()));
        }
    }
    l.validate(s)?;
    let t = |x: NodeId| l.of(s, x);
    let plan = [(b, t(d)), (d, t(a)), (a, t(b)), (c, t(d)), (b, t(a)), (d, t(c))];
    let mut pb = PathBuilder::new(s, l.clone());
    for (i, &(x, to)) in plan.iter().enumerate() {
        pb.move_to(x, to).map_err(|_| Error::Step {
            step: i + 1,
            msg: format!("moving {} onto {} breaks correctness", s.name(x), s.name(to)),
        })?;
    }
    Ok(pb.finish())
}

/// Root tensors of a basic sequent with at least two bot children.
fn tensor_formulas(s: &Sequent) -> Vec<NodeId> {
    s.roots()
        .iter()
        .copied()
        .filter(|&r| s.kind(r) == Kind::Tensor && s.children(r).iter().filter(|&&c| s.kind(c) == Kind::Bot).count() >= 2)
        .collect()
}

fn basic_pre(s: &Sequent) -> Result<()> {
    if !s.is_basic() {
        return Err(Error::Precondition("sequent has a par".into()));
    }
    if tensor_formulas(s).len() < 2 {
        return Err(Error::Precondition("needs two tensor formulas with two bots each".into()));
    }
    Ok(())
}

/// Equivalence of nets on a basic sequent, decided by parity.
pub fn basic_equivalent(s: &Sequent, l1: &Linking, l2: &Linking) -> Result<bool> {
    basic_pre(s)?;
    same_sequent_nets(s, l1, l2)?;
    Ok(parity(s, l1, l2)? == Parity::Even)
}

/// State count below which the router hands over to breadth-first search.
pub const BASIC_BFS_THRESHOLD: usize = 5000;

#[derive(Debug)]
struct Plan {
    q: NodeId,
    /// Dangling bots pinned to `q` before any peeling.
    pinned: Vec<NodeId>,
    /// (tensor, bot, one, bot left dangling afterwards)
    peels: Vec<(NodeId, NodeId, NodeId, Option<NodeId>)>,
    /// Bots and ones still free after peeling.
    bots: Vec<NodeId>,
    ones: Vec<NodeId>,
}

fn plan(s: &Sequent) -> Option<Plan> {
    let root_ones: Vec<NodeId> = s.roots().iter().copied().filter(|&r| s.kind(r) == Kind::One).collect();
    let tensors: Vec<NodeId> = s.roots().iter().copied().filter(|&r| s.kind(r) == Kind::Tensor).collect();
    if root_ones.is_empty() || tensors.iter().any(|&t| s.children(t).iter().any(|&c| s.kind(c) == Kind::One)) {
        return None;
    }
    let q = root_ones[0];
    let pinned: Vec<NodeId> = s.roots().iter().copied().filter(|&r| s.kind(r) == Kind::Bot).collect();
    let mut active: Vec<Vec<NodeId>> = tensors.iter().map(|&t| s.children(t).to_vec()).collect();
    let mut ones = root_ones.clone();
    let mut peels = vec![];
    loop {
        let big: Vec<usize> = (0..active.len()).filter(|&i| active[i].len() >= 2).collect();
        let free: usize = big.iter().map(|&i| active[i].len()).sum();
        let estimate = (ones.len() as f64).powi(free as i32);
        let largest = big.iter().map(|&i| active[i].len()).max().unwrap_or(0);
        if big.len() < 2 || estimate <= BASIC_BFS_THRESHOLD as f64 || (largest == 2 && big.len() == 2) || ones.len() < 3 {
            break;
        }
        let ti = *big.iter().max_by_key(|&&i| (active[i].len(), std::cmp::Reverse(i))).unwrap();
        let a = active[ti].pop().unwrap();
        let z = ones.pop().unwrap();
        let left = (active[ti].len() == 1).then(|| active[ti].pop().unwrap());
        peels.push((tensors[ti], a, z, left));
    }
    let bots = active.into_iter().filter(|v| v.len() >= 2).flatten().collect();
    Some(Plan { q, pinned, peels, bots, ones })
}

fn route<'a>(s: &'a Sequent, l: &Linking, p: &Plan) -> Result<PathBuilder<'a>> {
    let mut pb = PathBuilder::new(s, l.clone());
    for &d in &p.pinned {
        pb.move_to(d, p.q)?;
    }
    let mut done: Vec<NodeId> = vec![];
    for &(t, a, z, left) in &p.peels {
        let live: Vec<NodeId> = s.children(t).iter().copied().filter(|x| !done.contains(x)).collect();
        let cur = pb.current().clone();
        let inc = cur.incoming(s);
        if empire_with(s, &cur, &inc, a).contains(z) {
            pb.move_to(a, z)?;
        } else {
            // Some other bot of the tensor leads towards z.
            let b = *live
                .iter()
                .find(|&&b| b != a && empire_with(s, &cur, &inc, b).contains(z))
                .ok_or_else(|| Error::Precondition("no bot of the tensor leads to the target".into()))?;
            pb.move_to(b, z)?;
            let cur = pb.current().clone();
            let inc = cur.incoming(s);
            let mut found = None;
            for &u in s.roots() {
                if u == t || s.kind(u) != Kind::Tensor {
                    continue;
                }
                let ub: Vec<NodeId> =
                    s.children(u).iter().copied().filter(|&x| !is_settled(p, &done, x)).collect();
                if ub.len() < 2 {
                    continue;
                }
                if let Some(&c) = ub.iter().find(|&&c| empire_with(s, &cur, &inc, c).contains(z)) {
                    let d = *ub.iter().find(|&&d| d != c).unwrap();
                    found = Some((c, d));
                    break;
                }
            }
            let (c, d) = found.ok_or_else(|| Error::Precondition("no second tensor for the exchange".into()))?;
            pb.move_to(c, z)?;
            let de = double_exchange(s, pb.current(), a, b, c, d)?;
            pb.append(&de)?;
        }
        // Only a may stay on z.
        let spare = live.iter().copied().find(|&b| b != a).unwrap();
        for &x in s.bots() {
            if x != a && pb.current().of(s, x) == z {
                let to = pb.current().of(s, spare);
                pb.move_to(x, to)?;
            }
        }
        done.push(a);
        if let Some(b) = left {
            pb.move_to(b, p.q)?;
            done.push(b);
        }
    }
    Ok(pb)
}

/// A bot is settled once it has been peeled or pinned.
fn is_settled(p: &Plan, done: &[NodeId], x: NodeId) -> bool {
    done.contains(&x) || p.pinned.contains(&x)
}

/// A verified rewiring path between two even-parity nets on a basic sequent.
pub fn basic_path(s: &Sequent, l1: &Linking, l2: &Linking) -> Result<RewirePath> {
    if !basic_equivalent(s, l1, l2)? {
        return Err(Error::Precondition("nets have odd parity".into()));
    }
    if l1 == l2 {
        return Ok(RewirePath::empty(l1.clone()));
    }
    let Some(p) = plan(s) else {
        return match bidirectional(s, l1, l2, 1_000_000, &|_, _| true) {
            Equivalence::Found(path) => Ok(path),
            _ => Err(Error::Precondition("no path found".into())),
        };
    };
    let r1 = route(s, l1, &p)?;
    let r2 = route(s, l2, &p)?;
    let (e1, e2) = (r1.current().clone(), r2.current().clone());
    let free_bots: Vec<usize> = p.bots.iter().map(|&b| s.bot_slot(b).unwrap()).collect();
    let allow = |slot: usize, to: NodeId| free_bots.contains(&slot) && p.ones.contains(&to);
    let mid = match bidirectional(s, &e1, &e2, 10 * BASIC_BFS_THRESHOLD.max(1), &allow) {
        Equivalence::Found(path) => path,
        _ => return Err(Error::Precondition("routes end in different classes".into())),
    };
    let mut pb = r1;
    pb.append(&mid)?;
    pb.append(&r2.finish().reversed(s))?;
    let path = pb.finish();
    debug_assert_eq!(path.end(s), *l2);
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequent::parse_sequent;

    fn net(text: &str, jumps: &[(&str, &str)]) -> (Sequent, Linking) {
        let s = parse_sequent(text).unwrap();
        let l = Linking::from_pairs(&s, jumps).unwrap();
        (s, l)
    }

    #[test]
    fn twist_and_identity() {
        let (s, id) = net("bot:a*bot:b, 1:x|1:y", &[("a", "x"), ("b", "y")]);
        let tw = Linking::from_pairs(&s, &[("a", "y"), ("b", "x")]).unwrap();
        assert!(neighbors(&s, &id).unwrap().is_empty());
        assert!(neighbors(&s, &tw).unwrap().is_empty());
        assert!(small_step_neighbors(&s, &tw).unwrap().is_empty());
        assert_eq!(parity(&s, &id, &id).unwrap(), Parity::Even);
        assert_eq!(parity(&s, &id, &tw).unwrap(), Parity::Odd);
        assert_eq!(equivalent(&s, &id, &tw, 100).unwrap(), Equivalence::Inequivalent(Reason::Parity));
        assert_eq!(enumerate_class(&s, &tw, 100).unwrap().len(), 1);
        let ids: Vec<NodeId> = ["a", "b", "a", "b"].iter().map(|n| s.id(n).unwrap()).collect();
        assert!(double_exchange(&s, &id, ids[0], ids[1], ids[2], ids[3]).is_err());
    }

    #[test]
    fn free_bot_reaches_every_one() {
        let (s, l) = net("bot:a, 1:x, bot:b * 1:y, bot:c * 1:z", &[("a", "x"), ("b", "x"), ("c", "x")]);
        let ns = neighbors(&s, &l).unwrap();
        let from_a: Vec<_> = ns.iter().filter(|(_, st)| s.name(st.bot) == "a").map(|(_, st)| s.name(st.to)).collect();
        assert_eq!(from_a, ["y", "z"]);
    }

    #[test]
    fn path_verification() {
        let (s, l) = net("bot:a, 1:x, 1:y * bot:b", &[("a", "x"), ("b", "x")]);
        let y = s.id("y").unwrap();
        let a = s.id("a").unwrap();
        let p = RewirePath { start: l.clone(), steps: vec![Step { bot: a, to: y }] };
        assert!(p.verify(&s).is_ok());
        assert_eq!(p.reversed(&s).end(&s), l);
        let bad = RewirePath { start: l.clone(), steps: vec![Step { bot: s.id("b").unwrap(), to: y }] };
        assert!(bad.verify(&s).is_err());
    }
}
