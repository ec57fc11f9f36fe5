//! Encodings into unit-only proof nets: constraint graphs as sequents,
//! configurations as nets, and 3-partition instances as provability.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::ncl::{self, Configuration, ConstraintGraph};
use crate::proofnet::{empire_with, is_net, Linking};
use crate::rewiring::{basic_path, parity, Parity, PathBuilder, RewirePath, Step};
use crate::sequent::{Formula, Kind, NodeId, Sequent};

fn range_err(msg: String) -> Error {
    Error::Precondition(msg)
}

fn ones(n: usize) -> Vec<Formula> {
    Formula::repeat(&Formula::one(), n)
}

fn bots(n: usize) -> Vec<Formula> {
    Formula::repeat(&Formula::bot(), n)
}

/// A tensor of `n` bots; a single bot stands for itself.
fn bot_block(n: usize) -> Formula {
    if n == 1 {
        Formula::bot()
    } else {
        Formula::tensor(bots(n))
    }
}

/// `⅋(1^{3k+2}) ⊗ ⅋(1^{3(n−k)+3})`.
pub fn constraint_element(k: usize, n: usize) -> Result<Formula> {
    if k < 1 || k > n {
        return Err(range_err(format!("constraint element needs 1 <= k <= n, got k={k}, n={n}")));
    }
    Ok(Formula::tensor(vec![Formula::par(ones(3 * k + 2)), Formula::par(ones(3 * (n - k) + 3))]))
}

/// `⊗(⊥^{3i+2}) ⅋ ⊗(⊥^{3(j−i)+1}) ⅋ ⊗(⊥^{3(n−j)+3})`.
pub fn weight_element(i: usize, j: usize, n: usize) -> Result<Formula> {
    if i < 1 || i > j || j > n {
        return Err(range_err(format!("weight element needs 1 <= i <= j <= n, got {i}, {j}, {n}")));
    }
    Ok(Formula::par(vec![bot_block(3 * i + 2), bot_block(3 * (j - i) + 1), bot_block(3 * (n - j) + 3)]))
}

fn named_units(kind: Kind, n: usize, prefix: &str) -> Vec<Formula> {
    (0..n).map(|b| Formula { kind, name: Some(format!("{prefix}{b}")), children: vec![] }).collect()
}

fn named_constraint(k: usize, n: usize, name: &str) -> Formula {
    let a = Formula::par(named_units(Kind::One, 3 * k + 2, &format!("{name}.A"))).named(format!("{name}.A"));
    let b = Formula::par(named_units(Kind::One, 3 * (n - k) + 3, &format!("{name}.B"))).named(format!("{name}.B"));
    Formula::tensor(vec![a, b]).named(name)
}

fn named_weight(i: usize, j: usize, n: usize, name: &str) -> Formula {
    let part = |label: &str, len: usize| {
        let prefix = format!("{name}.{label}");
        let mut us = named_units(Kind::Bot, len, &prefix);
        if len == 1 {
            us.pop().unwrap()
        } else {
            Formula::tensor(us).named(prefix)
        }
    };
    Formula::par(vec![part("X", 3 * i + 2), part("Y", 3 * (j - i) + 1), part("Z", 3 * (n - j) + 3)]).named(name)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexGadget {
    /// The outermost par, or the indicator target itself when the
    /// constraint is zero.
    pub root: NodeId,
    pub target: NodeId,
    pub constraints: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeGadget {
    /// Vertex indices of the endpoints, lower first; equal for a dangling edge.
    pub lo: usize,
    pub hi: usize,
    pub root: NodeId,
    pub indicator: NodeId,
    pub weights: Vec<NodeId>,
}

/// The sequent encoding a constraint graph, with the positions of every
/// gadget part.
#[derive(Clone, Debug)]
pub struct EncodedGraph {
    pub graph: ConstraintGraph,
    pub sequent: Sequent,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub vertices: Vec<VertexGadget>,
    pub edges: Vec<EdgeGadget>,
    pub absorbers: Vec<NodeId>,
    weight_edge: HashMap<NodeId, usize>,
    constraint_vertex: HashMap<NodeId, usize>,
    absorber_index: HashMap<NodeId, usize>,
}

impl EncodedGraph {
    /// Bots per weight element minus two: the absorbers a free one occupies.
    pub fn block(&self) -> usize {
        3 * self.n + 4
    }

    pub fn edge_of_weight(&self, w: NodeId) -> Option<usize> {
        self.weight_edge.get(&w).copied()
    }

    pub fn vertex_of_constraint(&self, c: NodeId) -> Option<usize> {
        self.constraint_vertex.get(&c).copied()
    }

    pub fn absorber_index(&self, a: NodeId) -> Option<usize> {
        self.absorber_index.get(&a).copied()
    }

    fn vertex_of_target(&self, t: NodeId) -> Option<usize> {
        self.vertices.iter().position(|v| v.target == t)
    }

    /// The constraint element holding a one, if any.
    fn constraint_of_one(&self, one: NodeId) -> Option<NodeId> {
        let c = self.sequent.parent(self.sequent.parent(one)?)?;
        self.constraint_vertex.contains_key(&c).then_some(c)
    }
}

pub fn encode_graph(g: &ConstraintGraph) -> Result<EncodedGraph> {
    g.validate()?;
    let (n, m) = (g.vertices.len(), g.edges.len());
    if m == 0 {
        return Err(Error::Precondition("graph has no edges".into()));
    }
    let (w, c) = (g.total_weight() as usize, g.total_constraint() as usize);
    if w < c {
        return Err(Error::Precondition(format!("total weight {w} is below total constraint {c}")));
    }
    let mult = 3 * m;
    let p = mult * (w - c) * (3 * n + 4);
    let mut vs = vec![];
    for (k, v) in g.vertices.iter().enumerate() {
        let name = format!("v{}", k + 1);
        let target = Formula::one().named(format!("{name}.t"));
        if v.constraint == 0 {
            vs.push(target);
            continue;
        }
        let mut kids: Vec<Formula> = (0..mult * v.constraint as usize)
            .map(|a| named_constraint(k + 1, n, &format!("{name}.c{a}")))
            .collect();
        kids.push(target);
        vs.push(Formula::par(kids).named(name));
    }
    let mut formulas = vec![if vs.len() == 1 { vs.pop().unwrap() } else { Formula::tensor(vs).named("G") }];
    let mut ends = vec![];
    for (l, e) in g.edges.iter().enumerate() {
        let (lo, hi) = (*e.ends.iter().min().unwrap(), *e.ends.iter().max().unwrap());
        ends.push((lo, hi));
        let name = format!("e{}", l + 1);
        let mut kids: Vec<Formula> = (0..mult * e.weight as usize)
            .map(|a| named_weight(lo + 1, hi + 1, n, &format!("{name}.w{a}")))
            .collect();
        kids.push(Formula::bot().named(format!("{name}.i")));
        formulas.push(Formula::tensor(kids).named(name));
    }
    formulas.extend((0..p).map(|a| Formula::one().named(format!("a{a}"))));
    let s = Sequent::new(formulas)?;

    let mut vertices = vec![];
    let mut constraint_vertex = HashMap::new();
    for (k, v) in g.vertices.iter().enumerate() {
        let target = s.id(&format!("v{}.t", k + 1))?;
        let (root, constraints) = if v.constraint == 0 {
            (target, vec![])
        } else {
            let root = s.id(&format!("v{}", k + 1))?;
            let cs: Vec<NodeId> = s.children(root).iter().copied().filter(|&x| x != target).collect();
            (root, cs)
        };
        for &c in &constraints {
            constraint_vertex.insert(c, k);
        }
        vertices.push(VertexGadget { root, target, constraints });
    }
    let mut edges = vec![];
    let mut weight_edge = HashMap::new();
    for (l, &(lo, hi)) in ends.iter().enumerate() {
        let root = s.roots()[l + 1];
        let indicator = s.id(&format!("e{}.i", l + 1))?;
        let weights: Vec<NodeId> = s.children(root).iter().copied().filter(|&x| x != indicator).collect();
        for &w in &weights {
            weight_edge.insert(w, l);
        }
        edges.push(EdgeGadget { lo, hi, root, indicator, weights });
    }
    let absorbers: Vec<NodeId> = s.roots()[m + 1..].to_vec();
    let absorber_index = absorbers.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    Ok(EncodedGraph {
        graph: g.clone(),
        sequent: s,
        n,
        m,
        p,
        vertices,
        edges,
        absorbers,
        weight_edge,
        constraint_vertex,
        absorber_index,
    })
}

/// The bots of a weight element, part by part.
fn weight_parts(s: &Sequent, w: NodeId) -> Result<Vec<Vec<NodeId>>> {
    if s.kind(w) != Kind::Par || s.children(w).len() != 3 {
        return Err(Error::Precondition(format!("`{}` is not a weight element", s.name(w))));
    }
    let mut parts = vec![];
    for &x in s.children(w) {
        let bs = match s.kind(x) {
            Kind::Bot => vec![x],
            Kind::Tensor if s.children(x).iter().all(|&b| s.kind(b) == Kind::Bot) => s.children(x).to_vec(),
            _ => return Err(Error::Precondition(format!("`{}` is not a weight element", s.name(w)))),
        };
        parts.push(bs);
    }
    Ok(parts)
}

/// The ones of a constraint element's two halves.
fn constraint_parts(s: &Sequent, c: NodeId) -> Result<(Vec<NodeId>, Vec<NodeId>)> {
    let bad = || Error::Precondition(format!("`{}` is not a constraint element", s.name(c)));
    if s.kind(c) != Kind::Tensor || s.children(c).len() != 2 {
        return Err(bad());
    }
    let half = |x: NodeId| -> Result<Vec<NodeId>> {
        if s.kind(x) != Kind::Par || s.children(x).iter().any(|&o| s.kind(o) != Kind::One) {
            return Err(bad());
        }
        Ok(s.children(x).to_vec())
    };
    Ok((half(s.children(c)[0])?, half(s.children(c)[1])?))
}

/// The three standard ways of linking a weight element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardCase {
    /// On a constraint element of the edge's lower endpoint.
    Lower,
    /// On a constraint element of the edge's upper endpoint.
    Upper,
    /// On `3n+4` weight absorbers.
    Absorbers,
}

/// The jumps of a standard linking of weight element `w` with a constraint
/// element (`with = [c]`) or with a list of absorbers.
pub fn standard_linking(
    s: &Sequent,
    case: StandardCase,
    w: NodeId,
    with: &[NodeId],
) -> Result<Vec<(NodeId, NodeId)>> {
    let parts = weight_parts(s, w)?;
    let (x, y, z) = (&parts[0], &parts[1], &parts[2]);
    let rest_bots: Vec<NodeId> = parts.iter().flat_map(|p| p[1..].iter().copied()).collect();
    let mismatch = || Error::Precondition(format!("standard linking shape mismatch for `{}`", s.name(w)));
    let mut out = vec![];
    let rest_ones = match case {
        StandardCase::Lower | StandardCase::Upper => {
            let [c] = with else { return Err(mismatch()) };
            let (a, b) = constraint_parts(s, *c)?;
            let fits = if case == StandardCase::Lower {
                x.len() == a.len() && y.len() + z.len() == b.len() + 1
            } else {
                x.len() + y.len() == a.len() + 1 && z.len() == b.len()
            };
            if !fits {
                return Err(mismatch());
            }
            let y_to = if case == StandardCase::Lower { b[0] } else { a[0] };
            out.extend([(x[0], a[0]), (y[0], y_to), (z[0], b[0])]);
            a[1..].iter().chain(&b[1..]).copied().collect::<Vec<_>>()
        }
        StandardCase::Absorbers => {
            if with.len() != rest_bots.len() + 1 || with.iter().any(|&o| o >= s.len() || s.kind(o) != Kind::One) {
                return Err(mismatch());
            }
            out.extend([(x[0], with[0]), (y[0], with[0]), (z[0], with[0])]);
            with[1..].to_vec()
        }
    };
    out.extend(rest_bots.into_iter().zip(rest_ones));
    Ok(out)
}

/// Where a weight element sits in the encoding of a configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Place {
    Constraint(NodeId),
    Block(usize),
}

/// Indicator vertex per edge and a place for every weight element.
struct Layout {
    indicator: Vec<usize>,
    place: BTreeMap<NodeId, Place>,
}

fn layout(enc: &EncodedGraph, gamma: &Configuration) -> Result<Layout> {
    let g = &enc.graph;
    if !ncl::validate_config(g, gamma) || !gamma.is_total() {
        return Err(Error::Precondition("configuration must be valid and total".into()));
    }
    let mut next_c = vec![0; enc.n];
    let mut next_block = 0;
    let mut indicator = vec![];
    let mut place = BTreeMap::new();
    for (l, e) in enc.edges.iter().enumerate() {
        let v = gamma.0[l].unwrap();
        indicator.push(v);
        for &w in &e.weights {
            if next_c[v] < enc.vertices[v].constraints.len() {
                place.insert(w, Place::Constraint(enc.vertices[v].constraints[next_c[v]]));
                next_c[v] += 1;
            } else {
                if (next_block + 1) * enc.block() > enc.p {
                    return Err(Error::Precondition("ran out of weight absorbers".into()));
                }
                place.insert(w, Place::Block(next_block));
                next_block += 1;
            }
        }
    }
    Ok(Layout { indicator, place })
}

fn case_for(e: &EdgeGadget, v: usize) -> StandardCase {
    if v == e.lo {
        StandardCase::Lower
    } else {
        StandardCase::Upper
    }
}

fn layout_jumps(enc: &EncodedGraph, lay: &Layout) -> Result<Vec<(NodeId, NodeId)>> {
    let s = &enc.sequent;
    let mut out = vec![];
    for (l, e) in enc.edges.iter().enumerate() {
        let v = lay.indicator[l];
        out.push((e.indicator, enc.vertices[v].target));
        for &w in &e.weights {
            match &lay.place[&w] {
                Place::Constraint(c) => out.extend(standard_linking(s, case_for(e, v), w, &[*c])?),
                Place::Block(b) => {
                    let bl = enc.block();
                    out.extend(standard_linking(s, StandardCase::Absorbers, w, &enc.absorbers[b * bl..(b + 1) * bl])?)
                }
            }
        }
    }
    Ok(out)
}

fn linking_from_jumps(s: &Sequent, jumps: &[(NodeId, NodeId)]) -> Linking {
    let mut t = vec![usize::MAX; s.bots().len()];
    for &(b, o) in jumps {
        t[s.bot_slot(b).unwrap()] = o;
    }
    Linking::new(t)
}

/// The net encoding a valid total configuration.
pub fn encode_config(enc: &EncodedGraph, gamma: &Configuration) -> Result<Linking> {
    let lay = layout(enc, gamma)?;
    let l = linking_from_jumps(&enc.sequent, &layout_jumps(enc, &lay)?);
    debug_assert!(l.validate(&enc.sequent).is_ok());
    Ok(l)
}

/// An encoded reconfiguration instance: the graph encoding, the start net,
/// and the end net adjusted to even parity.
#[derive(Clone, Debug)]
pub struct EncodedInstance {
    pub graph: EncodedGraph,
    pub gamma: Configuration,
    pub delta: Configuration,
    pub start: Linking,
    pub end: Linking,
    /// Whether the first two absorbers were exchanged in the end net.
    pub swapped: bool,
}

/// Exchanges every jump onto absorber `a` with every jump onto absorber `b`.
fn swap_absorbers(l: &Linking, a: NodeId, b: NodeId) -> Linking {
    let t = l.targets().iter().map(|&x| if x == a { b } else if x == b { a } else { x }).collect();
    Linking::new(t)
}

pub fn encode_instance(g: &ConstraintGraph, gamma: &Configuration, delta: &Configuration) -> Result<EncodedInstance> {
    let enc = encode_graph(g)?;
    let start = encode_config(&enc, gamma)?;
    let mut end = encode_config(&enc, delta)?;
    let s = &enc.sequent;
    let mut swapped = false;
    if parity(s, &start, &end)? == Parity::Odd {
        if enc.p < 2 {
            return Err(Error::Precondition("odd parity and fewer than two absorbers".into()));
        }
        end = swap_absorbers(&end, enc.absorbers[0], enc.absorbers[1]);
        swapped = true;
    }
    Ok(EncodedInstance { graph: enc, gamma: gamma.clone(), delta: delta.clone(), start, end, swapped })
}

/// The partial configuration read off a net: an edge points to an endpoint
/// whose gadget's empire contains the whole edge gadget.
pub fn decode(enc: &EncodedGraph, l: &Linking) -> Result<Configuration> {
    let s = &enc.sequent;
    l.validate(s)?;
    if !l.is_restricted(s) {
        return Err(Error::Precondition("decoding needs jumps onto ones only".into()));
    }
    let inc = l.incoming(s);
    let empires: Vec<_> = enc.vertices.iter().map(|v| empire_with(s, l, &inc, v.root)).collect();
    let out = enc
        .edges
        .iter()
        .map(|e| {
            [e.lo, e.hi].into_iter().find(|&v| s.subtree(e.root).all(|x| empires[v].contains(x)))
        })
        .collect();
    Ok(Configuration(out))
}

/// Where a weight element currently is.
#[derive(Clone, Debug, PartialEq, Eq)]
enum State {
    /// In the standard linking with this constraint element.
    On(NodeId),
    /// Every bot on an absorber; the absorbers hit, in sequent order.
    Free(Vec<NodeId>),
    Other,
}

fn state(enc: &EncodedGraph, l: &Linking, w: NodeId) -> Result<State> {
    let s = &enc.sequent;
    let parts = weight_parts(s, w)?;
    let all: Vec<NodeId> = parts.iter().flatten().copied().collect();
    let targets: Vec<NodeId> = all.iter().map(|&b| l.of(s, b)).collect();
    if targets.iter().all(|t| enc.absorber_index.contains_key(t)) {
        let mut hit = targets;
        hit.sort_unstable();
        hit.dedup();
        return Ok(State::Free(hit));
    }
    let e = &enc.edges[enc.weight_edge[&w]];
    let Some(c) = enc.constraint_of_one(l.of(s, parts[0][0])) else {
        return Ok(State::Other);
    };
    let v = enc.constraint_vertex[&c];
    if v != e.lo && v != e.hi {
        return Ok(State::Other);
    }
    let std = standard_linking(s, case_for(e, v), w, &[c])?;
    Ok(if std.iter().all(|&(b, o)| l.of(s, b) == o) { State::On(c) } else { State::Other })
}

/// Checks the indicator sits on an endpoint's target and each weight element
/// is free or standard on a constraint element of that endpoint.
fn check_well_linked(enc: &EncodedGraph, l: &Linking, edge: usize) -> Result<usize> {
    let s = &enc.sequent;
    let e = &enc.edges[edge];
    let v = enc
        .vertex_of_target(l.of(s, e.indicator))
        .filter(|&v| v == e.lo || v == e.hi)
        .ok_or_else(|| Error::Precondition(format!("indicator of `{}` is not on an endpoint", s.name(e.root))))?;
    for &w in &e.weights {
        match state(enc, l, w)? {
            State::On(c) if enc.constraint_vertex[&c] == v => {}
            State::Free(hit) if hit.len() == enc.block() => {}
            _ => {
                return Err(Error::Precondition(format!(
                    "`{}` is neither free nor standard on its vertex",
                    s.name(w)
                )))
            }
        }
    }
    Ok(v)
}

/// The roots of a sub-sequent with root pars replaced by their children.
fn flatten(s: &Sequent, roots: &[NodeId]) -> Vec<NodeId> {
    let mut out = vec![];
    let mut stack: Vec<NodeId> = roots.iter().rev().copied().collect();
    while let Some(r) = stack.pop() {
        if s.kind(r) == Kind::Par {
            stack.extend(s.children(r).iter().rev());
        } else {
            out.push(r);
        }
    }
    out
}

/// A flattened sub-sequent as a sequent of its own.
struct Flat {
    d: Sequent,
    to_s: Vec<NodeId>,
}

impl Flat {
    fn new(s: &Sequent, roots: &[NodeId]) -> Flat {
        let flat = flatten(s, roots);
        let d = s.restrict(&flat);
        let to_s = (0..d.len()).map(|x| s.lookup(d.name(x)).unwrap()).collect();
        Flat { d, to_s }
    }

    /// The jumps of `l` inside the sub-sequent; they must stay inside it.
    fn linking(&self, s: &Sequent, l: &Linking) -> Result<Linking> {
        let mut t = vec![];
        for &b in self.d.bots() {
            let to = l.of(s, self.to_s[b]);
            let local = self
                .d
                .lookup(s.name(to))
                .ok_or_else(|| Error::Precondition(format!("jump from `{}` leaves the sub-sequent", self.d.name(b))))?;
            t.push(local);
        }
        Ok(Linking::new(t))
    }
}

fn with_jumps(s: &Sequent, l: &Linking, jumps: &[(NodeId, NodeId)]) -> Linking {
    let mut out = l.clone();
    for &(b, o) in jumps {
        out.set(s.bot_slot(b).unwrap(), o);
    }
    out
}

fn sub_parity(s: &Sequent, roots: &[NodeId], l: &Linking, jumps: &[(NodeId, NodeId)]) -> Result<Parity> {
    let f = Flat::new(s, roots);
    parity(&f.d, &f.linking(s, l)?, &f.linking(s, &with_jumps(s, l, jumps))?)
}

/// Rewires the closed subnet on `roots` to carry `jumps`, leaving the rest of
/// the net alone. The flattened sub-sequent must be basic.
fn relink(pb: &mut PathBuilder<'_>, roots: &[NodeId], jumps: &[(NodeId, NodeId)]) -> Result<()> {
    let s = pb.sequent();
    let f = Flat::new(s, roots);
    let from = f.linking(s, pb.current())?;
    let to = f.linking(s, &with_jumps(s, pb.current(), jumps))?;
    if from == to {
        return Ok(());
    }
    let path = basic_path(&f.d, &from, &to)?;
    for st in path.steps {
        pb.move_to(f.to_s[st.bot], f.to_s[st.to])?;
    }
    Ok(())
}

/// Applies the moves in some order that keeps every intermediate net correct.
fn move_all(pb: &mut PathBuilder<'_>, moves: &[(NodeId, NodeId)]) -> Result<()> {
    let mut pending = moves.to_vec();
    while !pending.is_empty() {
        let before = pending.len();
        pending.retain(|&(b, o)| pb.move_to(b, o).is_err());
        if pending.len() == before {
            let (b, o) = pending[0];
            return pb.move_to(b, o);
        }
    }
    Ok(())
}

fn part_nodes(s: &Sequent, w: NodeId, which: &[usize]) -> Vec<NodeId> {
    which.iter().map(|&i| s.children(w)[i]).collect()
}

/// Parts of a weight element facing the two halves of a constraint element.
fn halves(case: StandardCase) -> (&'static [usize], &'static [usize]) {
    match case {
        StandardCase::Lower => (&[0], &[1, 2]),
        _ => (&[0, 1], &[2]),
    }
}

/// Jumps placing `own` bots part by part: part firsts share `pool[0]`, and
/// the rest take the following ones in order, except `spare` which goes to
/// `spare_to`. Swaps two targets when `flip` is set.
fn spread(
    parts: &[Vec<NodeId>],
    pool: &[NodeId],
    spare: NodeId,
    spare_to: NodeId,
    flip: bool,
) -> Vec<(NodeId, NodeId)> {
    let mut out: Vec<(NodeId, NodeId)> = parts.iter().map(|p| (p[0], pool[0])).collect();
    let rest: Vec<NodeId> = parts.iter().flat_map(|p| p[1..].iter().copied()).filter(|&b| b != spare).collect();
    let first_rest = out.len();
    out.extend(rest.into_iter().zip(pool[1..].iter().copied()));
    if flip {
        let (i, j) = (first_rest, first_rest + 1);
        let t = out[i].1;
        out[i].1 = out[j].1;
        out[j].1 = t;
    }
    out.push((spare, spare_to));
    out
}

/// Moves `wj`, free on absorbers, onto the constraint element of `wi`, which
/// ends up free on those absorbers. Both must belong to edge gadgets that
/// are well linked to the same vertex.
fn exchange(enc: &EncodedGraph, pb: &mut PathBuilder<'_>, wi: NodeId, wj: NodeId) -> Result<()> {
    let s = enc.sequent.clone();
    let s = &s;
    if wi == wj {
        return Err(Error::Precondition("cannot exchange a weight element with itself".into()));
    }
    let not_weight = |w: NodeId| Error::Precondition(format!("`{}` is not a weight element", s.name(w)));
    let ei = enc.edge_of_weight(wi).ok_or_else(|| not_weight(wi))?;
    let ej = enc.edge_of_weight(wj).ok_or_else(|| not_weight(wj))?;
    let v = check_well_linked(enc, pb.current(), ei)?;
    if check_well_linked(enc, pb.current(), ej)? != v {
        return Err(Error::Precondition("the two edge gadgets point to different vertices".into()));
    }
    let State::On(c) = state(enc, pb.current(), wi)? else {
        return Err(Error::Precondition(format!("`{}` is not on a constraint element", s.name(wi))));
    };
    let State::Free(hit) = state(enc, pb.current(), wj)? else {
        return Err(Error::Precondition(format!("`{}` is not free", s.name(wj))));
    };
    let case_i = case_for(&enc.edges[ei], v);
    let case_j = case_for(&enc.edges[ej], v);
    let (a, b) = constraint_parts(s, c)?;
    let i = enc.edges[ei].indicator;
    let t_v = enc.vertices[v].target;

    // Put wj in a standard linking on its absorbers, ordered for even parity.
    let mut order = hit.clone();
    let roots: Vec<NodeId> = std::iter::once(wj).chain(hit.iter().copied()).collect();
    let mut jumps = standard_linking(s, StandardCase::Absorbers, wj, &order)?;
    if sub_parity(s, &roots, pb.current(), &jumps)? == Parity::Odd {
        let k = order.len();
        order.swap(k - 2, k - 1);
        jumps = standard_linking(s, StandardCase::Absorbers, wj, &order)?;
    }
    relink(pb, &roots, &jumps)?;
    let s0 = order[0];

    // Hang the indicator of wi's edge on wj's block, then move the first
    // bot of each part of wj onto the constraint element.
    pb.move_to(i, s0)?;
    let pj = weight_parts(s, wj)?;
    let pi = weight_parts(s, wi)?;
    let (uj, vj) = halves(case_j);
    let (ui, vi) = halves(case_i);
    let firsts: Vec<(NodeId, NodeId)> =
        uj.iter().map(|&x| (pj[x][0], a[0])).chain(vj.iter().map(|&x| (pj[x][0], b[0]))).collect();
    move_all(pb, &firsts)?;

    // The jumps now split into two subnets, one around each half.
    let targets_of = |pb: &PathBuilder<'_>, parts: &[usize]| -> Vec<NodeId> {
        let mut t: Vec<NodeId> =
            parts.iter().flat_map(|&x| pj[x][1..].iter().map(|&y| pb.current().of(s, y))).collect();
        t.sort_unstable();
        t.dedup();
        t
    };
    let m_abs = targets_of(pb, uj);
    let k_abs = targets_of(pb, vj);
    let sub = |own: &[usize], half: NodeId, other: &[usize], pool: &[NodeId]| -> Vec<NodeId> {
        part_nodes(s, wi, own)
            .into_iter()
            .chain([half])
            .chain(part_nodes(s, wj, other))
            .chain(pool.iter().copied())
            .collect()
    };
    let (half_a, half_b) = (s.children(c)[0], s.children(c)[1]);
    let roots1 = sub(ui, half_a, uj, &m_abs);
    let roots2 = sub(vi, half_b, vj, &k_abs);

    // Around A: wj's parts take A in order with two jumps crossed; wi's
    // parts move to the absorbers except one bot that stays on A.
    let uj_rest: Vec<NodeId> = uj.iter().flat_map(|&x| pj[x][1..].iter().copied()).collect();
    let (p1, p2) = (uj_rest[0], uj_rest[1]);
    let mut on_a: Vec<(NodeId, NodeId)> = uj_rest.iter().copied().zip(a[1..].iter().copied()).collect();
    on_a[0].1 = a[2];
    on_a[1].1 = a[1];
    let ui_parts: Vec<Vec<NodeId>> = ui.iter().map(|&x| pi[x].clone()).collect();
    let y_star = *ui_parts.last().unwrap().last().unwrap();
    let mut jumps1 = on_a.clone();
    jumps1.extend(spread(&ui_parts, &m_abs, y_star, a[1], false));
    if sub_parity(s, &roots1, pb.current(), &jumps1)? == Parity::Odd {
        jumps1 = on_a;
        jumps1.extend(spread(&ui_parts, &m_abs, y_star, a[1], true));
    }
    relink(pb, &roots1, &jumps1)?;

    // Around B: wj's parts take B in order; wi keeps one bot on B.
    let vj_rest: Vec<NodeId> = vj.iter().flat_map(|&x| pj[x][1..].iter().copied()).collect();
    let on_b: Vec<(NodeId, NodeId)> = vj_rest.iter().copied().zip(b[1..].iter().copied()).collect();
    let vi_parts: Vec<Vec<NodeId>> = vi.iter().map(|&x| pi[x].clone()).collect();
    let z_star = *vi_parts.last().unwrap().last().unwrap();
    let mut jumps2 = on_b.clone();
    jumps2.extend(spread(&vi_parts, &k_abs, z_star, b[1], false));
    if sub_parity(s, &roots2, pb.current(), &jumps2)? == Parity::Odd {
        jumps2 = on_b;
        jumps2.extend(spread(&vi_parts, &k_abs, z_star, b[1], true));
    }
    relink(pb, &roots2, &jumps2)?;

    // Detach wi from B, trade its last hold on A for the indicator while
    // uncrossing wj's two jumps, and return the indicator home. The path
    // s0 <- i ~ y* -> a1 <- p2 ~ p1 -> a2 runs through every switching.
    pb.move_to(z_star, m_abs[0])?;
    let de = crate::rewiring::double_exchange(s, pb.current(), i, y_star, p2, p1)?;
    pb.append(&de)?;
    pb.move_to(i, t_v)?;

    debug_assert_eq!(state(enc, pb.current(), wj)?, State::On(c));
    if !matches!(state(enc, pb.current(), wi)?, State::Free(_)) {
        return Err(Error::Precondition("exchange left the outgoing element attached".into()));
    }
    Ok(())
}

/// A verified path exchanging a weight element on a constraint element with
/// a free one; see [`EncodedGraph`] for names.
pub fn exchange_weight_element(enc: &EncodedGraph, l: &Linking, wi: &str, wj: &str) -> Result<RewirePath> {
    let s = &enc.sequent;
    let (wi, wj) = (s.id(wi)?, s.id(wj)?);
    if !is_net(s, l) {
        return Err(Error::Precondition("not a proof net".into()));
    }
    let mut pb = PathBuilder::new(s, l.clone());
    exchange(enc, &mut pb, wi, wj)?;
    Ok(pb.finish())
}

fn free_roots(enc: &EncodedGraph, l: &Linking) -> Result<Vec<NodeId>> {
    let mut roots = vec![];
    for e in &enc.edges {
        for &w in &e.weights {
            if let State::Free(_) = state(enc, l, w)? {
                roots.push(w);
            }
        }
    }
    Ok(roots)
}

/// The absorbers the bots of free weight element `w` jump to.
fn box_of(enc: &EncodedGraph, l: &Linking, w: NodeId) -> Result<Vec<NodeId>> {
    match state(enc, l, w)? {
        State::Free(hit) => Ok(hit),
        _ => Err(Error::Precondition(format!("`{}` is not free", enc.sequent.name(w)))),
    }
}

fn bots_of(s: &Sequent, w: NodeId) -> Vec<NodeId> {
    s.subtree(w).filter(|&x| s.kind(x) == Kind::Bot).collect()
}

/// Relinks the box of `w` to a standard linking whose shared absorber is not
/// in `avoid`, so every absorber in `avoid` ends up with a single jump.
fn normalize_box(enc: &EncodedGraph, pb: &mut PathBuilder<'_>, w: NodeId, avoid: &[NodeId]) -> Result<()> {
    let s = &enc.sequent;
    let hit = box_of(enc, pb.current(), w)?;
    let single = |a: NodeId| bots_of(s, w).iter().filter(|&&b| pb.current().of(s, b) == a).count() == 1;
    if avoid.iter().all(|&a| hit.binary_search(&a).is_err() || single(a)) {
        return Ok(());
    }
    let mut with: Vec<NodeId> = hit.iter().copied().filter(|a| !avoid.contains(a)).collect();
    with.extend(hit.iter().copied().filter(|a| avoid.contains(a)));
    let mut roots = vec![w];
    roots.extend(&hit);
    let mut jumps = standard_linking(s, StandardCase::Absorbers, w, &with)?;
    if sub_parity(s, &roots, pb.current(), &jumps)? == Parity::Odd {
        // Swap two trailing single jumps; the shared absorber stays put.
        let k = jumps.len();
        let (x, y) = (jumps[k - 1].1, jumps[k - 2].1);
        jumps[k - 1].1 = y;
        jumps[k - 2].1 = x;
    }
    relink(pb, &roots, &jumps)
}

type Helpers = (Vec<NodeId>, Vec<(NodeId, NodeId)>);

/// Indicators of free edge gadgets, and per edge gadget two bots of a free
/// weight element clear of `away` that each hold a single absorber.
fn helpers(enc: &EncodedGraph, l: &Linking, away: &[NodeId]) -> Result<Helpers> {
    let s = &enc.sequent;
    let (mut indicators, mut pairs) = (vec![], vec![]);
    for e in &enc.edges {
        let before = pairs.len();
        let mut free = true;
        for &w in &e.weights {
            let State::Free(hit) = state(enc, l, w)? else {
                free = false;
                continue;
            };
            if away.iter().any(|a| hit.binary_search(a).is_ok()) {
                continue;
            }
            let bots = bots_of(s, w);
            let single: Vec<NodeId> = bots
                .iter()
                .copied()
                .filter(|&b| bots.iter().filter(|&&c| l.of(s, c) == l.of(s, b)).count() == 1)
                .collect();
            if let [h1, h2, ..] = single[..] {
                if pairs.len() == before {
                    pairs.push((h1, h2));
                }
            }
        }
        if free {
            indicators.push(e.indicator);
        }
    }
    Ok((indicators, pairs))
}

/// Exchanges the single jumps onto absorbers `a` and `b`, at the cost of
/// exchanging two jumps inside a free weight element, using the indicator of
/// a free edge gadget as a temporary bridge.
fn swap_via_helper(enc: &EncodedGraph, pb: &mut PathBuilder<'_>, a: NodeId, b: NodeId) -> Result<()> {
    let s = &enc.sequent;
    let l = pb.current().clone();
    let jumper = |x: NodeId| -> Result<NodeId> {
        let mut it = s.bots().iter().copied().filter(|&b| l.of(s, b) == x);
        match (it.next(), it.next()) {
            (Some(j), None) => Ok(j),
            _ => Err(Error::Precondition(format!("absorber `{}` is not held by a single jump", s.name(x)))),
        }
    };
    let (ja, jb) = (jumper(a)?, jumper(b)?);
    let (indicators, pairs) = helpers(enc, &l, &[a, b])?;
    if indicators.is_empty() {
        return Err(Error::Precondition("no free edge gadget".into()));
    }
    for &(h1, h2) in &pairs {
        for &e0 in &indicators {
            let (t1, t2) = (l.of(s, h1), l.of(s, h2));
            let mut goal = l.clone();
            for (bot, to) in [(ja, b), (jb, a), (h1, t2), (h2, t1)] {
                goal.set(s.bot_slot(bot).unwrap(), to);
            }
            if let Some(path) = local_path(s, &l, &goal, &[ja, jb, h1, h2, e0], &[a, b, t1, t2, l.of(s, e0)], 1 << 16) {
                return pb.append(&path);
            }
        }
    }
    Err(Error::Precondition(format!("could not exchange `{}` and `{}`", s.name(a), s.name(b))))
}

/// Rearranges the jumps of free weight elements onto absorbers to match
/// `target`, which must agree with the current net on every other jump.
fn settle_absorbers(enc: &EncodedGraph, pb: &mut PathBuilder<'_>, target: &Linking) -> Result<()> {
    let s = &enc.sequent;
    let free = free_roots(enc, pb.current())?;
    let wanted = |w: NodeId| -> Vec<NodeId> {
        let mut v: Vec<NodeId> = bots_of(s, w).iter().map(|&b| target.of(s, b)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let holder = |l: &Linking, a: NodeId| -> Result<NodeId> {
        for &w in &free {
            if box_of(enc, l, w)?.binary_search(&a).is_ok() {
                return Ok(w);
            }
        }
        Err(Error::Precondition(format!("absorber `{}` is not held by a free weight element", s.name(a))))
    };
    // Move absorbers between boxes until each box holds what it should.
    for &w in &free {
        let want = wanted(w);
        loop {
            let have = box_of(enc, pb.current(), w)?;
            let Some(&a) = have.iter().find(|a| want.binary_search(a).is_err()) else { break };
            let b = *want.iter().find(|b| have.binary_search(b).is_err()).unwrap();
            let w2 = holder(pb.current(), b)?;
            normalize_box(enc, pb, w, &[a])?;
            normalize_box(enc, pb, w2, &[b])?;
            swap_via_helper(enc, pb, a, b)?;
        }
    }
    // Boxes left at odd parity are fixed in pairs through a helper.
    let box_parity = |l: &Linking, w: NodeId| -> Result<Parity> {
        let mut roots = vec![w];
        roots.extend(box_of(enc, l, w)?);
        let jumps: Vec<(NodeId, NodeId)> = bots_of(s, w).into_iter().map(|b| (b, target.of(s, b))).collect();
        sub_parity(s, &roots, l, &jumps)
    };
    for &w in &free {
        if box_parity(pb.current(), w)? == Parity::Even {
            continue;
        }
        let have = box_of(enc, pb.current(), w)?;
        if helpers(enc, pb.current(), &have)?.1.is_empty() {
            continue;
        }
        let (a, b) = (have[have.len() - 1], have[have.len() - 2]);
        normalize_box(enc, pb, w, &[a, b])?;
        swap_via_helper(enc, pb, a, b)?;
    }
    for &w in &free {
        let mut roots = vec![w];
        roots.extend(box_of(enc, pb.current(), w)?);
        let jumps: Vec<(NodeId, NodeId)> = bots_of(s, w).into_iter().map(|b| (b, target.of(s, b))).collect();
        if box_parity(pb.current(), w)? == Parity::Odd {
            return Err(Error::Precondition(format!("absorbers of `{}` are at odd parity", s.name(w))));
        }
        relink(pb, &roots, &jumps)?;
    }
    Ok(())
}

/// A verified path to the net with absorber `a` renamed to `perm[a]`.
pub fn permute_absorbers(enc: &EncodedGraph, l: &Linking, perm: &[usize]) -> Result<RewirePath> {
    let s = &enc.sequent;
    if perm.len() != enc.p {
        return Err(Error::Precondition(format!("permutation has {} entries, expected {}", perm.len(), enc.p)));
    }
    let mut seen = vec![false; enc.p];
    for &x in perm {
        if x >= enc.p || std::mem::replace(&mut seen[x], true) {
            return Err(Error::Precondition("not a permutation".into()));
        }
    }
    let mut cycles_even = 0;
    let mut visited = vec![false; enc.p];
    for start in 0..enc.p {
        let mut len = 0;
        let mut x = start;
        while !visited[x] {
            visited[x] = true;
            x = perm[x];
            len += 1;
        }
        if len > 0 && len % 2 == 0 {
            cycles_even += 1;
        }
    }
    if cycles_even % 2 == 1 {
        return Err(Error::Precondition("absorber permutation is odd".into()));
    }
    if !is_net(s, l) {
        return Err(Error::Precondition("not a proof net".into()));
    }
    for e in 0..enc.m {
        check_well_linked(enc, l, e)?;
    }
    if helpers(enc, l, &[])?.0.is_empty() {
        return Err(Error::Precondition("no free edge gadget".into()));
    }
    let target: Vec<NodeId> = l
        .targets()
        .iter()
        .map(|&t| enc.absorber_index(t).map_or(t, |a| enc.absorbers[perm[a]]))
        .collect();
    let target = Linking::new(target);
    let mut pb = PathBuilder::new(s, l.clone());
    settle_absorbers(enc, &mut pb, &target)?;
    let path = pb.finish();
    debug_assert_eq!(path.end(s), target);
    Ok(path)
}

/// The weight element `want` puts on constraint element `c`.
fn wanted_on(want: &Layout, c: NodeId) -> Result<NodeId> {
    want.place
        .iter()
        .find(|(_, p)| **p == Place::Constraint(c))
        .map(|(w, _)| *w)
        .ok_or_else(|| Error::Precondition("constraint element left empty".into()))
}

/// Whether `w` is free and its edge points at `v`.
fn free_at(enc: &EncodedGraph, l: &Linking, v: usize, w: NodeId) -> Result<bool> {
    let s = &enc.sequent;
    let e = &enc.edges[enc.weight_edge[&w]];
    Ok(l.of(s, e.indicator) == enc.vertices[v].target && matches!(state(enc, l, w)?, State::Free(_)))
}

/// Frees every weight element of `edge` held at `v` by trading in free
/// elements of other edges, preferring those `fin` puts there.
fn release_edge(enc: &EncodedGraph, pb: &mut PathBuilder<'_>, v: usize, edge: usize, fin: &Layout) -> Result<()> {
    for &c in &enc.vertices[v].constraints {
        let holder = holder_of(enc, pb.current(), c)?;
        if enc.weight_edge[&holder] != edge {
            continue;
        }
        let wanted = wanted_on(fin, c).ok().filter(|w| enc.weight_edge[w] != edge);
        let spare = match wanted {
            Some(w) if free_at(enc, pb.current(), v, w)? => w,
            _ => spare_at(enc, pb.current(), v, fin, edge)?,
        };
        exchange(enc, pb, holder, spare)?;
    }
    Ok(())
}

/// Makes the constraint elements of vertex `v` carry the weight elements
/// they carry in `fin`.
///
/// The indicator used during an exchange would close a cycle within one
/// edge gadget, so two elements of the same edge trade through a spare from
/// another edge.
fn align_vertex(enc: &EncodedGraph, pb: &mut PathBuilder<'_>, v: usize, fin: &Layout) -> Result<()> {
    let s = &enc.sequent;
    let cs = &enc.vertices[v].constraints;
    for _ in 0..4 * cs.len() + 1 {
        let mut wrong = vec![];
        for &c in cs {
            let (h, w) = (holder_of(enc, pb.current(), c)?, wanted_on(fin, c)?);
            if h != w {
                wrong.push((c, h, w));
            }
        }
        if wrong.is_empty() {
            return Ok(());
        }
        let direct = wrong.iter().find(|&&(_, h, w)| {
            enc.weight_edge[&h] != enc.weight_edge[&w] && free_at(enc, pb.current(), v, w).unwrap_or(false)
        });
        if let Some(&(_, h, w)) = direct {
            exchange(enc, pb, h, w)?;
            continue;
        }
        let (_, h, w) = wrong[0];
        if free_at(enc, pb.current(), v, w)? {
            let spare = spare_at(enc, pb.current(), v, fin, enc.weight_edge[&h])?;
            exchange(enc, pb, h, spare)?;
        } else if matches!(state(enc, pb.current(), w)?, State::On(_)) {
            let spare = spare_at(enc, pb.current(), v, fin, enc.weight_edge[&w])?;
            exchange(enc, pb, w, spare)?;
        } else {
            return Err(Error::Precondition(format!("`{}` is not well linked", s.name(w))));
        }
    }
    Err(Error::Precondition("constraint elements did not settle".into()))
}

/// The weight element standard on constraint element `c`.
fn holder_of(enc: &EncodedGraph, l: &Linking, c: NodeId) -> Result<NodeId> {
    let s = &enc.sequent;
    let (a, _) = constraint_parts(s, c)?;
    for (slot, &t) in l.targets().iter().enumerate() {
        if t == a[0] {
            let b = s.bots()[slot];
            if let Some(w) = s.parent(b).and_then(|p| s.parent(p)).filter(|w| enc.weight_edge.contains_key(w)) {
                if state(enc, l, w)? == State::On(c) {
                    return Ok(w);
                }
            }
        }
    }
    Err(Error::Precondition(format!("no weight element on `{}`", s.name(c))))
}

/// A free weight element of an edge other than `avoid` pointing at `v`,
/// preferring ones that stay free in `want`.
fn spare_at(enc: &EncodedGraph, l: &Linking, v: usize, want: &Layout, avoid: usize) -> Result<NodeId> {
    let s = &enc.sequent;
    let mut fallback = None;
    for (k, e) in enc.edges.iter().enumerate() {
        if k == avoid || l.of(s, e.indicator) != enc.vertices[v].target {
            continue;
        }
        for &w in &e.weights {
            if matches!(state(enc, l, w)?, State::Free(_)) {
                if matches!(want.place[&w], Place::Block(_)) {
                    return Ok(w);
                }
                fallback.get_or_insert(w);
            }
        }
    }
    fallback.ok_or_else(|| Error::Precondition("no spare weight element from another edge at the vertex".into()))
}

/// A verified rewiring path from the encoding of the first configuration to
/// the parity-adjusted encoding of the last, following a reconfiguration
/// sequence over total configurations.
pub fn compile_reconfiguration(inst: &EncodedInstance, path: &[Configuration]) -> Result<RewirePath> {
    let enc = &inst.graph;
    let s = &enc.sequent;
    let g = &enc.graph;
    ncl::check_path(g, path)?;
    if path.first() != Some(&inst.gamma) || path.last() != Some(&inst.delta) {
        return Err(Error::Precondition("path must run from the start to the end configuration".into()));
    }
    if path.iter().any(|c| !c.is_total()) {
        return Err(Error::Precondition("path must use total configurations".into()));
    }
    let fin = layout(enc, &inst.delta)?;
    let mut pb = PathBuilder::new(s, inst.start.clone());
    for w in path.windows(2) {
        let e = (0..enc.m).find(|&e| w[0].0[e] != w[1].0[e]).unwrap();
        let (from, to) = (w[0].0[e].unwrap(), w[1].0[e].unwrap());
        release_edge(enc, &mut pb, from, e, &fin)?;
        pb.move_to(enc.edges[e].indicator, enc.vertices[to].target)?;
    }
    for v in 0..enc.n {
        align_vertex(enc, &mut pb, v, &fin)?;
    }
    settle_absorbers(enc, &mut pb, &inst.end)?;
    let out = pb.finish();
    if out.end(s) != inst.end {
        return Err(Error::Precondition("compiled path misses the end net".into()));
    }
    Ok(out)
}

/// A tensor of `i+1` bots per value and a tensor of `n` copies of
/// `⅋(1^{k+1})`, where `n·k` is the sum of the values.
pub fn encode_3partition(values: &[u64], k: u64) -> Result<Sequent> {
    let sum: u64 = values.iter().sum();
    if values.is_empty() || k == 0 || !sum.is_multiple_of(k) || sum == 0 {
        return Err(Error::Precondition(format!("values must sum to a positive multiple of {k}")));
    }
    let n = (sum / k) as usize;
    let mut fs: Vec<Formula> = values
        .iter()
        .enumerate()
        .map(|(t, &i)| {
            let us = named_units(Kind::Bot, i as usize + 1, &format!("i{t}."));
            if us.len() == 1 {
                us.into_iter().next().unwrap()
            } else {
                Formula::tensor(us).named(format!("i{t}"))
            }
        })
        .collect();
    let blocks: Vec<Formula> =
        (0..n).map(|r| Formula::par(named_units(Kind::One, k as usize + 1, &format!("K{r}."))).named(format!("K{r}"))).collect();
    fs.push(if n == 1 { blocks.into_iter().next().unwrap() } else { Formula::tensor(blocks).named("K") });
    Sequent::new(fs)
}

/// Disjoint sets that can be rolled back to an earlier state.
struct Undo {
    parent: Vec<usize>,
    rank: Vec<u8>,
    log: Vec<(usize, usize, u8)>,
}

impl Undo {
    fn new(n: usize) -> Self {
        Undo { parent: (0..n).collect(), rank: vec![0; n], log: vec![] }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.log.push((b, a, self.rank[a]));
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
        true
    }

    fn rollback(&mut self, to: usize) {
        while self.log.len() > to {
            let (b, a, r) = self.log.pop().unwrap();
            self.parent[b] = b;
            self.rank[a] = r;
        }
    }
}

struct Search<'a> {
    s: &'a Sequent,
    targets: Vec<NodeId>,
    hits: Vec<usize>,
    /// Equal for nodes with the same formula shape, names aside.
    shape: Vec<usize>,
    /// Ones that must receive a jump: roots and children of pars, which some
    /// switching leaves attached to nothing else.
    needy: Vec<bool>,
    /// Needy ones still without a jump.
    uncovered: usize,
    pars: Vec<NodeId>,
    uf: Undo,
    visited: usize,
    budget: usize,
}

fn shapes(s: &Sequent) -> Vec<usize> {
    let mut ids: HashMap<(Kind, Vec<usize>), usize> = HashMap::new();
    let mut out = vec![0; s.len()];
    for v in (0..s.len()).rev() {
        let key = (s.kind(v), s.children(v).iter().map(|&c| out[c]).collect());
        let next = ids.len();
        out[v] = *ids.entry(key).or_insert(next);
    }
    out
}

impl Search<'_> {
    /// No jump lands in the subtree of `v` and none of its bots is assigned
    /// yet or about to be (slot `slot`).
    fn untouched(&self, v: NodeId, slot: usize) -> bool {
        self.s.subtree(v).all(|x| self.hits[x] == 0 && self.s.bot_slot(x).is_none_or(|k| k > slot))
    }

    /// Whether jumping onto `one` mirrors an earlier choice: some subtree
    /// around `one` is untouched and has an untouched earlier sibling of the
    /// same shape, and swapping the two fixes everything assigned so far.
    fn redundant(&self, one: NodeId, slot: usize) -> bool {
        let s = self.s;
        let mut v = one;
        while self.untouched(v, slot) {
            let siblings = match s.parent(v) {
                Some(p) => s.children(p),
                None => s.roots(),
            };
            let mirrored = siblings
                .iter()
                .take_while(|&&x| x != v)
                .any(|&x| self.shape[x] == self.shape[v] && self.untouched(x, slot));
            if mirrored {
                return true;
            }
            match s.parent(v) {
                Some(p) => v = p,
                None => break,
            }
        }
        false
    }

    fn hit(&mut self, o: NodeId, add: bool) {
        if add {
            self.hits[o] += 1;
        } else {
            self.hits[o] -= 1;
        }
        if self.needy[o] && self.hits[o] == usize::from(add) {
            if add {
                self.uncovered -= 1;
            } else {
                self.uncovered += 1;
            }
        }
    }

    /// Whether some switching already has a cycle. Components are those of
    /// tensor links and jumps; a par reaching its own component, or two pars
    /// joining the same pair of components, closes a cycle. Pars with all
    /// children in one component are contracted first.
    fn doomed(&mut self) -> bool {
        let s = self.s;
        let mark = self.uf.log.len();
        let mut merged = vec![false; self.pars.len()];
        let mut found = false;
        'outer: loop {
            let mut changed = false;
            let mut joins: HashMap<(usize, usize), usize> = HashMap::new();
            for (i, &p) in self.pars.iter().enumerate() {
                if merged[i] {
                    continue;
                }
                let cp = self.uf.find(p);
                let mut comps: Vec<usize> = s.children(p).iter().map(|&c| self.uf.find(c)).collect();
                comps.sort_unstable();
                comps.dedup();
                if comps.contains(&cp) {
                    found = true;
                    break 'outer;
                }
                if comps.len() == 1 {
                    self.uf.union(p, comps[0]);
                    merged[i] = true;
                    changed = true;
                    continue;
                }
                for x in comps {
                    if joins.insert((cp.min(x), cp.max(x)), i).is_some_and(|j| j != i) {
                        found = true;
                        break 'outer;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        self.uf.rollback(mark);
        found
    }

    fn go(&mut self, slot: usize) -> Result<bool> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::Budget(self.budget));
        }
        let s = self.s;
        if slot == s.bots().len() {
            return Ok(is_net(s, &Linking::new(self.targets.clone())));
        }
        if self.uncovered > s.bots().len() - slot {
            return Ok(false);
        }
        let b = s.bots()[slot];
        // Sibling bots can trade jumps, so their targets may be taken in order.
        let floor = match slot.checked_sub(1).map(|k| s.bots()[k]) {
            Some(prev) if s.parent(prev).is_some() && s.parent(prev) == s.parent(b) => self.targets[slot - 1],
            _ => 0,
        };
        for &o in s.ones() {
            if o < floor || self.redundant(o, slot) {
                continue;
            }
            let mark = self.uf.log.len();
            if !self.uf.union(b, o) {
                continue;
            }
            self.targets[slot] = o;
            self.hit(o, true);
            if !self.doomed() && self.go(slot + 1)? {
                return Ok(true);
            }
            self.hit(o, false);
            self.uf.rollback(mark);
        }
        Ok(false)
    }
}

/// Backtracking search for a correct linking onto ones, assigning bots in
/// sequent order, pruning any jump that closes a cycle through tensors and
/// skipping choices that mirror an earlier one under a symmetry of the
/// sequent.
/// `None` is definitive; running out of budget is an error.
pub fn find_proof_net(s: &Sequent, budget: usize) -> Result<Option<Linking>> {
    if s.balance() != 0 || (s.ones().is_empty() && !s.bots().is_empty()) {
        return Ok(None);
    }
    let mut uf = Undo::new(s.len());
    for x in 0..s.len() {
        if s.kind(x) == Kind::Tensor {
            for &c in s.children(x) {
                uf.union(x, c);
            }
        }
    }
    let needy: Vec<bool> = (0..s.len())
        .map(|v| s.kind(v) == Kind::One && s.len() > 1 && s.parent(v).is_none_or(|p| s.kind(p) == Kind::Par))
        .collect();
    let mut search = Search {
        s,
        targets: vec![usize::MAX; s.bots().len()],
        hits: vec![0; s.len()],
        shape: shapes(s),
        uncovered: needy.iter().filter(|&&x| x).count(),
        needy,
        pars: (0..s.len()).filter(|&v| s.kind(v) == Kind::Par).collect(),
        uf,
        visited: 0,
        budget,
    };
    let found = search.go(0)?;
    Ok(found.then(|| Linking::new(search.targets)))
}

/// Groups the values of a 3-partition encoding by the block their jumps
/// reach. Each group sums to `k` in a correct net.
pub fn decode_3partition(s: &Sequent, l: &Linking) -> Result<Vec<Vec<u64>>> {
    l.validate(s)?;
    if !is_net(s, l) {
        return Err(Error::Precondition("not a proof net".into()));
    }
    let (&last, values) = s.roots().split_last().ok_or_else(|| Error::Precondition("empty sequent".into()))?;
    let blocks: Vec<NodeId> = match s.kind(last) {
        Kind::Par => vec![last],
        Kind::Tensor => s.children(last).to_vec(),
        _ => return Err(Error::Precondition("last formula is not a block of ones".into())),
    };
    let mut groups = vec![vec![]; blocks.len()];
    for &r in values {
        let bs: Vec<NodeId> = s.subtree(r).filter(|&x| s.kind(x) == Kind::Bot).collect();
        let to = l.of(s, bs[0]);
        let g = blocks
            .iter()
            .position(|&k| s.subtree(k).contains(&to))
            .ok_or_else(|| Error::Precondition("jump leaves the blocks".into()))?;
        groups[g].push(bs.len() as u64 - 1);
    }
    Ok(groups)
}

/// Bidirectional search over moves of `bots` onto `targets` only, from `l`
/// to `goal`; the two nets must agree on every other bot.
pub fn local_path(
    s: &Sequent,
    l: &Linking,
    goal: &Linking,
    bots: &[NodeId],
    targets: &[NodeId],
    budget: usize,
) -> Option<RewirePath> {
    let slots: Vec<usize> = bots.iter().map(|&b| s.bot_slot(b).unwrap()).collect();
    let key = |x: &Linking| -> Vec<NodeId> { slots.iter().map(|&i| x.target(i)).collect() };
    let apply = |k: &[NodeId]| -> Linking {
        let mut out = l.clone();
        for (&i, &t) in slots.iter().zip(k) {
            out.set(i, t);
        }
        out
    };
    let (k0, k1) = (key(l), key(goal));
    if k0 == k1 {
        return Some(RewirePath::empty(l.clone()));
    }
    type Seen = HashMap<Vec<NodeId>, Option<(Vec<NodeId>, usize, NodeId)>>;
    let mut seen: [Seen; 2] = [HashMap::from([(k0.clone(), None)]), HashMap::from([(k1.clone(), None)])];
    let mut front = [vec![k0], vec![k1]];
    let trace = |seen: &Seen, mut at: Vec<NodeId>| -> Vec<(usize, NodeId, NodeId)> {
        // (bot index, from, to) in forward order from the side's start.
        let mut out = vec![];
        while let Some(Some((prev, i, to))) = seen.get(&at) {
            out.push((*i, prev[*i], *to));
            at = prev.clone();
        }
        out.reverse();
        out
    };
    while seen[0].len() + seen[1].len() < budget {
        let side = if front[0].len() <= front[1].len() { 0 } else { 1 };
        let mut next = vec![];
        for k in std::mem::take(&mut front[side]) {
            let base = apply(&k);
            for i in 0..slots.len() {
                for &t in targets {
                    if t == k[i] {
                        continue;
                    }
                    let mut k2 = k.clone();
                    k2[i] = t;
                    if seen[side].contains_key(&k2) || !is_net(s, &base.with(slots[i], t)) {
                        continue;
                    }
                    seen[side].insert(k2.clone(), Some((k.clone(), i, t)));
                    if seen[1 - side].contains_key(&k2) {
                        let (a, b) = if side == 0 { (&seen[0], &seen[1]) } else { (&seen[1], &seen[0]) };
                        let mut steps: Vec<Step> =
                            trace(a, k2.clone()).into_iter().map(|(i, _, to)| Step { bot: bots[i], to }).collect();
                        let back = trace(b, k2.clone());
                        steps.extend(back.into_iter().rev().map(|(i, from, _)| Step { bot: bots[i], to: from }));
                        if side == 1 {
                            // Built from the goal side; flip it around.
                            let p = RewirePath { start: goal.clone(), steps };
                            return Some(p.reversed(s));
                        }
                        return Some(RewirePath { start: l.clone(), steps });
                    }
                    next.push(k2);
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        front[side] = next;
    }
    None
}
