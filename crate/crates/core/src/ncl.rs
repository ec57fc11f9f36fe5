//! Nondeterministic constraint logic: weighted graphs whose edges are
//! oriented towards one endpoint, subject to inflow constraints.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub constraint: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    /// One or two vertex indices.
    pub ends: Vec<usize>,
    pub weight: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

/// For each edge, the vertex it points to, or `None` for an undirected edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(pub Vec<Option<usize>>);

impl Configuration {
    pub fn is_total(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    pub fn get(&self, e: usize) -> Option<usize> {
        self.0[e]
    }

    pub fn with(&self, e: usize, v: Option<usize>) -> Configuration {
        let mut c = self.clone();
        c.0[e] = v;
        c
    }
}

impl ConstraintGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, id: impl Into<String>, constraint: u32) -> usize {
        self.vertices.push(Vertex { id: id.into(), constraint });
        self.vertices.len() - 1
    }

    pub fn add_edge(&mut self, id: impl Into<String>, ends: &[usize], weight: u32) -> usize {
        self.edges.push(Edge { id: id.into(), ends: ends.to_vec(), weight });
        self.edges.len() - 1
    }

    pub fn vertex(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Checks endpoint references, endpoint counts, weights and id uniqueness.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for v in &self.vertices {
            if !seen.insert(v.id.as_str()) {
                return Err(Error::DuplicateName(v.id.clone()));
            }
        }
        let mut seen = HashSet::new();
        for e in &self.edges {
            if !seen.insert(e.id.as_str()) {
                return Err(Error::DuplicateName(e.id.clone()));
            }
            if e.ends.is_empty() || e.ends.len() > 2 || e.ends.iter().any(|&v| v >= self.vertices.len()) {
                return Err(Error::Malformed(format!("edge `{}` has bad endpoints", e.id)));
            }
            if e.weight == 0 {
                return Err(Error::Malformed(format!("edge `{}` has weight 0", e.id)));
            }
        }
        Ok(())
    }

    /// Edge indices touching vertex `v`.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].ends.contains(&v)).collect()
    }

    /// Total weight of each vertex's constraint, summed.
    pub fn total_constraint(&self) -> u32 {
        self.vertices.iter().map(|v| v.constraint).sum()
    }

    pub fn total_weight(&self) -> u32 {
        self.edges.iter().map(|e| e.weight).sum()
    }
}

pub fn inflow(g: &ConstraintGraph, c: &Configuration) -> Vec<u32> {
    let mut f = vec![0; g.vertices.len()];
    for (e, t) in c.0.iter().enumerate() {
        if let Some(v) = t {
            f[*v] += g.edges[e].weight;
        }
    }
    f
}

/// Orientations name endpoints and every vertex meets its constraint.
pub fn validate_config(g: &ConstraintGraph, c: &Configuration) -> bool {
    c.0.len() == g.edges.len()
        && c.0.iter().enumerate().all(|(e, t)| t.is_none_or(|v| g.edges[e].ends.contains(&v)))
        && inflow(g, c).iter().zip(&g.vertices).all(|(f, v)| *f >= v.constraint)
}

/// Whether `e` may be left undirected.
pub fn is_mobile(g: &ConstraintGraph, c: &Configuration, e: usize) -> bool {
    validate_config(g, &c.with(e, None))
}

/// All configurations one change away, by edge and then by value with the
/// undirected value last.
pub fn steps(g: &ConstraintGraph, c: &Configuration) -> Vec<Configuration> {
    let mut out = vec![];
    for (e, edge) in g.edges.iter().enumerate() {
        let vals = edge.ends.iter().map(|&v| Some(v)).chain([None]);
        for val in vals {
            if val != c.0[e] {
                let next = c.with(e, val);
                if validate_config(g, &next) {
                    out.push(next);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reconfiguration {
    /// Configurations from start to end inclusive.
    Found(Vec<Configuration>),
    No,
    Unknown,
}

/// Breadth-first search from `from` to `to`. With `partial` the search may
/// pass through configurations with undirected edges.
pub fn reconfigurable_with(
    g: &ConstraintGraph,
    from: &Configuration,
    to: &Configuration,
    budget: usize,
    partial: bool,
) -> Result<Reconfiguration> {
    for c in [from, to] {
        if !validate_config(g, c) || !c.is_total() {
            return Err(Error::Precondition("endpoints must be valid total configurations".into()));
        }
    }
    let mut parent: HashMap<Configuration, Option<Configuration>> = HashMap::from([(from.clone(), None)]);
    let mut q = VecDeque::from([from.clone()]);
    while let Some(c) = q.pop_front() {
        if &c == to {
            let mut path = vec![c.clone()];
            let mut at = c;
            while let Some(Some(p)) = parent.get(&at) {
                path.push(p.clone());
                at = p.clone();
            }
            path.reverse();
            return Ok(Reconfiguration::Found(path));
        }
        for n in steps(g, &c) {
            if !partial && !n.is_total() {
                continue;
            }
            if !parent.contains_key(&n) {
                if parent.len() >= budget {
                    return Ok(Reconfiguration::Unknown);
                }
                parent.insert(n.clone(), Some(c.clone()));
                q.push_back(n);
            }
        }
    }
    Ok(Reconfiguration::No)
}

pub fn reconfigurable(
    g: &ConstraintGraph,
    from: &Configuration,
    to: &Configuration,
    budget: usize,
) -> Result<Reconfiguration> {
    reconfigurable_with(g, from, to, budget, true)
}

/// Checks that consecutive configurations differ on exactly one edge and
/// all are valid.
pub fn check_path(g: &ConstraintGraph, path: &[Configuration]) -> Result<()> {
    for (i, c) in path.iter().enumerate() {
        if !validate_config(g, c) {
            return Err(Error::Step { step: i, msg: "invalid configuration".into() });
        }
        if i > 0 {
            let diff = c.0.iter().zip(&path[i - 1].0).filter(|(a, b)| a != b).count();
            if diff != 1 {
                return Err(Error::Step { step: i, msg: format!("{diff} edges change") });
            }
        }
    }
    Ok(())
}

/// Replaces a path through partial configurations by one through total
/// configurations with the same endpoints: an undirected edge keeps its last
/// direction, and repeated configurations are dropped.
pub fn totalize_path(g: &ConstraintGraph, path: &[Configuration]) -> Result<Vec<Configuration>> {
    check_path(g, path)?;
    let (Some(first), Some(last)) = (path.first(), path.last()) else {
        return Ok(vec![]);
    };
    if !first.is_total() || !last.is_total() {
        return Err(Error::Precondition("endpoints must be total".into()));
    }
    let mut cur = first.clone();
    let mut out = vec![cur.clone()];
    for c in &path[1..] {
        for (e, t) in c.0.iter().enumerate() {
            if t.is_some() {
                cur.0[e] = *t;
            }
        }
        if out.last() != Some(&cur) {
            out.push(cur.clone());
        }
    }
    Ok(out)
}

/// The conjunction gadget: `u` needs inflow 2, from the weight-2 edge or
/// from both weight-1 edges. Returns the graph and the four configurations
/// of the standard sequence that turns the weight-2 edge outward.
pub fn gadget_and() -> (ConstraintGraph, Vec<(String, Configuration)>) {
    let mut g = ConstraintGraph::new();
    let u = g.add_vertex("u", 2);
    let p = g.add_vertex("p", 0);
    let q = g.add_vertex("q", 0);
    let r = g.add_vertex("r", 0);
    g.add_edge("e1", &[p, u], 1);
    g.add_edge("e2", &[q, u], 1);
    g.add_edge("e3", &[u, r], 2);
    let c = |a, b, d| Configuration(vec![Some(a), Some(b), Some(d)]);
    let configs = vec![
        ("gamma1".to_string(), c(p, q, u)),
        ("gamma2".to_string(), c(u, q, u)),
        ("gamma3".to_string(), c(u, u, u)),
        ("gamma4".to_string(), c(u, u, r)),
    ];
    (g, configs)
}

/// Deepest supported boat nesting.
pub const MAX_BOAT_DEPTH: usize = 6;

/// A two-terminal gadget whose terminal reversal forces its central edge to
/// be inverted twice; nesting a copy in place of the central edge doubles
/// the count.
#[derive(Clone, Debug)]
pub struct Boat {
    pub graph: ConstraintGraph,
    pub start: Configuration,
    pub depth: usize,
    pub top: usize,
    pub bottom: usize,
    /// Edge from `top` into the outermost gadget, and its inner endpoint.
    pub top_edge: usize,
    pub top_entry: usize,
    /// Edge from the outermost gadget to `bottom`.
    pub bottom_edge: usize,
    /// The innermost central edge.
    pub central: usize,
}

impl Boat {
    /// The terminal edges point into the gadget at the top and out of it at
    /// the bottom.
    pub fn is_reversed(&self, c: &Configuration) -> bool {
        c.0[self.top_edge] == Some(self.top_entry) && c.0[self.bottom_edge] == Some(self.bottom)
    }
}

// Internal vertices p, l, r, q, m with constraint 2. The central edge joins
// r and l; the top terminal enters at p and the bottom one leaves from q.
const BOAT_EDGES: [(usize, usize, u32); 6] = [(1, 4, 2), (1, 3, 1), (4, 0, 1), (0, 2, 1), (4, 1, 1), (2, 3, 1)];
// Start orientation of each edge above: index into the endpoint pair.
const BOAT_START: [usize; 6] = [1, 0, 1, 0, 1, 0];
const BOAT_NAMES: [&str; 5] = ["p", "l", "r", "q", "m"];

pub fn gadget_boat(depth: usize) -> Result<Boat> {
    if depth > MAX_BOAT_DEPTH {
        return Err(Error::Precondition(format!("boat depth at most {MAX_BOAT_DEPTH}")));
    }
    let mut g = ConstraintGraph::new();
    let top = g.add_vertex("top", 0);
    let bottom = g.add_vertex("bottom", 0);
    let mut start = vec![];
    let (mut hi, mut lo) = (top, bottom);
    let mut outer = None;
    for level in 0..=depth {
        let name = |v: &str| format!("b{level}.{v}");
        let vs: Vec<usize> = BOAT_NAMES.iter().map(|n| g.add_vertex(name(n), 2)).collect();
        let t = g.add_edge(name("top"), &[hi, vs[0]], 2);
        start.push(Some(hi));
        for (i, &(a, b, w)) in BOAT_EDGES.iter().enumerate() {
            g.add_edge(name(&format!("e{i}")), &[vs[a], vs[b]], w);
            start.push(Some(vs[if BOAT_START[i] == 0 { a } else { b }]));
        }
        let b = g.add_edge(name("bottom"), &[vs[3], lo], 2);
        start.push(Some(vs[3]));
        outer.get_or_insert((t, vs[0], b));
        // The central edge points at r at the start, so r acts as the next
        // gadget's top terminal.
        hi = vs[2];
        lo = vs[1];
    }
    let central = g.add_edge(format!("b{depth}.central"), &[hi, lo], 2);
    start.push(Some(hi));
    let (top_edge, top_entry, bottom_edge) = outer.unwrap();
    Ok(Boat { graph: g, start: Configuration(start), depth, top, bottom, top_edge, top_entry, bottom_edge, central })
}

/// Fewest inversions of the central edge over all reconfiguration sequences
/// from the start to a reversed configuration, with a witness sequence.
/// Searches total configurations with a 0-1 breadth-first search.
pub fn min_central_inversions(b: &Boat) -> Option<(usize, Vec<Configuration>)> {
    let g = &b.graph;
    let m = g.edges.len();
    assert!(m <= 64 && g.edges.iter().all(|e| e.ends.len() == 2));
    // Bit e set means edge e points at its second endpoint.
    let encode = |c: &Configuration| -> u64 {
        (0..m).filter(|&e| c.0[e] == Some(g.edges[e].ends[1])).fold(0, |acc, e| acc | 1 << e)
    };
    let head = |x: u64, e: usize| g.edges[e].ends[((x >> e) & 1) as usize];
    let inc: Vec<Vec<usize>> = (0..g.vertices.len()).map(|v| g.incident(v)).collect();
    let inflow_at = |x: u64, v: usize| -> u32 {
        inc[v].iter().filter(|&&e| head(x, e) == v).map(|&e| g.edges[e].weight).sum()
    };
    let done = |x: u64| head(x, b.top_edge) == b.top_entry && head(x, b.bottom_edge) == b.bottom;
    let s0 = encode(&b.start);
    let mut dist: HashMap<u64, (usize, u64)> = HashMap::from([(s0, (0, s0))]);
    let mut dq = VecDeque::from([s0]);
    let mut settled = HashSet::new();
    while let Some(x) = dq.pop_front() {
        if !settled.insert(x) {
            continue;
        }
        let dx = dist[&x].0;
        if done(x) {
            let mut path = vec![x];
            let mut at = x;
            while at != s0 {
                at = dist[&at].1;
                path.push(at);
            }
            path.reverse();
            let decode = |x: u64| Configuration((0..m).map(|e| Some(head(x, e))).collect());
            return Some((dx, path.into_iter().map(decode).collect()));
        }
        for e in 0..m {
            let from = head(x, e);
            if inflow_at(x, from) - g.edges[e].weight < g.vertices[from].constraint {
                continue;
            }
            let y = x ^ (1 << e);
            let cost = usize::from(e == b.central);
            if dist.get(&y).is_none_or(|&(d, _)| d > dx + cost) {
                dist.insert(y, (dx + cost, x));
                if cost == 1 {
                    dq.push_back(y);
                } else {
                    dq.push_front(y);
                }
            }
        }
    }
    None
}

/// Number of times the central edge changes direction along a path.
pub fn central_inversions(b: &Boat, path: &[Configuration]) -> usize {
    path.windows(2).filter(|w| w[0].0[b.central] != w[1].0[b.central]).count()
}
