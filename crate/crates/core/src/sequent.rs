//! Formulas and sequents over the units, stored as a flat preorder arena.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Index of a node in a [`Sequent`] arena.
pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    One,
    Bot,
    Tensor,
    Par,
}

impl Kind {
    pub fn is_unit(self) -> bool {
        matches!(self, Kind::One | Kind::Bot)
    }
}

/// A formula tree as written by a caller. Names are optional until the tree
/// is placed in a [`Sequent`], which assigns path names to unnamed nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub kind: Kind,
    pub name: Option<String>,
    pub children: Vec<Formula>,
}

impl Formula {
    pub fn one() -> Self {
        Formula { kind: Kind::One, name: None, children: vec![] }
    }

    pub fn bot() -> Self {
        Formula { kind: Kind::Bot, name: None, children: vec![] }
    }

    pub fn tensor(children: Vec<Formula>) -> Self {
        Formula { kind: Kind::Tensor, name: None, children }
    }

    pub fn par(children: Vec<Formula>) -> Self {
        Formula { kind: Kind::Par, name: None, children }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// `n` copies of `f`.
    pub fn repeat(f: &Formula, n: usize) -> Vec<Formula> {
        vec![f.clone(); n]
    }

    /// Flattens same-connective chains and collapses unary connectives.
    fn normalize(self) -> Result<Formula> {
        if self.kind.is_unit() {
            if !self.children.is_empty() {
                return Err(Error::Malformed("unit with children".into()));
            }
            return Ok(self);
        }
        if self.children.is_empty() {
            return Err(Error::Malformed("connective without children".into()));
        }
        let mut kids = Vec::with_capacity(self.children.len());
        for c in self.children {
            let c = c.normalize()?;
            if c.kind == self.kind {
                if let Some(n) = &c.name {
                    return Err(Error::Malformed(format!(
                        "named `{n}` would be merged into its parent"
                    )));
                }
                kids.extend(c.children);
            } else {
                kids.push(c);
            }
        }
        if kids.len() == 1 {
            let mut only = kids.pop().unwrap();
            if let Some(n) = self.name {
                if only.name.is_some() {
                    return Err(Error::Malformed(format!("unary `{n}` over a named child")));
                }
                only.name = Some(n);
            }
            return Ok(only);
        }
        Ok(Formula { kind: self.kind, name: self.name, children: kids })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub kind: Kind,
    pub name: String,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// One past the last node of this subtree.
    pub end: NodeId,
    /// Index of the formula this node belongs to.
    pub root: usize,
    path: String,
}

/// An ordered list of formulas with globally distinct names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    nodes: Vec<Node>,
    roots: Vec<NodeId>,
    index: HashMap<String, NodeId>,
    bots: Vec<NodeId>,
    ones: Vec<NodeId>,
    slot: Vec<Option<usize>>,
}

impl Sequent {
    pub fn new(formulas: Vec<Formula>) -> Result<Sequent> {
        let mut s = Sequent {
            nodes: vec![],
            roots: vec![],
            index: HashMap::new(),
            bots: vec![],
            ones: vec![],
            slot: vec![],
        };
        for (i, f) in formulas.into_iter().enumerate() {
            let f = f.normalize()?;
            let id = s.push(f, None, i, i.to_string());
            s.roots.push(id);
        }
        for (id, n) in s.nodes.iter().enumerate() {
            if s.index.insert(n.name.clone(), id).is_some() {
                return Err(Error::DuplicateName(n.name.clone()));
            }
        }
        s.slot = vec![None; s.nodes.len()];
        for (i, &b) in s.bots.iter().enumerate() {
            s.slot[b] = Some(i);
        }
        Ok(s)
    }

    fn push(&mut self, f: Formula, parent: Option<NodeId>, root: usize, path: String) -> NodeId {
        let id = self.nodes.len();
        let name = f.name.unwrap_or_else(|| path.clone());
        self.nodes.push(Node { kind: f.kind, name, parent, children: vec![], end: 0, root, path: path.clone() });
        match f.kind {
            Kind::Bot => self.bots.push(id),
            Kind::One => self.ones.push(id),
            _ => {}
        }
        let mut kids = Vec::with_capacity(f.children.len());
        for (j, c) in f.children.into_iter().enumerate() {
            kids.push(self.push(c, Some(id), root, format!("{path}.{j}")));
        }
        self.nodes[id].children = kids;
        self.nodes[id].end = self.nodes.len();
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn kind(&self, id: NodeId) -> Kind {
        self.nodes[id].kind
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.nodes[id].name
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id].parent
    }

    /// Root node of each formula, in order.
    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    /// Bot occurrences in preorder. A bot's position here is its slot.
    pub fn bots(&self) -> &[NodeId] {
        &self.bots
    }

    /// One occurrences in preorder.
    pub fn ones(&self) -> &[NodeId] {
        &self.ones
    }

    pub fn bot_slot(&self, id: NodeId) -> Option<usize> {
        self.slot[id]
    }

    pub fn lookup(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn id(&self, name: &str) -> Result<NodeId> {
        self.lookup(name).ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    /// The nodes of the subtree at `id`, in preorder.
    pub fn subtree(&self, id: NodeId) -> std::ops::Range<NodeId> {
        id..self.nodes[id].end
    }

    /// Root node of the formula containing `id`.
    pub fn formula_root(&self, id: NodeId) -> NodeId {
        self.roots[self.nodes[id].root]
    }

    /// The subtree at `id` as a [`Formula`] with every name explicit.
    pub fn formula(&self, id: NodeId) -> Formula {
        let n = &self.nodes[id];
        Formula {
            kind: n.kind,
            name: Some(n.name.clone()),
            children: n.children.iter().map(|&c| self.formula(c)).collect(),
        }
    }

    /// A new sequent made of the given subtrees, keeping their names.
    pub fn restrict(&self, roots: &[NodeId]) -> Sequent {
        Sequent::new(roots.iter().map(|&r| self.formula(r)).collect())
            .expect("subtrees of a sequent form a sequent")
    }

    pub fn balance(&self) -> i64 {
        let pars: usize = self
            .nodes
            .iter()
            .filter(|n| n.kind == Kind::Par)
            .map(|n| n.children.len() - 1)
            .sum();
        self.bots.len() as i64 - pars as i64 - (self.roots.len() as i64 - 1)
    }

    pub fn is_basic(&self) -> bool {
        self.nodes.iter().all(|n| n.kind != Kind::Par)
    }

    fn write_node(&self, id: NodeId, out: &mut String, in_tensor: bool) {
        let n = &self.nodes[id];
        let show_name = n.name != n.path;
        match n.kind {
            Kind::One => out.push('1'),
            Kind::Bot => out.push_str("bot"),
            Kind::Tensor | Kind::Par => {
                let wrap = show_name || (in_tensor && n.kind == Kind::Par);
                if wrap {
                    out.push('(');
                }
                let sep = if n.kind == Kind::Tensor { '*' } else { '|' };
                for (i, &c) in n.children.iter().enumerate() {
                    if i > 0 {
                        out.push(sep);
                    }
                    self.write_node(c, out, n.kind == Kind::Tensor);
                }
                if wrap {
                    out.push(')');
                }
            }
        }
        if show_name {
            out.push(':');
            out.push_str(&n.name);
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, &r) in self.roots.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            self.write_node(r, &mut out, false);
        }
        f.write_str(&out)
    }
}

impl std::str::FromStr for Sequent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Sequent> {
        parse_sequent(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sequent(&mut self) -> Result<Vec<Formula>> {
        let mut fs = vec![self.formula()?];
        while self.eat(b',') {
            fs.push(self.formula()?);
        }
        if self.peek().is_some() {
            return self.err("unexpected character");
        }
        Ok(fs)
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut ts = vec![self.term()?];
        while self.eat(b'|') {
            ts.push(self.term()?);
        }
        Ok(if ts.len() == 1 { ts.pop().unwrap() } else { Formula::par(ts) })
    }

    fn term(&mut self) -> Result<Formula> {
        let mut xs = vec![self.atom()?];
        while self.eat(b'*') {
            xs.push(self.atom()?);
        }
        Ok(if xs.len() == 1 { xs.pop().unwrap() } else { Formula::tensor(xs) })
    }

    fn atom(&mut self) -> Result<Formula> {
        let f = match self.peek() {
            Some(b'1') => {
                self.pos += 1;
                Formula::one()
            }
            Some(b'b') if self.src[self.pos..].starts_with(b"bot") => {
                self.pos += 3;
                Formula::bot()
            }
            Some(b'(') => {
                self.pos += 1;
                let f = self.formula()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                f
            }
            Some(_) => return self.err("expected `1`, `bot` or `(`"),
            None => return self.err("unexpected end of input"),
        };
        if self.eat(b':') {
            let start = self.pos;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || matches!(self.src[self.pos], b'_' | b'.'))
            {
                self.pos += 1;
            }
            if start == self.pos {
                return self.err("empty name");
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
            return Ok(f.named(name));
        }
        Ok(f)
    }
}

/// Parses the ASCII sequent syntax: `,` separates formulas, `|` is par,
/// `*` is tensor, `1` and `bot` are units, `:name` names an atom or group.
pub fn parse_sequent(text: &str) -> Result<Sequent> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    Sequent::new(p.sequent()?)
}

pub fn print_sequent(s: &Sequent) -> String {
    s.to_string()
}

pub fn balance(s: &Sequent) -> i64 {
    s.balance()
}

pub fn is_basic(s: &Sequent) -> bool {
    s.is_basic()
}
